use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Path-distance below which two points are the same point.
pub const POINT_TOL: f64 = 1e-9;
/// Parameters this close to 0 or 1 are read as the endpoint vertex.
pub const PARAM_EPS: f64 = 1e-12;

/// On-disk graph description: vertex ids plus edges with lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<u32>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: u32,
    pub from: u32,
    pub to: u32,
    pub length: f64,
}

impl GraphSpec {
    /// Spec with vertices `0..n` and edges numbered in the given order.
    pub fn from_edges(n_vertices: u32, edges: &[(u32, u32, f64)]) -> Self {
        GraphSpec {
            vertices: (0..n_vertices).collect(),
            edges: edges
                .iter()
                .enumerate()
                .map(|(i, &(from, to, length))| EdgeSpec { id: i as u32, from, to, length })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub id: u32,
    pub from: usize,
    pub to: usize,
    pub length: f64,
}

/// A point of a metric graph: an edge index and an arc-length-normalized
/// parameter. `t = 0` is the edge's `from` vertex and `t = 1` its `to` vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphPoint {
    pub edge: usize,
    pub t: f64,
}

impl GraphPoint {
    pub fn new(edge: usize, t: f64) -> Self {
        GraphPoint { edge, t }
    }
}

/// A straight traversal of one edge from parameter `from` to parameter `to`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub edge: usize,
    pub from: f64,
    pub to: f64,
}

impl Segment {
    pub fn new(edge: usize, from: f64, to: f64) -> Self {
        Segment { edge, from, to }
    }

    pub fn reversed(&self) -> Self {
        Segment { edge: self.edge, from: self.to, to: self.from }
    }

    pub fn start(&self) -> GraphPoint {
        GraphPoint::new(self.edge, self.from)
    }

    pub fn end(&self) -> GraphPoint {
        GraphPoint::new(self.edge, self.to)
    }
}

/// A direction leaving a point along one edge. `forward` means moving
/// towards increasing parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Germ {
    pub edge: usize,
    pub forward: bool,
}

/// A finite metric graph. Immutable after construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct MetricGraph {
    vertex_ids: Vec<u32>,
    edges: Vec<Edge>,
    stars: Vec<Vec<Germ>>,
    dist: Vec<Vec<f64>>,
    next: Vec<Vec<Option<(usize, usize)>>>,
}

impl PartialEq for MetricGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_ids == other.vertex_ids && self.edges == other.edges
    }
}

impl TryFrom<GraphSpec> for MetricGraph {
    type Error = Error;

    fn try_from(spec: GraphSpec) -> Result<Self> {
        MetricGraph::new(&spec)
    }
}

impl From<MetricGraph> for GraphSpec {
    fn from(g: MetricGraph) -> Self {
        g.spec()
    }
}

impl MetricGraph {
    pub fn new(spec: &GraphSpec) -> Result<Self> {
        if spec.edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut index: BTreeMap<u32, usize> = BTreeMap::new();
        for (i, &v) in spec.vertices.iter().enumerate() {
            if index.insert(v, i).is_some() {
                return Err(Error::DuplicateId(v));
            }
        }
        let mut edge_ids = BTreeSet::new();
        let mut edges = Vec::with_capacity(spec.edges.len());
        for (i, e) in spec.edges.iter().enumerate() {
            if !edge_ids.insert(e.id) {
                return Err(Error::DuplicateId(e.id));
            }
            if !(e.length > 0.0) || !e.length.is_finite() {
                return Err(Error::NonPositiveLength(i, e.length));
            }
            let from = *index.get(&e.from).ok_or(Error::DanglingEdge { edge: i, vertex: e.from })?;
            let to = *index.get(&e.to).ok_or(Error::DanglingEdge { edge: i, vertex: e.to })?;
            edges.push(Edge { id: e.id, from, to, length: e.length });
        }
        let n = spec.vertices.len();
        let mut stars = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            stars[e.from].push(Germ { edge: i, forward: true });
            stars[e.to].push(Germ { edge: i, forward: false });
        }
        if let Some(v) = stars.iter().position(|s| s.is_empty()) {
            return Err(Error::IsolatedVertex(spec.vertices[v]));
        }

        let mut dist = vec![vec![f64::INFINITY; n]; n];
        let mut next = vec![vec![None; n]; n];
        for v in 0..n {
            dist[v][v] = 0.0;
        }
        for (i, e) in edges.iter().enumerate() {
            if e.from == e.to {
                continue;
            }
            if e.length < dist[e.from][e.to] {
                dist[e.from][e.to] = e.length;
                dist[e.to][e.from] = e.length;
                next[e.from][e.to] = Some((i, e.to));
                next[e.to][e.from] = Some((i, e.from));
            }
        }
        for k in 0..n {
            for i in 0..n {
                if dist[i][k].is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let via = dist[i][k] + dist[k][j];
                    if via < dist[i][j] {
                        dist[i][j] = via;
                        next[i][j] = next[i][k];
                    }
                }
            }
        }
        Ok(MetricGraph { vertex_ids: spec.vertices.clone(), edges, stars, dist, next })
    }

    pub fn spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.vertex_ids.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    id: e.id,
                    from: self.vertex_ids[e.from],
                    to: self.vertex_ids[e.to],
                    length: e.length,
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_id(&self, v: usize) -> u32 {
        self.vertex_ids[v]
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn length(&self, e: usize) -> f64 {
        self.edges[e].length
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Germs leaving vertex `v`; a self-loop contributes two.
    pub fn star(&self, v: usize) -> &[Germ] {
        &self.stars[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.stars[v].len()
    }

    pub fn vertex_distance(&self, u: usize, v: usize) -> f64 {
        self.dist[u][v]
    }

    pub fn component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            for v in 0..n {
                if self.dist[s][v].is_finite() {
                    seen[v] = true;
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edge_count() + 1 == self.vertex_count()
    }

    pub fn check_point(&self, p: &GraphPoint) -> Result<()> {
        if p.edge >= self.edges.len() {
            return Err(Error::InvalidPoint(format!("edge {} does not exist", p.edge)));
        }
        if !(0.0..=1.0).contains(&p.t) {
            return Err(Error::InvalidPoint(format!("parameter {} outside [0,1]", p.t)));
        }
        Ok(())
    }

    /// The vertex a point is identified with, if any.
    pub fn vertex_at(&self, p: &GraphPoint) -> Option<usize> {
        let e = &self.edges[p.edge];
        if p.t <= PARAM_EPS {
            Some(e.from)
        } else if p.t >= 1.0 - PARAM_EPS {
            Some(e.to)
        } else {
            None
        }
    }

    pub fn vertex_point(&self, v: usize) -> GraphPoint {
        let g = self.stars[v][0];
        GraphPoint::new(g.edge, if g.forward { 0.0 } else { 1.0 })
    }

    /// Canonical representative: vertices are reported on their first germ.
    pub fn canonical(&self, p: &GraphPoint) -> GraphPoint {
        match self.vertex_at(p) {
            Some(v) => self.vertex_point(v),
            None => *p,
        }
    }

    /// Number of arcs emanating from `p`.
    pub fn point_order(&self, p: &GraphPoint) -> Result<usize> {
        self.check_point(p)?;
        Ok(match self.vertex_at(p) {
            Some(v) => self.degree(v),
            None => 2,
        })
    }

    /// Germs leaving `p`: two for interior points, the vertex star otherwise.
    pub fn germs_at(&self, p: &GraphPoint) -> Vec<Germ> {
        match self.vertex_at(p) {
            Some(v) => self.stars[v].clone(),
            None => vec![Germ { edge: p.edge, forward: true }, Germ { edge: p.edge, forward: false }],
        }
    }

    fn point_to_vertex(&self, p: &GraphPoint, v: usize) -> f64 {
        let e = &self.edges[p.edge];
        let a = p.t * e.length + self.dist[e.from][v];
        let b = (1.0 - p.t) * e.length + self.dist[e.to][v];
        a.min(b)
    }

    /// Shortest-path distance; `f64::INFINITY` for points in different components.
    pub fn path_distance(&self, p: &GraphPoint, q: &GraphPoint) -> f64 {
        let ep = &self.edges[p.edge];
        let eq = &self.edges[q.edge];
        let mut best = f64::INFINITY;
        if p.edge == q.edge {
            best = (p.t - q.t).abs() * ep.length;
        }
        let p_ends = [(ep.from, p.t * ep.length), (ep.to, (1.0 - p.t) * ep.length)];
        let q_ends = [(eq.from, q.t * eq.length), (eq.to, (1.0 - q.t) * eq.length)];
        for &(a, ca) in &p_ends {
            for &(b, cb) in &q_ends {
                let d = ca + self.dist[a][b] + cb;
                if d < best {
                    best = d;
                }
            }
        }
        best
    }

    pub fn same_point(&self, p: &GraphPoint, q: &GraphPoint) -> bool {
        self.path_distance(p, q) < POINT_TOL
    }

    /// Length of the shortest path from `p` to `q` that leaves `p` along `germ`.
    pub fn distance_via_germ(&self, p: &GraphPoint, germ: Germ, q: &GraphPoint) -> f64 {
        let e = &self.edges[germ.edge];
        let t0 = if germ.edge == p.edge && self.vertex_at(p).is_none() {
            p.t
        } else if germ.forward {
            0.0
        } else {
            1.0
        };
        if q.edge == germ.edge {
            let ahead = if germ.forward { q.t - t0 } else { t0 - q.t };
            if ahead > 0.0 {
                return ahead * e.length;
            }
        }
        let (w, cost) = if germ.forward { (e.to, (1.0 - t0) * e.length) } else { (e.from, t0 * e.length) };
        cost + self.point_to_vertex(q, w)
    }

    /// Shortest path from `p` to `q` as a chain of segments (empty when
    /// the points coincide).
    pub fn shortest_path(&self, p: &GraphPoint, q: &GraphPoint) -> Result<Vec<Segment>> {
        let ep = self.edges[p.edge];
        let eq = self.edges[q.edge];
        let mut best = f64::INFINITY;
        let mut choice: Option<(usize, usize)> = None;
        if p.edge == q.edge {
            best = (p.t - q.t).abs() * ep.length;
        }
        let p_ends = [(ep.from, p.t * ep.length, 0.0), (ep.to, (1.0 - p.t) * ep.length, 1.0)];
        let q_ends = [(eq.from, q.t * eq.length, 0.0), (eq.to, (1.0 - q.t) * eq.length, 1.0)];
        for (i, &(a, ca, _)) in p_ends.iter().enumerate() {
            for (j, &(b, cb, _)) in q_ends.iter().enumerate() {
                let d = ca + self.dist[a][b] + cb;
                if d < best - 1e-15 {
                    best = d;
                    choice = Some((i, j));
                }
            }
        }
        if best.is_infinite() {
            return Err(Error::Disconnected);
        }
        let Some((i, j)) = choice else {
            if (p.t - q.t).abs() * ep.length < PARAM_EPS {
                return Ok(Vec::new());
            }
            return Ok(vec![Segment::new(p.edge, p.t, q.t)]);
        };
        let (a, _, ta) = p_ends[i];
        let (b, _, tb) = q_ends[j];
        let mut path = Vec::new();
        if (p.t - ta).abs() > PARAM_EPS {
            path.push(Segment::new(p.edge, p.t, ta));
        }
        let mut v = a;
        while v != b {
            let (edge, w) = self.next[v][b].ok_or(Error::Disconnected)?;
            let e = &self.edges[edge];
            if e.from == v {
                path.push(Segment::new(edge, 0.0, 1.0));
            } else {
                path.push(Segment::new(edge, 1.0, 0.0));
            }
            v = w;
        }
        if (q.t - tb).abs() > PARAM_EPS {
            path.push(Segment::new(q.edge, tb, q.t));
        }
        Ok(path)
    }

    /// Parameter intervals `(edge, lo, hi)` of all points within `radius` of `p`.
    pub fn ball(&self, p: &GraphPoint, radius: f64) -> Vec<(usize, f64, f64)> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let mut intervals: Vec<(f64, f64)> = Vec::new();
            let d_from = self.point_to_vertex(p, e.from);
            let d_to = self.point_to_vertex(p, e.to);
            if d_from <= radius {
                intervals.push((0.0, ((radius - d_from) / e.length).min(1.0)));
            }
            if d_to <= radius {
                intervals.push(((1.0 - (radius - d_to) / e.length).max(0.0), 1.0));
            }
            if i == p.edge {
                let w = radius / e.length;
                intervals.push(((p.t - w).max(0.0), (p.t + w).min(1.0)));
            }
            intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut merged: Vec<(f64, f64)> = Vec::new();
            for (lo, hi) in intervals {
                match merged.last_mut() {
                    Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                    _ => merged.push((lo, hi)),
                }
            }
            out.extend(merged.into_iter().map(|(lo, hi)| (i, lo, hi)));
        }
        out
    }

    /// Points spaced at most `step` apart (in arc length) along every edge.
    pub fn grid(&self, step: f64) -> Vec<GraphPoint> {
        let mut pts = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let n = (e.length / step).ceil().max(1.0) as usize;
            for k in 0..=n {
                pts.push(GraphPoint::new(i, k as f64 / n as f64));
            }
        }
        pts
    }

    /// Arc length of a chain of segments.
    pub fn path_length(&self, path: &[Segment]) -> f64 {
        path.iter().map(|s| (s.to - s.from).abs() * self.edges[s.edge].length).sum()
    }
}
