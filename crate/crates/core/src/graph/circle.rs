use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::metric::{GraphPoint, MetricGraph, Segment};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Traversal {
    pub edge: usize,
    pub forward: bool,
}

impl Traversal {
    fn tail(&self, g: &MetricGraph) -> usize {
        let e = g.edge(self.edge);
        if self.forward {
            e.from
        } else {
            e.to
        }
    }

    fn head(&self, g: &MetricGraph) -> usize {
        let e = g.edge(self.edge);
        if self.forward {
            e.to
        } else {
            e.from
        }
    }
}

/// A simple closed curve in a graph, stored as a cyclic chain of directed
/// edge traversals. Arc coordinates run from the tail of the first traversal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub traversals: Vec<Traversal>,
    pub length: f64,
    offsets: Vec<f64>,
}

impl Circle {
    pub fn new(g: &MetricGraph, traversals: Vec<Traversal>) -> Result<Self> {
        if traversals.is_empty() {
            return Err(Error::NotACircle("no edges".into()));
        }
        let mut seen_edges = BTreeSet::new();
        let mut seen_vertices = BTreeSet::new();
        for (i, tr) in traversals.iter().enumerate() {
            if tr.edge >= g.edge_count() {
                return Err(Error::NotACircle(format!("edge {} does not exist", tr.edge)));
            }
            if !seen_edges.insert(tr.edge) {
                return Err(Error::NotACircle(format!("edge {} used twice", tr.edge)));
            }
            if !seen_vertices.insert(tr.tail(g)) {
                return Err(Error::NotACircle(format!("vertex {} repeated", tr.tail(g))));
            }
            let next = &traversals[(i + 1) % traversals.len()];
            if tr.head(g) != next.tail(g) {
                return Err(Error::NotACircle(format!("traversal {i} does not connect")));
            }
        }
        let mut offsets = Vec::with_capacity(traversals.len() + 1);
        let mut acc = 0.0;
        for tr in &traversals {
            offsets.push(acc);
            acc += g.length(tr.edge);
        }
        offsets.push(acc);
        Ok(Circle { traversals, length: acc, offsets })
    }

    /// The circle made of the given edges, oriented canonically.
    pub fn from_edge_set(g: &MetricGraph, edges: &[usize]) -> Result<Self> {
        let set: BTreeSet<usize> = edges.iter().copied().collect();
        let first = *set.iter().next().ok_or_else(|| Error::NotACircle("no edges".into()))?;
        let mut trav = vec![Traversal { edge: first, forward: true }];
        let mut used = BTreeSet::from([first]);
        let start = trav[0].tail(g);
        let mut at = trav[0].head(g);
        while at != start {
            let germ = g
                .star(at)
                .iter()
                .find(|germ| set.contains(&germ.edge) && !used.contains(&germ.edge))
                .copied()
                .ok_or_else(|| Error::NotACircle("edge set is not a cycle".into()))?;
            used.insert(germ.edge);
            let tr = Traversal { edge: germ.edge, forward: germ.forward };
            at = tr.head(g);
            trav.push(tr);
        }
        if used.len() != set.len() {
            return Err(Error::NotACircle("edge set is not a single cycle".into()));
        }
        Circle::new(g, trav)
    }

    /// Arc coordinate where traversal `k` starts.
    pub fn offset(&self, k: usize) -> f64 {
        self.offsets[k]
    }

    /// Vertex at the tail of traversal `k`.
    pub fn tail_vertex(&self, g: &MetricGraph, k: usize) -> usize {
        self.traversals[k].tail(g)
    }

    pub fn edges(&self) -> BTreeSet<usize> {
        self.traversals.iter().map(|t| t.edge).collect()
    }

    pub fn contains_edge(&self, e: usize) -> bool {
        self.traversals.iter().any(|t| t.edge == e)
    }

    pub fn vertices(&self, g: &MetricGraph) -> BTreeSet<usize> {
        self.traversals.iter().map(|t| t.tail(g)).collect()
    }

    pub fn is_disjoint_from(&self, g: &MetricGraph, other: &Circle) -> bool {
        self.vertices(g).is_disjoint(&other.vertices(g)) && self.edges().is_disjoint(&other.edges())
    }

    pub fn contains_point(&self, g: &MetricGraph, p: &GraphPoint) -> bool {
        self.arc_coordinate(g, p).is_some()
    }

    /// Position of `p` along the circle in `[0, length)`, if `p` lies on it.
    pub fn arc_coordinate(&self, g: &MetricGraph, p: &GraphPoint) -> Option<f64> {
        if let Some(v) = g.vertex_at(p) {
            let k = self.traversals.iter().position(|t| t.tail(g) == v)?;
            return Some(self.offsets[k]);
        }
        let k = self.traversals.iter().position(|t| t.edge == p.edge)?;
        let len = g.length(p.edge);
        let local = if self.traversals[k].forward { p.t } else { 1.0 - p.t };
        Some((self.offsets[k] + local * len).rem_euclid(self.length))
    }

    /// The point at arc coordinate `s` (taken modulo the length).
    pub fn point_at(&self, g: &MetricGraph, s: f64) -> GraphPoint {
        let s = s.rem_euclid(self.length);
        let k = self.locate_forward(s);
        self.local_point(g, k, s - self.offsets[k])
    }

    fn local_point(&self, g: &MetricGraph, k: usize, local: f64) -> GraphPoint {
        let tr = self.traversals[k];
        let u = (local / g.length(tr.edge)).clamp(0.0, 1.0);
        GraphPoint::new(tr.edge, if tr.forward { u } else { 1.0 - u })
    }

    // traversal k with offsets[k] <= s < offsets[k+1]
    fn locate_forward(&self, s: f64) -> usize {
        let k = self.offsets.partition_point(|&o| o <= s);
        k.saturating_sub(1).min(self.traversals.len() - 1)
    }

    // traversal k with offsets[k] < s <= offsets[k+1]
    fn locate_backward(&self, s: f64) -> usize {
        if s <= 0.0 {
            return self.traversals.len() - 1;
        }
        let k = self.offsets.partition_point(|&o| o < s);
        k.saturating_sub(1).min(self.traversals.len() - 1)
    }

    /// Path along the circle from arc coordinate `s0` to `s1`, moving forward
    /// when `s1 > s0` and backward otherwise. Coordinates need not be reduced.
    pub fn arc_path(&self, g: &MetricGraph, s0: f64, s1: f64) -> Vec<Segment> {
        let mut out = Vec::new();
        let forward = s1 >= s0;
        let mut s = s0;
        let tiny = 1e-14 * self.length.max(1.0);
        while (s1 - s).abs() > tiny {
            let mut sn = s.rem_euclid(self.length);
            if self.length - sn < tiny {
                sn = 0.0;
            }
            let (k, room) = if forward {
                let k = self.locate_forward(sn);
                (k, self.offsets[k + 1] - sn)
            } else {
                let sb = if sn < tiny { self.length } else { sn };
                let k = self.locate_backward(sb);
                (k, sb - self.offsets[k])
            };
            let step = room.min((s1 - s).abs());
            let tr = self.traversals[k];
            let len = g.length(tr.edge);
            let local0 = if forward { sn - self.offsets[k] } else { (if sn < tiny { self.length } else { sn }) - self.offsets[k] };
            let local1 = if forward { local0 + step } else { local0 - step };
            let to_t = |local: f64| {
                let u = (local / len).clamp(0.0, 1.0);
                if tr.forward {
                    u
                } else {
                    1.0 - u
                }
            };
            if step > tiny {
                out.push(Segment::new(tr.edge, to_t(local0), to_t(local1)));
            }
            s = if forward { s + step.max(tiny) } else { s - step.max(tiny) };
            if (forward && s > s1) || (!forward && s < s1) {
                break;
            }
        }
        out
    }
}

/// All simple closed curves of `g`, sorted lexicographically by edge set.
///
/// Depth-first search from each vertex `s`, restricted to vertices `>= s`,
/// so each cycle is reached only from its smallest vertex; the two
/// orientations are merged by edge set.
pub fn enumerate_circles(g: &MetricGraph) -> Vec<Circle> {
    let mut found: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
    let n = g.vertex_count();
    let mut used = vec![false; g.edge_count()];
    let mut on_path = vec![false; n];
    let mut path: Vec<usize> = Vec::new();

    fn dfs(
        g: &MetricGraph,
        s: usize,
        v: usize,
        used: &mut [bool],
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        found: &mut BTreeMap<Vec<usize>, ()>,
    ) {
        for germ in g.star(v) {
            if used[germ.edge] {
                continue;
            }
            let e = g.edge(germ.edge);
            let w = if germ.forward { e.to } else { e.from };
            if w == s {
                let mut key: Vec<usize> = path.clone();
                key.push(germ.edge);
                key.sort_unstable();
                found.insert(key, ());
                continue;
            }
            if w < s || on_path[w] {
                continue;
            }
            used[germ.edge] = true;
            on_path[w] = true;
            path.push(germ.edge);
            dfs(g, s, w, used, on_path, path, found);
            path.pop();
            on_path[w] = false;
            used[germ.edge] = false;
        }
    }

    for s in 0..n {
        on_path[s] = true;
        dfs(g, s, s, &mut used, &mut on_path, &mut path, &mut found);
        on_path[s] = false;
    }
    found
        .into_keys()
        .map(|edges| Circle::from_edge_set(g, &edges).expect("enumerated cycle is a circle"))
        .collect()
}
