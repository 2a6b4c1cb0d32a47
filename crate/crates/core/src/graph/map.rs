use serde::{Deserialize, Serialize};

use super::circle::Circle;
use super::metric::{GraphPoint, MetricGraph, Segment, PARAM_EPS};
use crate::error::{Error, Result};

const CONTINUITY_TOL: f64 = 1e-9;

/// Domain interval `[start, end]` of one edge, mapped affinely (by arc
/// length) onto the chain of segments in `image`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub image: Vec<Segment>,
}

impl Piece {
    pub fn new(start: f64, end: f64, image: Vec<Segment>) -> Self {
        Piece { start, end, image }
    }

    pub fn constant(start: f64, end: f64, p: GraphPoint) -> Self {
        Piece { start, end, image: vec![Segment::new(p.edge, p.t, p.t)] }
    }
}

/// A continuous piecewise-affine self-map of a metric graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMap {
    /// Pieces per domain edge, ordered by parameter.
    pub pieces: Vec<Vec<Piece>>,
    pub vertex_images: Vec<GraphPoint>,
}

/// Point at fraction `u` of the arc length of `path`.
pub fn path_point(g: &MetricGraph, path: &[Segment], u: f64) -> GraphPoint {
    let total = g.path_length(path);
    if total <= 0.0 {
        return path[0].start();
    }
    let mut remaining = u.clamp(0.0, 1.0) * total;
    for (i, s) in path.iter().enumerate() {
        let l = (s.to - s.from).abs() * g.length(s.edge);
        if remaining <= l || i + 1 == path.len() {
            let frac = if l > 0.0 { (remaining / l).clamp(0.0, 1.0) } else { 0.0 };
            return GraphPoint::new(s.edge, s.from + (s.to - s.from) * frac);
        }
        remaining -= l;
    }
    unreachable!("path is nonempty")
}

fn reverse_path(path: &[Segment]) -> Vec<Segment> {
    path.iter().rev().map(|s| s.reversed()).collect()
}

/// Portion of `path` between arc-length fractions `fa` and `fb`; reversed
/// when `fb < fa`.
pub fn subpath(g: &MetricGraph, path: &[Segment], fa: f64, fb: f64) -> Vec<Segment> {
    let total = g.path_length(path);
    if total <= 0.0 || (fa - fb).abs() * total < PARAM_EPS {
        let p = path_point(g, path, fa);
        return vec![Segment::new(p.edge, p.t, p.t)];
    }
    let (lo, hi, rev) = if fa <= fb { (fa, fb, false) } else { (fb, fa, true) };
    let (x0, x1) = (lo.clamp(0.0, 1.0) * total, hi.clamp(0.0, 1.0) * total);
    let mut out = Vec::new();
    let mut acc: f64 = 0.0;
    for s in path {
        let l = (s.to - s.from).abs() * g.length(s.edge);
        let (a, b) = (acc.max(x0), (acc + l).min(x1));
        if b - a > 0.0 && l > 0.0 {
            let ta = s.from + (s.to - s.from) * ((a - acc) / l);
            let tb = s.from + (s.to - s.from) * ((b - acc) / l);
            out.push(Segment::new(s.edge, ta, tb));
        }
        acc += l;
    }
    if out.is_empty() {
        let p = path_point(g, path, fa);
        out.push(Segment::new(p.edge, p.t, p.t));
    }
    if rev {
        reverse_path(&out)
    } else {
        out
    }
}

/// `path`, or the constant path at `p` when it is empty.
pub fn path_or_point(path: Vec<Segment>, p: GraphPoint) -> Vec<Segment> {
    if path.is_empty() {
        vec![Segment::new(p.edge, p.t, p.t)]
    } else {
        path
    }
}

impl GraphMap {
    pub fn identity(g: &MetricGraph) -> Self {
        GraphMap {
            pieces: (0..g.edge_count()).map(|e| vec![Piece::new(0.0, 1.0, vec![Segment::new(e, 0.0, 1.0)])]).collect(),
            vertex_images: (0..g.vertex_count()).map(|v| g.vertex_point(v)).collect(),
        }
    }

    pub fn constant(g: &MetricGraph, p: GraphPoint) -> Self {
        GraphMap {
            pieces: (0..g.edge_count()).map(|_| vec![Piece::constant(0.0, 1.0, p)]).collect(),
            vertex_images: vec![p; g.vertex_count()],
        }
    }

    pub fn eval(&self, g: &MetricGraph, p: &GraphPoint) -> Result<GraphPoint> {
        g.check_point(p)?;
        if let Some(v) = g.vertex_at(p) {
            return Ok(self.vertex_images[v]);
        }
        let pieces = &self.pieces[p.edge];
        if pieces.is_empty() {
            return Err(Error::InvalidPoint(format!("map undefined on edge {}", p.edge)));
        }
        let k = pieces.partition_point(|pc| pc.end < p.t).min(pieces.len() - 1);
        let pc = &pieces[k];
        let width = pc.end - pc.start;
        let u = if width > 0.0 { (p.t - pc.start) / width } else { 0.0 };
        Ok(path_point(g, &pc.image, u))
    }

    /// Parameters on edge `e` where the affine pieces meet.
    pub fn breakpoints(&self, e: usize) -> Vec<f64> {
        self.pieces[e].iter().skip(1).map(|p| p.start).collect()
    }

    /// Checks that pieces tile each edge and that images agree at every
    /// shared parameter and vertex.
    pub fn validate(&self, g: &MetricGraph) -> Result<()> {
        if self.pieces.len() != g.edge_count() || self.vertex_images.len() != g.vertex_count() {
            return Err(Error::Discontinuous("shape does not match graph".into()));
        }
        for v in &self.vertex_images {
            g.check_point(v)?;
        }
        let close = |a: &GraphPoint, b: &GraphPoint| g.path_distance(a, b) < CONTINUITY_TOL;
        for (e, pieces) in self.pieces.iter().enumerate() {
            if pieces.is_empty() {
                return Err(Error::Discontinuous(format!("edge {e} has no pieces")));
            }
            if pieces[0].start.abs() > PARAM_EPS || (pieces[pieces.len() - 1].end - 1.0).abs() > PARAM_EPS {
                return Err(Error::Discontinuous(format!("pieces of edge {e} do not span [0,1]")));
            }
            for (k, pc) in pieces.iter().enumerate() {
                if pc.image.is_empty() || !(pc.end > pc.start) {
                    return Err(Error::Discontinuous(format!("degenerate piece {k} on edge {e}")));
                }
                for s in &pc.image {
                    g.check_point(&s.start())?;
                    g.check_point(&s.end())?;
                }
                for w in pc.image.windows(2) {
                    if !close(&w[0].end(), &w[1].start()) {
                        return Err(Error::Discontinuous(format!("image path of piece {k} on edge {e} is broken")));
                    }
                }
                if k + 1 < pieces.len() {
                    let next = &pieces[k + 1];
                    if (next.start - pc.end).abs() > PARAM_EPS {
                        return Err(Error::Discontinuous(format!("gap after piece {k} on edge {e}")));
                    }
                    if !close(&pc.image[pc.image.len() - 1].end(), &next.image[0].start()) {
                        return Err(Error::Discontinuous(format!("jump at parameter {} on edge {e}", pc.end)));
                    }
                }
            }
            let edge = g.edge(e);
            if !close(&pieces[0].image[0].start(), &self.vertex_images[edge.from]) {
                return Err(Error::Discontinuous(format!("edge {e} disagrees with its start vertex image")));
            }
            let last = &pieces[pieces.len() - 1];
            if !close(&last.image[last.image.len() - 1].end(), &self.vertex_images[edge.to]) {
                return Err(Error::Discontinuous(format!("edge {e} disagrees with its end vertex image")));
            }
        }
        Ok(())
    }

    /// `outer ∘ inner`. `outer` only needs pieces on edges that `inner` reaches.
    pub fn compose(g: &MetricGraph, outer: &GraphMap, inner: &GraphMap) -> Result<GraphMap> {
        let mut pieces = Vec::with_capacity(g.edge_count());
        for inner_pieces in &inner.pieces {
            let mut out: Vec<Piece> = Vec::new();
            for pc in inner_pieces {
                let total = g.path_length(&pc.image);
                if total < PARAM_EPS {
                    let q = outer.eval(g, &path_point(g, &pc.image, 0.0))?;
                    out.push(Piece::constant(pc.start, pc.end, q));
                    continue;
                }
                let per_len = (pc.end - pc.start) / total;
                let mut acc = 0.0;
                let mut cursor = pc.start;
                for seg in &pc.image {
                    let len = g.length(seg.edge);
                    let l = (seg.to - seg.from).abs() * len;
                    if l <= 0.0 {
                        continue;
                    }
                    let opieces = &outer.pieces[seg.edge];
                    if opieces.is_empty() {
                        return Err(Error::InvalidPoint(format!("outer map undefined on edge {}", seg.edge)));
                    }
                    let (lo, hi) = (seg.from.min(seg.to), seg.from.max(seg.to));
                    let mut params: Vec<f64> = outer.pieces[seg.edge]
                        .iter()
                        .skip(1)
                        .map(|p| p.start)
                        .filter(|&b| b > lo + PARAM_EPS && b < hi - PARAM_EPS)
                        .collect();
                    if seg.to < seg.from {
                        params.reverse();
                    }
                    params.insert(0, seg.from);
                    params.push(seg.to);
                    for w in params.windows(2) {
                        let (a, b) = (w[0], w[1]);
                        let sub = (b - a).abs() * len;
                        acc += sub;
                        let end = if acc >= total - PARAM_EPS { pc.end } else { pc.start + acc * per_len };
                        let mid = 0.5 * (a + b);
                        let k = opieces.partition_point(|p| p.end < mid).min(opieces.len() - 1);
                        let q = &opieces[k];
                        let width = q.end - q.start;
                        let fa = (a - q.start) / width;
                        let fb = (b - q.start) / width;
                        if end > cursor {
                            out.push(Piece::new(cursor, end, subpath(g, &q.image, fa, fb)));
                            cursor = end;
                        }
                    }
                }
                if let Some(last) = out.last_mut() {
                    last.end = pc.end;
                }
            }
            pieces.push(out);
        }
        let vertex_images = inner
            .vertex_images
            .iter()
            .map(|p| outer.eval(g, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(GraphMap { pieces, vertex_images })
    }

    /// Inverse of a piecewise-affine homeomorphism.
    pub fn inverse(&self, g: &MetricGraph) -> Result<GraphMap> {
        let mut lists: Vec<Vec<(f64, f64, Segment)>> = vec![Vec::new(); g.edge_count()];
        for (e, pieces) in self.pieces.iter().enumerate() {
            for pc in pieces {
                let total = g.path_length(&pc.image);
                if total < PARAM_EPS {
                    return Err(Error::NotHomeomorphism(format!("edge {e} has a constant piece")));
                }
                let mut acc = 0.0;
                for s in &pc.image {
                    let l = (s.to - s.from).abs() * g.length(s.edge);
                    if l <= 0.0 {
                        continue;
                    }
                    let d0 = pc.start + (pc.end - pc.start) * acc / total;
                    acc += l;
                    let d1 = pc.start + (pc.end - pc.start) * acc / total;
                    if s.from < s.to {
                        lists[s.edge].push((s.from, s.to, Segment::new(e, d0, d1)));
                    } else {
                        lists[s.edge].push((s.to, s.from, Segment::new(e, d1, d0)));
                    }
                }
            }
        }
        let mut pieces = Vec::with_capacity(g.edge_count());
        for (e, mut list) in lists.into_iter().enumerate() {
            list.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut cursor = 0.0;
            let mut out = Vec::with_capacity(list.len());
            for (lo, hi, seg) in list {
                if (lo - cursor).abs() > 1e-9 {
                    return Err(Error::NotHomeomorphism(format!("edge {e} is not covered exactly once")));
                }
                out.push(Piece::new(cursor, hi, vec![seg]));
                cursor = hi;
            }
            if out.is_empty() || (cursor - 1.0).abs() > 1e-9 {
                return Err(Error::NotHomeomorphism(format!("edge {e} is not covered")));
            }
            if let Some(last) = out.last_mut() {
                last.end = 1.0;
            }
            pieces.push(out);
        }
        let mut vertex_images = Vec::with_capacity(g.vertex_count());
        for v in 0..g.vertex_count() {
            let germ = g.star(v)[0];
            let pcs: &Vec<Piece> = &pieces[germ.edge];
            let p = if germ.forward {
                pcs[0].image[0].start()
            } else {
                let last = &pcs[pcs.len() - 1];
                last.image[last.image.len() - 1].end()
            };
            vertex_images.push(p);
        }
        Ok(GraphMap { pieces, vertex_images })
    }
}

/// Incremental construction of a map edge by edge.
#[derive(Debug, Clone)]
pub struct MapBuilder {
    pieces: Vec<Vec<Piece>>,
    vertex_images: Vec<Option<GraphPoint>>,
}

impl MapBuilder {
    pub fn new(g: &MetricGraph) -> Self {
        MapBuilder { pieces: vec![Vec::new(); g.edge_count()], vertex_images: vec![None; g.vertex_count()] }
    }

    pub fn set_edge(&mut self, e: usize, pieces: Vec<Piece>) -> &mut Self {
        self.pieces[e] = pieces;
        self
    }

    pub fn set_vertex(&mut self, v: usize, p: GraphPoint) -> &mut Self {
        self.vertex_images[v] = Some(p);
        self
    }

    pub fn has_edge(&self, e: usize) -> bool {
        !self.pieces[e].is_empty()
    }

    pub fn vertex_image(&self, v: usize) -> Option<GraphPoint> {
        self.vertex_images[v]
    }

    /// Maps `src` onto `dst` isometrically: arc coordinate `s` of `src` goes
    /// to arc coordinate `s + shift` of `dst`.
    pub fn circle_isometry(&mut self, g: &MetricGraph, src: &Circle, dst: &Circle, shift: f64) -> &mut Self {
        self.circle_homothety(g, src, dst, 1.0, shift)
    }

    /// Arc coordinate `s` of `src` goes to `scale * s + shift` on `dst`;
    /// `scale` must be `dst.length / src.length` for a closed image.
    pub fn circle_homothety(&mut self, g: &MetricGraph, src: &Circle, dst: &Circle, scale: f64, shift: f64) -> &mut Self {
        for (k, tr) in src.traversals.iter().enumerate() {
            let (s0, s1) = (src.offset(k), src.offset(k) + g.length(tr.edge));
            let (a, b) = if tr.forward { (s0, s1) } else { (s1, s0) };
            let path = dst.arc_path(g, scale * a + shift, scale * b + shift);
            self.pieces[tr.edge] = vec![Piece::new(0.0, 1.0, path)];
            self.vertex_images[src.tail_vertex(g, k)] = Some(dst.point_at(g, scale * s0 + shift));
        }
        self
    }

    /// Maps edge `e` onto the shortest path between the images of its ends.
    pub fn shortest_path_edge(&mut self, g: &MetricGraph, e: usize) -> Result<&mut Self> {
        let edge = g.edge(e);
        let (a, b) = match (self.vertex_images[edge.from], self.vertex_images[edge.to]) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::WrongInput(format!("endpoint images of edge {e} unknown"))),
        };
        let path = path_or_point(g.shortest_path(&a, &b)?, a);
        self.pieces[e] = vec![Piece::new(0.0, 1.0, path)];
        Ok(self)
    }

    pub fn build(self, g: &MetricGraph) -> Result<GraphMap> {
        let vertex_images = self
            .vertex_images
            .into_iter()
            .enumerate()
            .map(|(v, p)| p.ok_or_else(|| Error::WrongInput(format!("vertex {v} has no image"))))
            .collect::<Result<Vec<_>>>()?;
        let map = GraphMap { pieces: self.pieces, vertex_images };
        map.validate(g)?;
        Ok(map)
    }

    /// A map defined only on the edges that were set; usable as the outer
    /// map of a composition.
    pub fn build_partial(self, g: &MetricGraph) -> GraphMap {
        let vertex_images = self
            .vertex_images
            .into_iter()
            .enumerate()
            .map(|(v, p)| p.unwrap_or_else(|| g.vertex_point(v)))
            .collect();
        GraphMap { pieces: self.pieces, vertex_images }
    }
}
