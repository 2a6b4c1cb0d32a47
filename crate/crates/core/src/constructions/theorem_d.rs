//! Skew products over the quotient of the blown-up odometer whose minimal
//! set has exactly one fibre made of two circles.
//!
//! Both systems share the same scheme: over a base point `x` the fibre map
//! rotates by `2πβ` and lands on the circle belonging to the side of the gap
//! `c_l | c_r` that `f(x)` falls on.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::{graph, ConstructionResult};
use crate::base::{powers_of_two, weyl_minimal_rotation, BasePoint, BaseSystem, DoubledCantor, DoubledCode};
use crate::bundle::{product_bundle, BundlePoint, FibreDescription, FibreFamily, Reference, Selector, SkewSystem};
use crate::error::{Error, Result};
use crate::graph::{Circle, GraphMap, GraphPoint, MapBuilder, MetricGraph, Piece, Segment};

/// Number of Weyl terms `2^k` used to pick the rotation.
pub const BETA_TERMS: usize = 1000;
pub const BETA_TOL: f64 = 0.05;
/// Nodes of the discretized inner curve.
pub const THETA_NODES: usize = 720;

/// Rotation fraction for the odometer return times `2^k`.
pub fn blowup_beta() -> Result<f64> {
    Ok(weyl_minimal_rotation(&powers_of_two(BETA_TERMS), BETA_TERMS, BETA_TOL)?.value)
}

fn blowup_base(precision: u32) -> Result<(BaseSystem, DoubledCantor)> {
    let dc = DoubledCantor::with_default_center(precision)?;
    Ok((BaseSystem::Quotient(dc.clone()), dc))
}

fn resolve_beta(beta: Option<f64>) -> Result<f64> {
    match beta {
        Some(b) if b > 0.0 && b < 1.0 => Ok(b),
        Some(b) => Err(Error::OutOfRange { name: "beta", value: b }),
        None => blowup_beta(),
    }
}

fn rotate(p: [f64; 2], c: [f64; 2], a: f64) -> [f64; 2] {
    let (s, co) = a.sin_cos();
    let (dx, dy) = (p[0] - c[0], p[1] - c[1]);
    [c[0] + co * dx - s * dy, c[1] + s * dx + co * dy]
}

fn dist2(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// `S1` (edge 0, loop of length 2π at the top point `(0,1)`), `I` (edge 1,
/// from `(0,1)` to `(0,2)`) and `S2` (edge 2, loop at its bottom point
/// `(0,2)`). Loop parameters run counter-clockwise.
pub fn case1_fibre() -> MetricGraph {
    graph(2, &[(0, 0, TAU), (0, 1, 1.0), (1, 1, TAU)]).expect("static graph")
}

/// Planar position of a point of the case-one fibre.
pub fn case1_xy(p: &GraphPoint) -> [f64; 2] {
    match p.edge {
        0 => {
            let a = PI / 2.0 + TAU * p.t;
            [a.cos(), a.sin()]
        }
        1 => [0.0, 1.0 + p.t],
        _ => {
            let a = -PI / 2.0 + TAU * p.t;
            [a.cos(), 3.0 + a.sin()]
        }
    }
}

fn case1_map(g: &MetricGraph, s1: &Circle, s2: &Circle, beta: f64, right: bool) -> Result<GraphMap> {
    let (dst, h) = if right { (s2, 0.5) } else { (s1, 0.0) };
    let start = TAU * (beta + h);
    let mut b = MapBuilder::new(g);
    b.circle_isometry(g, s1, dst, start);
    b.circle_isometry(g, s2, dst, start - PI);
    b.set_edge(1, vec![Piece::new(0.0, 1.0, dst.arc_path(g, start, start + PI))]);
    b.build(g)
}

pub fn theorem_d_case1(precision: u32, beta: Option<f64>) -> Result<ConstructionResult> {
    let (base, dc) = blowup_base(precision)?;
    let beta = resolve_beta(beta)?;
    let g = case1_fibre();
    let s1 = Circle::from_edge_set(&g, &[0])?;
    let s2 = Circle::from_edge_set(&g, &[2])?;
    let maps = vec![case1_map(&g, &s1, &s2, beta, false)?, case1_map(&g, &s1, &s2, beta, true)?];
    let system = SkewSystem::new(base, product_bundle(g), FibreFamily { maps, selector: Selector::TargetSide })?;
    let reference = Reference {
        generic: FibreDescription::OneCircleOf { edge_sets: vec![vec![0], vec![2]] },
        by_tag: BTreeMap::from([("c_l".to_string(), FibreDescription::Circles { edge_sets: vec![vec![0], vec![2]] })]),
        note: format!("left fibres S1, right fibres S2, both over c_l; rotation fraction {beta}"),
    };
    let a = dc.a();
    let y = if dc.is_right(&a) { GraphPoint::new(2, 0.0) } else { GraphPoint::new(0, 0.0) };
    let seeds = vec![BundlePoint { b: BasePoint::DoubledCode { code: a }, y }];
    Ok(ConstructionResult::new(
        "theorem-d-1",
        system,
        reference,
        "two disjoint circles joined by an interval over the quotient of the blown-up odometer",
        seeds,
    ))
}

/// Direct planar evaluation of the case-one map, independent of the graph
/// encoding.
#[derive(Debug, Clone)]
pub struct CaseOneRoute {
    pub dc: DoubledCantor,
    pub beta: f64,
}

impl CaseOneRoute {
    pub fn new(dc: DoubledCantor, beta: f64) -> Self {
        CaseOneRoute { dc, beta }
    }

    /// Image of the fibre point `q` over `x`, along with the base image.
    pub fn apply(&self, x: &DoubledCode, q: [f64; 2]) -> Result<(DoubledCode, [f64; 2])> {
        let fx = self.dc.apply(x)?;
        let off = if self.dc.is_right(&fx) { 3.0 } else { 0.0 };
        let shift = |p: [f64; 2]| [p[0], p[1] + off];
        let g = |p: [f64; 2]| rotate(p, [0.0, 0.0], TAU * self.beta);
        let tol = 1e-9;
        let image = if (dist2(q, [0.0, 0.0]) - 1.0).abs() < tol {
            shift(g(q))
        } else if (dist2(q, [0.0, 3.0]) - 1.0).abs() < tol {
            shift(g([q[0], q[1] - 3.0]))
        } else {
            let z = q[1];
            shift(rotate(g([0.0, 1.0]), [0.0, 0.0], PI * (z - 1.0)))
        };
        Ok((fx, image))
    }
}

/// Which circle of the case-two fibre a point is read on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Curve {
    Outer,
    Inner,
}

/// Shape of the intersection of the outer circle and the inner curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "pattern", content = "theta0", rename_all = "snake_case")]
pub enum Pattern {
    OnePoint,
    /// Common arc `[0, θ0]`.
    Arc(f64),
    TwoPoints,
}

// an edge as an angular range between two nodes; `poly` edges follow the
// inner polyline, the others the unit circle
#[derive(Debug, Clone, Copy)]
struct AngularEdge {
    edge: usize,
    lo: usize,
    hi: usize,
    poly: bool,
}

/// The fibre `S1 ∪ S1*`: unit circle plus an inner closed polyline with one
/// vertex per node angle `2πk/720`, meeting the circle where `r(θ) = 1`.
#[derive(Debug, Clone)]
pub struct CaseTwoGeometry {
    pub pattern: Pattern,
    pub graph: MetricGraph,
    /// Node index where the common arc ends, for the arc pattern.
    pub arc_end: usize,
    nodes: Vec<[f64; 2]>,
    cum: Vec<f64>,
    outer: Vec<AngularEdge>,
    inner: Vec<AngularEdge>,
}

fn node_angle(k: usize) -> f64 {
    TAU * k as f64 / THETA_NODES as f64
}

const STEP: f64 = TAU / THETA_NODES as f64;

impl CaseTwoGeometry {
    pub fn new(pattern: Pattern) -> Result<Self> {
        let n = THETA_NODES;
        let arc_end = match pattern {
            Pattern::Arc(t0) => {
                let k = (t0 / STEP).round();
                if !(t0 > 0.0 && t0 < TAU) || k < 1.0 || k > (n - 1) as f64 {
                    return Err(Error::BadPattern(format!("arc end {t0} must lie strictly inside (0, 2π)")));
                }
                k as usize
            }
            _ => 0,
        };
        let radius = |k: usize| -> f64 {
            let th = node_angle(k);
            match pattern {
                Pattern::OnePoint => 0.5 + (1.0 + th.cos()) / 4.0,
                Pattern::TwoPoints => (3.0 + (2.0 * th).cos()) / 4.0,
                Pattern::Arc(_) if k <= arc_end || k == n => 1.0,
                Pattern::Arc(_) => {
                    let u = (k - arc_end) as f64 / (n - arc_end) as f64;
                    0.75 + (TAU * u).cos() / 4.0
                }
            }
        };
        let nodes: Vec<[f64; 2]> = (0..=n)
            .map(|k| {
                let (s, c) = node_angle(k).sin_cos();
                let r = radius(k);
                [r * c, r * s]
            })
            .collect();
        let mut cum = vec![0.0];
        for k in 0..n {
            cum.push(cum[k] + dist2(nodes[k], nodes[k + 1]));
        }
        let half = n / 2;
        let ae = |edge, lo, hi, poly| AngularEdge { edge, lo, hi, poly };
        let (outer, inner, vertices) = match pattern {
            Pattern::OnePoint => (vec![ae(0, 0, n, false)], vec![ae(1, 0, n, true)], 1),
            Pattern::Arc(_) => (
                vec![ae(0, 0, arc_end, false), ae(1, arc_end, n, false)],
                vec![ae(0, 0, arc_end, false), ae(2, arc_end, n, true)],
                2,
            ),
            Pattern::TwoPoints => (
                vec![ae(0, 0, half, false), ae(1, half, n, false)],
                vec![ae(2, 0, half, true), ae(3, half, n, true)],
                2,
            ),
        };
        let mut edges: Vec<(usize, AngularEdge)> = outer.iter().chain(&inner).map(|a| (a.edge, *a)).collect();
        edges.sort_by_key(|e| e.0);
        edges.dedup_by_key(|e| e.0);
        let vertex_of = |k: usize| -> u32 {
            if vertices == 1 || k == 0 || k == n {
                0
            } else {
                1
            }
        };
        let spec: Vec<(u32, u32, f64)> = edges
            .iter()
            .map(|(_, a)| {
                let len = if a.poly { cum[a.hi] - cum[a.lo] } else { (a.hi - a.lo) as f64 * STEP };
                (vertex_of(a.lo), vertex_of(a.hi), len)
            })
            .collect();
        let graph = graph(vertices, &spec)?;
        Ok(CaseTwoGeometry { pattern, graph, arc_end, nodes, cum, outer, inner })
    }

    fn arcs(&self, c: Curve) -> &[AngularEdge] {
        match c {
            Curve::Outer => &self.outer,
            Curve::Inner => &self.inner,
        }
    }

    fn edge_arc(&self, e: usize) -> AngularEdge {
        *self.outer.iter().chain(&self.inner).find(|a| a.edge == e).expect("edge of the fibre")
    }

    /// Edge sets of the two circles.
    pub fn circle_edges(&self, c: Curve) -> Vec<usize> {
        self.arcs(c).iter().map(|a| a.edge).collect()
    }

    pub fn circle(&self, c: Curve) -> Result<Circle> {
        Circle::from_edge_set(&self.graph, &self.circle_edges(c))
    }

    /// Whether node `k` lies on both curves.
    pub fn is_common_node(&self, k: usize) -> bool {
        let k = k % THETA_NODES;
        match self.pattern {
            Pattern::OnePoint => k == 0,
            Pattern::Arc(_) => k <= self.arc_end,
            Pattern::TwoPoints => k == 0 || k == THETA_NODES / 2,
        }
    }

    // angle in [0, 2π) and the edge of `c` it falls on
    fn locate(&self, c: Curve, theta: f64) -> (AngularEdge, f64) {
        let th = theta.rem_euclid(TAU);
        let arcs = self.arcs(c);
        let a = *arcs.iter().find(|a| th < node_angle(a.hi)).unwrap_or(arcs.last().unwrap());
        (a, th)
    }

    fn cum_at(&self, theta: f64) -> f64 {
        let u = theta / STEP;
        let k = (u.floor() as usize).min(THETA_NODES - 1);
        self.cum[k] + (u - k as f64) * (self.cum[k + 1] - self.cum[k])
    }

    // parameter on `a` of the point at angle `theta` (unwrapped into a's range)
    fn param(&self, a: &AngularEdge, theta: f64) -> f64 {
        let (lo, hi) = (node_angle(a.lo), node_angle(a.hi));
        let t = if a.poly {
            (self.cum_at(theta.clamp(lo, hi)) - self.cum[a.lo]) / (self.cum[a.hi] - self.cum[a.lo])
        } else {
            (theta - lo) / (hi - lo)
        };
        t.clamp(0.0, 1.0)
    }

    /// The point of curve `c` on the ray at angle `theta`.
    pub fn point_on(&self, c: Curve, theta: f64) -> GraphPoint {
        let (a, th) = self.locate(c, theta);
        self.graph.canonical(&GraphPoint::new(a.edge, self.param(&a, th)))
    }

    /// Node-interpolated angle of a fibre point.
    pub fn angle_of(&self, p: &GraphPoint) -> f64 {
        let a = self.edge_arc(p.edge);
        let (lo, hi) = (node_angle(a.lo), node_angle(a.hi));
        if !a.poly {
            return lo + p.t * (hi - lo);
        }
        let s = self.cum[a.lo] + p.t * (self.cum[a.hi] - self.cum[a.lo]);
        let k = (self.cum.partition_point(|&c| c <= s).saturating_sub(1)).clamp(a.lo, a.hi - 1);
        let lam = ((s - self.cum[k]) / (self.cum[k + 1] - self.cum[k])).clamp(0.0, 1.0);
        node_angle(k) + lam * STEP
    }

    /// Planar position of a fibre point.
    pub fn xy(&self, p: &GraphPoint) -> [f64; 2] {
        let a = self.edge_arc(p.edge);
        self.planar(a.poly, self.angle_of(p))
    }

    fn planar(&self, poly: bool, theta: f64) -> [f64; 2] {
        if !poly {
            let (s, c) = theta.sin_cos();
            return [c, s];
        }
        let u = theta.rem_euclid(TAU) / STEP;
        let k = (u.floor() as usize).min(THETA_NODES - 1);
        let lam = u - k as f64;
        let (p, q) = (self.nodes[k], self.nodes[k + 1]);
        [p[0] + lam * (q[0] - p[0]), p[1] + lam * (q[1] - p[1])]
    }

    /// Planar point of curve `c` at angle `theta`.
    pub fn curve_xy(&self, c: Curve, theta: f64) -> [f64; 2] {
        let (a, th) = self.locate(c, theta);
        self.planar(a.poly, th)
    }

    /// Angle of a planar point on the inner curve: the node angle plus the
    /// fraction along its polyline segment.
    pub fn inner_angle(&self, q: [f64; 2]) -> f64 {
        let th = q[1].atan2(q[0]).rem_euclid(TAU);
        let (a, th) = self.locate(Curve::Inner, th);
        if !a.poly {
            return th;
        }
        let k = ((th / STEP).floor() as usize).clamp(a.lo, a.hi - 1);
        let (p, r) = (self.nodes[k], self.nodes[k + 1]);
        let d = [r[0] - p[0], r[1] - p[1]];
        let lam = ((q[0] - p[0]) * d[0] + (q[1] - p[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1]);
        node_angle(k) + lam.clamp(0.0, 1.0) * STEP
    }

    /// Fibre map rotating every angle by `2πβ` onto curve `target`.
    pub fn rotation_map(&self, target: Curve, beta: f64) -> Result<GraphMap> {
        let g = &self.graph;
        let shift = TAU * beta;
        let tarcs = self.arcs(target);
        let mut knots: Vec<f64> = Vec::new();
        for a in tarcs {
            if a.poly {
                knots.extend((a.lo..=a.hi).map(node_angle));
            } else {
                knots.extend([node_angle(a.lo), node_angle(a.hi)]);
            }
        }
        knots.sort_by(f64::total_cmp);
        knots.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        let eps = 1e-12;
        let mut pieces = vec![Vec::new(); g.edge_count()];
        for (e, out) in pieces.iter_mut().enumerate() {
            let a = self.edge_arc(e);
            let src: Vec<(f64, f64)> = if a.poly {
                let len = self.cum[a.hi] - self.cum[a.lo];
                (a.lo..=a.hi).map(|k| ((self.cum[k] - self.cum[a.lo]) / len, node_angle(k))).collect()
            } else {
                vec![(0.0, node_angle(a.lo)), (1.0, node_angle(a.hi))]
            };
            for w in src.windows(2) {
                let ((t0, th0), (t1, th1)) = (w[0], w[1]);
                let (p0, p1) = (th0 + shift, th1 + shift);
                let mut cuts = vec![p0];
                let (w0, w1) = ((p0 / TAU).floor() as i64, (p1 / TAU).floor() as i64);
                for k in w0..=w1 {
                    for &kn in &knots {
                        let v = kn + TAU * k as f64;
                        if v > p0 + eps && v < p1 - eps {
                            cuts.push(v);
                        }
                    }
                }
                cuts.push(p1);
                cuts.sort_by(f64::total_cmp);
                cuts.dedup_by(|x, y| (*x - *y).abs() < eps);
                let to_src = |p: f64| {
                    if p == p0 {
                        t0
                    } else if p == p1 {
                        t1
                    } else {
                        t0 + (p - p0) / (p1 - p0) * (t1 - t0)
                    }
                };
                for c in cuts.windows(2) {
                    let mid = 0.5 * (c[0] + c[1]);
                    let (ta, th) = self.locate(target, mid);
                    let wrap = TAU * ((mid - th) / TAU).round();
                    let seg = Segment::new(ta.edge, self.param(&ta, c[0] - wrap), self.param(&ta, c[1] - wrap));
                    out.push(Piece::new(to_src(c[0]), to_src(c[1]), vec![seg]));
                }
            }
        }
        let vertex_images = (0..g.vertex_count())
            .map(|v| {
                let vp = g.vertex_point(v);
                self.point_on(target, self.angle_of(&vp) + shift)
            })
            .collect();
        let m = GraphMap { pieces, vertex_images };
        m.validate(g)?;
        Ok(m)
    }
}

pub fn theorem_d_case2(pattern: Pattern, precision: u32, beta: Option<f64>) -> Result<ConstructionResult> {
    let geo = CaseTwoGeometry::new(pattern)?;
    let (base, dc) = blowup_base(precision)?;
    let beta = resolve_beta(beta)?;
    let maps = vec![geo.rotation_map(Curve::Outer, beta)?, geo.rotation_map(Curve::Inner, beta)?];
    let outer = geo.circle_edges(Curve::Outer);
    let inner = geo.circle_edges(Curve::Inner);
    let system =
        SkewSystem::new(base, product_bundle(geo.graph.clone()), FibreFamily { maps, selector: Selector::TargetSide })?;
    let shape = match pattern {
        Pattern::OnePoint => "figure eight",
        Pattern::Arc(_) => "theta",
        Pattern::TwoPoints => "two circles meeting twice",
    };
    let reference = Reference {
        generic: FibreDescription::OneCircleOf { edge_sets: vec![outer.clone(), inner.clone()] },
        by_tag: BTreeMap::from([("c_l".to_string(), FibreDescription::Circles { edge_sets: vec![outer, inner] })]),
        note: format!("outer circle on the left, inner curve on the right, {shape} over c_l; rotation fraction {beta}"),
    };
    let a = dc.a();
    let curve = if dc.is_right(&a) { Curve::Inner } else { Curve::Outer };
    let seeds = vec![BundlePoint { b: BasePoint::DoubledCode { code: a }, y: geo.point_on(curve, 0.3) }];
    let name = match pattern {
        Pattern::OnePoint => "theorem-d-2:point",
        Pattern::Arc(_) => "theorem-d-2:arc",
        Pattern::TwoPoints => "theorem-d-2:two",
    };
    Ok(ConstructionResult::new(
        name,
        system,
        reference,
        "circle and an inner curve sharing part of it, over the quotient of the blown-up odometer",
        seeds,
    ))
}

/// Planar fibre point with the curve it is read on.
pub type Marked = ([f64; 2], Curve);

/// Step-by-step planar evaluation of the case-two map: start from the
/// product `f × g` on `C × S1`, conjugate by the radial projection over the
/// right half, glue `c_r` onto `c_l`, then extend off the minimal set.
#[derive(Debug, Clone)]
pub struct CaseTwoRoute {
    pub geo: CaseTwoGeometry,
    pub dc: DoubledCantor,
    pub beta: f64,
}

impl CaseTwoRoute {
    pub fn new(geo: CaseTwoGeometry, dc: DoubledCantor, beta: f64) -> Self {
        CaseTwoRoute { geo, dc, beta }
    }

    /// Radial projection of the unit circle onto the inner curve.
    pub fn alpha(&self, p: [f64; 2]) -> [f64; 2] {
        self.geo.curve_xy(Curve::Inner, p[1].atan2(p[0]))
    }

    pub fn alpha_inv(&self, q: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.geo.inner_angle(q).sin_cos();
        [c, s]
    }

    pub fn g(&self, p: [f64; 2]) -> [f64; 2] {
        rotate(p, [0.0, 0.0], TAU * self.beta)
    }

    fn right(&self, x: &DoubledCode) -> bool {
        self.dc.is_right(x)
    }

    pub fn sigma(&self, x: DoubledCode, p: [f64; 2]) -> (DoubledCode, Marked) {
        if self.right(&x) {
            (x, (self.alpha(p), Curve::Inner))
        } else {
            (x, (p, Curve::Outer))
        }
    }

    pub fn sigma_inv(&self, x: DoubledCode, q: [f64; 2]) -> (DoubledCode, [f64; 2]) {
        if self.right(&x) {
            (x, self.alpha_inv(q))
        } else {
            (x, q)
        }
    }

    pub fn f1(&self, x: DoubledCode, p: [f64; 2]) -> Result<(DoubledCode, [f64; 2])> {
        Ok((self.dc.apply(&x)?, self.g(p)))
    }

    pub fn f1_star(&self, x: DoubledCode, q: [f64; 2]) -> Result<(DoubledCode, Marked)> {
        let (x, p) = self.sigma_inv(x, q);
        let (fx, gp) = self.f1(x, p)?;
        Ok(self.sigma(fx, gp))
    }

    /// Gluing onto the quotient: `c_r` goes to `c_l`.
    pub fn t(&self, x: DoubledCode, m: Marked) -> (DoubledCode, Marked) {
        if x == self.dc.c_r() {
            (self.dc.c_l(), m)
        } else {
            (x, m)
        }
    }

    fn is_gap_point(&self, x: &DoubledCode) -> bool {
        *x == self.dc.c_l() || *x == self.dc.c_r()
    }

    /// The map on the minimal set; over `c_l` the curve decides which of
    /// `c_l`, `c_r` the point came from.
    pub fn f2_star(&self, x: DoubledCode, m: Marked) -> Result<(DoubledCode, Marked)> {
        let lift = if self.is_gap_point(&x) {
            match m.1 {
                Curve::Outer => self.dc.c_l(),
                Curve::Inner => self.dc.c_r(),
            }
        } else {
            x
        };
        let (fx, img) = self.f1_star(lift, m.0)?;
        Ok(self.t(fx, img))
    }

    /// The extension to the whole bundle.
    pub fn g_star(&self, x: DoubledCode, m: Marked) -> Result<(DoubledCode, Marked)> {
        let on_min = self.is_gap_point(&x) || (self.right(&x) == (m.1 == Curve::Inner));
        if on_min {
            self.f2_star(x, m)
        } else if m.1 == Curve::Inner {
            self.f2_star(x, (self.alpha_inv(m.0), Curve::Outer))
        } else {
            self.f2_star(x, (self.alpha(m.0), Curve::Inner))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(p: [f64; 2], q: [f64; 2], tol: f64) -> bool {
        dist2(p, q) < tol
    }

    #[test]
    fn case1_matches_planar_route() {
        let r = theorem_d_case1(12, Some(0.3)).unwrap();
        let s = &r.system;
        let BaseSystem::Quotient(dc) = &s.base else { unreachable!() };
        let route = CaseOneRoute::new(dc.clone(), 0.3);
        let g = s.fibre();
        for b in s.base.sampler(40, 3) {
            let BasePoint::DoubledCode { code } = b else { unreachable!() };
            for y in g.grid(0.05) {
                let img = s.apply(&BundlePoint { b, y }).unwrap();
                let (_, want) = route.apply(&code, case1_xy(&y)).unwrap();
                assert!(close(case1_xy(&img.y), want, 1e-9), "{y:?}");
            }
        }
    }

    #[test]
    fn case1_maps_into_one_circle() {
        let r = theorem_d_case1(12, Some(0.3)).unwrap();
        let g = r.system.fibre();
        for (k, m) in r.system.family.maps.iter().enumerate() {
            let want = if k == 0 { 0 } else { 2 };
            for y in g.grid(0.1) {
                let p = m.eval(g, &y).unwrap();
                assert!(p.edge == want || g.vertex_at(&p).is_some());
            }
        }
    }

    #[test]
    fn geometry_shapes() {
        let one = CaseTwoGeometry::new(Pattern::OnePoint).unwrap();
        assert_eq!((one.graph.vertex_count(), one.graph.edge_count()), (1, 2));
        let arc = CaseTwoGeometry::new(Pattern::Arc(1.0)).unwrap();
        assert_eq!((arc.graph.vertex_count(), arc.graph.edge_count()), (2, 3));
        assert_eq!(arc.arc_end, 115);
        let two = CaseTwoGeometry::new(Pattern::TwoPoints).unwrap();
        assert_eq!((two.graph.vertex_count(), two.graph.edge_count()), (2, 4));
        assert!(matches!(CaseTwoGeometry::new(Pattern::Arc(7.0)), Err(Error::BadPattern(_))));
        // inner curve stays in the unit disc
        for k in 0..THETA_NODES {
            let p = two.curve_xy(Curve::Inner, node_angle(k));
            assert!(p[0].hypot(p[1]) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn alpha_fixes_common_points_and_inverts() {
        for pat in [Pattern::OnePoint, Pattern::Arc(2.0), Pattern::TwoPoints] {
            let geo = CaseTwoGeometry::new(pat).unwrap();
            let dc = DoubledCantor::with_default_center(12).unwrap();
            let route = CaseTwoRoute::new(geo, dc, 0.2);
            for k in 0..THETA_NODES {
                let th = node_angle(k);
                let p = [th.cos(), th.sin()];
                if route.geo.is_common_node(k) {
                    assert!(close(route.alpha(p), p, 1e-12));
                }
            }
            for i in 0..500 {
                let th = 0.0123 + i as f64 * 0.0125;
                let p = [th.cos(), th.sin()];
                assert!(close(route.alpha_inv(route.alpha(p)), p, 1e-9));
            }
        }
    }

    #[test]
    fn case2_system_matches_route() {
        for pat in [Pattern::OnePoint, Pattern::Arc(2.0), Pattern::TwoPoints] {
            let r = theorem_d_case2(pat, 12, Some(0.3)).unwrap();
            let s = &r.system;
            let BaseSystem::Quotient(dc) = &s.base else { unreachable!() };
            let geo = CaseTwoGeometry::new(pat).unwrap();
            let route = CaseTwoRoute::new(geo.clone(), dc.clone(), 0.3);
            for b in s.base.sampler(20, 5) {
                let BasePoint::DoubledCode { code } = b else { unreachable!() };
                for y in s.fibre().grid(0.05) {
                    let curve = if geo.arcs(Curve::Outer).iter().any(|a| a.edge == y.edge) {
                        Curve::Outer
                    } else {
                        Curve::Inner
                    };
                    let img = s.apply(&BundlePoint { b, y }).unwrap();
                    let (_, (want, _)) = route.g_star(code, (geo.xy(&y), curve)).unwrap();
                    assert!(close(geo.xy(&img.y), want, 1e-9), "{pat:?} {y:?}");
                }
            }
        }
    }
}
