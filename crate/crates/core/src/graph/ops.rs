use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::circle::Circle;
use super::map::{GraphMap, MapBuilder, Piece};
use super::metric::{GraphPoint, MetricGraph, Segment};
use crate::error::{Error, Result};

/// Retraction of a connected graph onto one of its circles.
///
/// Vertices off the circle take the image of their breadth-first parent
/// (smallest id among the neighbours one level closer). Edges off the
/// circle go onto the shorter arc between their endpoint images, forward on
/// a tie.
pub fn build_retraction(g: &MetricGraph, c: &Circle) -> Result<GraphMap> {
    let checked = Circle::new(g, c.traversals.clone())?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.vertex_count();
    let mut depth = vec![usize::MAX; n];
    let mut image: Vec<Option<GraphPoint>> = vec![None; n];
    let mut queue = VecDeque::new();
    for v in checked.vertices(g) {
        depth[v] = 0;
        image[v] = Some(g.vertex_point(v));
        queue.push_back(v);
    }
    let mut order = Vec::new();
    while let Some(v) = queue.pop_front() {
        for germ in g.star(v) {
            let e = g.edge(germ.edge);
            let w = if germ.forward { e.to } else { e.from };
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                queue.push_back(w);
                order.push(w);
            }
        }
    }
    order.sort_by_key(|&w| (depth[w], w));
    for w in order {
        let parent = g
            .star(w)
            .iter()
            .map(|germ| {
                let e = g.edge(germ.edge);
                if germ.forward {
                    e.to
                } else {
                    e.from
                }
            })
            .filter(|&u| depth[u] + 1 == depth[w])
            .min()
            .expect("breadth-first parent exists");
        image[w] = image[parent];
    }

    let mut b = MapBuilder::new(g);
    for (v, p) in image.iter().enumerate() {
        b.set_vertex(v, p.expect("connected graph"));
    }
    for e in 0..g.edge_count() {
        if checked.contains_edge(e) {
            b.set_edge(e, vec![Piece::new(0.0, 1.0, vec![Segment::new(e, 0.0, 1.0)])]);
            continue;
        }
        let edge = g.edge(e);
        let pa = b.vertex_image(edge.from).unwrap();
        let pb = b.vertex_image(edge.to).unwrap();
        let sa = checked.arc_coordinate(g, &pa).unwrap();
        let sb = checked.arc_coordinate(g, &pb).unwrap();
        let forward = (sb - sa).rem_euclid(checked.length);
        let path = if forward < 1e-12 || checked.length - forward < 1e-12 {
            vec![Segment::new(pa.edge, pa.t, pa.t)]
        } else if forward <= checked.length / 2.0 {
            checked.arc_path(g, sa, sa + forward)
        } else {
            checked.arc_path(g, sa, sa - (checked.length - forward))
        };
        b.set_edge(e, vec![Piece::new(0.0, 1.0, path)]);
    }
    b.build(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationNumber {
    pub value: f64,
    pub error: f64,
}

/// Exact lift of a degree-one circle map, as breakpoints of a piecewise
/// affine function on `[0, L]`.
struct Lift {
    length: f64,
    knots: Vec<(f64, f64)>,
}

impl Lift {
    fn new(g: &MetricGraph, m: &GraphMap, c: &Circle) -> Result<Self> {
        let start = m.eval(g, &c.point_at(g, 0.0))?;
        let f0 = c
            .arc_coordinate(g, &start)
            .ok_or_else(|| Error::NotCircleSelfMap("image leaves the circle".into()))?;
        let mut knots = vec![(0.0, f0)];
        let mut value = f0;
        for (k, tr) in c.traversals.iter().enumerate() {
            let len = g.length(tr.edge);
            let base = c.offset(k);
            let pieces: Vec<Piece> = if tr.forward {
                m.pieces[tr.edge].clone()
            } else {
                m.pieces[tr.edge]
                    .iter()
                    .rev()
                    .map(|p| Piece::new(1.0 - p.end, 1.0 - p.start, p.image.iter().rev().map(|s| s.reversed()).collect()))
                    .collect()
            };
            for pc in pieces {
                let mut signed = 0.0;
                for s in &pc.image {
                    if s.from == s.to {
                        continue;
                    }
                    let pos = c
                        .traversals
                        .iter()
                        .position(|t| t.edge == s.edge)
                        .ok_or_else(|| Error::NotCircleSelfMap("image leaves the circle".into()))?;
                    let dir = if c.traversals[pos].forward { 1.0 } else { -1.0 };
                    signed += dir * (s.to - s.from) * g.length(s.edge);
                }
                if signed < -1e-12 {
                    return Err(Error::NotCircleSelfMap("map reverses orientation somewhere".into()));
                }
                value += signed;
                knots.push((base + pc.end * len, value));
            }
        }
        let degree = (value - f0) / c.length;
        if (degree - 1.0).abs() > 1e-9 {
            return Err(Error::NotCircleSelfMap(format!("degree {degree:.6} is not one")));
        }
        Ok(Lift { length: c.length, knots })
    }

    fn apply(&self, x: f64) -> f64 {
        let wraps = (x / self.length).floor();
        let s = x - wraps * self.length;
        let k = self.knots.partition_point(|&(a, _)| a <= s).clamp(1, self.knots.len() - 1);
        let (x0, y0) = self.knots[k - 1];
        let (x1, y1) = self.knots[k];
        let y = if x1 > x0 { y0 + (y1 - y0) * (s - x0) / (x1 - x0) } else { y0 };
        y + wraps * self.length
    }
}

/// Rotation number of `m` restricted to `c`, in units of the circle length.
pub fn rotation_number(g: &MetricGraph, m: &GraphMap, c: &Circle, iterations: usize) -> Result<RotationNumber> {
    if iterations == 0 {
        return Err(Error::WrongInput("iterations must be positive".into()));
    }
    let lift = Lift::new(g, m, c)?;
    let mut x = 0.0;
    for _ in 0..iterations {
        x = lift.apply(x);
    }
    let value = (x / (iterations as f64 * c.length)).rem_euclid(1.0);
    Ok(RotationNumber { value, error: 1.0 / iterations as f64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monotonicity {
    Monotone,
    NotMonotone,
    /// Consecutive images too far apart to tell at this sampling.
    Unknown,
}

/// Whether the images of consecutive points along a domain arc run
/// monotonically along an arc of the graph, at the sampling scale.
pub fn arc_monotonicity_check(g: &MetricGraph, m: &GraphMap, arc: &[GraphPoint]) -> Result<Monotonicity> {
    let tol = 1e-9;
    let images = arc.iter().map(|p| m.eval(g, p)).collect::<Result<Vec<_>>>()?;
    let min_edge = g.edges().iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
    let steps: Vec<f64> = images.windows(2).map(|w| g.path_distance(&w[0], &w[1])).collect();
    if steps.iter().any(|&s| s > min_edge / 2.0) {
        return Ok(Monotonicity::Unknown);
    }
    for i in 1..images.len().saturating_sub(1) {
        let (a, b) = (steps[i - 1], steps[i]);
        if a > tol && b > tol && g.path_distance(&images[i - 1], &images[i + 1]) < a + b - tol {
            return Ok(Monotonicity::NotMonotone);
        }
    }
    // a revisit after moving away is a fold as well
    let mut distinct: Vec<GraphPoint> = Vec::new();
    for q in &images {
        if distinct.last().is_some_and(|last| g.path_distance(last, q) < tol) {
            continue;
        }
        if distinct.iter().any(|d| g.path_distance(d, q) < tol) {
            return Ok(Monotonicity::NotMonotone);
        }
        distinct.push(*q);
    }
    Ok(Monotonicity::Monotone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::circle::enumerate_circles;
    use crate::graph::metric::GraphSpec;

    fn graph(n: u32, edges: &[(u32, u32, f64)]) -> MetricGraph {
        MetricGraph::new(&GraphSpec::from_edges(n, edges)).unwrap()
    }

    fn rotation(g: &MetricGraph, c: &Circle, shift: f64) -> GraphMap {
        let mut b = MapBuilder::new(g);
        b.circle_isometry(g, c, c, shift);
        b.build(g).unwrap()
    }

    #[test]
    fn retraction_of_circle_is_identity() {
        let g = graph(1, &[(0, 0, 1.0)]);
        let c = Circle::from_edge_set(&g, &[0]).unwrap();
        let r = build_retraction(&g, &c).unwrap();
        for k in 0..10 {
            let p = GraphPoint::new(0, k as f64 / 10.0);
            assert!(g.same_point(&r.eval(&g, &p).unwrap(), &p));
        }
    }

    #[test]
    fn pendant_arc_collapses() {
        let g = graph(2, &[(0, 0, 1.0), (0, 1, 0.5)]);
        let c = Circle::from_edge_set(&g, &[0]).unwrap();
        let r = build_retraction(&g, &c).unwrap();
        let q = r.eval(&g, &GraphPoint::new(1, 0.7)).unwrap();
        assert!(g.same_point(&q, &g.vertex_point(0)));
    }

    #[test]
    fn theta_edge_goes_to_shorter_arc() {
        let g = graph(2, &[(0, 1, 1.0), (0, 1, 2.0), (0, 1, 3.0)]);
        let c = Circle::from_edge_set(&g, &[0, 1]).unwrap();
        let r = build_retraction(&g, &c).unwrap();
        let mid = r.eval(&g, &GraphPoint::new(2, 0.5)).unwrap();
        assert!(g.same_point(&mid, &GraphPoint::new(0, 0.5)));
    }

    #[test]
    fn rotation_numbers() {
        let g = graph(1, &[(0, 0, 1.0)]);
        let c = &enumerate_circles(&g)[0];
        let rho = rotation_number(&g, &rotation(&g, c, 0.3), c, 1000).unwrap();
        assert!((rho.value - 0.3).abs() <= rho.error);
        let id = GraphMap::identity(&g);
        assert!(rotation_number(&g, &id, c, 100).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn reflection_is_rejected() {
        let g = graph(1, &[(0, 0, 1.0)]);
        let refl = GraphMap {
            pieces: vec![vec![Piece::new(0.0, 1.0, vec![Segment::new(0, 1.0, 0.0)])]],
            vertex_images: vec![g.vertex_point(0)],
        };
        let c = Circle::from_edge_set(&g, &[0]).unwrap();
        assert!(matches!(rotation_number(&g, &refl, &c, 10), Err(Error::NotCircleSelfMap(_))));
    }

    #[test]
    fn monotonicity() {
        let g = graph(2, &[(0, 1, 1.0)]);
        let arc: Vec<_> = (0..=50).map(|k| GraphPoint::new(0, k as f64 / 50.0)).collect();
        let id = GraphMap::identity(&g);
        assert_eq!(arc_monotonicity_check(&g, &id, &arc).unwrap(), Monotonicity::Monotone);
        let tent = GraphMap {
            pieces: vec![vec![
                Piece::new(0.0, 0.5, vec![Segment::new(0, 0.0, 1.0)]),
                Piece::new(0.5, 1.0, vec![Segment::new(0, 1.0, 0.0)]),
            ]],
            vertex_images: vec![g.vertex_point(0), g.vertex_point(0)],
        };
        tent.validate(&g).unwrap();
        assert_eq!(arc_monotonicity_check(&g, &tent, &arc).unwrap(), Monotonicity::NotMonotone);
    }
}
