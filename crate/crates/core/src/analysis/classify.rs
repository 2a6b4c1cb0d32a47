use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::{enumerate_circles, Circle, GraphPoint, MetricGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", content = "count", rename_all = "snake_case")]
pub enum FibreKind {
    FiniteN(usize),
    CantorLike,
    Circles(usize),
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FibreClass {
    pub kind: FibreKind,
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    pub cantor_min_components: usize,
    /// Largest cluster diameter allowed for Cantor dust, in units of δ.
    pub cantor_max_diameter: f64,
    pub cantor_growth: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams { cantor_min_components: 20, cantor_max_diameter: 10.0, cantor_growth: 1.5 }
    }
}

/// Nearest-point queries against a finite subset of a graph.
pub struct FibreNet<'a> {
    g: &'a MetricGraph,
    per_edge: Vec<Vec<f64>>,
    vertex_dist: Vec<f64>,
}

impl<'a> FibreNet<'a> {
    pub fn new(g: &'a MetricGraph, pts: &[GraphPoint]) -> Self {
        let mut per_edge = vec![Vec::new(); g.edge_count()];
        for p in pts {
            per_edge[p.edge].push(p.t);
        }
        for v in &mut per_edge {
            v.sort_by(f64::total_cmp);
        }
        let vertex_dist = (0..g.vertex_count())
            .map(|v| {
                let vp = g.vertex_point(v);
                pts.iter().map(|q| g.path_distance(&vp, q)).fold(f64::INFINITY, f64::min)
            })
            .collect();
        FibreNet { g, per_edge, vertex_dist }
    }

    pub fn nearest(&self, p: &GraphPoint) -> f64 {
        let e = self.g.edge(p.edge);
        let len = e.length;
        let mut best = (p.t * len + self.vertex_dist[e.from]).min((1.0 - p.t) * len + self.vertex_dist[e.to]);
        let ts = &self.per_edge[p.edge];
        let i = ts.partition_point(|&t| t < p.t);
        if i < ts.len() {
            best = best.min((ts[i] - p.t) * len);
        }
        if i > 0 {
            best = best.min((p.t - ts[i - 1]) * len);
        }
        best
    }
}

fn circle_grid(g: &MetricGraph, c: &Circle, step: f64) -> Vec<GraphPoint> {
    let n = (c.length / step).ceil().max(3.0) as usize;
    (0..n).map(|k| c.point_at(g, c.length * k as f64 / n as f64)).collect()
}

/// Distance from `p` to the subgraph spanned by `edges`.
pub(crate) fn distance_to_edges(g: &MetricGraph, edges: &BTreeSet<usize>, p: &GraphPoint) -> f64 {
    if edges.contains(&p.edge) {
        return 0.0;
    }
    edges
        .iter()
        .flat_map(|&e| [g.edge(e).from, g.edge(e).to])
        .map(|v| g.path_distance(p, &g.vertex_point(v)))
        .fold(f64::INFINITY, f64::min)
}

/// Indices (into [`enumerate_circles`]) of the circles of `g` that every
/// point of a `δ/2` grid sees within `δ` of the sample.
pub fn covered_circles(g: &MetricGraph, circles: &[Circle], sample: &[GraphPoint], delta: f64) -> Vec<usize> {
    let net = FibreNet::new(g, sample);
    circles
        .iter()
        .enumerate()
        .filter(|(_, c)| circle_grid(g, c, delta / 2.0).iter().all(|p| net.nearest(p) <= delta))
        .map(|(i, _)| i)
        .collect()
}

/// Fewest circles among `chosen` whose edges cover the union of all of them.
pub(crate) fn minimal_cover(circles: &[Circle], chosen: &[usize]) -> Vec<usize> {
    let union: BTreeSet<usize> = chosen.iter().flat_map(|&i| circles[i].edges()).collect();
    let k = chosen.len();
    if k <= 16 {
        let mut best: Option<Vec<usize>> = None;
        for mask in 1u32..(1 << k) {
            let size = mask.count_ones() as usize;
            if best.as_ref().is_some_and(|b| b.len() <= size) {
                continue;
            }
            let pick: Vec<usize> = (0..k).filter(|&j| mask & (1 << j) != 0).map(|j| chosen[j]).collect();
            let cov: BTreeSet<usize> = pick.iter().flat_map(|&i| circles[i].edges()).collect();
            if cov == union {
                best = Some(pick);
            }
        }
        return best.unwrap_or_default();
    }
    let mut left = union;
    let mut pick = Vec::new();
    while !left.is_empty() {
        let &i = chosen.iter().max_by_key(|&&i| circles[i].edges().intersection(&left).count()).unwrap();
        for e in circles[i].edges() {
            left.remove(&e);
        }
        pick.push(i);
    }
    pick
}

struct Clusters {
    count: usize,
    max_diameter: f64,
    gap: f64,
}

fn clusters(g: &MetricGraph, pts: &[GraphPoint], cutoff: f64) -> Clusters {
    let n = pts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            let d = g.path_distance(&pts[i], &pts[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
            if d <= cutoff {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let count = roots.iter().collect::<BTreeSet<_>>().len();
    let mut max_diameter: f64 = 0.0;
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for j in 0..i {
            let d = dist[i * n + j];
            if roots[i] == roots[j] {
                max_diameter = max_diameter.max(d);
            } else {
                gap = gap.min(d);
            }
        }
    }
    Clusters { count, max_diameter, gap }
}

pub fn classify_fibre(g: &MetricGraph, fibre_sample: &[GraphPoint], delta: f64) -> FibreClass {
    classify_fibre_with(g, fibre_sample, delta, &ClassifyParams::default())
}

pub fn classify_fibre_with(g: &MetricGraph, fibre_sample: &[GraphPoint], delta: f64, params: &ClassifyParams) -> FibreClass {
    let class = |kind| FibreClass { kind, scale: delta };
    if fibre_sample.is_empty() {
        return class(FibreKind::Unknown);
    }
    let circles = enumerate_circles(g);
    let covered = covered_circles(g, &circles, fibre_sample, delta);
    if !covered.is_empty() {
        let union: BTreeSet<usize> = covered.iter().flat_map(|&i| circles[i].edges()).collect();
        if fibre_sample.iter().all(|p| distance_to_edges(g, &union, p) <= delta) {
            return class(FibreKind::Circles(minimal_cover(&circles, &covered).len()));
        }
    }
    let at = clusters(g, fibre_sample, delta);
    if at.max_diameter < delta / 2.0 && at.count as f64 * at.gap > 10.0 * delta {
        return class(FibreKind::FiniteN(at.count));
    }
    if at.count >= params.cantor_min_components && at.max_diameter < params.cantor_max_diameter * delta {
        let half = clusters(g, fibre_sample, delta / 2.0);
        if half.count as f64 >= params.cantor_growth * at.count as f64 {
            return class(FibreKind::CantorLike);
        }
    }
    class(FibreKind::Unknown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;

    fn graph(n: u32, edges: &[(u32, u32, f64)]) -> MetricGraph {
        MetricGraph::new(&GraphSpec::from_edges(n, edges)).unwrap()
    }

    #[test]
    fn circle_net_is_one_circle() {
        let g = graph(1, &[(0, 0, 1.0)]);
        let pts: Vec<GraphPoint> = (0..100).map(|i| GraphPoint::new(0, i as f64 / 100.0)).collect();
        assert_eq!(classify_fibre(&g, &pts, 0.02).kind, FibreKind::Circles(1));
    }

    #[test]
    fn five_far_points() {
        let g = graph(2, &[(0, 1, 10.0)]);
        let pts: Vec<GraphPoint> = (0..5).map(|i| GraphPoint::new(0, 0.05 + 0.2 * i as f64)).collect();
        assert_eq!(classify_fibre(&g, &pts, 0.1).kind, FibreKind::FiniteN(5));
    }

    #[test]
    fn half_circle_on_theta_is_not_circles() {
        // theta graph: two vertices, three edges of length 1
        let g = graph(2, &[(0, 1, 1.0), (0, 1, 1.0), (0, 1, 1.0)]);
        let pts: Vec<GraphPoint> = (0..=50).map(|i| GraphPoint::new(0, i as f64 / 50.0)).collect();
        assert_ne!(classify_fibre(&g, &pts, 0.05).kind, FibreKind::Circles(1));
        let mut both = pts.clone();
        both.extend((0..=50).map(|i| GraphPoint::new(1, i as f64 / 50.0)));
        assert_eq!(classify_fibre(&g, &both, 0.05).kind, FibreKind::Circles(1));
        let mut all = both.clone();
        all.extend((0..=50).map(|i| GraphPoint::new(2, i as f64 / 50.0)));
        assert_eq!(classify_fibre(&g, &all, 0.05).kind, FibreKind::Circles(2));
    }

    #[test]
    fn middle_thirds_dust_is_cantor_like() {
        let mut pts = vec![0.0f64];
        let mut pts_r = vec![1.0f64];
        for _ in 0..7 {
            let l: Vec<f64> = pts.iter().chain(&pts_r).map(|x| x / 3.0).collect();
            let r: Vec<f64> = l.iter().map(|x| x + 2.0 / 3.0).collect();
            pts = l;
            pts_r = r;
        }
        let g = graph(2, &[(0, 1, 1.0)]);
        let sample: Vec<GraphPoint> = pts.iter().chain(&pts_r).map(|&x| GraphPoint::new(0, x)).collect();
        assert_eq!(classify_fibre(&g, &sample, 0.0025).kind, FibreKind::CantorLike);
    }

    #[test]
    fn net_nearest_matches_brute_force() {
        let g = graph(2, &[(0, 1, 1.0), (0, 1, 2.0), (1, 1, 0.5)]);
        let pts = vec![GraphPoint::new(0, 0.3), GraphPoint::new(1, 0.9), GraphPoint::new(2, 0.5)];
        let net = FibreNet::new(&g, &pts);
        for p in g.grid(0.05) {
            let brute = pts.iter().map(|q| g.path_distance(&p, q)).fold(f64::INFINITY, f64::min);
            assert!((net.nearest(&p) - brute).abs() < 1e-12);
        }
    }
}
