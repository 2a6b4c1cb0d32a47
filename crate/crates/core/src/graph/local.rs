use serde::{Deserialize, Serialize};

use super::metric::{GraphPoint, MetricGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalKind {
    EndPoint,
    StarLikeInterior(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointLocalClass {
    pub kind: LocalKind,
    pub r: f64,
    pub delta: f64,
}

impl PointLocalClass {
    pub fn is_end_point(&self) -> bool {
        self.kind == LocalKind::EndPoint
    }
}

/// Finite-scale end-point test for a sample point `p` of a δ-net.
///
/// Sample points in the annulus `δ < d ≤ r` around `p` are sorted onto the
/// germ at `p` through which they are reached first; a germ is a branch when
/// it also carries a point within `2δ`. Two or more branches make `p` a
/// star-like interior point.
pub fn classify_sample_point(
    g: &MetricGraph,
    sample: &[GraphPoint],
    p: &GraphPoint,
    r: f64,
    delta: f64,
) -> Result<PointLocalClass> {
    if !(delta > 0.0) || delta >= r {
        return Err(Error::ScaleError { r, delta });
    }
    g.check_point(p)?;
    let germs = g.germs_at(p);
    let witness = 2.0 * delta * (1.0 + 1e-9);
    let mut near = vec![false; germs.len()];
    for q in sample {
        let d = g.path_distance(p, q);
        if d <= delta || d > r {
            continue;
        }
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, germ) in germs.iter().enumerate() {
            let dg = g.distance_via_germ(p, *germ, q);
            if dg < best_d - 1e-12 {
                best_d = dg;
                best = i;
            }
        }
        if d <= witness {
            near[best] = true;
        }
    }
    let k = near.iter().filter(|&&b| b).count();
    let kind = if k >= 2 { LocalKind::StarLikeInterior(k) } else { LocalKind::EndPoint };
    Ok(PointLocalClass { kind, r, delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::metric::GraphSpec;

    #[test]
    fn circle_net_has_no_end_points() {
        let g = MetricGraph::new(&GraphSpec::from_edges(1, &[(0, 0, 1.0)])).unwrap();
        let delta = 0.01;
        let net = g.grid(delta);
        for p in &net {
            let c = classify_sample_point(&g, &net, p, 4.0 * delta, delta).unwrap();
            assert_eq!(c.kind, LocalKind::StarLikeInterior(2));
        }
    }

    #[test]
    fn isolated_point_is_end_point() {
        let g = MetricGraph::new(&GraphSpec::from_edges(2, &[(0, 1, 1.0)])).unwrap();
        let p = GraphPoint::new(0, 0.5);
        let c = classify_sample_point(&g, &[p], &p, 0.1, 0.01).unwrap();
        assert!(c.is_end_point());
        assert!(matches!(classify_sample_point(&g, &[p], &p, 0.01, 0.01), Err(Error::ScaleError { .. })));
    }

    #[test]
    fn star_center_has_three_branches() {
        let g = MetricGraph::new(&GraphSpec::from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])).unwrap();
        let delta = 0.01;
        let net = g.grid(delta);
        let c = classify_sample_point(&g, &net, &g.vertex_point(0), 4.0 * delta, delta).unwrap();
        assert_eq!(c.kind, LocalKind::StarLikeInterior(3));
        let tip = classify_sample_point(&g, &net, &g.vertex_point(1), 4.0 * delta, delta).unwrap();
        assert!(tip.is_end_point());
    }
}
