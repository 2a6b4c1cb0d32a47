//! Finite-resolution surrogates for minimal sets and the verdicts read off them.

mod classify;
mod dichotomy;
mod falsify;
mod index;
mod reports;

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

pub use classify::{classify_fibre, classify_fibre_with, covered_circles, ClassifyParams, FibreClass, FibreKind, FibreNet};
pub use dichotomy::{box_covered, endpoint_statistics, interior_detector, DichotomyParams, DichotomyReport, Verdict};
pub use falsify::{equidistribution_discrepancy, redundant_open_set_test};
pub use index::SpatialIndex;
pub use reports::{
    circles_report, homeo_window_ok, typical_fibre_report, CirclesProbe, CirclesReport, ProbeEntry, SliceParams,
    TrichotomyReport, TypicalClass, HOMEO_WINDOW, TYPICAL_SHARE,
};

use crate::base::BasePoint;
use crate::bundle::{BundlePoint, SkewSystem};
use crate::error::{Error, Result};
use crate::graph::GraphPoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub system: String,
    pub seed: String,
    pub transient: usize,
    pub steps: usize,
}

/// Metadata stored next to the CSV of a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub resolution: f64,
    pub count: usize,
    pub provenance: Provenance,
}

/// δ-separated finite surrogate of a minimal set.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSet {
    pub resolution: f64,
    pub points: Vec<BundlePoint>,
    /// Base coordinate of every point.
    pub coords: Vec<f64>,
    pub provenance: Provenance,
    order: Vec<usize>,
    sorted: Vec<f64>,
    periodic: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    base: String,
    coord: f64,
    tag: String,
    edge: usize,
    t: f64,
}

impl SampledSet {
    pub fn new(s: &SkewSystem, resolution: f64, points: Vec<BundlePoint>, provenance: Provenance) -> Result<Self> {
        let coords = points.iter().map(|p| s.base.coordinate(&p.b)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(resolution, points, coords, provenance, s.base.coordinate_period().is_some()))
    }

    fn from_parts(resolution: f64, points: Vec<BundlePoint>, coords: Vec<f64>, provenance: Provenance, periodic: bool) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| coords[a].total_cmp(&coords[b]).then(a.cmp(&b)));
        let sorted = order.iter().map(|&i| coords[i]).collect();
        SampledSet { resolution, points, coords, provenance, order, sorted, periodic }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn meta(&self) -> SampleMeta {
        SampleMeta { resolution: self.resolution, count: self.len(), provenance: self.provenance.clone() }
    }

    /// Indices of points whose base coordinate is within `w` of `c`, in
    /// coordinate order.
    pub fn base_window(&self, c: f64, w: f64) -> Vec<usize> {
        let range = |lo: f64, hi: f64| {
            let a = self.sorted.partition_point(|&x| x < lo);
            let b = self.sorted.partition_point(|&x| x <= hi);
            a..b
        };
        let mut out = Vec::new();
        if self.periodic {
            if w >= 0.5 {
                return self.order.clone();
            }
            if c - w < 0.0 {
                out.extend(self.order[range(c - w + 1.0, 1.0)].iter());
            }
            out.extend(self.order[range(c - w, c + w)].iter());
            if c + w >= 1.0 {
                out.extend(self.order[range(0.0, c + w - 1.0)].iter());
            }
        } else {
            out.extend(self.order[range(c - w, c + w)].iter());
        }
        out
    }

    pub fn write_csv<W: Write>(&self, s: &SkewSystem, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for (p, &coord) in self.points.iter().zip(&self.coords) {
            let row = Row {
                base: p.b.encode(),
                coord,
                tag: s.base.tag(&p.b).unwrap_or_default(),
                edge: p.y.edge,
                t: p.y.t,
            };
            wr.serialize(row).map_err(|e| Error::Config(e.to_string()))?;
        }
        wr.flush().map_err(|e| Error::Config(e.to_string()))
    }

    /// Inverse of [`SampledSet::write_csv`]; every row is checked against `s`.
    pub fn read_csv<R: Read>(s: &SkewSystem, r: R, meta: &SampleMeta) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut points = Vec::new();
        let mut coords = Vec::new();
        for (line, row) in rd.deserialize::<Row>().enumerate() {
            let row = row.map_err(|e| Error::Config(format!("row {}: {e}", line + 1)))?;
            let p = BundlePoint { b: BasePoint::decode(&row.base)?, y: GraphPoint::new(row.edge, row.t) };
            s.check(&p).map_err(|e| Error::Config(format!("row {}: {e}", line + 1)))?;
            points.push(p);
            coords.push(row.coord);
        }
        if points.len() != meta.count {
            return Err(Error::Config(format!("expected {} rows, found {}", meta.count, points.len())));
        }
        Ok(Self::from_parts(meta.resolution, points, coords, meta.provenance.clone(), s.base.coordinate_period().is_some()))
    }
}

/// Encoding of a bundle point used in provenance records.
pub fn encode_point(p: &BundlePoint) -> String {
    format!("{}|{}|{}", p.b.encode(), p.y.edge, p.y.t)
}

/// Inverse of [`encode_point`].
pub fn decode_point(s: &str) -> Result<BundlePoint> {
    let bad = || Error::InvalidPoint(format!("cannot parse bundle point {s:?}"));
    let mut parts = s.rsplitn(3, '|');
    let t = parts.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
    let edge = parts.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
    let b = BasePoint::decode(parts.next().ok_or_else(bad)?)?;
    Ok(BundlePoint { b, y: GraphPoint::new(edge, t) })
}

/// Follows the orbit of `seed` for `transient + n` steps and keeps the last
/// `n` points greedily thinned to a δ-separated set.
pub fn approximate_minimal_set(
    s: &SkewSystem,
    seed: &BundlePoint,
    transient: usize,
    n: usize,
    delta: f64,
) -> Result<SampledSet> {
    if n == 0 {
        return Err(Error::WrongInput("need n >= 1".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::OutOfRange { name: "delta", value: delta });
    }
    let mut x = *seed;
    for _ in 0..transient {
        x = s.apply(&x)?;
    }
    let mut index = SpatialIndex::new(&s.base, delta);
    let mut kept: Vec<BundlePoint> = Vec::new();
    let mut coords: Vec<f64> = Vec::new();
    let mut cand = Vec::new();
    for step in 0..n {
        if step > 0 {
            x = s.apply(&x)?;
        }
        let c = s.base.coordinate(&x.b)?;
        index.candidates(&s.bundle, c, &x.y, delta, &mut cand)?;
        let mut far = true;
        for &j in &cand {
            if s.distance_at(&x, c, &kept[j], coords[j])? <= delta {
                far = false;
                break;
            }
        }
        if far {
            index.insert(s.fibre(), kept.len(), c, &x.y);
            kept.push(x);
            coords.push(c);
        }
    }
    let provenance = Provenance {
        system: s.construction.clone().unwrap_or_else(|| "custom".into()),
        seed: encode_point(seed),
        transient,
        steps: n,
    };
    Ok(SampledSet::from_parts(delta, kept, coords, provenance, s.base.coordinate_period().is_some()))
}

/// One-sided Hausdorff excess of `a` over `b`, saturating at `cap`.
fn excess(s: &SkewSystem, a: &SampledSet, b: &SampledSet, cap: f64) -> Result<f64> {
    let mut index = SpatialIndex::new(&s.base, cap);
    for (j, p) in b.points.iter().enumerate() {
        index.insert(s.fibre(), j, b.coords[j], &p.y);
    }
    let mut worst: f64 = 0.0;
    let mut cand = Vec::new();
    for (i, p) in a.points.iter().enumerate() {
        index.candidates(&s.bundle, a.coords[i], &p.y, cap, &mut cand)?;
        let mut best = cap;
        for &j in &cand {
            best = best.min(s.distance_at(p, a.coords[i], &b.points[j], b.coords[j])?);
        }
        worst = worst.max(best);
        if worst >= cap {
            return Ok(cap);
        }
    }
    Ok(worst)
}

/// Hausdorff distance between two samples in the bundle metric, or `cap`
/// if it is at least `cap`.
pub fn hausdorff_distance(s: &SkewSystem, a: &SampledSet, b: &SampledSet, cap: f64) -> Result<f64> {
    Ok(excess(s, a, b, cap)?.max(excess(s, b, a, cap)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::circle_rotation;
    use crate::bundle::{product_bundle, FibreFamily, Selector};
    use crate::graph::{GraphMap, GraphSpec, MetricGraph};

    fn identity_over_rotation() -> SkewSystem {
        let g = MetricGraph::new(&GraphSpec::from_edges(2, &[(0, 1, 1.0)])).unwrap();
        let fam = FibreFamily { maps: vec![GraphMap::identity(&g)], selector: Selector::Constant };
        SkewSystem::new(circle_rotation(0.5f64.sqrt()).unwrap(), product_bundle(g), fam).unwrap()
    }

    #[test]
    fn identity_fibre_gives_circle_times_point() {
        let s = identity_over_rotation();
        let seed = BundlePoint { b: BasePoint::angle(0.0), y: GraphPoint::new(0, 0.3) };
        let m = approximate_minimal_set(&s, &seed, 0, 5000, 0.01).unwrap();
        assert!(m.points.iter().all(|p| p.y == seed.y));
        // a δ-separated net of the circle has between 1/(2δ) and 1/δ points
        assert!(m.len() >= 50 && m.len() <= 100, "{}", m.len());
        for i in 0..m.len() {
            for j in 0..i {
                assert!(s.distance(&m.points[i], &m.points[j]).unwrap() > 0.01);
            }
        }
    }

    #[test]
    fn base_window_wraps() {
        let s = identity_over_rotation();
        let seed = BundlePoint { b: BasePoint::angle(0.0), y: GraphPoint::new(0, 0.3) };
        let m = approximate_minimal_set(&s, &seed, 0, 2000, 0.01).unwrap();
        let w = m.base_window(0.01, 0.05);
        let brute: Vec<usize> =
            (0..m.len()).filter(|&i| s.base.coordinate_distance(m.coords[i], 0.01) <= 0.05).collect();
        let mut got = w.clone();
        got.sort();
        assert_eq!(got, brute);
    }

    #[test]
    fn csv_round_trip() {
        let s = identity_over_rotation();
        let seed = BundlePoint { b: BasePoint::angle(0.1), y: GraphPoint::new(0, 0.3) };
        let m = approximate_minimal_set(&s, &seed, 10, 500, 0.02).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&s, &mut buf).unwrap();
        let back = SampledSet::read_csv(&s, buf.as_slice(), &m.meta()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn point_text_round_trip() {
        let p = BundlePoint { b: BasePoint::angle(0.25), y: GraphPoint::new(1, 0.125) };
        assert_eq!(decode_point(&encode_point(&p)).unwrap(), p);
        assert!(decode_point("angle:0.1|x|0.2").is_err());
    }

    #[test]
    fn doubling_steps_keeps_hausdorff_small() {
        let s = identity_over_rotation();
        let seed = BundlePoint { b: BasePoint::angle(0.0), y: GraphPoint::new(0, 0.5) };
        let a = approximate_minimal_set(&s, &seed, 0, 3000, 0.01).unwrap();
        let b = approximate_minimal_set(&s, &seed, 0, 6000, 0.01).unwrap();
        assert!(hausdorff_distance(&s, &a, &b, 1.0).unwrap() < 0.02);
    }
}
