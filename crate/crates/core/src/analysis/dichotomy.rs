use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SampledSet, SpatialIndex};
use crate::base::BaseSystem;
use crate::bundle::{fibre_slice_at, BundlePoint, SkewSystem};
use crate::error::Result;
use crate::graph::{classify_sample_point, GraphPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    A1,
    A2,
    Inconclusive,
}

/// Scales for the end-point census and the interior detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DichotomyParams {
    /// Half-width of the base window that makes up a fibre slice.
    pub slice: f64,
    pub r: f64,
    pub delta: f64,
    /// Box radius for the interior detector.
    pub detector: f64,
    /// Smallest end-point fraction read as "bounded away from 0".
    pub a1_threshold: f64,
}

impl DichotomyParams {
    /// Scales tied to the resolution `res` of a δ-thinned sample. The
    /// classifier runs at `3 res` so the thinning gaps stay below it.
    pub fn from_resolution(res: f64) -> Self {
        DichotomyParams { slice: 1.5 * res, r: 12.0 * res, delta: 3.0 * res, detector: 3.0 * res, a1_threshold: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub endpoint_fraction: f64,
    pub end_points: usize,
    pub points: usize,
    pub interior_detected: bool,
    pub verdict: Verdict,
    pub scales: DichotomyParams,
}

pub fn endpoint_statistics(s: &SkewSystem, sample: &SampledSet, params: &DichotomyParams) -> Result<DichotomyReport> {
    let g = s.fibre();
    let flags: Vec<bool> = (0..sample.len())
        .into_par_iter()
        .map(|i| -> Result<bool> {
            let slice = fibre_slice_at(s, sample, sample.coords[i], params.slice)?;
            Ok(classify_sample_point(g, &slice, &sample.points[i].y, params.r, params.delta)?.is_end_point())
        })
        .collect::<Result<_>>()?;
    let end_points = flags.iter().filter(|&&b| b).count();
    let endpoint_fraction = if flags.is_empty() { 0.0 } else { end_points as f64 / flags.len() as f64 };
    let interior_detected = interior_detector(s, sample, params.detector)?;
    let verdict = if !sample.is_empty() && end_points == 0 && interior_detected {
        Verdict::A2
    } else if endpoint_fraction >= params.a1_threshold && !interior_detected {
        Verdict::A1
    } else {
        Verdict::Inconclusive
    };
    Ok(DichotomyReport {
        endpoint_fraction,
        end_points,
        points: flags.len(),
        interior_detected,
        verdict,
        scales: *params,
    })
}

const MAX_CENTERS: usize = 64;
const BASE_REFERENCE: usize = 2048;

// base coordinates spread over the base ball of radius `d` around `c`
fn base_ball(base: &BaseSystem, c: f64, d: f64, reference: &[f64]) -> Vec<f64> {
    match base {
        BaseSystem::Rotation { .. } | BaseSystem::Sturmian(_) => {
            (-4..=4).map(|k| (c + k as f64 * d / 4.0).rem_euclid(1.0)).collect()
        }
        _ => reference.iter().copied().filter(|&x| base.coordinate_distance(x, c) <= d).collect(),
    }
}

fn reference_coords(base: &BaseSystem) -> Result<Vec<f64>> {
    base.sampler(BASE_REFERENCE, 11).iter().map(|b| base.coordinate(b)).collect()
}

fn fibre_ball(s: &SkewSystem, y: &GraphPoint, d: f64) -> Vec<GraphPoint> {
    let g = s.fibre();
    let mut out = Vec::new();
    for (e, lo, hi) in g.ball(y, d) {
        let len = g.length(e);
        let n = ((hi - lo) * len / (d / 4.0)).ceil().max(1.0) as usize;
        out.extend((0..=n).map(|k| GraphPoint::new(e, lo + (hi - lo) * k as f64 / n as f64)));
    }
    out
}

fn covered_at(
    s: &SkewSystem,
    sample: &SampledSet,
    index: &SpatialIndex,
    bc: f64,
    y: &GraphPoint,
    r: f64,
    cand: &mut Vec<usize>,
) -> Result<bool> {
    index.candidates(&s.bundle, bc, y, r, cand)?;
    for &j in cand.iter() {
        let yj = s.bundle.transport(&sample.points[j].y, sample.coords[j], bc)?;
        if s.base.coordinate_distance(bc, sample.coords[j]) <= r && s.fibre().path_distance(y, &yj) <= r {
            return Ok(true);
        }
    }
    Ok(false)
}

fn build_index(s: &SkewSystem, sample: &SampledSet, cell: f64) -> SpatialIndex {
    let mut index = SpatialIndex::new(&s.base, cell);
    for (j, p) in sample.points.iter().enumerate() {
        index.insert(s.fibre(), j, sample.coords[j], &p.y);
    }
    index
}

fn box_covered_with(
    s: &SkewSystem,
    sample: &SampledSet,
    index: &SpatialIndex,
    reference: &[f64],
    center: (f64, &GraphPoint),
    d: f64,
) -> Result<bool> {
    let mut cand = Vec::new();
    let bases = base_ball(&s.base, center.0, d, reference);
    let fibres = fibre_ball(s, center.1, d);
    for &bc in &bases {
        for y in &fibres {
            if !covered_at(s, sample, index, bc, y, d / 2.0, &mut cand)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether the product box of radius `d` around `center` is `d/2`-covered.
pub fn box_covered(s: &SkewSystem, sample: &SampledSet, center: &BundlePoint, d: f64) -> Result<bool> {
    let index = build_index(s, sample, d / 2.0);
    let reference = reference_coords(&s.base)?;
    box_covered_with(s, sample, &index, &reference, (s.base.coordinate(&center.b)?, &center.y), d)
}

/// Looks for a product box (base `d`-ball × fibre `d`-ball) centred at a
/// sample point and `d/2`-covered by the sample.
pub fn interior_detector(s: &SkewSystem, sample: &SampledSet, d: f64) -> Result<bool> {
    if sample.is_empty() {
        return Ok(false);
    }
    let index = build_index(s, sample, d / 2.0);
    let reference = reference_coords(&s.base)?;
    let stride = sample.len().div_ceil(MAX_CENTERS);
    let centers: Vec<usize> = (0..sample.len()).step_by(stride).collect();
    let hits: Vec<bool> = centers
        .par_iter()
        .map(|&i| box_covered_with(s, sample, &index, &reference, (sample.coords[i], &sample.points[i].y), d))
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().any(|h| h))
}
