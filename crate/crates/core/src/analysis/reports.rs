use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify::{covered_circles, distance_to_edges, minimal_cover, FibreNet};
use super::{classify_fibre_with, ClassifyParams, FibreKind, SampledSet};
use crate::base::{BasePoint, BaseSystem};
use crate::bundle::{fibre_slice_at, BundlePoint, SkewSystem};
use crate::error::{Error, Result};
use crate::graph::{enumerate_circles, Circle, GraphPoint};

pub const HOMEO_WINDOW: usize = 10;
pub const TYPICAL_SHARE: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceParams {
    /// Half-width of the base window.
    pub slice: f64,
    /// Clustering and covering scale.
    pub delta: f64,
    #[serde(default)]
    pub classify: ClassifyParams,
}

impl SliceParams {
    pub fn from_resolution(res: f64) -> Self {
        SliceParams { slice: res, delta: 1.5 * res, classify: ClassifyParams::default() }
    }
}

/// Whether `b` and its first [`HOMEO_WINDOW`] backward images all have a
/// single preimage. Stops early, accepting, where preimages are not computable.
pub fn homeo_window_ok(base: &BaseSystem, b: &BasePoint) -> bool {
    let mut x = *b;
    for _ in 0..HOMEO_WINDOW {
        match base.preimage_count(&x) {
            Ok(1) => {}
            Ok(_) => return false,
            Err(_) => return true,
        }
        match base.preimages(&x) {
            Ok(pre) if pre.len() == 1 => x = pre[0],
            _ => return true,
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub probe: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    pub coordinate: f64,
    pub accepted: bool,
    pub class: FibreKind,
    pub slice_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", content = "count", rename_all = "snake_case")]
pub enum TypicalClass {
    FiniteN(usize),
    CantorLike,
    Circles(usize),
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrichotomyReport {
    pub typical: TypicalClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub exceptional: Vec<ProbeEntry>,
    pub totally_disconnected_fraction: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub scales: SliceParams,
    pub probes: Vec<ProbeEntry>,
}

fn probe_entry(s: &SkewSystem, sample: &SampledSet, b: &BasePoint, accepted: bool, p: &SliceParams) -> Result<ProbeEntry> {
    let c = s.base.coordinate(b)?;
    let slice = fibre_slice_at(s, sample, c, p.slice)?;
    let class = classify_fibre_with(s.fibre(), &slice, p.delta, &p.classify).kind;
    Ok(ProbeEntry { probe: b.encode(), tag: s.base.tag(b), coordinate: c, accepted, class, slice_size: slice.len() })
}

fn typical_of(kinds: &[FibreKind]) -> (TypicalClass, Option<usize>) {
    let total = kinds.len() as f64;
    let share = |f: &dyn Fn(&FibreKind) -> bool| kinds.iter().filter(|k| f(k)).count() as f64 / total;
    if share(&|k| matches!(k, FibreKind::FiniteN(_))) >= TYPICAL_SHARE {
        let n = kinds.iter().filter_map(|k| if let FibreKind::FiniteN(n) = k { Some(*n) } else { None }).min();
        return (TypicalClass::FiniteN(n.unwrap_or(0)), n);
    }
    if share(&|k| *k == FibreKind::CantorLike) >= TYPICAL_SHARE {
        return (TypicalClass::CantorLike, None);
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for k in kinds {
        if let FibreKind::Circles(m) = k {
            *counts.entry(*m).or_default() += 1;
        }
    }
    if let Some((&m, &c)) = counts.iter().max_by_key(|(m, c)| (**c, std::cmp::Reverse(**m))) {
        if c as f64 / total >= TYPICAL_SHARE {
            return (TypicalClass::Circles(m), None);
        }
    }
    (TypicalClass::Unknown, None)
}

fn matches_typical(t: TypicalClass, k: FibreKind) -> bool {
    match (t, k) {
        (TypicalClass::FiniteN(n), FibreKind::FiniteN(m)) => n == m,
        (TypicalClass::CantorLike, FibreKind::CantorLike) => true,
        (TypicalClass::Circles(n), FibreKind::Circles(m)) => n == m,
        _ => false,
    }
}

/// Classifies the fibre slices over `probes` (and over the tagged base
/// points), keeping probes that pass [`homeo_window_ok`] for the verdict.
pub fn typical_fibre_report(
    s: &SkewSystem,
    sample: &SampledSet,
    probes: &[BasePoint],
    params: &SliceParams,
) -> Result<TrichotomyReport> {
    let entries: Vec<ProbeEntry> = probes
        .par_iter()
        .map(|b| probe_entry(s, sample, b, homeo_window_ok(&s.base, b), params))
        .collect::<Result<_>>()?;
    let kinds: Vec<FibreKind> = entries.iter().filter(|e| e.accepted).map(|e| e.class).collect();
    if kinds.is_empty() {
        return Err(Error::NoProbes);
    }
    let (typical, n) = typical_of(&kinds);
    let td = kinds.iter().filter(|k| matches!(k, FibreKind::FiniteN(_) | FibreKind::CantorLike)).count();
    let mut exceptional: Vec<ProbeEntry> =
        entries.iter().filter(|e| !matches_typical(typical, e.class)).cloned().collect();
    for (_, b) in s.base.tagged_points() {
        let e = probe_entry(s, sample, &b, homeo_window_ok(&s.base, &b), params)?;
        if !matches_typical(typical, e.class) && !exceptional.iter().any(|x| x.probe == e.probe) {
            exceptional.push(e);
        }
    }
    Ok(TrichotomyReport {
        typical,
        n,
        exceptional,
        totally_disconnected_fraction: td as f64 / kinds.len() as f64,
        accepted: kinds.len(),
        rejected: entries.len() - kinds.len(),
        scales: *params,
        probes: entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirclesProbe {
    pub probe: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    pub coordinate: f64,
    pub class: FibreKind,
    /// Edge sets of the covering circles.
    pub circles: Vec<Vec<usize>>,
    /// Edge sets of the image circles, when the probe was checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c8: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirclesReport {
    pub m: usize,
    pub exceptional: Vec<CirclesProbe>,
    pub c8_pass: bool,
    pub c8_checked: usize,
    pub c8_passed: usize,
    pub scales: SliceParams,
    pub probes: Vec<CirclesProbe>,
}

struct Covering {
    class: FibreKind,
    cover: Vec<usize>,
}

fn covering(s: &SkewSystem, circles: &[Circle], slice: &[GraphPoint], p: &SliceParams) -> Covering {
    let class = classify_fibre_with(s.fibre(), slice, p.delta, &p.classify).kind;
    let cover = match class {
        FibreKind::Circles(_) => minimal_cover(circles, &covered_circles(s.fibre(), circles, slice, p.delta)),
        _ => Vec::new(),
    };
    Covering { class, cover }
}

// the circle of the fibre that the image of `c` over `b` traces, if any
fn image_circle(s: &SkewSystem, circles: &[Circle], b: &BasePoint, c: &Circle, delta: f64) -> Result<Option<usize>> {
    let g = s.fibre();
    let n = (c.length / (delta / 4.0)).ceil().max(8.0) as usize;
    let images: Vec<GraphPoint> = (0..n)
        .map(|k| s.apply(&BundlePoint { b: *b, y: c.point_at(g, c.length * k as f64 / n as f64) }).map(|x| x.y))
        .collect::<Result<_>>()?;
    let net = FibreNet::new(g, &images);
    for (i, target) in circles.iter().enumerate() {
        let edges = target.edges();
        let near = images.iter().all(|y| distance_to_edges(g, &edges, y) <= delta);
        let m = (target.length / (delta / 2.0)).ceil().max(3.0) as usize;
        let onto = near && (0..m).all(|k| net.nearest(&target.point_at(g, target.length * k as f64 / m as f64)) <= delta);
        if onto {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

fn circle_edges(circles: &[Circle], idx: &[usize]) -> Vec<Vec<usize>> {
    idx.iter().map(|&i| circles[i].edges().into_iter().collect()).collect()
}

/// Modal circle count over `probes`, the fibres carrying more circles, and
/// the check that the fibre map sends the `m` circles onto `m` disjoint
/// circles at every probe where the count is `m`.
pub fn circles_report(s: &SkewSystem, sample: &SampledSet, probes: &[BasePoint], params: &SliceParams) -> Result<CirclesReport> {
    let g = s.fibre();
    let circles = enumerate_circles(g);
    let probe = |b: &BasePoint| -> Result<(CirclesProbe, Vec<usize>)> {
        let c = s.base.coordinate(b)?;
        let slice = fibre_slice_at(s, sample, c, params.slice)?;
        let cov = covering(s, &circles, &slice, params);
        Ok((
            CirclesProbe {
                probe: b.encode(),
                tag: s.base.tag(b),
                coordinate: c,
                class: cov.class,
                circles: circle_edges(&circles, &cov.cover),
                images: None,
                c8: None,
            },
            cov.cover,
        ))
    };
    let mut rows: Vec<(CirclesProbe, Vec<usize>)> = probes.par_iter().map(probe).collect::<Result<_>>()?;
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for (r, _) in &rows {
        if let FibreKind::Circles(m) = r.class {
            *counts.entry(m).or_default() += 1;
        }
    }
    let circle_probes: usize = counts.values().sum();
    if rows.is_empty() || 2 * circle_probes <= rows.len() {
        return Err(Error::NotCircleCase);
    }
    let m = *counts.iter().max_by_key(|(m, c)| (**c, std::cmp::Reverse(**m))).unwrap().0;

    let checked: Vec<(usize, Vec<Vec<usize>>, bool)> = rows
        .par_iter()
        .enumerate()
        .filter(|(_, (r, _))| r.class == FibreKind::Circles(m))
        .map(|(i, (_, cover))| -> Result<(usize, Vec<Vec<usize>>, bool)> {
            let b = probes[i];
            let mut found = Vec::new();
            for &ci in cover {
                found.push(image_circle(s, &circles, &b, &circles[ci], params.delta)?);
            }
            let ok_all = found.iter().all(Option::is_some);
            let idx: Vec<usize> = found.into_iter().flatten().collect();
            let distinct = idx.iter().collect::<BTreeSet<_>>().len() == idx.len();
            let disjoint = idx.iter().enumerate().all(|(a, &x)| {
                idx[..a].iter().all(|&y| circles[x].is_disjoint_from(g, &circles[y]))
            });
            Ok((i, circle_edges(&circles, &idx), ok_all && distinct && disjoint && idx.len() == m))
        })
        .collect::<Result<_>>()?;
    let c8_checked = checked.len();
    let c8_passed = checked.iter().filter(|c| c.2).count();
    for (i, images, ok) in checked {
        rows[i].0.images = Some(images);
        rows[i].0.c8 = Some(ok);
    }
    let mut exceptional: Vec<CirclesProbe> = rows
        .iter()
        .filter(|(r, cover)| matches!(r.class, FibreKind::Circles(k) if k > m) && !cover.is_empty())
        .map(|(r, _)| r.clone())
        .collect();
    for (_, b) in s.base.tagged_points() {
        let (r, _) = probe(&b)?;
        if matches!(r.class, FibreKind::Circles(k) if k > m) && !exceptional.iter().any(|x| x.probe == r.probe) {
            exceptional.push(r);
        }
    }
    Ok(CirclesReport {
        m,
        exceptional,
        c8_pass: c8_checked > 0 && c8_passed == c8_checked,
        c8_checked,
        c8_passed,
        scales: *params,
        probes: rows.into_iter().map(|(r, _)| r).collect(),
    })
}
