//! Graph bundles over base systems and fibre-preserving skew products.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::SampledSet;
use crate::base::{BasePoint, BaseSystem};
use crate::error::{Error, Result};
use crate::graph::{GraphMap, GraphPoint, MetricGraph};

const ROUND_TRIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Charts {
    Trivial,
    /// Single cut at base angle 0: `(1, y)` is glued to `(0, gluing(y))`.
    Monodromy { gluing: GraphMap, inverse: GraphMap },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BundleSpec {
    fibre: MetricGraph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gluing: Option<GraphMap>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BundleSpec", into = "BundleSpec")]
pub struct Bundle {
    pub fibre: MetricGraph,
    pub charts: Charts,
}

impl TryFrom<BundleSpec> for Bundle {
    type Error = Error;

    fn try_from(s: BundleSpec) -> Result<Self> {
        match s.gluing {
            None => Ok(product_bundle(s.fibre)),
            Some(g) => monodromy_fibre(s.fibre, g),
        }
    }
}

impl From<Bundle> for BundleSpec {
    fn from(b: Bundle) -> Self {
        let gluing = match b.charts {
            Charts::Trivial => None,
            Charts::Monodromy { gluing, .. } => Some(gluing),
        };
        BundleSpec { fibre: b.fibre, gluing }
    }
}

pub fn product_bundle(fibre: MetricGraph) -> Bundle {
    Bundle { fibre, charts: Charts::Trivial }
}

fn monodromy_fibre(fibre: MetricGraph, gluing: GraphMap) -> Result<Bundle> {
    gluing.validate(&fibre).map_err(|e| Error::NotHomeomorphism(e.to_string()))?;
    let inverse = gluing.inverse(&fibre)?;
    let step = fibre.edges().iter().map(|e| e.length).fold(f64::INFINITY, f64::min) / 64.0;
    for p in fibre.grid(step) {
        let there = gluing.eval(&fibre, &inverse.eval(&fibre, &p)?)?;
        let back = inverse.eval(&fibre, &gluing.eval(&fibre, &p)?)?;
        if fibre.path_distance(&there, &p) > ROUND_TRIP_TOL || fibre.path_distance(&back, &p) > ROUND_TRIP_TOL {
            return Err(Error::NotHomeomorphism(format!("round trip fails at edge {} t={}", p.edge, p.t)));
        }
    }
    Ok(Bundle { fibre, charts: Charts::Monodromy { gluing, inverse } })
}

/// Bundle over a circle base glued by `gluing` across angle 0.
pub fn monodromy_bundle(base: &BaseSystem, fibre: MetricGraph, gluing: GraphMap) -> Result<Bundle> {
    if !base.is_circle() {
        return Err(Error::WrongInput(format!("monodromy needs a circle base, got {}", base.name())));
    }
    monodromy_fibre(fibre, gluing)
}

impl Bundle {
    pub fn is_monodromy(&self) -> bool {
        matches!(self.charts, Charts::Monodromy { .. })
    }

    /// Moves fibre coordinates from the chart at base coordinate `from` to
    /// the chart at `to`, along the shorter base arc.
    pub fn transport(&self, y: &GraphPoint, from: f64, to: f64) -> Result<GraphPoint> {
        match &self.charts {
            Charts::Trivial => Ok(*y),
            Charts::Monodromy { gluing, inverse } => {
                if (to - from).abs() <= 0.5 {
                    Ok(*y)
                } else if from > to {
                    gluing.eval(&self.fibre, y)
                } else {
                    inverse.eval(&self.fibre, y)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BundlePoint {
    pub b: BasePoint,
    pub y: GraphPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    /// One fibre map everywhere.
    Constant,
    /// Map 0 when the base image lies left of the blow-up gap `c_l | c_r`,
    /// map 1 otherwise.
    TargetSide,
    /// Fibre is an interval; the image is the embedded shifted word.
    SturmianEmbedding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibreFamily {
    pub maps: Vec<GraphMap>,
    pub selector: Selector,
}

/// What the minimal set looks like fibre by fibre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum FibreDescription {
    /// Union of circles, each given by its edge set.
    Circles { edge_sets: Vec<Vec<usize>> },
    /// Exactly one of the listed circles, depending on the base point.
    OneCircleOf { edge_sets: Vec<Vec<usize>> },
    Finite { count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub generic: FibreDescription,
    pub by_tag: BTreeMap<String, FibreDescription>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewSystem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<String>,
    pub base: BaseSystem,
    pub bundle: Bundle,
    pub family: FibreFamily,
    /// Declared continuity modulus: base distance below `.0` keeps fibre
    /// images within `.1`.
    #[serde(default)]
    pub modulus: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Reference>,
}

impl SkewSystem {
    pub fn new(base: BaseSystem, bundle: Bundle, family: FibreFamily) -> Result<Self> {
        let expected = match family.selector {
            Selector::Constant => 1,
            Selector::TargetSide => 2,
            Selector::SturmianEmbedding => 0,
        };
        if family.maps.len() != expected {
            return Err(Error::WrongInput(format!("selector needs {expected} maps, got {}", family.maps.len())));
        }
        for m in &family.maps {
            m.validate(&bundle.fibre)?;
        }
        match family.selector {
            Selector::TargetSide if base.blowup().is_none() => {
                return Err(Error::WrongInput("side selection needs a blow-up base".into()))
            }
            Selector::SturmianEmbedding if !matches!(base, BaseSystem::Sturmian(_)) || bundle.fibre.edge_count() != 1 => {
                return Err(Error::WrongInput("embedding family needs a Sturmian base and an interval fibre".into()))
            }
            _ => {}
        }
        Ok(SkewSystem { construction: None, base, bundle, family, modulus: Vec::new(), reference: None })
    }

    pub fn fibre(&self) -> &MetricGraph {
        &self.bundle.fibre
    }

    /// The fibre map over `b`, when it is one of the stored maps.
    pub fn fibre_map(&self, b: &BasePoint) -> Result<Option<&GraphMap>> {
        Ok(match self.family.selector {
            Selector::Constant => Some(&self.family.maps[0]),
            Selector::TargetSide => {
                let fb = self.base.apply(b)?;
                let (BaseSystem::Doubled(d) | BaseSystem::Quotient(d)) = &self.base else { unreachable!() };
                let BasePoint::DoubledCode { code } = fb else { unreachable!() };
                Some(&self.family.maps[usize::from(d.is_right(&code))])
            }
            Selector::SturmianEmbedding => None,
        })
    }

    pub fn check(&self, x: &BundlePoint) -> Result<()> {
        self.base.check(&x.b)?;
        self.fibre().check_point(&x.y)
    }

    pub fn apply(&self, x: &BundlePoint) -> Result<BundlePoint> {
        self.check(x)?;
        let b = self.base.apply(&x.b)?;
        let y = match self.fibre_map(&x.b)? {
            Some(m) => m.eval(self.fibre(), &x.y)?,
            None => {
                let BasePoint::SymbolicWord { word } = b else { unreachable!() };
                let BaseSystem::Sturmian(s) = &self.base else { unreachable!() };
                GraphPoint::new(0, s.embed(&word))
            }
        };
        let y = match &self.bundle.charts {
            Charts::Monodromy { gluing, .. } if self.base.coordinate(&b)? < self.base.coordinate(&x.b)? => {
                gluing.eval(self.fibre(), &y)?
            }
            _ => y,
        };
        Ok(BundlePoint { b, y })
    }

    pub fn orbit(&self, x: &BundlePoint, n: usize) -> Result<Vec<BundlePoint>> {
        let mut out = Vec::with_capacity(n);
        let mut p = *x;
        for _ in 0..n {
            out.push(p);
            p = self.apply(&p)?;
        }
        Ok(out)
    }

    /// `max(base distance, fibre distance)` with the fibre of `q` carried
    /// into the chart of `p`. Base distance is measured in the slicing
    /// coordinate.
    pub fn distance(&self, p: &BundlePoint, q: &BundlePoint) -> Result<f64> {
        let (cp, cq) = (self.base.coordinate(&p.b)?, self.base.coordinate(&q.b)?);
        self.distance_at(p, cp, q, cq)
    }

    /// [`SkewSystem::distance`] with both base coordinates already known.
    pub fn distance_at(&self, p: &BundlePoint, cp: f64, q: &BundlePoint, cq: f64) -> Result<f64> {
        let db = self.base.coordinate_distance(cp, cq);
        let yq = self.bundle.transport(&q.y, cq, cp)?;
        Ok(db.max(self.fibre().path_distance(&p.y, &yq)))
    }
}

/// Alias matching the operation name used elsewhere.
pub fn apply_skew(s: &SkewSystem, x: &BundlePoint) -> Result<BundlePoint> {
    s.apply(x)
}

/// Fibre coordinates of the sample points whose base coordinate lies within
/// `delta_base` of `b`, carried into the chart at `b`.
pub fn fibre_slice(s: &SkewSystem, sample: &SampledSet, b: &BasePoint, delta_base: f64) -> Result<Vec<GraphPoint>> {
    let c = s.base.coordinate(b)?;
    fibre_slice_at(s, sample, c, delta_base)
}

pub fn fibre_slice_at(s: &SkewSystem, sample: &SampledSet, c: f64, delta_base: f64) -> Result<Vec<GraphPoint>> {
    let mut out = Vec::new();
    for i in sample.base_window(c, delta_base) {
        let p = &sample.points[i];
        let y = s.bundle.transport(&p.y, sample.coords[i], c)?;
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::circle_rotation;
    use crate::graph::{GraphSpec, Piece, Segment};

    fn interval() -> MetricGraph {
        MetricGraph::new(&GraphSpec::from_edges(2, &[(0, 1, 2.0)])).unwrap()
    }

    fn flip(g: &MetricGraph) -> GraphMap {
        GraphMap {
            pieces: vec![vec![Piece::new(0.0, 1.0, vec![Segment::new(0, 1.0, 0.0)])]],
            vertex_images: vec![g.vertex_point(1), g.vertex_point(0)],
        }
    }

    #[test]
    fn identity_family_over_rotation() {
        let g = interval();
        let base = circle_rotation(0.3).unwrap();
        let fam = FibreFamily { maps: vec![GraphMap::identity(&g)], selector: Selector::Constant };
        let s = SkewSystem::new(base, product_bundle(g), fam).unwrap();
        let x = BundlePoint { b: BasePoint::angle(0.2), y: GraphPoint::new(0, 0.7) };
        let fx = s.apply(&x).unwrap();
        assert_eq!(fx.y, x.y);
        assert_eq!(fx.b, s.base.apply(&x.b).unwrap());
    }

    #[test]
    fn flip_on_wrap() {
        let g = interval();
        let base = circle_rotation(0.2).unwrap();
        let bundle = monodromy_bundle(&base, g.clone(), flip(&g)).unwrap();
        let fam = FibreFamily { maps: vec![GraphMap::identity(&g)], selector: Selector::Constant };
        let s = SkewSystem::new(base, bundle, fam).unwrap();
        // y = 0.5 sits at t = 0.75 on an interval of length 2
        let x = BundlePoint { b: BasePoint::angle(0.9), y: GraphPoint::new(0, 0.75) };
        let fx = s.apply(&x).unwrap();
        assert!((fx.y.t - 0.25).abs() < 1e-12);
        let near = BundlePoint { b: BasePoint::angle(1.0 - 1e-8), y: x.y };
        let over = BundlePoint { b: BasePoint::angle(1e-8), y: flip(&s.bundle.fibre).eval(&s.bundle.fibre, &x.y).unwrap() };
        assert!(s.distance(&near, &over).unwrap() < 1e-6);
    }

    #[test]
    fn non_homeomorphic_gluing_rejected() {
        let g = interval();
        let base = circle_rotation(0.2).unwrap();
        let collapse = GraphMap::constant(&g, g.vertex_point(0));
        assert!(matches!(monodromy_bundle(&base, g, collapse), Err(Error::NotHomeomorphism(_))));
    }

    #[test]
    fn system_json_round_trip() {
        let g = interval();
        let base = circle_rotation(0.2).unwrap();
        let bundle = monodromy_bundle(&base, g.clone(), flip(&g)).unwrap();
        let fam = FibreFamily { maps: vec![GraphMap::identity(&g)], selector: Selector::Constant };
        let s = SkewSystem::new(base, bundle, fam).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: SkewSystem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
