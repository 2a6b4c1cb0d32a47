//! Ready-made skew systems with their expected minimal sets.

pub mod theorem_d;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use theorem_d::{
    blowup_beta, case1_fibre, case1_xy, theorem_d_case1, theorem_d_case2, CaseOneRoute, CaseTwoGeometry, CaseTwoRoute, Curve,
    Marked, Pattern, THETA_NODES,
};

use crate::base::{
    close_return_times, golden, naturals, sturmian, weyl_minimal_rotation, BaseConfig, BasePoint, BaseSystem, WordSide,
};
use crate::bundle::{
    monodromy_bundle, product_bundle, BundlePoint, FibreDescription, FibreFamily, Reference, Selector, SkewSystem,
};
use crate::error::{Error, Result};
use crate::graph::{
    build_retraction, Circle, GraphMap, GraphPoint, GraphSpec, MapBuilder, MetricGraph, Piece, Segment,
};

/// A built system together with what its minimal set should look like.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionResult {
    pub system: SkewSystem,
    pub reference: Reference,
    pub provenance: String,
    /// Points of the reference minimal set to start orbits from.
    pub seeds: Vec<BundlePoint>,
}

impl ConstructionResult {
    fn new(name: &str, mut system: SkewSystem, reference: Reference, provenance: &str, seeds: Vec<BundlePoint>) -> Self {
        system.construction = Some(name.to_string());
        system.reference = Some(reference.clone());
        ConstructionResult { system, reference, provenance: provenance.to_string(), seeds }
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value })
    }
}

fn graph(n: u32, edges: &[(u32, u32, f64)]) -> Result<MetricGraph> {
    MetricGraph::new(&GraphSpec::from_edges(n, edges))
}

fn loop_circle(g: &MetricGraph, e: usize) -> Result<Circle> {
    Circle::from_edge_set(g, &[e])
}

fn circles_of(sets: &[&[usize]]) -> FibreDescription {
    FibreDescription::Circles { edge_sets: sets.iter().map(|s| s.to_vec()).collect() }
}

/// Interval fibre `[-1, 1]` as one edge of length 2; `y` sits at `t = (y+1)/2`.
pub fn mobius_fibre() -> MetricGraph {
    graph(2, &[(0, 1, 2.0)]).expect("static graph")
}

pub fn fibre_y(p: &GraphPoint) -> f64 {
    2.0 * p.t - 1.0
}

pub fn fibre_point(y: f64) -> GraphPoint {
    GraphPoint::new(0, (y + 1.0) / 2.0)
}

fn flip(g: &MetricGraph) -> GraphMap {
    GraphMap {
        pieces: vec![vec![Piece::new(0.0, 1.0, vec![Segment::new(0, 1.0, 0.0)])]],
        vertex_images: vec![g.vertex_point(1), g.vertex_point(0)],
    }
}

pub fn build_mobius(alpha: f64) -> Result<ConstructionResult> {
    check_unit("alpha", alpha)?;
    let base = crate::base::circle_rotation(alpha)?;
    let g = mobius_fibre();
    let bundle = monodromy_bundle(&base, g.clone(), flip(&g))?;
    let fam = FibreFamily { maps: vec![GraphMap::identity(&g)], selector: Selector::Constant };
    let system = SkewSystem::new(base, bundle, fam)?;
    let reference = Reference {
        generic: FibreDescription::Finite { count: 2 },
        by_tag: BTreeMap::from([("center".to_string(), FibreDescription::Finite { count: 1 })]),
        note: "boundary |y| = 1 is minimal with two-point fibres; the centre section y = 0 is minimal too".into(),
    };
    let seeds = vec![
        BundlePoint { b: BasePoint::angle(0.0), y: fibre_point(1.0) },
        BundlePoint { b: BasePoint::angle(0.0), y: fibre_point(0.0) },
    ];
    Ok(ConstructionResult::new("mobius", system, reference, "flip-glued interval bundle over an irrational rotation", seeds))
}

/// The boundary of the Möbius band unrolled to a circle of two lanes: lane
/// 0 is `y = 1`, lane 1 is `y = -1`, each parametrized by the base angle.
/// Returns the graph, the boundary map and the circle.
pub fn mobius_boundary(alpha: f64) -> Result<(MetricGraph, GraphMap, Circle)> {
    check_unit("alpha", alpha)?;
    // lane 0 runs v0 -> v1, lane 1 runs v1 -> v0: crossing the cut swaps lanes
    let g = graph(2, &[(0, 1, 1.0), (1, 0, 1.0)])?;
    let c = Circle::from_edge_set(&g, &[0, 1])?;
    let mut b = MapBuilder::new(&g);
    b.circle_isometry(&g, &c, &c, alpha);
    let m = b.build(&g)?;
    Ok((g, m, c))
}

/// Fibre: circle `A` (edge 0, loop at `a1`), interval `I` (edge 1, `a1` to
/// `a2`), circle `B` (edge 2, loop at `a2`); all of length 1.
pub fn torus_fibre() -> MetricGraph {
    graph(2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]).expect("static graph")
}

/// Central symmetry of the torus fibre.
pub fn central_symmetry(g: &MetricGraph) -> GraphMap {
    GraphMap {
        pieces: vec![
            vec![Piece::new(0.0, 1.0, vec![Segment::new(2, 0.0, 1.0)])],
            vec![Piece::new(0.0, 1.0, vec![Segment::new(1, 1.0, 0.0)])],
            vec![Piece::new(0.0, 1.0, vec![Segment::new(0, 0.0, 1.0)])],
        ],
        vertex_images: vec![g.vertex_point(1), g.vertex_point(0)],
    }
}

/// Rotation by `beta` on both circles; `I` runs back along `A` to `a1`,
/// across, then forward along `B`.
pub fn torus_fibre_map(g: &MetricGraph, beta: f64) -> Result<GraphMap> {
    let m = GraphMap {
        pieces: vec![
            vec![Piece::new(0.0, 1.0, vec![Segment::new(0, beta, 1.0), Segment::new(0, 0.0, beta)])],
            vec![Piece::new(
                0.0,
                1.0,
                vec![Segment::new(0, beta, 0.0), Segment::new(1, 0.0, 1.0), Segment::new(2, 0.0, beta)],
            )],
            vec![Piece::new(0.0, 1.0, vec![Segment::new(2, beta, 1.0), Segment::new(2, 0.0, beta)])],
        ],
        vertex_images: vec![GraphPoint::new(0, beta), GraphPoint::new(2, beta)],
    };
    m.validate(g)?;
    Ok(m)
}

pub fn build_torus_on_mobius(alpha: f64, beta: f64) -> Result<ConstructionResult> {
    check_unit("alpha", alpha)?;
    check_unit("beta", beta)?;
    let base = crate::base::circle_rotation(alpha)?;
    let g = torus_fibre();
    let bundle = monodromy_bundle(&base, g.clone(), central_symmetry(&g))?;
    let fam = FibreFamily { maps: vec![torus_fibre_map(&g, beta)?], selector: Selector::Constant };
    let system = SkewSystem::new(base, bundle, fam)?;
    let reference = Reference {
        generic: circles_of(&[&[0], &[2]]),
        by_tag: BTreeMap::new(),
        note: "torus formed by the two circle families; minimal when the double rotation is".into(),
    };
    let seeds = vec![BundlePoint { b: BasePoint::angle(0.0), y: GraphPoint::new(0, 0.0) }];
    Ok(ConstructionResult::new(
        "torus-on-mobius",
        system,
        reference,
        "symmetric circle rotation on a flip-glued bundle whose boundary is replaced by a torus",
        seeds,
    ))
}

pub fn build_sturmian_cylinder(alpha: f64, precision: u32) -> Result<ConstructionResult> {
    check_unit("alpha", alpha)?;
    let base = sturmian(alpha, precision)?;
    let g = graph(2, &[(0, 1, 1.0)])?;
    let fam = FibreFamily { maps: Vec::new(), selector: Selector::SturmianEmbedding };
    let system = SkewSystem::new(base.clone(), product_bundle(g), fam)?;
    let BaseSystem::Sturmian(st) = &base else { unreachable!() };
    let w = st.word(0.5, WordSide::Plus);
    let reference = Reference {
        generic: FibreDescription::Finite { count: 1 },
        by_tag: BTreeMap::from([("boundary orbit".to_string(), FibreDescription::Finite { count: 2 })]),
        note: "embedded Sturmian Cantor set; two-point fibres over the orbit of the cut".into(),
    };
    let seeds = vec![BundlePoint { b: BasePoint::SymbolicWord { word: w }, y: GraphPoint::new(0, st.embed(&w)) }];
    Ok(ConstructionResult::new("sturmian-cylinder", system, reference, "Sturmian subshift embedded in the cylinder", seeds))
}

pub const WEYL_HORIZON: usize = 1 << 20;
pub const WEYL_TERMS: usize = 1000;

/// Weyl tolerance for a sequence of `k` terms.
pub fn weyl_tolerance(k: usize) -> f64 {
    (1.5 / (k as f64).sqrt()).max(0.05)
}

fn return_times(base: &BaseSystem, power: u64) -> Result<Vec<BigUint>> {
    let t = close_return_times(base, &base.origin(), WEYL_HORIZON, WEYL_TERMS * power as usize)?;
    let p = BigUint::from(power);
    let mut out: Vec<BigUint> =
        t.into_iter().filter(|n| (n % &p) == BigUint::from(0u32)).map(|n| n / &p).take(WEYL_TERMS).collect();
    out.dedup();
    if out.len() < 8 {
        out = naturals(WEYL_TERMS);
    }
    Ok(out)
}

/// Rotation fraction making `f^power × rotation` minimal, found by Weyl
/// search along the return times of the base.
pub fn weyl_beta(base: &BaseSystem, power: u64) -> Result<f64> {
    let n = return_times(base, power)?;
    Ok(weyl_minimal_rotation(&n, n.len(), weyl_tolerance(n.len()))?.value)
}

pub fn build_circle_minimal_product(base: BaseSystem, fibre: MetricGraph, c: &Circle, beta: Option<f64>) -> Result<ConstructionResult> {
    let c = Circle::new(&fibre, c.traversals.clone())?;
    let beta = match beta {
        Some(b) => b,
        None => weyl_beta(&base, 1)?,
    };
    let r = build_retraction(&fibre, &c)?;
    let mut b = MapBuilder::new(&fibre);
    b.circle_isometry(&fibre, &c, &c, beta * c.length);
    let rot = b.build_partial(&fibre);
    let m = GraphMap::compose(&fibre, &rot, &r)?;
    let edges: Vec<usize> = c.edges().into_iter().collect();
    let system = SkewSystem::new(base.clone(), product_bundle(fibre.clone()), FibreFamily { maps: vec![m], selector: Selector::Constant })?;
    let reference = Reference {
        generic: FibreDescription::Circles { edge_sets: vec![edges] },
        by_tag: BTreeMap::new(),
        note: format!("base times the circle, rotation fraction {beta}"),
    };
    let seeds = vec![BundlePoint { b: base.origin(), y: c.point_at(&fibre, 0.0) }];
    Ok(ConstructionResult::new("circle-product", system, reference, "retraction onto a circle followed by a Weyl rotation", seeds))
}

pub fn build_m_circles(base: BaseSystem, fibre: MetricGraph, circles: &[Circle], beta: Option<f64>) -> Result<ConstructionResult> {
    if circles.is_empty() {
        return Err(Error::WrongInput("need at least one circle".into()));
    }
    let circles: Vec<Circle> = circles.iter().map(|c| Circle::new(&fibre, c.traversals.clone())).collect::<Result<_>>()?;
    for i in 0..circles.len() {
        for j in 0..i {
            if !circles[i].is_disjoint_from(&fibre, &circles[j]) {
                return Err(Error::CirclesIntersect(j, i));
            }
        }
    }
    if !fibre.is_connected() {
        return Err(Error::Disconnected);
    }
    let m = circles.len();
    let beta = match beta {
        Some(b) => b,
        None => weyl_beta(&base, m as u64)?,
    };
    let mut b = MapBuilder::new(&fibre);
    for i in 0..m {
        let (src, dst) = (&circles[i], &circles[(i + 1) % m]);
        let scale = dst.length / src.length;
        let shift = if i + 1 == m { beta * dst.length } else { 0.0 };
        b.circle_homothety(&fibre, src, dst, scale, shift);
    }
    // vertices off S follow their nearest vertex on S, breadth first
    let n = fibre.vertex_count();
    let mut root: Vec<Option<usize>> = (0..n).map(|v| b.vertex_image(v).map(|_| v)).collect();
    let mut frontier: Vec<usize> = (0..n).filter(|&v| root[v].is_some()).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &v in &frontier {
            for germ in fibre.star(v) {
                let e = fibre.edge(germ.edge);
                let w = if germ.forward { e.to } else { e.from };
                if root[w].is_none() {
                    root[w] = root[v];
                    next.push(w);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        frontier = next;
    }
    for v in 0..n {
        if b.vertex_image(v).is_none() {
            let r = root[v].expect("connected");
            let p = b.vertex_image(r).unwrap();
            b.set_vertex(v, p);
        }
    }
    for e in 0..fibre.edge_count() {
        if !b.has_edge(e) {
            b.shortest_path_edge(&fibre, e)?;
        }
    }
    let h = b.build(&fibre)?;
    let edge_sets: Vec<Vec<usize>> = circles.iter().map(|c| c.edges().into_iter().collect()).collect();
    let seeds = vec![BundlePoint { b: base.origin(), y: circles[0].point_at(&fibre, 0.0) }];
    let system = SkewSystem::new(base, product_bundle(fibre), FibreFamily { maps: vec![h], selector: Selector::Constant })?;
    let reference = Reference {
        generic: FibreDescription::Circles { edge_sets },
        by_tag: BTreeMap::new(),
        note: format!("{m} circles permuted cyclically, rotation fraction {beta} on the return to the first"),
    };
    Ok(ConstructionResult::new("m-circles", system, reference, "cyclic permutation of disjoint circles over a totally minimal base", seeds))
}

/// `m` unit loops at vertices `0..m`, joined in a chain by edges of length 1/2.
pub fn chain_of_loops(m: usize) -> Result<(MetricGraph, Vec<Circle>)> {
    let m32 = m as u32;
    let mut edges: Vec<(u32, u32, f64)> = (0..m32).map(|v| (v, v, 1.0)).collect();
    edges.extend((1..m32).map(|v| (v - 1, v, 0.5)));
    let g = graph(m32, &edges)?;
    let circles = (0..m).map(|e| loop_circle(&g, e)).collect::<Result<_>>()?;
    Ok((g, circles))
}

/// One loop of length 1: the fibre of the torus double rotation.
pub fn unit_circle_fibre() -> (MetricGraph, Circle) {
    let g = graph(1, &[(0, 0, 1.0)]).expect("static graph");
    let c = loop_circle(&g, 0).expect("loop");
    (g, c)
}

pub fn default_alpha() -> f64 {
    golden()
}

/// Second default irrational, independent of the golden ratio over the rationals.
pub fn default_beta() -> f64 {
    (golden() * 2f64.sqrt()).fract()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MobiusParams {
    #[serde(default = "default_alpha")]
    alpha: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TorusParams {
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_beta")]
    beta: f64,
}

fn default_word_precision() -> u32 {
    crate::base::DEFAULT_PRECISION
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SturmianParams {
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_word_precision")]
    precision: u32,
}

fn default_base() -> BaseConfig {
    BaseConfig::Rotation { alpha: golden() }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductParams {
    #[serde(default = "default_base")]
    base: BaseConfig,
    #[serde(default)]
    fibre: Option<GraphSpec>,
    /// Edge set of the circle.
    #[serde(default)]
    circle: Option<Vec<usize>>,
    #[serde(default)]
    beta: Option<f64>,
}

fn default_m() -> usize {
    2
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MCirclesParams {
    #[serde(default = "default_base")]
    base: BaseConfig,
    #[serde(default = "default_m")]
    m: usize,
    #[serde(default)]
    fibre: Option<GraphSpec>,
    #[serde(default)]
    circles: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    beta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlowupParams {
    #[serde(default = "default_word_precision")]
    precision: u32,
    #[serde(default)]
    beta: Option<f64>,
    /// Arc end angle for the arc pattern.
    #[serde(default)]
    theta0: Option<f64>,
}

fn params<T: DeserializeOwned>(overrides: &serde_json::Value) -> Result<T> {
    let v = if overrides.is_null() { serde_json::Value::Object(Default::default()) } else { overrides.clone() };
    serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))
}

pub const CONSTRUCTION_NAMES: &[&str] = &[
    "mobius",
    "torus-on-mobius",
    "sturmian-cylinder",
    "circle-product",
    "m-circles",
    "theorem-d-1",
    "theorem-d-2:point",
    "theorem-d-2:arc",
    "theorem-d-2:two",
];

/// Builds a construction by name with JSON parameter overrides (`null` for
/// defaults).
pub fn build_named(name: &str, overrides: &serde_json::Value) -> Result<ConstructionResult> {
    match name {
        "mobius" => build_mobius(params::<MobiusParams>(overrides)?.alpha),
        "torus-on-mobius" => {
            let p: TorusParams = params(overrides)?;
            build_torus_on_mobius(p.alpha, p.beta)
        }
        "sturmian-cylinder" => {
            let p: SturmianParams = params(overrides)?;
            build_sturmian_cylinder(p.alpha, p.precision)
        }
        "circle-product" => {
            let p: ProductParams = params(overrides)?;
            let base = BaseSystem::try_from(p.base)?;
            let (g, c) = match (p.fibre, p.circle) {
                (Some(spec), Some(edges)) => {
                    let g = MetricGraph::new(&spec)?;
                    let c = Circle::from_edge_set(&g, &edges)?;
                    (g, c)
                }
                (None, None) => unit_circle_fibre(),
                _ => return Err(Error::Config("give both `fibre` and `circle`, or neither".into())),
            };
            build_circle_minimal_product(base, g, &c, p.beta)
        }
        "m-circles" => {
            let p: MCirclesParams = params(overrides)?;
            let base = BaseSystem::try_from(p.base)?;
            let (g, cs) = match (p.fibre, p.circles) {
                (Some(spec), Some(sets)) => {
                    let g = MetricGraph::new(&spec)?;
                    let cs = sets.iter().map(|s| Circle::from_edge_set(&g, s)).collect::<Result<Vec<_>>>()?;
                    (g, cs)
                }
                (None, None) => chain_of_loops(p.m)?,
                _ => return Err(Error::Config("give both `fibre` and `circles`, or neither".into())),
            };
            build_m_circles(base, g, &cs, p.beta)
        }
        "theorem-d-1" => {
            let p: BlowupParams = params(overrides)?;
            if p.theta0.is_some() {
                return Err(Error::Config("`theta0` only applies to theorem-d-2:arc".into()));
            }
            theorem_d_case1(p.precision, p.beta)
        }
        _ => {
            if let Some(pat) = name.strip_prefix("theorem-d-2:") {
                let p: BlowupParams = params(overrides)?;
                let pattern = match (pat, p.theta0) {
                    ("point", None) => Pattern::OnePoint,
                    ("arc", t) => Pattern::Arc(t.unwrap_or(std::f64::consts::FRAC_PI_2)),
                    ("two", None) => Pattern::TwoPoints,
                    ("point" | "two", Some(_)) => {
                        return Err(Error::Config("`theta0` only applies to theorem-d-2:arc".into()))
                    }
                    _ => return Err(Error::BadPattern(pat.to_string())),
                };
                theorem_d_case2(pattern, p.precision, p.beta)
            } else {
                Err(Error::Config(format!("unknown construction `{name}`; known: {}", CONSTRUCTION_NAMES.join(", "))))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::rotation_number;

    #[test]
    fn mobius_examples() {
        let r = build_mobius(0.2).unwrap();
        let s = &r.system;
        let x = BundlePoint { b: BasePoint::angle(0.9), y: fibre_point(0.5) };
        let fx = s.apply(&x).unwrap();
        assert!((s.base.coordinate(&fx.b).unwrap() - 0.1).abs() < 1e-12);
        assert!((fibre_y(&fx.y) + 0.5).abs() < 1e-12);
        let c = BundlePoint { b: BasePoint::angle(0.3), y: fibre_point(0.0) };
        let fc = s.apply(&c).unwrap();
        assert!((fibre_y(&fc.y)).abs() < 1e-12);
        assert!(matches!(build_mobius(1.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn boundary_rotation_number_is_half() {
        let a = golden();
        let (g, m, c) = mobius_boundary(a).unwrap();
        let rho = rotation_number(&g, &m, &c, 100_000).unwrap();
        assert!((rho.value - a / 2.0).abs() < 1e-3);
    }

    #[test]
    fn torus_map_is_symmetric() {
        let g = torus_fibre();
        let phi = torus_fibre_map(&g, 0.3).unwrap();
        let s = central_symmetry(&g);
        for p in g.grid(0.01) {
            let lhs = phi.eval(&g, &s.eval(&g, &p).unwrap()).unwrap();
            let rhs = s.eval(&g, &phi.eval(&g, &p).unwrap()).unwrap();
            assert!(g.path_distance(&lhs, &rhs) < 1e-9);
        }
        let mid = GraphPoint::new(1, 0.5);
        assert!(g.path_distance(&phi.eval(&g, &mid).unwrap(), &mid) < 1e-12);
        let on_a = phi.eval(&g, &GraphPoint::new(0, 0.1)).unwrap();
        assert!(g.path_distance(&on_a, &GraphPoint::new(0, 0.4)) < 1e-12);
    }

    #[test]
    fn circle_product_retracts_then_rotates() {
        // loop at vertex 0 plus a pendant edge to vertex 1
        let g = graph(2, &[(0, 0, 1.0), (0, 1, 0.5)]).unwrap();
        let c = loop_circle(&g, 0).unwrap();
        let base = crate::base::circle_rotation(golden()).unwrap();
        let r = build_circle_minimal_product(base, g.clone(), &c, Some(0.25)).unwrap();
        let m = &r.system.family.maps[0];
        let on = m.eval(&g, &GraphPoint::new(0, 0.5)).unwrap();
        assert!(g.path_distance(&on, &GraphPoint::new(0, 0.75)) < 1e-12);
        let tip = m.eval(&g, &GraphPoint::new(1, 1.0)).unwrap();
        assert!(g.path_distance(&tip, &GraphPoint::new(0, 0.25)) < 1e-12);
    }

    #[test]
    fn m_circles_power_rotates_first() {
        let (g, cs) = chain_of_loops(3).unwrap();
        let base = crate::base::circle_rotation(golden()).unwrap();
        let r = build_m_circles(base, g.clone(), &cs, Some(0.2)).unwrap();
        let h = &r.system.family.maps[0];
        for k in 0..10 {
            let p = GraphPoint::new(0, k as f64 / 10.0);
            let mut q = p;
            for _ in 0..3 {
                q = h.eval(&g, &q).unwrap();
            }
            assert!(g.path_distance(&q, &GraphPoint::new(0, (k as f64 / 10.0 + 0.2).fract())) < 1e-9);
            assert_eq!(h.eval(&g, &p).unwrap().edge, 1);
        }
    }

    #[test]
    fn intersecting_circles_rejected() {
        let g = graph(2, &[(0, 1, 1.0), (0, 1, 1.0), (0, 1, 1.0)]).unwrap();
        let a = Circle::from_edge_set(&g, &[0, 1]).unwrap();
        let b = Circle::from_edge_set(&g, &[1, 2]).unwrap();
        let base = crate::base::circle_rotation(golden()).unwrap();
        assert!(matches!(build_m_circles(base, g, &[a, b], Some(0.1)), Err(Error::CirclesIntersect(0, 1))));
    }

    #[test]
    fn names_and_overrides() {
        let r = build_named("mobius", &serde_json::json!({"alpha": 0.3})).unwrap();
        assert_eq!(r.system.construction.as_deref(), Some("mobius"));
        assert!(matches!(build_named("mobius", &serde_json::json!({"alpah": 0.3})), Err(Error::Config(_))));
        assert!(matches!(build_named("theorem-d-2:square", &serde_json::Value::Null), Err(Error::BadPattern(_))));
        assert!(matches!(build_named("nope", &serde_json::Value::Null), Err(Error::Config(_))));
    }
}
