use bundlemin_core::analysis::{approximate_minimal_set, hausdorff_distance, Provenance, SampledSet};
use bundlemin_core::bundle::{BundlePoint, SkewSystem};
use bundlemin_core::constructions::{build_named, fibre_point, fibre_y, theorem_d_case1, CONSTRUCTION_NAMES};

fn all() -> Vec<(String, bundlemin_core::constructions::ConstructionResult)> {
    CONSTRUCTION_NAMES.iter().map(|n| (n.to_string(), build_named(n, &serde_json::Value::Null).unwrap())).collect()
}

fn test_points(s: &SkewSystem, n: usize) -> Vec<BundlePoint> {
    let grid = s.fibre().grid(0.1);
    s.base
        .sampler(n, 17)
        .into_iter()
        .enumerate()
        .map(|(i, b)| BundlePoint { b, y: grid[(i * 7) % grid.len()] })
        .collect()
}

#[test]
fn maps_preserve_fibres() {
    for (name, r) in all() {
        let s = &r.system;
        for x in test_points(s, 200) {
            let fx = s.apply(&x).unwrap();
            let fb = s.base.apply(&x.b).unwrap();
            assert!(s.base.metric(&fx.b, &fb).unwrap() < 1e-12, "{name}: base image moved");
            s.check(&fx).unwrap();
        }
    }
}

#[test]
fn systems_survive_serialization() {
    for (name, r) in all() {
        let text = serde_json::to_string(&r.system).unwrap();
        let back: SkewSystem = serde_json::from_str(&text).unwrap();
        let g = r.system.fibre();
        for x in test_points(&r.system, 50) {
            let a = r.system.apply(&x).unwrap();
            let b = back.apply(&x).unwrap();
            assert_eq!(a.b, b.b, "{name}");
            assert!(g.path_distance(&a.y, &b.y) < 1e-12, "{name}");
        }
        for seed in &r.seeds {
            back.check(seed).unwrap();
        }
    }
}

#[test]
fn mobius_sections_are_invariant() {
    let r = build_named("mobius", &serde_json::json!({ "alpha": 0.3 })).unwrap();
    let s = &r.system;
    for y in [-1.0, 0.0, 1.0] {
        let orbit = s.orbit(&BundlePoint { b: s.base.origin(), y: fibre_point(y) }, 1000).unwrap();
        assert!(orbit.iter().all(|p| (fibre_y(&p.y).abs() - y.abs()).abs() < 1e-12));
    }
}

#[test]
fn blowup_circle_sample_is_invariant() {
    let delta = 0.01;
    let r = theorem_d_case1(40, None).unwrap();
    let s = &r.system;
    let m = approximate_minimal_set(s, &r.seeds[0], 100, 200_000, delta).unwrap();
    let pts: Vec<BundlePoint> = m.points.iter().take(10_000).copied().collect();
    let net = SampledSet::new(s, delta, pts.clone(), m.provenance.clone()).unwrap();
    let images: Vec<BundlePoint> = pts.iter().map(|p| s.apply(p).unwrap()).collect();
    let prov = Provenance { system: "image".into(), seed: String::new(), transient: 0, steps: 0 };
    let image_set = SampledSet::new(s, delta, images, prov).unwrap();
    let h = hausdorff_distance(s, &image_set, &net, 1.0).unwrap();
    assert!(net.len() > 1000, "{}", net.len());
    assert!(h <= 2.0 * delta, "image of the sample is {h} away");
}

#[test]
fn samples_round_trip_through_csv() {
    for name in ["theorem-d-2:arc", "sturmian-cylinder", "torus-on-mobius"] {
        let r = build_named(name, &serde_json::Value::Null).unwrap();
        let s = &r.system;
        let m = approximate_minimal_set(s, &r.seeds[0], 10, 5000, 0.02).unwrap();
        let mut buf = Vec::new();
        m.write_csv(s, &mut buf).unwrap();
        let back = SampledSet::read_csv(s, buf.as_slice(), &m.meta()).unwrap();
        assert_eq!(back, m, "{name}");
    }
}
