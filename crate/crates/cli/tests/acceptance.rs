//! End-to-end acceptance checks, one line per criterion.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use bundlemin_core::analysis::{
    approximate_minimal_set, circles_report, endpoint_statistics, redundant_open_set_test, typical_fibre_report,
    DichotomyParams, FibreKind, FibreNet, SampledSet, SliceParams, TypicalClass, Verdict,
};
use bundlemin_core::base::{
    adding_machine, golden, powers_of_two, recurrence_horizon, star_discrepancy, weyl_minimal_rotation, BasePoint,
    BaseSystem, DoubledCode, Sturmian, WordSide,
};
use bundlemin_core::bundle::{BundlePoint, SkewSystem};
use bundlemin_core::constructions::{
    build_mobius, build_named, fibre_point, fibre_y, mobius_boundary, theorem_d_case1, theorem_d_case2,
    CaseTwoGeometry, CaseTwoRoute, Curve, Pattern, CONSTRUCTION_NAMES, THETA_NODES,
};
use bundlemin_core::graph::{build_retraction, enumerate_circles, rotation_number, GraphPoint, GraphSpec, MetricGraph};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};

const RES: f64 = 0.02;
const STEPS: usize = 100_000;
const TRANSIENT: usize = 100;
const PRECISION: u32 = 40;

fn sample(s: &SkewSystem, seed: &BundlePoint, steps: usize, res: f64) -> Result<SampledSet> {
    Ok(approximate_minimal_set(s, seed, TRANSIENT, steps, res)?)
}

fn tagged(s: &SkewSystem, tag: &str) -> Result<BasePoint> {
    s.base.tagged_points().into_iter().find(|(t, _)| t == tag).map(|(_, p)| p).context("missing tag")
}

fn c1() -> Result<String> {
    let start = Instant::now();
    let r = theorem_d_case1(PRECISION, None)?;
    let s = &r.system;
    let sample = sample(s, &r.seeds[0], STEPS, RES)?;
    let c_l = s.base.coordinate(&tagged(s, "c_l")?)?;
    let probes = s.base.sampler(120, 1);
    let report = typical_fibre_report(s, &sample, &probes, &SliceParams::from_resolution(RES))?;
    let elapsed = start.elapsed().as_secs_f64();
    let at_c_l = report.probes.iter().find(|p| p.tag.as_deref() == Some("c_l")).context("no c_l probe")?;
    ensure!(at_c_l.class == FibreKind::Circles(2), "c_l slice is {:?}", at_c_l.class);
    let generic: Vec<_> = report
        .probes
        .iter()
        .filter(|p| p.tag.is_none() && (p.coordinate - c_l).abs() > 2.5 * RES)
        .collect();
    let bad: Vec<_> = generic.iter().filter(|p| p.class != FibreKind::Circles(1)).collect();
    ensure!(bad.is_empty(), "{} generic probes not one circle, first {:?}", bad.len(), bad[0]);
    ensure!(generic.len() >= 50, "only {} generic probes", generic.len());
    ensure!(elapsed < 60.0, "took {elapsed:.1} s");
    Ok(format!("c_l Circles(2), {} generic probes Circles(1), {elapsed:.2} s", generic.len()))
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

fn code(b: &BasePoint) -> DoubledCode {
    match b {
        BasePoint::DoubledCode { code } => *code,
        other => panic!("not a doubled code: {other:?}"),
    }
}

fn c2_pattern(pat: Pattern) -> Result<String> {
    // finer resolution so the worst grid gap stays below 0.02
    let res = 0.01;
    let r = theorem_d_case2(pat, PRECISION, None)?;
    let s = &r.system;
    let BaseSystem::Quotient(dc) = &s.base else { anyhow::bail!("base is not a quotient") };
    let g = s.fibre();
    let sample = sample(s, &r.seeds[0], 200_000, res)?;
    let c_l_point = tagged(s, "c_l")?;
    let c_l = s.base.coordinate(&c_l_point)?;
    let slice = bundlemin_core::bundle::fibre_slice_at(s, &sample, c_l, res)?;
    let net = FibreNet::new(g, &slice);
    let cover = g.grid(0.005).iter().map(|p| net.nearest(p)).fold(0.0, f64::max);
    ensure!(cover <= RES, "{pat:?}: fibre at c_l misses a point by {cover:.4}");

    let geo = CaseTwoGeometry::new(pat)?;
    let beta = bundlemin_core::constructions::blowup_beta()?;
    let route = CaseTwoRoute::new(geo.clone(), dc.clone(), beta);
    let node = |k: usize| TAU * k as f64 / THETA_NODES as f64;
    let mut seam: Vec<f64> = Vec::new();
    for k in 0..THETA_NODES {
        if geo.is_common_node(k) {
            seam.push(node(k));
            if geo.is_common_node((k + 1) % THETA_NODES) {
                seam.push(node(k) + 0.37 * (node(k + 1) - node(k)));
            }
        }
    }
    let bases: Vec<DoubledCode> =
        s.base.sampler(200, 4).iter().filter(|b| s.base.tag(b).is_none()).map(code).collect();
    let mut worst_seam = 0.0f64;
    for i in 0..1000 {
        let x = bases[i % bases.len()];
        let th = seam[(i * 7) % seam.len()];
        let q = [th.cos(), th.sin()];
        let (b1, (p1, _)) = route.g_star(x, (q, Curve::Outer))?;
        let (b2, (p2, _)) = route.g_star(x, (q, Curve::Inner))?;
        ensure!(b1 == b2, "seam branches disagree on the base");
        worst_seam = worst_seam.max(dist(p1, p2));
        let y = geo.point_on(Curve::Outer, th);
        let img = s.apply(&BundlePoint { b: BasePoint::DoubledCode { code: x }, y })?;
        worst_seam = worst_seam.max(dist(geo.xy(&img.y), p1));
    }
    ensure!(worst_seam < 1e-9, "{pat:?}: seam disagreement {worst_seam:e}");

    let mut worst_id = 0.0f64;
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..1000 {
        let th: f64 = rng.gen_range(0.0..TAU);
        let p = [th.cos(), th.sin()];
        let (_, (a, _)) = route.f2_star(dc.c_l(), (p, Curve::Outer))?;
        let (_, (b, _)) = route.f2_star(dc.c_l(), (route.alpha(p), Curve::Inner))?;
        worst_id = worst_id.max(dist(a, b));
        let on_outer = s.apply(&BundlePoint { b: c_l_point, y: geo.point_on(Curve::Outer, th) })?;
        let on_inner = s.apply(&BundlePoint { b: c_l_point, y: geo.point_on(Curve::Inner, th) })?;
        worst_id = worst_id.max(dist(geo.xy(&on_outer.y), geo.xy(&on_inner.y)));
        worst_id = worst_id.max(dist(geo.xy(&on_outer.y), a));
    }
    ensure!(worst_id < 1e-6, "{pat:?}: identity at c_l off by {worst_id:e}");
    Ok(format!("{pat:?} cover {cover:.4} seam {worst_seam:.1e} identity {worst_id:.1e}"))
}

fn c2() -> Result<String> {
    let mut parts = Vec::new();
    for pat in [Pattern::OnePoint, Pattern::Arc(1.0), Pattern::TwoPoints] {
        parts.push(c2_pattern(pat)?);
    }
    Ok(parts.join("; "))
}

fn c3() -> Result<String> {
    let alpha = golden();
    let (g, m, c) = mobius_boundary(alpha)?;
    let rho = rotation_number(&g, &m, &c, 100_000)?;
    ensure!((rho.value - alpha / 2.0).abs() < 1e-3, "rotation number {} vs {}", rho.value, alpha / 2.0);

    let r = build_mobius(alpha)?;
    let s = &r.system;
    let seed = BundlePoint { b: BasePoint::angle(0.1), y: fibre_point(1.0) };
    let sample = sample(s, &seed, STEPS, RES)?;
    ensure!(sample.points.iter().all(|p| (fibre_y(&p.y).abs() - 1.0).abs() < 1e-12), "left the boundary");
    let probes = s.base.sampler(100, 2);
    let report = typical_fibre_report(s, &sample, &probes, &SliceParams::from_resolution(RES))?;
    ensure!(report.typical == TypicalClass::FiniteN(2), "typical fibre {:?}", report.typical);
    Ok(format!("rotation number {:.6} (α/2 = {:.6}), typical FiniteN(2)", rho.value, alpha / 2.0))
}

// symbol of the orbit point `n` of `z`, read just to the right (`side = 1`)
// or just to the left (`side = -1`) of `z`
fn itinerary(alpha: f64, z: f64, k: u32, side: f64) -> Vec<u8> {
    let eps = 1e-11 * side;
    (0..k).map(|n| u8::from((z + n as f64 * alpha + eps).rem_euclid(1.0) >= 1.0 - alpha)).collect()
}

fn oracle_count(alpha: f64, z: f64, k: u32) -> usize {
    if itinerary(alpha, z, k, 1.0) == itinerary(alpha, z, k, -1.0) {
        1
    } else {
        2
    }
}

fn c4() -> Result<String> {
    let alpha = golden();
    let k = PRECISION;
    let st = Sturmian::new(alpha, k)?;
    let fibre_size = |z: f64| -> usize {
        let embeds: BTreeSet<BigUint> = st.codings(z).iter().map(|w| st.embed_exact(w)).collect();
        embeds.len()
    };
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    let mut generic = 0;
    while generic < 1000 {
        let z: f64 = rng.gen();
        if oracle_count(alpha, z, k) != 1 {
            continue;
        }
        ensure!(fibre_size(z) == 1, "generic z = {z} has {} points", fibre_size(z));
        generic += 1;
    }
    for j in 1..=20u32 {
        let z = (-(j as f64) * alpha).rem_euclid(1.0);
        ensure!(oracle_count(alpha, z, k) == 2, "oracle sees z_{j} as generic");
        ensure!(fibre_size(z) == 2, "boundary z_{j} has {} points", fibre_size(z));
    }
    for i in 0..1000 {
        let side = if i % 2 == 0 { WordSide::Plus } else { WordSide::Minus };
        let w = st.word(rng.gen(), side);
        let sw = st.shift(&w);
        let (s0, s1) = (st.symbols(&w), st.symbols(&sw));
        ensure!(s1[..k as usize - 1] == s0[1..], "shift is not the symbol shift");
        let (c, h) = st.factor(&w)?;
        let (cs, hs) = st.factor(&sw)?;
        let moved = (c + alpha).rem_euclid(1.0);
        let d = (moved - cs).rem_euclid(1.0);
        ensure!(d.min(1.0 - d) <= h + hs, "factor of the shift misses the rotated address");
        let rotated = st.word(moved, side);
        ensure!(st.symbols(&rotated)[..k as usize - 1] == s1[..k as usize - 1], "rotation and shift disagree");
    }
    Ok("1000 generic probes of size 1, 20 boundary probes of size 2, 1000 words commute".into())
}

fn c5() -> Result<String> {
    let mut lines = Vec::new();
    for name in CONSTRUCTION_NAMES {
        let r = build_named(name, &serde_json::Value::Null)?;
        let s = &r.system;
        for seed in r.seeds.iter().take(2) {
            let sample = sample(s, seed, STEPS, RES)?;
            let d = endpoint_statistics(s, &sample, &DichotomyParams::from_resolution(RES))?;
            let violated = d.endpoint_fraction > 0.0 && d.endpoint_fraction < 0.5 && d.interior_detected;
            ensure!(!violated, "{name}: fraction {} with interior", d.endpoint_fraction);
            match *name {
                "circle-product" | "torus-on-mobius" => ensure!(
                    d.verdict == Verdict::A2 && d.endpoint_fraction == 0.0,
                    "{name}: {:?} fraction {}",
                    d.verdict,
                    d.endpoint_fraction
                ),
                "sturmian-cylinder" => ensure!(
                    d.endpoint_fraction == 1.0 && !d.interior_detected,
                    "sturmian: fraction {} interior {}",
                    d.endpoint_fraction,
                    d.interior_detected
                ),
                _ => {}
            }
            lines.push(format!("{name} {:?} {:.2}", d.verdict, d.endpoint_fraction));
        }
    }
    Ok(lines.join(", "))
}

fn c6() -> Result<String> {
    let mut parts = Vec::new();
    for m in 1..=3usize {
        let r = build_named("m-circles", &serde_json::json!({ "m": m }))?;
        let s = &r.system;
        let sample = sample(s, &r.seeds[0], STEPS, RES)?;
        let probes = s.base.sampler(50, 3);
        let rep = circles_report(s, &sample, &probes, &SliceParams::from_resolution(RES))?;
        ensure!(rep.m == m, "m = {m}: report says {}", rep.m);
        ensure!(rep.c8_checked == 50 && rep.c8_passed == 50, "m = {m}: {} of {}", rep.c8_passed, rep.c8_checked);
        parts.push(format!("m={m} 50/50"));
    }
    Ok(parts.join(", "))
}

// sorted-points formula for the star discrepancy
fn oracle_discrepancy(mut u: Vec<f64>) -> f64 {
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

fn c7() -> Result<String> {
    let k = 10_000;
    let n = powers_of_two(k);
    let w = weyl_minimal_rotation(&n, k, 0.05)?;
    let mask = (BigUint::from(1u32) << w.precision) - 1u32;
    let u: Vec<f64> = (1..=k)
        .map(|j| {
            // top 60 bits of frac(2^j α)
            let x = ((&w.bits << j) & &mask) >> (w.precision - 60);
            let top: u64 = x.try_into().unwrap();
            top as f64 * 2f64.powi(-60)
        })
        .collect();
    let d2 = oracle_discrepancy(u);
    ensure!(d2 < 0.05, "2^k: recomputed discrepancy {d2}");

    let phi = golden();
    let u: Vec<f64> = (1..=1000u32).map(|j| (j as f64 * phi).rem_euclid(1.0)).collect();
    let d1 = oracle_discrepancy(u.clone());
    ensure!(d1 < 0.02, "golden: discrepancy {d1}");
    ensure!((star_discrepancy(&u) - d1).abs() < 1e-12, "library discrepancy disagrees");
    Ok(format!("2^k {} discrepancy {d2:.4}; golden k discrepancy {d1:.4}", w.label))
}

fn circle_dist(a: &f64, b: &f64) -> bundlemin_core::Result<f64> {
    let d = (a - b).rem_euclid(1.0);
    Ok(d.min(1.0 - d))
}

fn c8() -> Result<String> {
    let pts: Vec<f64> = (0..2000).map(|i| i as f64 / 2000.0).collect();
    let arc = |lo: f64, len: f64| move |x: &f64| (x - lo).rem_euclid(1.0) < len;
    let delta = 0.01;
    ensure!(redundant_open_set_test(&pts, |_| Ok(0.4), circle_dist, arc(0.6, 0.1), delta)?, "constant map");
    let double = |x: &f64| Ok((2.0 * x).rem_euclid(1.0));
    ensure!(redundant_open_set_test(&pts, double, circle_dist, arc(0.25, 0.1), delta)?, "doubling map");
    let rot = |x: &f64| Ok((x + golden()).rem_euclid(1.0));
    let mut rng = rand::rngs::StdRng::seed_from_u64(8);
    for _ in 0..100 {
        let lo: f64 = rng.gen();
        let len: f64 = rng.gen_range(0.05..0.4);
        ensure!(!redundant_open_set_test(&pts, rot, circle_dist, arc(lo, len), delta)?, "rotation flagged at {lo}");
    }
    Ok("constant and doubling redundant, rotation clean on 100 arcs".into())
}

fn brute_cycles(n: u32, edges: &[(u32, u32, f64)]) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << edges.len()) {
        let chosen: Vec<usize> = (0..edges.len()).filter(|e| mask >> e & 1 == 1).collect();
        let mut deg = vec![0; n as usize];
        let mut parent: Vec<usize> = (0..n as usize).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for &e in &chosen {
            let (u, v, _) = edges[e];
            deg[u as usize] += 1;
            deg[v as usize] += 1;
            let (a, b) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
            parent[a] = b;
        }
        if deg.iter().any(|&d| d != 0 && d != 2) {
            continue;
        }
        let roots: BTreeSet<usize> =
            (0..n as usize).filter(|&v| deg[v] > 0).map(|v| find(&mut parent, v)).collect();
        if roots.len() == 1 {
            out.insert(chosen);
        }
    }
    out
}

fn c9() -> Result<String> {
    let cases: [(&str, u32, Vec<(u32, u32, f64)>, usize); 3] = [
        ("S4", 5, vec![(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0)], 0),
        ("figure-eight", 1, vec![(0, 0, 1.0), (0, 0, 2.0)], 2),
        ("theta", 2, vec![(0, 1, 1.0), (0, 1, 1.5), (0, 1, 2.0)], 3),
    ];
    let mut counts = Vec::new();
    for (name, n, edges, want) in &cases {
        let g = MetricGraph::new(&GraphSpec::from_edges(*n, edges))?;
        let found: BTreeSet<Vec<usize>> =
            enumerate_circles(&g).iter().map(|c| c.edges().into_iter().collect()).collect();
        let brute = brute_cycles(*n, edges);
        ensure!(found == brute, "{name}: {found:?} vs brute force {brute:?}");
        ensure!(found.len() == *want, "{name}: {} circles", found.len());
        counts.push(format!("{name} {}", found.len()));
    }

    let edges = [(0, 1, 1.0), (0, 1, 1.5), (0, 1, 2.0), (1, 2, 0.7), (2, 3, 0.4), (2, 4, 0.9)];
    let g = MetricGraph::new(&GraphSpec::from_edges(5, &edges))?;
    let circles = enumerate_circles(&g);
    let mut rng = rand::rngs::StdRng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for c in &circles {
        let r = build_retraction(&g, c)?;
        for _ in 0..1000 {
            let p = GraphPoint::new(rng.gen_range(0..g.edge_count()), rng.gen());
            let rp = r.eval(&g, &p)?;
            ensure!(c.contains_point(&g, &rp), "retraction leaves the circle");
            worst = worst.max(g.path_distance(&r.eval(&g, &rp)?, &rp));
        }
    }
    ensure!(worst <= 1e-12, "r∘r differs from r by {worst:e}");
    Ok(format!("{}; r∘r = r within {worst:.1e}", counts.join(", ")))
}

fn c10() -> Result<String> {
    let bs = adding_machine(PRECISION)?;
    for x0 in bs.sampler(10, 21) {
        for k in 3..=8 {
            let n = recurrence_horizon(&bs, &x0, 3f64.powi(-k), 1 << 12)?;
            ensure!(n == Some(1 << k), "k = {k}: horizon {n:?}");
        }
    }
    Ok("horizon 2^k for k = 3..8 from 10 seeds".into())
}

fn pipeline(dir: &Path) -> Result<()> {
    let cfg = dir.join("run.json");
    let body = serde_json::json!({ "construction": "theorem-d-1", "steps": 30000, "seed": 3, "probes": 40, "out": dir.join("out") });
    std::fs::write(&cfg, body.to_string())?;
    for cmd in ["build", "minimal-set", "classify", "plot"] {
        let o = Command::new(env!("CARGO_BIN_EXE_bundlemin")).env_remove("BUNDLEMIN_CAP").arg("--config").arg(&cfg).arg(cmd).output()?;
        ensure!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
    Ok(())
}

fn c11() -> Result<String> {
    let (a, b) = (tempfile::tempdir()?, tempfile::tempdir()?);
    pipeline(a.path())?;
    pipeline(b.path())?;
    let mut n = 0;
    for entry in std::fs::read_dir(a.path().join("out"))? {
        let name = entry?.file_name();
        let x = std::fs::read(a.path().join("out").join(&name))?;
        let y = std::fs::read(b.path().join("out").join(&name)).with_context(|| format!("{name:?} missing"))?;
        ensure!(x == y, "{name:?} differs");
        n += 1;
    }
    ensure!(n >= 7, "only {n} files");
    Ok(format!("{n} output files byte-identical"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Result<String>); 11] = [
        ("blow-up case one fibres", c1),
        ("blow-up case two coverage and seams", c2),
        ("Möbius rotation number and fibres", c3),
        ("Sturmian fibres and commutation", c4),
        ("dichotomy never violated", c5),
        ("m circles image check", c6),
        ("Weyl discrepancy", c7),
        ("minimality falsifier", c8),
        ("graph core exactness", c9),
        ("odometer recurrence", c10),
        ("determinism", c11),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({detail}) [{:.1} s]", i + 1, t.elapsed().as_secs_f64()),
            Err(e) => {
                println!("criterion {:>2} FAIL {name}: {e:#}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
