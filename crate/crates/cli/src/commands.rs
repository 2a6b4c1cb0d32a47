use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use bundlemin_core::analysis::{
    approximate_minimal_set, circles_report, decode_point, endpoint_statistics, typical_fibre_report,
    DichotomyParams, FibreNet, SampleMeta, SampledSet, SliceParams, Verdict,
};
use bundlemin_core::bundle::{BundlePoint, FibreDescription, SkewSystem};
use bundlemin_core::constructions::build_named;
use bundlemin_core::graph::GraphPoint;
use bundlemin_core::Error;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, Settings};
use crate::output::{write_atomic, write_json};
use crate::CliError;

pub const SYSTEM_FILE: &str = "system.json";
pub const SAMPLE_CSV: &str = "sample.csv";
pub const SAMPLE_META: &str = "sample.json";
pub const DICHOTOMY_FILE: &str = "dichotomy.json";
pub const TRICHOTOMY_FILE: &str = "trichotomy.json";
pub const CIRCLES_FILE: &str = "circles.json";
pub const VERDICT_FILE: &str = "verdict.txt";

/// What `build` writes: the system and the orbit seeds known to lie in the
/// reference minimal set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub system: SkewSystem,
    #[serde(default)]
    pub seeds: Vec<BundlePoint>,
    #[serde(default)]
    pub provenance: String,
}

fn core_err(e: Error) -> CliError {
    match e {
        Error::Config(m) => CliError::Config(m),
        Error::BadPattern(_) | Error::OutOfRange { .. } | Error::WrongInput(_) => CliError::Config(e.to_string()),
        other => CliError::Other(other.into()),
    }
}

pub fn load_system(path: &Path) -> Result<SystemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Other(anyhow::anyhow!("{}: {e}", path.display())))?;
    let file: SystemFile =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let s = &file.system;
    let mut checked =
        SkewSystem::new(s.base.clone(), s.bundle.clone(), s.family.clone()).map_err(core_err)?;
    checked.construction = s.construction.clone();
    checked.reference = s.reference.clone();
    checked.modulus = s.modulus.clone();
    for p in &file.seeds {
        checked.check(p).map_err(core_err)?;
    }
    Ok(SystemFile { system: checked, ..file })
}

pub struct BuildArgs {
    pub name: Option<String>,
    pub overrides: serde_json::Map<String, serde_json::Value>,
}

fn describe(d: &FibreDescription) -> String {
    match d {
        FibreDescription::Circles { edge_sets } => format!("{} circle(s) {edge_sets:?}", edge_sets.len()),
        FibreDescription::OneCircleOf { edge_sets } => format!("one circle out of {edge_sets:?}"),
        FibreDescription::Finite { count } => format!("{count} point(s)"),
    }
}

pub fn build(cfg: &RunConfig, args: BuildArgs, out: &Path) -> Result<String, CliError> {
    let file = match (&args.name, &cfg.construction, &cfg.system) {
        (Some(name), _, _) | (None, Some(name), None) => {
            let mut params = match &cfg.params {
                Some(serde_json::Value::Object(m)) => m.clone(),
                Some(serde_json::Value::Null) | None => Default::default(),
                Some(_) => return Err(CliError::Config("`params` must be an object".into())),
            };
            params.extend(args.overrides);
            let r = build_named(name, &serde_json::Value::Object(params)).map_err(core_err)?;
            SystemFile { system: r.system, seeds: r.seeds, provenance: r.provenance }
        }
        (None, None, Some(sys)) => {
            if !args.overrides.is_empty() {
                return Err(CliError::Config("parameter flags need a named construction".into()));
            }
            let system: SkewSystem =
                serde_json::from_value(sys.clone()).map_err(|e| CliError::Config(format!("system: {e}")))?;
            let mut checked = SkewSystem::new(system.base, system.bundle, system.family).map_err(core_err)?;
            checked.construction = system.construction.or(Some("custom".into()));
            checked.reference = system.reference;
            checked.modulus = system.modulus;
            SystemFile { system: checked, seeds: Vec::new(), provenance: String::new() }
        }
        (None, Some(_), Some(_)) => return Err(CliError::Config("give `construction` or `system`, not both".into())),
        (None, None, None) => return Err(CliError::Config("no construction named and no system in the config".into())),
    };
    let s = &file.system;
    let mut summary = String::new();
    let name = s.construction.as_deref().unwrap_or("custom");
    writeln!(summary, "system: {name}").unwrap();
    writeln!(summary, "base: {}", s.base.name()).unwrap();
    let g = s.fibre();
    writeln!(summary, "fibre: {} vertices, {} edges, length {:.6}", g.vertex_count(), g.edge_count(), g.total_length())
        .unwrap();
    writeln!(summary, "bundle: {}", if s.bundle.is_monodromy() { "monodromy" } else { "product" }).unwrap();
    if let Some(r) = &s.reference {
        writeln!(summary, "typical fibre: {}", describe(&r.generic)).unwrap();
        for (tag, d) in &r.by_tag {
            writeln!(summary, "exceptional fibre at {tag}: {}", describe(d)).unwrap();
        }
        writeln!(summary, "note: {}", r.note).unwrap();
    }
    if !file.provenance.is_empty() {
        writeln!(summary, "construction: {}", file.provenance).unwrap();
    }
    write_json(&out.join(SYSTEM_FILE), &file)?;
    write_atomic(&out.join("summary.txt"), summary.as_bytes())?;
    Ok(summary)
}

fn start_point(file: &SystemFile, cfg: &RunConfig, start: Option<String>, seed: u64) -> Result<BundlePoint, CliError> {
    let s = &file.system;
    if let Some(text) = start.or_else(|| cfg.start.clone()) {
        let bad = |e: Error| CliError::Config(format!("start {text:?}: {e}"));
        let p = decode_point(&text).map_err(bad)?;
        s.check(&p).map_err(bad)?;
        return Ok(p);
    }
    if !file.seeds.is_empty() {
        return Ok(file.seeds[(seed % file.seeds.len() as u64) as usize]);
    }
    let b = s.base.sampler(1, seed).into_iter().next().context("base sampler returned nothing")?;
    Ok(BundlePoint { b, y: GraphPoint::new(0, 0.5) })
}

/// Fraction of a `δ`-grid on the fibre that lies within `δ` of the fibre
/// coordinates of the sample.
fn fibre_occupancy(s: &SkewSystem, sample: &SampledSet) -> f64 {
    let g = s.fibre();
    let pts: Vec<GraphPoint> = sample.points.iter().map(|p| p.y).collect();
    if pts.is_empty() {
        return 0.0;
    }
    let net = FibreNet::new(g, &pts);
    let grid = g.grid(sample.resolution);
    grid.iter().filter(|p| net.nearest(p) <= sample.resolution).count() as f64 / grid.len() as f64
}

pub fn minimal_set(cfg: &RunConfig, set: &Settings, system: &Path, start: Option<String>) -> Result<String, CliError> {
    let file = load_system(system)?;
    let s = &file.system;
    let seed = start_point(&file, cfg, start, set.seed)?;
    let sample = approximate_minimal_set(s, &seed, set.transient, set.steps, set.delta).map_err(core_err)?;
    let mut csv = Vec::new();
    sample.write_csv(s, &mut csv).map_err(core_err)?;
    write_atomic(&set.out.join(SAMPLE_CSV), &csv)?;
    write_json(&set.out.join(SAMPLE_META), &sample.meta())?;
    let mut summary = String::new();
    writeln!(summary, "sample: {} points at resolution {}", sample.len(), sample.resolution).unwrap();
    writeln!(summary, "orbit: {} transient + {} kept steps from {}", set.transient, set.steps, sample.provenance.seed)
        .unwrap();
    writeln!(summary, "fibre occupancy: {:.4}", fibre_occupancy(s, &sample)).unwrap();
    write_atomic(&set.out.join("minimal_set.txt"), summary.as_bytes())?;
    Ok(summary)
}

pub fn load_sample(s: &SkewSystem, csv: &Path) -> Result<SampledSet, CliError> {
    let meta_path = csv.with_extension("json");
    let meta_text = std::fs::read_to_string(&meta_path)
        .map_err(|e| CliError::Other(anyhow::anyhow!("{}: {e}", meta_path.display())))?;
    let meta: SampleMeta =
        serde_json::from_str(&meta_text).map_err(|e| CliError::Config(format!("{}: {e}", meta_path.display())))?;
    let f = std::fs::File::open(csv).map_err(|e| CliError::Other(anyhow::anyhow!("{}: {e}", csv.display())))?;
    SampledSet::read_csv(s, std::io::BufReader::new(f), &meta).map_err(|e| CliError::Config(format!("{}: {e}", csv.display())))
}

pub struct ClassifyOutcome {
    pub text: String,
    pub verdict: Verdict,
}

pub fn classify(set: &Settings, system: &Path, sample_path: &Path) -> Result<ClassifyOutcome, CliError> {
    let file = load_system(system)?;
    let s = &file.system;
    let sample = load_sample(s, sample_path)?;
    if sample.is_empty() {
        return Err(CliError::Config(format!("{} has no points", sample_path.display())));
    }
    let res = sample.resolution;
    let mut text = String::new();
    writeln!(text, "system: {}", s.construction.as_deref().unwrap_or("custom")).unwrap();
    writeln!(text, "sample: {} points at resolution {res}", sample.len()).unwrap();

    let dich = endpoint_statistics(s, &sample, &DichotomyParams::from_resolution(res)).map_err(core_err)?;
    write_json(&set.out.join(DICHOTOMY_FILE), &dich)?;
    writeln!(text, "\ndichotomy: {:?}", dich.verdict).unwrap();
    writeln!(text, "  end-point fraction {:.4} ({} of {})", dich.endpoint_fraction, dich.end_points, dich.points).unwrap();
    writeln!(text, "  interior detected: {}", dich.interior_detected).unwrap();

    let probes = s.base.sampler(set.probes, set.seed);
    let params = SliceParams::from_resolution(res);
    match typical_fibre_report(s, &sample, &probes, &params) {
        Ok(r) => {
            write_json(&set.out.join(TRICHOTOMY_FILE), &r)?;
            writeln!(text, "\ntypical fibre: {:?}", r.typical).unwrap();
            if let Some(n) = r.n {
                writeln!(text, "  N = {n}").unwrap();
            }
            writeln!(text, "  probes accepted {} rejected {}", r.accepted, r.rejected).unwrap();
            writeln!(text, "  totally disconnected fraction {:.4}", r.totally_disconnected_fraction).unwrap();
            for e in &r.exceptional {
                writeln!(text, "  exceptional {} {:?} at {:.6}", e.tag.as_deref().unwrap_or("-"), e.class, e.coordinate)
                    .unwrap();
            }
        }
        Err(e) => writeln!(text, "\ntypical fibre: not available ({e})").unwrap(),
    }
    match circles_report(s, &sample, &probes, &params) {
        Ok(r) => {
            write_json(&set.out.join(CIRCLES_FILE), &r)?;
            writeln!(text, "\ncircles: m = {}", r.m).unwrap();
            writeln!(text, "  image check {} of {} ({})", r.c8_passed, r.c8_checked, if r.c8_pass { "pass" } else { "fail" })
                .unwrap();
            for e in &r.exceptional {
                writeln!(text, "  exceptional {} {:?} at {:.6}", e.tag.as_deref().unwrap_or("-"), e.class, e.coordinate)
                    .unwrap();
            }
        }
        Err(Error::NotCircleCase) => {
            let stale = set.out.join(CIRCLES_FILE);
            if stale.exists() {
                std::fs::remove_file(&stale).with_context(|| format!("removing {}", stale.display()))?;
            }
            writeln!(text, "\ncircles: not a circle case").unwrap();
        }
        Err(e) => return Err(core_err(e)),
    }
    write_atomic(&set.out.join(VERDICT_FILE), text.as_bytes())?;
    Ok(ClassifyOutcome { text, verdict: dich.verdict })
}

pub fn default_path(out: &Path, given: Option<PathBuf>, name: &str) -> PathBuf {
    given.unwrap_or_else(|| out.join(name))
}
