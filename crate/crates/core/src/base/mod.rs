//! Minimal base systems: rotations, the adding machine and its blow-up,
//! the quotient base, Sturmian shifts and periodic orbits.

mod recurrence;
mod sturmian;
mod ternary;
mod weyl;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use recurrence::{close_return_times, recurrence_horizon, REFERENCE_SIZE};
pub use sturmian::{Sturmian, SymbolicWord, WordSide, BOUNDARY_TOL};
pub use ternary::{
    default_gaps, DoubledCantor, DoubledCode, Side, TernaryCode, DEFAULT_CENTER_TWOS, DEFAULT_PRECISION, MAX_PRECISION,
};
pub use weyl::{
    discrepancy_f64, fractional_parts, naturals, powers_of_two, star_discrepancy, weyl_minimal_rotation, WeylRotation,
    RANDOM_CANDIDATES, WEYL_SEED,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BasePoint {
    CircleAngle { theta: f64 },
    TernaryCode { code: TernaryCode },
    DoubledCode { code: DoubledCode },
    SymbolicWord { word: SymbolicWord },
    PeriodicIndex { index: u64, period: u64 },
}

impl BasePoint {
    pub fn angle(theta: f64) -> Self {
        BasePoint::CircleAngle { theta: sturmian::frac(theta) }
    }

    /// Compact text form used in CSV files.
    pub fn encode(&self) -> String {
        match self {
            BasePoint::CircleAngle { theta } => format!("angle:{theta}"),
            BasePoint::TernaryCode { code } => format!("code:{}", code.digit_string()),
            BasePoint::DoubledCode { code } => {
                let side = match code.side {
                    Side::Minus => "-",
                    Side::Plus => "+",
                    Side::None => "",
                };
                format!("doubled:{}{side}", code.code.digit_string())
            }
            BasePoint::SymbolicWord { word } => {
                let side = if word.side == WordSide::Plus { "+" } else { "-" };
                format!("word:{}{side}:{}", word.address, word.precision)
            }
            BasePoint::PeriodicIndex { index, period } => format!("periodic:{index}/{period}"),
        }
    }

    pub fn decode(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPoint(format!("cannot parse base point {s:?}"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "angle" => Ok(BasePoint::CircleAngle { theta: rest.parse().map_err(|_| bad())? }),
            "code" => Ok(BasePoint::TernaryCode { code: TernaryCode::parse(rest)? }),
            "doubled" => {
                let (digits, side) = match rest.as_bytes().last() {
                    Some(b'-') => (&rest[..rest.len() - 1], Side::Minus),
                    Some(b'+') => (&rest[..rest.len() - 1], Side::Plus),
                    _ => (rest, Side::None),
                };
                Ok(BasePoint::DoubledCode { code: DoubledCode { code: TernaryCode::parse(digits)?, side } })
            }
            "word" => {
                let (addr, precision) = rest.rsplit_once(':').ok_or_else(bad)?;
                let side = if addr.ends_with('+') { WordSide::Plus } else { WordSide::Minus };
                let address: f64 = addr[..addr.len() - 1].parse().map_err(|_| bad())?;
                Ok(BasePoint::SymbolicWord {
                    word: SymbolicWord { address, side, precision: precision.parse().map_err(|_| bad())? },
                })
            }
            "periodic" => {
                let (i, q) = rest.split_once('/').ok_or_else(bad)?;
                Ok(BasePoint::PeriodicIndex { index: i.parse().map_err(|_| bad())?, period: q.parse().map_err(|_| bad())? })
            }
            _ => Err(bad()),
        }
    }
}

/// On-disk description of a base system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BaseConfig {
    Rotation {
        alpha: f64,
    },
    Odometer {
        #[serde(default = "default_precision")]
        precision: u32,
    },
    Doubled {
        #[serde(default = "default_precision")]
        precision: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gaps: Option<Vec<f64>>,
    },
    Quotient {
        #[serde(default = "default_precision")]
        precision: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gaps: Option<Vec<f64>>,
    },
    Sturmian {
        alpha: f64,
        #[serde(default = "default_precision")]
        precision: u32,
    },
    Periodic {
        period: u64,
    },
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BaseConfig", into = "BaseConfig")]
pub enum BaseSystem {
    Rotation { alpha: f64 },
    Odometer { precision: u32 },
    Doubled(DoubledCantor),
    Quotient(DoubledCantor),
    Sturmian(Sturmian),
    Periodic { period: u64 },
}

fn blowup(precision: u32, center: Option<String>, gaps: Option<Vec<f64>>) -> Result<DoubledCantor> {
    let center = match center {
        Some(s) => TernaryCode::parse(&s)?,
        None => {
            ternary::check_precision(precision)?;
            TernaryCode::default_center(precision)
        }
    };
    if center.precision != precision {
        return Err(Error::WrongInput(format!("center has {} digits, precision is {precision}", center.precision)));
    }
    DoubledCantor::new(center, gaps)
}

impl TryFrom<BaseConfig> for BaseSystem {
    type Error = Error;

    fn try_from(c: BaseConfig) -> Result<Self> {
        match c {
            BaseConfig::Rotation { alpha } => circle_rotation(alpha),
            BaseConfig::Odometer { precision } => adding_machine(precision),
            BaseConfig::Doubled { precision, center, gaps } => Ok(BaseSystem::Doubled(blowup(precision, center, gaps)?)),
            BaseConfig::Quotient { precision, center, gaps } => Ok(BaseSystem::Quotient(blowup(precision, center, gaps)?)),
            BaseConfig::Sturmian { alpha, precision } => Ok(BaseSystem::Sturmian(Sturmian::new(alpha, precision)?)),
            BaseConfig::Periodic { period } => periodic(period),
        }
    }
}

impl From<BaseSystem> for BaseConfig {
    fn from(b: BaseSystem) -> Self {
        let blown = |dc: &DoubledCantor| {
            let default = DoubledCantor::with_default_center(dc.precision()).ok();
            let center = (default.as_ref().map(|d| d.center) != Some(dc.center)).then(|| dc.center.digit_string());
            let gaps = (dc.gaps != default_gaps(dc.depth)).then(|| dc.gaps.clone());
            (dc.precision(), center, gaps)
        };
        match b {
            BaseSystem::Rotation { alpha } => BaseConfig::Rotation { alpha },
            BaseSystem::Odometer { precision } => BaseConfig::Odometer { precision },
            BaseSystem::Doubled(dc) => {
                let (precision, center, gaps) = blown(&dc);
                BaseConfig::Doubled { precision, center, gaps }
            }
            BaseSystem::Quotient(dc) => {
                let (precision, center, gaps) = blown(&dc);
                BaseConfig::Quotient { precision, center, gaps }
            }
            BaseSystem::Sturmian(s) => BaseConfig::Sturmian { alpha: s.alpha, precision: s.precision },
            BaseSystem::Periodic { period } => BaseConfig::Periodic { period },
        }
    }
}

pub fn circle_rotation(alpha: f64) -> Result<BaseSystem> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange { name: "alpha", value: alpha });
    }
    Ok(BaseSystem::Rotation { alpha })
}

pub fn adding_machine(precision: u32) -> Result<BaseSystem> {
    ternary::check_precision(precision)?;
    Ok(BaseSystem::Odometer { precision })
}

pub fn doubled_cantor(center: TernaryCode, gaps: Option<Vec<f64>>) -> Result<BaseSystem> {
    Ok(BaseSystem::Doubled(DoubledCantor::new(center, gaps)?))
}

pub fn quotient_base(dc: &BaseSystem) -> Result<BaseSystem> {
    match dc {
        BaseSystem::Doubled(d) => Ok(BaseSystem::Quotient(d.clone())),
        _ => Err(Error::WrongInput("quotient needs a doubled Cantor system".into())),
    }
}

pub fn sturmian(alpha: f64, precision: u32) -> Result<BaseSystem> {
    Ok(BaseSystem::Sturmian(Sturmian::new(alpha, precision)?))
}

pub fn periodic(period: u64) -> Result<BaseSystem> {
    if period == 0 {
        return Err(Error::OutOfRange { name: "period", value: 0.0 });
    }
    Ok(BaseSystem::Periodic { period })
}

pub fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

impl BaseSystem {
    pub fn name(&self) -> &'static str {
        match self {
            BaseSystem::Rotation { .. } => "rotation",
            BaseSystem::Odometer { .. } => "odometer",
            BaseSystem::Doubled(_) => "doubled",
            BaseSystem::Quotient(_) => "quotient",
            BaseSystem::Sturmian(_) => "sturmian",
            BaseSystem::Periodic { .. } => "periodic",
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, BaseSystem::Rotation { .. } | BaseSystem::Sturmian(_))
    }

    pub fn blowup(&self) -> Option<&DoubledCantor> {
        match self {
            BaseSystem::Doubled(d) | BaseSystem::Quotient(d) => Some(d),
            _ => None,
        }
    }

    fn wrong(&self, x: &BasePoint) -> Error {
        Error::InvalidPoint(format!("{} is not a point of the {} system", x.encode(), self.name()))
    }

    pub fn check(&self, x: &BasePoint) -> Result<()> {
        match (self, x) {
            (BaseSystem::Rotation { .. }, BasePoint::CircleAngle { theta }) if (0.0..1.0).contains(theta) => Ok(()),
            (BaseSystem::Odometer { precision }, BasePoint::TernaryCode { code }) if code.precision == *precision => Ok(()),
            (BaseSystem::Doubled(d) | BaseSystem::Quotient(d), BasePoint::DoubledCode { code }) => d.check(code),
            (BaseSystem::Sturmian(s), BasePoint::SymbolicWord { word })
                if word.precision == s.precision && (0.0..1.0).contains(&word.address) =>
            {
                Ok(())
            }
            (BaseSystem::Periodic { period }, BasePoint::PeriodicIndex { index, period: q })
                if q == period && index < period =>
            {
                Ok(())
            }
            _ => Err(self.wrong(x)),
        }
    }

    pub fn apply(&self, x: &BasePoint) -> Result<BasePoint> {
        self.check(x)?;
        Ok(match (self, x) {
            (BaseSystem::Rotation { alpha }, BasePoint::CircleAngle { theta }) => BasePoint::angle(theta + alpha),
            (BaseSystem::Odometer { .. }, BasePoint::TernaryCode { code }) => BasePoint::TernaryCode { code: code.succ() },
            (BaseSystem::Doubled(d) | BaseSystem::Quotient(d), BasePoint::DoubledCode { code }) => {
                BasePoint::DoubledCode { code: d.apply(code)? }
            }
            (BaseSystem::Sturmian(s), BasePoint::SymbolicWord { word }) => BasePoint::SymbolicWord { word: s.shift(word) },
            (BaseSystem::Periodic { period }, BasePoint::PeriodicIndex { index, .. }) => {
                BasePoint::PeriodicIndex { index: (index + 1) % period, period: *period }
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn iterate(&self, x: &BasePoint, n: usize) -> Result<BasePoint> {
        let mut y = *x;
        for _ in 0..n {
            y = self.apply(&y)?;
        }
        Ok(y)
    }

    pub fn metric(&self, x: &BasePoint, y: &BasePoint) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(match (self, x, y) {
            (BaseSystem::Rotation { .. }, BasePoint::CircleAngle { theta: a }, BasePoint::CircleAngle { theta: b }) => {
                circle_distance(*a, *b)
            }
            (BaseSystem::Odometer { .. }, BasePoint::TernaryCode { code: a }, BasePoint::TernaryCode { code: b }) => {
                a.distance(b)
            }
            (BaseSystem::Doubled(d), BasePoint::DoubledCode { code: a }, BasePoint::DoubledCode { code: b }) => {
                d.distance(a, b)
            }
            (BaseSystem::Quotient(d), BasePoint::DoubledCode { code: a }, BasePoint::DoubledCode { code: b }) => {
                d.quotient_distance(a, b)
            }
            (BaseSystem::Sturmian(s), BasePoint::SymbolicWord { word: a }, BasePoint::SymbolicWord { word: b }) => {
                (s.embed(a) - s.embed(b)).abs()
            }
            (
                BaseSystem::Periodic { period },
                BasePoint::PeriodicIndex { index: a, .. },
                BasePoint::PeriodicIndex { index: b, .. },
            ) => circle_distance(*a as f64 / *period as f64, *b as f64 / *period as f64),
            _ => unreachable!("checked above"),
        })
    }

    /// Preimages when the system can list them.
    pub fn preimages(&self, x: &BasePoint) -> Result<Vec<BasePoint>> {
        self.check(x)?;
        Ok(match (self, x) {
            (BaseSystem::Rotation { alpha }, BasePoint::CircleAngle { theta }) => vec![BasePoint::angle(theta - alpha)],
            (BaseSystem::Odometer { .. }, BasePoint::TernaryCode { code }) => vec![BasePoint::TernaryCode { code: code.pred() }],
            (BaseSystem::Doubled(d), BasePoint::DoubledCode { code }) => {
                d.preimages(code)?.into_iter().map(|code| BasePoint::DoubledCode { code }).collect()
            }
            (BaseSystem::Quotient(d), BasePoint::DoubledCode { code }) => {
                d.quotient_preimages(code)?.into_iter().map(|code| BasePoint::DoubledCode { code }).collect()
            }
            (BaseSystem::Sturmian(s), BasePoint::SymbolicWord { word }) => vec![BasePoint::SymbolicWord {
                word: SymbolicWord { address: sturmian::frac(word.address - s.alpha), ..*word },
            }],
            (BaseSystem::Periodic { period }, BasePoint::PeriodicIndex { index, .. }) => {
                vec![BasePoint::PeriodicIndex { index: (index + period - 1) % period, period: *period }]
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn preimage_count(&self, x: &BasePoint) -> Result<usize> {
        match (self, x) {
            (BaseSystem::Doubled(d), BasePoint::DoubledCode { code }) => {
                self.check(x)?;
                d.preimage_count(code)
            }
            (BaseSystem::Quotient(d), BasePoint::DoubledCode { code }) => {
                self.check(x)?;
                Ok(if d.orbit_index(&code.code) == Some(1) { 2 } else { 1 })
            }
            _ => {
                self.check(x)?;
                Ok(1)
            }
        }
    }

    /// Position on the line (Cantor types) or the circle (angle types).
    pub fn embedding(&self, x: &BasePoint) -> Result<f64> {
        match (self, x) {
            (BaseSystem::Sturmian(s), BasePoint::SymbolicWord { word }) => {
                self.check(x)?;
                Ok(s.embed(word))
            }
            _ => self.coordinate(x),
        }
    }

    /// Coordinate used to slice and plot the bundle over this base.
    pub fn coordinate(&self, x: &BasePoint) -> Result<f64> {
        self.check(x)?;
        Ok(match (self, x) {
            (_, BasePoint::CircleAngle { theta }) => *theta,
            (_, BasePoint::TernaryCode { code }) => code.embedding(),
            (BaseSystem::Doubled(d), BasePoint::DoubledCode { code }) => d.embedding(code),
            (BaseSystem::Quotient(d), BasePoint::DoubledCode { code }) => d.quotient_embedding(code),
            (_, BasePoint::SymbolicWord { word }) => word.address,
            (_, BasePoint::PeriodicIndex { index, period }) => *index as f64 / *period as f64,
            _ => unreachable!("checked above"),
        })
    }

    /// Period of the coordinate, when it lives on a circle.
    pub fn coordinate_period(&self) -> Option<f64> {
        match self {
            BaseSystem::Rotation { .. } | BaseSystem::Sturmian(_) | BaseSystem::Periodic { .. } => Some(1.0),
            _ => None,
        }
    }

    pub fn coordinate_distance(&self, a: f64, b: f64) -> f64 {
        match self.coordinate_period() {
            Some(_) => circle_distance(a, b),
            None => (a - b).abs(),
        }
    }

    /// Name of a distinguished point, if `x` is one.
    pub fn tag(&self, x: &BasePoint) -> Option<String> {
        match (self, x) {
            (BaseSystem::Doubled(d), BasePoint::DoubledCode { code }) => d.tag(code),
            (BaseSystem::Quotient(d), BasePoint::DoubledCode { code }) => {
                d.tag(code).map(|t| if t == "c_r" { "c_l".to_string() } else { t })
            }
            _ => None,
        }
    }

    /// Distinguished base points by tag.
    pub fn tagged_points(&self) -> Vec<(String, BasePoint)> {
        match self {
            BaseSystem::Doubled(d) => vec![
                ("a".into(), BasePoint::DoubledCode { code: d.a() }),
                ("c_l".into(), BasePoint::DoubledCode { code: d.c_l() }),
                ("c_r".into(), BasePoint::DoubledCode { code: d.c_r() }),
            ],
            BaseSystem::Quotient(d) => vec![
                ("a".into(), BasePoint::DoubledCode { code: d.a() }),
                ("c_l".into(), BasePoint::DoubledCode { code: d.c_l() }),
            ],
            _ => Vec::new(),
        }
    }

    /// A reference point to start orbits from.
    pub fn origin(&self) -> BasePoint {
        match self {
            BaseSystem::Rotation { .. } => BasePoint::angle(0.0),
            BaseSystem::Odometer { precision } => BasePoint::TernaryCode { code: TernaryCode::new(0, *precision) },
            BaseSystem::Doubled(d) | BaseSystem::Quotient(d) => BasePoint::DoubledCode { code: d.a() },
            BaseSystem::Sturmian(s) => BasePoint::SymbolicWord { word: s.word(0.5, WordSide::Plus) },
            BaseSystem::Periodic { period } => BasePoint::PeriodicIndex { index: 0, period: *period },
        }
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> BasePoint {
        match self {
            BaseSystem::Rotation { .. } => BasePoint::angle(rng.gen::<f64>()),
            BaseSystem::Odometer { precision } => {
                BasePoint::TernaryCode { code: TernaryCode::new(rng.gen::<u64>(), *precision) }
            }
            BaseSystem::Doubled(d) | BaseSystem::Quotient(d) => {
                let code = TernaryCode::new(rng.gen::<u64>(), d.precision());
                let side = if rng.gen::<bool>() { Side::Plus } else { Side::Minus };
                BasePoint::DoubledCode { code: d.point(code, side) }
            }
            BaseSystem::Sturmian(s) => BasePoint::SymbolicWord { word: s.word(rng.gen::<f64>(), WordSide::Plus) },
            BaseSystem::Periodic { period } => BasePoint::PeriodicIndex { index: rng.gen_range(0..*period), period: *period },
        }
    }

    /// `n` pairwise distinct points, deterministic in `seed`. Blow-up
    /// systems always include their tagged points.
    pub fn sampler(&self, n: usize, seed: u64) -> Vec<BasePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let BaseSystem::Periodic { period } = self {
            return (0..(*period).min(n as u64)).map(|index| BasePoint::PeriodicIndex { index, period: *period }).collect();
        }
        let mut out: Vec<BasePoint> = self.tagged_points().into_iter().map(|(_, p)| p).take(n).collect();
        let mut seen: std::collections::HashSet<String> = out.iter().map(|p| p.encode()).collect();
        let tagged = out.len();
        let mut attempts = 0usize;
        while out.len() < n && attempts < 100 * n + 100 {
            attempts += 1;
            let p = self.random_point(&mut rng);
            if tagged > 0 && self.tag(&p).is_some() {
                continue;
            }
            if seen.insert(p.encode()) {
                out.push(p);
            }
        }
        out
    }
}

/// Rotation by `alpha` as a map of angles.
pub fn rotate(theta: f64, alpha: f64) -> f64 {
    sturmian::frac(theta + alpha)
}
