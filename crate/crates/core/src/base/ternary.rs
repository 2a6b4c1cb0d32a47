use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 40;
pub const MAX_PRECISION: u32 = 63;

/// Default blow-up center: digit 2 at these (1-based) positions, 0 elsewhere.
pub const DEFAULT_CENTER_TWOS: [u32; 7] = [2, 5, 9, 14, 20, 27, 35];

/// A point of the ternary Cantor set known to `precision` digits over
/// `{0, 2}`. Bit `i` of `bits` is set when digit `i + 1` equals 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TernaryCode {
    pub bits: u64,
    pub precision: u32,
}

impl TernaryCode {
    pub fn new(bits: u64, precision: u32) -> Self {
        TernaryCode { bits: bits & mask(precision), precision }
    }

    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        let precision = digits.len() as u32;
        if precision == 0 || precision > MAX_PRECISION {
            return Err(Error::OutOfRange { name: "precision", value: precision as f64 });
        }
        let mut bits = 0u64;
        for (i, &d) in digits.iter().enumerate() {
            match d {
                0 => {}
                2 => bits |= 1 << i,
                _ => return Err(Error::InvalidPoint(format!("ternary digit {d} not in {{0,2}}"))),
            }
        }
        Ok(TernaryCode { bits, precision })
    }

    pub fn digits(&self) -> Vec<u8> {
        (0..self.precision).map(|i| if self.bits >> i & 1 == 1 { 2 } else { 0 }).collect()
    }

    /// Digits as a string such as `"0202"`.
    pub fn digit_string(&self) -> String {
        self.digits().iter().map(|d| (b'0' + d) as char).collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '2' => Ok(2),
                _ => Err(Error::InvalidPoint(format!("bad ternary code {s:?}"))),
            })
            .collect::<Result<_>>()?;
        TernaryCode::from_digits(&digits)
    }

    /// Adding machine: add one at the first digit, carrying to the right.
    pub fn succ(&self) -> Self {
        TernaryCode::new(self.bits.wrapping_add(1), self.precision)
    }

    pub fn pred(&self) -> Self {
        TernaryCode::new(self.bits.wrapping_sub(1), self.precision)
    }

    pub fn add(&self, n: u64) -> Self {
        TernaryCode::new(self.bits.wrapping_add(n), self.precision)
    }

    pub fn sub(&self, n: u64) -> Self {
        TernaryCode::new(self.bits.wrapping_sub(n), self.precision)
    }

    /// Position on the real line, `sum d_i 3^-i`.
    pub fn embedding(&self) -> f64 {
        let mut x = 0.0;
        for i in (0..self.precision).rev() {
            if self.bits >> i & 1 == 1 {
                x += 2.0 * 3f64.powi(-(i as i32 + 1));
            }
        }
        x
    }

    /// `|embedding(self) - embedding(other)|`, summed from the last digit up
    /// so that codes sharing a long prefix keep their relative accuracy.
    pub fn distance(&self, other: &TernaryCode) -> f64 {
        let k = self.precision.min(other.precision);
        let mut d = 0.0;
        for i in (0..k).rev() {
            let a = (self.bits >> i & 1) as f64;
            let b = (other.bits >> i & 1) as f64;
            d += (a - b) * 2.0 * 3f64.powi(-(i as i32 + 1));
        }
        d.abs()
    }

    /// Order of the embedded points.
    pub fn cmp_position(&self, other: &TernaryCode) -> Ordering {
        let k = self.precision.min(other.precision);
        let m = mask(k);
        let a = (self.bits & m).reverse_bits() >> (64 - k);
        let b = (other.bits & m).reverse_bits() >> (64 - k);
        a.cmp(&b)
    }

    /// Length of the run of equal digits at the end of the code.
    pub fn trailing_run(&self) -> u32 {
        let last = self.bits >> (self.precision - 1) & 1;
        let mut run = 0;
        for i in (0..self.precision).rev() {
            if self.bits >> i & 1 == last {
                run += 1;
            } else {
                break;
            }
        }
        run
    }

    pub fn default_center(precision: u32) -> Self {
        let mut bits = 0u64;
        for &p in &DEFAULT_CENTER_TWOS {
            if p <= precision {
                bits |= 1 << (p - 1);
            }
        }
        TernaryCode::new(bits, precision)
    }
}

pub fn mask(k: u32) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

pub fn check_precision(k: u32) -> Result<()> {
    if k == 0 || k > MAX_PRECISION {
        return Err(Error::OutOfRange { name: "precision", value: k as f64 });
    }
    Ok(())
}

/// Which copy of a doubled point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Minus,
    None,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DoubledCode {
    pub code: TernaryCode,
    pub side: Side,
}

/// The adding machine with the backward orbit of `center` blown up: each
/// `a_{-j}`, `1 <= j <= depth`, is replaced by a pair `a_{-j}^- < a_{-j}^+`
/// separated by a gap of length `gaps[j-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledCantor {
    pub center: TernaryCode,
    pub depth: u32,
    pub gaps: Vec<f64>,
    scale: f64,
    // orbit[j] = a_{-j}
    orbit: Vec<TernaryCode>,
}

/// Default gap sequence `L_{-j} = 4^-j / 3`.
pub fn default_gaps(depth: u32) -> Vec<f64> {
    (1..=depth).map(|j| 4f64.powi(-(j as i32)) / 3.0).collect()
}

impl DoubledCantor {
    pub fn new(center: TernaryCode, gaps: Option<Vec<f64>>) -> Result<Self> {
        check_precision(center.precision)?;
        let k = center.precision;
        let depth = k;
        let gaps = gaps.unwrap_or_else(|| default_gaps(depth));
        if gaps.len() != depth as usize {
            return Err(Error::WrongInput(format!("expected {depth} gap lengths, got {}", gaps.len())));
        }
        if let Some(&g) = gaps.iter().find(|&&g| !(g > 0.0) || !g.is_finite()) {
            return Err(Error::OutOfRange { name: "gap", value: g });
        }
        let total: f64 = gaps.iter().sum();
        if total >= 1.0 {
            return Err(Error::OutOfRange { name: "gap sum", value: total });
        }
        let orbit: Vec<TernaryCode> = (0..=depth as u64).map(|j| center.sub(j)).collect();
        let limit = 2.max(k.div_ceil(2) + 1);
        if orbit.iter().any(|c| c.trailing_run() >= limit) {
            return Err(Error::BadBlowupCenter(k));
        }
        Ok(DoubledCantor { center, depth, gaps, scale: 1.0 - total, orbit })
    }

    pub fn with_default_center(precision: u32) -> Result<Self> {
        check_precision(precision)?;
        DoubledCantor::new(TernaryCode::default_center(precision), None)
    }

    pub fn precision(&self) -> u32 {
        self.center.precision
    }

    pub fn gap_sum(&self) -> f64 {
        self.gaps.iter().sum()
    }

    /// `j` with `code == a_{-j}`, for `0 <= j <= depth`.
    pub fn orbit_index(&self, code: &TernaryCode) -> Option<u32> {
        let j = self.center.bits.wrapping_sub(code.bits) & mask(self.precision());
        (j <= self.depth as u64).then_some(j as u32)
    }

    pub fn a(&self) -> DoubledCode {
        DoubledCode { code: self.center, side: Side::None }
    }

    pub fn orbit_point(&self, j: u32, side: Side) -> DoubledCode {
        DoubledCode { code: self.orbit[j as usize], side }
    }

    pub fn c_l(&self) -> DoubledCode {
        self.orbit_point(1, Side::Minus)
    }

    pub fn c_r(&self) -> DoubledCode {
        self.orbit_point(1, Side::Plus)
    }

    pub fn check(&self, x: &DoubledCode) -> Result<()> {
        if x.code.precision != self.precision() {
            return Err(Error::InvalidPoint(format!(
                "precision {} does not match {}",
                x.code.precision,
                self.precision()
            )));
        }
        let doubled = matches!(self.orbit_index(&x.code), Some(j) if j >= 1);
        match (doubled, x.side) {
            (true, Side::None) => Err(Error::InvalidPoint("doubled point needs a side".into())),
            (false, Side::Minus | Side::Plus) => Err(Error::InvalidPoint("side tag off the doubled orbit".into())),
            _ => Ok(()),
        }
    }

    /// The doubled point with this code, on the given side if it is doubled.
    pub fn point(&self, code: TernaryCode, side: Side) -> DoubledCode {
        match self.orbit_index(&code) {
            Some(j) if j >= 1 => DoubledCode { code, side: if side == Side::None { Side::Minus } else { side } },
            _ => DoubledCode { code, side: Side::None },
        }
    }

    pub fn apply(&self, x: &DoubledCode) -> Result<DoubledCode> {
        self.check(x)?;
        if let Some(j) = self.orbit_index(&x.code) {
            if j >= 1 {
                let side = if j == 1 { Side::None } else { x.side };
                return Ok(DoubledCode { code: self.orbit[j as usize - 1], side });
            }
        }
        let y = x.code.succ();
        if matches!(self.orbit_index(&y), Some(j) if j >= 1) {
            return Err(Error::Precision(format!("image of {} lies beyond blow-up depth", x.code.digit_string())));
        }
        Ok(DoubledCode { code: y, side: Side::None })
    }

    pub fn preimages(&self, x: &DoubledCode) -> Result<Vec<DoubledCode>> {
        self.check(x)?;
        match self.orbit_index(&x.code) {
            Some(0) => Ok(vec![self.c_l(), self.c_r()]),
            Some(j) if j < self.depth => Ok(vec![DoubledCode { code: self.orbit[j as usize + 1], side: x.side }]),
            Some(_) => Err(Error::Precision("backward orbit deeper than the precision".into())),
            None => Ok(vec![DoubledCode { code: x.code.pred(), side: Side::None }]),
        }
    }

    pub fn preimage_count(&self, x: &DoubledCode) -> Result<usize> {
        self.check(x)?;
        Ok(if self.orbit_index(&x.code) == Some(0) { 2 } else { 1 })
    }

    pub fn cmp_position(&self, x: &DoubledCode, y: &DoubledCode) -> Ordering {
        x.code.cmp_position(&y.code).then(x.side.cmp(&y.side))
    }

    /// Sum of the gaps lying to the left of `x`.
    fn shift(&self, x: &DoubledCode) -> f64 {
        let mut s = 0.0;
        for j in 1..=self.depth {
            let p = self.orbit[j as usize];
            match x.code.cmp_position(&p) {
                Ordering::Greater => s += self.gaps[j as usize - 1],
                Ordering::Equal if x.side == Side::Plus => s += self.gaps[j as usize - 1],
                _ => {}
            }
        }
        s
    }

    pub fn embedding(&self, x: &DoubledCode) -> f64 {
        self.scale * x.code.embedding() + self.shift(x)
    }

    pub fn distance(&self, x: &DoubledCode, y: &DoubledCode) -> f64 {
        let (lo, hi) = if self.cmp_position(x, y) == Ordering::Greater { (y, x) } else { (x, y) };
        let mut gaps = 0.0;
        for j in 1..=self.depth {
            let p = self.orbit[j as usize];
            let after_lo = match lo.code.cmp_position(&p) {
                Ordering::Less => true,
                Ordering::Equal => lo.side == Side::Minus,
                Ordering::Greater => false,
            };
            let before_hi = match hi.code.cmp_position(&p) {
                Ordering::Greater => true,
                Ordering::Equal => hi.side == Side::Plus,
                Ordering::Less => false,
            };
            if after_lo && before_hi {
                gaps += self.gaps[j as usize - 1];
            }
        }
        self.scale * lo.code.distance(&hi.code) + gaps
    }

    pub fn tag(&self, x: &DoubledCode) -> Option<String> {
        match self.orbit_index(&x.code) {
            Some(0) => Some("a".into()),
            Some(1) => Some(if x.side == Side::Plus { "c_r" } else { "c_l" }.into()),
            Some(j) => Some(format!("a_-{j}{}", if x.side == Side::Plus { "+" } else { "-" })),
            None => None,
        }
    }

    /// Whether `x` lies in the quotient's right half, `x >= c_r`.
    pub fn is_right(&self, x: &DoubledCode) -> bool {
        self.cmp_position(x, &self.c_r()) != Ordering::Less
    }

    /// Position in the quotient: the right half slides left onto `c_l`.
    pub fn quotient_embedding(&self, x: &DoubledCode) -> f64 {
        let e = self.embedding(x);
        if self.is_right(x) {
            e - self.gaps[0]
        } else {
            e
        }
    }

    pub fn quotient_distance(&self, x: &DoubledCode, y: &DoubledCode) -> f64 {
        let d = self.distance(x, y);
        if self.is_right(x) != self.is_right(y) {
            (d - self.gaps[0]).max(0.0)
        } else {
            d
        }
    }

    pub fn same_in_quotient(&self, x: &DoubledCode, y: &DoubledCode) -> bool {
        let cl = self.c_l();
        let cr = self.c_r();
        x == y || ((*x == cl || *x == cr) && (*y == cl || *y == cr))
    }

    /// Preimage classes in the quotient, representatives only.
    pub fn quotient_preimages(&self, x: &DoubledCode) -> Result<Vec<DoubledCode>> {
        if self.same_in_quotient(x, &self.c_l()) {
            let mut pre = self.preimages(&self.c_l())?;
            pre.extend(self.preimages(&self.c_r())?);
            return Ok(pre);
        }
        let mut pre = self.preimages(x)?;
        if pre.len() == 2 && self.same_in_quotient(&pre[0], &pre[1]) {
            pre.truncate(1);
        }
        Ok(pre)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_steps() {
        let z = TernaryCode::new(0, 5);
        assert_eq!(z.succ().digits(), vec![2, 0, 0, 0, 0]);
        let full = TernaryCode::from_digits(&[2; 5]).unwrap();
        assert_eq!(full.succ().digits(), vec![0; 5]);
        assert_eq!(TernaryCode::from_digits(&[2, 0, 2]).unwrap().succ().digits(), vec![0, 2, 2]);
    }

    #[test]
    fn ordering_matches_embedding() {
        let k = 8;
        let codes: Vec<_> = (0..256u64).map(|b| TernaryCode::new(b, k)).collect();
        for x in &codes {
            for y in &codes {
                let by_value = x.embedding().total_cmp(&y.embedding());
                assert_eq!(x.cmp_position(y), by_value);
                assert!((x.distance(y) - (x.embedding() - y.embedding()).abs()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn default_center_digits() {
        let a = TernaryCode::default_center(12);
        assert_eq!(a.digits(), vec![0, 2, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0]);
    }

    #[test]
    fn doubled_gap_and_dynamics() {
        let dc = DoubledCantor::with_default_center(40).unwrap();
        let gap = dc.embedding(&dc.c_r()) - dc.embedding(&dc.c_l());
        assert!((gap - dc.gaps[0]).abs() < 1e-15);
        assert!((dc.distance(&dc.c_l(), &dc.c_r()) - dc.gaps[0]).abs() < 1e-15);
        assert_eq!(dc.apply(&dc.c_l()).unwrap(), dc.a());
        assert_eq!(dc.apply(&dc.c_r()).unwrap(), dc.a());
        let m2 = dc.orbit_point(2, Side::Plus);
        assert_eq!(dc.apply(&m2).unwrap(), dc.c_r());
        assert_eq!(dc.preimage_count(&dc.a()).unwrap(), 2);
        assert_eq!(dc.preimage_count(&dc.c_l()).unwrap(), 1);
        assert!(dc.embedding(&dc.c_l()) >= 0.0 && dc.embedding(&dc.c_r()) <= 1.0);
    }

    #[test]
    fn endpoint_center_rejected() {
        let right_end = TernaryCode::from_digits(&[2; 10]).unwrap();
        assert_eq!(DoubledCantor::new(right_end, None).unwrap_err(), Error::BadBlowupCenter(10));
        let eventually_zero = TernaryCode::from_digits(&[2, 0, 2, 0, 0, 0, 0, 0, 0, 0]).unwrap();
        assert!(DoubledCantor::new(eventually_zero, None).is_err());
    }

    #[test]
    fn quotient_glues_cl_and_cr() {
        let dc = DoubledCantor::with_default_center(40).unwrap();
        assert!((dc.quotient_embedding(&dc.c_r()) - dc.quotient_embedding(&dc.c_l())).abs() < 1e-15);
        assert_eq!(dc.quotient_distance(&dc.c_l(), &dc.c_r()), 0.0);
        assert_eq!(dc.quotient_preimages(&dc.a()).unwrap().len(), 1);
        assert_eq!(dc.quotient_preimages(&dc.c_l()).unwrap().len(), 2);
    }
}
