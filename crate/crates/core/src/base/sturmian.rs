use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Addresses this close to a partition point are read as lying on it.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WordSide {
    /// Coding of the address itself.
    Plus,
    /// Limit of codings of addresses approaching from the left.
    Minus,
}

/// A Sturmian word, kept as the rotation address it codes together with
/// the side of the coding. Symbols are `s_n = [θ + nα ∈ [1-α, 1)]` for
/// `n < precision`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolicWord {
    pub address: f64,
    pub side: WordSide,
    pub precision: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sturmian {
    pub alpha: f64,
    pub precision: u32,
}

/// Arc `[lo, lo + len]` of the circle, `lo` in `[0, 1)`.
#[derive(Debug, Clone, Copy)]
struct Arc {
    lo: f64,
    len: f64,
}

fn intersect(a: Arc, b: Arc) -> Vec<Arc> {
    let mut out = Vec::new();
    // compare b against both lifts of a that can overlap it
    for shift in [-1.0, 0.0, 1.0] {
        let blo = b.lo + shift;
        let lo = a.lo.max(blo);
        let hi = (a.lo + a.len).min(blo + b.len);
        if hi - lo > 1e-15 {
            out.push(Arc { lo: lo.rem_euclid(1.0), len: hi - lo });
        }
    }
    out
}

pub(crate) fn frac(x: f64) -> f64 {
    let f = x.rem_euclid(1.0);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

impl Sturmian {
    pub fn new(alpha: f64, precision: u32) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::OutOfRange { name: "alpha", value: alpha });
        }
        if precision == 0 {
            return Err(Error::OutOfRange { name: "precision", value: 0.0 });
        }
        Ok(Sturmian { alpha, precision })
    }

    pub fn word(&self, address: f64, side: WordSide) -> SymbolicWord {
        SymbolicWord { address: frac(address), side, precision: self.precision }
    }

    fn symbol_at(&self, x: f64, side: WordSide) -> u8 {
        let b = 1.0 - self.alpha;
        let near_b = (x - b).abs() < BOUNDARY_TOL;
        let near_0 = x < BOUNDARY_TOL || 1.0 - x < BOUNDARY_TOL;
        match side {
            WordSide::Plus if near_b => 1,
            WordSide::Plus if near_0 => 0,
            WordSide::Minus if near_b => 0,
            WordSide::Minus if near_0 => 1,
            _ => u8::from(x >= b),
        }
    }

    pub fn symbols(&self, w: &SymbolicWord) -> Vec<u8> {
        (0..w.precision).map(|n| self.symbol_at(frac(w.address + n as f64 * self.alpha), w.side)).collect()
    }

    pub fn shift(&self, w: &SymbolicWord) -> SymbolicWord {
        SymbolicWord { address: frac(w.address + self.alpha), side: w.side, precision: w.precision }
    }

    /// Whether the first `precision` orbit points of `z` avoid the partition points.
    pub fn is_generic(&self, z: f64) -> bool {
        let b = 1.0 - self.alpha;
        (0..self.precision).all(|n| {
            let x = frac(z + n as f64 * self.alpha);
            (x - b).abs() >= BOUNDARY_TOL && x >= BOUNDARY_TOL && 1.0 - x >= BOUNDARY_TOL
        })
    }

    /// Distinct words coding `z`: one, or two when the orbit of `z` meets a
    /// partition point within the window.
    pub fn codings(&self, z: f64) -> Vec<SymbolicWord> {
        let plus = self.word(z, WordSide::Plus);
        if self.is_generic(z) {
            return vec![plus];
        }
        let minus = self.word(z, WordSide::Minus);
        if self.symbols(&plus) == self.symbols(&minus) {
            vec![plus]
        } else {
            vec![minus, plus]
        }
    }

    /// Addresses compatible with a block of symbols, by intersecting the
    /// pulled-back partition arcs. Returns `(center, half_width)`.
    pub fn decode(&self, symbols: &[u8]) -> Result<(f64, f64)> {
        let b = 1.0 - self.alpha;
        if symbols.is_empty() {
            return Ok((0.5, 0.5));
        }
        let mut arcs: Vec<Arc> = Vec::new();
        for (n, &s) in symbols.iter().enumerate() {
            let base = if s == 1 { Arc { lo: b, len: self.alpha } } else { Arc { lo: 0.0, len: b } };
            let pulled = Arc { lo: frac(base.lo - n as f64 * self.alpha), len: base.len };
            arcs = if n == 0 { vec![pulled] } else { arcs.iter().flat_map(|a| intersect(*a, pulled)).collect() };
            if arcs.is_empty() {
                return Err(Error::InvalidPoint("symbols are not a Sturmian block".into()));
            }
        }
        let best = arcs.iter().copied().max_by(|x, y| x.len.total_cmp(&y.len)).unwrap();
        Ok((frac(best.lo + best.len / 2.0), best.len / 2.0 + BOUNDARY_TOL))
    }

    /// The factor map to the circle, computed from the symbols alone.
    pub fn factor(&self, w: &SymbolicWord) -> Result<(f64, f64)> {
        self.decode(&self.symbols(w))
    }

    /// Position of the word on the line, `sum s_n 2 3^-(n+1)`.
    pub fn embed(&self, w: &SymbolicWord) -> f64 {
        let s = self.symbols(w);
        let mut x = 0.0;
        for (n, &d) in s.iter().enumerate().rev() {
            if d == 1 {
                x += 2.0 * 3f64.powi(-(n as i32 + 1));
            }
        }
        x
    }

    /// The same embedding as an exact integer: `sum s_n 2 3^(K-1-n)`.
    pub fn embed_exact(&self, w: &SymbolicWord) -> BigUint {
        let mut x = BigUint::from(0u32);
        for d in self.symbols(w) {
            x = x * 3u32 + (2 * d as u32);
        }
        x
    }

    /// One address inside every cylinder of length `precision`, in circle order.
    pub fn cylinder_addresses(&self) -> Vec<f64> {
        let mut cuts: Vec<f64> = (0..=self.precision).map(|n| frac(-(n as f64) * self.alpha)).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let n = cuts.len();
        (0..n)
            .map(|i| {
                let lo = cuts[i];
                let hi = if i + 1 < n { cuts[i + 1] } else { cuts[0] + 1.0 };
                frac((lo + hi) / 2.0)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn symbols_follow_rotation() {
        let s = Sturmian::new(golden(), 20).unwrap();
        let w = s.word(0.2, WordSide::Plus);
        let sym = s.symbols(&w);
        let shifted = s.symbols(&s.shift(&w));
        assert_eq!(&sym[1..], &shifted[..19]);
    }

    #[test]
    fn boundary_points_have_two_codings() {
        let s = Sturmian::new(golden(), 30).unwrap();
        assert_eq!(s.codings(0.123456).len(), 1);
        let z = frac(1.0 - golden() - 3.0 * golden());
        let c = s.codings(z);
        assert_eq!(c.len(), 2);
        assert_ne!(s.symbols(&c[0]), s.symbols(&c[1]));
    }

    #[test]
    fn decode_recovers_address() {
        let s = Sturmian::new(golden(), 40).unwrap();
        let (z, half) = s.factor(&s.word(0.2, WordSide::Plus)).unwrap();
        assert!((z - 0.2).abs() <= half);
        assert!(half < 0.05);
    }
}
