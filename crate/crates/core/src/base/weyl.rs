use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const WEYL_SEED: u64 = 20240101;
pub const RANDOM_CANDIDATES: usize = 10_000;

/// Exact star discrepancy of points in `[0, 1)`.
pub fn star_discrepancy(points: &[f64]) -> f64 {
    let mut u: Vec<f64> = points.to_vec();
    u.sort_by(f64::total_cmp);
    let k = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &x)| {
            let i = i as f64;
            ((i + 1.0) / k - x).max(x - i / k)
        })
        .fold(0.0, f64::max)
}

/// A rotation number carried as a binary fraction `bits / 2^precision`,
/// long enough that `n_k α mod 1` stays exact for every `n_k` searched.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylRotation {
    pub bits: BigUint,
    pub precision: u64,
    pub value: f64,
    pub discrepancy: f64,
    pub label: String,
}

impl WeylRotation {
    fn from_bits(bits: BigUint, precision: u64, label: String) -> Self {
        let value = top_bits(&bits, precision);
        WeylRotation { bits, precision, value, discrepancy: f64::NAN, label }
    }

    /// `n α mod 1` to double precision.
    pub fn frac_multiple(&self, n: &BigUint) -> f64 {
        let masked = (n * &self.bits) & low_mask(self.precision);
        top_bits(&masked, self.precision)
    }
}

fn low_mask(p: u64) -> BigUint {
    (BigUint::from(1u32) << p) - 1u32
}

// value / 2^p, keeping the leading 53 bits
fn top_bits(x: &BigUint, p: u64) -> f64 {
    if p <= 53 {
        return x.to_u64_digits().first().copied().unwrap_or(0) as f64 / 2f64.powi(p as i32);
    }
    let hi = x >> (p - 53);
    let m = hi.to_u64_digits().first().copied().unwrap_or(0);
    m as f64 / 2f64.powi(53)
}

// 53 bits of `digits` starting at bit `lo`
fn bit_window(digits: &[u64], lo: u64) -> u64 {
    let word = (lo / 64) as usize;
    let off = lo % 64;
    let a = digits.get(word).copied().unwrap_or(0) >> off;
    let b = if off == 0 { 0 } else { digits.get(word + 1).copied().unwrap_or(0) << (64 - off) };
    (a | b) & ((1u64 << 53) - 1)
}

/// `n_k α mod 1` for all `k`. Powers of two are read straight off the
/// binary expansion.
pub fn fractional_parts(alpha: &WeylRotation, n: &[BigUint]) -> Vec<f64> {
    let digits = alpha.bits.to_u64_digits();
    let p = alpha.precision;
    n.iter()
        .map(|nk| {
            if nk.count_ones() == 1 && p >= nk.bits() - 1 + 53 {
                let k = nk.bits() - 1;
                bit_window(&digits, p - k - 53) as f64 / 2f64.powi(53)
            } else {
                alpha.frac_multiple(nk)
            }
        })
        .collect()
}

pub fn powers_of_two(count: usize) -> Vec<BigUint> {
    (1..=count).map(|k| BigUint::from(1u32) << k).collect()
}

pub fn naturals(count: usize) -> Vec<BigUint> {
    (1..=count as u64).map(BigUint::from).collect()
}

fn small_primes(limit: u64) -> Vec<u64> {
    (2..limit).filter(|&p| (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

fn sqrt_fraction(p: u64, precision: u64) -> BigUint {
    let scaled = BigUint::from(p) << (2 * precision);
    scaled.sqrt() & low_mask(precision)
}

/// Star discrepancy of `{n_k α mod 1 : k <= count}` for a plain float `α`.
pub fn discrepancy_f64(alpha: f64, n: &[u64]) -> f64 {
    let pts: Vec<f64> = n.iter().map(|&k| (k as f64 * alpha).rem_euclid(1.0)).collect();
    star_discrepancy(&pts)
}

/// First candidate whose multiples along `n[..count]` have star discrepancy
/// below `tol`. Candidates are `sqrt(p) mod 1` for primes `p < 1000`, then
/// seeded random fractions.
pub fn weyl_minimal_rotation(n: &[BigUint], count: usize, tol: f64) -> Result<WeylRotation> {
    if count == 0 || count > n.len() {
        return Err(Error::WrongInput(format!("need 1 <= K <= {}", n.len())));
    }
    let n = &n[..count];
    if n.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::WrongInput("sequence must be strictly increasing".into()));
    }
    let precision = n.iter().map(|x| x.bits()).max().unwrap_or(1) + 64;
    let primes = small_primes(1000);
    let budget = primes.len() + RANDOM_CANDIDATES;
    let try_candidate = |mut c: WeylRotation| -> Option<WeylRotation> {
        let d = star_discrepancy(&fractional_parts(&c, n));
        c.discrepancy = d;
        (d < tol).then_some(c)
    };
    for &p in &primes {
        let c = WeylRotation::from_bits(sqrt_fraction(p, precision), precision, format!("sqrt({p})"));
        if let Some(found) = try_candidate(c) {
            return Ok(found);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(WEYL_SEED);
    let words = precision.div_ceil(64) as usize;
    for i in 0..RANDOM_CANDIDATES {
        let digits: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        let bits = BigUint::from_slice(&digits.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect::<Vec<_>>())
            & low_mask(precision);
        let c = WeylRotation::from_bits(bits, precision, format!("random #{i}"));
        if let Some(found) = try_candidate(c) {
            return Ok(found);
        }
    }
    Err(Error::SearchExhausted { tol, budget })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_point_mass() {
        let k = 100;
        let grid: Vec<f64> = (0..k).map(|i| i as f64 / k as f64).collect();
        assert!((star_discrepancy(&grid) - 1.0 / k as f64).abs() < 1e-12);
        assert!((star_discrepancy(&[0.0; 50]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_is_rejected() {
        let n: Vec<u64> = (1..=1000).collect();
        assert!(discrepancy_f64(0.5, &n) > 0.45);
    }

    #[test]
    fn shift_path_matches_multiplication() {
        let n = powers_of_two(300);
        let a = weyl_minimal_rotation(&n, 300, 0.2).unwrap();
        let fast = fractional_parts(&a, &n);
        for (k, nk) in n.iter().enumerate() {
            assert_eq!(fast[k], a.frac_multiple(nk));
        }
    }
}
