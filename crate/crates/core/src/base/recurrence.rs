use num_bigint::BigUint;

use super::{BasePoint, BaseSystem};
use crate::error::Result;

pub const REFERENCE_SIZE: usize = 8192;
const REFERENCE_SEED: u64 = 7;

/// Smallest `N <= max_steps` such that the orbit points `x0 .. f^{N-1} x0`
/// form a `delta`-net of a fixed reference sample; `None` if never reached.
pub fn recurrence_horizon(bs: &BaseSystem, x0: &BasePoint, delta: f64, max_steps: usize) -> Result<Option<usize>> {
    recurrence_horizon_with(bs, x0, delta, max_steps, &bs.sampler(REFERENCE_SIZE, REFERENCE_SEED))
}

pub fn recurrence_horizon_with(
    bs: &BaseSystem,
    x0: &BasePoint,
    delta: f64,
    max_steps: usize,
    reference: &[BasePoint],
) -> Result<Option<usize>> {
    let mut uncovered: Vec<BasePoint> = reference.to_vec();
    let mut x = *x0;
    for step in 1..=max_steps {
        let mut keep = Vec::with_capacity(uncovered.len());
        for r in uncovered {
            if bs.metric(&x, &r)? > delta {
                keep.push(r);
            }
        }
        uncovered = keep;
        if uncovered.is_empty() {
            return Ok(Some(step));
        }
        x = bs.apply(&x)?;
    }
    Ok(None)
}

/// Return times of the orbit of `x0` usable as the sequence `(n_k)` in the
/// Weyl search: cylinder recurrence times `2^k` for Cantor bases, record
/// close returns otherwise.
pub fn close_return_times(bs: &BaseSystem, x0: &BasePoint, horizon: usize, max_terms: usize) -> Result<Vec<BigUint>> {
    match bs {
        BaseSystem::Odometer { .. } | BaseSystem::Doubled(_) | BaseSystem::Quotient(_) => {
            Ok((1..=max_terms).map(|k| BigUint::from(1u32) << k).collect())
        }
        BaseSystem::Periodic { period } => Ok((1..=max_terms as u64).map(|k| BigUint::from(k * period)).collect()),
        BaseSystem::Rotation { .. } | BaseSystem::Sturmian(_) => {
            let start = bs.coordinate(x0)?;
            let alpha = match bs {
                BaseSystem::Rotation { alpha } => *alpha,
                BaseSystem::Sturmian(s) => s.alpha,
                _ => unreachable!(),
            };
            let mut best = f64::INFINITY;
            let mut out = Vec::new();
            for n in 1..=horizon as u64 {
                let d = bs.coordinate_distance(start, (start + n as f64 * alpha).rem_euclid(1.0));
                if d < best {
                    best = d;
                    out.push(BigUint::from(n));
                    if out.len() == max_terms {
                        break;
                    }
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{adding_machine, circle_rotation, golden};

    #[test]
    fn odometer_horizon_is_power_of_two() {
        let bs = adding_machine(40).unwrap();
        let x0 = bs.sampler(1, 99)[0];
        for k in 3..=5 {
            let n = recurrence_horizon(&bs, &x0, 3f64.powi(-k), 1 << 12).unwrap();
            assert_eq!(n, Some(1 << k));
        }
    }

    #[test]
    fn half_rotation_never_covers() {
        let bs = circle_rotation(0.5).unwrap();
        assert_eq!(recurrence_horizon(&bs, &BasePoint::angle(0.0), 0.1, 1000).unwrap(), None);
    }

    #[test]
    fn golden_returns_are_fibonacci() {
        let bs = circle_rotation(golden()).unwrap();
        let t = close_return_times(&bs, &BasePoint::angle(0.0), 1000, 20).unwrap();
        let t: Vec<u64> = t.iter().map(|x| x.to_u64_digits()[0]).collect();
        assert_eq!(&t[..8], &[1, 2, 3, 5, 8, 13, 21, 34]);
    }
}
