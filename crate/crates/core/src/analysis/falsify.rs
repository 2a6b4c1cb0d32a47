use crate::base::star_discrepancy;
use crate::error::{Error, Result};

/// Evidence that `f(G) ⊆ f(X \ G)` on a sample: every image of a sampled
/// `G`-point lies within `delta` of the image of a sampled point outside `G`.
pub fn redundant_open_set_test<P, F, D, G>(points: &[P], f: F, dist: D, in_g: G, delta: f64) -> Result<bool>
where
    F: Fn(&P) -> Result<P>,
    D: Fn(&P, &P) -> Result<f64>,
    G: Fn(&P) -> bool,
{
    let (inside, outside): (Vec<&P>, Vec<&P>) = points.iter().partition(|p| in_g(p));
    if inside.is_empty() {
        return Err(Error::EmptyG);
    }
    let out_images: Vec<P> = outside.iter().map(|p| f(p)).collect::<Result<_>>()?;
    for p in inside {
        let fp = f(p)?;
        let mut hit = false;
        for q in &out_images {
            if dist(&fp, q)? <= delta {
                hit = true;
                break;
            }
        }
        if !hit {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Star discrepancy of angles taken mod 1.
pub fn equidistribution_discrepancy(angles: &[f64]) -> Result<f64> {
    if angles.is_empty() {
        return Err(Error::EmptyInput);
    }
    let u: Vec<f64> = angles.iter().map(|a| a.rem_euclid(1.0)).collect();
    Ok(star_discrepancy(&u))
}
