//! Bessel function of the first kind, order one.
//!
//! Ascending series for `|x| <= SERIES_LIMIT`, Hankel asymptotic expansion
//! beyond. The crossover sits where both branches stay under `1e-10`
//! absolute: below it the asymptotic series cannot reach that accuracy
//! (its smallest term is about `exp(-2x)`), above it cancellation in the
//! ascending series grows past it.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

pub const SERIES_LIMIT: f64 = 12.0;

/// `J1(x)` with absolute error below `1e-10` for every finite `x`.
pub fn bessel_j1(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("bessel_j1 needs a finite argument, got {x}")));
    }
    Ok(j1(x))
}

/// Unchecked [`bessel_j1`] for callers that already know `x` is finite.
pub(crate) fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT { series(ax) } else { asymptotic(ax) };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// `2 J1(x) / x`, the far-field coherence of a uniformly lit circular
/// aperture; equals one at the origin.
pub fn jinc(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("jinc needs a finite argument, got {x}")));
    }
    Ok(jinc_unchecked(x))
}

pub(crate) fn jinc_unchecked(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 8.0
    } else {
        2.0 * j1(x) / x
    }
}

// sum_k (-1)^k (x/2)^(2k+1) / (k! (k+1)!)
fn series(x: f64) -> f64 {
    let h = 0.5 * x;
    let q = -h * h;
    let mut term = h;
    let mut sum = term;
    for k in 1..80 {
        term *= q / (k as f64 * (k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn asymptotic(x: f64) -> f64 {
    // a_k = prod_{m=1..k} (4 - (2m-1)^2) / (k! 8^k)
    let mu = 4.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let m = (2 * k - 1) as f64;
        term *= (mu - m * m) / (k as f64 * 8.0 * x);
        if term.abs() >= last {
            break;
        }
        last = term.abs();
        // even orders alternate into P, odd into Q
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - 3.0 * FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    // J1 at 40 significant digits (mpmath besselj).
    #[allow(clippy::excessive_precision)]
    const REFERENCE: [(f64, f64); 14] = [
        (0.05, 0.02499218831375970051915775),
        (0.5, 0.2422684576748738863839546),
        (1.0, 0.4400505857449335159596822),
        (2.5, 0.4970941024642740380108163),
        (5.0, -0.3275791375914652220377343),
        (7.5, 0.1352484275797055051822405),
        (8.0, 0.2346363468539146243812767),
        (8.5, 0.2731219636740537442650038),
        (10.0, 0.04347274616886143666974877),
        (12.0, -0.2234471044906276123676977),
        (15.0, 0.2051040386135227611471374),
        (25.0, -0.1253502495802899046518093),
        (50.0, -0.09751182812517513766145895),
        (100.0, -0.07714535201411215803268549),
    ];

    #[test]
    fn matches_reference_values() {
        for (x, want) in REFERENCE {
            let got = bessel_j1(x).unwrap();
            assert!((got - want).abs() < 1e-10, "x={x}: {got} vs {want}");
            assert_eq!(bessel_j1(-x).unwrap(), -got);
        }
    }

    #[test]
    fn both_branches_agree_near_crossover() {
        for i in 0..=40 {
            let x = 10.0 + 0.1 * i as f64;
            assert!((series(x) - asymptotic(x)).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn origin_and_small_argument() {
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        let x = 0.01;
        assert!((jinc(x).unwrap() - (1.0 - x * x / 8.0)).abs() < 1e-9);
        assert_eq!(jinc(0.0).unwrap(), 1.0);
        assert!(bessel_j1(f64::NAN).is_err());
        assert!(bessel_j1(f64::INFINITY).is_err());
    }

    #[test]
    fn first_zero() {
        let (mut lo, mut hi) = (3.0, 4.5);
        assert!(bessel_j1(lo).unwrap() > 0.0 && bessel_j1(hi).unwrap() < 0.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if bessel_j1(mid).unwrap() > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 3.831705970207512).abs() < 1e-9, "{lo}");
    }
}
