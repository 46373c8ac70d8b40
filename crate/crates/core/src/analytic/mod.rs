//! Closed-form purity and mode-matching expressions for Gaussian pumps and
//! filters. These are what the quadrature in [`crate::kernels`] and
//! [`crate::matcher`] is checked against.

mod bessel;

pub(crate) use bessel::jinc_unchecked;
pub use bessel::{bessel_j1, jinc, SERIES_LIMIT};

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be non-negative, got {v}")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive, got {v}")))
    }
}

/// Temporal purity of the heralded mode, `1 / sqrt(1 + 2 mu_t^2)`.
pub fn p_temp(mu_t: f64) -> Result<f64> {
    non_negative("mu_t", mu_t)?;
    Ok(1.0 / (1.0 + 2.0 * mu_t * mu_t).sqrt())
}

/// Narrow-filter approximation of [`p_temp`] in lab FWHM quantities,
/// `1 - w_t^2 tau_p^2 / (32 ln^2 2)`.
pub fn p_temp_fwhm(w_t: f64, tau_p: f64) -> Result<f64> {
    non_negative("w_t", w_t)?;
    non_negative("tau_p", tau_p)?;
    let p = 1.0 - (w_t * tau_p).powi(2) / (32.0 * LN_2 * LN_2);
    if p <= 0.0 {
        return Err(Error::OutOfRegime(format!(
            "w_t tau_p = {:.4} is too large for the narrow-filter approximation",
            w_t * tau_p
        )));
    }
    Ok(p)
}

/// Mode matching between the heralded mode and the difference-frequency wave
/// of a Gaussian alignment pulse:
/// `sqrt((1 + mu_A^2) / ((1 + mu_A^2/2 + mu_t^2)(1 + mu_A^2/2)))`.
pub fn m_temp(mu_t: f64, mu_a: f64) -> Result<f64> {
    non_negative("mu_t", mu_t)?;
    non_negative("mu_A", mu_a)?;
    let a2 = mu_a * mu_a;
    let half = 1.0 + 0.5 * a2;
    Ok(((1.0 + a2) / ((half + mu_t * mu_t) * half)).sqrt())
}

/// Alignment width maximizing [`m_temp`], `sqrt(sqrt(1 + 2 mu_t^2) - 1)`.
pub fn mu_a_max(mu_t: f64) -> Result<f64> {
    non_negative("mu_t", mu_t)?;
    let r = (1.0 + 2.0 * mu_t * mu_t).sqrt();
    // r - 1 loses digits for small mu_t; 2 mu_t^2 / (r + 1) does not
    Ok((2.0 * mu_t * mu_t / (r + 1.0)).sqrt())
}

/// Spatial purity for a Gaussian spatial filter, `1 / (1 + 2 kappa_t^2 / kappa_p^2)`.
pub fn p_sp_gaussian(kappa_t: f64, kappa_p: f64) -> Result<f64> {
    positive("kappa_p", kappa_p)?;
    non_negative("kappa_t", kappa_t)?;
    let r = kappa_t / kappa_p;
    Ok(1.0 / (1.0 + 2.0 * r * r))
}

/// Tight-pinhole approximation of the spatial purity,
/// `1 - (pi rho d_p / (sqrt(2 ln 2) lambda_t F))^2`.
pub fn p_sp_pinhole(rho: f64, d_p: f64, lambda_t: f64, focal: f64) -> Result<f64> {
    non_negative("rho", rho)?;
    positive("d_p", d_p)?;
    positive("lambda_t", lambda_t)?;
    positive("focal", focal)?;
    let x = PI * rho * d_p / ((2.0 * LN_2).sqrt() * lambda_t * focal);
    let p = 1.0 - x * x;
    if p <= 0.0 {
        return Err(Error::OutOfRegime(format!("pinhole too wide for the tight-filter approximation (x = {x:.4})")));
    }
    Ok(p)
}

/// Overlap of two coherent Gaussian pulses whose widths differ by a factor
/// `alpha`: `2 alpha / (alpha^2 + 1)`.
pub fn f_alpha(alpha: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    Ok(2.0 * alpha / (alpha * alpha + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{bandwidth_to_wt, dp_to_kappa_p, mu_t_from_fwhm, pinhole_to_kappa_t};
    use std::f64::consts::SQRT_2;

    #[test]
    fn temporal_purity_values() {
        assert_eq!(p_temp(0.0).unwrap(), 1.0);
        assert!((p_temp(1.0).unwrap() - 0.577350).abs() < 1e-6);
        assert!((p_temp(0.5).unwrap() - 0.816497).abs() < 1e-6);
        assert!(p_temp(-0.1).is_err());
    }

    #[test]
    fn fwhm_approximation() {
        assert_eq!(p_temp_fwhm(0.0, 1e-12).unwrap(), 1.0);
        let p = p_temp_fwhm(1.2e12, 1.6e-12 / SQRT_2).unwrap();
        assert!((p - 0.880).abs() < 1e-3, "{p}");
        // second-order Taylor remainder at mu_t = 0.2
        assert!(((1.0 - 0.04) - p_temp(0.2).unwrap()).abs() < 3e-3);
        assert!(matches!(p_temp_fwhm(1e13, 1e-12), Err(Error::OutOfRegime(_))));
    }

    #[test]
    fn fwhm_approximation_error_bound() {
        for i in 1..30 {
            let mu = 0.01 * i as f64;
            // pick tau = 1 ps and solve for w_t giving this mu
            let tau = 1e-12;
            let w = mu * 4.0 * SQRT_2 * LN_2 / tau;
            assert!((mu_t_from_fwhm(w, tau).unwrap() - mu).abs() < 1e-14);
            // alternating Taylor series: the remainder is below the first
            // omitted term, 3/8 (2 mu^2)^2
            let diff = (p_temp_fwhm(w, tau).unwrap() - p_temp(mu).unwrap()).abs();
            assert!(diff < 1.5 * mu.powi(4), "mu={mu} diff={diff}");
        }
    }

    #[test]
    fn mode_matching_values() {
        assert_eq!(m_temp(0.0, 0.0).unwrap(), 1.0);
        assert!((m_temp(0.5, 0.0).unwrap() - 1.0 / 1.25f64.sqrt()).abs() < 1e-15);
        assert!((m_temp(0.5, 0.0).unwrap() - 0.894427).abs() < 1e-6);
        let best = m_temp(0.5, mu_a_max(0.5).unwrap()).unwrap();
        for i in 0..=3000 {
            let mu_a = i as f64 * 1e-3;
            assert!(best >= m_temp(0.5, mu_a).unwrap() - 1e-15, "mu_A={mu_a}");
        }
        assert!(m_temp(0.1, -1.0).is_err());
    }

    #[test]
    fn optimal_alignment_width() {
        assert_eq!(mu_a_max(0.0).unwrap(), 0.0);
        assert!((mu_a_max(0.1).unwrap() - 0.09975).abs() < 1e-5);
        assert!((mu_a_max(1.0).unwrap() - 0.855600).abs() < 1e-6);
        assert!((mu_a_max(1.0).unwrap() - (3f64.sqrt() - 1.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spatial_purity_values() {
        assert_eq!(p_sp_gaussian(0.0, 1.0).unwrap(), 1.0);
        assert!((p_sp_gaussian(2.0, 2.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((p_sp_gaussian(1757.0, 6926.0).unwrap() - 0.886).abs() < 1e-3);
        assert!(p_sp_gaussian(1.0, 0.0).is_err());

        assert_eq!(p_sp_pinhole(0.0, 0.34e-3, 790e-9, 0.08).unwrap(), 1.0);
        let p = p_sp_pinhole(25e-6, 0.34e-3, 790e-9, 0.08).unwrap();
        assert!((p - 0.87).abs() < 0.01, "{p}");
        let kt = pinhole_to_kappa_t(25e-6, 0.08, 790e-9).unwrap();
        let kp = dp_to_kappa_p(0.34e-3).unwrap();
        assert!((p - p_sp_gaussian(kt, kp).unwrap()).abs() < 0.02);
        assert!(matches!(p_sp_pinhole(1e-3, 0.34e-3, 790e-9, 0.08), Err(Error::OutOfRegime(_))));
    }

    #[test]
    fn width_mismatch_penalty() {
        assert_eq!(f_alpha(1.0).unwrap(), 1.0);
        assert!((f_alpha(SQRT_2).unwrap() - 2.0 * SQRT_2 / 3.0).abs() < 1e-15);
        let ratio = f_alpha(SQRT_2).unwrap() / f_alpha(3f64.sqrt()).unwrap();
        assert!((ratio - 1.09).abs() < 0.005, "{ratio}");
        assert!(f_alpha(0.0).is_err());
    }

    #[test]
    fn lab_bandwidth_consistent_with_quoted_wt() {
        let wt = bandwidth_to_wt(0.4e-9, 790e-9).unwrap();
        assert!((wt - 1.2e12).abs() / 1.2e12 < 0.01);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn matching_bounded_by_purity(mu_t in 0.0f64..3.0, mu_a in 0.0f64..5.0) {
                let m = m_temp(mu_t, mu_a).unwrap();
                prop_assert!(m * m <= p_temp(mu_t).unwrap() + 1e-12);
                prop_assert!(m_temp(mu_t, mu_a_max(mu_t).unwrap()).unwrap() >= m - 1e-14);
            }

            #[test]
            fn optimum_beats_plane_wave(mu_t in 1e-3f64..3.0) {
                let opt = m_temp(mu_t, mu_a_max(mu_t).unwrap()).unwrap();
                prop_assert!(opt >= m_temp(mu_t, 0.0).unwrap());
            }

            #[test]
            fn monotone(a in 0.0f64..3.0, b in 0.0f64..3.0) {
                prop_assume!(a < b);
                prop_assert!(p_temp(a).unwrap() > p_temp(b).unwrap());
                prop_assert!(mu_a_max(a).unwrap() < mu_a_max(b).unwrap());
            }

            #[test]
            fn penalty_symmetric(alpha in 1e-3f64..1e3) {
                let f = f_alpha(alpha).unwrap();
                prop_assert!(f > 0.0 && f <= 1.0);
                prop_assert!((f - f_alpha(1.0 / alpha).unwrap()).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn near_optimal_gap_is_small() {
        for i in 0..=500 {
            let mu = 0.001 * i as f64;
            let gap = p_temp(mu).unwrap().sqrt() - m_temp(mu, mu_a_max(mu).unwrap()).unwrap();
            assert!(gap <= 0.005, "mu={mu} gap={gap}");
        }
    }
}
