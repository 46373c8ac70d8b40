//! Field and filter parameters and the width conventions that connect lab
//! quantities (FWHM durations, bandwidths, beam diameters, pinholes) to the
//! Gaussian field-amplitude widths used by the kernels.
//!
//! A Gaussian field amplitude is written `exp(-(w - w0)^2 / sigma^2)` in
//! frequency and `exp(-k^2 / kappa^2)` in transverse momentum. All internal
//! quantities are in rad/s, 1/m, m and s.

use std::f64::consts::{LN_2, PI, SQRT_2};

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {value}")))
    }
}

fn check_non_negative(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be non-negative and finite, got {value}")))
    }
}

/// `2 sqrt(2 ln 2)`, the intensity-FWHM factor of a Gaussian field amplitude.
fn fwhm_factor() -> f64 {
    2.0 * (2.0 * LN_2).sqrt()
}

/// Pump spectral width from the intensity FWHM duration of the pump pulse.
pub fn tau_p_to_sigma_p(tau_fwhm: f64) -> Result<f64> {
    check_positive("tau_fwhm", tau_fwhm)?;
    Ok(fwhm_factor() / tau_fwhm)
}

/// Inverse of [`tau_p_to_sigma_p`].
pub fn sigma_p_to_tau_p(sigma_p: f64) -> Result<f64> {
    check_positive("sigma_p", sigma_p)?;
    Ok(fwhm_factor() / sigma_p)
}

/// Filter width from the FWHM of the filter transmission (rad/s).
pub fn wt_to_sigma_t(w_fwhm: f64) -> Result<f64> {
    check_positive("w_fwhm", w_fwhm)?;
    Ok(w_fwhm / (2.0 * LN_2.sqrt()))
}

/// Inverse of [`wt_to_sigma_t`].
pub fn sigma_t_to_wt(sigma_t: f64) -> Result<f64> {
    check_positive("sigma_t", sigma_t)?;
    Ok(2.0 * LN_2.sqrt() * sigma_t)
}

/// Angular-frequency FWHM of a filter given its wavelength FWHM, `2 pi c dl / l^2`.
pub fn bandwidth_to_wt(delta_lambda: f64, lambda: f64) -> Result<f64> {
    check_positive("delta_lambda", delta_lambda)?;
    check_positive("lambda", lambda)?;
    Ok(2.0 * PI * SPEED_OF_LIGHT * delta_lambda / (lambda * lambda))
}

/// Transverse momentum width of the pump from its intensity FWHM beam diameter.
pub fn dp_to_kappa_p(d_fwhm: f64) -> Result<f64> {
    check_positive("d_fwhm", d_fwhm)?;
    Ok(fwhm_factor() / d_fwhm)
}

/// Inverse of [`dp_to_kappa_p`].
pub fn kappa_p_to_dp(kappa_p: f64) -> Result<f64> {
    check_positive("kappa_p", kappa_p)?;
    Ok(fwhm_factor() / kappa_p)
}

/// Equivalent Gaussian filter width of a pinhole of radius `rho` behind a lens
/// of focal length `focal`, matched on the short-distance curvature of
/// `2 J1(x)/x`: `kappa_t = k_t rho / (F sqrt 2)`.
pub fn pinhole_to_kappa_t(rho: f64, focal: f64, lambda_t: f64) -> Result<f64> {
    check_positive("rho", rho)?;
    check_positive("focal", focal)?;
    check_positive("lambda_t", lambda_t)?;
    Ok(wavenumber(lambda_t) * rho / (focal * SQRT_2))
}

/// Inverse of [`pinhole_to_kappa_t`] in the radius.
pub fn kappa_t_to_pinhole_radius(kappa_t: f64, focal: f64, lambda_t: f64) -> Result<f64> {
    check_positive("kappa_t", kappa_t)?;
    check_positive("focal", focal)?;
    check_positive("lambda_t", lambda_t)?;
    Ok(kappa_t * focal * SQRT_2 / wavenumber(lambda_t))
}

/// `2 pi / lambda`.
pub fn wavenumber(lambda: f64) -> f64 {
    2.0 * PI / lambda
}

/// A Gaussian pump or alignment field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec {
    pub center_omega: f64,
    /// Spectral width; zero is a monochromatic (plane-wave) field.
    pub sigma_omega: f64,
    /// Transverse momentum width; zero is a plane wave.
    pub kappa: f64,
    pub amplitude: f64,
}

impl FieldSpec {
    pub fn new(center_omega: f64, sigma_omega: f64, kappa: f64) -> Result<Self> {
        Self::with_amplitude(center_omega, sigma_omega, kappa, 1.0)
    }

    pub fn with_amplitude(center_omega: f64, sigma_omega: f64, kappa: f64, amplitude: f64) -> Result<Self> {
        let spec = FieldSpec { center_omega, sigma_omega, kappa, amplitude };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center_omega.is_finite() {
            return Err(Error::domain("center_omega must be finite"));
        }
        check_non_negative("sigma_omega", self.sigma_omega)?;
        check_non_negative("kappa", self.kappa)?;
        check_positive("amplitude", self.amplitude)
    }

    pub fn is_monochromatic(&self) -> bool {
        self.sigma_omega == 0.0
    }
}

/// Transmission profile of the trigger-channel filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterKind {
    /// Gaussian spectral filter. A zero width is the ideal narrowband limit.
    GaussianSpectral { sigma_t: f64 },
    /// Gaussian spatial filter of transverse momentum width `kappa_t`.
    GaussianSpatial { kappa_t: f64 },
    /// Top-hat pinhole of radius `radius_rho` in the focal plane of a lens.
    Pinhole { radius_rho: f64, focal_f: f64, lambda_t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub kind: FilterKind,
    /// Transmission maximum; only meaningful for spectral filters.
    pub center_omega: f64,
    pub peak_t0: f64,
}

impl FilterSpec {
    pub fn gaussian_spectral(center_omega: f64, sigma_t: f64) -> Result<Self> {
        Self::new(FilterKind::GaussianSpectral { sigma_t }, center_omega)
    }

    pub fn gaussian_spatial(kappa_t: f64) -> Result<Self> {
        Self::new(FilterKind::GaussianSpatial { kappa_t }, 0.0)
    }

    pub fn pinhole(radius_rho: f64, focal_f: f64, lambda_t: f64) -> Result<Self> {
        Self::new(FilterKind::Pinhole { radius_rho, focal_f, lambda_t }, 0.0)
    }

    pub fn new(kind: FilterKind, center_omega: f64) -> Result<Self> {
        let spec = FilterSpec { kind, center_omega, peak_t0: 1.0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("peak_t0", self.peak_t0)?;
        if !self.center_omega.is_finite() {
            return Err(Error::domain("filter center_omega must be finite"));
        }
        match self.kind {
            FilterKind::GaussianSpectral { sigma_t } => check_non_negative("sigma_t", sigma_t),
            FilterKind::GaussianSpatial { kappa_t } => check_non_negative("kappa_t", kappa_t),
            FilterKind::Pinhole { radius_rho, focal_f, lambda_t } => {
                check_positive("radius_rho", radius_rho)?;
                check_positive("focal_f", focal_f)?;
                check_positive("lambda_t", lambda_t)
            }
        }
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self.kind, FilterKind::GaussianSpectral { .. })
    }
}

/// Filter and alignment widths in units of the pump spectral width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuRatios {
    pub mu_t: f64,
    pub mu_a: f64,
}

impl MuRatios {
    pub fn new(mu_t: f64, mu_a: f64) -> Result<Self> {
        check_non_negative("mu_t", mu_t)?;
        check_non_negative("mu_A", mu_a)?;
        Ok(MuRatios { mu_t, mu_a })
    }

    pub fn from_widths(sigma_p: f64, sigma_t: f64, sigma_a: f64) -> Result<Self> {
        check_positive("sigma_p", sigma_p)?;
        Self::new(sigma_t / sigma_p, sigma_a / sigma_p)
    }
}

/// `mu_t` straight from lab FWHM values: `w_t tau_p / (4 sqrt 2 ln 2)`.
pub fn mu_t_from_fwhm(w_fwhm: f64, tau_fwhm: f64) -> Result<f64> {
    check_positive("w_fwhm", w_fwhm)?;
    check_positive("tau_fwhm", tau_fwhm)?;
    Ok(w_fwhm * tau_fwhm / (4.0 * SQRT_2 * LN_2))
}
