//! From lab parameters to the overall spatiotemporal mode-matching factor
//! of a homodyne measurement on a heralded photon.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use crate::analytic::{f_alpha, p_sp_pinhole, p_temp, p_temp_fwhm};
use crate::corr::fmt_sig6;
use crate::error::{Error, Result};
use crate::kernels::{SpatialScenario, TemporalScenario};
use crate::units::{
    bandwidth_to_wt, dp_to_kappa_p, mu_t_from_fwhm, tau_p_to_sigma_p, wt_to_sigma_t, FieldSpec, FilterSpec,
    SPEED_OF_LIGHT,
};

pub const CSV_HEADER: &str = "p_temp,p_sp,sqrt_p,m_exp,correction,m_cl,m_total";

/// How the quoted pulse duration relates to the pump pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TauConvention {
    /// The pump (second harmonic) is shorter than the fundamental by `sqrt 2`.
    #[default]
    PumpIsFundOverSqrt2,
    /// The pump has the fundamental's duration.
    PumpIsFund,
}

impl std::str::FromStr for TauConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pump_is_fund_over_sqrt2" => Ok(TauConvention::PumpIsFundOverSqrt2),
            "pump_is_fund" => Ok(TauConvention::PumpIsFund),
            other => Err(Error::domain(format!("unknown tau convention `{other}`"))),
        }
    }
}

impl TauConvention {
    pub fn name(self) -> &'static str {
        match self {
            TauConvention::PumpIsFundOverSqrt2 => "pump_is_fund_over_sqrt2",
            TauConvention::PumpIsFund => "pump_is_fund",
        }
    }
}

/// Lab parameters in the units they are usually quoted in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabParams {
    pub lambda_nm: f64,
    pub tau_fund_ps: f64,
    pub filter_fwhm_nm: f64,
    pub pinhole_diameter_um: f64,
    pub focal_mm: f64,
    pub pump_fwhm_mm: f64,
    pub visibility: f64,
    pub tau_convention: TauConvention,
}

impl Default for LabParams {
    /// 790 nm, 1.6 ps fundamental, 0.4 nm filter, 50 um pinhole behind an
    /// 80 mm lens, 0.34 mm pump beam, visibility 0.83.
    fn default() -> Self {
        LabParams {
            lambda_nm: 790.0,
            tau_fund_ps: 1.6,
            filter_fwhm_nm: 0.4,
            pinhole_diameter_um: 50.0,
            focal_mm: 80.0,
            pump_fwhm_mm: 0.34,
            visibility: 0.83,
            tau_convention: TauConvention::PumpIsFundOverSqrt2,
        }
    }
}

impl LabParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("lambda_nm", self.lambda_nm),
            ("tau_fund_ps", self.tau_fund_ps),
            ("filter_fwhm_nm", self.filter_fwhm_nm),
            ("pinhole_diameter_um", self.pinhole_diameter_um),
            ("focal_mm", self.focal_mm),
            ("pump_fwhm_mm", self.pump_fwhm_mm),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::domain(format!("visibility must lie in [0, 1], got {}", self.visibility)));
        }
        Ok(())
    }

    /// Signal wavelength (m).
    pub fn lambda(&self) -> f64 {
        self.lambda_nm * 1e-9
    }

    /// Pump pulse FWHM duration (s).
    pub fn tau_p(&self) -> f64 {
        let tau = self.tau_fund_ps * 1e-12;
        match self.tau_convention {
            TauConvention::PumpIsFundOverSqrt2 => tau / SQRT_2,
            TauConvention::PumpIsFund => tau,
        }
    }

    /// Filter transmission FWHM (rad/s).
    pub fn w_t(&self) -> Result<f64> {
        bandwidth_to_wt(self.filter_fwhm_nm * 1e-9, self.lambda())
    }

    pub fn mu_t(&self) -> Result<f64> {
        mu_t_from_fwhm(self.w_t()?, self.tau_p())
    }

    pub fn pinhole_radius(&self) -> f64 {
        0.5 * self.pinhole_diameter_um * 1e-6
    }

    pub fn focal(&self) -> f64 {
        self.focal_mm * 1e-3
    }

    pub fn pump_diameter(&self) -> f64 {
        self.pump_fwhm_mm * 1e-3
    }

    /// Degenerate temporal scenario: pump at twice the signal frequency,
    /// alignment beam with the filter's width.
    pub fn temporal_scenario(&self) -> Result<TemporalScenario> {
        self.validate()?;
        let omega0 = 2.0 * PI * SPEED_OF_LIGHT / self.lambda();
        let sigma_p = tau_p_to_sigma_p(self.tau_p())?;
        let sigma_t = wt_to_sigma_t(self.w_t()?)?;
        let pump = FieldSpec::new(2.0 * omega0, sigma_p, 0.0)?;
        let filter = FilterSpec::gaussian_spectral(omega0, sigma_t)?;
        TemporalScenario::new(pump, filter, Some(FieldSpec::new(omega0, sigma_t, 0.0)?))
    }

    /// Transverse scenario with the pinhole filter.
    pub fn spatial_scenario(&self) -> Result<SpatialScenario> {
        self.validate()?;
        let kp = dp_to_kappa_p(self.pump_diameter())?;
        let pump = FieldSpec::new(1.0, 0.0, kp)?;
        SpatialScenario::new(pump, FilterSpec::pinhole(self.pinhole_radius(), self.focal(), self.lambda())?)
    }

    /// Temporal purity from the exact Gaussian formula rather than the
    /// narrow-filter approximation used by [`run_chain`].
    pub fn p_temp_exact(&self) -> Result<f64> {
        p_temp(self.mu_t()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainReport {
    pub p_temp: f64,
    pub p_sp: f64,
    pub sqrt_p: f64,
    pub m_exp: f64,
    pub linewidth_correction: f64,
    pub m_cl: f64,
    pub m_total: f64,
}

impl ChainReport {
    /// The linewidth correction only makes sense for a sub-unity classical
    /// match; above one the result is unphysical.
    pub fn exceeds_unity(&self) -> bool {
        self.m_total > 1.0
    }

    pub fn csv_row(&self) -> String {
        [self.p_temp, self.p_sp, self.sqrt_p, self.m_exp, self.linewidth_correction, self.m_cl, self.m_total]
            .iter()
            .map(|&v| fmt_sig6(v))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn to_text(&self) -> String {
        let rows = [
            ("p_temp", self.p_temp),
            ("p_sp", self.p_sp),
            ("sqrt_p", self.sqrt_p),
            ("m_exp", self.m_exp),
            ("correction", self.linewidth_correction),
            ("m_cl", self.m_cl),
            ("m_total", self.m_total),
        ];
        let mut out = String::new();
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<12}{}", fmt_sig6(v));
        }
        if self.exceeds_unity() {
            let _ = writeln!(
                out,
                "warning: m_total exceeds 1; the linewidth correction overshoots for this classical match"
            );
        }
        out
    }
}

/// Ratio of the width-mismatch penalties of a pump-broadened (`sqrt 2`) and
/// a difference-frequency-broadened (`sqrt 3`) alignment pulse.
pub fn linewidth_correction() -> f64 {
    f_alpha(SQRT_2).expect("positive") / f_alpha(3f64.sqrt()).expect("positive")
}

pub fn run_chain(p: &LabParams) -> Result<ChainReport> {
    run_chain_with_overrides(p, None, None)
}

/// [`run_chain`] with quoted intermediates substituted for the computed
/// temporal and spatial purities.
pub fn run_chain_with_overrides(
    p: &LabParams,
    p_temp_override: Option<f64>,
    p_sp_override: Option<f64>,
) -> Result<ChainReport> {
    p.validate()?;
    for (name, v) in [("p_temp", p_temp_override), ("p_sp", p_sp_override)] {
        if let Some(v) = v {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::domain(format!("{name} override must lie in (0, 1], got {v}")));
            }
        }
    }
    let p_temp = match p_temp_override {
        Some(v) => v,
        None => p_temp_fwhm(p.w_t()?, p.tau_p())?,
    };
    let p_sp = match p_sp_override {
        Some(v) => v,
        None => p_sp_pinhole(p.pinhole_radius(), p.pump_diameter(), p.lambda(), p.focal())?,
    };
    let sqrt_p = (p_temp * p_sp).sqrt();
    let m_exp = p.visibility * p.visibility;
    let linewidth_correction = linewidth_correction();
    let m_cl = m_exp * linewidth_correction;
    Ok(ChainReport { p_temp, p_sp, sqrt_p, m_exp, linewidth_correction, m_cl, m_total: sqrt_p * m_cl })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lab_chain() {
        let r = run_chain(&LabParams::default()).unwrap();
        assert!((r.m_exp - 0.6889).abs() < 1e-12);
        assert!((r.linewidth_correction - 1.0886621).abs() < 1e-6);
        assert!((r.m_cl - 0.75).abs() < 0.005);
        assert!((r.p_sp - 0.87).abs() < 0.01, "{r:?}");
        assert!((r.p_temp - 0.87866).abs() < 1e-5, "{r:?}");
        assert!((r.m_total - r.sqrt_p * r.m_cl).abs() < 1e-12);
        assert!(!r.exceeds_unity());
    }

    #[test]
    fn overrides() {
        let p = LabParams::default();
        let r = run_chain_with_overrides(&p, Some(0.85), Some(0.87)).unwrap();
        assert!((r.sqrt_p - 0.8599419).abs() < 1e-7);
        assert!((r.m_total - 0.6449386).abs() < 1e-7);
        assert_eq!(run_chain_with_overrides(&p, None, None).unwrap(), run_chain(&p).unwrap());

        let ideal = LabParams { visibility: 1.0, ..p };
        let r = run_chain_with_overrides(&ideal, Some(1.0), Some(1.0)).unwrap();
        assert!((r.m_total - 1.0886621).abs() < 1e-6);
        assert!(r.exceeds_unity());
        assert!(r.to_text().contains("warning"));

        assert!(run_chain_with_overrides(&p, Some(0.0), None).is_err());
        assert!(run_chain_with_overrides(&p, None, Some(1.2)).is_err());
    }

    #[test]
    fn narrow_filter_limits() {
        let p = LabParams { filter_fwhm_nm: 1e-9, pinhole_diameter_um: 1e-9, visibility: 1.0, ..LabParams::default() };
        let r = run_chain(&p).unwrap();
        assert!((r.sqrt_p - 1.0).abs() < 1e-12);
        assert!((r.m_total - linewidth_correction()).abs() < 1e-12);
    }

    #[test]
    fn compositional() {
        for vis in [0.1, 0.5, 0.83, 0.99] {
            let p = LabParams { visibility: vis, ..LabParams::default() };
            let r = run_chain(&p).unwrap();
            let expect =
                (r.p_temp * r.p_sp).sqrt() * vis * vis * f_alpha(SQRT_2).unwrap() / f_alpha(3f64.sqrt()).unwrap();
            assert!((r.m_total - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn tau_conventions() {
        let a = LabParams::default();
        let b = LabParams { tau_convention: TauConvention::PumpIsFund, ..a };
        assert!((a.p_temp_exact().unwrap() - 0.897054).abs() < 1e-6);
        assert!((b.p_temp_exact().unwrap() - 0.820505).abs() < 1e-6);
        assert!((run_chain(&b).unwrap().p_temp - 0.757310).abs() < 1e-6);
        assert_eq!("pump_is_fund".parse::<TauConvention>().unwrap(), TauConvention::PumpIsFund);
        assert!("sqrt2".parse::<TauConvention>().is_err());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(run_chain(&LabParams { visibility: 1.2, ..LabParams::default() }).is_err());
        assert!(run_chain(&LabParams { focal_mm: 0.0, ..LabParams::default() }).is_err());
        let wide = LabParams { pinhole_diameter_um: 2000.0, ..LabParams::default() };
        assert!(matches!(run_chain(&wide), Err(Error::OutOfRegime(_))));
    }

    #[test]
    fn report_formats() {
        let r = run_chain_with_overrides(&LabParams::default(), Some(0.85), Some(0.87)).unwrap();
        assert_eq!(r.csv_row(), "0.85,0.87,0.859942,0.6889,1.08866,0.749979,0.644939");
        assert_eq!(CSV_HEADER.split(',').count(), r.csv_row().split(',').count());
        assert!(r.to_text().starts_with("p_temp      0.85\n"));
    }

    #[test]
    fn lab_scenarios_are_valid() {
        let p = LabParams::default();
        let t = p.temporal_scenario().unwrap();
        assert!((t.mu().mu_t - p.mu_t().unwrap()).abs() < 1e-12);
        assert!((t.pump.sigma_omega - 2.0814e12).abs() / 2.0814e12 < 1e-4);
        let s = p.spatial_scenario().unwrap();
        assert!((s.pump.kappa - 6926.0).abs() < 1.0);
    }
}
