//! Mode matching between the heralded photon and a classical
//! difference-frequency wave, and the search for the best alignment width.

use crate::analytic::{p_sp_gaussian, p_sp_pinhole};
use crate::corr::{mode_match, purity, CorrMatrix};
use crate::error::{Error, Result};
use crate::grid::{make_grid, Grid1D, Grid2D, Rule, SPAN_WIDTHS};
use crate::kernels::{
    build_cpp_temporal_numeric, build_dfg_temporal, signal_spatial_kernel, SpatialScenario, TemporalScenario,
};
use crate::units::{kappa_p_to_dp, pinhole_to_kappa_t, FieldSpec, FilterKind};

/// Width of the final golden-section bracket, in units of the pump width.
pub const ALIGNMENT_TOL: f64 = 1e-6;

/// Nodes of the grid built by [`alignment_search_grid`].
pub const SEARCH_GRID_N: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchResult {
    pub purity_cpp: f64,
    pub purity_classical: f64,
    pub mode_match: f64,
    /// `sqrt(purity_cpp)`, the largest match any classical wave can reach.
    pub bound: f64,
    pub mu_a_used: f64,
}

/// Purities of both kernels and their mode match on `grid`.
pub fn evaluate_match(s: &TemporalScenario, grid: &Grid1D) -> Result<MatchResult> {
    let cpp = build_cpp_temporal_numeric(s, grid)?;
    let dfg = build_dfg_temporal(s, grid)?;
    match_against(&cpp, &dfg, s.mu().mu_a)
}

fn match_against(cpp: &CorrMatrix, dfg: &CorrMatrix, mu_a: f64) -> Result<MatchResult> {
    let purity_cpp = purity(cpp)?;
    let purity_classical = purity(dfg)?;
    let m = mode_match(cpp, dfg)?;
    if m * m > purity_cpp * purity_classical + 1e-9 {
        return Err(Error::Invariant(format!(
            "mode match {m} violates the Cauchy-Schwarz bound (P1 = {purity_cpp}, P2 = {purity_classical})"
        )));
    }
    Ok(MatchResult { purity_cpp, purity_classical, mode_match: m, bound: purity_cpp.sqrt(), mu_a_used: mu_a })
}

/// Search bracket for the alignment width, `[0, 3 (1 + mu_t)]`.
pub fn alignment_bracket(mu_t: f64) -> (f64, f64) {
    (0.0, 3.0 * (1.0 + mu_t))
}

/// Grid wide enough for every alignment width in [`alignment_bracket`].
pub fn alignment_search_grid(s: &TemporalScenario, n: usize) -> Result<Grid1D> {
    let sp = s.pump.sigma_omega;
    let (_, hi) = alignment_bracket(s.mu().mu_t);
    let widest = sp.max(s.sigma_t()).max(hi * sp);
    make_grid(s.signal_center(), SPAN_WIDTHS * widest, n, Rule::GaussLegendre)
}

/// Golden-section maximization of `f` on `[lo, hi]` down to a bracket of
/// width `tol`. Returns the arg max and the maximum, including the bracket
/// ends as candidates.
///
/// A probe falling below both end values means `f` is not unimodal there,
/// which is reported as [`Error::Numeric`].
pub fn golden_section_max(mut f: impl FnMut(f64) -> Result<f64>, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi && tol > 0.0) {
        return Err(Error::domain(format!("bad golden-section bracket [{lo}, {hi}] with tol {tol}")));
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    let floor = f_lo.min(f_hi) - 1e-12;
    let check = |x: f64, v: f64| {
        if v < floor {
            Err(Error::Numeric(format!("objective is not unimodal: f({x}) = {v} is below both bracket ends")))
        } else {
            Ok(v)
        }
    };

    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = check(c, f(c)?)?;
    let mut fd = check(d, f(d)?)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = check(c, f(c)?)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = check(d, f(d)?)?;
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for end in [(lo, f_lo), (hi, f_hi)] {
        if end.1 > best.1 {
            best = end;
        }
    }
    Ok(best)
}

/// Alignment width (in units of the pump width) maximizing the numeric mode
/// match, and that match. The scenario's own alignment field only supplies
/// the center frequency; the filter center is used when there is none.
pub fn optimize_alignment(s: &TemporalScenario, grid: &Grid1D) -> Result<(f64, f64)> {
    let sp = s.pump.sigma_omega;
    let center = s.alignment.map_or(s.filter.center_omega, |a| a.center_omega);
    let cpp = build_cpp_temporal_numeric(s, grid)?;
    let (lo, hi) = alignment_bracket(s.mu().mu_t);
    golden_section_max(
        |mu_a| {
            let trial = s.with_alignment(FieldSpec::new(center, mu_a * sp, 0.0)?)?;
            let dfg = build_dfg_temporal(&trial, grid)?;
            mode_match(&cpp, &dfg)
        },
        lo,
        hi,
        ALIGNMENT_TOL,
    )
}

/// Numeric spatial purity next to the closed forms that apply to the filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialPurityReport {
    pub numeric: f64,
    /// Gaussian-filter formula; for a pinhole, evaluated at the equivalent
    /// Gaussian width.
    pub gaussian_formula: f64,
    /// Tight-pinhole approximation, only for pinhole filters.
    pub pinhole_formula: Option<f64>,
}

pub fn spatial_purity_report(s: &SpatialScenario, grid: &Grid2D) -> Result<SpatialPurityReport> {
    let kernel = signal_spatial_kernel(s, grid)?;
    let numeric = purity(&kernel)?;
    let kp = s.pump.kappa;
    let (gaussian_formula, pinhole_formula) = match s.filter.kind {
        FilterKind::GaussianSpatial { kappa_t } => (p_sp_gaussian(kappa_t, kp)?, None),
        FilterKind::Pinhole { radius_rho, focal_f, lambda_t } => {
            let kt = pinhole_to_kappa_t(radius_rho, focal_f, lambda_t)?;
            let dp = kappa_p_to_dp(kp)?;
            (p_sp_gaussian(kt, kp)?, Some(p_sp_pinhole(radius_rho, dp, lambda_t, focal_f)?))
        }
        FilterKind::GaussianSpectral { .. } => unreachable!("validated as spatial"),
    };
    Ok(SpatialPurityReport { numeric, gaussian_formula, pinhole_formula })
}
