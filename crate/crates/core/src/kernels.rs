//! Builders for the correlation kernels of the heralded (signal) photon and
//! of the classical difference-frequency wave that models it.
//!
//! Temporal kernels live on a signal-frequency grid; spatial kernels on a
//! transverse-position grid in the crystal plane. The crystal is taken as
//! large compared with the pump, so phase matching reduces to momentum
//! conservation and the frequency and transverse dimensions separate.
//! Every builder returns a trace-normalized kernel: overall scale factors
//! (nonlinearity, field amplitudes) cancel out of purity and mode matching.

use num_complex::Complex64;

use crate::analytic::jinc_unchecked;
use crate::corr::{trace, CorrMatrix, LazyKernel, Support};
use crate::error::{Error, Result};
use crate::grid::{auto_span, gauss_legendre, make_grid, Grid1D, Grid2D, Rule, SPAN_WIDTHS};
use crate::units::{wavenumber, FieldSpec, FilterKind, FilterSpec, MuRatios};

/// Largest edge-to-peak ratio of the kernel diagonal a grid may leave.
pub const TRUNCATION_LIMIT: f64 = 1e-9;

/// Default node count for temporal axes.
pub const DEFAULT_TEMPORAL_N: usize = 96;

/// Default node count per axis for spatial grids.
pub const DEFAULT_SPATIAL_N: usize = 48;

/// Spatial half span in units of `1 / kappa_p`.
pub const SPATIAL_SPAN_KAPPA: f64 = 8.0;

/// Gauss-Legendre nodes for the frequency integral inside each kernel entry.
const INNER_NODES: usize = 64;

/// Nodes of the fixed alignment-frequency grid used for incoherent alignment light.
const ALIGNMENT_NODES: usize = 256;

/// Pump, trigger filter and (optionally) alignment field of a temporal
/// calculation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalScenario {
    pub pump: FieldSpec,
    pub filter: FilterSpec,
    pub alignment: Option<FieldSpec>,
}

impl TemporalScenario {
    pub fn new(pump: FieldSpec, filter: FilterSpec, alignment: Option<FieldSpec>) -> Result<Self> {
        pump.validate()?;
        filter.validate()?;
        if pump.sigma_omega <= 0.0 {
            return Err(Error::domain("pump must have a positive spectral width"));
        }
        if !filter.is_spectral() {
            return Err(Error::domain("temporal scenario needs a spectral filter"));
        }
        if let Some(a) = alignment {
            a.validate()?;
        }
        let s = TemporalScenario { pump, filter, alignment };
        if s.signal_center() <= 0.0 {
            return Err(Error::domain("signal center frequency (pump minus filter center) must be positive"));
        }
        Ok(s)
    }

    /// Degenerate-type scenario in units of the pump width: pump at
    /// `2 omega0`, filter and alignment centered at `omega0`.
    pub fn from_ratios(sigma_p: f64, mu: MuRatios) -> Result<Self> {
        let omega0 = 1e3 * sigma_p;
        let pump = FieldSpec::new(2.0 * omega0, sigma_p, 0.0)?;
        let filter = FilterSpec::gaussian_spectral(omega0, mu.mu_t * sigma_p)?;
        let alignment = FieldSpec::new(omega0, mu.mu_a * sigma_p, 0.0)?;
        Self::new(pump, filter, Some(alignment))
    }

    pub fn sigma_t(&self) -> f64 {
        match self.filter.kind {
            FilterKind::GaussianSpectral { sigma_t } => sigma_t,
            _ => unreachable!("validated as spectral"),
        }
    }

    pub fn signal_center(&self) -> f64 {
        self.pump.center_omega - self.filter.center_omega
    }

    pub fn mu(&self) -> MuRatios {
        let sp = self.pump.sigma_omega;
        MuRatios { mu_t: self.sigma_t() / sp, mu_a: self.alignment.map_or(0.0, |a| a.sigma_omega / sp) }
    }

    /// Same scenario with a different alignment field.
    pub fn with_alignment(&self, alignment: FieldSpec) -> Result<Self> {
        Self::new(self.pump, self.filter, Some(alignment))
    }

    /// Gauss-Legendre grid around the signal center covering
    /// [`SPAN_WIDTHS`] of the widest of pump, filter and alignment.
    pub fn default_grid(&self, n: usize) -> Result<Grid1D> {
        let widths = [self.pump.sigma_omega, self.sigma_t(), self.alignment.map_or(0.0, |a| a.sigma_omega)];
        make_grid(self.signal_center(), auto_span(&widths)?, n, Rule::GaussLegendre)
    }
}

/// Pump and spatial trigger filter of a transverse calculation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialScenario {
    pub pump: FieldSpec,
    pub filter: FilterSpec,
}

impl SpatialScenario {
    pub fn new(pump: FieldSpec, filter: FilterSpec) -> Result<Self> {
        pump.validate()?;
        filter.validate()?;
        if pump.kappa <= 0.0 {
            return Err(Error::domain("pump must have a positive transverse width kappa"));
        }
        if filter.is_spectral() {
            return Err(Error::domain("spatial scenario needs a spatial filter"));
        }
        Ok(SpatialScenario { pump, filter })
    }

    /// Square trapezoid grid of half span `8 / kappa_p`.
    pub fn default_grid(&self, n: usize) -> Result<Grid2D> {
        Grid2D::square(SPATIAL_SPAN_KAPPA / self.pump.kappa, n, Rule::Trapezoid)
    }
}

/// Correlation function of the light entering the trigger port of the crystal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlignmentCorrelation {
    /// A coherent Gaussian (or, at zero width, monochromatic) alignment beam.
    Coherent(FieldSpec),
    /// Fully incoherent light shaped by a filter: a diagonal correlation
    /// whose diagonal is the filter transmission. This is the advanced wave
    /// launched backwards from the trigger detector.
    Incoherent(FilterSpec),
}

fn gaussian(d: f64, sigma: f64) -> f64 {
    (-(d * d) / (sigma * sigma)).exp()
}

/// Gauss-Legendre nodes on `[-1, 1]`, reused for every kernel entry.
struct InnerRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl InnerRule {
    fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        InnerRule { nodes, weights }
    }

    fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        half * self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(mid + half * t)).sum::<f64>()
    }
}

fn check_truncation(diag: &[f64], edges: &[usize]) -> Result<()> {
    let peak = diag.iter().copied().fold(0.0, f64::max);
    let edge = edges.iter().map(|&i| diag[i]).fold(0.0, f64::max);
    let ratio = if peak > 0.0 { edge / peak } else { 1.0 };
    if ratio > TRUNCATION_LIMIT {
        return Err(Error::Truncation { edge: ratio, limit: TRUNCATION_LIMIT });
    }
    Ok(())
}

fn finish_temporal(grid: &Grid1D, label: &str, f: impl Fn(usize, usize) -> Complex64 + Sync) -> Result<CorrMatrix> {
    let m = CorrMatrix::from_fn(grid.clone(), label, f)?;
    check_truncation(&m.diagonal(), &[0, grid.len() - 1])?;
    m.normalized()
}

/// Heralded-photon density matrix by direct quadrature of the trigger-filter
/// integral
///
/// `Phi(w, w') = int dw_t T(w_t) E_p*(w + w_t) E_p(w' + w_t)`.
///
/// For every entry the inner integral runs over the intersection of the
/// [`SPAN_WIDTHS`] supports of the three Gaussians, so narrow and wide
/// filters are resolved alike. A zero filter width is the monochromatic
/// trigger limit, where the integral collapses to a product.
pub fn build_cpp_temporal_numeric(s: &TemporalScenario, grid: &Grid1D) -> Result<CorrMatrix> {
    let sp = s.pump.sigma_omega;
    let st = s.sigma_t();
    let x: Vec<f64> = grid.points().iter().map(|w| w - s.signal_center()).collect();
    let inner = InnerRule::new(INNER_NODES);
    let (lt, lp) = (SPAN_WIDTHS * st, SPAN_WIDTHS * sp);
    let entry = |i: usize, j: usize| -> Complex64 {
        let (a, b) = (x[i], x[j]);
        let v = if st == 0.0 {
            gaussian(a, sp) * gaussian(b, sp)
        } else {
            let lo = (-lt).max(-a - lp).max(-b - lp);
            let hi = lt.min(-a + lp).min(-b + lp);
            inner.integrate(lo, hi, |u| gaussian(u, st) * gaussian(a + u, sp) * gaussian(b + u, sp))
        };
        Complex64::new(v, 0.0)
    };
    finish_temporal(grid, "cpp-temporal-numeric", entry)
}

/// Heralded-photon density matrix sampled from its closed form
///
/// `exp(-(x^2 + x'^2) / (sp^2 + 2 st^2) - st^2 (x - x')^2 / (sp^2 (sp^2 + 2 st^2)))`
///
/// with `x`, `x'` measured from the signal center.
pub fn build_cpp_temporal_analytic(s: &TemporalScenario, grid: &Grid1D) -> Result<CorrMatrix> {
    let sp2 = s.pump.sigma_omega.powi(2);
    let st2 = s.sigma_t().powi(2);
    let d = sp2 + 2.0 * st2;
    let x: Vec<f64> = grid.points().iter().map(|w| w - s.signal_center()).collect();
    finish_temporal(grid, "cpp-temporal-analytic", |i, j| {
        let (a, b) = (x[i], x[j]);
        Complex64::new((-(a * a + b * b) / d - st2 * (a - b).powi(2) / (sp2 * d)).exp(), 0.0)
    })
}

/// Correlation function of the difference-frequency wave generated by the
/// pump and the scenario's alignment beam.
pub fn build_dfg_temporal(s: &TemporalScenario, grid: &Grid1D) -> Result<CorrMatrix> {
    let a = s.alignment.ok_or_else(|| Error::domain("difference-frequency kernel needs an alignment field"))?;
    build_dfg_temporal_with(s, &AlignmentCorrelation::Coherent(a), grid)
}

/// Difference-frequency kernel for an arbitrary alignment correlation:
///
/// `G(w, w') = int dwA dwA' E_p*(w + wA) E_p(w' + wA') G_A*(wA, wA')`.
///
/// A coherent alignment beam gives a rank-one kernel `g*(w) g(w')` with
/// `g(w) = int dwA E_A*(wA) E_p(w + wA)`. Incoherent light, `G_A` diagonal,
/// is integrated on a fixed Gauss-Legendre grid of alignment frequencies.
pub fn build_dfg_temporal_with(
    s: &TemporalScenario,
    alignment: &AlignmentCorrelation,
    grid: &Grid1D,
) -> Result<CorrMatrix> {
    let sp = s.pump.sigma_omega;
    let lp = SPAN_WIDTHS * sp;
    let signal = s.signal_center();
    // pump detuning is x + offset + u, u measured from the alignment center
    let detuning = |center: f64| center + signal - s.pump.center_omega;
    let x: Vec<f64> = grid.points().iter().map(|w| w - signal).collect();
    match *alignment {
        AlignmentCorrelation::Coherent(field) => {
            field.validate()?;
            let offset = detuning(field.center_omega);
            let sa = field.sigma_omega;
            let inner = InnerRule::new(INNER_NODES);
            let la = SPAN_WIDTHS * sa;
            let g: Vec<f64> = x
                .iter()
                .map(|&a| {
                    let c = a + offset;
                    if sa == 0.0 {
                        gaussian(c, sp)
                    } else {
                        let lo = (-la).max(-c - lp);
                        let hi = la.min(-c + lp);
                        inner.integrate(lo, hi, |u| gaussian(u, sa) * gaussian(c + u, sp))
                    }
                })
                .collect();
            finish_temporal(grid, "dfg-temporal-coherent", |i, j| Complex64::new(g[i] * g[j], 0.0))
        }
        AlignmentCorrelation::Incoherent(filter) => {
            filter.validate()?;
            let st = match filter.kind {
                FilterKind::GaussianSpectral { sigma_t } => sigma_t,
                _ => return Err(Error::domain("incoherent alignment light needs a spectral profile")),
            };
            let offset = detuning(filter.center_omega);
            if st == 0.0 {
                let g: Vec<f64> = x.iter().map(|&a| gaussian(a + offset, sp)).collect();
                return finish_temporal(grid, "dfg-temporal-incoherent", |i, j| Complex64::new(g[i] * g[j], 0.0));
            }
            let ua = make_grid(0.0, SPAN_WIDTHS * st, ALIGNMENT_NODES, Rule::GaussLegendre)?;
            let tw: Vec<f64> = ua.points().iter().zip(ua.weights()).map(|(&u, &w)| w * gaussian(u, st)).collect();
            let u = ua.points();
            finish_temporal(grid, "dfg-temporal-incoherent", |i, j| {
                let (a, b) = (x[i] + offset, x[j] + offset);
                let v: f64 = u.iter().zip(&tw).map(|(&uk, &tk)| tk * gaussian(a + uk, sp) * gaussian(b + uk, sp)).sum();
                Complex64::new(v, 0.0)
            })
        }
    }
}

/// Transverse coherence of the advanced wave at separation `d` in the
/// crystal plane: `exp(-(kappa_t d / 2)^2)` for a Gaussian filter,
/// `2 J1(x) / x` with `x = k_t rho d / F` for a pinhole.
pub fn advanced_wave_coherence(filter: &FilterSpec, d: f64) -> Result<f64> {
    match filter.kind {
        FilterKind::GaussianSpatial { kappa_t } => Ok((-(0.5 * kappa_t * d).powi(2)).exp()),
        FilterKind::Pinhole { radius_rho, focal_f, lambda_t } => {
            Ok(jinc_unchecked(wavenumber(lambda_t) * radius_rho * d / focal_f))
        }
        FilterKind::GaussianSpectral { .. } => Err(Error::domain("advanced-wave coherence needs a spatial filter")),
    }
}

fn coherence_fn(filter: &FilterSpec) -> Result<impl Fn(f64) -> f64 + Sync + Copy> {
    filter.validate()?;
    let (gauss, scale) = match filter.kind {
        FilterKind::GaussianSpatial { kappa_t } => (true, 0.5 * kappa_t),
        FilterKind::Pinhole { radius_rho, focal_f, lambda_t } => (false, wavenumber(lambda_t) * radius_rho / focal_f),
        FilterKind::GaussianSpectral { .. } => return Err(Error::domain("spatial kernel needs a spatial filter")),
    };
    Ok(move |d: f64| if gauss { (-(scale * d).powi(2)).exp() } else { jinc_unchecked(scale * d) })
}

fn distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).hypot(p.1 - q.1)
}

/// Correlation function of the advanced wave in the crystal plane, obtained
/// from the filter transmission by the Van Cittert-Zernike theorem. It is
/// stationary, so the diagonal is identically one.
pub fn build_advanced_wave_spatial(filter: &FilterSpec, grid: &Grid2D) -> Result<CorrMatrix> {
    let coherence = coherence_fn(filter)?;
    let pts = grid.flat_points();
    CorrMatrix::from_fn(grid.clone(), "advanced-wave-spatial", |i, j| {
        Complex64::new(coherence(distance(pts[i], pts[j])), 0.0)
    })
}

/// The signal-mode kernel `E_p*(r) E_p(r') G_t*(r, r')` without
/// materializing it. Entries are trace-normalized.
pub fn signal_spatial_kernel(
    s: &SpatialScenario,
    grid: &Grid2D,
) -> Result<LazyKernel<impl Fn(usize, usize) -> Complex64 + Sync>> {
    let coherence = coherence_fn(&s.filter)?;
    let pts = grid.flat_points();
    let kp = s.pump.kappa;
    let pump: Vec<f64> = pts.iter().map(|&(x, y)| (-(0.5 * kp).powi(2) * (x * x + y * y)).exp()).collect();

    let diag: Vec<f64> = pump.iter().map(|e| e * e).collect();
    let edges: Vec<usize> = (0..pts.len()).filter(|&i| on_boundary(grid, i)).collect();
    check_truncation(&diag, &edges)?;

    let weights = grid.flat_weights();
    let tr: f64 = diag.iter().zip(&weights).map(|(d, w)| d * w).sum();
    let scale = 1.0 / tr;
    let kernel =
        move |i: usize, j: usize| Complex64::new(scale * pump[i] * pump[j] * coherence(distance(pts[i], pts[j])), 0.0);
    Ok(LazyKernel::new(Support::Plane(grid.clone()), kernel))
}

fn on_boundary(grid: &Grid2D, index: usize) -> bool {
    let ny = grid.y.len();
    let (ix, iy) = (index / ny, index % ny);
    ix == 0 || iy == 0 || ix == grid.x.len() - 1 || iy == ny - 1
}

/// Materialized signal-mode kernel, see [`signal_spatial_kernel`].
pub fn build_signal_spatial(s: &SpatialScenario, grid: &Grid2D) -> Result<CorrMatrix> {
    let m = signal_spatial_kernel(s, grid)?.to_matrix("signal-spatial")?;
    debug_assert!((trace(&m)? - 1.0).abs() < 1e-12);
    Ok(m)
}
