//! Discretized two-point correlation functions and the functionals defined on
//! them.
//!
//! A correlation function `G(x, x')` of a single-photon mode coincides with
//! its density matrix, so the same container serves both. Entries are raw
//! samples of `G` at grid nodes; every functional applies the quadrature
//! weights itself, so a kernel does not depend on the rule that sampled it.
//!
//! The functionals are written against [`CorrKernel`], which is implemented
//! both by the dense [`CorrMatrix`] and by [`LazyKernel`], which evaluates
//! entries on demand. The latter is what keeps large 2D purity sums from
//! materializing the full `(N^2) x (N^2)` matrix.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D};

/// Relative tolerance for Hermiticity and the sign of the diagonal.
pub const HERMITIAN_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;

/// The grid a kernel lives on.
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    Line(Grid1D),
    Plane(Grid2D),
}

impl Support {
    pub fn len(&self) -> usize {
        match self {
            Support::Line(g) => g.len(),
            Support::Plane(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flat_weights(&self) -> Vec<f64> {
        match self {
            Support::Line(g) => g.weights().to_vec(),
            Support::Plane(g) => g.flat_weights(),
        }
    }
}

impl From<Grid1D> for Support {
    fn from(g: Grid1D) -> Self {
        Support::Line(g)
    }
}

impl From<Grid2D> for Support {
    fn from(g: Grid2D) -> Self {
        Support::Plane(g)
    }
}

/// Read access to a sampled correlation function.
pub trait CorrKernel: Sync {
    fn support(&self) -> &Support;

    /// Quadrature weights of the flattened support.
    fn weights(&self) -> &[f64];

    fn entry(&self, i: usize, j: usize) -> Complex64;

    fn dim(&self) -> usize {
        self.weights().len()
    }
}

/// Dense Hermitian correlation matrix, row-major.
#[derive(Debug, Clone)]
pub struct CorrMatrix {
    support: Support,
    weights: Vec<f64>,
    values: Vec<Complex64>,
    label: String,
}

impl CorrMatrix {
    /// Wraps raw samples after checking the structural invariants.
    ///
    /// Deviations from Hermiticity below [`HERMITIAN_TOL`] of the largest
    /// entry are removed by symmetrizing; larger ones are rejected.
    pub fn new(support: impl Into<Support>, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        let support = support.into();
        let n = support.len();
        if values.len() != n * n {
            return Err(Error::Shape(format!("expected {} entries for a {n}-point grid, got {}", n * n, values.len())));
        }
        let weights = support.flat_weights();
        let mut m = CorrMatrix { support, weights, values, label: label.into() };
        m.enforce_hermitian()?;
        Ok(m)
    }

    /// Samples `f(i, j)` on every pair of flattened grid indices.
    pub fn from_fn<F>(support: impl Into<Support>, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Complex64 + Sync,
    {
        let support = support.into();
        let n = support.len();
        let rows = map_rows(n, |i| (0..n).map(|j| f(i, j)).collect::<Vec<_>>());
        let values = rows.into_iter().flatten().collect();
        Self::new(support, values, label)
    }

    fn enforce_hermitian(&mut self) -> Result<()> {
        let n = self.dim();
        let scale = self.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !scale.is_finite() {
            return Err(Error::Invariant("non-finite entry".into()));
        }
        let tol = HERMITIAN_TOL * scale;
        for i in 0..n {
            for j in i..n {
                let a = self.values[i * n + j];
                let b = self.values[j * n + i].conj();
                if (a - b).norm() > tol {
                    return Err(Error::Invariant(format!(
                        "not Hermitian at ({i}, {j}): deviation {:.3e} exceeds {tol:.3e}",
                        (a - b).norm()
                    )));
                }
                let avg = 0.5 * (a + b);
                self.values[i * n + j] = avg;
                self.values[j * n + i] = avg.conj();
            }
        }
        let max_diag = (0..n).map(|i| self.values[i * n + i].re).fold(0.0, f64::max);
        if let Some(i) = (0..n).find(|&i| self.values[i * n + i].re < -HERMITIAN_TOL * max_diag) {
            return Err(Error::Invariant(format!("negative intensity on the diagonal at {i}")));
        }
        if trace(self)? <= 0.0 {
            return Err(Error::Invariant("trace must be positive".into()));
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.dim() + j]
    }

    /// Diagonal (intensity) samples.
    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| self.values[i * n + i].re).collect()
    }

    pub fn scaled(mut self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain(format!("scale factor must be positive, got {c}")));
        }
        self.values.iter_mut().for_each(|z| *z *= c);
        Ok(self)
    }

    /// Rescales to unit trace.
    pub fn normalized(self) -> Result<Self> {
        let t = trace(&self)?;
        self.scaled(1.0 / t)
    }

    /// CSV export: a header row of grid coordinates, then one row per grid
    /// point holding `re,im` pairs for every column. 2D coordinates are
    /// written as `x;y`.
    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut out = String::new();
        let header: Vec<String> = match &self.support {
            Support::Line(g) => g.points().iter().map(|&x| fmt_sig6(x)).collect(),
            Support::Plane(g) => {
                g.flat_points().iter().map(|&(x, y)| format!("{};{}", fmt_sig6(x), fmt_sig6(y))).collect()
            }
        };
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..n {
            for j in 0..n {
                if j > 0 {
                    out.push(',');
                }
                let z = self.values[i * n + j];
                let _ = write!(out, "{},{}", fmt_sig6(z.re), fmt_sig6(z.im));
            }
            out.push('\n');
        }
        out
    }
}

impl CorrKernel for CorrMatrix {
    fn support(&self) -> &Support {
        &self.support
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.weights.len() + j]
    }
}

/// A kernel whose entries are computed on demand from a closure.
///
/// No invariants are checked; callers are responsible for handing in a
/// Hermitian function.
pub struct LazyKernel<F> {
    support: Support,
    weights: Vec<f64>,
    f: F,
}

impl<F> LazyKernel<F>
where
    F: Fn(usize, usize) -> Complex64 + Sync,
{
    pub fn new(support: impl Into<Support>, f: F) -> Self {
        let support = support.into();
        let weights = support.flat_weights();
        LazyKernel { support, weights, f }
    }

    /// Materializes the kernel, running the full invariant checks.
    pub fn to_matrix(&self, label: impl Into<String>) -> Result<CorrMatrix> {
        CorrMatrix::from_fn(self.support.clone(), label, &self.f)
    }
}

impl<F> CorrKernel for LazyKernel<F>
where
    F: Fn(usize, usize) -> Complex64 + Sync,
{
    fn support(&self) -> &Support {
        &self.support
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn entry(&self, i: usize, j: usize) -> Complex64 {
        (self.f)(i, j)
    }
}

/// Runs `f` for every row index and returns the results in row order. Rows
/// are spread over threads when the `parallel` feature is on; the result is
/// identical either way.
pub(crate) fn map_rows<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Weighted diagonal sum `sum_i w_i G(x_i, x_i)`.
pub fn trace<K: CorrKernel + ?Sized>(g: &K) -> Result<f64> {
    let w = g.weights();
    let (mut re, mut im) = (0.0, 0.0);
    let mut abs = 0.0;
    for (i, &wi) in w.iter().enumerate() {
        let z = g.entry(i, i);
        re += wi * z.re;
        im += wi * z.im;
        abs += wi * z.norm();
    }
    if im.abs() > HERMITIAN_TOL * abs.max(f64::MIN_POSITIVE) {
        return Err(Error::Invariant(format!("diagonal has an imaginary part {im:.3e}")));
    }
    Ok(re)
}

/// `sum_ij w_i w_j |G_ij|^2 / trace(G)^2`.
pub fn purity<K: CorrKernel + ?Sized>(g: &K) -> Result<f64> {
    let t = trace(g)?;
    if t.is_nan() || t <= 0.0 {
        return Err(Error::domain("purity of a kernel with zero trace"));
    }
    let w = g.weights();
    let n = w.len();
    let rows = map_rows(n, |i| {
        let s: f64 = (0..n).map(|j| w[j] * g.entry(i, j).norm_sqr()).sum();
        w[i] * s
    });
    Ok(rows.iter().sum::<f64>() / (t * t))
}

/// Normalized overlap `|sum_ij w_i w_j G1_ij conj(G2_ij)| / (trace G1 trace G2)`.
pub fn mode_match<A, B>(g1: &A, g2: &B) -> Result<f64>
where
    A: CorrKernel + ?Sized,
    B: CorrKernel + ?Sized,
{
    if g1.support() != g2.support() {
        return Err(Error::Shape("mode matching needs both kernels on the same grid".into()));
    }
    let t1 = trace(g1)?;
    let t2 = trace(g2)?;
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(Error::domain("mode matching of a kernel with zero trace"));
    }
    let w = g1.weights();
    let n = w.len();
    let rows = map_rows(n, |i| {
        let s: Complex64 = (0..n).map(|j| g1.entry(i, j) * g2.entry(i, j).conj() * w[j]).sum();
        w[i] * s
    });
    let total: Complex64 = rows.iter().sum();
    Ok(total.norm() / (t1 * t2))
}

/// Smallest eigenvalue of the weighted kernel `W^1/2 G W^1/2`.
///
/// A complex Hermitian `A + iB` is handled through its real symmetric
/// embedding `[[A, -B], [B, A]]`, which has the same spectrum with every
/// eigenvalue doubled.
pub fn min_eigenvalue(g: &CorrMatrix) -> Result<f64> {
    let n = g.dim();
    let sw: Vec<f64> = g.weights().iter().map(|w| w.sqrt()).collect();
    let complex = g.values().iter().any(|z| z.im != 0.0);
    let m = if complex { 2 * n } else { n };
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = g.get(i, j) * (sw[i] * sw[j]);
            a[i * m + j] = z.re;
            if complex {
                a[i * m + (j + n)] = -z.im;
                a[(i + n) * m + j] = z.im;
                a[(i + n) * m + (j + n)] = z.re;
            }
        }
    }
    let eig = jacobi_eigenvalues(&mut a, m)?;
    Ok(eig.into_iter().fold(f64::INFINITY, f64::min))
}

/// Cyclic Jacobi rotations on a dense real symmetric matrix (destroyed).
pub fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Result<Vec<f64>> {
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let initial = off(a);
    let target = 1e-12 * initial;
    let mut sweeps = 0;
    while off(a) > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Numeric(format!("Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    Ok((0..n).map(|i| a[i * n + i]).collect())
}

/// Six significant digits, `%g` style: plain notation when the exponent is
/// in `[-5, 6)`, scientific otherwise, trailing zeros stripped.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // take the exponent after rounding so 999999.5 becomes 1e6
    let sci = format!("{:.5e}", x);
    let (mantissa, e) = sci.split_once('e').expect("scientific format");
    let e: i32 = e.parse().expect("exponent");
    if (-5..6).contains(&e) {
        let decimals = (5 - e).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        strip_zeros(&s)
    } else {
        format!("{}e{}", strip_zeros(mantissa), e)
    }
}

fn strip_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
