//! Optical mode of a single photon heralded from pulsed parametric
//! down-conversion.
//!
//! The crate builds the signal-photon density matrix (equivalently the field
//! correlation function of the mode) for Gaussian pump pulses and trigger
//! filters, evaluates its purity and its mode matching to classical waves by
//! numerical quadrature, and carries the closed-form expressions those
//! numerics are checked against.
//!
//! Layout:
//!
//! - [`units`]: field and filter parameters, FWHM to Gaussian-width conversions.
//! - [`grid`]: quadrature grids (Gauss-Legendre and trapezoid).
//! - [`corr`]: discretized correlation kernels and the trace, purity and
//!   mode-matching functionals.
//! - [`kernels`]: builders for the heralded-photon, difference-frequency and
//!   advanced-wave kernels.
//! - [`analytic`]: closed forms, including a self-contained Bessel `J1`.
//! - [`matcher`]: mode-matching evaluation and alignment-width optimization.
//! - [`experiment`]: the lab-parameter chain from filter settings to the
//!   overall mode-matching factor.
//! - [`cli`]: config parsing and the command implementations behind the binary.

pub mod analytic;
pub mod cli;
pub mod corr;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod kernels;
pub mod matcher;
pub mod units;

pub use corr::{CorrKernel, CorrMatrix, Support};
pub use error::{Error, Result};
pub use grid::{Grid1D, Grid2D, Rule};
pub use units::{FieldSpec, FilterKind, FilterSpec, MuRatios};
