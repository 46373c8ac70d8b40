//! Quadrature grids for the frequency and transverse-position axes.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Smallest number of nodes a grid may carry.
pub const MIN_POINTS: usize = 8;

/// Gaussian tails are cut at this many widths.
pub const SPAN_WIDTHS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Trapezoid,
    GaussLegendre,
}

impl std::str::FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trapezoid" => Ok(Rule::Trapezoid),
            "gauss_legendre" | "gauss-legendre" | "gl" => Ok(Rule::GaussLegendre),
            other => Err(Error::domain(format!("unknown quadrature rule `{other}`"))),
        }
    }
}

/// Nodes and weights covering `[center - half_span, center + half_span]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    points: Vec<f64>,
    weights: Vec<f64>,
    center: f64,
    half_span: f64,
    rule: Rule,
}

impl Grid1D {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_span(&self) -> f64 {
        self.half_span
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `sum_i w_i f(x_i)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Cartesian product grid, flattened row-major: index `ix * ny + iy`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, y: Grid1D) -> Self {
        Grid2D { x, y }
    }

    /// Square grid centered at the origin with the same rule on both axes.
    pub fn square(half_span: f64, n: usize, rule: Rule) -> Result<Self> {
        let axis = make_grid(0.0, half_span, n, rule)?;
        Ok(Grid2D { x: axis.clone(), y: axis })
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, index: usize) -> (f64, f64) {
        let ny = self.y.len();
        (self.x.points[index / ny], self.y.points[index % ny])
    }

    pub fn weight(&self, index: usize) -> f64 {
        let ny = self.y.len();
        self.x.weights[index / ny] * self.y.weights[index % ny]
    }

    pub fn flat_points(&self) -> Vec<(f64, f64)> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn flat_weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }
}

/// Builds a grid over `[center - half_span, center + half_span]`.
pub fn make_grid(center: f64, half_span: f64, n: usize, rule: Rule) -> Result<Grid1D> {
    if n < MIN_POINTS {
        return Err(Error::domain(format!("grid needs at least {MIN_POINTS} points, got {n}")));
    }
    if !(half_span.is_finite() && half_span > 0.0) {
        return Err(Error::domain(format!("half_span must be positive, got {half_span}")));
    }
    if !center.is_finite() {
        return Err(Error::domain("grid center must be finite"));
    }
    let (points, weights) = match rule {
        Rule::Trapezoid => {
            let h = 2.0 * half_span / (n - 1) as f64;
            let points = (0..n).map(|i| center - half_span + h * i as f64).collect();
            let mut weights = vec![h; n];
            weights[0] = 0.5 * h;
            weights[n - 1] = 0.5 * h;
            (points, weights)
        }
        Rule::GaussLegendre => {
            let (nodes, weights) = gauss_legendre(n);
            let points = nodes.iter().map(|t| center + half_span * t).collect();
            let weights = weights.iter().map(|w| half_span * w).collect();
            (points, weights)
        }
    };
    Ok(Grid1D { points, weights, center, half_span, rule })
}

/// Half span covering [`SPAN_WIDTHS`] of the widest of the given widths.
/// Zero entries are allowed (a delta-limit field); at least one must be positive.
pub fn auto_span(widths: &[f64]) -> Result<f64> {
    if widths.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::domain("widths must be finite and non-negative"));
    }
    let widest = widths.iter().copied().fold(0.0, f64::max);
    if widest <= 0.0 {
        return Err(Error::domain("auto_span needs at least one positive width"));
    }
    Ok(SPAN_WIDTHS * widest)
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
///
/// Newton iteration on the three-term Legendre recurrence from the usual
/// cosine initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrates_to_span() {
        for rule in [Rule::Trapezoid, Rule::GaussLegendre] {
            let g = make_grid(0.0, 1.0, 16, rule).unwrap();
            assert!((g.integrate(|_| 1.0) - 2.0).abs() < 1e-14, "{rule:?}");
        }
    }

    #[test]
    fn gaussian_integral() {
        let g = make_grid(0.0, 6.0, 64, Rule::GaussLegendre).unwrap();
        let v = g.integrate(|x| (-x * x).exp());
        assert!((v - PI.sqrt()).abs() < 1e-10, "{v}");
    }

    #[test]
    fn odd_integrand_vanishes() {
        for rule in [Rule::Trapezoid, Rule::GaussLegendre] {
            for n in [8, 9, 33, 96] {
                let g = make_grid(0.0, 3.0, n, rule).unwrap();
                assert!(g.integrate(|x| x).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn points_ordered_weights_positive() {
        for rule in [Rule::Trapezoid, Rule::GaussLegendre] {
            for n in [8, 17, 96, 201] {
                let g = make_grid(2.5, 0.7, n, rule).unwrap();
                assert!(g.points().windows(2).all(|w| w[0] < w[1]));
                assert!(g.weights().iter().all(|&w| w > 0.0));
                let total: f64 = g.weights().iter().sum();
                assert!((total - 1.4).abs() < 1e-12 * 1.4);
                assert!(g.points()[0] >= 2.5 - 0.7 - 1e-15);
            }
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        // degree 2n - 1 exactness: integral of x^14 over [-1, 1] with n = 8
        let g = make_grid(0.0, 1.0, 8, Rule::GaussLegendre).unwrap();
        let v = g.integrate(|x| x.powi(14));
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_grid(0.0, 1.0, 7, Rule::Trapezoid).is_err());
        assert!(make_grid(0.0, 0.0, 16, Rule::Trapezoid).is_err());
        assert!(make_grid(0.0, -1.0, 16, Rule::GaussLegendre).is_err());
        assert!(auto_span(&[]).is_err());
        assert!(auto_span(&[0.0]).is_err());
        assert!(auto_span(&[-1.0, 2.0]).is_err());
        assert!("simpson".parse::<Rule>().is_err());
        assert_eq!("gauss_legendre".parse::<Rule>().unwrap(), Rule::GaussLegendre);
    }

    #[test]
    fn auto_span_values() {
        assert_eq!(auto_span(&[1.0]).unwrap(), 6.0);
        assert_eq!(auto_span(&[1.0, 2.0]).unwrap(), 12.0);
        assert_eq!(auto_span(&[0.0, 2.0]).unwrap(), 12.0);
    }

    #[test]
    fn six_sigma_tail_is_negligible() {
        // Mass of exp(-x^2/2) outside |x| > 6 is erfc(6/sqrt 2) = 1.973e-9.
        let g = make_grid(0.0, 6.0, 96, Rule::GaussLegendre).unwrap();
        let inside = g.integrate(|x| (-0.5 * x * x).exp());
        let total = (2.0 * PI).sqrt();
        let deficit = (total - inside) / total;
        assert!(deficit > 0.0 && deficit < 2e-9, "{deficit}");
    }

    #[test]
    fn flattening_is_row_major() {
        let g = Grid2D::new(
            make_grid(0.0, 1.0, 8, Rule::Trapezoid).unwrap(),
            make_grid(0.0, 2.0, 9, Rule::Trapezoid).unwrap(),
        );
        assert_eq!(g.len(), 72);
        let (x, y) = g.point(9 + 3);
        assert_eq!(x, g.x.points()[1]);
        assert_eq!(y, g.y.points()[3]);
        let total: f64 = g.flat_weights().iter().sum();
        assert!((total - 8.0).abs() < 1e-12);
    }

    #[test]
    fn refinement_does_not_hurt() {
        let exact = PI.sqrt() / 1.5;
        let mut last = f64::INFINITY;
        for n in [8, 16, 32, 64, 128] {
            let g = make_grid(0.0, 6.0, n, Rule::GaussLegendre).unwrap();
            let err = (g.integrate(|x| (-(1.5 * x).powi(2)).exp()) - exact).abs();
            assert!(err <= last + 1e-15, "n={n} err={err} last={last}");
            last = err;
        }
    }
}
