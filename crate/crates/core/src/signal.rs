//! Target functions on [-π, π]: the sign function with exact moments, and
//! uniformly sampled data integrated with composite Simpson.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::inner::{integral_half, ExpoPolyTerm};

const GRID_TOLERANCE: f64 = 1e-12;

/// The function being approximated.
#[derive(Debug, Clone, PartialEq)]
pub enum Signal {
    /// `sign(x)`, with `sign(0) = 1`.
    Sign,
    Sampled(SampledSignal),
}

/// Pointwise values on a uniform odd-sized grid spanning exactly [-π, π].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    grid: Vec<f64>,
    values: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::MalformedSignal(format!(
                "{} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        let n = grid.len();
        if n < 5 || n.is_multiple_of(2) {
            return Err(Error::MalformedSignal(format!(
                "grid needs an odd number of points >= 5, got {n}"
            )));
        }
        if (grid[0] + PI).abs() > GRID_TOLERANCE || (grid[n - 1] - PI).abs() > GRID_TOLERANCE {
            return Err(Error::MalformedSignal(format!(
                "grid must run from -pi to pi, got [{}, {}]",
                grid[0],
                grid[n - 1]
            )));
        }
        let step = 2.0 * PI / (n - 1) as f64;
        for (k, pair) in grid.windows(2).enumerate() {
            let h = pair[1] - pair[0];
            if (h - step).abs() > GRID_TOLERANCE {
                return Err(Error::MalformedSignal(format!(
                    "grid spacing {h} between points {k} and {} differs from uniform step {step}",
                    k + 1
                )));
            }
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::MalformedSignal(format!("value at point {k} is not finite")));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` on `points` uniformly spaced nodes.
    pub fn from_fn<F: Fn(f64) -> Complex64>(points: usize, f: F) -> Result<Self> {
        let grid = uniform_grid(points);
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn step(&self) -> f64 {
        2.0 * PI / (self.grid.len() - 1) as f64
    }

    /// `(1/2π) ∫ g(x) dx` over the grid by composite Simpson.
    fn simpson<G: Fn(usize, f64) -> Complex64>(&self, g: G) -> Complex64 {
        let n = self.grid.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &x) in self.grid.iter().enumerate() {
            let w = if k == 0 || k == n - 1 {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += g(k, x) * w;
        }
        acc * (self.step() / 3.0 / (2.0 * PI))
    }
}

/// `points` nodes from -π to π with exact endpoints. For odd `points` the
/// middle node is exactly zero.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![-PI; points];
    }
    let last = points - 1;
    (0..points)
        .map(|k| match k {
            0 => -PI,
            k if k == last => PI,
            // symmetric about zero, with the midpoint exactly 0
            k => PI * (2 * k as i64 - last as i64) as f64 / last as f64,
        })
        .collect()
}

impl Signal {
    /// `⟨x^k e^{λx} | f⟩`.
    pub fn moment(&self, term: &ExpoPolyTerm) -> Result<Complex64> {
        match self {
            Signal::Sign => {
                let mu = term.lambda.conj();
                let positive = integral_half(term.degree, mu)?;
                let negative = integral_half(term.degree, -mu)?;
                Ok(if term.degree.is_multiple_of(2) {
                    positive - negative
                } else {
                    positive + negative
                })
            }
            Signal::Sampled(s) => Ok(s.simpson(|k, x| term.eval(x).conj() * s.values[k])),
        }
    }

    /// `⟨f | x^k e^{λx}⟩`, the conjugate-order moment.
    pub fn moment_conjugate_order(&self, term: &ExpoPolyTerm) -> Result<Complex64> {
        match self {
            Signal::Sign => Ok(self.moment(term)?.conj()),
            Signal::Sampled(s) => Ok(s.simpson(|k, x| s.values[k].conj() * term.eval(x))),
        }
    }

    /// `‖f‖²` with the 1/(2π) normalization.
    pub fn norm_sq(&self) -> f64 {
        match self {
            Signal::Sign => 1.0,
            Signal::Sampled(s) => s.simpson(|k, _| Complex64::from(s.values[k].norm_sqr())).re,
        }
    }

    pub fn value_at(&self, x: f64) -> Option<Complex64> {
        match self {
            Signal::Sign => Some(Complex64::from(if x >= 0.0 { 1.0 } else { -1.0 })),
            Signal::Sampled(s) => s
                .grid
                .iter()
                .position(|&g| (g - x).abs() <= GRID_TOLERANCE)
                .map(|k| s.values[k]),
        }
    }
}
