//! The nonlinear objective `Φ(λ_1..λ_n)`: minimal squared deflection as a
//! function of the frequencies alone, plus closed forms for the sign function.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gram::{fit_basis, Basis, LinearFit};
use crate::inner::ExpoPolyTerm;
use crate::signal::Signal;

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

/// Frequencies of an approximation, with the distance under which
/// neighbouring frequencies are merged into one cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySet {
    lambdas: Vec<Complex64>,
    cluster_tol: f64,
}

impl FrequencySet {
    pub fn new(lambdas: Vec<Complex64>, cluster_tol: f64) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidArgument("at least one frequency is required".into()));
        }
        if !(cluster_tol > 0.0 && cluster_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "cluster tolerance must be positive, got {cluster_tol}"
            )));
        }
        if let Some(l) = lambdas.iter().find(|l| !(l.re.is_finite() && l.im.is_finite())) {
            return Err(Error::InvalidArgument(format!("frequency {l} is not finite")));
        }
        Ok(Self {
            lambdas,
            cluster_tol,
        })
    }

    pub fn with_default_tol(lambdas: Vec<Complex64>) -> Result<Self> {
        Self::new(lambdas, DEFAULT_CLUSTER_TOL)
    }

    /// Frequencies given as interleaved `(u, v)` coordinates.
    pub fn from_coordinates(coords: &[f64], cluster_tol: f64) -> Result<Self> {
        if !coords.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument("odd coordinate count".into()));
        }
        let lambdas = coords
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        Self::new(lambdas, cluster_tol)
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
}

/// Groups frequencies closer than the tolerance (transitively) and emits
/// `x^k e^{λ̂x}`, `k = 0..m`, at each group's centroid `λ̂`.
///
/// Groups appear in order of their first member, so the basis always has
/// exactly `freqs.len()` terms.
pub fn build_basis(freqs: &FrequencySet) -> Result<Basis> {
    let n = freqs.len();
    let lambdas = freqs.lambdas();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if (lambdas[i] - lambdas[j]).norm() < freqs.cluster_tol {
                let (keep, drop) = (label[i].min(label[j]), label[i].max(label[j]));
                for l in label.iter_mut() {
                    if *l == drop {
                        *l = keep;
                    }
                }
            }
        }
    }

    let mut terms = Vec::with_capacity(n);
    for root in 0..n {
        let members: Vec<Complex64> = (0..n)
            .filter(|&i| label[i] == root)
            .map(|i| lambdas[i])
            .collect();
        if members.is_empty() {
            continue;
        }
        let centroid = members.iter().sum::<Complex64>() / members.len() as f64;
        for degree in 0..members.len() as u32 {
            terms.push(ExpoPolyTerm::new(degree, centroid)?);
        }
    }
    Basis::new(terms)
}

/// Best linear fit for the given frequencies.
pub fn fit(freqs: &FrequencySet, signal: &Signal) -> Result<LinearFit> {
    fit_basis(build_basis(freqs)?, signal)
}

/// `Φ(λ_1..λ_n)`, the minimal squared deflection.
pub fn phi(freqs: &FrequencySet, signal: &Signal) -> Result<f64> {
    Ok(fit(freqs, signal)?.f_min)
}

/// One-frequency objective for `sign(x)` at `λ = u + iv`, in closed form.
///
/// Uses `cosh a − cos b = 2 sinh²(a/2) + 2 sin²(b/2)` to avoid cancellation
/// near the origin, the `u → 0` limit for `|u| < 1e-8`, and a form with
/// `e^{2π|u|}` divided out for `|u| > 20`.
pub fn phi_sign_one_freq(u: f64, v: f64) -> f64 {
    if u.abs() < 1e-8 {
        if v == 0.0 {
            return 1.0;
        }
        let half = (PI * v / 2.0).sin();
        let one_minus_cos = 2.0 * half * half;
        return 1.0 - one_minus_cos * one_minus_cos / (PI * PI * v * v);
    }
    let r2 = u * u + v * v;
    if u.abs() > 20.0 {
        let a = PI * u.abs();
        let decay = (-a).exp();
        let bracket = 1.0 + decay * decay - 2.0 * (PI * v).cos() * decay;
        return 1.0 - u.abs() / (PI * r2) * bracket * bracket / (1.0 - decay.powi(4));
    }
    let sh = (PI * u / 2.0).sinh();
    let s = (PI * v / 2.0).sin();
    let gap = 2.0 * sh * sh + 2.0 * s * s;
    1.0 - (2.0 * u / r2) * gap * gap / (PI * (2.0 * PI * u).sinh())
}

/// Objective for `sign(x)` on the two-term cluster `{e^{ivx}, x e^{ivx}}`.
///
/// Below `|v| = 0.05` the closed form loses digits to the `v⁴` denominator,
/// so its Taylor expansion in `w = πv` is used instead; `v = 0` gives
/// exactly `1/4`.
pub fn phi_sign_cluster_axis(v: f64) -> f64 {
    if v.abs() < 0.05 {
        let w2 = (PI * v) * (PI * v);
        return 0.25
            + w2 * (1.0 / 8.0
                + w2 * (-5.0 / 192.0
                    + w2 * (1.0 / 384.0 + w2 * (-49.0 / 345_600.0 + w2 * (71.0 / 14_515_200.0)))));
    }
    let w = PI * v;
    let (s, c) = w.sin_cos();
    let w2 = w * w;
    1.0 - (1.0 - c) * (2.0 * c * w2 - 3.0 * c + 3.0 + 4.0 * w2 - 6.0 * s * w) / (w2 * w2)
}

/// What a surface sweep evaluates at each grid point `λ = u + iv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceMode {
    /// `Φ({λ})`
    OneFrequency,
    /// `Φ({λ, λ})`, the two-term cluster.
    DoubleCluster,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub u: f64,
    pub v: f64,
    pub phi: f64,
}

/// Evaluates `Φ` over the grid `us × vs`, row-major with `u` outermost.
/// Points are computed in parallel; the output order is fixed.
pub fn sweep_surface(
    us: &[f64],
    vs: &[f64],
    mode: SurfaceMode,
    signal: &Signal,
) -> Result<Vec<SurfacePoint>> {
    let width = vs.len();
    (0..us.len() * width)
        .into_par_iter()
        .map(|idx| {
            let (u, v) = (us[idx / width], vs[idx % width]);
            let lambda = Complex64::new(u, v);
            let lambdas = match mode {
                SurfaceMode::OneFrequency => vec![lambda],
                SurfaceMode::DoubleCluster => vec![lambda, lambda],
            };
            let phi = phi(&FrequencySet::with_default_tol(lambdas)?, signal)?;
            Ok(SurfacePoint { u, v, phi })
        })
        .collect()
}
