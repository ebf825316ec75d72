//! Frequency search: multi-start Nelder–Mead over `(u_1, v_1, …, u_n, v_n)`,
//! and the scalar root solve that locates the one-frequency minimum of the
//! sign function on the imaginary axis.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gram::LinearFit;
use crate::objective::{fit, FrequencySet, DEFAULT_CLUSTER_TOL};
use crate::signal::Signal;

/// Bracket for the imaginary-axis minimum.
pub const V0_BRACKET: (f64, f64) = (0.1, 0.9);

/// `g(v) = πv·sin(πv) + cos(πv) − 1`; its root in (0.1, 0.9) is where
/// `Φ(iv)` is stationary.
pub fn v0_equation(v: f64) -> f64 {
    let (s, c) = (PI * v).sin_cos();
    PI * v * s + c - 1.0
}

fn v0_equation_derivative(v: f64) -> f64 {
    PI * PI * v * (PI * v).cos()
}

/// Safeguarded Newton iteration on a sign-changing bracket: Newton steps
/// that leave the current bracket fall back to bisection.
pub fn find_root_bracketed<F, D>(f: F, df: D, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Internal(format!(
            "no sign change on [{lo}, {hi}]: f = {fa}, {fb}"
        )));
    }
    let a_positive = fa > 0.0;
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let fx = f(x);
        if fx.abs() < tol {
            return Ok(x);
        }
        if (fx > 0.0) == a_positive {
            a = x;
        } else {
            b = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        let inside = d != 0.0 && newton > a.min(b) && newton < a.max(b);
        x = if inside { newton } else { 0.5 * (a + b) };
        if (b - a).abs() <= 4.0 * f64::EPSILON * x.abs() {
            return Ok(x);
        }
    }
    Ok(x)
}

/// Root of `πv·sin(πv) + cos(πv) = 1` in (0.1, 0.9).
pub fn solve_v0() -> Result<f64> {
    let v = find_root_bracketed(
        v0_equation,
        v0_equation_derivative,
        V0_BRACKET.0,
        V0_BRACKET.1,
        1e-15,
    )?;
    if v0_equation(v).abs() >= 1e-13 {
        return Err(Error::Internal(format!(
            "root solve stalled at v = {v}, residual {:e}",
            v0_equation(v)
        )));
    }
    Ok(v)
}

/// Settings for [`minimize_phi`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeConfig {
    /// Number of frequencies.
    pub n: usize,
    pub starts: usize,
    pub seed: u64,
    /// Start box for the damping `u` of each frequency.
    pub u_range: (f64, f64),
    /// Start box for the oscillation `v` of each frequency.
    pub v_range: (f64, f64),
    /// A start has converged once the spread of `Φ` over its simplex is below this.
    pub simplex_tol: f64,
    pub max_iters: usize,
    pub cluster_tol: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            n: 1,
            starts: 32,
            seed: 0,
            u_range: (-2.0, 2.0),
            v_range: (-3.0, 3.0),
            simplex_tol: 1e-10,
            max_iters: 2000,
            cluster_tol: DEFAULT_CLUSTER_TOL,
        }
    }
}

impl OptimizeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n == 0 || self.starts == 0 || self.max_iters == 0 {
            return bad(format!(
                "n, starts and max_iters must be positive (n={}, starts={}, max_iters={})",
                self.n, self.starts, self.max_iters
            ));
        }
        for (name, (lo, hi)) in [("u", self.u_range), ("v", self.v_range)] {
            if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
                return bad(format!("{name} range [{lo}, {hi}] is not ordered"));
            }
        }
        if [self.simplex_tol, self.cluster_tol].iter().any(|t| t.is_nan() || *t <= 0.0) {
            return bad("tolerances must be positive".into());
        }
        Ok(())
    }
}

/// Best frequencies found and the fit they produce.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub best_freqs: FrequencySet,
    pub best_phi: f64,
    pub fit: LinearFit,
    pub starts_converged: usize,
    pub evaluations: usize,
}

/// Outcome of a single simplex search.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead with standard coefficients (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). The initial simplex offsets each coordinate
/// of `x0` by the matching entry of `steps`.
pub fn nelder_mead<F>(f: F, x0: &[f64], steps: &[f64], tol: f64, max_iters: usize) -> SimplexOutcome
where
    F: Fn(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        f(x)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += steps[i];
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();

    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iters {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if values[dim] - values[0] <= tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|p| p[k]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = along(-1.0);
        let fr = eval(&reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = eval(&expanded);
            if fe < fr {
                simplex[dim] = expanded;
                values[dim] = fe;
            } else {
                simplex[dim] = reflected;
                values[dim] = fr;
            }
            continue;
        }
        if fr < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[dim] {
            let p = along(-0.5);
            let v = eval(&p);
            (p, v)
        } else {
            let p = along(0.5);
            let v = eval(&p);
            (p, v)
        };
        if fc < fr.min(values[dim]) {
            simplex[dim] = contracted;
            values[dim] = fc;
            continue;
        }
        for i in 1..=dim {
            let p: Vec<f64> = simplex[0]
                .iter()
                .zip(&simplex[i])
                .map(|(b, x)| b + 0.5 * (x - b))
                .collect();
            values[i] = eval(&p);
            simplex[i] = p;
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
        .unwrap_or(0);
    SimplexOutcome {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        evaluations,
        converged,
    }
}

/// Draws every start up front from one seeded stream, runs the searches in
/// parallel and keeps the lowest value, ties going to the lowest start index.
/// Returns the winning outcome and the per-start outcomes in start order.
pub fn multistart<F>(
    objective: F,
    boxes: &[(f64, f64)],
    starts: usize,
    seed: u64,
    tol: f64,
    max_iters: usize,
) -> (SimplexOutcome, Vec<SimplexOutcome>)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origins: Vec<Vec<f64>> = (0..starts)
        .map(|_| {
            boxes
                .iter()
                .map(|&(lo, hi)| if hi > lo { rng.random_range(lo..hi) } else { lo })
                .collect()
        })
        .collect();
    let steps: Vec<f64> = boxes
        .iter()
        .map(|&(lo, hi)| if hi > lo { 0.1 * (hi - lo) } else { 0.1 })
        .collect();

    let outcomes: Vec<SimplexOutcome> = origins
        .par_iter()
        .map(|x0| nelder_mead(&objective, x0, &steps, tol, max_iters))
        .collect();
    let best = outcomes
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(_, o)| o.clone())
        .expect("at least one start");
    (best, outcomes)
}

/// `Φ` at interleaved coordinates; evaluation failures (overflowing
/// exponentials, rejected pivots) score worse than any attainable value.
pub fn phi_or_penalty(coords: &[f64], signal: &Signal, cluster_tol: f64) -> f64 {
    let penalty = 2.0 * signal.norm_sq() + 1.0;
    FrequencySet::from_coordinates(coords, cluster_tol)
        .and_then(|freqs| fit(&freqs, signal))
        .map(|fit| fit.f_min)
        .ok()
        .filter(|v| v.is_finite())
        .unwrap_or(penalty)
}

/// Multi-start minimization of `Φ` over `n` complex frequencies.
pub fn minimize_phi(signal: &Signal, config: &OptimizeConfig) -> Result<OptimizeResult> {
    config.validate()?;
    let boxes: Vec<(f64, f64)> = (0..config.n)
        .flat_map(|_| [config.u_range, config.v_range])
        .collect();
    let (best, outcomes) = multistart(
        |x| phi_or_penalty(x, signal, config.cluster_tol),
        &boxes,
        config.starts,
        config.seed,
        config.simplex_tol,
        config.max_iters,
    );
    let best_freqs = FrequencySet::from_coordinates(&best.x, config.cluster_tol)?;
    let fit = fit(&best_freqs, signal)?;
    Ok(OptimizeResult {
        best_phi: fit.f_min,
        best_freqs,
        fit,
        starts_converged: outcomes.iter().filter(|o| o.converged).count(),
        evaluations: outcomes.iter().map(|o| o.evaluations).sum(),
    })
}

/// Frequencies in `result` nearest to `target`.
pub fn closest_frequency(result: &OptimizeResult, target: Complex64) -> Option<Complex64> {
    result
        .best_freqs
        .lambdas()
        .iter()
        .copied()
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::phi;
    use crate::signal::SampledSignal;

    #[test]
    fn v0_root() {
        let v0 = solve_v0().unwrap();
        assert!((v0 - 0.742019).abs() < 1e-6);
        assert!(v0_equation(v0).abs() < 1e-13);
        assert!(v0 > 0.1 && v0 < 0.9);
    }

    #[test]
    fn v0_identity() {
        let v0 = solve_v0().unwrap();
        let left = 1.0 - (1.0 - (PI * v0).cos()).powi(2) / (PI * PI * v0 * v0);
        let right = (PI * v0).cos().powi(2);
        assert!((left - right).abs() < 1e-12);
    }

    #[test]
    fn bracket_probe() {
        assert!((v0_equation(0.5) - (PI / 2.0 - 1.0)).abs() < 1e-15);
        assert!(v0_equation(0.5) > 0.0);
        assert!(v0_equation(V0_BRACKET.0) > 0.0 && v0_equation(V0_BRACKET.1) < 0.0);
    }

    #[test]
    fn bracket_failure_is_reported() {
        assert!(matches!(
            find_root_bracketed(|x| x * x + 1.0, |x| 2.0 * x, -1.0, 1.0, 1e-12),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn nelder_mead_on_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let out = nelder_mead(rosen, &[-1.2, 1.0], &[0.1, 0.1], 1e-14, 5000);
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-4 && (out.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn config_validation() {
        assert!(OptimizeConfig::default().validate().is_ok());
        let bad = OptimizeConfig {
            u_range: (1.0, -1.0),
            ..OptimizeConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = OptimizeConfig {
            starts: 0,
            ..OptimizeConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn sign_one_frequency() {
        let cfg = OptimizeConfig {
            seed: 7,
            ..OptimizeConfig::default()
        };
        let res = minimize_phi(&Signal::Sign, &cfg).unwrap();
        assert!(res.best_phi <= 0.4749383 + 1e-4);
        let lambda = res.best_freqs.lambdas()[0];
        let d = (lambda - Complex64::new(0.0, 0.742019))
            .norm()
            .min((lambda - Complex64::new(0.0, -0.742019)).norm());
        assert!(d < 1e-3, "{lambda}");
        assert_eq!(res.best_phi, phi(&res.best_freqs, &Signal::Sign).unwrap());
    }

    #[test]
    fn constant_signal_is_reproduced() {
        let s = Signal::Sampled(SampledSignal::from_fn(401, |_| Complex64::new(1.0, 0.0)).unwrap());
        let res = minimize_phi(&s, &OptimizeConfig::default()).unwrap();
        assert!(res.best_phi <= 1e-8, "{}", res.best_phi);
        assert!(res.best_freqs.lambdas()[0].norm() < 1e-3);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let cfg = OptimizeConfig {
            n: 2,
            starts: 8,
            seed: 3,
            ..OptimizeConfig::default()
        };
        let a = minimize_phi(&Signal::Sign, &cfg).unwrap();
        let b = minimize_phi(&Signal::Sign, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
