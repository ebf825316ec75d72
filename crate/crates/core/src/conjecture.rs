//! Numerical exploration of the two-frequency sign objective near the
//! double cluster at the origin, whose value is 1/4.
//!
//! The harness never fails on what it finds: a non-cluster pair with
//! `Φ < 1/4` is reported as a counterexample to the claim that 1/4 is the
//! infimum over distinct pairs.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::objective::{phi, FrequencySet, DEFAULT_CLUSTER_TOL};
use crate::signal::Signal;

/// Value of the double cluster at the origin.
pub const CLUSTER_LIMIT: f64 = 0.25;

/// Shrinking pairs `(iε, −iε)` evaluated by the harness.
pub const SHRINKING_EPSILONS: [f64; 3] = [0.5, 0.1, 0.02];

/// Required distance to [`CLUSTER_LIMIT`] at `ε = 0.1` and `ε = 0.02`.
pub const SHRINKING_TOLERANCES: [(f64, f64); 2] = [(0.1, 2e-2), (0.02, 1e-3)];

/// Grid lines shared by both frequencies of a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGrid {
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    pub u_steps: usize,
    pub v_steps: usize,
}

impl Default for PairGrid {
    fn default() -> Self {
        Self {
            u_range: (-1.0, 1.0),
            v_range: (-2.0, 2.0),
            u_steps: 21,
            v_steps: 21,
        }
    }
}

pub(crate) fn linspace((lo, hi): (f64, f64), steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![lo],
        _ => (0..steps)
            .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
            .collect(),
    }
}

impl PairGrid {
    pub fn nodes(&self) -> Vec<Complex64> {
        let vs = linspace(self.v_range, self.v_steps);
        linspace(self.u_range, self.u_steps)
            .into_iter()
            .flat_map(|u| vs.iter().map(move |&v| Complex64::new(u, v)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureSummary {
    pub pairs_evaluated: usize,
    pub grid_min_phi: f64,
    pub grid_min_at: (Complex64, Complex64),
    /// Non-cluster pairs with `Φ < 1/4`.
    pub pairs_below_limit: usize,
    /// `(ε, Φ(iε, −iε))` for each of [`SHRINKING_EPSILONS`].
    pub shrinking: Vec<(f64, f64)>,
    pub shrinking_converges: bool,
}

impl ConjectureSummary {
    /// A grid value below 1/4 contradicts 1/4 being the infimum.
    pub fn counterexample_found(&self) -> bool {
        self.pairs_below_limit > 0
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        out.push_str("shrinking pairs (i*eps, -i*eps):\n");
        for (eps, value) in &self.shrinking {
            out.push_str(&format!(
                "  eps = {eps:<5} phi = {value:.10}  |phi - 1/4| = {:.3e}\n",
                (value - CLUSTER_LIMIT).abs()
            ));
        }
        out.push_str(&format!(
            "  converging toward 1/4: {}\n",
            if self.shrinking_converges { "yes" } else { "NO" }
        ));
        let (a, b) = self.grid_min_at;
        out.push_str(&format!(
            "grid: {} distinct pairs, minimum phi = {:.10} at ({:+.3}{:+.3}i, {:+.3}{:+.3}i)\n",
            self.pairs_evaluated, self.grid_min_phi, a.re, a.im, b.re, b.im
        ));
        if self.counterexample_found() {
            out.push_str(&format!(
                "*** COUNTEREXAMPLE: {} non-cluster pairs have phi below 1/4; \
                 1/4 is not the infimum over distinct pairs ***\n",
                self.pairs_below_limit
            ));
        } else {
            out.push_str("no sampled pair below 1/4\n");
        }
        out
    }
}

/// Evaluates `Φ(λ_1, λ_2)` on every unordered pair of distinct grid nodes
/// (pairs closer than the cluster tolerance are skipped) and on the
/// shrinking pairs `(iε, −iε)`.
pub fn explore_conjecture(grid: &PairGrid) -> Result<ConjectureSummary> {
    let signal = Signal::Sign;
    let nodes = grid.nodes();
    let pairs: Vec<(usize, usize)> = (0..nodes.len())
        .flat_map(|i| ((i + 1)..nodes.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| (nodes[i] - nodes[j]).norm() >= DEFAULT_CLUSTER_TOL)
        .collect();

    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            phi(
                &FrequencySet::with_default_tol(vec![nodes[i], nodes[j]])?,
                &signal,
            )
        })
        .collect::<Result<_>>()?;

    let (best_idx, grid_min_phi) = values
        .iter()
        .copied()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.total_cmp(b).then(i.cmp(j)))
        .unwrap_or((0, f64::NAN));
    let grid_min_at = pairs
        .get(best_idx)
        .map(|&(i, j)| (nodes[i], nodes[j]))
        .unwrap_or_default();

    let shrinking = SHRINKING_EPSILONS
        .iter()
        .map(|&eps| {
            let pair = vec![Complex64::new(0.0, eps), Complex64::new(0.0, -eps)];
            Ok((eps, phi(&FrequencySet::with_default_tol(pair)?, &signal)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let shrinking_converges = SHRINKING_TOLERANCES.iter().all(|&(eps, tol)| {
        shrinking
            .iter()
            .any(|&(e, value)| e == eps && (value - CLUSTER_LIMIT).abs() < tol)
    });

    Ok(ConjectureSummary {
        pairs_evaluated: pairs.len(),
        grid_min_phi,
        grid_min_at,
        pairs_below_limit: values.iter().filter(|&&v| v < CLUSTER_LIMIT).count(),
        shrinking,
        shrinking_converges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn shrinking_pairs_approach_cluster_value() {
        let s = explore_conjecture(&PairGrid {
            u_steps: 1,
            v_steps: 2,
            ..PairGrid::default()
        })
        .unwrap();
        assert!(s.shrinking_converges);
        assert_eq!(s.shrinking.len(), 3);
        let last = s.shrinking[2].1;
        assert!((last - 0.25).abs() < 1e-3);
    }

    #[test]
    fn fourier_pair_is_flagged() {
        // Grid {−i, i} only: the pair is the first Fourier sine mode.
        let s = explore_conjecture(&PairGrid {
            u_range: (0.0, 0.0),
            v_range: (-1.0, 1.0),
            u_steps: 1,
            v_steps: 2,
        })
        .unwrap();
        assert_eq!(s.pairs_evaluated, 1);
        assert!((s.grid_min_phi - (1.0 - 8.0 / (PI * PI))).abs() < 1e-12);
        assert!(s.counterexample_found());
        assert!(s.report().contains("COUNTEREXAMPLE"));
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace((-1.0, 1.0), 3), vec![-1.0, 0.0, 1.0]);
        assert_eq!(linspace((0.5, 0.5), 1), vec![0.5]);
        assert!(linspace((0.0, 1.0), 0).is_empty());
    }
}
