//! Root mean square approximation of functions on `[-π, π]` by finite sums of
//! complex exponentials `Σ a_j e^{λ_j x}`.
//!
//! The problem separates into two parts:
//!
//! * for fixed frequencies the best coefficients solve a Hermitian linear
//!   system built from exact inner products ([`gram`], [`inner`]);
//! * the frequencies themselves minimize the resulting squared deflection
//!   `Φ(λ_1..λ_n)` ([`objective`]), searched with multi-start Nelder–Mead
//!   ([`optimize`]).
//!
//! Coincident frequencies are replaced by expo-polynomials `x^k e^{λx}` so the
//! basis stays linearly independent.
//!
//! ```
//! use expsum::{objective, FrequencySet, Signal};
//! use num_complex::Complex64;
//!
//! let freqs = FrequencySet::with_default_tol(vec![Complex64::new(0.0, 1.0)]).unwrap();
//! let phi = objective::phi(&freqs, &Signal::Sign).unwrap();
//! assert!((phi - (1.0 - 4.0 / std::f64::consts::PI.powi(2))).abs() < 1e-12);
//! ```

pub mod cli;
pub mod conjecture;
pub mod error;
pub mod gram;
pub mod inner;
pub mod objective;
pub mod optimize;
pub mod signal;

pub use error::{Error, Result};
pub use gram::{Basis, GramMatrix, LinearFit, MomentVector};
pub use inner::ExpoPolyTerm;
pub use objective::FrequencySet;
pub use optimize::{OptimizeConfig, OptimizeResult};
pub use signal::{SampledSignal, Signal};
