//! Closed-form L² inner products of expo-polynomials on [-π, π].
//!
//! Every integral carries the 1/(2π) normalization, so the constant function
//! `1` has unit norm. With `z = μπ` and `t = x/π` the integrals reduce to
//!
//! ```text
//! I_m(μ) = π^m · i_m(z),   i_m(z) = ½ ∫_{-1}^{1} t^m e^{zt} dt
//! J_m(μ) = π^m/2 · h_m(z), h_m(z) =   ∫_{0}^{1}  t^m e^{zt} dt
//! ```
//!
//! For `|z| < SERIES_THRESHOLD` the power series is summed directly. Above it
//! the boundary-term recurrence is used, run forward while `m ≤ |z|` and
//! backward from a high seed index otherwise, which keeps the error
//! amplification factor below one in both directions.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported power of `x` in a single integrand.
pub const MAX_DEGREE: u32 = 40;

/// Switchover on `|μ|·π` between the power series and the recurrence.
pub const SERIES_THRESHOLD: f64 = 0.5;

const SERIES_MAX_TERMS: usize = 400;

/// One basis function `x^degree · e^{lambda·x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpoPolyTerm {
    pub degree: u32,
    pub lambda: Complex64,
}

impl ExpoPolyTerm {
    pub fn new(degree: u32, lambda: Complex64) -> Result<Self> {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "frequency must be finite, got {lambda}"
            )));
        }
        if degree > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!(
                "degree {degree} exceeds cap {MAX_DEGREE}"
            )));
        }
        Ok(Self { degree, lambda })
    }

    /// Pure exponential `e^{lambda·x}`.
    pub fn exponential(lambda: Complex64) -> Result<Self> {
        Self::new(0, lambda)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        (self.lambda * x).exp() * x.powi(self.degree as i32)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then(self.lambda.re.total_cmp(&other.lambda.re))
            .then(self.lambda.im.total_cmp(&other.lambda.im))
    }
}

fn check_args(m: u32, mu: Complex64) -> Result<()> {
    if m > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "integrand degree {m} exceeds cap {MAX_DEGREE}"
        )));
    }
    if !(mu.re.is_finite() && mu.im.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "exponent must be finite, got {mu}"
        )));
    }
    Ok(())
}

/// `I_m(μ) = (1/2π) ∫_{-π}^{π} x^m e^{μx} dx`.
pub fn integral_full(m: u32, mu: Complex64) -> Result<Complex64> {
    check_args(m, mu)?;
    let z = mu * PI;
    let scaled = if z.norm() < SERIES_THRESHOLD {
        full_series(m, z)
    } else {
        full_recurrence(m, z)
    };
    Ok(scaled * PI.powi(m as i32))
}

/// `J_m(μ) = (1/2π) ∫_{0}^{π} x^m e^{μx} dx`.
pub fn integral_half(m: u32, mu: Complex64) -> Result<Complex64> {
    check_args(m, mu)?;
    let z = mu * PI;
    let scaled = if z.norm() < SERIES_THRESHOLD {
        half_series(m, z)
    } else {
        half_recurrence(m, z)
    };
    Ok(scaled * (0.5 * PI.powi(m as i32)))
}

/// Series branch of [`integral_full`], valid for any `μ` but only accurate
/// for small `|μ|`.
pub fn integral_full_series(m: u32, mu: Complex64) -> Result<Complex64> {
    check_args(m, mu)?;
    Ok(full_series(m, mu * PI) * PI.powi(m as i32))
}

/// Recurrence branch of [`integral_full`]; requires `μ ≠ 0`.
pub fn integral_full_recurrence(m: u32, mu: Complex64) -> Result<Complex64> {
    check_args(m, mu)?;
    if mu == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("recurrence needs a nonzero exponent".into()));
    }
    Ok(full_recurrence(m, mu * PI) * PI.powi(m as i32))
}

pub fn integral_half_series(m: u32, mu: Complex64) -> Result<Complex64> {
    check_args(m, mu)?;
    Ok(half_series(m, mu * PI) * (0.5 * PI.powi(m as i32)))
}

pub fn integral_half_recurrence(m: u32, mu: Complex64) -> Result<Complex64> {
    check_args(m, mu)?;
    if mu == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("recurrence needs a nonzero exponent".into()));
    }
    Ok(half_recurrence(m, mu * PI) * (0.5 * PI.powi(m as i32)))
}

/// `⟨a|b⟩ = I_{deg a + deg b}(conj(λ_a) + λ_b)`.
///
/// Evaluated in a canonical argument order and conjugated when swapped, so
/// `inner_product(a, b) == inner_product(b, a).conj()` holds bit for bit.
pub fn inner_product(a: &ExpoPolyTerm, b: &ExpoPolyTerm) -> Result<Complex64> {
    let (first, second, swapped) = match a.canonical_cmp(b) {
        Ordering::Greater => (b, a, true),
        _ => (a, b, false),
    };
    let value = integral_full(first.degree + second.degree, first.lambda.conj() + second.lambda)?;
    Ok(if swapped { value.conj() } else { value })
}

/// `Σ_{j: m+j even} z^j / ((m+j+1) j!)`.
fn full_series(m: u32, z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0); // z^j / j!
    let radius = z.norm();
    for j in 0..SERIES_MAX_TERMS {
        if j > 0 {
            power = power * z / j as f64;
        }
        if !(m as usize + j).is_multiple_of(2) {
            continue;
        }
        let term = power / (m as usize + j + 1) as f64;
        sum += term;
        if j as f64 > radius && term.norm() <= f64::EPSILON * sum.norm() {
            break;
        }
        if power.norm() == 0.0 {
            break;
        }
    }
    sum
}

/// `Σ_j z^j / ((m+j+1) j!)`.
fn half_series(m: u32, z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let radius = z.norm();
    for j in 0..SERIES_MAX_TERMS {
        if j > 0 {
            power = power * z / j as f64;
        }
        let term = power / (m as usize + j + 1) as f64;
        sum += term;
        if (j as f64 > radius && term.norm() <= f64::EPSILON * sum.norm()) || power.norm() == 0.0 {
            break;
        }
    }
    sum
}

/// Index at which a backward sweep can start from a zero seed: the product of
/// `|z|/k` over `k = m+1..=K` drops below 1e-24.
fn backward_seed_index(m: u32, radius: f64) -> u32 {
    let mut k = m;
    let mut damping = 1.0;
    while damping > 1e-24 {
        k += 1;
        damping *= radius / k as f64;
    }
    k
}

/// Boundary terms `B_k = (e^z − (−1)^k e^{−z}) / 2` of the full-interval recurrence.
fn full_boundary(k: u32, ez: Complex64, emz: Complex64) -> Complex64 {
    if k.is_multiple_of(2) {
        (ez - emz) * 0.5
    } else {
        (ez + emz) * 0.5
    }
}

/// `i_k = (B_k − k·i_{k−1}) / z`, seeded by `i_0 = sinh(z)/z`.
fn full_recurrence(m: u32, z: Complex64) -> Complex64 {
    let ez = z.exp();
    let emz = (-z).exp();
    let radius = z.norm();
    if m as f64 <= radius {
        let mut value = full_boundary(0, ez, emz) / z;
        for k in 1..=m {
            value = (full_boundary(k, ez, emz) - value * k as f64) / z;
        }
        value
    } else {
        // i_{k−1} = (B_k − z·i_k) / k
        let top = backward_seed_index(m, radius);
        let mut value = Complex64::new(0.0, 0.0);
        for k in ((m + 1)..=top).rev() {
            value = (full_boundary(k, ez, emz) - z * value) / k as f64;
        }
        value
    }
}

/// `h_k = (e^z − k·h_{k−1}) / z`, seeded by `h_0 = (e^z − 1)/z`.
fn half_recurrence(m: u32, z: Complex64) -> Complex64 {
    let ez = z.exp();
    let radius = z.norm();
    if m as f64 <= radius {
        let mut value = (ez - 1.0) / z;
        for k in 1..=m {
            value = (ez - value * k as f64) / z;
        }
        value
    } else {
        // h_{k−1} = (e^z − z·h_k) / k
        let top = backward_seed_index(m, radius);
        let mut value = Complex64::new(0.0, 0.0);
        for k in ((m + 1)..=top).rev() {
            value = (ez - z * value) / k as f64;
        }
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Composite Simpson on [lo, hi] with `panels` (even) subintervals.
    fn simpson<F: Fn(f64) -> Complex64>(f: F, lo: f64, hi: f64, panels: usize) -> Complex64 {
        let h = (hi - lo) / panels as f64;
        let mut acc = f(lo) + f(hi);
        for k in 1..panels {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += f(lo + k as f64 * h) * w;
        }
        acc * (h / 3.0)
    }

    fn full_oracle(m: u32, mu: Complex64) -> Complex64 {
        simpson(|x| (mu * x).exp() * x.powi(m as i32), -PI, PI, 100_000) / (2.0 * PI)
    }

    fn rel_diff(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn full_trivial_values() {
        assert_eq!(integral_full(0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(integral_full(1, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let v = integral_full(2, c(0.0, 0.0)).unwrap();
        assert!((v - c(PI * PI / 3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn full_real_exponent_matches_sinh() {
        let v = integral_full(0, c(2.0, 0.0)).unwrap();
        let expected = (2.0 * PI).sinh() / (2.0 * PI);
        assert!((v.re - expected).abs() < 1e-12 * expected);
        assert_eq!(v.im, 0.0);
        assert!((v.re - 42.6129).abs() < 1e-4);
        assert!((v - full_oracle(0, c(2.0, 0.0))).norm() < 1e-8);
    }

    #[test]
    fn full_orthogonal_mode() {
        let v = integral_full(0, c(0.0, -2.0)).unwrap();
        assert!(v.norm() < 1e-15);
        assert!(full_oracle(0, c(0.0, -2.0)).norm() < 1e-10);
    }

    #[test]
    fn half_values() {
        assert_eq!(integral_half(0, c(0.0, 0.0)).unwrap(), c(0.5, 0.0));
        assert!((integral_half(1, c(0.0, 0.0)).unwrap() - c(PI / 4.0, 0.0)).norm() < 1e-15);
        let v = integral_half(0, c(1.0, 0.0)).unwrap();
        let expected = (PI.exp() - 1.0) / (2.0 * PI);
        assert!((v.re - expected).abs() < 1e-13 * expected);
        let oracle = simpson(|x| Complex64::from(x.exp()), 0.0, PI, 100_000) / (2.0 * PI);
        assert!((v - oracle).norm() < 1e-9);
    }

    #[test]
    fn degree_cap() {
        assert!(matches!(integral_full(41, c(1.0, 0.0)), Err(Error::InvalidArgument(_))));
        assert!(matches!(integral_half(41, c(0.0, 0.0)), Err(Error::InvalidArgument(_))));
        assert!(integral_full(40, c(0.1, 0.0)).is_ok());
        assert!(matches!(
            integral_full(0, c(f64::NAN, 0.0)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(ExpoPolyTerm::new(41, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let one = ExpoPolyTerm::exponential(c(0.0, 0.0)).unwrap();
        assert_eq!(inner_product(&one, &one).unwrap(), c(1.0, 0.0));
        let plus = ExpoPolyTerm::exponential(c(0.0, 1.0)).unwrap();
        let minus = ExpoPolyTerm::exponential(c(0.0, -1.0)).unwrap();
        assert!(inner_product(&plus, &minus).unwrap().norm() < 1e-15);
        let e = ExpoPolyTerm::exponential(c(1.0, 0.0)).unwrap();
        let g = inner_product(&e, &e).unwrap();
        let expected = (2.0 * PI).sinh() / (2.0 * PI);
        assert!((g.re - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn high_degree_near_threshold_is_accurate() {
        // Forward recurrence would amplify rounding by m!/|z|^m here.
        for m in [10u32, 20, 40] {
            let mu = c(0.2, 0.0);
            let rec = integral_full_recurrence(m, mu).unwrap();
            let ser = integral_full_series(m, mu).unwrap();
            assert!(rel_diff(rec, ser) < 1e-13, "m={m}");
        }
    }

    proptest! {
        #[test]
        fn conjugate_symmetry_is_exact(
            ka in 0u32..4, kb in 0u32..4,
            ua in -3.0f64..3.0, va in -3.0f64..3.0,
            ub in -3.0f64..3.0, vb in -3.0f64..3.0,
        ) {
            let a = ExpoPolyTerm::new(ka, c(ua, va)).unwrap();
            let b = ExpoPolyTerm::new(kb, c(ub, vb)).unwrap();
            prop_assert_eq!(inner_product(&a, &b).unwrap(), inner_product(&b, &a).unwrap().conj());
        }

        #[test]
        fn self_inner_product_is_positive_real(k in 0u32..6, u in -3.0f64..3.0, v in -5.0f64..5.0) {
            let t = ExpoPolyTerm::new(k, c(u, v)).unwrap();
            let g = inner_product(&t, &t).unwrap();
            prop_assert!(g.im.abs() <= 1e-14);
            prop_assert!(g.re > 0.0);
        }

        #[test]
        fn branches_agree_across_switchover(
            m in 0u32..=6,
            r in 0.25f64..=1.0,
            angle in 0.0f64..std::f64::consts::TAU,
        ) {
            let mu = Complex64::from_polar(r / PI, angle);
            let full = rel_diff(
                integral_full_series(m, mu).unwrap(),
                integral_full_recurrence(m, mu).unwrap(),
            );
            prop_assert!(full < 1e-12, "full m={} |z|={} rel={:e}", m, r, full);
            let half = rel_diff(
                integral_half_series(m, mu).unwrap(),
                integral_half_recurrence(m, mu).unwrap(),
            );
            prop_assert!(half < 1e-12, "half m={} |z|={} rel={:e}", m, r, half);
        }

        #[test]
        fn splitting_identity(m in 0u32..=6, u in -3.0f64..3.0, v in -3.0f64..3.0) {
            let mu = c(u, v);
            let full = integral_full(m, mu).unwrap();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let split = integral_half(m, mu).unwrap() + integral_half(m, -mu).unwrap() * sign;
            let scale = full.norm().max(integral_half(m, mu).unwrap().norm());
            prop_assert!((full - split).norm() <= 1e-12 * scale);
        }
    }
}
