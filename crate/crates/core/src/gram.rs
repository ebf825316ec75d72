//! Gram matrix assembly and the exact linear least-squares solve.
//!
//! For a fixed basis `φ_1..φ_n` the best coefficients satisfy the normal
//! equations `Σ_j g_ij a_j = ⟨φ_i|f⟩`. They are solved with a Hermitian
//! Cholesky factorization `G = L L^H`; with `y = L^{-1} b` the minimal squared
//! deflection is `‖f‖² − ‖y‖²`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::inner::{inner_product, ExpoPolyTerm};
use crate::signal::Signal;

/// Pivots below this fraction of the largest diagonal entry are rejected.
pub const PIVOT_RELATIVE_FLOOR: f64 = 1e-13;

/// Rounding slack (relative to `max(1, ‖f‖²)`) inside which `f_min` is clamped.
pub const CLAMP_SLACK: f64 = 1e-10;

/// Ordered, validated list of expo-polynomial basis functions.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    terms: Vec<ExpoPolyTerm>,
}

impl Basis {
    /// Validates that terms are pairwise distinct and that, for every
    /// frequency, the degrees present form the run `0..multiplicity`.
    pub fn new(terms: Vec<ExpoPolyTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("basis must not be empty".into()));
        }
        for (i, a) in terms.iter().enumerate() {
            if terms[..i].iter().any(|b| b == a) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate basis term x^{} e^({})x",
                    a.degree, a.lambda
                )));
            }
        }
        for t in &terms {
            let mut degrees: Vec<u32> = terms
                .iter()
                .filter(|s| s.lambda == t.lambda)
                .map(|s| s.degree)
                .collect();
            degrees.sort_unstable();
            if degrees.iter().enumerate().any(|(k, &d)| d != k as u32) {
                return Err(Error::InvalidArgument(format!(
                    "degrees at frequency {} are not contiguous from 0: {:?}",
                    t.lambda, degrees
                )));
            }
        }
        Ok(Self { terms })
    }

    /// Basis of plain exponentials at distinct frequencies.
    pub fn exponentials(lambdas: &[Complex64]) -> Result<Self> {
        let terms = lambdas
            .iter()
            .map(|&l| ExpoPolyTerm::exponential(l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    pub fn terms(&self) -> &[ExpoPolyTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Dense Hermitian matrix of basis inner products, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    order: usize,
    entries: Vec<Complex64>,
}

impl GramMatrix {
    /// Builds a matrix from row-major entries; the caller is responsible for
    /// the matrix being Hermitian.
    pub fn from_entries(order: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != order * order || order == 0 {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for order {order}, got {}",
                order * order,
                entries.len()
            )));
        }
        Ok(Self { order, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.order + j]
    }

    pub fn max_hermitian_defect(&self) -> f64 {
        let n = self.order;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `G·a`.
    pub fn apply(&self, a: &[Complex64]) -> Vec<Complex64> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j) * a[j]).sum())
            .collect()
    }

    /// Lower-triangular Cholesky factor `L` (row-major) with `G = L L^H`.
    fn cholesky(&self) -> Result<Vec<Complex64>> {
        let n = self.order;
        let max_diag = (0..n).map(|i| self.get(i, i).re).fold(0.0f64, f64::max);
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for k in 0..n {
            let mut pivot = self.get(k, k).re;
            for j in 0..k {
                pivot -= l[k * n + j].norm_sqr();
            }
            if !pivot.is_finite() || pivot <= PIVOT_RELATIVE_FLOOR * max_diag {
                return Err(Error::IllConditionedBasis {
                    index: k,
                    pivot,
                    max_diag,
                });
            }
            let diag = pivot.sqrt();
            l[k * n + k] = Complex64::new(diag, 0.0);
            for i in (k + 1)..n {
                let mut s = self.get(i, k);
                for j in 0..k {
                    s -= l[i * n + j] * l[k * n + j].conj();
                }
                l[i * n + k] = s / diag;
            }
        }
        Ok(l)
    }
}

/// Right-hand side `b_i = ⟨φ_i|f⟩` of the normal equations.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector(pub Vec<Complex64>);

impl MomentVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Optimal coefficients for a basis and the squared deflection they leave.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub basis: Basis,
    pub coefficients: Vec<Complex64>,
    pub f_min: f64,
    pub norm_f_sq: f64,
}

impl LinearFit {
    /// Root mean square deflection `‖f − φ‖`.
    pub fn rms_deflection(&self) -> f64 {
        self.f_min.sqrt()
    }

    /// Evaluates the fitted combination `φ(x) = Σ a_j φ_j(x)`.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.basis
            .terms()
            .iter()
            .zip(&self.coefficients)
            .map(|(t, a)| a * t.eval(x))
            .sum()
    }
}

/// `g_ij = ⟨φ_i|φ_j⟩`; the lower triangle mirrors the upper one.
pub fn build_gram(basis: &Basis) -> Result<GramMatrix> {
    let n = basis.len();
    let terms = basis.terms();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let g = inner_product(&terms[i], &terms[j])?;
            if i == j {
                entries[i * n + i] = Complex64::new(g.re, 0.0);
            } else {
                entries[i * n + j] = g;
                entries[j * n + i] = g.conj();
            }
        }
    }
    GramMatrix::from_entries(n, entries)
}

/// Solves `G a = b` and evaluates `F_min = ‖f‖² − b^H G^{-1} b`.
pub fn solve_normal_equations(
    basis: Basis,
    gram: &GramMatrix,
    moments: &MomentVector,
    norm_f_sq: f64,
) -> Result<LinearFit> {
    let n = gram.order();
    if moments.len() != n || basis.len() != n {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: gram {n}, moments {}, basis {}",
            moments.len(),
            basis.len()
        )));
    }
    let l = gram.cholesky()?;

    // L y = b
    let mut y = moments.0.clone();
    for i in 0..n {
        for j in 0..i {
            let lij = l[i * n + j];
            let yj = y[j];
            y[i] -= lij * yj;
        }
        y[i] /= l[i * n + i].re;
    }
    // L^H a = y
    let mut a = y.clone();
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            let lji = l[j * n + i];
            let aj = a[j];
            a[i] -= lji.conj() * aj;
        }
        a[i] /= l[i * n + i].re;
    }

    let captured: f64 = y.iter().map(|v| v.norm_sqr()).sum();
    let raw = norm_f_sq - captured;
    let slack = CLAMP_SLACK * norm_f_sq.max(1.0);
    let f_min = if raw < 0.0 {
        if raw < -slack {
            return Err(Error::Internal(format!(
                "squared deflection {raw:e} is negative beyond rounding slack"
            )));
        }
        0.0
    } else {
        raw
    };
    if !f_min.is_finite() {
        return Err(Error::Internal(format!("squared deflection is {f_min}")));
    }

    Ok(LinearFit {
        basis,
        coefficients: a,
        f_min,
        norm_f_sq,
    })
}

/// Moments `⟨φ_i|f⟩` of every basis term.
pub fn moments(basis: &Basis, signal: &Signal) -> Result<MomentVector> {
    basis
        .terms()
        .iter()
        .map(|t| signal.moment(t))
        .collect::<Result<Vec<_>>>()
        .map(MomentVector)
}

/// Gram assembly, moments and solve in one call.
pub fn fit_basis(basis: Basis, signal: &Signal) -> Result<LinearFit> {
    let gram = build_gram(&basis)?;
    let b = moments(&basis, signal)?;
    solve_normal_equations(basis, &gram, &b, signal.norm_sq())
}

/// `⟨φ_i|f − φ⟩` for every basis term. All entries vanish for an exact solve.
pub fn residual_orthogonality(fit: &LinearFit, signal: &Signal) -> Result<Vec<Complex64>> {
    let gram = build_gram(&fit.basis)?;
    let b = moments(&fit.basis, signal)?;
    let ga = gram.apply(&fit.coefficients);
    Ok(b.0.iter().zip(ga).map(|(bi, gi)| bi - gi).collect())
}
