//! Truncated weighted Bergman spaces `A^(λ)(𝔻)` with kernel
//! `(1 − zw̄)^{−λ}`, their shift operators and discrete-series matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_in_disc, check_positive, Error, Result};
use crate::moebius::{Cocycle, MoebiusTransform};
use crate::series::{self, mul_truncated, zero};

/// `‖zⁿ‖² = n!/(λ)_n`.
pub fn monomial_norm_sq(lambda: f64, n: usize) -> Result<f64> {
    check_positive("lambda", lambda)?;
    Ok(norm_sq_unchecked(lambda, n))
}

pub(crate) fn norm_sq_unchecked(lambda: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (k as f64 + 1.0) / (lambda + k as f64))
}

/// `B^(λ)(z, w)` via the principal logarithm of `1 − zw̄`.
pub fn kernel_eval(lambda: f64, z: Complex64, w: Complex64) -> Result<Complex64> {
    check_positive("lambda", lambda)?;
    check_in_disc("z", z)?;
    check_in_disc("w", w)?;
    Ok((-lambda * (1.0 - z * w.conj()).ln()).exp())
}

/// Degree-`n` truncation `Σ_{k≤n} (λ)_k/k!·(zw̄)^k` of the kernel series.
pub fn truncated_kernel_eval(lambda: f64, z: Complex64, w: Complex64, n: usize) -> Result<Complex64> {
    check_positive("lambda", lambda)?;
    let x = z * w.conj();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..n {
        term = term * x * (lambda + k as f64) / (k as f64 + 1.0);
        sum += term;
    }
    Ok(sum)
}

/// Weights `‖z^{n+1}‖/‖zⁿ‖ = sqrt((n+1)/(λ+n))`, `n = 0..N−1`, of the shift
/// `M^(λ)`.
pub fn shift_weights(lambda: f64, n: usize) -> Result<Vec<f64>> {
    check_positive("lambda", lambda)?;
    if n == 0 {
        return Err(Error::InvalidParameter("shift weights need at least one step".into()));
    }
    Ok((0..n)
        .map(|k| ((k as f64 + 1.0) / (lambda + k as f64)).sqrt())
        .collect())
}

/// Which basis a matrix is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// Raw monomials `zⁿ`.
    Monomial,
    /// `eₙ = zⁿ/‖zⁿ‖`.
    Orthonormal,
}

/// Truncation of `D⁺_λ(φ⁻¹) : f ↦ c^(λ)(φ, ·)·(f ∘ φ)`; column `k` holds the
/// Taylor coefficients of `c^(λ)(φ, z)·φ(z)^k` up to degree `n`.
pub fn discrete_series_matrix(
    lambda: f64,
    phi: &MoebiusTransform,
    n: usize,
    basis: Basis,
) -> Result<DMatrix<Complex64>> {
    let cocycle = Cocycle::new(lambda)?;
    let phi_series = phi.taylor_coefficients(n);
    let mut col = cocycle.taylor_coefficients(phi, n);
    let mut out = DMatrix::from_element(n + 1, n + 1, zero());
    for k in 0..=n {
        for (row, &v) in col.iter().enumerate() {
            out[(row, k)] = v;
        }
        if k < n {
            col = mul_truncated(&col, &phi_series, n);
        }
    }
    if basis == Basis::Orthonormal {
        let norms: Vec<f64> = (0..=n).map(|j| norm_sq_unchecked(lambda, j).sqrt()).collect();
        for k in 0..=n {
            for row in 0..=n {
                out[(row, k)] *= norms[row] / norms[k];
            }
        }
    }
    Ok(out)
}

/// `|B(z, w) − c(φ, z)·B(φz, φw)·conj(c(φ, w))|`; the transformation rule is
/// exact, so this is pure rounding error.
pub fn kernel_transform_check(lambda: f64, phi: &MoebiusTransform, z: Complex64, w: Complex64) -> Result<f64> {
    let cocycle = Cocycle::new(lambda)?;
    let lhs = kernel_eval(lambda, z, w)?;
    let rhs = cocycle.eval(phi, z)? * kernel_eval(lambda, phi.eval(z), phi.eval(w))? * cocycle.eval(phi, w)?.conj();
    Ok((lhs - rhs).norm())
}

/// Truncated `A^(λ)(𝔻)`: polynomials of degree at most `degree`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedDiscSpace {
    lambda: f64,
    degree: usize,
    norm_sq: Vec<f64>,
}

/// Taylor coefficients at `0`, indexed `0..=N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscFunction {
    pub coeffs: Vec<Complex64>,
}

impl DiscFunction {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        series::eval(&self.coeffs, z)
    }

    /// Highest index with a coefficient above `tol` in modulus.
    pub fn degree(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm() > tol)
    }
}

impl WeightedDiscSpace {
    pub fn new(lambda: f64, degree: usize) -> Result<Self> {
        check_positive("lambda", lambda)?;
        let norm_sq = (0..=degree).map(|n| norm_sq_unchecked(lambda, n)).collect();
        Ok(Self {
            lambda,
            degree,
            norm_sq,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn norm_sq(&self) -> &[f64] {
        &self.norm_sq
    }

    pub fn inner(&self, f: &DiscFunction, g: &DiscFunction) -> Result<Complex64> {
        let dim = self.degree + 1;
        for h in [f, g] {
            if h.coeffs.len() != dim {
                return Err(Error::ShapeMismatch {
                    expected: dim,
                    got: h.coeffs.len(),
                });
            }
        }
        Ok(f.coeffs
            .iter()
            .zip(&g.coeffs)
            .zip(&self.norm_sq)
            .map(|((a, b), w)| a * b.conj() * *w)
            .sum())
    }

    /// `B_N(·, w)`, the degree-`N` truncation of the kernel section at `w`.
    pub fn kernel_section(&self, w: Complex64) -> DiscFunction {
        let wb = w.conj();
        let mut pow = Complex64::new(1.0, 0.0);
        let coeffs = self
            .norm_sq
            .iter()
            .map(|ns| {
                let c = pow / *ns;
                pow *= wb;
                c
            })
            .collect();
        DiscFunction { coeffs }
    }

    pub fn shift_weights(&self) -> Result<Vec<f64>> {
        shift_weights(self.lambda, self.degree)
    }

    pub fn discrete_series_matrix(&self, phi: &MoebiusTransform, basis: Basis) -> Result<DMatrix<Complex64>> {
        discrete_series_matrix(self.lambda, phi, self.degree, basis)
    }
}
