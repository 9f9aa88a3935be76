//! The diagonal-vanishing filtration `M_m = {f : ∂₁^i f|_Δ = 0, i ≤ m}` and
//! the normal-derivative restriction `f ↦ ∂₁^m f|_Δ`.
//!
//! `Δ` collapses the first two coordinates (`{(z, z)}` on the bidisc,
//! `{(z₁, z₁, z₂)}` on the tridisc); any further coordinates ride along.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polyspace::{graded_indices, MultiIndex, PolyFunction, TensorSpace};
use crate::series::{binomial, falling_factorial, zero};

use super::Parity;

/// Grading under which both the Gram matrix and the filtration split:
/// `(α₁ + α₂, α₃, …)`.
pub(crate) fn grading_key(alpha: &[usize]) -> MultiIndex {
    let mut key = Vec::with_capacity(alpha.len() - 1);
    key.push(alpha[0] + alpha[1]);
    key.extend_from_slice(&alpha[2..]);
    key
}

fn check_bidisc_like(space: &TensorSpace) -> Result<()> {
    if space.vars() < 2 {
        return Err(Error::Unsupported(
            "the diagonal filtration needs at least two variables".into(),
        ));
    }
    Ok(())
}

/// `(z₁ − z₂)^m · z^α` as a coefficient vector, or `None` if it exceeds the
/// degree bound.
pub fn vanishing_generator(space: &TensorSpace, m: usize, alpha: &[usize]) -> Option<PolyFunction> {
    let mut f = space.zero();
    let mut beta = alpha.to_vec();
    for k in 0..=m {
        beta[0] = alpha[0] + k;
        beta[1] = alpha[1] + m - k;
        let idx = space.index_of(&beta)?;
        let sign = if (m - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        f.coeffs[idx] = Complex64::new(sign * binomial(m, k), 0.0);
    }
    Some(f)
}

/// Spanning set of `M_{m−1} ∩ P_N`: every `(z₁ − z₂)^m·z^α` with
/// `|α| ≤ N − m` (the whole monomial basis when `m = 0`).
pub fn vanishing_filtration_basis(space: &TensorSpace, m: usize) -> Result<Vec<PolyFunction>> {
    check_bidisc_like(space)?;
    if m > space.degree() {
        return Err(Error::InvalidParameter(format!(
            "filtration level {m} exceeds degree bound {}",
            space.degree()
        )));
    }
    Ok(graded_indices(space.vars(), space.degree() - m)
        .iter()
        .filter_map(|a| vanishing_generator(space, m, a))
        .collect())
}

/// Projects onto symmetric or antisymmetric functions of `(z₁, z₂)`.
pub fn parity_projection(space: &TensorSpace, f: &PolyFunction, parity: Parity) -> Result<PolyFunction> {
    let swapped = space.swap_first_two(f)?;
    let sign = match parity {
        Parity::Symmetric => 1.0,
        Parity::Antisymmetric => -1.0,
    };
    let mut out = f.clone();
    out.axpy(Complex64::new(sign, 0.0), &swapped);
    Ok(out.scale(Complex64::new(0.5, 0.0)))
}

/// Multi-indices of the restricted functions: `graded_indices(d − 1, N − m)`
/// with the collapsed coordinate first.
pub fn reduced_indices(space: &TensorSpace, m: usize) -> Vec<MultiIndex> {
    graded_indices(space.vars() - 1, space.degree().saturating_sub(m))
}

/// `∂₁^m f` restricted to `Δ`, coefficient-exact: the coefficient of
/// `u^t·z₃^{α₃}…` is `Σ_{i+j = t+m, i ≥ m} i!/(i−m)!·f[i, j, α₃, …]`.
pub fn diagonal_derivative(space: &TensorSpace, f: &PolyFunction, m: usize) -> Result<PolyFunction> {
    check_bidisc_like(space)?;
    if f.len() != space.dim() {
        return Err(Error::ShapeMismatch {
            expected: space.dim(),
            got: f.len(),
        });
    }
    let target = reduced_indices(space, m);
    let lookup: HashMap<&[usize], usize> = target.iter().enumerate().map(|(i, a)| (a.as_slice(), i)).collect();
    let mut out = PolyFunction::zeros(target.len());
    let mut key = vec![0; space.vars() - 1];
    for (k, a) in space.indices().iter().enumerate() {
        let c = f.coeffs[k];
        if c == zero() || a[0] < m {
            continue;
        }
        key[0] = a[0] + a[1] - m;
        key[1..].copy_from_slice(&a[2..]);
        out.coeffs[lookup[key.as_slice()]] += c * falling_factorial(a[0], m);
    }
    Ok(out)
}

/// `max_{i < k} max |coeff(∂₁^i f|_Δ)|`: zero exactly when `f ∈ M_{k−1}`,
/// i.e. when `(z₁ − z₂)^k` divides `f`.
pub fn filtration_defect(space: &TensorSpace, f: &PolyFunction, k: usize) -> Result<f64> {
    (0..k).try_fold(
        0.0f64,
        |acc, i| Ok(acc.max(diagonal_derivative(space, f, i)?.max_abs())),
    )
}
