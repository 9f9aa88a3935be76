//! Truncated reproducing-kernel spaces on `𝔻^d` whose Gram matrix is diagonal
//! in the monomials. Truncation is by total degree and multi-indices are
//! stored in graded-lexicographic order.

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discspace::{self, norm_sq_unchecked, Basis};
use crate::error::{check_in_disc, check_positive, Error, Result};
use crate::moebius::{Cocycle, MoebiusTransform};
use crate::series::{falling_factorial, zero};

/// Exponent vector of a monomial.
pub type MultiIndex = Vec<usize>;

/// All multi-indices in `vars` variables with total degree `degree`,
/// lexicographically descending (`z₁^degree` first).
pub fn homogeneous_indices(vars: usize, degree: usize) -> Vec<MultiIndex> {
    fn rec(vars: usize, degree: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if vars == 1 {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=degree).rev() {
            prefix.push(first);
            rec(vars - 1, degree - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(vars, degree, &mut Vec::with_capacity(vars), &mut out);
    out
}

/// Graded-lexicographic listing of every multi-index with `|α| ≤ degree`.
pub fn graded_indices(vars: usize, degree: usize) -> Vec<MultiIndex> {
    (0..=degree).flat_map(|d| homogeneous_indices(vars, d)).collect()
}

/// Evaluates `Σ coeffs[k]·z^{indices[k]}`.
pub fn eval_on_indices(indices: &[MultiIndex], coeffs: &[Complex64], z: &[Complex64]) -> Complex64 {
    indices
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| **c != zero())
        .map(|(a, c)| a.iter().zip(z).fold(*c, |acc, (&k, &x)| acc * x.powu(k as u32)))
        .sum()
}

/// Polynomial space on `𝔻^d` truncated at total degree `N`, with
/// `⟨z^α, z^β⟩ = δ_{αβ}·gram[α]`.
#[derive(Clone, Debug)]
pub struct TensorSpace {
    lambdas: Vec<f64>,
    degree: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    gram: Vec<f64>,
}

/// Coefficient vector over the owning space's multi-index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyFunction {
    pub coeffs: Vec<Complex64>,
}

impl PolyFunction {
    pub fn zeros(dim: usize) -> Self {
        Self {
            coeffs: vec![zero(); dim],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `self += s·other`.
    pub fn axpy(&mut self, s: Complex64, other: &PolyFunction) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl Add for &PolyFunction {
    type Output = PolyFunction;
    fn add(self, rhs: &PolyFunction) -> PolyFunction {
        PolyFunction {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &PolyFunction {
    type Output = PolyFunction;
    fn sub(self, rhs: &PolyFunction) -> PolyFunction {
        PolyFunction {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<Complex64> for &PolyFunction {
    type Output = PolyFunction;
    fn mul(self, rhs: Complex64) -> PolyFunction {
        self.scale(rhs)
    }
}

impl TensorSpace {
    /// The truncated tensor product `A^(λ₁) ⊗ … ⊗ A^(λ_d)`.
    pub fn new(lambdas: &[f64], degree: usize) -> Result<Self> {
        for &l in lambdas {
            check_positive("lambda", l)?;
        }
        let indices = graded_indices(Self::check_vars(lambdas)?, degree);
        let gram = indices
            .iter()
            .map(|a| a.iter().zip(lambdas).map(|(&k, &l)| norm_sq_unchecked(l, k)).product())
            .collect();
        Ok(Self::assemble(lambdas.to_vec(), degree, indices, gram))
    }

    /// A diagonal-Gram space with explicit monomial weights (listed in
    /// graded-lexicographic order). `lambdas` still define the ambient
    /// cocycle `∏ c^(λᵢ)(φ, zᵢ)`.
    pub fn with_gram(lambdas: &[f64], degree: usize, gram: Vec<f64>) -> Result<Self> {
        for &l in lambdas {
            check_positive("lambda", l)?;
        }
        let indices = graded_indices(Self::check_vars(lambdas)?, degree);
        if gram.len() != indices.len() {
            return Err(Error::ShapeMismatch {
                expected: indices.len(),
                got: gram.len(),
            });
        }
        if let Some(bad) = gram.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "gram weights must be positive, found {bad}"
            )));
        }
        Ok(Self::assemble(lambdas.to_vec(), degree, indices, gram))
    }

    fn check_vars(lambdas: &[f64]) -> Result<usize> {
        if lambdas.is_empty() {
            return Err(Error::InvalidParameter("need at least one variable".into()));
        }
        Ok(lambdas.len())
    }

    fn assemble(lambdas: Vec<f64>, degree: usize, indices: Vec<MultiIndex>, gram: Vec<f64>) -> Self {
        let lookup = indices.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Self {
            lambdas,
            degree,
            indices,
            lookup,
            gram,
        }
    }

    /// Multiplies each Gram weight by `factors[k]` (same order as the basis).
    pub fn perturbed(&self, factors: &[f64]) -> Result<Self> {
        if factors.len() != self.dim() {
            return Err(Error::ShapeMismatch {
                expected: self.dim(),
                got: factors.len(),
            });
        }
        let gram = self.gram.iter().zip(factors).map(|(g, f)| g * f).collect();
        Self::with_gram(&self.lambdas, self.degree, gram)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn vars(&self) -> usize {
        self.lambdas.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index_of(&self, alpha: &[usize]) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    pub fn gram(&self) -> &[f64] {
        &self.gram
    }

    pub fn total_degree(&self, k: usize) -> usize {
        self.indices[k].iter().sum()
    }

    pub fn zero(&self) -> PolyFunction {
        PolyFunction::zeros(self.dim())
    }

    pub fn monomial(&self, alpha: &[usize]) -> Result<PolyFunction> {
        let k = self
            .index_of(alpha)
            .ok_or_else(|| Error::InvalidParameter(format!("monomial {alpha:?} outside the truncation")))?;
        let mut f = self.zero();
        f.coeffs[k] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    fn check_shape(&self, f: &PolyFunction) -> Result<()> {
        if f.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: self.dim(),
                got: f.len(),
            })
        }
    }

    /// `⟨f, g⟩ = Σ_α f_α·conj(g_α)·gram[α]`.
    pub fn inner(&self, f: &PolyFunction, g: &PolyFunction) -> Result<Complex64> {
        self.check_shape(f)?;
        self.check_shape(g)?;
        Ok(self.inner_unchecked(f, g))
    }

    pub(crate) fn inner_unchecked(&self, f: &PolyFunction, g: &PolyFunction) -> Complex64 {
        f.coeffs
            .iter()
            .zip(&g.coeffs)
            .zip(&self.gram)
            .map(|((a, b), w)| a * b.conj() * *w)
            .sum()
    }

    pub fn norm(&self, f: &PolyFunction) -> f64 {
        f.coeffs
            .iter()
            .zip(&self.gram)
            .map(|(a, w)| a.norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }

    fn check_point(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.vars() {
            return Err(Error::ShapeMismatch {
                expected: self.vars(),
                got: z.len(),
            });
        }
        z.iter().try_for_each(|&x| check_in_disc("z", x))
    }

    fn powers(&self, z: &[Complex64]) -> Vec<Vec<Complex64>> {
        z.iter()
            .map(|&x| {
                let mut p = Vec::with_capacity(self.degree + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=self.degree {
                    p.push(acc);
                    acc *= x;
                }
                p
            })
            .collect()
    }

    fn monomial_values(&self, z: &[Complex64]) -> Vec<Complex64> {
        let pw = self.powers(z);
        self.indices
            .iter()
            .map(|a| a.iter().enumerate().map(|(i, &k)| pw[i][k]).product())
            .collect()
    }

    pub fn eval(&self, f: &PolyFunction, z: &[Complex64]) -> Result<Complex64> {
        self.check_shape(f)?;
        self.check_point(z)?;
        Ok(self.monomial_values(z).iter().zip(&f.coeffs).map(|(m, c)| m * c).sum())
    }

    /// `K_N(·, w) = Σ_α conj(w)^α z^α / gram[α]`.
    pub fn kernel_section(&self, w: &[Complex64]) -> Result<PolyFunction> {
        self.check_point(w)?;
        let wb: Vec<Complex64> = w.iter().map(|x| x.conj()).collect();
        Ok(PolyFunction {
            coeffs: self
                .monomial_values(&wb)
                .iter()
                .zip(&self.gram)
                .map(|(m, g)| m / *g)
                .collect(),
        })
    }

    /// The degree-`N` truncation of the kernel, `Σ_α z^α conj(w)^α / gram[α]`.
    pub fn truncated_kernel_eval(&self, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
        let kw = self.kernel_section(w)?;
        self.eval(&kw, z)
    }

    /// `∂̄₁^m K(·, w)` truncated to the space: coefficient of `z^α` is
    /// `α₁!/(α₁−m)!·conj(w₁)^{α₁−m}·∏_{k≥2} conj(w_k)^{α_k} / gram[α]`.
    pub fn kernel_derivative_section(&self, m: usize, w: &[Complex64]) -> Result<PolyFunction> {
        if m > self.degree {
            return Err(Error::InvalidParameter(format!(
                "derivative order {m} exceeds degree bound {}",
                self.degree
            )));
        }
        self.check_point(w)?;
        let wb: Vec<Complex64> = w.iter().map(|x| x.conj()).collect();
        let pw = self.powers(&wb);
        let coeffs = self
            .indices
            .iter()
            .zip(&self.gram)
            .map(|(a, g)| {
                if a[0] < m {
                    return zero();
                }
                let rest: Complex64 = a.iter().enumerate().skip(1).map(|(i, &k)| pw[i][k]).product();
                pw[0][a[0] - m] * rest * falling_factorial(a[0], m) / *g
            })
            .collect();
        Ok(PolyFunction { coeffs })
    }

    /// [`TensorSpace::kernel_derivative_section`] at the diagonal point
    /// `(w, w, …, w)`.
    pub fn diagonal_kernel_derivative_section(&self, m: usize, w: Complex64) -> Result<PolyFunction> {
        self.kernel_derivative_section(m, &vec![w; self.vars()])
    }

    /// `f ↦ z_i·f` (zero-based `i`), dropping anything above the degree bound.
    pub fn multiply_coordinate(&self, f: &PolyFunction, i: usize) -> Result<PolyFunction> {
        self.check_shape(f)?;
        if i >= self.vars() {
            return Err(Error::InvalidParameter(format!(
                "coordinate {} out of range for {} variables",
                i + 1,
                self.vars()
            )));
        }
        let mut out = self.zero();
        let mut shifted = vec![0; self.vars()];
        for (k, a) in self.indices.iter().enumerate() {
            if f.coeffs[k] == zero() {
                continue;
            }
            shifted.copy_from_slice(a);
            shifted[i] += 1;
            if let Some(t) = self.index_of(&shifted) {
                out.coeffs[t] += f.coeffs[k];
            }
        }
        Ok(out)
    }

    /// `f(z₁, z₂, …) ↦ f(z₂, z₁, …)`.
    pub fn swap_first_two(&self, f: &PolyFunction) -> Result<PolyFunction> {
        self.check_shape(f)?;
        if self.vars() < 2 {
            return Err(Error::Unsupported("swap needs two variables".into()));
        }
        let mut out = self.zero();
        let mut swapped = vec![0; self.vars()];
        for (k, a) in self.indices.iter().enumerate() {
            swapped.copy_from_slice(a);
            swapped.swap(0, 1);
            out.coeffs[self.lookup[&swapped]] = f.coeffs[k];
        }
        Ok(out)
    }

    /// Ambient cocycle `c(φ, z) = ∏ c^(λᵢ)(φ, zᵢ)`.
    pub fn cocycle(&self, phi: &MoebiusTransform, z: &[Complex64]) -> Result<Complex64> {
        self.check_point(z)?;
        self.lambdas
            .iter()
            .zip(z)
            .map(|(&l, &x)| Cocycle::new(l)?.eval(phi, x))
            .product()
    }

    /// Degree-truncated matrix of `f ↦ c(φ, ·)·(f ∘ φ)` acting diagonally on
    /// every coordinate.
    pub fn multiplier_matrix(&self, phi: &MoebiusTransform, basis: Basis) -> Result<DMatrix<Complex64>> {
        let factors = self
            .lambdas
            .iter()
            .map(|&l| discspace::discrete_series_matrix(l, phi, self.degree, Basis::Monomial))
            .collect::<Result<Vec<_>>>()?;
        let dim = self.dim();
        let mut out = DMatrix::from_element(dim, dim, zero());
        for (col, a) in self.indices.iter().enumerate() {
            for (row, b) in self.indices.iter().enumerate() {
                let v: Complex64 = b
                    .iter()
                    .zip(a)
                    .zip(&factors)
                    .map(|((&bi, &ai), m)| m[(bi, ai)])
                    .product();
                out[(row, col)] = v;
            }
        }
        if basis == Basis::Orthonormal {
            self.to_orthonormal(&mut out);
        }
        Ok(out)
    }

    /// Rescales a monomial-coordinate operator matrix (rows and columns both
    /// indexed by this space) into the basis `z^α/‖z^α‖`.
    pub fn to_orthonormal(&self, m: &mut DMatrix<Complex64>) {
        let norms: Vec<f64> = self.gram.iter().map(|g| g.sqrt()).collect();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                m[(r, c)] *= norms[r] / norms[c];
            }
        }
    }

    /// Coordinates of `f` in the orthonormal monomial basis.
    pub fn orthonormal_coords(&self, f: &PolyFunction) -> Vec<Complex64> {
        f.coeffs.iter().zip(&self.gram).map(|(c, g)| c * g.sqrt()).collect()
    }
}

/// `∏ B^(λᵢ)(zᵢ, wᵢ)`.
pub fn tensor_kernel_eval(lambdas: &[f64], z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    if z.len() != lambdas.len() || w.len() != lambdas.len() {
        return Err(Error::ShapeMismatch {
            expected: lambdas.len(),
            got: z.len().min(w.len()),
        });
    }
    lambdas
        .iter()
        .zip(z.iter().zip(w))
        .map(|(&l, (&a, &b))| discspace::kernel_eval(l, a, b))
        .product()
}

/// `∂^j (f ∘ φ)` from the derivatives `f^{(i)}(φ(z))` and `φ^{(i)}(z)`,
/// `i = 0..=j`, summing over `(l₁, …, l_j)` with `Σ k·l_k = j`.
pub fn faa_di_bruno(f_derivs: &[Complex64], phi_derivs: &[Complex64], j: usize) -> Result<Complex64> {
    for got in [f_derivs.len(), phi_derivs.len()] {
        if got < j + 1 {
            return Err(Error::InsufficientData { needed: j + 1, got });
        }
    }
    if j == 0 {
        return Ok(f_derivs[0]);
    }
    // scaled[k] = φ^{(k)}/k!
    let mut scaled = vec![zero(); j + 1];
    let mut fact = 1.0;
    for k in 1..=j {
        fact *= k as f64;
        scaled[k] = phi_derivs[k] / fact;
    }
    let j_fact: f64 = (1..=j).map(|k| k as f64).product();

    // Walk k = j, j−1, …, 1 choosing l_k; `acc` carries ∏ scaled^l / l!.
    fn rec(
        k: usize,
        remaining: usize,
        parts: usize,
        acc: Complex64,
        scaled: &[Complex64],
        f_derivs: &[Complex64],
        total: &mut Complex64,
    ) {
        if k == 0 {
            if remaining == 0 {
                *total += acc * f_derivs[parts];
            }
            return;
        }
        let mut term = acc;
        let mut l = 0;
        loop {
            rec(k - 1, remaining - l * k, parts + l, term, scaled, f_derivs, total);
            l += 1;
            if l * k > remaining {
                break;
            }
            term = term * scaled[k] / l as f64;
        }
    }
    let mut total = zero();
    rec(j, j, 0, Complex64::new(j_fact, 0.0), &scaled, f_derivs, &mut total);
    Ok(total)
}
