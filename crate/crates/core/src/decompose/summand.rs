//! Orthonormal bases of the summands `S_m = M_{m−1} ⊖ M_m` at truncation
//! and the restricted kernels `K_m` they carry.

use std::collections::BTreeMap;

use log::warn;
use num_complex::Complex64;

use crate::error::{check_in_disc, Error, Result};
use crate::par::{self, Strategy};
use crate::polyspace::{eval_on_indices, MultiIndex, PolyFunction, TensorSpace};
use crate::series::{binomial, zero};

use super::filtration::{diagonal_derivative, grading_key, reduced_indices};
use super::Parity;

/// Candidates whose residual after orthogonalization falls below this
/// fraction of their original norm are treated as dependent.
const RANK_TOL: f64 = 1e-9;

/// Orthonormal basis of one summand `S_m ∩ P_N`.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    pub m: usize,
    /// Orthonormal under the space Gram, each homogeneous in the grading
    /// `(α₁ + α₂, α₃, …)`.
    pub vectors: Vec<PolyFunction>,
    /// Total degree of each vector.
    pub degrees: Vec<usize>,
    /// Grading key of each vector.
    pub keys: Vec<MultiIndex>,
    /// Number of basis vectors per total degree `0..=N`.
    pub graded_dims: Vec<usize>,
    /// `Γ_m` of each vector, over [`SubspaceBasis::reduced`].
    pub images: Vec<PolyFunction>,
    pub reduced: Vec<MultiIndex>,
    /// Set when `m` exceeds the degree bound, so emptiness is an artifact of
    /// truncation.
    pub truncated: bool,
}

impl SubspaceBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `Γ_m u(z)` for basis vector `k`.
    pub fn image_eval(&self, k: usize, z: &[Complex64]) -> Complex64 {
        eval_on_indices(&self.reduced, &self.images[k].coeffs, z)
    }

    /// `Σ_k ⟨f, u_k⟩ u_k`.
    pub fn project(&self, space: &TensorSpace, f: &PolyFunction) -> PolyFunction {
        let mut out = space.zero();
        for u in &self.vectors {
            out.axpy(space.inner_unchecked(f, u), u);
        }
        out
    }
}

struct Block<'a> {
    space: &'a TensorSpace,
    key: MultiIndex,
    /// Space indices of `(a, D − a, rest)` for `a = D, D−1, …, 0`.
    members: Vec<usize>,
    gram: Vec<f64>,
}

impl<'a> Block<'a> {
    fn new(space: &'a TensorSpace, key: MultiIndex) -> Self {
        let d = key[0];
        let members: Vec<usize> = (0..=d)
            .rev()
            .map(|a| {
                let mut alpha = Vec::with_capacity(space.vars());
                alpha.push(a);
                alpha.push(d - a);
                alpha.extend_from_slice(&key[1..]);
                space.index_of(&alpha).expect("block member inside truncation")
            })
            .collect();
        let gram = members.iter().map(|&k| space.gram()[k]).collect();
        Self {
            space,
            key,
            members,
            gram,
        }
    }

    fn degree(&self) -> usize {
        self.key[0]
    }

    /// Local coordinates of `(z₁ − z₂)^l·z₁^i z₂^{D−l−i}·rest`.
    fn generator(&self, l: usize, i: usize) -> Vec<Complex64> {
        let d = self.degree();
        let mut v = vec![zero(); d + 1];
        for k in 0..=l {
            let a = i + k;
            let sign = if (l - k).is_multiple_of(2) { 1.0 } else { -1.0 };
            v[d - a] = Complex64::new(sign * binomial(l, k), 0.0);
        }
        v
    }

    fn generators(&self, l: usize, parity: Option<Parity>) -> Vec<Vec<Complex64>> {
        let d = self.degree();
        if l > d {
            return Vec::new();
        }
        (0..=d - l)
            .map(|i| {
                let v = self.generator(l, i);
                match parity {
                    None => v,
                    Some(p) => {
                        let sign = if p == Parity::Symmetric { 1.0 } else { -1.0 };
                        (0..=d).map(|k| 0.5 * (v[k] + sign * v[d - k])).collect()
                    }
                }
            })
            .collect()
    }

    fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter()
            .zip(b)
            .zip(&self.gram)
            .map(|((x, y), w)| x * y.conj() * *w)
            .sum()
    }

    fn norm(&self, a: &[Complex64]) -> f64 {
        self.inner(a, a).re.max(0.0).sqrt()
    }

    fn orthogonalize(&self, v: &mut [Complex64], basis: &[Vec<Complex64>]) {
        for _ in 0..2 {
            for q in basis {
                let c = self.inner(v, q);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
    }

    /// Pivoted modified Gram–Schmidt: extends `basis` by the directions of
    /// `candidates` it does not already span, returning the new vectors.
    fn extend(&self, basis: &mut Vec<Vec<Complex64>>, candidates: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
        let mut pool: Vec<(f64, Vec<Complex64>)> = candidates
            .into_iter()
            .map(|v| (self.norm(&v), v))
            .filter(|(n, _)| *n > 0.0)
            .collect();
        let mut added = Vec::new();
        loop {
            for (_, v) in pool.iter_mut() {
                self.orthogonalize(v, basis);
            }
            let best = pool
                .iter()
                .enumerate()
                .map(|(k, (n0, v))| (k, self.norm(v) / n0))
                .max_by(|a, b| a.1.total_cmp(&b.1));
            let Some((k, ratio)) = best else { break };
            if ratio <= RANK_TOL {
                break;
            }
            let (_, mut v) = pool.swap_remove(k);
            self.orthogonalize(&mut v, basis);
            let n = self.norm(&v);
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v.clone());
            added.push(v);
        }
        added
    }

    fn embed(&self, local: &[Complex64]) -> PolyFunction {
        let mut f = self.space.zero();
        for (&k, &c) in self.members.iter().zip(local) {
            f.coeffs[k] = c;
        }
        f
    }
}

fn blocks(space: &TensorSpace) -> Vec<Block<'_>> {
    let keys: BTreeMap<MultiIndex, ()> = space.indices().iter().map(|a| (grading_key(a), ())).collect();
    keys.into_keys().map(|k| Block::new(space, k)).collect()
}

fn check_parity(space: &TensorSpace, parity: Option<Parity>) -> Result<()> {
    if space.vars() < 2 {
        return Err(Error::Unsupported("summands need at least two variables".into()));
    }
    if parity.is_some() {
        let l = space.lambdas();
        let swap_invariant = space.indices().iter().zip(space.gram()).all(|(a, g)| {
            let mut b = a.clone();
            b.swap(0, 1);
            (space.gram()[space.index_of(&b).unwrap()] - g).abs() <= 1e-14 * g
        });
        if l[0] != l[1] || !swap_invariant {
            return Err(Error::InvalidParameter(
                "parity subspaces need a swap-invariant space (λ₁ = λ₂)".into(),
            ));
        }
    }
    Ok(())
}

/// Orthonormal basis of `(M_{m−1} ∩ P_N) ⊖ (M_m ∩ P_N)`, optionally inside
/// the symmetric or antisymmetric functions of `(z₁, z₂)`.
pub fn summand_basis(space: &TensorSpace, m: usize, parity: Option<Parity>) -> Result<SubspaceBasis> {
    check_parity(space, parity)?;
    Ok(summand_basis_in(space, &blocks(space), m, parity))
}

fn summand_basis_in(space: &TensorSpace, blocks: &[Block<'_>], m: usize, parity: Option<Parity>) -> SubspaceBasis {
    let n = space.degree();
    let reduced = reduced_indices(space, m);
    let mut out = SubspaceBasis {
        m,
        vectors: Vec::new(),
        degrees: Vec::new(),
        keys: Vec::new(),
        graded_dims: vec![0; n + 1],
        images: Vec::new(),
        reduced,
        truncated: m > n,
    };
    if out.truncated {
        warn!("summand {m} requested beyond degree bound {n}; returning an empty basis");
        return out;
    }
    for block in blocks.iter().filter(|b| b.degree() >= m) {
        let mut q = Vec::new();
        block.extend(&mut q, block.generators(m + 1, parity));
        for local in block.extend(&mut q, block.generators(m, parity)) {
            let mut v = block.embed(&local);
            let image = diagonal_derivative(space, &v, m).expect("shapes agree");
            let lead = image
                .coeffs
                .iter()
                .copied()
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap_or_else(zero);
            let mut image = image;
            if lead.norm() > 0.0 {
                let phase = lead.conj() / lead.norm();
                v = v.scale(phase);
                image = image.scale(phase);
            }
            let total: usize = block.key.iter().sum();
            out.graded_dims[total] += 1;
            out.degrees.push(total);
            out.keys.push(block.key.clone());
            out.vectors.push(v);
            out.images.push(image);
        }
    }
    out
}

/// `Σ_d a_d·conj(b_d)`.
pub(crate) fn pair(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// All summands `S_0, …, S_N` of a space, computed independently per `m`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    space: TensorSpace,
    parity: Option<Parity>,
    summands: Vec<SubspaceBasis>,
}

impl Decomposition {
    pub fn new(space: &TensorSpace, parity: Option<Parity>) -> Result<Self> {
        Self::with_strategy(space, parity, Strategy::default())
    }

    pub fn with_strategy(space: &TensorSpace, parity: Option<Parity>, strategy: Strategy) -> Result<Self> {
        check_parity(space, parity)?;
        let blocks = blocks(space);
        let summands = par::map_range(strategy, space.degree() + 1, |m| {
            summand_basis_in(space, &blocks, m, parity)
        });
        Ok(Self {
            space: space.clone(),
            parity,
            summands,
        })
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn summands(&self) -> &[SubspaceBasis] {
        &self.summands
    }

    pub fn summand(&self, m: usize) -> Result<&SubspaceBasis> {
        self.summands
            .get(m)
            .ok_or_else(|| Error::InvalidParameter(format!("summand {m} exceeds degree bound {}", self.space.degree())))
    }

    /// Lowest non-empty summand index.
    pub fn lowest_nonempty(&self) -> Option<usize> {
        self.summands.iter().position(|s| !s.is_empty())
    }

    fn check_point(&self, z: &[Complex64]) -> Result<()> {
        let vars = self.space.vars() - 1;
        if z.len() != vars {
            return Err(Error::ShapeMismatch {
                expected: vars,
                got: z.len(),
            });
        }
        z.iter().try_for_each(|&x| check_in_disc("z", x))
    }

    /// `(Γ_m u_d(z))_d` over the orthonormal basis of `S_m`; `z ∈ 𝔻^{d−1}`.
    pub fn image_values(&self, m: usize, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_point(z)?;
        let s = self.summand(m)?;
        Ok((0..s.len()).map(|k| s.image_eval(k, z)).collect())
    }

    /// `(⟨u_d, ∂̄₁^m K(·, ẑ)⟩)_d` with `ẑ = (z₁, z₁, z₂, …)`: the coordinates
    /// of the projected derivative section, conjugated.
    pub fn section_values(&self, m: usize, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_point(z)?;
        let s = self.summand(m)?;
        let mut lifted = Vec::with_capacity(z.len() + 1);
        lifted.push(z[0]);
        lifted.extend_from_slice(z);
        let sz = self.space.kernel_derivative_section(m, &lifted)?;
        Ok(s.vectors.iter().map(|u| self.space.inner_unchecked(u, &sz)).collect())
    }

    /// `K_m(z, w) = Σ_d Γ_m u_d(z)·conj(Γ_m u_d(w))` over the orthonormal
    /// basis; points live in `𝔻^{d−1}`.
    pub fn kernel(&self, m: usize, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
        Ok(pair(&self.image_values(m, z)?, &self.image_values(m, w)?))
    }

    /// The same kernel through projected derivative sections:
    /// `⟨P_m ∂̄₁^m K(·, ŵ), P_m ∂̄₁^m K(·, ẑ)⟩`.
    pub fn kernel_projection_route(&self, m: usize, z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
        Ok(pair(&self.section_values(m, z)?, &self.section_values(m, w)?))
    }

    /// Bidisc form of [`Decomposition::kernel`].
    pub fn restricted_kernel(&self, m: usize, z: Complex64, w: Complex64) -> Result<Complex64> {
        self.kernel(m, &[z], &[w])
    }

    /// `Γ_m f = ∂₁^m f|_Δ`, rejecting `f` outside the span of `S_m`.
    pub fn gamma_map(&self, m: usize, f: &PolyFunction) -> Result<PolyFunction> {
        let s = self.summand(m)?;
        let residual = self.space.norm(&(f - &s.project(&self.space, f)));
        if residual > 1e-9 * self.space.norm(f).max(1.0) {
            return Err(Error::OutsideSpan { residual });
        }
        diagonal_derivative(&self.space, f, m)
    }

    /// `‖P_m ∂̄₁^m K(·, ŵ)‖`; non-zero exactly when `S_m ≠ {0}`.
    pub fn nonemptiness_witness(&self, m: usize, w: &[Complex64]) -> Result<f64> {
        Ok(self.kernel_projection_route(m, w, w)?.re.max(0.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::filtration::{filtration_defect, vanishing_filtration_basis};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_lies_in_first_summand() {
        let s = TensorSpace::new(&[1.3, 0.7], 6).unwrap();
        let b = summand_basis(&s, 0, None).unwrap();
        let one = s.monomial(&[0, 0]).unwrap();
        assert!(b.vectors.iter().any(|v| (v - &one).max_abs() < 1e-15));
    }

    #[test]
    fn first_summand_linear_part() {
        let s = TensorSpace::new(&[1.0, 1.0], 6).unwrap();
        let b = summand_basis(&s, 1, None).unwrap();
        let k = b.degrees.iter().position(|&d| d == 1).unwrap();
        let v = &b.vectors[k];
        let r2 = 0.5f64.sqrt();
        assert_abs_diff_eq!(v.coeffs[s.index_of(&[1, 0]).unwrap()].re, r2, epsilon = 1e-15);
        assert_abs_diff_eq!(v.coeffs[s.index_of(&[0, 1]).unwrap()].re, -r2, epsilon = 1e-15);
    }

    #[test]
    fn graded_dims_one_per_degree() {
        let s = TensorSpace::new(&[0.5, 1.5], 10).unwrap();
        let d = Decomposition::new(&s, None).unwrap();
        for (m, b) in d.summands().iter().enumerate() {
            for (deg, &n) in b.graded_dims.iter().enumerate() {
                assert_eq!(n, usize::from(deg >= m), "m={m} deg={deg}");
            }
        }
    }

    #[test]
    fn summands_are_exact_and_complete() {
        let s = TensorSpace::new(&[1.0, 2.0], 9).unwrap();
        let d = Decomposition::new(&s, None).unwrap();
        let all: Vec<&PolyFunction> = d.summands().iter().flat_map(|b| &b.vectors).collect();
        assert_eq!(all.len(), s.dim());
        for (i, u) in all.iter().enumerate() {
            for (j, v) in all.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((s.inner(u, v).unwrap() - expected).norm() < 1e-12);
            }
        }
        for b in d.summands() {
            let m = b.m;
            for v in &b.vectors {
                // floating cancellation among binomial-sized coefficients
                let e = filtration_defect(&s, v, m).unwrap();
                assert!(e < 1e-10, "m={m} defect {e}");
            }
            if m < s.degree() {
                let next = vanishing_filtration_basis(&s, m + 1).unwrap();
                for v in &b.vectors {
                    for g in &next {
                        let r = s.inner(v, g).unwrap().norm() / s.norm(g);
                        assert!(r < 1e-12, "m={m}: {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn beyond_degree_is_flagged_empty() {
        let s = TensorSpace::new(&[1.0, 1.0], 4).unwrap();
        let b = summand_basis(&s, 5, None).unwrap();
        assert!(b.is_empty() && b.truncated);
    }

    #[test]
    fn parity_needs_equal_weights() {
        let s = TensorSpace::new(&[1.0, 2.0], 4).unwrap();
        assert!(Decomposition::new(&s, Some(Parity::Symmetric)).is_err());
    }

    #[test]
    fn gamma_map_examples_and_errors() {
        let s = TensorSpace::new(&[1.0, 1.0], 6).unwrap();
        let d = Decomposition::new(&s, None).unwrap();
        let diff = &s.monomial(&[1, 0]).unwrap() - &s.monomial(&[0, 1]).unwrap();
        let g = d.gamma_map(1, &diff).unwrap();
        assert_eq!(g.coeffs[0], c(1.0, 0.0));
        // z₁ has an S₀ component, so it is not in the span of S₁
        assert!(matches!(
            d.gamma_map(1, &s.monomial(&[1, 0]).unwrap()),
            Err(Error::OutsideSpan { .. })
        ));
    }

    #[test]
    fn two_kernel_routes_agree() {
        let s = TensorSpace::new(&[1.0, 2.0], 10).unwrap();
        let d = Decomposition::new(&s, None).unwrap();
        let pts = [c(0.0, 0.0), c(0.3, -0.1), c(-0.2, 0.4)];
        for m in 0..5 {
            for &z in &pts {
                for &w in &pts {
                    let a = d.kernel(m, &[z], &[w]).unwrap();
                    let b = d.kernel_projection_route(m, &[z], &[w]).unwrap();
                    assert!((a - b).norm() < 1e-10, "m={m}");
                }
            }
        }
        assert!(d.kernel(0, &[c(1.0, 0.0)], &[c(0.0, 0.0)]).is_err());
    }
}
