//! The multiplication tuple `(M_{z₁}, M_{z₂}, …)` on a truncated tensor
//! space: invariance of the diagonal filtration, block-triangular structure
//! in the summand basis, weighted-shift diagonal blocks and intertwining
//! with the multiplier representation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decompose::{filtration_defect, vanishing_generator, Decomposition};
use crate::discspace::Basis;
use crate::error::{check_in_disc, check_positive, Error, Result};
use crate::moebius::{Cocycle, MoebiusTransform};
use crate::par::{self, Strategy};
use crate::polyspace::{graded_indices, PolyFunction, TensorSpace};
use crate::series::zero;

/// Which orthonormal basis an [`OperatorMatrix`] is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorBasis {
    /// `z^α/‖z^α‖` in graded-lexicographic order.
    Monomial,
    /// Union of the summand bases, ordered by `m` and then by degree.
    Summand,
}

/// A map `P_{N_dom} → P_{N_cod}` in a declared orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub entries: DMatrix<Complex64>,
    pub basis: OperatorBasis,
    pub domain_degree: usize,
    pub codomain_degree: usize,
}

fn dim_upto(vars: usize, degree: usize) -> usize {
    graded_indices(vars, degree).len()
}

fn coordinate(space: &TensorSpace, i: usize) -> Result<usize> {
    if i == 0 || i > space.vars() {
        return Err(Error::InvalidParameter(format!(
            "coordinate {i} out of range 1..={}",
            space.vars()
        )));
    }
    Ok(i - 1)
}

fn require_degree(space: &TensorSpace, min: usize) -> Result<()> {
    if space.degree() < min {
        return Err(Error::InvalidParameter(format!(
            "degree bound {} is below the required {min}",
            space.degree()
        )));
    }
    Ok(())
}

/// Matrix of `f ↦ z_i·f` from `P_{N−1}` to `P_N` in the orthonormal monomial
/// basis; `i` counts from 1.
pub fn multiplication_matrix(space: &TensorSpace, i: usize) -> Result<OperatorMatrix> {
    require_degree(space, 1)?;
    let i = coordinate(space, i)?;
    let n = space.degree();
    let cols = dim_upto(space.vars(), n - 1);
    let mut entries = DMatrix::from_element(space.dim(), cols, zero());
    for (c, alpha) in space.indices()[..cols].iter().enumerate() {
        let mut beta = alpha.clone();
        beta[i] += 1;
        let r = space.index_of(&beta).expect("degree ≤ N");
        entries[(r, c)] = Complex64::new((space.gram()[r] / space.gram()[c]).sqrt(), 0.0);
    }
    Ok(OperatorMatrix {
        entries,
        basis: OperatorBasis::Monomial,
        domain_degree: n - 1,
        codomain_degree: n,
    })
}

/// Columns: orthonormal-monomial coordinates of every summand vector of total
/// degree at most `degree`, ordered by `m` and then by degree.
fn summand_frame(decomp: &Decomposition, degree: usize) -> DMatrix<Complex64> {
    let space = decomp.space();
    let rows = dim_upto(space.vars(), degree);
    let columns: Vec<Vec<Complex64>> = decomp
        .summands()
        .iter()
        .flat_map(|b| {
            let mut order: Vec<usize> = (0..b.len()).filter(|&k| b.degrees[k] <= degree).collect();
            order.sort_by_key(|&k| b.degrees[k]);
            order.into_iter().map(move |k| &b.vectors[k])
        })
        .map(|v| space.orthonormal_coords(v)[..rows].to_vec())
        .collect();
    DMatrix::from_fn(rows, columns.len(), |r, c| columns[c][r])
}

impl OperatorMatrix {
    /// Rewrites a monomial-basis operator in the summand basis.
    pub fn in_summand_basis(&self, decomp: &Decomposition) -> Result<OperatorMatrix> {
        if self.basis != OperatorBasis::Monomial {
            return Err(Error::InvalidParameter(
                "operator is already in the summand basis".into(),
            ));
        }
        let q_cod = summand_frame(decomp, self.codomain_degree);
        let q_dom = summand_frame(decomp, self.domain_degree);
        if q_cod.nrows() != self.entries.nrows() || q_dom.nrows() != self.entries.ncols() {
            return Err(Error::ShapeMismatch {
                expected: self.entries.nrows(),
                got: q_cod.nrows(),
            });
        }
        Ok(OperatorMatrix {
            entries: q_cod.adjoint() * &self.entries * q_dom,
            basis: OperatorBasis::Summand,
            domain_degree: self.domain_degree,
            codomain_degree: self.codomain_degree,
        })
    }
}

/// `max_i max_f` of the coefficient-level defect of `z_i·f` from `M_n`,
/// over the generators `f = (z₁ − z₂)^{n+1}·z^α` of `M_n ∩ P_{N−1}`.
/// Multiplication preserves divisibility, so this is exactly zero.
pub fn filtration_invariance_check(space: &TensorSpace, n: usize) -> Result<f64> {
    let big_n = space.degree();
    if n + 2 > big_n {
        return Err(Error::InvalidParameter(format!(
            "filtration level {n} needs degree bound ≥ {}",
            n + 2
        )));
    }
    let mut worst = 0.0f64;
    for alpha in graded_indices(space.vars(), big_n - 1 - (n + 1)) {
        let f = vanishing_generator(space, n + 1, &alpha).expect("degree ≤ N − 1");
        for i in 0..space.vars() {
            let g = space.multiply_coordinate(&f, i)?;
            worst = worst.max(filtration_defect(space, &g, n + 1)?);
        }
    }
    Ok(worst)
}

/// `‖f − Σ_{m > n} P_m f‖`: the component of `f` outside `M_n ∩ P_N`.
pub fn component_outside_filtration(decomp: &Decomposition, f: &PolyFunction, n: usize) -> Result<f64> {
    let space = decomp.space();
    let mut rest = f.clone();
    for b in decomp.summands().iter().skip(n + 1) {
        rest = &rest - &b.project(space, f);
    }
    Ok(space.norm(&rest))
}

fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Operator norms `‖P_n M_{z_i} P_m‖` for one coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockNorms {
    pub coordinate: usize,
    /// `norms[n][m]`.
    pub norms: Vec<Vec<f64>>,
}

impl BlockNorms {
    /// Largest block strictly above the diagonal (`n < m`).
    pub fn max_upper(&self) -> f64 {
        self.norms
            .iter()
            .enumerate()
            .flat_map(|(n, row)| row.iter().skip(n + 1).copied())
            .fold(0.0, f64::max)
    }
}

/// Block norms of `M_{z_i}: P_{N−1} → P_N` between summands. Multiplication
/// maps `S_m` into `M_{m−1}`, so blocks with `n < m` vanish.
pub fn block_structure_report(decomp: &Decomposition, i: usize, strategy: Strategy) -> Result<BlockNorms> {
    let space = decomp.space();
    let c = coordinate(space, i)?;
    require_degree(space, 1)?;
    let summands = decomp.summands();
    let top = space.degree();
    let images: Vec<Vec<PolyFunction>> = summands
        .iter()
        .map(|b| {
            (0..b.len())
                .filter(|&k| b.degrees[k] < top)
                .map(|k| space.multiply_coordinate(&b.vectors[k], c))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let columns = par::map_range(strategy, summands.len(), |m| {
        summands
            .iter()
            .map(|target| {
                let block = DMatrix::from_fn(target.len(), images[m].len(), |r, k| {
                    space.inner_unchecked(&images[m][k], &target.vectors[r])
                });
                operator_norm(&block)
            })
            .collect::<Vec<f64>>()
    });
    let norms = (0..summands.len())
        .map(|n| columns.iter().map(|col| col[n]).collect())
        .collect();
    Ok(BlockNorms { coordinate: i, norms })
}

/// `‖P_n M_{z_i} u_d‖` for the degree-`d` basis vector `u_d` of `S_n`,
/// `d = n..N−1`. Requires one basis vector per degree.
pub fn diagonal_block_weights(decomp: &Decomposition, n: usize, i: usize) -> Result<Vec<f64>> {
    let space = decomp.space();
    let c = coordinate(space, i)?;
    let big_n = space.degree();
    if n + 3 > big_n {
        return Err(Error::InvalidParameter(format!(
            "summand {n} needs degree bound ≥ {}",
            n + 3
        )));
    }
    let basis = decomp.summand(n)?;
    if basis.is_empty() {
        return Err(Error::EmptySummand { m: n });
    }
    if basis.graded_dims.iter().any(|&k| k > 1) {
        return Err(Error::Unsupported(format!(
            "summand {n} is not one-dimensional per degree"
        )));
    }
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by_key(|&k| basis.degrees[k]);
    order
        .iter()
        .filter(|&&k| basis.degrees[k] < big_n)
        .map(|&k| {
            let g = space.multiply_coordinate(&basis.vectors[k], c)?;
            Ok(space.norm(&basis.project(space, &g)))
        })
        .collect()
}

/// `max_k |weights[k] − sqrt((k+1)/(λ′+k))|`: distance from the weight
/// sequence of the shift on `A^(λ′)`.
pub fn shift_equivalence_check(weights: &[f64], lambda_prime: f64) -> Result<f64> {
    check_positive("lambda_prime", lambda_prime)?;
    if weights.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    Ok(weights
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let k = k as f64;
            (w - ((k + 1.0) / (lambda_prime + k)).sqrt()).abs()
        })
        .fold(0.0, f64::max))
}

/// `f ↦ z_i·f` on `P_N` (top degree maps to zero) as a column map:
/// monomial `k` goes to monomial `shift[k]`.
fn coordinate_shift(space: &TensorSpace, c: usize) -> Vec<Option<usize>> {
    space
        .indices()
        .iter()
        .map(|alpha| {
            let mut beta = alpha.clone();
            beta[c] += 1;
            space.index_of(&beta)
        })
        .collect()
}

/// `M·X` for the coordinate shift `M`.
fn shift_rows(shift: &[Option<usize>], x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut out = DMatrix::from_element(x.nrows(), x.ncols(), zero());
    for (k, target) in shift.iter().enumerate() {
        if let Some(r) = *target {
            out.row_mut(r).copy_from(&x.row(k));
        }
    }
    out
}

/// `X·M` for the coordinate shift `M`.
fn shift_columns(shift: &[Option<usize>], x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut out = DMatrix::from_element(x.nrows(), x.ncols(), zero());
    for (k, target) in shift.iter().enumerate() {
        if let Some(r) = *target {
            out.column_mut(k).copy_from(&x.column(r));
        }
    }
    out
}

/// `max_i ‖(Π(φ)·M_{z_i} − φ(M_{z_i})·Π(φ))_lead‖` where `Π(φ)` is the
/// truncated matrix of `f ↦ c(φ, ·)·(f ∘ φ)`, `φ(M)` the Taylor series of `φ`
/// in the nilpotent truncated shift (Horner, exact) and `lead` keeps rows and
/// columns of degree at most `lead_degree`.
pub fn intertwining_residual(space: &TensorSpace, phi: &MoebiusTransform, lead_degree: usize) -> Result<f64> {
    let big_n = space.degree();
    let pi = space.multiplier_matrix(phi, Basis::Monomial)?;
    let taylor = phi.taylor_coefficients(big_n + 1);
    let lead = dim_upto(space.vars(), lead_degree.min(big_n));
    let mut worst = 0.0f64;
    for c in 0..space.vars() {
        let shift = coordinate_shift(space, c);
        let lhs = shift_columns(&shift, &pi);
        let mut rhs = DMatrix::from_element(pi.nrows(), pi.ncols(), zero());
        for &a in taylor.iter().rev() {
            rhs = shift_rows(&shift, &rhs);
            rhs += &pi * a;
        }
        let mut diff = lhs - rhs;
        space.to_orthonormal(&mut diff);
        worst = worst.max(operator_norm(&diff.view((0, 0), (lead, lead)).into_owned()));
    }
    Ok(worst)
}

/// [`intertwining_residual`] on the leading block of degree `⌊N/2⌋`.
pub fn intertwining_check(space: &TensorSpace, phi: &MoebiusTransform) -> Result<f64> {
    require_degree(space, 8)?;
    intertwining_residual(space, phi, space.degree() / 2)
}

/// Joint eigenspace of the adjoint tuple at `w`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointEigenspace {
    /// Numerical dimension of `{v ∈ P_N : M_{z_i}* v = w̄_i v|_{P_{N−1}}}`.
    pub dimension: usize,
    /// `‖A k̂‖` for the normalized truncated kernel section `k̂`.
    pub residual: f64,
    /// Smallest singular value beyond the null space.
    pub gap: f64,
}

/// Solves `M_{z_i}* v = w̄_i·v` jointly over all coordinates, with
/// `M_{z_i}*: P_N → P_{N−1}` and the right side restricted to `P_{N−1}`.
pub fn joint_eigenspace(space: &TensorSpace, w: &[Complex64], tol: f64) -> Result<JointEigenspace> {
    require_degree(space, 2)?;
    if w.len() != space.vars() {
        return Err(Error::ShapeMismatch {
            expected: space.vars(),
            got: w.len(),
        });
    }
    w.iter().try_for_each(|&x| check_in_disc("w", x))?;
    let dim = space.dim();
    let low = dim_upto(space.vars(), space.degree() - 1);
    let vars = space.vars();
    let mut a = DMatrix::from_element(vars * low, dim, zero());
    for i in 0..vars {
        let m = multiplication_matrix(space, i + 1)?.entries.adjoint();
        for r in 0..low {
            for c in 0..dim {
                a[(i * low + r, c)] = m[(r, c)];
            }
            a[(i * low + r, r)] -= w[i].conj();
        }
    }
    let sv = a.clone().svd(false, false).singular_values;
    let mut sorted: Vec<f64> = sv.iter().copied().collect();
    sorted.sort_by(f64::total_cmp);
    let deficit = dim.saturating_sub(sorted.len());
    let small = sorted.iter().filter(|&&s| s <= tol).count();
    let gap = sorted.get(small).copied().unwrap_or(0.0);
    let k = space.orthonormal_coords(&space.kernel_section(w)?);
    let norm = k.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let kv = DMatrix::from_fn(dim, 1, |r, _| k[r] / norm);
    let residual = (a * kv).norm();
    Ok(JointEigenspace {
        dimension: small + deficit,
        residual,
        gap,
    })
}

/// Outcome of [`kernel_covariance_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelCovariance {
    /// `‖Πk_w − c·k_{φ⁻¹w}‖/‖k_{φ⁻¹w}‖` on the leading block.
    pub proportionality_defect: f64,
    /// `||c| − |c(φ⁻¹, w)||`.
    pub modulus_defect: f64,
    pub constant: Complex64,
}

/// Compares `Π(φ)K_N(·, w)` with `K_N(·, φ⁻¹(w))` on coefficients of degree
/// at most `⌊N/2⌋`, where truncation tails stay small.
pub fn kernel_covariance_check(
    space: &TensorSpace,
    phi: &MoebiusTransform,
    w: &[Complex64],
) -> Result<KernelCovariance> {
    let pi = space.multiplier_matrix(phi, Basis::Monomial)?;
    let inv = phi.inverse();
    let kw = space.kernel_section(w)?;
    let moved: Vec<Complex64> = w.iter().map(|&x| inv.eval(x)).collect();
    let target = space.kernel_section(&moved)?;
    let image = &pi * DMatrix::from_column_slice(kw.len(), 1, &kw.coeffs);
    let lead = dim_upto(space.vars(), space.degree() / 2);
    let g = &space.gram()[..lead];
    let dot = |a: &dyn Fn(usize) -> Complex64, b: &dyn Fn(usize) -> Complex64| -> Complex64 {
        (0..lead).map(|k| a(k) * b(k).conj() * g[k]).sum()
    };
    let t = |k: usize| target.coeffs[k];
    let im = |k: usize| image[(k, 0)];
    let tt = dot(&t, &t).re;
    let constant = dot(&im, &t) / tt;
    let resid = |k: usize| image[(k, 0)] - constant * target.coeffs[k];
    let defect = dot(&resid, &resid).re.max(0.0).sqrt() / tt.sqrt();
    let expected: Complex64 = space
        .lambdas()
        .iter()
        .zip(w)
        .map(|(&l, &x)| Cocycle::new(l)?.eval(&inv, x))
        .product::<Result<Complex64>>()?;
    Ok(KernelCovariance {
        proportionality_defect: defect,
        modulus_defect: (constant.norm() - expected.norm()).abs(),
        constant,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalRecord {
    pub n: usize,
    pub lambda_prime: f64,
    pub max_weight_dev: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntertwiningRecord {
    /// `[θ, Re a, Im a]`.
    pub phi_params: [f64; 3],
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousReport {
    pub schema_version: u32,
    /// `blocks[i][n][m] = ‖P_n M_{z_{i+1}} P_m‖`.
    pub blocks: Vec<Vec<Vec<f64>>>,
    pub diagonal: Vec<DiagonalRecord>,
    pub intertwining: Vec<IntertwiningRecord>,
}

impl HomogeneousReport {
    /// Block norms for every coordinate, weight deviations from the ladder
    /// `λ̂ + 2n` for `n ≤ N − 3` (worst over coordinates), and intertwining
    /// residuals on the leading block of degree `⌊N/2⌋` for each `φ`.
    pub fn build(
        decomp: &Decomposition,
        lambda_hat: f64,
        phis: &[MoebiusTransform],
        strategy: Strategy,
    ) -> Result<Self> {
        let space = decomp.space();
        let blocks = (1..=space.vars())
            .map(|i| block_structure_report(decomp, i, strategy).map(|b| b.norms))
            .collect::<Result<_>>()?;
        let top = space.degree().saturating_sub(3);
        let diagonal = (0..=top)
            .filter(|&n| !decomp.summands()[n].is_empty())
            .map(|n| {
                let lambda_prime = lambda_hat + 2.0 * n as f64;
                let mut dev = 0.0f64;
                for i in 1..=space.vars() {
                    let w = diagonal_block_weights(decomp, n, i)?;
                    dev = dev.max(shift_equivalence_check(&w, lambda_prime)?);
                }
                Ok(DiagonalRecord {
                    n,
                    lambda_prime,
                    max_weight_dev: dev,
                })
            })
            .collect::<Result<_>>()?;
        let intertwining = par::map_slice(strategy, phis, |phi| {
            Ok(IntertwiningRecord {
                phi_params: [phi.theta(), phi.a().re, phi.a().im],
                residual: intertwining_residual(space, phi, space.degree() / 2)?,
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;
        Ok(Self {
            schema_version: crate::decompose::SCHEMA_VERSION,
            blocks,
            diagonal,
            intertwining,
        })
    }
}
