//! The bidisc pipeline: kernels of every summand, the identified parameter
//! ladder, and the factorization `K_m = const·F·B^(λ+2m)·F̄`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discspace::truncated_kernel_eval;
use crate::error::{Error, Result};
use crate::par::{self, Strategy};
use crate::polyspace::TensorSpace;

use super::curvature::identify_lambda_on;
use super::summand::{pair, Decomposition};
use super::Parity;

pub const SCHEMA_VERSION: u32 = 1;

/// Summands closer than this to the degree bound get no kernel residual.
pub const KERNEL_HEADROOM: usize = 4;

/// Summands closer than this to the degree bound get no parameter.
pub const PARAMETER_HEADROOM: usize = 2;

/// Sample points for kernel residuals: radii 0, 0.2, 0.4 at eight angles.
pub fn kernel_grid() -> Vec<Complex64> {
    let mut grid = vec![Complex64::new(0.0, 0.0)];
    for r in [0.2, 0.4] {
        for k in 0..8 {
            grid.push(Complex64::from_polar(r, k as f64 * std::f64::consts::FRAC_PI_4));
        }
    }
    grid
}

fn require_bidisc(decomp: &Decomposition) -> Result<()> {
    if decomp.space().vars() != 2 {
        return Err(Error::Unsupported(format!(
            "kernel reports need a two-variable space, got {}",
            decomp.space().vars()
        )));
    }
    Ok(())
}

fn diag_kernel(decomp: &Decomposition, m: usize, z: Complex64) -> f64 {
    decomp.kernel(m, &[z], &[z]).map(|k| k.re).unwrap_or(f64::NAN)
}

/// Reference data shared by every summand's kernel law: the lowest
/// non-empty summand `m₀`, its curvature parameter at the origin and
/// `K_{m₀}(0, 0)`. Off the origin the curvature of a truncated kernel is
/// biased at low degree, while at the origin only degree-one terms enter.
#[derive(Clone, Debug)]
pub struct KernelLaw<'a> {
    decomp: &'a Decomposition,
    reference_m: usize,
    reference_lambda: f64,
    reference_k00: f64,
}

impl<'a> KernelLaw<'a> {
    pub fn new(decomp: &'a Decomposition) -> Result<Self> {
        require_bidisc(decomp)?;
        let reference_m = decomp.lowest_nonempty().ok_or(Error::EmptySummand { m: 0 })?;
        let reference_lambda = identify_lambda_on(|z| diag_kernel(decomp, reference_m, z), &[zero()])?;
        let reference_k00 = decomp.restricted_kernel(reference_m, zero(), zero())?.re;
        if reference_k00 <= 0.0 {
            return Err(Error::NonPositiveKernel {
                z: zero(),
                value: reference_k00,
            });
        }
        Ok(Self {
            decomp,
            reference_m,
            reference_lambda,
            reference_k00,
        })
    }

    pub fn reference_m(&self) -> usize {
        self.reference_m
    }

    /// `λ̂`, so that summand `m` carries `λ̂ + 2m`.
    pub fn lambda_hat(&self) -> f64 {
        self.reference_lambda - 2.0 * self.reference_m as f64
    }

    /// `F(z) = K_{m₀}(z, 0)/sqrt(K_{m₀}(0, 0))`, positive at the origin.
    pub fn f_factor(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.decomp.restricted_kernel(self.reference_m, z, zero())? / self.reference_k00.sqrt())
    }

    /// `(K_m(0,0)/K_{m₀}(0,0))·F(z)·B_{N−m}^(λ̂+2m)(z, w)·conj(F(w))`, with the
    /// model kernel truncated at the degree the summand retains.
    pub fn predicted(&self, m: usize, z: Complex64, w: Complex64) -> Result<Complex64> {
        let k00 = self.decomp.restricted_kernel(m, zero(), zero())?.re;
        let lambda = self.lambda_hat() + 2.0 * m as f64;
        let n = self.decomp.space().degree() - m;
        let b = truncated_kernel_eval(lambda, z, w, n)?;
        Ok(k00 / self.reference_k00 * self.f_factor(z)? * b * self.f_factor(w)?.conj())
    }

    /// `sup_{z ∈ grid} K_m(z, z)`, which bounds `|K_m(z, w)|` on the grid.
    pub fn scale(&self, m: usize, grid: &[Complex64]) -> Result<f64> {
        grid.iter().try_fold(
            0.0f64,
            |acc, &z| Ok(acc.max(self.decomp.restricted_kernel(m, z, z)?.re)),
        )
    }

    /// `sup_{z,w ∈ grid} |K_m(z, w) − predicted(m, z, w)|`.
    pub fn residual(&self, m: usize, grid: &[Complex64]) -> Result<f64> {
        let n = self.decomp.space().degree();
        if m + KERNEL_HEADROOM > n {
            return Err(Error::InvalidParameter(format!(
                "summand {m} leaves fewer than {KERNEL_HEADROOM} graded levels below degree {n}"
            )));
        }
        if self.decomp.summand(m)?.is_empty() {
            return Err(Error::EmptySummand { m });
        }
        let images: Vec<Vec<Complex64>> = grid
            .iter()
            .map(|&z| self.decomp.image_values(m, &[z]))
            .collect::<Result<_>>()?;
        let f: Vec<Complex64> = grid.iter().map(|&z| self.f_factor(z)).collect::<Result<_>>()?;
        let k00 = self.decomp.restricted_kernel(m, zero(), zero())?.re;
        let lambda = self.lambda_hat() + 2.0 * m as f64;
        let mut worst = 0.0f64;
        for (i, &z) in grid.iter().enumerate() {
            for (j, &w) in grid.iter().enumerate() {
                let b = truncated_kernel_eval(lambda, z, w, n - m)?;
                let want = k00 / self.reference_k00 * f[i] * b * f[j].conj();
                worst = worst.max((pair(&images[i], &images[j]) - want).norm());
            }
        }
        Ok(worst)
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `F(z)` for the space's reference summand.
pub fn f_factor(decomp: &Decomposition, z: Complex64) -> Result<Complex64> {
    KernelLaw::new(decomp)?.f_factor(z)
}

/// Kernel residual of summand `m` over [`kernel_grid`].
pub fn verify_summand_kernel(decomp: &Decomposition, m: usize) -> Result<f64> {
    KernelLaw::new(decomp)?.residual(m, &kernel_grid())
}

/// Largest gap between the two `K_m` routes over `grid`.
pub fn route_gap(decomp: &Decomposition, m: usize, grid: &[Complex64]) -> Result<f64> {
    let a: Vec<Vec<Complex64>> = grid
        .iter()
        .map(|&z| decomp.image_values(m, &[z]))
        .collect::<Result<_>>()?;
    let b: Vec<Vec<Complex64>> = grid
        .iter()
        .map(|&z| decomp.section_values(m, &[z]))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            worst = worst.max((pair(&a[i], &a[j]) - pair(&b[i], &b[j])).norm());
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummandRecord {
    pub m: usize,
    pub dim: usize,
    pub graded_dims: Vec<usize>,
    /// `K_m(0, 0)`; absent for empty summands.
    pub k00: Option<f64>,
    /// Curvature of `K_m` at the origin.
    pub parameter: Option<f64>,
    /// `sup K_m(z, z)` over the grid; absolute errors scale with it, and it
    /// grows combinatorially in `m`.
    pub scale: Option<f64>,
    /// Kernel-law residual over the grid.
    pub residual: Option<f64>,
    /// `residual / scale`.
    pub relative_residual: Option<f64>,
    /// Gap between the orthonormal-sum and projected-section routes.
    pub route_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorSample {
    pub z: Complex64,
    pub value: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub parameter: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub schema_version: u32,
    pub lambdas: Vec<f64>,
    pub degree: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub parity: Option<Parity>,
    pub lambda_hat: f64,
    pub reference_m: usize,
    pub summands: Vec<SummandRecord>,
    pub f_factor: Vec<FactorSample>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub multiplicities: Option<Vec<Multiplicity>>,
}

impl DecompositionReport {
    /// Builds the full report for a two-variable space.
    pub fn build(decomp: &Decomposition, strategy: Strategy) -> Result<Self> {
        let law = KernelLaw::new(decomp)?;
        let n = decomp.space().degree();
        let grid = kernel_grid();
        let summands = par::map_range(strategy, n + 1, |m| -> Result<SummandRecord> {
            let basis = decomp.summand(m)?;
            let mut rec = SummandRecord {
                m,
                dim: basis.len(),
                graded_dims: basis.graded_dims.clone(),
                k00: None,
                parameter: None,
                scale: None,
                residual: None,
                relative_residual: None,
                route_gap: None,
            };
            if basis.is_empty() {
                return Ok(rec);
            }
            rec.k00 = Some(decomp.restricted_kernel(m, zero(), zero())?.re);
            if m + PARAMETER_HEADROOM <= n {
                rec.parameter = Some(identify_lambda_on(|z| diag_kernel(decomp, m, z), &[zero()])?);
            }
            if m + KERNEL_HEADROOM <= n {
                let residual = law.residual(m, &grid)?;
                let scale = law.scale(m, &grid)?;
                rec.scale = Some(scale);
                rec.residual = Some(residual);
                rec.relative_residual = Some(residual / scale);
                rec.route_gap = Some(route_gap(decomp, m, &grid)?);
            }
            Ok(rec)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let f_factor = [0.0, 0.2, 0.4]
            .iter()
            .map(|&r| {
                let z = Complex64::new(r, 0.0);
                Ok(FactorSample {
                    z,
                    value: law.f_factor(z)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            lambdas: decomp.space().lambdas().to_vec(),
            degree: n,
            parity: decomp.parity(),
            lambda_hat: law.lambda_hat(),
            reference_m: law.reference_m(),
            summands,
            f_factor,
            multiplicities: None,
        })
    }

    /// Identified parameters of non-empty summands, as `(m, parameter)`.
    pub fn ladder(&self) -> Vec<(usize, f64)> {
        self.summands
            .iter()
            .filter_map(|s| s.parameter.map(|p| (s.m, p)))
            .collect()
    }

    /// `max_m |parameter_m − (λ̂ + 2m)|`.
    pub fn ladder_deviation(&self) -> f64 {
        self.ladder()
            .iter()
            .map(|&(m, p)| (p - self.lambda_hat - 2.0 * m as f64).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.summands.iter().filter_map(|s| s.residual).fold(0.0, f64::max)
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.summands
            .iter()
            .filter_map(|s| s.relative_residual)
            .fold(0.0, f64::max)
    }

    pub fn max_route_gap(&self) -> f64 {
        self.summands.iter().filter_map(|s| s.route_gap).fold(0.0, f64::max)
    }
}

/// Full pipeline for a space, optionally restricted to a parity subspace.
pub fn decompose(space: &TensorSpace, parity: Option<Parity>, strategy: Strategy) -> Result<DecompositionReport> {
    let decomp = Decomposition::with_strategy(space, parity, strategy)?;
    DecompositionReport::build(&decomp, strategy)
}

/// The pipeline inside the symmetric or antisymmetric part of the `λ`–`λ`
/// tensor space. Summands of the wrong parity must come out empty.
pub fn symmetric_decomposition(lambda: f64, degree: usize, parity: Parity) -> Result<DecompositionReport> {
    let space = TensorSpace::new(&[lambda, lambda], degree)?;
    let report = decompose(&space, Some(parity), Strategy::default())?;
    let skip = match parity {
        Parity::Symmetric => 1,
        Parity::Antisymmetric => 0,
    };
    for s in report.summands.iter().filter(|s| s.m % 2 == skip) {
        if s.dim != 0 {
            return Err(Error::ContractViolation(format!(
                "{parity:?} summand {} should be empty but has dimension {}",
                s.m, s.dim
            )));
        }
    }
    Ok(report)
}
