//! Two-stage decomposition on the tridisc: split along `{(z₁, z₁, z₂)}`,
//! re-embed each summand as a bidisc space, and split again.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Strategy};
use crate::polyspace::TensorSpace;

use super::curvature::identify_lambda_on;
use super::report::{Multiplicity, PARAMETER_HEADROOM, SCHEMA_VERSION};
use super::summand::Decomposition;

/// Images under `Γ_k` must be single monomials; anything else above this
/// fraction of the leading coefficient is a contract violation.
const MONOMIAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolydiscComponent {
    /// First-stage index (order of vanishing on `{(z₁, z₁, z₂)}`).
    pub k3: usize,
    /// Second-stage index inside the re-embedded bidisc space.
    pub k2: usize,
    pub dim: usize,
    pub parameter: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolydiscReport {
    pub schema_version: u32,
    pub lambdas: Vec<f64>,
    pub degree: usize,
    pub components: Vec<PolydiscComponent>,
    /// Indexed by `K = k₂ + k₃`, nominal parameter `Λ + 2K`.
    pub multiplicities: Vec<Multiplicity>,
    /// `max |parameter − (Λ + 2(k₂ + k₃))|` over the components.
    pub max_parameter_deviation: f64,
}

/// The bidisc space carried by first-stage summand `k`: coordinates
/// `(u, v)` for the restriction to `{(u, u, v)}`, Gram weights making the
/// `Γ_k`-images of the orthonormal summand basis orthonormal.
fn embedded_space(decomp: &Decomposition, k: usize) -> Result<TensorSpace> {
    let space = decomp.space();
    let basis = decomp.summand(k)?;
    let lambdas = space.lambdas();
    let degree = space.degree() - k;
    let mut gram = vec![f64::NAN; basis.reduced.len()];
    for image in &basis.images {
        let (pos, lead) = image
            .coeffs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .ok_or(Error::EmptySummand { m: k })?;
        let spill = image
            .coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pos)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        if spill > MONOMIAL_TOL * lead.norm() {
            return Err(Error::ContractViolation(format!(
                "summand {k} image is not a monomial (spill {spill:e})"
            )));
        }
        gram[pos] = 1.0 / lead.norm_sqr();
    }
    if gram.iter().any(|g| g.is_nan()) {
        return Err(Error::ContractViolation(format!(
            "summand {k} images miss some monomials of degree ≤ {degree}"
        )));
    }
    TensorSpace::with_gram(&[lambdas[0] + lambdas[1] + 2.0 * k as f64, lambdas[2]], degree, gram)
}

/// Decomposes the `λ₁`–`λ₂`–`λ₃` tridisc space truncated at total degree
/// `degree` and aggregates multiplicities of `Λ + 2K` for `K ≤ degree − 2`.
pub fn polydisc_decompose(lambdas: &[f64], degree: usize) -> Result<PolydiscReport> {
    polydisc_decompose_with(lambdas, degree, Strategy::default())
}

pub fn polydisc_decompose_with(lambdas: &[f64], degree: usize, strategy: Strategy) -> Result<PolydiscReport> {
    if lambdas.len() != 3 {
        return Err(Error::Unsupported(format!(
            "polydisc decomposition is implemented for three factors, got {}",
            lambdas.len()
        )));
    }
    if degree < 6 {
        return Err(Error::InvalidParameter(format!(
            "polydisc decomposition needs degree ≥ 6, got {degree}"
        )));
    }
    let space = TensorSpace::new(lambdas, degree)?;
    let first = Decomposition::with_strategy(&space, None, strategy)?;
    let origin = [Complex64::new(0.0, 0.0)];
    let stages = par::map_range(strategy, degree + 1, |k3| -> Result<Vec<PolydiscComponent>> {
        if first.summand(k3)?.is_empty() {
            return Ok(Vec::new());
        }
        let inner_space = embedded_space(&first, k3)?;
        let inner = Decomposition::with_strategy(&inner_space, None, Strategy::Sequential)?;
        let inner_degree = inner_space.degree();
        let mut out = Vec::new();
        for k2 in (0..=inner_degree).filter(|k2| k2 + PARAMETER_HEADROOM <= inner_degree) {
            let basis = inner.summand(k2)?;
            if basis.is_empty() {
                continue;
            }
            let parameter = identify_lambda_on(
                |z| inner.kernel(k2, &[z], &[z]).map(|k| k.re).unwrap_or(f64::NAN),
                &origin,
            )?;
            out.push(PolydiscComponent {
                k3,
                k2,
                dim: basis.len(),
                parameter,
            });
        }
        Ok(out)
    });
    let mut components = Vec::new();
    for stage in stages {
        components.extend(stage?);
    }
    let total: f64 = lambdas.iter().sum();
    let max_parameter_deviation = components
        .iter()
        .map(|c| (c.parameter - total - 2.0 * (c.k2 + c.k3) as f64).abs())
        .fold(0.0, f64::max);
    let mut groups: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for c in &components {
        let e = groups.entry(c.k2 + c.k3).or_insert((0.0, 0));
        e.0 += c.parameter;
        e.1 += 1;
    }
    let multiplicities = groups
        .into_values()
        .map(|(sum, count)| Multiplicity {
            parameter: sum / count as f64,
            multiplicity: count,
        })
        .collect();
    Ok(PolydiscReport {
        schema_version: SCHEMA_VERSION,
        lambdas: lambdas.to_vec(),
        degree,
        components,
        multiplicities,
        max_parameter_deviation,
    })
}
