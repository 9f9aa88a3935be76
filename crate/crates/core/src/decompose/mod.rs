//! Splitting a tensor space into the summands `S_m` of the diagonal
//! filtration and identifying each as a discrete series.

use serde::{Deserialize, Serialize};

mod cocycle;
mod curvature;
mod filtration;
mod polydisc;
mod report;
mod summand;

pub use cocycle::{cocycle_identity_check, diagonal_cocycle, CocycleCheck};
pub use curvature::{curvature_at, default_grid, identify_lambda, identify_lambda_on, CURVATURE_STEP};
pub use filtration::{
    diagonal_derivative, filtration_defect, parity_projection, reduced_indices, vanishing_filtration_basis,
    vanishing_generator,
};
pub use polydisc::{polydisc_decompose, polydisc_decompose_with, PolydiscComponent, PolydiscReport};
pub use report::{
    decompose, f_factor, kernel_grid, route_gap, symmetric_decomposition, verify_summand_kernel, DecompositionReport,
    FactorSample, KernelLaw, Multiplicity, SummandRecord, KERNEL_HEADROOM, PARAMETER_HEADROOM, SCHEMA_VERSION,
};
pub use summand::{summand_basis, Decomposition, SubspaceBasis};

/// Behaviour under `(z₁, z₂) ↦ (z₂, z₁)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}
