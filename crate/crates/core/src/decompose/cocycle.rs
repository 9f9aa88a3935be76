//! Projective cocycle checks on the bidisc and the cocycles `c_m` carried by
//! the summands.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_in_disc, Error, Result};
use crate::moebius::MoebiusTransform;
use crate::polyspace::TensorSpace;

/// Outcome of [`cocycle_identity_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CocycleCheck {
    /// `max_x |r(x) − r(x₀)|`.
    pub deviation: f64,
    /// `||r(x₀)| − 1|`.
    pub modulus_defect: f64,
    /// `r(x₀)`, the multiplier candidate.
    pub multiplier: Complex64,
}

impl CocycleCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.deviation <= tol && self.modulus_defect <= tol
    }
}

/// For `r(x) = c(φψ, x) / (c(φ, ψ·x)·c(ψ, x))`, measures how far `r` is from
/// a constant unimodular multiplier over `samples` (the first sample is `x₀`).
pub fn cocycle_identity_check<C>(
    c: C,
    phi: &MoebiusTransform,
    psi: &MoebiusTransform,
    samples: &[[Complex64; 2]],
) -> Result<CocycleCheck>
where
    C: Fn(&MoebiusTransform, [Complex64; 2]) -> Result<Complex64>,
{
    if samples.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let phipsi = phi.compose(psi);
    let ratio = |(k, x): (usize, &[Complex64; 2])| -> Result<Complex64> {
        x.iter().try_for_each(|&xi| check_in_disc("x", xi))?;
        let moved = [psi.eval(x[0]), psi.eval(x[1])];
        let den = c(phi, moved)? * c(psi, *x)?;
        if den.norm() == 0.0 || !den.is_finite() {
            return Err(Error::VanishingDenominator { index: k });
        }
        Ok(c(&phipsi, *x)? / den)
    };
    let r0 = ratio((0, &samples[0]))?;
    let mut deviation = 0.0f64;
    for item in samples.iter().enumerate().skip(1) {
        deviation = deviation.max((ratio(item)? - r0).norm());
    }
    Ok(CocycleCheck {
        deviation,
        modulus_defect: (r0.norm() - 1.0).abs(),
        multiplier: r0,
    })
}

/// `c_m(φ, z) = c(φ, ẑ)·φ′(z₁)^m` with `ẑ = (z₁, z₁, z₂, …)` the diagonal
/// lift of the reduced point `z`.
pub fn diagonal_cocycle(space: &TensorSpace, m: usize, phi: &MoebiusTransform, z: &[Complex64]) -> Result<Complex64> {
    if z.len() + 1 != space.vars() {
        return Err(Error::ShapeMismatch {
            expected: space.vars() - 1,
            got: z.len(),
        });
    }
    let mut lifted = Vec::with_capacity(space.vars());
    lifted.push(z[0]);
    lifted.extend_from_slice(z);
    let base = space.cocycle(phi, &lifted)?;
    Ok(base * phi.derivative(z[0])?.powu(m as u32))
}
