//! Disc automorphisms `z ↦ e^{iθ}(z − a)/(1 − āz)` and the power cocycles
//! `c^(λ)(φ, z) = φ′(z)^{λ/2}` built from a fixed holomorphic branch of
//! `log φ′`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_in_disc, Error, Result};

/// Parameters below this magnitude are treated as exact zeros when
/// canonicalizing.
pub const IDENTITY_EPS: f64 = 1e-14;

/// An element of Möb in canonical form: `theta ∈ [0, 2π)`, `|a| < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoebiusTransform {
    theta: f64,
    a: Complex64,
}

impl MoebiusTransform {
    pub fn new(theta: f64, a: Complex64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rotation angle must be finite, got {theta}"
            )));
        }
        check_in_disc("a", a)?;
        Ok(Self::canonical(theta, a))
    }

    fn canonical(theta: f64, a: Complex64) -> Self {
        let mut theta = theta.rem_euclid(TAU);
        if theta < IDENTITY_EPS || TAU - theta < IDENTITY_EPS {
            theta = 0.0;
        }
        let a = if a.norm() < IDENTITY_EPS {
            Complex64::new(0.0, 0.0)
        } else {
            a
        };
        Self { theta, a }
    }

    pub fn identity() -> Self {
        Self {
            theta: 0.0,
            a: Complex64::new(0.0, 0.0),
        }
    }

    pub fn rotation(theta: f64) -> Self {
        Self::canonical(theta, Complex64::new(0.0, 0.0))
    }

    /// The involution `φ_z(w) = (z − w)/(1 − z̄w)` swapping `z` and `0`.
    pub fn involution_at(z: Complex64) -> Result<Self> {
        check_in_disc("z", z)?;
        Ok(Self::canonical(PI, z))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The point sent to `0`.
    pub fn a(&self) -> Complex64 {
        self.a
    }

    /// θ folded into `(−π, π]`.
    pub fn folded_theta(&self) -> f64 {
        if self.theta > PI {
            self.theta - TAU
        } else {
            self.theta
        }
    }

    pub fn is_identity(&self) -> bool {
        self.a.norm() < IDENTITY_EPS && (self.theta < IDENTITY_EPS || TAU - self.theta < IDENTITY_EPS)
    }

    fn unit(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    /// Evaluates `φ(z)`. Defined on the whole closed disc; callers that need
    /// the open-disc contract use [`MoebiusTransform::eval_checked`].
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.unit() * (z - self.a) / (1.0 - self.a.conj() * z)
    }

    pub fn eval_checked(&self, z: Complex64) -> Result<Complex64> {
        check_in_disc("z", z)?;
        Ok(self.eval(z))
    }

    /// `χ = φ ∘ ψ` in canonical form.
    pub fn compose(&self, psi: &MoebiusTransform) -> MoebiusTransform {
        // Matrix form [[e^{iθ}, −e^{iθ}a], [−ā, 1]] up to scale; only the
        // first column and the lower row of the product are needed.
        let (u1, a1) = (self.unit(), self.a);
        let (u2, a2) = (psi.unit(), psi.a);
        let (p1, q1, r1, s1) = (u1, -u1 * a1, -a1.conj(), Complex64::new(1.0, 0.0));
        let (p2, q2, r2) = (u2, -u2 * a2, -a2.conj());
        let p = p1 * p2 + q1 * r2;
        let r = r1 * p2 + s1 * r2;
        let s = r1 * q2 + s1;
        let rot = p / s;
        let a = -(r / s).conj();
        MoebiusTransform::canonical(rot.arg(), a)
    }

    pub fn inverse(&self) -> MoebiusTransform {
        MoebiusTransform::canonical(-self.theta, -self.unit() * self.a)
    }

    /// `φ′(z) = e^{iθ}(1 − |a|²)/(1 − āz)²`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        check_in_disc("z", z)?;
        let d = 1.0 - self.a.conj() * z;
        Ok(self.unit() * (1.0 - self.a.norm_sqr()) / (d * d))
    }

    /// The branch `iθ′ + ln(1 − |a|²) − 2·Log(1 − āz)`, holomorphic on the
    /// disc and identically zero for the identity.
    pub fn log_derivative(&self, z: Complex64) -> Result<Complex64> {
        check_in_disc("z", z)?;
        Ok(Complex64::new((1.0 - self.a.norm_sqr()).ln(), self.folded_theta()) - 2.0 * (1.0 - self.a.conj() * z).ln())
    }

    /// `φ^{(k)}(z)` for `k = 0..=order`.
    pub fn taylor_derivatives(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        check_in_disc("z", z)?;
        let mut out = Vec::with_capacity(order + 1);
        out.push(self.eval(z));
        let ab = self.a.conj();
        let d = 1.0 - ab * z;
        // φ^{(k)}(z) = e^{iθ}(1 − |a|²)·k!·ā^{k−1}/(1 − āz)^{k+1}
        let mut term = self.unit() * (1.0 - self.a.norm_sqr()) / (d * d);
        for k in 1..=order {
            out.push(term);
            term = term * ab * (k as f64 + 1.0) / d;
        }
        Ok(out)
    }

    /// Taylor coefficients of `φ` at the origin up to degree `n`.
    pub fn taylor_coefficients(&self, n: usize) -> Vec<Complex64> {
        // e^{iθ}(z − a)·Σ āᵏ zᵏ
        let ab = self.a.conj();
        let u = self.unit();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        let mut pow = Complex64::new(1.0, 0.0);
        for k in 0..=n {
            out[k] -= u * self.a * pow;
            if k < n {
                out[k + 1] += u * pow;
            }
            pow *= ab;
        }
        out
    }
}

impl Default for MoebiusTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl fmt::Display for MoebiusTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "theta={:.6},a={:.6}{:+.6}i", self.theta, self.a.re, self.a.im)
    }
}

/// The projective cocycle `c^(λ)(φ, z) = exp((λ/2)·log φ′(z))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cocycle {
    lambda: f64,
}

impl Cocycle {
    pub fn new(lambda: f64) -> Result<Self> {
        crate::error::check_positive("lambda", lambda)?;
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eval(&self, phi: &MoebiusTransform, z: Complex64) -> Result<Complex64> {
        Ok((0.5 * self.lambda * phi.log_derivative(z)?).exp())
    }

    /// Taylor coefficients of `z ↦ c^(λ)(φ, z)` at the origin up to degree `n`.
    pub fn taylor_coefficients(&self, phi: &MoebiusTransform, n: usize) -> Vec<Complex64> {
        // e^{(λ/2)(iθ′ + ln(1−|a|²))}·(1 − āz)^{−λ}, the last factor being
        // Σ (λ)_k/k!·āᵏzᵏ.
        let lead = (0.5 * self.lambda * Complex64::new((1.0 - phi.a.norm_sqr()).ln(), phi.folded_theta())).exp();
        let ab = phi.a.conj();
        let mut out = Vec::with_capacity(n + 1);
        let mut term = lead;
        for k in 0..=n {
            out.push(term);
            term = term * ab * (self.lambda + k as f64) / (k as f64 + 1.0);
        }
        out
    }
}

/// Free-function form of [`Cocycle::eval`].
pub fn cocycle_eval(lambda: f64, phi: &MoebiusTransform, z: Complex64) -> Result<Complex64> {
    Cocycle::new(lambda)?.eval(phi, z)
}
