//! Recovering the discrete-series parameter from a kernel's curvature:
//! `λ = (1 − |z|²)²·∂∂̄ log K(z, z)` whenever `K = F·B^(λ)·F̄`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Finite-difference step in each of `Re z`, `Im z`.
pub const CURVATURE_STEP: f64 = 1e-3;

/// Default sample grid.
pub fn default_grid() -> Vec<Complex64> {
    vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(0.2, 0.0),
        Complex64::new(-0.2, 0.0),
        Complex64::new(0.0, 0.2),
        Complex64::new(0.0, -0.2),
        Complex64::new(0.2, 0.2),
    ]
}

fn log_kernel<F: Fn(Complex64) -> f64>(k: &F, z: Complex64) -> Result<f64> {
    let v = k(z);
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::NonPositiveKernel { z, value: v });
    }
    Ok(v.ln())
}

/// `(1 − |z|²)²·∂∂̄ log K(z, z)` with `∂∂̄ = ¼Δ` and a fourth-order central
/// stencil in each real direction.
pub fn curvature_at<F: Fn(Complex64) -> f64>(kernel_diag: &F, z: Complex64) -> Result<f64> {
    let h = CURVATURE_STEP;
    let center = log_kernel(kernel_diag, z)?;
    let mut lap = 0.0;
    for dir in [Complex64::new(h, 0.0), Complex64::new(0.0, h)] {
        let p1 = log_kernel(kernel_diag, z + dir)?;
        let m1 = log_kernel(kernel_diag, z - dir)?;
        let p2 = log_kernel(kernel_diag, z + 2.0 * dir)?;
        let m2 = log_kernel(kernel_diag, z - 2.0 * dir)?;
        lap += (-p2 + 16.0 * p1 - 30.0 * center + 16.0 * m1 - m2) / (12.0 * h * h);
    }
    let w = 1.0 - z.norm_sqr();
    Ok(w * w * 0.25 * lap)
}

/// Mean curvature parameter over `grid`.
pub fn identify_lambda_on<F: Fn(Complex64) -> f64>(kernel_diag: F, grid: &[Complex64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut sum = 0.0;
    for &z in grid {
        sum += curvature_at(&kernel_diag, z)?;
    }
    Ok(sum / grid.len() as f64)
}

/// Mean curvature parameter over [`default_grid`].
pub fn identify_lambda<F: Fn(Complex64) -> f64>(kernel_diag: F) -> Result<f64> {
    identify_lambda_on(kernel_diag, &default_grid())
}
