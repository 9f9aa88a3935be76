//! Truncated power-series arithmetic on coefficient vectors.

use num_complex::Complex64;

pub(crate) fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Product of two series keeping degrees `0..=n`.
pub(crate) fn mul_truncated(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![zero(); n + 1];
    for (i, &x) in a.iter().enumerate().take(n + 1) {
        if x == zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Horner evaluation.
pub(crate) fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(zero(), |acc, &c| acc * z + c)
}

/// Rising factorial `(x)_n`.
pub fn pochhammer(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (x + k as f64))
}

/// Falling factorial `i!/(i − m)!`, zero when `m > i`.
pub fn falling_factorial(i: usize, m: usize) -> f64 {
    if m > i {
        return 0.0;
    }
    ((i - m + 1)..=i).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}
