//! The individual checks behind `decompose` and `verify`.

use std::f64::consts::TAU;

use mob_rkhs::decompose::{
    cocycle_identity_check, Decomposition, DecompositionReport, KernelLaw, Parity, PolydiscReport,
};
use mob_rkhs::discspace::kernel_transform_check;
use mob_rkhs::homogeneous::{block_structure_report, intertwining_residual, HomogeneousReport};
use mob_rkhs::{MoebiusTransform, Result, Strategy, TensorSpace};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::checks::CheckRow;
use crate::config::RunConfig;

/// Sampled Möbius parameters and points stay in `|·| ≤ 1/2`, where the
/// closed-form checks hold to full precision.
const SAMPLE_RADIUS: f64 = 0.5;
const COCYCLE_PAIRS: usize = 8;
const COCYCLE_POINTS: usize = 6;
const KERNEL_SAMPLES: usize = 50;
const INTERTWINING_MAPS: usize = 3;

/// Independent streams of the seeded generator, one per consumer.
#[derive(Clone, Copy)]
enum Stream {
    Noise = 1,
    Cocycle = 2,
    Kernel = 3,
    Intertwining = 4,
}

fn rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream as u64);
    r
}

fn point(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(SAMPLE_RADIUS * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU))
}

fn moebius(rng: &mut ChaCha8Rng) -> MoebiusTransform {
    let theta = rng.gen_range(0.0..TAU);
    MoebiusTransform::new(theta, point(rng)).expect("sampled inside the disc")
}

/// The truncated tensor space, with Gram weights scaled by `1 + ε·r`,
/// `r ~ U(−1, 1)`, in noise-injection mode.
pub fn space(cfg: &RunConfig) -> Result<TensorSpace> {
    let space = TensorSpace::new(&cfg.lambdas, cfg.degree)?;
    match cfg.noise {
        None => Ok(space),
        Some(eps) => {
            let mut r = rng(cfg.seed, Stream::Noise);
            let factors: Vec<f64> = (0..space.dim()).map(|_| 1.0 + eps * r.gen_range(-1.0..1.0)).collect();
            log::info!("perturbing {} Gram weights by up to {eps:e}", factors.len());
            space.perturbed(&factors)
        }
    }
}

/// `max_m route_gap_m / sup K_m(z, z)`, scaled like the kernel-law residual.
fn relative_route_gap(report: &DecompositionReport) -> f64 {
    report
        .summands
        .iter()
        .filter_map(|s| Some(s.route_gap? / s.scale?))
        .fold(0.0, f64::max)
}

pub fn decomposition_rows(cfg: &RunConfig, report: &DecompositionReport) -> Vec<CheckRow> {
    let mut rows = vec![
        CheckRow::new("ladder", report.ladder_deviation(), cfg.tol("ladder")),
        CheckRow::new("kernel_law", report.max_relative_residual(), cfg.tol("kernel_law")),
        CheckRow::new("route_gap", relative_route_gap(report), cfg.tol("route_gap")),
    ];
    if let Some(parity) = report.parity {
        let skip = match parity {
            Parity::Symmetric => 1,
            Parity::Antisymmetric => 0,
        };
        let stray: usize = report.summands.iter().filter(|s| s.m % 2 == skip).map(|s| s.dim).sum();
        rows.push(CheckRow::new("parity_emptiness", stray as f64, 0.0));
    }
    rows
}

pub fn polydisc_rows(cfg: &RunConfig, report: &PolydiscReport) -> Vec<CheckRow> {
    let total: f64 = report.lambdas.iter().sum();
    let miscount = report
        .multiplicities
        .iter()
        .map(|m| {
            let k = ((m.parameter - total) / 2.0).round().max(0.0) as usize;
            m.multiplicity.abs_diff(k + 1)
        })
        .max()
        .unwrap_or(usize::MAX);
    vec![
        CheckRow::new(
            "polydisc_parameters",
            report.max_parameter_deviation,
            cfg.tol("polydisc_parameters"),
        ),
        CheckRow::new("polydisc_multiplicity", miscount as f64, 0.0),
    ]
}

/// `c(φψ, x) = m·c(φ, ψx)·c(ψ, x)` with `|m| = 1`, for the two-factor cocycle
/// of every adjacent pair of weights.
pub fn cocycle_identity(cfg: &RunConfig) -> Result<f64> {
    let mut r = rng(cfg.seed, Stream::Cocycle);
    let mut worst = 0.0f64;
    for pair in cfg.lambdas.windows(2) {
        let space = TensorSpace::new(pair, 1)?;
        for _ in 0..COCYCLE_PAIRS {
            let (phi, psi) = (moebius(&mut r), moebius(&mut r));
            let samples: Vec<[Complex64; 2]> = (0..COCYCLE_POINTS).map(|_| [point(&mut r), point(&mut r)]).collect();
            let check = cocycle_identity_check(|f, x| space.cocycle(f, &x), &phi, &psi, &samples)?;
            worst = worst.max(check.deviation).max(check.modulus_defect);
        }
    }
    Ok(worst)
}

/// `K(φz, φw)·c(φ, z)·conj(c(φ, w)) = K(z, w)` for each weight separately.
pub fn kernel_transform(cfg: &RunConfig) -> Result<f64> {
    let mut r = rng(cfg.seed, Stream::Kernel);
    let mut worst = 0.0f64;
    for &lambda in &cfg.lambdas {
        for _ in 0..KERNEL_SAMPLES {
            let phi = moebius(&mut r);
            let (z, w) = (point(&mut r), point(&mut r));
            worst = worst.max(kernel_transform_check(lambda, &phi, z, w)?);
        }
    }
    Ok(worst)
}

pub fn intertwining_maps(cfg: &RunConfig) -> Vec<MoebiusTransform> {
    let mut r = rng(cfg.seed, Stream::Intertwining);
    (0..INTERTWINING_MAPS).map(|_| moebius(&mut r)).collect()
}

/// Block structure, shift equivalence against the identified ladder and
/// intertwining for the two-factor space.
pub fn homogeneous(cfg: &RunConfig, decomp: &Decomposition) -> Result<(HomogeneousReport, f64)> {
    let lambda_hat = KernelLaw::new(decomp)?.lambda_hat();
    let report = HomogeneousReport::build(decomp, lambda_hat, &intertwining_maps(cfg), Strategy::default())?;
    Ok((report, lambda_hat))
}

pub fn homogeneous_rows(cfg: &RunConfig, report: &HomogeneousReport) -> Vec<CheckRow> {
    let upper = report
        .blocks
        .iter()
        .flat_map(|b| {
            b.iter()
                .enumerate()
                .flat_map(|(n, row)| row.iter().skip(n + 1).copied())
        })
        .fold(0.0, f64::max);
    let shift = report.diagonal.iter().map(|d| d.max_weight_dev).fold(0.0, f64::max);
    let inter = report.intertwining.iter().map(|i| i.residual).fold(0.0, f64::max);
    vec![
        CheckRow::new("block_structure", upper, cfg.tol("block_structure")),
        CheckRow::new("shift_equivalence", shift, cfg.tol("shift_equivalence")),
        CheckRow::new("intertwining", inter, cfg.tol("intertwining")),
    ]
}

/// Block structure and intertwining for three factors, where summands carry
/// several vectors per degree and the weight comparison does not apply.
pub fn polydisc_homogeneous_rows(cfg: &RunConfig, decomp: &Decomposition) -> Result<Vec<CheckRow>> {
    let space = decomp.space();
    let mut upper = 0.0f64;
    for i in 1..=space.vars() {
        upper = upper.max(block_structure_report(decomp, i, Strategy::default())?.max_upper());
    }
    let mut inter = 0.0f64;
    for phi in intertwining_maps(cfg) {
        inter = inter.max(intertwining_residual(space, &phi, space.degree() / 2)?);
    }
    Ok(vec![
        CheckRow::new("block_structure", upper, cfg.tol("block_structure")),
        CheckRow::new("intertwining", inter, cfg.tol("intertwining")),
    ])
}
