use mob_rkhs::decompose::{identify_lambda, Decomposition, KernelLaw};
use mob_rkhs::homogeneous::{
    block_structure_report, component_outside_filtration, diagonal_block_weights, filtration_invariance_check,
    intertwining_check, intertwining_residual, joint_eigenspace, kernel_covariance_check, multiplication_matrix,
    shift_equivalence_check, HomogeneousReport, OperatorBasis,
};
use mob_rkhs::{MoebiusTransform, Strategy, TensorSpace};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240331;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn adjoint_tuple_has_one_dimensional_eigenspaces_spanned_by_kernels() {
    let space = TensorSpace::new(&[1.2, 0.8], 8).unwrap();
    for w in [
        [c(0.0, 0.0), c(0.0, 0.0)],
        [c(0.3, 0.1), c(-0.2, 0.25)],
        [c(0.1, -0.4), c(0.4, 0.0)],
    ] {
        let e = joint_eigenspace(&space, &w, 1e-8).unwrap();
        assert_eq!(e.dimension, 1);
        assert!(e.residual < 1e-8, "{}", e.residual);
        assert!(e.gap > 1e-3);
    }
}

#[test]
fn multiplier_moves_kernel_sections_covariantly() {
    let space = TensorSpace::new(&[1.5, 0.5], 24).unwrap();
    let phis = [
        MoebiusTransform::new(0.4, c(0.2, 0.1)).unwrap(),
        MoebiusTransform::involution_at(c(-0.15, 0.2)).unwrap(),
    ];
    for phi in &phis {
        let k = kernel_covariance_check(&space, phi, &[c(0.1, 0.2), c(-0.3, 0.0)]).unwrap();
        assert!(k.proportionality_defect < 1e-8, "{}", k.proportionality_defect);
        assert!(k.modulus_defect < 1e-8);
    }
}

#[test]
fn diagonal_blocks_agree_across_coordinates_and_with_the_ladder() {
    let space = TensorSpace::new(&[0.7, 1.6], 12).unwrap();
    let d = Decomposition::new(&space, None).unwrap();
    let lambda_hat = identify_lambda(|z| d.restricted_kernel(0, z, z).unwrap().re).unwrap();
    assert!((lambda_hat - KernelLaw::new(&d).unwrap().lambda_hat()).abs() < 1e-6);
    for n in 0..=9 {
        let w1 = diagonal_block_weights(&d, n, 1).unwrap();
        let w2 = diagonal_block_weights(&d, n, 2).unwrap();
        assert_eq!(w1.len(), 12 - n);
        for (a, b) in w1.iter().zip(&w2) {
            assert!((a - b).abs() < 1e-10, "n={n}");
        }
        let dev = shift_equivalence_check(&w1, lambda_hat + 2.0 * n as f64).unwrap();
        assert!(dev < 1e-6, "n={n} dev={dev}");
    }
}

#[test]
fn perturbed_norms_break_the_shift_weights() {
    let space = TensorSpace::new(&[1.0, 1.0], 10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let factors: Vec<f64> = (0..space.dim())
        .map(|_| 1.0 + 1e-3 * rng.gen_range(-1.0..1.0))
        .collect();
    let noisy = space.perturbed(&factors).unwrap();
    let d = Decomposition::new(&noisy, None).unwrap();
    let worst = (0..=4)
        .map(|n| {
            let w = diagonal_block_weights(&d, n, 1).unwrap();
            shift_equivalence_check(&w, 2.0 + 2.0 * n as f64).unwrap()
        })
        .fold(0.0, f64::max);
    assert!(worst > 1e-4, "{worst}");
}

#[test]
fn intertwining_improves_with_truncation() {
    let phi = MoebiusTransform::new(1.1, c(-0.2, 0.3)).unwrap();
    let lambdas = [0.9, 1.4];
    let coarse = intertwining_residual(&TensorSpace::new(&lambdas, 16).unwrap(), &phi, 8).unwrap();
    let fine = intertwining_check(&TensorSpace::new(&lambdas, 24).unwrap(), &phi).unwrap();
    assert!(coarse < 1e-8 && fine < 1e-8, "{coarse} {fine}");
    // past the leading block the truncated Π drops terms
    let full = intertwining_residual(&TensorSpace::new(&lambdas, 16).unwrap(), &phi, 16).unwrap();
    assert!(full > 1e-6, "{full}");
}

#[test]
fn multiplication_keeps_random_elements_inside_the_filtration() {
    let space = TensorSpace::new(&[1.3, 0.6], 8).unwrap();
    let d = Decomposition::new(&space, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    // random f ∈ M_2 of degree ≤ 7, built from S_3 ⊕ S_4 ⊕ …
    for _ in 0..5 {
        let mut f = space.zero();
        for s in d.summands().iter().skip(3) {
            for (v, &deg) in s.vectors.iter().zip(&s.degrees) {
                if deg < 8 {
                    f.axpy(c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), v);
                }
            }
        }
        assert!(component_outside_filtration(&d, &f, 2).unwrap() < 1e-10);
        for i in 0..2 {
            let g = space.multiply_coordinate(&f, i).unwrap();
            let out = component_outside_filtration(&d, &g, 2).unwrap();
            assert!(out < 1e-10 * space.norm(&g).max(1.0), "{out}");
        }
    }
    for n in 0..=6 {
        assert_eq!(filtration_invariance_check(&space, n).unwrap(), 0.0);
    }
}

#[test]
fn multiplication_is_lower_block_triangular_with_a_live_subdiagonal() {
    let space = TensorSpace::new(&[1.0, 2.0], 10).unwrap();
    let d = Decomposition::new(&space, None).unwrap();
    for i in 1..=2 {
        let b = block_structure_report(&d, i, Strategy::default()).unwrap();
        assert!(b.max_upper() < 1e-10);
        assert!(b.norms[1][0] > 1e-2);
        assert!(b.norms[0][0] > 0.5);
    }
    let m = multiplication_matrix(&space, 2).unwrap();
    assert_eq!(m.basis, OperatorBasis::Monomial);
    let s = m.in_summand_basis(&d).unwrap();
    assert_eq!(s.basis, OperatorBasis::Summand);
    assert_eq!(s.entries.shape(), m.entries.shape());
}

#[test]
fn report_collects_every_check() {
    let space = TensorSpace::new(&[1.0, 1.0], 10).unwrap();
    let d = Decomposition::new(&space, None).unwrap();
    let phis = [MoebiusTransform::new(0.3, c(0.1, 0.2)).unwrap()];
    let r = HomogeneousReport::build(&d, 2.0, &phis, Strategy::Sequential).unwrap();
    assert_eq!(r.blocks.len(), 2);
    assert_eq!(r.diagonal.len(), 8);
    assert!(r.diagonal.iter().all(|x| x.max_weight_dev < 1e-6));
    assert!(r.intertwining[0].residual < 1e-8);
    let par = HomogeneousReport::build(&d, 2.0, &phis, Strategy::Parallel).unwrap();
    assert_eq!(r, par);
}
