use mob_rkhs::decompose::{
    diagonal_cocycle, filtration_defect, polydisc_decompose, symmetric_decomposition, Decomposition,
    DecompositionReport, Parity,
};
use mob_rkhs::discspace::Basis;
use mob_rkhs::{Error, MoebiusTransform, PolyFunction, Strategy, TensorSpace};
use nalgebra::DVector;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn all_vectors(d: &Decomposition) -> Vec<(usize, PolyFunction)> {
    d.summands()
        .iter()
        .flat_map(|s| s.vectors.iter().map(move |v| (s.m, v.clone())))
        .collect()
}

#[test]
fn summands_form_an_orthonormal_basis_of_the_truncation() {
    for lambdas in [[1.0, 1.0], [0.6, 2.3], [2.5, 0.4]] {
        let space = TensorSpace::new(&lambdas, 9).unwrap();
        let d = Decomposition::new(&space, None).unwrap();
        let vs = all_vectors(&d);
        assert_eq!(vs.len(), space.dim());
        for (i, (_, u)) in vs.iter().enumerate() {
            for (j, (_, v)) in vs.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((space.inner(u, v).unwrap() - want).norm() < 1e-10);
            }
        }
        // S_m ⊂ M_{m−1}: (z₁ − z₂)^m divides every vector
        for (m, v) in &vs {
            assert!(filtration_defect(&space, v, *m).unwrap() < 1e-10);
        }
    }
}

#[test]
fn graded_dimensions_count_the_vanishing_order() {
    // in total degree D the summands S_0..S_D take one vector each
    let space = TensorSpace::new(&[1.2, 0.8], 8).unwrap();
    let d = Decomposition::new(&space, None).unwrap();
    for s in d.summands() {
        for (deg, &count) in s.graded_dims.iter().enumerate() {
            assert_eq!(count, usize::from(deg >= s.m), "m={} deg={deg}", s.m);
        }
        assert_eq!(s.len(), 9 - s.m);
        assert!(!s.truncated);
    }
}

#[test]
fn raising_the_truncation_leaves_low_degrees_untouched() {
    let lambdas = [0.9, 1.7];
    let small = TensorSpace::new(&lambdas, 7).unwrap();
    let large = TensorSpace::new(&lambdas, 12).unwrap();
    let ds = Decomposition::new(&small, None).unwrap();
    let dl = Decomposition::new(&large, None).unwrap();
    let embed = |f: &PolyFunction| {
        let mut g = large.zero();
        for (k, a) in small.indices().iter().enumerate() {
            g.coeffs[large.index_of(a).unwrap()] = f.coeffs[k];
        }
        g
    };
    for m in 0..=7 {
        for alpha in small.indices() {
            let f = small.monomial(alpha).unwrap();
            let ps = embed(&ds.summand(m).unwrap().project(&small, &f));
            let pl = dl.summand(m).unwrap().project(&large, &embed(&f));
            assert!((&ps - &pl).max_abs() < 1e-10, "m={m} α={alpha:?}");
        }
    }
}

#[test]
fn group_action_preserves_each_summand() {
    let space = TensorSpace::new(&[1.0, 1.5], 12).unwrap();
    let d = Decomposition::new(&space, None).unwrap();
    let pi = space
        .multiplier_matrix(&MoebiusTransform::new(0.7, c(0.25, -0.1)).unwrap(), Basis::Monomial)
        .unwrap();
    for s in d.summands() {
        for (v, &deg) in s.vectors.iter().zip(&s.degrees) {
            if deg > 6 {
                continue;
            }
            let image = PolyFunction {
                coeffs: (&pi * DVector::from_vec(v.coeffs.clone())).iter().copied().collect(),
            };
            let inside = s.project(&space, &image);
            let outside = space.norm(&(&image - &inside));
            assert!(
                outside <= 1e-6 * space.norm(&image).max(1.0),
                "m={} outside={outside}",
                s.m
            );
        }
    }
}

#[test]
fn both_kernel_routes_agree() {
    let space = TensorSpace::new(&[1.3, 0.9], 12).unwrap();
    let d = Decomposition::new(&space, None).unwrap();
    let pts = [c(0.0, 0.0), c(0.3, 0.1), c(-0.2, 0.35)];
    for m in 0..=6 {
        for z in pts {
            for w in pts {
                let a = d.kernel(m, &[z], &[w]).unwrap();
                let b = d.kernel_projection_route(m, &[z], &[w]).unwrap();
                assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0), "m={m}");
            }
        }
    }
}

#[test]
fn ladder_steps_by_two() {
    for lambdas in [[1.0, 1.0], [0.5, 2.0], [1.7, 0.3]] {
        let space = TensorSpace::new(&lambdas, 14).unwrap();
        let report = mob_rkhs::decompose::decompose(&space, None, Strategy::default()).unwrap();
        let ladder = report.ladder();
        assert!(ladder.len() >= 5);
        for pair in ladder.windows(2) {
            assert_eq!(pair[1].0, pair[0].0 + 1);
            assert!((pair[1].1 - pair[0].1 - 2.0).abs() < 1e-4, "{lambdas:?}: {pair:?}");
        }
        assert!((report.lambda_hat - lambdas[0] - lambdas[1]).abs() < 1e-6);
    }
}

#[test]
fn every_summand_is_witnessed_at_the_origin_and_along_the_diagonal() {
    let space = TensorSpace::new(&[0.8, 1.4], 10).unwrap();
    let d = Decomposition::new(&space, None).unwrap();
    for m in 0..=10 {
        for w in [c(0.0, 0.0), c(0.3, 0.0), c(-0.1, 0.4)] {
            assert!(d.nonemptiness_witness(m, &[w]).unwrap() > 1e-6, "m={m}");
        }
    }
    let anti = Decomposition::new(&TensorSpace::new(&[1.5, 1.5], 10).unwrap(), Some(Parity::Antisymmetric)).unwrap();
    for m in (0..=10).step_by(2) {
        assert!(anti.summand(m).unwrap().is_empty());
        assert!(anti.nonemptiness_witness(m, &[c(0.2, 0.1)]).unwrap() < 1e-12);
    }
}

#[test]
fn diagonal_kernel_transforms_by_the_summand_cocycle() {
    // K_m(z, z) = |c_m(φ_z, z)|²·K_m(0, 0) with φ_z the involution swapping z and 0
    let space = TensorSpace::new(&[1.1, 0.9], 24).unwrap();
    let d = Decomposition::new(&space, None).unwrap();
    for m in 0..=3 {
        let k00 = d.restricted_kernel(m, c(0.0, 0.0), c(0.0, 0.0)).unwrap().re;
        for z in [c(0.3, 0.0), c(0.0, -0.25), c(0.15, 0.2)] {
            let phi = MoebiusTransform::involution_at(z).unwrap();
            let cm = diagonal_cocycle(&space, m, &phi, &[z]).unwrap();
            let kzz = d.restricted_kernel(m, z, z).unwrap().re;
            assert!((kzz - cm.norm_sqr() * k00).abs() < 1e-7 * k00.max(1.0), "m={m} z={z}");
        }
    }
}

#[test]
fn gamma_map_restricts_derivatives_to_the_diagonal() {
    let space = TensorSpace::new(&[1.0, 2.0], 6).unwrap();
    let d = Decomposition::new(&space, None).unwrap();
    for m in 0..=3 {
        let s = d.summand(m).unwrap();
        for (k, v) in s.vectors.iter().enumerate() {
            let g = d.gamma_map(m, v).unwrap();
            assert!((&g - &s.images[k]).max_abs() < 1e-12);
        }
    }
    // f = (z₁ − z₂)·z₁ has Γ_1 f = u; Γ_1 kills M_1, so P_1 f has the same image
    let mut f = space.zero();
    f.coeffs[space.index_of(&[2, 0]).unwrap()] = c(1.0, 0.0);
    f.coeffs[space.index_of(&[1, 1]).unwrap()] = c(-1.0, 0.0);
    let image = d.gamma_map(1, &d.summand(1).unwrap().project(&space, &f)).unwrap();
    assert!((image.coeffs[1] - 1.0).norm() < 1e-12);
    assert!(image.coeffs[0].norm() + image.coeffs[2..].iter().map(|x| x.norm()).sum::<f64>() < 1e-12);
    assert!(matches!(d.gamma_map(1, &f), Err(Error::OutsideSpan { .. })));
    assert!(matches!(
        d.gamma_map(2, &space.monomial(&[0, 0]).unwrap()),
        Err(Error::OutsideSpan { .. })
    ));
}

#[test]
fn parity_splits_the_ladder() {
    let sym = symmetric_decomposition(1.5, 10, Parity::Symmetric).unwrap();
    let anti = symmetric_decomposition(1.5, 10, Parity::Antisymmetric).unwrap();
    for (s, a) in sym.summands.iter().zip(&anti.summands) {
        assert_eq!(s.dim == 0, s.m % 2 == 1);
        assert_eq!(a.dim == 0, a.m % 2 == 0);
        assert_eq!(s.dim + a.dim, 11 - s.m);
    }
    assert!(sym.summands[1].graded_dims.iter().all(|&g| g == 0));
    assert_eq!(anti.reference_m, 1);
    assert!((anti.lambda_hat - 3.0).abs() < 1e-5);
    assert!(sym.ladder_deviation() < 1e-5 && anti.ladder_deviation() < 1e-5);
    assert!(Decomposition::new(&TensorSpace::new(&[1.0, 2.0], 6).unwrap(), Some(Parity::Symmetric)).is_err());
}

#[test]
fn strategies_produce_identical_reports() {
    let space = TensorSpace::new(&[0.7, 1.9], 10).unwrap();
    let seq = DecompositionReport::build(
        &Decomposition::with_strategy(&space, None, Strategy::Sequential).unwrap(),
        Strategy::Sequential,
    )
    .unwrap();
    let par = DecompositionReport::build(
        &Decomposition::with_strategy(&space, None, Strategy::Parallel).unwrap(),
        Strategy::Parallel,
    )
    .unwrap();
    assert_eq!(seq, par);
    let json = serde_json::to_string(&seq).unwrap();
    let back: DecompositionReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back.schema_version, seq.schema_version);
    assert_eq!(back.ladder().len(), seq.ladder().len());
}

#[test]
fn tridisc_multiplicities_grow_linearly() {
    let report = polydisc_decompose(&[0.5, 1.0, 1.25], 8).unwrap();
    let counts: Vec<usize> = report.multiplicities.iter().map(|m| m.multiplicity).collect();
    assert_eq!(&counts[..3], &[1, 2, 3]);
    for (k, m) in report.multiplicities.iter().enumerate().take(3) {
        assert!((m.parameter - 2.75 - 2.0 * k as f64).abs() < 1e-6);
    }
    assert!(report.max_parameter_deviation < 1e-6);
    assert!(matches!(polydisc_decompose(&[1.0, 1.0], 8), Err(Error::Unsupported(_))));
    assert!(matches!(
        polydisc_decompose(&[1.0, 1.0, 1.0], 5),
        Err(Error::InvalidParameter(_))
    ));
}
