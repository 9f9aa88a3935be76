use std::f64::consts::{PI, TAU};

use mob_rkhs::{cocycle_eval, MoebiusTransform};
use num_complex::Complex64;
use proptest::prelude::*;

fn disc_point(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, 0.0..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn moebius() -> impl Strategy<Value = MoebiusTransform> {
    (0.0..TAU, disc_point(0.9)).prop_map(|(t, a)| MoebiusTransform::new(t, a).unwrap())
}

fn grid() -> Vec<Complex64> {
    let mut g = vec![Complex64::new(0.0, 0.0)];
    for r in [0.3, 0.6, 0.85] {
        for k in 0..6 {
            g.push(Complex64::from_polar(r, k as f64 * PI / 3.0 + 0.1));
        }
    }
    g
}

fn pointwise_gap(f: &MoebiusTransform, g: &MoebiusTransform) -> f64 {
    grid()
        .iter()
        .map(|&z| (f.eval(z) - g.eval(z)).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn composition_is_associative(f in moebius(), g in moebius(), h in moebius()) {
        let left = f.compose(&g).compose(&h);
        let right = f.compose(&g.compose(&h));
        prop_assert!(pointwise_gap(&left, &right) < 1e-12);
    }

    #[test]
    fn composition_matches_pointwise(f in moebius(), g in moebius()) {
        let fg = f.compose(&g);
        for z in grid() {
            prop_assert!((fg.eval(z) - f.eval(g.eval(z))).norm() < 1e-12);
        }
        prop_assert!(fg.theta() >= 0.0 && fg.theta() < TAU);
        prop_assert!(fg.a().norm() < 1.0);
    }

    #[test]
    fn inverses_cancel(f in moebius()) {
        let id = MoebiusTransform::identity();
        prop_assert!(pointwise_gap(&f.compose(&f.inverse()), &id) < 1e-12);
        prop_assert!(pointwise_gap(&f.inverse().compose(&f), &id) < 1e-12);
    }

    #[test]
    fn chain_rule(f in moebius(), g in moebius(), z in disc_point(0.85)) {
        let lhs = f.compose(&g).derivative(z).unwrap();
        let rhs = f.derivative(g.eval(z)).unwrap() * g.derivative(z).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn log_branch_differs_by_constant_multiple_of_two_pi_i(f in moebius(), g in moebius()) {
        let fg = f.compose(&g);
        let gap = |z: Complex64| {
            fg.log_derivative(z).unwrap()
                - f.log_derivative(g.eval(z)).unwrap()
                - g.log_derivative(z).unwrap()
        };
        let g0 = gap(Complex64::new(0.0, 0.0));
        prop_assert!(g0.re.abs() < 1e-10);
        let k = g0.im / TAU;
        prop_assert!((k - k.round()).abs() < 1e-10);
        for z in grid() {
            prop_assert!((gap(z) - g0).norm() < 1e-10);
        }
    }

    #[test]
    fn log_derivative_exponentiates_to_derivative(f in moebius(), z in disc_point(0.95)) {
        let d = f.derivative(z).unwrap();
        prop_assert!((f.log_derivative(z).unwrap().exp() - d).norm() < 1e-12 * d.norm().max(1.0));
    }

    #[test]
    fn cocycle_never_vanishes(l in 0.1f64..8.0, f in moebius(), z in disc_point(0.95)) {
        prop_assert!(cocycle_eval(l, &f, z).unwrap().norm() > 0.0);
    }

    #[test]
    fn involution_squares_to_identity(z0 in disc_point(0.95)) {
        let s = MoebiusTransform::involution_at(z0).unwrap();
        prop_assert!(s.compose(&s).is_identity() || pointwise_gap(&s.compose(&s), &MoebiusTransform::identity()) < 1e-12);
        prop_assert!(s.eval(z0).norm() < 1e-15);
        prop_assert!((s.eval(Complex64::new(0.0, 0.0)) - z0).norm() < 1e-15);
    }

    #[test]
    fn taylor_derivatives_match_difference_quotients(f in moebius(), z in disc_point(0.5)) {
        let d = f.taylor_derivatives(z, 3).unwrap();
        let h = 1e-5;
        let fd = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
        prop_assert!((d[1] - fd).norm() < 1e-6 * d[1].norm().max(1.0));
        let fd2 = (d[1] - f.taylor_derivatives(z - h, 1).unwrap()[1]) / h;
        prop_assert!((d[2] - fd2).norm() < 1e-3 * d[2].norm().max(1.0));
    }
}

#[test]
fn involution_at_half() {
    let s = MoebiusTransform::involution_at(Complex64::new(0.5, 0.0)).unwrap();
    assert!((s.eval(Complex64::new(0.0, 0.0)) - 0.5).norm() < 1e-15);
    assert!(s.eval(Complex64::new(0.5, 0.0)).norm() < 1e-15);
    assert!((s.derivative(Complex64::new(0.0, 0.0)).unwrap() + 0.75).norm() < 1e-15);
    assert!(MoebiusTransform::involution_at(Complex64::new(1.0, 0.0)).is_err());
}

#[test]
fn hundred_sampled_log_derivatives() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240331);
    for _ in 0..100 {
        let a = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..TAU));
        let f = MoebiusTransform::new(rng.gen_range(-10.0..10.0), a).unwrap();
        let z = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..TAU));
        let d = f.derivative(z).unwrap();
        assert!((f.log_derivative(z).unwrap().exp() - d).norm() < 1e-12 * d.norm().max(1.0));
    }
}
