//! Randomized invariants of the geometry and objective layers.

use grsd_core::certificates::{
    check_gradient_dominance, check_quadratic_growth, check_smoothness_descent,
    check_weak_quasi_convexity, check_weak_strong_convexity,
};
use grsd_core::grassmann::{
    cs_blocks, distance, exp_map, geodesic_pair, log_map, make_point, principal_angles,
    GrassmannPoint,
};
use grsd_core::rayleigh::{f_value, riemannian_gradient, spectral_data};
use grsd_core::sampling;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;

fn dims_any_k() -> impl Strategy<Value = (usize, usize, u64)> {
    (3usize..10, any::<u64>())
        .prop_flat_map(|(n, seed)| (Just(n), 1..n, Just(seed)))
        .prop_map(|(n, k, seed)| (n, k, seed))
}

fn dims_half_k() -> impl Strategy<Value = (usize, usize, u64)> {
    (4usize..10, any::<u64>())
        .prop_flat_map(|(n, seed)| (Just(n), 1..=n / 2, Just(seed)))
        .prop_map(|(n, k, seed)| (n, k, seed))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exp_log_round_trip((n, k, seed) in dims_any_k(), scale in 0.01f64..1.5) {
        let mut r = rng(seed);
        let x = sampling::random_point(n, k, &mut r);
        let mut g = sampling::random_horizontal(&x, &mut r);
        let spectral = g.spectral_norm();
        prop_assume!(spectral > 1e-12);
        g = g.scale(scale.min(FRAC_PI_2 - 0.05) / spectral);
        let y = exp_map(&x, &g).unwrap();
        let back = log_map(&x, &y).unwrap();
        prop_assert!((back.matrix() - g.matrix()).norm() < 1e-8);
    }

    #[test]
    fn distance_is_a_metric((n, k, seed) in dims_any_k()) {
        let mut r = rng(seed);
        let x = sampling::random_point(n, k, &mut r);
        let y = sampling::random_point(n, k, &mut r);
        let dxy = distance(&x, &y).unwrap();
        prop_assert!(dxy >= 0.0);
        prop_assert!((dxy - distance(&y, &x).unwrap()).abs() < 1e-12);
        prop_assert!(distance(&x, &x).unwrap() < 1e-10);
    }

    #[test]
    fn distance_and_angles_ignore_the_representative((n, k, seed) in dims_any_k()) {
        let mut r = rng(seed);
        let x = sampling::random_point(n, k, &mut r);
        let y = sampling::random_point(n, k, &mut r);
        let q = sampling::random_orthogonal(k, &mut r);
        let p = sampling::random_orthogonal(k, &mut r);
        let xq = GrassmannPoint::from_orthonormal(x.representative() * q).unwrap();
        let yp = GrassmannPoint::from_orthonormal(y.representative() * p).unwrap();
        prop_assert!((distance(&x, &y).unwrap() - distance(&xq, &yp).unwrap()).abs() < 1e-10);
        let a1 = principal_angles(&x, &y).unwrap().angles;
        let a2 = principal_angles(&xq, &yp).unwrap().angles;
        for (t1, t2) in a1.iter().zip(a2.iter()) {
            prop_assert!((t1 - t2).abs() < 1e-10);
        }
    }

    #[test]
    fn toponogov_and_law_of_cosines(
        (n, k, seed) in dims_any_k(),
        dx in 0.05f64..1.5,
        dy in 0.05f64..1.5,
    ) {
        let mut r = rng(seed);
        let z = sampling::random_point(n, k, &mut r);
        let x = sampling::point_at_distance(&z, dx.min(FRAC_PI_2 - 0.06), &mut r).unwrap();
        let y = sampling::point_at_distance(&z, dy.min(FRAC_PI_2 - 0.06), &mut r).unwrap();
        let gx = log_map(&z, &x).unwrap();
        let gy = log_map(&z, &y).unwrap();
        let dxy = distance(&x, &y).unwrap();
        prop_assert!(dxy <= (gx.matrix() - gy.matrix()).norm() + 1e-9);
        let rhs = distance(&z, &x).unwrap().powi(2) + distance(&z, &y).unwrap().powi(2)
            - 2.0 * gx.inner(&gy);
        prop_assert!(dxy * dxy <= rhs + 1e-9);
    }

    #[test]
    fn cs_blocks_reconstruct((n, k, seed) in dims_any_k()) {
        let mut r = rng(seed);
        let x = sampling::random_point(n, k, &mut r);
        let y = sampling::random_point(n, k, &mut r);
        let (xp, yp) = (x.complement(), y.complement());
        let cs = cs_blocks(&x, &xp, &y, &yp).unwrap();
        let r11 = (&cs.u1 * cs.block_11() * cs.v1.transpose()
            - y.representative().transpose() * x.representative()).norm();
        let r12 = (&cs.u1 * cs.block_12() * cs.v2.transpose()
            - y.representative().transpose() * &xp).norm();
        let r21 = (&cs.u2 * cs.block_21() * cs.v1.transpose()
            - yp.transpose() * x.representative()).norm();
        let r22 = (&cs.u2 * cs.block_22() * cs.v2.transpose() - yp.transpose() * &xp).norm();
        prop_assert!(r11.max(r12).max(r21).max(r22) < 1e-9);
    }

    #[test]
    fn geodesic_pair_is_unit_speed((n, k, seed) in dims_half_k(), d in 0.1f64..1.4) {
        let mut r = rng(seed);
        let x = sampling::random_point(n, k, &mut r);
        let y = sampling::point_at_distance(&x, d, &mut r).unwrap();
        let dist_xy = distance(&x, &y).unwrap();
        let (xp, yp) = (x.complement(), y.complement());
        for (t, s) in [(0.0, 1.0), (0.3, 0.8), (0.5, 0.5)] {
            let (gt, gtp) = geodesic_pair(&x, &xp, &y, &yp, t).unwrap();
            let (gs, _) = geodesic_pair(&x, &xp, &y, &yp, s).unwrap();
            let pt = make_point(&gt).unwrap();
            let ps = make_point(&gs).unwrap();
            prop_assert!(
                (distance(&pt, &ps).unwrap() - (t - s).abs() * dist_xy).abs() < 1e-8
            );
            prop_assert!((gt.transpose() * &gtp).norm() < 1e-10);
        }
    }

    #[test]
    fn gradient_spectral_norm_is_bounded((n, k, seed) in dims_any_k(), delta in 0.0f64..4.0) {
        let mut r = rng(seed);
        let spectrum = sampling::random_spectrum_with_gap(n, k, delta, &mut r);
        let a = sampling::psd_with_spectrum(&spectrum, true, &mut r).unwrap();
        let spec = spectral_data(&a, k).unwrap();
        let x = sampling::random_point(n, k, &mut r);
        let grad = riemannian_gradient(&a, &x).unwrap();
        prop_assert!(grad.spectral_norm() <= 0.5 * spec.gamma() + 1e-9);
    }

    #[test]
    fn objective_is_representative_invariant((n, k, seed) in dims_any_k()) {
        let mut r = rng(seed);
        let spectrum = sampling::random_spectrum_with_gap(n, k, 0.5, &mut r);
        let a = sampling::psd_with_spectrum(&spectrum, true, &mut r).unwrap();
        let x = sampling::random_point(n, k, &mut r);
        let q = sampling::random_orthogonal(k, &mut r);
        let xq = GrassmannPoint::from_orthonormal(x.representative() * q).unwrap();
        prop_assert!((f_value(&a, &x).unwrap() - f_value(&a, &xq).unwrap()).abs() < 1e-10);
        let g1 = riemannian_gradient(&a, &x).unwrap().norm();
        let g2 = riemannian_gradient(&a, &xq).unwrap().norm();
        prop_assert!((g1 - g2).abs() < 1e-10);
    }

    #[test]
    fn convexity_certificates_hold(
        (n, k, seed) in dims_half_k(),
        delta_idx in 0usize..4,
        theta_frac in 0.01f64..0.99,
    ) {
        let mut r = rng(seed);
        let delta = [0.0, 0.1, 1.0, 5.0][delta_idx];
        let spectrum = sampling::random_spectrum_with_gap(n, k, delta, &mut r);
        let a = sampling::psd_with_spectrum(&spectrum, true, &mut r).unwrap();
        let spec = spectral_data(&a, k).unwrap();
        let theta_k = theta_frac * (FRAC_PI_2 - 0.05);
        let mut angles: Vec<f64> =
            (0..k - 1).map(|_| r.random_range(0.0..theta_k.max(1e-6))).collect();
        angles.push(theta_k);
        angles.sort_by(|p, q| p.partial_cmp(q).unwrap());
        let x = sampling::point_at_angles(&spec.leading_block, &angles, &mut r).unwrap();

        prop_assert!(check_weak_quasi_convexity(&a, k, &x).unwrap().holds);
        let qg = check_quadratic_growth(&a, k, &x).unwrap();
        prop_assert!(qg.bound.holds && qg.intermediate.holds);
        prop_assert!(check_weak_strong_convexity(&a, k, &x).unwrap().holds);
        prop_assert!(check_gradient_dominance(&a, k, &x).unwrap().holds);

        let y = sampling::point_at_distance(&x, 0.9, &mut r).unwrap();
        prop_assert!(check_smoothness_descent(&a, k, &x, &y).unwrap().holds);
    }
}
