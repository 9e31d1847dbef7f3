//! Property-based invariants over randomly generated inputs: parameter
//! constraints survive arbitrary optimizer step sequences, and the distance
//! functions behave like metrics on their models.

use nalgebra::DVector;
use proptest::prelude::*;

use symspace::matkernels::{sym_eig, sym_exp, SpdMatrix, SymMatrix};
use symspace::poincare::{dist_ball, exp_map_ball, log0_ball, mobius_add, BallPoint};
use symspace::spd_pem::{pem_dist, PhiMap};
use symspace::symspace_gi::gi_dist;
use symspace::training::{sgd_step, ParamSpace};

fn vector(dim: usize, magnitude: f64) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-magnitude..magnitude, dim).prop_map(DVector::from_vec)
}

/// Ball point with norm at most `radius` (strictly inside the clamp).
fn ball_point(dim: usize, radius: f64) -> impl Strategy<Value = BallPoint> {
    (vector(dim, 1.0), 0.0..radius).prop_map(|(v, r)| {
        let norm = v.norm();
        if norm <= 1e-9 {
            BallPoint::origin(v.len())
        } else {
            BallPoint::clamped(v * (r / norm))
        }
    })
}

/// SPD matrix with log-spectrum bounded by `magnitude`.
fn spd(dim: usize, magnitude: f64) -> impl Strategy<Value = SpdMatrix> {
    vector(dim * dim, magnitude).prop_map(move |entries| {
        let mut s = nalgebra::DMatrix::zeros(dim, dim);
        let mut k = 0;
        for i in 0..dim {
            for j in 0..dim {
                s[(i, j)] = entries[k];
                k += 1;
            }
        }
        sym_exp(&SymMatrix::new(s).unwrap()).unwrap()
    })
}

/// Step sequence: per-step gradient entries plus a learning rate.
fn steps(
    len: usize,
    width: usize,
    grad_magnitude: f64,
    max_lr: f64,
) -> impl Strategy<Value = Vec<(DVector<f64>, f64)>> {
    prop::collection::vec((vector(width, grad_magnitude), 0.0..max_lr), 1..=len)
}

proptest! {
    // -----------------------------------------------------------------
    // Parameter constraints under arbitrary optimizer step sequences
    // -----------------------------------------------------------------

    #[test]
    fn ball_parameters_never_leave_the_ball(
        init in vector(3, 2.0),
        steps in steps(15, 3, 10.0, 1.0),
    ) {
        let mut param = ParamSpace::ball(init);
        for (grad, lr) in &steps {
            param = sgd_step(&param, grad, *lr);
            let norm = param.value().norm();
            prop_assert!(norm < 1.0, "ball parameter escaped: norm {norm}");
            prop_assert!(param.as_ball_point().coords().norm() < 1.0);
        }
    }

    #[test]
    fn sphere_parameters_keep_unit_norm(
        init in vector(4, 3.0).prop_filter("nonzero start", |v| v.norm() > 1e-6),
        steps in steps(15, 4, 5.0, 1.0),
    ) {
        let mut param = ParamSpace::unit_sphere(init).unwrap();
        for (grad, lr) in &steps {
            param = sgd_step(&param, grad, *lr);
            let norm = param.value().norm();
            prop_assert!((norm - 1.0).abs() <= 1e-12, "sphere norm drifted to {norm}");
        }
    }

    #[test]
    fn spd_parameters_stay_positive_definite(
        init in vector(6, 1.0),
        steps in steps(10, 6, 1.0, 0.2),
    ) {
        // 6 packed entries = symmetric 3x3 log-parameter.
        let mut s = nalgebra::DMatrix::zeros(3, 3);
        let mut k = 0;
        for i in 0..3 {
            for j in i..3 {
                s[(i, j)] = init[k];
                s[(j, i)] = init[k];
                k += 1;
            }
        }
        let mut param = ParamSpace::spd_via_sym_exp(&SymMatrix::new(s).unwrap());
        for (grad, lr) in &steps {
            param = sgd_step(&param, grad, *lr);
            prop_assert!(param.value().iter().all(|v| v.is_finite()));
            let point = param.as_spd_point().unwrap();
            let eig = sym_eig(&SymMatrix::new(point.matrix().clone()).unwrap()).unwrap();
            let smallest = eig.values[eig.values.len() - 1];
            prop_assert!(smallest > 0.0, "lost positive definiteness: {smallest}");
        }
    }

    #[test]
    fn unit_triangular_parameters_keep_their_unit_diagonal(
        init in vector(3, 1.0),
        steps in steps(15, 3, 5.0, 1.0),
    ) {
        // 3 packed entries = strictly-upper part of a 3x3 matrix.
        let mut n = nalgebra::DMatrix::identity(3, 3);
        let mut k = 0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                n[(i, j)] = init[k];
                k += 1;
            }
        }
        let mut param = ParamSpace::unit_upper_triangular(&n).unwrap();
        for (grad, lr) in &steps {
            param = sgd_step(&param, grad, *lr);
            let rebuilt = param.as_unit_upper();
            for i in 0..3 {
                prop_assert_eq!(rebuilt[(i, i)], 1.0);
                for j in 0..i {
                    prop_assert_eq!(rebuilt[(i, j)], 0.0);
                }
            }
        }
    }

    // -----------------------------------------------------------------
    // Ball geometry
    // -----------------------------------------------------------------

    #[test]
    fn mobius_addition_stays_inside_even_at_the_clamp(
        x in vector(3, 2.0),
        y in vector(3, 2.0),
    ) {
        // Raw vectors may land outside; the clamped constructor pins them
        // to the boundary shell, the adversarial case for the sum.
        let x = BallPoint::clamped(x);
        let y = BallPoint::clamped(y);
        let sum = mobius_add(&x, &y);
        prop_assert!(sum.coords().norm() < 1.0);
        prop_assert!(sum.coords().iter().all(|c| c.is_finite()));
    }

    #[test]
    fn mobius_left_cancellation_holds(
        x in ball_point(3, 0.85),
        y in ball_point(3, 0.85),
    ) {
        let recovered = mobius_add(&x.negated(), &mobius_add(&x, &y));
        let defect = (recovered.coords() - y.coords()).norm();
        prop_assert!(defect <= 1e-9, "left cancellation defect {defect:.3e}");
    }

    #[test]
    fn ball_distance_is_a_metric(
        x in ball_point(3, 0.9),
        y in ball_point(3, 0.9),
        z in ball_point(3, 0.9),
    ) {
        let dxy = dist_ball(&x, &y);
        prop_assert!(dxy >= 0.0);
        prop_assert!((dxy - dist_ball(&y, &x)).abs() <= 1e-12);
        prop_assert!(dist_ball(&x, &x) <= 1e-10);
        let slack = 1e-9;
        prop_assert!(dxy <= dist_ball(&x, &z) + dist_ball(&z, &y) + slack);
    }

    #[test]
    fn exp_and_log_at_the_origin_are_inverse(
        v in vector(3, 2.5),
    ) {
        let origin = BallPoint::origin(3);
        let point = exp_map_ball(&origin, &v);
        let back = log0_ball(&point);
        let defect = (&back - &v).norm();
        prop_assert!(
            defect <= 1e-10 * v.norm().max(1.0),
            "round trip defect {defect:.3e} for norm {:.3}",
            v.norm()
        );
    }

    // -----------------------------------------------------------------
    // SPD geometry
    // -----------------------------------------------------------------

    #[test]
    fn log_euclidean_distance_is_a_metric(
        x in spd(3, 0.7),
        y in spd(3, 0.7),
        z in spd(3, 0.7),
    ) {
        let phi = PhiMap::log_euclidean();
        let dxy = pem_dist(&phi, &x, &y).unwrap();
        prop_assert!(dxy >= 0.0);
        prop_assert!((dxy - pem_dist(&phi, &y, &x).unwrap()).abs() <= 1e-12);
        prop_assert!(pem_dist(&phi, &x, &x).unwrap() <= 1e-12);
        let detour = pem_dist(&phi, &x, &z).unwrap() + pem_dist(&phi, &z, &y).unwrap();
        prop_assert!(dxy <= detour + 1e-9);
    }

    #[test]
    fn g_invariant_distance_is_a_metric(
        x in spd(3, 0.7),
        y in spd(3, 0.7),
        z in spd(3, 0.7),
    ) {
        let dxy = gi_dist(&x, &y).unwrap();
        prop_assert!(dxy >= 0.0);
        prop_assert!((dxy - gi_dist(&y, &x).unwrap()).abs() <= 1e-10);
        prop_assert!(gi_dist(&x, &x).unwrap() <= 1e-10);
        let detour = gi_dist(&x, &z).unwrap() + gi_dist(&z, &y).unwrap();
        prop_assert!(dxy <= detour + 1e-8);
    }
}
