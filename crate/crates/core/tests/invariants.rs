use approx::assert_relative_eq;
use ccenum::acsystem::{ac_residual, distances_of, matrix_residual_fro};
use ccenum::classify::{canonicalize, fingerprint, same_class};
use ccenum::geometry::{
    action_gradient, action_value, cc_hessian, cc_residual, center_of_mass, inertia, lambda_of,
    normalize_lambda, Configuration,
};
use ccenum::PotentialParams;
use nalgebra::{DVector, Vector2};
use proptest::prelude::*;

fn masses(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.2f64..5.0, n)
}

fn spread_config(n: usize) -> impl Strategy<Value = Configuration> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n)
        .prop_map(|pts| {
            Configuration::new(pts.into_iter().map(|(x, y)| Vector2::new(x, y)).collect())
        })
        .prop_filter("bodies kept apart", |c| c.min_separation() > 0.25)
}

fn case() -> impl Strategy<Value = (PotentialParams, Configuration)> {
    (3usize..=5, prop_oneof![Just(0.0), 0.1f64..3.0]).prop_flat_map(|(n, alpha)| {
        (masses(n), spread_config(n))
            .prop_map(move |(m, c)| (PotentialParams::new(alpha, m).unwrap(), c))
    })
}

fn sup(v: &DVector<f64>) -> f64 {
    v.amax()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_shifts_residual((p, c) in case(), dx in -3.0f64..3.0, dy in -3.0f64..3.0) {
        let v = Vector2::new(dx, dy);
        let r0 = cc_residual(&p, &c).unwrap();
        let r1 = cc_residual(&p, &c.translated(v)).unwrap();
        for i in 0..p.n() {
            prop_assert!((r1[2 * i] - r0[2 * i] - dx).abs() < 1e-9 * (1.0 + sup(&r0)));
            prop_assert!((r1[2 * i + 1] - r0[2 * i + 1] - dy).abs() < 1e-9 * (1.0 + sup(&r0)));
        }
    }

    #[test]
    fn rotation_commutes_with_residual((p, c) in case(), angle in 0.0f64..6.3) {
        let r_rot = cc_residual(&p, &c.rotated(angle)).unwrap();
        let rotated_r = Configuration::from_flat(&cc_residual(&p, &c).unwrap()).rotated(angle).to_flat();
        prop_assert!(sup(&(r_rot - rotated_r)) < 1e-10 * (1.0 + sup(&c.to_flat())));
    }

    #[test]
    fn weighted_residual_sum_is_weighted_center((p, c) in case()) {
        let r = cc_residual(&p, &c).unwrap();
        let m = p.masses();
        let mut s = Vector2::zeros();
        for i in 0..p.n() {
            s += Vector2::new(r[2 * i], r[2 * i + 1]) * m[i];
        }
        let expected = center_of_mass(&p, &c).unwrap() * p.total_mass();
        prop_assert!((s - expected).norm() < 1e-9 * (1.0 + expected.norm()));
    }

    #[test]
    fn gradient_matches_differences((p, c) in case()) {
        let g = action_gradient(&p, &c).unwrap();
        let x = c.to_flat();
        let h = 1e-6;
        for k in 0..x.len() {
            let mut up = x.clone();
            up[k] += h;
            let mut dn = x.clone();
            dn[k] -= h;
            let fd = (action_value(&p, &Configuration::from_flat(&up)).unwrap()
                - action_value(&p, &Configuration::from_flat(&dn)).unwrap())
                / (2.0 * h);
            prop_assert!((fd - g[k]).abs() < 1e-5 * (1.0 + sup(&g)), "k={k} fd={fd} g={}", g[k]);
        }
    }

    #[test]
    fn hessian_matches_differences((p, c) in case()) {
        let hess = cc_hessian(&p, &c).unwrap();
        let x = c.to_flat();
        let h = 1e-5;
        let scale = 1.0 + hess.amax();
        for k in 0..x.len() {
            let mut up = x.clone();
            up[k] += h;
            let mut dn = x.clone();
            dn[k] -= h;
            let col = (action_gradient(&p, &Configuration::from_flat(&up)).unwrap()
                - action_gradient(&p, &Configuration::from_flat(&dn)).unwrap())
                / (2.0 * h);
            prop_assert!(sup(&(col - hess.column(k))) < 1e-6 * scale);
        }
        prop_assert!((&hess - hess.transpose()).amax() < 1e-12 * scale);
    }

    #[test]
    fn normalization_sets_unit_multiplier((p, c) in case()) {
        let normalized = normalize_lambda(&p, &c).unwrap();
        prop_assert!((lambda_of(&p, &normalized).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!(center_of_mass(&p, &normalized).unwrap().norm() < 1e-12);
        prop_assert!(inertia(&p, &normalized).unwrap() > 0.0);
    }

    #[test]
    fn fingerprint_survives_similarity_motions((p, c) in case(), angle in 0.0f64..6.3, dx in -1.0f64..1.0) {
        let c = normalize_lambda(&p, &c).unwrap();
        let moved = c.rotated(angle).translated(Vector2::new(dx, -dx));
        prop_assert!(same_class(&fingerprint(&p, &c), &fingerprint(&p, &moved), 1e-9));
        let a = canonicalize(&p, &c).unwrap();
        let b = canonicalize(&p, &moved).unwrap();
        prop_assert!(sup(&(a.to_flat() - b.to_flat())) < 1e-9);
    }

    #[test]
    fn distance_residual_is_motion_invariant((p, c) in case(), angle in 0.0f64..6.3) {
        let a = ac_residual(&p, &distances_of(&c));
        let b = ac_residual(&p, &distances_of(&c.rotated(angle).translated(Vector2::new(0.5, 0.5))));
        let scale = 1.0 + a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9 * scale);
        }
    }
}

#[test]
fn matrix_residual_vanishes_on_a_square() {
    let p = PotentialParams::equal_masses(4, 1.0).unwrap();
    let square = Configuration::from_xy(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]);
    let c = normalize_lambda(&p, &square).unwrap();
    assert!(matrix_residual_fro(&p, &c).unwrap() < 1e-12);
    assert_relative_eq!(lambda_of(&p, &c).unwrap(), 1.0, epsilon = 1e-14);
}
