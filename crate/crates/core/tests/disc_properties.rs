mod common;

use common::*;
use proptest::prelude::*;
use stadisc::deformation::jet_coordinates;
use stadisc::disc::{
    attachment_residual, canonical_disc, canonical_lift, combination_real_rank, compute_defect, pushforward_lift, stationarity_residual,
    DiscConfig, PolyMap,
};
use stadisc::model::{find_invertible_combination, SearchConfig};
use stadisc::{HermitianModel, Tolerance, C64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_lifts_are_stationary(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_model(&mut r);
        let Ok(t) = find_invertible_combination(&model, &SearchConfig::with_seed(seed)) else { return Ok(()) };
        let v = random_vector(&mut r, model.n());
        let lift = canonical_lift(&model, &v, &t.c, Tolerance::default()).unwrap();
        let cfg = DiscConfig::default();
        prop_assert!(attachment_residual(&model, &lift.base, 64) <= 1e-12);
        prop_assert!(stationarity_residual(&model, &lift, 64, &cfg) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn defect_matches_real_kernel(seed in any::<u64>(), constructed in any::<bool>()) {
        let mut r = rng(seed);
        let (model, v) = if constructed {
            defective_pair(&mut r)
        } else {
            let m = random_model(&mut r);
            let v = random_vector(&mut r, m.n());
            (m, v)
        };
        let res = compute_defect(&model, &canonical_disc(&model, &v).unwrap(), &DiscConfig::default()).unwrap();
        let oracle = combination_kernel(&model, &v);
        prop_assert_eq!(res.defect, oracle.ncols());
        prop_assert_eq!(res.defect, model.d() - combination_real_rank(&model, &v, Tolerance::default()));
        if res.defect > 0 {
            let basis = RMat::from_fn(model.d(), res.defect, |i, k| res.kernel_basis[k][i]);
            prop_assert!(subspace_gap(&orthonormalize(&basis), &oracle).asin() <= 1e-8);
        }
    }

    #[test]
    fn defect_is_invariant_under_disc_automorphisms(seed in any::<u64>(), re in -0.3f64..0.3, im in -0.3f64..0.3, constructed in any::<bool>()) {
        let mut r = rng(seed);
        let (model, v) = if constructed {
            defective_pair(&mut r)
        } else {
            let m = random_model(&mut r);
            let v = random_vector(&mut r, m.n());
            (m, v)
        };
        let cfg = DiscConfig { attachment_tol: 1e-6, ..DiscConfig::default() };
        let disc = canonical_disc(&model, &v).unwrap();
        let (moved, tail) = disc.compose_disc_automorphism(C64::new(re, im), 48);
        prop_assert!(tail <= 1e-6);
        let before = compute_defect(&model, &disc, &cfg).unwrap().defect;
        let after = compute_defect(&model, &moved, &cfg).unwrap().defect;
        prop_assert_eq!(before, after);
    }

    #[test]
    fn sphere_automorphisms_preserve_stationarity(radius in 0.3f64..3.0, angle in -3.1f64..3.1) {
        let sphere = HermitianModel::sphere();
        let tol = Tolerance::default();
        let lift = canonical_lift(&sphere, &[C64::new(1.0, 0.0)], &[1.0], tol).unwrap();
        let l = C64::from_polar(radius, angle);
        let map = PolyMap::diagonal(&[l, C64::new(l.norm_sqr(), 0.0)]);
        let pushed = pushforward_lift(&map, &lift, 8, tol).unwrap();
        prop_assert!(quadric_stationarity(&sphere, &pushed.lift, 128).unwrap() <= 1e-8);
    }

    #[test]
    fn cubic_maps_preserve_the_one_jet(a in -0.01f64..0.01, b in -0.01f64..0.01, c in -0.01f64..0.01) {
        let sphere = HermitianModel::sphere();
        let tol = Tolerance::default();
        let lift = canonical_lift(&sphere, &[C64::new(1.0, 0.0)], &[1.0], tol).unwrap();
        let map = PolyMap::identity(2)
            .add_term(0, C64::new(a, b), vec![3, 0])
            .add_term(1, C64::new(c, 0.0), vec![1, 2]);
        let pushed = pushforward_lift(&map, &lift, 24, tol).unwrap();
        let change = jet_coordinates(&lift).iter().zip(jet_coordinates(&pushed.lift)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(change <= 1e-8, "1-jet moved by {}", change);
    }
}

#[test]
fn identity_pushforward_is_exact() {
    let tol = Tolerance::default();
    let model = HermitianModel::q1();
    let lift = canonical_lift(&model, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)], &[1.0, 1.0, 0.0], tol).unwrap();
    let pushed = pushforward_lift(&PolyMap::identity(5), &lift, 4, tol).unwrap();
    assert_eq!(pushed.lift, lift);
}
