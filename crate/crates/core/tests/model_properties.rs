mod common;

use common::*;
use proptest::prelude::*;
use stadisc::model::{
    certify_d_nondegenerate, certify_fully_nondegenerate, classify, conormal_totally_real_check, defining_map,
    find_invertible_combination, SearchConfig,
};
use stadisc::{HermitianModel, PerturbationTerm, Tolerance, C64};

fn det_of_combination(model: &HermitianModel, c: &[f64]) -> f64 {
    let n = model.n();
    let mut a = CMat::zeros(n, n);
    for (m, &cj) in model.levi_matrices().iter().zip(c) {
        a += m * C64::new(cj, 0.0);
    }
    a.determinant().norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn totally_real_iff_invertible_combination(seed in any::<u64>(), singular in any::<bool>()) {
        let mut r = rng(seed);
        let (model, c) = if singular {
            // A_2 = -A_1, so c = (1, 1, 0, ...)/√2 combines to zero
            let base = random_model(&mut r);
            let mut mats = base.levi_matrices().to_vec();
            if mats.len() == 1 {
                mats.push(-mats[0].clone());
            } else {
                mats[1] = -mats[0].clone();
            }
            let model = HermitianModel::new(mats, vec![]).unwrap();
            let mut c = vec![0.0; model.d()];
            c[0] = std::f64::consts::FRAC_1_SQRT_2;
            c[1] = std::f64::consts::FRAC_1_SQRT_2;
            (model, c)
        } else {
            let model = random_model(&mut r);
            let c = find_invertible_combination(&model, &SearchConfig::with_seed(seed)).expect("generic models satisfy (t)").c;
            (model, c)
        };
        let verdict = conormal_totally_real_check(&model, &c, Tolerance::default());
        prop_assert_eq!(verdict.totally_real, det_of_combination(&model, &c) > 1e-9);
        prop_assert_eq!(verdict.totally_real, !singular);
    }

    #[test]
    fn full_nondegeneracy_implies_d(seed in any::<u64>()) {
        let model = random_model(&mut rng(seed));
        let r = classify(&model, &SearchConfig::with_seed(seed));
        prop_assert!(!r.cond_f || r.cond_d);
    }

    #[test]
    fn d_certificate_has_full_real_rank(seed in any::<u64>()) {
        let model = random_model(&mut rng(seed));
        let search = SearchConfig::with_seed(seed);
        let Ok(t) = find_invertible_combination(&model, &search) else { return Ok(()) };
        match certify_d_nondegenerate(&model, &t.c, &search) {
            Ok(cert) => {
                let n = model.n();
                let vv = CMat::from_column_slice(n, 1, &cert.v);
                let cols: Vec<CMat> = model.levi_matrices().iter().map(|a| a * &vv).collect();
                let m = RMat::from_fn(2 * n, model.d(), |r, j| if r < n { cols[j][(r, 0)].re } else { cols[j][(r - n, 0)].im });
                prop_assert_eq!(null_space(&m, 1e-9).ncols(), 0);
            }
            Err(e) => prop_assert!(model.d() <= 2 * model.n() || e.is_exact()),
        }
        if model.d() > 2 * model.n() {
            prop_assert!(certify_d_nondegenerate(&model, &t.c, &search).is_err_and(|e| e.is_exact()));
        }
        if model.d() > model.n() {
            prop_assert!(certify_fully_nondegenerate(&model, &t.c, &search).is_err_and(|e| e.is_exact()));
        }
    }

    #[test]
    fn searches_are_deterministic(seed in any::<u64>()) {
        let model = random_model(&mut rng(seed));
        let search = SearchConfig::with_seed(seed);
        prop_assert_eq!(format!("{:?}", classify(&model, &search)), format!("{:?}", classify(&model, &search)));
    }

    #[test]
    fn gradients_match_central_differences(seed in any::<u64>(), coeff in -1.0f64..1.0) {
        let mut r = rng(seed);
        let quadric = random_model(&mut r);
        let (n, d) = (quadric.n(), quadric.d());
        let mut z_exp = vec![0; n];
        let mut zbar_exp = vec![0; n];
        let mut imw_exp = vec![0; d];
        z_exp[0] = 2;
        zbar_exp[n - 1] = 1;
        imw_exp[d - 1] = 1;
        let model = quadric.with_perturbation(vec![PerturbationTerm { row: d, coeff: 0.1 * coeff, z_exp, zbar_exp, imw_exp }]).unwrap();
        let point: Vec<C64> = random_vector(&mut r, n + d).into_iter().map(|z| z * 0.9).collect();
        let map = defining_map(&model, &point);
        let h = 1e-5;
        let mut worst = 0.0f64;
        let mut scale = 1e-12f64;
        for k in 0..n + d {
            let shifted = |delta: C64| {
                let mut p = point.clone();
                p[k] += delta;
                defining_map(&model, &p).values
            };
            let (xp, xm) = (shifted(C64::new(h, 0.0)), shifted(C64::new(-h, 0.0)));
            let (yp, ym) = (shifted(C64::new(0.0, h)), shifted(C64::new(0.0, -h)));
            for j in 0..d {
                // ∂/∂z = (∂_x - i ∂_y) / 2
                let fd = C64::new((xp[j] - xm[j]) / (2.0 * h), -(yp[j] - ym[j]) / (2.0 * h)) * 0.5;
                let an = if k < n { map.z_gradients[(j, k)] } else { map.w_gradients[(j, k - n)] };
                worst = worst.max((fd - an).norm());
                scale = scale.max(an.norm());
            }
        }
        prop_assert!(worst / scale <= 1e-6, "relative error {}", worst / scale);
    }
}
