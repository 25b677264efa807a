use super::{fourier_coefficients, DiscConfig, DiscError, LiftedDisc, PolyDisc};
use crate::linalg::{complex_rank, realified_columns, realify_vec, root_of_unity, RMat, Tolerance, C64};
use crate::model::{DefiningFunctions, HermitianModel};
use nalgebra::DVector;

/// The base disc `((1-ζ)V, 2(1-ζ) ᵗV̄A_1V, …, 2(1-ζ) ᵗV̄A_dV)`.
pub fn canonical_disc(model: &HermitianModel, v: &[C64]) -> Result<PolyDisc, DiscError> {
    if v.len() != model.n() {
        return Err(DiscError::WrongDimension { expected: model.n(), got: v.len() });
    }
    let forms = model.hermitian_forms(v);
    let mut values: Vec<C64> = v.to_vec();
    values.extend(forms.iter().map(|&q| C64::new(2.0 * q, 0.0)));
    Ok(PolyDisc::vanishing_linear(&values))
}

/// The degree-one stationary lift with base [`canonical_disc`], covector
/// `h̃ = (1-ζ) ᵗV̄A` (with `A = Σ c_jA_j`) and `g̃ = ζc/2`.
pub fn canonical_lift(model: &HermitianModel, v: &[C64], c: &[f64], tol: Tolerance) -> Result<LiftedDisc, DiscError> {
    if c.len() != model.d() {
        return Err(DiscError::WrongDimension { expected: model.d(), got: c.len() });
    }
    let base = canonical_disc(model, v)?;
    let a = model.levi_combination(c);
    let info = complex_rank(&a, tol);
    if info.rank < model.n() {
        return Err(DiscError::SingularCombination { sigma_min: info.sigma_min });
    }
    let n = model.n();
    // Row vector ᵗV̄A, one scalar per column of A.
    let row: Vec<C64> = (0..n).map(|l| (0..n).map(|k| v[k].conj() * a[(k, l)]).sum()).collect();
    let zero = C64::new(0.0, 0.0);
    let mut comps: Vec<Vec<C64>> = row.iter().map(|&x| vec![x, -x]).collect();
    comps.extend(c.iter().map(|&cj| vec![zero, C64::new(cj / 2.0, 0.0)]));
    Ok(LiftedDisc::new(base, PolyDisc::new(comps)))
}

fn effective_samples(samples: usize, degree: usize) -> usize {
    samples.max(4 * degree.max(1)).max(1)
}

/// `max_θ |r(f(e^{iθ}))|_∞` over `samples` roots of unity (raised to at
/// least four per unit of degree).
pub fn attachment_residual(model: &HermitianModel, disc: &PolyDisc, samples: usize) -> f64 {
    let funcs = DefiningFunctions::new(model);
    let count = effective_samples(samples, disc.degree());
    (0..count)
        .map(|k| {
            let x = disc.eval(root_of_unity(k, count));
            funcs.values(&x).iter().fold(0.0f64, |m, v| m.max(v.abs()))
        })
        .fold(0.0, f64::max)
}

/// Distance from `ζ̄ ξ` to the real span of the rows of `∂r(x)`.
pub fn stationarity_residual_at(funcs: &DefiningFunctions, x: &[C64], xi: &[C64], zeta: C64) -> f64 {
    let grad = funcs.gradient(x);
    let rows: Vec<Vec<C64>> = (0..grad.nrows()).map(|j| grad.row(j).iter().copied().collect()).collect();
    let m: RMat = realified_columns(&rows);
    let target: Vec<C64> = xi.iter().map(|z| zeta.conj() * z).collect();
    let b = DVector::from_vec(realify_vec(&target));
    let lambda = match m.clone().svd(true, true).solve(&b, 1e-14) {
        Ok(l) => l,
        Err(_) => return f64::INFINITY,
    };
    (&m * lambda - b).norm()
}

/// Worst boundary distance of the covector from `ζ · span_R ∂r(f)`, combined
/// with the size of any Fourier content of `f̃` outside nonnegative
/// frequencies up to its degree. A covector that comes within
/// `cfg.zero_section_ratio` of the zero section returns `+∞`.
pub fn stationarity_residual(model: &HermitianModel, lift: &LiftedDisc, samples: usize, cfg: &DiscConfig) -> f64 {
    let funcs = DefiningFunctions::new(model);
    let degree = lift.degree();
    let count = effective_samples(samples, degree);
    let mut worst = 0.0f64;
    let mut norms = Vec::with_capacity(count);
    let mut cot_samples = Vec::with_capacity(count);
    for k in 0..count {
        let zeta = root_of_unity(k, count);
        let (x, xi) = lift.eval(zeta);
        norms.push(crate::linalg::cnorm(&xi));
        worst = worst.max(stationarity_residual_at(&funcs, &x, &xi, zeta));
        cot_samples.push(xi);
    }
    let max_norm = norms.iter().cloned().fold(0.0, f64::max);
    let min_norm = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    if max_norm == 0.0 || min_norm < cfg.zero_section_ratio * max_norm {
        return f64::INFINITY;
    }
    for m in 0..lift.dim() {
        let series: Vec<C64> = cot_samples.iter().map(|s| s[m]).collect();
        let coeffs = fourier_coefficients(&series);
        let stray = coeffs[(degree + 1).min(count)..].iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        worst = worst.max(stray);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn sphere_lift_components() {
        let lift = canonical_lift(&HermitianModel::sphere(), &[c(1.0)], &[1.0], Tolerance::default()).unwrap();
        assert_eq!(lift.base.component(0), &[c(1.0), c(-1.0)]);
        assert_eq!(lift.base.component(1), &[c(2.0), c(-2.0)]);
        assert_eq!(lift.cotangent.component(0), &[c(1.0), c(-1.0)]);
        assert_eq!(lift.cotangent.component(1), &[c(0.0), c(0.5)]);
    }

    #[test]
    fn q1_and_q2_forms() {
        let q1 = HermitianModel::q1();
        let disc = canonical_disc(&q1, &[c(1.0), I]).unwrap();
        let g: Vec<C64> = (2..5).map(|m| disc.coeff(m, 0)).collect();
        assert_eq!(g, vec![c(2.0), c(2.0), c(0.0)]);
        let q2 = HermitianModel::q2();
        let lift = canonical_lift(&q2, &[c(1.0), c(0.0), c(1.0)], &[1.0, 1.0], Tolerance::default()).unwrap();
        let ht: Vec<C64> = (0..3).map(|m| lift.cotangent.coeff(m, 0)).collect();
        assert_eq!(ht, vec![c(1.0), c(0.0), c(1.0)]);
    }

    #[test]
    fn singular_combination_rejected() {
        let err = canonical_lift(&HermitianModel::q1(), &[c(1.0), c(0.0)], &[1.0, 0.0, 0.0], Tolerance::default()).unwrap_err();
        assert!(matches!(err, DiscError::SingularCombination { .. }));
    }

    #[test]
    fn residuals_on_sphere() {
        let model = HermitianModel::sphere();
        let cfg = DiscConfig::default();
        let lift = canonical_lift(&model, &[c(1.0)], &[1.0], Tolerance::default()).unwrap();
        assert!(attachment_residual(&model, &lift.base, 64) < 1e-14);
        assert!(stationarity_residual(&model, &lift, 64, &cfg) < 1e-12);

        let mut shifted = lift.base.clone();
        shifted.set_coeff(1, 0, c(2.01));
        assert!((attachment_residual(&model, &shifted, 64) - 0.01).abs() < 1e-12);

        let mut bent = lift.clone();
        bent.cotangent.set_coeff(1, 0, 0.1 * I);
        assert!(stationarity_residual(&model, &bent, 64, &cfg) >= 0.05);

        let flat = LiftedDisc::new(lift.base.clone(), PolyDisc::zeros(2, 1));
        assert_eq!(stationarity_residual(&model, &flat, 64, &cfg), f64::INFINITY);
    }
}
