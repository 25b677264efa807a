use super::{lift_data, newton_solve, params_of, select_pins, SolveConfig, SolveError, SolvedFamilyPoint};
use crate::disc::{stationarity_residual_at, LiftedDisc};
use crate::linalg::{numerical_rank, realify_vec, RMat, C64};
use crate::model::{DefiningFunctions, HermitianModel};
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

/// A base solution and its neighbours at `params ± step e_i`.
#[derive(Debug, Clone)]
pub struct FamilyProbe {
    pub pins: Vec<usize>,
    pub step: f64,
    pub base: SolvedFamilyPoint,
    pub plus: Vec<SolvedFamilyPoint>,
    pub minus: Vec<SolvedFamilyPoint>,
}

impl FamilyProbe {
    pub fn points(&self) -> impl Iterator<Item = &SolvedFamilyPoint> {
        std::iter::once(&self.base).chain(self.plus.iter()).chain(self.minus.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub expected_rank: usize,
    /// Rank of `v ↦ (f'(1), f̃'(1))` on the tangent kernel at the quadric.
    pub analytic_rank: usize,
    pub analytic_sigma_min: f64,
    /// Rank of the same map by central differences across a solved family.
    pub fd_rank: Option<usize>,
    pub fd_sigma_min: Option<f64>,
    pub theta_max: f64,
    pub image_points: usize,
    /// Worst of `|r(x)|` and the fiber distance over all images
    /// `(f(e^{iθ}), e^{-iθ} f̃(e^{iθ}))`.
    pub membership_residual: f64,
    /// Dimension of the affine span of the image cloud.
    pub affine_dim: usize,
    pub certified: bool,
}

/// Solves the base point and the `4N` neighbours used for the
/// finite-difference Jacobian.
pub fn probe_family(model: &HermitianModel, initial: &LiftedDisc, step: f64, cfg: &SolveConfig) -> Result<FamilyProbe, SolveError> {
    let (v, c) = lift_data(initial, model.n());
    let selection = select_pins(&model.quadric_part(), &v, &c, cfg.tol)?;
    let pins = selection.indices;
    let cfg = SolveConfig { pins: Some(pins.clone()), ..cfg.clone() };
    let base_params = params_of(initial, &pins);
    let base = newton_solve(model, initial, &base_params, &cfg)?;
    let targets: Vec<(usize, f64)> = (0..pins.len()).flat_map(|i| [(i, step), (i, -step)]).collect();
    let solved: Vec<SolvedFamilyPoint> = targets
        .par_iter()
        .map(|&(i, s)| {
            let mut t = base.params.clone();
            t[i] += s;
            newton_solve(model, &base.lift, &t, &cfg)
        })
        .collect::<Result<_, _>>()?;
    let (plus, minus): (Vec<_>, Vec<_>) = solved.into_iter().enumerate().partition(|(k, _)| k % 2 == 0);
    Ok(FamilyProbe {
        pins,
        step,
        base,
        plus: plus.into_iter().map(|(_, p)| p).collect(),
        minus: minus.into_iter().map(|(_, p)| p).collect(),
    })
}

/// Rank of the 1-jet map on the family and conormal membership of the
/// images `Ψ(f, θ)` for `θ` in `[0, theta_max)`. Without a family the
/// images are taken from `initial` on the quadric part of `model`.
pub fn coverage_probe(model: &HermitianModel, initial: &LiftedDisc, family: Option<&FamilyProbe>, theta_max: f64, cfg: &SolveConfig) -> Result<CoverageReport, SolveError> {
    let big_n = model.big_n();
    let (v, c) = lift_data(initial, model.n());
    let selection = select_pins(&model.quadric_part(), &v, &c, cfg.tol)?;
    let analytic = numerical_rank(&selection.jet_matrix, cfg.tol);

    let (fd_rank, fd_sigma_min) = match family {
        Some(fam) => {
            let cols: Vec<DVector<f64>> = fam
                .plus
                .iter()
                .zip(&fam.minus)
                .map(|(p, m)| {
                    let jp = super::jet_coordinates(&p.lift);
                    let jm = super::jet_coordinates(&m.lift);
                    DVector::from_iterator(jp.len(), jp.iter().zip(&jm).map(|(a, b)| (a - b) / (2.0 * fam.step)))
                })
                .collect();
            let info = numerical_rank(&RMat::from_columns(&cols), cfg.tol);
            (Some(info.rank), Some(info.sigma_min))
        }
        None => (None, None),
    };

    let (target_model, lifts): (HermitianModel, Vec<&LiftedDisc>) = match family {
        Some(fam) => (model.clone(), fam.points().map(|p| &p.lift).collect()),
        None => (model.quadric_part(), vec![initial]),
    };
    let funcs = DefiningFunctions::new(&target_model);
    let thetas = 8;
    let mut membership = 0.0f64;
    let mut images: Vec<Vec<f64>> = Vec::new();
    for lift in &lifts {
        for k in 0..thetas {
            let theta = theta_max * k as f64 / thetas as f64;
            let zeta = C64::from_polar(1.0, theta);
            let (x, xi) = lift.eval(zeta);
            let attach = crate::linalg::max_abs(&funcs.values(&x));
            let fiber = stationarity_residual_at(&funcs, &x, &xi, zeta);
            membership = membership.max(attach).max(fiber);
            let mut pt = x.clone();
            pt.extend(xi.iter().map(|z| zeta.conj() * z));
            images.push(realify_vec(&pt));
        }
    }
    let diffs: Vec<DVector<f64>> = images[1..]
        .iter()
        .map(|p| DVector::from_iterator(p.len(), p.iter().zip(&images[0]).map(|(a, b)| a - b)))
        .collect();
    let affine_dim = if diffs.is_empty() { 0 } else { numerical_rank(&RMat::from_columns(&diffs), cfg.tol).rank };

    let expected = 2 * big_n;
    let certified = analytic.rank == expected && fd_rank.is_none_or(|r| r == expected) && membership <= 1e-8;
    Ok(CoverageReport {
        expected_rank: expected,
        analytic_rank: analytic.rank,
        analytic_sigma_min: analytic.sigma_min,
        fd_rank,
        fd_sigma_min,
        theta_max,
        image_points: images.len(),
        membership_residual: membership,
        affine_dim,
        certified,
    })
}
