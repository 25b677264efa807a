//! Newton continuation of stationary lifts from a quadric to a perturbed
//! model, parametrized by `2N` pinned real coordinates of the 1-jet at
//! `ζ = 1`, and the conormal coverage probe.
//!
//! A lift in the affine space pinned at `ζ = 1` is written
//! `f = (1-ζ) p(ζ) + (ζ/2) c e_g̃` with `p` a polynomial of degree
//! `deg_max - 1` in `C^{2N}` (lift ordering `(h, g, h̃, g̃)`). On each
//! boundary sample the system imposes `r(f) = 0` and
//! `ζ̄ f̃ = Σ_j λ_j ∂r_j(f)` with real multipliers `λ_j`.

mod pins;
mod probe;

pub use pins::{jet_coordinates, select_pins, PinSelection};
pub use probe::{coverage_probe, probe_family, CoverageReport, FamilyProbe};

use crate::disc::{LiftedDisc, PolyDisc};
use crate::linalg::{realify_vec, root_of_unity, RMat, Tolerance, C64};
use crate::model::{DefiningFunctions, HermitianModel};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("Newton iteration did not converge in {iterations} iterations (residual history {history:?})")]
    NonConvergence { iterations: usize, history: Vec<f64> },
    #[error("least-squares linearization is rank deficient (rank {rank} of {expected}, sigma_min = {sigma_min:e})")]
    SingularLinearization { rank: usize, expected: usize, sigma_min: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("initial lift is not in the pinned affine space (distance {0:e})")]
    InvalidInitial(f64),
    #[error("perturbation size {size} exceeds the gate {gate}")]
    PerturbationTooLarge { size: f64, gate: f64 },
    #[error(transparent)]
    Rh(#[from] crate::rh::RhError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    /// Degree of the solved discs.
    pub deg_max: usize,
    /// Boundary samples; `None` means `max(64, 8 * deg_max)`.
    pub samples: Option<usize>,
    pub newton_tol: f64,
    pub max_iters: usize,
    /// Indices into the realified 1-jet `(Re f'(1), Im f'(1))`; `None`
    /// selects them by pivoted QR on the tangent kernel.
    pub pins: Option<Vec<usize>>,
    /// Initial trial step of the damped iteration.
    pub damping: f64,
    pub tol: Tolerance,
    /// Upper bound on `Σ |coeff|` over the perturbation terms.
    pub perturbation_gate: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            deg_max: 16,
            samples: None,
            newton_tol: 1e-11,
            max_iters: 40,
            pins: None,
            damping: 1.0,
            tol: Tolerance::default(),
            perturbation_gate: 0.1,
        }
    }
}

impl SolveConfig {
    pub fn sample_count(&self) -> usize {
        self.samples.unwrap_or_else(|| (8 * self.deg_max).max(64))
    }

    fn validate(&self) -> Result<(), SolveError> {
        if self.newton_tol < 1e-12 {
            return Err(SolveError::InvalidConfig(format!("newton_tol {:e} is below 1e-12", self.newton_tol)));
        }
        if self.deg_max < 2 {
            return Err(SolveError::InvalidConfig("deg_max must be at least 2".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(SolveError::InvalidConfig(format!("damping {} outside (0, 1]", self.damping)));
        }
        if self.sample_count() < 2 * self.deg_max {
            return Err(SolveError::InvalidConfig("fewer than 2 * deg_max samples".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolvedFamilyPoint {
    pub lift: LiftedDisc,
    /// Pinned jet coordinates of `lift`.
    pub params: Vec<f64>,
    /// Multipliers `λ_{s,j}` per boundary sample.
    pub multipliers: Vec<Vec<f64>>,
    pub residual: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
}

/// Unknowns and evaluation of the boundary system for one model.
#[derive(Debug, Clone)]
pub struct NewtonSystem {
    funcs: DefiningFunctions,
    n: usize,
    d: usize,
    c: Vec<f64>,
    coeffs: usize,
    zetas: Vec<C64>,
    pins: Vec<usize>,
    targets: Vec<f64>,
}

impl NewtonSystem {
    /// `c` is the covector value `2 g̃(1)`; `pins` index the realified 1-jet.
    pub fn new(model: &HermitianModel, c: &[f64], cfg: &SolveConfig, pins: Vec<usize>, targets: Vec<f64>) -> Self {
        let count = cfg.sample_count();
        NewtonSystem {
            funcs: DefiningFunctions::new(model),
            n: model.n(),
            d: model.d(),
            c: c.to_vec(),
            coeffs: cfg.deg_max,
            zetas: (0..count).map(|s| root_of_unity(s, count)).collect(),
            pins,
            targets,
        }
    }

    fn big_n(&self) -> usize {
        self.n + self.d
    }

    /// Number of real unknowns in `p`.
    pub fn p_unknowns(&self) -> usize {
        4 * self.big_n() * self.coeffs
    }

    pub fn samples(&self) -> usize {
        self.zetas.len()
    }

    /// Rows of the full system: per sample `d` attachment rows and `2N`
    /// fiber rows, then one row per pin.
    pub fn rows(&self) -> usize {
        self.samples() * (self.d + 2 * self.big_n()) + self.pins.len()
    }

    /// Real unknown vector `(Re p, Im p)`, component-major, from a lift.
    pub fn unknowns_from_lift(&self, lift: &LiftedDisc) -> Result<Vec<f64>, SolveError> {
        let big_n = self.big_n();
        let mut full = lift.as_disc();
        for j in 0..self.d {
            let m = big_n + self.n + j;
            let v = full.coeff(m, 1) - C64::new(self.c[j] / 2.0, 0.0);
            full.set_coeff(m, 1, v);
        }
        // Synthetic division by (1 - ζ): p_k = Σ_{i<=k} f_i.
        let mut p = vec![C64::new(0.0, 0.0); 2 * big_n * self.coeffs];
        let mut worst = 0.0f64;
        for m in 0..2 * big_n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..=full.degree() {
                acc += full.coeff(m, k);
                if k < self.coeffs {
                    p[m * self.coeffs + k] = acc;
                } else {
                    worst = worst.max(acc.norm());
                }
            }
        }
        if worst > 1e-12 {
            return Err(SolveError::InvalidInitial(worst));
        }
        Ok(realify_vec(&p))
    }

    fn p_complex(&self, x: &[f64]) -> Vec<C64> {
        let half = x.len() / 2;
        (0..half).map(|i| C64::new(x[i], x[half + i])).collect()
    }

    pub fn lift_from_unknowns(&self, x: &[f64]) -> LiftedDisc {
        let big_n = self.big_n();
        let p = self.p_complex(x);
        let comps: Vec<Vec<C64>> = (0..2 * big_n).map(|m| p[m * self.coeffs..(m + 1) * self.coeffs].to_vec()).collect();
        let mut f = PolyDisc::new(comps).times_one_minus_zeta();
        for j in 0..self.d {
            let m = big_n + self.n + j;
            let v = f.coeff(m, 1) + C64::new(self.c[j] / 2.0, 0.0);
            f.set_coeff(m, 1, v);
        }
        LiftedDisc::from_disc(&f)
    }

    /// Realified `f'(1)` in lift ordering.
    pub fn jet(&self, x: &[f64]) -> Vec<f64> {
        jet_coordinates(&self.lift_from_unknowns(x))
    }

    /// `(ζ, f(ζ), f̃(ζ))` at every sample.
    fn boundary_values(&self, x: &[f64]) -> Vec<(Vec<C64>, Vec<C64>)> {
        let lift = self.lift_from_unknowns(x);
        self.zetas.iter().map(|&z| lift.eval(z)).collect()
    }

    /// Multipliers minimizing the fiber residual at each sample.
    pub fn project_multipliers(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.boundary_values(x)
            .par_iter()
            .zip(self.zetas.par_iter())
            .map(|((pt, xi), &z)| {
                let l = self.multiplier_matrix(pt);
                let b = DVector::from_vec(fiber_target(xi, z));
                let qr = l.qr();
                let rhs = qr.q().transpose() * b;
                qr.r().solve_upper_triangular(&rhs).map(|v| v.iter().copied().collect()).unwrap_or_else(|| vec![0.0; self.d])
            })
            .collect()
    }

    /// Columns `realify(∂r_j(x))`.
    fn multiplier_matrix(&self, pt: &[C64]) -> RMat {
        let grad = self.funcs.gradient(pt);
        let rows: Vec<Vec<C64>> = (0..self.d).map(|j| grad.row(j).iter().copied().collect()).collect();
        crate::linalg::realified_columns(&rows)
    }

    /// Full residual vector for unknowns `x` and multipliers `lambda`.
    pub fn residual(&self, x: &[f64], lambda: &[Vec<f64>]) -> Vec<f64> {
        let values = self.boundary_values(x);
        let block = self.d + 2 * self.big_n();
        let mut out = vec![0.0; self.rows()];
        for (s, ((pt, xi), &z)) in values.iter().zip(&self.zetas).enumerate() {
            let r = self.funcs.values(pt);
            out[s * block..s * block + self.d].copy_from_slice(&r);
            let l = self.multiplier_matrix(pt);
            let fiber = DVector::from_vec(fiber_target(xi, z)) - l * DVector::from_column_slice(&lambda[s]);
            out[s * block + self.d..(s + 1) * block].copy_from_slice(fiber.as_slice());
        }
        let jet = self.jet(x);
        let base = self.samples() * block;
        for (i, (&idx, &t)) in self.pins.iter().zip(&self.targets).enumerate() {
            out[base + i] = jet[idx] - t;
        }
        out
    }

    /// Derivative of the per-sample rows with respect to the `p`
    /// unknowns, `(d + 2N) x p_unknowns`.
    fn sample_jacobian(&self, s: usize, pt: &[C64], lambda: &[f64]) -> RMat {
        let big_n = self.big_n();
        let z = self.zetas[s];
        let grad = self.funcs.gradient(pt);
        let hess = self.funcs.hessians(pt);
        let block = self.d + 2 * big_n;
        let half = 2 * big_n * self.coeffs;
        let mut out = RMat::zeros(block, 2 * half);
        let mut power = C64::new(1.0, 0.0);
        let one = C64::new(1.0, 0.0);
        for k in 0..self.coeffs {
            let phi_real = (one - z) * power;
            for (part, unit) in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)].into_iter().enumerate() {
                let phi = phi_real * unit;
                for m in 0..2 * big_n {
                    let col = part * half + m * self.coeffs + k;
                    if m < big_n {
                        for j in 0..self.d {
                            out[(j, col)] = 2.0 * (grad[(j, m)] * phi).re;
                        }
                        for a in 0..big_n {
                            let mut dg = C64::new(0.0, 0.0);
                            for (j, (hol, mixed)) in hess.iter().enumerate() {
                                dg += lambda[j] * (hol[(a, m)] * phi + mixed[(a, m)] * phi.conj());
                            }
                            out[(self.d + a, col)] = -dg.re;
                            out[(self.d + big_n + a, col)] = -dg.im;
                        }
                    } else {
                        let v = z.conj() * phi;
                        out[(self.d + m - big_n, col)] = v.re;
                        out[(self.d + big_n + m - big_n, col)] = v.im;
                    }
                }
            }
            power *= z;
        }
        out
    }

    /// Jacobian of the pin rows with respect to `p`.
    fn pin_jacobian(&self) -> RMat {
        let two_n = 2 * self.big_n();
        let half = two_n * self.coeffs;
        let mut out = RMat::zeros(self.pins.len(), 2 * half);
        for (i, &idx) in self.pins.iter().enumerate() {
            // f'(1)_m = -Σ_k p_{m,k} + const; idx < 2N is a real part.
            let (part, m) = if idx < two_n { (0, idx) } else { (1, idx - two_n) };
            for k in 0..self.coeffs {
                out[(i, part * half + m * self.coeffs + k)] = -1.0;
            }
        }
        out
    }

    /// Full analytic Jacobian with respect to `(p, λ)`, the multipliers
    /// ordered sample-major after the `p` unknowns.
    pub fn jacobian(&self, x: &[f64], lambda: &[Vec<f64>]) -> RMat {
        let values = self.boundary_values(x);
        let block = self.d + 2 * self.big_n();
        let pu = self.p_unknowns();
        let mut out = RMat::zeros(self.rows(), pu + self.samples() * self.d);
        for (s, (pt, _)) in values.iter().enumerate() {
            let js = self.sample_jacobian(s, pt, &lambda[s]);
            out.view_mut((s * block, 0), (block, pu)).copy_from(&js);
            let l = self.multiplier_matrix(pt);
            out.view_mut((s * block + self.d, pu + s * self.d), (2 * self.big_n(), self.d)).copy_from(&(-l));
        }
        let base = self.samples() * block;
        out.view_mut((base, 0), (self.pins.len(), pu)).copy_from(&self.pin_jacobian());
        out
    }

    /// Jacobian with the multiplier columns eliminated by projecting each
    /// sample's fiber rows onto the orthogonal complement of `span ∂r_j`.
    /// Returns the reduced matrix and the reduced residual.
    fn reduced_system(&self, x: &[f64], lambda: &[Vec<f64>]) -> (RMat, DVector<f64>) {
        let values = self.boundary_values(x);
        let block = self.d + 2 * self.big_n();
        let two_n = 2 * self.big_n();
        let pu = self.p_unknowns();
        let residual = self.residual(x, lambda);
        let blocks: Vec<(RMat, Vec<f64>)> = values
            .par_iter()
            .enumerate()
            .map(|(s, (pt, _))| {
                let mut js = self.sample_jacobian(s, pt, &lambda[s]);
                let mut rs = residual[s * block..(s + 1) * block].to_vec();
                let q = self.multiplier_matrix(pt).qr().q();
                let fiber_j = js.rows(self.d, two_n).into_owned();
                let proj_j = &fiber_j - &q * (q.transpose() * &fiber_j);
                js.view_mut((self.d, 0), (two_n, pu)).copy_from(&proj_j);
                let fiber_r = DVector::from_column_slice(&rs[self.d..]);
                let proj_r = &fiber_r - &q * (q.transpose() * &fiber_r);
                rs[self.d..].copy_from_slice(proj_r.as_slice());
                (js, rs)
            })
            .collect();
        let mut mat = RMat::zeros(self.rows(), pu);
        let mut rhs = DVector::zeros(self.rows());
        for (s, (js, rs)) in blocks.into_iter().enumerate() {
            mat.view_mut((s * block, 0), (block, pu)).copy_from(&js);
            rhs.rows_mut(s * block, block).copy_from_slice(&rs);
        }
        let base = self.samples() * block;
        mat.view_mut((base, 0), (self.pins.len(), pu)).copy_from(&self.pin_jacobian());
        for i in 0..self.pins.len() {
            rhs[base + i] = residual[base + i];
        }
        (mat, rhs)
    }
}

/// `realify(ζ̄ ξ)`.
fn fiber_target(xi: &[C64], z: C64) -> Vec<f64> {
    realify_vec(&xi.iter().map(|v| z.conj() * v).collect::<Vec<_>>())
}

fn max_abs(v: &[f64]) -> f64 {
    crate::linalg::max_abs(v)
}

fn perturbation_size(model: &HermitianModel) -> f64 {
    model.perturbation().iter().map(|t| t.coeff.abs()).sum()
}

/// Covector value `c = 2 g̃(1)` and direction `V = -h'(1)` of a lift.
pub fn lift_data(lift: &LiftedDisc, n: usize) -> (Vec<C64>, Vec<f64>) {
    let one = C64::new(1.0, 0.0);
    let dv = lift.base.derivative().eval(one);
    let v = dv[..n].iter().map(|z| -z).collect();
    let c = lift.cotangent.eval(one)[n..].iter().map(|z| 2.0 * z.re).collect();
    (v, c)
}

/// Solves for the stationary lift of `model` whose pinned jet coordinates
/// equal `target_params`, starting from `initial`.
pub fn newton_solve(model: &HermitianModel, initial: &LiftedDisc, target_params: &[f64], cfg: &SolveConfig) -> Result<SolvedFamilyPoint, SolveError> {
    cfg.validate()?;
    let size = perturbation_size(model);
    if size > cfg.perturbation_gate {
        return Err(SolveError::PerturbationTooLarge { size, gate: cfg.perturbation_gate });
    }
    let big_n = model.big_n();
    if target_params.len() != 2 * big_n {
        return Err(SolveError::InvalidConfig(format!("expected {} target parameters, got {}", 2 * big_n, target_params.len())));
    }
    let (v, c) = lift_data(initial, model.n());
    let pins = match &cfg.pins {
        Some(p) => p.clone(),
        None => select_pins(&model.quadric_part(), &v, &c, cfg.tol)?.indices,
    };
    if pins.len() != 2 * big_n || pins.iter().any(|&i| i >= 4 * big_n) {
        return Err(SolveError::InvalidConfig(format!("need {} pin indices below {}", 2 * big_n, 4 * big_n)));
    }
    let system = NewtonSystem::new(model, &c, cfg, pins.clone(), target_params.to_vec());
    let mut x = system.unknowns_from_lift(initial)?;
    let mut lambda = system.project_multipliers(&x);
    let mut res = system.residual(&x, &lambda);
    let mut history = vec![max_abs(&res)];
    let mut step = cfg.damping;
    let mut iterations = 0;
    while history[history.len() - 1] > cfg.newton_tol {
        if iterations == cfg.max_iters {
            return Err(SolveError::NonConvergence { iterations, history });
        }
        iterations += 1;
        let (mat, rhs) = system.reduced_system(&x, &lambda);
        let delta = least_squares(&mat, &rhs, cfg.tol)?;
        let merit = norm(&res);
        let mut t = step;
        let accepted = loop {
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, b)| a - t * b).collect();
            let trial_lambda = system.project_multipliers(&trial);
            let trial_res = system.residual(&trial, &trial_lambda);
            if norm(&trial_res) < merit {
                break Some((trial, trial_lambda, trial_res, t));
            }
            if t <= 1.0 / 64.0 {
                break None;
            }
            t /= 2.0;
        };
        let Some((nx, nl, nr, used)) = accepted else {
            return Err(SolveError::NonConvergence { iterations, history });
        };
        x = nx;
        lambda = nl;
        res = nr;
        history.push(max_abs(&res));
        if used == step {
            step = (2.0 * step).min(1.0);
        }
    }
    let lift = if iterations == 0 { initial.clone() } else { system.lift_from_unknowns(&x) };
    let jet = system.jet(&x);
    Ok(SolvedFamilyPoint {
        params: pins.iter().map(|&i| jet[i]).collect(),
        lift,
        multipliers: lambda,
        residual: history[history.len() - 1],
        iterations,
        history,
    })
}

fn norm(v: &[f64]) -> f64 {
    crate::linalg::rnorm(v)
}

/// Minimal-norm solution of `mat · δ = rhs`, rejecting rank deficiency.
fn least_squares(mat: &RMat, rhs: &DVector<f64>, tol: Tolerance) -> Result<DVector<f64>, SolveError> {
    // A thin QR first keeps the SVD on a square factor.
    let qr = mat.clone().qr();
    let r: DMatrix<f64> = qr.r();
    let qtb = qr.q().transpose() * rhs;
    let svd = r.svd(true, true);
    let sv = &svd.singular_values;
    let sigma_max = sv.iter().cloned().fold(0.0, f64::max);
    let sigma_min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let threshold = tol.threshold(sigma_max);
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    if rank < mat.ncols() {
        return Err(SolveError::SingularLinearization { rank, expected: mat.ncols(), sigma_min });
    }
    svd.solve(&qtb, 0.0).map_err(|_| SolveError::SingularLinearization { rank, expected: mat.ncols(), sigma_min })
}

/// Kernel of the linearized boundary system (without pins) at `lift`,
/// returned as tangent lifts `(1-ζ) δp`.
pub fn linearization_kernel(model: &HermitianModel, lift: &LiftedDisc, cfg: &SolveConfig) -> Result<Vec<LiftedDisc>, SolveError> {
    let (_, c) = lift_data(lift, model.n());
    let system = NewtonSystem::new(model, &c, cfg, Vec::new(), Vec::new());
    let x = system.unknowns_from_lift(lift)?;
    let lambda = system.project_multipliers(&x);
    let (mat, _) = system.reduced_system(&x, &lambda);
    let (basis, _) = crate::linalg::real_kernel(&mat, cfg.tol);
    let zero_c = vec![0.0; model.d()];
    let tangent = NewtonSystem::new(model, &zero_c, cfg, Vec::new(), Vec::new());
    Ok((0..basis.ncols())
        .map(|b| tangent.lift_from_unknowns(basis.column(b).as_slice()))
        .collect())
}

/// Solves every target independently and in parallel.
pub fn solve_family(model: &HermitianModel, initial: &LiftedDisc, targets: &[Vec<f64>], cfg: &SolveConfig) -> Vec<Result<SolvedFamilyPoint, SolveError>> {
    targets.par_iter().map(|t| newton_solve(model, initial, t, cfg)).collect()
}

/// Pinned coordinates of a lift.
pub fn params_of(lift: &LiftedDisc, pins: &[usize]) -> Vec<f64> {
    let jet = jet_coordinates(lift);
    pins.iter().map(|&i| jet[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::canonical_lift;
    use crate::linalg::I;
    use crate::model::PerturbationTerm;

    fn q1_lift() -> LiftedDisc {
        canonical_lift(&HermitianModel::q1(), &[C64::new(1.0, 0.0), I], &[1.0, 1.0, 0.0], Tolerance::default()).unwrap()
    }

    fn small_cfg() -> SolveConfig {
        SolveConfig { deg_max: 6, ..SolveConfig::default() }
    }

    #[test]
    fn unknowns_round_trip() {
        let lift = q1_lift();
        let cfg = small_cfg();
        let sys = NewtonSystem::new(&HermitianModel::q1(), &[1.0, 1.0, 0.0], &cfg, vec![], vec![]);
        let x = sys.unknowns_from_lift(&lift).unwrap();
        assert!(sys.lift_from_unknowns(&x).max_coeff_distance(&lift) < 1e-15);
        let lambda = sys.project_multipliers(&x);
        assert!(lambda.iter().all(|l| (l[0] - 1.0).abs() < 1e-12 && (l[1] - 1.0).abs() < 1e-12 && l[2].abs() < 1e-12));
        assert!(max_abs(&sys.residual(&x, &lambda)) < 1e-14);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let model = HermitianModel::q1()
            .with_perturbation(vec![PerturbationTerm { row: 1, coeff: 0.2, z_exp: vec![2, 0], zbar_exp: vec![0, 1], imw_exp: vec![0, 0, 0] }])
            .unwrap();
        let cfg = small_cfg();
        let sys = NewtonSystem::new(&model, &[1.0, 1.0, 0.0], &cfg, vec![0, 3, 7], vec![0.0; 3]);
        let mut x = sys.unknowns_from_lift(&q1_lift()).unwrap();
        for (i, v) in x.iter_mut().enumerate() {
            *v += 0.01 * ((i * 7 % 13) as f64 - 6.0) / 6.0;
        }
        let lambda: Vec<Vec<f64>> = sys.project_multipliers(&x).into_iter().map(|l| l.iter().map(|v| v + 0.1).collect()).collect();
        let jac = sys.jacobian(&x, &lambda);
        let h = 1e-6;
        let pu = sys.p_unknowns();
        for col in (0..pu).step_by(17).chain([pu, pu + 4]) {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            let (mut lp, mut lm) = (lambda.clone(), lambda.clone());
            if col < pu {
                xp[col] += h;
                xm[col] -= h;
            } else {
                let (s, j) = ((col - pu) / 3, (col - pu) % 3);
                lp[s][j] += h;
                lm[s][j] -= h;
            }
            let fd: Vec<f64> = sys.residual(&xp, &lp).iter().zip(sys.residual(&xm, &lm)).map(|(a, b)| (a - b) / (2.0 * h)).collect();
            let an: Vec<f64> = jac.column(col).iter().copied().collect();
            let err = fd.iter().zip(&an).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let scale = max_abs(&an).max(1.0);
            assert!(err / scale < 1e-6, "column {col}: {err}");
        }
    }
}
