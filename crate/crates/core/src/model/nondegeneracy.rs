//! Certificates for the Levi nondegeneracy conditions (a), (b), (t), (d), (f)
//! and the totally-real test for the conormal bundle.
//!
//! Searches are deterministic: a fixed lattice is scanned first, then seeded
//! random samples. Exact impossibility (rank bounds) is reported before any
//! search is attempted.

use super::{DefiningFunctions, HermitianModel};
use crate::linalg::{
    complex_rank, hermitian_eigenvalues, numerical_rank, real_kernel, realified_columns, CMat, RMat, Tolerance, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::collections::BTreeMap;
use std::ops::ControlFlow;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub seed: u64,
    /// Total number of candidates (lattice plus random) tried per search.
    pub budget: usize,
    /// Maximum number of lattice candidates before switching to random samples.
    pub lattice_cap: usize,
    pub tol: Tolerance,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { seed: 0, budget: 10_000, lattice_cap: 10_000, tol: Tolerance::default() }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        SearchConfig { seed, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchFailure {
    /// Budget exhausted; says nothing about the condition itself.
    #[error("not certified after {tried} candidates")]
    Exhausted { tried: usize },
    /// The condition provably fails.
    #[error("impossible: {reason}")]
    Impossible { reason: String },
}

impl SearchFailure {
    pub fn is_exact(&self) -> bool {
        matches!(self, SearchFailure::Impossible { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeloshapkaVerdict {
    pub cond_a: bool,
    pub cond_b: bool,
    pub sigma_a: f64,
    pub sigma_b: f64,
}

/// Witness for condition (t).
#[derive(Debug, Clone, PartialEq)]
pub struct TCertificate {
    /// Unit vector.
    pub c: Vec<f64>,
    /// `Σ c_j A_j`.
    pub a: CMat,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub positive_definite: bool,
}

/// Data attached to a candidate `V` for conditions (d) and (f).
#[derive(Debug, Clone, PartialEq)]
pub struct VCertificate {
    pub v: Vec<C64>,
    pub d_matrix: CMat,
    /// `ᵗD̄ A^{-1} D`.
    pub b_matrix: CMat,
    pub re_b_sigma_min: f64,
    pub b_sigma_min: f64,
    pub re_b_invertible: bool,
    pub b_invertible: bool,
    /// Real rank of `{A_1 V, …, A_d V}`.
    pub real_rank_d: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotallyRealVerdict {
    pub totally_real: bool,
    pub sigma_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NondegeneracyReport {
    pub cond_a: bool,
    pub cond_b: bool,
    pub cond_t: bool,
    pub cond_d: bool,
    pub cond_f: bool,
    pub c_cert: Option<Vec<f64>>,
    /// Witness for (d).
    pub v_cert: Option<Vec<C64>>,
    /// Witness for (f), when found.
    pub v_full_cert: Option<Vec<C64>>,
    pub a_comb: Option<CMat>,
    pub d_matrix: Option<CMat>,
    pub b_matrix: Option<CMat>,
    pub positive_definite_witness: bool,
    pub t_failure: Option<SearchFailure>,
    pub d_failure: Option<SearchFailure>,
    pub f_failure: Option<SearchFailure>,
    pub sigma_min_values: BTreeMap<String, f64>,
}

pub fn check_beloshapka(model: &HermitianModel, tol: Tolerance) -> BeloshapkaVerdict {
    let (n, d) = (model.n(), model.d());
    // (a): the d matrices as real vectors of length 2n².
    let mut flat = RMat::zeros(2 * n * n, d);
    for (j, aj) in model.levi_matrices().iter().enumerate() {
        for (k, z) in aj.iter().enumerate() {
            flat[(k, j)] = z.re;
            flat[(n * n + k, j)] = z.im;
        }
    }
    let ra = numerical_rank(&flat, tol);
    // (b): ⋂ Ker A_j = {0} iff the stacked (dn) x n matrix has rank n.
    let mut stacked = CMat::zeros(d * n, n);
    for (j, aj) in model.levi_matrices().iter().enumerate() {
        stacked.view_mut((j * n, 0), (n, n)).copy_from(aj);
    }
    let rb = complex_rank(&stacked, tol);
    BeloshapkaVerdict { cond_a: ra.rank == d, cond_b: rb.rank == n, sigma_a: ra.sigma_min, sigma_b: rb.sigma_min }
}

fn unit(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}

fn unit_c(v: &[C64]) -> Vec<C64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / norm).collect()
}

fn is_positive_definite(a: &CMat, tol: Tolerance) -> bool {
    let ev = hermitian_eigenvalues(a);
    let scale = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    ev.iter().all(|&x| x > tol.threshold(scale))
}

fn t_candidate(model: &HermitianModel, c: &[f64], tol: Tolerance) -> Option<TCertificate> {
    let c = unit(c);
    let a = model.levi_combination(&c);
    let info = complex_rank(&a, tol);
    if info.rank < model.n() {
        return None;
    }
    let (c, a, positive_definite) = if is_positive_definite(&a, tol) {
        (c, a, true)
    } else if is_positive_definite(&(-&a), tol) {
        (c.iter().map(|x| -x).collect(), -a, true)
    } else {
        (c, a, false)
    };
    Some(TCertificate { c, a, sigma_min: info.sigma_min, sigma_max: info.sigma_max, positive_definite })
}

/// Nonzero vectors of `{-1, 0, 1}^d` with leading entry `+1`, by support size.
fn sign_lattice(d: usize, cap: usize, mut visit: impl FnMut(&[f64]) -> ControlFlow<()>) -> usize {
    let mut count = 0;
    for size in 1..=d {
        let mut support: Vec<usize> = (0..size).collect();
        loop {
            for signs in 0u64..(1u64 << (size - 1)) {
                if count >= cap {
                    return count;
                }
                let mut c = vec![0.0; d];
                c[support[0]] = 1.0;
                for (bit, &idx) in support.iter().enumerate().skip(1) {
                    c[idx] = if signs >> (bit - 1) & 1 == 0 { 1.0 } else { -1.0 };
                }
                count += 1;
                if visit(&c).is_break() {
                    return count;
                }
            }
            // next combination
            let mut i = size;
            while i > 0 && support[i - 1] == d - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            support[i - 1] += 1;
            for k in i..size {
                support[k] = support[k - 1] + 1;
            }
        }
    }
    count
}

/// Exact test that `det(Σ c_j A_j)` vanishes identically, available for `n <= 2`.
fn determinant_identically_zero(model: &HermitianModel, tol: Tolerance) -> Option<bool> {
    let mats = model.levi_matrices();
    let scale = mats.iter().flat_map(|m| m.iter()).fold(0.0f64, |m, z| m.max(z.norm())).max(1.0);
    match model.n() {
        1 => Some(mats.iter().all(|m| m[(0, 0)].norm() <= tol.rel * scale)),
        2 => {
            // det is the quadratic form with symmetric coefficients q_jk.
            let d = model.d();
            let mut zero = true;
            for j in 0..d {
                for k in j..d {
                    let (x, y) = (&mats[j], &mats[k]);
                    let q = 0.5
                        * (x[(0, 0)] * y[(1, 1)] + y[(0, 0)] * x[(1, 1)] - x[(0, 1)] * y[(1, 0)] - y[(0, 1)] * x[(1, 0)]);
                    if q.norm() > tol.rel * scale * scale {
                        zero = false;
                    }
                }
            }
            Some(zero)
        }
        _ => None,
    }
}

/// Certificate for condition (t). Among lattice candidates a definite
/// combination is preferred, then the best conditioned one.
pub fn find_invertible_combination(model: &HermitianModel, search: &SearchConfig) -> Result<TCertificate, SearchFailure> {
    if determinant_identically_zero(model, search.tol) == Some(true) {
        return Err(SearchFailure::Impossible { reason: "det(Σ c_j A_j) vanishes identically".into() });
    }
    let d = model.d();
    let mut best: Option<TCertificate> = None;
    let score = |t: &TCertificate| (t.positive_definite, t.sigma_min / t.sigma_max);
    let tried = sign_lattice(d, search.lattice_cap.min(search.budget), |c| {
        if let Some(cand) = t_candidate(model, c, search.tol) {
            let better = match &best {
                None => true,
                Some(b) => {
                    let (p0, s0) = score(b);
                    let (p1, s1) = score(&cand);
                    (p1 && !p0) || (p1 == p0 && s1 > s0)
                }
            };
            if better {
                best = Some(cand);
            }
        }
        ControlFlow::Continue(())
    });
    if let Some(b) = best {
        return Ok(b);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut count = tried;
    while count < search.budget {
        count += 1;
        let c: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Some(cand) = t_candidate(model, &c, search.tol) {
            return Ok(cand);
        }
    }
    Err(SearchFailure::Exhausted { tried: count })
}

/// Evaluates `D`, `B = ᵗD̄ A^{-1} D` and the invertibility verdicts for a
/// given `V`. Returns `None` when `Σ c_j A_j` is singular.
pub fn evaluate_v_certificate(model: &HermitianModel, c: &[f64], v: &[C64], tol: Tolerance) -> Option<VCertificate> {
    let a = model.levi_combination(c);
    if complex_rank(&a, tol).rank < model.n() {
        return None;
    }
    let a_inv = a.try_inverse()?;
    let d_matrix = model.d_matrix(v);
    let b_matrix = d_matrix.adjoint() * &a_inv * &d_matrix;
    let re_b = b_matrix.map(|z| z.re);
    let re_info = numerical_rank(&re_b, tol);
    let b_info = complex_rank(&b_matrix, tol);
    let real_rank_d = numerical_rank(&realified_columns(&columns(&d_matrix)), tol).rank;
    let d = model.d();
    Some(VCertificate {
        v: v.to_vec(),
        re_b_sigma_min: re_info.sigma_min,
        b_sigma_min: b_info.sigma_min,
        re_b_invertible: re_info.rank == d,
        b_invertible: b_info.rank == d,
        real_rank_d,
        d_matrix,
        b_matrix,
    })
}

fn columns(m: &CMat) -> Vec<Vec<C64>> {
    (0..m.ncols()).map(|j| m.column(j).iter().copied().collect()).collect()
}

/// Gaussian integers with `|re|, |im| <= 2`, ordered by `|re| + |im|`.
fn gaussian_values() -> Vec<(C64, u32)> {
    let mut vals = vec![(C64::new(0.0, 0.0), 0)];
    let mut rest: Vec<(C64, u32)> = Vec::new();
    for w in 1..=4i32 {
        let mut level: Vec<C64> = Vec::new();
        // pure real, pure imaginary and mixed entries of this weight
        for &(re, im) in &[(w, 0), (-w, 0), (0, w), (0, -w)] {
            if re.abs() <= 2 && im.abs() <= 2 {
                level.push(C64::new(re as f64, im as f64));
            }
        }
        let mut mixed = Vec::new();
        for a in 1..w {
            let b = w - a;
            if a <= 2 && b <= 2 {
                for &(sr, si) in &[(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                    mixed.push(C64::new((sr * a) as f64, (si * b) as f64));
                }
            }
        }
        // weight one has no mixed entries; for weight two list 1±i first
        if w == 2 {
            level = mixed.drain(..).chain(level).collect();
        } else {
            level.extend(mixed);
        }
        rest.extend(level.into_iter().map(|z| (z, w as u32)));
    }
    vals.extend(rest);
    vals
}

/// Nonzero Gaussian-integer vectors by increasing total weight, then
/// lexicographically in the order of [`gaussian_values`].
fn gaussian_lattice(n: usize, cap: usize, mut visit: impl FnMut(&[C64]) -> ControlFlow<()>) -> usize {
    let vals = gaussian_values();
    let mut count = 0;
    let mut current = vec![C64::new(0.0, 0.0); n];
    fn rec(
        pos: usize,
        remaining: u32,
        vals: &[(C64, u32)],
        current: &mut Vec<C64>,
        count: &mut usize,
        cap: usize,
        visit: &mut dyn FnMut(&[C64]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let n = current.len();
        if pos == n {
            if remaining == 0 {
                if *count >= cap {
                    return ControlFlow::Break(());
                }
                *count += 1;
                return visit(current);
            }
            return ControlFlow::Continue(());
        }
        let slots_after = (n - pos - 1) as u32;
        for &(z, w) in vals {
            if w > remaining || remaining - w > 4 * slots_after {
                continue;
            }
            current[pos] = z;
            rec(pos + 1, remaining - w, vals, current, count, cap, visit)?;
        }
        current[pos] = C64::new(0.0, 0.0);
        ControlFlow::Continue(())
    }
    for total in 1..=(4 * n as u32) {
        if rec(0, total, &vals, &mut current, &mut count, cap, &mut visit).is_break() {
            break;
        }
    }
    count
}

fn search_v(
    model: &HermitianModel,
    c: &[f64],
    search: &SearchConfig,
    accept: impl Fn(&VCertificate) -> bool,
) -> Result<VCertificate, SearchFailure> {
    let n = model.n();
    let mut found: Option<VCertificate> = None;
    let tried = gaussian_lattice(n, search.lattice_cap.min(search.budget), |v| {
        let v = unit_c(v);
        match evaluate_v_certificate(model, c, &v, search.tol) {
            Some(cert) if accept(&cert) => {
                found = Some(cert);
                ControlFlow::Break(())
            }
            _ => ControlFlow::Continue(()),
        }
    });
    if let Some(cert) = found {
        return Ok(cert);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut count = tried;
    while count < search.budget {
        count += 1;
        let v: Vec<C64> =
            (0..n).map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
        let v = unit_c(&v);
        if let Some(cert) = evaluate_v_certificate(model, c, &v, search.tol) {
            if accept(&cert) {
                return Ok(cert);
            }
        }
    }
    Err(SearchFailure::Exhausted { tried: count })
}

fn require_invertible(model: &HermitianModel, c: &[f64], tol: Tolerance) -> Result<(), SearchFailure> {
    if complex_rank(&model.levi_combination(c), tol).rank < model.n() {
        return Err(SearchFailure::Impossible { reason: "Σ c_j A_j is singular for the supplied c".into() });
    }
    Ok(())
}

/// Certificate for condition (d): `Re(ᵗD̄ A^{-1} D)` invertible.
pub fn certify_d_nondegenerate(model: &HermitianModel, c: &[f64], search: &SearchConfig) -> Result<VCertificate, SearchFailure> {
    let (n, d) = (model.n(), model.d());
    if d > 2 * n {
        return Err(SearchFailure::Impossible { reason: format!("d = {d} > 2n = {}", 2 * n) });
    }
    require_invertible(model, c, search.tol)?;
    search_v(model, &unit(c), search, |cert| cert.re_b_invertible)
}

/// Certificate for condition (f): both `B` and `Re B` invertible.
pub fn certify_fully_nondegenerate(model: &HermitianModel, c: &[f64], search: &SearchConfig) -> Result<VCertificate, SearchFailure> {
    let (n, d) = (model.n(), model.d());
    if d > n {
        return Err(SearchFailure::Impossible { reason: format!("d = {d} > n = {n}") });
    }
    require_invertible(model, c, search.tol)?;
    search_v(model, &unit(c), search, |cert| cert.re_b_invertible && cert.b_invertible)
}

/// Whether `Σ c_j A_j` is positive definite for this particular `c`.
pub fn check_strict_pseudoconvexity_witness(model: &HermitianModel, c: &[f64], tol: Tolerance) -> bool {
    is_positive_definite(&model.levi_combination(c), tol)
}

/// Whether `N*M` is totally real at `(0, Σ c_j ∂r_j(0))`.
pub fn conormal_totally_real_check(model: &HermitianModel, c: &[f64], tol: Tolerance) -> TotallyRealVerdict {
    let funcs = DefiningFunctions::new(model);
    let big_n = model.big_n();
    let origin = vec![C64::new(0.0, 0.0); big_n];
    let grad = funcs.gradient(&origin);
    let hess = funcs.hessians(&origin);
    let real_grad = funcs.real_gradient(&origin);
    let mut gmat = RMat::zeros(model.d(), 2 * big_n);
    for (j, row) in real_grad.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            gmat[(j, k)] = *x;
        }
    }
    let (tangent_m, _) = real_kernel(&gmat, tol);
    let mut tangent: Vec<Vec<C64>> = Vec::with_capacity(2 * big_n);
    for col in 0..tangent_m.ncols() {
        let dx: Vec<C64> = (0..big_n).map(|k| C64::new(tangent_m[(k, col)], tangent_m[(big_n + k, col)])).collect();
        let mut dxi = vec![C64::new(0.0, 0.0); big_n];
        for (j, h) in hess.iter().enumerate() {
            for (acc, v) in dxi.iter_mut().zip(DefiningFunctions::gradient_derivative(h, &dx)) {
                *acc += v * c[j];
            }
        }
        tangent.push(dx.into_iter().chain(dxi).collect());
    }
    for j in 0..model.d() {
        let xi: Vec<C64> = (0..big_n).map(|k| grad[(j, k)]).collect();
        tangent.push(vec![C64::new(0.0, 0.0); big_n].into_iter().chain(xi).collect());
    }
    let mut both: Vec<Vec<C64>> = tangent.clone();
    both.extend(tangent.iter().map(|t| t.iter().map(|z| z * crate::linalg::I).collect::<Vec<_>>()));
    let info = numerical_rank(&realified_columns(&both), tol);
    TotallyRealVerdict { totally_real: info.rank == 4 * big_n, sigma_min: info.sigma_min }
}

/// Runs every check and search and collects the verdicts.
pub fn classify(model: &HermitianModel, search: &SearchConfig) -> NondegeneracyReport {
    let tol = search.tol;
    let bel = check_beloshapka(model, tol);
    let mut sigma = BTreeMap::new();
    sigma.insert("a".to_string(), bel.sigma_a);
    sigma.insert("b".to_string(), bel.sigma_b);
    let mut report = NondegeneracyReport {
        cond_a: bel.cond_a,
        cond_b: bel.cond_b,
        cond_t: false,
        cond_d: false,
        cond_f: false,
        c_cert: None,
        v_cert: None,
        v_full_cert: None,
        a_comb: None,
        d_matrix: None,
        b_matrix: None,
        positive_definite_witness: false,
        t_failure: None,
        d_failure: None,
        f_failure: None,
        sigma_min_values: sigma,
    };
    let t = match find_invertible_combination(model, search) {
        Ok(t) => t,
        Err(e) => {
            let reason = SearchFailure::Impossible { reason: "condition (t) not certified".into() };
            report.t_failure = Some(e);
            report.d_failure = Some(reason.clone());
            report.f_failure = Some(reason);
            return report;
        }
    };
    report.cond_t = true;
    report.sigma_min_values.insert("t".into(), t.sigma_min);
    report.positive_definite_witness = t.positive_definite;
    report.c_cert = Some(t.c.clone());
    report.a_comb = Some(t.a.clone());
    let d_res = certify_d_nondegenerate(model, &t.c, search);
    let f_res = certify_fully_nondegenerate(model, &t.c, search);
    if let Ok(f) = &f_res {
        report.cond_f = true;
        report.v_full_cert = Some(f.v.clone());
        report.sigma_min_values.insert("f_b".into(), f.b_sigma_min);
        report.sigma_min_values.insert("f_re_b".into(), f.re_b_sigma_min);
    }
    // (f) implies (d); a (f) witness also certifies (d).
    let d_cert = d_res.clone().ok().or_else(|| f_res.clone().ok());
    if let Some(dc) = d_cert {
        report.cond_d = true;
        report.sigma_min_values.insert("d_re_b".into(), dc.re_b_sigma_min);
        report.v_cert = Some(dc.v.clone());
        report.d_matrix = Some(dc.d_matrix.clone());
        report.b_matrix = Some(dc.b_matrix.clone());
    }
    report.d_failure = d_res.err().filter(|_| !report.cond_d);
    report.f_failure = f_res.err();
    report
}
