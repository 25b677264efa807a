use super::{resolve_model, ExitStatus, Record, Report, RunManifest};
use crate::deformation::{coverage_probe, newton_solve, params_of, probe_family, select_pins, SolveConfig, SolveError};
use crate::disc::{
    attachment_residual, canonical_disc, canonical_lift, compute_defect, is_nondefective, lift_from_json, lift_to_json,
    pushforward_lift, stationarity_residual, DiscConfig, LiftedDisc, PolyMap,
};
use crate::linalg::{Tolerance, C64, I};
use crate::model::{
    certify_d_nondegenerate, check_strict_pseudoconvexity_witness, classify as classify_model, conormal_totally_real_check,
    find_invertible_combination, HermitianModel, SearchConfig,
};
use crate::rh::{birkhoff_check, certify_jet_injectivity, operator_residual, tangent_kernel, to_lift, GAssembly, KernelConfig, KernelMethod, RhError};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::Value;
use std::path::{Path, PathBuf};

type CmdResult = Result<(), String>;

fn pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn lift_value(lift: &LiftedDisc) -> Value {
    serde_json::from_str(&lift_to_json(lift)).expect("lift JSON is valid")
}

fn tolerance(m: &RunManifest) -> Tolerance {
    Tolerance::new(m.options.tol)
}

fn search(m: &RunManifest) -> SearchConfig {
    SearchConfig { tol: tolerance(m), ..SearchConfig::with_seed(m.options.seed) }
}

fn model_of(m: &RunManifest) -> Result<HermitianModel, String> {
    resolve_model(m.model_path.as_deref().expect("validated"))
}

/// `(V, c, source)` from the flags, falling back to the certificate
/// searches; without a (d) witness `V = e_1`.
fn certificate(model: &HermitianModel, m: &RunManifest) -> Result<(Vec<C64>, Vec<f64>, &'static str), String> {
    let quadric = model.quadric_part();
    let s = search(m);
    let c = match &m.options.c {
        Some(c) => c.clone(),
        None => find_invertible_combination(&quadric, &s).map_err(|e| format!("condition (t) not certified: {e}"))?.c,
    };
    if c.len() != model.d() {
        return Err(format!("--c has {} entries, model has d = {}", c.len(), model.d()));
    }
    let (v, source) = match &m.options.v {
        Some(v) => (v.clone(), "flags"),
        None => match certify_d_nondegenerate(&quadric, &c, &s) {
            Ok(cert) => (cert.v, "d-certificate"),
            Err(_) => {
                let mut e = vec![C64::new(0.0, 0.0); model.n()];
                e[0] = C64::new(1.0, 0.0);
                (e, "default e_1")
            }
        },
    };
    if v.len() != model.n() {
        return Err(format!("--V has {} entries, model has n = {}", v.len(), model.n()));
    }
    Ok((v, c, source))
}

fn certificate_record(v: &[C64], c: &[f64], source: &str) -> Record {
    Record::new("certificate").with("V", pairs(v)).with("c", c).with("source", source)
}

fn classify_one(model: &HermitianModel, s: &SearchConfig) -> (Record, ExitStatus) {
    let r = classify_model(model, s);
    let failure = |f: &Option<crate::model::SearchFailure>| {
        f.as_ref().map(|f| serde_json::json!({ "exact": f.is_exact(), "reason": f.to_string() }))
    };
    let strict = r.c_cert.as_ref().map(|c| check_strict_pseudoconvexity_witness(model, c, s.tol));
    let totally_real = r.c_cert.as_ref().map(|c| conormal_totally_real_check(model, c, s.tol).totally_real);
    let record = Record::new("classify")
        .with("n", model.n())
        .with("d", model.d())
        .with("cond_a", r.cond_a)
        .with("cond_b", r.cond_b)
        .with("cond_t", r.cond_t)
        .with("cond_d", r.cond_d)
        .with("cond_f", r.cond_f)
        .with("c", &r.c_cert)
        .with("V", r.v_cert.as_deref().map(pairs))
        .with("V_full", r.v_full_cert.as_deref().map(pairs))
        .with("strictly_pseudoconvex_witness", strict)
        .with("conormal_totally_real", totally_real)
        .with("t_failure", failure(&r.t_failure))
        .with("d_failure", failure(&r.d_failure))
        .with("f_failure", failure(&r.f_failure))
        .with("sigma_min", &r.sigma_min_values);
    (record, ExitStatus::from_verdict(r.cond_t && r.cond_d))
}

pub fn classify(m: &RunManifest, report: &mut Report) -> CmdResult {
    let path = m.model_path.as_deref().expect("validated");
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| format!("{}: {e}", path.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "model"))
            .collect();
        files.sort();
        let mut rng = ChaCha8Rng::seed_from_u64(m.options.seed);
        let seeds: Vec<u64> = files.iter().map(|_| rng.next_u64()).collect();
        let results: Vec<(Record, ExitStatus)> = files
            .par_iter()
            .zip(seeds.par_iter())
            .map(|(f, &seed)| {
                let s = SearchConfig { tol: tolerance(m), ..SearchConfig::with_seed(seed) };
                match resolve_model(f) {
                    Ok(model) => {
                        let (rec, st) = classify_one(&model, &s);
                        (rec.with("file", f.to_string_lossy()).with("file_seed", seed), st)
                    }
                    Err(e) => (Record::new("error").with("file", f.to_string_lossy()).with("message", e), ExitStatus::Error),
                }
            })
            .collect();
        for (rec, st) in results {
            report.push(rec);
            report.settle(st);
        }
        return Ok(());
    }
    let model = model_of(m)?;
    let (rec, st) = classify_one(&model, &search(m));
    report.push(rec);
    report.settle(st);
    Ok(())
}

pub fn disc(m: &RunManifest, report: &mut Report) -> CmdResult {
    let model = model_of(m)?;
    let cfg = DiscConfig { tol: tolerance(m), ..DiscConfig::default() };
    let samples = cfg.sample_count();
    let (lift, attach_tol, stat_tol) = match &m.options.disc {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            (lift_from_json(&text).map_err(|e| e.to_string())?, 1e-8, 1e-8)
        }
        None => {
            let (v, c, source) = certificate(&model, m)?;
            report.push(certificate_record(&v, &c, source));
            let lift = canonical_lift(&model.quadric_part(), &v, &c, tolerance(m)).map_err(|e| e.to_string())?;
            (lift, 1e-12, 1e-10)
        }
    };
    if lift.dim() != model.big_n() {
        return Err(format!("lift has dimension {}, model has N = {}", lift.dim(), model.big_n()));
    }
    let attach = attachment_residual(&model, &lift.base, samples);
    let stat = stationarity_residual(&model, &lift, samples, &cfg);
    let ok = attach <= attach_tol && stat <= stat_tol;
    report.push(
        Record::new("residuals")
            .with("attachment", attach)
            .with("stationarity", if stat.is_finite() { Value::from(stat) } else { Value::from("inf") })
            .with("attachment_tol", attach_tol)
            .with("stationarity_tol", stat_tol)
            .with("stationary", ok),
    );
    report.push(Record::new("lift").with("disc", lift_value(&lift)));
    if let Some(out) = &m.options.lift_out {
        std::fs::write(out, lift_to_json(&lift)).map_err(|e| format!("{}: {e}", out.display()))?;
    }
    report.settle(ExitStatus::from_verdict(ok));
    Ok(())
}

pub fn defect(m: &RunManifest, report: &mut Report) -> CmdResult {
    let model = model_of(m)?;
    let cfg = DiscConfig { tol: tolerance(m), ..DiscConfig::default() };
    let base = match &m.options.disc {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            crate::disc::disc_from_json(&text).map_err(|e| e.to_string())?
        }
        None => {
            let v = match &m.options.v {
                Some(v) => v.clone(),
                None => certificate(&model, m)?.0,
            };
            report.push(Record::new("certificate").with("V", pairs(&v)));
            canonical_disc(&model, &v).map_err(|e| e.to_string())?
        }
    };
    let result = compute_defect(&model, &base, &cfg).map_err(|e| e.to_string())?;
    let nondefective = is_nondefective(&model, &base, &cfg).map_err(|e| e.to_string())?;
    report.push(
        Record::new("defect")
            .with("defect", result.defect)
            .with("kernel_basis", &result.kernel_basis)
            .with("singular_values", &result.residual_singular_values)
            .with("threshold", result.threshold)
            .with("nondefective", nondefective),
    );
    report.settle(ExitStatus::from_verdict(nondefective));
    Ok(())
}

fn assembly(m: &RunManifest, report: &mut Report) -> Result<(HermitianModel, GAssembly), String> {
    let model = model_of(m)?;
    let (v, c, source) = certificate(&model, m)?;
    report.push(certificate_record(&v, &c, source));
    let g = GAssembly::new(&model.quadric_part(), &v, &c, tolerance(m)).map_err(|e| e.to_string())?;
    Ok((model, g))
}

pub fn kernel(m: &RunManifest, report: &mut Report) -> CmdResult {
    let (model, g) = assembly(m, report)?;
    let cfg = KernelConfig { degree: m.options.deg.unwrap_or(1), tol: tolerance(m) };
    let expected = 2 * model.big_n();
    match tangent_kernel(&g, KernelMethod::Both, &cfg) {
        Ok(k) => {
            let closed = tangent_kernel(&g, KernelMethod::ClosedForm, &cfg).map_err(|e| e.to_string())?;
            let samples = 8 * (cfg.degree + 2);
            let closed_residual = closed.elements.iter().map(|f| operator_residual(&g, f, samples)).fold(0.0, f64::max);
            let angle = k.principal_angle.unwrap_or(f64::INFINITY);
            let ok = k.dim() == expected && angle <= 1e-8 && closed_residual <= 1e-9 && k.ladder_stable();
            report.push(
                Record::new("kernel")
                    .with("kernel_dim", k.dim())
                    .with("expected", expected)
                    .with("ladder", &k.ladder)
                    .with("ladder_stable", k.ladder_stable())
                    .with("principal_angle", angle)
                    .with("closed_form_residual", closed_residual)
                    .with("sigma_min_nonzero", k.singular_values.iter().rev().find(|&&s| s > 0.0).copied())
                    .with("verdict", ok),
            );
            for (i, e) in k.elements.iter().enumerate() {
                report.push(Record::new("basis").with("index", i).with("disc", lift_value(&to_lift(e, model.n(), model.d()))));
            }
            report.settle(ExitStatus::from_verdict(ok));
        }
        Err(RhError::KernelDimension { expected, found, ladder }) => {
            report.push(Record::new("kernel").with("kernel_dim", found).with("expected", expected).with("ladder", ladder).with("verdict", false));
            report.settle(ExitStatus::Negative);
        }
        Err(e) => return Err(e.to_string()),
    }
    Ok(())
}

pub fn jets(m: &RunManifest, report: &mut Report) -> CmdResult {
    let (_, g) = assembly(m, report)?;
    let cfg = KernelConfig { degree: m.options.deg.unwrap_or(1), tol: tolerance(m) };
    let cert = certify_jet_injectivity(&g, m.options.order, &cfg).map_err(|e| e.to_string())?;
    report.push(
        Record::new("jets")
            .with("order", cert.order)
            .with("kernel_dim", cert.kernel_dim)
            .with("rank", cert.rank)
            .with("sigma_min", cert.sigma_min)
            .with("threshold", cert.threshold)
            .with("jet_kernel_dim", cert.jet_kernel_dim)
            .with("expected_jet_kernel_dim", cert.expected_jet_kernel_dim)
            .with("injective", cert.injective),
    );
    report.settle(ExitStatus::from_verdict(cert.injective));
    Ok(())
}

/// Input of `solve` when given a JSON manifest instead of a model file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveManifest {
    /// Model file, relative to the manifest, or `@name`.
    pub model: String,
    #[serde(rename = "V", default)]
    pub v: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub c: Option<Vec<f64>>,
    /// Absolute pinned-coordinate targets.
    #[serde(default)]
    pub targets: Vec<Vec<f64>>,
    /// Targets relative to the pinned coordinates of the canonical lift.
    #[serde(default)]
    pub offsets: Vec<Vec<f64>>,
    #[serde(default)]
    pub deg_max: Option<usize>,
    #[serde(default)]
    pub newton_tol: Option<f64>,
    #[serde(default)]
    pub damping: Option<f64>,
}

fn load_solve_input(path: &Path) -> Result<(HermitianModel, Option<SolveManifest>), String> {
    if path.to_string_lossy().starts_with('@') {
        return Ok((resolve_model(path)?, None));
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("{}: line {}: {e}", path.display(), e.line()))?;
    if value.get("model").is_none() {
        return Ok((resolve_model(path)?, None));
    }
    let manifest: SolveManifest = serde_json::from_value(value).map_err(|e| format!("{}: {e}", path.display()))?;
    let model_path = if manifest.model.starts_with('@') {
        PathBuf::from(&manifest.model)
    } else {
        path.parent().unwrap_or(Path::new(".")).join(&manifest.model)
    };
    Ok((resolve_model(&model_path)?, Some(manifest)))
}

pub fn solve(m: &RunManifest, report: &mut Report) -> CmdResult {
    let (model, manifest) = load_solve_input(m.model_path.as_deref().expect("validated"))?;
    let mut run = m.clone();
    if let Some(sm) = &manifest {
        if run.options.v.is_none() {
            run.options.v = sm.v.as_ref().map(|v| v.iter().map(|p| C64::new(p[0], p[1])).collect());
        }
        if run.options.c.is_none() {
            run.options.c.clone_from(&sm.c);
        }
    }
    let (v, c, source) = certificate(&model, &run)?;
    report.push(certificate_record(&v, &c, source));
    let quadric = model.quadric_part();
    let initial = canonical_lift(&quadric, &v, &c, tolerance(m)).map_err(|e| e.to_string())?;
    let mut cfg = SolveConfig { tol: tolerance(m), ..SolveConfig::default() };
    if let Some(d) = m.options.deg.or(manifest.as_ref().and_then(|s| s.deg_max)) {
        cfg.deg_max = d;
    }
    if let Some(sm) = &manifest {
        cfg.newton_tol = sm.newton_tol.unwrap_or(cfg.newton_tol);
        cfg.damping = sm.damping.unwrap_or(cfg.damping);
    }
    let selection = select_pins(&quadric, &v, &c, cfg.tol).map_err(|e| e.to_string())?;
    report.push(
        Record::new("pins")
            .with("indices", &selection.indices)
            .with("jet_rank", selection.rank)
            .with("expected", selection.indices.len())
            .with("sigma_min", selection.sigma_min)
            .with("valid", selection.valid()),
    );
    cfg.pins = Some(selection.indices.clone());
    let base = params_of(&initial, &selection.indices);
    let mut targets: Vec<Vec<f64>> = Vec::new();
    if let Some(sm) = &manifest {
        targets.extend(sm.targets.iter().cloned());
        targets.extend(sm.offsets.iter().map(|o| base.iter().zip(o).map(|(a, b)| a + b).collect()));
    }
    if targets.is_empty() {
        targets.push(base);
    }
    let dcfg = DiscConfig::default();
    let results: Vec<_> = targets.par_iter().map(|t| newton_solve(&model, &initial, t, &cfg)).collect();
    let mut lifts_out = String::new();
    for (i, (t, res)) in targets.iter().zip(results).enumerate() {
        match res {
            Ok(p) => {
                let attach = attachment_residual(&model, &p.lift.base, 4 * cfg.sample_count());
                let stat = stationarity_residual(&model, &p.lift, 4 * cfg.sample_count(), &dcfg);
                report.push(
                    Record::new("point")
                        .with("index", i)
                        .with("converged", true)
                        .with("iterations", p.iterations)
                        .with("residual", p.residual)
                        .with("attachment", attach)
                        .with("stationarity", stat)
                        .with("params", &p.params)
                        .with("disc", lift_value(&p.lift)),
                );
                lifts_out.push_str(&lift_to_json(&p.lift));
                lifts_out.push('\n');
            }
            Err(e) => {
                let status = match e {
                    SolveError::SingularLinearization { .. } => ExitStatus::Negative,
                    _ => ExitStatus::Error,
                };
                report.push(Record::new("point").with("index", i).with("converged", false).with("target", t).with("error", e.to_string()));
                report.settle(status);
            }
        }
    }
    if let Some(out) = &m.options.lift_out {
        std::fs::write(out, lifts_out).map_err(|e| format!("{}: {e}", out.display()))?;
    }
    Ok(())
}

pub fn probe(m: &RunManifest, report: &mut Report) -> CmdResult {
    let model = model_of(m)?;
    let (v, c, source) = certificate(&model, m)?;
    report.push(certificate_record(&v, &c, source));
    let initial = canonical_lift(&model.quadric_part(), &v, &c, tolerance(m)).map_err(|e| e.to_string())?;
    let mut cfg = SolveConfig { tol: tolerance(m), ..SolveConfig::default() };
    if let Some(d) = m.options.deg {
        cfg.deg_max = d;
    }
    let family = match probe_family(&model, &initial, 1e-4, &cfg) {
        Ok(f) => Some(f),
        Err(e @ SolveError::SingularLinearization { .. }) => {
            report.push(Record::new("family").with("solved", false).with("reason", e.to_string()));
            None
        }
        Err(e) => return Err(e.to_string()),
    };
    let r = coverage_probe(&model, &initial, family.as_ref(), m.options.theta_max, &cfg).map_err(|e| e.to_string())?;
    report.push(Record::new("probe").with("report", &r));
    report.settle(ExitStatus::from_verdict(r.certified));
    Ok(())
}

fn check(report: &mut Report, name: &str, pass: bool, detail: impl serde::Serialize) {
    report.push(Record::new("check").with("name", name).with("pass", pass).with("detail", detail));
    report.settle(ExitStatus::from_verdict(pass));
}

pub fn selftest(m: &RunManifest, report: &mut Report) -> CmdResult {
    let s = search(m);
    let tol = tolerance(m);
    let one = C64::new(1.0, 0.0);

    let q1 = classify_model(&HermitianModel::q1(), &s);
    check(
        report,
        "q1 D-nondegenerate, not fully nondegenerate",
        q1.cond_t && q1.cond_d && !q1.cond_f && q1.f_failure.as_ref().is_some_and(|f| f.is_exact()),
        serde_json::json!({ "c": q1.c_cert, "V": q1.v_cert.as_deref().map(pairs) }),
    );
    let q2 = classify_model(&HermitianModel::q2(), &s);
    let strict = q2.c_cert.as_ref().map(|c| check_strict_pseudoconvexity_witness(&HermitianModel::q2(), c, tol));
    check(report, "q2 D-nondegenerate, witness not positive definite", q2.cond_d && strict == Some(false), serde_json::json!({ "c": q2.c_cert }));

    let dcfg = DiscConfig::default();
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let cases: Vec<(&str, HermitianModel, Vec<C64>, Vec<f64>)> = vec![
        ("sphere", HermitianModel::sphere(), vec![one], vec![1.0]),
        ("q1", HermitianModel::q1(), vec![one, I], vec![1.0, 1.0, 0.0]),
        ("q2", HermitianModel::q2(), vec![one, C64::new(0.0, 0.0), one], vec![1.0, 1.0]),
        ("twin-sphere", HermitianModel::twin_sphere(), vec![one], vec![s2, s2]),
    ];
    for (name, model, v, c) in &cases {
        let lift = canonical_lift(model, v, c, tol).map_err(|e| e.to_string())?;
        let a = attachment_residual(model, &lift.base, 64);
        let st = stationarity_residual(model, &lift, 64, &dcfg);
        check(report, &format!("{name} canonical lift stationary"), a <= 1e-12 && st <= 1e-10, [a, st]);
        let g = GAssembly::new(model, v, c, tol).map_err(|e| e.to_string())?;
        let dim = tangent_kernel(&g, KernelMethod::Numeric, &KernelConfig::default()).map(|k| k.dim()).unwrap_or(0);
        check(report, &format!("{name} tangent kernel dimension 2N"), dim == 2 * model.big_n(), dim);
    }

    let q1m = HermitianModel::q1();
    let d0 = compute_defect(&q1m, &canonical_disc(&q1m, &[one, I]).map_err(|e| e.to_string())?, &dcfg).map_err(|e| e.to_string())?;
    let d1 = compute_defect(&q1m, &canonical_disc(&q1m, &[one, one]).map_err(|e| e.to_string())?, &dcfg).map_err(|e| e.to_string())?;
    check(report, "q1 defects 0 and 1", d0.defect == 0 && d1.defect == 1, [d0.defect, d1.defect]);

    let kcfg = KernelConfig::default();
    let jet = |model: &HermitianModel, v: &[C64], c: &[f64], order: usize| -> Result<bool, String> {
        let g = GAssembly::new(model, v, c, tol).map_err(|e| e.to_string())?;
        Ok(certify_jet_injectivity(&g, order, &kcfg).map_err(|e| e.to_string())?.injective)
    };
    let j_q1 = jet(&q1m, &[one, I], &[1.0, 1.0, 0.0], 1)?;
    let j_q2 = jet(&HermitianModel::q2(), &[one, one, one], &[1.0, 1.0], 1)?;
    let j_tw = jet(&HermitianModel::twin_sphere(), &[one], &[s2, s2], 2)?;
    check(report, "jet certificates", j_q1 && !j_q2 && j_tw, [j_q1, j_q2, j_tw]);

    let b = birkhoff_check(8, tol);
    check(report, "Birkhoff factorization", b.pass, &b);

    let sphere = HermitianModel::sphere();
    let lift = canonical_lift(&sphere, &[one], &[1.0], tol).map_err(|e| e.to_string())?;
    let cfg = SolveConfig { deg_max: 4, ..SolveConfig::default() };
    let pins = select_pins(&sphere, &[one], &[1.0], tol).map_err(|e| e.to_string())?.indices;
    let fixed = newton_solve(&sphere, &lift, &params_of(&lift, &pins), &cfg).map_err(|e| e.to_string())?;
    check(report, "Newton fixed point", fixed.iterations == 0 && fixed.lift.max_coeff_distance(&lift) <= 1e-12, fixed.iterations);

    let rot = PolyMap::diagonal(&[C64::from_polar(1.0, 0.9), one]);
    let pushed = pushforward_lift(&rot, &lift, 4, tol).map_err(|e| e.to_string())?;
    let st = stationarity_residual(&sphere, &pushed.lift, 64, &dcfg);
    check(report, "rotation pushforward stationary", st <= 1e-8, st);
    Ok(())
}
