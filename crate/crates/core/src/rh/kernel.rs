use super::{GAssembly, RhError};
use crate::disc::PolyDisc;
use crate::linalg::{max_principal_angle, real_kernel, root_of_unity, RMat, Tolerance, C64, I};
use nalgebra::DVector;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    ClosedForm,
    Numeric,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    /// Degree of `p` in the unknown `(1-ζ) p(ζ)`.
    pub degree: usize,
    pub tol: Tolerance,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { degree: 1, tol: Tolerance::default() }
    }
}

/// Kernel dimension at one SVD threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderStep {
    pub rel_tol: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelBasis {
    pub method: KernelMethod,
    /// Elements in `(g, h, h̃, g̃)` order, each `(1-ζ)`-divisible.
    pub elements: Vec<PolyDisc>,
    pub ladder: Vec<LadderStep>,
    /// Singular values of the stacked real system, largest first (numeric
    /// methods only).
    pub singular_values: Vec<f64>,
    /// Largest principal angle between the numeric and closed-form spans
    /// (method `Both` only).
    pub principal_angle: Option<f64>,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn ladder_stable(&self) -> bool {
        self.ladder.windows(2).all(|w| w[0].dim == w[1].dim)
    }
}

const LADDER: [f64; 5] = [1e-11, 1e-10, 1e-9, 1e-8, 1e-7];

/// Largest entry of `|2 Re[Ḡ(ζ) f(ζ)]|` over `samples` roots of unity.
pub fn operator_residual(g: &GAssembly, f: &PolyDisc, samples: usize) -> f64 {
    (0..samples)
        .map(|s| {
            let zeta = root_of_unity(s, samples);
            let v = apply(g, f, zeta);
            v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
        })
        .fold(0.0, f64::max)
}

fn apply(g: &GAssembly, f: &PolyDisc, zeta: C64) -> Vec<f64> {
    let gbar = g.eval(zeta).map(|z| z.conj());
    let fv = DVector::from_vec(f.eval(zeta));
    (gbar * fv).iter().map(|z| 2.0 * z.re).collect()
}

/// The kernel element with parameters `a ∈ C^d`, `y, ỹ ∈ R^n`.
pub fn closed_form_element(g: &GAssembly, a: &[C64], y: &[f64], y_tilde: &[f64]) -> PolyDisc {
    let (n, d) = (g.n(), g.d());
    let dm = g.d_matrix();
    let a_inv = g.levi_inverse();
    let av = DVector::from_column_slice(a);
    let re_a = av.map(|z| C64::new(z.re, 0.0));
    let a_conj = av.map(|z| z.conj());
    let yv = DVector::from_fn(n, |k, _| C64::new(y_tilde[k] / 2.0, y[k] / 2.0));
    let x = dm * &re_a * C64::new(2.0, 0.0) + &yv;
    let big_y = dm * &a_conj * C64::new(-2.0, 0.0);
    let ax = a_inv * &x;
    let ay = a_inv * &big_y;
    // conj(B_1) restricted to the h block is -D^*.
    let b1_bar = -dm.adjoint();
    let bx = &b1_bar * &ax;
    let by = &b1_bar * &ay;
    let da = dm * &av;
    let dre = dm.map(|z| z.conj()) * &re_a;

    let mut inner = PolyDisc::zeros(2 * (n + d), 1);
    for j in 0..d {
        inner.set_coeff(j, 0, C64::new(-4.0 * bx[j].re, 0.0) + 2.0 * by[j]);
        inner.set_coeff(j, 1, -2.0 * by[j]);
        inner.set_coeff(d + 2 * n + j, 0, a[j]);
        inner.set_coeff(d + 2 * n + j, 1, -a[j].conj());
    }
    for k in 0..n {
        inner.set_coeff(d + k, 0, ax[k]);
        inner.set_coeff(d + k, 1, ay[k]);
        inner.set_coeff(d + n + k, 0, C64::new(y_tilde[k] / 2.0, -y[k] / 2.0) - 2.0 * dre[k]);
        inner.set_coeff(d + n + k, 1, 2.0 * da[k].conj());
    }
    inner.times_one_minus_zeta()
}

fn closed_form_basis(g: &GAssembly) -> Vec<PolyDisc> {
    let (n, d) = (g.n(), g.d());
    let zero_c = vec![C64::new(0.0, 0.0); d];
    let zero_r = vec![0.0; n];
    let mut out = Vec::with_capacity(2 * (n + d));
    for j in 0..d {
        for unit in [C64::new(1.0, 0.0), I] {
            let mut a = zero_c.clone();
            a[j] = unit;
            out.push(closed_form_element(g, &a, &zero_r, &zero_r));
        }
    }
    for k in 0..n {
        let mut y = zero_r.clone();
        y[k] = 1.0;
        out.push(closed_form_element(g, &zero_c, &y, &zero_r));
    }
    for k in 0..n {
        let mut yt = zero_r.clone();
        yt[k] = 1.0;
        out.push(closed_form_element(g, &zero_c, &zero_r, &yt));
    }
    out
}

/// Real coordinates of a disc: real parts of all coefficients, then
/// imaginary parts, component-major.
fn coefficient_vector(f: &PolyDisc, degree: usize) -> Vec<f64> {
    let coeffs: Vec<C64> = (0..f.dim()).flat_map(|m| (0..=degree).map(move |k| f.coeff(m, k))).collect();
    crate::linalg::realify_vec(&coeffs)
}

fn coefficient_matrix(discs: &[PolyDisc], degree: usize) -> RMat {
    let cols: Vec<DVector<f64>> = discs.iter().map(|f| DVector::from_vec(coefficient_vector(f, degree))).collect();
    RMat::from_columns(&cols)
}

/// Stacked real Galerkin matrix of `f ↦ 2Re[Ḡf]` on `(1-ζ) p`, with
/// columns indexed by the real and imaginary parts of the coefficients of
/// `p`.
fn galerkin_matrix(g: &GAssembly, degree: usize) -> (RMat, Vec<PolyDisc>) {
    let size = 2 * g.big_n();
    let samples = 8 * (degree + 2);
    let mut columns = Vec::with_capacity(2 * size * (degree + 1));
    for unit in [C64::new(1.0, 0.0), I] {
        for m in 0..size {
            for k in 0..=degree {
                let mut p = PolyDisc::zeros(size, degree);
                p.set_coeff(m, k, unit);
                columns.push(p.times_one_minus_zeta());
            }
        }
    }
    let mut mat = RMat::zeros(samples * size, columns.len());
    for s in 0..samples {
        let zeta = root_of_unity(s, samples);
        let gbar = g.eval(zeta).map(|z| z.conj());
        for (col, f) in columns.iter().enumerate() {
            let v = &gbar * DVector::from_vec(f.eval(zeta));
            for r in 0..size {
                mat[(s * size + r, col)] = 2.0 * v[r].re;
            }
        }
    }
    (mat, columns)
}

/// Kernel of `f ↦ 2Re[Ḡ(ζ) f]` on discs `(1-ζ) p` with `deg p <= degree`.
pub fn tangent_kernel(g: &GAssembly, method: KernelMethod, cfg: &KernelConfig) -> Result<KernelBasis, RhError> {
    let expected = 2 * g.big_n();
    if method == KernelMethod::ClosedForm {
        return Ok(KernelBasis {
            method,
            elements: closed_form_basis(g),
            ladder: Vec::new(),
            singular_values: Vec::new(),
            principal_angle: None,
        });
    }
    let (mat, columns) = galerkin_matrix(g, cfg.degree);
    let (basis, sv) = real_kernel(&mat, cfg.tol);
    let ladder: Vec<LadderStep> = LADDER
        .iter()
        .map(|&rel| {
            let threshold = Tolerance::new(rel).threshold(sv.first().copied().unwrap_or(0.0));
            LadderStep { rel_tol: rel, dim: sv.iter().filter(|&&x| x <= threshold).count() }
        })
        .collect();
    if basis.ncols() != expected {
        return Err(RhError::KernelDimension { expected, found: basis.ncols(), ladder });
    }
    let size = 2 * g.big_n();
    let elements: Vec<PolyDisc> = (0..basis.ncols())
        .map(|b| {
            let mut f = PolyDisc::zeros(size, cfg.degree + 1);
            for (unit, w) in columns.iter().zip(basis.column(b).iter()) {
                f = f.combine(1.0, unit, *w);
            }
            f
        })
        .collect();
    let principal_angle = if method == KernelMethod::Both {
        let deg = cfg.degree + 1;
        let closed = closed_form_basis(g);
        let a = coefficient_matrix(&closed, deg);
        let b = coefficient_matrix(&elements, deg);
        max_principal_angle(&a, &b, cfg.tol)
    } else {
        None
    };
    Ok(KernelBasis { method, elements, ladder, singular_values: sv, principal_angle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HermitianModel;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn sphere() -> GAssembly {
        GAssembly::new(&HermitianModel::sphere(), &[re(1.0)], &[1.0], Tolerance::default()).unwrap()
    }

    fn q1() -> GAssembly {
        GAssembly::new(&HermitianModel::q1(), &[re(1.0), I], &[1.0, 1.0, 0.0], Tolerance::default()).unwrap()
    }

    #[test]
    fn closed_form_elements_are_in_the_kernel() {
        for g in [sphere(), q1()] {
            for f in closed_form_basis(&g) {
                assert!(operator_residual(&g, &f, 64) < 1e-12);
            }
        }
    }

    #[test]
    fn numeric_dimensions_and_agreement() {
        let cfg = KernelConfig::default();
        let s = tangent_kernel(&sphere(), KernelMethod::Both, &cfg).unwrap();
        assert_eq!(s.dim(), 4);
        assert!(s.ladder_stable());
        assert!(s.principal_angle.unwrap() < 1e-8);
        let q = tangent_kernel(&q1(), KernelMethod::Both, &cfg).unwrap();
        assert_eq!(q.dim(), 10);
        assert!(q.principal_angle.unwrap() < 1e-8);
    }

    #[test]
    fn y_tilde_element() {
        let g = q1();
        let f = closed_form_element(&g, &[re(0.0); 3], &[0.0, 0.0], &[1.0, 0.0]);
        // h = A^{-1} X with X = (1/2, 0) and A = I; g̃ = 0.
        assert_eq!(f.coeff(3, 0), re(0.5));
        assert_eq!(f.coeff(4, 0), re(0.0));
        assert!((7..10).all(|m| f.coeff(m, 0) == re(0.0) && f.coeff(m, 1) == re(0.0)));
    }

    #[test]
    fn higher_degree_does_not_grow_kernel() {
        let cfg = KernelConfig { degree: 4, ..KernelConfig::default() };
        assert_eq!(tangent_kernel(&q1(), KernelMethod::Numeric, &cfg).unwrap().dim(), 10);
    }
}
