//! Defining functions as real parts of polynomials in `(Z, Z̄)`, with exact
//! Wirtinger derivatives up to second order.

use super::HermitianModel;
use crate::linalg::{CMat, C64};

/// `coeff · Z^hol · Z̄^anti` over the ambient coordinates `Z = (z, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: C64,
    pub hol: Vec<u32>,
    pub anti: Vec<u32>,
}

impl Monomial {
    fn eval(&self, x: &[C64]) -> C64 {
        let mut acc = self.coeff;
        for (k, xk) in x.iter().enumerate() {
            let (p, q) = (self.hol[k], self.anti[k]);
            if p > 0 {
                acc *= xk.powu(p);
            }
            if q > 0 {
                acc *= xk.conj().powu(q);
            }
        }
        acc
    }
}

/// A complex polynomial in `Z` and `Z̄`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WirtingerPoly {
    pub vars: usize,
    pub terms: Vec<Monomial>,
}

impl WirtingerPoly {
    pub fn zero(vars: usize) -> Self {
        WirtingerPoly { vars, terms: Vec::new() }
    }

    pub fn push(&mut self, coeff: C64, hol: Vec<u32>, anti: Vec<u32>) {
        debug_assert_eq!(hol.len(), self.vars);
        debug_assert_eq!(anti.len(), self.vars);
        if coeff != C64::new(0.0, 0.0) {
            self.terms.push(Monomial { coeff, hol, anti });
        }
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// `∂/∂Z_k`.
    pub fn d_hol(&self, k: usize) -> WirtingerPoly {
        let mut out = WirtingerPoly::zero(self.vars);
        for t in &self.terms {
            if t.hol[k] > 0 {
                let mut hol = t.hol.clone();
                hol[k] -= 1;
                out.push(t.coeff * t.hol[k] as f64, hol, t.anti.clone());
            }
        }
        out
    }

    /// `∂/∂Z̄_k`.
    pub fn d_anti(&self, k: usize) -> WirtingerPoly {
        let mut out = WirtingerPoly::zero(self.vars);
        for t in &self.terms {
            if t.anti[k] > 0 {
                let mut anti = t.anti.clone();
                anti[k] -= 1;
                out.push(t.coeff * t.anti[k] as f64, t.hol.clone(), anti);
            }
        }
        out
    }
}

/// Derivative polynomials of one real defining function `r = Re P`.
#[derive(Debug, Clone)]
struct RealFunction {
    p: WirtingerPoly,
    dp: Vec<WirtingerPoly>,
    dp_bar: Vec<WirtingerPoly>,
    // [k][b]: ∂_k∂_b P, ∂_k∂_b̄ P, ∂_k̄∂_b P, ∂_k̄∂_b̄ P
    hh: Vec<Vec<WirtingerPoly>>,
    ha: Vec<Vec<WirtingerPoly>>,
    ah: Vec<Vec<WirtingerPoly>>,
    aa: Vec<Vec<WirtingerPoly>>,
}

impl RealFunction {
    fn new(p: WirtingerPoly) -> Self {
        let n = p.vars;
        let dp: Vec<_> = (0..n).map(|k| p.d_hol(k)).collect();
        let dp_bar: Vec<_> = (0..n).map(|k| p.d_anti(k)).collect();
        let hh = dp.iter().map(|q| (0..n).map(|b| q.d_hol(b)).collect()).collect();
        let ha = dp.iter().map(|q| (0..n).map(|b| q.d_anti(b)).collect()).collect();
        let ah = dp_bar.iter().map(|q| (0..n).map(|b| q.d_hol(b)).collect()).collect();
        let aa = dp_bar.iter().map(|q| (0..n).map(|b| q.d_anti(b)).collect()).collect();
        RealFunction { p, dp, dp_bar, hh, ha, ah, aa }
    }
}

/// The full system `r = (r_1, …, r_d)` of a model, ready for evaluation.
#[derive(Debug, Clone)]
pub struct DefiningFunctions {
    n: usize,
    d: usize,
    rows: Vec<RealFunction>,
}

/// Values and holomorphic gradients of the defining functions at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct DefiningMap {
    pub values: Vec<f64>,
    /// `d x n`, row `j` is `∂r_j/∂z`.
    pub z_gradients: CMat,
    /// `d x d`, row `j` is `∂r_j/∂w`.
    pub w_gradients: CMat,
}

impl DefiningFunctions {
    pub fn new(model: &HermitianModel) -> Self {
        let (n, d) = (model.n(), model.d());
        let big_n = n + d;
        let unit = |k: usize| {
            let mut e = vec![0u32; big_n];
            e[k] += 1;
            e
        };
        let mut polys: Vec<WirtingerPoly> = Vec::with_capacity(d);
        for (j, aj) in model.levi_matrices().iter().enumerate() {
            let mut p = WirtingerPoly::zero(big_n);
            p.push(C64::new(1.0, 0.0), unit(n + j), vec![0; big_n]);
            for a in 0..n {
                for b in 0..n {
                    p.push(-aj[(a, b)], unit(b), unit(a));
                }
            }
            polys.push(p);
        }
        for term in model.perturbation() {
            let p = &mut polys[term.row - 1];
            // Expand Π (Im w_k)^γ_k = Π ((w_k - w̄_k) / 2i)^γ_k.
            let mut expansion: Vec<(C64, Vec<u32>, Vec<u32>)> = vec![(C64::new(term.coeff, 0.0), vec![0; big_n], vec![0; big_n])];
            for (k, &g) in term.imw_exp.iter().enumerate() {
                if g == 0 {
                    continue;
                }
                let scale = (C64::new(0.0, 2.0)).powu(g).inv();
                let mut next = Vec::new();
                for (coeff, hol, anti) in &expansion {
                    for m in 0..=g {
                        let binom = binomial(g, m) as f64;
                        let sign = if (g - m) % 2 == 0 { 1.0 } else { -1.0 };
                        let mut h = hol.clone();
                        let mut a = anti.clone();
                        h[n + k] += m;
                        a[n + k] += g - m;
                        next.push((*coeff * scale * binom * sign, h, a));
                    }
                }
                expansion = next;
            }
            for (coeff, mut hol, mut anti) in expansion {
                for k in 0..n {
                    hol[k] += term.z_exp[k];
                    anti[k] += term.zbar_exp[k];
                }
                p.push(coeff, hol, anti);
            }
        }
        DefiningFunctions { n, d, rows: polys.into_iter().map(RealFunction::new).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self, x: &[C64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.p.eval(x).re).collect()
    }

    /// `d x N` matrix whose row `j` is `∂r_j = (∂r_j/∂Z_k)_k`.
    pub fn gradient(&self, x: &[C64]) -> CMat {
        let big_n = self.n + self.d;
        let mut g = CMat::zeros(self.d, big_n);
        for (j, r) in self.rows.iter().enumerate() {
            for k in 0..big_n {
                g[(j, k)] = 0.5 * (r.dp[k].eval(x) + r.dp_bar[k].eval(x).conj());
            }
        }
        g
    }

    /// For each `r_j`, the pair `(∂_k∂_b r_j, ∂_k∂_b̄ r_j)` as `N x N` matrices.
    pub fn hessians(&self, x: &[C64]) -> Vec<(CMat, CMat)> {
        let big_n = self.n + self.d;
        self.rows
            .iter()
            .map(|r| {
                let hol = CMat::from_fn(big_n, big_n, |k, b| 0.5 * (r.hh[k][b].eval(x) + r.aa[k][b].eval(x).conj()));
                let mixed = CMat::from_fn(big_n, big_n, |k, b| 0.5 * (r.ha[k][b].eval(x) + r.ah[k][b].eval(x).conj()));
                (hol, mixed)
            })
            .collect()
    }

    /// Real gradient of `r_j` in `(Re Z, Im Z)` coordinates.
    pub fn real_gradient(&self, x: &[C64]) -> Vec<Vec<f64>> {
        let g = self.gradient(x);
        let big_n = self.n + self.d;
        (0..self.d)
            .map(|j| {
                let mut v = vec![0.0; 2 * big_n];
                for k in 0..big_n {
                    v[k] = 2.0 * g[(j, k)].re;
                    v[big_n + k] = -2.0 * g[(j, k)].im;
                }
                v
            })
            .collect()
    }

    /// Directional derivative of the covector `∂r_j` along the complex
    /// displacement `dx`.
    pub fn gradient_derivative(hessian: &(CMat, CMat), dx: &[C64]) -> Vec<C64> {
        let (hol, mixed) = hessian;
        let n = dx.len();
        (0..n)
            .map(|k| (0..n).map(|b| hol[(k, b)] * dx[b] + mixed[(k, b)] * dx[b].conj()).sum())
            .collect()
    }
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Evaluates `r` and its holomorphic gradient at `point = (z, w)`.
pub fn defining_map(model: &HermitianModel, point: &[C64]) -> DefiningMap {
    let funcs = DefiningFunctions::new(model);
    let (n, d) = (model.n(), model.d());
    assert_eq!(point.len(), n + d, "point must lie in C^n x C^d");
    let g = funcs.gradient(point);
    DefiningMap {
        values: funcs.values(point),
        z_gradients: g.columns(0, n).into_owned(),
        w_gradients: g.columns(n, d).into_owned(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;
    use crate::model::PerturbationTerm;

    fn fd_gradient(funcs: &DefiningFunctions, x: &[C64], j: usize, h: f64) -> Vec<C64> {
        (0..x.len())
            .map(|k| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[k] += h;
                xm[k] -= h;
                let rx = (funcs.values(&xp)[j] - funcs.values(&xm)[j]) / (2.0 * h);
                let mut yp = x.to_vec();
                let mut ym = x.to_vec();
                yp[k] += I * h;
                ym[k] -= I * h;
                let ry = (funcs.values(&yp)[j] - funcs.values(&ym)[j]) / (2.0 * h);
                0.5 * C64::new(rx, -ry)
            })
            .collect()
    }

    #[test]
    fn sphere_at_one_two() {
        let dm = defining_map(&HermitianModel::sphere(), &[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
        assert_eq!(dm.values, vec![1.0]);
        assert_eq!(dm.z_gradients[(0, 0)], C64::new(-1.0, 0.0));
        assert_eq!(dm.w_gradients[(0, 0)], C64::new(0.5, 0.0));
    }

    #[test]
    fn q1_at_origin() {
        let dm = defining_map(&HermitianModel::q1(), &[C64::new(0.0, 0.0); 5]);
        assert_eq!(dm.values, vec![0.0; 3]);
        assert!(dm.z_gradients.iter().all(|z| z.norm() == 0.0));
        for j in 0..3 {
            for k in 0..3 {
                let expect = if j == k { 0.5 } else { 0.0 };
                assert_eq!(dm.w_gradients[(j, k)], C64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn q1_at_one_i() {
        let p = [C64::new(1.0, 0.0), I, C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let dm = defining_map(&HermitianModel::q1(), &p);
        assert_eq!(dm.values, vec![-1.0, -1.0, 0.0]);
        // row 3: -ᵗz̄ A_3 = -(z̄_2, z̄_1) = (i, -1)
        let funcs = DefiningFunctions::new(&HermitianModel::q1());
        let fd = fd_gradient(&funcs, &p, 2, 1e-5);
        assert!((dm.z_gradients[(2, 0)] - I).norm() < 1e-15);
        assert!((dm.z_gradients[(2, 1)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((fd[0] - I).norm() < 1e-8 && (fd[1] + 1.0).norm() < 1e-8);
    }

    #[test]
    fn perturbed_gradient_and_hessian_match_finite_differences() {
        let model = HermitianModel::q1()
            .with_perturbation(vec![
                PerturbationTerm { row: 1, coeff: 0.3, z_exp: vec![2, 0], zbar_exp: vec![0, 1], imw_exp: vec![0, 0, 0] },
                PerturbationTerm { row: 3, coeff: -0.7, z_exp: vec![1, 0], zbar_exp: vec![0, 0], imw_exp: vec![0, 1, 0] },
                PerturbationTerm { row: 2, coeff: 0.2, z_exp: vec![0, 0], zbar_exp: vec![0, 0], imw_exp: vec![1, 0, 1] },
            ])
            .unwrap();
        let funcs = DefiningFunctions::new(&model);
        let x = [C64::new(0.3, -0.2), C64::new(-0.1, 0.4), C64::new(0.2, 0.5), C64::new(-0.3, 0.1), C64::new(0.1, -0.6)];
        let g = funcs.gradient(&x);
        for j in 0..3 {
            let fd = fd_gradient(&funcs, &x, j, 1e-5);
            for k in 0..5 {
                assert!((g[(j, k)] - fd[k]).norm() < 1e-9, "row {j} var {k}");
            }
        }
        // Hessian-vector product against differenced gradients.
        let dx = [C64::new(0.1, 0.2), C64::new(-0.3, 0.1), C64::new(0.05, 0.0), C64::new(0.2, -0.1), C64::new(0.0, 0.3)];
        let hs = funcs.hessians(&x);
        let h = 1e-6;
        let xp: Vec<C64> = x.iter().zip(&dx).map(|(a, b)| a + b * h).collect();
        let xm: Vec<C64> = x.iter().zip(&dx).map(|(a, b)| a - b * h).collect();
        let (gp, gm) = (funcs.gradient(&xp), funcs.gradient(&xm));
        for j in 0..3 {
            let analytic = DefiningFunctions::gradient_derivative(&hs[j], &dx);
            for k in 0..5 {
                let fd = (gp[(j, k)] - gm[(j, k)]) / (2.0 * h);
                assert!((analytic[k] - fd).norm() < 1e-8, "row {j} var {k}");
            }
        }
        // The perturbed functions stay real-valued: P and its conjugate agree in real part.
        assert!(funcs.values(&x).iter().all(|v| v.is_finite()));
    }
}
