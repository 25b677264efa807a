//! The boundary matrix `G(ζ)` of the linearized Riemann–Hilbert problem at a
//! canonical lift, its kernel on `(1-ζ)`-divisible polynomial discs, jet
//! maps at `ζ = 1`, and the explicit Birkhoff factorization check.
//!
//! Unknowns are ordered `(g, h, h̃, g̃)` with `g, g̃ ∈ C^d` and
//! `h, h̃ ∈ C^n`; [`to_lift`] and [`from_lift`] convert to the
//! `(h, g, h̃, g̃)` layout of [`LiftedDisc`].

mod birkhoff;
mod jets;
mod kernel;

pub use birkhoff::{birkhoff_check, theta_identity_error, BirkhoffReport};
pub use jets::{certify_jet_injectivity, jet_kernel_expected, jet_map, JetCertificate};
pub use kernel::{closed_form_element, operator_residual, tangent_kernel, KernelBasis, KernelConfig, KernelMethod, LadderStep};

use crate::disc::{LiftedDisc, PolyDisc};
use crate::linalg::{complex_rank, CMat, Tolerance, C64, I};
use crate::model::HermitianModel;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RhError {
    #[error("Σ c_j A_j is singular (sigma_min = {sigma_min:e})")]
    SingularCombination { sigma_min: f64 },
    #[error("expected a vector of length {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("the linearized operator is only assembled for unperturbed quadrics")]
    PerturbedModel,
    #[error("tangent kernel has dimension {found}, expected {expected}; ladder {ladder:?}")]
    KernelDimension { expected: usize, found: usize, ladder: Vec<LadderStep> },
    #[error("jet order must be 1 or 2, got {0}")]
    BadOrder(usize),
}

/// `G(ζ)` at the canonical lift with direction `V` and covector `c`.
#[derive(Debug, Clone)]
pub struct GAssembly {
    n: usize,
    d: usize,
    v: Vec<C64>,
    c: Vec<f64>,
    a: CMat,
    a_inv: CMat,
    /// `D[(l, j)] = (A_j V)_l`.
    d_matrix: CMat,
    /// `B(ζ) = (1-ζ) B_1`, `d x 2n`.
    b1: CMat,
    /// Columns `(A_j V)`, used to build `C(ζ) = (1-ζ) C_1`.
    c1: CMat,
}

impl GAssembly {
    pub fn new(model: &HermitianModel, v: &[C64], c: &[f64], tol: Tolerance) -> Result<Self, RhError> {
        if !model.is_quadric() {
            return Err(RhError::PerturbedModel);
        }
        let (n, d) = (model.n(), model.d());
        if v.len() != n {
            return Err(RhError::WrongDimension { expected: n, got: v.len() });
        }
        if c.len() != d {
            return Err(RhError::WrongDimension { expected: d, got: c.len() });
        }
        let a = model.levi_combination(c);
        let info = complex_rank(&a, tol);
        if info.rank < n {
            return Err(RhError::SingularCombination { sigma_min: info.sigma_min });
        }
        let a_inv = a.clone().try_inverse().ok_or(RhError::SingularCombination { sigma_min: info.sigma_min })?;
        let d_matrix = model.d_matrix(v);
        let mut b1 = CMat::zeros(d, 2 * n);
        let mut c1 = CMat::zeros(2 * n, d);
        for j in 0..d {
            for l in 0..n {
                b1[(j, l)] = -d_matrix[(l, j)];
                c1[(l, j)] = 2.0 * d_matrix[(l, j)];
                c1[(n + l, j)] = -2.0 * I * d_matrix[(l, j)];
            }
        }
        Ok(GAssembly { n, d, v: v.to_vec(), c: c.to_vec(), a, a_inv, d_matrix, b1, c1 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn big_n(&self) -> usize {
        self.n + self.d
    }

    pub fn v(&self) -> &[C64] {
        &self.v
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn levi_combination(&self) -> &CMat {
        &self.a
    }

    pub fn levi_inverse(&self) -> &CMat {
        &self.a_inv
    }

    pub fn d_matrix(&self) -> &CMat {
        &self.d_matrix
    }

    pub fn b1(&self) -> &CMat {
        &self.b1
    }

    /// `G_2(ζ) = [[ζ ᵗA, I], [iζ ᵗA, -iI]]`.
    pub fn g2(&self, zeta: C64) -> CMat {
        let n = self.n;
        let at = self.a.transpose();
        let mut g = CMat::zeros(2 * n, 2 * n);
        for r in 0..n {
            for s in 0..n {
                g[(r, s)] = zeta * at[(r, s)];
                g[(n + r, s)] = I * zeta * at[(r, s)];
            }
            g[(r, n + r)] = C64::new(1.0, 0.0);
            g[(n + r, n + r)] = -I;
        }
        g
    }

    pub fn b(&self, zeta: C64) -> CMat {
        &self.b1 * (C64::new(1.0, 0.0) - zeta)
    }

    pub fn c_block(&self, zeta: C64) -> CMat {
        &self.c1 * (C64::new(1.0, 0.0) - zeta)
    }

    /// The full `2N x 2N` matrix `G(ζ)`.
    pub fn eval(&self, zeta: C64) -> CMat {
        let (n, d) = (self.n, self.d);
        let size = 2 * (n + d);
        let mut g = CMat::zeros(size, size);
        for j in 0..d {
            g[(j, j)] = C64::new(0.5, 0.0);
            g[(d + 2 * n + j, d + 2 * n + j)] = -I * zeta;
        }
        g.view_mut((0, d), (d, 2 * n)).copy_from(&self.b(zeta));
        g.view_mut((d, d), (2 * n, 2 * n)).copy_from(&self.g2(zeta));
        g.view_mut((d, d + 2 * n), (2 * n, d)).copy_from(&self.c_block(zeta));
        g
    }
}

/// Reorders `(g, h, h̃, g̃)` into a lift `(h, g | h̃, g̃)`.
pub fn to_lift(disc: &PolyDisc, n: usize, d: usize) -> LiftedDisc {
    let comps = disc.components();
    let base = comps[d..d + n].iter().chain(comps[..d].iter()).cloned().collect();
    let cot = comps[d + n..].to_vec();
    LiftedDisc::new(PolyDisc::new(base), PolyDisc::new(cot))
}

/// Inverse of [`to_lift`].
pub fn from_lift(lift: &LiftedDisc, n: usize) -> PolyDisc {
    let base = lift.base.components();
    let comps = base[n..].iter().chain(base[..n].iter()).chain(lift.cotangent.components().iter()).cloned().collect();
    PolyDisc::new(comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::canonical_lift;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn sphere_g_at_one() {
        let g = GAssembly::new(&HermitianModel::sphere(), &[re(1.0)], &[1.0], Tolerance::default()).unwrap();
        let z = re(0.0);
        let want = CMat::from_row_slice(
            4,
            4,
            &[re(0.5), z, z, z, z, re(1.0), re(1.0), z, z, I, -I, z, z, z, z, -I],
        );
        assert_eq!(g.eval(re(1.0)), want);
    }

    #[test]
    fn q1_b1_row() {
        let g = GAssembly::new(&HermitianModel::q1(), &[re(1.0), I], &[1.0, 1.0, 0.0], Tolerance::default()).unwrap();
        let row: Vec<C64> = g.b1().row(0).iter().copied().collect();
        assert_eq!(row, vec![re(-1.0), re(0.0), re(0.0), re(0.0)]);
        assert!(g.b(re(1.0)).iter().all(|z| *z == re(0.0)));
        assert!(g.c_block(re(1.0)).iter().all(|z| *z == re(0.0)));
    }

    #[test]
    fn g2_invertible_on_circle() {
        let g = GAssembly::new(&HermitianModel::q2(), &[re(1.0), re(1.0), re(1.0)], &[1.0, 1.0], Tolerance::default()).unwrap();
        for k in 0..16 {
            let z = crate::linalg::root_of_unity(k, 16);
            assert_eq!(complex_rank(&g.g2(z), Tolerance::default()).rank, 6);
        }
    }

    #[test]
    fn ordering_round_trip() {
        let model = HermitianModel::q1();
        let lift = canonical_lift(&model, &[re(1.0), I], &[1.0, 1.0, 0.0], Tolerance::default()).unwrap();
        let rh = from_lift(&lift, 2);
        assert_eq!(rh.coeff(0, 0), re(2.0));
        assert_eq!(to_lift(&rh, 2, 3), lift);
    }
}
