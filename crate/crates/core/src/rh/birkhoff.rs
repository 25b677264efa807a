use crate::disc::PolyDisc;
use crate::linalg::{real_kernel, root_of_unity, CMat, RMat, Tolerance, C64, I};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BirkhoffReport {
    /// Coefficientwise error of `Θ^{-1} diag(ζ, ζ) Θ̄ = -[[0, ζ], [ζ, 0]]`.
    pub theta_error: f64,
    pub deg_max: usize,
    /// Real dimension of the solutions of `u = -R̄^{-1} R ū` of degree
    /// `<= deg_max`.
    pub kernel_dim: usize,
    /// Largest degree carrying a coefficient above `1e-10` in the basis.
    pub max_degree: usize,
    /// Largest coefficient of degree `>= 2` in the basis.
    pub high_coefficient: f64,
    pub pass: bool,
}

/// Error of the identity `Θ^{-1} diag(ζ, ζ) Θ̄ = -[[0, ζ], [ζ, 0]]` with
/// `Θ = [[1, -1], [i, i]]`, compared as polynomials in `ζ`.
pub fn theta_identity_error() -> f64 {
    let one = C64::new(1.0, 0.0);
    let theta = CMat::from_row_slice(2, 2, &[one, -one, I, I]);
    let theta_inv = theta.clone().try_inverse().expect("Θ is invertible");
    let theta_bar = theta.map(|z| z.conj());
    // Both sides are linear in ζ with no constant term; compare the ζ^1
    // coefficients and the (vanishing) constant terms.
    let lhs_linear = &theta_inv * &theta_bar;
    let rhs_linear = CMat::from_row_slice(2, 2, &[C64::new(0.0, 0.0), -one, -one, C64::new(0.0, 0.0)]);
    (lhs_linear - rhs_linear).iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

/// `R(ζ) = [[ζ, 1], [iζ, -i]]`.
fn r_matrix(zeta: C64) -> CMat {
    CMat::from_row_slice(2, 2, &[zeta, C64::new(1.0, 0.0), I * zeta, -I])
}

/// Verifies the `Θ` factorization and that the polynomial solutions of
/// `R̄u + Rū = 0` form a 4-dimensional real space of degree at most one.
pub fn birkhoff_check(deg_max: usize, tol: Tolerance) -> BirkhoffReport {
    let theta_error = theta_identity_error();
    let samples = 8 * (deg_max + 1);
    let mut columns = Vec::new();
    for unit in [C64::new(1.0, 0.0), I] {
        for m in 0..2 {
            for k in 0..=deg_max {
                let mut p = PolyDisc::zeros(2, deg_max);
                p.set_coeff(m, k, unit);
                columns.push(p);
            }
        }
    }
    let mut mat = RMat::zeros(2 * samples, columns.len());
    for s in 0..samples {
        let zeta = root_of_unity(s, samples);
        let rbar = r_matrix(zeta).map(|z| z.conj());
        for (col, p) in columns.iter().enumerate() {
            let u = nalgebra::DVector::from_vec(p.eval(zeta));
            let v = &rbar * u;
            for r in 0..2 {
                mat[(2 * s + r, col)] = 2.0 * v[r].re;
            }
        }
    }
    let (basis, _) = real_kernel(&mat, tol);
    let mut high = 0.0f64;
    let mut max_degree = 0;
    for b in 0..basis.ncols() {
        let mut f = PolyDisc::zeros(2, deg_max);
        for (p, w) in columns.iter().zip(basis.column(b).iter()) {
            f = f.combine(1.0, p, *w);
        }
        for m in 0..2 {
            for k in 0..=deg_max {
                let c = f.coeff(m, k).norm();
                if k >= 2 {
                    high = high.max(c);
                }
                if c > 1e-10 {
                    max_degree = max_degree.max(k);
                }
            }
        }
    }
    let kernel_dim = basis.ncols();
    BirkhoffReport {
        theta_error,
        deg_max,
        kernel_dim,
        max_degree,
        high_coefficient: high,
        pass: theta_error <= 1e-14 && kernel_dim == 4 && max_degree <= 1 && high < 1e-10,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_identity_is_exact() {
        assert_eq!(theta_identity_error(), 0.0);
    }

    #[test]
    fn reflection_solutions_are_linear() {
        let report = birkhoff_check(8, Tolerance::default());
        assert_eq!(report.kernel_dim, 4);
        assert_eq!(report.max_degree, 1);
        assert!(report.pass, "{report:?}");
    }
}
