use super::{project_samples, DiscError, LiftedDisc};
use crate::linalg::{complex_rank, root_of_unity, CMat, Tolerance, C64};
use nalgebra::DVector;
use std::collections::BTreeMap;

/// A holomorphic polynomial map `C^N → C^N`, each component a list of
/// `(coefficient, exponent)` monomials.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMap {
    dim: usize,
    components: Vec<Vec<(C64, Vec<u32>)>>,
}

impl PolyMap {
    pub fn identity(dim: usize) -> Self {
        let components = (0..dim).map(|k| vec![(C64::new(1.0, 0.0), unit(dim, k))]).collect();
        PolyMap { dim, components }
    }

    /// `x ↦ diag(scales) x`.
    pub fn diagonal(scales: &[C64]) -> Self {
        let dim = scales.len();
        let components = scales.iter().enumerate().map(|(k, &s)| vec![(s, unit(dim, k))]).collect();
        PolyMap { dim, components }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `coeff · x^exp` to component `m`.
    pub fn add_term(mut self, m: usize, coeff: C64, exp: Vec<u32>) -> Self {
        assert_eq!(exp.len(), self.dim, "exponent length must match the dimension");
        self.components[m].push((coeff, exp));
        self
    }

    pub fn is_identity(&self) -> bool {
        self.components.iter().enumerate().all(|(m, terms)| {
            let mut merged: BTreeMap<&[u32], C64> = BTreeMap::new();
            for (c, e) in terms {
                *merged.entry(e.as_slice()).or_insert(C64::new(0.0, 0.0)) += c;
            }
            let id = unit(self.dim, m);
            merged.get(id.as_slice()) == Some(&C64::new(1.0, 0.0))
                && merged.iter().all(|(e, c)| *e == id.as_slice() || *c == C64::new(0.0, 0.0))
        })
    }

    pub fn eval(&self, x: &[C64]) -> Vec<C64> {
        self.components.iter().map(|terms| terms.iter().map(|(c, e)| c * monomial(x, e)).sum()).collect()
    }

    /// `J[(m, k)] = ∂F_m/∂x_k`.
    pub fn jacobian(&self, x: &[C64]) -> CMat {
        let mut j = CMat::zeros(self.dim, self.dim);
        for (m, terms) in self.components.iter().enumerate() {
            for (c, e) in terms {
                for k in 0..self.dim {
                    if e[k] == 0 {
                        continue;
                    }
                    let mut lowered = e.clone();
                    lowered[k] -= 1;
                    j[(m, k)] += c * e[k] as f64 * monomial(x, &lowered);
                }
            }
        }
        j
    }
}

fn unit(dim: usize, k: usize) -> Vec<u32> {
    let mut e = vec![0; dim];
    e[k] = 1;
    e
}

fn monomial(x: &[C64], e: &[u32]) -> C64 {
    x.iter().zip(e).fold(C64::new(1.0, 0.0), |acc, (z, &p)| acc * z.powu(p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pushforward {
    pub lift: LiftedDisc,
    /// Norm of every Fourier coefficient dropped by the truncation.
    pub tail_norm: f64,
}

/// `F_*(f, f̃) = (F∘f, f̃ (dF)^{-1})` sampled at four times the output
/// degree and projected back to polynomials of degree `degree`.
pub fn pushforward_lift(map: &PolyMap, lift: &LiftedDisc, degree: usize, tol: Tolerance) -> Result<Pushforward, DiscError> {
    if map.dim() != lift.dim() {
        return Err(DiscError::WrongDimension { expected: map.dim(), got: lift.dim() });
    }
    if map.is_identity() {
        return Ok(Pushforward { lift: lift.clone(), tail_norm: 0.0 });
    }
    let count = (4 * (degree.max(lift.degree()) + 1)).next_power_of_two().max(64);
    let mut base = Vec::with_capacity(count);
    let mut cot = Vec::with_capacity(count);
    for s in 0..count {
        let (x, xi) = lift.eval(root_of_unity(s, count));
        let jac = map.jacobian(&x);
        if complex_rank(&jac, tol).rank < map.dim() {
            return Err(DiscError::SingularJacobian { sample: s });
        }
        // Row vector ξ J^{-1}, i.e. the solution of ᵗJ η = ξ.
        let eta = jac
            .transpose()
            .lu()
            .solve(&DVector::from_column_slice(&xi))
            .ok_or(DiscError::SingularJacobian { sample: s })?;
        base.push(map.eval(&x));
        cot.push(eta.iter().copied().collect::<Vec<_>>());
    }
    let (b, tb) = project_samples(&base, degree);
    let (c, tc) = project_samples(&cot, degree);
    Ok(Pushforward { lift: LiftedDisc::new(b, c), tail_norm: tb.hypot(tc) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::{canonical_lift, stationarity_residual, DiscConfig};
    use crate::model::HermitianModel;

    #[test]
    fn jacobian_matches_difference_quotient() {
        let x = [C64::new(0.3, -0.2), C64::new(-0.1, 0.4)];
        let f = PolyMap::identity(2).add_term(0, C64::new(0.5, 0.1), vec![2, 1]).add_term(1, C64::new(0.0, 1.0), vec![0, 3]);
        let j = f.jacobian(&x);
        let h = 1e-7;
        for k in 0..2 {
            let mut xp = x;
            xp[k] += h;
            let fp = f.eval(&xp);
            let f0 = f.eval(&x);
            for m in 0..2 {
                assert!(((fp[m] - f0[m]) / h - j[(m, k)]).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn identity_is_exact_and_rotation_stays_stationary() {
        let model = HermitianModel::sphere();
        let lift = canonical_lift(&model, &[C64::new(1.0, 0.0)], &[1.0], Tolerance::default()).unwrap();
        let same = pushforward_lift(&PolyMap::identity(2), &lift, 4, Tolerance::default()).unwrap();
        assert_eq!(same.lift, lift);

        let rot = PolyMap::diagonal(&[C64::from_polar(1.0, 0.7), C64::new(1.0, 0.0)]);
        let out = pushforward_lift(&rot, &lift, 4, Tolerance::default()).unwrap();
        assert!(out.tail_norm < 1e-12);
        assert!(stationarity_residual(&model, &out.lift, 64, &DiscConfig::default()) < 1e-10);
    }

    #[test]
    fn singular_jacobian_reported() {
        let model = HermitianModel::sphere();
        let lift = canonical_lift(&model, &[C64::new(1.0, 0.0)], &[1.0], Tolerance::default()).unwrap();
        let collapse = PolyMap::diagonal(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(pushforward_lift(&collapse, &lift, 4, Tolerance::default()), Err(DiscError::SingularJacobian { .. })));
    }
}
