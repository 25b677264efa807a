use crate::disc::LiftedDisc;
use crate::linalg::{numerical_rank, realify_vec, RMat, Tolerance, C64};
use crate::model::HermitianModel;
use crate::rh::{tangent_kernel, to_lift, GAssembly, KernelConfig, KernelMethod, RhError};
use nalgebra::DVector;

/// `(Re f'(1), Im f'(1))` with `f' = (h', g', h̃', g̃')`.
pub fn jet_coordinates(lift: &LiftedDisc) -> Vec<f64> {
    let one = C64::new(1.0, 0.0);
    realify_vec(&lift.as_disc().derivative().eval(one))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PinSelection {
    pub indices: Vec<usize>,
    /// Residual norms at each pivot step, non-increasing in exact
    /// arithmetic.
    pub pivots: Vec<f64>,
    /// Rank of the `4N x 2N` jet matrix of the tangent kernel.
    pub rank: usize,
    pub sigma_min: f64,
    /// Jet matrix, one column per tangent kernel element.
    pub jet_matrix: RMat,
}

impl PinSelection {
    pub fn valid(&self) -> bool {
        self.rank == self.indices.len()
    }
}

/// Picks `2N` jet coordinates by greedy pivoted QR on the rows of the jet
/// matrix of the tangent kernel at the canonical lift `(V, c)`.
pub fn select_pins(quadric: &HermitianModel, v: &[C64], c: &[f64], tol: Tolerance) -> Result<PinSelection, RhError> {
    let g = GAssembly::new(quadric, v, c, tol)?;
    let kernel = tangent_kernel(&g, KernelMethod::Numeric, &KernelConfig { degree: 1, tol })?;
    let cols: Vec<DVector<f64>> = kernel
        .elements
        .iter()
        .map(|e| DVector::from_vec(jet_coordinates(&to_lift(e, quadric.n(), quadric.d()))))
        .collect();
    let jet_matrix = RMat::from_columns(&cols);
    let info = numerical_rank(&jet_matrix, tol);
    let count = jet_matrix.ncols();
    let mut work = jet_matrix.clone();
    let mut chosen = Vec::with_capacity(count);
    let mut pivots = Vec::with_capacity(count);
    for _ in 0..count {
        let (best, norm) = (0..work.nrows())
            .filter(|r| !chosen.contains(r))
            .map(|r| (r, work.row(r).norm()))
            .fold((usize::MAX, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        chosen.push(best);
        pivots.push(norm);
        if norm == 0.0 {
            continue;
        }
        let q = work.row(best).transpose() / norm;
        for r in 0..work.nrows() {
            let proj = work.row(r).dot(&q.transpose());
            let updated = work.row(r) - q.transpose() * proj;
            work.set_row(r, &updated);
        }
    }
    Ok(PinSelection { indices: chosen, pivots, rank: info.rank, sigma_min: info.sigma_min, jet_matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    #[test]
    fn q1_pins_are_valid_and_q2_bad_direction_is_not() {
        let tol = Tolerance::default();
        let q1 = select_pins(&HermitianModel::q1(), &[C64::new(1.0, 0.0), I], &[1.0, 1.0, 0.0], tol).unwrap();
        assert_eq!(q1.indices.len(), 10);
        assert!(q1.valid());
        let one = C64::new(1.0, 0.0);
        let q2 = select_pins(&HermitianModel::q2(), &[one, one, one], &[1.0, 1.0], tol).unwrap();
        assert_eq!(q2.rank, 9);
        assert!(!q2.valid());
    }
}
