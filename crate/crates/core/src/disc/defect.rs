use super::{attachment_residual, DiscConfig, DiscError, PolyDisc};
use crate::linalg::{numerical_rank, real_kernel, realified_columns, RMat, Tolerance, C64};
use crate::model::HermitianModel;

#[derive(Debug, Clone, PartialEq)]
pub struct DefectResult {
    pub defect: usize,
    /// Orthonormal real `d`-vectors `c` spanning the defective directions.
    pub kernel_basis: Vec<Vec<f64>>,
    /// Singular values of the negative-frequency map, largest first.
    pub residual_singular_values: Vec<f64>,
    pub threshold: f64,
}

/// Dimension of the space of `c ∈ R^d` for which `c·∂_zρ(f)` extends
/// holomorphically to the disc.
///
/// On the circle `h̄(ζ) = Σ_k h̄_k ζ^{-k}`, so the `ζ^{-k}` coefficient of
/// `c·∂_zρ(f) = -Σ_j c_j ᵗh̄ A_j` is `-Σ_j c_j ᵗh̄_k A_j`, which is linear in
/// `c`.
pub fn compute_defect(model: &HermitianModel, disc: &PolyDisc, cfg: &DiscConfig) -> Result<DefectResult, DiscError> {
    if !model.is_quadric() {
        return Err(DiscError::PerturbedModel);
    }
    if disc.dim() != model.big_n() {
        return Err(DiscError::WrongDimension { expected: model.big_n(), got: disc.dim() });
    }
    let residual = attachment_residual(model, disc, cfg.sample_count());
    if residual > cfg.attachment_tol {
        return Err(DiscError::NotAttached { residual });
    }
    let n = model.n();
    let degree = disc.degree();
    let columns: Vec<Vec<C64>> = model
        .levi_matrices()
        .iter()
        .map(|aj| {
            let mut col = Vec::with_capacity(n * degree);
            for k in 1..=degree {
                for l in 0..n {
                    col.push(-(0..n).map(|a| disc.coeff(a, k).conj() * aj[(a, l)]).sum::<C64>());
                }
            }
            col
        })
        .collect();
    let m = if degree == 0 { RMat::zeros(1, model.d()) } else { realified_columns(&columns) };
    let (basis, sv) = real_kernel(&m, cfg.tol);
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    Ok(DefectResult {
        defect: basis.ncols(),
        kernel_basis: (0..basis.ncols()).map(|j| basis.column(j).iter().copied().collect()).collect(),
        residual_singular_values: sv,
        threshold: cfg.tol.threshold(sigma_max),
    })
}

/// Real rank of the `2n x d` matrix `[A_1V … A_dV]`.
pub fn combination_real_rank(model: &HermitianModel, v: &[C64], tol: Tolerance) -> usize {
    let dm = model.d_matrix(v);
    let cols: Vec<Vec<C64>> = (0..model.d()).map(|j| dm.column(j).iter().copied().collect()).collect();
    numerical_rank(&realified_columns(&cols), tol).rank
}

/// `true` iff the defect is zero. For discs of the form `(1-ζ)·const` the
/// Fourier verdict is cross-checked against the rank of `[A_jV]`.
pub fn is_nondefective(model: &HermitianModel, disc: &PolyDisc, cfg: &DiscConfig) -> Result<bool, DiscError> {
    let result = compute_defect(model, disc, cfg)?;
    if let Some(v) = canonical_direction(model, disc) {
        let expected = model.d() - combination_real_rank(model, &v, cfg.tol);
        if expected != result.defect {
            return Err(DiscError::InconsistentDefect { fourier: result.defect, rank_criterion: expected });
        }
    }
    Ok(result.defect == 0)
}

/// `V` when `h = (1-ζ)V` exactly.
fn canonical_direction(model: &HermitianModel, disc: &PolyDisc) -> Option<Vec<C64>> {
    let n = model.n();
    let linear = (0..disc.dim()).all(|m| (2..=disc.degree()).all(|k| disc.coeff(m, k).norm() == 0.0));
    let pinned = (0..disc.dim()).all(|m| (disc.coeff(m, 0) + disc.coeff(m, 1)).norm() <= 1e-12);
    (linear && pinned).then(|| (0..n).map(|a| disc.coeff(a, 0)).collect())
}
