use super::{tangent_kernel, GAssembly, KernelConfig, KernelMethod, RhError};
use crate::disc::PolyDisc;
use crate::linalg::{numerical_rank, realify_vec, RMat, Tolerance, C64};
use nalgebra::DVector;

/// `(f(1), f'(1))` for order 1, followed by `f''(1)` for order 2.
pub fn jet_map(f: &PolyDisc, order: usize) -> Result<Vec<C64>, RhError> {
    if !(1..=2).contains(&order) {
        return Err(RhError::BadOrder(order));
    }
    let one = C64::new(1.0, 0.0);
    let mut out = f.eval(one);
    let mut current = f.clone();
    for _ in 0..order {
        current = current.derivative();
        out.extend(current.eval(one));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JetCertificate {
    pub order: usize,
    pub kernel_dim: usize,
    /// Realified jets of the kernel basis, one column per element.
    pub jet_matrix: RMat,
    pub rank: usize,
    pub injective: bool,
    pub sigma_min: f64,
    pub threshold: f64,
    /// `kernel_dim - rank`.
    pub jet_kernel_dim: usize,
    /// For order 1, `dim ker Re(D^* A^{-1} D)`.
    pub expected_jet_kernel_dim: Option<usize>,
}

/// `dim ker Re(ᵗD̄ A^{-1} D)`.
pub fn jet_kernel_expected(g: &GAssembly, tol: Tolerance) -> usize {
    let b = g.d_matrix().adjoint() * g.levi_inverse() * g.d_matrix();
    let re_b = b.map(|z| z.re);
    g.d() - numerical_rank(&re_b, tol).rank
}

/// Rank of the jet map of the given order restricted to the tangent kernel
/// on `(1-ζ) p`, `deg p = max(cfg.degree, order)`.
pub fn certify_jet_injectivity(g: &GAssembly, order: usize, cfg: &KernelConfig) -> Result<JetCertificate, RhError> {
    if !(1..=2).contains(&order) {
        return Err(RhError::BadOrder(order));
    }
    let kcfg = KernelConfig { degree: cfg.degree.max(order), ..*cfg };
    let kernel = tangent_kernel(g, KernelMethod::Numeric, &kcfg)?;
    let cols: Vec<DVector<f64>> = kernel
        .elements
        .iter()
        .map(|f| jet_map(f, order).map(|j| DVector::from_vec(realify_vec(&j))))
        .collect::<Result<_, _>>()?;
    let jet_matrix = RMat::from_columns(&cols);
    let info = numerical_rank(&jet_matrix, cfg.tol);
    Ok(JetCertificate {
        order,
        kernel_dim: kernel.dim(),
        rank: info.rank,
        injective: info.rank == kernel.dim(),
        sigma_min: info.sigma_min,
        threshold: info.threshold,
        jet_kernel_dim: kernel.dim() - info.rank,
        expected_jet_kernel_dim: (order == 1).then(|| jet_kernel_expected(g, cfg.tol)),
        jet_matrix,
    })
}
