//! Dense linear-algebra helpers shared by every module: realification of
//! complex data, SVD-based rank decisions, kernels and principal angles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Relative threshold for rank and invertibility decisions.
///
/// A singular value counts as nonzero iff it exceeds
/// `rel * max(1, sigma_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(rel: f64) -> Self {
        Tolerance { rel }
    }

    pub fn threshold(&self, sigma_max: f64) -> f64 {
        self.rel * sigma_max.max(1.0)
    }
}

/// Outcome of a numerical rank decision, keeping the singular values that
/// drove it so callers can re-decide with another threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct RankInfo {
    pub rank: usize,
    /// Smallest of the `min(rows, cols)` singular values (0 for empty input).
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub threshold: f64,
    pub singular_values: Vec<f64>,
}

impl RankInfo {
    pub fn full_rank(&self, expected: usize) -> bool {
        self.rank == expected
    }
}

/// Singular values in decreasing order.
pub fn singular_values(m: &RMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn numerical_rank(m: &RMat, tol: Tolerance) -> RankInfo {
    let s = singular_values(m);
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let sigma_min = s.last().copied().unwrap_or(0.0);
    let threshold = tol.threshold(sigma_max);
    let rank = s.iter().filter(|&&x| x > threshold).count();
    RankInfo {
        rank,
        sigma_min,
        sigma_max,
        threshold,
        singular_values: s,
    }
}

pub fn complex_rank(m: &CMat, tol: Tolerance) -> RankInfo {
    let s = if m.nrows() == 0 || m.ncols() == 0 {
        Vec::new()
    } else {
        let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    };
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let sigma_min = s.last().copied().unwrap_or(0.0);
    let threshold = tol.threshold(sigma_max);
    RankInfo {
        rank: s.iter().filter(|&&x| x > threshold).count(),
        sigma_min,
        sigma_max,
        threshold,
        singular_values: s,
    }
}

/// Orthonormal basis (as columns) of the kernel of `m`, together with the
/// full list of singular values of `m` (padded with zeros up to `ncols`).
pub fn real_kernel(m: &RMat, tol: Tolerance) -> (RMat, Vec<f64>) {
    let ncols = m.ncols();
    if ncols == 0 {
        return (RMat::zeros(0, 0), Vec::new());
    }
    // Pad to at least `ncols` rows so the SVD exposes the full right factor.
    let work = if m.nrows() < ncols {
        let mut padded = RMat::zeros(ncols, ncols);
        padded.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let sigma_max = sv.iter().cloned().fold(0.0, f64::max);
    let threshold = tol.threshold(sigma_max);
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&k| sv[k]).collect();
    let kernel_rows: Vec<usize> = order.iter().copied().filter(|&k| sv[k] <= threshold).collect();
    let mut basis = RMat::zeros(ncols, kernel_rows.len());
    for (col, &k) in kernel_rows.iter().enumerate() {
        for r in 0..ncols {
            basis[(r, col)] = v_t[(k, r)];
        }
    }
    (basis, sorted)
}

/// Orthonormal basis of the column span of `m`.
pub fn orthonormal_columns(m: &RMat, tol: Tolerance) -> RMat {
    if m.ncols() == 0 || m.nrows() == 0 {
        return RMat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sv = &svd.singular_values;
    let sigma_max = sv.iter().cloned().fold(0.0, f64::max);
    let threshold = tol.threshold(sigma_max);
    let keep: Vec<usize> = (0..sv.len()).filter(|&k| sv[k] > threshold).collect();
    let mut q = RMat::zeros(m.nrows(), keep.len());
    for (c, &k) in keep.iter().enumerate() {
        q.set_column(c, &u.column(k));
    }
    q
}

/// Sines of the principal angles between the column spans of `a` and `b`,
/// in decreasing order. Spans of different dimension yield `None`.
///
/// Sines are computed from the residual of projecting one orthonormal basis
/// onto the other, which keeps full precision for tiny angles.
pub fn principal_angle_sines(a: &RMat, b: &RMat, tol: Tolerance) -> Option<Vec<f64>> {
    let qa = orthonormal_columns(a, tol);
    let qb = orthonormal_columns(b, tol);
    if qa.ncols() != qb.ncols() {
        return None;
    }
    if qa.ncols() == 0 {
        return Some(Vec::new());
    }
    let residual = &qb - &qa * (qa.transpose() * &qb);
    let mut s = singular_values(&residual);
    s.resize(qa.ncols(), 0.0);
    Some(s)
}

/// Largest principal angle (radians) between two spans, `None` on dimension
/// mismatch.
pub fn max_principal_angle(a: &RMat, b: &RMat, tol: Tolerance) -> Option<f64> {
    principal_angle_sines(a, b, tol).map(|s| s.first().copied().unwrap_or(0.0).min(1.0).asin())
}

/// `(Re v, Im v)` stacked.
pub fn realify_vec(v: &[C64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * v.len());
    out.extend(v.iter().map(|z| z.re));
    out.extend(v.iter().map(|z| z.im));
    out
}

pub fn complexify_vec(v: &[f64]) -> Vec<C64> {
    let m = v.len() / 2;
    (0..m).map(|k| C64::new(v[k], v[m + k])).collect()
}

/// Real matrix of the real-linear map `x -> m x` in `(Re, Im)` coordinates.
pub fn realify_matrix(m: &CMat) -> RMat {
    let (r, c) = m.shape();
    let mut out = RMat::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
            out[(i + r, j + c)] = z.re;
        }
    }
    out
}

/// Matrix whose columns are the realified complex vectors.
pub fn realified_columns(vectors: &[Vec<C64>]) -> RMat {
    let rows = vectors.first().map(|v| 2 * v.len()).unwrap_or(0);
    let mut out = RMat::zeros(rows, vectors.len());
    for (c, v) in vectors.iter().enumerate() {
        out.set_column(c, &DVector::from_vec(realify_vec(v)));
    }
    out
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    let n = h.nrows();
    if n == 0 {
        return Vec::new();
    }
    // The realified matrix is real symmetric with each eigenvalue doubled.
    let sym = realify_matrix(h);
    let sym = (&sym + sym.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

pub fn conj_transpose(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn cnorm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rnorm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// The `k`-th of `count` equally spaced points on the unit circle.
pub fn root_of_unity(k: usize, count: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_one_matrix() {
        let m = RMat::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let (k, s) = real_kernel(&m, Tolerance::default());
        assert_eq!(k.ncols(), 2);
        assert_eq!(s.len(), 3);
        for c in 0..2 {
            assert!((m.row(0).transpose().dot(&k.column(c))).abs() < 1e-14);
        }
    }

    #[test]
    fn realify_matrix_matches_complex_product() {
        let m = CMat::from_row_slice(2, 2, &[C64::new(1.0, 2.0), I, C64::new(0.5, 0.0), C64::new(-1.0, 3.0)]);
        let v = vec![C64::new(0.3, -0.7), C64::new(2.0, 1.0)];
        let direct = &m * DVector::from_vec(v.clone());
        let realified = realify_matrix(&m) * DVector::from_vec(realify_vec(&v));
        let back = complexify_vec(realified.as_slice());
        for k in 0..2 {
            assert!((back[k] - direct[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn principal_angle_between_lines() {
        let a = RMat::from_column_slice(2, 1, &[1.0, 0.0]);
        let b = RMat::from_column_slice(2, 1, &[1.0, 1.0]);
        let ang = max_principal_angle(&a, &b, Tolerance::default()).unwrap();
        assert!((ang - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!(max_principal_angle(&a, &a, Tolerance::default()).unwrap() < 1e-15);
    }

    #[test]
    fn hermitian_spectrum() {
        let h = CMat::from_row_slice(2, 2, &[C64::new(2.0, 0.0), I, -I, C64::new(2.0, 0.0)]);
        let ev = hermitian_eigenvalues(&h);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }
}
