#![allow(dead_code)]

//! Random models and oracles shared by the integration tests. The oracles
//! work from the model definition and raw coefficients only.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stadisc::disc::{LiftedDisc, PolyDisc};
use stadisc::{HermitianModel, C64};

pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_c(rng: &mut ChaCha8Rng) -> C64 {
    // Box-Muller keeps the oracle free of the library's distributions
    let u: f64 = rng.random::<f64>().max(1e-300);
    let t: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    C64::from_polar((-2.0 * u.ln()).sqrt() / std::f64::consts::SQRT_2, t)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let m = CMat::from_fn(n, n, |_, _| gaussian_c(rng));
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| gaussian_c(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// A quadric with `1 <= n, d <= 3`.
pub fn random_model(rng: &mut ChaCha8Rng) -> HermitianModel {
    let n = rng.random_range(1..=3);
    let d = rng.random_range(1..=3);
    HermitianModel::new((0..d).map(|_| random_hermitian(rng, n)).collect(), vec![]).expect("Hermitian matrices")
}

/// A quadric and `V` with `A_d V` a real combination of the other
/// `A_j V`, so the defect is at least one.
pub fn defective_pair(rng: &mut ChaCha8Rng) -> (HermitianModel, Vec<C64>) {
    let n = rng.random_range(2..=3);
    let d = rng.random_range(2..=3);
    let v = random_vector(rng, n);
    let mut mats: Vec<CMat> = (0..d - 1).map(|_| random_hermitian(rng, n)).collect();
    let vv = CMat::from_column_slice(n, 1, &v);
    let proj = CMat::identity(n, n) - &vv * vv.adjoint();
    let k = random_hermitian(rng, n);
    let mut last = &proj * k * &proj;
    for m in &mats {
        last += m * C64::new(rng.random_range(-1.0..1.0), 0.0);
    }
    mats.push((&last + last.adjoint()) * C64::new(0.5, 0.0));
    (HermitianModel::new(mats, vec![]).expect("Hermitian matrices"), v)
}

pub fn unit_circle(k: usize, count: usize) -> C64 {
    C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / count as f64)
}

pub fn horner(coeffs: &[C64], zeta: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * zeta + a)
}

pub fn eval_disc(disc: &PolyDisc, zeta: C64) -> Vec<C64> {
    disc.components().iter().map(|c| horner(c, zeta)).collect()
}

/// `f'(1)` from the coefficients.
pub fn derivative_at_one(disc: &PolyDisc) -> Vec<C64> {
    disc.components().iter().map(|c| c.iter().enumerate().map(|(k, &a)| a * k as f64).sum()).collect()
}

/// `max |Re w_j - z^* A_j z|` on the boundary of a quadric.
pub fn quadric_attachment(model: &HermitianModel, disc: &PolyDisc, samples: usize) -> f64 {
    let n = model.n();
    (0..samples)
        .map(|k| {
            let x = eval_disc(disc, unit_circle(k, samples));
            let z = CMat::from_column_slice(n, 1, &x[..n]);
            model
                .levi_matrices()
                .iter()
                .enumerate()
                .map(|(j, a)| (x[n + j].re - (z.adjoint() * a * &z)[(0, 0)].re).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Distance of `conj(ζ) ξ(ζ)` from the real span of `∂ρ_j(f(ζ))`, with
/// `∂ρ_j = (-conj(A_j z), e_j / 2)`, at the given boundary points. `None`
/// when `ξ` vanishes somewhere.
pub fn quadric_stationarity_at(model: &HermitianModel, lift: &LiftedDisc, points: &[C64]) -> Option<f64> {
    let (n, d) = (model.n(), model.d());
    let big_n = n + d;
    let mut worst = 0.0f64;
    for &zeta in points {
        let x = eval_disc(&lift.base, zeta);
        let xi: Vec<C64> = eval_disc(&lift.cotangent, zeta).into_iter().map(|c| c * zeta.conj()).collect();
        let scale = xi.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale < 1e-8 {
            return None;
        }
        let z = CMat::from_column_slice(n, 1, &x[..n]);
        let grads = RMat::from_fn(2 * big_n, d, |r, j| {
            let (m, im) = (r % big_n, r >= big_n);
            let g = if m < n { -(model.levi_matrices()[j].clone() * &z)[(m, 0)].conj() } else if m - n == j { C64::new(0.5, 0.0) } else { C64::new(0.0, 0.0) };
            if im { g.im } else { g.re }
        });
        let rhs = RMat::from_fn(2 * big_n, 1, |r, _| if r >= big_n { xi[r - big_n].im } else { xi[r].re });
        let svd = grads.clone().svd(true, true);
        let lambda = svd.solve(&rhs, 1e-13).expect("SVD solve");
        worst = worst.max((grads * lambda - rhs).norm() / scale);
    }
    Some(worst)
}

pub fn quadric_stationarity(model: &HermitianModel, lift: &LiftedDisc, samples: usize) -> Option<f64> {
    let points: Vec<C64> = (0..samples).map(|k| unit_circle(k, samples)).collect();
    quadric_stationarity_at(model, lift, &points)
}

/// Orthonormal basis of the real kernel of `c -> Σ c_j A_j V`.
pub fn combination_kernel(model: &HermitianModel, v: &[C64]) -> RMat {
    let n = model.n();
    let vv = CMat::from_column_slice(n, 1, v);
    let cols: Vec<CMat> = model.levi_matrices().iter().map(|a| a * &vv).collect();
    let m = RMat::from_fn(2 * n, model.d(), |r, j| if r < n { cols[j][(r, 0)].re } else { cols[j][(r - n, 0)].im });
    null_space(&m, 1e-9)
}

/// Orthonormal null space of `m`, padding with zero rows so the thin SVD
/// returns a full right basis.
pub fn null_space(m: &RMat, rel: f64) -> RMat {
    let cols = m.ncols();
    let padded = RMat::from_fn(m.nrows().max(cols), cols, |r, c| if r < m.nrows() { m[(r, c)] } else { 0.0 });
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let top = svd.singular_values.max().max(1.0);
    let kept: Vec<_> = (0..cols).filter(|&i| svd.singular_values[i] <= rel * top).map(|i| vt.row(i).transpose()).collect();
    if kept.is_empty() {
        RMat::zeros(cols, 0)
    } else {
        RMat::from_columns(&kept)
    }
}

/// `||P_a - P_b||_2` for orthonormal bases of equal dimension, which is
/// the sine of the largest principal angle.
pub fn subspace_gap(a: &RMat, b: &RMat) -> f64 {
    assert_eq!(a.ncols(), b.ncols());
    if a.ncols() == 0 {
        return 0.0;
    }
    let pa = a * a.transpose();
    let pb = b * b.transpose();
    (pa - pb).svd(false, false).singular_values.max()
}

/// Orthonormalizes columns by QR, assuming full column rank.
pub fn orthonormalize(m: &RMat) -> RMat {
    m.clone().qr().q()
}

/// Realified coefficient vector of a disc padded to `degree`.
pub fn flat_coefficients(disc: &PolyDisc, degree: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for c in disc.components() {
        for k in 0..=degree {
            let a = c.get(k).copied().unwrap_or_default();
            out.push(a.re);
            out.push(a.im);
        }
    }
    out
}

/// `Re(D^* A^{-1} D)` with `D = [A_1 V | ... | A_d V]` and `A = Σ c_j A_j`.
pub fn jet_gram(model: &HermitianModel, v: &[C64], c: &[f64]) -> RMat {
    let n = model.n();
    let vv = CMat::from_column_slice(n, 1, v);
    let mut a = CMat::zeros(n, n);
    for (m, &cj) in model.levi_matrices().iter().zip(c) {
        a += m * C64::new(cj, 0.0);
    }
    let cols: Vec<CMat> = model.levi_matrices().iter().map(|m| m * &vv).collect();
    let dm = CMat::from_fn(n, model.d(), |r, j| cols[j][(r, 0)]);
    let inv = a.try_inverse().expect("A invertible");
    (dm.adjoint() * inv * dm).map(|z| z.re)
}
