//! Quadric models `Re w_j = ᵗz̄ A_j z` (optionally with higher-weight
//! polynomial perturbations) and the nondegeneracy certificates attached to
//! them.

mod defining;
mod io;
mod nondegeneracy;

pub use defining::{defining_map, DefiningFunctions, DefiningMap, Monomial, WirtingerPoly};
pub use io::{load_model, parse_model, save_model, to_json};
pub use nondegeneracy::{
    certify_d_nondegenerate, certify_fully_nondegenerate, check_beloshapka,
    check_strict_pseudoconvexity_witness, classify, conormal_totally_real_check,
    evaluate_v_certificate, find_invertible_combination, BeloshapkaVerdict, NondegeneracyReport,
    SearchConfig, SearchFailure, TCertificate, TotallyRealVerdict, VCertificate,
};

use crate::linalg::{CMat, C64};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dimensions must be positive (n = {n}, d = {d})")]
    EmptyDimension { n: usize, d: usize },
    #[error("matrix A[{index}] is {rows}x{cols}, expected {n}x{n}")]
    BadShape { index: usize, rows: usize, cols: usize, n: usize },
    #[error("matrix A[{index}] is not Hermitian: entry ({row},{col}) = {value} but entry ({col},{row}) = {mirror}")]
    NotHermitian { index: usize, row: usize, col: usize, value: C64, mirror: C64 },
    #[error("non-finite entry in A[{index}] at ({row},{col})")]
    NonFinite { index: usize, row: usize, col: usize },
    #[error("perturbation term {term}: {reason}")]
    BadPerturbation { term: usize, reason: String },
    #[error("could not read model file: {0}")]
    Io(String),
    #[error("model file parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

/// One real polynomial correction `coeff · Re(z^α z̄^β (Im w)^γ)` added to
/// the defining function `r_row` (1-based).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PerturbationTerm {
    pub row: usize,
    pub coeff: f64,
    pub z_exp: Vec<u32>,
    pub zbar_exp: Vec<u32>,
    pub imw_exp: Vec<u32>,
}

impl PerturbationTerm {
    /// Weighted degree with `z` of weight one and `Im w` of weight two.
    pub fn weight(&self) -> u32 {
        self.z_exp.iter().sum::<u32>() + self.zbar_exp.iter().sum::<u32>() + 2 * self.imw_exp.iter().sum::<u32>()
    }

    fn validate(&self, term: usize, n: usize, d: usize) -> Result<(), ModelError> {
        let bad = |reason: String| ModelError::BadPerturbation { term, reason };
        if self.row == 0 || self.row > d {
            return Err(bad(format!("row {} outside 1..={}", self.row, d)));
        }
        if self.z_exp.len() != n || self.zbar_exp.len() != n {
            return Err(bad(format!("z exponents must have length {n}")));
        }
        if self.imw_exp.len() != d {
            return Err(bad(format!("Im w exponents must have length {d}")));
        }
        if !self.coeff.is_finite() {
            return Err(bad("non-finite coefficient".into()));
        }
        if self.weight() < 3 {
            return Err(bad(format!("weight {} < 3", self.weight())));
        }
        Ok(())
    }
}

/// A generic quadric (or perturbed quadric) in `C^n_z × C^d_w`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianModel {
    n: usize,
    d: usize,
    a: Vec<CMat>,
    perturbation: Vec<PerturbationTerm>,
}

impl HermitianModel {
    pub fn new(a: Vec<CMat>, perturbation: Vec<PerturbationTerm>) -> Result<Self, ModelError> {
        let d = a.len();
        let n = a.first().map(|m| m.nrows()).unwrap_or(0);
        if n == 0 || d == 0 {
            return Err(ModelError::EmptyDimension { n, d });
        }
        for (index, m) in a.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(ModelError::BadShape { index, rows: m.nrows(), cols: m.ncols(), n });
            }
            for row in 0..n {
                for col in 0..n {
                    let value = m[(row, col)];
                    if !value.re.is_finite() || !value.im.is_finite() {
                        return Err(ModelError::NonFinite { index, row, col });
                    }
                    let mirror = m[(col, row)];
                    if value != mirror.conj() {
                        return Err(ModelError::NotHermitian { index, row, col, value, mirror });
                    }
                }
            }
        }
        for (term, p) in perturbation.iter().enumerate() {
            p.validate(term, n, d)?;
        }
        Ok(HermitianModel { n, d, a, perturbation })
    }

    /// Quadric built from real symmetric matrices given row-major.
    pub fn from_real(n: usize, mats: &[&[f64]]) -> Result<Self, ModelError> {
        let a = mats
            .iter()
            .map(|m| CMat::from_row_iterator(n, n, m.iter().map(|&x| C64::new(x, 0.0))))
            .collect();
        HermitianModel::new(a, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Complex dimension `N = n + d` of the ambient space.
    pub fn big_n(&self) -> usize {
        self.n + self.d
    }

    pub fn levi_matrices(&self) -> &[CMat] {
        &self.a
    }

    pub fn perturbation(&self) -> &[PerturbationTerm] {
        &self.perturbation
    }

    pub fn is_quadric(&self) -> bool {
        self.perturbation.is_empty()
    }

    /// The unperturbed quadric part.
    pub fn quadric_part(&self) -> HermitianModel {
        HermitianModel { n: self.n, d: self.d, a: self.a.clone(), perturbation: Vec::new() }
    }

    pub fn with_perturbation(&self, perturbation: Vec<PerturbationTerm>) -> Result<Self, ModelError> {
        HermitianModel::new(self.a.clone(), perturbation)
    }

    /// `Σ c_j A_j`.
    pub fn levi_combination(&self, c: &[f64]) -> CMat {
        assert_eq!(c.len(), self.d, "combination vector has wrong length");
        let mut out = CMat::zeros(self.n, self.n);
        for (cj, aj) in c.iter().zip(&self.a) {
            out += aj * C64::new(*cj, 0.0);
        }
        out
    }

    /// The `n x d` matrix whose `j`-th column is `A_j V`.
    pub fn d_matrix(&self, v: &[C64]) -> CMat {
        let vv = nalgebra::DVector::from_column_slice(v);
        let mut out = CMat::zeros(self.n, self.d);
        for (j, aj) in self.a.iter().enumerate() {
            out.set_column(j, &(aj * &vv));
        }
        out
    }

    /// `ᵗV̄ A_j V` for every `j` (real because each `A_j` is Hermitian).
    pub fn hermitian_forms(&self, v: &[C64]) -> Vec<f64> {
        let vv = nalgebra::DVector::from_column_slice(v);
        self.a.iter().map(|aj| vv.dotc(&(aj * &vv)).re).collect()
    }

    /// Unit sphere `Re w = |z|^2` in `C^2`.
    pub fn sphere() -> Self {
        HermitianModel::from_real(1, &[&[1.0]]).expect("fixture is valid")
    }

    /// `Re w_1 = |z_1|^2`, `Re w_2 = |z_2|^2`, `Re w_3 = z_1 z̄_2 + z̄_1 z_2`.
    pub fn q1() -> Self {
        HermitianModel::from_real(2, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0], &[0.0, 1.0, 1.0, 0.0]])
            .expect("fixture is valid")
    }

    /// `Re w_1 = |z_1|^2 - |z_2|^2`, `Re w_2 = |z_3|^2`.
    pub fn q2() -> Self {
        HermitianModel::from_real(
            3,
            &[&[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]],
        )
        .expect("fixture is valid")
    }

    /// `Re w_1 = Re w_2 = |z|^2`: satisfies (t) but never (d).
    pub fn twin_sphere() -> Self {
        HermitianModel::from_real(1, &[&[1.0], &[1.0]]).expect("fixture is valid")
    }
}

/// Hermitian matrix `(M + M^*)/2`, exactly Hermitian in floating point.
pub fn hermitian_part(m: &CMat) -> CMat {
    let n = m.nrows();
    CMat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}
