//! Polynomial analytic discs `ζ ↦ Σ_k c_k ζ^k` valued in `C^m`, their
//! cotangent lifts, and the operations that verify stationarity.

mod defect;
mod lift;
mod pushforward;
mod serial;

pub use defect::{combination_real_rank, compute_defect, is_nondefective, DefectResult};
pub use lift::{attachment_residual, canonical_disc, canonical_lift, stationarity_residual, stationarity_residual_at};
pub use pushforward::{pushforward_lift, PolyMap, Pushforward};
pub use serial::{disc_from_json, disc_to_json, lift_from_json, lift_to_json, DiscFile};

use crate::linalg::{root_of_unity, C64};
use rustfft::FftPlanner;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscError {
    #[error("disc has {got} components, expected {expected}")]
    WrongDimension { expected: usize, got: usize },
    #[error("Σ c_j A_j is singular (sigma_min = {sigma_min:e})")]
    SingularCombination { sigma_min: f64 },
    #[error("defect is only defined here for unperturbed quadrics")]
    PerturbedModel,
    #[error("disc is not attached (residual {residual:e})")]
    NotAttached { residual: f64 },
    #[error("singular Jacobian of the map at boundary sample {sample}")]
    SingularJacobian { sample: usize },
    #[error("Fourier defect ({fourier}) disagrees with the rank criterion ({rank_criterion})")]
    InconsistentDefect { fourier: usize, rank_criterion: usize },
    #[error("disc file: {0}")]
    Format(String),
}

/// Numerical knobs shared by disc operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscConfig {
    pub deg_max: usize,
    /// Boundary samples; `None` means `max(64, 8 * deg_max)`.
    pub samples: Option<usize>,
    pub attachment_tol: f64,
    /// A lift is rejected as touching the zero section when
    /// `min |f̃| < zero_section_ratio * max |f̃|` on the boundary.
    pub zero_section_ratio: f64,
    pub tol: crate::linalg::Tolerance,
}

impl Default for DiscConfig {
    fn default() -> Self {
        DiscConfig {
            deg_max: 16,
            samples: None,
            attachment_tol: 1e-8,
            zero_section_ratio: 1e-8,
            tol: crate::linalg::Tolerance::default(),
        }
    }
}

impl DiscConfig {
    pub fn sample_count(&self) -> usize {
        self.samples.unwrap_or_else(|| (8 * self.deg_max).max(64))
    }
}

/// A polynomial disc in `C^m`: one coefficient array per component, all of
/// the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyDisc {
    components: Vec<Vec<C64>>,
}

impl PolyDisc {
    pub fn new(mut components: Vec<Vec<C64>>) -> Self {
        let len = components.iter().map(|c| c.len()).max().unwrap_or(1).max(1);
        for c in &mut components {
            c.resize(len, C64::new(0.0, 0.0));
        }
        PolyDisc { components }
    }

    pub fn zeros(dim: usize, degree: usize) -> Self {
        PolyDisc { components: vec![vec![C64::new(0.0, 0.0); degree + 1]; dim] }
    }

    /// `(1 - ζ) v` in every component.
    pub fn vanishing_linear(v: &[C64]) -> Self {
        PolyDisc::new(v.iter().map(|&x| vec![x, -x]).collect())
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Length of the coefficient arrays minus one.
    pub fn degree(&self) -> usize {
        self.components.first().map(|c| c.len() - 1).unwrap_or(0)
    }

    /// Highest index carrying a coefficient above `eps`.
    pub fn effective_degree(&self, eps: f64) -> usize {
        self.components
            .iter()
            .flat_map(|c| c.iter().enumerate().filter(|(_, z)| z.norm() > eps).map(|(k, _)| k))
            .max()
            .unwrap_or(0)
    }

    pub fn components(&self) -> &[Vec<C64>] {
        &self.components
    }

    pub fn component(&self, m: usize) -> &[C64] {
        &self.components[m]
    }

    pub fn coeff(&self, m: usize, k: usize) -> C64 {
        self.components[m].get(k).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn set_coeff(&mut self, m: usize, k: usize, value: C64) {
        if k >= self.components[m].len() {
            for c in &mut self.components {
                c.resize(k + 1, C64::new(0.0, 0.0));
            }
        }
        self.components[m][k] = value;
    }

    pub fn eval(&self, zeta: C64) -> Vec<C64> {
        self.components
            .iter()
            .map(|c| c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * zeta + a))
            .collect()
    }

    pub fn derivative(&self) -> PolyDisc {
        PolyDisc::new(
            self.components
                .iter()
                .map(|c| if c.len() <= 1 { vec![C64::new(0.0, 0.0)] } else { c.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect() })
                .collect(),
        )
    }

    pub fn padded(&self, degree: usize) -> PolyDisc {
        let mut out = self.clone();
        for c in &mut out.components {
            c.resize(degree.max(c.len() - 1) + 1, C64::new(0.0, 0.0));
        }
        out
    }

    /// Componentwise real-linear combination `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &PolyDisc, b: f64) -> PolyDisc {
        assert_eq!(self.dim(), other.dim());
        let len = self.degree().max(other.degree()) + 1;
        PolyDisc::new(
            (0..self.dim())
                .map(|m| (0..len).map(|k| self.coeff(m, k) * a + other.coeff(m, k) * b).collect())
                .collect(),
        )
    }

    /// Multiplies every component by `(1 - ζ)`.
    pub fn times_one_minus_zeta(&self) -> PolyDisc {
        PolyDisc::new(
            self.components
                .iter()
                .map(|c| {
                    let mut out = vec![C64::new(0.0, 0.0); c.len() + 1];
                    for (k, a) in c.iter().enumerate() {
                        out[k] += a;
                        out[k + 1] -= a;
                    }
                    out
                })
                .collect(),
        )
    }

    /// Whether every component vanishes at `ζ = 1`.
    pub fn vanishes_at_one(&self, eps: f64) -> bool {
        self.eval(C64::new(1.0, 0.0)).iter().all(|z| z.norm() <= eps)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.components.iter().flatten().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn boundary_samples(&self, count: usize) -> Vec<Vec<C64>> {
        (0..count).map(|k| self.eval(root_of_unity(k, count))).collect()
    }

    pub fn concat(&self, other: &PolyDisc) -> PolyDisc {
        PolyDisc::new(self.components.iter().chain(other.components.iter()).cloned().collect())
    }

    pub fn split(&self, at: usize) -> (PolyDisc, PolyDisc) {
        (PolyDisc::new(self.components[..at].to_vec()), PolyDisc::new(self.components[at..].to_vec()))
    }

    /// Composition `f ∘ φ` with the disc automorphism
    /// `φ(ζ) = e^{iβ}(ζ - a)/(1 - āζ)` normalized by `φ(1) = 1`, truncated
    /// to `degree`. Returns the disc and the norm of the discarded tail.
    pub fn compose_disc_automorphism(&self, a: C64, degree: usize) -> (PolyDisc, f64) {
        assert!(a.norm() < 1.0, "automorphism parameter must lie in the disc");
        let one = C64::new(1.0, 0.0);
        let rot = (one - a.conj()) / (one - a);
        let count = (4 * (degree + 1)).next_power_of_two().max(64);
        let samples: Vec<Vec<C64>> = (0..count)
            .map(|k| {
                let z = root_of_unity(k, count);
                self.eval(rot * (z - a) / (one - a.conj() * z))
            })
            .collect();
        project_samples(&samples, degree)
    }
}

/// Fourier coefficients `c_k = (1/K) Σ_s x_s ζ_s^{-k}`, index `k mod K`.
pub fn fourier_coefficients(samples: &[C64]) -> Vec<C64> {
    let count = samples.len();
    let mut buf = samples.to_vec();
    let fft = FftPlanner::new().plan_fft_forward(count);
    fft.process(&mut buf);
    buf.iter().map(|z| z / count as f64).collect()
}

/// Projects boundary samples (one vector per root of unity) onto
/// polynomials of degree `<= degree`; the second value is the Euclidean norm
/// of every discarded Fourier coefficient (positive tail and negative
/// frequencies).
pub fn project_samples(samples: &[Vec<C64>], degree: usize) -> (PolyDisc, f64) {
    let count = samples.len();
    let dim = samples.first().map(|s| s.len()).unwrap_or(0);
    let mut comps = Vec::with_capacity(dim);
    let mut tail = 0.0;
    for m in 0..dim {
        let series: Vec<C64> = samples.iter().map(|s| s[m]).collect();
        let coeffs = fourier_coefficients(&series);
        let keep = (degree + 1).min(count);
        tail += coeffs[keep..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        let mut c = coeffs[..keep].to_vec();
        c.resize(degree + 1, C64::new(0.0, 0.0));
        comps.push(c);
    }
    (PolyDisc::new(comps), tail.sqrt())
}

/// A cotangent lift `(f, f̃)`: base `f = (h, g)` and covector part
/// `f̃ = (h̃, g̃)`, each in `C^N` with `z` components first.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedDisc {
    pub base: PolyDisc,
    pub cotangent: PolyDisc,
}

impl LiftedDisc {
    pub fn new(base: PolyDisc, cotangent: PolyDisc) -> Self {
        assert_eq!(base.dim(), cotangent.dim(), "base and cotangent dimensions differ");
        LiftedDisc { base, cotangent }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn eval(&self, zeta: C64) -> (Vec<C64>, Vec<C64>) {
        (self.base.eval(zeta), self.cotangent.eval(zeta))
    }

    /// All `2N` components, base first.
    pub fn as_disc(&self) -> PolyDisc {
        self.base.concat(&self.cotangent)
    }

    pub fn from_disc(disc: &PolyDisc) -> Self {
        let (b, c) = disc.split(disc.dim() / 2);
        LiftedDisc::new(b, c)
    }

    pub fn degree(&self) -> usize {
        self.base.degree().max(self.cotangent.degree())
    }

    pub fn max_coeff_distance(&self, other: &LiftedDisc) -> f64 {
        let a = self.as_disc();
        let b = other.as_disc();
        let len = a.degree().max(b.degree()) + 1;
        (0..a.dim()).flat_map(|m| (0..len).map(move |k| (m, k))).fold(0.0, |acc, (m, k)| acc.max((a.coeff(m, k) - b.coeff(m, k)).norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_and_eval() {
        // (1 - ζ)(c0 + c1 ζ) = c0 + (c1 - c0) ζ - c1 ζ²
        let c0 = C64::new(0.3, -1.0);
        let c1 = C64::new(2.0, 0.5);
        let p = PolyDisc::new(vec![vec![c0, c1]]).times_one_minus_zeta();
        assert!(p.vanishes_at_one(1e-15));
        let dp = p.derivative();
        // derivative at 1 equals -(c0 + c1)
        assert!((dp.eval(C64::new(1.0, 0.0))[0] + c0 + c1).norm() < 1e-15);
        let h = 1e-6;
        let t = C64::new(1.0 - h, 0.0);
        let fd = (p.eval(C64::new(1.0, 0.0))[0] - p.eval(t)[0]) / h;
        assert!((fd - dp.eval(C64::new(1.0, 0.0))[0]).norm() < 1e-5);
    }

    #[test]
    fn projection_recovers_polynomial() {
        let p = PolyDisc::new(vec![vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0), C64::new(3.0, 0.0)]]);
        let (q, tail) = project_samples(&p.boundary_samples(32), 5);
        assert!(tail < 1e-14);
        for k in 0..3 {
            assert!((q.coeff(0, k) - p.coeff(0, k)).norm() < 1e-14);
        }
    }

    #[test]
    fn automorphism_fixes_one() {
        let p = PolyDisc::vanishing_linear(&[C64::new(1.0, 0.0)]);
        let (q, tail) = p.compose_disc_automorphism(C64::new(0.2, 0.1), 40);
        assert!(tail < 1e-12);
        assert!(q.vanishes_at_one(1e-12));
    }
}
