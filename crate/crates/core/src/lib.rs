//! Stationary analytic discs attached to quadric models of generic CR
//! submanifolds of `C^N`.
//!
//! * [`model`]: quadric models, defining functions and the nondegeneracy
//!   certificates (a), (b), (t), (d), (f);
//! * [`disc`]: polynomial discs, canonical stationary lifts, residuals,
//!   defect and pushforward by polynomial maps;
//! * [`rh`]: the linearized Riemann–Hilbert operator, its kernel, jet maps
//!   and the explicit Birkhoff factorization check;
//! * [`deformation`]: Newton continuation of lifts under perturbation and
//!   the conormal coverage probe;
//! * [`cli`]: manifests, reports and the bundled fixtures behind the
//!   `stadisc` binary.

pub mod linalg;
pub mod model;
pub mod disc;
pub mod rh;
pub mod deformation;
pub mod cli;

pub use linalg::{Tolerance, C64};
pub use model::{HermitianModel, ModelError, PerturbationTerm};
