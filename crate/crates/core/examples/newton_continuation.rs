//! Continues the canonical Q1 lift to a cubic perturbation of the quadric
//! and checks that the solved disc is attached and stationary.

use stadisc::deformation::{newton_solve, params_of, select_pins, SolveConfig};
use stadisc::disc::{attachment_residual, canonical_lift, stationarity_residual, DiscConfig};
use stadisc::linalg::I;
use stadisc::{HermitianModel, PerturbationTerm, Tolerance, C64};
use std::time::Instant;

fn main() {
    let quadric = HermitianModel::q1();
    let v = [C64::new(1.0, 0.0), I];
    let c = [1.0, 1.0, 0.0];
    let initial = canonical_lift(&quadric, &v, &c, Tolerance::default()).expect("A is invertible");

    // Re w_1 = |z_1|^2 + 1e-3 Re(z_1^2 z̄_2)
    let term = PerturbationTerm { row: 1, coeff: 1e-3, z_exp: vec![2, 0], zbar_exp: vec![0, 1], imw_exp: vec![0, 0, 0] };
    let model = quadric.with_perturbation(vec![term]).expect("valid perturbation");

    let cfg = SolveConfig::default();
    let pins = select_pins(&quadric, &v, &c, cfg.tol).expect("tangent kernel").indices;
    let target = params_of(&initial, &pins);
    let start = Instant::now();
    let solved = newton_solve(&model, &initial, &target, &cfg).expect("Newton converges");
    println!("iterations {}  residual {:.3e}  ({:.2?})", solved.iterations, solved.residual, start.elapsed());
    println!("residual history {:?}", solved.history);
    println!("attachment   {:.3e}", attachment_residual(&model, &solved.lift.base, 256));
    println!("stationarity {:.3e}", stationarity_residual(&model, &solved.lift, 256, &DiscConfig::default()));
}
