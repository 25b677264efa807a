//! Conormal coverage probe on Q1 (full rank) and on Q2 along a direction
//! whose jet map has a one-dimensional kernel.

use stadisc::deformation::{coverage_probe, probe_family, SolveConfig};
use stadisc::disc::canonical_lift;
use stadisc::linalg::I;
use stadisc::{HermitianModel, Tolerance, C64};

fn main() {
    let one = C64::new(1.0, 0.0);
    let cfg = SolveConfig { deg_max: 8, ..SolveConfig::default() };
    let cases = [
        ("q1", HermitianModel::q1(), vec![one, I], vec![1.0, 1.0, 0.0]),
        ("q2, V=(1,1,1)", HermitianModel::q2(), vec![one, one, one], vec![1.0, 1.0]),
    ];
    for (label, model, v, c) in cases {
        let initial = canonical_lift(&model, &v, &c, Tolerance::default()).expect("A is invertible");
        let family = probe_family(&model, &initial, 1e-4, &cfg).ok();
        let r = coverage_probe(&model, &initial, family.as_ref(), 0.1, &cfg).expect("probe runs");
        println!(
            "{label:<14} analytic rank {:>2}/{}  fd rank {:?}  membership {:.1e}  affine dim {}  certified {}",
            r.analytic_rank, r.expected_rank, r.fd_rank, r.membership_residual, r.affine_dim, r.certified
        );
    }
}
