//! Defect of canonical discs on Q1: V = (1, i) is nondefective while
//! V = (1, 1) has a one-dimensional defect.

use stadisc::disc::{canonical_disc, compute_defect, DiscConfig};
use stadisc::linalg::I;
use stadisc::{HermitianModel, C64};

fn main() {
    let model = HermitianModel::q1();
    let one = C64::new(1.0, 0.0);
    let cfg = DiscConfig::default();
    for (label, v) in [("(1, i)", [one, I]), ("(1, 1)", [one, one])] {
        let disc = canonical_disc(&model, &v).expect("dimensions match");
        let r = compute_defect(&model, &disc, &cfg).expect("quadric and attached");
        println!("V = {label}: defect {}  singular values {:?}", r.defect, r.residual_singular_values);
        for k in &r.kernel_basis {
            println!("    kernel vector {k:?}");
        }
    }
}
