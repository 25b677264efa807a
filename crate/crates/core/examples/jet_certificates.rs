//! Jet-injectivity certificates: Q1 at order 1, Q2 along a degenerate
//! direction, and the twin sphere at orders 1 and 2.

use stadisc::linalg::I;
use stadisc::rh::{certify_jet_injectivity, GAssembly, KernelConfig};
use stadisc::{HermitianModel, Tolerance, C64};

fn main() {
    let one = C64::new(1.0, 0.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let cases = [
        ("q1, V=(1,i)", HermitianModel::q1(), vec![one, I], vec![1.0, 1.0, 0.0], 1),
        ("q2, V=(1,0,1)", HermitianModel::q2(), vec![one, C64::new(0.0, 0.0), one], vec![1.0, 1.0], 1),
        ("q2, V=(1,1,1)", HermitianModel::q2(), vec![one, one, one], vec![1.0, 1.0], 1),
        ("twin sphere", HermitianModel::twin_sphere(), vec![one], vec![s, s], 1),
        ("twin sphere", HermitianModel::twin_sphere(), vec![one], vec![s, s], 2),
    ];
    for (label, model, v, c, order) in cases {
        let g = GAssembly::new(&model, &v, &c, Tolerance::default()).expect("invertible combination");
        let cert = certify_jet_injectivity(&g, order, &KernelConfig::default()).expect("kernel");
        println!(
            "{label:<14} order {order}: rank {:>2} of {:>2}  σ_min {:.3e}  injective {}",
            cert.rank, cert.kernel_dim, cert.sigma_min, cert.injective
        );
    }
}
