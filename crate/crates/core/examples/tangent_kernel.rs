//! Tangent kernel of the linearized boundary problem on Q2, computed both
//! numerically and from the closed form, with the tolerance ladder.

use stadisc::rh::{operator_residual, tangent_kernel, GAssembly, KernelConfig, KernelMethod};
use stadisc::{HermitianModel, Tolerance, C64};

fn main() {
    let model = HermitianModel::q2();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(s, 0.0)];
    let g = GAssembly::new(&model, &v, &[1.0, 1.0], Tolerance::default()).expect("invertible combination");

    for degree in [1, 3] {
        let cfg = KernelConfig { degree, ..KernelConfig::default() };
        let k = tangent_kernel(&g, KernelMethod::Both, &cfg).expect("kernel has dimension 2N");
        let worst = k.elements.iter().map(|f| operator_residual(&g, f, 64)).fold(0.0, f64::max);
        println!("degree {degree}: dim {}  principal angle {:.2e}  residual {:.2e}", k.dim(), k.principal_angle.unwrap_or(f64::NAN), worst);
        for step in &k.ladder {
            println!("    rel tol {:.0e} -> dim {}", step.rel_tol, step.dim);
        }
    }
}
