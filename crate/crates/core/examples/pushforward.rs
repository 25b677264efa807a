//! Pushes the sphere's canonical lift forward by a rotation-dilation and by
//! a map tangent to the identity to third order.

use stadisc::deformation::jet_coordinates;
use stadisc::disc::{canonical_lift, pushforward_lift, stationarity_residual, DiscConfig, PolyMap};
use stadisc::{HermitianModel, Tolerance, C64};

fn main() {
    let model = HermitianModel::sphere();
    let tol = Tolerance::default();
    let lift = canonical_lift(&model, &[C64::new(1.0, 0.0)], &[1.0], tol).expect("A is invertible");
    let cfg = DiscConfig::default();

    // (z, w) -> (λz, |λ|^2 w) preserves Re w = |z|^2
    let lambda = C64::from_polar(1.5, 0.7);
    let rot = PolyMap::diagonal(&[lambda, C64::new(lambda.norm_sqr(), 0.0)]);
    let pushed = pushforward_lift(&rot, &lift, 8, tol).expect("Jacobian invertible");
    println!("rotation-dilation: stationarity {:.3e}  tail {:.3e}", stationarity_residual(&model, &pushed.lift, 128, &cfg), pushed.tail_norm);

    let cubic = PolyMap::identity(2).add_term(0, C64::new(0.01, 0.0), vec![3, 0]);
    let pushed = pushforward_lift(&cubic, &lift, 24, tol).expect("Jacobian invertible");
    let before = jet_coordinates(&lift);
    let after = jet_coordinates(&pushed.lift);
    let diff = before.iter().zip(&after).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("identity + z^3: 1-jet change {diff:.3e}  tail {:.3e}", pushed.tail_norm);
}
