//! Explicit Birkhoff factorization of the sphere's boundary operator and
//! the polynomial-degree check on its kernel.

use stadisc::rh::birkhoff_check;
use stadisc::Tolerance;

fn main() {
    let r = birkhoff_check(8, Tolerance::default());
    println!("factorization identity error {:.3e}", r.theta_error);
    println!("kernel dim {} at degree {}, max degree {}", r.kernel_dim, r.deg_max, r.max_degree);
    println!("largest coefficient above degree 1: {:.3e}", r.high_coefficient);
    println!("pass {}", r.pass);
}
