//! Builds the canonical stationary lift on Q1 and reports its residuals,
//! then writes it to stdout in the lifted-disc JSON format.

use stadisc::disc::{attachment_residual, canonical_lift, lift_to_json, stationarity_residual, DiscConfig};
use stadisc::linalg::I;
use stadisc::{HermitianModel, Tolerance, C64};

fn main() {
    let model = HermitianModel::q1();
    let v = [C64::new(1.0, 0.0), I];
    let c = [1.0, 1.0, 0.0];
    let lift = canonical_lift(&model, &v, &c, Tolerance::default()).expect("A is invertible");
    let cfg = DiscConfig::default();
    let samples = cfg.sample_count();

    for (m, comp) in lift.as_disc().components().iter().enumerate() {
        println!("  component {m}: {:?}", comp);
    }
    println!("attachment   {:.3e}", attachment_residual(&model, &lift.base, samples));
    println!("stationarity {:.3e}", stationarity_residual(&model, &lift, samples, &cfg));
    println!("{}", lift_to_json(&lift));
}
