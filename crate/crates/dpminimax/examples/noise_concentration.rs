//! Empirical check of the Gaussian norm-concentration threshold.
//!
//! The training analysis controls noise through a high-probability bound
//! on the norm of a p-dimensional Gaussian: with probability at least
//! 1 - zeta, the norm stays below sigma (sqrt(p) + sqrt(2 ln(1/zeta))).
//! This example draws many Gaussians and reports the observed exceedance
//! rate. The bound is one-sided and conservative: rates sit well below
//! zeta, reaching ~0 for small zeta.
//!
//! Run with: cargo run --release --example noise_concentration

use dpminimax::numerics::{noise_norm_threshold, sample_gaussian, RngState};
use dpminimax::Result;

fn main() -> Result<()> {
    let trials = 200_000;
    let sigma = 1.0;
    println!("{trials} draws per cell, sigma = {sigma}\n");
    println!(
        "{:>5} {:>7} {:>12} {:>14} {:>12}",
        "p", "zeta", "threshold", "exceed rate", "rate/zeta"
    );
    for p in [4usize, 16, 64] {
        for zeta in [0.2, 0.05, 0.01] {
            let threshold = noise_norm_threshold(sigma, p, zeta)?;
            let mut rng = RngState::new(2718).derive(p as u64).derive((zeta * 1000.0) as u64);
            let mut exceed = 0usize;
            for _ in 0..trials {
                if sample_gaussian(p, sigma, &mut rng)?.norm() > threshold {
                    exceed += 1;
                }
            }
            let rate = exceed as f64 / trials as f64;
            println!(
                "{p:>5} {zeta:>7} {threshold:>12.4} {rate:>14.5} {:>12.3}",
                rate / zeta
            );
            assert!(rate <= zeta, "concentration bound violated");
        }
    }
    Ok(())
}
