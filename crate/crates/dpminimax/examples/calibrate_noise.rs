//! Noise calibration across privacy budgets.
//!
//! For a fixed problem (gradient sensitivity bound, step count, sample
//! size), calibrates the per-step Gaussian scale for several (epsilon,
//! delta) budgets and verifies each plan with the moments accountant. The
//! achieved delta is the accountant's tail bound at the calibrated sigma.
//!
//! Calibration is a closed-form recipe scaled by a constant c, and
//! verification is the guardrail: the default c is chosen for moderate
//! budgets, so a large epsilon can produce sigma too small for its delta —
//! the plan comes back invalid and a larger c fixes it.
//!
//! Run with: cargo run --release --example calibrate_noise

use dpminimax::privacy::{calibrate_sigma, tail_delta, PrivacyBudget, DEFAULT_CALIBRATION_C};
use dpminimax::Result;

fn main() -> Result<()> {
    let lipschitz = 5.5;
    let steps = 100;
    let n = 1000;
    println!("gradient bound G = {lipschitz}, T = {steps} steps, n = {n} samples\n");

    println!(
        "{:>8} {:>10} {:>12} {:>14} {:>9} {:>7}",
        "epsilon", "delta", "sigma", "achieved", "lambda*", "valid"
    );
    for (epsilon, delta) in [(0.5, 1e-5), (1.0, 1e-5), (2.0, 1e-5), (4.0, 1e-6), (8.0, 1e-6)] {
        let budget = PrivacyBudget::new(epsilon, delta)?;
        let plan = calibrate_sigma(lipschitz, steps, n, &budget, DEFAULT_CALIBRATION_C)?;
        println!(
            "{:>8} {:>10.0e} {:>12.6} {:>14.3e} {:>9} {:>7}",
            epsilon,
            delta,
            plan.sigma,
            plan.achieved_delta.unwrap(),
            plan.lambda_star.unwrap(),
            plan.valid
        );
    }

    // The invalid cell above, repaired by raising the calibration constant.
    let budget = PrivacyBudget::new(8.0, 1e-6)?;
    let mut c = DEFAULT_CALIBRATION_C;
    loop {
        let plan = calibrate_sigma(lipschitz, steps, n, &budget, c)?;
        if plan.valid {
            println!(
                "\nepsilon = 8, delta = 1e-6 verifies at c = {c:.2} \
                 (sigma = {:.4}, achieved delta = {:.3e})",
                plan.sigma,
                plan.achieved_delta.unwrap()
            );
            break;
        }
        c *= 1.25;
    }

    // The accountant's tail bound as a function of sigma, at a fixed
    // epsilon: doubling the noise scale buys orders of magnitude in delta.
    let epsilon = 1.0;
    println!("\ntail delta at epsilon = {epsilon} (2T = {} mechanisms):", 2 * steps);
    for sigma in [0.5, 1.0, 2.0, 4.0] {
        let (delta, lambda) = tail_delta(epsilon, lipschitz, n, sigma, 2 * steps, 256)?;
        println!("  sigma = {sigma:>4}: delta = {delta:.3e}  (moment order {lambda})");
    }
    Ok(())
}
