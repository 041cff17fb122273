//! Training on the coupled quadratic benchmark.
//!
//! Builds the 8-dimensional quadratic saddle instance, trains with
//! projected gradient descent ascent — noiselessly and then privately at
//! (1, 1e-5) — and compares the averaged iterates against the closed-form
//! saddle of the empirical objective. The noiseless run converges at the
//! 1/sqrt(T) rate as T grows; private runs instead use T = n^(2/3) steps,
//! because the calibrated noise scale grows like sqrt(T)/n and longer
//! training would drown the signal.
//!
//! Run with: cargo run --release --example train_quadratic

use dpminimax::numerics::RngState;
use dpminimax::optimizer::{run, Schedule};
use dpminimax::privacy::{calibrate_sigma, PrivacyBudget, DEFAULT_CALIBRATION_C};
use dpminimax::problem::{
    closed_form_saddle, gen_dataset, make_quadratic_saddle, QuadraticSaddleSpec,
};
use dpminimax::risk::{risk_report, DEFAULT_INNER_TOL};
use dpminimax::problem::eval_set;
use dpminimax::Result;

fn main() -> Result<()> {
    let inst = make_quadratic_saddle(&QuadraticSaddleSpec::cyclic(8, 1.0, 0.5, 1.0))?;
    println!(
        "instance: p = {}, G = {}, L = {}, loss range M = {:.1}",
        inst.dim_w, inst.lipschitz, inst.smooth, inst.loss_bound
    );

    let n = 200;
    let data = gen_dataset(&inst, n, 42)?;
    let (w_star, v_star) = closed_form_saddle(&inst, &data)?;
    let schedule = Schedule::new(inst.rho, 0.0)?;

    println!("\nnoiseless convergence to the empirical saddle (n = {n}):");
    for steps in [100, 1_000, 10_000] {
        let mut rng = RngState::new(7);
        let traj = run(&inst, &data, steps, &schedule, None, &mut rng, false)?;
        let dist = traj.avg_w.dist(&w_star) + traj.avg_v.dist(&v_star);
        println!("  T = {steps:>6}: distance = {dist:.3e}");
    }

    let budget = PrivacyBudget::new(1.0, 1e-5)?;
    println!("\nprivate runs at epsilon = 1, delta = 1e-5, T = n^(2/3):");
    let mut last = None;
    for n in [200usize, 1_000, 5_000] {
        let steps = dpminimax::numerics::floor_two_thirds(n as u64) as usize;
        let plan = calibrate_sigma(inst.lipschitz, steps, n, &budget, DEFAULT_CALIBRATION_C)?;
        let data = gen_dataset(&inst, n, 42)?;
        let (w_star, v_star) = closed_form_saddle(&inst, &data)?;
        let mut rng = RngState::new(7);
        let traj = run(&inst, &data, steps, &schedule, Some(&plan), &mut rng, false)?;
        let dist = traj.avg_w.dist(&w_star) + traj.avg_v.dist(&v_star);
        println!(
            "  n = {n:>5}, T = {steps:>4}, sigma = {:>7.4}: distance = {dist:.3e}",
            plan.sigma
        );
        last = Some((traj, data));
    }

    let (traj, data) = last.expect("loop ran");
    let eval = eval_set(&inst, 100_000, 42)?;
    let report = risk_report(
        &inst,
        &[(traj.avg_w.clone(), traj.avg_v.clone())],
        &data,
        &eval,
        DEFAULT_INNER_TOL,
    )?;
    println!("\nrisk report for the last private pair:");
    println!("  plain gap (population - empirical): {:+.4e}", report.plain_pop - report.plain_emp);
    println!("  primal gap:                         {:+.4e}", report.primal_pop - report.primal_emp);
    println!("  strong primal-dual gap (empirical): {:.4e}", report.strong_pd_emp);
    println!("  strong primal-dual gap (population): {:.4e}", report.strong_pd_pop);
    Ok(())
}
