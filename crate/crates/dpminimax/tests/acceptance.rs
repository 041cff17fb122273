//! Acceptance gate: eleven end-to-end checks covering convergence, privacy
//! accounting, concentration, stability scaling, containment,
//! generalization, risk consistency, transcription agreement, and
//! determinism. Each test prints one `[Axx] PASS/FAIL` line (visible with
//! `--nocapture`) and asserts its criterion.
//!
//! The tests share a mutex so measured runtimes reflect an uncontended
//! machine; total serialized runtime is dominated by the long fixed-horizon
//! stability sweep in A05.
//!
//! A06 is a known, documented red: it asserts that the *measured* private
//! coupled-run distance decays at the n^(-1/2) rate of the worst-case
//! stability bound. Under the prescribed common-random-numbers coupling the
//! shared noise cancels inside the coupled difference (projections only
//! contract), so the measurement keeps its noiseless 1/n scaling; only the
//! bound itself follows the n^(-1/2) rate (its fitted slope is printed
//! alongside and does land in the window). The test is kept faithful to the
//! stated criterion rather than weakened to match the mechanism.

use std::sync::Mutex;
use std::time::Instant;

use dpminimax::bounds::{
    argument_stability_bound, best_response_gap_bound, plain_generalization_bound,
    primal_excess_risk_bound, primal_generalization_bound, strong_pd_empirical_bound,
    strong_pd_generalization_bound, strong_pd_population_bound, weak_pd_generalization_bound,
    weak_pd_population_bound,
};
use dpminimax::numerics::{
    floor_two_thirds, least_squares_slope, noise_norm_threshold, sample_gaussian, RngState,
};
use dpminimax::optimizer::{run, run_prepared, Schedule};
use dpminimax::privacy::{calibrate_sigma, tail_delta, PrivacyBudget, DEFAULT_CALIBRATION_C};
use dpminimax::problem::{
    closed_form_saddle, eval_set, gen_dataset, make_quadratic_saddle, prepare, prepared_loss,
    ProblemInstance, QuadraticSaddleSpec,
};
use dpminimax::risk::{g_distances_prepared, strong_pd, weak_pd, DEFAULT_INNER_CAP};
use dpminimax::stability::{empirical_gamma, GammaParams};

static GATE: Mutex<()> = Mutex::new(());

fn gate() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: u32, pass: bool, detail: &str) {
    println!("[A{id:02}] {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "[A{id:02}] FAIL {detail}");
}

fn benchmark() -> ProblemInstance {
    make_quadratic_saddle(&QuadraticSaddleSpec::cyclic(8, 1.0, 0.5, 1.0)).unwrap()
}

/// Local deterministic generator for random-input sweeps, independent of
/// the library's generator.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64) / ((1u64 << 53) as f64)
    }
    fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn a01_noiseless_convergence_to_closed_form_saddle() {
    let _g = gate();
    let t0 = Instant::now();
    let inst = benchmark();
    let data = gen_dataset(&inst, 200, 42).unwrap();
    let steps = 10_000usize;
    let schedule = Schedule::new(inst.rho, 0.0).unwrap();
    let mut rng = RngState::new(1);
    let traj = run(&inst, &data, steps, &schedule, None, &mut rng, false).unwrap();
    let (w_star, v_star) = closed_form_saddle(&inst, &data).unwrap();
    let (dw, dv) = (traj.avg_w.dist(&w_star), traj.avg_v.dist(&v_star));
    let dist = (dw * dw + dv * dv).sqrt();
    let (g, rho, t) = (inst.lipschitz, inst.rho, steps as f64);
    let bound = 2.0 * (g * g * (1.0 + t.ln()) / (rho * rho * t)).sqrt() * 2f64.sqrt() * 1.5;
    let el = t0.elapsed().as_secs_f64();
    report(
        1,
        dist <= bound && el < 10.0,
        &format!("saddle distance {dist:.3e} <= {bound:.3e} at T=10^4, {el:.2}s < 10s"),
    );
}

#[test]
fn a02_empirical_saddle_gap_within_averaged_iterate_rate() {
    let _g = gate();
    let t0 = Instant::now();
    let inst = benchmark();
    let data = gen_dataset(&inst, 200, 42).unwrap();
    let schedule = Schedule::new(inst.rho, 0.0).unwrap();
    let mut detail = String::new();
    let mut pass = true;
    for steps in [100usize, 1_000, 10_000] {
        let mut rng = RngState::new(2);
        let traj = run(&inst, &data, steps, &schedule, None, &mut rng, false).unwrap();
        let gap = strong_pd(&inst, &traj.avg_w, &traj.avg_v, &data, 1e-8).unwrap();
        let t = steps as f64;
        let bound = 3.0 * inst.lipschitz.powi(2) * (1.0 + t.ln()) / (inst.rho * t);
        pass &= gap <= bound;
        detail.push_str(&format!("T={steps}: {gap:.3e}<={bound:.3e} "));
    }
    let el = t0.elapsed().as_secs_f64();
    report(2, pass && el < 30.0, &format!("{detail}, {el:.2}s < 30s"));
}

#[test]
fn a03_accountant_matches_exhaustive_oracle_and_calibration_verifies() {
    let _g = gate();
    let t0 = Instant::now();
    let mut lcg = Lcg(0xACCE97);
    let mut worst_rel = 0.0f64;
    let mut lambda_mismatches = 0usize;
    for _ in 0..100 {
        let g = lcg.in_range(0.5, 8.0);
        let n = 50 + (lcg.next() * 4950.0) as usize;
        let mechanisms = 20 + (lcg.next() * 19_980.0) as usize;
        let scale = lcg.in_range(2.0, 30.0);
        let sigma = scale * g * (mechanisms as f64).sqrt() / n as f64;
        let epsilon = lcg.in_range(0.05, 5.0);
        let lambda_max = 8 + (lcg.next() * 56.0) as usize;
        let (delta, lambda) = tail_delta(epsilon, g, n, sigma, mechanisms, lambda_max).unwrap();

        // Exhaustive oracle with an independent arithmetic grouping.
        let coef = g / (n as f64 * sigma);
        let per_lambda = 2.0 * mechanisms as f64 * coef * coef;
        let mut best_exponent = f64::INFINITY;
        let mut best_lambda = 0usize;
        for l in 1..=lambda_max {
            let lf = l as f64;
            let exponent = lf * (lf + 1.0) * per_lambda - lf * epsilon;
            if exponent < best_exponent {
                best_exponent = exponent;
                best_lambda = l;
            }
        }
        if lambda != best_lambda {
            lambda_mismatches += 1;
        }
        worst_rel = worst_rel.max(rel_err(delta, best_exponent.exp()));
    }

    let mut invalid = 0usize;
    for n in [100usize, 1_000] {
        for t in [100usize, 10_000] {
            for epsilon in [0.5, 1.0, 4.0] {
                for delta in [1e-5, 1e-6] {
                    let budget = PrivacyBudget::new(epsilon, delta).unwrap();
                    let plan =
                        calibrate_sigma(5.5, t, n, &budget, DEFAULT_CALIBRATION_C).unwrap();
                    if !plan.valid {
                        invalid += 1;
                    }
                }
            }
        }
    }
    let el = t0.elapsed().as_secs_f64();
    report(
        3,
        lambda_mismatches == 0 && worst_rel <= 1e-12 && invalid == 0 && el < 5.0,
        &format!(
            "100 tuples: lambda* exact, worst delta rel err {worst_rel:.2e} <= 1e-12; \
             24-cell calibration grid all valid ({invalid} invalid); {el:.2}s < 5s"
        ),
    );
}

#[test]
fn a04_noise_norm_threshold_exceedance_within_budget() {
    let _g = gate();
    let t0 = Instant::now();
    let trials = 100_000usize;
    let threshold = noise_norm_threshold(1.0, 16, 0.05).unwrap();
    let mut rng = RngState::new(4);
    let mut exceed = 0usize;
    for _ in 0..trials {
        if sample_gaussian(16, 1.0, &mut rng).unwrap().norm() > threshold {
            exceed += 1;
        }
    }
    let rate = exceed as f64 / trials as f64;
    let budget = 0.05 + 3.0 * (0.05 * 0.95 / trials as f64).sqrt();
    let el = t0.elapsed().as_secs_f64();
    report(
        4,
        rate <= budget && el < 5.0,
        &format!("exceedance {rate:.5} <= {budget:.5} over 10^5 draws, {el:.2}s < 5s"),
    );
}

/// Shared sweep driver for A05/A06: per size, derives the dataset and
/// sampling streams exactly like the stability command, measures the max
/// coupled-run distance over 50 adjacent pairs, and returns fitted log-log
/// slopes of the measured max and of the per-sample theoretical bound.
fn stability_slope(ns: &[usize], steps_for: impl Fn(usize) -> usize, private: bool) -> (f64, f64) {
    let inst = benchmark();
    let schedule = Schedule::new(inst.rho, 0.0).unwrap();
    let params = GammaParams { num_indices: 50, num_replacements: 1, zeta: 0.1, tol: 1e-8 };
    let budget = PrivacyBudget::new(1.0, 1e-5).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ys_theory = Vec::new();
    for &n in ns {
        let steps = steps_for(n);
        let plan = if private {
            let plan =
                calibrate_sigma(inst.lipschitz, steps, n, &budget, DEFAULT_CALIBRATION_C)
                    .unwrap();
            assert!(plan.valid, "calibrated plan must verify at n={n}");
            Some(plan)
        } else {
            None
        };
        let mut cell = RngState::new(7).derive(0x737461).derive(n as u64);
        let data_seed = cell.next_u64();
        let data = gen_dataset(&inst, n, data_seed).unwrap();
        let report =
            empirical_gamma(&inst, &data, steps, &schedule, plan.as_ref(), &params, &cell)
                .unwrap();
        assert_eq!(report.samples.len(), 50);
        xs.push((n as f64).ln());
        ys.push(report.max_distance.ln());
        ys_theory.push(report.theoretical_gamma.ln());
    }
    (
        least_squares_slope(&xs, &ys).unwrap(),
        least_squares_slope(&xs, &ys_theory).unwrap(),
    )
}

#[test]
fn a05_noiseless_stability_scales_inverse_in_n() {
    let _g = gate();
    let t0 = Instant::now();
    let (slope, _) = stability_slope(&[100, 200, 400, 800], |_| 1_000_000, false);
    let el = t0.elapsed().as_secs_f64();
    report(
        5,
        (-1.25..=-0.75).contains(&slope) && el < 300.0,
        &format!(
            "max coupled distance slope {slope:.3} in [-1.25,-0.75] at fixed T=10^6, \
             {el:.1}s < 300s"
        ),
    );
}

#[test]
fn a06_private_stability_scaling_window() {
    let _g = gate();
    let t0 = Instant::now();
    let (slope, theory_slope) = stability_slope(
        &[400, 1_600, 6_400],
        |n| floor_two_thirds(n as u64) as usize,
        true,
    );
    let el = t0.elapsed().as_secs_f64();
    report(
        6,
        (-0.75..=-0.25).contains(&slope) && el < 900.0,
        &format!(
            "measured max coupled distance slope {slope:.3} vs window [-0.75,-0.25] \
             (theoretical bound slope {theory_slope:.3} does sit in the window), {el:.1}s < \
             900s. Known red: with common random numbers the shared noise enters both \
             projection arguments identically and cancels in the coupled difference, so the \
             measurement keeps the noiseless 1/n scaling for every sigma; the n^(-1/2) window \
             describes the worst-case bound's rate, not the coupled measurement's"
        ),
    );
}

#[test]
fn a07_stability_bound_containment() {
    let _g = gate();
    let t0 = Instant::now();
    let inst = benchmark();
    let schedule = Schedule::new(inst.rho, 0.0).unwrap();
    let n = 1_000usize;
    let steps = floor_two_thirds(n as u64) as usize;
    let budget = PrivacyBudget::new(1.0, 1e-5).unwrap();
    let plan = calibrate_sigma(inst.lipschitz, steps, n, &budget, DEFAULT_CALIBRATION_C).unwrap();
    let params = GammaParams { num_indices: 50, num_replacements: 4, zeta: 0.1, tol: 1e-8 };
    let mut cell = RngState::new(11).derive(0x737461).derive(n as u64);
    let data_seed = cell.next_u64();
    let data = gen_dataset(&inst, n, data_seed).unwrap();
    let report_s =
        empirical_gamma(&inst, &data, steps, &schedule, Some(&plan), &params, &cell).unwrap();
    let el = t0.elapsed().as_secs_f64();
    report(
        7,
        report_s.samples.len() == 200 && report_s.containment_rate >= 0.87,
        &format!(
            "containment {:.3} >= 0.87 over {} coupled distances at zeta=0.1, {el:.1}s",
            report_s.containment_rate,
            report_s.samples.len()
        ),
    );
}

#[test]
fn a08_plain_generalization_containment_over_replicates() {
    let _g = gate();
    let t0 = Instant::now();
    let inst = benchmark();
    let schedule = Schedule::new(inst.rho, 0.0).unwrap();
    let n = 1_000usize;
    let steps = floor_two_thirds(n as u64) as usize;
    let budget = PrivacyBudget::new(1.0, 1e-5).unwrap();
    let plan = calibrate_sigma(inst.lipschitz, steps, n, &budget, DEFAULT_CALIBRATION_C).unwrap();
    let eval = eval_set(&inst, 100_000, 0).unwrap();
    let prep_eval = prepare(&inst, &eval).unwrap();
    let (zeta, iota) = (0.1, 0.5);
    let root = RngState::new(8).derive(0x6765);
    let replicates = 64usize;
    let mut exceed = 0usize;
    for r in 0..replicates {
        let mut cell = root.derive(r as u64);
        let data_seed = cell.next_u64();
        let data = gen_dataset(&inst, n, data_seed).unwrap();
        let prep = prepare(&inst, &data).unwrap();
        let traj =
            run_prepared(&inst, &prep, steps, &schedule, Some(&plan), &mut cell, false).unwrap();
        let emp = prepared_loss(&inst, &prep, &traj.avg_w, &traj.avg_v).unwrap();
        let pop = prepared_loss(&inst, &prep_eval, &traj.avg_w, &traj.avg_v).unwrap();
        let (gap_w, gap_v) = g_distances_prepared(&inst, &prep, &traj, 1e-8, DEFAULT_INNER_CAP)
            .unwrap();
        let gamma = argument_stability_bound(
            inst.lipschitz,
            inst.rho,
            plan.sigma,
            steps as u64,
            n as u64,
            inst.dim_p() as u64,
            zeta,
            gap_w,
            gap_v,
        )
        .unwrap();
        let rhs =
            plain_generalization_bound(gamma, inst.lipschitz, inst.loss_bound, n as u64, iota,
                zeta)
            .unwrap();
        // The bound controls L - L_S/(1-iota).
        if pop - emp / (1.0 - iota) > rhs {
            exceed += 1;
        }
    }
    let frac = exceed as f64 / replicates as f64;
    let budget_frac = zeta + 3.0 * (zeta * (1.0 - zeta) / replicates as f64).sqrt();
    let el = t0.elapsed().as_secs_f64();
    report(
        8,
        frac <= budget_frac && el < 1_200.0,
        &format!(
            "exceedance {frac:.3} <= {budget_frac:.3} over 64 replicates at n=1000, \
             {el:.1}s < 1200s"
        ),
    );
}

#[test]
fn a09_risk_definitions_are_consistent() {
    let _g = gate();
    let inst = benchmark();
    let schedule = Schedule::new(inst.rho, 0.0).unwrap();
    let tol = 1e-8;
    let n = 300usize;
    let steps = 44usize;
    let budget = PrivacyBudget::new(1.0, 1e-5).unwrap();
    let plan = calibrate_sigma(inst.lipschitz, steps, n, &budget, DEFAULT_CALIBRATION_C).unwrap();
    let eval = eval_set(&inst, 5_000, 3).unwrap();

    let mut pairs = Vec::new();
    let mut strong_gaps = Vec::new();
    let mut min_gap = f64::INFINITY;
    let root = RngState::new(9).derive(0x7269);
    for r in 0..8u64 {
        let mut cell = root.derive(r);
        let data_seed = cell.next_u64();
        let data = gen_dataset(&inst, n, data_seed).unwrap();
        let traj = run(&inst, &data, steps, &schedule, Some(&plan), &mut cell, false).unwrap();
        let on_train = strong_pd(&inst, &traj.avg_w, &traj.avg_v, &data, tol).unwrap();
        let on_eval = strong_pd(&inst, &traj.avg_w, &traj.avg_v, &eval, tol).unwrap();
        min_gap = min_gap.min(on_train).min(on_eval);
        strong_gaps.push(on_eval);
        pairs.push((traj.avg_w, traj.avg_v));
    }
    let weak = weak_pd(&inst, &pairs, &eval, tol).unwrap();
    let mean_strong = strong_gaps.iter().sum::<f64>() / strong_gaps.len() as f64;

    let data = gen_dataset(&inst, 200, 42).unwrap();
    let (w_star, v_star) = closed_form_saddle(&inst, &data).unwrap();
    let saddle_gap = strong_pd(&inst, &w_star, &v_star, &data, tol).unwrap();

    let pass = weak <= mean_strong + 4.0 * tol && min_gap >= -2.0 * tol
        && saddle_gap.abs() <= 2.0 * tol;
    report(
        9,
        pass,
        &format!(
            "weak {weak:.4e} <= mean strong {mean_strong:.4e} + 4tol; min gap {min_gap:.1e} >= \
             -2tol; saddle gap {saddle_gap:.1e} within 2tol"
        ),
    );
}

/// Third, independent transcriptions of the ten closed-form evaluators,
/// written with different factoring and evaluation order.
mod third {
    use std::f64::consts::{E, SQRT_2};

    pub fn tail(t: f64, p: f64, zeta: f64, streams: f64) -> f64 {
        1.0 + ((8.0 / p) * (streams * t / zeta).ln()).powf(0.25)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn stability(
        g: f64,
        rho: f64,
        sigma: f64,
        t: f64,
        n: f64,
        p: f64,
        zeta: f64,
        gw: f64,
        gv: f64,
    ) -> f64 {
        let pz = tail(t, p, zeta, 2.0);
        let le = 1.0 + t.ln();
        let noise = sigma * p.sqrt() * pz;
        let radicand =
            (g * g + noise * noise + 2.0 * g * noise) * (le / (rho * rho * t))
                + (gw + gv) * noise / rho;
        g / n * (4.0 / rho) + noise / t * (2.0 * le) + radicand.sqrt() * 4.0
    }

    pub fn response_gap(
        g: f64,
        rho: f64,
        sigma: f64,
        t: f64,
        p: f64,
        radius: f64,
        zeta: f64,
    ) -> f64 {
        let pz = tail(t, p, zeta, 1.0);
        let le = 1.0 + t.ln();
        let noise = sigma * p.sqrt() * pz;
        (le * (g * g / (rho * rho) / t
            + (g * noise / t + radius * noise / le) * (2.0 / rho)
            + noise * noise / (rho * t)))
            .sqrt()
    }

    #[allow(clippy::too_many_arguments)]
    pub fn empirical_gap(
        g: f64,
        rho: f64,
        sigma: f64,
        t: f64,
        p: f64,
        zeta: f64,
        gw: f64,
        gv: f64,
    ) -> f64 {
        let pz = tail(t, p, zeta, 2.0);
        let le = 1.0 + t.ln();
        let noise = sigma * p.sqrt() * pz;
        (g + noise) * (g + noise) * le / (rho * t) + (gw + gv) * noise
    }

    pub fn plain(gamma: f64, g: f64, m: f64, n: f64, iota: f64, zeta: f64) -> f64 {
        let l3 = (3.0 / zeta).ln();
        let one = 1.0 - iota;
        g * gamma / one * (l3 * (1.0 + 64.0 * n * l3) / (2.0 * n)).sqrt()
            + g * gamma / one * (50.0 * SQRT_2 * E) * n.ln().ceil() * (1.0 + l3)
            + m / n * l3 / iota / one * (4.0 + 2.0 * iota / 3.0)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn primal(
        gamma: f64,
        g: f64,
        l: f64,
        rho: f64,
        m: f64,
        n: f64,
        iota: f64,
        zeta: f64,
    ) -> f64 {
        let l3 = (3.0 / zeta).ln();
        let one = 1.0 - iota;
        let k = (rho + l) / rho;
        k * g * gamma / one * (l3 * (1.0 + 64.0 * n * l3) / (2.0 * n)).sqrt()
            + k * g * gamma / one * (50.0 * SQRT_2) * n.ln().ceil() * (1.0 + l3)
            + m / n * l3 / iota / one * (4.0 + 2.0 * iota / 3.0)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn excess(
        gamma: f64,
        g: f64,
        l: f64,
        rho: f64,
        m: f64,
        n: f64,
        iota: f64,
        zeta: f64,
        gap: f64,
    ) -> f64 {
        let l6 = (6.0 / zeta).ln();
        let one = 1.0 - iota;
        let k = (rho + l) / rho;
        let root = (l6 * (1.0 + 64.0 * n * l6) / (2.0 * n)).sqrt();
        (k + 1.0) * g * gamma / one * root
            + (1.0 + E + l / rho) * g * gamma / one * (50.0 * SQRT_2) * n.ln().ceil()
                * (1.0 + l6)
            + m / n * l6 / iota / one * (8.0 + 4.0 * iota / 3.0)
            + gap / one
    }

    #[allow(clippy::too_many_arguments)]
    pub fn pd_lead(
        gamma: f64,
        g: f64,
        l: f64,
        rho: f64,
        m: f64,
        n: f64,
        iota: f64,
        zeta: f64,
    ) -> f64 {
        let le = (E / zeta).ln();
        let scale = E * (1.0 + iota) / (1.0 - iota) * le;
        let k = (rho + l) / rho;
        scale * (100.0 * SQRT_2 * k * g * gamma * n.ln().ceil())
            + scale * (144.0 * g * g / rho / iota + 8.0 * m) / n
    }

    pub fn pd_trail(iota: f64, zeta: f64) -> f64 {
        E * iota * (E / zeta).ln() / (1.0 - iota)
    }
}

#[test]
fn a10_evaluators_match_independent_transcription() {
    let _g = gate();
    let mut lcg = Lcg(0xD0B1E);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let g = lcg.in_range(0.5, 8.0);
        let rho = lcg.in_range(0.2, 2.0);
        let sigma = lcg.in_range(0.0, 3.0);
        let t = 1 + (lcg.next() * 10_000.0) as u64;
        let n = 20 + (lcg.next() * 100_000.0) as u64;
        let p = 1 + (lcg.next() * 64.0) as u64;
        let zeta = lcg.in_range(0.01, 0.9);
        let radius = lcg.in_range(0.5, 5.0);
        let (gw, gv) = (lcg.in_range(0.0, 2.0), lcg.in_range(0.0, 2.0));
        let gamma = lcg.in_range(0.0, 2.0);
        let l = lcg.in_range(0.5, 4.0);
        let m = lcg.in_range(1.0, 40.0);
        let iota = lcg.in_range(0.05, 0.95);
        let gap = lcg.in_range(0.0, 2.0);
        let gap_mean = lcg.in_range(0.0, 2.0);
        let (tf, nf, pf) = (t as f64, n as f64, p as f64);

        let pairs = [
            (
                argument_stability_bound(g, rho, sigma, t, n, p, zeta, gw, gv).unwrap(),
                third::stability(g, rho, sigma, tf, nf, pf, zeta, gw, gv),
            ),
            (
                best_response_gap_bound(g, rho, sigma, t, p, radius, zeta).unwrap(),
                third::response_gap(g, rho, sigma, tf, pf, radius, zeta),
            ),
            (
                strong_pd_empirical_bound(g, rho, sigma, t, p, zeta, gw, gv).unwrap(),
                third::empirical_gap(g, rho, sigma, tf, pf, zeta, gw, gv),
            ),
            (
                plain_generalization_bound(gamma, g, m, n, iota, zeta).unwrap(),
                third::plain(gamma, g, m, nf, iota, zeta),
            ),
            (
                primal_generalization_bound(gamma, g, l, rho, m, n, iota, zeta).unwrap(),
                third::primal(gamma, g, l, rho, m, nf, iota, zeta),
            ),
            (
                primal_excess_risk_bound(gamma, g, l, rho, m, n, iota, zeta, gap).unwrap(),
                third::excess(gamma, g, l, rho, m, nf, iota, zeta, gap),
            ),
            (
                strong_pd_population_bound(gamma, g, l, rho, m, n, iota, zeta, gap, gap_mean)
                    .unwrap(),
                third::pd_lead(gamma, g, l, rho, m, nf, iota, zeta)
                    + third::pd_trail(iota, zeta) * gap_mean
                    + gap,
            ),
            (
                strong_pd_generalization_bound(gamma, g, l, rho, m, n, iota, zeta, gap_mean)
                    .unwrap(),
                third::pd_lead(gamma, g, l, rho, m, nf, iota, zeta)
                    + third::pd_trail(iota, zeta) * gap_mean,
            ),
            (
                weak_pd_population_bound(gamma, g, l, rho, m, n, iota, zeta, gap).unwrap(),
                third::pd_lead(gamma, g, l, rho, m, nf, iota, zeta)
                    + (third::pd_trail(iota, zeta) + 1.0) * gap,
            ),
            (
                weak_pd_generalization_bound(gamma, g, l, rho, m, n, iota, zeta, gap).unwrap(),
                third::pd_lead(gamma, g, l, rho, m, nf, iota, zeta)
                    + (third::pd_trail(iota, zeta) + 2.0) * gap,
            ),
        ];
        for (a, b) in pairs {
            worst = worst.max(rel_err(a, b));
        }
    }
    report(
        10,
        worst <= 1e-12,
        &format!("10 evaluators x 50 inputs, worst relative deviation {worst:.2e} <= 1e-12"),
    );
}

#[test]
fn a11_full_pipeline_runs_are_byte_identical() {
    let _g = gate();
    let config_json = r#"{
        "n_list": [100],
        "t_rule": {"kind": "fixed", "steps": 40},
        "epsilon": 2.0,
        "delta": 1e-5,
        "replicates": 3,
        "n_eval": 2000,
        "num_indices": 4,
        "num_replacements": 2,
        "noise_trials": 5000,
        "noise_dim": 8,
        "seed": 123
    }"#;
    let base = tempfile::tempdir().unwrap();
    let config_path = base.path().join("config.json");
    std::fs::write(&config_path, config_json).unwrap();

    let run_pipeline = |out: &std::path::Path| {
        for sub in ["calibrate", "run", "stability", "generalization", "noise-check"] {
            let output = std::process::Command::new(env!("CARGO_BIN_EXE_dpminimax"))
                .args([
                    sub,
                    "--config",
                    config_path.to_str().unwrap(),
                    "--out",
                    out.to_str().unwrap(),
                ])
                .output()
                .unwrap();
            assert!(
                output.status.success(),
                "{sub} failed: {}",
                String::from_utf8_lossy(&output.stderr)
            );
        }
    };
    let dir_a = base.path().join("a");
    let dir_b = base.path().join("b");
    run_pipeline(&dir_a);
    run_pipeline(&dir_b);

    let mut names: Vec<String> = std::fs::read_dir(&dir_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let expected = [
        "calibration.csv",
        "generalization.csv",
        "noise_check.csv",
        "risk_report.csv",
        "stability_n100.csv",
        "stability_summary.csv",
        "trajectory.csv",
    ];
    let mut identical = true;
    for name in &names {
        let a = std::fs::read(dir_a.join(name)).unwrap();
        let b = std::fs::read(dir_b.join(name)).unwrap();
        identical &= a == b;
    }
    report(
        11,
        names == expected && identical,
        &format!("{} output files byte-identical across repeated pipeline runs", names.len()),
    );
}
