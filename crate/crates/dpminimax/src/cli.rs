//! Configuration-driven experiment runner.
//!
//! A single JSON [`ExperimentConfig`] drives six commands: `calibrate`
//! (noise calibration table), `run` (one training run with trajectory and
//! risk report), `stability` (coupled-run stability sweep),
//! `generalization` (risk/bound sweep over `n` and replicates),
//! `noise-check` (Gaussian norm-concentration validation), and `bounds`
//! (evaluate one named closed-form bound).
//!
//! Contract highlights:
//!
//! * every config field is validated before any run starts, and unknown
//!   keys are rejected; validation errors name the offending key and its
//!   constraint;
//! * outputs are CSV files under the chosen output directory, comma
//!   separated, `.` decimal, 17 significant digits, first line
//!   `# schema=<name>@<version>`; progress goes to standard error only;
//! * identical configs produce byte-identical outputs regardless of the
//!   worker count: every sweep cell derives its own generator stream from
//!   the config seed and rows are emitted in a fixed order;
//! * sweep errors flush the rows computed before the failing cell, then
//!   propagate.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    argument_stability_bound, evaluate_named, plain_generalization_bound,
    primal_generalization_bound, strong_pd_population_bound, weak_pd_population_bound,
    BoundInputs,
};
use crate::error::{Error, Result};
use crate::numerics::{floor_two_thirds, noise_norm_threshold, sample_gaussian, RngState};
use crate::optimizer::{run, run_prepared, Schedule};
use crate::privacy::{calibrate_sigma, NoisePlan, PrivacyBudget, DEFAULT_CALIBRATION_C};
use crate::problem::{
    eval_set, gen_dataset, make_auc_instance, make_quadratic_saddle, prepare, prepared_loss,
    AucSpec, ProblemInstance, QuadraticSaddleSpec,
};
use crate::risk::{
    g_distances_prepared, inner_max_prepared, inner_min_prepared, risk_report, weak_pd,
    DEFAULT_INNER_CAP,
};
use crate::stability::{empirical_gamma, GammaParams};

use rayon::prelude::*;

/// Stream labels separating the commands' derived generators.
const GENERALIZATION_STREAM: u64 = 0x67656e;
const STABILITY_STREAM: u64 = 0x737461;
const RUN_STREAM: u64 = 0x72756e;
const NOISE_CHECK_STREAM: u64 = 0x6e6f63;

// ===== Configuration =====

/// Which loss family to instantiate, with generator parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceConfig {
    /// Coupled quadratic with identity targets and cyclic coupling.
    Quadratic {
        #[serde(default = "default_p")]
        p: usize,
        #[serde(default = "default_one")]
        rho: f64,
        #[serde(default = "default_coupling")]
        coupling: f64,
        #[serde(default = "default_one")]
        data_radius: f64,
    },
    /// AUC surrogate with sampled constants.
    Auc {
        #[serde(default = "default_q")]
        q: f64,
        #[serde(default = "default_one")]
        rho: f64,
        #[serde(default = "default_feature_dim")]
        feature_dim: usize,
        #[serde(default = "default_one")]
        radius_primal: f64,
        #[serde(default = "default_one")]
        radius_dual: f64,
        #[serde(default = "default_one")]
        data_radius: f64,
        #[serde(default = "default_estimation_samples")]
        estimation_samples: usize,
        #[serde(default)]
        seed: u64,
    },
}

impl InstanceConfig {
    /// Builds the instance, running constant certification/estimation.
    pub fn build(&self) -> Result<ProblemInstance> {
        match self {
            InstanceConfig::Quadratic { p, rho, coupling, data_radius } => {
                if *p == 0 {
                    return Err(Error::Config("instance.p: must be >= 1, got 0".into()));
                }
                make_quadratic_saddle(&QuadraticSaddleSpec::cyclic(
                    *p,
                    *rho,
                    *coupling,
                    *data_radius,
                ))
            }
            InstanceConfig::Auc {
                q,
                rho,
                feature_dim,
                radius_primal,
                radius_dual,
                data_radius,
                estimation_samples,
                seed,
            } => make_auc_instance(&AucSpec {
                q: *q,
                rho: *rho,
                feature_dim: *feature_dim,
                radius_primal: *radius_primal,
                radius_dual: *radius_dual,
                data_radius: *data_radius,
                estimation_samples: *estimation_samples,
                seed: *seed,
            }),
        }
    }
}

/// How the step count is chosen for each training-set size.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TRule {
    /// The same step count for every `n`.
    Fixed { steps: usize },
    /// `T = floor(n^(2/3))`, computed in exact integer arithmetic.
    TwoThirds,
}

impl TRule {
    pub fn steps_for(&self, n: usize) -> usize {
        match self {
            TRule::Fixed { steps } => *steps,
            TRule::TwoThirds => floor_two_thirds(n as u64) as usize,
        }
    }
}

/// The `bounds` command payload: which evaluator to run and its inputs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub name: String,
    pub inputs: BoundInputs,
}

fn default_instance() -> InstanceConfig {
    InstanceConfig::Quadratic {
        p: default_p(),
        rho: default_one(),
        coupling: default_coupling(),
        data_radius: default_one(),
    }
}
fn default_n_list() -> Vec<usize> {
    vec![1000]
}
fn default_t_rule() -> TRule {
    TRule::TwoThirds
}
fn default_p() -> usize {
    8
}
fn default_one() -> f64 {
    1.0
}
fn default_coupling() -> f64 {
    0.5
}
fn default_q() -> f64 {
    0.5
}
fn default_feature_dim() -> usize {
    5
}
fn default_estimation_samples() -> usize {
    1_000_000
}
fn default_epsilon() -> f64 {
    1.0
}
fn default_delta() -> f64 {
    1e-5
}
fn default_calibration_c() -> f64 {
    DEFAULT_CALIBRATION_C
}
fn default_replicates() -> usize {
    1
}
fn default_zeta() -> f64 {
    0.1
}
fn default_iota() -> f64 {
    0.5
}
fn default_tol() -> f64 {
    1e-8
}
fn default_n_eval() -> usize {
    100_000
}
fn default_private() -> bool {
    true
}
fn default_num_indices() -> usize {
    8
}
fn default_num_replacements() -> usize {
    4
}
fn default_noise_trials() -> usize {
    100_000
}
fn default_noise_dim() -> usize {
    16
}

/// Full experiment configuration. Every field has a default, so `{}` is a
/// valid document; unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_instance")]
    pub instance: InstanceConfig,
    /// Training-set sizes to sweep.
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    #[serde(default = "default_t_rule")]
    pub t_rule: TRule,
    /// Privacy budget.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Calibration constant for the noise scale.
    #[serde(default = "default_calibration_c")]
    pub calibration_c: f64,
    /// Independently trained replicates per sweep point.
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Root seed; every sweep cell derives its own streams from it.
    #[serde(default)]
    pub seed: u64,
    /// Confidence parameter for bound evaluations.
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    /// Left-side trade-off parameter for the generalization bounds.
    #[serde(default = "default_iota")]
    pub iota: f64,
    /// Inner-solver residual tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Evaluation-sample size for population estimates.
    #[serde(default = "default_n_eval")]
    pub n_eval: usize,
    /// Train with calibrated noise (`true`) or noiselessly (`false`).
    #[serde(default = "default_private")]
    pub private: bool,
    /// Step-size shift: `eta_t = 1/(rho (t + phi))`.
    #[serde(default)]
    pub phi: f64,
    /// Stability estimator: distinct indices to perturb.
    #[serde(default = "default_num_indices")]
    pub num_indices: usize,
    /// Stability estimator: replacements per index.
    #[serde(default = "default_num_replacements")]
    pub num_replacements: usize,
    /// Noise-check: number of Gaussian draws.
    #[serde(default = "default_noise_trials")]
    pub noise_trials: usize,
    /// Noise-check: vector dimension.
    #[serde(default = "default_noise_dim")]
    pub noise_dim: usize,
    /// Noise-check: Gaussian scale.
    #[serde(default = "default_one")]
    pub noise_sigma: f64,
    /// Worker-thread count (lowest-precedence source; the `--workers` flag
    /// and `DPMINIMAX_WORKERS` both override it).
    #[serde(default)]
    pub workers: Option<usize>,
    /// Payload for the `bounds` command.
    #[serde(default)]
    pub bound: Option<BoundsConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        parse_config("{}").expect("empty config is valid")
    }
}

impl ExperimentConfig {
    /// Echo of the fully-populated config; parsing it back yields an equal
    /// config.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization is total")
    }

    /// Checks every domain constraint, naming the key and constraint on
    /// failure.
    pub fn validate(&self) -> Result<()> {
        fn unit_open(value: f64, key: &str) -> Result<()> {
            if !value.is_finite() || value <= 0.0 || value >= 1.0 {
                return Err(Error::Config(format!("{key}: must lie in (0,1), got {value}")));
            }
            Ok(())
        }
        fn positive(value: f64, key: &str) -> Result<()> {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::Config(format!(
                    "{key}: must be finite and > 0, got {value}"
                )));
            }
            Ok(())
        }
        if self.n_list.is_empty() {
            return Err(Error::Config("n_list: must be non-empty".into()));
        }
        for &n in &self.n_list {
            if n == 0 {
                return Err(Error::Config("n_list: entries must be >= 1, got 0".into()));
            }
        }
        if let TRule::Fixed { steps } = self.t_rule {
            if steps == 0 {
                return Err(Error::Config("t_rule.steps: must be >= 1, got 0".into()));
            }
        }
        positive(self.epsilon, "epsilon")?;
        unit_open(self.delta, "delta")?;
        positive(self.calibration_c, "calibration_c")?;
        unit_open(self.zeta, "zeta")?;
        unit_open(self.iota, "iota")?;
        positive(self.tol, "tol")?;
        positive(self.noise_sigma, "noise_sigma")?;
        if !self.phi.is_finite() || self.phi < 0.0 {
            return Err(Error::Config(format!(
                "phi: must be finite and >= 0, got {}",
                self.phi
            )));
        }
        for (value, key) in [
            (self.replicates, "replicates"),
            (self.n_eval, "n_eval"),
            (self.num_indices, "num_indices"),
            (self.num_replacements, "num_replacements"),
            (self.noise_trials, "noise_trials"),
            (self.noise_dim, "noise_dim"),
        ] {
            if value == 0 {
                return Err(Error::Config(format!("{key}: must be >= 1, got 0")));
            }
        }
        if let Some(workers) = self.workers {
            if workers == 0 {
                return Err(Error::Config("workers: must be >= 1, got 0".into()));
            }
        }
        Ok(())
    }
}

/// Parses and validates a JSON config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = serde_json::from_str(text)?;
    config.validate()?;
    Ok(config)
}

/// Resolves the worker count: `--workers` flag, then the
/// `DPMINIMAX_WORKERS` environment value, then the config field. `None`
/// leaves the thread pool at its default size.
pub fn resolve_workers(
    flag: Option<usize>,
    env_value: Option<&str>,
    config: Option<usize>,
) -> Result<Option<usize>> {
    if let Some(k) = flag {
        if k == 0 {
            return Err(Error::Config("workers: must be >= 1, got 0".into()));
        }
        return Ok(Some(k));
    }
    if let Some(raw) = env_value {
        let k: usize = raw.trim().parse().map_err(|_| {
            Error::Config(format!(
                "DPMINIMAX_WORKERS: must be a positive integer, got '{raw}'"
            ))
        })?;
        if k == 0 {
            return Err(Error::Config("DPMINIMAX_WORKERS: must be >= 1, got 0".into()));
        }
        return Ok(Some(k));
    }
    Ok(config)
}

/// Process exit code for an error: 2 for configuration/input problems,
/// 3 for numerical non-convergence, 4 for privacy-verification failure.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NonConverged { .. } => 3,
        Error::PrivacyVerification(_) => 4,
        _ => 2,
    }
}

/// Runs `body` on a local thread pool of the given size, or on the global
/// pool when `workers` is `None`. Outputs are byte-identical either way;
/// the pool only changes scheduling.
pub fn with_worker_pool<F, T>(workers: Option<usize>, body: F) -> Result<T>
where
    F: FnOnce() -> Result<T> + Send,
    T: Send,
{
    match workers {
        None => body(),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Config(format!("workers: cannot build pool: {e}")))?;
            pool.install(body)
        }
    }
}

// ===== Output helpers =====

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Open a CSV file under `out`, writing the schema comment and header.
fn open_csv(out: &Path, name: &str, schema: &str, header: &str) -> Result<fs::File> {
    fs::create_dir_all(out)?;
    let mut file = fs::File::create(out.join(name))?;
    writeln!(file, "# schema={schema}")?;
    writeln!(file, "{header}")?;
    Ok(file)
}

fn append_rows(file: &mut fs::File, rows: &[String]) -> Result<()> {
    for row in rows {
        writeln!(file, "{row}")?;
    }
    file.flush()?;
    Ok(())
}

/// Calibrates the noise plan for one sweep point, if privacy is on.
fn plan_for(
    config: &ExperimentConfig,
    inst: &ProblemInstance,
    n: usize,
    steps: usize,
) -> Result<Option<NoisePlan>> {
    if !config.private {
        return Ok(None);
    }
    let budget = PrivacyBudget::new(config.epsilon, config.delta)?;
    let plan = calibrate_sigma(inst.lipschitz, steps, n, &budget, config.calibration_c)?;
    if !plan.valid {
        return Err(Error::PrivacyVerification(format!(
            "calibrated sigma {} fails verification at n={n}, T={steps}: achieved delta {:?} \
             exceeds {}",
            plan.sigma, plan.achieved_delta, config.delta
        )));
    }
    Ok(Some(plan))
}

// ===== calibrate =====

/// Writes `calibration.csv` (one row per `n`) and returns a human-readable
/// summary. Fails with a privacy-verification error if any calibrated plan
/// misses its budget.
pub fn cmd_calibrate(config: &ExperimentConfig, out: &Path) -> Result<String> {
    let inst = config.instance.build()?;
    let budget = PrivacyBudget::new(config.epsilon, config.delta)?;
    let mut file = open_csv(
        out,
        "calibration.csv",
        "calibration@1",
        "n,steps,epsilon,delta,c,sigma,achieved_delta,lambda_star,valid",
    )?;
    let mut text = String::new();
    let mut failed = Vec::new();
    for &n in &config.n_list {
        let steps = config.t_rule.steps_for(n);
        let plan = calibrate_sigma(inst.lipschitz, steps, n, &budget, config.calibration_c)?;
        let achieved = plan.achieved_delta.unwrap_or(f64::NAN);
        let lambda = plan.lambda_star.map_or(0, |l| l);
        append_rows(
            &mut file,
            &[format!(
                "{n},{steps},{},{},{},{},{},{lambda},{}",
                fmt_f(plan.epsilon),
                fmt_f(plan.delta),
                fmt_f(plan.c),
                fmt_f(plan.sigma),
                fmt_f(achieved),
                plan.valid
            )],
        )?;
        text.push_str(&format!(
            "n={n} T={steps}: sigma={:.6} achieved_delta={:.3e} lambda*={lambda} valid={}\n",
            plan.sigma, achieved, plan.valid
        ));
        if !plan.valid {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        return Err(Error::PrivacyVerification(format!(
            "calibrated sigma fails budget verification at n in {failed:?}"
        )));
    }
    Ok(text)
}

// ===== run =====

/// Trains once on the first sweep size with iterate retention, writing
/// `trajectory.csv` and `risk_report.csv`.
pub fn cmd_run(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let inst = config.instance.build()?;
    let n = config.n_list[0];
    let steps = config.t_rule.steps_for(n);
    let plan = plan_for(config, &inst, n, steps)?;
    let schedule = Schedule::new(inst.rho, config.phi)?;
    let mut cell = RngState::new(config.seed).derive(RUN_STREAM);
    let data_seed = cell.next_u64();
    let data = gen_dataset(&inst, n, data_seed)?;
    eprintln!("[run] n={n} T={steps} sigma={}", plan.as_ref().map_or(0.0, |p| p.sigma));
    let traj = run(&inst, &data, steps, &schedule, plan.as_ref(), &mut cell, true)?;
    let eval = eval_set(&inst, config.n_eval, config.seed)?;
    let report = risk_report(
        &inst,
        &[(traj.avg_w.clone(), traj.avg_v.clone())],
        &data,
        &eval,
        config.tol,
    )?;
    fs::create_dir_all(out)?;
    fs::write(out.join("trajectory.csv"), traj.to_csv()?)?;
    fs::write(out.join("risk_report.csv"), report.to_csv())?;
    Ok(())
}

// ===== stability =====

/// Sweeps the coupled stability estimator over `n_list`, writing one
/// samples file per `n` plus `stability_summary.csv`.
pub fn cmd_stability(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let inst = config.instance.build()?;
    let schedule = Schedule::new(inst.rho, config.phi)?;
    let params = GammaParams {
        num_indices: config.num_indices,
        num_replacements: config.num_replacements,
        zeta: config.zeta,
        tol: config.tol,
    };
    let mut summary = open_csv(
        out,
        "stability_summary.csv",
        "stability_summary@1",
        "n,steps,sigma,samples,max_distance,q50_distance,q90_distance,theoretical_gamma,\
         containment_rate",
    )?;
    for &n in &config.n_list {
        let steps = config.t_rule.steps_for(n);
        let plan = plan_for(config, &inst, n, steps)?;
        let mut cell = RngState::new(config.seed).derive(STABILITY_STREAM).derive(n as u64);
        let data_seed = cell.next_u64();
        let data = gen_dataset(&inst, n, data_seed)?;
        let report =
            empirical_gamma(&inst, &data, steps, &schedule, plan.as_ref(), &params, &cell)?;
        fs::write(out.join(format!("stability_n{n}.csv")), report.to_csv())?;
        append_rows(
            &mut summary,
            &[format!(
                "{n},{steps},{},{},{},{},{},{},{}",
                fmt_f(report.sigma),
                report.samples.len(),
                fmt_f(report.max_distance),
                fmt_f(report.q50_distance),
                fmt_f(report.q90_distance),
                fmt_f(report.theoretical_gamma),
                fmt_f(report.containment_rate)
            )],
        )?;
        eprintln!(
            "[stability] n={n} T={steps}: max={:.3e} containment={:.2}",
            report.max_distance, report.containment_rate
        );
    }
    Ok(())
}

// ===== generalization =====

struct GenCell {
    replicate: usize,
    pair: (crate::numerics::Vector, crate::numerics::Vector),
    plain_gap: f64,
    primal_gap: f64,
    strong_emp: f64,
    strong_pop: f64,
    gamma_theoretical: f64,
}

/// Trains `replicates` runs per `n`, measuring the four risks and the
/// matching closed-form bounds; one CSV row per `(n, replicate)` in
/// `generalization.csv`.
///
/// Per row: `plain_gap`/`primal_gap` are population-minus-empirical at the
/// trained pair, `strong_pd_pop` its population strong gap, and
/// `weak_pd_pop` the replicate-set weak gap on the evaluation sample
/// (shared by all rows of one `n`; with a single replicate it degenerates
/// to that row's strong gap). `gamma_theoretical` is the stability bound
/// evaluated with the run's measured best-response distances, and feeds
/// the four bound columns.
pub fn cmd_generalization(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let inst = config.instance.build()?;
    let schedule = Schedule::new(inst.rho, config.phi)?;
    let mut file = open_csv(
        out,
        "generalization.csv",
        "generalization@1",
        "n,T,sigma,replicate,plain_gap,primal_gap,strong_pd_pop,weak_pd_pop,bound_3a,bound_3b,\
         bound_3d,bound_c1b,gamma_theoretical",
    )?;
    let eval = eval_set(&inst, config.n_eval, config.seed)?;
    let prep_eval = prepare(&inst, &eval)?;
    let root = RngState::new(config.seed).derive(GENERALIZATION_STREAM);

    for &n in &config.n_list {
        let steps = config.t_rule.steps_for(n);
        let plan = plan_for(config, &inst, n, steps)?;
        let sigma = plan.as_ref().map_or(0.0, |p| p.sigma);
        let n_root = root.derive(n as u64);

        let cells: Vec<Result<GenCell>> = (0..config.replicates)
            .into_par_iter()
            .map(|r| -> Result<GenCell> {
                let mut cell = n_root.derive(r as u64);
                let data_seed = cell.next_u64();
                let data = gen_dataset(&inst, n, data_seed)?;
                let prep = prepare(&inst, &data)?;
                let traj =
                    run_prepared(&inst, &prep, steps, &schedule, plan.as_ref(), &mut cell, false)?;
                let (w, v) = (traj.avg_w.clone(), traj.avg_v.clone());

                let plain_emp = prepared_loss(&inst, &prep, &w, &v)?;
                let plain_pop = prepared_loss(&inst, &prep_eval, &w, &v)?;
                let cap = DEFAULT_INNER_CAP;
                let sup_emp = inner_max_prepared(&inst, &prep, &w, config.tol, cap, Some(&v))?;
                let sup_pop = inner_max_prepared(&inst, &prep_eval, &w, config.tol, cap, Some(&v))?;
                let inf_emp = inner_min_prepared(&inst, &prep, &v, config.tol, cap, Some(&w))?;
                let inf_pop = inner_min_prepared(&inst, &prep_eval, &v, config.tol, cap, Some(&w))?;
                let (g_w, g_v) = g_distances_prepared(&inst, &prep, &traj, config.tol, cap)?;
                let gamma_theoretical = argument_stability_bound(
                    inst.lipschitz,
                    inst.rho,
                    sigma,
                    steps as u64,
                    n as u64,
                    inst.dim_p() as u64,
                    config.zeta,
                    g_w,
                    g_v,
                )?;
                Ok(GenCell {
                    replicate: r,
                    pair: (w, v),
                    plain_gap: plain_pop - plain_emp,
                    primal_gap: sup_pop.value - sup_emp.value,
                    strong_emp: (sup_emp.value - inf_emp.value).max(0.0),
                    strong_pop: sup_pop.value - inf_pop.value,
                    gamma_theoretical,
                })
            })
            .collect();

        // Flush the deterministic prefix of successful rows, then fail.
        let mut done = Vec::new();
        let mut first_err = None;
        for cell in cells {
            match cell {
                Ok(c) if first_err.is_none() => done.push(c),
                Ok(_) => {}
                Err(e) if first_err.is_none() => first_err = Some(e),
                Err(_) => {}
            }
        }

        let weak_pop = if done.len() >= 2 {
            let pairs: Vec<_> = done.iter().map(|c| c.pair.clone()).collect();
            Some(weak_pd(&inst, &pairs, &eval, config.tol)?)
        } else {
            None
        };
        let strong_emp_mean = if done.is_empty() {
            0.0
        } else {
            done.iter().map(|c| c.strong_emp).sum::<f64>() / done.len() as f64
        };

        let mut rows = Vec::with_capacity(done.len());
        for c in &done {
            let bound_3a = plain_generalization_bound(
                c.gamma_theoretical,
                inst.lipschitz,
                inst.loss_bound,
                n as u64,
                config.iota,
                config.zeta,
            )?;
            let bound_3b = primal_generalization_bound(
                c.gamma_theoretical,
                inst.lipschitz,
                inst.smooth,
                inst.rho,
                inst.loss_bound,
                n as u64,
                config.iota,
                config.zeta,
            )?;
            let bound_3d = strong_pd_population_bound(
                c.gamma_theoretical,
                inst.lipschitz,
                inst.smooth,
                inst.rho,
                inst.loss_bound,
                n as u64,
                config.iota,
                config.zeta,
                c.strong_emp,
                strong_emp_mean,
            )?;
            let bound_c1b = weak_pd_population_bound(
                c.gamma_theoretical,
                inst.lipschitz,
                inst.smooth,
                inst.rho,
                inst.loss_bound,
                n as u64,
                config.iota,
                config.zeta,
                c.strong_emp,
            )?;
            rows.push(format!(
                "{n},{steps},{},{},{},{},{},{},{},{},{},{},{}",
                fmt_f(sigma),
                c.replicate,
                fmt_f(c.plain_gap),
                fmt_f(c.primal_gap),
                fmt_f(c.strong_pop),
                fmt_f(weak_pop.unwrap_or(c.strong_pop)),
                fmt_f(bound_3a),
                fmt_f(bound_3b),
                fmt_f(bound_3d),
                fmt_f(bound_c1b),
                fmt_f(c.gamma_theoretical)
            ));
        }
        append_rows(&mut file, &rows)?;
        if let Some(e) = first_err {
            return Err(e);
        }
        eprintln!("[generalization] n={n} T={steps}: {} replicates done", done.len());
    }
    Ok(())
}

// ===== noise-check =====

/// Draws `noise_trials` Gaussian vectors and checks the norm-concentration
/// threshold empirically; writes `noise_check.csv` with the exceedance rate
/// and its binomial budget `zeta + 3 sqrt(zeta (1-zeta) / trials)`.
pub fn cmd_noise_check(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let threshold = noise_norm_threshold(config.noise_sigma, config.noise_dim, config.zeta)?;
    let mut rng = RngState::new(config.seed).derive(NOISE_CHECK_STREAM);
    let mut exceedances = 0usize;
    for _ in 0..config.noise_trials {
        let draw = sample_gaussian(config.noise_dim, config.noise_sigma, &mut rng)?;
        if draw.norm() > threshold {
            exceedances += 1;
        }
    }
    let rate = exceedances as f64 / config.noise_trials as f64;
    let budget =
        config.zeta + 3.0 * (config.zeta * (1.0 - config.zeta) / config.noise_trials as f64).sqrt();
    let mut file = open_csv(
        out,
        "noise_check.csv",
        "noise_check@1",
        "sigma,dim,zeta,threshold,trials,exceedances,exceed_rate,rate_budget",
    )?;
    append_rows(
        &mut file,
        &[format!(
            "{},{},{},{},{},{exceedances},{},{}",
            fmt_f(config.noise_sigma),
            config.noise_dim,
            fmt_f(config.zeta),
            fmt_f(threshold),
            config.noise_trials,
            fmt_f(rate),
            fmt_f(budget)
        )],
    )?;
    eprintln!(
        "[noise-check] sigma={} p={} zeta={}: rate={rate:.4} budget={budget:.4}",
        config.noise_sigma, config.noise_dim, config.zeta
    );
    Ok(())
}

// ===== bounds =====

/// Evaluates the configured named bound, returning a one-line text result.
pub fn cmd_bounds(config: &ExperimentConfig) -> Result<String> {
    let bound = config.bound.as_ref().ok_or_else(|| {
        Error::Config("bound: section required for the bounds command".into())
    })?;
    let eval = evaluate_named(&bound.name, &bound.inputs)?;
    Ok(format!("{} = {:.16e}  (bounds {})\n", eval.name, eval.value, eval.left_side))
}
