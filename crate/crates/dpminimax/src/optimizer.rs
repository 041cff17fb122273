//! Projected gradient descent ascent with optional Gaussian perturbation.
//!
//! One [`gda_step`] performs the simultaneous update
//!
//! ```text
//! w' = Proj_W( w - eta (grad_w L_S(w, v) + b_w) )
//! v' = Proj_V( v + eta (grad_v L_S(w, v) + b_v) )
//! ```
//!
//! with both gradients evaluated at the incoming pair before either block
//! moves. [`run`] iterates this from the origin for a fixed number of steps
//! under the `1/(rho (t + phi))` schedule, drawing fresh per-block Gaussian
//! noise each step when a verified [`NoisePlan`] is supplied, and returns
//! the average of the post-step iterates. [`coupled_runs`] executes the
//! algorithm on two adjacent datasets under common random numbers — the
//! noise sequences are bit-identical — which is what the stability
//! measurements difference against each other.

use crate::error::{Error, Result};
use crate::numerics::{project_ball, sample_gaussian, RngState, Vector};
use crate::privacy::NoisePlan;
use crate::problem::{prepare, prepared_grad_v, prepared_grad_w, Dataset, PreparedData, ProblemInstance};

/// Step-size schedule `eta_t = 1 / (rho (t + phi))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    rho: f64,
    phi: f64,
}

impl Schedule {
    /// `rho` must be positive and finite; `phi` non-negative and finite.
    /// With `phi = 0` the first step size is exactly `1/rho`, which can
    /// overshoot on stiff couplings; that transient is part of the schedule
    /// and no damping is applied.
    pub fn new(rho: f64, phi: f64) -> Result<Self> {
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "rho: must be finite and > 0, got {rho}"
            )));
        }
        if !phi.is_finite() || phi < 0.0 {
            return Err(Error::InvalidInput(format!(
                "phi: must be finite and >= 0, got {phi}"
            )));
        }
        Ok(Self { rho, phi })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Step size for step `t >= 1`.
    pub fn eta(&self, t: usize) -> f64 {
        1.0 / (self.rho * (t as f64 + self.phi))
    }
}

/// Output of a (DP-)GDA run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Post-step iterate pairs, one per step, when retention was requested.
    pub iterates: Option<Vec<(Vector, Vector)>>,
    /// Average of the post-step minimization iterates.
    pub avg_w: Vector,
    /// Average of the post-step maximization iterates.
    pub avg_v: Vector,
    /// Number of gradient steps taken.
    pub steps: usize,
    /// Generator state (seed, counter) at the start of the run, recording
    /// which noise stream produced this trajectory.
    pub noise_record: (u64, u64),
}

impl Trajectory {
    /// Serializes retained iterates as CSV: a schema comment, a header
    /// `t,w_0..,v_0..`, then row `t` holding the iterate pair after step
    /// `t`. Errors when the run did not retain iterates.
    pub fn to_csv(&self) -> Result<String> {
        let iterates = self.iterates.as_ref().ok_or_else(|| {
            Error::InvalidInput("trajectory was run without iterate retention".into())
        })?;
        let (dim_w, dim_v) = (self.avg_w.dim(), self.avg_v.dim());
        let mut out = String::from("# schema=trajectory@1\n");
        let mut header = vec!["t".to_string()];
        header.extend((0..dim_w).map(|j| format!("w_{j}")));
        header.extend((0..dim_v).map(|j| format!("v_{j}")));
        out.push_str(&header.join(","));
        out.push('\n');
        for (t, (w, v)) in iterates.iter().enumerate() {
            let mut row = vec![format!("{}", t + 1)];
            row.extend(w.iter().map(|x| format!("{x:.16e}")));
            row.extend(v.iter().map(|x| format!("{x:.16e}")));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        Ok(out)
    }
}

/// One simultaneous projected step from `(w, v)` with explicit noise
/// vectors (pass zero vectors for a non-private step).
pub fn gda_step(
    inst: &ProblemInstance,
    prep: &PreparedData,
    w: &Vector,
    v: &Vector,
    eta: f64,
    noise_w: &Vector,
    noise_v: &Vector,
) -> Result<(Vector, Vector)> {
    if w.dim() != inst.dim_w || noise_w.dim() != inst.dim_w {
        return Err(Error::DimensionMismatch {
            expected: inst.dim_w,
            got: if w.dim() != inst.dim_w { w.dim() } else { noise_w.dim() },
        });
    }
    if v.dim() != inst.dim_v || noise_v.dim() != inst.dim_v {
        return Err(Error::DimensionMismatch {
            expected: inst.dim_v,
            got: if v.dim() != inst.dim_v { v.dim() } else { noise_v.dim() },
        });
    }
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::InvalidInput(format!("eta: must be finite and > 0, got {eta}")));
    }
    // Both gradients are taken at the incoming pair before either moves.
    let grad_w = prepared_grad_w(inst, prep, w, v)?;
    let grad_v = prepared_grad_v(inst, prep, w, v)?;
    let w_next = project_ball(&w.add_scaled(-eta, &grad_w.add(noise_w)), inst.radius_w)?;
    let v_next = project_ball(&v.add_scaled(eta, &grad_v.add(noise_v)), inst.radius_v)?;
    Ok((w_next, v_next))
}

fn check_plan(plan: &NoisePlan, steps: usize) -> Result<()> {
    if !plan.sigma.is_finite() || plan.sigma < 0.0 {
        return Err(Error::Config(format!(
            "noise plan sigma must be finite and >= 0, got {}",
            plan.sigma
        )));
    }
    if plan.t != steps {
        return Err(Error::Config(format!(
            "noise plan covers t={} steps but the run requests {steps}",
            plan.t
        )));
    }
    if plan.sigma > 0.0 && !plan.valid {
        return Err(Error::PrivacyVerification(
            "noise plan has not passed budget verification; run verify_budget first".into(),
        ));
    }
    Ok(())
}

/// Runs (DP-)GDA from the origin for `steps` steps.
///
/// When `noise` is present its step count must equal `steps` and, for a
/// positive scale, it must have passed budget verification. Each step draws
/// `b_w` then `b_v` from `rng`; without a plan no randomness is consumed.
/// The returned average is over the post-step iterates, so a single
/// noiseless step on a decoupled quadratic averages to the projected block
/// means exactly.
pub fn run(
    inst: &ProblemInstance,
    data: &Dataset,
    steps: usize,
    schedule: &Schedule,
    noise: Option<&NoisePlan>,
    rng: &mut RngState,
    retain_iterates: bool,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps: must be >= 1".into()));
    }
    if let Some(plan) = noise {
        check_plan(plan, steps)?;
    }
    let prep = prepare(inst, data)?;
    run_prepared(inst, &prep, steps, schedule, noise, rng, retain_iterates)
}

/// [`run`] over precomputed sufficient statistics (the per-step cost is
/// then independent of the dataset size).
pub fn run_prepared(
    inst: &ProblemInstance,
    prep: &PreparedData,
    steps: usize,
    schedule: &Schedule,
    noise: Option<&NoisePlan>,
    rng: &mut RngState,
    retain_iterates: bool,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps: must be >= 1".into()));
    }
    if let Some(plan) = noise {
        check_plan(plan, steps)?;
    }
    let noise_record = rng.state();
    let sigma = noise.map_or(0.0, |p| p.sigma);
    let mut w = Vector::zeros(inst.dim_w);
    let mut v = Vector::zeros(inst.dim_v);
    let mut sum_w = Vector::zeros(inst.dim_w);
    let mut sum_v = Vector::zeros(inst.dim_v);
    let mut iterates = retain_iterates.then(|| Vec::with_capacity(steps));
    let zero_w = Vector::zeros(inst.dim_w);
    let zero_v = Vector::zeros(inst.dim_v);
    for t in 1..=steps {
        let (noise_w, noise_v) = if noise.is_some() {
            (
                sample_gaussian(inst.dim_w, sigma, rng)?,
                sample_gaussian(inst.dim_v, sigma, rng)?,
            )
        } else {
            (zero_w.clone(), zero_v.clone())
        };
        let (w_next, v_next) = gda_step(inst, prep, &w, &v, schedule.eta(t), &noise_w, &noise_v)?;
        w = w_next;
        v = v_next;
        sum_w.accumulate(1.0, &w);
        sum_v.accumulate(1.0, &v);
        if let Some(list) = iterates.as_mut() {
            list.push((w.clone(), v.clone()));
        }
    }
    let scale = 1.0 / steps as f64;
    Ok(Trajectory {
        iterates,
        avg_w: sum_w.scale(scale),
        avg_v: sum_v.scale(scale),
        steps,
        noise_record,
    })
}

/// Counts the indices where two datasets disagree; errors unless they have
/// equal size and differ in at most one position (the replace-one adjacency
/// relation, with equality as the degenerate case).
fn check_adjacent(s: &Dataset, s_adj: &Dataset) -> Result<()> {
    if s.n() != s_adj.n() {
        return Err(Error::NotAdjacent(format!(
            "datasets have different sizes: {} vs {}",
            s.n(),
            s_adj.n()
        )));
    }
    let differing = s
        .points()
        .iter()
        .zip(s_adj.points())
        .filter(|(a, b)| a != b)
        .count();
    if differing > 1 {
        return Err(Error::NotAdjacent(format!(
            "datasets differ in {differing} positions; adjacency allows at most one"
        )));
    }
    Ok(())
}

/// Runs the algorithm on two adjacent datasets under common random numbers:
/// both runs consume the identical noise sequence, and the shared generator
/// is advanced by exactly one run's worth of draws.
pub fn coupled_runs(
    inst: &ProblemInstance,
    s: &Dataset,
    s_adj: &Dataset,
    steps: usize,
    schedule: &Schedule,
    noise: Option<&NoisePlan>,
    shared_rng: &mut RngState,
    retain_iterates: bool,
) -> Result<(Trajectory, Trajectory)> {
    check_adjacent(s, s_adj)?;
    let mut rng_a = shared_rng.clone();
    let mut rng_b = shared_rng.clone();
    let traj_a = run(inst, s, steps, schedule, noise, &mut rng_a, retain_iterates)?;
    let traj_b = run(inst, s_adj, steps, schedule, noise, &mut rng_b, retain_iterates)?;
    debug_assert_eq!(rng_a.state(), rng_b.state(), "coupled runs consume equal draws");
    *shared_rng = rng_a;
    Ok((traj_a, traj_b))
}
