//! The four generalization measures for a trained pair.
//!
//! Given a pair `(w, v)`, a training set `S`, and a held-out evaluation
//! sample standing in for the population, this module computes
//!
//! * plain risk `L(w, v)` and its empirical counterpart `L_S(w, v)`;
//! * primal risk `R(w) = sup_v L(w, v)` and `R_S(w)`;
//! * the strong primal-dual gap `sup_v L(w, v) - inf_w L(w, v)`;
//! * the weak primal-dual gap, where the sup/inf are taken of
//!   replicate-averaged objectives `(1/R) sum_r L(w_r, .)`.
//!
//! Every `sup`/`inf` is a `rho`-strongly concave/convex inner problem over
//! a ball, solved by projected gradient with the `1/(rho k)` schedule until
//! the projected-gradient residual `rho * ||Proj(x + grad/rho) - x||`
//! drops below an explicit tolerance ([`inner_max`], [`inner_min`]).
//! Uniqueness of the optimizer is guaranteed by strong convexity, so the
//! returned [`BestResponse`] is exact to tolerance rather than a local
//! heuristic.
//!
//! Population quantities are Monte Carlo estimates on the supplied
//! evaluation sample; the estimator (not an unobservable expectation) is
//! what [`RiskReport`] records, together with the solver tolerance and
//! total inner iterations spent.

use crate::error::{Error, Result};
use crate::numerics::{project_ball, Vector};
use crate::optimizer::Trajectory;
use crate::problem::{
    prepare, prepared_grad_v, prepared_grad_w, prepared_loss, Dataset, PreparedData,
    ProblemInstance,
};

/// Default projected-gradient residual tolerance for inner solves.
pub const DEFAULT_INNER_TOL: f64 = 1e-8;
/// Default iteration cap for inner solves.
pub const DEFAULT_INNER_CAP: usize = 1_000_000;

/// Solution of one inner best-response problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    /// The maximizer (or minimizer) over the feasible ball.
    pub point: Vector,
    /// Objective value at `point`.
    pub value: f64,
    /// Projected-gradient residual at `point` (at most the tolerance).
    pub residual: f64,
    /// Gradient steps taken.
    pub iterations: usize,
}

/// Projected gradient ascent over a centered ball with `eta_k = 1/(rho k)`.
/// `ascent_grad` must return the direction of increase, so minimization
/// passes the negated gradient. Stops when the residual
/// `rho * ||Proj(x + g/rho) - x||` is at most `tol`; errors at `cap` steps.
fn ascend<G, V>(
    dim: usize,
    radius: f64,
    rho: f64,
    tol: f64,
    cap: usize,
    start: Option<&Vector>,
    ascent_grad: G,
    value: V,
) -> Result<BestResponse>
where
    G: Fn(&Vector) -> Result<Vector>,
    V: Fn(&Vector) -> Result<f64>,
{
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!("tol: must be finite and > 0, got {tol}")));
    }
    let mut x = match start {
        Some(x0) => project_ball(x0, radius)?,
        None => Vector::zeros(dim),
    };
    let mut iterations = 0usize;
    loop {
        let g = ascent_grad(&x)?;
        // Natural-map point: where a full 1/rho step lands. Its distance to
        // x, scaled by rho, vanishes exactly at the constrained optimum.
        let natural = project_ball(&x.add_scaled(1.0 / rho, &g), radius)?;
        let residual = rho * natural.dist(&x);
        if residual <= tol {
            let value = value(&x)?;
            return Ok(BestResponse { point: x, value, residual, iterations });
        }
        if iterations >= cap {
            return Err(Error::NonConverged { residual, iterations, tol });
        }
        iterations += 1;
        x = if iterations == 1 {
            // eta_1 = 1/rho: the step is the natural-map point itself.
            natural
        } else {
            project_ball(&x.add_scaled(1.0 / (rho * iterations as f64), &g), radius)?
        };
    }
}

/// Best response of the maximization block at fixed `w`, over prepared
/// statistics, with explicit cap and optional warm start.
pub fn inner_max_prepared(
    inst: &ProblemInstance,
    prep: &PreparedData,
    w: &Vector,
    tol: f64,
    cap: usize,
    start: Option<&Vector>,
) -> Result<BestResponse> {
    ascend(
        inst.dim_v,
        inst.radius_v,
        inst.rho,
        tol,
        cap,
        start,
        |v| prepared_grad_v(inst, prep, w, v),
        |v| prepared_loss(inst, prep, w, v),
    )
}

/// Best response of the minimization block at fixed `v`; mirror of
/// [`inner_max_prepared`].
pub fn inner_min_prepared(
    inst: &ProblemInstance,
    prep: &PreparedData,
    v: &Vector,
    tol: f64,
    cap: usize,
    start: Option<&Vector>,
) -> Result<BestResponse> {
    ascend(
        inst.dim_w,
        inst.radius_w,
        inst.rho,
        tol,
        cap,
        start,
        |w| Ok(prepared_grad_w(inst, prep, w, v)?.scale(-1.0)),
        |w| prepared_loss(inst, prep, w, v),
    )
}

/// `sup_v L_S(w, v)` over the dataset's feasible dual ball.
pub fn inner_max(
    inst: &ProblemInstance,
    w: &Vector,
    data: &Dataset,
    tol: f64,
) -> Result<BestResponse> {
    let prep = prepare(inst, data)?;
    inner_max_prepared(inst, &prep, w, tol, DEFAULT_INNER_CAP, None)
}

/// `inf_w L_S(w, v)` over the dataset's feasible primal ball.
pub fn inner_min(
    inst: &ProblemInstance,
    v: &Vector,
    data: &Dataset,
    tol: f64,
) -> Result<BestResponse> {
    let prep = prepare(inst, data)?;
    inner_min_prepared(inst, &prep, v, tol, DEFAULT_INNER_CAP, None)
}

/// Strong primal-dual gap `sup_v L_S(w, v) - inf_w L_S(w, v)` over prepared
/// statistics.
pub fn strong_pd_prepared(
    inst: &ProblemInstance,
    prep: &PreparedData,
    w: &Vector,
    v: &Vector,
    tol: f64,
    cap: usize,
) -> Result<f64> {
    let sup = inner_max_prepared(inst, prep, w, tol, cap, Some(v))?;
    let inf = inner_min_prepared(inst, prep, v, tol, cap, Some(w))?;
    Ok(sup.value - inf.value)
}

/// Strong primal-dual gap of `(w, v)` on `data`: non-negative up to twice
/// the solver tolerance, and zero exactly at the empirical saddle.
pub fn strong_pd(
    inst: &ProblemInstance,
    w: &Vector,
    v: &Vector,
    data: &Dataset,
    tol: f64,
) -> Result<f64> {
    let prep = prepare(inst, data)?;
    strong_pd_prepared(inst, &prep, w, v, tol, DEFAULT_INNER_CAP)
}

/// Weak primal-dual gap of a replicate set: the sup/inf of the
/// replicate-averaged objectives
/// `v' -> (1/R) sum_r L(w_r, v')` and `w' -> (1/R) sum_r L(w', v_r)`,
/// both still `rho`-strongly concave/convex. Requires at least two
/// replicates; averaging over a single run carries no information beyond
/// its strong gap.
pub fn weak_pd(
    inst: &ProblemInstance,
    pairs: &[(Vector, Vector)],
    data: &Dataset,
    tol: f64,
) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::InsufficientReplicates { needed: 2, got: pairs.len() });
    }
    let prep = prepare(inst, data)?;
    weak_pd_prepared(inst, &prep, pairs, tol, DEFAULT_INNER_CAP)
}

fn weak_pd_prepared(
    inst: &ProblemInstance,
    prep: &PreparedData,
    pairs: &[(Vector, Vector)],
    tol: f64,
    cap: usize,
) -> Result<f64> {
    let r = pairs.len() as f64;
    let sup = ascend(
        inst.dim_v,
        inst.radius_v,
        inst.rho,
        tol,
        cap,
        None,
        |v| {
            let mut g = Vector::zeros(inst.dim_v);
            for (w_r, _) in pairs {
                g.accumulate(1.0 / r, &prepared_grad_v(inst, prep, w_r, v)?);
            }
            Ok(g)
        },
        |v| {
            let mut total = 0.0;
            for (w_r, _) in pairs {
                total += prepared_loss(inst, prep, w_r, v)?;
            }
            Ok(total / r)
        },
    )?;
    let inf = ascend(
        inst.dim_w,
        inst.radius_w,
        inst.rho,
        tol,
        cap,
        None,
        |w| {
            let mut g = Vector::zeros(inst.dim_w);
            for (_, v_r) in pairs {
                g.accumulate(-1.0 / r, &prepared_grad_w(inst, prep, w, v_r)?);
            }
            Ok(g)
        },
        |w| {
            let mut total = 0.0;
            for (_, v_r) in pairs {
                total += prepared_loss(inst, prep, w, v_r)?;
            }
            Ok(total / r)
        },
    )?;
    Ok(sup.value - inf.value)
}

/// Plain generalization gap: the population estimate of `L(w, v)` on
/// `eval` minus `L_S(w, v)` on the training set.
pub fn plain_gap(
    inst: &ProblemInstance,
    w: &Vector,
    v: &Vector,
    train: &Dataset,
    eval: &Dataset,
) -> Result<f64> {
    let prep_s = prepare(inst, train)?;
    let prep_e = prepare(inst, eval)?;
    Ok(prepared_loss(inst, &prep_e, w, v)? - prepared_loss(inst, &prep_s, w, v)?)
}

/// Primal generalization gap: `R(w)` estimated on `eval` minus `R_S(w)`.
pub fn primal_gap(
    inst: &ProblemInstance,
    w: &Vector,
    train: &Dataset,
    eval: &Dataset,
    tol: f64,
) -> Result<f64> {
    let prep_s = prepare(inst, train)?;
    let prep_e = prepare(inst, eval)?;
    let pop = inner_max_prepared(inst, &prep_e, w, tol, DEFAULT_INNER_CAP, None)?;
    let emp = inner_max_prepared(inst, &prep_s, w, tol, DEFAULT_INNER_CAP, None)?;
    Ok(pop.value - emp.value)
}

/// Distances from a trajectory's averaged pair to the empirical best
/// responses: `g_w = ||argmin_w L_S(w, avg_v) - avg_w||` and the mirrored
/// `g_v`.
pub fn g_distances(
    inst: &ProblemInstance,
    traj: &Trajectory,
    train: &Dataset,
    tol: f64,
) -> Result<(f64, f64)> {
    let prep = prepare(inst, train)?;
    g_distances_prepared(inst, &prep, traj, tol, DEFAULT_INNER_CAP)
}

/// [`g_distances`] over prepared statistics.
pub fn g_distances_prepared(
    inst: &ProblemInstance,
    prep: &PreparedData,
    traj: &Trajectory,
    tol: f64,
    cap: usize,
) -> Result<(f64, f64)> {
    let w_best = inner_min_prepared(inst, prep, &traj.avg_v, tol, cap, Some(&traj.avg_w))?;
    let v_best = inner_max_prepared(inst, prep, &traj.avg_w, tol, cap, Some(&traj.avg_v))?;
    Ok((w_best.point.dist(&traj.avg_w), v_best.point.dist(&traj.avg_v)))
}

/// All four risk measures of one or more trained pairs.
///
/// `pairs[0]` is the primary pair for the plain, primal, and strong
/// measures. The weak measures average over the whole replicate list when
/// it has at least two entries; a singleton list degenerates the replicate
/// expectation to a point mass, making the weak measures equal the strong
/// ones (recorded with `replicates = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    pub plain_emp: f64,
    pub plain_pop: f64,
    pub primal_emp: f64,
    pub primal_pop: f64,
    pub strong_pd_emp: f64,
    pub strong_pd_pop: f64,
    pub weak_pd_emp: f64,
    pub weak_pd_pop: f64,
    /// Inner-solver residual tolerance used throughout.
    pub tol: f64,
    /// Total gradient steps spent across all inner solves.
    pub inner_iterations: usize,
    /// Evaluation-sample size behind the population estimates.
    pub n_eval: usize,
    /// Number of replicate pairs behind the weak measures.
    pub replicates: usize,
}

impl RiskReport {
    /// Column order of the CSV serialization.
    pub fn csv_header() -> &'static str {
        "plain_emp,plain_pop,primal_emp,primal_pop,strong_pd_emp,strong_pd_pop,\
         weak_pd_emp,weak_pd_pop,tol,inner_iterations,n_eval,replicates"
    }

    /// One row in the [`RiskReport::csv_header`] order.
    pub fn to_csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{}",
            self.plain_emp,
            self.plain_pop,
            self.primal_emp,
            self.primal_pop,
            self.strong_pd_emp,
            self.strong_pd_pop,
            self.weak_pd_emp,
            self.weak_pd_pop,
            self.tol,
            self.inner_iterations,
            self.n_eval,
            self.replicates
        )
    }

    /// Full single-report document: schema comment, header, one row.
    pub fn to_csv(&self) -> String {
        format!("# schema=risk_report@1\n{}\n{}\n", Self::csv_header(), self.to_csv_row())
    }
}

/// Computes a full [`RiskReport`] for `pairs` (see the type docs for the
/// replicate semantics) against a training set and an evaluation sample.
pub fn risk_report(
    inst: &ProblemInstance,
    pairs: &[(Vector, Vector)],
    train: &Dataset,
    eval: &Dataset,
    tol: f64,
) -> Result<RiskReport> {
    let (w, v) = pairs
        .first()
        .ok_or_else(|| Error::InvalidInput("risk report needs at least one trained pair".into()))?;
    let prep_s = prepare(inst, train)?;
    let prep_e = prepare(inst, eval)?;
    let cap = DEFAULT_INNER_CAP;
    let mut iterations = 0usize;

    let plain_emp = prepared_loss(inst, &prep_s, w, v)?;
    let plain_pop = prepared_loss(inst, &prep_e, w, v)?;

    let primal_emp_solve = inner_max_prepared(inst, &prep_s, w, tol, cap, Some(v))?;
    let primal_pop_solve = inner_max_prepared(inst, &prep_e, w, tol, cap, Some(v))?;
    iterations += primal_emp_solve.iterations + primal_pop_solve.iterations;

    let inf_emp = inner_min_prepared(inst, &prep_s, v, tol, cap, Some(w))?;
    let inf_pop = inner_min_prepared(inst, &prep_e, v, tol, cap, Some(w))?;
    iterations += inf_emp.iterations + inf_pop.iterations;

    let strong_pd_emp = primal_emp_solve.value - inf_emp.value;
    let strong_pd_pop = primal_pop_solve.value - inf_pop.value;

    let (weak_pd_emp, weak_pd_pop) = if pairs.len() >= 2 {
        (
            weak_pd_prepared(inst, &prep_s, pairs, tol, cap)?,
            weak_pd_prepared(inst, &prep_e, pairs, tol, cap)?,
        )
    } else {
        (strong_pd_emp, strong_pd_pop)
    };

    Ok(RiskReport {
        plain_emp,
        plain_pop,
        primal_emp: primal_emp_solve.value,
        primal_pop: primal_pop_solve.value,
        strong_pd_emp,
        strong_pd_pop,
        weak_pd_emp,
        weak_pd_pop,
        tol,
        inner_iterations: iterations,
        n_eval: eval.n(),
        replicates: pairs.len(),
    })
}
