//! Closed-form high-probability bounds for the private minimax optimizer.
//!
//! Every function here is a pure evaluator: it transcribes the right-hand
//! side of a displayed inequality and returns its value for concrete inputs.
//! Nothing is estimated; the empirical counterparts live in the `risk` and
//! `stability` modules and are compared against these evaluations by the
//! experiment drivers.
//!
//! Three families are covered:
//!
//! * **Trajectory bounds**, driven by the optimizer's own parameters
//!   (`sigma`, `T`, dimension `p`): [`argument_stability_bound`] for the
//!   coupled-run argument distance under one sample replacement,
//!   [`best_response_gap_bound`] for the distance between the averaged
//!   output and its exact best response, and [`strong_pd_empirical_bound`]
//!   for the empirical saddle-point gap of the averaged output.
//! * **Generalization bounds**, driven by a stability parameter `gamma`:
//!   seven evaluators relating empirical risks to population risks
//!   ([`plain_generalization_bound`] through
//!   [`weak_pd_generalization_bound`]).
//! * The shared **tail factor** [`p_zeta`] (and its single-stream variant
//!   [`p_zeta_single`]), which inflates a Gaussian norm bound to hold
//!   simultaneously over all steps with probability `1 - zeta`.
//!
//! Two transcription conventions apply throughout and are deliberate:
//!
//! * `log` means the natural logarithm, and `log(eT)` is computed as
//!   `1 + ln(T)` so integer `T = 1` evaluates exactly.
//! * The generalization evaluators use the ceiling form `ceil(ln n)` for the
//!   `log(n)` factor, matching the sharper per-step accounting that produces
//!   these constants.
//!
//! Each generalization evaluator bounds a *shifted* difference — e.g. the
//! plain bound controls `L - L_S / (1 - iota)`, not `L - L_S` — so callers
//! must apply the matching left-hand-side coefficient before comparing
//! against measurements. [`evaluate_named`] returns that left-hand side as a
//! human-readable string alongside the value, and the per-function docs spell
//! it out.

use std::f64::consts::{E, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ===== Input validation helpers =====

fn finite_positive(value: f64, key: &str) -> Result<f64> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::Domain(format!("{key}: must be finite and > 0, got {value}")));
    }
    Ok(value)
}

fn finite_non_negative(value: f64, key: &str) -> Result<f64> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::Domain(format!("{key}: must be finite and >= 0, got {value}")));
    }
    Ok(value)
}

fn unit_open(value: f64, key: &str) -> Result<f64> {
    if !value.is_finite() || !(value > 0.0 && value < 1.0) {
        return Err(Error::Domain(format!("{key}: must lie in (0,1), got {value}")));
    }
    Ok(value)
}

fn at_least_one(value: u64, key: &str) -> Result<f64> {
    if value == 0 {
        return Err(Error::Domain(format!("{key}: must be >= 1, got 0")));
    }
    Ok(value as f64)
}

/// `ln(e t) = 1 + ln(t)`, exact at `t = 1`.
fn log_et(t: f64) -> f64 {
    1.0 + t.ln()
}

/// `ceil(ln n)` as used by the generalization evaluators; zero at `n = 1`.
fn ceil_log(n: f64) -> f64 {
    n.ln().ceil()
}

// ===== Tail factor =====

/// High-probability inflation factor for the per-step Gaussian noise norms.
///
/// ```text
/// p_zeta = 1 + (8 ln(2T / zeta) / p)^(1/4)
/// ```
///
/// With probability at least `1 - zeta`, every one of the `2T` noise vectors
/// drawn over a `T`-step run (two per step, one per block) has norm at most
/// `sigma * sqrt(p) * p_zeta`. Defined for `0 < zeta <= 2T`; at the boundary
/// `zeta = 2T` the logarithm vanishes and the factor is exactly 1.
pub fn p_zeta(t: u64, p: u64, zeta: f64) -> Result<f64> {
    let t = at_least_one(t, "steps")?;
    let p = at_least_one(p, "dim")?;
    if !zeta.is_finite() || !(zeta > 0.0 && zeta <= 2.0 * t) {
        return Err(Error::Domain(format!(
            "zeta: must lie in (0, 2T] with T={t}, got {zeta}"
        )));
    }
    Ok(1.0 + (8.0 * (2.0 * t / zeta).ln() / p).powf(0.25))
}

/// Single-stream variant of [`p_zeta`] covering `T` noise vectors instead of
/// `2T`:
///
/// ```text
/// p_zeta' = 1 + (8 ln(T / zeta) / p)^(1/4)
/// ```
///
/// Used by [`best_response_gap_bound`], which tracks only one block's noise.
/// Defined for `0 < zeta <= T`.
pub fn p_zeta_single(t: u64, p: u64, zeta: f64) -> Result<f64> {
    let t = at_least_one(t, "steps")?;
    let p = at_least_one(p, "dim")?;
    if !zeta.is_finite() || !(zeta > 0.0 && zeta <= t) {
        return Err(Error::Domain(format!(
            "zeta: must lie in (0, T] with T={t}, got {zeta}"
        )));
    }
    Ok(1.0 + (8.0 * (t / zeta).ln() / p).powf(0.25))
}

// ===== Trajectory bounds =====

/// Argument-stability parameter of the averaged output under one sample
/// replacement, holding with probability at least `1 - zeta`.
///
/// Bounds `||w_S - w_S'|| + ||v_S - v_S'||` for coupled runs (shared noise)
/// on datasets differing in one point:
///
/// ```text
/// gamma = 4G/(n rho)
///       + 2 sigma sqrt(p) ln(eT)/T * p_zeta
///       + 4 sqrt( G^2 ln(eT)/(rho^2 T)
///               + sigma^2 p ln(eT)/(rho^2 T) * p_zeta^2
///               + 2 G sigma sqrt(p) ln(eT)/(rho^2 T) * p_zeta
///               + (gap_w + gap_v) sigma sqrt(p)/rho * p_zeta )
/// ```
///
/// `gap_w` and `gap_v` are the best-response gaps of the averaged output
/// (measured, or bounded via [`best_response_gap_bound`]). The `ln(eT)`
/// factor multiplies every term inside the radical except the gap term.
#[allow(clippy::too_many_arguments)]
pub fn argument_stability_bound(
    lipschitz: f64,
    rho: f64,
    sigma: f64,
    steps: u64,
    n: u64,
    dim: u64,
    zeta: f64,
    gap_w: f64,
    gap_v: f64,
) -> Result<f64> {
    let g = finite_positive(lipschitz, "lipschitz")?;
    let rho = finite_positive(rho, "rho")?;
    let sigma = finite_non_negative(sigma, "sigma")?;
    let n = at_least_one(n, "n")?;
    let p = at_least_one(dim, "dim")?;
    unit_open(zeta, "zeta")?;
    let gap_w = finite_non_negative(gap_w, "gap_w")?;
    let gap_v = finite_non_negative(gap_v, "gap_v")?;
    let t = at_least_one(steps, "steps")?;
    let pz = p_zeta(steps, dim, zeta)?;
    let let_ = log_et(t);
    let radicand = g * g * let_ / (rho * rho * t)
        + sigma * sigma * p * let_ / (rho * rho * t) * pz * pz
        + 2.0 * g * sigma * p.sqrt() * let_ / (rho * rho * t) * pz
        + (gap_w + gap_v) * sigma * p.sqrt() / rho * pz;
    Ok(4.0 * g / (n * rho) + 2.0 * sigma * p.sqrt() * let_ / t * pz + 4.0 * radicand.sqrt())
}

/// High-probability bound on the best-response gap of the averaged output in
/// one block.
///
/// Bounds `||argmin_w L_S(w, v_out) - w_out||` (swap roles for the `v`
/// block, passing that block's feasible-set radius):
///
/// ```text
/// gap <= sqrt(ln(eT)) * sqrt( G^2/(rho^2 T)
///                           + (2/rho) (G sigma sqrt(p)/T
///                                      + radius sigma sqrt(p)/ln(eT)) * p_zeta'
///                           + sigma^2 p/(rho T) * p_zeta'^2 )
/// ```
///
/// `radius` is the diameter bound of the block's feasible set. Holds with
/// probability at least `1 - zeta` via the single-stream tail factor.
pub fn best_response_gap_bound(
    lipschitz: f64,
    rho: f64,
    sigma: f64,
    steps: u64,
    dim: u64,
    radius: f64,
    zeta: f64,
) -> Result<f64> {
    let g = finite_positive(lipschitz, "lipschitz")?;
    let rho = finite_positive(rho, "rho")?;
    let sigma = finite_non_negative(sigma, "sigma")?;
    let p = at_least_one(dim, "dim")?;
    let radius = finite_non_negative(radius, "radius")?;
    unit_open(zeta, "zeta")?;
    let t = at_least_one(steps, "steps")?;
    let pz = p_zeta_single(steps, dim, zeta)?;
    let let_ = log_et(t);
    let radicand = g * g / (rho * rho * t)
        + 2.0 / rho * (g * sigma * p.sqrt() / t + radius * sigma * p.sqrt() / let_) * pz
        + sigma * sigma * p / (rho * t) * pz * pz;
    Ok(let_.sqrt() * radicand.sqrt())
}

/// High-probability bound on the empirical saddle-point gap
/// `sup_v L_S(w_out, v) - inf_w L_S(w, v_out)` of the averaged output:
///
/// ```text
/// gap <= G^2 ln(eT)/(rho T)
///      + sigma^2 p ln(eT)/(rho T) * p_zeta^2
///      + 2 G sigma sqrt(p) ln(eT)/(rho T) * p_zeta
///      + (gap_w + gap_v) sigma sqrt(p) * p_zeta
/// ```
///
/// Holds with probability at least `1 - zeta`. With `sigma = 0` this reduces
/// to the classical `G^2 ln(eT) / (rho T)` averaged-iterate rate.
pub fn strong_pd_empirical_bound(
    lipschitz: f64,
    rho: f64,
    sigma: f64,
    steps: u64,
    dim: u64,
    zeta: f64,
    gap_w: f64,
    gap_v: f64,
) -> Result<f64> {
    let g = finite_positive(lipschitz, "lipschitz")?;
    let rho = finite_positive(rho, "rho")?;
    let sigma = finite_non_negative(sigma, "sigma")?;
    let p = at_least_one(dim, "dim")?;
    unit_open(zeta, "zeta")?;
    let gap_w = finite_non_negative(gap_w, "gap_w")?;
    let gap_v = finite_non_negative(gap_v, "gap_v")?;
    let t = at_least_one(steps, "steps")?;
    let pz = p_zeta(steps, dim, zeta)?;
    let let_ = log_et(t);
    Ok(g * g * let_ / (rho * t)
        + sigma * sigma * p * let_ / (rho * t) * pz * pz
        + 2.0 * g * sigma * p.sqrt() * let_ / (rho * t) * pz
        + (gap_w + gap_v) * sigma * p.sqrt() * pz)
}

// ===== Generalization bounds =====

/// Shared validation for the risk evaluators' common arguments.
fn risk_common(
    gamma: f64,
    lipschitz: f64,
    loss_range: f64,
    n: u64,
    iota: f64,
    zeta: f64,
) -> Result<(f64, f64, f64, f64, f64, f64)> {
    Ok((
        finite_non_negative(gamma, "gamma")?,
        finite_positive(lipschitz, "lipschitz")?,
        finite_positive(loss_range, "loss_range")?,
        at_least_one(n, "n")?,
        unit_open(iota, "iota")?,
        unit_open(zeta, "zeta")?,
    ))
}

/// Plain generalization bound: with probability at least `1 - zeta`,
///
/// ```text
/// L - L_S/(1-iota) <= sqrt( (G^2 g^2 + 64 G^2 n g^2 ln(3/zeta))
///                           * ln(3/zeta) / (2 (1-iota)^2 n) )
///                   + 50 sqrt(2) e G g ceil(ln n) ln(3e/zeta) / (1-iota)
///                   + (12+2 iota) M ln(3/zeta) / (3 iota (1-iota) n)
/// ```
///
/// where `g` is the argument-stability parameter `gamma`, `M` the loss range,
/// `L`/`L_S` population and empirical losses at the algorithm's output. The
/// left-hand side carries the `1/(1-iota)` coefficient on the empirical term.
pub fn plain_generalization_bound(
    gamma: f64,
    lipschitz: f64,
    loss_range: f64,
    n: u64,
    iota: f64,
    zeta: f64,
) -> Result<f64> {
    let (gamma, g, m, n, iota, zeta) = risk_common(gamma, lipschitz, loss_range, n, iota, zeta)?;
    let l3 = (3.0 / zeta).ln();
    let l3e = l3 + 1.0;
    let one = 1.0 - iota;
    let moment = ((g * g * gamma * gamma + 64.0 * g * g * n * gamma * gamma * l3) * l3
        / (2.0 * one * one * n))
        .sqrt();
    let chain = 50.0 * SQRT_2 * E * g * gamma * ceil_log(n) * l3e / one;
    let range = (12.0 + 2.0 * iota) * m * l3 / (3.0 * iota * one * n);
    Ok(moment + chain + range)
}

/// Primal generalization bound: with probability at least `1 - zeta`,
///
/// ```text
/// R - R_S/(1-iota) <= sqrt( (1+L/rho)^2 G^2 g^2 (1 + 64 n ln(3/zeta))
///                           * ln(3/zeta) / (2 (1-iota)^2 n) )
///                   + 50 sqrt(2) (1+L/rho) G g ceil(ln n) ln(3e/zeta) / (1-iota)
///                   + (12+2 iota) M ln(3/zeta) / (3 iota (1-iota) n)
/// ```
///
/// where `R(w) = sup_v L(w, v)` is the primal population risk and `R_S` its
/// empirical counterpart. Unlike the plain bound, the middle term carries
/// `(1+L/rho)` in place of the factor `e`.
#[allow(clippy::too_many_arguments)]
pub fn primal_generalization_bound(
    gamma: f64,
    lipschitz: f64,
    smoothness: f64,
    rho: f64,
    loss_range: f64,
    n: u64,
    iota: f64,
    zeta: f64,
) -> Result<f64> {
    let (gamma, g, m, n, iota, zeta) = risk_common(gamma, lipschitz, loss_range, n, iota, zeta)?;
    let l = finite_positive(smoothness, "smoothness")?;
    let rho = finite_positive(rho, "rho")?;
    let kappa = 1.0 + l / rho;
    let l3 = (3.0 / zeta).ln();
    let l3e = l3 + 1.0;
    let one = 1.0 - iota;
    let moment = (kappa * kappa * g * g * gamma * gamma * (1.0 + 64.0 * n * l3) * l3
        / (2.0 * one * one * n))
        .sqrt();
    let chain = 50.0 * SQRT_2 * kappa * g * gamma * ceil_log(n) * l3e / one;
    let range = (12.0 + 2.0 * iota) * m * l3 / (3.0 * iota * one * n);
    Ok(moment + chain + range)
}

/// Primal excess population risk bound: with probability at least `1 - zeta`,
///
/// ```text
/// R - (1+iota)/(1-iota) inf_w R
///   <= sqrt( (1+L/rho)^2 G^2 g^2 (1 + 64 n ln(6/zeta)) ln(6/zeta)
///            / (2 (1-iota)^2 n) )
///    + sqrt( (G^2 g^2 + 64 G^2 n g^2 ln(6/zeta)) ln(6/zeta)
///            / (2 (1-iota)^2 n) )
///    + 50 sqrt(2) (1+e+L/rho) G g ceil(ln n) ln(6e/zeta) / (1-iota)
///    + (24+4 iota) M ln(6/zeta) / (3 iota (1-iota) n)
///    + strong_gap_emp / (1-iota)
/// ```
///
/// `strong_gap_emp` is the measured (or bounded) empirical saddle-point gap
/// of the algorithm's output. The left-hand side compares against the best
/// primal population risk scaled by `(1+iota)/(1-iota)`.
#[allow(clippy::too_many_arguments)]
pub fn primal_excess_risk_bound(
    gamma: f64,
    lipschitz: f64,
    smoothness: f64,
    rho: f64,
    loss_range: f64,
    n: u64,
    iota: f64,
    zeta: f64,
    strong_gap_emp: f64,
) -> Result<f64> {
    let (gamma, g, m, n, iota, zeta) = risk_common(gamma, lipschitz, loss_range, n, iota, zeta)?;
    let l = finite_positive(smoothness, "smoothness")?;
    let rho = finite_positive(rho, "rho")?;
    let gap = finite_non_negative(strong_gap_emp, "strong_gap_emp")?;
    let kappa = 1.0 + l / rho;
    let l6 = (6.0 / zeta).ln();
    let l6e = l6 + 1.0;
    let one = 1.0 - iota;
    let moment_primal = (kappa * kappa * g * g * gamma * gamma * (1.0 + 64.0 * n * l6) * l6
        / (2.0 * one * one * n))
        .sqrt();
    let moment_plain = ((g * g * gamma * gamma + 64.0 * g * g * n * gamma * gamma * l6) * l6
        / (2.0 * one * one * n))
        .sqrt();
    let chain = 50.0 * SQRT_2 * (1.0 + E + l / rho) * g * gamma * ceil_log(n) * l6e / one;
    let range = (24.0 + 4.0 * iota) * m * l6 / (3.0 * iota * one * n);
    Ok(moment_primal + moment_plain + chain + range + gap / one)
}

/// The three leading terms shared by the strong/weak saddle-gap population
/// bounds:
///
/// ```text
/// 100 sqrt(2) e (1+iota) (1+L/rho) G g ceil(ln n) ln(e/zeta) / (1-iota)
/// + 144 e (1+iota) G^2 ln(e/zeta) / (rho iota (1-iota) n)
/// + 8 e (1+iota) M ln(e/zeta) / (n (1-iota))
/// ```
#[allow(clippy::too_many_arguments)]
fn pd_leading_terms(
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
    let one = 1.0 - iota;
    let kappa = 1.0 + l / rho;
    100.0 * SQRT_2 * E * (1.0 + iota) * kappa * g * gamma * ceil_log(n) * le / one
        + 144.0 * E * (1.0 + iota) * g * g * le / (rho * iota * one * n)
        + 8.0 * E * (1.0 + iota) * m * le / (n * one)
}

/// Validation shared by the four saddle-gap evaluators.
#[allow(clippy::too_many_arguments)]
fn pd_common(
    gamma: f64,
    lipschitz: f64,
    smoothness: f64,
    rho: f64,
    loss_range: f64,
    n: u64,
    iota: f64,
    zeta: f64,
) -> Result<(f64, f64, f64, f64, f64, f64, f64, f64)> {
    let (gamma, g, m, n, iota, zeta) = risk_common(gamma, lipschitz, loss_range, n, iota, zeta)?;
    let l = finite_positive(smoothness, "smoothness")?;
    let rho = finite_positive(rho, "rho")?;
    Ok((gamma, g, l, rho, m, n, iota, zeta))
}

/// Strong saddle-gap population bound: with probability at least `1 - zeta`,
/// the population gap `sup_v L(w_out, v) - inf_w L(w, v_out)` is at most the
/// three leading terms of [`pd_leading_terms`] plus
///
/// ```text
/// (e iota/(1-iota)) ln(e/zeta) * strong_gap_emp_mean + strong_gap_emp
/// ```
///
/// The empirical gap appears twice: once through its mean over dataset draws
/// (`strong_gap_emp_mean`) and once through the realized value on the
/// dataset at hand (`strong_gap_emp`). Both are accepted explicitly rather
/// than merged, so callers can substitute a common upper bound for either.
#[allow(clippy::too_many_arguments)]
pub fn strong_pd_population_bound(
    gamma: f64,
    lipschitz: f64,
    smoothness: f64,
    rho: f64,
    loss_range: f64,
    n: u64,
    iota: f64,
    zeta: f64,
    strong_gap_emp: f64,
    strong_gap_emp_mean: f64,
) -> Result<f64> {
    let (gamma, g, l, rho, m, n, iota, zeta) =
        pd_common(gamma, lipschitz, smoothness, rho, loss_range, n, iota, zeta)?;
    let gap = finite_non_negative(strong_gap_emp, "strong_gap_emp")?;
    let gap_mean = finite_non_negative(strong_gap_emp_mean, "strong_gap_emp_mean")?;
    let le = (E / zeta).ln();
    let one = 1.0 - iota;
    Ok(pd_leading_terms(gamma, g, l, rho, m, n, iota, zeta)
        + E * iota / one * le * gap_mean
        + gap)
}

/// Strong saddle-gap generalization bound (population gap minus empirical
/// gap): the three leading terms of [`pd_leading_terms`] plus
///
/// ```text
/// (e iota/(1-iota)) ln(e/zeta) * strong_gap_emp_mean
/// ```
///
/// Holds with probability at least `1 - zeta`.
#[allow(clippy::too_many_arguments)]
pub fn strong_pd_generalization_bound(
    gamma: f64,
    lipschitz: f64,
    smoothness: f64,
    rho: f64,
    loss_range: f64,
    n: u64,
    iota: f64,
    zeta: f64,
    strong_gap_emp_mean: f64,
) -> Result<f64> {
    let (gamma, g, l, rho, m, n, iota, zeta) =
        pd_common(gamma, lipschitz, smoothness, rho, loss_range, n, iota, zeta)?;
    let gap_mean = finite_non_negative(strong_gap_emp_mean, "strong_gap_emp_mean")?;
    let le = (E / zeta).ln();
    let one = 1.0 - iota;
    Ok(pd_leading_terms(gamma, g, l, rho, m, n, iota, zeta) + E * iota / one * le * gap_mean)
}

/// Weak saddle-gap population bound: the three leading terms of
/// [`pd_leading_terms`] plus
///
/// ```text
/// ((e iota/(1-iota)) ln(e/zeta) + 1) * strong_gap_emp
/// ```
///
/// The weak population gap takes expectations over a fresh sample inside the
/// sup/inf; it is controlled by the *strong* empirical gap, which is why the
/// trailing term references `strong_gap_emp`. Holds with probability at
/// least `1 - zeta`.
#[allow(clippy::too_many_arguments)]
pub fn weak_pd_population_bound(
    gamma: f64,
    lipschitz: f64,
    smoothness: f64,
    rho: f64,
    loss_range: f64,
    n: u64,
    iota: f64,
    zeta: f64,
    strong_gap_emp: f64,
) -> Result<f64> {
    let (gamma, g, l, rho, m, n, iota, zeta) =
        pd_common(gamma, lipschitz, smoothness, rho, loss_range, n, iota, zeta)?;
    let gap = finite_non_negative(strong_gap_emp, "strong_gap_emp")?;
    let le = (E / zeta).ln();
    let one = 1.0 - iota;
    Ok(pd_leading_terms(gamma, g, l, rho, m, n, iota, zeta)
        + (E * iota / one * le + 1.0) * gap)
}

/// Weak saddle-gap generalization bound (weak population gap minus weak
/// empirical gap): the three leading terms of [`pd_leading_terms`] plus
///
/// ```text
/// ((e iota/(1-iota)) ln(e/zeta) + 2) * strong_gap_emp
/// ```
///
/// Holds with probability at least `1 - zeta`.
#[allow(clippy::too_many_arguments)]
pub fn weak_pd_generalization_bound(
    gamma: f64,
    lipschitz: f64,
    smoothness: f64,
    rho: f64,
    loss_range: f64,
    n: u64,
    iota: f64,
    zeta: f64,
    strong_gap_emp: f64,
) -> Result<f64> {
    let (gamma, g, l, rho, m, n, iota, zeta) =
        pd_common(gamma, lipschitz, smoothness, rho, loss_range, n, iota, zeta)?;
    let gap = finite_non_negative(strong_gap_emp, "strong_gap_emp")?;
    let le = (E / zeta).ln();
    let one = 1.0 - iota;
    Ok(pd_leading_terms(gamma, g, l, rho, m, n, iota, zeta)
        + (E * iota / one * le + 2.0) * gap)
}

// ===== Named dispatch for the CLI =====

/// Input record for [`evaluate_named`]. All fields are optional at parse
/// time; each named bound validates that its own required fields are
/// present and raises a config error naming any missing key.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundInputs {
    /// Argument-stability parameter (generalization evaluators).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Per-sample gradient-norm bound `G`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
    /// Gradient smoothness constant `L`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothness: Option<f64>,
    /// Strong convexity/concavity modulus.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Pointwise loss range bound `M`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss_range: Option<f64>,
    /// Training-set size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Free parameter in `(0,1)` trading constants against the left-hand
    /// side coefficient.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iota: Option<f64>,
    /// Failure probability.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    /// Per-step Gaussian noise scale.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Optimizer step count `T`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    /// Variable dimension (per block).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<u64>,
    /// Feasible-set diameter bound for [`best_response_gap_bound`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Best-response gap of the output's `w` block.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_w: Option<f64>,
    /// Best-response gap of the output's `v` block.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_v: Option<f64>,
    /// Realized empirical saddle-point gap of the output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strong_gap_emp: Option<f64>,
    /// Mean empirical saddle-point gap over dataset draws (a common upper
    /// bound is also accepted).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strong_gap_emp_mean: Option<f64>,
}

/// Result of evaluating one named bound: the right-hand-side value and a
/// description of the left-hand side it controls (with its coefficient), so
/// downstream comparisons are made like-for-like.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BoundEvaluation {
    pub name: String,
    pub value: f64,
    pub left_side: &'static str,
}

/// Names accepted by [`evaluate_named`].
pub const BOUND_NAMES: [&str; 10] = [
    "argument_stability",
    "best_response_gap",
    "strong_pd_empirical",
    "plain_generalization",
    "primal_generalization",
    "primal_excess_risk",
    "strong_pd_population",
    "strong_pd_generalization",
    "weak_pd_population",
    "weak_pd_generalization",
];

fn need_f(value: Option<f64>, key: &str, bound: &str) -> Result<f64> {
    value.ok_or_else(|| {
        Error::Config(format!("{key}: required by bound '{bound}' but missing"))
    })
}

fn need_u(value: Option<u64>, key: &str, bound: &str) -> Result<u64> {
    value.ok_or_else(|| {
        Error::Config(format!("{key}: required by bound '{bound}' but missing"))
    })
}

/// Evaluates the bound named `name` on `inputs`, validating that every field
/// the bound needs is present.
pub fn evaluate_named(name: &str, inputs: &BoundInputs) -> Result<BoundEvaluation> {
    let i = inputs;
    let (value, left_side) = match name {
        "argument_stability" => (
            argument_stability_bound(
                need_f(i.lipschitz, "lipschitz", name)?,
                need_f(i.rho, "rho", name)?,
                need_f(i.sigma, "sigma", name)?,
                need_u(i.steps, "steps", name)?,
                need_u(i.n, "n", name)?,
                need_u(i.dim, "dim", name)?,
                need_f(i.zeta, "zeta", name)?,
                need_f(i.gap_w, "gap_w", name)?,
                need_f(i.gap_v, "gap_v", name)?,
            )?,
            "||w_S - w_S'|| + ||v_S - v_S'|| over coupled runs on adjacent datasets",
        ),
        "best_response_gap" => (
            best_response_gap_bound(
                need_f(i.lipschitz, "lipschitz", name)?,
                need_f(i.rho, "rho", name)?,
                need_f(i.sigma, "sigma", name)?,
                need_u(i.steps, "steps", name)?,
                need_u(i.dim, "dim", name)?,
                need_f(i.radius, "radius", name)?,
                need_f(i.zeta, "zeta", name)?,
            )?,
            "distance from one output block to its exact best response",
        ),
        "strong_pd_empirical" => (
            strong_pd_empirical_bound(
                need_f(i.lipschitz, "lipschitz", name)?,
                need_f(i.rho, "rho", name)?,
                need_f(i.sigma, "sigma", name)?,
                need_u(i.steps, "steps", name)?,
                need_u(i.dim, "dim", name)?,
                need_f(i.zeta, "zeta", name)?,
                need_f(i.gap_w, "gap_w", name)?,
                need_f(i.gap_v, "gap_v", name)?,
            )?,
            "sup_v L_S(w_out, v) - inf_w L_S(w, v_out)",
        ),
        "plain_generalization" => (
            plain_generalization_bound(
                need_f(i.gamma, "gamma", name)?,
                need_f(i.lipschitz, "lipschitz", name)?,
                need_f(i.loss_range, "loss_range", name)?,
                need_u(i.n, "n", name)?,
                need_f(i.iota, "iota", name)?,
                need_f(i.zeta, "zeta", name)?,
            )?,
            "L(w_out, v_out) - L_S(w_out, v_out) / (1 - iota)",
        ),
        "primal_generalization" => (
            primal_generalization_bound(
                need_f(i.gamma, "gamma", name)?,
                need_f(i.lipschitz, "lipschitz", name)?,
                need_f(i.smoothness, "smoothness", name)?,
                need_f(i.rho, "rho", name)?,
                need_f(i.loss_range, "loss_range", name)?,
                need_u(i.n, "n", name)?,
                need_f(i.iota, "iota", name)?,
                need_f(i.zeta, "zeta", name)?,
            )?,
            "R(w_out) - R_S(w_out) / (1 - iota)",
        ),
        "primal_excess_risk" => (
            primal_excess_risk_bound(
                need_f(i.gamma, "gamma", name)?,
                need_f(i.lipschitz, "lipschitz", name)?,
                need_f(i.smoothness, "smoothness", name)?,
                need_f(i.rho, "rho", name)?,
                need_f(i.loss_range, "loss_range", name)?,
                need_u(i.n, "n", name)?,
                need_f(i.iota, "iota", name)?,
                need_f(i.zeta, "zeta", name)?,
                need_f(i.strong_gap_emp, "strong_gap_emp", name)?,
            )?,
            "R(w_out) - (1 + iota)/(1 - iota) * inf_w R(w)",
        ),
        "strong_pd_population" => (
            strong_pd_population_bound(
                need_f(i.gamma, "gamma", name)?,
                need_f(i.lipschitz, "lipschitz", name)?,
                need_f(i.smoothness, "smoothness", name)?,
                need_f(i.rho, "rho", name)?,
                need_f(i.loss_range, "loss_range", name)?,
                need_u(i.n, "n", name)?,
                need_f(i.iota, "iota", name)?,
                need_f(i.zeta, "zeta", name)?,
                need_f(i.strong_gap_emp, "strong_gap_emp", name)?,
                need_f(i.strong_gap_emp_mean, "strong_gap_emp_mean", name)?,
            )?,
            "sup_v L(w_out, v) - inf_w L(w, v_out)",
        ),
        "strong_pd_generalization" => (
            strong_pd_generalization_bound(
                need_f(i.gamma, "gamma", name)?,
                need_f(i.lipschitz, "lipschitz", name)?,
                need_f(i.smoothness, "smoothness", name)?,
                need_f(i.rho, "rho", name)?,
                need_f(i.loss_range, "loss_range", name)?,
                need_u(i.n, "n", name)?,
                need_f(i.iota, "iota", name)?,
                need_f(i.zeta, "zeta", name)?,
                need_f(i.strong_gap_emp_mean, "strong_gap_emp_mean", name)?,
            )?,
            "population saddle gap minus empirical saddle gap (strong form)",
        ),
        "weak_pd_population" => (
            weak_pd_population_bound(
                need_f(i.gamma, "gamma", name)?,
                need_f(i.lipschitz, "lipschitz", name)?,
                need_f(i.smoothness, "smoothness", name)?,
                need_f(i.rho, "rho", name)?,
                need_f(i.loss_range, "loss_range", name)?,
                need_u(i.n, "n", name)?,
                need_f(i.iota, "iota", name)?,
                need_f(i.zeta, "zeta", name)?,
                need_f(i.strong_gap_emp, "strong_gap_emp", name)?,
            )?,
            "sup_v E[L(w_out, v)] - inf_w E[L(w, v_out)] (weak form)",
        ),
        "weak_pd_generalization" => (
            weak_pd_generalization_bound(
                need_f(i.gamma, "gamma", name)?,
                need_f(i.lipschitz, "lipschitz", name)?,
                need_f(i.smoothness, "smoothness", name)?,
                need_f(i.rho, "rho", name)?,
                need_f(i.loss_range, "loss_range", name)?,
                need_u(i.n, "n", name)?,
                need_f(i.iota, "iota", name)?,
                need_f(i.zeta, "zeta", name)?,
                need_f(i.strong_gap_emp, "strong_gap_emp", name)?,
            )?,
            "weak population saddle gap minus weak empirical saddle gap",
        ),
        other => {
            return Err(Error::Config(format!(
                "bound: unknown name '{other}', expected one of {}",
                BOUND_NAMES.join(", ")
            )))
        }
    };
    Ok(BoundEvaluation { name: name.to_string(), value, left_side })
}
