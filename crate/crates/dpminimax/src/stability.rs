//! Empirical argument stability via coupled adjacent-dataset runs.
//!
//! For a sampled index `i` and a fresh replacement point, the algorithm is
//! executed on `S` and on `S` with position `i` replaced, under common
//! random numbers (identical noise draws, see
//! [`crate::optimizer::coupled_runs`]). The recorded distance is
//! `||avg_w - avg_w'|| + ||avg_v - avg_v'||`. Each sample also evaluates
//! the closed-form stability bound with the same `(sigma, T, n)`, the
//! requested confidence, and the best-response distances `g_w`, `g_v`
//! measured on that sample's `S`-run, so containment can be checked sample
//! by sample.
//!
//! The estimator samples index/replacement pairs uniformly and reports the
//! maximum and quantiles — an understatement of the worst-case supremum
//! over all adjacent pairs, which is intractable; containment statistics
//! only require valid samples, not the exact sup. Samples run in parallel
//! and are reduced in a fixed order, so reports are reproducible for a
//! given generator state regardless of thread count.

use rayon::prelude::*;

use crate::bounds::argument_stability_bound;
use crate::error::{Error, Result};
use crate::numerics::{quantile, sample_ball, RngState, Vector};
use crate::optimizer::{coupled_runs, Schedule};
use crate::privacy::NoisePlan;
use crate::problem::{prepare, Dataset, ProblemInstance};
use crate::risk::{g_distances_prepared, DEFAULT_INNER_CAP};

/// Stream label for sampling which indices to replace.
const INDEX_STREAM: u64 = 0x6964_7800;
/// Per-sample label base for replacement-point draws.
const REPLACEMENT_BASE: u64 = 0x7265_706c_0000_0000;
/// Per-sample label base for the shared noise stream.
const NOISE_BASE: u64 = 0x6e6f_6973_0000_0000;

/// Configuration of the stability estimator.
#[derive(Debug, Clone)]
pub struct GammaParams {
    /// Distinct dataset positions to perturb (at most `n`).
    pub num_indices: usize,
    /// Fresh replacement points per chosen index.
    pub num_replacements: usize,
    /// Confidence level for the per-sample theoretical bound.
    pub zeta: f64,
    /// Inner-solver tolerance for measuring `g_w`, `g_v`.
    pub tol: f64,
}

impl Default for GammaParams {
    fn default() -> Self {
        Self { num_indices: 8, num_replacements: 4, zeta: 0.1, tol: 1e-8 }
    }
}

/// One coupled-run measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilitySample {
    /// Dataset position that was replaced.
    pub index: usize,
    /// Seed of the stream that drew the replacement point.
    pub replacement_seed: u64,
    /// `||avg_w - avg_w'|| + ||avg_v - avg_v'||` across the coupled pair.
    pub distance: f64,
    /// Closed-form stability bound evaluated with this sample's measured
    /// best-response distances.
    pub gamma_bound: f64,
}

/// Aggregated stability measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub samples: Vec<StabilitySample>,
    pub max_distance: f64,
    /// Median of the sample distances.
    pub q50_distance: f64,
    /// 90th percentile of the sample distances.
    pub q90_distance: f64,
    /// Median of the per-sample theoretical bounds.
    pub theoretical_gamma: f64,
    /// Fraction of samples whose distance is within their own bound.
    pub containment_rate: f64,
    /// Configuration echo.
    pub n: usize,
    pub steps: usize,
    pub sigma: f64,
    pub zeta: f64,
    /// Generator state (seed, counter) the sample streams derive from.
    pub seed_state: (u64, u64),
}

impl StabilityReport {
    /// CSV serialization: schema comment, header, one row per sample, and a
    /// trailing summary row. In the summary row `index` carries the sample
    /// count, `distance` the maximum distance, `gamma_bound` the median
    /// theoretical bound, and `containment_rate` its named value (sample
    /// rows leave that column empty).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# schema=stability@1\n");
        out.push_str("kind,index,replacement_seed,distance,gamma_bound,containment_rate\n");
        for s in &self.samples {
            out.push_str(&format!(
                "sample,{},{},{:.16e},{:.16e},\n",
                s.index, s.replacement_seed, s.distance, s.gamma_bound
            ));
        }
        out.push_str(&format!(
            "summary,{},0,{:.16e},{:.16e},{:.16e}\n",
            self.samples.len(),
            self.max_distance,
            self.theoretical_gamma,
            self.containment_rate
        ));
        out
    }
}

/// Copy of `data` with position `index` replaced by `z_new` (which must lie
/// in the instance's data ball).
pub fn make_adjacent(
    inst: &ProblemInstance,
    data: &Dataset,
    index: usize,
    z_new: Vector,
) -> Result<Dataset> {
    data.replace(inst, index, z_new)
}

/// Runs the coupled stability estimator.
///
/// `rng` is a derivation root: every sample derives its own replacement and
/// noise streams from it, so the report is a pure function of the inputs.
pub fn empirical_gamma(
    inst: &ProblemInstance,
    data: &Dataset,
    steps: usize,
    schedule: &Schedule,
    noise: Option<&NoisePlan>,
    params: &GammaParams,
    rng: &RngState,
) -> Result<StabilityReport> {
    let n = data.n();
    if params.num_indices == 0 || params.num_replacements == 0 {
        return Err(Error::InvalidInput(
            "num_indices and num_replacements must be >= 1".into(),
        ));
    }
    if params.num_indices > n {
        return Err(Error::InvalidInput(format!(
            "num_indices {} exceeds the dataset size {n}",
            params.num_indices
        )));
    }
    let sigma = noise.map_or(0.0, |p| p.sigma);
    let indices = sample_indices(n, params.num_indices, &mut rng.derive(INDEX_STREAM));
    let prep = prepare(inst, data)?;

    // Fixed work list: sample k perturbs indices[k / num_replacements].
    let work: Vec<(usize, u64)> = indices
        .iter()
        .flat_map(|&i| (0..params.num_replacements).map(move |_| i))
        .enumerate()
        .map(|(k, i)| (i, k as u64))
        .collect();

    let samples: Vec<StabilitySample> = work
        .par_iter()
        .map(|&(index, k)| -> Result<StabilitySample> {
            let mut repl_rng = rng.derive(REPLACEMENT_BASE | k);
            let replacement_seed = repl_rng.seed();
            let z_new = sample_ball(inst.dim_z, inst.data_radius, &mut repl_rng)?;
            let adj = make_adjacent(inst, data, index, z_new)?;
            let mut noise_rng = rng.derive(NOISE_BASE | k);
            let (traj_s, traj_adj) =
                coupled_runs(inst, data, &adj, steps, schedule, noise, &mut noise_rng, false)?;
            let distance = traj_s.avg_w.dist(&traj_adj.avg_w) + traj_s.avg_v.dist(&traj_adj.avg_v);
            let (g_w, g_v) =
                g_distances_prepared(inst, &prep, &traj_s, params.tol, DEFAULT_INNER_CAP)?;
            let gamma_bound = argument_stability_bound(
                inst.lipschitz,
                inst.rho,
                sigma,
                steps as u64,
                n as u64,
                inst.dim_p() as u64,
                params.zeta,
                g_w,
                g_v,
            )?;
            Ok(StabilitySample { index, replacement_seed, distance, gamma_bound })
        })
        .collect::<Result<_>>()?;

    let distances: Vec<f64> = samples.iter().map(|s| s.distance).collect();
    let bounds: Vec<f64> = samples.iter().map(|s| s.gamma_bound).collect();
    let contained = samples.iter().filter(|s| s.distance <= s.gamma_bound).count();
    Ok(StabilityReport {
        max_distance: distances.iter().cloned().fold(0.0, f64::max),
        q50_distance: quantile(&distances, 0.5)?,
        q90_distance: quantile(&distances, 0.9)?,
        theoretical_gamma: quantile(&bounds, 0.5)?,
        containment_rate: contained as f64 / samples.len() as f64,
        n,
        steps,
        sigma,
        zeta: params.zeta,
        seed_state: rng.state(),
        samples,
    })
}

/// `count` distinct positions in `0..n`, uniform without replacement
/// (partial Fisher-Yates); all of them, in order, when `count == n`.
fn sample_indices(n: usize, count: usize, rng: &mut RngState) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    if count >= n {
        return all;
    }
    for slot in 0..count {
        let j = slot + (rng.next_u64() as usize) % (n - slot);
        all.swap(slot, j);
    }
    all.truncate(count);
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::least_squares_slope;
    use crate::problem::{gen_dataset, make_quadratic_saddle, QuadraticSaddleSpec};
    use nalgebra::DMatrix;

    fn bench_instance() -> ProblemInstance {
        make_quadratic_saddle(&QuadraticSaddleSpec::cyclic(8, 1.0, 0.5, 1.0)).unwrap()
    }

    fn test_plan(sigma: f64, steps: usize) -> NoisePlan {
        NoisePlan {
            sigma,
            c: 0.0,
            t: steps,
            lipschitz: 1.0,
            n: 1,
            epsilon: 1.0,
            delta: 0.5,
            achieved_delta: None,
            lambda_star: None,
            valid: true,
        }
    }

    #[test]
    fn adjacency_constructor_replaces_exactly_one_point() {
        let inst = bench_instance();
        let data = gen_dataset(&inst, 5, 3).unwrap();
        let z_new = sample_ball(inst.dim_z, inst.data_radius, &mut RngState::new(4)).unwrap();

        let same = make_adjacent(&inst, &data, 1, data.points()[1].clone()).unwrap();
        assert_eq!(same, data);

        let adj = make_adjacent(&inst, &data, 1, z_new.clone()).unwrap();
        let differing = data
            .points()
            .iter()
            .zip(adj.points())
            .filter(|(a, b)| a != b)
            .count();
        assert_eq!(differing, 1);

        let singleton = gen_dataset(&inst, 1, 9).unwrap();
        let swapped = make_adjacent(&inst, &singleton, 0, z_new.clone()).unwrap();
        assert_eq!(swapped.points(), &[z_new.clone()]);

        assert!(make_adjacent(&inst, &data, 5, z_new).is_err());
        let outside = Vector::new(vec![9.0; inst.dim_z]).unwrap();
        assert!(make_adjacent(&inst, &data, 0, outside).is_err());
    }

    #[test]
    fn coupled_distance_is_symmetric_and_zero_on_equal_sets() {
        let inst = bench_instance();
        let data = gen_dataset(&inst, 20, 5).unwrap();
        let sched = Schedule::new(inst.rho, 0.0).unwrap();
        let plan = test_plan(0.4, 30);

        let mut rng = RngState::new(6);
        let (a, b) =
            coupled_runs(&inst, &data, &data, 30, &sched, Some(&plan), &mut rng, false).unwrap();
        assert_eq!(a.avg_w.dist(&b.avg_w) + a.avg_v.dist(&b.avg_v), 0.0);

        let z_new = sample_ball(inst.dim_z, inst.data_radius, &mut RngState::new(7)).unwrap();
        let adj = make_adjacent(&inst, &data, 3, z_new).unwrap();
        let mut rng = RngState::new(6);
        let (a, b) =
            coupled_runs(&inst, &data, &adj, 30, &sched, Some(&plan), &mut rng, false).unwrap();
        let forward = a.avg_w.dist(&b.avg_w) + a.avg_v.dist(&b.avg_v);
        let mut rng = RngState::new(6);
        let (c, d) =
            coupled_runs(&inst, &adj, &data, 30, &sched, Some(&plan), &mut rng, false).unwrap();
        let backward = c.avg_w.dist(&d.avg_w) + c.avg_v.dist(&d.avg_v);
        assert_eq!(forward, backward);
        assert!(forward > 0.0);
    }

    #[test]
    fn data_independent_loss_has_exactly_zero_stability_samples() {
        // Zero maps make the gradients data-free; replacing any point is a
        // no-op for the coupled dynamics, the degenerate all-zeros case.
        let flat = make_quadratic_saddle(&QuadraticSaddleSpec {
            a: DMatrix::zeros(2, 2),
            c: DMatrix::zeros(2, 2),
            b: DMatrix::zeros(2, 2),
            data_radius: 1.0,
            rho: 1.0,
        })
        .unwrap();
        let data = gen_dataset(&flat, 10, 8).unwrap();
        let sched = Schedule::new(flat.rho, 0.0).unwrap();
        let params = GammaParams { num_indices: 5, num_replacements: 2, ..GammaParams::default() };
        let report = empirical_gamma(
            &flat,
            &data,
            25,
            &sched,
            Some(&test_plan(0.5, 25)),
            &params,
            &RngState::new(10),
        )
        .unwrap();
        assert_eq!(report.samples.len(), 10);
        for s in &report.samples {
            assert_eq!(s.distance, 0.0);
        }
        assert_eq!(report.max_distance, 0.0);
        assert_eq!(report.containment_rate, 1.0);
    }

    #[test]
    fn noiseless_stability_decays_like_one_over_n() {
        let inst = bench_instance();
        let sched = Schedule::new(inst.rho, 0.0).unwrap();
        let params = GammaParams { num_indices: 3, num_replacements: 1, ..GammaParams::default() };
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for n in [100usize, 200, 400, 800] {
            let data = gen_dataset(&inst, n, 11).unwrap();
            let report = empirical_gamma(
                &inst,
                &data,
                10_000,
                &sched,
                None,
                &params,
                &RngState::new(12),
            )
            .unwrap();
            assert!(report.max_distance > 0.0);
            xs.push((n as f64).ln());
            ys.push(report.max_distance.ln());
        }
        let slope = least_squares_slope(&xs, &ys).unwrap();
        assert!(
            (-1.25..=-0.75).contains(&slope),
            "noiseless stability slope {slope} outside [-1.25, -0.75]"
        );
    }

    #[test]
    fn containment_holds_at_the_stated_confidence() {
        let inst = bench_instance();
        let data = gen_dataset(&inst, 50, 13).unwrap();
        let sched = Schedule::new(inst.rho, 0.0).unwrap();
        let params = GammaParams {
            num_indices: 50,
            num_replacements: 4,
            zeta: 0.1,
            tol: 1e-8,
        };
        let report = empirical_gamma(
            &inst,
            &data,
            50,
            &sched,
            Some(&test_plan(0.3, 50)),
            &params,
            &RngState::new(14),
        )
        .unwrap();
        let r = report.samples.len() as f64;
        assert!(r >= 200.0);
        let exceed = 1.0 - report.containment_rate;
        let budget = 0.1 + 3.0 * (0.1f64 * 0.9 / r).sqrt();
        assert!(exceed <= budget, "exceedance {exceed} above {budget}");
        assert!(report.q50_distance <= report.q90_distance);
        assert!(report.q90_distance <= report.max_distance);
        assert!(report.theoretical_gamma > 0.0);
    }

    #[test]
    fn report_is_deterministic_for_a_fixed_root() {
        let inst = bench_instance();
        let data = gen_dataset(&inst, 30, 15).unwrap();
        let sched = Schedule::new(inst.rho, 0.0).unwrap();
        let params = GammaParams { num_indices: 4, num_replacements: 2, ..GammaParams::default() };
        let plan = test_plan(0.2, 20);
        let a = empirical_gamma(&inst, &data, 20, &sched, Some(&plan), &params, &RngState::new(16))
            .unwrap();
        let b = empirical_gamma(&inst, &data, 20, &sched, Some(&plan), &params, &RngState::new(16))
            .unwrap();
        assert_eq!(a, b);
        let c = empirical_gamma(&inst, &data, 20, &sched, Some(&plan), &params, &RngState::new(17))
            .unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn estimator_validates_its_parameters() {
        let inst = bench_instance();
        let data = gen_dataset(&inst, 10, 18).unwrap();
        let sched = Schedule::new(inst.rho, 0.0).unwrap();
        let too_many =
            GammaParams { num_indices: 11, num_replacements: 1, ..GammaParams::default() };
        assert!(
            empirical_gamma(&inst, &data, 5, &sched, None, &too_many, &RngState::new(0)).is_err()
        );
        let zero = GammaParams { num_indices: 0, num_replacements: 1, ..GammaParams::default() };
        assert!(empirical_gamma(&inst, &data, 5, &sched, None, &zero, &RngState::new(0)).is_err());
    }

    #[test]
    fn csv_has_sample_rows_and_a_summary_row() {
        let inst = bench_instance();
        let data = gen_dataset(&inst, 12, 19).unwrap();
        let sched = Schedule::new(inst.rho, 0.0).unwrap();
        let params = GammaParams { num_indices: 3, num_replacements: 2, ..GammaParams::default() };
        let report =
            empirical_gamma(&inst, &data, 10, &sched, None, &params, &RngState::new(20)).unwrap();
        let text = report.to_csv();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema=stability@1");
        assert_eq!(
            lines[1],
            "kind,index,replacement_seed,distance,gamma_bound,containment_rate"
        );
        assert_eq!(lines.len(), 2 + 6 + 1);
        assert!(lines[2].starts_with("sample,"));
        let summary = lines.last().unwrap();
        assert!(summary.starts_with("summary,6,0,"));
        let max_field: f64 = summary.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(max_field, report.max_distance);
    }

    #[test]
    fn index_sampling_is_uniform_without_replacement() {
        let mut rng = RngState::new(21);
        let picked = sample_indices(10, 6, &mut rng);
        assert_eq!(picked.len(), 6);
        let mut sorted = picked.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 6);
        for &i in &picked {
            assert!(i < 10);
        }
        assert_eq!(sample_indices(4, 4, &mut rng), vec![0, 1, 2, 3]);
    }
}
