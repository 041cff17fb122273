//! Minimax loss instances with certified constants.
//!
//! A [`ProblemInstance`] packages a pointwise loss `l(w, v; z)`, its two
//! gradient blocks, the feasible radii, and the analytic constants the rest
//! of the library relies on: the strong convexity/concavity modulus `rho`,
//! the per-sample gradient bound `lipschitz`, the gradient smoothness
//! `smooth`, and the pointwise loss range `loss_bound`. Instances are
//! immutable and freely shareable across threads.
//!
//! Two synthetic families are provided:
//!
//! * [`make_quadratic_saddle`] — a coupled quadratic
//!   `l = (rho/2)||w - Az||^2 + w' B v - (rho/2)||v - Cz||^2 + offset` whose
//!   empirical saddle point solves a linear system ([`closed_form_saddle`]),
//!   making it the precision oracle for optimizer and stability tests. All
//!   constants are analytic.
//! * [`make_auc_instance`] — a square-loss AUC surrogate with minimization
//!   block `u = (w, a, b)` and a scalar adversarial block, made strongly
//!   convex-concave by explicit `(rho/2)` regularizers. Its constants have
//!   no closed form and are estimated by sampling with a 1.25 safety
//!   inflation.
//!
//! Data points live in a Euclidean ball of radius `data_radius`; datasets
//! are i.i.d. uniform draws from that ball ([`gen_dataset`], [`eval_set`]).
//! Keeping the data bounded is what makes the gradient bound `G` certifiable.
//!
//! [`PreparedData`] caches the sufficient statistics of a dataset (block
//! means for the quadratic family, per-class first/second moments for the
//! AUC family) so that empirical losses and gradients cost `O(dim^2)`
//! per evaluation instead of `O(n dim)`; the naive per-point route
//! ([`empirical_loss`]) is kept as the definitional reference that the
//! prepared route must reproduce.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::{sample_ball, RngState, Vector};

/// Stream label separating training-set draws from other uses of a seed.
const TRAIN_STREAM: u64 = 0x7261_696e;
/// Stream label for held-out evaluation sets.
const EVAL_STREAM: u64 = 0x6576_616c;
/// Stream label for constant-estimation sampling in the AUC generator.
const ESTIMATE_STREAM: u64 = 0x6573_7469;

// ===== Instance =====

/// Coupled quadratic family: `(rho/2)||w - Az||^2 + w' B v
/// - (rho/2)||v - Cz||^2 + offset`.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    /// `dim_w x dim_z` map from a data point to the `w`-block target.
    pub a: DMatrix<f64>,
    /// `dim_v x dim_z` map from a data point to the `v`-block target.
    pub c: DMatrix<f64>,
    /// `dim_w x dim_v` bilinear coupling.
    pub b: DMatrix<f64>,
}

/// Square-loss AUC surrogate. A data point is `z = [x; m]` with features
/// `x` and a class marker `m` whose sign is the label (`m > 0` is class 1).
#[derive(Debug, Clone)]
pub struct AucForm {
    /// Class-1 prior weight `q` in the surrogate.
    pub q: f64,
    /// Feature dimension (the minimization block has `feature_dim + 2`
    /// coordinates: `w`, then the two class thresholds).
    pub feature_dim: usize,
}

/// The loss family backing an instance.
#[derive(Debug, Clone)]
pub enum InstanceKind {
    Quadratic(QuadraticForm),
    Auc(AucForm),
}

/// An immutable minimax problem: loss oracles plus certified constants.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub dim_w: usize,
    pub dim_v: usize,
    pub dim_z: usize,
    /// Feasible-ball radius of the minimization block (`M_W`).
    pub radius_w: f64,
    /// Feasible-ball radius of the maximization block (`M_V`).
    pub radius_v: f64,
    /// Radius of the ball containing every data point.
    pub data_radius: f64,
    /// Strong convexity/concavity modulus.
    pub rho: f64,
    /// Certified per-sample gradient-norm bound `G` (both blocks).
    pub lipschitz: f64,
    /// Certified gradient smoothness `L`.
    pub smooth: f64,
    /// Certified pointwise loss range: `0 <= l <= loss_bound`.
    pub loss_bound: f64,
    /// Constant added to the raw loss so it is non-negative on the domain.
    pub offset: f64,
    pub kind: InstanceKind,
}

impl ProblemInstance {
    /// Largest block dimension, the single `p` reported to bound formulas
    /// when the two blocks disagree (the underlying analysis assumes one
    /// shared dimension; taking the max is the conservative reading).
    pub fn dim_p(&self) -> usize {
        self.dim_w.max(self.dim_v)
    }

    fn check_dims(&self, w: &Vector, v: &Vector, z: &Vector) -> Result<()> {
        if w.dim() != self.dim_w {
            return Err(Error::DimensionMismatch { expected: self.dim_w, got: w.dim() });
        }
        if v.dim() != self.dim_v {
            return Err(Error::DimensionMismatch { expected: self.dim_v, got: v.dim() });
        }
        if z.dim() != self.dim_z {
            return Err(Error::DimensionMismatch { expected: self.dim_z, got: z.dim() });
        }
        Ok(())
    }

    /// Pointwise loss `l(w, v; z)` (offset included).
    pub fn loss(&self, w: &Vector, v: &Vector, z: &Vector) -> Result<f64> {
        self.check_dims(w, v, z)?;
        Ok(match &self.kind {
            InstanceKind::Quadratic(q) => {
                let (w, v, z) = (as_dvec(w), as_dvec(v), as_dvec(z));
                let rw = &w - &q.a * &z;
                let rv = &v - &q.c * &z;
                0.5 * self.rho * rw.norm_squared() + (w.transpose() * &q.b * &v)[(0, 0)]
                    - 0.5 * self.rho * rv.norm_squared()
                    + self.offset
            }
            InstanceKind::Auc(f) => auc_loss(f, self.rho, self.offset, w, v, z),
        })
    }

    /// Gradient of the pointwise loss in the minimization block.
    pub fn grad_w(&self, w: &Vector, v: &Vector, z: &Vector) -> Result<Vector> {
        self.check_dims(w, v, z)?;
        Ok(match &self.kind {
            InstanceKind::Quadratic(q) => {
                let (wd, vd, zd) = (as_dvec(w), as_dvec(v), as_dvec(z));
                let g = self.rho * (&wd - &q.a * &zd) + &q.b * &vd;
                from_dvec(g)
            }
            InstanceKind::Auc(f) => auc_grad_u(f, self.rho, w, v, z),
        })
    }

    /// Gradient of the pointwise loss in the maximization block.
    pub fn grad_v(&self, w: &Vector, v: &Vector, z: &Vector) -> Result<Vector> {
        self.check_dims(w, v, z)?;
        Ok(match &self.kind {
            InstanceKind::Quadratic(q) => {
                let (wd, vd, zd) = (as_dvec(w), as_dvec(v), as_dvec(z));
                let g = q.b.transpose() * &wd - self.rho * (&vd - &q.c * &zd);
                from_dvec(g)
            }
            InstanceKind::Auc(f) => auc_grad_alpha(f, self.rho, w, v, z),
        })
    }
}

fn as_dvec(x: &Vector) -> DVector<f64> {
    DVector::from_column_slice(x.as_slice())
}

fn from_dvec(x: DVector<f64>) -> Vector {
    Vector::new(x.iter().copied().collect()).expect("finite arithmetic result")
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

// ===== AUC loss pieces =====

/// Splits an AUC point `z = [x; m]` into features and the `{-1, +1}` label.
fn auc_split(f: &AucForm, z: &Vector) -> (DVector<f64>, bool) {
    let x = DVector::from_column_slice(&z.as_slice()[..f.feature_dim]);
    let positive = z.as_slice()[f.feature_dim] > 0.0;
    (x, positive)
}

/// Splits the minimization block `u = (w, a, b)`.
fn auc_split_u(f: &AucForm, u: &Vector) -> (DVector<f64>, f64, f64) {
    let w = DVector::from_column_slice(&u.as_slice()[..f.feature_dim]);
    let a = u.as_slice()[f.feature_dim];
    let b = u.as_slice()[f.feature_dim + 1];
    (w, a, b)
}

fn auc_loss(f: &AucForm, rho: f64, offset: f64, u: &Vector, v: &Vector, z: &Vector) -> f64 {
    let (w, a, b) = auc_split_u(f, u);
    let (x, positive) = auc_split(f, z);
    let alpha = v.as_slice()[0];
    let s = w.dot(&x);
    let q = f.q;
    let class_term = if positive {
        (1.0 - q) * (s - a) * (s - a) - 2.0 * (1.0 + alpha) * s * (1.0 - q)
    } else {
        q * (s - b) * (s - b) + 2.0 * (1.0 + alpha) * s * q
    };
    class_term - q * (1.0 - q) * alpha * alpha + 0.5 * rho * u.norm_sq()
        - 0.5 * rho * alpha * alpha
        + offset
}

fn auc_grad_u(f: &AucForm, rho: f64, u: &Vector, v: &Vector, z: &Vector) -> Vector {
    let (w, a, b) = auc_split_u(f, u);
    let (x, positive) = auc_split(f, z);
    let alpha = v.as_slice()[0];
    let s = w.dot(&x);
    let q = f.q;
    let (mut gw, ga, gb);
    if positive {
        gw = (2.0 * (1.0 - q) * (s - a) - 2.0 * (1.0 + alpha) * (1.0 - q)) * x;
        ga = -2.0 * (1.0 - q) * (s - a);
        gb = 0.0;
    } else {
        gw = (2.0 * q * (s - b) + 2.0 * (1.0 + alpha) * q) * x;
        ga = 0.0;
        gb = -2.0 * q * (s - b);
    }
    gw += rho * &w;
    let mut out = Vec::with_capacity(f.feature_dim + 2);
    out.extend(gw.iter().copied());
    out.push(ga + rho * a);
    out.push(gb + rho * b);
    Vector::new(out).expect("finite arithmetic result")
}

fn auc_grad_alpha(f: &AucForm, rho: f64, u: &Vector, v: &Vector, z: &Vector) -> Vector {
    let (w, _, _) = auc_split_u(f, u);
    let (x, positive) = auc_split(f, z);
    let alpha = v.as_slice()[0];
    let s = w.dot(&x);
    let q = f.q;
    let class_sign = if positive { -(1.0 - q) } else { q };
    let g = 2.0 * s * class_sign - 2.0 * q * (1.0 - q) * alpha - rho * alpha;
    Vector::new(vec![g]).expect("finite arithmetic result")
}

// ===== Datasets =====

/// An ordered sample of data points, all inside the instance's data ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<Vector>,
    /// Seed the sample was drawn from (0 for datasets built point-by-point).
    pub source_seed: u64,
}

impl Dataset {
    /// Wraps explicit points, validating against the instance's data ball
    /// (with a hair of slack for round-tripped decimals).
    pub fn from_points(inst: &ProblemInstance, points: Vec<Vector>, seed: u64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("dataset must contain at least one point".into()));
        }
        for (i, z) in points.iter().enumerate() {
            if z.dim() != inst.dim_z {
                return Err(Error::DimensionMismatch { expected: inst.dim_z, got: z.dim() });
            }
            if z.norm() > inst.data_radius * (1.0 + 1e-12) {
                return Err(Error::InvalidInput(format!(
                    "point {i} has norm {} outside the data ball of radius {}",
                    z.norm(),
                    inst.data_radius
                )));
            }
        }
        Ok(Self { points, source_seed: seed })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    /// Copy with the point at `index` replaced (used to form adjacent
    /// datasets). The replacement must lie in the data ball.
    pub fn replace(&self, inst: &ProblemInstance, index: usize, z_new: Vector) -> Result<Self> {
        if index >= self.points.len() {
            return Err(Error::InvalidInput(format!(
                "replacement index {index} out of range for n={}",
                self.points.len()
            )));
        }
        let mut points = self.points.clone();
        points[index] = z_new;
        Self::from_points(inst, points, self.source_seed)
    }

    /// Serializes as CSV: a schema comment, a `z0,z1,...` header, then one
    /// point per row with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let dim = self.points[0].dim();
        let mut out = String::from("# schema=dataset@1\n");
        let header: Vec<String> = (0..dim).map(|j| format!("z{j}")).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for z in &self.points {
            let row: Vec<String> = z.iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the CSV format written by [`Dataset::to_csv`]. Comment lines
    /// (leading `#`) are skipped; the header fixes the dimension.
    pub fn from_csv(inst: &ProblemInstance, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("dataset CSV has no header row".into()))?;
        let dim = header.split(',').count();
        let mut points = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut coords = Vec::with_capacity(dim);
            for field in line.split(',') {
                let value: f64 = field.trim().parse().map_err(|_| {
                    Error::InvalidInput(format!("row {i}: cannot parse '{field}' as a number"))
                })?;
                coords.push(value);
            }
            if coords.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: coords.len() });
            }
            points.push(Vector::new(coords)?);
        }
        Self::from_points(inst, points, 0)
    }
}

/// Draws `n` i.i.d. points uniform in the instance's data ball, on a stream
/// derived from `seed` and reserved for training data.
pub fn gen_dataset(inst: &ProblemInstance, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidInput("dataset must contain at least one point".into()));
    }
    let mut rng = RngState::new(seed).derive(TRAIN_STREAM);
    let points = draw_points(inst, n, &mut rng)?;
    Dataset::from_points(inst, points, seed)
}

/// Draws a held-out evaluation sample on a stream disjoint from every
/// training stream with the same seed.
pub fn eval_set(inst: &ProblemInstance, n_eval: usize, seed: u64) -> Result<Dataset> {
    if n_eval == 0 {
        return Err(Error::InvalidInput("dataset must contain at least one point".into()));
    }
    let mut rng = RngState::new(seed).derive(EVAL_STREAM);
    let points = draw_points(inst, n_eval, &mut rng)?;
    Dataset::from_points(inst, points, seed)
}

fn draw_points(inst: &ProblemInstance, n: usize, rng: &mut RngState) -> Result<Vec<Vector>> {
    (0..n).map(|_| sample_ball(inst.dim_z, inst.data_radius, rng)).collect()
}

// ===== Empirical loss =====

/// Definitional empirical loss: the arithmetic mean of per-point losses.
pub fn empirical_loss(
    inst: &ProblemInstance,
    w: &Vector,
    v: &Vector,
    data: &Dataset,
) -> Result<f64> {
    let mut total = 0.0;
    for z in data.points() {
        total += inst.loss(w, v, z)?;
    }
    Ok(total / data.n() as f64)
}

/// Sufficient statistics of a dataset for one instance family; evaluating
/// empirical losses and gradients through these costs `O(dim^2)` regardless
/// of `n`.
#[derive(Debug, Clone)]
pub enum PreparedData {
    Quadratic {
        n: usize,
        /// `mean_i A z_i`.
        a_bar: DVector<f64>,
        /// `mean_i C z_i`.
        c_bar: DVector<f64>,
        /// `mean_i ||A z_i||^2`.
        mean_az_sq: f64,
        /// `mean_i ||C z_i||^2`.
        mean_cz_sq: f64,
    },
    Auc {
        n: usize,
        n_pos: usize,
        sum_x_pos: DVector<f64>,
        sum_x_neg: DVector<f64>,
        sum_xx_pos: DMatrix<f64>,
        sum_xx_neg: DMatrix<f64>,
    },
}

impl PreparedData {
    pub fn n(&self) -> usize {
        match self {
            PreparedData::Quadratic { n, .. } | PreparedData::Auc { n, .. } => *n,
        }
    }
}

/// Reduces a dataset to its sufficient statistics for `inst`'s family.
pub fn prepare(inst: &ProblemInstance, data: &Dataset) -> Result<PreparedData> {
    match &inst.kind {
        InstanceKind::Quadratic(q) => {
            let n = data.n();
            let mut a_bar = DVector::zeros(inst.dim_w);
            let mut c_bar = DVector::zeros(inst.dim_v);
            let (mut mean_az_sq, mut mean_cz_sq) = (0.0, 0.0);
            for z in data.points() {
                if z.dim() != inst.dim_z {
                    return Err(Error::DimensionMismatch { expected: inst.dim_z, got: z.dim() });
                }
                let zd = as_dvec(z);
                let az = &q.a * &zd;
                let cz = &q.c * &zd;
                mean_az_sq += az.norm_squared();
                mean_cz_sq += cz.norm_squared();
                a_bar += az;
                c_bar += cz;
            }
            let nf = n as f64;
            Ok(PreparedData::Quadratic {
                n,
                a_bar: a_bar / nf,
                c_bar: c_bar / nf,
                mean_az_sq: mean_az_sq / nf,
                mean_cz_sq: mean_cz_sq / nf,
            })
        }
        InstanceKind::Auc(f) => {
            let d = f.feature_dim;
            let mut n_pos = 0usize;
            let mut sum_x_pos = DVector::zeros(d);
            let mut sum_x_neg = DVector::zeros(d);
            let mut sum_xx_pos = DMatrix::zeros(d, d);
            let mut sum_xx_neg = DMatrix::zeros(d, d);
            for z in data.points() {
                if z.dim() != inst.dim_z {
                    return Err(Error::DimensionMismatch { expected: inst.dim_z, got: z.dim() });
                }
                let (x, positive) = auc_split(f, z);
                let outer = &x * x.transpose();
                if positive {
                    n_pos += 1;
                    sum_x_pos += &x;
                    sum_xx_pos += outer;
                } else {
                    sum_x_neg += &x;
                    sum_xx_neg += outer;
                }
            }
            Ok(PreparedData::Auc {
                n: data.n(),
                n_pos,
                sum_x_pos,
                sum_x_neg,
                sum_xx_pos,
                sum_xx_neg,
            })
        }
    }
}

/// Empirical loss through the sufficient statistics; equals
/// [`empirical_loss`] up to floating-point regrouping.
pub fn prepared_loss(
    inst: &ProblemInstance,
    prep: &PreparedData,
    w: &Vector,
    v: &Vector,
) -> Result<f64> {
    match (&inst.kind, prep) {
        (InstanceKind::Quadratic(q), PreparedData::Quadratic { a_bar, c_bar, mean_az_sq, mean_cz_sq, .. }) => {
            let (wd, vd) = (as_dvec(w), as_dvec(v));
            let quad_w = wd.norm_squared() - 2.0 * wd.dot(a_bar) + mean_az_sq;
            let quad_v = vd.norm_squared() - 2.0 * vd.dot(c_bar) + mean_cz_sq;
            Ok(0.5 * inst.rho * quad_w + (wd.transpose() * &q.b * &vd)[(0, 0)]
                - 0.5 * inst.rho * quad_v
                + inst.offset)
        }
        (InstanceKind::Auc(f), PreparedData::Auc { n, n_pos, sum_x_pos, sum_x_neg, sum_xx_pos, sum_xx_neg }) => {
            let (wv, a, b) = auc_split_u(f, w);
            let alpha = v.as_slice()[0];
            let q = f.q;
            let nf = *n as f64;
            let (npf, nnf) = (*n_pos as f64, (*n - *n_pos) as f64);
            // Per-class aggregates of w'x and (w'x)^2.
            let s_pos = wv.dot(sum_x_pos);
            let s_neg = wv.dot(sum_x_neg);
            let ss_pos = (wv.transpose() * sum_xx_pos * &wv)[(0, 0)];
            let ss_neg = (wv.transpose() * sum_xx_neg * &wv)[(0, 0)];
            let pos = (1.0 - q) * (ss_pos - 2.0 * a * s_pos + npf * a * a)
                - 2.0 * (1.0 + alpha) * (1.0 - q) * s_pos;
            let neg = q * (ss_neg - 2.0 * b * s_neg + nnf * b * b)
                + 2.0 * (1.0 + alpha) * q * s_neg;
            Ok((pos + neg) / nf - q * (1.0 - q) * alpha * alpha + 0.5 * inst.rho * w.norm_sq()
                - 0.5 * inst.rho * alpha * alpha
                + inst.offset)
        }
        _ => Err(Error::InvalidInput(
            "prepared statistics do not match the instance family".into(),
        )),
    }
}

/// Empirical gradient of the minimization block through the sufficient
/// statistics.
pub fn prepared_grad_w(
    inst: &ProblemInstance,
    prep: &PreparedData,
    w: &Vector,
    v: &Vector,
) -> Result<Vector> {
    match (&inst.kind, prep) {
        (InstanceKind::Quadratic(q), PreparedData::Quadratic { a_bar, .. }) => {
            let (wd, vd) = (as_dvec(w), as_dvec(v));
            Ok(from_dvec(inst.rho * (&wd - a_bar) + &q.b * &vd))
        }
        (InstanceKind::Auc(f), PreparedData::Auc { n, n_pos, sum_x_pos, sum_x_neg, sum_xx_pos, sum_xx_neg }) => {
            let (wv, a, b) = auc_split_u(f, w);
            let alpha = v.as_slice()[0];
            let q = f.q;
            let nf = *n as f64;
            let (npf, nnf) = (*n_pos as f64, (*n - *n_pos) as f64);
            let s_pos = wv.dot(sum_x_pos);
            let s_neg = wv.dot(sum_x_neg);
            // d/dw of the class sums.
            let gw = (2.0 * (1.0 - q) * (sum_xx_pos * &wv - a * sum_x_pos)
                - 2.0 * (1.0 + alpha) * (1.0 - q) * sum_x_pos
                + 2.0 * q * (sum_xx_neg * &wv - b * sum_x_neg)
                + 2.0 * (1.0 + alpha) * q * sum_x_neg)
                / nf
                + inst.rho * &wv;
            let ga = -2.0 * (1.0 - q) * (s_pos - npf * a) / nf + inst.rho * a;
            let gb = -2.0 * q * (s_neg - nnf * b) / nf + inst.rho * b;
            let mut out = Vec::with_capacity(f.feature_dim + 2);
            out.extend(gw.iter().copied());
            out.push(ga);
            out.push(gb);
            Vector::new(out)
        }
        _ => Err(Error::InvalidInput(
            "prepared statistics do not match the instance family".into(),
        )),
    }
}

/// Empirical gradient of the maximization block through the sufficient
/// statistics.
pub fn prepared_grad_v(
    inst: &ProblemInstance,
    prep: &PreparedData,
    w: &Vector,
    v: &Vector,
) -> Result<Vector> {
    match (&inst.kind, prep) {
        (InstanceKind::Quadratic(q), PreparedData::Quadratic { c_bar, .. }) => {
            let (wd, vd) = (as_dvec(w), as_dvec(v));
            Ok(from_dvec(q.b.transpose() * &wd - inst.rho * (&vd - c_bar)))
        }
        (InstanceKind::Auc(f), PreparedData::Auc { n, sum_x_pos, sum_x_neg, .. }) => {
            let (wv, _, _) = auc_split_u(f, w);
            let alpha = v.as_slice()[0];
            let q = f.q;
            let nf = *n as f64;
            let coupling =
                2.0 * (q * wv.dot(sum_x_neg) - (1.0 - q) * wv.dot(sum_x_pos)) / nf;
            let g = coupling - 2.0 * q * (1.0 - q) * alpha - inst.rho * alpha;
            Vector::new(vec![g])
        }
        _ => Err(Error::InvalidInput(
            "prepared statistics do not match the instance family".into(),
        )),
    }
}

// ===== Quadratic generator =====

/// Specification of a coupled quadratic instance. The generator derives the
/// feasible radii itself so the saddle stays interior (see
/// [`make_quadratic_saddle`]).
#[derive(Debug, Clone)]
pub struct QuadraticSaddleSpec {
    pub a: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub data_radius: f64,
    pub rho: f64,
}

impl QuadraticSaddleSpec {
    /// Identity targets with a scaled cyclic-permutation coupling, the
    /// benchmark configuration: `A = C = I_p`, `B = coupling * P` where `P`
    /// shifts coordinates cyclically (so `||B||_2 = coupling` exactly).
    pub fn cyclic(p: usize, rho: f64, coupling: f64, data_radius: f64) -> Self {
        let mut b = DMatrix::zeros(p, p);
        for i in 0..p {
            b[(i, (i + 1) % p)] = coupling;
        }
        Self {
            a: DMatrix::identity(p, p),
            c: DMatrix::identity(p, p),
            b,
            data_radius,
            rho,
        }
    }
}

/// Builds the coupled quadratic instance with analytic constants.
///
/// Loss: `(rho/2)||w - Az||^2 + w' B v - (rho/2)||v - Cz||^2 + offset`.
///
/// Sizing. For any dataset in the data ball the unconstrained saddle
/// satisfies `||w*|| <= alpha + beta * gamma_c` and
/// `||v*|| <= gamma_c + beta * alpha`, where `alpha = ||A|| r_z`,
/// `gamma_c = ||C|| r_z`, `beta = ||B|| / rho` (solve the saddle system and
/// bound `||(I + BB'/rho^2)^{-1}|| <= 1`). The radii are set to twice those
/// worst-case norms (floored at 1 so degenerate specs keep a usable domain),
/// which keeps the saddle strictly interior for every dataset — the
/// projection is inactive at the optimum and [`closed_form_saddle`] stays
/// exact even after single-point replacements.
///
/// Constants: `L = rho + ||B||`;
/// `G = rho * max(M_W + alpha, M_V + gamma_c) + ||B|| * max(M_W, M_V)`;
/// `offset` is the magnitude of the term-wise analytic minimum
/// (`||B|| M_W M_V + (rho/2)(M_V + gamma_c)^2`), which makes the loss
/// non-negative without moving gradients or saddle points; `loss_bound` is
/// the term-wise analytic maximum plus that offset.
pub fn make_quadratic_saddle(spec: &QuadraticSaddleSpec) -> Result<ProblemInstance> {
    let dim_w = spec.a.nrows();
    let dim_v = spec.c.nrows();
    let dim_z = spec.a.ncols();
    if spec.c.ncols() != dim_z {
        return Err(Error::Generator(format!(
            "C must have {dim_z} columns to match A, got {}",
            spec.c.ncols()
        )));
    }
    if spec.b.nrows() != dim_w || spec.b.ncols() != dim_v {
        return Err(Error::Generator(format!(
            "B must be {dim_w}x{dim_v}, got {}x{}",
            spec.b.nrows(),
            spec.b.ncols()
        )));
    }
    if !spec.rho.is_finite() || spec.rho <= 0.0 {
        return Err(Error::Generator(format!("rho: must be finite and > 0, got {}", spec.rho)));
    }
    if !spec.data_radius.is_finite() || spec.data_radius <= 0.0 {
        return Err(Error::Generator(format!(
            "data_radius: must be finite and > 0, got {}",
            spec.data_radius
        )));
    }
    let norm_b = spectral_norm(&spec.b);
    if !norm_b.is_finite() {
        return Err(Error::Generator("coupling matrix has non-finite entries".into()));
    }
    let alpha = spectral_norm(&spec.a) * spec.data_radius;
    let gamma_c = spectral_norm(&spec.c) * spec.data_radius;
    let beta = norm_b / spec.rho;
    let radius_w = (2.0 * (alpha + beta * gamma_c)).max(1.0);
    let radius_v = (2.0 * (gamma_c + beta * alpha)).max(1.0);
    // Guarded interiority check; the sizing above makes failure impossible.
    if alpha + beta * gamma_c >= radius_w || gamma_c + beta * alpha >= radius_v {
        return Err(Error::Generator(
            "unconstrained saddle touches the feasible boundary; enlarge the radii".into(),
        ));
    }
    let rho = spec.rho;
    let lipschitz =
        rho * (radius_w + alpha).max(radius_v + gamma_c) + norm_b * radius_w.max(radius_v);
    let smooth = rho + norm_b;
    let offset = norm_b * radius_w * radius_v + 0.5 * rho * (radius_v + gamma_c) * (radius_v + gamma_c);
    let loss_bound =
        0.5 * rho * (radius_w + alpha) * (radius_w + alpha) + norm_b * radius_w * radius_v + offset;
    Ok(ProblemInstance {
        dim_w,
        dim_v,
        dim_z,
        radius_w,
        radius_v,
        data_radius: spec.data_radius,
        rho,
        lipschitz,
        smooth,
        loss_bound,
        offset,
        kind: InstanceKind::Quadratic(QuadraticForm {
            a: spec.a.clone(),
            c: spec.c.clone(),
            b: spec.b.clone(),
        }),
    })
}

/// Solves the empirical saddle of a quadratic instance exactly.
///
/// The stationarity system is `rho (w - a_bar) + B v = 0`,
/// `B' w - rho (v - c_bar) = 0` with `a_bar = mean A z_i`,
/// `c_bar = mean C z_i`; it is solved densely and the residual is verified
/// to be at most `1e-10`.
pub fn closed_form_saddle(inst: &ProblemInstance, data: &Dataset) -> Result<(Vector, Vector)> {
    let q = match &inst.kind {
        InstanceKind::Quadratic(q) => q,
        InstanceKind::Auc(_) => {
            return Err(Error::InvalidInput(
                "closed-form saddle is only defined for the quadratic family".into(),
            ))
        }
    };
    let prep = prepare(inst, data)?;
    let (a_bar, c_bar) = match &prep {
        PreparedData::Quadratic { a_bar, c_bar, .. } => (a_bar.clone(), c_bar.clone()),
        PreparedData::Auc { .. } => unreachable!("quadratic preparation"),
    };
    let (dw, dv) = (inst.dim_w, inst.dim_v);
    let mut m = DMatrix::zeros(dw + dv, dw + dv);
    for i in 0..dw {
        m[(i, i)] = inst.rho;
    }
    for i in 0..dv {
        m[(dw + i, dw + i)] = -inst.rho;
    }
    m.view_mut((0, dw), (dw, dv)).copy_from(&q.b);
    m.view_mut((dw, 0), (dv, dw)).copy_from(&q.b.transpose());
    let mut rhs = DVector::zeros(dw + dv);
    rhs.rows_mut(0, dw).copy_from(&(inst.rho * &a_bar));
    rhs.rows_mut(dw, dv).copy_from(&(-inst.rho * &c_bar));
    let solution = m
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Generator("saddle system is singular".into()))?;
    let residual = (&m * &solution - &rhs).norm();
    if residual > 1e-10 {
        return Err(Error::NonConverged { residual, iterations: 1, tol: 1e-10 });
    }
    let w = Vector::new(solution.rows(0, dw).iter().copied().collect())?;
    let v = Vector::new(solution.rows(dw, dv).iter().copied().collect())?;
    Ok((w, v))
}

// ===== AUC generator =====

/// Specification of the AUC surrogate instance.
#[derive(Debug, Clone)]
pub struct AucSpec {
    /// Class-1 prior weight in `(0, 1)`.
    pub q: f64,
    /// Strong convexity/concavity modulus of the regularizers.
    pub rho: f64,
    /// Feature dimension (data points carry one extra label coordinate).
    pub feature_dim: usize,
    /// Feasible radius of the minimization block `(w, a, b)`.
    pub radius_primal: f64,
    /// Feasible radius of the scalar adversarial block.
    pub radius_dual: f64,
    /// Data-ball radius (features plus label coordinate).
    pub data_radius: f64,
    /// Sample count for constant estimation.
    pub estimation_samples: usize,
    /// Seed for constant estimation.
    pub seed: u64,
}

impl Default for AucSpec {
    fn default() -> Self {
        Self {
            q: 0.5,
            rho: 1.0,
            feature_dim: 5,
            radius_primal: 1.0,
            radius_dual: 1.0,
            data_radius: 1.0,
            estimation_samples: 1_000_000,
            seed: 0,
        }
    }
}

/// Builds the AUC surrogate instance, estimating `G`, `L`, the loss offset,
/// and the loss range by sampling.
///
/// Loss, for `u = (w, a, b)`, scalar adversary `alpha`, point `z = [x; m]`
/// with label `sign(m)` and prior weight `q`:
///
/// ```text
/// (1-q) (w'x - a)^2 [m > 0] + q (w'x - b)^2 [m <= 0]
///   + 2 (1 + alpha) w'x (q [m <= 0] - (1-q) [m > 0])
///   - q (1-q) alpha^2 + (rho/2)||u||^2 - (rho/2) alpha^2 + offset
/// ```
///
/// The explicit regularizers make the loss exactly `rho`-strongly convex in
/// `u` and at least `rho`-strongly concave in `alpha`. Constants are
/// estimated over `estimation_samples` random feasible tuples — gradient
/// norms for `G`, gradient-difference ratios for `L`, and value extremes for
/// the offset/range — then inflated by a 1.25 safety factor.
pub fn make_auc_instance(spec: &AucSpec) -> Result<ProblemInstance> {
    if !(spec.q > 0.0 && spec.q < 1.0) || !spec.q.is_finite() {
        return Err(Error::Generator(format!("q: must lie in (0,1), got {}", spec.q)));
    }
    if !spec.rho.is_finite() || spec.rho <= 0.0 {
        return Err(Error::Generator(format!("rho: must be finite and > 0, got {}", spec.rho)));
    }
    if spec.feature_dim == 0 {
        return Err(Error::Generator("feature_dim: must be >= 1".into()));
    }
    for (value, key) in [
        (spec.radius_primal, "radius_primal"),
        (spec.radius_dual, "radius_dual"),
        (spec.data_radius, "data_radius"),
    ] {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::Generator(format!("{key}: must be finite and > 0, got {value}")));
        }
    }
    if spec.estimation_samples < 1000 {
        return Err(Error::Generator(
            "estimation_samples: need at least 1000 for usable constants".into(),
        ));
    }
    let form = AucForm { q: spec.q, feature_dim: spec.feature_dim };
    let dim_w = spec.feature_dim + 2;
    let dim_z = spec.feature_dim + 1;
    // Template instance with placeholder constants, used to run the oracles
    // during estimation.
    let mut inst = ProblemInstance {
        dim_w,
        dim_v: 1,
        dim_z,
        radius_w: spec.radius_primal,
        radius_v: spec.radius_dual,
        data_radius: spec.data_radius,
        rho: spec.rho,
        lipschitz: 1.0,
        smooth: 1.0,
        loss_bound: 1.0,
        offset: 0.0,
        kind: InstanceKind::Auc(form),
    };
    let mut rng = RngState::new(spec.seed).derive(ESTIMATE_STREAM);
    let mut max_grad: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    let mut min_loss = f64::INFINITY;
    let mut max_loss = f64::NEG_INFINITY;
    let mut prev: Option<(Vector, Vector, Vector)> = None;
    for _ in 0..spec.estimation_samples {
        let w = sample_ball(dim_w, spec.radius_primal, &mut rng)?;
        let v = sample_ball(1, spec.radius_dual, &mut rng)?;
        let z = sample_ball(dim_z, spec.data_radius, &mut rng)?;
        let value = inst.loss(&w, &v, &z)?;
        min_loss = min_loss.min(value);
        max_loss = max_loss.max(value);
        let gw = inst.grad_w(&w, &v, &z)?;
        let gv = inst.grad_v(&w, &v, &z)?;
        max_grad = max_grad.max(gw.norm()).max(gv.norm());
        // Smoothness of the joint gradient field, estimated between
        // consecutive samples sharing the same data point family: compare at
        // the same z to isolate the (w, v) dependence.
        if let Some((pw, pv, pz)) = prev.take() {
            let gw2 = inst.grad_w(&pw, &pv, &z)?;
            let gv2 = inst.grad_v(&pw, &pv, &z)?;
            let diff_g =
                (gw.sub(&gw2).norm_sq() + gv.sub(&gv2).norm_sq()).sqrt();
            let diff_x = (w.sub(&pw).norm_sq() + v.sub(&pv).norm_sq()).sqrt();
            if diff_x > 1e-9 {
                max_ratio = max_ratio.max(diff_g / diff_x);
            }
            let _ = pz;
        }
        prev = Some((w, v, z));
    }
    let offset = 1.25 * (-min_loss).max(0.0);
    inst.offset = offset;
    inst.loss_bound = 1.25 * (max_loss + offset);
    inst.lipschitz = 1.25 * max_grad;
    inst.smooth = 1.25f64 * max_ratio;
    if inst.smooth < inst.rho {
        // rho <= L must hold; the sampled ratio can only undershoot.
        inst.smooth = inst.rho;
    }
    Ok(inst)
}

/// Exact best response of the scalar adversarial block given `u`, before
/// projection onto the dual ball: the empirical coupling statistic divided
/// by the curvature `2 q (1-q) + rho`.
pub fn auc_best_response_alpha(
    inst: &ProblemInstance,
    data: &Dataset,
    u: &Vector,
) -> Result<f64> {
    let f = match &inst.kind {
        InstanceKind::Auc(f) => f,
        InstanceKind::Quadratic(_) => {
            return Err(Error::InvalidInput(
                "scalar best response is only defined for the AUC family".into(),
            ))
        }
    };
    let (wv, _, _) = auc_split_u(f, u);
    let mut coupling = 0.0;
    for z in data.points() {
        let (x, positive) = auc_split(f, z);
        let s = wv.dot(&x);
        coupling += 2.0 * s * if positive { -(1.0 - f.q) } else { f.q };
    }
    coupling /= data.n() as f64;
    Ok(coupling / (2.0 * f.q * (1.0 - f.q) + inst.rho))
}
