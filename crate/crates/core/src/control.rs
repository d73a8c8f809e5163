//! Pulse optimization of the steering robustness.
//!
//! [`optimize`] runs projected quasi-Newton ascent on the steering cost from
//! many seeded random starts (plus the zero pulse), [`naive_optimize`] uses
//! the same machinery to steer the channel toward the identity instead, and
//! [`landscape`] scans the two-pulse scheme "drift, then two short pulses"
//! on a grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::lindblad::{
    control_matrix, drift_matrix, generator, propagate_with_jacobian, PulseSequence, TransferMatrix,
};
use crate::steering::{steering_gradient, steering_robustness, SteeringScenario};
use crate::{Error, Result, Scalar};

/// Settings shared by [`optimize`], [`naive_optimize`] and [`time_sweep`].
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeConfig<T> {
    /// Number of time slots.
    pub m: usize,
    /// Total control time; each slot lasts `total_time / m`.
    pub total_time: T,
    /// Box constraint on every amplitude, `(min, max)`.
    pub amp_bounds: (T, T),
    /// Number of random starts.
    pub n_starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Stop when the projected gradient's largest component falls below this.
    pub grad_tol: T,
    /// Also start from the zero pulse (reported as start 0).
    pub include_zero_start: bool,
    /// Random redraws allowed for a start that lands on a non-steerable
    /// plateau.
    pub flat_restarts: usize,
    /// Run starts on the rayon thread pool. Results do not depend on it.
    pub parallel: bool,
}

impl<T: Scalar> Default for OptimizeConfig<T> {
    fn default() -> Self {
        Self {
            m: 20,
            total_time: T::lit(2.8),
            amp_bounds: (T::lit(-15.0), T::lit(15.0)),
            n_starts: 100,
            seed: 0,
            max_iters: 200,
            grad_tol: T::lit(1e-8),
            include_zero_start: true,
            flat_restarts: 10,
            parallel: true,
        }
    }
}

impl<T: Scalar> OptimizeConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.m < 1 {
            return bad("m must be >= 1".into());
        }
        if !(self.total_time > T::zero() && self.total_time.is_finite()) {
            return bad(format!("total time {} must be > 0", self.total_time));
        }
        let (lo, hi) = self.amp_bounds;
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return bad(format!("amplitude bounds ({lo}, {hi}) need min < max"));
        }
        if self.n_starts < 1 {
            return bad("n_starts must be >= 1".into());
        }
        if !(self.grad_tol >= T::zero()) {
            return bad("grad_tol must be >= 0".into());
        }
        Ok(())
    }

    pub fn dt(&self) -> T {
        self.total_time / T::lit(self.m as f64)
    }

    /// Same settings at a different total time.
    pub fn with_total_time(&self, total_time: T) -> Self {
        Self { total_time, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult<T> {
    pub best_pulse: PulseSequence<T>,
    /// Steering robustness at `best_pulse`.
    pub best_value: T,
    /// Objective actually optimized at `best_pulse`: the robustness for
    /// [`optimize`], the squared Frobenius distance to the identity channel
    /// for [`naive_optimize`].
    pub best_objective: T,
    /// Index into `start_values` of the winning start.
    pub best_start: usize,
    /// Steering robustness at the end of each start.
    pub start_values: Vec<T>,
    pub iterations_per_start: Vec<usize>,
    /// Steering robustness of the zero pulse.
    pub baseline_value: T,
}

/// Result of one objective evaluation during ascent.
#[derive(Clone, Debug)]
pub struct Evaluation<T> {
    pub value: T,
    /// `None` when the objective is not differentiable at the point; ascent
    /// stops there.
    pub gradient: Option<Vec<T>>,
}

/// A function to maximize over a box.
pub trait Objective<T: Scalar>: Sync {
    fn value(&self, c: &[T]) -> Result<T>;
    fn evaluate(&self, c: &[T]) -> Result<Evaluation<T>>;
}

/// The steering cost `f(c)` on a fixed slot grid.
pub struct SteeringObjective<'a, T> {
    pub scenario: &'a SteeringScenario<T>,
    pub dt: T,
}

impl<T: Scalar> SteeringObjective<'_, T> {
    fn pulse(&self, c: &[T]) -> Result<PulseSequence<T>> {
        PulseSequence::new(self.dt, c.to_vec())
    }
}

impl<T: Scalar> Objective<T> for SteeringObjective<'_, T> {
    fn value(&self, c: &[T]) -> Result<T> {
        steering_robustness(self.scenario, &self.pulse(c)?)
    }

    fn evaluate(&self, c: &[T]) -> Result<Evaluation<T>> {
        let p = self.pulse(c)?;
        match steering_gradient(self.scenario, &p) {
            Ok(g) => Ok(Evaluation { value: g.value, gradient: Some(g.gradient) }),
            Err(Error::NotDifferentiable(_)) | Err(Error::DegenerateRoot(_)) => {
                Ok(Evaluation { value: steering_robustness(self.scenario, &p)?, gradient: None })
            }
            Err(e) => Err(e),
        }
    }
}

/// Negative squared distance `-‖M_schr(c) - Id‖²_F` of the channel to the
/// identity.
pub struct IdentityObjective<'a, T> {
    pub scenario: &'a SteeringScenario<T>,
    pub dt: T,
}

impl<T: Scalar> Objective<T> for IdentityObjective<'_, T> {
    fn value(&self, c: &[T]) -> Result<T> {
        Ok(self.evaluate(c)?.value)
    }

    fn evaluate(&self, c: &[T]) -> Result<Evaluation<T>> {
        let p = PulseSequence::new(self.dt, c.to_vec())?;
        let s = self.scenario;
        let (m, jac) = propagate_with_jacobian(s.drift(), s.control(), &p);
        let diff = m.schrodinger().sub(&TransferMatrix::identity());
        let value = -diff.0.frobenius_dot(&diff.0);
        let two = T::two();
        let gradient = jac.iter().map(|dm| -two * diff.0.frobenius_dot(&dm.schrodinger().0)).collect();
        Ok(Evaluation { value, gradient: Some(gradient) })
    }
}

/// Outcome of a single projected ascent run.
#[derive(Clone, Debug)]
pub struct Ascent<T> {
    pub point: Vec<T>,
    pub value: T,
    pub iterations: usize,
    /// Objective value after each accepted step, starting with the initial
    /// value.
    pub history: Vec<T>,
}

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 50;

fn project<T: Scalar>(x: &mut [T], lo: T, hi: T) {
    for v in x.iter_mut() {
        *v = v.max(lo).min(hi);
    }
}

fn inf_norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Gradient with components zeroed where the box blocks ascent.
fn projected_gradient<T: Scalar>(x: &[T], g: &[T], lo: T, hi: T) -> Vec<T> {
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| if (xi <= lo && gi < T::zero()) || (xi >= hi && gi > T::zero()) { T::zero() } else { gi })
        .collect()
}

/// Projected BFGS ascent with backtracking line search inside `[lo, hi]^n`.
///
/// Every accepted step satisfies a sufficient-increase condition, so the
/// recorded history is non-decreasing.
pub fn ascend<T: Scalar>(
    obj: &dyn Objective<T>,
    start: &[T],
    bounds: (T, T),
    max_iters: usize,
    grad_tol: T,
) -> Result<Ascent<T>> {
    let (lo, hi) = bounds;
    let n = start.len();
    let mut x = start.to_vec();
    project(&mut x, lo, hi);
    let mut eval = obj.evaluate(&x)?;
    let mut history = vec![eval.value];
    // inverse-Hessian approximation of -f, row-major n x n
    let mut hinv: Vec<T> = identity_vec(n);
    let mut fresh = true;
    let mut iterations = 0;

    while iterations < max_iters {
        let Some(g) = eval.gradient.clone() else { break };
        let pg = projected_gradient(&x, &g, lo, hi);
        let pg_norm = inf_norm(&pg);
        if !(pg_norm > grad_tol) {
            break;
        }

        let mut d = mat_vec(&hinv, &pg, n);
        for (di, pgi) in d.iter_mut().zip(&pg) {
            if *pgi == T::zero() {
                *di = T::zero();
            }
        }
        if !(dot(&d, &pg) > T::zero()) {
            hinv = identity_vec(n);
            fresh = true;
            d = pg.clone();
        }
        if fresh {
            // unit-size first move in amplitude space
            let s = inf_norm(&d);
            d.iter_mut().for_each(|v| *v /= s);
        }

        let mut alpha = T::one();
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let mut trial: Vec<T> = x.iter().zip(&d).map(|(&xi, &di)| xi + alpha * di).collect();
            project(&mut trial, lo, hi);
            let step: Vec<T> = trial.iter().zip(&x).map(|(a, b)| *a - *b).collect();
            let gain = dot(&g, &step).max(T::zero());
            let f_trial = obj.value(&trial)?;
            if f_trial >= eval.value + T::lit(ARMIJO) * gain && f_trial > eval.value {
                accepted = Some((trial, step, f_trial));
                break;
            }
            alpha *= T::half();
        }
        let Some((trial, s, f_trial)) = accepted else { break };

        let mut next = obj.evaluate(&trial)?;
        // keep the value the line search accepted; the gradient path may
        // differ from it in the last bits
        next.value = f_trial;
        iterations += 1;
        if let Some(g_new) = &next.gradient {
            // curvature pair for minimizing -f
            let y: Vec<T> = g.iter().zip(g_new).map(|(a, b)| *a - *b).collect();
            let sy = dot(&s, &y);
            let scale = dot(&s, &s).sqrt() * dot(&y, &y).sqrt();
            if sy > T::lit(1e-12) * scale && sy > T::zero() {
                if fresh {
                    let gamma = sy / dot(&y, &y);
                    hinv = identity_vec(n).into_iter().map(|v: T| v * gamma).collect();
                }
                bfgs_update(&mut hinv, &s, &y, sy, n);
                fresh = false;
            }
        }
        x = trial;
        eval = next;
        history.push(eval.value);
    }

    Ok(Ascent { point: x, value: eval.value, iterations, history })
}

fn identity_vec<T: Scalar>(n: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    v
}

fn mat_vec<T: Scalar>(a: &[T], x: &[T], n: usize) -> Vec<T> {
    (0..n).map(|i| dot(&a[i * n..(i + 1) * n], x)).collect()
}

/// `H <- (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ`, `ρ = 1/(yᵀs)`.
fn bfgs_update<T: Scalar>(h: &mut [T], s: &[T], y: &[T], sy: T, n: usize) {
    let rho = T::one() / sy;
    let hy = mat_vec(h, y, n);
    let yhy = dot(y, &hy);
    let coef = (T::one() + rho * yhy) * rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

/// Seeded generator for start `index`; independent of execution order.
fn start_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn random_pulse<T: Scalar>(rng: &mut ChaCha8Rng, m: usize, (lo, hi): (T, T)) -> Vec<T> {
    (0..m)
        .map(|_| {
            let u: f64 = rng.gen();
            lo + T::lit(u) * (hi - lo)
        })
        .collect()
}

struct StartOutcome<T> {
    point: Vec<T>,
    objective: T,
    iterations: usize,
}

/// Runs every start and returns outcomes in start order: the zero pulse
/// first (if enabled), then random starts `1..=n_starts`.
fn run_starts<T: Scalar>(
    obj: &dyn Objective<T>,
    cfg: &OptimizeConfig<T>,
    escape_plateaus: bool,
) -> Result<Vec<StartOutcome<T>>> {
    let first = if cfg.include_zero_start { 0 } else { 1 };
    let indices: Vec<usize> = (first..=cfg.n_starts).collect();
    let run_one = |index: usize| -> Result<StartOutcome<T>> {
        let mut x0 = vec![T::zero(); cfg.m];
        if index > 0 {
            let mut rng = start_rng(cfg.seed, index);
            x0 = random_pulse(&mut rng, cfg.m, cfg.amp_bounds);
            if escape_plateaus {
                let mut attempts = 0;
                while attempts < cfg.flat_restarts && obj.value(&x0)? == T::zero() {
                    x0 = random_pulse(&mut rng, cfg.m, cfg.amp_bounds);
                    attempts += 1;
                }
            }
        }
        let a = ascend(obj, &x0, cfg.amp_bounds, cfg.max_iters, cfg.grad_tol)?;
        Ok(StartOutcome { point: a.point, objective: a.value, iterations: a.iterations })
    };
    if cfg.parallel {
        indices.into_par_iter().map(run_one).collect()
    } else {
        indices.into_iter().map(run_one).collect()
    }
}

/// Index of the largest objective; ties go to the earliest start.
fn argmax<T: Scalar>(outcomes: &[StartOutcome<T>]) -> usize {
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.objective > outcomes[best].objective {
            best = i;
        }
    }
    best
}

fn baseline<T: Scalar>(s: &SteeringScenario<T>, cfg: &OptimizeConfig<T>) -> Result<T> {
    steering_robustness(s, &PulseSequence::new(cfg.dt(), vec![T::zero(); cfg.m])?)
}

/// Multi-start exact-gradient maximization of the steering robustness.
pub fn optimize<T: Scalar>(s: &SteeringScenario<T>, cfg: &OptimizeConfig<T>) -> Result<OptimizeResult<T>> {
    cfg.validate()?;
    let obj = SteeringObjective { scenario: s, dt: cfg.dt() };
    let outcomes = run_starts(&obj, cfg, true)?;
    let best = argmax(&outcomes);
    Ok(OptimizeResult {
        best_pulse: PulseSequence::new(cfg.dt(), outcomes[best].point.clone())?,
        best_value: outcomes[best].objective,
        best_objective: outcomes[best].objective,
        best_start: best,
        start_values: outcomes.iter().map(|o| o.objective).collect(),
        iterations_per_start: outcomes.iter().map(|o| o.iterations).collect(),
        baseline_value: baseline(s, cfg)?,
    })
}

/// Baseline strategy: make the channel as close to the identity as possible
/// (squared Frobenius distance of the Schrödinger transfer matrix), then
/// report the steering robustness of the resulting pulse.
pub fn naive_optimize<T: Scalar>(s: &SteeringScenario<T>, cfg: &OptimizeConfig<T>) -> Result<OptimizeResult<T>> {
    cfg.validate()?;
    let dt = cfg.dt();
    let obj = IdentityObjective { scenario: s, dt };
    let outcomes = run_starts(&obj, cfg, false)?;
    let best = argmax(&outcomes);
    let start_values = outcomes
        .iter()
        .map(|o| steering_robustness(s, &PulseSequence::new(dt, o.point.clone())?))
        .collect::<Result<Vec<_>>>()?;
    Ok(OptimizeResult {
        best_pulse: PulseSequence::new(dt, outcomes[best].point.clone())?,
        best_value: start_values[best],
        best_objective: -outcomes[best].objective,
        best_start: best,
        start_values,
        iterations_per_start: outcomes.iter().map(|o| o.iterations).collect(),
        baseline_value: baseline(s, cfg)?,
    })
}

/// Robustness over a `(c1, c2)` grid for the scheme: drift for `t_drift`,
/// then pulses `c1` and `c2`, each lasting `(total_time - t_drift)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct LandscapeGrid<T> {
    pub t_drift: T,
    pub total_time: T,
    pub c1_axis: Vec<T>,
    pub c2_axis: Vec<T>,
    /// `values[i][j]` belongs to `(c1_axis[i], c2_axis[j])`.
    pub values: Vec<Vec<T>>,
}

impl<T: Scalar> LandscapeGrid<T> {
    /// `(c1, c2, value)` of the largest cell; ties go to the first in
    /// row-major order.
    pub fn argmax(&self) -> (T, T, T) {
        let mut best = (self.c1_axis[0], self.c2_axis[0], self.values[0][0]);
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v > best.2 {
                    best = (self.c1_axis[i], self.c2_axis[j], v);
                }
            }
        }
        best
    }

    /// All `(c1, c2)` whose value is within `rel_tol * max` of the maximum, in
    /// row-major order. Symmetric landscapes attain their maximum more than
    /// once.
    pub fn maximizers(&self, rel_tol: T) -> Vec<(T, T)> {
        let (_, _, best) = self.argmax();
        let cut = best - rel_tol * best.abs();
        let mut out = Vec::new();
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v >= cut {
                    out.push((self.c1_axis[i], self.c2_axis[j]));
                }
            }
        }
        out
    }

    /// Value at the grid point nearest to `(c1, c2)`.
    pub fn value_near(&self, c1: T, c2: T) -> T {
        let nearest = |axis: &[T], c: T| {
            (0..axis.len())
                .min_by(|&a, &b| {
                    (axis[a] - c).abs().partial_cmp(&(axis[b] - c).abs()).unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(0)
        };
        self.values[nearest(&self.c1_axis, c1)][nearest(&self.c2_axis, c2)]
    }
}

/// Equispaced axis `min, min + step, ...` up to `max` (inclusive within
/// rounding).
pub fn axis<T: Scalar>(min: T, max: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero() && max >= min) {
        return Err(Error::InvalidParameter(format!(
            "axis needs step > 0 and max >= min (got {min}..{max} step {step})"
        )));
    }
    let n = ((max - min) / step + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
    Ok((0..=n).map(|i| min + T::lit(i as f64) * step).collect())
}

/// Evaluates the two-pulse scheme on every grid point. The Heisenberg map is
/// `exp(t_drift L0*) exp(dt L*_{c1}) exp(dt L*_{c2})`.
pub fn landscape<T: Scalar>(
    s: &SteeringScenario<T>,
    t_drift: T,
    total_time: T,
    c1_axis: &[T],
    c2_axis: &[T],
) -> Result<LandscapeGrid<T>> {
    if !(t_drift >= T::zero() && t_drift < total_time) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= t_drift < T (got t_drift = {t_drift}, T = {total_time})"
        )));
    }
    if c1_axis.is_empty() || c2_axis.is_empty() {
        return Err(Error::InvalidParameter("landscape axes must be non-empty".into()));
    }
    let dt = T::half() * (total_time - t_drift);
    let drift = drift_matrix(s.drift());
    let control = control_matrix(s.control());
    let pre = drift.scale(t_drift).expm();
    let second: Vec<TransferMatrix<T>> =
        c2_axis.iter().map(|&c| generator(&drift, &control, c).scale(dt).expm()).collect();
    let values = c1_axis
        .par_iter()
        .map(|&c1| {
            let head = pre.compose(&generator(&drift, &control, c1).scale(dt).expm());
            second.iter().map(|e2| s.robustness_after(&head.compose(e2))).collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LandscapeGrid { t_drift, total_time, c1_axis: c1_axis.to_vec(), c2_axis: c2_axis.to_vec(), values })
}

/// One row of a time sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow<T> {
    pub total_time: T,
    pub uncontrolled: T,
    pub naive: Option<T>,
    pub optimized: Option<T>,
}

/// Steering robustness with no control after time `t >= 0`.
pub fn uncontrolled_robustness<T: Scalar>(s: &SteeringScenario<T>, t: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(Error::InvalidParameter(format!("time {t} must be >= 0")));
    }
    let m = drift_matrix(s.drift()).scale(t).expm();
    s.robustness_after(&m)
}

/// Uncontrolled, naive and optimized robustness for each total time.
pub fn time_sweep<T: Scalar>(
    s: &SteeringScenario<T>,
    cfg: &OptimizeConfig<T>,
    t_grid: &[T],
) -> Result<Vec<SweepRow<T>>> {
    t_grid
        .iter()
        .map(|&t| {
            let uncontrolled = uncontrolled_robustness(s, t)?;
            if t == T::zero() {
                // nothing to control
                return Ok(SweepRow {
                    total_time: t,
                    uncontrolled,
                    naive: Some(uncontrolled),
                    optimized: Some(uncontrolled),
                });
            }
            let c = cfg.with_total_time(t);
            Ok(SweepRow {
                total_time: t,
                uncontrolled,
                naive: Some(naive_optimize(s, &c)?.best_value),
                optimized: Some(optimize(s, &c)?.best_value),
            })
        })
        .collect()
}

/// The uncontrolled column alone.
pub fn uncontrolled_sweep<T: Scalar>(s: &SteeringScenario<T>, t_grid: &[T]) -> Result<Vec<SweepRow<T>>> {
    t_grid
        .iter()
        .map(|&t| {
            Ok(SweepRow { total_time: t, uncontrolled: uncontrolled_robustness(s, t)?, naive: None, optimized: None })
        })
        .collect()
}
