//! Parametric entropic barycenters: the stable AR(P) spectrum minimizing
//! the average entropic cost to a set of spectra.
//!
//! The objective is
//!
//! ```text
//! J(theta) = (1/K) sum_k OT_eps(Phi_theta, Phi_k)
//! ```
//!
//! where `Phi_theta` is the unit-mass spectrum of the model with reflection
//! coefficients `tanh(theta_{1:P})`. Its gradient is `J^T h`, with `J` the
//! Jacobian of `theta -> Phi_theta` (central differences) and `h` the
//! averaged zero-sum first potentials, held fixed at each iterate.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::ar::{
    acov_from_psd, ar_to_parcor, parcor_to_ar, theta_to_model, yule_walker, ArModel, ThetaVector,
};
use crate::error::{Error, Result};
use crate::ot::{FreeBarycenter, Sinkhorn, SinkhornConfig};
use crate::spectral::{FrequencyGrid, GroundCost, Psd};

/// Reflection coefficients are clamped to this magnitude before `arctanh`
/// when initializing from Yule-Walker.
pub const YW_KAPPA_CLAMP: f64 = 1.0 - 1e-6;

/// Backtracking steps tried before a line search gives up.
pub const MAX_BACKTRACKS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub model_order: usize,
    pub sinkhorn: SinkhornConfig,
    pub max_outer_iters: usize,
    pub armijo_c1: f64,
    pub armijo_shrink: f64,
    pub step_init: f64,
    pub grad_tol: f64,
    pub jacobian_fd_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            model_order: 10,
            sinkhorn: SinkhornConfig::default(),
            max_outer_iters: 500,
            armijo_c1: 1e-4,
            armijo_shrink: 0.5,
            step_init: 1.0,
            grad_tol: 1e-6,
            jacobian_fd_step: 1e-6,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        self.sinkhorn.validate()?;
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.armijo_c1) {
            return Err(Error::invalid(format!(
                "armijo_c1 must lie in (0, 1), got {}",
                self.armijo_c1
            )));
        }
        if !open_unit(self.armijo_shrink) {
            return Err(Error::invalid(format!(
                "armijo_shrink must lie in (0, 1), got {}",
                self.armijo_shrink
            )));
        }
        for (name, v) in [
            ("step_init", self.step_init),
            ("grad_tol", self.grad_tol),
            ("jacobian_fd_step", self.jacobian_fd_step),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.model_order == 0 {
            return Err(Error::invalid("model_order must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitKind {
    YuleWalker,
    /// Yule-Walker shape parameters plus `N(0, scale^2)` noise.
    PerturbedYuleWalker { scale: f64 },
    /// Reflection coefficients uniform in `(-scale, scale)`.
    ParcorRandom { scale: f64 },
    /// Shape parameters drawn from `N(0, scale^2)`.
    GaussianTheta { scale: f64 },
    /// A fixed starting point, zero-padded to the model order.
    Given { theta: ThetaVector },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitStrategy {
    #[serde(flatten)]
    pub kind: InitKind,
    pub seed: u64,
}

impl InitStrategy {
    pub fn new(kind: InitKind, seed: u64) -> Result<Self> {
        let s = Self { kind, seed };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            InitKind::PerturbedYuleWalker { scale } | InitKind::GaussianTheta { scale } => {
                if !(*scale > 0.0) || !scale.is_finite() {
                    return Err(Error::invalid(format!("init scale must be positive, got {scale}")));
                }
            }
            InitKind::ParcorRandom { scale } => {
                if !(*scale > 0.0 && *scale < 1.0) {
                    return Err(Error::invalid(format!(
                        "PARCOR init scale must lie in (0, 1), got {scale}"
                    )));
                }
            }
            InitKind::YuleWalker | InitKind::Given { .. } => {}
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match &self.kind {
            InitKind::YuleWalker => "yw".into(),
            InitKind::PerturbedYuleWalker { scale } => format!("yw+noise({scale})"),
            InitKind::ParcorRandom { scale } => format!("parcor({scale})"),
            InitKind::GaussianTheta { scale } => format!("gauss({scale})"),
            InitKind::Given { .. } => "given".into(),
        }
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for stream `stream` of `root`: `mix64(root ^ stream)`.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    mix64(root ^ stream)
}

/// One Yule-Walker start, three perturbed Yule-Walker (scale 0.2), three
/// random PARCOR (scale 0.7) and three Gaussian (scale 0.5).
pub fn default_portfolio(root_seed: u64) -> Vec<InitStrategy> {
    let mut kinds = vec![InitKind::YuleWalker];
    kinds.extend((0..3).map(|_| InitKind::PerturbedYuleWalker { scale: 0.2 }));
    kinds.extend((0..3).map(|_| InitKind::ParcorRandom { scale: 0.7 }));
    kinds.extend((0..3).map(|_| InitKind::GaussianTheta { scale: 0.5 }));
    kinds
        .into_iter()
        .enumerate()
        .map(|(i, kind)| InitStrategy {
            kind,
            seed: derive_seed(root_seed, i as u64),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iter: usize,
    pub objective: f64,
    pub grad_norm: f64,
    /// Accepted step (0 for the starting point).
    pub step: f64,
    pub theta: ThetaVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub theta: ThetaVector,
    /// Model with the gain restored from the mean raw mass of the set.
    pub model: ArModel,
    /// Unit-mass model spectrum the objective was evaluated at.
    pub psd: Psd,
    pub objective: f64,
    /// Objective at the starting point.
    pub initial_objective: f64,
    pub trace: Vec<TraceEntry>,
    pub init: InitStrategy,
    pub converged: bool,
    /// The line search exhausted its backtracks.
    pub stalled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub index: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiStartReport {
    pub runs: Vec<FitResult>,
    pub failures: Vec<RunFailure>,
    /// Index into `runs`.
    pub best: usize,
    pub free_barycenter_objective: f64,
    pub suboptimality_gap: f64,
}

impl MultiStartReport {
    pub fn best_run(&self) -> &FitResult {
        &self.runs[self.best]
    }

    pub fn to_json(&self) -> serde_json::Value {
        let best = self.best_run();
        serde_json::json!({
            "schema": FIT_SCHEMA,
            "objective": best.objective,
            "free_barycenter_objective": self.free_barycenter_objective,
            "suboptimality_gap": self.suboptimality_gap,
            "best": self.best,
            "theta": best.theta,
            "a": best.model.coefficients(),
            "sigma2": best.model.sigma2(),
            "kappa": best.model.parcor().as_slice(),
            "runs": self.runs.iter().map(FitResult::to_json).collect::<Vec<_>>(),
            "failures": self.failures,
        })
    }
}

pub const FIT_SCHEMA: &str = "arbary/fit/1";

impl FitResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": FIT_SCHEMA,
            "init": self.init,
            "theta": self.theta,
            "a": self.model.coefficients(),
            "sigma2": self.model.sigma2(),
            "kappa": self.model.parcor().as_slice(),
            "objective": self.objective,
            "initial_objective": self.initial_objective,
            "converged": self.converged,
            "stalled": self.stalled,
            "trace": self.trace.iter().map(|t| serde_json::json!({
                "iter": t.iter,
                "objective": t.objective,
                "grad_norm": t.grad_norm,
                "step": t.step,
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub order: usize,
    pub otbc: f64,
    pub yw_init: f64,
    pub otp: f64,
}

/// A set of spectra prepared for centroid fitting: normalized targets, a
/// solver bound to the ground cost, and the lazily computed free barycenter.
#[derive(Debug)]
pub struct CentroidProblem {
    grid: FrequencyGrid,
    targets: Vec<Psd>,
    mean_mass: f64,
    solver: Sinkhorn,
    config: OptimizerConfig,
    free: OnceLock<FreeBarycenter>,
}

struct Evaluation {
    value: f64,
    grad: Vec<f64>,
}

impl CentroidProblem {
    pub fn new(set: &[Psd], cost: &GroundCost, config: &OptimizerConfig) -> Result<Self> {
        config.validate()?;
        let first = set
            .first()
            .ok_or_else(|| Error::invalid("centroid of an empty set"))?;
        if cost.n() != first.n_bins() {
            return Err(Error::invalid("set and cost live on different grids"));
        }
        let mut targets = Vec::with_capacity(set.len());
        for (k, psd) in set.iter().enumerate() {
            first.check_same_grid(psd).map_err(|e| Error::at_target(k, e))?;
            targets.push(psd.normalize().map_err(|e| Error::at_target(k, e))?);
        }
        let mean_mass = set.iter().map(Psd::total).sum::<f64>() / set.len() as f64;
        Ok(Self {
            grid: first.grid(),
            targets,
            mean_mass,
            solver: Sinkhorn::new(cost, config.sinkhorn)?,
            config: *config,
            free: OnceLock::new(),
        })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn targets(&self) -> &[Psd] {
        &self.targets
    }

    pub fn solver(&self) -> &Sinkhorn {
        &self.solver
    }

    pub fn free_barycenter(&self) -> Result<&FreeBarycenter> {
        if let Some(b) = self.free.get() {
            return Ok(b);
        }
        let b = self.solver.free_barycenter(&self.targets)?;
        Ok(self.free.get_or_init(|| b))
    }

    /// Objective at the free barycenter: a lower bound for every order.
    pub fn free_barycenter_objective(&self) -> Result<f64> {
        let b = self.free_barycenter()?;
        Ok(self.solver.barycenter_objective(&b.psd, &self.targets)?.0)
    }

    /// Unit-mass model spectrum for `theta`.
    pub fn spectrum(&self, theta: &ThetaVector) -> Result<Psd> {
        Ok(theta_to_model(theta, 1.0, &self.grid)?.1)
    }

    /// `J(theta)` from cold solves.
    pub fn objective(&self, theta: &ThetaVector) -> Result<f64> {
        let psd = self.spectrum(theta)?;
        Ok(self.solver.barycenter_objective(&psd, &self.targets)?.0)
    }

    /// `J(theta)` and its gradient over all of `theta` (the gain entry has
    /// zero gradient), from cold solves.
    pub fn objective_and_gradient(&self, theta: &ThetaVector) -> Result<(f64, Vec<f64>)> {
        let mut cache = vec![None; self.targets.len()];
        let e = self.evaluate(theta, &mut cache)?;
        Ok((e.value, e.grad))
    }

    fn evaluate(&self, theta: &ThetaVector, cache: &mut [Option<Vec<f64>>]) -> Result<Evaluation> {
        let psd = self.spectrum(theta)?;
        let (value, h) = self
            .solver
            .barycenter_objective_warm(&psd, &self.targets, cache)?;
        let grad = self.pull_back(theta, &h)?;
        Ok(Evaluation { value, grad })
    }

    /// `J^T h` with the Jacobian of `theta -> Phi_theta` taken by central
    /// differences.
    fn pull_back(&self, theta: &ThetaVector, h: &[f64]) -> Result<Vec<f64>> {
        let step = self.config.jacobian_fd_step;
        let base = theta.as_slice();
        let mut grad = vec![0.0; base.len()];
        for p in 1..base.len() {
            let mut plus = base.to_vec();
            let mut minus = base.to_vec();
            plus[p] += step;
            minus[p] -= step;
            let up = self.spectrum(&ThetaVector::new(plus)?)?;
            let down = self.spectrum(&ThetaVector::new(minus)?)?;
            grad[p] = up
                .mass()
                .iter()
                .zip(down.mass())
                .zip(h)
                .map(|((u, d), hi)| (u - d) / (2.0 * step) * hi)
                .sum();
        }
        Ok(grad)
    }

    /// Yule-Walker fit of order `order` to the free barycenter, mapped to
    /// unconstrained parameters. The gain entry is `ln sigma^2`.
    pub fn yw_initialize(&self, order: usize) -> Result<ThetaVector> {
        if order == 0 {
            return Err(Error::invalid("model order must be at least 1"));
        }
        let bary = self.free_barycenter()?;
        let r = acov_from_psd(&bary.psd, order)?;
        let model = yule_walker(&r, order)?;
        let mut theta = Vec::with_capacity(order + 1);
        theta.push(model.sigma2().ln());
        theta.extend(
            model
                .parcor()
                .as_slice()
                .iter()
                .map(|k| k.clamp(-YW_KAPPA_CLAMP, YW_KAPPA_CLAMP).atanh()),
        );
        ThetaVector::new(theta)
    }

    /// Starting point for `strategy` at the configured model order.
    pub fn initial_theta(&self, strategy: &InitStrategy) -> Result<ThetaVector> {
        strategy.validate()?;
        let order = self.config.model_order;
        let mut rng = ChaCha8Rng::seed_from_u64(strategy.seed);
        let normal = |scale: f64| {
            Normal::new(0.0, scale).map_err(|e| Error::invalid(format!("bad init scale: {e}")))
        };
        let theta = match &strategy.kind {
            InitKind::YuleWalker => self.yw_initialize(order)?,
            InitKind::PerturbedYuleWalker { scale } => {
                let dist = normal(*scale)?;
                let mut v = self.yw_initialize(order)?.into_vec();
                v[1..].iter_mut().for_each(|t| *t += dist.sample(&mut rng));
                ThetaVector::new(v)?
            }
            InitKind::ParcorRandom { scale } => {
                let mut v = vec![0.0];
                v.extend((0..order).map(|_| rng.random_range(-*scale..*scale).atanh()));
                ThetaVector::new(v)?
            }
            InitKind::GaussianTheta { scale } => {
                let dist = normal(*scale)?;
                let mut v = vec![0.0];
                v.extend((0..order).map(|_| dist.sample(&mut rng)));
                ThetaVector::new(v)?
            }
            InitKind::Given { theta } => {
                if theta.order() > order {
                    return Err(Error::invalid(format!(
                        "given start has order {} above the model order {order}",
                        theta.order()
                    )));
                }
                theta.padded(order)
            }
        };
        Ok(theta)
    }

    /// Armijo gradient descent from `theta0`.
    ///
    /// The objective is re-evaluated from cold solves at the start and at
    /// the final iterate, and the better of the two is returned, so the
    /// reported objective never exceeds the starting one.
    ///
    /// A start whose AR polynomial fails the step-down check in floating
    /// point (reflection coefficients very close to +-1 at high order) is
    /// first pulled towards zero, see [`certify_stable`].
    pub fn fit(&self, theta0: &ThetaVector, init: InitStrategy) -> Result<FitResult> {
        let cfg = &self.config;
        let theta0 = &certify_stable(theta0)?;
        let mut cache = vec![None; self.targets.len()];
        let mut theta = theta0.clone();
        let Evaluation { value, grad } = self.evaluate(&theta, &mut cache)?;
        let initial_objective = value;
        let (mut value, mut grad) = (value, grad);
        let norm = |g: &[f64]| g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut trace = vec![TraceEntry {
            iter: 0,
            objective: value,
            grad_norm: norm(&grad),
            step: 0.0,
            theta: theta.clone(),
        }];
        let mut converged = false;
        let mut stalled = false;

        for iter in 1..=cfg.max_outer_iters {
            let gnorm = norm(&grad);
            if gnorm <= cfg.grad_tol {
                converged = true;
                break;
            }
            let mut step = cfg.step_init;
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACKS {
                let trial: Vec<f64> = theta
                    .as_slice()
                    .iter()
                    .zip(&grad)
                    .map(|(t, g)| t - step * g)
                    .collect();
                // A failed solve at a trial point counts as a rejected step.
                // Every trial is warm-started from the current iterate.
                // So does a point whose rounded AR polynomial no longer
                // passes the step-down check.
                if let Some(trial) = ThetaVector::new(trial).ok().filter(iterate_is_stable) {
                    let mut trial_cache = cache.clone();
                    if let Ok(e) = self.evaluate(&trial, &mut trial_cache) {
                        if e.value <= value - cfg.armijo_c1 * step * gnorm * gnorm {
                            accepted = Some((trial, e, trial_cache));
                            break;
                        }
                    }
                }
                step *= cfg.armijo_shrink;
            }
            let Some((next, e, next_cache)) = accepted else {
                stalled = true;
                break;
            };
            theta = next;
            cache = next_cache;
            value = e.value;
            grad = e.grad;
            trace.push(TraceEntry {
                iter,
                objective: value,
                grad_norm: norm(&grad),
                step,
                theta: theta.clone(),
            });
        }
        if !converged && !stalled && norm(&grad) <= cfg.grad_tol {
            converged = true;
        }

        let final_objective = if trace.len() > 1 {
            self.objective(&theta)?
        } else {
            initial_objective
        };
        let (theta, objective) = if final_objective <= initial_objective {
            (theta, final_objective)
        } else {
            (theta0.clone(), initial_objective)
        };
        let (model, _) = theta_to_model(&theta, self.mean_mass, &self.grid)?;
        let psd = self.spectrum(&theta)?;
        let mut theta = theta.into_vec();
        theta[0] = model.sigma2().ln();
        Ok(FitResult {
            theta: ThetaVector::new(theta)?,
            model,
            psd,
            objective,
            initial_objective,
            trace,
            init,
            converged,
            stalled,
        })
    }

    /// Runs [`CentroidProblem::fit`] from every strategy and keeps the
    /// lowest objective (ties go to the earlier strategy).
    pub fn multi_start_fit(&self, strategies: &[InitStrategy]) -> Result<MultiStartReport> {
        if strategies.is_empty() {
            return Err(Error::invalid("multi-start needs at least one strategy"));
        }
        let mut runs = Vec::new();
        let mut failures = Vec::new();
        let mut errors = Vec::new();
        for (index, s) in strategies.iter().enumerate() {
            match self
                .initial_theta(s)
                .and_then(|t0| self.fit(&t0, s.clone()))
            {
                Ok(r) => runs.push(r),
                Err(e) => {
                    failures.push(RunFailure {
                        index,
                        error: e.to_string(),
                    });
                    errors.push(e);
                }
            }
        }
        if runs.is_empty() {
            return Err(Error::AllRunsFailed(errors));
        }
        let mut best = 0;
        for (i, r) in runs.iter().enumerate() {
            if r.objective < runs[best].objective {
                best = i;
            }
        }
        let free_barycenter_objective = self.free_barycenter_objective()?;
        let suboptimality_gap = runs[best].objective - free_barycenter_objective;
        Ok(MultiStartReport {
            runs,
            failures,
            best,
            free_barycenter_objective,
            suboptimality_gap,
        })
    }

    /// Multi-start fits over `orders` (visited in increasing order).
    ///
    /// From the second order on, the best parameters of the previous order,
    /// zero-padded, are added as an extra start. They describe exactly the
    /// same spectrum, so the best objective cannot increase with the order.
    pub fn order_sweep(
        &self,
        orders: &[usize],
        strategies: &[InitStrategy],
    ) -> Result<(Vec<SweepRow>, Vec<MultiStartReport>)> {
        if orders.is_empty() {
            return Err(Error::invalid("order sweep needs at least one order"));
        }
        let mut sorted = orders.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let otbc = self.free_barycenter_objective()?;
        let mut rows = Vec::new();
        let mut reports: Vec<MultiStartReport> = Vec::new();
        for &order in &sorted {
            let config = OptimizerConfig {
                model_order: order,
                ..self.config
            };
            let sub = self.with_config(config)?;
            let yw_init = sub.objective(&sub.yw_initialize(order)?)?;
            let mut starts = strategies.to_vec();
            if let Some(prev) = reports.last() {
                starts.push(InitStrategy {
                    kind: InitKind::Given {
                        theta: prev.best_run().theta.clone(),
                    },
                    seed: 0,
                });
            }
            let report = sub.multi_start_fit(&starts)?;
            rows.push(SweepRow {
                order,
                otbc,
                yw_init,
                otp: report.best_run().objective,
            });
            reports.push(report);
        }
        Ok((rows, reports))
    }

    /// Same targets and solver under another optimizer configuration with
    /// the same Sinkhorn settings; the free barycenter is shared.
    fn with_config(&self, config: OptimizerConfig) -> Result<Self> {
        config.validate()?;
        if config.sinkhorn != self.config.sinkhorn {
            return Err(Error::invalid("sub-problems must share the Sinkhorn settings"));
        }
        let free = OnceLock::new();
        if let Some(b) = self.free.get() {
            let _ = free.set(b.clone());
        }
        Ok(Self {
            grid: self.grid,
            targets: self.targets.clone(),
            mean_mass: self.mean_mass,
            solver: self.solver.clone(),
            config,
            free,
        })
    }
}

/// True if every reflection coefficient recovered from the AR polynomial of
/// `theta` by step-down has magnitude below one.
pub fn iterate_is_stable(theta: &ThetaVector) -> bool {
    let a = parcor_to_ar(&theta.parcor());
    ar_to_parcor(&a).is_ok()
}

/// Shrink steps tried by [`certify_stable`].
pub const MAX_STABILITY_SHRINKS: usize = 1000;

/// Returns `theta` if [`iterate_is_stable`] holds, otherwise the first of
/// `kappa * 0.99^j` (j = 1, 2, ...) that passes, mapped back through
/// `arctanh`. The gain entry is kept.
///
/// Rounding the AR coefficients to f64 can move roots of a polynomial with
/// nearly saturated reflection coefficients onto or across the unit circle,
/// so `tanh` alone does not guarantee a polynomial that checks as stable.
pub fn certify_stable(theta: &ThetaVector) -> Result<ThetaVector> {
    if iterate_is_stable(theta) {
        return Ok(theta.clone());
    }
    let kappa = theta.parcor();
    let mut scale = 1.0;
    for _ in 0..MAX_STABILITY_SHRINKS {
        scale *= 0.99;
        let mut v = vec![theta.gain()];
        v.extend(kappa.as_slice().iter().map(|k| (k * scale).atanh()));
        let t = ThetaVector::new(v)?;
        if iterate_is_stable(&t) {
            return Ok(t);
        }
    }
    Err(Error::DegenerateInput(
        "no stable shrink of the starting point found".into(),
    ))
}

pub fn objective_and_gradient(
    theta: &ThetaVector,
    set: &[Psd],
    cost: &GroundCost,
    config: &OptimizerConfig,
) -> Result<(f64, Vec<f64>)> {
    CentroidProblem::new(set, cost, config)?.objective_and_gradient(theta)
}

pub fn yw_initialize(
    set: &[Psd],
    order: usize,
    cost: &GroundCost,
    config: &SinkhornConfig,
) -> Result<ThetaVector> {
    let cfg = OptimizerConfig {
        model_order: order.max(1),
        sinkhorn: *config,
        ..OptimizerConfig::default()
    };
    CentroidProblem::new(set, cost, &cfg)?.yw_initialize(order)
}

pub fn fit(
    theta0: &ThetaVector,
    set: &[Psd],
    cost: &GroundCost,
    config: &OptimizerConfig,
) -> Result<FitResult> {
    let init = InitStrategy {
        kind: InitKind::Given {
            theta: theta0.clone(),
        },
        seed: 0,
    };
    CentroidProblem::new(set, cost, config)?.fit(theta0, init)
}

pub fn multi_start_fit(
    set: &[Psd],
    strategies: &[InitStrategy],
    cost: &GroundCost,
    config: &OptimizerConfig,
) -> Result<MultiStartReport> {
    CentroidProblem::new(set, cost, config)?.multi_start_fit(strategies)
}

pub fn order_sweep(
    set: &[Psd],
    orders: &[usize],
    strategies: &[InitStrategy],
    cost: &GroundCost,
    config: &OptimizerConfig,
) -> Result<Vec<SweepRow>> {
    Ok(CentroidProblem::new(set, cost, config)?
        .order_sweep(orders, strategies)?
        .0)
}
