//! Entropic optimal transport between spectra: a log-domain Sinkhorn solver,
//! the barycenter objective with its zero-sum gradient, and the free
//! (nonparametric) entropic barycenter.
//!
//! The entropic cost of a plan `P` is
//!
//! ```text
//! <C, P> + eps * sum_{n,l} P[n,l] (log P[n,l] - 1)
//! ```
//!
//! minimized subject to `P 1 = p`, `P^T 1 = q`. At optimality
//! `P = diag(u) K diag(v)` with `K = exp(-C/eps)`, `f = eps log u`,
//! `g = eps log v`. Only `f` and `g` are ever stored.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lbfgs::{self, LbfgsOptions, Outcome};
use crate::spectral::{GroundCost, Psd};

/// Row sums of the scaled kernel below this value are recomputed with an
/// exact per-row log-sum-exp.
const FAST_PATH_FLOOR: f64 = 1e-200;

/// Tolerance on `|sum - 1|` when a solver input must lie on the simplex.
const SIMPLEX_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinkhornConfig {
    pub epsilon: f64,
    pub max_iters: usize,
    /// L1 violation of the second marginal at which iterations stop.
    pub tol: f64,
}

impl Default for SinkhornConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.07,
            max_iters: 10_000,
            tol: 1e-9,
        }
    }
}

impl SinkhornConfig {
    pub fn new(epsilon: f64, max_iters: usize, tol: f64) -> Result<Self> {
        let cfg = Self {
            epsilon,
            max_iters,
            tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::invalid(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Gibbs kernel `exp(-C/eps)`, kept both in log form and (where it does not
/// underflow) exponentiated.
#[derive(Debug, Clone)]
pub struct GibbsKernel {
    n: usize,
    epsilon: f64,
    log_kernel: Vec<f64>,
    kernel: Vec<f64>,
}

impl GibbsKernel {
    pub fn new(cost: &GroundCost, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::invalid(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        let log_kernel: Vec<f64> = cost.as_slice().iter().map(|c| -c / epsilon).collect();
        let kernel = log_kernel.iter().map(|l| l.exp()).collect();
        Ok(Self {
            n: cost.n(),
            epsilon,
            log_kernel,
            kernel,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `-C[i, j] / eps`.
    pub fn log_entry(&self, i: usize, j: usize) -> f64 {
        self.log_kernel[i * self.n + j]
    }

    /// `exp(-C[i, j] / eps)`; may underflow to zero.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.kernel[i * self.n + j]
    }

    /// `out[i] = LSE_j(-C[i,j]/eps + pot[j]/eps)`.
    ///
    /// The kernel is symmetric, so the same routine serves both the row and
    /// the column reductions.
    fn log_sum_exp(&self, pot: &[f64], out: &mut [f64], weights: &mut [f64]) {
        let eps = self.epsilon;
        let pmax = pot.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (w, p) in weights.iter_mut().zip(pot) {
            *w = ((p - pmax) / eps).exp();
        }
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.kernel[i * self.n..(i + 1) * self.n];
            let s: f64 = row.iter().zip(weights.iter()).map(|(k, w)| k * w).sum();
            *o = if s > FAST_PATH_FLOOR {
                pmax / eps + s.ln()
            } else {
                self.exact_row_lse(i, pot)
            };
        }
    }

    fn exact_row_lse(&self, i: usize, pot: &[f64]) -> f64 {
        let eps = self.epsilon;
        let row = &self.log_kernel[i * self.n..(i + 1) * self.n];
        let m = row
            .iter()
            .zip(pot)
            .map(|(l, p)| l + p / eps)
            .fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = row
            .iter()
            .zip(pot)
            .map(|(l, p)| (l + p / eps - m).exp())
            .sum();
        m + s.ln()
    }
}

/// Dual potentials `f` (first marginal) and `g` (second marginal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPotentials {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl DualPotentials {
    /// `f` shifted to zero sum.
    pub fn centered_f(&self) -> Vec<f64> {
        center(&self.f)
    }
}

fn center(v: &[f64]) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - mean).collect()
}

/// Dense coupling matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    n: usize,
    matrix: Vec<f64>,
}

impl TransportPlan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.n + j]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.matrix.chunks(self.n).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for row in self.matrix.chunks(self.n) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }

    /// Dense CSV with a `# plan N=<N> eps=<eps>` header line.
    pub fn to_csv(&self, epsilon: f64) -> String {
        let mut s = format!("# plan N={} eps={}\n", self.n, epsilon);
        for row in self.matrix.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropicResult {
    /// Primal entropic objective at the recovered plan.
    pub cost: f64,
    pub potentials: DualPotentials,
    pub iterations: usize,
    pub marginal_violation: f64,
}

/// Zero-sum gradient of the entropic cost with respect to the first marginal.
pub fn marginal_gradient(result: &EntropicResult) -> Vec<f64> {
    result.potentials.centered_f()
}

fn log_mass(m: &[f64]) -> Vec<f64> {
    // Empty bins are treated as holding the smallest normal mass so that
    // every potential stays finite.
    m.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect()
}

fn check_simplex(v: &[f64], what: &str) -> Result<()> {
    if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::invalid(format!("{what} must be finite and nonnegative")));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::invalid(format!(
            "{what} must be normalized (sum = {s})"
        )));
    }
    Ok(())
}

/// Sweeps always run before Newton steps are considered.
const MIN_SWEEPS: usize = 20;
/// Newton steps take over when more sweeps than this are predicted.
const SWEEP_BUDGET: usize = 100;
/// Sweeps after which Newton steps take over regardless.
const MAX_SWEEPS: usize = 300;

/// Scratch state of one pairwise solve.
struct SolveState<'a> {
    kernel: &'a GibbsKernel,
    log_p: Vec<f64>,
    log_q: Vec<f64>,
    p: Vec<f64>,
    q: Vec<f64>,
    /// First potential eliminated from the current `g`.
    f: Vec<f64>,
    /// Column sums of the plan defined by `f` and the current `g`.
    col: Vec<f64>,
    lse: Vec<f64>,
    weights: Vec<f64>,
}

impl<'a> SolveState<'a> {
    fn new(kernel: &'a GibbsKernel, p: &[f64], q: &[f64]) -> Self {
        let n = kernel.n;
        let log_p = log_mass(p);
        let log_q = log_mass(q);
        Self {
            kernel,
            p: log_p.iter().map(|l| l.exp()).collect(),
            q: log_q.iter().map(|l| l.exp()).collect(),
            log_p,
            log_q,
            f: vec![0.0; n],
            col: vec![0.0; n],
            lse: vec![0.0; n],
            weights: vec![0.0; n],
        }
    }

    /// f-update for `g`, then the L1 violation of the second marginal.
    fn measure(&mut self, g: &[f64]) -> f64 {
        let eps = self.kernel.epsilon;
        self.kernel.log_sum_exp(g, &mut self.lse, &mut self.weights);
        for i in 0..self.f.len() {
            self.f[i] = eps * (self.log_p[i] - self.lse[i]);
        }
        self.kernel.log_sum_exp(&self.f, &mut self.lse, &mut self.weights);
        let mut violation = 0.0;
        for j in 0..g.len() {
            self.col[j] = (g[j] / eps + self.lse[j]).exp();
            violation += (self.col[j] - self.q[j]).abs();
        }
        violation
    }

    /// Dual value with `f` eliminated; assumes `measure(g)` was the last
    /// call (the plan then has unit mass).
    fn dual(&self, g: &[f64]) -> f64 {
        let eps = self.kernel.epsilon;
        self.f.iter().zip(&self.p).map(|(a, b)| a * b).sum::<f64>()
            + g.iter().zip(&self.q).map(|(a, b)| a * b).sum::<f64>()
            - eps
    }

    /// g-update; assumes `measure(g)` was the last call.
    fn sweep(&mut self, g: &mut [f64]) {
        let eps = self.kernel.epsilon;
        for j in 0..g.len() {
            g[j] = eps * (self.log_q[j] - self.lse[j]);
        }
    }

    /// One damped Newton step on `g`; assumes `measure(g)` reflects `g`.
    /// Returns the new violation, or `None` (leaving `g` and the state as
    /// they were) when no step along the Newton direction reduces it.
    fn newton_step(&mut self, g: &mut [f64], violation: f64) -> Option<f64> {
        let n = g.len();
        let eps = self.kernel.epsilon;
        // In the variables y = sqrt(col) * dg the Hessian of the dual is
        // I - B^T B with B[i,j] = P[i,j] / sqrt(p_i col_j); its null vector
        // sqrt(col) is the constant shift of g and is removed by a rank-one
        // term (the right-hand side is orthogonal to it).
        let root: Vec<f64> = self.col.iter().map(|c| c.sqrt()).collect();
        let mut b = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let rp = self.p[i].sqrt();
            for j in 0..n {
                if root[j] > 0.0 {
                    let plan = (self.kernel.log_entry(i, j) + (self.f[i] + g[j]) / eps).exp();
                    b[(i, j)] = plan / (rp * root[j]);
                }
            }
        }
        let norm2: f64 = self.col.iter().sum();
        let mut h = -b.tr_mul(&b);
        for i in 0..n {
            h[(i, i)] += 1.0;
            for j in 0..n {
                h[(i, j)] += root[i] * root[j] / norm2;
            }
        }
        let rhs = DVector::from_iterator(
            n,
            (0..n).map(|j| {
                if root[j] > 0.0 {
                    eps * (self.q[j] - self.col[j]) / root[j]
                } else {
                    0.0
                }
            }),
        );
        let y = match h.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => {
                for i in 0..n {
                    h[(i, i)] += 1e-12;
                }
                h.cholesky()?.solve(&rhs)
            }
        };
        let step: Vec<f64> = (0..n)
            .map(|j| {
                if root[j] > 0.0 {
                    (y[j] / root[j]).clamp(-MAX_NEWTON_MOVE * eps, MAX_NEWTON_MOVE * eps)
                } else {
                    0.0
                }
            })
            .collect();
        // Armijo ascent on the dual value, or a drop in violation (the dual
        // value stops resolving progress near the optimum).
        let base = self.dual(g);
        let slope: f64 = (0..n).map(|j| (self.q[j] - self.col[j]) * step[j]).sum();
        let mut t = 1.0;
        let mut trial = vec![0.0; n];
        for _ in 0..30 {
            for j in 0..n {
                trial[j] = g[j] + t * step[j];
            }
            let v = self.measure(&trial);
            if v < violation || self.dual(&trial) >= base + 1e-4 * t * slope {
                g.copy_from_slice(&trial);
                return Some(v);
            }
            t *= 0.5;
        }
        self.measure(g);
        None
    }

    fn finish(self, g: Vec<f64>, iterations: usize, violation: f64) -> EntropicResult {
        let eps = self.kernel.epsilon;
        let cost = self.f.iter().zip(&self.p).map(|(a, b)| a * b).sum::<f64>()
            + g.iter().zip(&self.col).map(|(a, b)| a * b).sum::<f64>()
            - eps * self.col.iter().sum::<f64>();
        EntropicResult {
            cost,
            potentials: DualPotentials { f: self.f, g },
            iterations,
            marginal_violation: violation,
        }
    }
}

/// Bound on a single Newton move of any potential entry, in units of eps.
const MAX_NEWTON_MOVE: f64 = 30.0;

/// Log-domain Sinkhorn solver bound to one ground cost and regularization.
#[derive(Debug, Clone)]
pub struct Sinkhorn {
    kernel: GibbsKernel,
    config: SinkhornConfig,
}

impl Sinkhorn {
    pub fn new(cost: &GroundCost, config: SinkhornConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            kernel: GibbsKernel::new(cost, config.epsilon)?,
            config,
        })
    }

    pub fn config(&self) -> &SinkhornConfig {
        &self.config
    }

    pub fn kernel(&self) -> &GibbsKernel {
        &self.kernel
    }

    pub fn n(&self) -> usize {
        self.kernel.n
    }

    pub fn solve(&self, p: &Psd, q: &Psd) -> Result<EntropicResult> {
        p.check_same_grid(q)?;
        self.solve_slices(p.mass(), q.mass(), None)
    }

    /// Solves on raw mass vectors. `warm_g` seeds the second potential.
    ///
    /// Runs plain alternating updates first. When their observed
    /// contraction is too slow to meet `tol` soon (typical when both spectra
    /// are sharply peaked and the inter-peak mass balance is a slow mode),
    /// the remaining iterations are Newton steps on the concave dual in `g`
    /// with `f` eliminated. Every iteration of either kind counts towards
    /// `max_iters`.
    pub fn solve_slices(
        &self,
        p: &[f64],
        q: &[f64],
        warm_g: Option<&[f64]>,
    ) -> Result<EntropicResult> {
        let n = self.kernel.n;
        if p.len() != n || q.len() != n {
            return Err(Error::invalid(format!(
                "marginals have {} and {} bins, cost has {n}",
                p.len(),
                q.len()
            )));
        }
        check_simplex(p, "first marginal")?;
        check_simplex(q, "second marginal")?;
        let mut st = SolveState::new(&self.kernel, p, q);
        let mut g = match warm_g {
            Some(w) if w.len() == n && w.iter().all(|x| x.is_finite()) => w.to_vec(),
            _ => vec![0.0; n],
        };
        let max_iters = self.config.max_iters;
        let tol = self.config.tol;
        let mut violation = st.measure(&g);
        let mut newton = false;
        for it in 1..=max_iters {
            if newton {
                // A sweep after each Newton step corrects the bins whose
                // log-ratio col/q the linearization handles poorly.
                if let Some(v) = st.newton_step(&mut g, violation) {
                    violation = v;
                }
                if violation > tol {
                    st.sweep(&mut g);
                    violation = st.measure(&g);
                }
            } else {
                let previous = violation;
                st.sweep(&mut g);
                violation = st.measure(&g);
                // Switch once the observed contraction predicts more sweeps
                // than a few Newton steps would cost.
                if it >= MIN_SWEEPS && violation > tol {
                    let rate = violation / previous;
                    let needed = if rate < 1.0 {
                        (tol / violation).ln() / rate.ln()
                    } else {
                        f64::INFINITY
                    };
                    newton = needed > SWEEP_BUDGET as f64 || it >= MAX_SWEEPS;
                }
            }
            if !violation.is_finite() {
                return Err(Error::NoConvergence {
                    iterations: it,
                    violation,
                });
            }
            if violation <= tol {
                return Ok(st.finish(g, it, violation));
            }
        }
        Err(Error::NoConvergence {
            iterations: max_iters,
            violation,
        })
    }

    pub fn plan(&self, result: &EntropicResult) -> TransportPlan {
        let n = self.kernel.n;
        let eps = self.config.epsilon;
        let DualPotentials { f, g } = &result.potentials;
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                matrix[i * n + j] = (self.kernel.log_entry(i, j) + (f[i] + g[j]) / eps).exp();
            }
        }
        TransportPlan { n, matrix }
    }

    /// Dual objective `<f,p> + <g,q> - eps * sum exp((f_i + g_j - C_ij)/eps)`.
    pub fn dual_value(&self, p: &[f64], q: &[f64], potentials: &DualPotentials) -> f64 {
        let n = self.kernel.n;
        let eps = self.config.epsilon;
        let DualPotentials { f, g } = potentials;
        let mut mass = 0.0;
        for i in 0..n {
            for j in 0..n {
                mass += (self.kernel.log_entry(i, j) + (f[i] + g[j]) / eps).exp();
            }
        }
        let lin: f64 = f.iter().zip(p).map(|(a, b)| a * b.max(f64::MIN_POSITIVE)).sum::<f64>()
            + g.iter().zip(q).map(|(a, b)| a * b.max(f64::MIN_POSITIVE)).sum::<f64>();
        lin - eps * mass
    }

    /// Average entropic cost from `center` to every member of `set`, and
    /// the averaged zero-sum first potentials (its gradient in `center`).
    pub fn barycenter_objective(&self, center: &Psd, set: &[Psd]) -> Result<(f64, Vec<f64>)> {
        let mut cache = vec![None; set.len()];
        self.barycenter_objective_warm(center, set, &mut cache)
    }

    /// As [`Sinkhorn::barycenter_objective`], seeding each solve with the
    /// second potential cached from a previous call and refreshing the cache.
    pub fn barycenter_objective_warm(
        &self,
        center: &Psd,
        set: &[Psd],
        cache: &mut [Option<Vec<f64>>],
    ) -> Result<(f64, Vec<f64>)> {
        if set.is_empty() {
            return Err(Error::invalid("barycenter objective of an empty set"));
        }
        assert_eq!(cache.len(), set.len(), "one cache slot per target");
        let n = center.n_bins();
        let mut value = 0.0;
        let mut grad = vec![0.0; n];
        for (k, (target, slot)) in set.iter().zip(cache.iter_mut()).enumerate() {
            center
                .check_same_grid(target)
                .map_err(|e| Error::at_target(k, e))?;
            let res = self
                .solve_slices(center.mass(), target.mass(), slot.as_deref())
                .map_err(|e| Error::at_target(k, e))?;
            value += res.cost;
            for (acc, f) in grad.iter_mut().zip(marginal_gradient(&res)) {
                *acc += f;
            }
            *slot = Some(res.potentials.g);
        }
        let kf = set.len() as f64;
        grad.iter_mut().for_each(|v| *v /= kf);
        Ok((value / kf, grad))
    }

    /// Free entropic barycenter: the minimizer over all nonnegative centers
    /// of the average entropic cost to `set`.
    ///
    /// Solved on the reduced barycenter dual. For fixed second potentials
    /// `g_k`, the first potentials under the zero-sum constraint
    /// `sum_k f_k = 0` are available in closed form, and every coupling then
    /// has the same first marginal, the geometric mean of the `u_k * K v_k`
    /// (the Bregman-projection fixed point). The remaining concave problem
    /// in the `g_k` is maximized with L-BFGS until each coupling's second
    /// marginal is within `tol` (L1) of its target.
    pub fn free_barycenter(&self, set: &[Psd]) -> Result<FreeBarycenter> {
        let first = set
            .first()
            .ok_or_else(|| Error::invalid("barycenter of an empty set"))?;
        let n = self.kernel.n;
        if first.n_bins() != n {
            return Err(Error::invalid("set and cost live on different grids"));
        }
        for (k, psd) in set.iter().enumerate() {
            first
                .check_same_grid(psd)
                .map_err(|e| Error::at_target(k, e))?;
            check_simplex(psd.mass(), "barycenter input").map_err(|e| Error::at_target(k, e))?;
        }
        let eps = self.config.epsilon;
        let kk = set.len();
        let kf = kk as f64;
        // Second potentials are -inf off the support of each target.
        let support: Vec<Vec<usize>> = set
            .iter()
            .map(|p| (0..n).filter(|&j| p.mass()[j] > 0.0).collect())
            .collect();
        let offsets: Vec<usize> = support
            .iter()
            .scan(0, |acc, s| {
                let o = *acc;
                *acc += s.len();
                Some(o)
            })
            .collect();
        let n_vars: usize = support.iter().map(Vec::len).sum();

        let mut lse = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let expand = |x: &[f64], k: usize| -> Vec<f64> {
            let mut g = vec![f64::NEG_INFINITY; n];
            for (i, &j) in support[k].iter().enumerate() {
                g[j] = x[offsets[k] + i];
            }
            g
        };

        // Start from one Bregman half-step with u = 1.
        let ones = vec![0.0; n];
        let mut x = vec![0.0; n_vars];
        self.kernel.log_sum_exp(&ones, &mut lse, &mut weights);
        for (k, psd) in set.iter().enumerate() {
            for (i, &j) in support[k].iter().enumerate() {
                x[offsets[k] + i] = eps * (psd.mass()[j].ln() - lse[j]);
            }
        }

        let mut log_center = vec![0.0; n];
        let mut evaluate = |x: &[f64], log_center: &mut Vec<f64>| -> (f64, Vec<f64>) {
            let gs: Vec<Vec<f64>> = (0..kk).map(|k| expand(x, k)).collect();
            let mut ln_s = vec![vec![0.0; n]; kk];
            for k in 0..kk {
                self.kernel.log_sum_exp(&gs[k], &mut ln_s[k], &mut weights);
            }
            for i in 0..n {
                log_center[i] = ln_s.iter().map(|l| l[i]).sum::<f64>() / kf;
            }
            let mut value = -eps * log_center.iter().map(|m| m.exp()).sum::<f64>();
            let mut grad = vec![0.0; n_vars];
            let mut f = vec![0.0; n];
            for k in 0..kk {
                for i in 0..n {
                    f[i] = eps * (log_center[i] - ln_s[k][i]);
                }
                self.kernel.log_sum_exp(&f, &mut lse, &mut weights);
                for (i, &j) in support[k].iter().enumerate() {
                    let q = set[k].mass()[j];
                    let g = gs[k][j];
                    value += g * q / kf;
                    let col = (g / eps + lse[j]).exp();
                    grad[offsets[k] + i] = -(q - col) / kf;
                }
            }
            (-value, grad)
        };

        let tol = self.config.tol;
        let violation_of = |grad: &[f64]| -> f64 {
            (0..kk)
                .map(|k| {
                    grad[offsets[k]..offsets[k] + support[k].len()]
                        .iter()
                        .map(|v| v.abs())
                        .sum::<f64>()
                        * kf
                })
                .fold(0.0, f64::max)
        };
        let mut last_violation = f64::INFINITY;
        let opts = LbfgsOptions {
            max_iters: self.config.max_iters,
            ..LbfgsOptions::default()
        };
        let outcome = lbfgs::minimize(
            &mut x,
            &opts,
            |x| evaluate(x, &mut log_center),
            |_, grad| {
                last_violation = violation_of(grad);
                last_violation <= tol
            },
        );
        match outcome {
            Outcome::Converged { iterations } => {
                // Recompute the center at the accepted point.
                let _ = evaluate(&x, &mut log_center);
                let center: Vec<f64> = log_center.iter().map(|l| l.exp()).collect();
                let total: f64 = center.iter().sum();
                let mass = center.iter().map(|c| c / total).collect();
                Ok(FreeBarycenter {
                    psd: Psd::new(first.grid(), mass)?,
                    iterations,
                    violation: last_violation,
                })
            }
            Outcome::Stopped { iterations } => Err(Error::NoConvergence {
                iterations,
                violation: last_violation,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeBarycenter {
    pub psd: Psd,
    pub iterations: usize,
    /// Largest L1 violation of a coupling's second marginal. All couplings
    /// share the returned first marginal exactly.
    pub violation: f64,
}

/// One-shot entropic OT between two normalized spectra.
pub fn sinkhorn(p: &Psd, q: &Psd, cost: &GroundCost, config: SinkhornConfig) -> Result<EntropicResult> {
    Sinkhorn::new(cost, config)?.solve(p, q)
}

/// Average entropic cost of `center` to `set` and its zero-sum gradient.
pub fn barycenter_objective(
    center: &Psd,
    set: &[Psd],
    cost: &GroundCost,
    config: SinkhornConfig,
) -> Result<(f64, Vec<f64>)> {
    Sinkhorn::new(cost, config)?.barycenter_objective(center, set)
}

/// Undamped free entropic barycenter of `set`.
pub fn free_barycenter(set: &[Psd], cost: &GroundCost, config: SinkhornConfig) -> Result<Psd> {
    Ok(Sinkhorn::new(cost, config)?.free_barycenter(set)?.psd)
}
