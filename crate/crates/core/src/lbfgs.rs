//! Limited-memory BFGS for smooth convex minimization.
//!
//! The line search tolerates objectives whose value differences fall below
//! floating-point resolution near the optimum: once the value change is
//! lost in rounding, a step is accepted on the strength of the directional
//! derivative alone (convexity makes that safe).

use std::collections::VecDeque;

pub(crate) struct LbfgsOptions {
    pub memory: usize,
    pub max_iters: usize,
    pub max_line_search: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            memory: 12,
            max_iters: 20_000,
            max_line_search: 40,
        }
    }
}

pub(crate) enum Outcome {
    Converged { iterations: usize },
    /// Iteration budget exhausted or no acceptable step found.
    Stopped { iterations: usize },
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `eval` from `x`, stopping as soon as `done(x)` holds at an
/// evaluated point. `eval` returns the value and the gradient.
pub(crate) fn minimize<E, D>(x: &mut Vec<f64>, opts: &LbfgsOptions, mut eval: E, mut done: D) -> Outcome
where
    E: FnMut(&[f64]) -> (f64, Vec<f64>),
    D: FnMut(&[f64], &[f64]) -> bool,
{
    let (mut fx, mut grad) = eval(x);
    if done(x, &grad) {
        return Outcome::Converged { iterations: 0 };
    }
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);

    for it in 1..=opts.max_iters {
        // Two-loop recursion for d = -H grad.
        let mut q = grad.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        let gamma = hist
            .back()
            .map(|(s, y, _)| dot(s, y) / dot(y, y))
            .unwrap_or_else(|| 1.0 / grad.iter().map(|g| g.abs()).sum::<f64>().max(1.0));
        q.iter_mut().for_each(|v| *v *= gamma);
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut dir: Vec<f64> = q.into_iter().map(|v| -v).collect();
        let mut slope = dot(&dir, &grad);
        if !(slope < 0.0) {
            hist.clear();
            dir = grad.iter().map(|g| -g).collect();
            slope = dot(&dir, &grad);
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..opts.max_line_search {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + t * di).collect();
            let (ft, gt) = eval(&trial);
            if ft.is_finite() {
                let slope_t = dot(&dir, &gt);
                let noise = 1e-13 * fx.abs().max(1.0);
                let armijo = ft <= fx + 1e-4 * t * slope;
                let flat = (ft - fx).abs() <= noise && slope_t.abs() <= 0.9 * slope.abs();
                if armijo || flat {
                    accepted = Some((trial, ft, gt));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((nx, nf, ng)) = accepted else {
            return Outcome::Stopped { iterations: it };
        };
        let s: Vec<f64> = nx.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = ng.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if hist.len() == opts.memory {
                hist.pop_front();
            }
            hist.push_back((s, y, 1.0 / sy));
        }
        *x = nx;
        fx = nf;
        grad = ng;
        if done(x, &grad) {
            return Outcome::Converged { iterations: it };
        }
    }
    Outcome::Stopped {
        iterations: opts.max_iters,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_ill_conditioned_quadratic() {
        let scales: Vec<f64> = (0..20).map(|i| 10f64.powf(i as f64 / 5.0)).collect();
        let mut x = vec![1.0; 20];
        let out = minimize(
            &mut x,
            &LbfgsOptions::default(),
            |x| {
                let f = x.iter().zip(&scales).map(|(v, s)| 0.5 * s * v * v).sum();
                let g = x.iter().zip(&scales).map(|(v, s)| s * v).collect();
                (f, g)
            },
            |_, g| g.iter().map(|v| v.abs()).sum::<f64>() < 1e-12,
        );
        assert!(matches!(out, Outcome::Converged { .. }));
        assert!(x.iter().all(|v| v.abs() < 1e-12));
    }
}
