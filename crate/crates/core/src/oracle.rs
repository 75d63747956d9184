//! Independent reference solver for tiny entropic OT instances.
//!
//! Minimizes the entropic primal directly over the transport polytope with
//! an equality-constrained Newton method started from the product coupling
//! `p q^T`. Shares no code with the Sinkhorn solver.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral::{GroundCost, Psd};

pub const MAX_ORACLE_BINS: usize = 8;

/// Entropic primal value for `p`, `q` on at most [`MAX_ORACLE_BINS`] bins.
pub fn brute_force_entropic(p: &Psd, q: &Psd, cost: &GroundCost, epsilon: f64) -> Result<f64> {
    p.check_same_grid(q)?;
    brute_force_slices(p.mass(), q.mass(), cost, epsilon)
}

pub fn brute_force_slices(p: &[f64], q: &[f64], cost: &GroundCost, epsilon: f64) -> Result<f64> {
    let n = cost.n();
    if n > MAX_ORACLE_BINS {
        return Err(Error::invalid(format!(
            "reference solver is limited to {MAX_ORACLE_BINS} bins, got {n}"
        )));
    }
    if p.len() != n || q.len() != n {
        return Err(Error::invalid("marginal length does not match the cost"));
    }
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let rows: Vec<usize> = (0..n).filter(|&i| p[i] > 0.0).collect();
    let cols: Vec<usize> = (0..n).filter(|&j| q[j] > 0.0).collect();
    let (nr, nc) = (rows.len(), cols.len());
    if nr == 0 || nc == 0 {
        return Err(Error::DegenerateInput("empty marginal".into()));
    }
    let nv = nr * nc;
    let c: Vec<f64> = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| cost.get(i, j)))
        .collect();
    let b: Vec<f64> = rows
        .iter()
        .map(|&i| p[i])
        .chain(cols[..nc - 1].iter().map(|&j| q[j]))
        .collect();
    let m = b.len();
    // Constraint matrix: one row per support row sum, then all but the last
    // column sum (the last is implied by equal total mass).
    let mut a = DMatrix::<f64>::zeros(m, nv);
    for r in 0..nr {
        for s in 0..nc {
            a[(r, r * nc + s)] = 1.0;
            if s < nc - 1 {
                a[(nr + s, r * nc + s)] = 1.0;
            }
        }
    }

    let objective = |x: &[f64]| -> f64 {
        x.iter()
            .zip(&c)
            .map(|(xi, ci)| ci * xi + epsilon * xi * (xi.ln() - 1.0))
            .sum()
    };

    let mut x: Vec<f64> = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| p[i] * q[j]))
        .collect();
    let mut fx = objective(&x);

    for _ in 0..200 {
        let grad = DVector::from_iterator(nv, x.iter().zip(&c).map(|(xi, ci)| ci + epsilon * xi.ln()));
        let hinv = DVector::from_iterator(nv, x.iter().map(|xi| xi / epsilon));
        let ax = &a * DVector::from_column_slice(&x);
        let resid = DVector::from_column_slice(&b) - ax;

        // (A H^-1 A^T) lambda = -A H^-1 grad - resid
        let mut ahinv = a.clone();
        for j in 0..nv {
            ahinv.column_mut(j).scale_mut(hinv[j]);
        }
        let schur = &ahinv * a.transpose();
        let rhs = -(&ahinv * &grad) - &resid;
        let lambda = schur
            .cholesky()
            .ok_or_else(|| Error::DegenerateInput("singular Newton system".into()))?
            .solve(&rhs);
        let step = -(hinv.component_mul(&(grad + a.transpose() * lambda)));

        let decrement: f64 = step
            .iter()
            .zip(&x)
            .map(|(d, xi)| d * d * epsilon / xi)
            .sum();
        if decrement <= 1e-24 && resid.amax() <= 1e-15 {
            break;
        }

        let mut t = 1.0;
        while x.iter().zip(step.iter()).any(|(xi, d)| xi + t * d <= 0.0) {
            t *= 0.5;
        }
        let dir_deriv = -decrement;
        loop {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, d)| xi + t * d).collect();
            let ft = objective(&trial);
            if ft <= fx + 0.25 * t * dir_deriv || t < 1e-12 {
                x = trial;
                fx = ft;
                break;
            }
            t *= 0.5;
        }
    }
    Ok(fx)
}
