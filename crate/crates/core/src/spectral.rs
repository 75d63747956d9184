//! Frequency grids on the circle, discretized spectra, the circular ground
//! cost and the classical (non-transport) spectral distances.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Floor added inside the logarithms and ratios of the KL and IS divergences.
pub const DIVERGENCE_FLOOR: f64 = 1e-12;

/// Tolerance on `|sum - 1|` for a spectrum to count as normalized.
pub const NORMALIZED_TOL: f64 = 1e-12;

/// Uniform grid of `n_bins` angular frequencies covering `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrequencyGrid {
    n_bins: usize,
}

impl FrequencyGrid {
    pub fn new(n_bins: usize) -> Result<Self> {
        if n_bins < 2 {
            return Err(Error::invalid(format!(
                "frequency grid needs at least 2 bins, got {n_bins}"
            )));
        }
        Ok(Self { n_bins })
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn spacing(&self) -> f64 {
        TWO_PI / self.n_bins as f64
    }

    /// The `n`-th grid frequency, `-pi + n * 2pi / N`.
    pub fn point(&self, n: usize) -> f64 {
        -PI + TWO_PI * n as f64 / self.n_bins as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_bins).map(|n| self.point(n)).collect()
    }

    /// Index of the bin holding `-omega` (the grid is symmetric about zero
    /// except for `-pi`, which maps to itself).
    pub fn mirror_index(&self, n: usize) -> usize {
        (self.n_bins - n) % self.n_bins
    }
}

/// Shorthand for [`FrequencyGrid::new`].
pub fn make_grid(n_bins: usize) -> Result<FrequencyGrid> {
    FrequencyGrid::new(n_bins)
}

/// Squared geodesic distance on the circle between two angles.
pub fn circular_cost(w1: f64, w2: f64) -> f64 {
    let d = (w1 - w2).abs().rem_euclid(TWO_PI);
    let d = d.min(TWO_PI - d);
    d * d
}

/// A nonnegative spectral mass vector on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Psd {
    grid: FrequencyGrid,
    mass: Vec<f64>,
    normalized: bool,
}

impl Psd {
    pub fn new(grid: FrequencyGrid, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != grid.n_bins() {
            return Err(Error::invalid(format!(
                "spectrum has {} bins but the grid has {}",
                mass.len(),
                grid.n_bins()
            )));
        }
        if let Some((i, v)) = mass
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::invalid(format!(
                "spectral mass must be finite and nonnegative (bin {i} = {v})"
            )));
        }
        let normalized = (mass.iter().sum::<f64>() - 1.0).abs() <= NORMALIZED_TOL;
        Ok(Self {
            grid,
            mass,
            normalized,
        })
    }

    /// Builds a spectrum from raw values, inferring the grid from the length.
    pub fn from_mass(mass: Vec<f64>) -> Result<Self> {
        let grid = FrequencyGrid::new(mass.len())?;
        Self::new(grid, mass)
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn n_bins(&self) -> usize {
        self.mass.len()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn into_mass(self) -> Vec<f64> {
        self.mass
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn normalize(&self) -> Result<Psd> {
        normalize(self)
    }

    pub(crate) fn check_same_grid(&self, other: &Psd) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::invalid(format!(
                "grid mismatch: {} vs {} bins",
                self.n_bins(),
                other.n_bins()
            )));
        }
        Ok(())
    }
}

/// Rescales a spectrum to unit total mass. Spectra already within
/// [`NORMALIZED_TOL`] of unit mass are returned unchanged.
pub fn normalize(psd: &Psd) -> Result<Psd> {
    let total = psd.total();
    if !(total > 0.0) {
        return Err(Error::DegenerateInput(
            "cannot normalize a spectrum with zero total mass".into(),
        ));
    }
    if psd.normalized {
        return Ok(psd.clone());
    }
    let mass = psd.mass.iter().map(|m| m / total).collect();
    Ok(Psd {
        grid: psd.grid,
        mass,
        normalized: true,
    })
}

/// Dense pairwise ground cost `C[n, l] = c(omega_n, omega_l)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundCost {
    n: usize,
    matrix: Vec<f64>,
}

impl GroundCost {
    /// Circular squared-distance cost on `grid`. The result is circulant.
    pub fn circular(grid: &FrequencyGrid) -> Self {
        let n = grid.n_bins();
        let points = grid.points();
        let mut matrix = vec![0.0; n * n];
        for (i, wi) in points.iter().enumerate() {
            for (j, wj) in points.iter().enumerate() {
                matrix[i * n + j] = circular_cost(*wi, *wj);
            }
        }
        Self { n, matrix }
    }

    /// Arbitrary symmetric cost matrix given row-major; used for tiny
    /// hand-built instances (a one-bin problem, for example).
    pub fn from_matrix(n: usize, matrix: Vec<f64>) -> Result<Self> {
        if n == 0 || matrix.len() != n * n {
            return Err(Error::invalid(format!(
                "cost matrix must be {n}x{n}, got {} entries",
                matrix.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let c = matrix[i * n + j];
                if !c.is_finite() || c < 0.0 || c != matrix[j * n + i] {
                    return Err(Error::invalid(
                        "cost matrix must be finite, nonnegative and symmetric",
                    ));
                }
            }
        }
        Ok(Self { n, matrix })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.matrix[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.matrix
    }
}

/// Shorthand for [`GroundCost::circular`].
pub fn build_cost(grid: &FrequencyGrid) -> GroundCost {
    GroundCost::circular(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaselineKind {
    L2,
    #[serde(rename = "KL")]
    Kl,
    #[serde(rename = "IS")]
    Is,
}

/// L2 (grid-weighted), generalized KL and Itakura-Saito distances.
///
/// KL and IS are evaluated on the floored vectors `p + DIVERGENCE_FLOOR` and
/// `q + DIVERGENCE_FLOOR`, so they stay finite on spectra with empty bins.
pub fn baseline_distance(kind: BaselineKind, p: &Psd, q: &Psd) -> Result<f64> {
    p.check_same_grid(q)?;
    let pairs = p.mass.iter().zip(&q.mass);
    let d = match kind {
        BaselineKind::L2 => {
            pairs.map(|(a, b)| (a - b) * (a - b)).sum::<f64>() * p.grid.spacing()
        }
        BaselineKind::Kl => pairs
            .map(|(a, b)| {
                let (a, b) = (a + DIVERGENCE_FLOOR, b + DIVERGENCE_FLOOR);
                a * (a / b).ln() - a + b
            })
            .sum(),
        BaselineKind::Is => pairs
            .map(|(a, b)| {
                let r = (a + DIVERGENCE_FLOOR) / (b + DIVERGENCE_FLOOR);
                r - r.ln() - 1.0
            })
            .sum(),
    };
    // Rounding can push a zero divergence a hair below zero.
    Ok(d.max(0.0))
}

/// Entrywise mean of a set of spectra.
pub fn arithmetic_mean_centroid(set: &[Psd]) -> Result<Psd> {
    let first = set
        .first()
        .ok_or_else(|| Error::invalid("cannot average an empty set"))?;
    let mut acc = vec![0.0; first.n_bins()];
    for psd in set {
        first.check_same_grid(psd)?;
        for (a, m) in acc.iter_mut().zip(&psd.mass) {
            *a += m;
        }
    }
    let k = set.len() as f64;
    acc.iter_mut().for_each(|a| *a /= k);
    Psd::new(first.grid, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_conventions() {
        let g = make_grid(2).unwrap();
        assert_eq!(g.points(), vec![-PI, 0.0]);
        assert_eq!(g.spacing(), PI);

        let g = make_grid(4).unwrap();
        assert_eq!(g.points(), vec![-PI, -PI / 2.0, 0.0, PI / 2.0]);

        let g = make_grid(128).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 128);
        assert_abs_diff_eq!(g.spacing(), 2.0 * PI / 128.0);
        for w in pts.windows(2) {
            assert_abs_diff_eq!(w[1] - w[0], g.spacing(), epsilon = 1e-14);
        }

        assert!(matches!(make_grid(1), Err(Error::InvalidArgument(_))));
        assert!(make_grid(0).is_err());
    }

    #[test]
    fn mirror_index_maps_omega_to_minus_omega() {
        let g = make_grid(8).unwrap();
        for n in 1..8 {
            let m = g.mirror_index(n);
            assert_abs_diff_eq!(g.point(m), -g.point(n), epsilon = 1e-12);
        }
        assert_eq!(g.mirror_index(0), 0);
    }

    #[test]
    fn circular_cost_examples() {
        assert_eq!(circular_cost(0.3, 0.3), 0.0);
        assert_abs_diff_eq!(circular_cost(0.0, PI), PI * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(
            circular_cost(-3.0, 3.0),
            (2.0 * PI - 6.0).powi(2),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(circular_cost(-3.0, 3.0), 0.0802, epsilon = 1e-4);
    }

    #[test]
    fn cost_matrix_examples() {
        let c = build_cost(&make_grid(2).unwrap());
        assert_eq!(c.as_slice(), &[0.0, PI * PI, PI * PI, 0.0]);

        let c = build_cost(&make_grid(4).unwrap());
        let expect = [0.0, (PI / 2.0).powi(2), PI * PI, (PI / 2.0).powi(2)];
        for (a, b) in c.row(0).iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }

        let n = 37;
        let c = build_cost(&make_grid(n).unwrap());
        for i in 0..n {
            assert_eq!(c.get(i, i), 0.0);
            for j in 0..n {
                assert_eq!(c.get(i, j), c.get(j, i));
                assert!(c.get(i, j) <= PI * PI + 1e-12);
                // circulant
                assert_abs_diff_eq!(c.get(i, j), c.get((i + 1) % n, (j + 1) % n), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn normalize_examples() {
        let p = Psd::from_mass(vec![2.0, 2.0]).unwrap().normalize().unwrap();
        assert_eq!(p.mass(), &[0.5, 0.5]);
        assert!(p.is_normalized());
        let p = Psd::from_mass(vec![1.0, 3.0]).unwrap().normalize().unwrap();
        assert_eq!(p.mass(), &[0.25, 0.75]);
        let zero = Psd::from_mass(vec![0.0, 0.0]).unwrap();
        assert!(matches!(zero.normalize(), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn psd_rejects_bad_mass() {
        assert!(Psd::from_mass(vec![1.0, -0.1]).is_err());
        assert!(Psd::from_mass(vec![1.0, f64::NAN]).is_err());
        let g = make_grid(4).unwrap();
        assert!(Psd::new(g, vec![1.0; 3]).is_err());
    }

    #[test]
    fn baseline_examples() {
        let p = Psd::from_mass(vec![1.0, 0.0]).unwrap();
        let q = Psd::from_mass(vec![0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(
            baseline_distance(BaselineKind::L2, &p, &q).unwrap(),
            2.0 * PI,
            epsilon = 1e-12
        );

        let p = Psd::from_mass(vec![0.6, 0.4]).unwrap();
        let q = Psd::from_mass(vec![0.5, 0.5]).unwrap();
        let oracle: f64 = [(0.6f64, 0.5f64), (0.4, 0.5)]
            .iter()
            .map(|(a, b)| a / b - (a / b).ln() - 1.0)
            .sum();
        let is = baseline_distance(BaselineKind::Is, &p, &q).unwrap();
        assert_abs_diff_eq!(is, oracle, epsilon = 1e-10);
        assert_abs_diff_eq!(is, 0.04082, epsilon = 1e-5);

        for kind in [BaselineKind::L2, BaselineKind::Kl, BaselineKind::Is] {
            assert_eq!(baseline_distance(kind, &p, &p).unwrap(), 0.0);
        }

        let short = Psd::from_mass(vec![0.2, 0.3, 0.5]).unwrap();
        assert!(matches!(
            baseline_distance(BaselineKind::Kl, &p, &short),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn kl_is_asymmetric() {
        let p = Psd::from_mass(vec![0.7, 0.2, 0.1]).unwrap();
        let q = Psd::from_mass(vec![0.2, 0.3, 0.5]).unwrap();
        let pq = baseline_distance(BaselineKind::Kl, &p, &q).unwrap();
        let qp = baseline_distance(BaselineKind::Kl, &q, &p).unwrap();
        assert!((pq - qp).abs() > 1e-3);
    }

    #[test]
    fn empty_bins_stay_finite() {
        let p = Psd::from_mass(vec![1.0, 0.0, 0.0]).unwrap();
        let q = Psd::from_mass(vec![0.0, 0.5, 0.5]).unwrap();
        for kind in [BaselineKind::Kl, BaselineKind::Is] {
            assert!(baseline_distance(kind, &p, &q).unwrap().is_finite());
        }
    }

    #[test]
    fn arithmetic_mean_examples() {
        let a = Psd::from_mass(vec![1.0, 0.0]).unwrap();
        let b = Psd::from_mass(vec![0.0, 1.0]).unwrap();
        assert_eq!(arithmetic_mean_centroid(std::slice::from_ref(&a)).unwrap().mass(), &[1.0, 0.0]);
        let m = arithmetic_mean_centroid(&[a, b]).unwrap();
        assert_eq!(m.mass(), &[0.5, 0.5]);
        assert!(m.is_normalized());
        assert!(matches!(
            arithmetic_mean_centroid(&[]),
            Err(Error::InvalidArgument(_))
        ));
    }
}
