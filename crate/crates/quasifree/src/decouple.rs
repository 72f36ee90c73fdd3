//! Half-space decoupling into one-dimensional chains.
//!
//! Fixing the transverse momentum `phi'` of a D-dimensional model yields an
//! effective 1D chain whose dispersion is the parent dispersion with the
//! transverse angles frozen:
//!
//! ```text
//! lambda_{phi'}(phi_1) = lambda((phi_1, phi')).
//! ```
//!
//! The orthogonal transverse Fourier transform that justifies this reduction
//! is never materialized; the chain's real-space coefficients are obtained
//! analytically by folding the transverse cosines into each longitudinal
//! offset. Half-space quantities are then transverse-grid averages of
//! per-chain quantities.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{golden_min, minimize_periodic, ModelSpec, Statistics, STABILITY_TOL};

/// Effective one-dimensional chain at fixed transverse momentum.
///
/// Stores the real-space coefficients `c_l` for `l = 0..=range`; the chain
/// dispersion is `c_0 + 2 sum_{l>=1} c_l cos(l phi_1)` (coefficients are even
/// in `l` for the reflection-symmetric couplings in scope).
#[derive(Debug, Clone)]
pub struct ChainModel {
    statistics: Statistics,
    transverse_phi: Vec<f64>,
    coeffs: Vec<f64>,
}

impl ChainModel {
    /// The chain of `model` at transverse momentum `phi_p` (D-1 components).
    pub fn from_model(model: &ModelSpec, phi_p: &[f64]) -> Result<Self> {
        if phi_p.len() + 1 != model.dimension() {
            return Err(Error::DimensionMismatch {
                expected: model.dimension() - 1,
                got: phi_p.len(),
            });
        }
        let range = model.range() as usize;
        let mut cos_part = vec![0.0f64; range + 1];
        let mut sin_part = vec![0.0f64; range + 1];
        let mut scale = 0.0f64;
        for (offset, &value) in model.couplings() {
            let dot: f64 = offset[1..]
                .iter()
                .zip(phi_p)
                .map(|(&l, &p)| l as f64 * p)
                .sum();
            let l1 = offset[0];
            scale = scale.max(value.abs());
            if l1 >= 0 {
                cos_part[l1 as usize] += value * dot.cos();
                sin_part[l1 as usize] += value * dot.sin();
            }
        }
        // A real symmetric chain requires the sine components to cancel,
        // which holds for transverse-reflection-symmetric couplings.
        for (l, s) in sin_part.iter().enumerate() {
            if s.abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "coupling is not reflection-symmetric transversally: \
                     chain coefficient at offset {l} has imaginary part {s:.3e}"
                )));
            }
        }
        Ok(ChainModel {
            statistics: model.statistics(),
            transverse_phi: phi_p.to_vec(),
            coeffs: cos_part,
        })
    }

    /// Build a chain directly from its real-space coefficients
    /// `[c_0, c_1, ..., c_R]`.
    pub fn from_coefficients(statistics: Statistics, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("chain needs at least c_0".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("chain coefficients must be finite".into()));
        }
        Ok(ChainModel {
            statistics,
            transverse_phi: Vec::new(),
            coeffs,
        })
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn transverse_phi(&self) -> &[f64] {
        &self.transverse_phi
    }

    /// Real-space coefficients `c_0..=c_R`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Chain dispersion `lambda_{phi'}(phi_1)`.
    pub fn dispersion(&self, phi1: f64) -> f64 {
        let mut sum = self.coeffs[0];
        for (l, c) in self.coeffs.iter().enumerate().skip(1) {
            sum += 2.0 * c * (l as f64 * phi1).cos();
        }
        sum
    }

    /// Spectrum on the N-site ring: `lambda(2 pi m / N)`.
    pub fn spectrum(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|m| self.dispersion(TAU * m as f64 / n as f64))
            .collect()
    }

    /// For nearest-neighbor chains, the (diagonal, hopping) pair `(h, a)`.
    pub fn nearest_neighbor_form(&self) -> Option<(f64, f64)> {
        if self.coeffs.len() <= 2 {
            Some((self.coeffs[0], self.coeffs.get(1).copied().unwrap_or(0.0)))
        } else if self.coeffs[2..].iter().all(|c| *c == 0.0) {
            Some((self.coeffs[0], self.coeffs[1]))
        } else {
            None
        }
    }

    /// Extrema of the chain dispersion over one period.
    pub fn dispersion_extrema(&self) -> (f64, f64) {
        let res = 512.max(64 * (self.coeffs.len() - 1).max(1));
        let (_, min) = minimize_periodic(|p| self.dispersion(p[0]), 1, res, 1e-12);
        let (_, neg_max) = minimize_periodic(|p| -self.dispersion(p[0]), 1, res, 1e-12);
        (min, -neg_max)
    }

    /// Energy gap of the chain: `sqrt(min lambda)` for bosons (instability
    /// error below `-STABILITY_TOL`), `min |lambda|` for fermions.
    pub fn gap(&self) -> Result<f64> {
        match self.statistics {
            Statistics::Boson => {
                let (min, _) = self.dispersion_extrema();
                if min < -STABILITY_TOL {
                    Err(Error::UnstableHamiltonian {
                        lambda_min: min,
                        tol: STABILITY_TOL,
                    })
                } else {
                    Ok(min.max(0.0).sqrt())
                }
            }
            Statistics::Fermion => {
                let res = 512.max(64 * (self.coeffs.len() - 1).max(1));
                let (_, min) = minimize_periodic(|p| self.dispersion(p[0]).abs(), 1, res, 1e-12);
                Ok(min)
            }
        }
    }

    pub(crate) fn golden_refine_abs_min(&self, a: f64, b: f64) -> (f64, f64) {
        golden_min(|x| self.dispersion(x).abs(), a, b, 1e-13)
    }
}

/// Analytic gap of the critical nearest-neighbor boson family:
/// `Delta E(phi')^2 D = D - sum_d cos(phi'_d) - 1`.
pub fn critical_boson_chain_gap(phi_p: &[f64], dimension: usize) -> Result<f64> {
    if phi_p.len() + 1 != dimension {
        return Err(Error::DimensionMismatch {
            expected: dimension - 1,
            got: phi_p.len(),
        });
    }
    let d = dimension as f64;
    let s: f64 = phi_p.iter().map(|p| p.cos()).sum();
    let gap2 = (d - s - 1.0) / d;
    if gap2 < -STABILITY_TOL {
        return Err(Error::UnstableHamiltonian {
            lambda_min: gap2,
            tol: STABILITY_TOL,
        });
    }
    Ok(gap2.max(0.0).sqrt())
}

/// Uniform grid over the transverse Brillouin zone `[0, 2pi)^{D-1}`.
#[derive(Debug, Clone)]
pub struct TransverseGrid {
    transverse_dim: usize,
    resolution: usize,
}

impl TransverseGrid {
    /// `transverse_dim = D - 1` axes at `resolution` points each. A
    /// zero-dimensional grid (D = 1) has exactly one point, the empty tuple.
    pub fn new(transverse_dim: usize, resolution: usize) -> Result<Self> {
        if transverse_dim > 0 && resolution == 0 {
            return Err(Error::InvalidInput("grid resolution must be >= 1".into()));
        }
        Ok(TransverseGrid {
            transverse_dim,
            resolution,
        })
    }

    pub fn transverse_dim(&self) -> usize {
        self.transverse_dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        if self.transverse_dim == 0 {
            1
        } else {
            self.resolution.pow(self.transverse_dim as u32)
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight per point, `(2 pi / N')^{D-1}`.
    pub fn weight(&self) -> f64 {
        (TAU / self.resolution as f64).powi(self.transverse_dim as i32)
    }

    /// The multi-index of flat grid index `i`, row-major.
    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.transverse_dim];
        for d in (0..self.transverse_dim).rev() {
            idx[d] = i % self.resolution;
            i /= self.resolution;
        }
        idx
    }

    /// Transverse momentum of flat grid index `i`.
    pub fn phi(&self, i: usize) -> Vec<f64> {
        self.multi_index(i)
            .into_iter()
            .map(|k| TAU * k as f64 / self.resolution as f64)
            .collect()
    }

    /// Canonical representative of `i` under the per-axis mirror
    /// `k -> N' - k`, which leaves reflection-symmetric dispersions
    /// invariant; used to halve scan work.
    pub fn canonical_index(&self, i: usize) -> usize {
        let idx = self.multi_index(i);
        let mut flat = 0usize;
        for k in idx {
            let c = k.min((self.resolution - k) % self.resolution);
            flat = flat * self.resolution + c;
        }
        flat
    }
}

/// Policy for non-finite per-chain values during aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfinitePolicy {
    /// Any non-finite value is an error.
    Error,
    /// Infinite values are punctured: the grid point is excluded from the
    /// sum while the normalization keeps the full grid weight (the excluded
    /// set must be measure-zero for the estimate to converge).
    Puncture,
}

/// Result of a transverse aggregation.
#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    /// `(1/(2pi)^{D-1}) * sum values * weight`.
    pub value: f64,
    /// Resolution-halving error estimate (difference against the
    /// even-index subgrid), when the grid admits one.
    pub error: Option<f64>,
    /// Number of punctured grid points.
    pub punctured: usize,
}

/// Aggregate per-chain values over the transverse grid:
/// the Riemann estimate of `int f(phi') d phi' / (2pi)^{D-1}`.
///
/// Summation is compensated and runs in grid order, so the result is
/// independent of how the values were produced (worker count included).
pub fn aggregate(
    values: &[f64],
    grid: &TransverseGrid,
    policy: InfinitePolicy,
) -> Result<Aggregate> {
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: values.len(),
        });
    }
    let mut punctured = 0usize;
    for (i, v) in values.iter().enumerate() {
        if v.is_nan() {
            return Err(Error::NonFiniteAggregate { index: i });
        }
        if v.is_infinite() {
            match policy {
                InfinitePolicy::Error => return Err(Error::NonFiniteAggregate { index: i }),
                InfinitePolicy::Puncture => punctured += 1,
            }
        }
    }
    let norm = grid.weight() / TAU.powi(grid.transverse_dim() as i32);
    let mean_filtered = |stride: usize| -> f64 {
        // Kahan summation in fixed grid order.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        let mut count = 0usize;
        for (i, &v) in values.iter().enumerate() {
            if !is_on_subgrid(grid, i, stride) {
                continue;
            }
            count += 1;
            if !v.is_finite() {
                continue;
            }
            let y = v - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        let _ = count;
        sum
    };
    let full = mean_filtered(1) * norm;
    let error = if grid.transverse_dim() > 0 && grid.resolution() % 2 == 0 && grid.resolution() >= 4
    {
        let half_norm = (TAU / (grid.resolution() / 2) as f64)
            .powi(grid.transverse_dim() as i32)
            / TAU.powi(grid.transverse_dim() as i32);
        let half = mean_filtered(2) * half_norm;
        Some((full - half).abs())
    } else {
        None
    };
    Ok(Aggregate {
        value: full,
        error,
        punctured,
    })
}

fn is_on_subgrid(grid: &TransverseGrid, flat: usize, stride: usize) -> bool {
    if stride == 1 {
        return true;
    }
    grid.multi_index(flat).iter().all(|k| k % stride == 0)
}

/// Per-chain record emitted by the half-space scans.
#[derive(Debug, Clone, Serialize)]
pub struct ChainRecord {
    /// Transverse momentum components.
    pub phi_p: Vec<f64>,
    /// Symbol discontinuity count, when computed.
    pub s: Option<usize>,
    /// Chain energy gap.
    pub gap: f64,
    /// Entanglement entropy of the half split (bits).
    pub entropy: f64,
    /// Logarithmic negativity of the half split (bits), when computed.
    pub negativity: Option<f64>,
}

impl ChainRecord {
    pub fn csv_header(transverse_dim: usize) -> String {
        let mut cols: Vec<String> = (1..=transverse_dim).map(|d| format!("phi{}", d + 1)).collect();
        cols.extend(["s", "gap", "entropy", "negativity"].map(String::from));
        cols.join(",")
    }

    pub fn to_csv_row(&self, fmt: impl Fn(f64) -> String) -> String {
        let mut cols: Vec<String> = self.phi_p.iter().map(|p| fmt(*p)).collect();
        cols.push(self.s.map(|s| s.to_string()).unwrap_or_default());
        cols.push(fmt(self.gap));
        cols.push(fmt(self.entropy));
        cols.push(self.negativity.map(&fmt).unwrap_or_default());
        cols.join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn chain_of_nn_fermion_at_pi() {
        let m = ModelSpec::fermion_nearest_neighbor(2, 1.0).unwrap();
        let chain = ChainModel::from_model(&m, &[PI]).unwrap();
        assert!((chain.coefficients()[0] - (-1.0)).abs() < 1e-14);
        assert!((chain.coefficients()[1] - 1.0).abs() < 1e-14);
        // lambda(phi1) = -1 + 2 cos(phi1)
        assert!((chain.dispersion(0.0) - 1.0).abs() < 1e-14);
        assert!((chain.dispersion(PI) + 3.0).abs() < 1e-14);
    }

    #[test]
    fn chain_of_critical_boson_at_half_pi() {
        let m = ModelSpec::boson_critical(2).unwrap();
        let chain = ChainModel::from_model(&m, &[PI / 2.0]).unwrap();
        assert!((chain.coefficients()[0] - 1.0).abs() < 1e-14);
        assert!((chain.coefficients()[1] - (-0.25)).abs() < 1e-14);
    }

    #[test]
    fn d1_chain_is_the_model() {
        let m = ModelSpec::boson_nearest_neighbor(1, 0.3).unwrap();
        let chain = ChainModel::from_model(&m, &[]).unwrap();
        for phi in [0.0, 0.7, 2.2, PI] {
            assert!((chain.dispersion(phi) - m.dispersion(&[phi]).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn chain_dispersion_matches_parent_pointwise() {
        let m = ModelSpec::new(
            Statistics::Fermion,
            2,
            vec![
                (vec![0, 0], 0.4),
                (vec![1, 0], 0.8),
                (vec![0, 1], -0.3),
                (vec![1, 1], 0.1),
                (vec![1, -1], 0.1),
                (vec![2, 0], -0.05),
            ],
        )
        .unwrap();
        for &pp in &[0.0, 0.4, 1.9, PI, 5.0] {
            let chain = ChainModel::from_model(&m, &[pp]).unwrap();
            for k in 0..24 {
                let phi1 = TAU * k as f64 / 24.0;
                let a = chain.dispersion(phi1);
                let b = m.dispersion(&[phi1, pp]).unwrap();
                assert!((a - b).abs() < 1e-12, "phi'={pp} phi1={phi1}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn non_reflection_symmetric_coupling_is_rejected() {
        // V_(1,1) = V_(-1,-1) = v only: symmetric under l -> -l but not under
        // transverse reflection, so the chain would be complex.
        let m = ModelSpec::new(Statistics::Fermion, 2, vec![(vec![1, 1], 0.5)]).unwrap();
        let err = ChainModel::from_model(&m, &[1.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn chain_gaps() {
        let b = ModelSpec::boson_critical(2).unwrap();
        let chain = ChainModel::from_model(&b, &[PI]).unwrap();
        assert!((chain.gap().unwrap() - 1.0).abs() < 1e-10);
        assert!((critical_boson_chain_gap(&[PI], 2).unwrap() - 1.0).abs() < 1e-15);

        let chain0 = ChainModel::from_model(&b, &[0.0]).unwrap();
        assert!(chain0.gap().unwrap() < 1e-9);
        assert_eq!(critical_boson_chain_gap(&[0.0], 2).unwrap(), 0.0);

        let f = ModelSpec::fermion_nearest_neighbor(2, 1.0).unwrap();
        let chain = ChainModel::from_model(&f, &[PI]).unwrap();
        assert!(chain.gap().unwrap() < 1e-11);
    }

    #[test]
    fn analytic_gap_matches_numeric_on_critical_family() {
        let b = ModelSpec::boson_critical(3).unwrap();
        for &(p, q) in &[(0.5, 1.0), (PI, PI), (2.0, 0.3)] {
            let chain = ChainModel::from_model(&b, &[p, q]).unwrap();
            let numeric = chain.gap().unwrap();
            let analytic = critical_boson_chain_gap(&[p, q], 3).unwrap();
            assert!((numeric - analytic).abs() < 1e-9, "{numeric} vs {analytic}");
        }
    }

    #[test]
    fn aggregate_normalization() {
        let grid = TransverseGrid::new(1, 64).unwrap();
        let values = vec![3.25; 64];
        let agg = aggregate(&values, &grid, InfinitePolicy::Error).unwrap();
        assert!((agg.value - 3.25).abs() < 1e-14);
        assert!(agg.error.unwrap() < 1e-14);
    }

    #[test]
    fn aggregate_cos_squared() {
        let grid = TransverseGrid::new(1, 4096).unwrap();
        let values: Vec<f64> = (0..4096).map(|i| grid.phi(i)[0].cos().powi(2)).collect();
        let agg = aggregate(&values, &grid, InfinitePolicy::Error).unwrap();
        assert!((agg.value - 0.5).abs() < 1e-6, "{}", agg.value);
    }

    #[test]
    fn aggregate_d1_degenerates_to_single_value() {
        let grid = TransverseGrid::new(0, 1).unwrap();
        let agg = aggregate(&[1.75], &grid, InfinitePolicy::Error).unwrap();
        assert_eq!(agg.value, 1.75);
    }

    #[test]
    fn aggregate_rejects_nan_and_punctures_infinity() {
        let grid = TransverseGrid::new(1, 4).unwrap();
        assert!(aggregate(&[1.0, f64::NAN, 0.0, 0.0], &grid, InfinitePolicy::Puncture).is_err());
        assert!(aggregate(&[1.0, f64::INFINITY, 0.0, 0.0], &grid, InfinitePolicy::Error).is_err());
        let agg =
            aggregate(&[1.0, f64::INFINITY, 1.0, 1.0], &grid, InfinitePolicy::Puncture).unwrap();
        assert_eq!(agg.punctured, 1);
        assert!((agg.value - 0.75).abs() < 1e-15);
    }

    #[test]
    fn grid_points_and_weights() {
        let grid = TransverseGrid::new(2, 8).unwrap();
        assert_eq!(grid.len(), 64);
        assert!((grid.weight() * 64.0 - TAU * TAU).abs() < 1e-12);
        let phi = grid.phi(8 + 3);
        assert!((phi[0] - TAU / 8.0).abs() < 1e-15);
        assert!((phi[1] - 3.0 * TAU / 8.0).abs() < 1e-15);
        assert_eq!(grid.canonical_index(8 * 7 + 5), 8 + 3);
    }
}
