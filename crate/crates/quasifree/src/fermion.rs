//! Fermionic half-space scaling: symbol topology, Fermi-set volumes, the
//! per-chain log law and its transverse aggregate, and the finite-N
//! area-law-violation bound.
//!
//! Per chain the entanglement entropy of a block of M sites obeys
//!
//! ```text
//! E_S(phi') = s(phi')/6 * log2(M) + c(phi') + o(log M),
//! ```
//!
//! where `s` counts the discontinuities of the symbol `sgn(lambda_{phi'})`.
//! Aggregating over transverse momenta turns the counts into set volumes:
//! the coefficient of `log2 M` in the half-space density is
//! `sum_sigma sigma v(Phi_sigma) / (6 (2pi)^{D-1})`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{self, ScalingFit};
use crate::decouple::{aggregate, ChainModel, ChainRecord, InfinitePolicy, TransverseGrid};
use crate::error::{Error, Result};
use crate::gaussian::{self, find_symbol_zeros, symbol_coefficients, SymbolMode};
use crate::model::ModelSpec;
use crate::with_pool;

/// Subleading constant of the half-filled chain entropy,
/// `c_0 = lim_M [E_S(M) - log2(M)/3]`, fitted once over M in [64, 2048]
/// (see `fit_c0`) and stored here so downstream asymptotics are
/// self-contained.
pub const DEFAULT_C0: f64 = 1.047_493_2;

/// Discontinuity structure of a chain symbol.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolTopology {
    /// Number of sign changes of the symbol on `[0, 2pi)`.
    pub discontinuities: usize,
    /// Locations of the sign changes, ascending.
    pub zeros: Vec<f64>,
    /// Touching zeros that do not change the sign (flagged, not counted).
    pub tangential: Vec<f64>,
}

/// Count the strict sign changes of `sgn(lambda_{phi'}(phi_1))`.
///
/// Coarse sampling (4096 points) followed by bisection refinement; tangential
/// zeros are reported separately and do not increment the count.
pub fn count_discontinuities(chain: &ChainModel) -> Result<SymbolTopology> {
    let zeros = find_symbol_zeros(chain, 4096)?;
    Ok(SymbolTopology {
        discontinuities: zeros.sign_changes.len(),
        zeros: zeros.sign_changes,
        tangential: zeros.tangential,
    })
}

/// Estimator choice for Fermi-set volumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeEstimator {
    /// Transverse-grid classification. For D = 2 the boundaries of the
    /// constant-s intervals are refined by bisection, so the returned measure
    /// is limited by the boundary refinement rather than the cell size.
    Grid { resolution: usize },
    /// Closed form for the D = 2 nearest-neighbor family:
    /// `v(Phi_2) = 2 arccos(1/(2|a|) - 1)` for `|a| > 1/4`, else 0.
    AnalyticNearestNeighbor,
}

/// A measured (or analytic) Fermi-set volume `v(Phi_sigma)`.
#[derive(Debug, Clone, Serialize)]
pub struct FermiSetVolume {
    pub sigma: usize,
    pub volume: f64,
    /// Nested-grid error bar (zero for the analytic branch).
    pub error: f64,
    pub resolution: Option<usize>,
    /// Set for the analytic branch outside its critical domain.
    pub non_critical: bool,
}

/// Closed-form `v(Phi_2)` for the D = 2 nearest-neighbor family.
pub fn analytic_phi2_volume(a: f64) -> f64 {
    if a.abs() <= 0.25 {
        0.0
    } else {
        2.0 * (1.0 / (2.0 * a.abs()) - 1.0).acos()
    }
}

/// Volume of the set of transverse momenta whose symbol has exactly `sigma`
/// discontinuities.
pub fn phi_sigma_volume(
    model: &ModelSpec,
    sigma: usize,
    estimator: VolumeEstimator,
) -> Result<FermiSetVolume> {
    match estimator {
        VolumeEstimator::AnalyticNearestNeighbor => {
            if model.dimension() != 2 {
                return Err(Error::InvalidInput(
                    "analytic branch requires the D=2 nearest-neighbor family".into(),
                ));
            }
            if sigma != 2 {
                return Err(Error::InvalidInput(
                    "analytic branch only covers sigma = 2".into(),
                ));
            }
            let a = nn_hopping(model)?;
            let volume = analytic_phi2_volume(a);
            Ok(FermiSetVolume {
                sigma,
                volume,
                error: 0.0,
                resolution: None,
                non_critical: volume == 0.0,
            })
        }
        VolumeEstimator::Grid { resolution } => {
            if resolution < 8 {
                return Err(Error::InvalidInput("grid resolution too small".into()));
            }
            let fine = measured_volume(model, sigma, resolution)?;
            let coarse = measured_volume(model, sigma, resolution / 2)?;
            Ok(FermiSetVolume {
                sigma,
                volume: fine,
                error: (fine - coarse).abs(),
                resolution: Some(resolution),
                non_critical: fine == 0.0,
            })
        }
    }
}

/// Hopping of a nearest-neighbor model with unit diagonal.
fn nn_hopping(model: &ModelSpec) -> Result<f64> {
    let d = model.dimension();
    let zero = vec![0i64; d];
    let diag = model.couplings().get(&zero).copied().unwrap_or(0.0);
    if (diag - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(
            "analytic branch requires unit diagonal coupling".into(),
        ));
    }
    let mut e1 = vec![0i64; d];
    e1[0] = 1;
    let a = model
        .couplings()
        .get(&e1)
        .copied()
        .ok_or_else(|| Error::InvalidInput("missing nearest-neighbor coupling".into()))?;
    for (offset, &v) in model.couplings() {
        let norm1: i64 = offset.iter().map(|x| x.abs()).sum();
        match norm1 {
            0 => {}
            1 => {
                if (v - a).abs() > 1e-12 {
                    return Err(Error::InvalidInput(
                        "analytic branch requires isotropic hopping".into(),
                    ));
                }
            }
            _ => {
                return Err(Error::InvalidInput(
                    "analytic branch requires nearest-neighbor support".into(),
                ))
            }
        }
    }
    Ok(a)
}

fn measured_volume(model: &ModelSpec, sigma: usize, resolution: usize) -> Result<f64> {
    if model.dimension() == 2 {
        let partition = symbol_partition(model, resolution)?;
        Ok(partition
            .iter()
            .filter(|(_, _, s)| *s == sigma)
            .map(|(a, b, _)| b - a)
            .sum())
    } else {
        // Plain counting fraction on the (D-1)-dimensional grid.
        let grid = TransverseGrid::new(model.dimension() - 1, resolution)?;
        let mut hits = 0usize;
        for i in 0..grid.len() {
            let chain = ChainModel::from_model(model, &grid.phi(i))?;
            if count_discontinuities(&chain)?.discontinuities == sigma {
                hits += 1;
            }
        }
        Ok(TAU.powi(grid.transverse_dim() as i32) * hits as f64 / grid.len() as f64)
    }
}

/// Partition of the D = 2 transverse circle into maximal intervals of
/// constant discontinuity count: `(start, end, s)` with ends refined by
/// bisection to ~1e-12.
pub fn symbol_partition(model: &ModelSpec, resolution: usize) -> Result<Vec<(f64, f64, usize)>> {
    if model.dimension() != 2 {
        return Err(Error::InvalidInput(
            "symbol partition is defined for D = 2".into(),
        ));
    }
    let n = resolution.max(8);
    let s_at = |phi: f64| -> Result<usize> {
        let chain = ChainModel::from_model(model, &[phi])?;
        Ok(count_discontinuities(&chain)?.discontinuities)
    };
    let step = TAU / n as f64;
    let counts: Vec<usize> = (0..n)
        .map(|i| s_at(step * i as f64))
        .collect::<Result<_>>()?;
    if counts.iter().all(|s| *s == counts[0]) {
        return Ok(vec![(0.0, TAU, counts[0])]);
    }
    // Refine every boundary between adjacent cells with different s.
    let mut boundaries: Vec<(f64, usize)> = Vec::new(); // (location, s right of it)
    for i in 0..n {
        let j = (i + 1) % n;
        if counts[i] == counts[j] {
            continue;
        }
        let mut a = step * i as f64;
        let mut b = step * (i + 1) as f64;
        let sa = counts[i];
        for _ in 0..60 {
            if b - a <= 1e-12 {
                break;
            }
            let mid = 0.5 * (a + b);
            if s_at(mid)? == sa {
                a = mid;
            } else {
                b = mid;
            }
        }
        boundaries.push((0.5 * (a + b), counts[j]));
    }
    boundaries.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut partition = Vec::with_capacity(boundaries.len());
    for (idx, &(start, s_right)) in boundaries.iter().enumerate() {
        let end = if idx + 1 < boundaries.len() {
            boundaries[idx + 1].0
        } else {
            boundaries[0].0 + TAU
        };
        partition.push((start, end, s_right));
    }
    Ok(partition)
}

/// The asymptotic per-chain entropy `s/6 log2(M) + c(phi')`.
pub fn asymptotic_entropy(chain: &ChainModel, m: usize, c0: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidInput("block size must be >= 2".into()));
    }
    let topology = count_discontinuities(chain)?;
    let c = subleading_c(chain, c0)?;
    Ok(topology.discontinuities as f64 / 6.0 * (m as f64).log2() + c)
}

/// Analytic subleading constant for nearest-neighbor chains with field `h`:
/// `c = log2(1 - h^2/4)/6 + c0`, valid for `|h| < 2`.
pub fn subleading_c_analytic(h: f64, c0: f64) -> Result<f64> {
    if h.abs() >= 2.0 {
        return Err(Error::InvalidInput(format!(
            "analytic subleading constant needs |h| < 2, got h = {h}"
        )));
    }
    Ok((1.0 - h * h / 4.0).log2() / 6.0 + c0)
}

/// Subleading constant `c(phi')` of a chain.
///
/// Non-critical chains have `c = 0` exactly (the isotropic gapped symbol is
/// constant). Critical nearest-neighbor chains with `|h| < 2` use the
/// analytic formula; anything else falls back to the numeric fit
/// `E_S(M) - s/6 log2 M` extrapolated over a geometric M ladder.
pub fn subleading_c(chain: &ChainModel, c0: f64) -> Result<f64> {
    let topology = count_discontinuities(chain)?;
    if topology.discontinuities == 0 {
        return Ok(0.0);
    }
    if let Some((h, _)) = chain.nearest_neighbor_form() {
        if h.abs() < 2.0 {
            return subleading_c_analytic(h, c0);
        }
    }
    subleading_c_numeric(chain, &[64, 128, 256, 512]).map(|(c, _)| c)
}

/// Numeric subleading constant: extrapolate `E_S(M) - s/6 log2 M` over a
/// geometric ladder. Returns `(value, spread)`.
pub fn subleading_c_numeric(chain: &ChainModel, ms: &[usize]) -> Result<(f64, f64)> {
    if ms.len() < 3 {
        return Err(Error::InvalidInput("need at least 3 ladder points".into()));
    }
    let s = count_discontinuities(chain)?.discontinuities as f64;
    let entropies = exact_entropy_ladder(chain, ms)?;
    let cs: Vec<f64> = entropies
        .iter()
        .zip(ms)
        .map(|(e, &m)| e - s / 6.0 * (m as f64).log2())
        .collect();
    match analysis::convergence_estimate(&cs) {
        Ok(pair) => Ok(pair),
        // Oscillatory-but-bounded subleading corrections: report the last
        // ladder value with the final swing as its spread.
        Err(_) => {
            let last = *cs.last().unwrap();
            let spread = (cs[cs.len() - 1] - cs[cs.len() - 2]).abs();
            Ok((last, spread))
        }
    }
}

/// Exact double-scaling-limit entropies of a chain for each block size in
/// `ms` (symbol coefficients in integral mode, full dense spectra).
pub fn exact_entropy_ladder(chain: &ChainModel, ms: &[usize]) -> Result<Vec<f64>> {
    let max_m = ms.iter().copied().max().unwrap_or(0);
    if max_m == 0 {
        return Ok(Vec::new());
    }
    let corr = symbol_coefficients(chain, SymbolMode::Integral, max_m)?;
    let mut out = Vec::with_capacity(ms.len());
    for &m in ms {
        let sub = gaussian::ToeplitzCorrelation::from_coefficients(
            corr.coefficients()[..m].to_vec(),
        )?;
        out.push(gaussian::fermion_entropy(&sub)?);
    }
    Ok(out)
}

/// Coefficient of `log2 M` in the half-space entropy density:
/// `sum_sigma sigma v(Phi_sigma) / (6 (2pi)^{D-1})`.
pub fn halfspace_log_prefactor(
    model: &ModelSpec,
    max_sigma: usize,
    resolution: usize,
) -> Result<f64> {
    if model.dimension() == 2 {
        let partition = symbol_partition(model, resolution)?;
        let mut sum = 0.0;
        for (a, b, s) in partition {
            if s > 0 && s <= max_sigma {
                sum += s as f64 * (b - a);
            }
        }
        Ok(sum / (6.0 * TAU))
    } else {
        let mut sum = 0.0;
        for sigma in 1..=max_sigma {
            let v = phi_sigma_volume(model, sigma, VolumeEstimator::Grid { resolution })?;
            sum += sigma as f64 * v.volume;
        }
        Ok(sum / (6.0 * TAU.powi(model.dimension() as i32 - 1)))
    }
}

/// Harmonic lower-bound series for the half-filled D = 2 model:
/// `sum_{l=1}^{N/2-1} 4/(pi^2 l)`.
pub fn lower_bound_series(n: usize) -> Result<f64> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidInput(
            "lower bound series needs even N >= 4".into(),
        ));
    }
    Ok((1..n / 2).map(|l| 4.0 / (PI * PI * l as f64)).sum())
}

/// Fit `c_0` from the half-filled chain: extrapolate
/// `E_S(M) - log2(M)/3` over the given ladder.
pub fn fit_c0(ms: &[usize]) -> Result<f64> {
    let model = ModelSpec::fermion_half_filled(1, 1.0)?;
    let chain = ChainModel::from_model(&model, &[])?;
    subleading_c_numeric(&chain, ms).map(|(c, _)| c)
}

/// Aggregated fermionic scaling data over the transverse grid.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    /// Block sizes of the ladder.
    pub ms: Vec<usize>,
    /// Half-space entropy density estimate at each ladder point.
    pub aggregates: Vec<f64>,
    /// Fit of `aggregates` against `log2 M`.
    pub fit: ScalingFit,
    /// Analytic prediction for the fit prefactor.
    pub predicted_prefactor: f64,
    /// Per-chain records (entropy at the largest M).
    pub per_chain: Vec<ChainRecord>,
    pub grid_resolution: usize,
}

/// Scan the half-space entropy density `E(M)` of a fermionic model over the
/// transverse grid and fit the logarithmic law.
///
/// Chains are processed in canonical-representative batches (mirror momenta
/// share their value) and reduced in grid order, so the outcome does not
/// depend on the worker count.
pub fn halfspace_entropy_scan(
    model: &ModelSpec,
    grid_resolution: usize,
    ms: &[usize],
    workers: usize,
) -> Result<ScalingReport> {
    if model.statistics() != crate::model::Statistics::Fermion {
        return Err(Error::InvalidInput("fermionic model required".into()));
    }
    if ms.len() < 4 {
        return Err(Error::InvalidInput("need an M ladder of >= 4 points".into()));
    }
    let grid = TransverseGrid::new(model.dimension() - 1, grid_resolution)?;
    let canonical: Vec<usize> = {
        let mut c: Vec<usize> = (0..grid.len()).map(|i| grid.canonical_index(i)).collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let per_canonical: Vec<(usize, SymbolTopology, f64, Vec<f64>)> = with_pool(workers, || {
        canonical
            .par_iter()
            .map(|&i| {
                let chain = ChainModel::from_model(model, &grid.phi(i))?;
                let topology = count_discontinuities(&chain)?;
                let gap = chain.gap()?;
                let entropies = if topology.discontinuities == 0 {
                    vec![0.0; ms.len()]
                } else {
                    exact_entropy_ladder(&chain, ms)?
                };
                Ok((i, topology, gap, entropies))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let lookup: std::collections::BTreeMap<usize, &(usize, SymbolTopology, f64, Vec<f64>)> =
        per_canonical.iter().map(|e| (e.0, e)).collect();

    let mut aggregates = Vec::with_capacity(ms.len());
    for (mi, _) in ms.iter().enumerate() {
        let values: Vec<f64> = (0..grid.len())
            .map(|i| lookup[&grid.canonical_index(i)].3[mi])
            .collect();
        aggregates.push(aggregate(&values, &grid, InfinitePolicy::Error)?.value);
    }
    let points: Vec<(f64, f64)> = ms
        .iter()
        .zip(&aggregates)
        .map(|(&m, &v)| (m as f64, v))
        .collect();
    let fit = analysis::fit_log_scaling(&points)?;
    let predicted = halfspace_log_prefactor(model, 2 * model.range() as usize, 1024)?;

    let per_chain: Vec<ChainRecord> = (0..grid.len())
        .map(|i| {
            let entry = lookup[&grid.canonical_index(i)];
            ChainRecord {
                phi_p: grid.phi(i),
                s: Some(entry.1.discontinuities),
                gap: entry.2,
                entropy: *entry.3.last().unwrap(),
                negativity: None,
            }
        })
        .collect();
    Ok(ScalingReport {
        ms: ms.to_vec(),
        aggregates,
        fit,
        predicted_prefactor: predicted,
        per_chain,
        grid_resolution,
    })
}

/// Finite-N half-space entropy density `sum_k E_S(k)/N` at `M = N/2` for a
/// fermionic model on the N-torus (finite-N symbol, N' = N chains).
pub fn finite_n_halfspace_mean(model: &ModelSpec, n: usize, workers: usize) -> Result<f64> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidInput("need even N >= 4".into()));
    }
    let grid = TransverseGrid::new(model.dimension() - 1, n)?;
    let canonical: Vec<usize> = {
        let mut c: Vec<usize> = (0..grid.len()).map(|i| grid.canonical_index(i)).collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let m = n / 2;
    let values_c: Vec<(usize, f64)> = with_pool(workers, || {
        canonical
            .par_iter()
            .map(|&i| {
                let chain = ChainModel::from_model(model, &grid.phi(i))?;
                let corr = symbol_coefficients(&chain, SymbolMode::FiniteN(n), m)?;
                Ok((i, gaussian::fermion_entropy(&corr)?))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let lookup: std::collections::BTreeMap<usize, f64> = values_c.into_iter().collect();
    let values: Vec<f64> = (0..grid.len())
        .map(|i| lookup[&grid.canonical_index(i)])
        .collect();
    Ok(aggregate(&values, &grid, InfinitePolicy::Error)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Statistics;

    #[test]
    fn discontinuity_counts() {
        // D=2 NN fermion, a=1, phi'=pi: lambda = -1 + 2 cos(phi_1), s = 2.
        let model = ModelSpec::fermion_nearest_neighbor(2, 1.0).unwrap();
        let chain = ChainModel::from_model(&model, &[PI]).unwrap();
        let topo = count_discontinuities(&chain).unwrap();
        assert_eq!(topo.discontinuities, 2);
        assert!((topo.zeros[0] - PI / 3.0).abs() < 1e-11);

        // Gapped: 1 + 0.2 cos.
        let chain = ChainModel::from_coefficients(Statistics::Fermion, vec![1.0, 0.1]).unwrap();
        assert_eq!(count_discontinuities(&chain).unwrap().discontinuities, 0);
    }

    #[test]
    fn phi2_membership_matches_condition() {
        // s = 2 exactly when |1/(2a) + cos(phi')| < 1.
        let a = 0.8;
        let model = ModelSpec::fermion_nearest_neighbor(2, a).unwrap();
        for k in 0..40 {
            let phi = TAU * (k as f64 + 0.5) / 40.0;
            let chain = ChainModel::from_model(&model, &[phi]).unwrap();
            let s = count_discontinuities(&chain).unwrap().discontinuities;
            let inside = (1.0 / (2.0 * a) + phi.cos()).abs() < 1.0;
            assert_eq!(s == 2, inside, "phi'={phi}");
            assert!(s == 0 || s == 2);
        }
    }

    #[test]
    fn degenerate_dispersion_rejected() {
        let chain = ChainModel::from_coefficients(Statistics::Fermion, vec![0.0]).unwrap();
        assert!(matches!(
            count_discontinuities(&chain),
            Err(Error::DegenerateSymbol)
        ));
    }

    #[test]
    fn analytic_volumes() {
        assert!((analytic_phi2_volume(0.5) - PI).abs() < 1e-14);
        assert_eq!(analytic_phi2_volume(0.2), 0.0);
        assert!((analytic_phi2_volume(1.0) - 4.0 * PI / 3.0).abs() < 1e-14);

        let model = ModelSpec::fermion_nearest_neighbor(2, 0.2).unwrap();
        let v = phi_sigma_volume(&model, 2, VolumeEstimator::AnalyticNearestNeighbor).unwrap();
        assert_eq!(v.volume, 0.0);
        assert!(v.non_critical);
    }

    #[test]
    fn grid_volume_matches_analytic() {
        for a in [0.3, 0.5, 1.0] {
            let model = ModelSpec::fermion_nearest_neighbor(2, a).unwrap();
            let v = phi_sigma_volume(&model, 2, VolumeEstimator::Grid { resolution: 512 }).unwrap();
            let exact = analytic_phi2_volume(a);
            assert!(
                (v.volume - exact).abs() < 1e-6,
                "a={a}: {} vs {exact}",
                v.volume
            );
        }
    }

    #[test]
    fn measure_zero_fermi_set_of_boson_like_symbol() {
        // Fermion with the critical boson dispersion: lambda >= 0 with a
        // pointlike zero set, so every v(Phi_sigma), sigma >= 1, vanishes.
        let model = ModelSpec::new(
            Statistics::Fermion,
            2,
            vec![
                (vec![0, 0], 1.0),
                (vec![1, 0], -0.25),
                (vec![0, 1], -0.25),
            ],
        )
        .unwrap();
        for sigma in 1..=2 {
            let v =
                phi_sigma_volume(&model, sigma, VolumeEstimator::Grid { resolution: 256 }).unwrap();
            assert_eq!(v.volume, 0.0, "sigma={sigma}");
        }
    }

    #[test]
    fn subleading_constants() {
        // Half filling: h = 0, c = c0 exactly.
        let model = ModelSpec::fermion_half_filled(2, 1.0).unwrap();
        let chain = ChainModel::from_model(&model, &[PI / 2.0]).unwrap();
        let c = subleading_c(&chain, DEFAULT_C0).unwrap();
        assert!((c - DEFAULT_C0).abs() < 1e-12);

        // Non-critical chain: c = 0.
        let gapped = ChainModel::from_coefficients(Statistics::Fermion, vec![3.0, 0.5]).unwrap();
        assert_eq!(subleading_c(&gapped, DEFAULT_C0).unwrap(), 0.0);

        // h = 1: log2(3/4)/6 + c0.
        let expect = (0.75f64).log2() / 6.0 + DEFAULT_C0;
        let c = subleading_c_analytic(1.0, DEFAULT_C0).unwrap();
        assert!((c - expect).abs() < 1e-15);
        assert!(subleading_c_analytic(2.0, DEFAULT_C0).is_err());
    }

    #[test]
    fn asymptotic_entropy_form() {
        let model = ModelSpec::fermion_nearest_neighbor(2, 1.0).unwrap();
        let chain = ChainModel::from_model(&model, &[PI]).unwrap();
        // s = 2, h = -1: (1/3) log2(1024) + log2(3/4)/6 + c0.
        let e = asymptotic_entropy(&chain, 1024, DEFAULT_C0).unwrap();
        let expect = 10.0 / 3.0 + (0.75f64).log2() / 6.0 + DEFAULT_C0;
        assert!((e - expect).abs() < 1e-12);
    }

    #[test]
    fn prefactor_values() {
        let m = ModelSpec::fermion_nearest_neighbor(2, 0.5).unwrap();
        let p = halfspace_log_prefactor(&m, 4, 512).unwrap();
        assert!((p - 1.0 / 6.0).abs() < 1e-9, "{p}");

        let m = ModelSpec::fermion_nearest_neighbor(2, 1.0).unwrap();
        let p = halfspace_log_prefactor(&m, 4, 512).unwrap();
        assert!((p - 2.0 / 9.0).abs() < 1e-9, "{p}");

        let gapped = ModelSpec::fermion_nearest_neighbor(2, 0.1).unwrap();
        assert_eq!(halfspace_log_prefactor(&gapped, 4, 256).unwrap(), 0.0);
    }

    #[test]
    fn lower_bound_values() {
        assert!((lower_bound_series(4).unwrap() - 4.0 / (PI * PI)).abs() < 1e-15);
        let expect = 25.0 / (3.0 * PI * PI);
        assert!((lower_bound_series(10).unwrap() - expect).abs() < 1e-14);
        assert!(lower_bound_series(5).is_err());
        assert!(lower_bound_series(2).is_err());
        // Harmonic growth: roughly (4/pi^2) log 2 per doubling.
        let g1 = lower_bound_series(64).unwrap() - lower_bound_series(32).unwrap();
        let g2 = lower_bound_series(128).unwrap() - lower_bound_series(64).unwrap();
        let per_doubling = 4.0 / (PI * PI) * (2.0f64).ln();
        assert!((g1 - per_doubling).abs() < 0.02);
        assert!((g2 - per_doubling).abs() < 0.01);
    }

    #[test]
    fn volume_monotone_in_hopping() {
        let mut prev = 0.0;
        for k in 0..30 {
            let a = 0.26 + k as f64 * 0.025;
            let v = analytic_phi2_volume(a);
            assert!(v > prev, "a={a}");
            prev = v;
        }
    }
}
