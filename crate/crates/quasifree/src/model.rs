//! Translation-invariant quadratic lattice models on the D-dimensional torus.
//!
//! A model is a finite table of real couplings `V_l` indexed by lattice
//! offsets `l` with the cyclic symmetry `V_l = V_{-l}`. Everything downstream
//! is a function of the dispersion
//!
//! ```text
//! lambda(phi) = sum_l V_l cos(phi . l),   phi in [0, 2pi)^D,
//! ```
//!
//! which is exactly the eigenvalue function of the cyclic coupling matrix:
//! the finite-lattice spectrum at linear size N is `lambda(2 pi k / N)`.
//! Bosonic energies are `sqrt(lambda)` (the gap is the square root of the
//! smallest coupling eigenvalue), fermionic energies are `|lambda|`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};

/// Particle statistics of the quadratic Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Statistics {
    Boson,
    Fermion,
}

impl std::fmt::Display for Statistics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Statistics::Boson => write!(f, "boson"),
            Statistics::Fermion => write!(f, "fermion"),
        }
    }
}

/// Bosonic couplings with grid minimum below this are rejected as unstable;
/// anything in `[-STABILITY_TOL, 0)` is clamped to zero (critical point noise).
pub const STABILITY_TOL: f64 = 1e-12;

/// Offsets are compared against their mirror up to this relative tolerance.
const SYMMETRY_TOL: f64 = 1e-12;

/// A validated translation-invariant quadratic model.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    statistics: Statistics,
    dimension: usize,
    couplings: BTreeMap<Vec<i64>, f64>,
    parameters: BTreeMap<String, f64>,
    range: i64,
    flagged_unstable: bool,
}

impl ModelSpec {
    /// Build a model from an explicit coupling table.
    ///
    /// Offsets missing their mirror are completed symmetrically; an offset
    /// whose mirror is present with a different value is rejected. Bosons
    /// must carry a positive diagonal (offset-0) coupling.
    pub fn new(
        statistics: Statistics,
        dimension: usize,
        couplings: impl IntoIterator<Item = (Vec<i64>, f64)>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        let mut table: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
        for (offset, value) in couplings {
            if offset.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: offset.len(),
                });
            }
            if !value.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "coupling at {offset:?} is not finite"
                )));
            }
            if let Some(old) = table.insert(offset.clone(), value) {
                if old != value {
                    return Err(Error::AsymmetricCoupling {
                        offset,
                        value,
                        mirror: old,
                    });
                }
            }
        }
        // Symmetrize: V_l = V_{-l}.
        let entries: Vec<(Vec<i64>, f64)> = table.iter().map(|(k, v)| (k.clone(), *v)).collect();
        for (offset, value) in entries {
            let mirror: Vec<i64> = offset.iter().map(|x| -x).collect();
            match table.get(&mirror) {
                None => {
                    table.insert(mirror, value);
                }
                Some(&mv) => {
                    let scale = value.abs().max(mv.abs()).max(1.0);
                    if (mv - value).abs() > SYMMETRY_TOL * scale {
                        return Err(Error::AsymmetricCoupling {
                            offset,
                            value,
                            mirror: mv,
                        });
                    }
                }
            }
        }
        let zero = vec![0i64; dimension];
        if statistics == Statistics::Boson {
            match table.get(&zero) {
                Some(&d) if d > 0.0 => {}
                Some(&d) => {
                    return Err(Error::InvalidInput(format!(
                        "boson diagonal coupling must be positive, got {d}"
                    )))
                }
                None => {
                    return Err(Error::InvalidInput(
                        "boson model requires an offset-0 coupling".into(),
                    ))
                }
            }
        }
        let range = table
            .keys()
            .map(|l| l.iter().map(|x| x.abs()).max().unwrap_or(0))
            .max()
            .unwrap_or(0);
        let mut model = ModelSpec {
            statistics,
            dimension,
            couplings: table,
            parameters: BTreeMap::new(),
            range,
            flagged_unstable: false,
        };
        if statistics == Statistics::Boson {
            // Criticality screen: a negative dispersion minimum is allowed at
            // build time (critical families sit exactly at zero) but flagged.
            let (_, min) = minimize_periodic(
                |phi| model.dispersion(phi).unwrap(),
                dimension,
                64.min(16 + 8 * range as usize),
                1e-9,
            );
            model.flagged_unstable = min < -STABILITY_TOL;
        }
        Ok(model)
    }

    /// Nearest-neighbor fermion model `V = delta + a * delta_dist1`.
    pub fn fermion_nearest_neighbor(dimension: usize, a: f64) -> Result<Self> {
        let mut couplings = vec![(vec![0i64; dimension], 1.0)];
        couplings.extend(nearest_neighbor_offsets(dimension, a));
        Self::new(Statistics::Fermion, dimension, couplings)?.with_parameter("a", a)
    }

    /// Half-filled fermion model `V = a * delta_dist1` (no diagonal).
    pub fn fermion_half_filled(dimension: usize, a: f64) -> Result<Self> {
        let couplings = nearest_neighbor_offsets(dimension, a);
        Self::new(Statistics::Fermion, dimension, couplings)?.with_parameter("a", a)
    }

    /// Nearest-neighbor boson model `V = delta - c * delta_dist1`.
    pub fn boson_nearest_neighbor(dimension: usize, c: f64) -> Result<Self> {
        let mut couplings = vec![(vec![0i64; dimension], 1.0)];
        couplings.extend(nearest_neighbor_offsets(dimension, -c));
        Self::new(Statistics::Boson, dimension, couplings)?.with_parameter("c", c)
    }

    /// The critical nearest-neighbor boson family, `c = 1/(2D)`.
    pub fn boson_critical(dimension: usize) -> Result<Self> {
        Self::boson_nearest_neighbor(dimension, critical_boson_coupling(dimension))
    }

    /// Lattice discretization of the free Klein-Gordon field: the rescaled
    /// coupling is `c_N = (mu^2 L^2 / (v^2 N^2) + 2D)^{-1}`, which tends to
    /// the critical value `1/(2D)` as N grows for any fixed mass.
    pub fn boson_klein_gordon(
        dimension: usize,
        mass: f64,
        box_length: f64,
        velocity: f64,
        n: usize,
    ) -> Result<Self> {
        let c = kg_coupling(dimension, mass, box_length, velocity, n);
        Self::boson_nearest_neighbor(dimension, c)?
            .with_parameter("mu", mass)?
            .with_parameter("L", box_length)?
            .with_parameter("v", velocity)
    }

    /// Attach a named parameter (fluent).
    pub fn with_parameter(mut self, name: &str, value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidInput(format!(
                "parameter {name} is not finite"
            )));
        }
        self.parameters.insert(name.to_string(), value);
        Ok(self)
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn couplings(&self) -> &BTreeMap<Vec<i64>, f64> {
        &self.couplings
    }

    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.get(name).copied()
    }

    pub fn parameters(&self) -> &BTreeMap<String, f64> {
        &self.parameters
    }

    /// Maximum max-norm of the coupling support.
    pub fn range(&self) -> i64 {
        self.range
    }

    /// True if the construction-time stability screen found `min lambda < 0`.
    pub fn flagged_unstable(&self) -> bool {
        self.flagged_unstable
    }

    /// Dispersion `lambda(phi) = sum_l V_l cos(phi . l)`.
    pub fn dispersion(&self, phi: &[f64]) -> Result<f64> {
        if phi.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: phi.len(),
            });
        }
        let mut sum = 0.0;
        for (offset, value) in &self.couplings {
            let dot: f64 = offset
                .iter()
                .zip(phi)
                .map(|(&l, &p)| l as f64 * p)
                .sum();
            sum += value * dot.cos();
        }
        Ok(sum)
    }

    /// Finite-lattice spectrum: `lambda(2 pi k / n)` for all `k` in `[0,n)^D`,
    /// row-major in `k`.
    pub fn lattice_spectrum(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::InvalidInput("lattice size must be >= 1".into()));
        }
        let total = n.pow(self.dimension as u32);
        let mut out = Vec::with_capacity(total);
        let mut k = vec![0usize; self.dimension];
        let mut phi = vec![0.0f64; self.dimension];
        for _ in 0..total {
            for d in 0..self.dimension {
                phi[d] = TAU * k[d] as f64 / n as f64;
            }
            out.push(self.dispersion(&phi)?);
            for d in (0..self.dimension).rev() {
                k[d] += 1;
                if k[d] < n {
                    break;
                }
                k[d] = 0;
            }
        }
        Ok(out)
    }

    /// Energy gap above the ground state.
    ///
    /// Bosons: `sqrt(min lambda)` with an instability error when the minimum
    /// is negative beyond [`STABILITY_TOL`]. Fermions: `min |lambda|`. The
    /// coarse grid minimum is polished by derivative-free coordinate search.
    pub fn energy_gap(&self, resolution: usize) -> Result<f64> {
        if resolution < 3 {
            return Err(Error::InvalidInput(
                "gap resolution must be at least 3 points per axis".into(),
            ));
        }
        match self.statistics {
            Statistics::Boson => {
                let (_, min) = minimize_periodic(
                    |phi| self.dispersion(phi).unwrap(),
                    self.dimension,
                    resolution,
                    1e-10,
                );
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
                let (_, min) = minimize_periodic(
                    |phi| self.dispersion(phi).unwrap().abs(),
                    self.dimension,
                    resolution,
                    1e-10,
                );
                Ok(min)
            }
        }
    }
}

/// `c = 1/(2D)`: demanding criticality of the nearest-neighbor boson family
/// fixes the coupling uniquely.
pub fn critical_boson_coupling(dimension: usize) -> f64 {
    assert!(dimension >= 1, "dimension must be >= 1");
    1.0 / (2.0 * dimension as f64)
}

/// Klein-Gordon lattice coupling `c_N = (mu^2 L^2/(v^2 N^2) + 2D)^{-1}`.
pub fn kg_coupling(dimension: usize, mass: f64, box_length: f64, velocity: f64, n: usize) -> f64 {
    let ratio = mass * box_length / (velocity * n as f64);
    1.0 / (ratio * ratio + 2.0 * dimension as f64)
}

fn nearest_neighbor_offsets(dimension: usize, value: f64) -> Vec<(Vec<i64>, f64)> {
    let mut out = Vec::with_capacity(2 * dimension);
    for d in 0..dimension {
        for sign in [1i64, -1] {
            let mut offset = vec![0i64; dimension];
            offset[d] = sign;
            out.push((offset, value));
        }
    }
    out
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
pub(crate) fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fx <= fc && fx <= fd {
        (x, fx)
    } else if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Coarse grid scan over `[0, 2pi)^dim` followed by cyclic coordinate descent
/// with golden-section line searches. Robust for smooth periodic functions
/// and for `|lambda|`-style kinks.
pub(crate) fn minimize_periodic<F: Fn(&[f64]) -> f64>(
    f: F,
    dim: usize,
    resolution: usize,
    tol: f64,
) -> (Vec<f64>, f64) {
    let res = resolution.max(3);
    let total = res.pow(dim as u32);
    let mut k = vec![0usize; dim];
    let mut phi = vec![0.0f64; dim];
    let mut best = (vec![0.0f64; dim], f64::INFINITY);
    for _ in 0..total {
        for d in 0..dim {
            phi[d] = TAU * k[d] as f64 / res as f64;
        }
        let v = f(&phi);
        if v < best.1 {
            best = (phi.clone(), v);
        }
        for d in (0..dim).rev() {
            k[d] += 1;
            if k[d] < res {
                break;
            }
            k[d] = 0;
        }
    }
    let (mut x, mut fx) = best;
    let mut h = TAU / res as f64;
    for _ in 0..200 {
        let mut improved = 0.0f64;
        for d in 0..dim {
            let xd = x[d];
            let mut probe = x.clone();
            let (xn, fn_) = golden_min(
                |t| {
                    probe[d] = t;
                    f(&probe)
                },
                xd - h,
                xd + h,
                tol * 0.25,
            );
            if fn_ < fx {
                improved += fx - fn_;
                x[d] = xn;
                fx = fn_;
            }
        }
        h = (h * 0.5).max(tol);
        if h <= tol && improved <= tol * (1.0 + fx.abs()) {
            break;
        }
    }
    (x, fx)
}
