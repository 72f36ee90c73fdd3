//! Gaussian-state numerics shared by both statistics.
//!
//! Conventions (fixed once, used everywhere):
//! - vacuum second moments are 1/2, so symplectic eigenvalues satisfy
//!   `mu >= 1/2` with equality exactly on pure modes;
//! - bosonic ground-state covariances of a circulant chain coupling `V` are
//!   `X = V^{-1/2}/2`, `P = V^{+1/2}/2`, with a mass regularizer entering as
//!   `lambda + mu_reg^2`;
//! - fermionic chains are described by the symbol `g = sgn(lambda)`, whose
//!   Fourier coefficients generate the truncated correlation matrix `T_M`
//!   with spectrum in `[-1, 1]`;
//! - all entropies are in bits.

use std::f64::consts::TAU;

use nalgebra::DMatrix;

use crate::decouple::ChainModel;
use crate::error::{Error, Result};
use crate::linalg;

/// Spectrum values inside the physical range by less than this are clamped
/// silently.
pub const CLAMP_TOL: f64 = 1e-10;
/// Spectrum values outside the physical range by more than this are contract
/// violations.
pub const HARD_TOL: f64 = 1e-8;
/// Dispersion magnitudes below `SYMBOL_ZERO_TOL * max|lambda|` count as exact
/// zeros of the symbol. Keeping one shared tolerance makes the finite-lattice
/// symbol identical between the full-lattice and per-chain representations.
pub const SYMBOL_ZERO_TOL: f64 = 1e-12;

/// Binary entropy in bits with the `0 log 0 = 0` convention.
pub fn binary_entropy_bits(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

fn signum_tol(value: f64, tol: f64) -> f64 {
    if value.abs() <= tol {
        0.0
    } else if value > 0.0 {
        1.0
    } else {
        -1.0
    }
}

// ---------------------------------------------------------------------------
// Bosonic covariances
// ---------------------------------------------------------------------------

/// Ground-state second moments (position block X, momentum block P) of a
/// circulant bosonic chain.
#[derive(Debug, Clone)]
pub struct CovariancePair {
    x: DMatrix<f64>,
    p: DMatrix<f64>,
}

impl CovariancePair {
    /// Build from the coupling spectrum `lambda_m` at momenta `2 pi m / N`:
    /// `X = F diag(lambda^{-1/2}) F^dag / 2`, `P = F diag(lambda^{+1/2}) F^dag / 2`.
    pub fn from_spectrum(spectrum: &[f64]) -> Result<Self> {
        let n = spectrum.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty spectrum".into()));
        }
        for (m, lam) in spectrum.iter().enumerate() {
            if !lam.is_finite() || *lam <= 0.0 {
                return Err(Error::CriticalZeroMode { index: m });
            }
        }
        let cos_table: Vec<f64> = (0..n).map(|j| (TAU * j as f64 / n as f64).cos()).collect();
        let mut xrow = vec![0.0f64; n];
        let mut prow = vec![0.0f64; n];
        let inv_sqrt: Vec<f64> = spectrum.iter().map(|l| 1.0 / l.sqrt()).collect();
        let sqrt: Vec<f64> = spectrum.iter().map(|l| l.sqrt()).collect();
        for d in 0..=n / 2 {
            let mut sx = 0.0;
            let mut sp = 0.0;
            for m in 0..n {
                let c = cos_table[(m * d) % n];
                sx += inv_sqrt[m] * c;
                sp += sqrt[m] * c;
            }
            xrow[d] = sx / (2.0 * n as f64);
            prow[d] = sp / (2.0 * n as f64);
            if d > 0 && d < n - d {
                xrow[n - d] = xrow[d];
                prow[n - d] = prow[d];
            }
        }
        let x = DMatrix::from_fn(n, n, |i, j| xrow[(n + i - j) % n]);
        let p = DMatrix::from_fn(n, n, |i, j| prow[(n + i - j) % n]);
        Ok(CovariancePair { x, p })
    }

    /// Explicit blocks (for tests and hand-built states).
    pub fn from_blocks(x: DMatrix<f64>, p: DMatrix<f64>) -> Result<Self> {
        if x.nrows() != x.ncols() || p.nrows() != p.ncols() || x.nrows() != p.nrows() {
            return Err(Error::InvalidInput(
                "covariance blocks must be square and of equal size".into(),
            ));
        }
        Ok(CovariancePair { x, p })
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Top-left `m x m` restrictions (the region `[1..m]`).
    pub fn restricted(&self, m: usize) -> (DMatrix<f64>, DMatrix<f64>) {
        (
            self.x.view((0, 0), (m, m)).into_owned(),
            self.p.view((0, 0), (m, m)).into_owned(),
        )
    }
}

/// Ground-state covariance of a chain on `n` sites with mass regularizer
/// (spectrum `lambda + mu_reg^2`). A vanishing spectrum value with
/// `mu_reg = 0` is the critical zero mode and is an error.
pub fn boson_ground_covariance(chain: &ChainModel, n: usize, mu_reg: f64) -> Result<CovariancePair> {
    if n == 0 {
        return Err(Error::InvalidInput("chain length must be >= 1".into()));
    }
    let mu2 = mu_reg * mu_reg;
    let spectrum: Vec<f64> = chain.spectrum(n).iter().map(|l| l + mu2).collect();
    CovariancePair::from_spectrum(&spectrum)
}

/// Ordered symplectic (bosonic) or orthogonal (fermionic) spectrum of a
/// reduced state.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    values: Vec<f64>,
    region_size: usize,
}

impl SpectrumResult {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn region_size(&self) -> usize {
        self.region_size
    }
}

/// Symplectic spectrum `mu_j = sqrt(eig(X_A P_A))` of a reduced bosonic
/// state, computed through the Cholesky congruence `L^T X_A L` with
/// `P_A = L L^T`, which is symmetric by construction and therefore keeps the
/// spectrum real and non-negative.
pub fn symplectic_spectrum(x_a: &DMatrix<f64>, p_a: &DMatrix<f64>) -> Result<SpectrumResult> {
    let m = x_a.nrows();
    if x_a.ncols() != m || p_a.nrows() != m || p_a.ncols() != m {
        return Err(Error::InvalidInput(
            "restricted blocks must be square and of equal size".into(),
        ));
    }
    let chol = p_a.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let b = l.transpose() * x_a * &l;
    let eigs = linalg::symmetric_eigenvalues(&b);
    let scale = eigs.iter().fold(0.0f64, |a, e| a.max(e.abs())).max(1e-300);
    let mut values = Vec::with_capacity(m);
    for e in eigs.into_iter().rev() {
        if e < -HARD_TOL * scale {
            return Err(Error::NotPositiveDefinite);
        }
        values.push(e.max(0.0).sqrt());
    }
    Ok(SpectrumResult {
        values,
        region_size: m,
    })
}

/// Von Neumann entropy (bits) of a bosonic Gaussian state from its
/// symplectic spectrum:
/// `S = sum_j (mu+1/2) log2(mu+1/2) - (mu-1/2) log2(mu-1/2)`.
pub fn boson_entropy(spectrum: &SpectrumResult) -> Result<f64> {
    let mut s = 0.0;
    for &mu in spectrum.values() {
        if mu < 0.5 - HARD_TOL {
            return Err(Error::EigenvalueOutOfRange {
                value: mu,
                bound: "mu >= 1/2",
                tol: HARD_TOL,
            });
        }
        let mu = mu.max(0.5);
        let a = mu + 0.5;
        let b = mu - 0.5;
        s += a * a.log2();
        if b > 0.0 {
            s -= b * b.log2();
        }
    }
    Ok(s)
}

/// Logarithmic negativity (bits) of the split `[1..m] | [m+1..N]`.
///
/// The partial transpose flips the momentum signs on the second block,
/// `P -> R P R`; the result is `sum_j max(0, -log2(2 mu~_j))` over the
/// symplectic spectrum of the transposed covariance.
pub fn log_negativity(cov: &CovariancePair, m: usize) -> Result<f64> {
    let n = cov.len();
    if m == 0 || m >= n {
        return Err(Error::InvalidInput(format!(
            "split site must satisfy 1 <= m < N, got m={m}, N={n}"
        )));
    }
    let mut pt = cov.p.clone();
    for i in 0..n {
        for j in 0..n {
            let si = if i >= m { -1.0 } else { 1.0 };
            let sj = if j >= m { -1.0 } else { 1.0 };
            pt[(i, j)] *= si * sj;
        }
    }
    let chol = pt.cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let b = l.transpose() * &cov.x * &l;
    let eigs = linalg::symmetric_eigenvalues(&b);
    let mut e_n = 0.0;
    for e in eigs {
        if e <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let mu = e.sqrt();
        let contribution = -(2.0 * mu).log2();
        if contribution > 0.0 {
            e_n += contribution;
        }
    }
    Ok(e_n)
}

// ---------------------------------------------------------------------------
// Fermionic symbol and Toeplitz correlations
// ---------------------------------------------------------------------------

/// Zeros of a chain dispersion on `[0, 2pi)`, classified by whether the sign
/// actually changes there.
#[derive(Debug, Clone)]
pub struct SymbolZeros {
    /// Zeros where the symbol jumps (ascending).
    pub sign_changes: Vec<f64>,
    /// Touching zeros without a sign change (ascending).
    pub tangential: Vec<f64>,
    /// max |lambda| over the sampling grid.
    pub scale: f64,
}

/// Locate the zeros of the chain dispersion by coarse sampling plus
/// bisection. `samples` points are scanned (default callers use 4096);
/// sign-change zeros are refined to ~1e-13.
pub fn find_symbol_zeros(chain: &ChainModel, samples: usize) -> Result<SymbolZeros> {
    let n = samples.max(16);
    let values: Vec<f64> = (0..n)
        .map(|i| chain.dispersion(TAU * i as f64 / n as f64))
        .collect();
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale < 1e-14 {
        return Err(Error::DegenerateSymbol);
    }
    let zero_tol = SYMBOL_ZERO_TOL * scale;
    let signs: Vec<f64> = values.iter().map(|v| signum_tol(*v, zero_tol)).collect();
    if signs.iter().all(|s| *s == 0.0) {
        return Err(Error::DegenerateSymbol);
    }

    let step = TAU / n as f64;
    let mut sign_changes = Vec::new();
    let mut tangential = Vec::new();

    // Walk the circle. Grid points with sign 0 are exact zeros; classify them
    // by the nearest nonzero signs on either side.
    let next_nonzero = |start: usize| -> (usize, f64) {
        let mut i = start;
        loop {
            i = (i + 1) % n;
            if signs[i] != 0.0 {
                return (i, signs[i]);
            }
        }
    };
    let prev_nonzero = |start: usize| -> f64 {
        let mut i = start;
        loop {
            i = (i + n - 1) % n;
            if signs[i] != 0.0 {
                return signs[i];
            }
        }
    };

    for i in 0..n {
        if signs[i] == 0.0 {
            let before = prev_nonzero(i);
            let (_, after) = next_nonzero(i);
            let phi = step * i as f64;
            if before * after < 0.0 {
                // Count the jump once, at the first zero sample of a run.
                if signs[(i + n - 1) % n] != 0.0 {
                    sign_changes.push(phi);
                }
            } else if signs[(i + n - 1) % n] != 0.0 {
                tangential.push(phi);
            }
            continue;
        }
        let j = (i + 1) % n;
        if signs[j] != 0.0 && signs[i] * signs[j] < 0.0 {
            let mut a = step * i as f64;
            let mut b = step * (i + 1) as f64;
            let fa = chain.dispersion(a);
            for _ in 0..200 {
                if b - a <= 1e-13 {
                    break;
                }
                let mid = 0.5 * (a + b);
                let fm = chain.dispersion(mid);
                if fa * fm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            sign_changes.push(0.5 * (a + b) % TAU);
        }
    }

    // Tangential zeros that fall between grid points: local minima of
    // |lambda| that reach (numerically) zero without a sign change.
    for i in 0..n {
        let (im, ip) = ((i + n - 1) % n, (i + 1) % n);
        if signs[i] == 0.0 || signs[im] == 0.0 || signs[ip] == 0.0 {
            continue;
        }
        if signs[im] != signs[i] || signs[ip] != signs[i] {
            continue; // handled as a sign change
        }
        let (vm, v, vp) = (values[im].abs(), values[i].abs(), values[ip].abs());
        if v <= vm && v <= vp && v < 1e-3 * scale {
            let a = step * (i as f64 - 1.0);
            let b = step * (i as f64 + 1.0);
            let (x, fx) = chain.golden_refine_abs_min(a, b);
            if fx <= 1e-9 * scale {
                tangential.push((x + TAU) % TAU);
            }
        }
    }

    sign_changes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sign_changes.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
    tangential.sort_by(|a, b| a.partial_cmp(b).unwrap());
    tangential.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
    Ok(SymbolZeros {
        sign_changes,
        tangential,
        scale,
    })
}

/// How to compute the symbol Fourier coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolMode {
    /// Exact piecewise integration of `sgn(lambda)` between its zeros
    /// (the chain-length N -> infinity limit).
    Integral,
    /// Discrete sum over the N momenta of a finite ring.
    FiniteN(usize),
}

/// Symbol Fourier coefficients `t_0..t_{M-1}` and the induced `M x M`
/// Toeplitz correlation matrix `(T_M)_{jk} = t_{j-k}`.
#[derive(Debug, Clone)]
pub struct ToeplitzCorrelation {
    coeffs: Vec<f64>,
    size: usize,
}

impl ToeplitzCorrelation {
    /// Build directly from symbol coefficients `t_0..t_{M-1}`.
    pub fn from_coefficients(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("need at least t_0".into()));
        }
        for &t in &coeffs {
            if !t.is_finite() || t.abs() > 1.0 + HARD_TOL {
                return Err(Error::EigenvalueOutOfRange {
                    value: t,
                    bound: "|t_l| <= 1",
                    tol: HARD_TOL,
                });
            }
        }
        let size = coeffs.len();
        Ok(ToeplitzCorrelation { coeffs, size })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |i, j| {
            self.coeffs[i.abs_diff(j)]
        })
    }

    /// Eigenvalues of `T_M`, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::symmetric_eigenvalues(&self.matrix())
    }
}

/// Symbol coefficients of a fermionic chain.
///
/// Integral mode integrates `sgn(lambda)` exactly between its sign-change
/// zeros; finite-N mode takes the discrete average over ring momenta (with
/// `sgn(0) = 0` at exactly degenerate momenta).
pub fn symbol_coefficients(
    chain: &ChainModel,
    mode: SymbolMode,
    count: usize,
) -> Result<ToeplitzCorrelation> {
    if count == 0 {
        return Err(Error::InvalidInput("need at least one coefficient".into()));
    }
    let coeffs = match mode {
        SymbolMode::Integral => {
            let zeros = find_symbol_zeros(chain, 4096)?;
            let z = &zeros.sign_changes;
            if z.is_empty() {
                let sign = signum_tol(
                    chain.dispersion(representative_angle(chain)),
                    SYMBOL_ZERO_TOL * zeros.scale,
                );
                let mut t = vec![0.0; count];
                t[0] = sign;
                t
            } else {
                // Intervals [z_i, z_{i+1}] with the last wrapping to z_0 + 2pi.
                let mut t = vec![0.0; count];
                let k = z.len();
                for i in 0..k {
                    let a = z[i];
                    let b = if i + 1 < k { z[i + 1] } else { z[0] + TAU };
                    let mid = 0.5 * (a + b);
                    let sign = signum_tol(chain.dispersion(mid % TAU), 0.0);
                    t[0] += sign * (b - a) / TAU;
                    for (l, tl) in t.iter_mut().enumerate().skip(1) {
                        let lf = l as f64;
                        *tl += sign * ((lf * b).sin() - (lf * a).sin()) / (lf * TAU);
                    }
                }
                t
            }
        }
        SymbolMode::FiniteN(n) => {
            if count > n {
                return Err(Error::InvalidInput(format!(
                    "cannot take {count} coefficients from an N={n} ring"
                )));
            }
            let values = chain.spectrum(n);
            let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if scale < 1e-14 {
                return Err(Error::DegenerateSymbol);
            }
            let tol = SYMBOL_ZERO_TOL * scale;
            let signs: Vec<f64> = values.iter().map(|v| signum_tol(*v, tol)).collect();
            let cos_table: Vec<f64> = (0..n).map(|j| (TAU * j as f64 / n as f64).cos()).collect();
            (0..count)
                .map(|d| {
                    let mut s = 0.0;
                    for (m, sg) in signs.iter().enumerate() {
                        s += sg * cos_table[(m * d) % n];
                    }
                    s / n as f64
                })
                .collect()
        }
    };
    Ok(ToeplitzCorrelation {
        coeffs,
        size: count,
    })
}

/// An angle where the dispersion is comfortably nonzero (for reading off the
/// overall sign of a gapped symbol).
fn representative_angle(chain: &ChainModel) -> f64 {
    let mut best = (0.0, 0.0);
    for i in 0..64 {
        let phi = TAU * i as f64 / 64.0;
        let v = chain.dispersion(phi).abs();
        if v > best.1 {
            best = (phi, v);
        }
    }
    best.0
}

/// Fermionic entanglement entropy (bits) from a correlation matrix:
/// `E_S = sum_j H((1 + nu_j)/2)`.
pub fn fermion_entropy(corr: &ToeplitzCorrelation) -> Result<f64> {
    fermion_entropy_from_eigenvalues(&corr.eigenvalues())
}

/// Entropy from precomputed correlation eigenvalues in `[-1, 1]`.
pub fn fermion_entropy_from_eigenvalues(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &nu in eigenvalues {
        if nu.abs() > 1.0 + HARD_TOL {
            return Err(Error::EigenvalueOutOfRange {
                value: nu,
                bound: "|nu| <= 1",
                tol: HARD_TOL,
            });
        }
        let nu = nu.clamp(-1.0, 1.0);
        s += binary_entropy_bits(0.5 * (1.0 + nu));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decouple::ChainModel;
    use crate::model::{ModelSpec, Statistics};
    use std::f64::consts::PI;

    fn uncoupled_chain() -> ChainModel {
        ChainModel::from_coefficients(Statistics::Boson, vec![1.0]).unwrap()
    }

    #[test]
    fn vacuum_of_uncoupled_oscillators() {
        let cov = boson_ground_covariance(&uncoupled_chain(), 6, 0.0).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j { 0.5 } else { 0.0 };
                assert!((cov.x()[(i, j)] - expect).abs() < 1e-14);
                assert!((cov.p()[(i, j)] - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn two_site_fourier_oracle() {
        // Spectrum {1, 4} at momenta {0, pi}: X diag (1/2 + 1/4)/2, off (1/2 - 1/4)/2.
        let cov = CovariancePair::from_spectrum(&[1.0, 4.0]).unwrap();
        assert!((cov.x()[(0, 0)] - 0.375).abs() < 1e-15);
        assert!((cov.x()[(0, 1)] - 0.125).abs() < 1e-15);
        assert!((cov.p()[(0, 0)] - 0.75).abs() < 1e-15);
        assert!((cov.p()[(0, 1)] + 0.25).abs() < 1e-15);
    }

    #[test]
    fn critical_chain_without_regularizer_errors() {
        let model = ModelSpec::boson_critical(2).unwrap();
        let chain = ChainModel::from_model(&model, &[0.0]).unwrap();
        assert!(matches!(
            boson_ground_covariance(&chain, 8, 0.0),
            Err(Error::CriticalZeroMode { .. })
        ));
        assert!(boson_ground_covariance(&chain, 8, 1e-3).is_ok());
    }

    #[test]
    fn purity_of_full_state() {
        let model = ModelSpec::boson_nearest_neighbor(1, 0.3).unwrap();
        let chain = ChainModel::from_model(&model, &[]).unwrap();
        let cov = boson_ground_covariance(&chain, 16, 0.0).unwrap();
        let spec = symplectic_spectrum(cov.x(), cov.p()).unwrap();
        for mu in spec.values() {
            assert!((mu - 0.5).abs() < 1e-10, "mu = {mu}");
        }
        assert!(boson_entropy(&spec).unwrap().abs() < 1e-9);
    }

    #[test]
    fn single_mode_spectrum_and_entropy() {
        let x = DMatrix::from_element(1, 1, 1.5);
        let p = DMatrix::from_element(1, 1, 1.5);
        let spec = symplectic_spectrum(&x, &p).unwrap();
        assert!((spec.values()[0] - 1.5).abs() < 1e-12);
        let s = boson_entropy(&spec).unwrap();
        assert!((s - 2.0).abs() < 1e-12, "expected 2 bits, got {s}");
    }

    #[test]
    fn entropy_continuous_near_pure() {
        // S(1/2 + eps) -> 0 like (1 + eps) log2(1 + eps) - eps log2(eps).
        for eps in [1e-4, 1e-6, 1e-8] {
            let spec = SpectrumResult {
                values: vec![0.5 + eps],
                region_size: 1,
            };
            let s = boson_entropy(&spec).unwrap();
            let exact = (1.0 + eps) * (1.0 + eps).log2() - eps * eps.log2();
            assert!((s - exact).abs() < 1e-12);
            assert!(s > 0.0 && s < 40.0 * eps);
        }
    }

    #[test]
    fn entropy_rejects_unphysical_spectrum() {
        let spec = SpectrumResult {
            values: vec![0.5 - 1e-6],
            region_size: 1,
        };
        assert!(matches!(
            boson_entropy(&spec),
            Err(Error::EigenvalueOutOfRange { .. })
        ));
        // Within the clamp window: fine, counts as pure.
        let spec = SpectrumResult {
            values: vec![0.5 - 1e-11],
            region_size: 1,
        };
        assert_eq!(boson_entropy(&spec).unwrap(), 0.0);
    }

    #[test]
    fn product_state_has_zero_negativity() {
        let cov = boson_ground_covariance(&uncoupled_chain(), 8, 0.0).unwrap();
        assert!(log_negativity(&cov, 4).unwrap().abs() < 1e-12);
    }

    #[test]
    fn two_mode_squeezed_negativity() {
        // Spectrum {1, 16}: the partially transposed spectrum has
        // mu~_min = 1/4, so E_N = 1 bit exactly.
        let cov = CovariancePair::from_spectrum(&[1.0, 16.0]).unwrap();
        let e_n = log_negativity(&cov, 1).unwrap();
        assert!((e_n - 1.0).abs() < 1e-12, "E_N = {e_n}");
    }

    #[test]
    fn split_site_bounds_checked() {
        let cov = CovariancePair::from_spectrum(&[1.0, 16.0]).unwrap();
        assert!(log_negativity(&cov, 0).is_err());
        assert!(log_negativity(&cov, 2).is_err());
    }

    #[test]
    fn symplectic_spectrum_matches_dense_oracle() {
        // Two-mode reduced state of a 4-site gapped chain, checked against an
        // independent construction: V built as an explicit circulant matrix,
        // V^{+-1/2} through nalgebra's symmetric eigendecomposition.
        let model = ModelSpec::boson_nearest_neighbor(1, 0.26).unwrap();
        let chain = ChainModel::from_model(&model, &[]).unwrap();
        let n = 4;
        let cov = boson_ground_covariance(&chain, n, 0.0).unwrap();
        let (xa, pa) = cov.restricted(2);
        let spec = symplectic_spectrum(&xa, &pa).unwrap();

        let mut v = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let d = (n + i - j) % n;
                v[(i, j)] = match d {
                    0 => 1.0,
                    1 | 3 => -0.26,
                    _ => 0.0,
                };
            }
        }
        let eig = v.symmetric_eigen();
        let mut x_oracle = DMatrix::zeros(n, n);
        let mut p_oracle = DMatrix::zeros(n, n);
        for k in 0..n {
            let lam: f64 = eig.eigenvalues[k];
            let u = eig.eigenvectors.column(k);
            let outer = &u * u.transpose();
            x_oracle += &outer * (0.5 / lam.sqrt());
            p_oracle += &outer * (0.5 * lam.sqrt());
        }
        let xo = x_oracle.view((0, 0), (2, 2)).into_owned();
        let po = p_oracle.view((0, 0), (2, 2)).into_owned();
        let prod = &xo * &po;
        let mut oracle: Vec<f64> = prod
            .eigenvalues()
            .expect("real spectrum")
            .iter()
            .map(|e| e.sqrt())
            .collect();
        oracle.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in spec.values().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn half_filled_symbol_coefficients() {
        // lambda = 2 a cos(phi): t_l = 2 sin(pi l / 2) / (pi l), t_0 = 0.
        let model = ModelSpec::fermion_half_filled(1, 0.7).unwrap();
        let chain = ChainModel::from_model(&model, &[]).unwrap();
        let corr = symbol_coefficients(&chain, SymbolMode::Integral, 64).unwrap();
        for (l, t) in corr.coefficients().iter().enumerate() {
            let expect = if l == 0 {
                0.0
            } else {
                2.0 * (PI * l as f64 / 2.0).sin() / (PI * l as f64)
            };
            assert!((t - expect).abs() < 1e-10, "l={l}: {t} vs {expect}");
        }
    }

    #[test]
    fn gapped_symbol_is_identity() {
        let model = ModelSpec::fermion_nearest_neighbor(1, 0.1).unwrap();
        let chain = ChainModel::from_model(&model, &[]).unwrap();
        let corr = symbol_coefficients(&chain, SymbolMode::Integral, 16).unwrap();
        assert_eq!(corr.coefficients()[0], 1.0);
        assert!(corr.coefficients()[1..].iter().all(|t| *t == 0.0));
        assert!(fermion_entropy(&corr).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sin_kernel_symbol() {
        // sgn(cos phi - cos kF) has t_0 = 2 kF / pi - 1 and
        // t_l = 2 sin(l kF) / (pi l).
        for kf in [0.3f64, 1.1, 2.0] {
            let chain =
                ChainModel::from_coefficients(Statistics::Fermion, vec![-kf.cos(), 0.5]).unwrap();
            let corr = symbol_coefficients(&chain, SymbolMode::Integral, 32).unwrap();
            let t0_expect = 2.0 * kf / PI - 1.0;
            assert!((corr.coefficients()[0] - t0_expect).abs() < 1e-10);
            for l in 1..32 {
                let expect = 2.0 * (l as f64 * kf).sin() / (PI * l as f64);
                assert!(
                    (corr.coefficients()[l] - expect).abs() < 1e-10,
                    "kF={kf} l={l}"
                );
            }
        }
    }

    #[test]
    fn finite_n_coefficients_converge_to_integral() {
        let model = ModelSpec::fermion_nearest_neighbor(1, 1.0).unwrap();
        let chain = ChainModel::from_model(&model, &[]).unwrap();
        let exact = symbol_coefficients(&chain, SymbolMode::Integral, 8).unwrap();
        let mut prev = f64::INFINITY;
        for n in [64usize, 128, 256, 512] {
            let approx = symbol_coefficients(&chain, SymbolMode::FiniteN(n), 8).unwrap();
            let dev = exact
                .coefficients()
                .iter()
                .zip(approx.coefficients())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(dev < prev, "N={n}: {dev} >= {prev}");
            prev = dev;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn degenerate_symbol_rejected() {
        let chain = ChainModel::from_coefficients(Statistics::Fermion, vec![0.0]).unwrap();
        assert!(matches!(
            symbol_coefficients(&chain, SymbolMode::Integral, 4),
            Err(Error::DegenerateSymbol)
        ));
        assert!(matches!(
            symbol_coefficients(&chain, SymbolMode::FiniteN(16), 4),
            Err(Error::DegenerateSymbol)
        ));
    }

    #[test]
    fn fermion_entropies() {
        // M = 1 at half filling: nu = 0, one maximally mixed mode.
        let model = ModelSpec::fermion_half_filled(1, 1.0).unwrap();
        let chain = ChainModel::from_model(&model, &[]).unwrap();
        let corr = symbol_coefficients(&chain, SymbolMode::Integral, 1).unwrap();
        assert!((fermion_entropy(&corr).unwrap() - 1.0).abs() < 1e-12);

        // nu = +-1: pure.
        assert_eq!(fermion_entropy_from_eigenvalues(&[1.0, -1.0]).unwrap(), 0.0);

        // M = 2 at half filling: nu = +-2/pi.
        let corr = symbol_coefficients(&chain, SymbolMode::Integral, 2).unwrap();
        let nu = 2.0 / PI;
        let expect = 2.0 * binary_entropy_bits(0.5 * (1.0 + nu));
        let got = fermion_entropy(&corr).unwrap();
        assert!((got - expect).abs() < 1e-10, "{got} vs {expect}");
        assert!((got - 1.367_520_916_267_477).abs() < 1e-9);
    }

    #[test]
    fn entropy_clamp_window() {
        assert_eq!(
            fermion_entropy_from_eigenvalues(&[1.0 + 5e-11]).unwrap(),
            0.0
        );
        assert!(matches!(
            fermion_entropy_from_eigenvalues(&[1.0 + 2e-8]),
            Err(Error::EigenvalueOutOfRange { .. })
        ));
    }

    #[test]
    fn symbol_zero_classification() {
        // -1 + 2 cos(phi): jumps at +-pi/3.
        let chain =
            ChainModel::from_coefficients(Statistics::Fermion, vec![-1.0, 1.0]).unwrap();
        let zeros = find_symbol_zeros(&chain, 4096).unwrap();
        assert_eq!(zeros.sign_changes.len(), 2);
        assert!((zeros.sign_changes[0] - PI / 3.0).abs() < 1e-11);
        assert!((zeros.sign_changes[1] - 5.0 * PI / 3.0).abs() < 1e-11);
        assert!(zeros.tangential.is_empty());

        // (1 - cos(phi))/2 >= 0: a touching zero at 0, no jump.
        let chain =
            ChainModel::from_coefficients(Statistics::Fermion, vec![0.5, -0.25]).unwrap();
        let zeros = find_symbol_zeros(&chain, 4096).unwrap();
        assert!(zeros.sign_changes.is_empty());
        assert_eq!(zeros.tangential.len(), 1);
        assert!(zeros.tangential[0].abs() < 1e-6 || (zeros.tangential[0] - TAU).abs() < 1e-6);
    }
}
