//! Cross-module oracle suite: purity, complementarity, monotone bounds,
//! closed-form negativity convergence, and exactness of the half-space
//! decoupling against direct full-lattice Gaussian computations.
//!
//! The full-lattice oracles below are built independently of the engine
//! paths: correlations come from explicit 2D momentum sums and spectra from
//! nalgebra's eigensolvers rather than the crate's tridiagonal one.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quasifree::boson;
use quasifree::decouple::{aggregate, ChainModel, InfinitePolicy, TransverseGrid};
use quasifree::fermion;
use quasifree::gaussian::{
    boson_entropy, boson_ground_covariance, fermion_entropy, log_negativity,
    symbol_coefficients, symplectic_spectrum, SymbolMode, ToeplitzCorrelation,
};
use quasifree::model::{ModelSpec, Statistics};

fn random_gapped_boson_chain(rng: &mut impl Rng) -> ChainModel {
    loop {
        let c0 = rng.gen_range(1.2..3.0);
        let c1 = rng.gen_range(-0.5..0.5);
        let c2 = rng.gen_range(-0.2..0.2);
        let chain = ChainModel::from_coefficients(Statistics::Boson, vec![c0, c1, c2]).unwrap();
        let (min, _) = chain.dispersion_extrema();
        if min > 0.05 {
            return chain;
        }
    }
}

fn random_gapped_fermion_chain(rng: &mut impl Rng) -> ChainModel {
    loop {
        let c0 = rng.gen_range(-2.0..2.0);
        let c1 = rng.gen_range(-1.0..1.0);
        let c2 = rng.gen_range(-0.4..0.4);
        let chain = ChainModel::from_coefficients(Statistics::Fermion, vec![c0, c1, c2]).unwrap();
        let spectrum = chain.spectrum(64);
        if spectrum.iter().all(|l| l.abs() > 0.05) {
            return chain;
        }
    }
}

#[test]
fn purity_of_full_boson_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..12 {
        let chain = random_gapped_boson_chain(&mut rng);
        let n = *[8usize, 16, 32, 64].iter().nth(rng.gen_range(0..4)).unwrap();
        let cov = boson_ground_covariance(&chain, n, 0.0).unwrap();
        let spec = symplectic_spectrum(cov.x(), cov.p()).unwrap();
        for mu in spec.values() {
            assert!((mu - 0.5).abs() < 1e-10, "N={n}: mu={mu}");
        }
    }
}

#[test]
fn boson_complementarity_on_pure_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..8 {
        let chain = random_gapped_boson_chain(&mut rng);
        let n = 2 * rng.gen_range(4..32);
        let m = rng.gen_range(1..n);
        let cov = boson_ground_covariance(&chain, n, 0.0).unwrap();
        let (xa, pa) = cov.restricted(m);
        let s_a = boson_entropy(&symplectic_spectrum(&xa, &pa).unwrap()).unwrap();
        let xb = cov.x().view((m, m), (n - m, n - m)).into_owned();
        let pb = cov.p().view((m, m), (n - m, n - m)).into_owned();
        let s_b = boson_entropy(&symplectic_spectrum(&xb, &pb).unwrap()).unwrap();
        assert!((s_a - s_b).abs() < 1e-8, "N={n} m={m}: {s_a} vs {s_b}");
    }
}

#[test]
fn fermion_complementarity_on_pure_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..8 {
        let chain = random_gapped_fermion_chain(&mut rng);
        let n = 2 * rng.gen_range(4..32);
        let m = rng.gen_range(1..n);
        // Ring correlation is circulant; both blocks are Toeplitz in the
        // same coefficients.
        let t_full = symbol_coefficients(&chain, SymbolMode::FiniteN(n), n).unwrap();
        let coeffs = t_full.coefficients();
        let s_a = fermion_entropy(
            &ToeplitzCorrelation::from_coefficients(coeffs[..m].to_vec()).unwrap(),
        )
        .unwrap();
        let s_b = fermion_entropy(
            &ToeplitzCorrelation::from_coefficients(coeffs[..n - m].to_vec()).unwrap(),
        )
        .unwrap();
        assert!((s_a - s_b).abs() < 1e-8, "N={n} m={m}: {s_a} vs {s_b}");
    }
}

#[test]
fn negativity_bounds_entropy_on_every_tested_bipartition() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..10 {
        let chain = random_gapped_boson_chain(&mut rng);
        let n = 2 * rng.gen_range(3..17);
        let m = rng.gen_range(1..n);
        let cov = boson_ground_covariance(&chain, n, 0.0).unwrap();
        let e_n = log_negativity(&cov, m).unwrap();
        let (xa, pa) = cov.restricted(m);
        let e_s = boson_entropy(&symplectic_spectrum(&xa, &pa).unwrap()).unwrap();
        assert!(e_n >= e_s - 1e-10, "N={n} m={m}: E_N={e_n} < E_S={e_s}");
    }
}

#[test]
fn numeric_negativity_matches_nn_band_edge_limit() {
    // The closed-form limit (1/4) log2(lambda_max/lambda_min) is an exact
    // nearest-neighbor-chain statement; the direct partial-transpose
    // computation must land on it by N = 256 within 1e-3.
    let model = ModelSpec::boson_critical(2).unwrap();
    for phi in [std::f64::consts::PI, std::f64::consts::FRAC_PI_2, 2.2] {
        let chain = ChainModel::from_model(&model, &[phi]).unwrap();
        let limit = boson::chain_negativity_halfsplit_limit(&[phi], 2).unwrap();
        let numeric = boson::chain_negativity_numeric(&chain, 256, 0.0).unwrap();
        assert!(
            (numeric - limit).abs() < 1e-3,
            "phi'={phi}: numeric {numeric} vs limit {limit}"
        );
    }
}

// ---------------------------------------------------------------------------
// Decoupling exactness against the full 2D lattice
// ---------------------------------------------------------------------------

fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

/// sgn with the same zero tolerance the symbol machinery uses; keeping the
/// tolerance shared is what makes the two representations agree exactly at
/// degenerate momenta.
fn sgn_tol(v: f64, tol: f64) -> f64 {
    if v.abs() <= tol {
        0.0
    } else {
        v.signum()
    }
}

#[test]
fn fermion_halfspace_decoupling_is_exact_at_finite_n() {
    let n = 8usize;
    let m = 4usize;
    let model = ModelSpec::fermion_half_filled(2, 1.0).unwrap();

    // Full 2D correlation on A = [0..m) x [0..n), independent construction.
    let spectrum = model.lattice_spectrum(n).unwrap(); // row-major (k1, k2)
    let scale = spectrum.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-12 * scale;
    let sites: Vec<(usize, usize)> = (0..m)
        .flat_map(|i1| (0..n).map(move |i2| (i1, i2)))
        .collect();
    let mut g = DMatrix::zeros(sites.len(), sites.len());
    for (a, &(i1, i2)) in sites.iter().enumerate() {
        for (b, &(j1, j2)) in sites.iter().enumerate() {
            let mut sum = 0.0;
            for k1 in 0..n {
                for k2 in 0..n {
                    let lam = spectrum[k1 * n + k2];
                    let phase = TAU
                        * ((k1 * (i1 as i64 - j1 as i64).rem_euclid(n as i64) as usize) as f64
                            + (k2 * (i2 as i64 - j2 as i64).rem_euclid(n as i64) as usize) as f64)
                        / n as f64;
                    sum += sgn_tol(lam, tol) * phase.cos();
                }
            }
            g[(a, b)] = sum / (n * n) as f64;
        }
    }
    let eig = g.symmetric_eigen();
    let full: f64 = eig
        .eigenvalues
        .iter()
        .map(|nu| binary_entropy(0.5 * (1.0 + nu.clamp(-1.0, 1.0))))
        .sum();

    // Engine path: per-chain finite-N entropies aggregated over N chains.
    let mean = fermion::finite_n_halfspace_mean(&model, n, 0).unwrap();
    let chains_total = mean * n as f64;
    assert!(
        (full - chains_total).abs() < 1e-8,
        "full {full} vs chain sum {chains_total}"
    );
}

#[test]
fn boson_halfspace_decoupling_is_exact_at_finite_n() {
    // Gapped model: no punctures, no regularizer.
    let n = 8usize;
    let m = 4usize;
    let model = ModelSpec::boson_nearest_neighbor(2, 0.2).unwrap();

    let spectrum = model.lattice_spectrum(n).unwrap();
    let sites: Vec<(usize, usize)> = (0..m)
        .flat_map(|i1| (0..n).map(move |i2| (i1, i2)))
        .collect();
    let block = |f: &dyn Fn(f64) -> f64| -> DMatrix<f64> {
        let mut out = DMatrix::zeros(sites.len(), sites.len());
        for (a, &(i1, i2)) in sites.iter().enumerate() {
            for (b, &(j1, j2)) in sites.iter().enumerate() {
                let mut sum = 0.0;
                for k1 in 0..n {
                    for k2 in 0..n {
                        let lam = spectrum[k1 * n + k2];
                        let phase = TAU
                            * ((k1 * (i1 as i64 - j1 as i64).rem_euclid(n as i64) as usize) as f64
                                + (k2 * (i2 as i64 - j2 as i64).rem_euclid(n as i64) as usize)
                                    as f64)
                            / n as f64;
                        sum += f(lam) * phase.cos();
                    }
                }
                out[(a, b)] = sum / (2.0 * (n * n) as f64);
            }
        }
        out
    };
    let xa = block(&|l: f64| 1.0 / l.sqrt());
    let pa = block(&|l: f64| l.sqrt());
    // Oracle spectra via nalgebra only.
    let chol = pa.cholesky().expect("P_A positive definite");
    let b = chol.l().transpose() * &xa * chol.l();
    let full: f64 = b
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|w| {
            let mu = w.max(0.25).sqrt().max(0.5);
            let (hi, lo) = (mu + 0.5, mu - 0.5);
            hi * hi.log2() - if lo > 0.0 { lo * lo.log2() } else { 0.0 }
        })
        .sum();

    let mut chains_total = 0.0;
    for k2 in 0..n {
        let chain = ChainModel::from_model(&model, &[TAU * k2 as f64 / n as f64]).unwrap();
        chains_total += boson::chain_entropy_numeric(&chain, n, 0.0).unwrap();
    }
    assert!(
        (full - chains_total).abs() < 1e-8,
        "full {full} vs chain sum {chains_total}"
    );
}

#[test]
fn boson_decoupling_exact_with_regularized_critical_model() {
    let n = 6usize;
    let model = ModelSpec::boson_critical(2).unwrap();
    let mu_reg = 0.5f64;

    let spectrum: Vec<f64> = model
        .lattice_spectrum(n)
        .unwrap()
        .iter()
        .map(|l| l + mu_reg * mu_reg)
        .collect();
    let m = 3usize;
    let sites: Vec<(usize, usize)> = (0..m)
        .flat_map(|i1| (0..n).map(move |i2| (i1, i2)))
        .collect();
    let block = |f: &dyn Fn(f64) -> f64| -> DMatrix<f64> {
        let mut out = DMatrix::zeros(sites.len(), sites.len());
        for (a, &(i1, i2)) in sites.iter().enumerate() {
            for (b, &(j1, j2)) in sites.iter().enumerate() {
                let mut sum = 0.0;
                for k1 in 0..n {
                    for k2 in 0..n {
                        let lam = spectrum[k1 * n + k2];
                        let phase = TAU
                            * ((k1 * (i1 as i64 - j1 as i64).rem_euclid(n as i64) as usize) as f64
                                + (k2 * (i2 as i64 - j2 as i64).rem_euclid(n as i64) as usize)
                                    as f64)
                            / n as f64;
                        sum += f(lam) * phase.cos();
                    }
                }
                out[(a, b)] = sum / (2.0 * (n * n) as f64);
            }
        }
        out
    };
    let xa = block(&|l: f64| 1.0 / l.sqrt());
    let pa = block(&|l: f64| l.sqrt());
    let chol = pa.cholesky().expect("P_A positive definite");
    let b = chol.l().transpose() * &xa * chol.l();
    let full: f64 = b
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|w| {
            let mu = w.max(0.25).sqrt().max(0.5);
            let (hi, lo) = (mu + 0.5, mu - 0.5);
            hi * hi.log2() - if lo > 0.0 { lo * lo.log2() } else { 0.0 }
        })
        .sum();

    let mut chains_total = 0.0;
    for k2 in 0..n {
        let chain = ChainModel::from_model(&model, &[TAU * k2 as f64 / n as f64]).unwrap();
        let cov = boson_ground_covariance(&chain, n, mu_reg).unwrap();
        let (xc, pc) = cov.restricted(m);
        chains_total += boson_entropy(&symplectic_spectrum(&xc, &pc).unwrap()).unwrap();
    }
    assert!(
        (full - chains_total).abs() < 1e-8,
        "full {full} vs chain sum {chains_total}"
    );
}

#[test]
fn grid_doubling_contracts_for_smooth_integrands() {
    // |aggregate(N') - aggregate(2N')| decreases with resolution for a smooth
    // periodic integrand.
    let f = |phi: f64| (phi.cos() + 0.3 * (2.0 * phi).sin()).powi(2);
    let agg_at = |res: usize| {
        let grid = TransverseGrid::new(1, res).unwrap();
        let values: Vec<f64> = (0..res).map(|i| f(grid.phi(i)[0])).collect();
        aggregate(&values, &grid, InfinitePolicy::Error).unwrap().value
    };
    let mut prev = f64::INFINITY;
    for res in [8usize, 16, 32] {
        let d = (agg_at(res) - agg_at(2 * res)).abs();
        assert!(d < prev || d < 1e-14, "res={res}: {d} vs {prev}");
        prev = d.max(1e-15);
    }
}
