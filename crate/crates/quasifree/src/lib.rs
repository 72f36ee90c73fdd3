//! Numerical laboratory for entanglement scaling in quasi-free bosonic and
//! fermionic lattice models with half-space geometry.
//!
//! The pipeline mirrors the physics:
//!
//! 1. [`model`] defines translation-invariant quadratic models on the
//!    D-torus through their coupling tables and dispersion.
//! 2. [`decouple`] maps a model plus a transverse momentum to an effective
//!    1D chain and aggregates per-chain quantities back into half-space
//!    densities.
//! 3. [`gaussian`] holds the Gaussian-state machinery: bosonic covariances
//!    and symplectic spectra, fermionic symbols and Toeplitz correlations,
//!    entropy and negativity functionals.
//! 4. [`fermion`] and [`boson`] implement the two scaling stories: the
//!    logarithmic law with its Fermi-set prefactor, and the area law with
//!    its closed-form negativity bound.
//! 5. [`analysis`] fits scaling laws, scans for Lifshitz kinks, and
//!    extrapolates resolution ladders.
//!
//! Everything is deterministic: scans reduce in grid order with compensated
//! summation, so results are bit-stable across runs and worker counts.

pub mod analysis;
pub mod boson;
pub mod decouple;
pub mod error;
pub mod fermion;
pub mod gaussian;
pub mod linalg;
pub mod model;
pub mod output;

pub use error::{Error, Result};

/// Run `f` on a dedicated rayon pool of `workers` threads (0 = the global
/// default pool). Engine reductions are ordered, so the worker count never
/// changes results, only wall time.
pub(crate) fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to build worker pool");
    pool.install(f)
}
