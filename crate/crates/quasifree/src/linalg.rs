//! Dense symmetric eigenvalue routines.
//!
//! The engines only ever need eigenvalues (entropies and symplectic spectra
//! are functions of the spectrum alone), so the solver here is a
//! Householder reduction to tridiagonal form followed by Sturm-sequence
//! bisection. Skipping the eigenvector accumulation roughly halves the cost
//! of the large Toeplitz eigenproblems (up to 2048x2048) that dominate the
//! fermionic scaling runs.

use nalgebra::DMatrix;

/// Reduce a symmetric matrix to tridiagonal form, returning `(diag, offdiag)`.
///
/// Only the lower triangle of `a` is read. The transformation is an
/// orthogonal similarity, so the tridiagonal matrix has the same spectrum.
pub fn tridiagonalize_symmetric(a: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    if n == 0 {
        return (Vec::new(), Vec::new());
    }

    // Row-major working copy; only entries with i >= j are kept current.
    let mut m = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            m[i * n + j] = a[(i, j)];
        }
    }

    let mut diag = vec![0.0f64; n];
    let mut off = vec![0.0f64; n.saturating_sub(1)];
    let mut v = vec![0.0f64; n];
    let mut p = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];

    for k in 0..n.saturating_sub(2) {
        let nk = n - k - 1; // trailing block size
        let mut sigma = 0.0;
        for i in 0..nk {
            let x = m[(k + 1 + i) * n + k];
            v[i] = x;
            sigma += x * x;
        }
        diag[k] = m[k * n + k];
        if sigma == 0.0 {
            off[k] = 0.0;
            continue;
        }
        if sigma < 1e-290 {
            // Column is numerically negligible; treat as already reduced.
            off[k] = v[0];
            continue;
        }
        let norm = sigma.sqrt();
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        off[k] = alpha;
        v[0] -= alpha;
        let vtv: f64 = v[..nk].iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;

        // p = beta * A22 * v using the lower triangle only.
        p[..nk].iter_mut().for_each(|x| *x = 0.0);
        for i in 0..nk {
            let ri = k + 1 + i;
            let row = &m[ri * n + k + 1..ri * n + k + 1 + i];
            let vi = v[i];
            let mut acc = 0.0;
            for j in 0..i {
                acc += row[j] * v[j];
                p[j] += row[j] * vi;
            }
            p[i] += acc + m[ri * n + ri] * vi;
        }
        for x in p[..nk].iter_mut() {
            *x *= beta;
        }
        let pv: f64 = p[..nk].iter().zip(&v[..nk]).map(|(a, b)| a * b).sum();
        let half = 0.5 * beta * pv;
        for i in 0..nk {
            w[i] = p[i] - half * v[i];
        }

        // A22 <- A22 - v w^T - w v^T (lower triangle).
        for i in 0..nk {
            let ri = k + 1 + i;
            let (vi, wi) = (v[i], w[i]);
            let row = &mut m[ri * n + k + 1..ri * n + k + 2 + i];
            for j in 0..=i {
                row[j] -= vi * w[j] + wi * v[j];
            }
        }
    }

    if n >= 2 {
        diag[n - 2] = m[(n - 2) * n + (n - 2)];
        off[n - 2] = m[(n - 1) * n + (n - 2)];
    }
    diag[n - 1] = m[(n - 1) * n + (n - 1)];
    (diag, off)
}

/// Count eigenvalues of the symmetric tridiagonal matrix strictly below `x`
/// via the Sturm sequence (number of negative LDL^T pivots).
fn sturm_count(diag: &[f64], off_sq: &[f64], x: f64) -> usize {
    let mut count = 0usize;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let q_safe = if q.abs() < 1e-300 {
            if q >= 0.0 {
                1e-300
            } else {
                -1e-300
            }
        } else {
            q
        };
        q = (diag[i] - x) - off_sq[i - 1] / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues of a symmetric tridiagonal matrix, ascending, by bisection.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![diag[0]];
    }
    assert_eq!(off.len(), n - 1);
    let off_sq: Vec<f64> = off.iter().map(|e| e * e).collect();

    // Gershgorin bounds.
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for i in 0..n {
        let el = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let er = if i < n - 1 { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - el - er);
        hi = hi.max(diag[i] + el + er);
    }
    let span = (hi - lo).max(1e-300);
    lo -= 1e-12 * span.max(1.0);
    hi += 1e-12 * span.max(1.0);

    let mut eigs = Vec::with_capacity(n);
    let mut lower = lo;
    for k in 0..n {
        // Eigenvalues come out ascending, so the previous one bounds below.
        let mut a = lower;
        let mut b = hi;
        for _ in 0..120 {
            let mid = 0.5 * (a + b);
            if b - a <= f64::EPSILON * mid.abs().max(1.0) + 1e-300 {
                break;
            }
            if sturm_count(diag, &off_sq, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        let lam = 0.5 * (a + b);
        eigs.push(lam);
        lower = a;
    }
    eigs
}

/// All eigenvalues of a dense symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    match n {
        0 => Vec::new(),
        1 => vec![a[(0, 0)]],
        2 => {
            let (p, q, r) = (a[(0, 0)], a[(1, 1)], a[(1, 0)]);
            let t = 0.5 * (p + q);
            let d = (0.25 * (p - q) * (p - q) + r * r).sqrt();
            vec![t - d, t + d]
        }
        _ => {
            let (d, e) = tridiagonalize_symmetric(a);
            tridiagonal_eigenvalues(&d, &e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let x = rng.gen_range(-1.0..1.0);
                a[(i, j)] = x;
                a[(j, i)] = x;
            }
        }
        a
    }

    #[test]
    fn matches_nalgebra_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 3, 5, 8, 13, 21, 40] {
            let a = random_symmetric(n, &mut rng);
            let mut reference: Vec<f64> =
                a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            reference.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let mine = symmetric_eigenvalues(&a);
            for (x, y) in mine.iter().zip(&reference) {
                assert!((x - y).abs() < 1e-10, "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn clean_tight_binding_chain() {
        // d_i = 2, e_i = -1: eigenvalues 2 - 2 cos(k pi / (n+1)).
        let n = 64;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let evals = tridiagonal_eigenvalues(&d, &e);
        for (k, ev) in evals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((ev - exact).abs() < 1e-12, "k={k}: {ev} vs {exact}");
        }
    }

    #[test]
    fn handles_degenerate_spectra() {
        let a = DMatrix::<f64>::identity(9, 9) * 3.0;
        let evals = symmetric_eigenvalues(&a);
        assert!(evals.iter().all(|x| (x - 3.0).abs() < 1e-14));

        // Block with an exact double eigenvalue.
        let mut b = DMatrix::zeros(4, 4);
        b[(0, 1)] = 1.0;
        b[(1, 0)] = 1.0;
        b[(2, 3)] = 1.0;
        b[(3, 2)] = 1.0;
        let evals = symmetric_eigenvalues(&b);
        let expect = [-1.0, -1.0, 1.0, 1.0];
        for (x, y) in evals.iter().zip(expect.iter()) {
            assert!((x - y).abs() < 1e-13);
        }
    }
}
