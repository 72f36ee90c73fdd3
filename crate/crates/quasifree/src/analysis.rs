//! Scaling-law fits, Lifshitz scans, and convergence estimation.

use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares fit of `value = prefactor * log2(M) + intercept`.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingFit {
    pub prefactor: f64,
    pub intercept: f64,
    /// Euclidean norm of the fit residuals.
    pub residual: f64,
    pub points: usize,
}

/// Fit a logarithmic scaling law to `(M, value)` points.
///
/// Requires at least 4 points with strictly increasing positive `M`
/// (a geometric ladder equalizes leverage in `log M`).
pub fn fit_log_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "log fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    for w in points.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::InvalidInput(
                "fit abscissae must be strictly increasing".into(),
            ));
        }
    }
    if points[0].0 <= 0.0 {
        return Err(Error::InvalidInput("fit abscissae must be positive".into()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(m, _)| m.log2()).collect();
    let sx: f64 = xs.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sy: f64 = points.iter().map(|(_, y)| y).sum();
    let sxy: f64 = xs.iter().zip(points).map(|(x, (_, y))| x * y).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(Error::InvalidInput("degenerate fit abscissae".into()));
    }
    let prefactor = (n * sxy - sx * sy) / det;
    let intercept = (sy - prefactor * sx) / n;
    let residual = xs
        .iter()
        .zip(points)
        .map(|(x, (_, y))| {
            let r = y - (prefactor * x + intercept);
            r * r
        })
        .sum::<f64>()
        .sqrt();
    Ok(ScalingFit {
        prefactor,
        intercept,
        residual,
        points: points.len(),
    })
}

/// A detected non-analyticity of a scanned curve.
#[derive(Debug, Clone, Serialize)]
pub struct Kink {
    pub location: f64,
    pub left_slope: f64,
    pub right_slope: f64,
    /// The second difference that triggered the detection.
    pub second_difference: f64,
}

/// Result of scanning a prefactor curve over a parameter grid.
#[derive(Debug, Clone, Serialize)]
pub struct LifshitzScan {
    pub parameters: Vec<f64>,
    pub values: Vec<f64>,
    pub kinks: Vec<Kink>,
}

/// Scan a model family `a -> v(a)` over a parameter grid and locate kinks.
///
/// Kinks are flagged where the absolute second difference exceeds 10x the
/// median second difference of the scan; runs of adjacent flags are merged
/// into a single kink at the strongest point. An empty kink list is a valid
/// outcome.
pub fn lifshitz_scan<F>(family: F, parameters: &[f64]) -> Result<LifshitzScan>
where
    F: Fn(f64) -> Result<f64>,
{
    if parameters.len() < 5 {
        return Err(Error::InvalidInput(
            "lifshitz scan needs at least 5 grid points".into(),
        ));
    }
    for w in parameters.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidInput(
                "parameter grid must be strictly increasing".into(),
            ));
        }
    }
    let values: Vec<f64> = parameters
        .iter()
        .map(|&a| family(a))
        .collect::<Result<_>>()?;
    let kinks = detect_kinks(parameters, &values);
    Ok(LifshitzScan {
        parameters: parameters.to_vec(),
        values,
        kinks,
    })
}

fn detect_kinks(xs: &[f64], vs: &[f64]) -> Vec<Kink> {
    let n = vs.len();
    let mut d2 = vec![0.0f64; n];
    for i in 1..n - 1 {
        d2[i] = (vs[i + 1] - 2.0 * vs[i] + vs[i - 1]).abs();
    }
    let mut sorted: Vec<f64> = d2[1..n - 1].to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    let scale = vs.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let threshold = if median > 0.0 {
        10.0 * median
    } else {
        1e-12 * scale.max(1.0)
    };

    let mut kinks = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        if d2[i] <= threshold {
            i += 1;
            continue;
        }
        // Merge the run of consecutive flagged points into one kink.
        let mut best = i;
        let mut j = i;
        while j < n - 1 && d2[j] > threshold {
            if d2[j] > d2[best] {
                best = j;
            }
            j += 1;
        }
        let k = best;
        kinks.push(Kink {
            location: xs[k],
            left_slope: (vs[k] - vs[k - 1]) / (xs[k] - xs[k - 1]),
            right_slope: (vs[k + 1] - vs[k]) / (xs[k + 1] - xs[k]),
            second_difference: d2[k],
        });
        i = j;
    }
    kinks
}

/// Estimate the limit of a resolution-doubling sequence by iterated Aitken
/// extrapolation; the returned error is the magnitude of the last applied
/// correction.
///
/// Sequences whose base differences fail to contract are rejected.
pub fn convergence_estimate(sequence: &[f64]) -> Result<(f64, f64)> {
    if sequence.len() < 3 {
        return Err(Error::InvalidInput(
            "convergence estimate needs at least 3 terms".into(),
        ));
    }
    if sequence.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "convergence estimate needs finite terms".into(),
        ));
    }
    let diffs: Vec<f64> = sequence.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = sequence.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    if diffs.iter().all(|d| d.abs() < 1e-15 * scale) {
        return Ok((*sequence.last().unwrap(), 0.0));
    }
    let first = diffs[0].abs();
    let last = diffs[diffs.len() - 1].abs();
    let contracting = last < 0.999 * first || last < 1e-15 * scale;
    if !contracting {
        return Err(Error::NoConvergence(
            "sequence differences do not contract under doubling".into(),
        ));
    }

    let mut s = sequence.to_vec();
    let mut last_correction = 0.0f64;
    while s.len() >= 3 {
        let mut t = Vec::with_capacity(s.len() - 2);
        for i in 0..s.len() - 2 {
            let d1 = s[i + 1] - s[i];
            let d2 = s[i + 2] - s[i + 1];
            let den = d2 - d1;
            if den.abs() < 1e-15 * scale {
                t.push(s[i + 2]);
            } else {
                t.push(s[i + 2] - d2 * d2 / den);
            }
        }
        last_correction = (t[t.len() - 1] - s[s.len() - 1]).abs();
        s = t;
    }
    Ok((*s.last().unwrap(), last_correction))
}
