//! Experiment runners: each produces plot-ready CSV files and a JSON
//! summary under the output directory, then finalizes the manifest.

use std::f64::consts::TAU;

use serde_json::json;

use quasifree::analysis;
use quasifree::boson;
use quasifree::decouple::ChainModel;
use quasifree::error::Result;
use quasifree::fermion::{self, VolumeEstimator};
use quasifree::model::Statistics;
use quasifree::output::{format_sig12, CsvTable};

use crate::config::{ExperimentConfig, Kind};
use crate::manifest::OutputDir;

/// Round to the 12-significant-digit grid before JSON serialization so that
/// JSON and CSV carry the same precision and identical runs are
/// byte-identical.
fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format_sig12(x).parse().unwrap_or(x)
}

fn round12_vec(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|x| round12(*x)).collect()
}

pub fn run(config: &ExperimentConfig) -> Result<()> {
    let mut out = OutputDir::create(&config.out_dir)?;
    match config.kind {
        Kind::Dispersion => dispersion(config, &mut out)?,
        Kind::FermiVolume => fermi_volume(config, &mut out)?,
        Kind::FermionScaling => fermion_scaling(config, &mut out)?,
        Kind::BosonArealaw => boson_arealaw(config, &mut out)?,
        Kind::NegativityBound => negativity_bound(config, &mut out)?,
        Kind::Lifshitz => lifshitz(config, &mut out)?,
        Kind::HalfspaceDivergence => halfspace_divergence(config, &mut out)?,
    }
    out.finalize(&config.canonical_text())?;
    Ok(())
}

fn dispersion(config: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let model = config.build_model()?;
    for (idx, phi_p) in config.phi_prime.iter().enumerate() {
        let needed = model.dimension().saturating_sub(1);
        let phis: Vec<f64> = std::iter::repeat(*phi_p).take(needed).collect();
        let chain = ChainModel::from_model(&model, &phis)?;
        let mut table = CsvTable::new("phi1,lambda");
        for k in 0..config.resolution {
            let phi1 = TAU * k as f64 / config.resolution as f64;
            table.push_floats(&[phi1, chain.dispersion(phi1)]);
        }
        out.write(&format!("dispersion_cut_{idx}.csv"), &table.to_string_lossy())?;
    }

    // Surface scan: grid minimum and the near-zero set.
    let res = config.resolution.min(256).max(16);
    let mut min = f64::INFINITY;
    let mut argmin = vec![0.0; model.dimension()];
    let mut near_zero = 0usize;
    let total = res.pow(model.dimension() as u32);
    let mut k = vec![0usize; model.dimension()];
    for _ in 0..total {
        let phi: Vec<f64> = k.iter().map(|&x| TAU * x as f64 / res as f64).collect();
        let lam = model.dispersion(&phi)?;
        if lam < min {
            min = lam;
            argmin = phi.clone();
        }
        if lam.abs() < 1e-9 {
            near_zero += 1;
        }
        for d in (0..model.dimension()).rev() {
            k[d] += 1;
            if k[d] < res {
                break;
            }
            k[d] = 0;
        }
    }
    let gap = model.energy_gap(256)?;
    let summary = json!({
        "statistics": match model.statistics() { Statistics::Boson => "boson", Statistics::Fermion => "fermion" },
        "dimension": model.dimension(),
        "gap": round12(gap),
        "grid_min_lambda": round12(min),
        "grid_argmin_phi": round12_vec(&argmin),
        "near_zero_grid_points": near_zero,
        "surface_resolution": res,
    });
    out.write("dispersion.json", &pretty(&summary))?;
    Ok(())
}

fn fermi_volume(config: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let model = config.build_model()?;
    let grid = fermion::phi_sigma_volume(
        &model,
        config.sigma,
        VolumeEstimator::Grid {
            resolution: config.resolution,
        },
    )?;
    let analytic =
        fermion::phi_sigma_volume(&model, config.sigma, VolumeEstimator::AnalyticNearestNeighbor)
            .ok();

    let mut table = CsvTable::new("a,v_analytic,v_grid,error");
    table.push_cells(&[
        format_sig12(config.a),
        analytic
            .as_ref()
            .map(|v| format_sig12(v.volume))
            .unwrap_or_default(),
        format_sig12(grid.volume),
        format_sig12(grid.error),
    ]);
    out.write("fermi_volume.csv", &table.to_string_lossy())?;

    let summary = json!({
        "a": round12(config.a),
        "dimension": config.dimension,
        "sigma": config.sigma,
        "v_analytic": analytic.as_ref().map(|v| round12(v.volume)),
        "non_critical": analytic.as_ref().map(|v| v.non_critical),
        "v_grid": round12(grid.volume),
        "error": round12(grid.error),
        "resolution": config.resolution,
    });
    out.write("fermi_volume.json", &pretty(&summary))?;
    Ok(())
}

fn fermion_scaling(config: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let model = config.build_model()?;
    let report = fermion::halfspace_entropy_scan(
        &model,
        config.resolution,
        &config.m_ladder,
        config.workers,
    )?;

    let mut table = CsvTable::new("m,entropy_density,fit");
    for (&m, &v) in report.ms.iter().zip(&report.aggregates) {
        let fitted = report.fit.prefactor * (m as f64).log2() + report.fit.intercept;
        table.push_floats(&[m as f64, v, fitted]);
    }
    out.write("scaling.csv", &table.to_string_lossy())?;

    let dim_t = model.dimension() - 1;
    let mut chains = CsvTable::new(&quasifree::decouple::ChainRecord::csv_header(dim_t));
    for record in &report.per_chain {
        chains.push_raw(record.to_csv_row(format_sig12));
    }
    out.write("per_chain.csv", &chains.to_string_lossy())?;

    let summary = json!({
        "ms": report.ms,
        "aggregates": round12_vec(&report.aggregates),
        "fit_prefactor": round12(report.fit.prefactor),
        "fit_intercept": round12(report.fit.intercept),
        "fit_residual": round12(report.fit.residual),
        "predicted_prefactor": round12(report.predicted_prefactor),
        "relative_deviation": round12(
            (report.fit.prefactor - report.predicted_prefactor).abs()
                / report.predicted_prefactor.abs().max(1e-300)
        ),
        "grid_resolution": report.grid_resolution,
    });
    out.write("scaling.json", &pretty(&summary))?;
    Ok(())
}

fn boson_arealaw(config: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let model = config.build_model()?;
    let report = boson::area_law_check(&model, &config.n_ladder, &config.mu_factors, config.workers)?;

    let mut table = CsvTable::new("n,mu_reg,entropy_density,error,punctured,negativity_closed");
    for entry in &report.entries {
        let closed = boson::halfspace_negativity_aggregate_closed(&model, entry.n)?;
        table.push_cells(&[
            entry.n.to_string(),
            format_sig12(entry.mu_reg),
            format_sig12(entry.value),
            entry.error.map(format_sig12).unwrap_or_default(),
            entry.punctured.to_string(),
            format_sig12(closed.value),
        ]);
    }
    out.write("arealaw.csv", &table.to_string_lossy())?;

    let mut trend = CsvTable::new("n,entropy_density");
    for (&n, &v) in config.n_ladder.iter().zip(&report.trend) {
        trend.push_floats(&[n as f64, v]);
    }
    out.write("trend.csv", &trend.to_string_lossy())?;

    let dim_t = model.dimension() - 1;
    let mut chains = CsvTable::new(&quasifree::decouple::ChainRecord::csv_header(dim_t));
    for record in &report.per_chain {
        chains.push_raw(record.to_csv_row(format_sig12));
    }
    out.write("per_chain.csv", &chains.to_string_lossy())?;

    let summary = json!({
        "n_ladder": config.n_ladder,
        "mu_factors": round12_vec(&config.mu_factors),
        "trend": round12_vec(&report.trend),
        "bound": round12(report.bound),
        "bound_error": round12(report.bound_error),
        "monotone_bounded": report.monotone_bounded,
        "mu_variation": round12(report.mu_variation),
        "growth_slope": round12(report.growth_slope),
        "violates_area_law": report.violates_area_law,
    });
    out.write("arealaw.json", &pretty(&summary))?;
    Ok(())
}

fn negativity_bound(config: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let ladder = boson::negativity_bound_ladder(config.dimension, config.resolution)?;
    let values: Vec<f64> = ladder.iter().map(|(_, v)| *v).collect();
    let (value, error) = analysis::convergence_estimate(&values)?;

    let mut table = CsvTable::new("resolution,estimate");
    for (res, v) in &ladder {
        table.push_cells(&[res.to_string(), format_sig12(*v)]);
    }
    out.write("negativity_ladder.csv", &table.to_string_lossy())?;

    let summary = json!({
        "dimension": config.dimension,
        "resolution": config.resolution,
        "value": round12(value),
        "error": round12(error),
        "exact_d2": if config.dimension == 2 { Some(round12(boson::d2_bound_exact())) } else { None },
    });
    out.write("negativity_bound.json", &pretty(&summary))?;
    Ok(())
}

fn lifshitz(config: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    if config.a_points < 5 || config.a_max <= config.a_min {
        return Err(quasifree::Error::InvalidInput(
            "lifshitz scan needs a_points >= 5 and a_max > a_min".into(),
        ));
    }
    let params: Vec<f64> = (0..config.a_points)
        .map(|k| {
            config.a_min
                + (config.a_max - config.a_min) * k as f64 / (config.a_points - 1) as f64
        })
        .collect();
    let dim = config.dimension;
    let resolution = config.resolution;
    let scan = analysis::lifshitz_scan(
        |a| {
            if dim == 2 {
                Ok(fermion::analytic_phi2_volume(a))
            } else {
                let model = quasifree::model::ModelSpec::fermion_nearest_neighbor(dim, a)?;
                Ok(fermion::phi_sigma_volume(&model, 2, VolumeEstimator::Grid { resolution })?
                    .volume)
            }
        },
        &params,
    )?;

    let mut table = CsvTable::new("a,v_phi2");
    for (&a, &v) in scan.parameters.iter().zip(&scan.values) {
        table.push_floats(&[a, v]);
    }
    out.write("lifshitz.csv", &table.to_string_lossy())?;

    let kinks: Vec<serde_json::Value> = scan
        .kinks
        .iter()
        .map(|k| {
            json!({
                "a": round12(k.location),
                "left_slope": round12(k.left_slope),
                "right_slope": round12(k.right_slope),
            })
        })
        .collect();
    let summary = json!({
        "family": "nn-fermion",
        "dimension": dim,
        "grid": round12_vec(&scan.parameters),
        "values": round12_vec(&scan.values),
        "kinks": kinks,
    });
    out.write("lifshitz.json", &pretty(&summary))?;
    Ok(())
}

fn halfspace_divergence(config: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let model = config.build_model()?;
    let mut table = CsvTable::new("n,halfspace_mean,lower_bound");
    let mut means = Vec::new();
    let mut bounds = Vec::new();
    for &n in &config.n_ladder {
        let mean = fermion::finite_n_halfspace_mean(&model, n, config.workers)?;
        let bound = fermion::lower_bound_series(n)?;
        table.push_floats(&[n as f64, mean, bound]);
        means.push(mean);
        bounds.push(bound);
    }
    out.write("divergence.csv", &table.to_string_lossy())?;

    let exceeds = means.iter().zip(&bounds).all(|(m, b)| m > b);
    let growing = means.windows(2).all(|w| w[1] > w[0]);
    let summary = json!({
        "n_ladder": config.n_ladder,
        "halfspace_means": round12_vec(&means),
        "lower_bounds": round12_vec(&bounds),
        "exceeds_lower_bound": exceeds,
        "growing": growing,
    });
    out.write("divergence.json", &pretty(&summary))?;
    Ok(())
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serialization");
    s.push('\n');
    s
}
