//! Experiment configuration: plain-text key-value files, flag overrides,
//! and the canonical echo used for hashing and the manifest.
//!
//! File schema (one `key = value` per line, `#` comments):
//!
//! ```text
//! kind = fermi-volume          # experiment kind
//! statistics = fermion         # boson | fermion (custom models)
//! dimension = 2
//! model = nn-fermion           # nn-fermion | half-filled | nn-boson | kg-boson | custom
//! a = 0.5                      # nearest-neighbor hopping
//! c = 0.25                     # boson coupling (defaults to 1/(2D))
//! mass = 0.01                  # kg-boson parameters
//! box_length = 1.0
//! velocity = 1.0
//! kg_n = 512
//! coupling 1 0 = -0.25         # custom model: offset -> value lines
//! param name = 1.0             # custom model: named parameters
//! resolution = 1024
//! m_ladder = 64,128,256,512,1024
//! n_ladder = 64,128,256,512
//! mu_factors = 1.0,0.5,0.25    # mu_reg = factor / N
//! a_min = 0.05                 # lifshitz scan grid
//! a_max = 1.0
//! a_points = 401
//! phi_prime = 3.141592653589793
//! c0 = 1.0474932
//! sigma = 2
//! out_dir = out
//! workers = 2
//! seed = 0                     # reserved for sampling estimators
//! ```
//!
//! Flags override file values; the resolved config is echoed into the
//! manifest together with its hash.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use quasifree::error::{Error, Result};
use quasifree::fermion::DEFAULT_C0;
use quasifree::model::{ModelSpec, Statistics};
use quasifree::output::format_sig12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Dispersion,
    FermiVolume,
    FermionScaling,
    BosonArealaw,
    NegativityBound,
    Lifshitz,
    HalfspaceDivergence,
}

impl Kind {
    pub fn parse(s: &str) -> Option<Kind> {
        Some(match s {
            "dispersion" => Kind::Dispersion,
            "fermi-volume" => Kind::FermiVolume,
            "fermion-scaling" => Kind::FermionScaling,
            "boson-arealaw" => Kind::BosonArealaw,
            "negativity-bound" => Kind::NegativityBound,
            "lifshitz" => Kind::Lifshitz,
            "halfspace-divergence" => Kind::HalfspaceDivergence,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kind::Dispersion => "dispersion",
            Kind::FermiVolume => "fermi-volume",
            Kind::FermionScaling => "fermion-scaling",
            Kind::BosonArealaw => "boson-arealaw",
            Kind::NegativityBound => "negativity-bound",
            Kind::Lifshitz => "lifshitz",
            Kind::HalfspaceDivergence => "halfspace-divergence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    NnFermion,
    HalfFilled,
    NnBoson,
    KgBoson,
    Custom,
}

impl ModelKind {
    fn parse(s: &str) -> Option<ModelKind> {
        Some(match s {
            "nn-fermion" => ModelKind::NnFermion,
            "half-filled" => ModelKind::HalfFilled,
            "nn-boson" => ModelKind::NnBoson,
            "kg-boson" => ModelKind::KgBoson,
            "custom" => ModelKind::Custom,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            ModelKind::NnFermion => "nn-fermion",
            ModelKind::HalfFilled => "half-filled",
            ModelKind::NnBoson => "nn-boson",
            ModelKind::KgBoson => "kg-boson",
            ModelKind::Custom => "custom",
        }
    }
}

/// Partially specified configuration (file contents or flag values).
#[derive(Debug, Clone, Default)]
pub struct PartialConfig {
    pub kind: Option<Kind>,
    pub statistics: Option<Statistics>,
    pub dimension: Option<usize>,
    pub model: Option<ModelKind>,
    pub a: Option<f64>,
    pub c: Option<f64>,
    pub mass: Option<f64>,
    pub box_length: Option<f64>,
    pub velocity: Option<f64>,
    pub kg_n: Option<usize>,
    pub couplings: Vec<(Vec<i64>, f64)>,
    pub params: Vec<(String, f64)>,
    pub resolution: Option<usize>,
    pub m_ladder: Option<Vec<usize>>,
    pub n_ladder: Option<Vec<usize>>,
    pub mu_factors: Option<Vec<f64>>,
    pub a_min: Option<f64>,
    pub a_max: Option<f64>,
    pub a_points: Option<usize>,
    pub phi_prime: Option<Vec<f64>>,
    pub c0: Option<f64>,
    pub sigma: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

impl PartialConfig {
    /// Later values win.
    pub fn overlay(mut self, other: PartialConfig) -> PartialConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            kind, statistics, dimension, model, a, c, mass, box_length, velocity, kg_n,
            resolution, m_ladder, n_ladder, mu_factors, a_min, a_max, a_points, phi_prime,
            c0, sigma, out_dir, workers, seed
        );
        if !other.couplings.is_empty() {
            self.couplings = other.couplings;
        }
        if !other.params.is_empty() {
            self.params = other.params;
        }
        self
    }
}

/// Parse the plain-text config format with line-numbered diagnostics.
pub fn parse_config(text: &str) -> Result<PartialConfig> {
    let mut out = PartialConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let (key, value) = stripped.split_once('=').ok_or(Error::Config {
            line,
            msg: format!("expected `key = value`, got `{raw}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |msg: String| Error::Config { line, msg };
        let parse_f64 = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| bad(format!("invalid number `{v}`")))
        };
        let parse_usize = |v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| bad(format!("invalid integer `{v}`")))
        };
        let parse_usize_list = |v: &str| -> Result<Vec<usize>> {
            v.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| bad(format!("invalid integer list `{v}`")))
                })
                .collect()
        };
        let parse_f64_list = |v: &str| -> Result<Vec<f64>> {
            v.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(format!("invalid number list `{v}`")))
                })
                .collect()
        };
        match key {
            "kind" => {
                out.kind =
                    Some(Kind::parse(value).ok_or_else(|| bad(format!("unknown kind `{value}`")))?)
            }
            "statistics" => {
                out.statistics = Some(match value {
                    "boson" => Statistics::Boson,
                    "fermion" => Statistics::Fermion,
                    _ => return Err(bad(format!("unknown statistics `{value}`"))),
                })
            }
            "dimension" => out.dimension = Some(parse_usize(value)?),
            "model" => {
                out.model = Some(
                    ModelKind::parse(value)
                        .ok_or_else(|| bad(format!("unknown model `{value}`")))?,
                )
            }
            "a" => out.a = Some(parse_f64(value)?),
            "c" => out.c = Some(parse_f64(value)?),
            "mass" => out.mass = Some(parse_f64(value)?),
            "box_length" => out.box_length = Some(parse_f64(value)?),
            "velocity" => out.velocity = Some(parse_f64(value)?),
            "kg_n" => out.kg_n = Some(parse_usize(value)?),
            "resolution" => out.resolution = Some(parse_usize(value)?),
            "m_ladder" => out.m_ladder = Some(parse_usize_list(value)?),
            "n_ladder" => out.n_ladder = Some(parse_usize_list(value)?),
            "mu_factors" => out.mu_factors = Some(parse_f64_list(value)?),
            "a_min" => out.a_min = Some(parse_f64(value)?),
            "a_max" => out.a_max = Some(parse_f64(value)?),
            "a_points" => out.a_points = Some(parse_usize(value)?),
            "phi_prime" => out.phi_prime = Some(parse_f64_list(value)?),
            "c0" => out.c0 = Some(parse_f64(value)?),
            "sigma" => out.sigma = Some(parse_usize(value)?),
            "out_dir" => out.out_dir = Some(PathBuf::from(value)),
            "workers" => out.workers = Some(parse_usize(value)?),
            "seed" => {
                out.seed = Some(
                    value
                        .parse::<u64>()
                        .map_err(|_| bad(format!("invalid seed `{value}`")))?,
                )
            }
            _ if key.starts_with("coupling") => {
                let offsets: Vec<i64> = key["coupling".len()..]
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<i64>()
                            .map_err(|_| bad(format!("invalid offset in `{key}`")))
                    })
                    .collect::<Result<_>>()?;
                if offsets.is_empty() {
                    return Err(bad("coupling line needs offset components".to_string()));
                }
                out.couplings.push((offsets, parse_f64(value)?));
            }
            _ if key.starts_with("param ") => {
                let name = key["param ".len()..].trim();
                if name.is_empty() {
                    return Err(bad("param line needs a name".to_string()));
                }
                out.params.push((name.to_string(), parse_f64(value)?));
            }
            _ => return Err(bad(format!("unknown key `{key}`"))),
        }
    }
    Ok(out)
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub statistics: Statistics,
    pub dimension: usize,
    pub model: ModelKind,
    pub a: f64,
    pub c: Option<f64>,
    pub mass: f64,
    pub box_length: f64,
    pub velocity: f64,
    pub kg_n: usize,
    pub couplings: Vec<(Vec<i64>, f64)>,
    pub params: Vec<(String, f64)>,
    pub resolution: usize,
    pub m_ladder: Vec<usize>,
    pub n_ladder: Vec<usize>,
    pub mu_factors: Vec<f64>,
    pub a_min: f64,
    pub a_max: f64,
    pub a_points: usize,
    pub phi_prime: Vec<f64>,
    pub c0: f64,
    pub sigma: usize,
    pub out_dir: PathBuf,
    pub workers: usize,
    pub seed: u64,
}

/// Resolve defaults <- file <- flags into a complete config.
pub fn resolve(kind: Option<Kind>, merged: PartialConfig) -> Result<ExperimentConfig> {
    let kind = kind
        .or(merged.kind)
        .ok_or_else(|| Error::InvalidInput("no experiment kind given".into()))?;
    let model = merged.model.unwrap_or(match kind {
        Kind::BosonArealaw | Kind::NegativityBound => ModelKind::NnBoson,
        Kind::HalfspaceDivergence => ModelKind::HalfFilled,
        _ => ModelKind::NnFermion,
    });
    let statistics = merged.statistics.unwrap_or(match model {
        ModelKind::NnBoson | ModelKind::KgBoson => Statistics::Boson,
        ModelKind::NnFermion | ModelKind::HalfFilled => Statistics::Fermion,
        ModelKind::Custom => Statistics::Fermion,
    });
    let dimension = merged.dimension.unwrap_or(2);
    if dimension == 0 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    let default_resolution = match kind {
        Kind::Dispersion => 512,
        Kind::FermiVolume => 1024,
        Kind::FermionScaling => 128,
        Kind::NegativityBound => 32_768,
        _ => 512,
    };
    let resolution = merged.resolution.unwrap_or(default_resolution);
    if resolution < 3 {
        return Err(Error::InvalidInput(
            "resolution below the documented minimum of 3".into(),
        ));
    }
    let config = ExperimentConfig {
        kind,
        statistics,
        dimension,
        model,
        a: merged.a.unwrap_or(1.0),
        c: merged.c,
        mass: merged.mass.unwrap_or(0.0),
        box_length: merged.box_length.unwrap_or(1.0),
        velocity: merged.velocity.unwrap_or(1.0),
        kg_n: merged.kg_n.unwrap_or(512),
        couplings: merged.couplings,
        params: merged.params,
        resolution,
        m_ladder: merged
            .m_ladder
            .unwrap_or_else(|| vec![64, 128, 256, 512, 1024]),
        n_ladder: merged.n_ladder.unwrap_or_else(|| match kind {
            Kind::HalfspaceDivergence => vec![16, 32, 64],
            _ => vec![64, 128, 256, 512],
        }),
        mu_factors: merged.mu_factors.unwrap_or_else(|| vec![1.0, 0.5, 0.25]),
        a_min: merged.a_min.unwrap_or(0.05),
        a_max: merged.a_max.unwrap_or(1.0),
        a_points: merged.a_points.unwrap_or(401),
        phi_prime: merged
            .phi_prime
            .unwrap_or_else(|| vec![std::f64::consts::PI]),
        c0: merged.c0.unwrap_or(DEFAULT_C0),
        sigma: merged.sigma.unwrap_or(2),
        out_dir: merged.out_dir.unwrap_or_else(|| PathBuf::from("out")),
        workers: merged.workers.unwrap_or(0),
        seed: merged.seed.unwrap_or(0),
    };
    for m in &config.m_ladder {
        if *m < 2 {
            return Err(Error::InvalidInput("m_ladder entries must be >= 2".into()));
        }
    }
    for n in &config.n_ladder {
        if *n < 4 || n % 2 != 0 {
            return Err(Error::InvalidInput(
                "n_ladder entries must be even and >= 4".into(),
            ));
        }
    }
    Ok(config)
}

impl ExperimentConfig {
    /// Build the model this configuration describes.
    pub fn build_model(&self) -> Result<ModelSpec> {
        let mut model = match self.model {
            ModelKind::NnFermion => ModelSpec::fermion_nearest_neighbor(self.dimension, self.a)?,
            ModelKind::HalfFilled => ModelSpec::fermion_half_filled(self.dimension, self.a)?,
            ModelKind::NnBoson => {
                let c = self
                    .c
                    .unwrap_or_else(|| quasifree::model::critical_boson_coupling(self.dimension));
                ModelSpec::boson_nearest_neighbor(self.dimension, c)?
            }
            ModelKind::KgBoson => ModelSpec::boson_klein_gordon(
                self.dimension,
                self.mass,
                self.box_length,
                self.velocity,
                self.kg_n,
            )?,
            ModelKind::Custom => {
                ModelSpec::new(self.statistics, self.dimension, self.couplings.clone())?
            }
        };
        for (name, value) in &self.params {
            model = model.with_parameter(name, *value)?;
        }
        Ok(model)
    }

    /// Canonical text form: fixed key order, 12-significant-digit floats.
    /// This exact string is hashed and echoed into the manifest.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        kv.insert("kind", self.kind.name().to_string());
        kv.insert(
            "statistics",
            match self.statistics {
                Statistics::Boson => "boson".into(),
                Statistics::Fermion => "fermion".into(),
            },
        );
        kv.insert("dimension", self.dimension.to_string());
        kv.insert("model", self.model.name().to_string());
        kv.insert("a", format_sig12(self.a));
        if let Some(c) = self.c {
            kv.insert("c", format_sig12(c));
        }
        kv.insert("mass", format_sig12(self.mass));
        kv.insert("box_length", format_sig12(self.box_length));
        kv.insert("velocity", format_sig12(self.velocity));
        kv.insert("kg_n", self.kg_n.to_string());
        kv.insert("resolution", self.resolution.to_string());
        kv.insert("m_ladder", join_usize(&self.m_ladder));
        kv.insert("n_ladder", join_usize(&self.n_ladder));
        kv.insert("mu_factors", join_f64(&self.mu_factors));
        kv.insert("a_min", format_sig12(self.a_min));
        kv.insert("a_max", format_sig12(self.a_max));
        kv.insert("a_points", self.a_points.to_string());
        kv.insert("phi_prime", join_f64(&self.phi_prime));
        kv.insert("c0", format_sig12(self.c0));
        kv.insert("sigma", self.sigma.to_string());
        kv.insert("workers", self.workers.to_string());
        kv.insert("seed", self.seed.to_string());
        for (k, v) in kv {
            let _ = writeln!(s, "{k} = {v}");
        }
        for (offset, value) in &self.couplings {
            let os: Vec<String> = offset.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "coupling {} = {}", os.join(" "), format_sig12(*value));
        }
        for (name, value) in &self.params {
            let _ = writeln!(s, "param {name} = {}", format_sig12(*value));
        }
        s
    }
}

fn join_usize(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn join_f64(v: &[f64]) -> String {
    v.iter()
        .map(|x| format_sig12(*x))
        .collect::<Vec<_>>()
        .join(",")
}
