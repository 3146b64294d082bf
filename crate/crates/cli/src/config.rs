//! Run configuration: one TOML document per run.
//!
//! ```toml
//! experiment = "illposed"
//! output = "runs/illposed"
//!
//! [model]
//! alpha = 1.5
//! sigma = 1.0
//!
//! [grid]
//! n = 4096
//! r_max = 64.0
//!
//! [params]
//! s = -0.25
//! ```
//!
//! Unknown keys anywhere are rejected. Every omitted value is filled in
//! before the run starts, and the resolved document is what the manifest
//! echoes.

use std::fmt;
use std::path::PathBuf;

use hartree_core::{DyadicIndex, ModelParams, RadialGrid};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Evolve,
    Picard,
    Scatter,
    Lemma22,
    Bilinear,
    Bernstein,
    Strichartz,
    Transference,
    Sumbil,
    Illposed,
    Localtime,
    Selftest,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 12] = [
        Self::Evolve,
        Self::Picard,
        Self::Scatter,
        Self::Lemma22,
        Self::Bilinear,
        Self::Bernstein,
        Self::Strichartz,
        Self::Transference,
        Self::Sumbil,
        Self::Illposed,
        Self::Localtime,
        Self::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Evolve => "evolve",
            Self::Picard => "picard",
            Self::Scatter => "scatter",
            Self::Lemma22 => "lemma22",
            Self::Bilinear => "bilinear",
            Self::Bernstein => "bernstein",
            Self::Strichartz => "strichartz",
            Self::Transference => "transference",
            Self::Sumbil => "sumbil",
            Self::Illposed => "illposed",
            Self::Localtime => "localtime",
            Self::Selftest => "selftest",
        }
    }

    pub fn evolves(self) -> bool {
        matches!(self, Self::Evolve | Self::Picard | Self::Scatter | Self::Illposed | Self::Localtime)
    }

    /// Grid used when the document has no `[grid]` table. Each is large
    /// enough that the default parameters pass the aliasing and wall guards.
    pub fn default_grid(self) -> GridSpec {
        let (n, r_max) = match self {
            Self::Scatter => (4096, 256.0),
            Self::Bilinear => (8192, 128.0),
            Self::Bernstein | Self::Illposed | Self::Localtime => (4096, 64.0),
            Self::Selftest => (1024, 32.0),
            _ => (2048, 64.0),
        };
        GridSpec { n, r_max }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSpec {
    pub alpha: f64,
    pub sigma: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self { alpha: 1.5, sigma: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub r_max: f64,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    n: Option<usize>,
    r_max: Option<f64>,
}

macro_rules! params {
    ($(#[$meta:meta])* $name:ident { $($(#[$fmeta:meta])* $field:ident : $ty:ty = $default:expr),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields, default)]
        pub struct $name {
            $($(#[$fmeta])* pub $field: $ty,)*
        }

        impl Default for $name {
            fn default() -> Self {
                Self { $($field: $default,)* }
            }
        }
    };
}

params!(
    /// Strang splitting from a Gaussian `amplitude * exp(-r^2 / (2 width^2))`.
    EvolveParams {
        t_final: f64 = 2.0,
        dt: f64 = 0.02,
        amplitude: f64 = 0.5,
        width: f64 = 1.0,
        save_every: usize = 10,
        mass_tolerance: f64 = 1e-8,
        energy_tolerance: f64 = 1e-3,
    }
);

params!(
    /// Picard iteration on a Gaussian of prescribed `L^2` norm, cross-checked
    /// against the splitting solver.
    PicardParams {
        t_final: f64 = 5.0,
        steps: usize = 100,
        k_max: usize = 12,
        norm: f64 = 0.05,
        width: f64 = 1.0,
        ratio_limit: f64 = 0.5,
    }
);

params!(
    ScatterParams {
        t_final: f64 = 40.0,
        dt: f64 = 0.05,
        amplitude: f64 = 0.3,
        width: f64 = 1.0,
        save_every: usize = 20,
        probes: Vec<f64> = vec![10.0, 20.0, 40.0],
    }
);

params!(
    /// Closed form against brute force for one of the three standard pairs.
    Lemma22Params {
        pair: usize = 0,
        points: usize = 20,
        seed: u64 = 1,
        tolerance: f64 = 0.01,
    }
);

params!(
    /// `lambda_1 = lambda_2` scan at fixed `mu`.
    BilinearParams {
        mu: f64 = 0.25,
        lambdas: Vec<f64> = vec![4.0, 8.0, 16.0, 32.0],
        profile: ProfileName = ProfileName::GaussianBand,
        window_factor: f64 = 1.0,
        slope_tolerance: f64 = 0.1,
    }
);

params!(
    BernsteinParams {
        /// `[mu, lambda1, lambda2]` triples.
        triples: Vec<[f64; 3]> = vec![[1.0, 4.0, 4.0], [2.0, 4.0, 8.0], [4.0, 8.0, 8.0], [1.0, 8.0, 16.0]],
        profile: ProfileName = ProfileName::GaussianBand,
        ratio_limit: f64 = 10.0,
    }
);

params!(
    /// Rescaled family `f_lambda` of a fixed band datum.
    StrichartzParams {
        q: f64 = 4.0,
        r: f64 = 3.0,
        lambdas: Vec<f64> = vec![1.0, 2.0, 4.0, 8.0],
        profile: ProfileName = ProfileName::Bump,
        spread_limit: f64 = 2.0,
    }
);

params!(
    TransferenceParams {
        mu: f64 = 1.0,
        lambda: f64 = 8.0,
        pairs: usize = 50,
        pieces: usize = 4,
        max_radius: f64 = 12.0,
        seed: u64 = 2024,
        factor_limit: f64 = 4.0,
    }
);

params!(
    /// Multi-band atoms built from one random atom per band.
    SumbilParams {
        bands: Vec<f64> = vec![4.0, 8.0],
        trials: usize = 5,
        pieces: usize = 3,
        t_max: f64 = 2.0,
        max_radius: f64 = 12.0,
        seed: u64 = 7,
        ratio_limit: f64 = 10.0,
    }
);

params!(
    IllposedParams {
        lambdas: Vec<f64> = vec![4.0, 8.0, 16.0, 32.0],
        s: f64 = -0.25,
        epsilon: f64 = 0.05,
        datum_slope_tolerance: f64 = 0.03,
        phi_slope_tolerance: f64 = 0.15,
        ratio_slope_tolerance: f64 = 0.1,
        leakage_limit: f64 = 1e-6,
        phase_samples: usize = 20000,
        seed: u64 = 3,
    }
);

params!(
    LocaltimeParams {
        r: f64 = 2.0,
        lambdas: Vec<f64> = vec![2.0, 4.0, 8.0, 16.0],
        eta: f64 = 2f64.powi(-10),
        slope_tolerance: f64 = 0.2,
    }
);

params!(
    /// Randomized invariants of the transform, the multipliers and the
    /// Littlewood-Paley pieces.
    SelftestParams {
        seed: u64 = 5,
        samples: usize = 8,
        tolerance: f64 = 1e-10,
    }
);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileName {
    Bump,
    GaussianBand,
}

impl From<ProfileName> for hartree_core::estimates::BandProfile {
    fn from(p: ProfileName) -> Self {
        match p {
            ProfileName::Bump => Self::Bump,
            ProfileName::GaussianBand => Self::GaussianBand,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Evolve(EvolveParams),
    Picard(PicardParams),
    Scatter(ScatterParams),
    Lemma22(Lemma22Params),
    Bilinear(BilinearParams),
    Bernstein(BernsteinParams),
    Strichartz(StrichartzParams),
    Transference(TransferenceParams),
    Sumbil(SumbilParams),
    Illposed(IllposedParams),
    Localtime(LocaltimeParams),
    Selftest(SelftestParams),
}

/// A fully resolved run description.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub output: PathBuf,
    pub model: ModelSpec,
    pub grid: GridSpec,
    pub params: Params,
}

#[derive(Deserialize)]
struct Head {
    experiment: ExperimentKind,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document<P> {
    #[allow(dead_code)]
    experiment: ExperimentKind,
    output: Option<PathBuf>,
    #[serde(default)]
    model: ModelSpec,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    params: P,
}

fn typed<P: DeserializeOwned + Default>(text: &str, wrap: fn(P) -> Params) -> Result<(Document<()>, Params), CliError> {
    let doc: Document<P> = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let params = wrap(doc.params);
    let head = Document { experiment: doc.experiment, output: doc.output, model: doc.model, grid: doc.grid, params: () };
    Ok((head, params))
}

impl RunConfig {
    /// Parses and validates a config document.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let head: Head = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let kind = head.experiment;
        let (doc, params) = match kind {
            ExperimentKind::Evolve => typed(text, Params::Evolve),
            ExperimentKind::Picard => typed(text, Params::Picard),
            ExperimentKind::Scatter => typed(text, Params::Scatter),
            ExperimentKind::Lemma22 => typed(text, Params::Lemma22),
            ExperimentKind::Bilinear => typed(text, Params::Bilinear),
            ExperimentKind::Bernstein => typed(text, Params::Bernstein),
            ExperimentKind::Strichartz => typed(text, Params::Strichartz),
            ExperimentKind::Transference => typed(text, Params::Transference),
            ExperimentKind::Sumbil => typed(text, Params::Sumbil),
            ExperimentKind::Illposed => typed(text, Params::Illposed),
            ExperimentKind::Localtime => typed(text, Params::Localtime),
            ExperimentKind::Selftest => typed(text, Params::Selftest),
        }?;
        let fallback = kind.default_grid();
        let config = RunConfig {
            experiment: kind,
            output: doc.output.unwrap_or_else(|| PathBuf::from("runs").join(kind.name())),
            model: doc.model,
            grid: GridSpec { n: doc.grid.n.unwrap_or(fallback.n), r_max: doc.grid.r_max.unwrap_or(fallback.r_max) },
            params,
        };
        config.validate().map_err(|(key, msg)| CliError::Config(locate(text, key, &msg)))?;
        Ok(config)
    }

    pub fn model_params(&self) -> ModelParams {
        self.checked_model().expect("validated")
    }

    /// Time-stepping experiments need `1 < alpha <= 2`; the estimate
    /// experiments also accept `alpha = 1`.
    fn checked_model(&self) -> hartree_core::Result<ModelParams> {
        let ModelSpec { alpha, sigma } = self.model;
        if self.experiment.evolves() {
            ModelParams::new(alpha, sigma)
        } else {
            ModelParams::for_estimates(alpha, sigma)
        }
    }

    pub fn radial_grid(&self) -> RadialGrid {
        RadialGrid::new(self.grid.n, self.grid.r_max).expect("validated")
    }

    fn validate(&self) -> Result<(), (&'static str, String)> {
        self.checked_model().map_err(|e| ("alpha", e.to_string()))?;
        RadialGrid::new(self.grid.n, self.grid.r_max).map_err(|e| ("n", e.to_string()))?;
        match &self.params {
            Params::Evolve(p) => {
                positive("t_final", p.t_final)?;
                positive("dt", p.dt)?;
                positive("width", p.width)?;
                nonzero("save_every", p.save_every)
            }
            Params::Picard(p) => {
                positive("t_final", p.t_final)?;
                positive("width", p.width)?;
                nonzero("steps", p.steps)?;
                nonzero("k_max", p.k_max)
            }
            Params::Scatter(p) => {
                positive("t_final", p.t_final)?;
                positive("dt", p.dt)?;
                positive("width", p.width)?;
                nonzero("save_every", p.save_every)?;
                if p.probes.len() < 2 {
                    return Err(("probes", "need at least two probe times".into()));
                }
                let stride = p.dt * p.save_every as f64;
                for &t in &p.probes {
                    let k = t / stride;
                    if !(t > 0.0 && t <= p.t_final && (k - k.round()).abs() < 1e-9) {
                        return Err(("probes", format!("{t} is not a stored time (multiples of dt * save_every = {stride} up to t_final)")));
                    }
                }
                Ok(())
            }
            Params::Lemma22(p) => {
                if p.pair > 2 {
                    return Err(("pair", format!("{} is not one of the standard pairs 0, 1, 2", p.pair)));
                }
                nonzero("points", p.points)
            }
            Params::Bilinear(p) => {
                dyadic("mu", &[p.mu])?;
                dyadic("lambdas", &p.lambdas)?;
                positive("window_factor", p.window_factor)?;
                if p.lambdas.len() < 2 {
                    return Err(("lambdas", "need at least two scales for a slope".into()));
                }
                Ok(())
            }
            Params::Bernstein(p) => {
                nonzero("triples", p.triples.len())?;
                p.triples.iter().try_for_each(|t| dyadic("triples", t))
            }
            Params::Strichartz(p) => {
                if !hartree_core::estimates::is_admissible(p.q, p.r) {
                    return Err(("q", format!("(q, r) = ({}, {}) is not admissible", p.q, p.r)));
                }
                nonzero("lambdas", p.lambdas.len())?;
                p.lambdas.iter().try_for_each(|&l| positive("lambdas", l))
            }
            Params::Transference(p) => {
                dyadic("mu", &[p.mu])?;
                dyadic("lambda", &[p.lambda])?;
                nonzero("pieces", p.pieces)?;
                positive("max_radius", p.max_radius)
            }
            Params::Sumbil(p) => {
                dyadic("bands", &p.bands)?;
                nonzero("bands", p.bands.len())?;
                nonzero("pieces", p.pieces)?;
                nonzero("trials", p.trials)?;
                positive("t_max", p.t_max)
            }
            Params::Illposed(p) => {
                if p.lambdas.len() < 3 || p.lambdas.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(("lambdas", "need at least three increasing scales".into()));
                }
                positive("epsilon", p.epsilon)
            }
            Params::Localtime(p) => {
                positive("r", p.r)?;
                dyadic("lambdas", &p.lambdas)?;
                if p.lambdas.len() < 2 {
                    return Err(("lambdas", "need at least two scales for a slope".into()));
                }
                Ok(())
            }
            Params::Selftest(p) => nonzero("samples", p.samples),
        }
    }
}

fn positive(key: &'static str, v: f64) -> Result<(), (&'static str, String)> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err((key, format!("must be positive and finite, got {v}")))
    }
}

fn nonzero(key: &'static str, v: usize) -> Result<(), (&'static str, String)> {
    if v > 0 {
        Ok(())
    } else {
        Err((key, "must be at least 1".into()))
    }
}

fn dyadic(key: &'static str, values: &[f64]) -> Result<(), (&'static str, String)> {
    match values.iter().find(|&&v| DyadicIndex::from_value(v).is_none()) {
        Some(v) => Err((key, format!("{v} is not a power of two"))),
        None => Ok(()),
    }
}

/// Prefixes `msg` with the line where `key` is assigned, if it appears.
fn locate(text: &str, key: &str, msg: &str) -> String {
    let line = text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    });
    match line {
        Some(i) => format!("config error at line {}: `{key}` {msg}", i + 1),
        None => format!("config error: `{key}` {msg} (default value)"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_resolves_defaults() {
        let c = RunConfig::parse("experiment = \"illposed\"\n").unwrap();
        assert_eq!(c.grid, GridSpec { n: 4096, r_max: 64.0 });
        assert_eq!(c.params, Params::Illposed(IllposedParams::default()));
        assert_eq!(c.output, PathBuf::from("runs/illposed"));
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let e = RunConfig::parse("experiment = \"evolve\"\n[params]\ndt = 0.1\nfoo = 1\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("line 4") && msg.contains("foo"), "{msg}");
        let e = RunConfig::parse("experiment = \"evolve\"\nbar = 2\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn params_of_another_experiment_are_rejected() {
        assert!(RunConfig::parse("experiment = \"picard\"\n[params]\nsave_every = 3\n").is_err());
    }

    #[test]
    fn semantic_errors_point_at_the_key() {
        let e = RunConfig::parse("experiment = \"bilinear\"\n\n[params]\nlambdas = [4.0, 6.0]\n").unwrap_err();
        assert!(e.to_string().contains("line 4"), "{e}");
        let e = RunConfig::parse("experiment = \"evolve\"\n[grid]\nn = 1000\n").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }

    #[test]
    fn every_experiment_parses_with_defaults() {
        for k in ExperimentKind::ALL {
            let c = RunConfig::parse(&format!("experiment = \"{k}\"\n")).unwrap();
            assert_eq!(c.experiment, k);
        }
    }
}
