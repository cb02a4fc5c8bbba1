//! The run configuration: a versioned JSON schema aggregating everything a
//! full experiment needs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{LineGraph, DEFAULT_PATTERN_CAP};
use crate::observables::{stokes_to_density, StokesVector};
use crate::qmath::{CoinDensityMatrix, ComplexMatrix, DensityMatrix};
use crate::realistic::{ParameterRanges, RealisticParameters};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ideal,
    Realistic,
    Errorbars,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Mode::Ideal),
            "realistic" => Ok(Mode::Realistic),
            "errorbars" => Ok(Mode::Errorbars),
            other => Err(Error::Config(format!(
                "unknown mode {other:?}; expected ideal, realistic or errorbars"
            ))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Ideal => "ideal",
            Mode::Realistic => "realistic",
            Mode::Errorbars => "errorbars",
        })
    }
}

/// Initial coin state: a basis label or a Bloch vector (components ordered
/// as the Stokes convention: H/V, R/L, D/A).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoinSpec {
    Label(String),
    Bloch { bloch: [f64; 3] },
}

impl CoinSpec {
    pub fn to_density(&self) -> Result<CoinDensityMatrix> {
        let bloch = match self {
            CoinSpec::Label(label) => match label.as_str() {
                "H" => [1.0, 0.0, 0.0],
                "V" => [-1.0, 0.0, 0.0],
                "R" => [0.0, 1.0, 0.0],
                "L" => [0.0, -1.0, 0.0],
                "D" => [0.0, 0.0, 1.0],
                "A" => [0.0, 0.0, -1.0],
                other => {
                    return Err(Error::Config(format!(
                        "unknown coin label {other:?}; expected one of H, V, D, A, R, L"
                    )))
                }
            },
            CoinSpec::Bloch { bloch } => {
                let norm = bloch.iter().map(|b| b * b).sum::<f64>().sqrt();
                if norm > 1.0 + 1e-9 {
                    return Err(Error::Config(format!(
                        "coin Bloch vector has norm {norm}, outside the unit ball"
                    )));
                }
                *bloch
            }
        };
        let (sigma, _) = stokes_to_density(&StokesVector {
            s0: 1.0,
            s1: bloch[0],
            s2: bloch[1],
            s3: bloch[2],
        })?;
        Ok(sigma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    /// Vertex label (0 is the graph center).
    #[serde(default)]
    pub position: i64,
    pub coin: CoinSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub distributions: String,
    pub stokes: String,
    pub distance: String,
    pub metadata: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("pqw-out"),
            distributions: "distributions.csv".into(),
            stokes: "stokes.csv".into(),
            distance: "distance.csv".into(),
            metadata: "metadata.json".into(),
        }
    }
}

fn default_draws() -> usize {
    1000
}

fn default_cap() -> usize {
    DEFAULT_PATTERN_CAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub vertices: usize,
    pub steps: usize,
    pub link_probability: f64,
    /// `true` selects the restricted configuration set (single-link graphs
    /// only), `false` the full set.
    pub restricted: bool,
    pub hwp_angle_degrees: f64,
    pub initial: InitialState,
    pub mode: Mode,
    pub seed: u64,
    #[serde(default)]
    pub realistic: Option<RealisticParameters>,
    #[serde(default)]
    pub parameter_ranges: Option<ParameterRanges>,
    #[serde(default = "default_draws")]
    pub monte_carlo_draws: usize,
    #[serde(default = "default_cap")]
    pub pattern_cap: usize,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    /// Parses and validates a config from JSON text. Parse failures carry
    /// the line and column of the offending token.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.vertices == 0 {
            return Err(Error::Config("vertices must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.link_probability) {
            return Err(Error::Config(format!(
                "link_probability {} not in [0, 1]",
                self.link_probability
            )));
        }
        if self.restricted && self.vertices != 3 {
            return Err(Error::Config(format!(
                "the restricted configuration set is defined for 3 vertices, got {}",
                self.vertices
            )));
        }
        let graph = self.graph()?;
        if graph.index_of_label(self.initial.position).is_none() {
            return Err(Error::Config(format!(
                "initial position {} is outside the vertex labels {:?}",
                self.initial.position,
                graph.labels()
            )));
        }
        self.initial.coin.to_density()?;
        if matches!(self.mode, Mode::Realistic | Mode::Errorbars) {
            let params = self
                .realistic
                .ok_or_else(|| Error::Config(format!("{} mode needs realistic parameters", self.mode)))?;
            params.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.mode == Mode::Errorbars {
            let ranges = self.parameter_ranges.ok_or_else(|| {
                Error::Config("errorbars mode needs parameter_ranges".into())
            })?;
            ranges.validate().map_err(|e| Error::Config(e.to_string()))?;
            if self.monte_carlo_draws < 2 {
                return Err(Error::Config("monte_carlo_draws must be at least 2".into()));
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> Result<LineGraph> {
        LineGraph::new(self.vertices).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn configuration_set(&self) -> Result<crate::graph::ConfigurationSet> {
        let graph = self.graph()?;
        if self.restricted {
            crate::graph::restricted_set(graph, self.link_probability)
        } else {
            crate::graph::full_set(graph, self.link_probability)
        }
    }

    /// ρ(0) = |position⟩⟨position| ⊗ σ_coin on the joint basis.
    pub fn initial_walker(&self) -> Result<DensityMatrix> {
        let graph = self.graph()?;
        let pos = graph
            .index_of_label(self.initial.position)
            .ok_or_else(|| Error::Config("initial position outside the graph".into()))?;
        let sigma = self.initial.coin.to_density()?;
        let dim = 2 * graph.num_vertices();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for c1 in 0..2 {
            for c2 in 0..2 {
                m.set(pos * 2 + c1, pos * 2 + c2, sigma.get(c1, c2));
            }
        }
        DensityMatrix::from_matrix(m)
    }

    /// Parameters the realistic curve uses: the configured ones, or the
    /// scan-range midpoint in errorbars mode when none are given.
    pub fn effective_realistic(&self) -> RealisticParameters {
        self.realistic
            .or_else(|| self.parameter_ranges.map(|r| r.midpoint()))
            .unwrap_or_else(RealisticParameters::ideal)
    }

    /// The paper's experiment: three vertices, six steps, restricted set at
    /// p = 1/2, Hadamard coin, |H⟩ at the center.
    pub fn paper_defaults() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            vertices: 3,
            steps: 6,
            link_probability: 0.5,
            restricted: true,
            hwp_angle_degrees: 22.5,
            initial: InitialState { position: 0, coin: CoinSpec::Label("H".into()) },
            mode: Mode::Ideal,
            seed: 1,
            realistic: None,
            parameter_ranges: None,
            monte_carlo_draws: default_draws(),
            pattern_cap: default_cap(),
            output: OutputConfig::default(),
        }
    }
}
