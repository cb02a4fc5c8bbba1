//! Drives full experiments from a [`RunConfig`] and emits machine-readable
//! results: per-pattern position distributions, per-step Stokes parameters,
//! and the distance curve with optional Monte Carlo error bars.
//!
//! All numeric output uses 12 significant digits, so identical configs and
//! seeds produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use crate::config::{Mode, RunConfig};
use crate::dynamics::rum_evolution;
use crate::error::{Error, Result};
use crate::graph::{pattern_by_index, pattern_count, Pattern};
use crate::observables::{position_distribution, stokes, StokesVector};
use crate::qmath::{hs_distance_sq, CoinDensityMatrix, DensityMatrix};
use crate::realistic::{
    detector_readout, monte_carlo_errorbars, realistic_evolution, realistic_step_operator,
    RealisticParameters, ScanObservable,
};

/// Averaged per-step curves of one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub labels: Vec<i64>,
    pub stokes: Vec<StokesVector>,
    pub distances: Vec<f64>,
    /// Averaged position distribution per step.
    pub positions: Vec<Vec<f64>>,
    /// Mean-absolute-deviation error bars for (s1, s2, s3), errorbars mode.
    pub stokes_errorbars: Option<[Vec<f64>; 3]>,
    /// Error bars for the distance curve, errorbars mode.
    pub distance_errorbars: Option<Vec<f64>>,
}

/// Computes the averaged curves for a validated config without touching
/// the filesystem.
pub fn execute(config: &RunConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let set = config.configuration_set()?;
    let coin = crate::dynamics::coin_operator(config.hwp_angle_degrees);
    let initial = config.initial_walker()?;
    let labels = config.graph()?.labels();
    let mixed = CoinDensityMatrix::maximally_mixed();

    match config.mode {
        Mode::Ideal => {
            let states = rum_evolution(&initial, &set, &coin, config.steps)?;
            let mut result = ExperimentResult {
                labels,
                stokes: Vec::new(),
                distances: Vec::new(),
                positions: Vec::new(),
                stokes_errorbars: None,
                distance_errorbars: None,
            };
            for rho in &states {
                let sigma = rho.partial_trace_position()?;
                result.stokes.push(stokes(&sigma));
                result
                    .distances
                    .push(hs_distance_sq(sigma.as_density(), mixed.as_density())?);
                result.positions.push(position_distribution(rho)?.probabilities().to_vec());
            }
            Ok(result)
        }
        Mode::Realistic | Mode::Errorbars => {
            let params = config.effective_realistic();
            let run = realistic_evolution(
                &initial,
                &set,
                &coin,
                &params,
                config.steps,
                config.pattern_cap,
            )?;
            let (stokes_errorbars, distance_errorbars) = if config.mode == Mode::Errorbars {
                let ranges = config.parameter_ranges.expect("validated");
                let scan = |observable| {
                    monte_carlo_errorbars(
                        &initial,
                        &set,
                        &coin,
                        &ranges,
                        config.steps,
                        config.monte_carlo_draws,
                        config.seed,
                        observable,
                        config.pattern_cap,
                    )
                };
                (
                    Some([
                        scan(ScanObservable::StokesS1)?,
                        scan(ScanObservable::StokesS2)?,
                        scan(ScanObservable::StokesS3)?,
                    ]),
                    Some(scan(ScanObservable::HsDistance)?),
                )
            } else {
                (None, None)
            };
            Ok(ExperimentResult {
                labels,
                stokes: run.observables.iter().map(|o| o.stokes).collect(),
                distances: run.observables.iter().map(|o| o.hs_distance_to_mixed).collect(),
                positions: run
                    .observables
                    .iter()
                    .map(|o| o.positions.probabilities().to_vec())
                    .collect(),
                stokes_errorbars,
                distance_errorbars,
            })
        }
    }
}

/// What `run` wrote and how big the enumeration was.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub patterns: u128,
    pub steps: usize,
}

fn fmt(value: f64) -> String {
    format!("{value:.11e}")
}

/// Runs the configured experiment and writes the result files.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let result = execute(config)?;
    let set = config.configuration_set()?;
    let coin = crate::dynamics::coin_operator(config.hwp_angle_degrees);
    let initial = config.initial_walker()?;

    let total = pattern_count(&set, config.steps).unwrap_or(u128::MAX);
    if total > config.pattern_cap as u128 {
        return Err(Error::PatternCapExceeded { total, cap: config.pattern_cap });
    }

    let dir = &config.output.directory;
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();

    // per-pattern position distributions, one row per (pattern, step)
    let params = match config.mode {
        Mode::Ideal => RealisticParameters::ideal(),
        _ => config.effective_realistic(),
    };
    let path = dir.join(&config.output.distributions);
    let mut out = BufWriter::new(File::create(&path)?);
    write!(out, "pattern_index,pattern,step")?;
    for label in &result.labels {
        write!(out, ",p_{label}")?;
    }
    writeln!(out)?;
    for index in 0..total {
        let (pattern, _) = pattern_by_index(&set, config.steps, index);
        let rows = pattern_distribution_rows(set.graph(), &initial, &pattern, &coin, &params)?;
        for (step, probs) in rows.iter().enumerate() {
            write!(out, "{index},{},{step}", pattern.display_string())?;
            for p in probs {
                write!(out, ",{}", fmt(*p))?;
            }
            writeln!(out)?;
        }
    }
    out.flush()?;
    files.push(path);

    // per-step Stokes parameters of the averaged coin state
    let path = dir.join(&config.output.stokes);
    let mut out = BufWriter::new(File::create(&path)?);
    if let Some(bars) = &result.stokes_errorbars {
        writeln!(out, "step,s0,s1,s2,s3,err_s1,err_s2,err_s3")?;
        for (step, s) in result.stokes.iter().enumerate() {
            writeln!(
                out,
                "{step},{},{},{},{},{},{},{}",
                fmt(s.s0),
                fmt(s.s1),
                fmt(s.s2),
                fmt(s.s3),
                fmt(bars[0][step]),
                fmt(bars[1][step]),
                fmt(bars[2][step]),
            )?;
        }
    } else {
        writeln!(out, "step,s0,s1,s2,s3")?;
        for (step, s) in result.stokes.iter().enumerate() {
            writeln!(out, "{step},{},{},{},{}", fmt(s.s0), fmt(s.s1), fmt(s.s2), fmt(s.s3))?;
        }
    }
    out.flush()?;
    files.push(path);

    // per-step Hilbert-Schmidt distance from the asymptotic state
    let path = dir.join(&config.output.distance);
    let mut out = BufWriter::new(File::create(&path)?);
    if let Some(bars) = &result.distance_errorbars {
        writeln!(out, "step,hs_distance_sq,errorbar")?;
        for (step, d) in result.distances.iter().enumerate() {
            writeln!(out, "{step},{},{}", fmt(*d), fmt(bars[step]))?;
        }
    } else {
        writeln!(out, "step,hs_distance_sq")?;
        for (step, d) in result.distances.iter().enumerate() {
            writeln!(out, "{step},{}", fmt(*d))?;
        }
    }
    out.flush()?;
    files.push(path);

    // metadata sidecar: config echo, code version, seed
    let path = dir.join(&config.output.metadata);
    let metadata = serde_json::json!({
        "schema_version": crate::config::SCHEMA_VERSION,
        "code_version": env!("CARGO_PKG_VERSION"),
        "mode": config.mode.to_string(),
        "seed": config.seed,
        "patterns": total.to_string(),
        "config": config,
        "outputs": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
    });
    std::fs::write(&path, serde_json::to_string_pretty(&metadata)? + "\n")?;
    files.push(path);

    Ok(RunSummary { files, patterns: total, steps: config.steps })
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

/// Renormalized position distribution of one pattern at every step.
///
/// Ideal parameters make this the plain unitary pattern evolution; lossy
/// parameters reproduce what the detectors report for that pattern.
fn pattern_distribution_rows(
    graph: crate::graph::LineGraph,
    initial: &DensityMatrix,
    pattern: &Pattern,
    coin: &crate::dynamics::CoinOperator,
    params: &RealisticParameters,
) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::with_capacity(pattern.len() + 1);
    let mut state = initial.clone();
    for step in 0..=pattern.len() {
        let detected = detector_readout(&state, params, step)?;
        rows.push(position_distribution(&detected)?.probabilities().to_vec());
        if step < pattern.len() {
            let op = realistic_step_operator(graph, &pattern.steps()[step], coin, params)?;
            state = state.conjugate_by(&op)?;
        }
    }
    Ok(rows)
}

/// Prints the pattern table: index, per-step edge strings, probability.
pub fn list_patterns(config: &RunConfig, out: &mut impl Write) -> Result<()> {
    config.validate()?;
    let set = config.configuration_set()?;
    let total = pattern_count(&set, config.steps).unwrap_or(u128::MAX);
    if total > config.pattern_cap as u128 {
        return Err(Error::PatternCapExceeded { total, cap: config.pattern_cap });
    }
    writeln!(out, "index\tpattern\tprobability")?;
    for index in 0..total {
        let (pattern, probability) = pattern_by_index(&set, config.steps, index);
        writeln!(out, "{index}\t{}\t{}", pattern.display_string(), fmt(probability))?;
    }
    Ok(())
}
