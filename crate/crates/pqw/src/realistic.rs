//! The realistic model: four systematic error sources layered on the ideal
//! dynamics, plus Monte Carlo error bars.
//!
//! Losses are coherence-preserving amplitude attenuations (diagonal
//! non-unitary scalings), not decoherence channels. Reported observables are
//! renormalized per pattern before the probability-weighted average, which
//! mirrors per-pattern tomography and is what makes the step-1 error bars
//! vanish identically for a symmetric input. The returned state sequence
//! stays subnormalized.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::ConfigurationSet;
use crate::dynamics::{coin_operator, coin_on_walker, shift_kappa_with_reflection_amplitude, CoinOperator};
use crate::observables::{position_distribution, stokes, PositionDistribution, StokesVector};
use crate::qmath::{
    hs_distance_sq, CoinDensityMatrix, ComplexMatrix, DensityMatrix, C_ZERO,
};

/// Systematic-error parameters. All transmissions and efficiencies are
/// fractional (power) values; amplitudes are scaled by their square roots.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RealisticParameters {
    /// Transmission of loop path A per round trip (relative factor).
    pub path_loss_a: f64,
    /// Transmission of loop path B per round trip (relative factor).
    pub path_loss_b: f64,
    pub detector_eff_h: f64,
    pub detector_eff_v: f64,
    /// Transmission through the switched EOM, applied to reflection events.
    pub eom_transmission: f64,
    /// Misalignment of the coin plate, degrees.
    pub hwp_angle_offset: f64,
    /// Multiplier on the H-detector efficiency at the step-1 readout,
    /// capturing the power-dependent efficiency mismatch left by a global
    /// correction factor.
    pub first_step_efficiency_correction: f64,
}

impl Default for RealisticParameters {
    fn default() -> Self {
        Self::ideal()
    }
}

impl RealisticParameters {
    /// The error-free limit: unit transmissions and efficiencies, no offset.
    pub fn ideal() -> Self {
        Self {
            path_loss_a: 1.0,
            path_loss_b: 1.0,
            detector_eff_h: 1.0,
            detector_eff_v: 1.0,
            eom_transmission: 1.0,
            hwp_angle_offset: 0.0,
            first_step_efficiency_correction: 1.0,
        }
    }

    /// Full device-spec check for user-supplied parameters: everything in
    /// (0, 1], EOM transmission above 98%, coin offset within the ±0.2°
    /// setting precision.
    pub fn validate(&self) -> Result<()> {
        self.validate_physical()?;
        if !(self.eom_transmission > 0.98) {
            return Err(Error::InvalidArgument(format!(
                "eom_transmission = {} must lie in (0.98, 1]",
                self.eom_transmission
            )));
        }
        if self.hwp_angle_offset.abs() > 0.2 {
            return Err(Error::InvalidArgument(format!(
                "hwp_angle_offset = {} exceeds the declared ±0.2° precision",
                self.hwp_angle_offset
            )));
        }
        Ok(())
    }

    /// The preconditions the evolution itself needs. Scan machinery uses
    /// this weaker check so range endpoints (e.g. EOM transmission exactly
    /// 0.98) stay evaluable.
    fn validate_physical(&self) -> Result<()> {
        let fraction = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} = {v} must lie in (0, 1]")))
            }
        };
        fraction("path_loss_a", self.path_loss_a)?;
        fraction("path_loss_b", self.path_loss_b)?;
        fraction("detector_eff_h", self.detector_eff_h)?;
        fraction("detector_eff_v", self.detector_eff_v)?;
        fraction("eom_transmission", self.eom_transmission)?;
        if !self.hwp_angle_offset.is_finite() {
            return Err(Error::InvalidArgument("hwp_angle_offset must be finite".into()));
        }
        if self.first_step_efficiency_correction <= 0.0 {
            return Err(Error::InvalidArgument(
                "first_step_efficiency_correction must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-field low/high bounds for the Monte Carlo parameter scan.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterRanges {
    pub path_loss_a: (f64, f64),
    pub path_loss_b: (f64, f64),
    pub detector_eff_h: (f64, f64),
    pub detector_eff_v: (f64, f64),
    pub eom_transmission: (f64, f64),
    pub hwp_angle_offset: (f64, f64),
    pub first_step_efficiency_correction: (f64, f64),
}

impl ParameterRanges {
    /// Degenerate ranges pinned at one parameter point.
    pub fn degenerate(params: &RealisticParameters) -> Self {
        Self {
            path_loss_a: (params.path_loss_a, params.path_loss_a),
            path_loss_b: (params.path_loss_b, params.path_loss_b),
            detector_eff_h: (params.detector_eff_h, params.detector_eff_h),
            detector_eff_v: (params.detector_eff_v, params.detector_eff_v),
            eom_transmission: (params.eom_transmission, params.eom_transmission),
            hwp_angle_offset: (params.hwp_angle_offset, params.hwp_angle_offset),
            first_step_efficiency_correction: (
                params.first_step_efficiency_correction,
                params.first_step_efficiency_correction,
            ),
        }
    }

    /// The ranges suggested by the independent measurements: ±2% path
    /// asymmetry, EOM transmission above 98%, coin angle within ±0.2°.
    /// Detector efficiencies were measured separately and are not scanned.
    pub fn paper() -> Self {
        Self {
            path_loss_a: (0.98, 1.0),
            path_loss_b: (0.98, 1.0),
            detector_eff_h: (0.65, 0.65),
            detector_eff_v: (0.65, 0.65),
            eom_transmission: (0.98, 1.0),
            hwp_angle_offset: (-0.2, 0.2),
            first_step_efficiency_correction: (1.0, 1.0),
        }
    }

    fn fields(&self) -> [(&'static str, (f64, f64)); 7] {
        [
            ("path_loss_a", self.path_loss_a),
            ("path_loss_b", self.path_loss_b),
            ("detector_eff_h", self.detector_eff_h),
            ("detector_eff_v", self.detector_eff_v),
            ("eom_transmission", self.eom_transmission),
            ("hwp_angle_offset", self.hwp_angle_offset),
            ("first_step_efficiency_correction", self.first_step_efficiency_correction),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, (low, high)) in self.fields() {
            if !(low <= high) {
                return Err(Error::InvalidArgument(format!(
                    "{name} range ({low}, {high}) has low > high"
                )));
            }
        }
        Ok(())
    }

    pub fn midpoint(&self) -> RealisticParameters {
        let u = [0.5; 7];
        self.sample(&u)
    }

    /// Maps unit draws to parameter values, `low + u * (high - low)` per
    /// field in declaration order. Shrinking ranges therefore contracts the
    /// sampled points continuously for fixed draws.
    pub fn sample(&self, u: &[f64; 7]) -> RealisticParameters {
        let f = self.fields();
        let at = |i: usize| f[i].1 .0 + u[i] * (f[i].1 .1 - f[i].1 .0);
        RealisticParameters {
            path_loss_a: at(0),
            path_loss_b: at(1),
            detector_eff_h: at(2),
            detector_eff_v: at(3),
            eom_transmission: at(4),
            hwp_angle_offset: at(5),
            first_step_efficiency_correction: at(6),
        }
    }
}

/// Renormalized readout quantities of one evolution step.
#[derive(Debug, Clone)]
pub struct StepObservables {
    pub coin: CoinDensityMatrix,
    pub stokes: StokesVector,
    pub positions: PositionDistribution,
    /// Squared Hilbert-Schmidt distance of the coin state from I/2.
    pub hs_distance_to_mixed: f64,
}

/// Result of a realistic run: raw subnormalized channel states plus the
/// renormalized per-step observables.
#[derive(Debug, Clone)]
pub struct RealisticEvolution {
    pub states: Vec<DensityMatrix>,
    pub observables: Vec<StepObservables>,
}

/// Scales the coin components of a density matrix by the detector
/// efficiencies (amplitude factors √eff) and renormalizes.
///
/// Works for the 2x2 coin state and for the full walker state alike; the
/// coin index is the fast index of the joint basis. Factors must be
/// positive but may exceed 1 so the scaling can be inverted analytically.
pub fn apply_detection_efficiency(
    rho: &DensityMatrix,
    eff_h: f64,
    eff_v: f64,
) -> Result<DensityMatrix> {
    if eff_h <= 0.0 || eff_v <= 0.0 {
        return Err(Error::InvalidArgument("detection efficiencies must be positive".into()));
    }
    scale_by_detection(rho, eff_h, eff_v)?.renormalized("detection-efficiency correction")
}

fn scale_by_detection(rho: &DensityMatrix, eff_h: f64, eff_v: f64) -> Result<DensityMatrix> {
    let dim = rho.dim();
    if dim % 2 != 0 {
        return Err(Error::DimensionMismatch(format!("walker dimension {dim} is not even")));
    }
    let amp = [eff_h.sqrt(), eff_v.sqrt()];
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let v = rho.matrix().get(i, j);
            if v != C_ZERO {
                m.set(i, j, v * amp[i % 2] * amp[j % 2]);
            }
        }
    }
    DensityMatrix::from_matrix(m)
}

/// The non-unitary step operator of the realistic model for one
/// configuration: path losses on the amplitudes, the offset coin, and the
/// shift with the EOM amplitude transmission on reflection events.
pub fn realistic_step_operator(
    graph: crate::graph::LineGraph,
    kappa: &crate::graph::GraphConfiguration,
    coin: &CoinOperator,
    params: &RealisticParameters,
) -> Result<ComplexMatrix> {
    let offset_coin = coin_operator(coin.hwp_angle_degrees() + params.hwp_angle_offset);
    let shift =
        shift_kappa_with_reflection_amplitude(graph, kappa, params.eom_transmission.sqrt())?;
    let path_amplitude = (params.path_loss_a * params.path_loss_b).sqrt();
    Ok(shift
        .matmul(&coin_on_walker(graph, &offset_coin))?
        .scale(num_complex::Complex64::from(path_amplitude)))
}

/// Applies the detector efficiencies to a walker state at readout and
/// renormalizes. The step-1 readout additionally applies the first-step
/// correction to the H arm.
pub fn detector_readout(
    rho: &DensityMatrix,
    params: &RealisticParameters,
    step: usize,
) -> Result<DensityMatrix> {
    let eff_h = params.detector_eff_h
        * if step == 1 { params.first_step_efficiency_correction } else { 1.0 };
    scale_by_detection(rho, eff_h, params.detector_eff_v)?
        .renormalized(&format!("step {step}"))
}

/// Evolves under the four-error realistic model.
///
/// Per step, each pattern branch receives the offset coin, the path-A
/// amplitude loss, the shift with the EOM amplitude transmission on every
/// reflection event, and the path-B loss. At each readout the detector
/// efficiencies scale the coin components (the step-1 readout additionally
/// applies the first-step correction to the H arm), each branch is
/// renormalized, and branches are averaged with their pattern
/// probabilities.
pub fn realistic_evolution(
    initial: &DensityMatrix,
    set: &ConfigurationSet,
    coin: &CoinOperator,
    params: &RealisticParameters,
    n: usize,
    cap: usize,
) -> Result<RealisticEvolution> {
    params.validate_physical()?;
    let graph = set.graph();
    let dim = 2 * graph.num_vertices();
    if initial.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} does not match walker dimension {dim}",
            initial.dim()
        )));
    }

    let kraus: Vec<(ComplexMatrix, f64)> = set
        .iter()
        .map(|(kappa, w)| Ok((realistic_step_operator(graph, kappa, coin, params)?, *w)))
        .collect::<Result<_>>()?;

    let mut branches: Vec<(DensityMatrix, f64)> = vec![(initial.clone(), 1.0)];
    let mut states = Vec::with_capacity(n + 1);
    let mut observables = Vec::with_capacity(n + 1);

    for step in 0..=n {
        let mut sigma_acc = ComplexMatrix::zeros(2, 2);
        let mut pos_acc = vec![0.0; graph.num_vertices()];
        let mut state_acc = ComplexMatrix::zeros(dim, dim);
        for (rho, weight) in &branches {
            state_acc.add_scaled_assign(*weight, rho.matrix());
            let detected = detector_readout(rho, params, step)?;
            let sigma = detected.partial_trace_position()?;
            sigma_acc.add_scaled_assign(*weight, sigma.as_density().matrix());
            for (acc, p) in
                pos_acc.iter_mut().zip(position_distribution(&detected)?.probabilities())
            {
                *acc += weight * p;
            }
        }

        let coin_state = CoinDensityMatrix::from_matrix(sigma_acc)?;
        let distance = hs_distance_sq(
            coin_state.as_density(),
            CoinDensityMatrix::maximally_mixed().as_density(),
        )?;
        observables.push(StepObservables {
            stokes: stokes(&coin_state),
            positions: PositionDistribution::new(graph.labels(), pos_acc)?,
            hs_distance_to_mixed: distance,
            coin: coin_state,
        });
        states.push(DensityMatrix::from_matrix(state_acc)?);

        if step < n {
            if branches.len().saturating_mul(set.len()) > cap {
                return Err(Error::PatternCapExceeded {
                    total: crate::graph::pattern_count(set, n).unwrap_or(u128::MAX),
                    cap,
                });
            }
            branches = branches
                .iter()
                .flat_map(|(rho, weight)| {
                    kraus.iter().map(move |(k, w)| {
                        Ok((rho.conjugate_by(k)?, weight * w))
                    })
                })
                .collect::<Result<_>>()?;
        }
    }

    Ok(RealisticEvolution { states, observables })
}

/// Which per-step scalar the Monte Carlo scan tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanObservable {
    StokesS1,
    StokesS2,
    StokesS3,
    HsDistance,
}

impl ScanObservable {
    fn extract(&self, step: &StepObservables) -> f64 {
        match self {
            ScanObservable::StokesS1 => step.stokes.s1,
            ScanObservable::StokesS2 => step.stokes.s2,
            ScanObservable::StokesS3 => step.stokes.s3,
            ScanObservable::HsDistance => step.hs_distance_to_mixed,
        }
    }
}

/// Per-step mean absolute deviation of `observable` across uniform parameter
/// draws within `ranges`.
///
/// Draw i uses ChaCha12 stream i seeded with `seed`, consuming one unit
/// uniform per parameter field in declaration order; deterministic and
/// independent of evaluation order.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_errorbars(
    initial: &DensityMatrix,
    set: &ConfigurationSet,
    coin: &CoinOperator,
    ranges: &ParameterRanges,
    n: usize,
    draws: usize,
    seed: u64,
    observable: ScanObservable,
    cap: usize,
) -> Result<Vec<f64>> {
    if draws < 2 {
        return Err(Error::InvalidArgument("at least two draws are required".into()));
    }
    ranges.validate()?;

    let samples: Vec<Vec<f64>> = (0..draws as u64)
        .into_par_iter()
        .map(|draw| {
            let params = ranges.sample(&unit_draws(seed, draw));
            let run = realistic_evolution(initial, set, coin, &params, n, cap)?;
            Ok(run.observables.iter().map(|s| observable.extract(s)).collect())
        })
        .collect::<Result<_>>()?;

    Ok((0..=n)
        .map(|step| {
            let mean: f64 = samples.iter().map(|s| s[step]).sum::<f64>() / draws as f64;
            samples.iter().map(|s| (s[step] - mean).abs()).sum::<f64>() / draws as f64
        })
        .collect())
}

fn unit_draws(seed: u64, stream: u64) -> [f64; 7] {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    std::array::from_fn(|_| rng.random::<f64>())
}

/// Grid scan over the scanned error parameters (path losses, EOM
/// transmission, coin offset) minimizing the summed squared difference
/// between the model's distance curve and `target_distances`. Detector
/// efficiencies and the first-step correction stay at the range midpoints.
pub fn fit_parameters(
    target_distances: &[f64],
    initial: &DensityMatrix,
    set: &ConfigurationSet,
    coin: &CoinOperator,
    ranges: &ParameterRanges,
    grid_points: usize,
    cap: usize,
) -> Result<RealisticParameters> {
    if target_distances.is_empty() {
        return Err(Error::InvalidArgument("target curve is empty".into()));
    }
    if grid_points == 0 {
        return Err(Error::InvalidArgument("at least one grid point is required".into()));
    }
    ranges.validate()?;
    let n = target_distances.len() - 1;
    let base = ranges.midpoint();

    let axis = |range: (f64, f64)| -> Vec<f64> {
        if grid_points == 1 || range.0 == range.1 {
            vec![(range.0 + range.1) / 2.0]
        } else {
            (0..grid_points)
                .map(|i| range.0 + (range.1 - range.0) * i as f64 / (grid_points - 1) as f64)
                .collect()
        }
    };

    let mut best: Option<(f64, RealisticParameters)> = None;
    for &a in &axis(ranges.path_loss_a) {
        for &b in &axis(ranges.path_loss_b) {
            for &eom in &axis(ranges.eom_transmission) {
                for &offset in &axis(ranges.hwp_angle_offset) {
                    let params = RealisticParameters {
                        path_loss_a: a,
                        path_loss_b: b,
                        eom_transmission: eom,
                        hwp_angle_offset: offset,
                        ..base
                    };
                    let run = realistic_evolution(initial, set, coin, &params, n, cap)?;
                    let cost: f64 = run
                        .observables
                        .iter()
                        .zip(target_distances)
                        .map(|(s, t)| (s.hs_distance_to_mixed - t).powi(2))
                        .sum();
                    if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                        best = Some((cost, params));
                    }
                }
            }
        }
    }
    Ok(best.expect("grid is nonempty").1)
}
