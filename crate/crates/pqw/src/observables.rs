//! The measured quantities: position distributions, Stokes parameters of the
//! reduced coin state, distribution similarity, revival detection, and
//! simulated tomography counts.
//!
//! Stokes convention declared by this crate: with the coin basis {|H⟩, |V⟩},
//! diagonal states D/A = (|H⟩ ± |V⟩)/√2 and circular states
//! R/L = (|H⟩ ± i|V⟩)/√2,
//!
//! ```text
//! s0 = Tr σ,   s1 = p_H - p_V,   s2 = p_R - p_L,   s3 = p_D - p_A
//! ```
//!
//! i.e. the circular pair is indexed second and the diagonal pair third. In
//! matrix terms s1 = σ00 - σ11, s2 = -2 Im σ01, s3 = 2 Re σ01.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::qmath::{CoinDensityMatrix, ComplexMatrix, DensityMatrix};

/// Default slack used when detecting distance revivals.
pub const DEFAULT_REVIVAL_TOLERANCE: f64 = 1e-9;

/// Real expansion coefficients of a 2x2 coin state in the three
/// measurement bases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesVector {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesVector {
    pub fn bloch_norm(&self) -> f64 {
        (self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3).sqrt()
    }
}

/// Stokes parameters of a coin state under the crate's basis convention.
pub fn stokes(sigma: &CoinDensityMatrix) -> StokesVector {
    let s0 = sigma.trace();
    let s1 = (sigma.get(0, 0) - sigma.get(1, 1)).re;
    let off = sigma.get(0, 1);
    StokesVector { s0, s1, s2: -2.0 * off.im, s3: 2.0 * off.re }
}

/// Rebuilds the coin state from Stokes parameters.
///
/// A Bloch vector outside the unit ball (possible for noisy counts) is
/// projected radially onto it; the returned flag reports whether that
/// repair happened. Inverse of [`stokes`] on the closed ball.
pub fn stokes_to_density(s: &StokesVector) -> Result<(CoinDensityMatrix, bool)> {
    let norm = s.bloch_norm();
    let (s1, s2, s3, projected) = if norm > 1.0 {
        (s.s1 / norm, s.s2 / norm, s.s3 / norm, true)
    } else {
        (s.s1, s.s2, s.s3, false)
    };
    let off = Complex64::new(s3, -s2) * 0.5;
    let m = ComplexMatrix::from_rows(&[
        vec![Complex64::from((s.s0 + s1) / 2.0), off],
        vec![off.conj(), Complex64::from((s.s0 - s1) / 2.0)],
    ])?;
    Ok((CoinDensityMatrix::from_matrix(m)?, projected))
}

/// Probability of finding the walker on each vertex, P(v) = ⟨v,H|ρ|v,H⟩ +
/// ⟨v,V|ρ|v,V⟩, labelled by the centered vertex labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDistribution {
    labels: Vec<i64>,
    probabilities: Vec<f64>,
}

impl PositionDistribution {
    pub fn new(labels: Vec<i64>, probabilities: Vec<f64>) -> Result<Self> {
        if labels.len() != probabilities.len() {
            return Err(Error::DimensionMismatch(
                "labels and probabilities differ in length".into(),
            ));
        }
        Ok(Self { labels, probabilities })
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability_of(&self, label: i64) -> Option<f64> {
        self.labels.iter().position(|l| *l == label).map(|i| self.probabilities[i])
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Rescales to total probability 1.
    pub fn renormalized(&self, context: &str) -> Result<Self> {
        let t = self.total();
        if t < crate::qmath::TRACE_UNDERFLOW {
            return Err(Error::SignalExtinction { context: context.into(), trace: t });
        }
        Ok(Self {
            labels: self.labels.clone(),
            probabilities: self.probabilities.iter().map(|p| p / t).collect(),
        })
    }
}

/// Extracts the position distribution of a walker state. Vertex labels are
/// derived from the dimension (centered on 0).
pub fn position_distribution(rho: &DensityMatrix) -> Result<PositionDistribution> {
    let dim = rho.dim();
    if dim % 2 != 0 {
        return Err(Error::DimensionMismatch(format!("walker dimension {dim} is not even")));
    }
    let num_positions = dim / 2;
    let graph = crate::graph::LineGraph::new(num_positions)?;
    let probabilities = (0..num_positions)
        .map(|v| rho.matrix().get(v * 2, v * 2).re + rho.matrix().get(v * 2 + 1, v * 2 + 1).re)
        .collect();
    PositionDistribution::new(graph.labels(), probabilities)
}

/// Classical fidelity between two distributions over the same vertex set:
/// the squared Bhattacharyya coefficient S = (Σ_v √(p_v q_v))².
pub fn similarity(p: &PositionDistribution, q: &PositionDistribution) -> Result<f64> {
    if p.labels != q.labels {
        return Err(Error::MismatchedSupports(format!(
            "distributions cover different vertex sets: {:?} vs {:?}",
            p.labels, q.labels
        )));
    }
    let coeff: f64 = p
        .probabilities
        .iter()
        .zip(&q.probabilities)
        .map(|(a, b)| (a * b).max(0.0).sqrt())
        .sum();
    Ok(coeff * coeff)
}

/// Steps at which the distance from the stationary state strictly increases:
/// all n with d(n) > d(n-1) + tolerance. A non-empty result witnesses
/// non-Markovian evolution.
pub fn revival_detector(distances: &[f64], tolerance: f64) -> Vec<usize> {
    distances
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] + tolerance)
        .map(|(i, _)| i + 1)
        .collect()
}

/// Detection counts for the six projectors of a full coin tomography.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TomographyCounts {
    pub h: u64,
    pub v: u64,
    pub d: u64,
    pub a: u64,
    pub r: u64,
    pub l: u64,
    pub shots_per_basis: u64,
}

/// Simulates projective coin tomography: one binomial draw per basis with
/// the success probabilities read off `sigma`, complements filling the
/// paired detector. Deterministic per seed (ChaCha12 seeded with `seed`,
/// bases drawn in the order H/V, R/L, D/A).
pub fn simulate_tomography(
    sigma: &CoinDensityMatrix,
    shots_per_basis: u64,
    seed: u64,
) -> Result<TomographyCounts> {
    if shots_per_basis == 0 {
        return Err(Error::InvalidArgument("at least one shot per basis is required".into()));
    }
    let s = stokes(sigma);
    let prob = |diff: f64| ((s.s0 + diff) / 2.0).clamp(0.0, 1.0);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut draw = |p: f64| -> Result<u64> {
        Binomial::new(shots_per_basis, p)
            .map_err(|e| Error::InvalidArgument(format!("binomial parameters: {e}")))
            .map(|dist| dist.sample(&mut rng))
    };
    let h = draw(prob(s.s1))?;
    let r = draw(prob(s.s2))?;
    let d = draw(prob(s.s3))?;
    Ok(TomographyCounts {
        h,
        v: shots_per_basis - h,
        r,
        l: shots_per_basis - r,
        d,
        a: shots_per_basis - d,
        shots_per_basis,
    })
}

/// Linear-inversion reconstruction from tomography counts, with the Bloch
/// ball projection of [`stokes_to_density`] repairing unphysical count
/// fluctuations. Returns the state and whether projection was needed.
pub fn reconstruct_from_counts(counts: &TomographyCounts) -> Result<(CoinDensityMatrix, bool)> {
    let shots = counts.shots_per_basis as f64;
    if shots == 0.0 {
        return Err(Error::InvalidArgument("counts carry zero shots per basis".into()));
    }
    let s = StokesVector {
        s0: 1.0,
        s1: (counts.h as f64 - counts.v as f64) / shots,
        s2: (counts.r as f64 - counts.l as f64) / shots,
        s3: (counts.d as f64 - counts.a as f64) / shots,
    };
    stokes_to_density(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{coin_operator, evolve_pattern};
    use crate::graph::{GraphConfiguration, LineGraph, Pattern};
    use crate::qmath::{hs_distance_sq, PureState, C_ZERO};
    use proptest::prelude::*;

    fn coin_h() -> CoinDensityMatrix {
        CoinDensityMatrix::from_matrix(
            ComplexMatrix::from_rows(&[
                vec![Complex64::from(1.0), C_ZERO],
                vec![C_ZERO, C_ZERO],
            ])
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn stokes_of_h_projector() {
        let s = stokes(&coin_h());
        assert_eq!((s.s0, s.s1, s.s2, s.s3), (1.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn stokes_of_maximally_mixed() {
        let s = stokes(&CoinDensityMatrix::maximally_mixed());
        assert_eq!((s.s0, s.s1, s.s2, s.s3), (1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn stokes_of_circular_eigenstate() {
        // (|H⟩ + i|V⟩)/sqrt(2) is the R eigenstate: unit circular component
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let state = PureState::new(vec![Complex64::from(h), Complex64::new(0.0, h)]);
        let sigma = CoinDensityMatrix::from_matrix(state.outer().matrix().clone()).unwrap();
        let s = stokes(&sigma);
        assert!((s.s0 - 1.0).abs() < 1e-15);
        assert!(s.s1.abs() < 1e-15);
        assert!((s.s2 - 1.0).abs() < 1e-15);
        assert!(s.s3.abs() < 1e-15);
    }

    #[test]
    fn stokes_of_diagonal_eigenstate() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let state = PureState::new(vec![Complex64::from(h), Complex64::from(h)]);
        let sigma = CoinDensityMatrix::from_matrix(state.outer().matrix().clone()).unwrap();
        let s = stokes(&sigma);
        assert!(s.s2.abs() < 1e-15);
        assert!((s.s3 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stokes_to_density_recovers_basis_states() {
        let (sigma, projected) =
            stokes_to_density(&StokesVector { s0: 1.0, s1: 1.0, s2: 0.0, s3: 0.0 }).unwrap();
        assert!(!projected);
        assert!(sigma.as_density().matrix().approx_eq(coin_h().as_density().matrix(), 1e-15));

        let (mixed, _) =
            stokes_to_density(&StokesVector { s0: 1.0, s1: 0.0, s2: 0.0, s3: 0.0 }).unwrap();
        assert!(mixed
            .as_density()
            .matrix()
            .approx_eq(CoinDensityMatrix::maximally_mixed().as_density().matrix(), 1e-15));
    }

    #[test]
    fn stokes_projects_out_of_ball_vectors_and_flags() {
        let (sigma, projected) =
            stokes_to_density(&StokesVector { s0: 1.0, s1: 2.0, s2: 0.0, s3: 0.0 }).unwrap();
        assert!(projected);
        let s = stokes(&sigma);
        assert!((s.s1 - 1.0).abs() < 1e-12);
        assert!(sigma.as_density().min_eigenvalue().unwrap() >= -1e-12);
    }

    proptest! {
        #[test]
        fn stokes_round_trip_on_the_bloch_ball(
            x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0,
        ) {
            let norm = (x * x + y * y + z * z).sqrt();
            // pull boundary cases strictly inside so float dust cannot
            // push them past the projection threshold
            let shrink = if norm > 1.0 { (1.0 - 1e-9) / norm } else { 1.0 };
            let (s1, s2, s3) = (x * shrink, y * shrink, z * shrink);
            let s = StokesVector { s0: 1.0, s1, s2, s3 };
            let (sigma, projected) = stokes_to_density(&s).unwrap();
            prop_assert!(!projected);
            let back = stokes(&sigma);
            prop_assert!((back.s1 - s1).abs() < 1e-12);
            prop_assert!((back.s2 - s2).abs() < 1e-12);
            prop_assert!((back.s3 - s3).abs() < 1e-12);
        }
    }

    #[test]
    fn position_distribution_of_localized_state() {
        let rho = PureState::basis_state(6, 2).outer();
        let dist = position_distribution(&rho).unwrap();
        assert_eq!(dist.labels(), &[-1, 0, 1]);
        assert_eq!(dist.probabilities(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn position_distribution_of_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(6);
        let dist = position_distribution(&rho).unwrap();
        for p in dist.probabilities() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn position_distribution_after_one_left_link_step() {
        let graph = LineGraph::new(3).unwrap();
        let pattern = Pattern::new(vec![GraphConfiguration::from_edge_string("10").unwrap()]);
        let states =
            evolve_pattern(graph, &PureState::basis_state(6, 2), &pattern, &coin_operator(22.5))
                .unwrap();
        let dist = position_distribution(&states[1].outer()).unwrap();
        assert!((dist.probability_of(-1).unwrap() - 0.5).abs() < 1e-12);
        assert!((dist.probability_of(0).unwrap() - 0.5).abs() < 1e-12);
        assert!(dist.probability_of(1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn similarity_of_identical_distributions_is_one() {
        let p = PositionDistribution::new(vec![-1, 0, 1], vec![0.2, 0.5, 0.3]).unwrap();
        assert!((similarity(&p, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn similarity_of_disjoint_supports_is_zero() {
        let p = PositionDistribution::new(vec![-1, 0, 1], vec![1.0, 0.0, 0.0]).unwrap();
        let q = PositionDistribution::new(vec![-1, 0, 1], vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(similarity(&p, &q).unwrap(), 0.0);
    }

    #[test]
    fn similarity_of_point_mass_and_even_split() {
        let p = PositionDistribution::new(vec![0, 1], vec![1.0, 0.0]).unwrap();
        let q = PositionDistribution::new(vec![0, 1], vec![0.5, 0.5]).unwrap();
        assert!((similarity(&p, &q).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn similarity_is_symmetric() {
        let p = PositionDistribution::new(vec![0, 1, 2], vec![0.1, 0.6, 0.3]).unwrap();
        let q = PositionDistribution::new(vec![0, 1, 2], vec![0.4, 0.4, 0.2]).unwrap();
        assert_eq!(similarity(&p, &q).unwrap(), similarity(&q, &p).unwrap());
    }

    #[test]
    fn similarity_rejects_mismatched_vertex_sets() {
        let p = PositionDistribution::new(vec![0, 1], vec![0.5, 0.5]).unwrap();
        let q = PositionDistribution::new(vec![-1, 0, 1], vec![0.3, 0.3, 0.4]).unwrap();
        assert!(matches!(similarity(&p, &q), Err(Error::MismatchedSupports(_))));
    }

    #[test]
    fn revival_detector_on_monotone_decrease_is_empty() {
        assert!(revival_detector(&[0.5, 0.3, 0.1, 0.05], DEFAULT_REVIVAL_TOLERANCE).is_empty());
    }

    #[test]
    fn revival_detector_flags_increases() {
        let revivals = revival_detector(&[0.5, 0.0, 0.05, 0.1], DEFAULT_REVIVAL_TOLERANCE);
        assert_eq!(revivals, vec![2, 3]);
    }

    #[test]
    fn revival_detector_ignores_subtolerance_jitter() {
        let revivals = revival_detector(&[0.5, 0.1, 0.1 + 1e-12], DEFAULT_REVIVAL_TOLERANCE);
        assert!(revivals.is_empty());
    }

    #[test]
    fn tomography_of_pure_h_never_counts_v() {
        let counts = simulate_tomography(&coin_h(), 10_000, 7).unwrap();
        assert_eq!(counts.v, 0);
        assert_eq!(counts.h, 10_000);
        assert_eq!(counts.d + counts.a, 10_000);
    }

    #[test]
    fn tomography_of_mixed_state_splits_evenly() {
        // 3-sigma binomial bound at 1e6 shots: 3 * sqrt(0.25e-6) = 1.5e-3
        let shots = 1_000_000u64;
        let sigma = CoinDensityMatrix::maximally_mixed();
        let counts = simulate_tomography(&sigma, shots, 99).unwrap();
        let bound = 3.0 * (0.25 / shots as f64).sqrt();
        for pair in [counts.h, counts.d, counts.r] {
            let freq = pair as f64 / shots as f64;
            assert!((freq - 0.5).abs() < bound, "frequency {freq}");
        }
    }

    #[test]
    fn tomography_is_deterministic_per_seed() {
        let sigma = CoinDensityMatrix::maximally_mixed();
        let a = simulate_tomography(&sigma, 1000, 5).unwrap();
        let b = simulate_tomography(&sigma, 1000, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reconstruction_converges_with_shots() {
        let (sigma, _) = stokes_to_density(&StokesVector {
            s0: 1.0,
            s1: 0.3,
            s2: -0.2,
            s3: 0.5,
        })
        .unwrap();
        let mut total = 0.0;
        let seeds = 10;
        for seed in 0..seeds {
            let counts = simulate_tomography(&sigma, 1_000_000, seed).unwrap();
            let (rebuilt, _) = reconstruct_from_counts(&counts).unwrap();
            total += hs_distance_sq(rebuilt.as_density(), sigma.as_density()).unwrap();
        }
        assert!(total / (seeds as f64) < 1e-3);
    }
}
