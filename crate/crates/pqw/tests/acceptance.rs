//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Frozen expected values were computed with an independent numerical
//! oracle (exhaustive 64-pattern averaging of the six-step walk) before the
//! library existed; the in-test pattern average recomputes them through the
//! pure-state path as a second route.

use pqw::config::RunConfig;
use pqw::dynamics::{
    coin_operator, decomposed_vertex_leakage, evolve_pattern, rum_evolution, shift_kappa,
    shift_kappa_decomposed, step_unitary,
};
use pqw::graph::{
    enumerate_patterns, full_set, restricted_set, GraphConfiguration, LineGraph,
    DEFAULT_PATTERN_CAP,
};
use pqw::observables::{revival_detector, simulate_tomography, reconstruct_from_counts, stokes};
use pqw::qmath::{hs_distance_sq, CoinDensityMatrix, ComplexMatrix, DensityMatrix, PureState};
use pqw::realistic::{
    monte_carlo_errorbars, realistic_evolution, ParameterRanges, RealisticParameters,
    ScanObservable,
};

/// d(n) = Tr[(σ(n) − I/2)²] for the six-step paper walk, exact dyadic
/// values frozen from the enumeration oracle.
const FROZEN_DISTANCES: [f64; 7] = [
    0.5,
    0.0,
    0.0,
    1.0 / 64.0,
    25.0 / 1024.0,
    61.0 / 16384.0,
    881.0 / 262144.0,
];

fn graph3() -> LineGraph {
    LineGraph::new(3).unwrap()
}

fn paper_walk() -> (LineGraph, pqw::graph::ConfigurationSet, pqw::dynamics::CoinOperator, PureState)
{
    let graph = graph3();
    let set = restricted_set(graph, 0.5).unwrap();
    let coin = coin_operator(22.5);
    let initial = PureState::basis_state(6, 2); // |0,H⟩ at the center
    (graph, set, coin, initial)
}

fn mixed_coin() -> CoinDensityMatrix {
    CoinDensityMatrix::maximally_mixed()
}

/// Ideal coin-state sequence via the density-matrix map.
fn ideal_coin_states(n: usize) -> Vec<CoinDensityMatrix> {
    let (_, set, coin, initial) = paper_walk();
    rum_evolution(&initial.outer(), &set, &coin, n)
        .unwrap()
        .iter()
        .map(|rho| rho.partial_trace_position().unwrap())
        .collect()
}

/// Strict local extrema of a curve, ignoring sub-margin wiggles.
fn extrema_indices(curve: &[f64], margin: f64) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    for i in 1..curve.len().saturating_sub(1) {
        if curve[i] > curve[i - 1] + margin && curve[i] > curve[i + 1] + margin {
            out.push((i, true));
        } else if curve[i] < curve[i - 1] - margin && curve[i] < curve[i + 1] - margin {
            out.push((i, false));
        }
    }
    out
}

#[test]
fn criterion_01_sample_space_count() {
    let (_, set, _, _) = paper_walk();
    let patterns = enumerate_patterns(&set, 6).unwrap();
    assert_eq!(patterns.len(), 64);
    for (_, probability) in &patterns {
        assert!((probability - 1.0 / 64.0).abs() < 1e-15);
    }
    println!("PASS criterion 1: restricted 6-step sample space has exactly 64 equiprobable patterns");
}

#[test]
fn criterion_02_confinement() {
    let (graph, set, coin, initial) = paper_walk();
    // structural confinement: the state space has exactly the three
    // vertices, and every pattern evolution keeps unit norm on it
    for (pattern, _) in enumerate_patterns(&set, 6).unwrap() {
        for state in evolve_pattern(graph, &initial, &pattern, &coin).unwrap() {
            assert_eq!(state.dim(), 6);
            assert!((state.norm() - 1.0).abs() < 1e-10);
        }
    }
    // the decomposed construction leaks nothing outside the vertex space
    for mask in 0..4u64 {
        let kappa = GraphConfiguration::new(mask, 2).unwrap();
        let leak = decomposed_vertex_leakage(graph, &kappa).unwrap();
        assert!(leak < 1e-12, "mask {mask:#b} leaks {leak}");
    }
    println!("PASS criterion 2: walker confined to the three vertices; decomposed shift leaks < 1e-12");
}

#[test]
fn criterion_03_step_one_mixing() {
    let states = ideal_coin_states(1);
    let d0 = hs_distance_sq(states[0].as_density(), mixed_coin().as_density()).unwrap();
    let d1 = hs_distance_sq(states[1].as_density(), mixed_coin().as_density()).unwrap();
    assert!((d0 - 0.5).abs() < 1e-12);
    assert!(d1 < 1e-12);
    println!("PASS criterion 3: distance starts at 0.5 and the coin is completely mixed after one step");
}

#[test]
fn criterion_04_non_markovian_revival() {
    let coins = ideal_coin_states(6);
    let distances: Vec<f64> = coins
        .iter()
        .map(|sigma| hs_distance_sq(sigma.as_density(), mixed_coin().as_density()).unwrap())
        .collect();
    for (step, (have, want)) in distances.iter().zip(FROZEN_DISTANCES).enumerate() {
        assert!((have - want).abs() < 1e-12, "step {step}: {have} vs frozen {want}");
    }
    let revivals = revival_detector(&distances, 1e-9);
    assert!(!revivals.is_empty());
    assert_eq!(revivals, vec![3, 4]);
    let max_late = distances[2..].iter().cloned().fold(0.0, f64::max);
    assert!(max_late > 1e-3, "revival magnitude {max_late}");
    println!("PASS criterion 4: distance revives at steps 3-4 with magnitude {max_late:.6} > 1e-3");
}

#[test]
fn criterion_05_s2_nullity() {
    for (step, sigma) in ideal_coin_states(6).iter().enumerate() {
        let s = stokes(sigma);
        assert!(s.s2.abs() < 1e-10, "S2({step}) = {}", s.s2);
    }
    println!("PASS criterion 5: S2(n) vanishes for every step of the ideal walk");
}

#[test]
fn criterion_06_rum_matches_pattern_average() {
    let (graph, _, coin, initial) = paper_walk();
    for set in [restricted_set(graph, 0.5).unwrap(), full_set(graph, 0.5).unwrap()] {
        let rum_states = rum_evolution(&initial.outer(), &set, &coin, 6).unwrap();
        for (n, rum_state) in rum_states.iter().enumerate() {
            let mut average = ComplexMatrix::zeros(6, 6);
            for (pattern, probability) in enumerate_patterns(&set, n).unwrap() {
                let pure = evolve_pattern(graph, &initial, &pattern, &coin).unwrap();
                average.add_scaled_assign(probability, pure[n].outer().matrix());
            }
            let diff = rum_state.matrix().max_abs_diff(&average);
            assert!(diff < 1e-10, "set size {} step {n}: max diff {diff}", set.len());
        }
    }
    println!("PASS criterion 6: iterated map equals the pattern average for n <= 6 on both sets");
}

#[test]
fn criterion_07_asymptotic_mixing() {
    let (_, set, coin, initial) = paper_walk();
    let states = rum_evolution(&initial.outer(), &set, &coin, 1000).unwrap();
    let sigma = states.last().unwrap().partial_trace_position().unwrap();
    let d = hs_distance_sq(sigma.as_density(), mixed_coin().as_density()).unwrap();
    assert!(d < 1e-6, "d(1000) = {d}");
    println!("PASS criterion 7: coin state at n = 1000 is maximally mixed to {d:.3e}");
}

#[test]
fn criterion_08_decomposition_oracle() {
    for nv in 3..=5 {
        let graph = LineGraph::new(nv).unwrap();
        for mask in 0..1u64 << (nv - 1) {
            let kappa = GraphConfiguration::new(mask, nv - 1).unwrap();
            let closed = shift_kappa(graph, &kappa).unwrap();
            let decomposed = shift_kappa_decomposed(graph, &kappa).unwrap();
            let diff = closed.max_abs_diff(&decomposed);
            assert!(diff < 1e-12, "V={nv} mask={mask:#b}: {diff}");
        }
    }
    println!("PASS criterion 8: closed-form shift equals the decomposed construction for V = 3, 4, 5");
}

#[test]
fn criterion_09_unitarity_sweep() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2024);
    for nv in 3..=5 {
        let graph = LineGraph::new(nv).unwrap();
        for mask in 0..1u64 << (nv - 1) {
            let kappa = GraphConfiguration::new(mask, nv - 1).unwrap();
            for _ in 0..50 {
                let angle: f64 = rng.random_range(0.0..360.0);
                let unitary = step_unitary(graph, &kappa, &coin_operator(angle)).unwrap();
                let gram = unitary.matrix.dagger().matmul(&unitary.matrix).unwrap();
                let diff = gram.max_abs_diff(&ComplexMatrix::identity(2 * nv));
                assert!(diff < 1e-10, "V={nv} mask={mask:#b} angle={angle}: {diff}");
            }
        }
    }
    println!("PASS criterion 9: step operators unitary for every configuration and 50 random coin angles");
}

#[test]
fn criterion_10_realistic_model_limits() {
    let (_, set, coin, initial) = paper_walk();

    // error-free parameters reproduce criteria 3-5 unchanged
    let ideal_run = realistic_evolution(
        &initial.outer(),
        &set,
        &coin,
        &RealisticParameters::ideal(),
        6,
        DEFAULT_PATTERN_CAP,
    )
    .unwrap();
    assert!((ideal_run.observables[0].hs_distance_to_mixed - 0.5).abs() < 1e-12);
    assert!(ideal_run.observables[1].hs_distance_to_mixed < 1e-12);
    for obs in &ideal_run.observables {
        assert!(obs.stokes.s2.abs() < 1e-10);
    }
    for (obs, want) in ideal_run.observables.iter().zip(FROZEN_DISTANCES) {
        assert!((obs.hs_distance_to_mixed - want).abs() < 1e-12);
    }

    // paper-range parameters deviate in amplitude but keep the extrema
    // step-indices (1e-3 strictness margin separates the oscillation peak
    // from sub-amplitude deviations)
    let corner = RealisticParameters {
        path_loss_a: 0.98,
        path_loss_b: 1.0,
        detector_eff_h: 0.65,
        detector_eff_v: 0.65,
        eom_transmission: 0.99,
        hwp_angle_offset: 0.2,
        first_step_efficiency_correction: 1.0,
    };
    let corner_run =
        realistic_evolution(&initial.outer(), &set, &coin, &corner, 6, DEFAULT_PATTERN_CAP)
            .unwrap();
    let ideal_curve: Vec<f64> =
        ideal_run.observables.iter().map(|o| o.hs_distance_to_mixed).collect();
    let corner_curve: Vec<f64> =
        corner_run.observables.iter().map(|o| o.hs_distance_to_mixed).collect();
    assert_eq!(extrema_indices(&ideal_curve, 1e-3), extrema_indices(&corner_curve, 1e-3));
    assert!(ideal_curve.iter().zip(&corner_curve).any(|(a, b)| (a - b).abs() > 1e-6));
    println!("PASS criterion 10: ideal limit exact; paper-range run preserves the extrema at {:?}",
        extrema_indices(&ideal_curve, 1e-3));
}

#[test]
fn criterion_11_error_bar_symmetry() {
    let (_, set, coin, initial) = paper_walk();
    for observable in
        [ScanObservable::StokesS1, ScanObservable::StokesS2, ScanObservable::StokesS3]
    {
        let bars = monte_carlo_errorbars(
            &initial.outer(),
            &set,
            &coin,
            &ParameterRanges::paper(),
            6,
            1000,
            42,
            observable,
            DEFAULT_PATTERN_CAP,
        )
        .unwrap();
        assert!(bars[1] < 1e-10, "{observable:?}: step-1 error bar {}", bars[1]);
    }
    println!("PASS criterion 11: step-1 Stokes error bars vanish under the paper-range scan (1000 draws)");
}

#[test]
fn criterion_12_tomography_consistency() {
    let sigma = ideal_coin_states(3)[3].clone();
    let mut total = 0.0;
    let seeds = 10u64;
    for seed in 0..seeds {
        let counts = simulate_tomography(&sigma, 1_000_000, seed).unwrap();
        let (rebuilt, _) = reconstruct_from_counts(&counts).unwrap();
        total += hs_distance_sq(rebuilt.as_density(), sigma.as_density()).unwrap();
    }
    let mean = total / seeds as f64;
    assert!(mean < 1e-3, "seed-averaged distance {mean}");
    println!("PASS criterion 12: linear inversion from 1e6 shots recovers the coin state to {mean:.2e}");
}

/// Companion regression: the acceptance criteria above are driven by the
/// density-matrix route; this pins the pure-state enumeration route to the
/// same frozen curve, so both legs of the dual-route check stay honest.
#[test]
fn frozen_curve_from_pattern_enumeration() {
    let (graph, set, coin, initial) = paper_walk();
    for (n, want) in FROZEN_DISTANCES.iter().enumerate() {
        let mut sigma_avg = ComplexMatrix::zeros(2, 2);
        for (pattern, probability) in enumerate_patterns(&set, n).unwrap() {
            let states = evolve_pattern(graph, &initial, &pattern, &coin).unwrap();
            let coin_state = states[n].outer().partial_trace_position().unwrap();
            sigma_avg.add_scaled_assign(probability, coin_state.as_density().matrix());
        }
        let sigma = DensityMatrix::from_matrix(sigma_avg).unwrap();
        let d = hs_distance_sq(&sigma, mixed_coin().as_density()).unwrap();
        assert!((d - want).abs() < 1e-12, "step {n}: {d} vs frozen {want}");
    }
}
