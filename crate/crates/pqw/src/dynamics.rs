//! Coin, shift, and graph operators, and state evolution: pattern-wise
//! unitaries and the random unitary map built from them.
//!
//! Shift convention: |H⟩ moves right (+1), |V⟩ moves left (-1). A missing
//! link reflects the walker back onto its vertex with the net gap action
//! i·(coin flip); the two slots beyond the graph ends are always absent,
//! which is what confines the walk.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{ConfigurationSet, GraphConfiguration, LineGraph, Pattern};
use crate::qmath::{ComplexMatrix, DensityMatrix, PureState, C_I, C_ONE};

/// Half-wave-plate coin at a given plate angle.
#[derive(Debug, Clone)]
pub struct CoinOperator {
    hwp_angle_degrees: f64,
    matrix: ComplexMatrix,
}

impl CoinOperator {
    pub fn hwp_angle_degrees(&self) -> f64 {
        self.hwp_angle_degrees
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// The HWP coin in the H/V basis:
/// `[[cos 2θ, sin 2θ], [sin 2θ, -cos 2θ]]`; θ = 22.5° gives the Hadamard.
pub fn coin_operator(hwp_angle_degrees: f64) -> CoinOperator {
    let theta = hwp_angle_degrees.to_radians();
    let (s, c) = (2.0 * theta).sin_cos();
    let matrix = ComplexMatrix::from_rows(&[
        vec![Complex64::from(c), Complex64::from(s)],
        vec![Complex64::from(s), Complex64::from(-c)],
    ])
    .expect("2x2 literal");
    CoinOperator { hwp_angle_degrees, matrix }
}

/// Electro-optic modulator settings: voltage-controlled retardation `phi_u`
/// and the natural-birefringence phase `phi` (a global phase, default 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EomSettings {
    pub phi_u: f64,
    pub phi: f64,
}

impl Default for EomSettings {
    fn default() -> Self {
        Self { phi_u: 0.0, phi: 0.0 }
    }
}

impl EomSettings {
    pub fn transmission() -> Self {
        Self::default()
    }

    pub fn reflection() -> Self {
        Self { phi_u: std::f64::consts::FRAC_PI_2, phi: 0.0 }
    }
}

/// EOM action in the H/V basis:
/// `e^{iφ} [[cos φ_U, i sin φ_U], [i sin φ_U, cos φ_U]]`.
///
/// φ_U = 0 is the transmission operator T̂ = I; φ_U = π/2 the reflection
/// operator R̂ = [[0, i], [i, 0]].
pub fn eom_operator(settings: EomSettings) -> ComplexMatrix {
    let (s, c) = settings.phi_u.sin_cos();
    let global = Complex64::from_polar(1.0, settings.phi);
    ComplexMatrix::from_rows(&[
        vec![global * c, global * C_I * s],
        vec![global * C_I * s, global * c],
    ])
    .expect("2x2 literal")
}

fn check_config(graph: LineGraph, kappa: &GraphConfiguration) -> Result<()> {
    if kappa.num_edges() != graph.num_edges() {
        return Err(Error::DimensionMismatch(format!(
            "configuration has {} edges but the graph has {}",
            kappa.num_edges(),
            graph.num_edges()
        )));
    }
    Ok(())
}

/// Closed-form full shift Ŝ_κ on the 2V-dimensional walker space.
///
/// For vertex v: |v,H⟩ → |v+1,H⟩ if the link (v, v+1) is present, else
/// i|v,V⟩; |v,V⟩ → |v-1,V⟩ if (v-1, v) is present, else i|v,H⟩.
pub fn shift_kappa(graph: LineGraph, kappa: &GraphConfiguration) -> Result<ComplexMatrix> {
    shift_kappa_with_reflection_amplitude(graph, kappa, 1.0)
}

/// Closed-form shift with every reflection entry scaled by `amplitude`.
///
/// `amplitude = 1` is the ideal unitary shift; the realistic model passes
/// the EOM amplitude transmission √η for switched (reflection) events.
pub fn shift_kappa_with_reflection_amplitude(
    graph: LineGraph,
    kappa: &GraphConfiguration,
    amplitude: f64,
) -> Result<ComplexMatrix> {
    check_config(graph, kappa)?;
    let nv = graph.num_vertices();
    let refl = C_I * amplitude;
    let mut m = ComplexMatrix::zeros(2 * nv, 2 * nv);
    for v in 0..nv {
        // H component moves right across edge v
        if v + 1 < nv && kappa.edge_present(v) {
            m.set((v + 1) * 2, v * 2, C_ONE);
        } else {
            m.set(v * 2 + 1, v * 2, refl);
        }
        // V component moves left across edge v-1
        if v > 0 && kappa.edge_present(v - 1) {
            m.set((v - 1) * 2 + 1, v * 2 + 1, C_ONE);
        } else {
            m.set(v * 2, v * 2 + 1, refl);
        }
    }
    Ok(m)
}

/// Layout of the extended lattice used by the decomposed shift: ghost
/// vertices flank the graph and one edge slot sits between each pair of
/// neighbouring positions (including the two boundary slots).
struct ExtendedLattice {
    nv: usize,
}

impl ExtendedLattice {
    fn num_slots(&self) -> usize {
        // ghost-left + V vertices + ghost-right + (V+1) edge slots
        2 * self.nv + 3
    }

    fn dim(&self) -> usize {
        2 * self.num_slots()
    }

    /// Slot of vertex `v` for v in -1 ..= V (ghosts included).
    fn vertex_slot(&self, v: i64) -> usize {
        (v + 1) as usize
    }

    /// Slot of edge `k` (between vertex k-1 and k) for k in 0 ..= V.
    fn edge_slot(&self, k: usize) -> usize {
        self.nv + 2 + k
    }

    fn index(&self, slot: usize, coin: usize) -> usize {
        slot * 2 + coin
    }
}

/// The partial shift Ŝ on the extended lattice: vertices feed the adjacent
/// edge slots (H right, V left) and edge slots feed back into vertices.
fn partial_shift(lat: &ExtendedLattice) -> ComplexMatrix {
    let nv = lat.nv as i64;
    let mut m = ComplexMatrix::zeros(lat.dim(), lat.dim());
    for v in -1..=nv {
        let h_target = v + 1; // edge slot between v and v+1
        if (0..=nv).contains(&h_target) {
            m.set(
                lat.index(lat.edge_slot(h_target as usize), 0),
                lat.index(lat.vertex_slot(v), 0),
                C_ONE,
            );
        }
        if (0..=nv).contains(&v) {
            m.set(
                lat.index(lat.edge_slot(v as usize), 1),
                lat.index(lat.vertex_slot(v), 1),
                C_ONE,
            );
        }
    }
    for k in 0..=nv {
        // H continues right to vertex k, V continues left to vertex k-1
        m.set(
            lat.index(lat.vertex_slot(k), 0),
            lat.index(lat.edge_slot(k as usize), 0),
            C_ONE,
        );
        m.set(
            lat.index(lat.vertex_slot(k - 1), 1),
            lat.index(lat.edge_slot(k as usize), 1),
            C_ONE,
        );
    }
    m
}

/// The graph operation Ĝ_κ: identity on vertex slots, the EOM transmission
/// on present edges and the EOM reflection on absent edges and on both
/// boundary slots.
fn graph_operation(lat: &ExtendedLattice, kappa: &GraphConfiguration) -> ComplexMatrix {
    let nv = lat.nv;
    let transmission = eom_operator(EomSettings::transmission());
    let reflection = eom_operator(EomSettings::reflection());
    let mut m = ComplexMatrix::zeros(lat.dim(), lat.dim());
    for v in -1..=nv as i64 {
        let slot = lat.vertex_slot(v);
        m.set(lat.index(slot, 0), lat.index(slot, 0), C_ONE);
        m.set(lat.index(slot, 1), lat.index(slot, 1), C_ONE);
    }
    for k in 0..=nv {
        let present = k >= 1 && k <= nv - 1 && kappa.edge_present(k - 1);
        let op = if present { &transmission } else { &reflection };
        let slot = lat.edge_slot(k);
        for a in 0..2 {
            for b in 0..2 {
                m.set(lat.index(slot, a), lat.index(slot, b), op.get(a, b));
            }
        }
    }
    m
}

fn decomposed_on_extended(
    graph: LineGraph,
    kappa: &GraphConfiguration,
) -> Result<(ExtendedLattice, ComplexMatrix)> {
    check_config(graph, kappa)?;
    let lat = ExtendedLattice { nv: graph.num_vertices() };
    let s = partial_shift(&lat);
    let g = graph_operation(&lat, kappa);
    let full = s.matmul(&g)?.matmul(&s)?;
    Ok((lat, full))
}

/// Ŝ_κ built as the explicit composition Ŝ Ĝ_κ Ŝ on the extended lattice,
/// restricted to the vertex subspace. Serves as the oracle pinning down the
/// closed-form reflection phase.
pub fn shift_kappa_decomposed(
    graph: LineGraph,
    kappa: &GraphConfiguration,
) -> Result<ComplexMatrix> {
    let (lat, full) = decomposed_on_extended(graph, kappa)?;
    let nv = graph.num_vertices();
    let mut m = ComplexMatrix::zeros(2 * nv, 2 * nv);
    for v_in in 0..nv {
        for c_in in 0..2 {
            for v_out in 0..nv {
                for c_out in 0..2 {
                    m.set(
                        v_out * 2 + c_out,
                        v_in * 2 + c_in,
                        full.get(
                            lat.index(lat.vertex_slot(v_out as i64), c_out),
                            lat.index(lat.vertex_slot(v_in as i64), c_in),
                        ),
                    );
                }
            }
        }
    }
    Ok(m)
}

/// Largest amplitude the decomposed Ŝ Ĝ_κ Ŝ sends from any vertex basis
/// state to anywhere outside the vertex subspace (ghost vertices or edge
/// slots). Identically zero when the boundary reflections are correct.
pub fn decomposed_vertex_leakage(graph: LineGraph, kappa: &GraphConfiguration) -> Result<f64> {
    let (lat, full) = decomposed_on_extended(graph, kappa)?;
    let nv = graph.num_vertices() as i64;
    let mut outside = Vec::new();
    outside.push(lat.vertex_slot(-1));
    outside.push(lat.vertex_slot(nv));
    for k in 0..=nv as usize {
        outside.push(lat.edge_slot(k));
    }
    let mut leak = 0.0_f64;
    for v_in in 0..nv {
        for c_in in 0..2 {
            let col = lat.index(lat.vertex_slot(v_in), c_in);
            for slot in &outside {
                for c_out in 0..2 {
                    leak = leak.max(full.get(lat.index(*slot, c_out), col).norm());
                }
            }
        }
    }
    Ok(leak)
}

/// One full step operator Û_κ = Ŝ_κ Ĉ.
#[derive(Debug, Clone)]
pub struct StepUnitary {
    pub kappa: GraphConfiguration,
    pub matrix: ComplexMatrix,
}

/// Lifts the 2x2 coin to the walker space as I_V ⊗ Ĉ.
pub fn coin_on_walker(graph: LineGraph, coin: &CoinOperator) -> ComplexMatrix {
    ComplexMatrix::identity(graph.num_vertices()).kron(coin.matrix())
}

pub fn step_unitary(
    graph: LineGraph,
    kappa: &GraphConfiguration,
    coin: &CoinOperator,
) -> Result<StepUnitary> {
    let matrix = shift_kappa(graph, kappa)?.matmul(&coin_on_walker(graph, coin))?;
    Ok(StepUnitary { kappa: *kappa, matrix })
}

/// Evolves a pure walker state through one configuration pattern, returning
/// the n+1 states ψ(0) … ψ(n).
pub fn evolve_pattern(
    graph: LineGraph,
    initial: &PureState,
    pattern: &Pattern,
    coin: &CoinOperator,
) -> Result<Vec<PureState>> {
    if initial.dim() != 2 * graph.num_vertices() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} does not match walker dimension {}",
            initial.dim(),
            2 * graph.num_vertices()
        )));
    }
    let coin_full = coin_on_walker(graph, coin);
    let mut states = Vec::with_capacity(pattern.len() + 1);
    states.push(initial.clone());
    for kappa in pattern.steps() {
        let shift = shift_kappa(graph, kappa)?;
        let next = states.last().expect("nonempty").apply(&coin_full)?.apply(&shift)?;
        states.push(next);
    }
    Ok(states)
}

/// One application of the random unitary map:
/// ρ' = Σ_κ p(κ) (Ŝ_κ Ĉ) ρ (Ŝ_κ Ĉ)†.
pub fn rum_step(
    rho: &DensityMatrix,
    set: &ConfigurationSet,
    coin: &CoinOperator,
) -> Result<DensityMatrix> {
    let unitaries: Vec<(StepUnitary, f64)> = set
        .iter()
        .map(|(kappa, w)| Ok((step_unitary(set.graph(), kappa, coin)?, *w)))
        .collect::<Result<_>>()?;
    rum_step_with(rho, &unitaries)
}

fn rum_step_with(rho: &DensityMatrix, unitaries: &[(StepUnitary, f64)]) -> Result<DensityMatrix> {
    let dim = rho.dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for (u, w) in unitaries {
        let term = rho.conjugate_by(&u.matrix)?;
        acc.add_scaled_assign(*w, term.matrix());
    }
    DensityMatrix::from_matrix(acc)
}

/// Iterates the random unitary map, returning the n+1 states ρ(0) … ρ(n).
pub fn rum_evolution(
    initial: &DensityMatrix,
    set: &ConfigurationSet,
    coin: &CoinOperator,
    n: usize,
) -> Result<Vec<DensityMatrix>> {
    if initial.dim() != 2 * set.graph().num_vertices() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} does not match walker dimension {}",
            initial.dim(),
            2 * set.graph().num_vertices()
        )));
    }
    let unitaries: Vec<(StepUnitary, f64)> = set
        .iter()
        .map(|(kappa, w)| Ok((step_unitary(set.graph(), kappa, coin)?, *w)))
        .collect::<Result<_>>()?;
    let mut states = Vec::with_capacity(n + 1);
    states.push(initial.clone());
    for _ in 0..n {
        states.push(rum_step_with(states.last().expect("nonempty"), &unitaries)?);
    }
    Ok(states)
}
