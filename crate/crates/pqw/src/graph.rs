//! Line-graph percolation configurations, their probabilities, and temporal
//! patterns of configurations.

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// Cap on exhaustive pattern enumeration unless the caller overrides it.
pub const DEFAULT_PATTERN_CAP: usize = 1_000_000;

/// A linear chain of vertices with nearest-neighbour links.
///
/// Vertex labels are integers centered on 0: `label = index - (V - 1) / 2`,
/// e.g. {-1, 0, 1} for three vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineGraph {
    num_vertices: usize,
}

impl LineGraph {
    pub fn new(num_vertices: usize) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::InvalidArgument("a line graph needs at least one vertex".into()));
        }
        Ok(Self { num_vertices })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.num_vertices - 1
    }

    /// Label of the vertex at `index` (0-based, leftmost first).
    pub fn label(&self, index: usize) -> i64 {
        index as i64 - ((self.num_vertices as i64 - 1) / 2)
    }

    pub fn labels(&self) -> Vec<i64> {
        (0..self.num_vertices).map(|i| self.label(i)).collect()
    }

    pub fn index_of_label(&self, label: i64) -> Option<usize> {
        let idx = label + (self.num_vertices as i64 - 1) / 2;
        (0..self.num_vertices as i64).contains(&idx).then_some(idx as usize)
    }
}

/// One assignment of present/absent to every link of the graph.
///
/// Bit `e` of the mask is set iff the link between vertex `e` and `e + 1`
/// is present. Serialized as a binary string with the leftmost character
/// describing the leftmost edge, so `"10"` has the left link present and
/// the right link absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GraphConfiguration {
    edge_mask: u64,
    num_edges: usize,
}

impl GraphConfiguration {
    pub fn new(edge_mask: u64, num_edges: usize) -> Result<Self> {
        if num_edges > 63 {
            return Err(Error::InvalidArgument(format!("{num_edges} edges exceed mask width")));
        }
        if num_edges < 64 && edge_mask >> num_edges != 0 {
            return Err(Error::InvalidArgument(format!(
                "mask {edge_mask:#b} has bits beyond the {num_edges} edges"
            )));
        }
        Ok(Self { edge_mask, num_edges })
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn edge_present(&self, edge: usize) -> bool {
        edge < self.num_edges && (self.edge_mask >> edge) & 1 == 1
    }

    /// Number of present links, |κ|.
    pub fn present_count(&self) -> u32 {
        self.edge_mask.count_ones()
    }

    pub fn edge_string(&self) -> String {
        (0..self.num_edges)
            .map(|e| if self.edge_present(e) { '1' } else { '0' })
            .collect()
    }

    pub fn from_edge_string(s: &str) -> Result<Self> {
        let mut mask = 0u64;
        for (e, ch) in s.chars().enumerate() {
            match ch {
                '1' => mask |= 1 << e,
                '0' => {}
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "edge string may contain only 0 and 1, found {other:?}"
                    )))
                }
            }
        }
        Self::new(mask, s.len())
    }
}

/// A weighted set of configurations: 𝒦, 𝒦′ and friends.
#[derive(Debug, Clone)]
pub struct ConfigurationSet {
    graph: LineGraph,
    entries: Vec<(GraphConfiguration, f64)>,
    link_probability: f64,
}

impl ConfigurationSet {
    pub fn new(
        graph: LineGraph,
        entries: Vec<(GraphConfiguration, f64)>,
        link_probability: f64,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("configuration set is empty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        let mut total = 0.0;
        for (config, weight) in &entries {
            if config.num_edges() != graph.num_edges() {
                return Err(Error::DimensionMismatch(format!(
                    "configuration has {} edges but the graph has {}",
                    config.num_edges(),
                    graph.num_edges()
                )));
            }
            if !seen.insert(config.edge_mask) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate configuration {}",
                    config.edge_string()
                )));
            }
            if *weight < 0.0 {
                return Err(Error::InvalidArgument(format!("negative weight {weight}")));
            }
            total += weight;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { graph, entries, link_probability })
    }

    pub fn graph(&self) -> LineGraph {
        self.graph
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn link_probability(&self) -> f64 {
        self.link_probability
    }

    pub fn iter(&self) -> impl Iterator<Item = &(GraphConfiguration, f64)> {
        self.entries.iter()
    }

    pub fn entry(&self, i: usize) -> &(GraphConfiguration, f64) {
        &self.entries[i]
    }
}

/// All `2^(V-1)` configurations with independent-link weights
/// `p^|κ| (1-p)^(E-|κ|)`.
pub fn full_set(graph: LineGraph, p: f64) -> Result<ConfigurationSet> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("link probability {p} not in [0, 1]")));
    }
    let num_edges = graph.num_edges();
    let entries = (0..1u64 << num_edges)
        .map(|mask| {
            let config = GraphConfiguration::new(mask, num_edges).expect("mask in range");
            let k = config.present_count() as i32;
            // at p == 0 or 1 the degenerate factors come out as 0^0 = 1
            let weight = p.powi(k) * (1.0 - p).powi(num_edges as i32 - k);
            (config, weight)
        })
        .collect();
    ConfigurationSet::new(graph, entries, p)
}

/// The restricted set 𝒦′: the full set minus the all-present and all-absent
/// graphs, with weights renormalized to the conditional probabilities.
///
/// Only defined for three vertices; the restriction is not generalized to
/// other sizes.
pub fn restricted_set(graph: LineGraph, p: f64) -> Result<ConfigurationSet> {
    if graph.num_vertices() != 3 {
        return Err(Error::UnsupportedGraph(format!(
            "the restricted set is defined for 3 vertices, got {}",
            graph.num_vertices()
        )));
    }
    let full = full_set(graph, p)?;
    let kept: Vec<(GraphConfiguration, f64)> = full
        .iter()
        .filter(|(config, _)| {
            let k = config.present_count() as usize;
            k != 0 && k != config.num_edges()
        })
        .cloned()
        .collect();
    let total: f64 = kept.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "restricted-set renormalization denominator is 0 at link probability {p}"
        )));
    }
    let entries = kept.into_iter().map(|(c, w)| (c, w / total)).collect();
    ConfigurationSet::new(graph, entries, p)
}

/// A temporal sequence of configurations, one per step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    steps: Vec<GraphConfiguration>,
}

impl Pattern {
    pub fn new(steps: Vec<GraphConfiguration>) -> Self {
        Self { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[GraphConfiguration] {
        &self.steps
    }

    /// Per-step edge strings joined with `|`, e.g. `"10|01|10"`.
    pub fn display_string(&self) -> String {
        self.steps.iter().map(GraphConfiguration::edge_string).collect::<Vec<_>>().join("|")
    }
}

/// Number of length-`n` patterns over `set`, or `None` on overflow.
pub fn pattern_count(set: &ConfigurationSet, n: usize) -> Option<u128> {
    (set.len() as u128).checked_pow(u32::try_from(n).ok()?)
}

/// Decodes pattern `index` (mixed-radix, step 0 most significant) without
/// materializing the whole enumeration.
pub fn pattern_by_index(set: &ConfigurationSet, n: usize, index: u128) -> (Pattern, f64) {
    let base = set.len() as u128;
    let mut steps = vec![set.entry(0).0; n];
    let mut probability = 1.0;
    let mut rest = index;
    for k in (0..n).rev() {
        let digit = (rest % base) as usize;
        rest /= base;
        let (config, weight) = set.entry(digit);
        steps[k] = *config;
        probability *= weight;
    }
    (Pattern::new(steps), probability)
}

/// All `|set|^n` patterns of length `n` with their probabilities, in
/// lexicographic order of per-step configuration indices.
pub fn enumerate_patterns(set: &ConfigurationSet, n: usize) -> Result<Vec<(Pattern, f64)>> {
    enumerate_patterns_capped(set, n, DEFAULT_PATTERN_CAP)
}

pub fn enumerate_patterns_capped(
    set: &ConfigurationSet,
    n: usize,
    cap: usize,
) -> Result<Vec<(Pattern, f64)>> {
    let total = pattern_count(set, n).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(Error::PatternCapExceeded { total, cap });
    }
    Ok((0..total).map(|i| pattern_by_index(set, n, i)).collect())
}

/// `count` i.i.d. length-`n` patterns drawn under the set weights.
///
/// Deterministic per seed: a ChaCha12 generator is seeded with `seed` and
/// consumed one weighted draw per (pattern, step) in row-major order.
pub fn sample_patterns(
    set: &ConfigurationSet,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Pattern>> {
    if count == 0 {
        return Err(Error::InvalidArgument("at least one draw is required".into()));
    }
    let weights: Vec<f64> = set.iter().map(|(_, w)| *w).collect();
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidArgument(format!("bad weights: {e}")))?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| Pattern::new((0..n).map(|_| set.entry(dist.sample(&mut rng)).0).collect()))
        .collect())
}
