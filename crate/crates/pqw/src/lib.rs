//! Simulator for discrete-time quantum walks on dynamical percolation
//! graphs.
//!
//! A coined walker lives on a short line graph whose links blink in and out
//! each step with probability 𝔭. Each step applies the coin Ĉ followed by a
//! shift Ŝ_κ whose gaps reflect the walker, and averaging over edge
//! configurations κ turns the closed dynamics into a random unitary map
//!
//! ```text
//! ρ(n) = Σ_κ p(κ, 𝔭) (Ŝ_κ Ĉ) ρ(n-1) (Ŝ_κ Ĉ)†
//! ```
//!
//! The crate builds the operators (including the decomposed Ŝ Ĝ_κ Ŝ form
//! that pins down the reflection phase), evolves states pattern-wise and by
//! the map, extracts the coin tomography observables (Stokes parameters,
//! Hilbert-Schmidt distance from the maximally mixed state, revival
//! detection), layers a four-parameter systematic-error model on top, and
//! propagates parameter uncertainty to Monte Carlo error bars. The `pqw`
//! binary drives all of it from a JSON config and writes CSV curves.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod observables;
pub mod qmath;
pub mod realistic;
pub mod runner;

pub use error::{Error, Result};
