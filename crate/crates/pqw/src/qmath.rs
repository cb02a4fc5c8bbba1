//! Minimal dense complex linear algebra and quantum-state primitives.
//!
//! Everything here is sized for joint position⊗coin Hilbert spaces of a few
//! tens of dimensions, so storage is dense and row-major throughout. The
//! joint-basis convention used by the whole crate is
//! `index = position_index * 2 + coin_index` with coin index 0 = |H⟩ and
//! 1 = |V⟩, positions ordered ascending.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for floating-point comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Trace below which a subnormalized state counts as extinguished.
pub const TRACE_UNDERFLOW: f64 = 1e-15;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex matrix with row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C_ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, C_ONE);
        }
        m
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self { rows: nrows, cols: ncols, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    /// Standard matrix product; fails unless `self.cols == other.rows`.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C_ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= factor;
        }
        out
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} to {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&other.data) {
            *v += w;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.add(&other.scale(-C_ONE))
    }

    /// In-place `self += factor * other`; shapes must already agree.
    pub fn add_scaled_assign(&mut self, factor: f64, other: &ComplexMatrix) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (v, w) in self.data.iter_mut().zip(&other.data) {
            *v += factor * w;
        }
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == C_ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, vec: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != vec.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} to vector of length {}",
                self.rows,
                self.cols,
                vec.len()
            )));
        }
        let mut out = vec![C_ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = C_ZERO;
            for j in 0..self.cols {
                acc += self.get(i, j) * vec[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Largest entrywise absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise absolute difference; infinite if shapes differ.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise equality within an absolute tolerance.
    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.dagger()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let gram = self.dagger().matmul(self).expect("square product");
        gram.max_abs_diff(&ComplexMatrix::identity(self.rows)) <= tol
    }
}

/// Eigenvalues of a Hermitian matrix by the cyclic Jacobi method, ascending.
///
/// Only eigenvalues are needed anywhere in the crate (positivity checks),
/// so eigenvectors are not accumulated.
pub fn hermitian_eigenvalues(matrix: &ComplexMatrix) -> Result<Vec<f64>> {
    if !matrix.is_square() {
        return Err(Error::DimensionMismatch("eigenvalues of a non-square matrix".into()));
    }
    if !matrix.is_hermitian(1e-9) {
        return Err(Error::InvalidArgument("matrix is not Hermitian".into()));
    }
    let n = matrix.rows();
    let mut a = matrix.clone();
    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a.get(i, j).norm_sqr();
            }
        }
        s
    };
    for _sweep in 0..100 {
        if off(&a) < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a.get(p, q);
                let mag = g.norm();
                if mag < 1e-300 {
                    continue;
                }
                let phase = g / mag;
                let alpha = a.get(p, p).re;
                let beta = a.get(q, q).re;
                // annihilation condition: 2τ·cs + c² − s² = 0 with
                // τ = (β − α)/(2|g|); take the small-magnitude root
                let tau = (beta - alpha) / (2.0 * mag);
                let t = -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A <- J† A J with plane rotation J:
                //   J[p][p] = c, J[p][q] = -s e^{iφ}, J[q][p] = s e^{-iφ}, J[q][q] = c
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp + s * phase.conj() * akq);
                    a.set(k, q, -s * phase * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk + s * phase * aqk);
                    a.set(q, k, -s * phase.conj() * apk + c * aqk);
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(eigs)
}

/// Pure state over the joint position⊗coin basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// Basis vector |index⟩ in a `dim`-dimensional space.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![C_ZERO; dim];
        amplitudes[index] = C_ONE;
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply(&self, op: &ComplexMatrix) -> Result<PureState> {
        Ok(PureState::new(op.apply(&self.amplitudes)?))
    }

    /// Rank-1 projector |ψ⟩⟨ψ|.
    pub fn outer(&self) -> DensityMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.amplitudes[i] * self.amplitudes[j].conj());
            }
        }
        DensityMatrix { matrix: m }
    }
}

/// Density matrix over the joint position⊗coin basis (or any square space).
///
/// Constructors do not force normalization: lossy evolutions legitimately
/// produce subnormalized states. Validity is checked where the contracts
/// demand it.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale(Complex64::from(1.0 / dim as f64)) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `U ρ U†` (or `K ρ K†` for a non-unitary K).
    pub fn conjugate_by(&self, op: &ComplexMatrix) -> Result<DensityMatrix> {
        let m = op.matmul(&self.matrix)?.matmul(&op.dagger())?;
        Ok(DensityMatrix { matrix: m })
    }

    pub fn scale(&self, factor: f64) -> DensityMatrix {
        DensityMatrix { matrix: self.matrix.scale(Complex64::from(factor)) }
    }

    /// Rescales to unit trace; fails if the trace has underflowed.
    pub fn renormalized(&self, context: &str) -> Result<DensityMatrix> {
        let t = self.trace();
        if t < TRACE_UNDERFLOW {
            return Err(Error::SignalExtinction { context: context.into(), trace: t });
        }
        Ok(self.scale(1.0 / t))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigenvalues(&self.matrix)?[0])
    }

    /// Hermitian, unit trace (within `tol`) and PSD (within `psd_tol`).
    pub fn validate(&self, tol: f64, psd_tol: f64) -> Result<()> {
        if !self.matrix.is_hermitian(tol) {
            return Err(Error::InvalidArgument("density matrix is not Hermitian".into()));
        }
        if (self.trace() - 1.0).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "density matrix trace {} is not 1",
                self.trace()
            )));
        }
        let min = self.min_eigenvalue()?;
        if min < -psd_tol {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {min}"
            )));
        }
        Ok(())
    }

    /// Traces out the position register, leaving the 2x2 coin state.
    ///
    /// Uses the joint-basis convention `index = position * 2 + coin`.
    pub fn partial_trace_position(&self) -> Result<CoinDensityMatrix> {
        let dim = self.dim();
        if dim % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "walker dimension {dim} is not even"
            )));
        }
        let num_positions = dim / 2;
        let mut coin = ComplexMatrix::zeros(2, 2);
        for c1 in 0..2 {
            for c2 in 0..2 {
                let mut acc = C_ZERO;
                for v in 0..num_positions {
                    acc += self.matrix.get(v * 2 + c1, v * 2 + c2);
                }
                coin.set(c1, c2, acc);
            }
        }
        Ok(CoinDensityMatrix { inner: DensityMatrix { matrix: coin } })
    }
}

/// The reduced 2x2 coin state.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinDensityMatrix {
    inner: DensityMatrix,
}

impl CoinDensityMatrix {
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != 2 || matrix.cols() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "coin state must be 2x2, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { inner: DensityMatrix::from_matrix(matrix)? })
    }

    pub fn maximally_mixed() -> Self {
        Self { inner: DensityMatrix::maximally_mixed(2) }
    }

    pub fn as_density(&self) -> &DensityMatrix {
        &self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner.matrix.get(i, j)
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }
}

/// Squared Hilbert-Schmidt distance `Tr[(a - b)²]` between Hermitian states.
///
/// Computed as the sum of squared entry magnitudes of the difference, which
/// is exactly symmetric in its arguments and nonnegative.
pub fn hs_distance_sq(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compare states of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a.matrix.get(i, j) - b.matrix.get(i, j)).norm_sqr();
        }
    }
    Ok(acc)
}
