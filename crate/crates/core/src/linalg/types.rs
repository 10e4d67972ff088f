//! Validated wrappers around [`ComplexMatrix`] and real vectors.
//!
//! Structural tolerances: `1e-12` for properties established at
//! construction (hermiticity, normalisation), `1e-10` for properties that
//! accumulate round-off (unitarity, trace, stochasticity).

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
pub const PROB_NEG_TOL: f64 = 1e-12;
pub const PROB_SUM_TOL: f64 = 1e-10;

fn require_square(m: &ComplexMatrix, context: &'static str) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::dim(context, m.rows(), m.cols()));
    }
    Ok(m.rows())
}

/// Replaces `m` by `(m + m†)/2`, which is exactly Hermitian.
fn symmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    let d = m.rows();
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(m.get(i, i).re, 0.0)
        } else {
            (m.get(i, j) + m.get(j, i).conj()) * 0.5
        }
    })
}

fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let d = m.rows();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in i..d {
            worst = worst.max((m.get(i, j) - m.get(j, i).conj()).norm());
        }
    }
    worst
}

/// Hermitian operator; symmetrized exactly after the tolerance check.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        require_square(&m, "hermitian operator")?;
        let defect = hermiticity_defect(&m);
        if defect > HERMITIAN_TOL {
            return Err(Error::invalid("hermitian operator", format!("‖M − M†‖_max = {defect:e}")));
        }
        Ok(Self(symmetrize(&m)))
    }

    /// Real symmetric matrix from row-major data.
    pub fn from_real(d: usize, data: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real(d, d, data)?)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

/// Unitary operator, `‖U†U − I‖_max ≤ 1e-10`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator(ComplexMatrix);

impl UnitaryOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let d = require_square(&m, "unitary operator")?;
        let defect = m.adjoint().matmul(&m)?.max_abs_diff(&ComplexMatrix::identity(d));
        if defect > UNITARY_TOL {
            return Err(Error::invalid("unitary operator", format!("‖U†U − I‖_max = {defect:e}")));
        }
        Ok(Self(m))
    }

    /// For matrices that are unitary by construction (eigenvector matrices,
    /// spectral exponentials, products of unitaries). Skips the `O(d³)` check.
    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        debug_assert!(m.is_square());
        Self(m)
    }

    pub fn identity(d: usize) -> Self {
        Self(ComplexMatrix::identity(d))
    }

    /// Diagonal unitary with the given unit-modulus entries.
    pub fn diagonal(phases: &[Complex64]) -> Result<Self> {
        for z in phases {
            if (z.norm() - 1.0).abs() > NORM_TOL {
                return Err(Error::invalid("diagonal unitary", format!("|phase| = {}", z.norm())));
            }
        }
        Ok(Self(ComplexMatrix::diagonal(phases)))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Composition `self ∘ other`, i.e. the matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.matmul(&other.0)?))
    }

    /// Adjoint action `U X U†`.
    pub fn conjugate(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.0.matmul(x)?.matmul(&self.0.adjoint())
    }

    /// Heisenberg action `U† X U`.
    pub fn heisenberg(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.0.adjoint().matmul(x)?.matmul(&self.0)
    }
}

/// Normalised state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(Vec<Complex64>);

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid("pure state", "empty amplitude vector"));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("pure state"));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid("pure state", format!("‖ψ‖ = {norm}")));
        }
        Ok(Self(amplitudes))
    }

    /// Normalises an arbitrary nonzero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid("pure state", "cannot normalise a zero or non-finite vector"));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis_state(d: usize, j: usize) -> Result<Self> {
        if j >= d {
            return Err(Error::invalid("basis state", format!("index {j} out of range for d={d}")));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[j] = Complex64::new(1.0, 0.0);
        Ok(Self(v))
    }

    /// `(1/√d) Σ_j |j⟩`.
    pub fn maximally_coherent(d: usize) -> Self {
        let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        Self(vec![a; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix(ComplexMatrix::outer(&self.0, &self.0))
    }

    pub fn apply(&self, u: &UnitaryOperator) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::dim("unitary on state", self.dim(), u.dim()));
        }
        let m = u.matrix();
        let out = (0..self.dim())
            .map(|i| m.row(i).iter().zip(&self.0).map(|(a, b)| a * b).sum())
            .collect();
        Ok(Self(out))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let h = HermitianOperator::new(m)?;
        let tr = h.matrix().trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::invalid("density matrix", format!("Tr ρ = {tr}")));
        }
        let lowest = super::eigen::eigvalsh(&h)?.first().copied().unwrap_or(0.0);
        if lowest < -PSD_TOL {
            return Err(Error::invalid("density matrix", format!("eigenvalue {lowest:e} < 0")));
        }
        Ok(Self(h.into_matrix()))
    }

    /// Skips the spectral positivity check; for states produced by
    /// positivity-preserving maps of valid states.
    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn diagonal(p: &ProbabilityVector) -> Self {
        let diag: Vec<Complex64> = p.as_slice().iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self(ComplexMatrix::diagonal(&diag))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.0.frobenius_norm_sq()
    }

    /// Clipped eigenvalues, ascending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let h = HermitianOperator(self.0.clone());
        Ok(super::eigen::eigvalsh(&h)?.into_iter().map(|x| x.max(0.0)).collect())
    }

    /// von Neumann entropy in nats, `0·ln 0 := 0`.
    pub fn entropy(&self) -> Result<f64> {
        Ok(shannon_entropy(&self.spectrum()?))
    }
}

/// `−Σ p ln p` over the strictly positive entries.
pub(crate) fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// Probability vector. Entries in `[−1e-12, 0)` are clamped to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(mut p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::invalid("probability vector", "empty"));
        }
        for x in p.iter_mut() {
            if !x.is_finite() {
                return Err(Error::NonFinite("probability vector"));
            }
            if *x < -PROB_NEG_TOL {
                return Err(Error::invalid("probability vector", format!("negative entry {x:e}")));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::invalid("probability vector", format!("entries sum to {s}")));
        }
        Ok(Self(p))
    }

    pub fn uniform(d: usize) -> Self {
        Self(vec![1.0 / d as f64; d])
    }

    /// `p_j = |⟨j|ψ⟩|²` in the given basis.
    pub fn from_state(psi: &PureState, basis: &super::OrthonormalBasis) -> Result<Self> {
        let amps = basis.coefficients(psi)?;
        Self::new(amps.iter().map(|z| z.norm_sqr()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Entries sorted in non-increasing order.
    pub fn sorted_descending(&self) -> Vec<f64> {
        let mut v = self.0.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Shannon entropy in nats.
    pub fn shannon(&self) -> f64 {
        shannon_entropy(&self.0)
    }

    /// `Σ p_j²`.
    pub fn sum_of_squares(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }
}

/// Real square matrix with unit row and column sums, entries in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BistochasticMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl BistochasticMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::dim("bistochastic matrix", dim * dim, data.len()));
        }
        if data.iter().any(|&x| !(-PROB_NEG_TOL..=1.0 + PROB_SUM_TOL).contains(&x)) {
            return Err(Error::invalid("bistochastic matrix", "entry outside [0, 1]"));
        }
        for i in 0..dim {
            let row: f64 = data[i * dim..(i + 1) * dim].iter().sum();
            let col: f64 = (0..dim).map(|k| data[k * dim + i]).sum();
            if (row - 1.0).abs() > PROB_SUM_TOL || (col - 1.0).abs() > PROB_SUM_TOL {
                return Err(Error::invalid(
                    "bistochastic matrix",
                    format!("line {i}: row sum {row}, column sum {col}"),
                ));
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.data[j * self.dim + k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `Tr(XᵀX) = Σ_jk X_jk²`.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    /// `XᵀX`, again bistochastic.
    pub fn gram(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for j in 0..d {
            for k in 0..d {
                let x = self.get(j, k);
                if x == 0.0 {
                    continue;
                }
                for m in 0..d {
                    out[k * d + m] += x * self.get(j, m);
                }
            }
        }
        out
    }
}
