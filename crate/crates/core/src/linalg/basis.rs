use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::types::{BistochasticMatrix, DensityMatrix, ProbabilityVector, PureState, UnitaryOperator};
use crate::error::{Error, Result};

/// Ordered orthonormal basis `{|j⟩}`; column `j` of the underlying unitary is
/// `|j⟩`, and `Π_j = |j⟩⟨j|`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    columns: UnitaryOperator,
    labels: Option<Vec<String>>,
}

impl OrthonormalBasis {
    /// Validates orthonormality of the columns.
    pub fn new(columns: ComplexMatrix) -> Result<Self> {
        Ok(Self::from_unitary(UnitaryOperator::new(columns)?))
    }

    pub fn from_unitary(columns: UnitaryOperator) -> Self {
        Self { columns, labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::dim("basis labels", self.dim(), labels.len()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// The standard basis `{e_j}`.
    pub fn computational(d: usize) -> Self {
        Self::from_unitary(UnitaryOperator::identity(d))
    }

    /// Columns of the unitary DFT matrix, `⟨j|k⟩ = ω^{jk}/√d`.
    pub fn fourier(d: usize) -> Self {
        let norm = 1.0 / (d as f64).sqrt();
        let m = ComplexMatrix::from_fn(d, d, |j, k| {
            let angle = 2.0 * std::f64::consts::PI * ((j * k) % d) as f64 / d as f64;
            Complex64::from_polar(norm, angle)
        });
        Self::from_unitary(UnitaryOperator::new_unchecked(m))
    }

    pub fn dim(&self) -> usize {
        self.columns.dim()
    }

    pub fn unitary(&self) -> &UnitaryOperator {
        &self.columns
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.columns.matrix()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.matrix().column(j)
    }

    /// `Π_j = |j⟩⟨j|`.
    pub fn projector(&self, j: usize) -> ComplexMatrix {
        let v = self.vector(j);
        ComplexMatrix::outer(&v, &v)
    }

    /// Reorders the basis vectors: new column `j` is old column `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let d = self.dim();
        let mut seen = vec![false; d];
        if perm.len() != d || perm.iter().any(|&p| p >= d || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::invalid("basis permutation", "not a permutation of 0..d"));
        }
        let m = self.matrix();
        let cols = ComplexMatrix::from_fn(d, d, |i, j| m.get(i, perm[j]));
        let labels = self.labels.as_ref().map(|l| perm.iter().map(|&p| l[p].clone()).collect());
        Ok(Self {
            columns: UnitaryOperator::new_unchecked(cols),
            labels,
        })
    }

    /// Image basis `{U|j⟩}`.
    pub fn transformed(&self, u: &UnitaryOperator) -> Result<Self> {
        Ok(Self {
            columns: u.compose(&self.columns)?,
            labels: self.labels.clone(),
        })
    }

    /// Expansion coefficients `⟨j|ψ⟩`.
    pub fn coefficients(&self, psi: &PureState) -> Result<Vec<Complex64>> {
        let d = self.dim();
        if psi.dim() != d {
            return Err(Error::dim("state in basis", d, psi.dim()));
        }
        let m = self.matrix();
        let a = psi.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for i in 0..d {
            let ai = a[i];
            for (j, o) in out.iter_mut().enumerate() {
                *o += m.get(i, j).conj() * ai;
            }
        }
        Ok(out)
    }

    /// Diagonal `⟨j|X|j⟩` of an operator in this basis.
    pub fn diagonal_of(&self, x: &ComplexMatrix) -> Result<Vec<Complex64>> {
        let d = self.dim();
        if x.rows() != d || x.cols() != d {
            return Err(Error::dim("operator in basis", d, x.rows()));
        }
        let b = self.matrix();
        let xb = x.matmul(b)?;
        Ok((0..d)
            .map(|j| (0..d).map(|i| b.get(i, j).conj() * xb.get(i, j)).sum())
            .collect())
    }

    /// Matrix elements `⟨j|X|k⟩`, i.e. `B† X B`.
    pub fn represent(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let b = self.matrix();
        b.adjoint().matmul(x)?.matmul(b)
    }

    fn is_standard(&self) -> bool {
        let m = self.matrix();
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| m.get(i, j) == if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }))
    }
}

/// Dephasing superoperator `𝒟_𝔹(X) = Σ_j Π_j X Π_j`.
pub fn dephase(rho: &DensityMatrix, basis: &OrthonormalBasis) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(dephase_operator(rho.matrix(), basis)?))
}

/// Dephasing of an arbitrary square operator.
pub fn dephase_operator(x: &ComplexMatrix, basis: &OrthonormalBasis) -> Result<ComplexMatrix> {
    let d = basis.dim();
    if x.rows() != d || x.cols() != d {
        return Err(Error::dim("dephasing", d, x.rows()));
    }
    if basis.is_standard() {
        return Ok(ComplexMatrix::diagonal(&x.diag()));
    }
    let p = basis.diagonal_of(x)?;
    let b = basis.matrix();
    Ok(&b.scale_columns(&p) * &b.adjoint())
}

/// Which factor of a bipartition to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Reduced state of `ρ` on `H_A ⊗ H_B` with global index `a·d_b + b`.
pub fn partial_trace(rho: &DensityMatrix, dims: (usize, usize), keep: Subsystem) -> Result<DensityMatrix> {
    let (da, db) = dims;
    if da == 0 || db == 0 || da * db != rho.dim() {
        return Err(Error::dim("partial trace factorisation", rho.dim(), da * db));
    }
    let m = rho.matrix();
    let out = match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |a, a2| (0..db).map(|b| m.get(a * db + b, a2 * db + b)).sum()),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |b, b2| (0..da).map(|a| m.get(a * db + b, a * db + b2)).sum()),
    };
    Ok(DensityMatrix::new_unchecked(out))
}

/// Squared Schmidt coefficients `λ_j²` of a bipartite pure state, sorted
/// descending; length `min(d_a, d_b)`. Computed from the singular values
/// of the `d_a × d_b` coefficient matrix.
pub fn schmidt_squared(psi: &PureState, dims: (usize, usize)) -> Result<ProbabilityVector> {
    let (da, db) = dims;
    if da == 0 || db == 0 || da * db != psi.dim() {
        return Err(Error::dim("schmidt factorisation", psi.dim(), da * db));
    }
    let a = psi.amplitudes();
    let m = faer::Mat::<Complex64>::from_fn(da, db, |i, j| a[i * db + j]);
    let sv = m
        .singular_values()
        .map_err(|_| Error::NoConvergence { dim: da.max(db) })?;
    let mut p: Vec<f64> = sv.iter().map(|s| s * s).collect();
    p.sort_by(|x, y| y.total_cmp(x));
    // renormalise away round-off so the result passes the 1e-10 sum check
    let total: f64 = p.iter().sum();
    ProbabilityVector::new(p.into_iter().map(|x| x / total).collect())
}

/// `X_jk = |⟨b1_j|b2_k⟩|² = Tr(Π_j Π'_k)`.
pub fn overlap_matrix(b1: &OrthonormalBasis, b2: &OrthonormalBasis) -> Result<BistochasticMatrix> {
    let d = b1.dim();
    if b2.dim() != d {
        return Err(Error::dim("basis overlap", d, b2.dim()));
    }
    let g = b1.matrix().adjoint().matmul(b2.matrix())?;
    BistochasticMatrix::new(d, g.as_slice().iter().map(|z| z.norm_sqr()).collect())
}
