use faer::Side;
use num_complex::Complex64;

use super::basis::OrthonormalBasis;
use super::matrix::ComplexMatrix;
use super::types::{HermitianOperator, PureState, UnitaryOperator};
use crate::error::{Error, Result};

/// Eigenvalues closer than this (relative to `max(1, ‖H‖_max)`) are treated
/// as one degenerate cluster for ordering purposes and flagged by
/// [`SpectralDecomposition::is_nondegenerate`].
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Ascending eigenvalues with matching orthonormal eigenvector columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: UnitaryOperator,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &UnitaryOperator {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> PureState {
        PureState::normalized(self.eigenvectors.matrix().column(k)).expect("eigenvector columns are normalised")
    }

    /// The eigenbasis `𝔹_H` as an [`OrthonormalBasis`].
    pub fn basis(&self) -> OrthonormalBasis {
        OrthonormalBasis::from_unitary(self.eigenvectors.clone())
    }

    /// Smallest gap between consecutive eigenvalues (`+∞` for `d = 1`).
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.min_gap() > DEGENERACY_TOL
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lam: Vec<Complex64> = self.eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let v = self.eigenvectors.matrix();
        &v.scale_columns(&lam) * &v.adjoint()
    }

    /// `‖V Λ V† − H‖_max`.
    pub fn residual(&self, h: &HermitianOperator) -> f64 {
        self.reconstruct().max_abs_diff(h.matrix())
    }

    /// `U_t = V e^{−iΛt} V†`.
    pub fn evolve(&self, t: f64) -> Result<UnitaryOperator> {
        evolve(self, t)
    }
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(h: &HermitianOperator) -> Result<Vec<f64>> {
    let m = h.matrix();
    let dim = h.dim();
    let vals = if m.is_real() {
        m.to_faer_real().self_adjoint_eigenvalues(Side::Lower)
    } else {
        m.to_faer().self_adjoint_eigenvalues(Side::Lower)
    };
    vals.map_err(|_| Error::NoConvergence { dim })
}

/// Full Hermitian eigendecomposition.
///
/// Real symmetric input takes the real solver. Each eigenvector is fixed by
/// making its largest-magnitude entry real and positive; inside a degenerate
/// cluster the columns are ordered by (position of that entry, decreasing
/// magnitude), so that repeated runs index eigenstates identically.
pub fn eigh(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let m = h.matrix();
    let dim = h.dim();
    let (eigenvalues, mut vecs) = if m.is_real() {
        let evd = m
            .to_faer_real()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::NoConvergence { dim })?;
        let vals: Vec<f64> = (0..dim).map(|k| evd.S()[k]).collect();
        (vals, ComplexMatrix::from_faer_real(evd.U()))
    } else {
        let evd = m
            .to_faer()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::NoConvergence { dim })?;
        let vals: Vec<f64> = (0..dim).map(|k| evd.S()[k].re).collect();
        (vals, ComplexMatrix::from_faer(evd.U()))
    };
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::NoConvergence { dim });
    }

    // phase convention
    let mut keys = Vec::with_capacity(dim);
    for k in 0..dim {
        let (mut arg, mut best) = (0usize, -1.0f64);
        for i in 0..dim {
            let a = vecs.get(i, k).norm();
            if a > best * (1.0 + 1e-12) {
                arg = i;
                best = a;
            }
        }
        let z = vecs.get(arg, k);
        let phase = z.conj() / z.norm();
        for i in 0..dim {
            let v = vecs.get(i, k) * phase;
            vecs.set(i, k, v);
        }
        vecs.set(arg, k, Complex64::new(vecs.get(arg, k).re, 0.0));
        keys.push((arg, best));
    }

    // deterministic order inside degenerate clusters
    let scale = m.max_abs().max(1.0);
    let mut order: Vec<usize> = (0..dim).collect();
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && eigenvalues[end] - eigenvalues[end - 1] <= DEGENERACY_TOL * scale {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by(|&a, &b| {
                keys[a].0.cmp(&keys[b].0).then(keys[b].1.total_cmp(&keys[a].1))
            });
        }
        start = end;
    }
    if order.iter().enumerate().any(|(i, &o)| i != o) {
        vecs = ComplexMatrix::from_fn(dim, dim, |i, j| vecs.get(i, order[j]));
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: UnitaryOperator::new_unchecked(vecs),
    })
}

/// `U_t = Σ_k e^{−iE_k t} P_k`, computed from the spectral decomposition.
pub fn evolve(spec: &SpectralDecomposition, t: f64) -> Result<UnitaryOperator> {
    if !t.is_finite() {
        return Err(Error::NonFinite("evolution time"));
    }
    let phases: Vec<Complex64> = spec
        .eigenvalues
        .iter()
        .map(|&e| Complex64::from_polar(1.0, -e * t))
        .collect();
    let v = spec.eigenvectors.matrix();
    Ok(UnitaryOperator::new_unchecked(&v.scale_columns(&phases) * &v.adjoint()))
}
