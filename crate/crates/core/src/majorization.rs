//! Majorization of dephased eigenstates.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{eigh, HermitianOperator, OrthonormalBasis, ProbabilityVector, SpectralDecomposition};

/// Partial-sum shortfalls smaller than this are treated as satisfied.
pub const PARTIAL_SUM_TOL: f64 = 1e-12;
const TOTAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct MajorizationResult {
    pub majorized: bool,
    /// Index of the first partial sum where `v` exceeds `w`.
    pub first_violation_index: Option<usize>,
    /// `Σ_{j≤k} w↓_j − Σ_{j≤k} v↓_j` for every `k`.
    pub partial_sum_gaps: Vec<f64>,
}

/// Whether `v ≺ w`, i.e. the sorted partial sums of `w` dominate those of `v`.
pub fn majorizes(w: &ProbabilityVector, v: &ProbabilityVector) -> Result<MajorizationResult> {
    if w.len() != v.len() {
        return Err(Error::dim("majorization operands", w.len(), v.len()));
    }
    Ok(majorizes_slices(w.as_slice(), v.as_slice()))
}

fn majorizes_slices(w: &[f64], v: &[f64]) -> MajorizationResult {
    let mut ws = w.to_vec();
    let mut vs = v.to_vec();
    ws.sort_by(|a, b| b.total_cmp(a));
    vs.sort_by(|a, b| b.total_cmp(a));
    let (mut sw, mut sv) = (0.0, 0.0);
    let gaps: Vec<f64> = ws
        .iter()
        .zip(&vs)
        .map(|(a, b)| {
            sw += a;
            sv += b;
            sw - sv
        })
        .collect();
    let first_violation_index = gaps.iter().position(|&g| g < -PARTIAL_SUM_TOL);
    let totals_agree = (sw - sv).abs() <= TOTAL_TOL;
    MajorizationResult {
        majorized: first_violation_index.is_none() && totals_agree,
        first_violation_index,
        partial_sum_gaps: gaps,
    }
}

/// Index range of the central `fraction` of `n` items. The count is rounded
/// up, and up once more if needed so equal numbers are dropped at each end.
pub fn central_window(n: usize, fraction: f64) -> Result<Range<usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid("window", format!("fraction {fraction} not in (0, 1]")));
    }
    if n == 0 {
        return Ok(0..0);
    }
    let mut k = ((fraction * n as f64) - 1e-9).ceil().max(1.0) as usize;
    if (n - k.min(n)) % 2 == 1 {
        k += 1;
    }
    let k = k.min(n);
    let start = (n - k) / 2;
    Ok(start..start + k)
}

fn populations(spec: &SpectralDecomposition, basis: &OrthonormalBasis) -> Result<Vec<Vec<f64>>> {
    let c = basis.matrix().adjoint().matmul(spec.eigenvectors().matrix())?;
    let d = spec.dim();
    Ok((0..d)
        .map(|k| (0..d).map(|j| c.get(j, k).norm_sqr()).collect())
        .collect())
}

/// Fraction of the central `window` of eigenstate pairs (paired by energy
/// rank) for which the dephased chaotic eigenstate is majorized by the
/// dephased integrable one.
pub fn eigenstate_majorization_fraction(
    h_int: &HermitianOperator,
    h_chaos: &HermitianOperator,
    basis: &OrthonormalBasis,
    window: f64,
) -> Result<f64> {
    if h_int.dim() != h_chaos.dim() {
        return Err(Error::dim("integrable vs chaotic Hamiltonian", h_int.dim(), h_chaos.dim()));
    }
    let si = eigh(h_int)?;
    let sc = eigh(h_chaos)?;
    majorization_fraction_spec(&si, &sc, basis, window)
}

/// As [`eigenstate_majorization_fraction`] for existing decompositions.
pub fn majorization_fraction_spec(
    s_int: &SpectralDecomposition,
    s_chaos: &SpectralDecomposition,
    basis: &OrthonormalBasis,
    window: f64,
) -> Result<f64> {
    Ok(majorization_flags(s_int, s_chaos, basis)?.fraction(window)?)
}

/// Per-pair majorization outcomes in energy order.
#[derive(Clone, Debug, PartialEq)]
pub struct MajorizationFlags(pub Vec<bool>);

impl MajorizationFlags {
    pub fn fraction(&self, window: f64) -> Result<f64> {
        let w = central_window(self.0.len(), window)?;
        let n = w.len();
        if n == 0 {
            return Err(Error::NoSamples("majorization window"));
        }
        Ok(self.0[w].iter().filter(|&&b| b).count() as f64 / n as f64)
    }
}

/// Majorization outcome for every eigenstate pair.
pub fn majorization_flags(
    s_int: &SpectralDecomposition,
    s_chaos: &SpectralDecomposition,
    basis: &OrthonormalBasis,
) -> Result<MajorizationFlags> {
    if s_int.dim() != basis.dim() || s_chaos.dim() != basis.dim() {
        return Err(Error::dim("eigenstates vs basis", basis.dim(), s_int.dim().max(s_chaos.dim())));
    }
    let pi = populations(s_int, basis)?;
    let pc = populations(s_chaos, basis)?;
    Ok(MajorizationFlags(
        pi.par_iter()
            .zip(pc.par_iter())
            .map(|(w, v)| majorizes_slices(w, v).majorized)
            .collect(),
    ))
}

fn renyi2(p: &[f64]) -> f64 {
    -p.iter().map(|x| x * x).sum::<f64>().ln()
}

/// Checks the Schur-concave consequences of `v ≺ w`: Shannon and Rényi-2
/// entropies, and hence `c_rel` and `c2` of the corresponding dephased pure
/// states, do not decrease from `w` to `v`.
pub fn schur_concavity_check(w: &ProbabilityVector, v: &ProbabilityVector) -> Result<bool> {
    if !majorizes(w, v)?.majorized {
        return Err(Error::invalid("schur_concavity_check", "w does not majorize v"));
    }
    let tol = 1e-12;
    let shannon = v.shannon() >= w.shannon() - tol;
    let r2 = renyi2(v.as_slice()) >= renyi2(w.as_slice()) - tol;
    let c2 = (1.0 - v.sum_of_squares()) >= (1.0 - w.sum_of_squares()) - tol;
    Ok(shannon && r2 && c2)
}
