use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{overlap_matrix, ComplexMatrix, HermitianOperator, OrthonormalBasis, UnitaryOperator};

/// Anything with a square matrix representation.
pub trait Operator {
    fn op_matrix(&self) -> &ComplexMatrix;
}

impl Operator for ComplexMatrix {
    fn op_matrix(&self) -> &ComplexMatrix {
        self
    }
}

impl Operator for HermitianOperator {
    fn op_matrix(&self) -> &ComplexMatrix {
        self.matrix()
    }
}

impl Operator for UnitaryOperator {
    fn op_matrix(&self) -> &ComplexMatrix {
        self.matrix()
    }
}

fn same_dim(context: &'static str, a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::dim(context, a, b));
    }
    Ok(())
}

/// `(1/d) ‖[V, W(t)]‖²₂`.
pub fn squared_commutator(v: &impl Operator, w: &impl Operator, u_t: &UnitaryOperator) -> Result<f64> {
    let (v, w) = (v.op_matrix(), w.op_matrix());
    same_dim("V vs W", v.rows(), w.rows())?;
    same_dim("operator vs evolution", v.rows(), u_t.dim())?;
    let wt = u_t.heisenberg(w)?;
    Ok(v.commutator(&wt)?.frobenius_norm_sq() / v.rows() as f64)
}

/// `F = (1/d) Tr(W(t)† V† W(t) V)`.
pub fn otoc_f(v: &impl Operator, w: &impl Operator, u_t: &UnitaryOperator) -> Result<Complex64> {
    let (v, w) = (v.op_matrix(), w.op_matrix());
    same_dim("V vs W", v.rows(), w.rows())?;
    same_dim("operator vs evolution", v.rows(), u_t.dim())?;
    let wt = u_t.heisenberg(w)?;
    let left = wt.adjoint().matmul(&v.adjoint())?;
    let right = wt.matmul(v)?;
    Ok(left.trace_of_product(&right) / v.rows() as f64)
}

/// `1 − (1/d) Σ X_jk²` for a unistochastic `X`, evaluated as
/// `(1/d) Σ_j [Σ_{k≠j} X_jk (1 − X_jk) + X_jj Σ_{k≠j} X_jk]`, which avoids
/// cancellation when `X` is close to the identity.
pub(crate) fn cgp_from_x(d: usize, x: impl Fn(usize, usize) -> f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..d {
        let mut off = 0.0;
        let mut term = 0.0;
        for k in 0..d {
            if k != j {
                let v = x(j, k);
                off += v;
                term += v * (1.0 - v);
            }
        }
        acc += term + x(j, j) * off;
    }
    (acc / d as f64).max(0.0)
}

/// CGP from the overlap matrix `X_jk = |⟨j|U|k⟩|²`.
pub fn cgp_from_overlaps(x: &crate::linalg::BistochasticMatrix) -> f64 {
    cgp_from_x(x.dim(), |j, k| x.get(j, k))
}

/// Coherence-generating power `1 − (1/d) Tr(XᵀX)`,
/// `X_jk = |⟨j|U|k⟩|²` in basis `B`.
pub fn cgp(u: &UnitaryOperator, basis: &OrthonormalBasis) -> Result<f64> {
    same_dim("unitary vs basis", basis.dim(), u.dim())?;
    let m = basis.represent(u.matrix())?;
    Ok(cgp_from_x(m.rows(), |j, k| m.get(j, k).norm_sqr()))
}

/// `(1/2d) Σ_jk ‖[Π_j, U Π_k U†]‖²₂`, computed with explicit projectors.
pub fn cgp_commutator_form(u: &UnitaryOperator, basis: &OrthonormalBasis) -> Result<f64> {
    same_dim("unitary vs basis", basis.dim(), u.dim())?;
    let d = basis.dim();
    let projectors: Vec<ComplexMatrix> = (0..d).map(|j| basis.projector(j)).collect();
    let mut acc = 0.0;
    for pk in &projectors {
        let upk = u.conjugate(pk)?;
        for pj in &projectors {
            acc += pj.commutator(&upk)?.frobenius_norm_sq();
        }
    }
    Ok(acc / (2.0 * d as f64))
}

/// The unitary mapping `|j_from⟩ ↦ |j_to⟩`, i.e. `B_to B_from†`.
pub fn intertwiner(from: &OrthonormalBasis, to: &OrthonormalBasis) -> Result<UnitaryOperator> {
    same_dim("basis pair", from.dim(), to.dim())?;
    Ok(to.unitary().compose(&from.unitary().adjoint())?)
}

/// `D²(𝒜_1, 𝒜_2) = 2(d − Tr XᵀX)` with `X` the overlap matrix.
pub fn grassmannian_distance_sq(b1: &OrthonormalBasis, b2: &OrthonormalBasis) -> Result<f64> {
    same_dim("basis pair", b1.dim(), b2.dim())?;
    let x = overlap_matrix(b1, b2)?;
    Ok(2.0 * b1.dim() as f64 * cgp_from_overlaps(&x))
}

/// A unitary given by its eigenbasis and unit-modulus eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryEigensystem {
    basis: OrthonormalBasis,
    eigenphases: Vec<Complex64>,
}

impl UnitaryEigensystem {
    pub fn new(basis: OrthonormalBasis, eigenphases: Vec<Complex64>) -> Result<Self> {
        same_dim("eigenphases", basis.dim(), eigenphases.len())?;
        if eigenphases.iter().any(|z| (z.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::invalid("eigenphases", "not unit modulus"));
        }
        Ok(Self { basis, eigenphases })
    }

    /// Diagonal unitary in the computational basis.
    pub fn diagonal(eigenphases: Vec<Complex64>) -> Result<Self> {
        Self::new(OrthonormalBasis::computational(eigenphases.len()), eigenphases)
    }

    /// Diagonal Hermitian unitary with eigenvalues `±1`.
    pub fn diagonal_real(signs: &[f64]) -> Result<Self> {
        Self::diagonal(signs.iter().map(|&s| Complex64::new(s, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.eigenphases.len()
    }

    pub fn basis(&self) -> &OrthonormalBasis {
        &self.basis
    }

    pub fn eigenphases(&self) -> &[Complex64] {
        &self.eigenphases
    }

    /// `Σ_j v_j |j⟩⟨j|`.
    pub fn operator(&self) -> UnitaryOperator {
        let b = self.basis.matrix();
        let m = &b.scale_columns(&self.eigenphases) * &b.adjoint();
        UnitaryOperator::new_unchecked(m)
    }
}

/// `C = cgp_part + offdiag_part`, with `total` computed independently.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OtocDecomposition {
    pub total: f64,
    /// `2 𝔠` of the unitary taking `B_V` to the evolved `B_W`.
    pub cgp_part: f64,
    pub offdiag_part: f64,
    /// `|total − cgp_part − offdiag_part|`.
    pub residual: f64,
}

/// `A_jk = ⟨j_V| U_t† |k_W⟩`: column `k` is the Heisenberg-evolved
/// `|k_W⟩` expressed in `B_V`.
pub(crate) fn evolved_overlaps(
    bv: &OrthonormalBasis,
    bw: &OrthonormalBasis,
    u_t: &UnitaryOperator,
) -> Result<ComplexMatrix> {
    bv.matrix().adjoint().matmul(&u_t.matrix().adjoint().matmul(bw.matrix())?)
}

/// Splits `Σ_{jklm} v_j* w_k* v_l w_m Tr(Π̃_k(t) Π_j Π̃_m(t) Π_l)` given the
/// evolved overlaps `A`; returns `(cgp_part, offdiag_part)`.
pub(crate) fn split_from_overlaps(a: &ComplexMatrix, v: &[Complex64], w: &[Complex64]) -> Result<(f64, f64)> {
    let d = a.rows();
    let c = cgp_from_x(d, |j, k| a.get(j, k).norm_sqr());
    let diag: f64 = a.as_slice().iter().map(|z| z.norm_sqr().powi(2)).sum();
    // G_km = Σ_j v_j* conj(A_jk) A_jm, and the full sum is
    // Σ_km w_k* w_m |G_km|².
    let vconj: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
    let mut scaled = a.clone();
    for j in 0..d {
        for k in 0..d {
            scaled.set(j, k, a.get(j, k) * vconj[j]);
        }
    }
    let g = a.adjoint().matmul(&scaled)?;
    let mut full = Complex64::new(0.0, 0.0);
    for k in 0..d {
        for m in 0..d {
            full += w[k].conj() * w[m] * g.get(k, m).norm_sqr();
        }
    }
    let offdiag = -2.0 / d as f64 * (full.re - diag);
    Ok((2.0 * c, offdiag))
}

/// Splits the squared commutator of `V` and `W(t)` into twice the CGP of
/// `U_t† · intertwiner(B_V → B_W)` in `B_V` plus the off-diagonal remainder
/// over index pairs `(j,k) ≠ (l,m)`.
pub fn otoc_cgp_decomposition(
    v: &UnitaryEigensystem,
    w: &UnitaryEigensystem,
    u_t: &UnitaryOperator,
) -> Result<OtocDecomposition> {
    same_dim("V vs W", v.dim(), w.dim())?;
    same_dim("operator vs evolution", v.dim(), u_t.dim())?;
    let a = evolved_overlaps(v.basis(), w.basis(), u_t)?;
    let (cgp_part, offdiag_part) = split_from_overlaps(&a, v.eigenphases(), w.eigenphases())?;
    let total = squared_commutator(&v.operator(), &w.operator(), u_t)?;
    Ok(OtocDecomposition {
        total,
        cgp_part,
        offdiag_part,
        residual: (total - cgp_part - offdiag_part).abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionMode {
    /// `Σ_α C_{Π_α, Π̃_β}` for one `β`.
    SingleBeta(usize),
    /// `Σ_{αβ} C_{Π_α, Π̃_β}`.
    Full,
}

/// Squared commutators between the projectors of `B_V` and the evolved
/// projectors of `B_W`, summed. For rank-one projectors
/// `‖[P, Q]‖²₂ = 2(Tr PQ − (Tr PQ)²)`.
pub fn projection_otoc_sum(
    bv: &OrthonormalBasis,
    bw: &OrthonormalBasis,
    u_t: &UnitaryOperator,
    mode: ProjectionMode,
) -> Result<f64> {
    same_dim("basis pair", bv.dim(), bw.dim())?;
    same_dim("basis vs evolution", bv.dim(), u_t.dim())?;
    let d = bv.dim();
    let betas = match mode {
        ProjectionMode::SingleBeta(b) if b >= d => {
            return Err(Error::invalid("projector index", format!("beta = {b} not in 0..{d}")))
        }
        ProjectionMode::SingleBeta(b) => b..b + 1,
        ProjectionMode::Full => 0..d,
    };
    let a = evolved_overlaps(bv, bw, u_t)?;
    let mut acc = 0.0;
    for beta in betas {
        for alpha in 0..d {
            let x = a.get(alpha, beta).norm_sqr();
            acc += x * (1.0 - x);
        }
    }
    Ok(2.0 * acc / d as f64)
}
