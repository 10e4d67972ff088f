//! Coherence and delocalization measures of states.
//!
//! For a pure state with basis weights `p_j = |⟨j|ψ⟩|²`:
//! `c2 = 1 − Σp²`, `c_rel = H(p)`, `pr2 = Σp²`, and in the Hamiltonian
//! eigenbasis `c2` is the escape probability and `pr2` the infinite-time
//! average of the Loschmidt echo.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{
    dephase, eigh, schmidt_squared, shannon_entropy, DensityMatrix, HermitianOperator, OrthonormalBasis,
    ProbabilityVector, PureState, SpectralDecomposition,
};
use crate::majorization::central_window;
use crate::rmt::{stream_rng, McEstimate};

fn check_dims(rho: &DensityMatrix, basis: &OrthonormalBasis) -> Result<()> {
    if rho.dim() != basis.dim() {
        return Err(Error::dim("state vs basis", basis.dim(), rho.dim()));
    }
    Ok(())
}

/// Real parts of `⟨j|ρ|j⟩`.
fn basis_populations(rho: &DensityMatrix, basis: &OrthonormalBasis) -> Result<Vec<f64>> {
    Ok(basis.diagonal_of(rho.matrix())?.into_iter().map(|z| z.re).collect())
}

/// l2 coherence `‖ρ − 𝒟_𝔹(ρ)‖²₂ = Tr ρ² − Σ_j ⟨j|ρ|j⟩²`.
pub fn c2(rho: &DensityMatrix, basis: &OrthonormalBasis) -> Result<f64> {
    check_dims(rho, basis)?;
    let p = basis_populations(rho, basis)?;
    Ok((rho.purity() - p.iter().map(|x| x * x).sum::<f64>()).max(0.0))
}

/// Relative entropy of coherence `S(𝒟_𝔹(ρ)) − S(ρ)` in nats.
pub fn c_rel(rho: &DensityMatrix, basis: &OrthonormalBasis) -> Result<f64> {
    check_dims(rho, basis)?;
    let p: Vec<f64> = basis_populations(rho, basis)?.into_iter().map(|x| x.max(0.0)).collect();
    Ok((shannon_entropy(&p) - rho.entropy()?).max(0.0))
}

/// l1 coherence `Σ_{j≠k} |⟨j|ρ|k⟩|`.
pub fn c_l1(rho: &DensityMatrix, basis: &OrthonormalBasis) -> Result<f64> {
    check_dims(rho, basis)?;
    let rep = basis.represent(rho.matrix())?;
    let d = rep.rows();
    let mut acc = 0.0;
    for j in 0..d {
        for k in 0..d {
            if j != k {
                acc += rep.get(j, k).norm();
            }
        }
    }
    Ok(acc)
}

/// Second participation ratio `Σ_j |⟨j|ψ⟩|⁴`.
pub fn pr2(psi: &PureState, basis: &OrthonormalBasis) -> Result<f64> {
    Ok(ProbabilityVector::from_state(psi, basis)?.sum_of_squares())
}

/// `1 / pr2`, the effective number of occupied basis states.
pub fn participation_count(psi: &PureState, basis: &OrthonormalBasis) -> Result<f64> {
    Ok(1.0 / pr2(psi, basis)?)
}

/// Return probability `|⟨ψ|e^{−iHt}|ψ⟩|²`.
pub fn loschmidt_echo(psi: &PureState, spec: &SpectralDecomposition, t: f64) -> Result<f64> {
    let w = ProbabilityVector::from_state(psi, &spec.basis())?;
    Ok(echo_from_weights(w.as_slice(), spec.eigenvalues(), t))
}

/// Loschmidt echo from energy-basis weights; reuse across many times.
pub fn echo_from_weights(weights: &[f64], energies: &[f64], t: f64) -> f64 {
    let amp: Complex64 = weights
        .iter()
        .zip(energies)
        .map(|(&w, &e)| Complex64::from_polar(w, -e * t))
        .sum();
    amp.norm_sqr().min(1.0)
}

/// Inverse purity `1 / Tr ρ²`.
pub fn effective_dimension(rho: &DensityMatrix) -> f64 {
    1.0 / rho.purity()
}

/// Escape probability with a flag for degenerate spectra, where it no longer
/// equals the infinite-time escape.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EscapeProbability {
    pub value: f64,
    pub degenerate: bool,
}

/// `1 − Σ_j |⟨E_j|ψ⟩|⁴`.
pub fn escape_probability(psi: &PureState, spec: &SpectralDecomposition) -> Result<EscapeProbability> {
    let value = 1.0 - ProbabilityVector::from_state(psi, &spec.basis())?.sum_of_squares();
    Ok(EscapeProbability {
        value,
        degenerate: !spec.is_nondegenerate(),
    })
}

/// Trapezoidal time average of `f` over `[0, T]`. The step is shrunk to
/// `T / ⌈T/dt⌉` so the grid ends exactly at `T`.
pub fn finite_time_average(f: impl Fn(f64) -> f64, t_max: f64, dt: f64) -> Result<f64> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::invalid("averaging window", format!("T = {t_max} must be positive")));
    }
    if !(dt > 0.0 && dt < t_max) {
        return Err(Error::invalid("averaging step", format!("dt = {dt} not in (0, T)")));
    }
    let n = (t_max / dt).ceil() as usize;
    let h = t_max / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let v = f(i as f64 * h);
        if !v.is_finite() {
            return Err(Error::NonFinite("time series sample"));
        }
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += w * v;
    }
    Ok(acc * h / t_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogBase {
    Nats,
    Bits,
}

/// GOE ensemble average of the relative entropy of coherence, `ln(0.48 d)`.
pub fn goe_crel_prediction(d: usize, base: LogBase) -> Result<f64> {
    if d < 2 {
        return Err(Error::invalid("dimension", format!("d = {d} < 2")));
    }
    let nats = (0.48 * d as f64).ln();
    Ok(match base {
        LogBase::Nats => nats,
        LogBase::Bits => nats / std::f64::consts::LN_2,
    })
}

/// Monte-Carlo GOE average of the 2-coherence of an eigenvector in a fixed
/// basis. GOE eigenvectors are uniform on the real unit sphere, so each
/// sample is a normalised real Gaussian vector.
pub fn goe_c2_prediction(d: usize, samples: usize, seed: u64) -> Result<McEstimate> {
    if d < 2 {
        return Err(Error::invalid("dimension", format!("d = {d} < 2")));
    }
    if samples == 0 {
        return Err(Error::NoSamples("GOE 2-coherence prediction"));
    }
    let values = crate::rmt::map_samples(samples, |i| {
        let mut rng = stream_rng(seed, i as u64);
        let x: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n2: f64 = x.iter().map(|v| v * v).sum();
        1.0 - x.iter().map(|v| (v * v / n2).powi(2)).sum::<f64>()
    });
    Ok(McEstimate::from_samples(&values))
}

/// Closed form of the same average, `1 − 3/(d+2)`.
pub fn goe_c2_analytic(d: usize) -> f64 {
    1.0 - 3.0 / (d as f64 + 2.0)
}

/// Minimum over product bases of the 2-coherence of a bipartite pure state,
/// which equals the linear entropy `1 − Tr ρ_A²`.
pub fn min_product_basis_c2(psi: &PureState, dims: (usize, usize)) -> Result<f64> {
    let lam = schmidt_squared(psi, dims)?;
    Ok(1.0 - lam.sum_of_squares())
}

/// Normalisers used for the `normalized_*` columns of a scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoeNormalizers {
    pub c2: f64,
    /// In nats.
    pub c_rel: f64,
}

impl GoeNormalizers {
    pub fn analytic(d: usize) -> Result<Self> {
        Ok(Self {
            c2: goe_c2_analytic(d),
            c_rel: goe_crel_prediction(d, LogBase::Nats)?,
        })
    }

    pub fn monte_carlo(d: usize, samples: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            c2: goe_c2_prediction(d, samples, seed)?.mean,
            c_rel: goe_crel_prediction(d, LogBase::Nats)?,
        })
    }
}

/// One row of an eigenstate coherence scan.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceReport {
    pub index: usize,
    pub energy: f64,
    pub c2: f64,
    /// nats
    pub c_rel: f64,
    pub c_l1: f64,
    pub pr2: f64,
    pub normalized_c2: f64,
    pub normalized_c_rel: f64,
}

impl CoherenceReport {
    /// All measures of a pure state from its basis coefficients.
    fn from_coefficients(index: usize, energy: f64, coeffs: &[Complex64], norm: &GoeNormalizers) -> Self {
        let p: Vec<f64> = coeffs.iter().map(|z| z.norm_sqr()).collect();
        let total: f64 = p.iter().sum();
        let p: Vec<f64> = p.into_iter().map(|x| x / total).collect();
        let pr2: f64 = p.iter().map(|x| x * x).sum();
        let c2 = 1.0 - pr2;
        let c_rel = shannon_entropy(&p);
        let l1: f64 = p.iter().map(|x| x.sqrt()).sum();
        Self {
            index,
            energy,
            c2,
            c_rel,
            c_l1: (l1 * l1 - 1.0).max(0.0),
            pr2,
            normalized_c2: c2 / norm.c2,
            normalized_c_rel: c_rel / norm.c_rel,
        }
    }
}

/// Result of [`eigenstate_coherence_scan`].
#[derive(Clone, Debug)]
pub struct CoherenceScan {
    pub reports: Vec<CoherenceReport>,
    /// Smallest level gap of the scanned Hamiltonian.
    pub min_gap: f64,
}

impl CoherenceScan {
    /// Mean of a column over the central `fraction` of the spectrum.
    pub fn central_mean(&self, fraction: f64, column: impl Fn(&CoherenceReport) -> f64) -> Result<f64> {
        let w = central_window(self.reports.len(), fraction)?;
        let n = w.len() as f64;
        Ok(self.reports[w].iter().map(column).sum::<f64>() / n)
    }
}

/// Coherence of every eigenstate of `h` in `basis`, ordered by energy.
pub fn eigenstate_coherence_scan(
    h: &HermitianOperator,
    basis: &OrthonormalBasis,
    normalizers: &GoeNormalizers,
) -> Result<CoherenceScan> {
    let spec = eigh(h)?;
    eigenstate_coherence_scan_spec(&spec, basis, normalizers)
}

/// As [`eigenstate_coherence_scan`] for an existing decomposition.
pub fn eigenstate_coherence_scan_spec(
    spec: &SpectralDecomposition,
    basis: &OrthonormalBasis,
    normalizers: &GoeNormalizers,
) -> Result<CoherenceScan> {
    if spec.dim() != basis.dim() {
        return Err(Error::dim("eigenstates vs basis", basis.dim(), spec.dim()));
    }
    // column k holds ⟨j|E_k⟩
    let coeffs = basis.matrix().adjoint().matmul(spec.eigenvectors().matrix())?;
    let reports = (0..spec.dim())
        .map(|k| CoherenceReport::from_coefficients(k, spec.eigenvalues()[k], &coeffs.column(k), normalizers))
        .collect();
    Ok(CoherenceScan {
        reports,
        min_gap: spec.min_gap(),
    })
}

/// `𝒟_𝔹_H(|ψ⟩⟨ψ|)`, the diagonal-ensemble state.
pub fn diagonal_ensemble(psi: &PureState, spec: &SpectralDecomposition) -> Result<DensityMatrix> {
    dephase(&psi.density(), &spec.basis())
}
