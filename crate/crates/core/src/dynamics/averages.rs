use super::otoc::{cgp_from_x, evolved_overlaps};
use crate::coherence::c2;
use crate::error::{Error, Result};
use crate::linalg::{dephase_operator, ComplexMatrix, DensityMatrix, OrthonormalBasis, UnitaryOperator};
use crate::rmt::{map_samples, sample_phases, sample_unitary, EnsembleKind, EnsembleSpec, McEstimate};

/// Closed-form value or a Monte-Carlo estimate over an ensemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Averaging {
    Exact,
    Sampled(EnsembleSpec),
}

fn exact(value: f64) -> McEstimate {
    McEstimate {
        mean: value,
        std_err: 0.0,
        samples: 0,
    }
}

/// Average of `‖[V, W(t)]‖²₂` over `V`, `W` diagonal in `B_V`, `B_W` with
/// i.i.d. uniform eigenphases. The exact value is `2d 𝔠` of the unitary
/// taking `B_V` to the evolved `B_W`.
pub fn phase_averaged_otoc(
    bv: &OrthonormalBasis,
    bw: &OrthonormalBasis,
    u_t: &UnitaryOperator,
    averaging: Averaging,
) -> Result<McEstimate> {
    let a = evolved_overlaps(bv, bw, u_t)?;
    let d = a.rows();
    match averaging {
        Averaging::Exact => Ok(exact(2.0 * d as f64 * cgp_from_x(d, |j, k| a.get(j, k).norm_sqr()))),
        Averaging::Sampled(ens) => {
            ens.expect_kind(&[EnsembleKind::DiagonalPhases], "phase average")?;
            ens.expect_dim(d)?;
            let values = map_samples(ens.samples, |i| {
                let mut rng = ens.rng(i);
                let v = sample_phases(d, &mut rng);
                let w = sample_phases(d, &mut rng);
                // in the B_V frame: V = diag(v), W(t) = A diag(w) A†
                let wt = &a.scale_columns(&w) * &a.adjoint();
                let mut acc = 0.0;
                for j in 0..d {
                    for l in 0..d {
                        acc += (v[j] - v[l]).norm_sqr() * wt.get(j, l).norm_sqr();
                    }
                }
                acc
            });
            Ok(McEstimate::from_samples(&values))
        }
    }
}

/// Average of `‖[𝒟_𝔹(V), ρ]‖²₂` over random unitaries `V`; exactly
/// `(2/d) c2(ρ, 𝔹)` for any unitary 1-design.
pub fn haar_state_commutator_avg(
    rho: &DensityMatrix,
    basis: &OrthonormalBasis,
    averaging: Averaging,
) -> Result<McEstimate> {
    let d = basis.dim();
    match averaging {
        Averaging::Exact => Ok(exact(2.0 / d as f64 * c2(rho, basis)?)),
        Averaging::Sampled(ens) => {
            ens.expect_kind(&[EnsembleKind::Haar, EnsembleKind::PauliDesign], "state commutator average")?;
            ens.expect_dim(d)?;
            if rho.dim() != d {
                return Err(Error::dim("state vs basis", d, rho.dim()));
            }
            let values = sample_results(ens.samples, |i| {
                let mut rng = ens.rng(i);
                let v = sample_unitary(ens.kind, d, &mut rng)?;
                let dv = dephase_operator(v.matrix(), basis)?;
                Ok(dv.commutator(rho.matrix())?.frobenius_norm_sq())
            })?;
            Ok(McEstimate::from_samples(&values))
        }
    }
}

/// Average of `‖[𝒟_1(V), 𝒟_2(W)]‖²₂` over independent random `V`, `W`;
/// exactly `D²(𝒜_1, 𝒜_2) / d²`.
pub fn haar_masa_commutator_avg(
    b1: &OrthonormalBasis,
    b2: &OrthonormalBasis,
    averaging: Averaging,
) -> Result<McEstimate> {
    if b1.dim() != b2.dim() {
        return Err(Error::dim("basis pair", b1.dim(), b2.dim()));
    }
    let d = b1.dim();
    match averaging {
        Averaging::Exact => {
            Ok(exact(super::otoc::grassmannian_distance_sq(b1, b2)? / (d * d) as f64))
        }
        Averaging::Sampled(ens) => {
            ens.expect_kind(&[EnsembleKind::Haar, EnsembleKind::PauliDesign], "MASA commutator average")?;
            ens.expect_dim(d)?;
            let values = sample_results(ens.samples, |i| {
                let mut rng = ens.rng(i);
                let v = sample_unitary(ens.kind, d, &mut rng)?;
                let w = sample_unitary(ens.kind, d, &mut rng)?;
                let dv: ComplexMatrix = dephase_operator(v.matrix(), b1)?;
                let dw = dephase_operator(w.matrix(), b2)?;
                Ok(dv.commutator(&dw)?.frobenius_norm_sq())
            })?;
            Ok(McEstimate::from_samples(&values))
        }
    }
}

fn sample_results(n: usize, f: impl Fn(usize) -> Result<f64> + Sync + Send) -> Result<Vec<f64>> {
    map_samples(n, f).into_iter().collect()
}
