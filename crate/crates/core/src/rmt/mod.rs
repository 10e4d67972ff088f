//! Random-matrix ensembles and the Monte-Carlo machinery built on them.
//!
//! Normalisation follows `P(H) ∝ exp(−(d/2) Tr H²)`, so GUE and GOE spectra
//! fill the semicircle on `[−2, 2]`.
//!
//! Every Monte-Carlo sample `i` draws from its own ChaCha20 stream keyed by
//! `(master_seed, i)`, and reductions run in sample order, so results are
//! bit-identical for any number of worker threads.

mod shorttime;
mod sff;
mod spacing;

pub use shorttime::{klocal_short_time_scan, short_time_cgp_curvature, CurvatureReport, KLocalRow, KLocalScan};
pub use sff::{
    cgp_offdiagonal_discrepancy, gue_cgp_bound_check, loglog_slope, sff_r4, sff_r4_of_spectrum, BoundRow, SffEstimate,
    SffValues,
};
pub use spacing::{spacing_statistics, spacing_statistics_of, SpacingStatistics, MIN_LEVELS};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator, UnitaryOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnsembleKind {
    Goe,
    Gue,
    Haar,
    DiagonalPhases,
    /// Uniform draws from the Weyl–Heisenberg group `X^a Z^b`, a unitary
    /// 1-design (the Pauli group for `d = 2`).
    PauliDesign,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub dim: usize,
    pub samples: usize,
    pub master_seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, dim: usize, samples: usize, master_seed: u64) -> Result<Self> {
        let s = Self {
            kind,
            dim,
            samples,
            master_seed,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::invalid("ensemble dimension", format!("d = {} < 2", self.dim)));
        }
        if self.samples == 0 {
            return Err(Error::NoSamples("ensemble"));
        }
        Ok(())
    }

    pub(crate) fn expect_kind(&self, kinds: &[EnsembleKind], what: &'static str) -> Result<()> {
        self.validate()?;
        if !kinds.contains(&self.kind) {
            return Err(Error::invalid(what, format!("ensemble kind {:?} not applicable", self.kind)));
        }
        Ok(())
    }

    pub(crate) fn expect_dim(&self, d: usize) -> Result<()> {
        if self.dim != d {
            return Err(Error::dim("ensemble dimension", d, self.dim));
        }
        Ok(())
    }

    /// Generator for sample `i`.
    pub fn rng(&self, i: usize) -> ChaCha20Rng {
        stream_rng(self.master_seed, i as u64)
    }
}

/// Independent generator for `(master_seed, index)`.
pub fn stream_rng(master_seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Evaluates `f(0..n)` in parallel and returns the results in index order.
pub(crate) fn map_samples<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

impl McEstimate {
    /// Accumulates in slice order.
    pub fn from_samples(x: &[f64]) -> Self {
        let n = x.len();
        let mean = x.iter().sum::<f64>() / n as f64;
        let std_err = if n > 1 {
            let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            f64::INFINITY
        };
        Self {
            mean,
            std_err,
            samples: n,
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_err
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// GUE: real diagonal `N(0, 1/d)`, off-diagonal real and imaginary parts
/// `N(0, 1/(2d))`, so `E[Tr H²] = d`.
pub fn sample_gue<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    let sd = (1.0 / d as f64).sqrt();
    let so = (0.5 / d as f64).sqrt();
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        m.set(i, i, Complex64::new(sd * normal(rng), 0.0));
        for j in i + 1..d {
            let z = Complex64::new(so * normal(rng), so * normal(rng));
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    HermitianOperator::new(m).expect("Hermitian by construction")
}

/// GOE: diagonal `N(0, 2/d)`, off-diagonal `N(0, 1/d)`; `E[Tr H²] = d + 1`.
pub fn sample_goe<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    let sd = (2.0 / d as f64).sqrt();
    let so = (1.0 / d as f64).sqrt();
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        m.set(i, i, Complex64::new(sd * normal(rng), 0.0));
        for j in i + 1..d {
            let x = Complex64::new(so * normal(rng), 0.0);
            m.set(i, j, x);
            m.set(j, i, x);
        }
    }
    HermitianOperator::new(m).expect("symmetric by construction")
}

/// Haar unitary: QR of a complex Ginibre matrix with `R` normalised to a
/// positive diagonal. Gram–Schmidt with one re-orthogonalisation pass yields
/// exactly that `Q`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryOperator {
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| (0..d).map(|_| Complex64::new(normal(rng), normal(rng))).collect())
        .collect();
    for k in 0..d {
        let (done, rest) = cols.split_at_mut(k);
        let v = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let p: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    UnitaryOperator::new_unchecked(ComplexMatrix::from_fn(d, d, |i, j| cols[j][i]))
}

/// i.i.d. uniform phases `e^{iθ_j}`.
pub fn sample_phases<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex64> {
    (0..d)
        .map(|_| Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>()))
        .collect()
}

/// Uniform element `X^a Z^b` of the Weyl–Heisenberg group.
pub fn sample_weyl_heisenberg<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryOperator {
    let a = rng.random_range(0..d);
    let b = rng.random_range(0..d);
    let omega = std::f64::consts::TAU / d as f64;
    // (X^a Z^b)|k⟩ = ω^{bk} |k + a⟩
    let m = ComplexMatrix::from_fn(d, d, |i, k| {
        if i == (k + a) % d {
            Complex64::from_polar(1.0, omega * ((b * k) % d) as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    UnitaryOperator::new_unchecked(m)
}

/// A random unitary from a unitary ensemble kind.
pub(crate) fn sample_unitary<R: Rng + ?Sized>(kind: EnsembleKind, d: usize, rng: &mut R) -> Result<UnitaryOperator> {
    match kind {
        EnsembleKind::Haar => Ok(sample_haar_unitary(d, rng)),
        EnsembleKind::PauliDesign => Ok(sample_weyl_heisenberg(d, rng)),
        EnsembleKind::DiagonalPhases => UnitaryOperator::diagonal(&sample_phases(d, rng)),
        k => Err(Error::invalid("unitary ensemble", format!("{k:?} is not a unitary ensemble"))),
    }
}

/// Haar average of the CGP, `(d−1)/(d+1)`.
pub fn haar_avg_cgp(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::invalid("dimension", format!("d = {d} < 2")));
    }
    Ok((d as f64 - 1.0) / (d as f64 + 1.0))
}

/// Haar average over `U` of the squared commutator of `V = Σ v_j Π_j` and
/// `W(U) = U† (Σ w_k Π_k) U`, both diagonal in one basis.
pub fn haar_avg_otoc_closed_form(v: &[Complex64], w: &[Complex64], d: usize) -> Result<f64> {
    if v.len() != d || w.len() != d {
        return Err(Error::dim("eigenphase sequence", d, if v.len() != d { v.len() } else { w.len() }));
    }
    if d < 2 {
        return Err(Error::invalid("dimension", format!("d = {d} < 2")));
    }
    if v.iter().chain(w).any(|z| (z.norm() - 1.0).abs() > 1e-12) {
        return Err(Error::invalid("eigenphases", "not unit modulus"));
    }
    let df = d as f64;
    // Σ_{j≠l} v_j* v_l = |Σ v|² − d, and the four-index sum factorises.
    let sv = v.iter().sum::<Complex64>().norm_sqr() - df;
    let sw = w.iter().sum::<Complex64>().norm_sqr() - df;
    Ok(2.0 * (df - 1.0) / (df + 1.0) + 2.0 / (df * df * (df * df - 1.0)) * sv * sw
        - 2.0 / (df * (df + 1.0)) * (sv + sw))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream_rng(7, 3).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| stream_rng(7, 3).random()).collect();
        assert_eq!(a, b);
        let x: u64 = stream_rng(7, 3).random();
        let y: u64 = stream_rng(7, 4).random();
        let z: u64 = stream_rng(8, 3).random();
        assert!(x != y && x != z);
    }

    #[test]
    fn ensemble_spec_validation() {
        assert!(EnsembleSpec::new(EnsembleKind::Gue, 1, 10, 0).is_err());
        assert!(EnsembleSpec::new(EnsembleKind::Gue, 4, 0, 0).is_err());
        let e = EnsembleSpec::new(EnsembleKind::Haar, 4, 3, 0).unwrap();
        assert!(e.expect_kind(&[EnsembleKind::Gue], "x").is_err());
    }

    #[test]
    fn mc_estimate_basics() {
        let e = McEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.std_err - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(e.agrees_with(2.5 + e.std_err, 1.0));
        assert!(!e.agrees_with(2.5 + 3.1 * e.std_err, 3.0));
    }

    #[test]
    fn samplers_are_exactly_hermitian() {
        let mut rng = stream_rng(1, 0);
        for h in [sample_gue(6, &mut rng), sample_goe(6, &mut rng)] {
            let m = h.matrix();
            assert_eq!(m.max_abs_diff(&m.adjoint()), 0.0);
        }
        assert!(sample_goe(5, &mut rng).matrix().is_real());
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = stream_rng(2, 0);
        for d in [2, 5, 16] {
            let u = sample_haar_unitary(d, &mut rng);
            let m = u.matrix();
            assert!((&m.adjoint() * m).max_abs_diff(&ComplexMatrix::identity(d)) < 1e-12);
        }
    }

    #[test]
    fn weyl_heisenberg_is_unitary() {
        let mut rng = stream_rng(3, 0);
        for _ in 0..10 {
            let u = sample_weyl_heisenberg(3, &mut rng);
            let m = u.matrix();
            assert!((&m.adjoint() * m).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
        }
    }

    #[test]
    fn haar_cgp_values() {
        assert!((haar_avg_cgp(2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let mut last = 0.0;
        for d in 2..50 {
            let v = haar_avg_cgp(d).unwrap();
            assert!(v > last && v < 1.0);
            last = v;
        }
        assert!(haar_avg_cgp(1).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let one = Complex64::new(1.0, 0.0);
        let pm = [one, -one];
        assert!((haar_avg_otoc_closed_form(&pm, &pm, 2).unwrap() - 8.0 / 3.0).abs() < 1e-14);
        for d in 2..=6 {
            let z = Complex64::from_polar(1.0, 0.37);
            let v = vec![z; d];
            let w = vec![Complex64::from_polar(1.0, -1.1); d];
            assert!(haar_avg_otoc_closed_form(&v, &w, d).unwrap().abs() < 1e-12);
        }
        assert!(haar_avg_otoc_closed_form(&pm, &pm, 3).is_err());
        assert!(haar_avg_otoc_closed_form(&[one, one.scale(2.0)], &pm, 2).is_err());
    }
}
