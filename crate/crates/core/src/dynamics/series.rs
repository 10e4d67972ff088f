use num_complex::Complex64;
use rayon::prelude::*;

use super::otoc::{cgp_from_x, split_from_overlaps};
use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix, HermitianOperator};
use crate::models::{build_tfim, sigma_z_diagonal, TfimParams};

/// Strictly increasing, finite sample times.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::invalid("time grid", "no times"));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("time grid"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("time grid", "times must be strictly increasing"));
        }
        Ok(Self(times))
    }

    /// `t_min, t_min + dt, …` up to and including `t_max` (to within a
    /// relative `1e-9` of a step).
    pub fn stepped(t_min: f64, t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid("time step", format!("dt = {dt} must be positive")));
        }
        if !(t_max >= t_min) {
            return Err(Error::invalid("time window", format!("[{t_min}, {t_max}] is empty")));
        }
        let n = ((t_max - t_min) / dt + 1e-9).floor() as usize;
        Self::new((0..=n).map(|i| t_min + i as f64 * dt).collect())
    }

    /// `n ≥ 2` points with equal spacing, endpoints included.
    pub fn linspace(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("time grid", format!("{n} points, need at least 2")));
        }
        let h = (t_max - t_min) / (n - 1) as f64;
        Self::new((0..n).map(|i| if i + 1 == n { t_max } else { t_min + i as f64 * h }).collect())
    }

    /// `n ≥ 2` logarithmically spaced points on `[t_min, t_max]`, `t_min > 0`.
    pub fn log_spaced(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_min > 0.0) {
            return Err(Error::invalid("time grid", "log spacing needs t_min > 0"));
        }
        let g = Self::linspace(t_min.ln(), t_max.ln(), n)?;
        Self::new(g.0.into_iter().map(f64::exp).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Values sampled on a [`TimeGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::dim("time series values", times.len(), values.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("time series"));
        }
        let grid = TimeGrid::new(times)?;
        Ok(Self { times: grid.0, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Population variance of the samples with `t_min ≤ t ≤ t_max`.
pub fn temporal_variance(series: &TimeSeries, window: (f64, f64)) -> Result<f64> {
    let vals: Vec<f64> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(_, v)| *v)
        .collect();
    if vals.len() < 2 {
        return Err(Error::invalid(
            "variance window",
            format!("[{}, {}] holds {} samples, need 2", window.0, window.1, vals.len()),
        ));
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    Ok(vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n)
}

/// Observables of one time point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsSample {
    pub t: f64,
    /// Squared commutator `C(t)`.
    pub otoc: f64,
    /// `2 𝔠(U_t†)` in the computational basis.
    pub cgp_part: f64,
    /// `C − cgp_part` from the off-diagonal index sum, when requested.
    pub offdiag_part: Option<f64>,
}

/// Squared commutator of two `±1`-valued diagonal operators under `e^{−iHt}`,
/// evaluated in the energy eigenbasis so each time costs a few matrix
/// products.
pub struct DiagonalPairDynamics {
    energies: Vec<f64>,
    vectors: ComplexMatrix,
    v_signs: Vec<Complex64>,
    w_signs: Vec<Complex64>,
    v_energy: ComplexMatrix,
    w_energy: ComplexMatrix,
}

impl DiagonalPairDynamics {
    pub fn new(h: &HermitianOperator, v_signs: &[f64], w_signs: &[f64]) -> Result<Self> {
        let d = h.dim();
        for s in [v_signs, w_signs] {
            if s.len() != d {
                return Err(Error::dim("diagonal operator", d, s.len()));
            }
            if s.iter().any(|x| x.abs() != 1.0) {
                return Err(Error::invalid("diagonal operator", "entries must be ±1"));
            }
        }
        let spec = eigh(h)?;
        let e = spec.eigenvectors().matrix().clone();
        let to_c = |s: &[f64]| -> Vec<Complex64> { s.iter().map(|&x| Complex64::new(x, 0.0)).collect() };
        let (v_signs, w_signs) = (to_c(v_signs), to_c(w_signs));
        let v_energy = e.adjoint().matmul(&ComplexMatrix::diagonal(&v_signs).matmul(&e)?)?;
        let w_energy = e.adjoint().matmul(&ComplexMatrix::diagonal(&w_signs).matmul(&e)?)?;
        Ok(Self {
            energies: spec.eigenvalues().to_vec(),
            vectors: e,
            v_signs,
            w_signs,
            v_energy,
            w_energy,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn at(&self, t: f64, with_offdiag: bool) -> Result<DynamicsSample> {
        if !t.is_finite() {
            return Err(Error::NonFinite("evolution time"));
        }
        let d = self.dim();
        let p: Vec<Complex64> = self.energies.iter().map(|&e| Complex64::from_polar(1.0, -e * t)).collect();

        // W(t) = U† W U in the energy frame, F = (1/d) Tr(W(t) V W(t) V)
        let wt = ComplexMatrix::from_fn(d, d, |a, b| p[a].conj() * p[b] * self.w_energy.get(a, b));
        let m = wt.matmul(&self.v_energy)?;
        let f = m.trace_of_product(&m) / d as f64;
        let otoc = 2.0 * (1.0 - f.re);

        // U† = E e^{+iΛt} E†
        let pc: Vec<Complex64> = p.iter().map(|z| z.conj()).collect();
        let a = self.vectors.scale_columns(&pc).matmul(&self.vectors.adjoint())?;
        let (cgp_part, offdiag_part) = if with_offdiag {
            let (c, o) = split_from_overlaps(&a, &self.v_signs, &self.w_signs)?;
            (c, Some(o))
        } else {
            (2.0 * cgp_from_x(d, |j, k| a.get(j, k).norm_sqr()), None)
        };
        Ok(DynamicsSample {
            t,
            otoc,
            cgp_part,
            offdiag_part,
        })
    }

    /// All grid points, in grid order.
    pub fn series(&self, grid: &TimeGrid, with_offdiag: bool) -> Result<DynamicsSeries> {
        let samples: Result<Vec<DynamicsSample>> =
            grid.times().par_iter().map(|&t| self.at(t, with_offdiag)).collect();
        Ok(DynamicsSeries { samples: samples? })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsSeries {
    pub samples: Vec<DynamicsSample>,
}

impl DynamicsSeries {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn observable(&self, which: Observable) -> Result<TimeSeries> {
        let values = self
            .samples
            .iter()
            .map(|s| match which {
                Observable::Otoc => s.otoc,
                Observable::Cgp => 0.5 * s.cgp_part,
            })
            .collect();
        TimeSeries::new(self.times(), values)
    }
}

/// TFIM with `V = σᶻ_{v_site}` and `W = σᶻ_{w_site}` (1-based sites).
pub fn tfim_dynamics_series(
    params: &TfimParams,
    v_site: usize,
    w_site: usize,
    grid: &TimeGrid,
    with_offdiag: bool,
) -> Result<DynamicsSeries> {
    let h = build_tfim(params)?;
    let v = sigma_z_diagonal(params.l, v_site)?;
    let w = sigma_z_diagonal(params.l, w_site)?;
    DiagonalPairDynamics::new(&h, &v, &w)?.series(grid, with_offdiag)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observable {
    Otoc,
    Cgp,
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Observable::Otoc => "otoc",
            Observable::Cgp => "cgp",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarianceRow {
    pub n: usize,
    pub observable: Observable,
    pub var_integrable: f64,
    pub var_chaotic: f64,
    /// `(Var_int − Var_chaos) / Var_int`.
    pub ratio: f64,
}

/// Temporal-variance comparison of integrable and chaotic chains for each
/// size `n`, with `V = σᶻ_1`, `W = σᶻ_n`. The chain length of the two
/// templates is replaced by `n`; only grid times inside `window` are
/// evaluated.
pub fn variance_ratio_scan(
    integrable: &TfimParams,
    chaotic: &TfimParams,
    n_values: &[usize],
    grid: &TimeGrid,
    window: (f64, f64),
) -> Result<Vec<VarianceRow>> {
    let inside: Vec<f64> = grid.times().iter().copied().filter(|t| *t >= window.0 && *t <= window.1).collect();
    let grid = TimeGrid::new(inside)?;
    let mut rows = Vec::new();
    for &n in n_values {
        let si = tfim_dynamics_series(&TfimParams { l: n, ..*integrable }, 1, n, &grid, false)?;
        let sc = tfim_dynamics_series(&TfimParams { l: n, ..*chaotic }, 1, n, &grid, false)?;
        for obs in [Observable::Otoc, Observable::Cgp] {
            let vi = temporal_variance(&si.observable(obs)?, window)?;
            let vc = temporal_variance(&sc.observable(obs)?, window)?;
            rows.push(VarianceRow {
                n,
                observable: obs,
                var_integrable: vi,
                var_chaotic: vc,
                ratio: (vi - vc) / vi,
            });
        }
    }
    Ok(rows)
}
