use num_complex::Complex64;

use super::{map_samples, sample_goe, sample_gue, EnsembleKind, EnsembleSpec, McEstimate};
use crate::dynamics::{cgp, TimeGrid};
use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, OrthonormalBasis, SpectralDecomposition};

/// Four-point form-factor sums of one spectrum at one time, under three
/// index conventions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SffValues {
    /// `Σ_{k,l,m,n pairwise distinct} e^{−i(λ_k+λ_l−λ_m−λ_n)t}`.
    pub distinct: f64,
    /// Only `k ≠ l` and `m ≠ n`: `|(Σz)² − Σz²|²`.
    pub pair_distinct: f64,
    /// Unrestricted: `|Σz|⁴`.
    pub full: f64,
    /// Imaginary part of the distinct sum (zero up to rounding).
    pub distinct_imag: f64,
}

/// Set partitions of four positions as block-label vectors (restricted
/// growth strings), with their Möbius weights `Π_B (−1)^{|B|−1}(|B|−1)!`.
fn partitions4() -> Vec<([usize; 4], f64)> {
    let mut out = Vec::with_capacity(15);
    for code in 0..256usize {
        let a = [code & 3, (code >> 2) & 3, (code >> 4) & 3, (code >> 6) & 3];
        let mut max = 0;
        let mut ok = a[0] == 0;
        for &x in &a[1..] {
            if x > max + 1 {
                ok = false;
            }
            max = max.max(x);
        }
        if !ok {
            continue;
        }
        let mut weight = 1.0;
        for b in 0..=max {
            let size = a.iter().filter(|&&x| x == b).count();
            let sign = if size % 2 == 1 { 1.0 } else { -1.0 };
            weight *= sign * (1..size).product::<usize>() as f64;
        }
        out.push((a, weight));
    }
    out
}

/// All three conventions for one spectrum at time `t`.
pub fn sff_r4_of_spectrum(levels: &[f64], t: f64) -> SffValues {
    sff_with(&partitions4(), levels, t)
}

fn sff_with(parts: &[([usize; 4], f64)], levels: &[f64], t: f64) -> SffValues {
    const SIGN: [i32; 4] = [1, 1, -1, -1];
    let d = levels.len() as f64;
    // p[s + 2] = Σ_i e^{−i s λ_i t}
    let p1: Complex64 = levels.iter().map(|&l| Complex64::from_polar(1.0, -l * t)).sum();
    let p2: Complex64 = levels.iter().map(|&l| Complex64::from_polar(1.0, -2.0 * l * t)).sum();
    let p = [p2.conj(), p1.conj(), Complex64::new(d, 0.0), p1, p2];
    let mut distinct = Complex64::new(0.0, 0.0);
    for (blocks, weight) in parts {
        let mut term = Complex64::new(*weight, 0.0);
        let nb = blocks.iter().max().unwrap() + 1;
        for b in 0..nb {
            let s: i32 = (0..4).filter(|&i| blocks[i] == b).map(|i| SIGN[i]).sum();
            term *= p[(s + 2) as usize];
        }
        distinct += term;
    }
    SffValues {
        distinct: distinct.re,
        pair_distinct: (p1 * p1 - p2).norm_sqr(),
        full: p1.norm_sqr().powi(2),
        distinct_imag: distinct.im,
    }
}

/// Monte-Carlo estimates of the four-point form factor on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SffEstimate {
    pub times: Vec<f64>,
    /// Pairwise-distinct convention.
    pub r4_values: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub pair_distinct_values: Vec<f64>,
    pub pair_distinct_errors: Vec<f64>,
    pub full_values: Vec<f64>,
    pub full_errors: Vec<f64>,
    /// Largest `|Im|` of any per-sample distinct sum.
    pub max_imag: f64,
}

fn sample_levels(ens: &EnsembleSpec, i: usize) -> Result<Vec<f64>> {
    let mut rng = ens.rng(i);
    let h = match ens.kind {
        EnsembleKind::Gue => sample_gue(ens.dim, &mut rng),
        EnsembleKind::Goe => sample_goe(ens.dim, &mut rng),
        _ => unreachable!("checked by caller"),
    };
    eigvalsh(&h)
}

/// Ensemble average of the four-point spectral form factor.
pub fn sff_r4(ens: &EnsembleSpec, grid: &TimeGrid) -> Result<SffEstimate> {
    ens.expect_kind(&[EnsembleKind::Gue, EnsembleKind::Goe], "form factor ensemble")?;
    let parts = partitions4();
    let per_sample: Vec<Vec<SffValues>> = map_samples(ens.samples, |i| {
        sample_levels(ens, i).map(|lv| grid.times().iter().map(|&t| sff_with(&parts, &lv, t)).collect())
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let nt = grid.len();
    let column = |f: &dyn Fn(&SffValues) -> f64| -> Vec<McEstimate> {
        (0..nt)
            .map(|ti| McEstimate::from_samples(&per_sample.iter().map(|s| f(&s[ti])).collect::<Vec<_>>()))
            .collect()
    };
    let distinct = column(&|v| v.distinct);
    let pair = column(&|v| v.pair_distinct);
    let full = column(&|v| v.full);
    let max_imag = per_sample
        .iter()
        .flatten()
        .map(|v| v.distinct_imag.abs())
        .fold(0.0, f64::max);
    Ok(SffEstimate {
        times: grid.times().to_vec(),
        r4_values: distinct.iter().map(|e| e.mean).collect(),
        standard_errors: distinct.iter().map(|e| e.std_err).collect(),
        pair_distinct_values: pair.iter().map(|e| e.mean).collect(),
        pair_distinct_errors: pair.iter().map(|e| e.std_err).collect(),
        full_values: full.iter().map(|e| e.mean).collect(),
        full_errors: full.iter().map(|e| e.std_err).collect(),
        max_imag,
    })
}

/// One time point of the CGP–form-factor bound check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundRow {
    pub t: f64,
    /// Mean CGP of `e^{−iHt}` over the ensemble.
    pub lhs: f64,
    pub lhs_std_err: f64,
    /// `1 − ℛ₄(t) / (d(d+1)(d+2)(d+3))`.
    pub rhs: f64,
    pub rhs_std_err: f64,
    /// Mean of `rhs − lhs` over paired samples.
    pub gap: f64,
    pub gap_std_err: f64,
    /// `gap ≥ −3σ`.
    pub holds: bool,
}

fn gue_spectra(ens: &EnsembleSpec, d: usize) -> Result<Vec<SpectralDecomposition>> {
    ens.expect_kind(&[EnsembleKind::Gue], "bound check ensemble")?;
    ens.expect_dim(d)?;
    map_samples(ens.samples, |i| eigh(&sample_gue(d, &mut ens.rng(i))))
        .into_iter()
        .collect()
}

/// Checks `⟨𝔠(e^{−iHt}, 𝔹)⟩_GUE ≤ 1 − ℛ₄(t)/(d(d+1)(d+2)(d+3))` on a grid,
/// using the same samples for both sides.
pub fn gue_cgp_bound_check(ens: &EnsembleSpec, basis: &OrthonormalBasis, grid: &TimeGrid) -> Result<Vec<BoundRow>> {
    let d = basis.dim();
    let spectra = gue_spectra(ens, d)?;
    let df = d as f64;
    let norm = df * (df + 1.0) * (df + 2.0) * (df + 3.0);
    let parts = partitions4();
    let per_sample: Vec<Vec<(f64, f64)>> = spectra
        .iter()
        .map(|s| {
            grid.times()
                .iter()
                .map(|&t| {
                    let lhs = cgp(&s.evolve(t)?, basis)?;
                    let rhs = 1.0 - sff_with(&parts, s.eigenvalues(), t).distinct / norm;
                    Ok((lhs, rhs))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(grid
        .times()
        .iter()
        .enumerate()
        .map(|(ti, &t)| {
            let l: Vec<f64> = per_sample.iter().map(|s| s[ti].0).collect();
            let r: Vec<f64> = per_sample.iter().map(|s| s[ti].1).collect();
            let g: Vec<f64> = per_sample.iter().map(|s| s[ti].1 - s[ti].0).collect();
            let (l, r, g) = (McEstimate::from_samples(&l), McEstimate::from_samples(&r), McEstimate::from_samples(&g));
            let tol = if g.std_err.is_finite() { 3.0 * g.std_err } else { 0.0 };
            BoundRow {
                t,
                lhs: l.mean,
                lhs_std_err: l.std_err,
                rhs: r.mean,
                rhs_std_err: r.std_err,
                gap: g.mean,
                gap_std_err: g.std_err,
                holds: g.mean >= -tol - 1e-12,
            }
        })
        .collect())
}

/// GUE average of `(1/d) Σ_{j≠k} X_jk²`, the part of the CGP carried by
/// off-diagonal overlaps, computed directly so it stays accurate at short
/// times (it grows as `t⁴`).
pub fn cgp_offdiagonal_discrepancy(
    ens: &EnsembleSpec,
    basis: &OrthonormalBasis,
    grid: &TimeGrid,
) -> Result<Vec<(f64, McEstimate)>> {
    let d = basis.dim();
    let spectra = gue_spectra(ens, d)?;
    let per_sample: Vec<Vec<f64>> = spectra
        .iter()
        .map(|s| {
            grid.times()
                .iter()
                .map(|&t| {
                    let m = basis.represent(s.evolve(t)?.matrix())?;
                    let mut acc = 0.0;
                    for j in 0..d {
                        for k in 0..d {
                            if j != k {
                                acc += m.get(j, k).norm_sqr().powi(2);
                            }
                        }
                    }
                    Ok(acc / d as f64)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(grid
        .times()
        .iter()
        .enumerate()
        .map(|(ti, &t)| (t, McEstimate::from_samples(&per_sample.iter().map(|s| s[ti]).collect::<Vec<_>>())))
        .collect())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("log-log fit", "need two or more paired points"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("log-log fit", "values must be positive"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
