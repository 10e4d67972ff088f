use crate::dynamics::cgp;
use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, overlap_matrix, HermitianOperator, OrthonormalBasis};
use crate::models::build_k_local_commuting;

/// Finite-difference steps, each half the previous.
const STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Short-time growth of `𝔠(e^{−iHt}, 𝔹)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureReport {
    /// `(1/d) Σ_j var_j(H)` in `𝔹`.
    pub analytic: f64,
    /// `(1/2) d²𝔠/dt²` at `t = 0`, Richardson-extrapolated.
    pub finite_difference: f64,
    /// `finite_difference / analytic`; `None` when the variance vanishes.
    pub kappa: Option<f64>,
    /// `‖1 − XᵀX‖` (spectral norm), `X = overlap_matrix(𝔹, 𝔹_H)`; in `[0, 1]`.
    pub q_bound: f64,
    /// `‖H‖₂² q / d`, an upper bound on `analytic`.
    pub frobenius_bound: f64,
    /// `‖H‖∞² q`, an upper bound on `frobenius_bound`.
    pub operator_bound: f64,
    /// Both inequalities of the chain hold.
    pub bound_holds: bool,
}

pub fn short_time_cgp_curvature(h: &HermitianOperator, basis: &OrthonormalBasis) -> Result<CurvatureReport> {
    let d = h.dim();
    if basis.dim() != d {
        return Err(Error::dim("Hamiltonian vs basis", basis.dim(), d));
    }
    let rep = basis.represent(h.matrix())?;
    let mut off = 0.0;
    for j in 0..d {
        for k in 0..d {
            if j != k {
                off += rep.get(j, k).norm_sqr();
            }
        }
    }
    let analytic = off / d as f64;

    let spec = eigh(h)?;
    let c = |t: f64| -> Result<f64> { cgp(&spec.evolve(t)?, basis) };
    let c0 = c(0.0)?;
    let second = |s: f64| -> Result<f64> { Ok((c(s)? - 2.0 * c0 + c(-s)?) / (s * s)) };
    let dd: Vec<f64> = STEPS.iter().map(|&s| second(s)).collect::<Result<_>>()?;
    let r1 = [(4.0 * dd[1] - dd[0]) / 3.0, (4.0 * dd[2] - dd[1]) / 3.0];
    let finite_difference = 0.5 * (16.0 * r1[1] - r1[0]) / 15.0;

    let scale = h.matrix().frobenius_norm_sq() / d as f64;
    let kappa = (analytic > 1e-13 * scale.max(f64::MIN_POSITIVE)).then(|| finite_difference / analytic);

    let x = overlap_matrix(basis, &spec.basis())?;
    let gram = x.gram();
    let mut m = vec![0.0; d * d];
    for a in 0..d {
        for b in 0..d {
            m[a * d + b] = if a == b { 1.0 } else { 0.0 } - gram[a * d + b];
        }
    }
    // symmetrize against rounding before the Hermitian check
    for a in 0..d {
        for b in 0..a {
            let s = 0.5 * (m[a * d + b] + m[b * d + a]);
            m[a * d + b] = s;
            m[b * d + a] = s;
        }
    }
    let q_bound = eigvalsh(&HermitianOperator::from_real(d, &m)?)?
        .last()
        .copied()
        .unwrap_or(0.0)
        .clamp(0.0, 1.0);

    let op_norm = spec.eigenvalues().iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let frobenius_bound = h.matrix().frobenius_norm_sq() / d as f64 * q_bound;
    let operator_bound = op_norm * op_norm * q_bound;
    let slack = 1e-10;
    let bound_holds = analytic <= frobenius_bound * (1.0 + slack) + slack * scale
        && frobenius_bound <= operator_bound * (1.0 + slack) + slack * scale;

    Ok(CurvatureReport {
        analytic,
        finite_difference,
        kappa,
        q_bound,
        frobenius_bound,
        operator_bound,
        bound_holds,
    })
}

/// One chain of the commuting `k`-local family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KLocalRow {
    pub l: usize,
    pub k: usize,
    /// `Tr H²`, equal to `d (L−k+1)`.
    pub trace_h2: f64,
    pub curvature: CurvatureReport,
    /// `finite_difference / ‖H‖∞²` with `‖H‖∞ = L−k+1`.
    pub normalized: f64,
    /// `1 / (L−k+1)`.
    pub inverse_terms: f64,
}

/// Rows plus a fit of `normalized = slope · inverse_terms` through the
/// origin.
#[derive(Clone, Debug, PartialEq)]
pub struct KLocalScan {
    pub rows: Vec<KLocalRow>,
    pub slope: f64,
    /// Uncentered coefficient of determination of the fit through the origin.
    pub r_squared: f64,
}

/// Runs [`short_time_cgp_curvature`] on `H^{(k)}` in the computational basis
/// for each `L`; `k = None` means `k = L`.
pub fn klocal_short_time_scan(l_values: &[usize], k: Option<usize>) -> Result<KLocalScan> {
    if l_values.is_empty() {
        return Err(Error::NoSamples("k-local scan"));
    }
    let mut rows = Vec::with_capacity(l_values.len());
    for &l in l_values {
        let k = k.unwrap_or(l);
        let h = build_k_local_commuting(l, k)?;
        let d = h.dim();
        let terms = (l - k + 1) as f64;
        let curvature = short_time_cgp_curvature(&h, &OrthonormalBasis::computational(d))?;
        rows.push(KLocalRow {
            l,
            k,
            trace_h2: h.matrix().frobenius_norm_sq(),
            normalized: curvature.finite_difference / (terms * terms),
            inverse_terms: 1.0 / terms,
            curvature,
        });
    }
    let (slope, r_squared) = origin_fit(
        &rows.iter().map(|r| r.inverse_terms).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.normalized).collect::<Vec<_>>(),
    );
    Ok(KLocalScan { rows, slope, r_squared })
}

/// Least squares `y ≈ s x`; returns `(s, 1 − SS_res / Σy²)`.
pub(crate) fn origin_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let s = sxy / sxx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - s * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| b * b).sum();
    (s, 1.0 - ss_res / ss_tot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    #[test]
    fn sigma_x_in_z_basis() {
        let h = HermitianOperator::new(pauli::x()).unwrap();
        let r = short_time_cgp_curvature(&h, &OrthonormalBasis::computational(2)).unwrap();
        assert!((r.analytic - 1.0).abs() < 1e-15);
        assert!((r.finite_difference - 2.0).abs() < 1e-6, "{r:?}");
        assert!((r.kappa.unwrap() - 2.0).abs() < 1e-6);
        assert!((r.q_bound - 1.0).abs() < 1e-12);
        assert!(r.bound_holds);
    }

    #[test]
    fn diagonal_hamiltonian_has_no_curvature() {
        let h = HermitianOperator::from_real(3, &[1.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 2.0]).unwrap();
        let r = short_time_cgp_curvature(&h, &OrthonormalBasis::computational(3)).unwrap();
        assert_eq!(r.analytic, 0.0);
        assert!(r.finite_difference.abs() < 1e-12);
        assert!(r.kappa.is_none());
        assert!(r.q_bound < 1e-12);
    }

    #[test]
    fn origin_fit_exact_line() {
        let (s, r2) = origin_fit(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]);
        assert!((s - 2.0).abs() < 1e-15 && (r2 - 1.0).abs() < 1e-15);
        // constant x still fits
        let (s, r2) = origin_fit(&[1.0, 1.0], &[2.0, 2.0]);
        assert!((s - 2.0).abs() < 1e-15 && (r2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn klocal_small_scan() {
        let scan = klocal_short_time_scan(&[3, 4], Some(2)).unwrap();
        for row in &scan.rows {
            let d = (1usize << row.l) as f64;
            assert!((row.trace_h2 - d * (row.l - 1) as f64).abs() < 1e-9);
        }
        assert!((scan.slope - 2.0).abs() < 1e-5);
        assert!(scan.r_squared > 0.999);
    }
}
