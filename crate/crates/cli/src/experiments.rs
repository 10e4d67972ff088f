//! One function per experiment kind, each returning its CSV tables.

use std::fs;
use std::path::Path;

use qchaos_core::coherence::{eigenstate_coherence_scan_spec, GoeNormalizers};
use qchaos_core::dynamics::{cgp, tfim_dynamics_series, variance_ratio_scan, TimeGrid};
use qchaos_core::linalg::{eigh, ComplexMatrix, HermitianOperator, OrthonormalBasis};
use qchaos_core::majorization::majorization_flags;
use qchaos_core::models::{build_tfim, build_xxz_defect, mean_field_basis, sector_basis, TfimParams, XxzDefectParams};
use qchaos_core::rmt::{
    cgp_offdiagonal_discrepancy, gue_cgp_bound_check, haar_avg_cgp, klocal_short_time_scan, loglog_slope,
    sample_goe, sample_gue, sample_haar_unitary, sff_r4, short_time_cgp_curvature, spacing_statistics,
    spacing_statistics_of, EnsembleKind, EnsembleSpec, McEstimate, MIN_LEVELS,
};
use qchaos_core::Complex64;

use crate::config::{
    default_quantities, BasisKind, EnsembleConfig, EnsembleName, ExperimentConfig, ExperimentKind, ModelConfig,
    Normalizer, Quantity, Spacing, TimeConfig,
};
use crate::output::CsvTable;
use crate::RunError;

pub fn run_experiment(c: &ExperimentConfig) -> Result<Vec<CsvTable>, RunError> {
    match c.experiment {
        ExperimentKind::Spectrum => spectrum(c),
        ExperimentKind::Eigencoherence => eigencoherence(c),
        ExperimentKind::Majorization => majorization(c),
        ExperimentKind::Dynamics => dynamics(c),
        ExperimentKind::Rmt => rmt(c),
        ExperimentKind::Shorttime => shorttime(c),
    }
}

fn model(c: &ExperimentConfig) -> Result<&ModelConfig, RunError> {
    c.model.as_ref().ok_or_else(|| RunError::Config("model: missing".into()))
}

fn ensemble(c: &ExperimentConfig) -> Result<&EnsembleConfig, RunError> {
    c.ensemble.as_ref().ok_or_else(|| RunError::Config("ensemble: missing".into()))
}

fn seed(e: &EnsembleConfig) -> Result<u64, RunError> {
    e.seed.ok_or_else(|| RunError::Config("ensemble.seed: missing".into()))
}

fn grid(t: Option<&TimeConfig>) -> Result<TimeGrid, RunError> {
    let t = t.ok_or_else(|| RunError::Config("time: missing".into()))?;
    Ok(match (t.spacing, t.dt, t.points) {
        (Spacing::Linear, Some(dt), _) => TimeGrid::stepped(t.t_min, t.t_max, dt)?,
        (Spacing::Linear, None, Some(n)) => TimeGrid::linspace(t.t_min, t.t_max, n)?,
        (Spacing::Log, _, Some(n)) => TimeGrid::log_spaced(t.t_min, t.t_max, n)?,
        _ => return Err(RunError::Config("time: invalid grid".into())),
    })
}

fn rmt_kind(k: EnsembleName) -> EnsembleKind {
    match k {
        EnsembleName::Goe => EnsembleKind::Goe,
        EnsembleName::Gue => EnsembleKind::Gue,
        EnsembleName::Haar => EnsembleKind::Haar,
        EnsembleName::Phases => EnsembleKind::DiagonalPhases,
        EnsembleName::Pauli => EnsembleKind::PauliDesign,
    }
}

/// Hamiltonian plus the natural "site" basis of the model.
fn hamiltonian(m: &ModelConfig) -> Result<(HermitianOperator, OrthonormalBasis, Option<XxzDefectParams>), RunError> {
    match m {
        ModelConfig::Xxz { .. } => {
            let p = m.xxz().ok_or_else(|| RunError::Config("model.l: missing".into()))?;
            // build first: it enforces the dense capacity before any d×d basis is allocated
            let h = build_xxz_defect(&p)?;
            let site = sector_basis(p.l, p.n_up)?.site_basis();
            Ok((h, site, Some(p)))
        }
        ModelConfig::Tfim { l, g, h } => {
            let h = build_tfim(&TfimParams { l: *l, g: *g, h: *h })?;
            let d = h.dim();
            Ok((h, OrthonormalBasis::computational(d), None))
        }
        ModelConfig::Klocal { .. } => Err(RunError::Config("model.kind: klocal has no single Hamiltonian".into())),
    }
}

/// Reads `d` lines of `2d` whitespace- or comma-separated numbers:
/// `re(M_j0) im(M_j0) re(M_j1) ...`, columns of `M` being the basis vectors.
pub fn load_basis(path: &Path, d: usize) -> Result<OrthonormalBasis, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    let bad = |msg: String| RunError::Config(format!("basis.path: {}: {msg}", path.display()));
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#')).collect();
    if rows.len() != d {
        return Err(bad(format!("{} rows, expected {d}", rows.len())));
    }
    let mut data = Vec::with_capacity(d * d);
    for (i, line) in rows.iter().enumerate() {
        let nums: Vec<f64> = line
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|e| bad(format!("row {}: {e}", i + 1))))
            .collect::<Result<_, _>>()?;
        if nums.len() != 2 * d {
            return Err(bad(format!("row {} has {} numbers, expected {}", i + 1, nums.len(), 2 * d)));
        }
        data.extend(nums.chunks(2).map(|p| Complex64::new(p[0], p[1])));
    }
    Ok(OrthonormalBasis::new(ComplexMatrix::new(d, d, data)?)?)
}

fn chosen_basis(
    c: &ExperimentConfig,
    site: OrthonormalBasis,
    xxz: Option<&XxzDefectParams>,
) -> Result<OrthonormalBasis, RunError> {
    let d = site.dim();
    let Some(b) = &c.basis else { return Ok(site) };
    Ok(match b.kind {
        BasisKind::Site => site,
        BasisKind::Computational => OrthonormalBasis::computational(d),
        BasisKind::MeanField => {
            let p = xxz.ok_or_else(|| RunError::Config("basis.kind: mean_field needs an xxz model".into()))?;
            mean_field_basis(p)?.basis
        }
        BasisKind::CustomFile => load_basis(b.path.as_deref().expect("validated"), d)?,
    })
}

fn spacing_tables(spec_levels: &[f64], prefix: &str, tables: &mut Vec<CsvTable>) -> Result<Option<f64>, RunError> {
    if spec_levels.len() < MIN_LEVELS {
        return Ok(None);
    }
    let st = spacing_statistics_of(spec_levels)?;
    let mut s = CsvTable::new(&format!("{prefix}spacings"), &["index", "spacing"]);
    for (i, x) in st.spacings.iter().enumerate() {
        s.push(vec![i.into(), (*x).into()]);
    }
    let mut r = CsvTable::new(&format!("{prefix}ratios"), &["index", "ratio"]);
    for (i, x) in st.ratios.iter().enumerate() {
        r.push(vec![i.into(), (*x).into()]);
    }
    let mut h = CsvTable::new(&format!("{prefix}histogram"), &["bin_lo", "bin_hi", "density"]);
    for (i, x) in st.histogram_density.iter().enumerate() {
        h.push(vec![st.histogram_edges[i].into(), st.histogram_edges[i + 1].into(), (*x).into()]);
    }
    tables.extend([s, r, h]);
    Ok(Some(st.mean_ratio))
}

fn spectrum(c: &ExperimentConfig) -> Result<Vec<CsvTable>, RunError> {
    let (h, _, _) = hamiltonian(model(c)?)?;
    let spec = eigh(&h)?;
    let mut levels = CsvTable::new("levels", &["index", "energy"]);
    for (i, e) in spec.eigenvalues().iter().enumerate() {
        levels.push(vec![i.into(), (*e).into()]);
    }
    let mut tables = vec![levels];
    let mean_ratio = spacing_tables(spec.eigenvalues(), "", &mut tables)?;
    let mut summary = CsvTable::new("summary", &["dim", "min_gap", "mean_ratio"]);
    summary.push(vec![spec.dim().into(), spec.min_gap().into(), mean_ratio.into()]);
    tables.push(summary);
    Ok(tables)
}

fn eigencoherence(c: &ExperimentConfig) -> Result<Vec<CsvTable>, RunError> {
    let (h, site, xxz) = hamiltonian(model(c)?)?;
    let spec = eigh(&h)?;
    let d = spec.dim();
    let basis = chosen_basis(c, site, xxz.as_ref())?;
    let a = c.analysis();
    let norms = match a.normalizer.unwrap_or(Normalizer::Analytic) {
        Normalizer::Analytic => GoeNormalizers::analytic(d)?,
        Normalizer::MonteCarlo => {
            let e = ensemble(c)?;
            GoeNormalizers::monte_carlo(d, e.samples, seed(e)?)?
        }
    };
    let scan = eigenstate_coherence_scan_spec(&spec, &basis, &norms)?;
    let mut t = CsvTable::new(
        "coherence",
        &["index", "energy", "c2", "c_rel", "c_l1", "pr2", "normalized_c2", "normalized_c_rel"],
    );
    for r in &scan.reports {
        t.push(vec![
            r.index.into(),
            r.energy.into(),
            r.c2.into(),
            r.c_rel.into(),
            r.c_l1.into(),
            r.pr2.into(),
            r.normalized_c2.into(),
            r.normalized_c_rel.into(),
        ]);
    }
    let window = a.window.unwrap_or(0.2);
    let mut s = CsvTable::new(
        "summary",
        &["dim", "window", "mean_normalized_c2", "mean_normalized_c_rel", "goe_c2", "goe_c_rel", "min_gap"],
    );
    s.push(vec![
        d.into(),
        window.into(),
        scan.central_mean(window, |r| r.normalized_c2)?.into(),
        scan.central_mean(window, |r| r.normalized_c_rel)?.into(),
        norms.c2.into(),
        norms.c_rel.into(),
        scan.min_gap.into(),
    ]);
    Ok(vec![t, s])
}

fn majorization(c: &ExperimentConfig) -> Result<Vec<CsvTable>, RunError> {
    let m = model(c)?;
    let a = c.analysis();
    let sizes = match (&a.sizes, m) {
        (Some(s), _) => s.clone(),
        (None, ModelConfig::Xxz { l: Some(l), .. }) => vec![*l],
        _ => return Err(RunError::Config("analysis.sizes: missing".into())),
    };
    let windows = a.windows.clone().unwrap_or_else(|| vec![1.0, 0.2]);
    let kind = c.basis.as_ref().map_or(BasisKind::Site, |b| b.kind);
    let mut t = CsvTable::new("majorization", &["l", "dim", "window", "fraction", "pairs"]);
    for l in sizes {
        let pi = m.xxz_at(l, Some(a.delta_integrable.unwrap_or(1))).expect("xxz model");
        let pc = m.xxz_at(l, Some(a.delta_chaotic.unwrap_or(l / 2))).expect("xxz model");
        let si = eigh(&build_xxz_defect(&pi)?)?;
        let sc = eigh(&build_xxz_defect(&pc)?)?;
        // the mean-field basis is taken from the chaotic chain's free part
        let basis = match kind {
            BasisKind::MeanField => mean_field_basis(&pc)?.basis,
            _ => sector_basis(l, pi.n_up)?.site_basis(),
        };
        let flags = majorization_flags(&si, &sc, &basis)?;
        for &w in &windows {
            let range = qchaos_core::majorization::central_window(flags.0.len(), w)?;
            t.push(vec![l.into(), si.dim().into(), w.into(), flags.fraction(w)?.into(), range.len().into()]);
        }
    }
    Ok(vec![t])
}

fn dynamics(c: &ExperimentConfig) -> Result<Vec<CsvTable>, RunError> {
    let ModelConfig::Tfim { l, g, h } = *model(c)? else {
        return Err(RunError::Config("model.kind: dynamics needs tfim".into()));
    };
    let a = c.analysis();
    let params = TfimParams { l, g, h };
    let grid = grid(c.time.as_ref())?;
    let with_offdiag = a.with_offdiag.unwrap_or(true);
    let series = tfim_dynamics_series(&params, a.v_site.unwrap_or(1), a.w_site.unwrap_or(l), &grid, with_offdiag)?;
    let mut t = CsvTable::new("dynamics", &["t", "otoc", "cgp_part", "offdiag_part"]);
    for s in &series.samples {
        t.push(vec![s.t.into(), s.otoc.into(), s.cgp_part.into(), s.offdiag_part.into()]);
    }
    let mut tables = vec![t];
    if let (Some(sizes), Some([lo, hi])) = (&a.variance_sizes, a.variance_window) {
        // the configured chain is the chaotic template, compared with the free-fermion point g = 1, h = 0
        let rows = variance_ratio_scan(&TfimParams::integrable(l), &params, sizes, &grid, (lo, hi))?;
        let mut v = CsvTable::new("variance", &["n", "observable", "var_integrable", "var_chaotic", "ratio"]);
        for r in rows {
            v.push(vec![
                r.n.into(),
                r.observable.name().into(),
                r.var_integrable.into(),
                r.var_chaotic.into(),
                r.ratio.into(),
            ]);
        }
        tables.push(v);
    }
    Ok(tables)
}

fn mc_row(t: &mut CsvTable, x: f64, e: &McEstimate) {
    t.push(vec![x.into(), e.mean.into(), e.std_err.into()]);
}

fn rmt(c: &ExperimentConfig) -> Result<Vec<CsvTable>, RunError> {
    let e = ensemble(c)?;
    let d = e.dim.ok_or_else(|| RunError::Config("ensemble.dim: missing".into()))?;
    let ens = EnsembleSpec::new(rmt_kind(e.kind), d, e.samples, seed(e)?)?;
    let quantities = c.analysis().quantities.unwrap_or_else(|| default_quantities(e.kind));
    let basis = match &c.basis {
        Some(b) if b.kind == BasisKind::CustomFile => load_basis(b.path.as_deref().expect("validated"), d)?,
        _ => OrthonormalBasis::computational(d),
    };
    let mut tables = Vec::new();
    for q in quantities {
        match q {
            Quantity::Sff => {
                let est = sff_r4(&ens, &grid(c.time.as_ref())?)?;
                let mut t = CsvTable::new(
                    "sff",
                    &["t", "r4", "r4_std_err", "pair_distinct", "pair_distinct_std_err", "full", "full_std_err"],
                );
                for i in 0..est.times.len() {
                    t.push(vec![
                        est.times[i].into(),
                        est.r4_values[i].into(),
                        est.standard_errors[i].into(),
                        est.pair_distinct_values[i].into(),
                        est.pair_distinct_errors[i].into(),
                        est.full_values[i].into(),
                        est.full_errors[i].into(),
                    ]);
                }
                tables.push(t);
            }
            Quantity::Bound => {
                let rows = gue_cgp_bound_check(&ens, &basis, &grid(c.time.as_ref())?)?;
                let mut t = CsvTable::new(
                    "bound",
                    &["t", "lhs", "lhs_std_err", "rhs", "rhs_std_err", "gap", "gap_std_err", "holds"],
                );
                for r in rows {
                    t.push(vec![
                        r.t.into(),
                        r.lhs.into(),
                        r.lhs_std_err.into(),
                        r.rhs.into(),
                        r.rhs_std_err.into(),
                        r.gap.into(),
                        r.gap_std_err.into(),
                        r.holds.into(),
                    ]);
                }
                tables.push(t);
            }
            Quantity::Discrepancy => {
                let rows = cgp_offdiagonal_discrepancy(&ens, &basis, &grid(c.time.as_ref())?)?;
                let mut t = CsvTable::new("discrepancy", &["t", "mean", "std_err"]);
                for (x, est) in &rows {
                    mc_row(&mut t, *x, est);
                }
                let (ts, ys): (Vec<f64>, Vec<f64>) = rows.iter().filter(|(x, e)| *x > 0.0 && e.mean > 0.0).map(|(x, e)| (*x, e.mean)).unzip();
                let mut s = CsvTable::new("discrepancy_fit", &["points", "loglog_slope"]);
                let slope = if ts.len() >= 2 { Some(loglog_slope(&ts, &ys)?) } else { None };
                s.push(vec![ts.len().into(), slope.into()]);
                tables.extend([t, s]);
            }
            Quantity::GapRatio => {
                let mut per = Vec::with_capacity(ens.samples);
                for i in 0..ens.samples {
                    let mut rng = ens.rng(i);
                    let h = match e.kind {
                        EnsembleName::Gue => sample_gue(d, &mut rng),
                        _ => sample_goe(d, &mut rng),
                    };
                    per.push(spacing_statistics(&eigh(&h)?)?.mean_ratio);
                }
                let est = McEstimate::from_samples(&per);
                let mut t = CsvTable::new("gap_ratio", &["dim", "samples", "mean_ratio", "std_err"]);
                t.push(vec![d.into(), ens.samples.into(), est.mean.into(), est.std_err.into()]);
                tables.push(t);
            }
            Quantity::HaarCgp => {
                let mut per = Vec::with_capacity(ens.samples);
                for i in 0..ens.samples {
                    per.push(cgp(&sample_haar_unitary(d, &mut ens.rng(i)), &basis)?);
                }
                let est = McEstimate::from_samples(&per);
                let mut t = CsvTable::new("haar_cgp", &["dim", "samples", "mean", "std_err", "closed_form"]);
                t.push(vec![d.into(), ens.samples.into(), est.mean.into(), est.std_err.into(), haar_avg_cgp(d)?.into()]);
                tables.push(t);
            }
        }
    }
    Ok(tables)
}

fn shorttime(c: &ExperimentConfig) -> Result<Vec<CsvTable>, RunError> {
    let ModelConfig::Klocal { k } = *model(c)? else {
        return Err(RunError::Config("model.kind: shorttime needs klocal".into()));
    };
    let sizes = c.analysis().sizes.ok_or_else(|| RunError::Config("analysis.sizes: missing".into()))?;
    let scan = klocal_short_time_scan(&sizes, k)?;
    let mut t = CsvTable::new(
        "klocal",
        &["l", "k", "trace_h2", "analytic", "finite_difference", "kappa", "normalized", "inverse_terms"],
    );
    for r in &scan.rows {
        t.push(vec![
            r.l.into(),
            r.k.into(),
            r.trace_h2.into(),
            r.curvature.analytic.into(),
            r.curvature.finite_difference.into(),
            r.curvature.kappa.into(),
            r.normalized.into(),
            r.inverse_terms.into(),
        ]);
    }
    let mut fit = CsvTable::new("fit", &["slope", "r_squared"]);
    fit.push(vec![scan.slope.into(), scan.r_squared.into()]);
    let mut tables = vec![t, fit];
    if let Some(e) = &c.ensemble {
        let d = e.dim.ok_or_else(|| RunError::Config("ensemble.dim: missing".into()))?;
        let ens = EnsembleSpec::new(EnsembleKind::Gue, d, e.samples, seed(e)?)?;
        let mut cur = CsvTable::new(
            "curvature",
            &["sample", "analytic", "finite_difference", "kappa", "q_bound", "frobenius_bound", "operator_bound", "bound_holds"],
        );
        for i in 0..ens.samples {
            let mut rng = ens.rng(i);
            let h = sample_gue(d, &mut rng);
            let basis = OrthonormalBasis::from_unitary(sample_haar_unitary(d, &mut rng));
            let r = short_time_cgp_curvature(&h, &basis)?;
            cur.push(vec![
                i.into(),
                r.analytic.into(),
                r.finite_difference.into(),
                r.kappa.into(),
                r.q_bound.into(),
                r.frobenius_bound.into(),
                r.operator_bound.into(),
                r.bound_holds.into(),
            ]);
        }
        tables.push(cur);
    }
    Ok(tables)
}
