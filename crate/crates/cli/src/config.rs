//! Experiment configuration: one TOML document per run.

use std::fmt;
use std::path::PathBuf;

use qchaos_core::models::{sector_basis, XxzDefectParams, MAX_FULL_SPACE_SITES};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Spectrum,
    Eigencoherence,
    Majorization,
    Dynamics,
    Rmt,
    Shorttime,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Spectrum,
        ExperimentKind::Eigencoherence,
        ExperimentKind::Majorization,
        ExperimentKind::Dynamics,
        ExperimentKind::Rmt,
        ExperimentKind::Shorttime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::Eigencoherence => "eigencoherence",
            ExperimentKind::Majorization => "majorization",
            ExperimentKind::Dynamics => "dynamics",
            ExperimentKind::Rmt => "rmt",
            ExperimentKind::Shorttime => "shorttime",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentKind::Spectrum => "energy levels, spacing histogram and gap ratios of an XXZ or TFIM chain",
            ExperimentKind::Eigencoherence => "coherence measures of every eigenstate in a chosen basis",
            ExperimentKind::Majorization => "fraction of integrable eigenstates majorizing their chaotic partners",
            ExperimentKind::Dynamics => "TFIM squared commutator and CGP time series, temporal-variance scan",
            ExperimentKind::Rmt => "random-matrix form factors, CGP bound, Haar averages and gap ratios",
            ExperimentKind::Shorttime => "short-time CGP curvature for k-local chains and random Hamiltonians",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Xxz {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l: Option<usize>,
        /// Defaults to `⌊L/3⌋`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_up: Option<usize>,
        /// Defaults to `⌊L/2⌋`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<usize>,
        #[serde(default)]
        omega: f64,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "one")]
        j_xy: f64,
        #[serde(default = "default_jz")]
        j_z: f64,
    },
    Tfim {
        l: usize,
        g: f64,
        h: f64,
    },
    Klocal {
        /// Interaction range; absent means `k = L` for every size.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
}

fn default_epsilon() -> f64 {
    0.5
}

fn one() -> f64 {
    1.0
}

fn default_jz() -> f64 {
    0.5
}

impl ModelConfig {
    fn kind_name(&self) -> &'static str {
        match self {
            ModelConfig::Xxz { .. } => "xxz",
            ModelConfig::Tfim { .. } => "tfim",
            ModelConfig::Klocal { .. } => "klocal",
        }
    }

    /// XXZ parameters at chain length `l` with this block's couplings.
    pub fn xxz_at(&self, l: usize, delta: Option<usize>) -> Option<XxzDefectParams> {
        match *self {
            ModelConfig::Xxz {
                n_up,
                delta: d0,
                omega,
                epsilon,
                j_xy,
                j_z,
                ..
            } => Some(XxzDefectParams {
                l,
                n_up: n_up.unwrap_or(l / 3),
                delta: delta.or(d0).unwrap_or(l / 2),
                omega,
                epsilon_delta: epsilon,
                j_xy,
                j_z,
            }),
            _ => None,
        }
    }

    /// The single XXZ parameter set of this block, if `l` is given.
    pub fn xxz(&self) -> Option<XxzDefectParams> {
        match self {
            ModelConfig::Xxz { l: Some(l), .. } => self.xxz_at(*l, None),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Site,
    MeanField,
    Computational,
    CustomFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub kind: BasisKind,
    /// Text file with `d` rows of `2d` numbers: real and imaginary parts of
    /// each row of the column matrix, interleaved.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default)]
    pub t_min: f64,
    pub t_max: f64,
    /// Step of a linear grid; exclusive with `points`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default = "linear")]
    pub spacing: Spacing,
}

fn linear() -> Spacing {
    Spacing::Linear
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleName {
    Goe,
    Gue,
    Haar,
    Phases,
    Pauli,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub kind: EnsembleName,
    /// Inferred from the model when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub samples: usize,
    /// Mandatory; kept optional here so a missing seed is reported as a
    /// validation error alongside any others.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalizer {
    Analytic,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Sff,
    Bound,
    Discrepancy,
    GapRatio,
    HaarCgp,
}

/// Experiment-specific knobs. Each experiment accepts a subset; any other
/// field present is a validation error.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Central spectral fraction used for summaries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windows: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalizer: Option<Normalizer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_integrable: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_chaotic: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_site: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_site: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub with_offdiag: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance_sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance_window: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantities: Option<Vec<Quantity>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(default = "csv")]
    pub format: OutputFormat,
}

fn csv() -> OutputFormat {
    OutputFormat::Csv
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

impl ExperimentConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn analysis(&self) -> AnalysisConfig {
        self.analysis.clone().unwrap_or_default()
    }
}

/// One problem found in a configuration, located by its dotted field path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigIssue {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

impl ValidationErrors {
    pub fn mentions(&self, needle: &str) -> bool {
        self.0.iter().any(|e| e.field.contains(needle) || e.message.contains(needle))
    }
}

#[derive(Default)]
struct Issues(Vec<ConfigIssue>);

impl Issues {
    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(ConfigIssue {
            field: field.into(),
            message: message.into(),
        });
    }
}

const BLOCKS: [&str; 7] = ["experiment", "model", "basis", "time", "ensemble", "analysis", "output"];

fn block<T: DeserializeOwned>(table: &toml::Table, key: &str, issues: &mut Issues) -> Option<T> {
    let value = table.get(key)?;
    match value.clone().try_into::<T>() {
        Ok(v) => Some(v),
        Err(e) => {
            issues.push(key, e.message().trim().to_string());
            None
        }
    }
}

/// Parses and fully validates a configuration, reporting every problem
/// found rather than stopping at the first.
pub fn validate(text: &str) -> Result<ExperimentConfig, ValidationErrors> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let location = e
            .span()
            .map(|s| {
                let line = text[..s.start.min(text.len())].matches('\n').count() + 1;
                format!("line {line}")
            })
            .unwrap_or_else(|| "document".to_string());
        ValidationErrors(vec![ConfigIssue {
            field: location,
            message: e.message().trim().to_string(),
        }])
    })?;

    let mut issues = Issues::default();
    for key in table.keys() {
        if !BLOCKS.contains(&key.as_str()) {
            issues.push(key.clone(), format!("unknown block; expected one of {}", BLOCKS.join(", ")));
        }
    }
    let valid_kinds = ExperimentKind::ALL.map(|k| k.name()).join(", ");
    let experiment = match table.get("experiment") {
        None => {
            issues.push("experiment", format!("missing; valid kinds: {valid_kinds}"));
            None
        }
        Some(toml::Value::String(s)) => match ExperimentKind::from_name(s) {
            Some(k) => Some(k),
            None => {
                issues.push("experiment", format!("unknown experiment kind `{s}`; valid kinds: {valid_kinds}"));
                None
            }
        },
        Some(_) => {
            issues.push("experiment", format!("must be a string; valid kinds: {valid_kinds}"));
            None
        }
    };
    let model: Option<ModelConfig> = block(&table, "model", &mut issues);
    let basis: Option<BasisConfig> = block(&table, "basis", &mut issues);
    let time: Option<TimeConfig> = block(&table, "time", &mut issues);
    let ensemble: Option<EnsembleConfig> = block(&table, "ensemble", &mut issues);
    let analysis: Option<AnalysisConfig> = block(&table, "analysis", &mut issues);
    let output: Option<OutputConfig> = block(&table, "output", &mut issues);

    let Some(experiment) = experiment else {
        return Err(ValidationErrors(issues.0));
    };
    let config = ExperimentConfig {
        experiment,
        model,
        basis,
        time,
        ensemble,
        analysis,
        output,
    };
    // blocks that failed to parse are already reported; semantic checks
    // only run on what parsed
    let parsed_ok = |key: &str| table.get(key).is_none() || !issues.0.iter().any(|i| i.field == key);
    let skip: Vec<&str> = BLOCKS.iter().copied().filter(|k| !parsed_ok(k)).collect();
    check(&config, &skip, &mut issues);
    if issues.0.is_empty() {
        Ok(config)
    } else {
        Err(ValidationErrors(issues.0))
    }
}

fn require<'a, T>(value: &'a Option<T>, key: &str, skip: &[&str], exp: ExperimentKind, issues: &mut Issues) -> Option<&'a T> {
    if value.is_none() && !skip.contains(&key) {
        issues.push(key, format!("block required by experiment `{}`", exp.name()));
    }
    value.as_ref()
}

fn forbid<T>(value: &Option<T>, key: &str, exp: ExperimentKind, issues: &mut Issues) {
    if value.is_some() {
        issues.push(key, format!("not used by experiment `{}`", exp.name()));
    }
}

/// Fields of the analysis block each experiment understands.
fn analysis_fields(exp: ExperimentKind) -> &'static [&'static str] {
    match exp {
        ExperimentKind::Spectrum => &[],
        ExperimentKind::Eigencoherence => &["window", "normalizer"],
        ExperimentKind::Majorization => &["windows", "sizes", "delta_integrable", "delta_chaotic"],
        ExperimentKind::Dynamics => &["v_site", "w_site", "with_offdiag", "variance_sizes", "variance_window"],
        ExperimentKind::Rmt => &["quantities"],
        ExperimentKind::Shorttime => &["sizes"],
    }
}

fn present_analysis_fields(a: &AnalysisConfig) -> Vec<&'static str> {
    let mut out = Vec::new();
    macro_rules! field {
        ($name:ident) => {
            if a.$name.is_some() {
                out.push(stringify!($name));
            }
        };
    }
    field!(window);
    field!(windows);
    field!(sizes);
    field!(normalizer);
    field!(delta_integrable);
    field!(delta_chaotic);
    field!(v_site);
    field!(w_site);
    field!(with_offdiag);
    field!(variance_sizes);
    field!(variance_window);
    field!(quantities);
    out
}

fn check_fraction(x: f64, field: &str, issues: &mut Issues) {
    if !(x > 0.0 && x <= 1.0) {
        issues.push(field, format!("fraction {x} not in (0, 1]"));
    }
}

fn check_xxz(p: &XxzDefectParams, field: &str, issues: &mut Issues) -> Option<usize> {
    if p.l < 2 {
        issues.push(format!("{field}.l"), format!("chain length {} < 2", p.l));
        return None;
    }
    if p.delta < 1 || p.delta > p.l {
        issues.push(format!("{field}.delta"), format!("defect site out of range: delta = {} not in 1..={}", p.delta, p.l));
    }
    if p.n_up > p.l {
        issues.push(format!("{field}.n_up"), format!("n_up = {} exceeds L = {}", p.n_up, p.l));
        return None;
    }
    if let Err(e) = p.validate() {
        issues.push(field, e.to_string());
        return None;
    }
    sector_basis(p.l, p.n_up).ok().map(|s| s.dim())
}

fn check_time(t: &TimeConfig, issues: &mut Issues) {
    if !(t.t_max.is_finite() && t.t_min.is_finite() && t.t_max > t.t_min) {
        issues.push("time.t_max", format!("t_max = {} must exceed t_min = {}", t.t_max, t.t_min));
    }
    if t.t_min < 0.0 {
        issues.push("time.t_min", "must be non-negative");
    }
    match (t.dt, t.points) {
        (Some(_), Some(_)) => issues.push("time", "give either dt or points, not both"),
        (None, None) => issues.push("time", "one of dt or points is required"),
        (Some(dt), None) => {
            if !(dt > 0.0) {
                issues.push("time.dt", "must be positive");
            }
            if t.spacing == Spacing::Log {
                issues.push("time.spacing", "log spacing needs points, not dt");
            }
        }
        (None, Some(n)) => {
            if n < 2 {
                issues.push("time.points", "at least 2 points required");
            }
        }
    }
    if t.spacing == Spacing::Log && !(t.t_min > 0.0) {
        issues.push("time.t_min", "log spacing needs t_min > 0");
    }
}

fn check_ensemble(e: &EnsembleConfig, allowed: &[EnsembleName], issues: &mut Issues) {
    if e.seed.is_none() {
        issues.push("ensemble.seed", "seed is mandatory whenever sampling occurs");
    }
    if e.samples == 0 {
        issues.push("ensemble.samples", "must be positive");
    }
    if !allowed.contains(&e.kind) {
        issues.push("ensemble.kind", format!("{:?} not allowed here; expected one of {allowed:?}", e.kind));
    }
    if let Some(d) = e.dim {
        if d < 2 {
            issues.push("ensemble.dim", "must be at least 2");
        }
    }
}

fn check(c: &ExperimentConfig, skip: &[&str], issues: &mut Issues) {
    let exp = c.experiment;
    if let Some(a) = &c.analysis {
        let allowed = analysis_fields(exp);
        for f in present_analysis_fields(a) {
            if !allowed.contains(&f) {
                issues.push(format!("analysis.{f}"), format!("not used by experiment `{}`", exp.name()));
            }
        }
    }
    if let Some(t) = &c.time {
        check_time(t, issues);
    }
    if let Some(b) = &c.basis {
        match (b.kind, &b.path) {
            (BasisKind::CustomFile, None) => issues.push("basis.path", "required for a custom-file basis"),
            (BasisKind::CustomFile, Some(_)) => {}
            (_, Some(_)) => issues.push("basis.path", "only used by a custom-file basis"),
            _ => {}
        }
    }
    let a = c.analysis();
    match exp {
        ExperimentKind::Spectrum => {
            forbid(&c.basis, "basis", exp, issues);
            forbid(&c.time, "time", exp, issues);
            forbid(&c.ensemble, "ensemble", exp, issues);
            match require(&c.model, "model", skip, exp, issues) {
                Some(m @ ModelConfig::Xxz { l, .. }) => match m.xxz() {
                    Some(p) => {
                        check_xxz(&p, "model", issues);
                    }
                    None if l.is_none() => issues.push("model.l", "required"),
                    None => {}
                },
                Some(ModelConfig::Tfim { l, .. }) => check_tfim_l(*l, issues),
                Some(m) => issues.push("model.kind", format!("`{}` not supported; use xxz or tfim", m.kind_name())),
                None => {}
            }
        }
        ExperimentKind::Eigencoherence => {
            forbid(&c.time, "time", exp, issues);
            let dim = match require(&c.model, "model", skip, exp, issues) {
                Some(m @ ModelConfig::Xxz { l, .. }) => match m.xxz() {
                    Some(p) => check_xxz(&p, "model", issues),
                    None => {
                        if l.is_none() {
                            issues.push("model.l", "required");
                        }
                        None
                    }
                },
                Some(ModelConfig::Tfim { l, .. }) => {
                    check_tfim_l(*l, issues);
                    Some(1usize << (*l).min(MAX_FULL_SPACE_SITES))
                }
                Some(m) => {
                    issues.push("model.kind", format!("`{}` not supported; use xxz or tfim", m.kind_name()));
                    None
                }
                None => None,
            };
            if let (Some(b), Some(ModelConfig::Tfim { .. })) = (&c.basis, &c.model) {
                if b.kind == BasisKind::MeanField {
                    issues.push("basis.kind", "mean_field basis is defined for the xxz model only");
                }
            }
            if let Some(w) = a.window {
                check_fraction(w, "analysis.window", issues);
            }
            match a.normalizer.unwrap_or(Normalizer::Analytic) {
                Normalizer::Analytic => forbid(&c.ensemble, "ensemble", exp, issues),
                Normalizer::MonteCarlo => {
                    if let Some(e) = require(&c.ensemble, "ensemble", skip, exp, issues) {
                        check_ensemble(e, &[EnsembleName::Goe], issues);
                        if let (Some(d), Some(ed)) = (dim, e.dim) {
                            if d != ed {
                                issues.push("ensemble.dim", format!("{ed} differs from the model dimension {d}"));
                            }
                        }
                    }
                }
            }
        }
        ExperimentKind::Majorization => {
            forbid(&c.time, "time", exp, issues);
            forbid(&c.ensemble, "ensemble", exp, issues);
            if let Some(b) = &c.basis {
                if !matches!(b.kind, BasisKind::Site | BasisKind::MeanField) {
                    issues.push("basis.kind", "majorization uses the site or mean_field basis");
                }
            }
            for (i, w) in a.windows.iter().flatten().enumerate() {
                check_fraction(*w, &format!("analysis.windows[{i}]"), issues);
            }
            match require(&c.model, "model", skip, exp, issues) {
                Some(m @ ModelConfig::Xxz { l, delta, .. }) => {
                    if delta.is_some() {
                        issues.push("model.delta", "use analysis.delta_integrable and analysis.delta_chaotic");
                    }
                    let sizes: Vec<usize> = match (&a.sizes, l) {
                        (Some(s), None) => s.clone(),
                        (None, Some(l)) => vec![*l],
                        (Some(_), Some(_)) => {
                            issues.push("model.l", "give either model.l or analysis.sizes, not both");
                            Vec::new()
                        }
                        (None, None) => {
                            issues.push("analysis.sizes", "chain sizes required (or model.l)");
                            Vec::new()
                        }
                    };
                    if a.sizes.as_ref().is_some_and(|s| s.is_empty()) {
                        issues.push("analysis.sizes", "must not be empty");
                    }
                    for l in sizes {
                        for d in [a.delta_integrable.unwrap_or(1), a.delta_chaotic.unwrap_or(l / 2)] {
                            if let Some(p) = m.xxz_at(l, Some(d)) {
                                check_xxz(&p, &format!("model[L={l}]"), issues);
                            }
                        }
                    }
                }
                Some(m) => issues.push("model.kind", format!("`{}` not supported; use xxz", m.kind_name())),
                None => {}
            }
        }
        ExperimentKind::Dynamics => {
            forbid(&c.basis, "basis", exp, issues);
            forbid(&c.ensemble, "ensemble", exp, issues);
            if require(&c.time, "time", skip, exp, issues).is_some_and(|t| t.spacing == Spacing::Log) {
                issues.push("time.spacing", "dynamics uses a linear grid");
            }
            match require(&c.model, "model", skip, exp, issues) {
                Some(ModelConfig::Tfim { l, .. }) => {
                    check_tfim_l(*l, issues);
                    for (name, site) in [("v_site", a.v_site), ("w_site", a.w_site)] {
                        if let Some(s) = site {
                            if s < 1 || s > *l {
                                issues.push(format!("analysis.{name}"), format!("site {s} not in 1..={l}"));
                            }
                        }
                    }
                }
                Some(m) => issues.push("model.kind", format!("`{}` not supported; use tfim", m.kind_name())),
                None => {}
            }
            match (&a.variance_sizes, &a.variance_window) {
                (Some(sizes), Some([lo, hi])) => {
                    if sizes.is_empty() {
                        issues.push("analysis.variance_sizes", "must not be empty");
                    }
                    for &n in sizes {
                        check_tfim_l(n, issues);
                    }
                    if !(hi > lo && *lo >= 0.0) {
                        issues.push("analysis.variance_window", "need 0 ≤ start < end");
                    }
                }
                (Some(_), None) => issues.push("analysis.variance_window", "required with variance_sizes"),
                (None, Some(_)) => issues.push("analysis.variance_sizes", "required with variance_window"),
                (None, None) => {}
            }
        }
        ExperimentKind::Rmt => {
            forbid(&c.model, "model", exp, issues);
            let Some(e) = require(&c.ensemble, "ensemble", skip, exp, issues) else {
                return;
            };
            check_ensemble(e, &[EnsembleName::Goe, EnsembleName::Gue, EnsembleName::Haar], issues);
            if e.dim.is_none() {
                issues.push("ensemble.dim", "required");
            }
            let quantities = a.quantities.clone().unwrap_or_else(|| default_quantities(e.kind));
            if quantities.is_empty() {
                issues.push("analysis.quantities", "must not be empty");
            }
            let mut needs_time = false;
            for q in &quantities {
                let ok = match q {
                    Quantity::Sff => matches!(e.kind, EnsembleName::Gue | EnsembleName::Goe),
                    Quantity::Bound | Quantity::Discrepancy => e.kind == EnsembleName::Gue,
                    Quantity::GapRatio => matches!(e.kind, EnsembleName::Gue | EnsembleName::Goe),
                    Quantity::HaarCgp => e.kind == EnsembleName::Haar,
                };
                if !ok {
                    issues.push("analysis.quantities", format!("{q:?} not available for ensemble {:?}", e.kind));
                }
                needs_time |= matches!(q, Quantity::Sff | Quantity::Bound | Quantity::Discrepancy);
                if *q == Quantity::GapRatio && e.dim.is_some_and(|d| d < qchaos_core::rmt::MIN_LEVELS) {
                    issues.push("ensemble.dim", format!("gap ratios need at least {} levels", qchaos_core::rmt::MIN_LEVELS));
                }
            }
            if needs_time {
                require(&c.time, "time", skip, exp, issues);
            } else {
                forbid(&c.time, "time", exp, issues);
            }
            if let Some(b) = &c.basis {
                if !quantities.iter().any(|q| matches!(q, Quantity::Bound | Quantity::Discrepancy | Quantity::HaarCgp)) {
                    issues.push("basis", "only used by bound, discrepancy and haar_cgp");
                }
                if matches!(b.kind, BasisKind::Site | BasisKind::MeanField) {
                    issues.push("basis.kind", "rmt uses the computational or a custom-file basis");
                }
            }
        }
        ExperimentKind::Shorttime => {
            forbid(&c.basis, "basis", exp, issues);
            forbid(&c.time, "time", exp, issues);
            match require(&c.model, "model", skip, exp, issues) {
                Some(ModelConfig::Klocal { k }) => match &a.sizes {
                    None => issues.push("analysis.sizes", "chain sizes required"),
                    Some(s) if s.is_empty() => issues.push("analysis.sizes", "must not be empty"),
                    Some(sizes) => {
                        for &l in sizes {
                            if l < 1 || l > MAX_FULL_SPACE_SITES {
                                issues.push("analysis.sizes", format!("L = {l} not in 1..={MAX_FULL_SPACE_SITES}"));
                            }
                            if let Some(k) = k {
                                if *k < 1 || *k > l {
                                    issues.push("model.k", format!("k = {k} not in 1..={l} for L = {l}"));
                                }
                            }
                        }
                    }
                },
                Some(m) => issues.push("model.kind", format!("`{}` not supported; use klocal", m.kind_name())),
                None => {}
            }
            if let Some(e) = &c.ensemble {
                check_ensemble(e, &[EnsembleName::Gue], issues);
                if e.dim.is_none() {
                    issues.push("ensemble.dim", "required");
                }
            }
        }
    }
}

fn check_tfim_l(l: usize, issues: &mut Issues) {
    if !(2..=MAX_FULL_SPACE_SITES).contains(&l) {
        issues.push("model.l", format!("TFIM chain length {l} not in 2..={MAX_FULL_SPACE_SITES}"));
    }
}

pub fn default_quantities(kind: EnsembleName) -> Vec<Quantity> {
    match kind {
        EnsembleName::Gue => vec![Quantity::Sff, Quantity::Bound],
        EnsembleName::Goe => vec![Quantity::Sff, Quantity::GapRatio],
        _ => vec![Quantity::HaarCgp],
    }
}
