use crate::error::{Error, Result};
use crate::linalg::SpectralDecomposition;
use crate::majorization::central_window;

/// Fewest levels accepted by [`spacing_statistics`].
pub const MIN_LEVELS: usize = 50;
const BULK_FRACTION: f64 = 0.8;
const HIST_MAX: f64 = 4.0;
const HIST_BINS: usize = 40;

/// Level statistics of the central 80% of a spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacingStatistics {
    /// Nearest-neighbour spacings divided by their mean.
    pub spacings: Vec<f64>,
    /// `min(s_i, s_{i+1}) / max(s_i, s_{i+1})`; pairs of exactly degenerate
    /// gaps are skipped.
    pub ratios: Vec<f64>,
    pub mean_ratio: f64,
    /// `HIST_BINS + 1` edges over `[0, 4]`.
    pub histogram_edges: Vec<f64>,
    /// Probability density of normalised spacings per bin.
    pub histogram_density: Vec<f64>,
}

pub fn spacing_statistics(spec: &SpectralDecomposition) -> Result<SpacingStatistics> {
    spacing_statistics_of(spec.eigenvalues())
}

/// As [`spacing_statistics`] for a raw list of levels (sorted internally).
pub fn spacing_statistics_of(levels: &[f64]) -> Result<SpacingStatistics> {
    if levels.len() < MIN_LEVELS {
        return Err(Error::invalid(
            "spectrum",
            format!("{} levels, at least {MIN_LEVELS} required", levels.len()),
        ));
    }
    if levels.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("spectrum"));
    }
    let mut e = levels.to_vec();
    e.sort_by(f64::total_cmp);
    let bulk = &e[central_window(e.len(), BULK_FRACTION)?];
    let raw: Vec<f64> = bulk.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::invalid("spectrum", "fully degenerate bulk"));
    }
    let spacings: Vec<f64> = raw.iter().map(|s| s / mean).collect();
    let ratios: Vec<f64> = raw
        .windows(2)
        .filter(|w| w[0].max(w[1]) > 0.0)
        .map(|w| w[0].min(w[1]) / w[0].max(w[1]))
        .collect();
    if ratios.is_empty() {
        return Err(Error::NoSamples("gap ratios"));
    }
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;

    let width = HIST_MAX / HIST_BINS as f64;
    let histogram_edges: Vec<f64> = (0..=HIST_BINS).map(|i| i as f64 * width).collect();
    let mut counts = vec![0usize; HIST_BINS];
    for &s in &spacings {
        let b = (s / width) as usize;
        if b < HIST_BINS {
            counts[b] += 1;
        }
    }
    let norm = spacings.len() as f64 * width;
    let histogram_density = counts.into_iter().map(|c| c as f64 / norm).collect();

    Ok(SpacingStatistics {
        spacings,
        ratios,
        mean_ratio,
        histogram_edges,
        histogram_density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equally_spaced_levels() {
        let levels: Vec<f64> = (0..100).map(|i| 0.5 * i as f64).collect();
        let s = spacing_statistics_of(&levels).unwrap();
        assert!(s.spacings.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        assert!((s.mean_ratio - 1.0).abs() < 1e-12);
        // all mass in the bin containing 1
        let total: f64 = s.histogram_density.iter().sum::<f64>() * 0.1;
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_levels() {
        assert!(spacing_statistics_of(&[0.0; 10]).is_err());
        assert!(spacing_statistics_of(&vec![1.0; 60]).is_err());
    }

    #[test]
    fn order_does_not_matter() {
        let mut levels: Vec<f64> = (0..80).map(|i| ((i * 37) % 80) as f64 + 0.01 * (i as f64).sin()).collect();
        let a = spacing_statistics_of(&levels).unwrap();
        levels.reverse();
        let b = spacing_statistics_of(&levels).unwrap();
        assert_eq!(a, b);
    }
}
