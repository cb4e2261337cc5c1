//! Triangular mel filterbank on the HTK scale. Weights are the average of
//! each triangle over the FFT bin's frequency interval rather than a point
//! sample at the bin center; with 128 filters over 0–8 kHz the narrowest
//! low-frequency triangles are thinner than one bin and point sampling would
//! leave them empty.

use super::FeatureConfig;

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

pub struct MelBank {
    /// n_mels rows of (fft_size/2 + 1) weights.
    weights: Vec<Vec<f64>>,
}

/// Triangle with feet at `f0`/`f2` and unit peak at `f1`, evaluated at `f`.
fn triangle(f: f64, f0: f64, f1: f64, f2: f64) -> f64 {
    if f <= f0 || f >= f2 {
        0.0
    } else if f <= f1 {
        (f - f0) / (f1 - f0)
    } else {
        (f2 - f) / (f2 - f1)
    }
}

/// Exact integral of the triangle over [lo, hi] (piecewise-linear, so a
/// trapezoid per breakpoint segment).
fn triangle_integral(lo: f64, hi: f64, f0: f64, f1: f64, f2: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mut cuts = vec![lo, hi];
    for b in [f0, f1, f2] {
        if b > lo && b < hi {
            cuts.push(b);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        total += (triangle(a, f0, f1, f2) + triangle(b, f0, f1, f2)) / 2.0 * (b - a);
    }
    total
}

impl MelBank {
    pub fn build(cfg: &FeatureConfig) -> Self {
        let n_bins = cfg.fft_size / 2 + 1;
        let bin_width = cfg.sample_rate_hz as f64 / cfg.fft_size as f64;
        let mel_lo = hz_to_mel(cfg.fmin_hz);
        let mel_hi = hz_to_mel(cfg.fmax_hz);
        let step = (mel_hi - mel_lo) / (cfg.n_mels + 1) as f64;
        let freqs: Vec<f64> = (0..cfg.n_mels + 2)
            .map(|j| mel_to_hz(mel_lo + step * j as f64))
            .collect();

        let mut weights = Vec::with_capacity(cfg.n_mels);
        for k in 0..cfg.n_mels {
            let (f0, f1, f2) = (freqs[k], freqs[k + 1], freqs[k + 2]);
            let mut row = vec![0.0f64; n_bins];
            // Only bins whose interval can intersect the triangle matter.
            let first = ((f0 / bin_width - 0.5).floor().max(0.0)) as usize;
            let last = ((f2 / bin_width + 0.5).ceil() as usize).min(n_bins - 1);
            for (i, slot) in row.iter_mut().enumerate().take(last + 1).skip(first) {
                let center = i as f64 * bin_width;
                let lo = (center - bin_width / 2.0).max(0.0);
                let hi = (center + bin_width / 2.0).min(cfg.sample_rate_hz as f64 / 2.0);
                *slot = triangle_integral(lo, hi, f0, f1, f2) / bin_width;
            }
            weights.push(row);
        }
        MelBank { weights }
    }

    /// Project a power spectrum (fft_size/2 + 1 bins) onto the filterbank.
    pub fn project(&self, power: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|row| row.iter().zip(power.iter()).map(|(w, p)| w * p).sum())
            .collect()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn htk_scale_reference_points() {
        assert!((hz_to_mel(0.0)).abs() < 1e-12);
        assert!((hz_to_mel(700.0) - 2595.0 * 2f64.log10()).abs() < 1e-9);
        assert!((mel_to_hz(hz_to_mel(1234.5)) - 1234.5).abs() < 1e-6);
    }

    #[test]
    fn rows_are_nonnegative_with_positive_mass() {
        let bank = MelBank::build(&FeatureConfig::default());
        assert_eq!(bank.rows().len(), 128);
        for (k, row) in bank.rows().iter().enumerate() {
            assert!(row.iter().all(|&w| w >= 0.0), "filter {k} has negative weight");
            let sum: f64 = row.iter().sum();
            assert!(sum > 0.0, "filter {k} sums to {sum}");
        }
    }

    #[test]
    fn adjacent_filters_overlap_and_cover_the_band() {
        let cfg = FeatureConfig::default();
        let bank = MelBank::build(&cfg);
        for k in 0..cfg.n_mels - 1 {
            let overlap = bank.rows()[k]
                .iter()
                .zip(bank.rows()[k + 1].iter())
                .any(|(a, b)| *a > 0.0 && *b > 0.0);
            assert!(overlap, "filters {k} and {} share no bin", k + 1);
        }
        // No dead bins strictly inside (fmin, fmax).
        let bin_width = cfg.sample_rate_hz as f64 / cfg.fft_size as f64;
        let n_bins = cfg.fft_size / 2 + 1;
        for i in 0..n_bins {
            let f = i as f64 * bin_width;
            if f > cfg.fmin_hz && f < cfg.fmax_hz {
                let covered = bank.rows().iter().any(|row| row[i] > 0.0);
                assert!(covered, "bin {i} at {f} Hz has no filter");
            }
        }
    }
}
