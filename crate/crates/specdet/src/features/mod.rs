//! Log-mel spectrogram frontend: 25 ms Hamming windows at a 10 ms hop over
//! 16 kHz audio, 512-point FFT, 128 triangular HTK-mel filters spanning
//! 0–8 kHz, natural-log compressed. A t-second clip maps to exactly
//! 100·t frames.

mod cache;
mod mel;

pub use cache::{read_feature_cache, write_feature_cache};

use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::dsp;
use crate::error::{Error, Result};

/// Frontend configuration. The defaults are the only values the rest of the
/// pipeline is calibrated for; `sample_rate_hz` is an expert override (the
/// patch-count bookkeeping assumes 100 frames per second).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub sample_rate_hz: u32,
    pub window_ms: u32,
    pub hop_ms: u32,
    pub n_mels: usize,
    pub fft_size: usize,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
    pub log_floor: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            sample_rate_hz: 16000,
            window_ms: 25,
            hop_ms: 10,
            n_mels: 128,
            fft_size: 512,
            fmin_hz: 0.0,
            fmax_hz: 8000.0,
            log_floor: 1e-10,
        }
    }
}

impl FeatureConfig {
    pub fn window_len(&self) -> usize {
        (self.sample_rate_hz as usize * self.window_ms as usize) / 1000
    }

    pub fn hop_len(&self) -> usize {
        (self.sample_rate_hz as usize * self.hop_ms as usize) / 1000
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_ms <= self.hop_ms {
            return Err(Error::Config("window_ms must exceed hop_ms".into()));
        }
        if self.n_mels == 0 || self.n_mels > self.fft_size / 2 {
            return Err(Error::Config(format!(
                "n_mels {} outside (0, fft_size/2 = {}]",
                self.n_mels,
                self.fft_size / 2
            )));
        }
        if self.fft_size < self.window_len() {
            return Err(Error::Config("fft_size smaller than the window".into()));
        }
        if self.fmax_hz <= self.fmin_hz || self.fmax_hz > self.sample_rate_hz as f64 / 2.0 {
            return Err(Error::Config("bad mel frequency range".into()));
        }
        if self.log_floor <= 0.0 {
            return Err(Error::Config("log_floor must be positive".into()));
        }
        Ok(())
    }
}

/// A frames × n_mels matrix of log filterbank energies, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    data: Vec<f32>,
    frames: usize,
    n_mels: usize,
}

impl Spectrogram {
    pub fn new(data: Vec<f32>, frames: usize, n_mels: usize) -> Result<Self> {
        if data.len() != frames * n_mels || frames == 0 || n_mels == 0 {
            return Err(Error::ShapeMismatch(format!(
                "spectrogram buffer of {} does not match {frames} x {n_mels}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite spectrogram entry".into()));
        }
        Ok(Spectrogram { data, frames, n_mels })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn n_mels(&self) -> usize {
        self.n_mels
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn at(&self, frame: usize, mel: usize) -> f32 {
        self.data[frame * self.n_mels + mel]
    }

    pub fn row(&self, frame: usize) -> &[f32] {
        &self.data[frame * self.n_mels..(frame + 1) * self.n_mels]
    }
}

/// Reflect-padded sample lookup (mirror without edge repetition).
fn reflect_index(i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let mut j = i.rem_euclid(period);
    if j >= n {
        j = period - j;
    }
    j as usize
}

/// Per-frame mel energies before the log, as f64. Internal so tests can
/// compare against a naive DFT oracle without the log compression.
fn mel_power_frames(clip: &AudioClip, cfg: &FeatureConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    if clip.sample_rate_hz() != cfg.sample_rate_hz {
        return Err(Error::SampleRate {
            expected: cfg.sample_rate_hz,
            got: clip.sample_rate_hz(),
        });
    }
    let hop = cfg.hop_len();
    let win = cfg.window_len();
    let n = clip.len();
    if n < hop {
        return Err(Error::TooShort(format!(
            "clip '{}' has {n} samples, need at least one hop ({hop})",
            clip.source_id()
        )));
    }
    let frames = n.div_ceil(hop);
    let window = dsp::hamming(win);
    let bank = mel::MelBank::build(cfg);
    let samples = clip.samples();
    let pad = win as isize / 2;

    let mut out = Vec::with_capacity(frames);
    let mut frame_buf = vec![0.0f64; win];
    for t in 0..frames {
        let start = t as isize * hop as isize - pad;
        for (j, slot) in frame_buf.iter_mut().enumerate() {
            let idx = reflect_index(start + j as isize, n);
            *slot = samples[idx] as f64 * window[j];
        }
        let power = dsp::power_spectrum(&frame_buf, cfg.fft_size);
        out.push(bank.project(&power));
    }
    Ok(out)
}

/// Compute the log-mel spectrogram of a clip at the canonical rate.
pub fn log_mel(clip: &AudioClip, cfg: &FeatureConfig) -> Result<Spectrogram> {
    let frames = mel_power_frames(clip, cfg)?;
    let n_frames = frames.len();
    let mut data = Vec::with_capacity(n_frames * cfg.n_mels);
    for row in frames {
        for energy in row {
            data.push((energy + cfg.log_floor).ln() as f32);
        }
    }
    Spectrogram::new(data, n_frames, cfg.n_mels)
}

/// Corpus-level normalization statistics (scalar mean/std over all entries
/// of the training split's spectrograms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: f64,
    pub std: f64,
}

impl Default for FeatureStats {
    fn default() -> Self {
        FeatureStats { mean: 0.0, std: 1.0 }
    }
}

/// Entrywise (x - mean) / std.
pub fn normalize(spec: &Spectrogram, mean: f64, std: f64) -> Result<Spectrogram> {
    if std <= 0.0 {
        return Err(Error::Parameter(format!("std must be positive, got {std}")));
    }
    let data = spec
        .data()
        .iter()
        .map(|&x| ((x as f64 - mean) / std) as f32)
        .collect();
    Spectrogram::new(data, spec.frames(), spec.n_mels())
}

/// Streaming (Welford) accumulator for corpus mean/std.
#[derive(Debug, Default, Clone)]
pub struct StatsAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl StatsAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_spectrogram(&mut self, spec: &Spectrogram) {
        for &x in spec.data() {
            self.push(x as f64);
        }
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Population statistics; std floored at 1e-6 so degenerate corpora
    /// (constant features) still normalize.
    pub fn finalize(&self) -> Result<FeatureStats> {
        if self.count == 0 {
            return Err(Error::Parameter("no data accumulated".into()));
        }
        let var = self.m2 / self.count as f64;
        Ok(FeatureStats {
            mean: self.mean,
            std: var.sqrt().max(1e-6),
        })
    }
}
