//! Audio loading, validation, resampling, and corpus manifests.

mod manifest;
mod resample;
mod wav;

pub use manifest::{
    parse_manifest, read_manifest, serialize_manifest, split_train_validation, write_manifest,
    Label, SampleRecord, Split, HUMAN_TECHNOLOGY,
};
pub use resample::{resample, CANONICAL_RATE_HZ};
pub use wav::{decode_wav, encode_wav_pcm16, load_wav, save_wav_pcm16, LoadedWav};

use crate::error::{Error, Result};

/// Shortest clip the pipeline accepts, in seconds (local policy).
pub const MIN_CLIP_SECONDS: f64 = 0.2;
/// Longest clip the pipeline accepts, in seconds (local policy).
pub const MAX_CLIP_SECONDS: f64 = 30.0;

/// A mono waveform with its sample rate and an opaque provenance id.
///
/// Invariants: at least one sample, every sample finite and within [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f32>,
    sample_rate_hz: u32,
    source_id: String,
}

impl AudioClip {
    /// Build a clip, validating the invariants.
    pub fn new(samples: Vec<f32>, sample_rate_hz: u32, source_id: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyAudio);
        }
        if sample_rate_hz == 0 {
            return Err(Error::Parameter("sample rate must be positive".into()));
        }
        for &s in &samples {
            if !s.is_finite() {
                return Err(Error::Format("non-finite sample value".into()));
            }
            if s.abs() > 1.0 {
                return Err(Error::Parameter(format!(
                    "sample {s} outside [-1, 1]; clamp before constructing the clip"
                )));
            }
        }
        Ok(AudioClip {
            samples,
            sample_rate_hz,
            source_id: source_id.into(),
        })
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Replace the waveform, keeping rate and provenance. Used by transforms
    /// that guarantee their output already satisfies the invariants.
    pub(crate) fn with_samples(&self, samples: Vec<f32>) -> Result<Self> {
        AudioClip::new(samples, self.sample_rate_hz, self.source_id.clone())
    }

    /// Enforce the local clip-duration policy (0.2 s – 30 s).
    pub fn check_duration_policy(&self) -> Result<()> {
        let secs = self.duration_seconds();
        if !(MIN_CLIP_SECONDS..=MAX_CLIP_SECONDS).contains(&secs) {
            return Err(Error::Parameter(format!(
                "clip '{}' is {secs:.3} s; accepted range is {MIN_CLIP_SECONDS} s to {MAX_CLIP_SECONDS} s",
                self.source_id
            )));
        }
        Ok(())
    }
}

/// Clamp samples into [-1, 1], returning how many were altered.
pub(crate) fn clamp_unit(samples: &mut [f32]) -> usize {
    let mut clamped = 0;
    for s in samples.iter_mut() {
        if *s > 1.0 {
            *s = 1.0;
            clamped += 1;
        } else if *s < -1.0 {
            *s = -1.0;
            clamped += 1;
        }
    }
    clamped
}
