//! Sample-rate conversion by Kaiser-windowed sinc interpolation.

use super::{clamp_unit, AudioClip};
use crate::dsp;
use crate::error::{Error, Result};

/// The rate all feature extraction runs at.
pub const CANONICAL_RATE_HZ: u32 = 16000;

/// Resample a clip to `target_hz`. Identity (bit-exact) when the rates match;
/// otherwise band-limited interpolation with 32 sinc lobes per side under a
/// Kaiser window (β = 8). A tiny amount of ringing overshoot is clamped so
/// the output still satisfies the clip invariants.
pub fn resample(clip: &AudioClip, target_hz: u32) -> Result<AudioClip> {
    if target_hz < 8000 {
        return Err(Error::Parameter(format!(
            "target rate {target_hz} Hz below the 8 kHz minimum"
        )));
    }
    if target_hz == clip.sample_rate_hz() {
        return Ok(clip.clone());
    }
    let ratio = target_hz as f64 / clip.sample_rate_hz() as f64;
    let mut samples = dsp::sinc_resample(clip.samples(), ratio);
    if samples.is_empty() {
        samples.push(0.0);
    }
    clamp_unit(&mut samples);
    AudioClip::new(samples, target_hz, clip.source_id().to_string())
}
