//! Synthetic-speech detection toolkit: audio loading and resampling,
//! label-differentiated augmentation, a log-mel frontend, a spectrogram
//! transformer with hand-written forward and backward passes, an
//! EER-selected training loop, and per-technology evaluation reports.

pub mod audio;
pub mod augment;
pub mod dsp;
mod error;
pub mod eval;
pub mod features;
pub mod model;
pub mod seeding;
pub mod toygen;
pub mod train;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod testutil {
    use crate::audio::AudioClip;
    use rustfft::num_complex::Complex;

    /// A sine tone clip; amplitude must keep the clip invariants.
    pub fn sine_clip(freq_hz: f64, rate: u32, n: usize, amp: f64) -> AudioClip {
        let samples: Vec<f32> = (0..n)
            .map(|i| {
                (amp * (2.0 * std::f64::consts::PI * freq_hz * i as f64 / rate as f64).sin())
                    as f32
            })
            .collect();
        AudioClip::new(samples, rate, format!("sine-{freq_hz}")).unwrap()
    }

    pub fn rms(x: &[f32]) -> f64 {
        (x.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>() / x.len() as f64).sqrt()
    }

    /// Location of the largest spectral peak, via a zero-padded FFT.
    pub fn dominant_frequency_hz(x: &[f32], rate: u32) -> f64 {
        let n = (x.len() * 4).next_power_of_two();
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        for (slot, &v) in buf.iter_mut().zip(x.iter()) {
            slot.re = v as f64;
        }
        crate::dsp::fft_in_place(&mut buf, false);
        let mut best = (0usize, 0.0f64);
        for (k, c) in buf.iter().enumerate().take(n / 2 + 1) {
            let p = c.norm_sqr();
            if p > best.1 {
                best = (k, p);
            }
        }
        best.0 as f64 * rate as f64 / n as f64
    }
}
