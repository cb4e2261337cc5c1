//! The waveform transforms behind the policy stages. Every transform
//! preserves sample count and rate exactly and keeps output within [-1, 1].

use super::biquad::Biquad;
use super::AugmentRng;
use crate::audio::AudioClip;
use crate::dsp;
use crate::error::{Error, Result};

fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Zero one contiguous segment of `round(fraction * len)` samples at a
/// uniform start position.
pub fn time_mask(clip: &AudioClip, fraction: f64, rng: &mut AugmentRng) -> Result<AudioClip> {
    if !(0.05..=0.15).contains(&fraction) {
        return Err(Error::Parameter(format!(
            "mask fraction {fraction} outside [0.05, 0.15]"
        )));
    }
    let n = clip.len();
    let mask_len = ((fraction * n as f64).round() as usize).min(n);
    let start = rng.uniform_index(n - mask_len);
    let mut samples = clip.samples().to_vec();
    for s in samples.iter_mut().skip(start).take(mask_len) {
        *s = 0.0;
    }
    clip.with_samples(samples)
}

/// Shift pitch by `semitones` while preserving duration exactly: resample by
/// the reciprocal pitch factor, then time-stretch back to the original length
/// with windowed overlap-add.
pub fn pitch_shift(clip: &AudioClip, semitones: f64) -> Result<AudioClip> {
    if !(-1.0..=1.0).contains(&semitones) {
        return Err(Error::Parameter(format!(
            "pitch shift {semitones} outside [-1, +1] semitones"
        )));
    }
    if semitones == 0.0 {
        return Ok(clip.clone());
    }
    let factor = 2f64.powf(semitones / 12.0);
    let shifted = dsp::sinc_resample(clip.samples(), 1.0 / factor);
    let mut stretched = ola_stretch(&shifted, clip.len());
    crate::audio::clamp_unit(&mut stretched);
    clip.with_samples(stretched)
}

/// Overlap-add time stretch to an exact output length. Hann grains at 75%
/// synthesis overlap; analysis positions map proportionally into the input.
fn ola_stretch(input: &[f32], out_len: usize) -> Vec<f32> {
    const GRAIN: usize = 800;
    const HOP: usize = 200;
    let n = input.len();
    if n == 0 {
        return vec![0.0; out_len];
    }
    if n <= GRAIN || out_len <= GRAIN {
        // Too short for grains: direct rate conversion.
        let mut out = dsp::sinc_resample(input, out_len as f64 / n as f64);
        out.resize(out_len, 0.0);
        return out;
    }
    let window = dsp::hann_periodic(GRAIN);
    let frames = (out_len - GRAIN) / HOP + 2;
    let mut acc = vec![0.0f64; out_len + GRAIN];
    let mut weight = vec![0.0f64; out_len + GRAIN];
    let in_span = (n - GRAIN) as f64;
    let out_span = ((frames - 1) * HOP) as f64;
    for k in 0..frames {
        let out_pos = k * HOP;
        let in_pos = ((out_pos as f64 / out_span) * in_span).round() as usize;
        let in_pos = in_pos.min(n - GRAIN);
        for j in 0..GRAIN {
            acc[out_pos + j] += input[in_pos + j] as f64 * window[j];
            weight[out_pos + j] += window[j];
        }
    }
    (0..out_len)
        .map(|i| {
            if weight[i] > 1e-9 {
                (acc[i] / weight[i]) as f32
            } else {
                0.0
            }
        })
        .collect()
}

/// Seven-band peaking equalizer at octave-spaced centers 62.5 Hz .. 4 kHz,
/// Q = 1, applied as a cascade.
pub fn parametric_eq(clip: &AudioClip, gains_db: &[f64; 7]) -> Result<AudioClip> {
    for &g in gains_db {
        if !(-12.0..=12.0).contains(&g) {
            return Err(Error::Parameter(format!("EQ gain {g} dB outside [-12, +12]")));
        }
    }
    let fs = clip.sample_rate_hz() as f64;
    let mut out: Vec<f32> = clip.samples().to_vec();
    for (band, &gain) in gains_db.iter().enumerate() {
        let center = 62.5 * 2f64.powi(band as i32);
        out = Biquad::peaking(fs, center, 1.0, gain).filter(&out);
    }
    crate::audio::clamp_unit(&mut out);
    clip.with_samples(out)
}

/// Add white Gaussian noise with the given standard deviation, then
/// hard-clip back into [-1, 1].
pub fn add_noise_amplitude(
    clip: &AudioClip,
    amplitude: f64,
    rng: &mut AugmentRng,
) -> Result<AudioClip> {
    if !(0.0005..=0.01).contains(&amplitude) {
        return Err(Error::Parameter(format!(
            "noise amplitude {amplitude} outside [0.0005, 0.01]"
        )));
    }
    let mut samples: Vec<f32> = clip
        .samples()
        .iter()
        .map(|&s| (s as f64 + amplitude * rng.standard_normal()) as f32)
        .collect();
    crate::audio::clamp_unit(&mut samples);
    clip.with_samples(samples)
}

/// Add Gaussian noise scaled so the realized signal-to-noise power ratio is
/// exactly `snr_db`. If the mix peaks above full scale the whole mix is
/// scaled down, which preserves the ratio.
pub fn add_noise_snr(clip: &AudioClip, snr_db: f64, rng: &mut AugmentRng) -> Result<AudioClip> {
    if !(10.0..=40.0).contains(&snr_db) {
        return Err(Error::Parameter(format!("SNR {snr_db} dB outside [10, 40]")));
    }
    let n = clip.len();
    let signal_power: f64 =
        clip.samples().iter().map(|&s| (s as f64).powi(2)).sum::<f64>() / n as f64;
    if signal_power <= 0.0 {
        return Err(Error::Parameter(
            "SNR is undefined for an all-zero clip".into(),
        ));
    }
    let noise: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
    let noise_power: f64 = noise.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let target_noise_power = signal_power / 10f64.powf(snr_db / 10.0);
    let scale = (target_noise_power / noise_power).sqrt();

    let mut out: Vec<f64> = clip
        .samples()
        .iter()
        .zip(noise.iter())
        .map(|(&s, &v)| s as f64 + scale * v)
        .collect();
    let peak = out.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if peak > 1.0 {
        for v in out.iter_mut() {
            *v /= peak;
        }
    }
    clip.with_samples(out.into_iter().map(|v| v as f32).collect())
}

/// Band-pass with edges `center * (1 -/+ fraction/2)`, clamped inside
/// (0, Nyquist).
pub fn bandpass_filter(
    clip: &AudioClip,
    center_hz: f64,
    bandwidth_fraction: f64,
) -> Result<AudioClip> {
    if !(200.0..=5000.0).contains(&center_hz) {
        return Err(Error::Parameter(format!(
            "bandpass center {center_hz} Hz outside [200, 5000]"
        )));
    }
    if !(0.4..=1.8).contains(&bandwidth_fraction) {
        return Err(Error::Parameter(format!(
            "bandwidth fraction {bandwidth_fraction} outside [0.4, 1.8]"
        )));
    }
    let fs = clip.sample_rate_hz() as f64;
    let nyquist = fs / 2.0;
    let lo = (center_hz * (1.0 - bandwidth_fraction / 2.0)).max(1.0);
    let hi = (center_hz * (1.0 + bandwidth_fraction / 2.0)).min(nyquist - 1.0);
    let q = center_hz / (hi - lo);
    let mut out = Biquad::bandpass(fs, center_hz, q).filter(clip.samples());
    crate::audio::clamp_unit(&mut out);
    clip.with_samples(out)
}

/// Second-order Butterworth low-pass.
pub fn lowpass_filter(clip: &AudioClip, cutoff_hz: f64) -> Result<AudioClip> {
    if !(2000.0..=7500.0).contains(&cutoff_hz) {
        return Err(Error::Parameter(format!(
            "lowpass cutoff {cutoff_hz} Hz outside [2000, 7500]"
        )));
    }
    let fs = clip.sample_rate_hz() as f64;
    let mut out =
        Biquad::lowpass(fs, cutoff_hz, std::f64::consts::FRAC_1_SQRT_2).filter(clip.samples());
    crate::audio::clamp_unit(&mut out);
    clip.with_samples(out)
}

/// Scale every sample by `10^(gain_db/20)`, then hard-clip.
pub fn apply_gain(clip: &AudioClip, gain_db: f64) -> Result<AudioClip> {
    if !(-10.0..=10.0).contains(&gain_db) {
        return Err(Error::Parameter(format!("gain {gain_db} dB outside [-10, +10]")));
    }
    let factor = db_to_amplitude(gain_db);
    let mut samples: Vec<f32> = clip
        .samples()
        .iter()
        .map(|&s| (s as f64 * factor) as f32)
        .collect();
    crate::audio::clamp_unit(&mut samples);
    clip.with_samples(samples)
}

/// Ramp gain linearly in dB from `from_db` to `to_db` over a window of
/// `duration_s`, constant before and after. The window start is uniform over
/// the positions where it fits; a clip shorter than the window ramps over its
/// whole length.
pub fn gain_transition(
    clip: &AudioClip,
    from_db: f64,
    to_db: f64,
    duration_s: f64,
    rng: &mut AugmentRng,
) -> Result<AudioClip> {
    for db in [from_db, to_db] {
        if !(-10.0..=3.0).contains(&db) {
            return Err(Error::Parameter(format!(
                "transition gain {db} dB outside [-10, +3]"
            )));
        }
    }
    if !(0.3..=0.7).contains(&duration_s) {
        return Err(Error::Parameter(format!(
            "transition duration {duration_s} s outside [0.3, 0.7]"
        )));
    }
    let n = clip.len();
    let ramp_len = ((duration_s * clip.sample_rate_hz() as f64).round() as usize).clamp(1, n);
    let start = rng.uniform_index(n - ramp_len);
    let mut samples: Vec<f32> = Vec::with_capacity(n);
    for (i, &s) in clip.samples().iter().enumerate() {
        let db = if i < start {
            from_db
        } else if i >= start + ramp_len {
            to_db
        } else {
            from_db + (to_db - from_db) * (i - start) as f64 / ramp_len as f64
        };
        samples.push((s as f64 * db_to_amplitude(db)) as f32);
    }
    crate::audio::clamp_unit(&mut samples);
    clip.with_samples(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{dominant_frequency_hz, rms, sine_clip};

    fn ones(n: usize) -> AudioClip {
        AudioClip::new(vec![1.0; n], 16000, "ones").unwrap()
    }

    fn energy(x: &[f32]) -> f64 {
        x.iter().map(|&v| (v as f64).powi(2)).sum()
    }

    #[test]
    fn time_mask_zeroes_exactly_the_rounded_count() {
        let clip = ones(16000);
        let mut rng = AugmentRng::new(5);
        let out = time_mask(&clip, 0.10, &mut rng).unwrap();
        let zeros = out.samples().iter().filter(|&&s| s == 0.0).count();
        assert_eq!(zeros, 1600);
    }

    #[test]
    fn time_mask_is_contiguous_on_short_clips() {
        let clip = ones(100);
        let mut rng = AugmentRng::new(2);
        let out = time_mask(&clip, 0.05, &mut rng).unwrap();
        let zeros: Vec<usize> = out
            .samples()
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 0.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(zeros.len(), 5);
        assert_eq!(zeros.last().unwrap() - zeros[0], 4);
    }

    #[test]
    fn time_mask_energy_drop_is_exact() {
        let clip = ones(16000);
        let mut rng = AugmentRng::new(9);
        let out = time_mask(&clip, 0.15, &mut rng).unwrap();
        let expected = (1.0 - 0.15) * energy(clip.samples());
        assert_eq!(energy(out.samples()), expected);
    }

    #[test]
    fn pitch_shift_zero_is_identity() {
        let clip = sine_clip(440.0, 16000, 16000, 0.5);
        let out = pitch_shift(&clip, 0.0).unwrap();
        assert_eq!(out.samples(), clip.samples());
    }

    #[test]
    fn pitch_shift_up_one_semitone() {
        let clip = sine_clip(440.0, 16000, 16000, 0.5);
        let out = pitch_shift(&clip, 1.0).unwrap();
        assert_eq!(out.len(), clip.len());
        let peak = dominant_frequency_hz(out.samples(), 16000);
        let want = 440.0 * 2f64.powf(1.0 / 12.0);
        assert!((peak - want).abs() / want < 0.02, "peak {peak}, want {want}");
    }

    #[test]
    fn pitch_shift_down_one_semitone() {
        let clip = sine_clip(440.0, 16000, 16000, 0.5);
        let out = pitch_shift(&clip, -1.0).unwrap();
        let peak = dominant_frequency_hz(out.samples(), 16000);
        let want = 440.0 * 2f64.powf(-1.0 / 12.0);
        assert!((peak - want).abs() / want < 0.02, "peak {peak}, want {want}");
    }

    #[test]
    fn flat_eq_is_transparent() {
        let clip = sine_clip(700.0, 16000, 8000, 0.5);
        let out = parametric_eq(&clip, &[0.0; 7]).unwrap();
        let diff: f64 = clip
            .samples()
            .iter()
            .zip(out.samples())
            .map(|(&a, &b)| ((a - b) as f64).powi(2))
            .sum::<f64>()
            / clip.len() as f64;
        assert!(diff.sqrt() < 1e-6, "rms diff {}", diff.sqrt());
    }

    #[test]
    fn eq_boost_and_cut_at_1khz() {
        // Band 4 is centered at 1 kHz.
        let clip = sine_clip(1000.0, 16000, 16000, 0.1);
        let mut gains = [0.0; 7];
        gains[4] = 12.0;
        let boosted = parametric_eq(&clip, &gains).unwrap();
        let ratio = rms(&boosted.samples()[2000..]) / rms(&clip.samples()[2000..]);
        assert!((ratio - 3.98).abs() / 3.98 < 0.15, "boost ratio {ratio}");

        gains[4] = -12.0;
        let cut = parametric_eq(&clip, &gains).unwrap();
        let ratio = rms(&cut.samples()[2000..]) / rms(&clip.samples()[2000..]);
        assert!((ratio - 0.251).abs() / 0.251 < 0.15, "cut ratio {ratio}");
    }

    #[test]
    fn noise_amplitude_matches_requested_std() {
        let silent = AudioClip::new(vec![0.0; 160000], 16000, "zero").unwrap();
        for amp in [0.0005f64, 0.01] {
            let mut rng = AugmentRng::new(77);
            let out = add_noise_amplitude(&silent, amp, &mut rng).unwrap();
            let std = rms(out.samples());
            assert!((std - amp).abs() / amp < 0.05, "amp {amp}: std {std}");
        }
    }

    #[test]
    fn noise_realization_is_deterministic() {
        let silent = AudioClip::new(vec![0.0; 4000], 16000, "zero").unwrap();
        let a = add_noise_amplitude(&silent, 0.005, &mut AugmentRng::new(3)).unwrap();
        let b = add_noise_amplitude(&silent, 0.005, &mut AugmentRng::new(3)).unwrap();
        assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn snr_noise_hits_the_requested_ratio() {
        // Half-scale sine avoids the peak renormalization path, so the
        // injected noise is exactly out - in.
        let clip = sine_clip(440.0, 16000, 160000, 0.5);
        for snr in [10.0f64, 20.0, 40.0] {
            let mut rng = AugmentRng::new(123);
            let out = add_noise_snr(&clip, snr, &mut rng).unwrap();
            let noise: Vec<f64> = out
                .samples()
                .iter()
                .zip(clip.samples())
                .map(|(&y, &x)| y as f64 - x as f64)
                .collect();
            let sp = clip.samples().iter().map(|&s| (s as f64).powi(2)).sum::<f64>();
            let np = noise.iter().map(|v| v * v).sum::<f64>();
            let realized = 10.0 * (sp / np).log10();
            assert!((realized - snr).abs() < 0.5, "snr {snr}: realized {realized}");
        }
    }

    #[test]
    fn snr_40db_noise_power_ratio() {
        let clip = sine_clip(440.0, 16000, 160000, 0.5);
        let mut rng = AugmentRng::new(5);
        let out = add_noise_snr(&clip, 40.0, &mut rng).unwrap();
        let noise_power: f64 = out
            .samples()
            .iter()
            .zip(clip.samples())
            .map(|(&y, &x)| (y as f64 - x as f64).powi(2))
            .sum::<f64>()
            / clip.len() as f64;
        let signal_power: f64 =
            clip.samples().iter().map(|&s| (s as f64).powi(2)).sum::<f64>() / clip.len() as f64;
        let want = signal_power * 1e-4;
        assert!((noise_power - want).abs() / want < 0.12, "{noise_power} vs {want}");
    }

    #[test]
    fn snr_on_silence_is_an_error() {
        let silent = AudioClip::new(vec![0.0; 1000], 16000, "zero").unwrap();
        assert!(add_noise_snr(&silent, 20.0, &mut AugmentRng::new(0)).is_err());
    }

    #[test]
    fn full_scale_sine_snr_within_half_db() {
        let clip = sine_clip(440.0, 16000, 160000, 1.0);
        let mut rng = AugmentRng::new(21);
        let out = add_noise_snr(&clip, 20.0, &mut rng).unwrap();
        // The mix may have been globally rescaled; project out the scaled
        // signal component before measuring the residual.
        let dot: f64 = out
            .samples()
            .iter()
            .zip(clip.samples())
            .map(|(&y, &x)| y as f64 * x as f64)
            .sum();
        let xx: f64 = clip.samples().iter().map(|&x| (x as f64).powi(2)).sum();
        let c = dot / xx;
        let residual: f64 = out
            .samples()
            .iter()
            .zip(clip.samples())
            .map(|(&y, &x)| (y as f64 - c * x as f64).powi(2))
            .sum();
        let realized = 10.0 * ((c * c * xx) / residual).log10();
        assert!((realized - 20.0).abs() < 0.5, "realized {realized}");
    }

    #[test]
    fn bandpass_passes_center_and_rejects_far_tones() {
        let center = sine_clip(1000.0, 16000, 16000, 0.5);
        let out = bandpass_filter(&center, 1000.0, 1.0).unwrap();
        let level = 20.0 * (rms(&out.samples()[2000..]) / rms(&center.samples()[2000..])).log10();
        assert!(level.abs() < 3.0, "center level {level} dB");

        let far = sine_clip(6000.0, 16000, 16000, 0.5);
        let out = bandpass_filter(&far, 1000.0, 1.0).unwrap();
        let level = 20.0 * (rms(&out.samples()[2000..]) / rms(&far.samples()[2000..])).log10();
        assert!(level < -12.0, "6 kHz level {level} dB");
    }

    #[test]
    fn bandpass_removes_dc() {
        let clip = AudioClip::new(vec![0.5; 16000], 16000, "dc").unwrap();
        let out = bandpass_filter(&clip, 1000.0, 1.0).unwrap();
        let mean: f64 =
            out.samples().iter().map(|&s| s as f64).sum::<f64>() / out.len() as f64;
        assert!(mean.abs() < 1e-3, "mean {mean}");
    }

    #[test]
    fn lowpass_passband_and_stopband() {
        let inband = sine_clip(500.0, 16000, 16000, 0.5);
        let out = lowpass_filter(&inband, 2000.0).unwrap();
        let level = 20.0 * (rms(&out.samples()[2000..]) / rms(&inband.samples()[2000..])).log10();
        assert!(level.abs() < 1.0, "500 Hz level {level} dB");

        let above = sine_clip(4000.0, 16000, 16000, 0.5);
        let out = lowpass_filter(&above, 2000.0).unwrap();
        let level = 20.0 * (rms(&out.samples()[2000..]) / rms(&above.samples()[2000..])).log10();
        assert!(level <= -10.0, "4 kHz level {level} dB");
    }

    #[test]
    fn lowpass_of_silence_is_silence() {
        let clip = AudioClip::new(vec![0.0; 4000], 16000, "zero").unwrap();
        let out = lowpass_filter(&clip, 3000.0).unwrap();
        assert!(out.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn gain_identity_doubling_and_clipping() {
        let clip = sine_clip(440.0, 16000, 8000, 0.25);
        let same = apply_gain(&clip, 0.0).unwrap();
        assert_eq!(same.samples(), clip.samples());

        let doubled = apply_gain(&clip, 6.0206).unwrap();
        let peak = doubled.samples().iter().fold(0.0f32, |m, &v| m.max(v.abs()));
        assert!((peak - 0.5).abs() < 1e-4, "peak {peak}");

        let hot = sine_clip(440.0, 16000, 8000, 0.9);
        let clipped = apply_gain(&hot, 10.0).unwrap();
        let peak = clipped.samples().iter().fold(0.0f32, |m, &v| m.max(v.abs()));
        assert_eq!(peak, 1.0);
        assert!(clipped.samples().iter().filter(|&&s| s.abs() == 1.0).count() > 100);
    }

    #[test]
    fn gain_transition_identity_and_constant() {
        let clip = ones(16000);
        let mut rng = AugmentRng::new(1);
        let same = gain_transition(&clip, 0.0, 0.0, 0.5, &mut rng).unwrap();
        assert_eq!(same.samples(), clip.samples());

        let mut rng = AugmentRng::new(1);
        let down = gain_transition(&clip, -10.0, -10.0, 0.5, &mut rng).unwrap();
        let want = 10f64.powf(-0.5) as f32;
        assert!(down.samples().iter().all(|&s| (s - want).abs() < 1e-6));
    }

    #[test]
    fn gain_transition_midpoint_is_db_linear() {
        let clip = ones(16000);
        let (from, to) = (-10.0, 3.0);
        let mut rng = AugmentRng::new(8);
        let out = gain_transition(&clip, from, to, 0.5, &mut rng).unwrap();
        let ramp_len = 8000usize;
        // Locate the ramp start: first index whose value leaves the from-level.
        let from_amp = db_to_amplitude(from) as f32;
        let start = out
            .samples()
            .iter()
            .position(|&s| (s - from_amp).abs() > 1e-6)
            .unwrap();
        let mid = start + ramp_len / 2;
        let want = db_to_amplitude((from + to) / 2.0);
        assert!(
            (out.samples()[mid] as f64 - want).abs() < 1e-3,
            "midpoint {} vs {want}",
            out.samples()[mid]
        );
    }

    #[test]
    fn linear_transforms_are_homogeneous() {
        // T(a x) = a T(x) for the linear stages, checked well inside the
        // no-clipping regime.
        let clip = sine_clip(800.0, 16000, 8000, 0.4);
        let a = 0.5f32;
        let scaled = AudioClip::new(
            clip.samples().iter().map(|&s| s * a).collect(),
            16000,
            "scaled",
        )
        .unwrap();

        let cases: Vec<(AudioClip, AudioClip)> = vec![
            (
                parametric_eq(&clip, &[1.0, -2.0, 3.0, 0.0, -1.0, 2.0, 0.5]).unwrap(),
                parametric_eq(&scaled, &[1.0, -2.0, 3.0, 0.0, -1.0, 2.0, 0.5]).unwrap(),
            ),
            (
                bandpass_filter(&clip, 1200.0, 1.0).unwrap(),
                bandpass_filter(&scaled, 1200.0, 1.0).unwrap(),
            ),
            (
                lowpass_filter(&clip, 3000.0).unwrap(),
                lowpass_filter(&scaled, 3000.0).unwrap(),
            ),
            (
                apply_gain(&clip, -6.0).unwrap(),
                apply_gain(&scaled, -6.0).unwrap(),
            ),
            (
                room_simulate(&clip, 5.0, 4.0, 3.0, 0.4, &mut AugmentRng::new(2)).unwrap(),
                room_simulate(&scaled, 5.0, 4.0, 3.0, 0.4, &mut AugmentRng::new(2)).unwrap(),
            ),
        ];
        for (full, half) in cases {
            let rms_diff = (full
                .samples()
                .iter()
                .zip(half.samples())
                .map(|(&f, &h)| (f as f64 * a as f64 - h as f64).powi(2))
                .sum::<f64>()
                / full.len() as f64)
                .sqrt();
            assert!(rms_diff < 1e-6, "homogeneity violated: rms {rms_diff}");
        }
    }

    use super::super::rir::room_simulate;
}
