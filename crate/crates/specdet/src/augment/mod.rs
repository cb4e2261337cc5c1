//! Label-differentiated augmentation: an aggressive eleven-stage pipeline for
//! synthetic samples and a conservative two-stage pipeline for bonafide
//! samples, with seeded, reproducible stochastic gating.
//!
//! Gating discipline: one gate draw per stage is always consumed, in fixed
//! stage order, from a stream derived only from the seed. Each stage's
//! parameter draws come from their own derived stream, so editing or firing
//! one stage can never shift another stage's gate or parameters.

mod biquad;
mod codec;
mod policy;
mod rir;
mod transforms;

pub use biquad::Biquad;
pub use codec::codec_simulate;
pub use policy::{AugmentPolicies, AugmentPolicy, PolicyKind, Stage, StageParams};
pub use rir::{room_impulse_response, room_simulate};
pub use transforms::{
    add_noise_amplitude, add_noise_snr, apply_gain, bandpass_filter, gain_transition,
    lowpass_filter, parametric_eq, pitch_shift, time_mask,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audio::AudioClip;
use crate::error::Result;
use crate::seeding::derive_seed;

/// Deterministic augmentation RNG. The same seed yields a bit-identical draw
/// sequence on every platform.
pub struct AugmentRng {
    seed: u64,
    rng: ChaCha8Rng,
}

impl AugmentRng {
    pub fn new(seed: u64) -> Self {
        AugmentRng {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Per-work-item stream: hash the master seed with the clip's provenance
    /// and the epoch counter, so parallel augmentation never shares state.
    pub fn for_record(master_seed: u64, source_id: &str, epoch: u64) -> Self {
        AugmentRng::new(derive_seed(master_seed, &[
            "augment",
            source_id,
            &epoch.to_string(),
        ]))
    }

    /// Child stream labeled `label`; derived from the seed, not the current
    /// draw position.
    pub fn derive(&self, label: &str) -> Self {
        AugmentRng::new(derive_seed(self.seed, &[label]))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if lo == hi {
            return lo;
        }
        self.rng.gen_range(lo..hi)
    }

    pub fn uniform_range(&mut self, range: (f64, f64)) -> f64 {
        self.uniform(range.0, range.1)
    }

    pub fn uniform_index(&mut self, upper_inclusive: usize) -> usize {
        self.rng.gen_range(0..=upper_inclusive)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(rand_distr::StandardNormal)
    }
}

/// Apply a policy to a clip. Deterministic given (clip, policy, seed).
pub fn augment(clip: &AudioClip, policy: &AugmentPolicy, rng: &AugmentRng) -> Result<AudioClip> {
    augment_traced(clip, policy, rng).map(|(clip, _)| clip)
}

/// Like [`augment`], additionally reporting which stages fired.
pub fn augment_traced(
    clip: &AudioClip,
    policy: &AugmentPolicy,
    rng: &AugmentRng,
) -> Result<(AudioClip, Vec<&'static str>)> {
    policy.validate()?;
    let mut gates = rng.derive("gates");
    let mut out = clip.clone();
    let mut fired = Vec::new();
    for (idx, stage) in policy.stages().iter().enumerate() {
        let gate = gates.uniform(0.0, 1.0);
        if gate < stage.probability {
            let label = format!("stage-{idx}-{}", stage.params.id());
            let mut stage_rng = rng.derive(&label);
            out = apply_stage(&out, &stage.params, &mut stage_rng)?;
            fired.push(stage.params.id());
        }
    }
    Ok((out, fired))
}

/// Draw stage parameters uniformly from their ranges (in declaration order)
/// and run the transform.
fn apply_stage(clip: &AudioClip, params: &StageParams, rng: &mut AugmentRng) -> Result<AudioClip> {
    match params {
        StageParams::Room {
            width_m,
            length_m,
            height_m,
            absorption,
        } => {
            let w = rng.uniform_range(*width_m);
            let l = rng.uniform_range(*length_m);
            let h = rng.uniform_range(*height_m);
            let a = rng.uniform_range(*absorption);
            room_simulate(clip, w, l, h, a, rng)
        }
        StageParams::TimeMask { fraction } => {
            let f = rng.uniform_range(*fraction);
            time_mask(clip, f, rng)
        }
        StageParams::PitchShift { semitones } => {
            let s = rng.uniform_range(*semitones);
            pitch_shift(clip, s)
        }
        StageParams::ParametricEq { gain_db } => {
            let mut gains = [0.0f64; 7];
            for g in gains.iter_mut() {
                *g = rng.uniform_range(*gain_db);
            }
            parametric_eq(clip, &gains)
        }
        StageParams::NoiseAmplitude { amplitude } => {
            let a = rng.uniform_range(*amplitude);
            add_noise_amplitude(clip, a, rng)
        }
        StageParams::NoiseSnr { snr_db } => {
            let s = rng.uniform_range(*snr_db);
            add_noise_snr(clip, s, rng)
        }
        StageParams::Bandpass {
            center_hz,
            bandwidth_fraction,
        } => {
            let c = rng.uniform_range(*center_hz);
            let f = rng.uniform_range(*bandwidth_fraction);
            bandpass_filter(clip, c, f)
        }
        StageParams::Lowpass { cutoff_hz } => {
            let c = rng.uniform_range(*cutoff_hz);
            lowpass_filter(clip, c)
        }
        StageParams::Gain { gain_db } => {
            let g = rng.uniform_range(*gain_db);
            apply_gain(clip, g)
        }
        StageParams::GainTransition {
            from_db,
            to_db,
            duration_s,
        } => {
            let from = rng.uniform_range(*from_db);
            let to = rng.uniform_range(*to_db);
            let dur = rng.uniform_range(*duration_s);
            gain_transition(clip, from, to, dur, rng)
        }
        StageParams::Codec {
            bitrate_kbps,
            external_command,
        } => {
            let b = rng.uniform_range(*bitrate_kbps);
            match external_command {
                Some(cmd) => codec::codec_external(clip, b, cmd),
                None => codec_simulate(clip, b),
            }
        }
    }
}
