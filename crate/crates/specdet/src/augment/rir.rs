//! Image-source room simulation. Mirror images of the source up to a fixed
//! reflection order contribute delayed, attenuated impulses; the clip is
//! convolved with the resulting response.

use super::AugmentRng;
use crate::audio::AudioClip;
use crate::dsp::fft_convolve;
use crate::error::{Error, Result};

/// Speed of sound used throughout, m/s.
pub const SPEED_OF_SOUND: f64 = 343.0;
/// Highest total reflection count contributing images.
pub const MAX_REFLECTION_ORDER: i64 = 6;
/// Closest either endpoint may sit to a wall, in meters.
pub const WALL_MARGIN_M: f64 = 0.5;

/// Synthesize an impulse response for a shoebox room with uniform absorption.
/// The direct path keeps its physical delay and is normalized to unit gain;
/// every image of total bounce count `b` at distance `d` contributes
/// `sqrt(1-absorption)^b * d_direct/d` at `round(d / c * fs)` samples.
pub fn room_impulse_response(
    dims_m: [f64; 3],
    source_m: [f64; 3],
    receiver_m: [f64; 3],
    absorption: f64,
    sample_rate_hz: u32,
) -> Vec<f64> {
    let beta = (1.0 - absorption).sqrt();
    let fs = sample_rate_hz as f64;
    let floor_m = 0.01; // avoids the 1/d singularity when endpoints coincide

    let direct_d = dist(source_m, receiver_m).max(floor_m);

    struct Image {
        delay_samples: usize,
        gain: f64,
    }
    let mut images: Vec<Image> = Vec::new();
    let span = MAX_REFLECTION_ORDER / 2 + 1; // |n| <= 3 reaches order 6
    for nx in -span..=span {
        for qx in 0..2i64 {
            let bx = (nx - qx).abs() + nx.abs();
            if bx > MAX_REFLECTION_ORDER {
                continue;
            }
            for ny in -span..=span {
                for qy in 0..2i64 {
                    let by = (ny - qy).abs() + ny.abs();
                    if bx + by > MAX_REFLECTION_ORDER {
                        continue;
                    }
                    for nz in -span..=span {
                        for qz in 0..2i64 {
                            let bz = (nz - qz).abs() + nz.abs();
                            let bounces = bx + by + bz;
                            if bounces > MAX_REFLECTION_ORDER {
                                continue;
                            }
                            let img = [
                                (1 - 2 * qx) as f64 * source_m[0] + 2.0 * nx as f64 * dims_m[0],
                                (1 - 2 * qy) as f64 * source_m[1] + 2.0 * ny as f64 * dims_m[1],
                                (1 - 2 * qz) as f64 * source_m[2] + 2.0 * nz as f64 * dims_m[2],
                            ];
                            let d = dist(img, receiver_m).max(floor_m);
                            let delay_samples =
                                (d / SPEED_OF_SOUND * fs).round() as usize;
                            let gain = beta.powi(bounces as i32) * direct_d / d;
                            images.push(Image { delay_samples, gain });
                        }
                    }
                }
            }
        }
    }

    let len = images.iter().map(|i| i.delay_samples).max().unwrap_or(0) + 1;
    let mut rir = vec![0.0f64; len];
    for img in images {
        rir[img.delay_samples] += img.gain;
    }
    // Unit direct-path gain.
    let direct_idx = (direct_d / SPEED_OF_SOUND * fs).round() as usize;
    let direct_gain = rir[direct_idx];
    if direct_gain.abs() > 1e-12 {
        for v in rir.iter_mut() {
            *v /= direct_gain;
        }
    }
    rir
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Convolve a clip with a randomly-placed source/receiver response for the
/// given room. Source coordinates are drawn first (x, y, z), then receiver,
/// all uniform at least [`WALL_MARGIN_M`] from every wall. Output length
/// equals input length (tail truncated) and the peak is renormalized to at
/// most 1.
pub fn room_simulate(
    clip: &AudioClip,
    width_m: f64,
    length_m: f64,
    height_m: f64,
    absorption: f64,
    rng: &mut AugmentRng,
) -> Result<AudioClip> {
    let dims = [width_m, length_m, height_m];
    for d in dims {
        if !(d >= 2.0) {
            return Err(Error::Parameter(format!(
                "degenerate room: dimension {d} m below the 2 m minimum"
            )));
        }
    }
    if !(absorption > 0.0 && absorption < 1.0) {
        return Err(Error::Parameter(format!(
            "absorption {absorption} outside (0, 1)"
        )));
    }

    let mut draw_point = |rng: &mut AugmentRng| {
        [
            rng.uniform(WALL_MARGIN_M, dims[0] - WALL_MARGIN_M),
            rng.uniform(WALL_MARGIN_M, dims[1] - WALL_MARGIN_M),
            rng.uniform(WALL_MARGIN_M, dims[2] - WALL_MARGIN_M),
        ]
    };
    let source = draw_point(rng);
    let receiver = draw_point(rng);

    let rir = room_impulse_response(dims, source, receiver, absorption, clip.sample_rate_hz());
    let wet = fft_convolve(
        &clip.samples().iter().map(|&s| s as f64).collect::<Vec<_>>(),
        &rir,
    );
    let mut out: Vec<f64> = wet.into_iter().take(clip.len()).collect();
    out.resize(clip.len(), 0.0);
    let peak = out.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if peak > 1.0 {
        for v in out.iter_mut() {
            *v /= peak;
        }
    }
    clip.with_samples(out.into_iter().map(|v| v as f32).collect())
}
