//! Shared signal-processing primitives: FFT access, windows, band-limited
//! interpolation, and fast convolution. Everything here is deterministic and
//! allocation-honest; callers own all buffers.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static FFT_CACHE: RefCell<PlanCache> = RefCell::new(PlanCache::default());
}

#[derive(Default)]
struct PlanCache {
    planner: Option<FftPlanner<f64>>,
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
}

/// In-place complex FFT. The inverse transform is unscaled (multiply by 1/n
/// yourself when round-tripping).
pub fn fft_in_place(buf: &mut [Complex<f64>], inverse: bool) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    FFT_CACHE.with(|cache| {
        let mut cache = cache.borrow_mut();
        let planner = cache.planner.get_or_insert_with(FftPlanner::new);
        let plan = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        let map = if inverse {
            &mut cache.inverse
        } else {
            &mut cache.forward
        };
        let plan = map.entry(n).or_insert(plan).clone();
        plan.process(buf);
    });
}

/// Power spectrum (|X_k|^2, k = 0..=n/2) of a real frame, zero-padded to
/// `fft_size`.
pub fn power_spectrum(frame: &[f64], fft_size: usize) -> Vec<f64> {
    assert!(frame.len() <= fft_size);
    let mut buf = vec![Complex::new(0.0, 0.0); fft_size];
    for (slot, &x) in buf.iter_mut().zip(frame.iter()) {
        slot.re = x;
    }
    fft_in_place(&mut buf, false);
    buf[..fft_size / 2 + 1].iter().map(|c| c.norm_sqr()).collect()
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Full linear convolution via FFT; output length `a.len() + b.len() - 1`.
pub fn fft_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let n = next_pow2(out_len);
    let mut fa = vec![Complex::new(0.0, 0.0); n];
    let mut fb = vec![Complex::new(0.0, 0.0); n];
    for (slot, &x) in fa.iter_mut().zip(a.iter()) {
        slot.re = x;
    }
    for (slot, &x) in fb.iter_mut().zip(b.iter()) {
        slot.re = x;
    }
    fft_in_place(&mut fa, false);
    fft_in_place(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(fb.iter()) {
        *x *= y;
    }
    fft_in_place(&mut fa, true);
    let scale = 1.0 / n as f64;
    fa[..out_len].iter().map(|c| c.re * scale).collect()
}

/// Zeroth-order modified Bessel function of the first kind (series expansion,
/// converges quickly for the β values used here).
pub fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 1..64 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    sum
}

/// Kaiser window value at normalized position `t` in [-1, 1].
pub fn kaiser(t: f64, beta: f64) -> f64 {
    if t.abs() > 1.0 {
        return 0.0;
    }
    bessel_i0(beta * (1.0 - t * t).sqrt()) / bessel_i0(beta)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Zero crossings per side of the interpolation kernel.
pub const SINC_TAPS: usize = 32;
/// Kaiser shape parameter for the interpolation kernel.
pub const SINC_KAISER_BETA: f64 = 8.0;

/// Band-limited resampling by an arbitrary rate ratio (`ratio` = output rate /
/// input rate). Output sample `m` reconstructs the signal at input position
/// `m / ratio` through a Kaiser-windowed sinc kernel with [`SINC_TAPS`] zero
/// crossings per side, low-passed to the narrower of the two Nyquist bands.
pub fn sinc_resample(input: &[f32], ratio: f64) -> Vec<f32> {
    assert!(ratio > 0.0);
    let n = input.len();
    let out_len = ((n as f64) * ratio).round() as usize;
    let cutoff = ratio.min(1.0);
    // Kernel half-width in input samples; widen when downsampling so the
    // number of sinc lobes is independent of the ratio.
    let half_width = (SINC_TAPS as f64 / cutoff).ceil() as isize;
    let mut out = Vec::with_capacity(out_len);
    for m in 0..out_len {
        let pos = m as f64 / ratio;
        let center = pos.floor() as isize;
        let mut acc = 0.0f64;
        for k in (center - half_width + 1)..=(center + half_width) {
            if k < 0 || k >= n as isize {
                continue;
            }
            let u = pos - k as f64;
            let w = kaiser(u / half_width as f64, SINC_KAISER_BETA);
            acc += input[k as usize] as f64 * cutoff * sinc(cutoff * u) * w;
        }
        out.push(acc as f32);
    }
    out
}

/// Symmetric Hamming window of length `n`.
pub fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| {
            0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos()
        })
        .collect()
}

/// Periodic Hann window of length `n` (COLA at 50% overlap).
pub fn hann_periodic(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos()
        })
        .collect()
}

/// MDCT sine window of length `n`, satisfying the Princen-Bradley condition.
pub fn sine_window(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (std::f64::consts::PI / n as f64 * (i as f64 + 0.5)).sin())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolve_matches_direct() {
        let a = [1.0, 2.0, 3.0];
        let b = [0.5, -1.0];
        let got = fft_convolve(&a, &b);
        let want = [0.5, 0.0, -0.5, -3.0];
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-9, "{g} vs {w}");
        }
    }

    #[test]
    fn bessel_i0_reference_values() {
        // Abramowitz & Stegun table values.
        assert!((bessel_i0(0.0) - 1.0).abs() < 1e-12);
        assert!((bessel_i0(1.0) - 1.2660658777520084).abs() < 1e-12);
        assert!((bessel_i0(2.0) - 2.2795853023360673).abs() < 1e-12);
    }

    #[test]
    fn resample_identity_ratio_preserves_length() {
        let x: Vec<f32> = (0..1000).map(|i| ((i as f32) * 0.01).sin()).collect();
        let y = sinc_resample(&x, 1.0);
        assert_eq!(y.len(), x.len());
        // Interior samples reproduce the input closely.
        for i in 100..900 {
            assert!((y[i] - x[i]).abs() < 1e-4);
        }
    }
}
