//! Direct-form-I biquad sections with the usual audio-EQ cookbook designs.
//! Coefficients and state are f64; samples enter and leave as f32.

#[derive(Debug, Clone)]
pub struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
}

impl Biquad {
    fn from_unnormalized(b0: f64, b1: f64, b2: f64, a0: f64, a1: f64, a2: f64) -> Self {
        Biquad {
            b0: b0 / a0,
            b1: b1 / a0,
            b2: b2 / a0,
            a1: a1 / a0,
            a2: a2 / a0,
            x1: 0.0,
            x2: 0.0,
            y1: 0.0,
            y2: 0.0,
        }
    }

    fn angular(freq_hz: f64, sample_rate_hz: f64) -> f64 {
        2.0 * std::f64::consts::PI * freq_hz / sample_rate_hz
    }

    /// Peaking EQ with `gain_db` at the center frequency.
    pub fn peaking(sample_rate_hz: f64, center_hz: f64, q: f64, gain_db: f64) -> Self {
        let a = 10f64.powf(gain_db / 40.0);
        let w0 = Self::angular(center_hz, sample_rate_hz);
        let alpha = w0.sin() / (2.0 * q);
        Self::from_unnormalized(
            1.0 + alpha * a,
            -2.0 * w0.cos(),
            1.0 - alpha * a,
            1.0 + alpha / a,
            -2.0 * w0.cos(),
            1.0 - alpha / a,
        )
    }

    /// Second-order low-pass, -3 dB at the cutoff for q = 1/sqrt(2).
    pub fn lowpass(sample_rate_hz: f64, cutoff_hz: f64, q: f64) -> Self {
        let w0 = Self::angular(cutoff_hz, sample_rate_hz);
        let alpha = w0.sin() / (2.0 * q);
        let cosw = w0.cos();
        Self::from_unnormalized(
            (1.0 - cosw) / 2.0,
            1.0 - cosw,
            (1.0 - cosw) / 2.0,
            1.0 + alpha,
            -2.0 * cosw,
            1.0 - alpha,
        )
    }

    /// Constant-peak-gain band-pass (0 dB at the center).
    pub fn bandpass(sample_rate_hz: f64, center_hz: f64, q: f64) -> Self {
        let w0 = Self::angular(center_hz, sample_rate_hz);
        let alpha = w0.sin() / (2.0 * q);
        Self::from_unnormalized(
            alpha,
            0.0,
            -alpha,
            1.0 + alpha,
            -2.0 * w0.cos(),
            1.0 - alpha,
        )
    }

    #[inline]
    pub fn process(&mut self, x: f64) -> f64 {
        let y = self.b0 * x + self.b1 * self.x1 + self.b2 * self.x2
            - self.a1 * self.y1
            - self.a2 * self.y2;
        self.x2 = self.x1;
        self.x1 = x;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }

    pub fn reset(&mut self) {
        self.x1 = 0.0;
        self.x2 = 0.0;
        self.y1 = 0.0;
        self.y2 = 0.0;
    }

    /// Run the filter over a buffer (fresh state).
    pub fn filter(&mut self, input: &[f32]) -> Vec<f32> {
        self.reset();
        input.iter().map(|&x| self.process(x as f64) as f32).collect()
    }

    /// Forward-backward (zero-phase) filtering; magnitude response squared.
    pub fn filtfilt(&mut self, input: &[f32]) -> Vec<f32> {
        self.reset();
        let mut fwd: Vec<f64> = input.iter().map(|&x| self.process(x as f64)).collect();
        self.reset();
        fwd.reverse();
        let mut back: Vec<f64> = fwd.iter().map(|&x| self.process(x)).collect();
        back.reverse();
        back.into_iter().map(|x| x as f32).collect()
    }
}
