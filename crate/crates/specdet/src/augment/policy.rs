//! Augmentation policies: ordered stage lists with parameter ranges and
//! firing probabilities, plus the TOML policy-file format. An empty file
//! yields the built-in defaults.

use serde::Deserialize;
use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    Synthetic,
    Bonafide,
}

/// Parameter ranges for one transform. Ranges are closed intervals drawn
/// uniformly.
#[derive(Debug, Clone, PartialEq)]
pub enum StageParams {
    Room {
        width_m: (f64, f64),
        length_m: (f64, f64),
        height_m: (f64, f64),
        absorption: (f64, f64),
    },
    TimeMask {
        fraction: (f64, f64),
    },
    PitchShift {
        semitones: (f64, f64),
    },
    ParametricEq {
        gain_db: (f64, f64),
    },
    NoiseAmplitude {
        amplitude: (f64, f64),
    },
    NoiseSnr {
        snr_db: (f64, f64),
    },
    Bandpass {
        center_hz: (f64, f64),
        bandwidth_fraction: (f64, f64),
    },
    Lowpass {
        cutoff_hz: (f64, f64),
    },
    Gain {
        gain_db: (f64, f64),
    },
    GainTransition {
        from_db: (f64, f64),
        to_db: (f64, f64),
        duration_s: (f64, f64),
    },
    Codec {
        bitrate_kbps: (f64, f64),
        /// Optional shell command for a real encoder; placeholders `{in}`,
        /// `{out}`, `{bitrate_kbps}` are substituted. When unset the built-in
        /// MDCT approximation runs.
        external_command: Option<String>,
    },
}

impl StageParams {
    pub fn id(&self) -> &'static str {
        match self {
            StageParams::Room { .. } => "room",
            StageParams::TimeMask { .. } => "time_mask",
            StageParams::PitchShift { .. } => "pitch",
            StageParams::ParametricEq { .. } => "eq",
            StageParams::NoiseAmplitude { .. } => "noise",
            StageParams::NoiseSnr { .. } => "snr_noise",
            StageParams::Bandpass { .. } => "bandpass",
            StageParams::Lowpass { .. } => "lowpass",
            StageParams::Gain { .. } => "gain",
            StageParams::GainTransition { .. } => "gain_transition",
            StageParams::Codec { .. } => "codec",
        }
    }

    fn ranges(&self) -> Vec<(&'static str, (f64, f64))> {
        match self {
            StageParams::Room {
                width_m,
                length_m,
                height_m,
                absorption,
            } => vec![
                ("width_m", *width_m),
                ("length_m", *length_m),
                ("height_m", *height_m),
                ("absorption", *absorption),
            ],
            StageParams::TimeMask { fraction } => vec![("fraction", *fraction)],
            StageParams::PitchShift { semitones } => vec![("semitones", *semitones)],
            StageParams::ParametricEq { gain_db } => vec![("gain_db", *gain_db)],
            StageParams::NoiseAmplitude { amplitude } => vec![("amplitude", *amplitude)],
            StageParams::NoiseSnr { snr_db } => vec![("snr_db", *snr_db)],
            StageParams::Bandpass {
                center_hz,
                bandwidth_fraction,
            } => vec![
                ("center_hz", *center_hz),
                ("bandwidth_fraction", *bandwidth_fraction),
            ],
            StageParams::Lowpass { cutoff_hz } => vec![("cutoff_hz", *cutoff_hz)],
            StageParams::Gain { gain_db } => vec![("gain_db", *gain_db)],
            StageParams::GainTransition {
                from_db,
                to_db,
                duration_s,
            } => vec![
                ("from_db", *from_db),
                ("to_db", *to_db),
                ("duration_s", *duration_s),
            ],
            StageParams::Codec { bitrate_kbps, .. } => vec![("bitrate_kbps", *bitrate_kbps)],
        }
    }

    fn set_range(&mut self, key: &str, value: (f64, f64)) -> Result<()> {
        let slot: Option<&mut (f64, f64)> = match (self, key) {
            (StageParams::Room { width_m, .. }, "width_m") => Some(width_m),
            (StageParams::Room { length_m, .. }, "length_m") => Some(length_m),
            (StageParams::Room { height_m, .. }, "height_m") => Some(height_m),
            (StageParams::Room { absorption, .. }, "absorption") => Some(absorption),
            (StageParams::TimeMask { fraction }, "fraction") => Some(fraction),
            (StageParams::PitchShift { semitones }, "semitones") => Some(semitones),
            (StageParams::ParametricEq { gain_db }, "gain_db") => Some(gain_db),
            (StageParams::NoiseAmplitude { amplitude }, "amplitude") => Some(amplitude),
            (StageParams::NoiseSnr { snr_db }, "snr_db") => Some(snr_db),
            (StageParams::Bandpass { center_hz, .. }, "center_hz") => Some(center_hz),
            (StageParams::Bandpass { bandwidth_fraction, .. }, "bandwidth_fraction") => {
                Some(bandwidth_fraction)
            }
            (StageParams::Lowpass { cutoff_hz }, "cutoff_hz") => Some(cutoff_hz),
            (StageParams::Gain { gain_db }, "gain_db") => Some(gain_db),
            (StageParams::GainTransition { from_db, .. }, "from_db") => Some(from_db),
            (StageParams::GainTransition { to_db, .. }, "to_db") => Some(to_db),
            (StageParams::GainTransition { duration_s, .. }, "duration_s") => Some(duration_s),
            (StageParams::Codec { bitrate_kbps, .. }, "bitrate_kbps") => Some(bitrate_kbps),
            _ => None,
        };
        match slot {
            Some(r) => {
                *r = value;
                Ok(())
            }
            None => Err(Error::Config(format!(
                "stage '{}' has no range parameter '{key}'",
                self.id()
            ))),
        }
    }
}

/// One gated transform in a policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub params: StageParams,
    pub probability: f64,
}

/// An ordered augmentation pipeline for one label.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentPolicy {
    kind: PolicyKind,
    stages: Vec<Stage>,
}

impl AugmentPolicy {
    /// The aggressive eleven-stage pipeline applied to synthetic samples.
    pub fn default_synthetic() -> Self {
        let stages = vec![
            Stage {
                params: StageParams::Room {
                    width_m: (2.0, 12.0),
                    length_m: (2.0, 12.0),
                    height_m: (2.0, 5.0),
                    absorption: (0.05, 0.5),
                },
                probability: 0.1,
            },
            Stage {
                params: StageParams::TimeMask { fraction: (0.05, 0.15) },
                probability: 0.3,
            },
            Stage {
                params: StageParams::PitchShift { semitones: (-1.0, 1.0) },
                probability: 0.3,
            },
            Stage {
                params: StageParams::ParametricEq { gain_db: (-12.0, 12.0) },
                probability: 0.3,
            },
            Stage {
                params: StageParams::NoiseAmplitude { amplitude: (0.0005, 0.01) },
                probability: 0.5,
            },
            Stage {
                params: StageParams::NoiseSnr { snr_db: (10.0, 40.0) },
                probability: 0.5,
            },
            Stage {
                params: StageParams::Bandpass {
                    center_hz: (200.0, 5000.0),
                    bandwidth_fraction: (0.4, 1.8),
                },
                probability: 0.1,
            },
            Stage {
                params: StageParams::Lowpass { cutoff_hz: (2000.0, 7500.0) },
                probability: 0.1,
            },
            Stage {
                params: StageParams::Gain { gain_db: (-10.0, 10.0) },
                probability: 0.5,
            },
            Stage {
                params: StageParams::GainTransition {
                    from_db: (-10.0, 3.0),
                    to_db: (-10.0, 3.0),
                    duration_s: (0.3, 0.7),
                },
                probability: 0.4,
            },
            Stage {
                params: StageParams::Codec {
                    bitrate_kbps: (32.0, 192.0),
                    external_command: None,
                },
                probability: 0.4,
            },
        ];
        AugmentPolicy {
            kind: PolicyKind::Synthetic,
            stages,
        }
    }

    /// The conservative two-stage pipeline applied to bonafide samples:
    /// moderate room simulation and subtle noise addition.
    pub fn default_bonafide() -> Self {
        let stages = vec![
            Stage {
                params: StageParams::Room {
                    width_m: (2.0, 8.0),
                    length_m: (2.0, 8.0),
                    height_m: (2.0, 5.0),
                    absorption: (0.1, 0.3),
                },
                probability: 0.3,
            },
            Stage {
                params: StageParams::NoiseAmplitude { amplitude: (0.0005, 0.005) },
                probability: 0.3,
            },
        ];
        AugmentPolicy {
            kind: PolicyKind::Bonafide,
            stages,
        }
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn stages_mut(&mut self) -> &mut [Stage] {
        &mut self.stages
    }

    pub fn validate(&self) -> Result<()> {
        for stage in &self.stages {
            if !(0.0..=1.0).contains(&stage.probability) {
                return Err(Error::Config(format!(
                    "stage '{}' probability {} outside [0, 1]",
                    stage.params.id(),
                    stage.probability
                )));
            }
            for (name, (lo, hi)) in stage.params.ranges() {
                if !lo.is_finite() || !hi.is_finite() || lo > hi {
                    return Err(Error::Config(format!(
                        "stage '{}' range '{name}' = [{lo}, {hi}] is invalid",
                        stage.params.id()
                    )));
                }
            }
        }
        Ok(())
    }

    fn apply_overrides(&mut self, overrides: &BTreeMap<String, StageOverride>) -> Result<()> {
        for (stage_id, over) in overrides {
            let stage = self
                .stages
                .iter_mut()
                .find(|s| s.params.id() == stage_id)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "policy has no stage '{stage_id}' (valid stages: {})",
                        self_stage_ids(&self.kind)
                    ))
                })?;
            if let Some(p) = over.p {
                stage.probability = p;
            }
            for (key, value) in &over.ranges {
                match value {
                    toml::Value::Array(arr) if arr.len() == 2 => {
                        let lo = toml_number(&arr[0], stage_id, key)?;
                        let hi = toml_number(&arr[1], stage_id, key)?;
                        stage.params.set_range(key, (lo, hi))?;
                    }
                    toml::Value::String(s) if key == "external_command" => {
                        if let StageParams::Codec { external_command, .. } = &mut stage.params {
                            *external_command = Some(s.clone());
                        } else {
                            return Err(Error::Config(format!(
                                "'external_command' only applies to the codec stage, not '{stage_id}'"
                            )));
                        }
                    }
                    _ => {
                        return Err(Error::Config(format!(
                            "stage '{stage_id}' key '{key}' must be a two-element [low, high] array"
                        )));
                    }
                }
            }
        }
        self.validate()
    }
}

fn self_stage_ids(kind: &PolicyKind) -> String {
    let policy = match kind {
        PolicyKind::Synthetic => AugmentPolicy::default_synthetic(),
        PolicyKind::Bonafide => AugmentPolicy::default_bonafide(),
    };
    policy
        .stages()
        .iter()
        .map(|s| s.params.id())
        .collect::<Vec<_>>()
        .join(", ")
}

fn toml_number(v: &toml::Value, stage: &str, key: &str) -> Result<f64> {
    match v {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::Config(format!(
            "stage '{stage}' key '{key}' range bound must be numeric"
        ))),
    }
}

#[derive(Debug, Default, Deserialize)]
struct StageOverride {
    p: Option<f64>,
    #[serde(flatten)]
    ranges: BTreeMap<String, toml::Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoliciesFile {
    #[serde(default)]
    synthetic: BTreeMap<String, StageOverride>,
    #[serde(default)]
    bonafide: BTreeMap<String, StageOverride>,
}

/// The bonafide/synthetic policy pair used by training and batch
/// augmentation.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentPolicies {
    pub bonafide: AugmentPolicy,
    pub synthetic: AugmentPolicy,
}

impl Default for AugmentPolicies {
    fn default() -> Self {
        AugmentPolicies {
            bonafide: AugmentPolicy::default_bonafide(),
            synthetic: AugmentPolicy::default_synthetic(),
        }
    }
}

impl AugmentPolicies {
    /// Parse a TOML policy file. Every key is optional; an empty document
    /// yields the default policies. Keys take the form
    /// `synthetic.<stage>.p = 0.4` or `synthetic.<stage>.<range> = [lo, hi]`.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: PoliciesFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("policy file: {e}")))?;
        let mut policies = AugmentPolicies::default();
        policies.synthetic.apply_overrides(&file.synthetic)?;
        policies.bonafide.apply_overrides(&file.bonafide)?;
        Ok(policies)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }
}
