//! Minimal RIFF/WAVE codec: PCM16 and IEEE float32, mono or stereo in,
//! PCM16 mono out. Hand-rolled so the writer is byte-stable and the reader's
//! error taxonomy is exact.

use std::path::Path;

use super::{clamp_unit, AudioClip};
use crate::error::{Error, Result};

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;

/// A decoded clip plus load diagnostics.
#[derive(Debug, Clone)]
pub struct LoadedWav {
    pub clip: AudioClip,
    /// Samples that fell outside [-1, 1] and were clamped. Zero for PCM16
    /// input; float32 files may carry hot samples.
    pub clamped_samples: usize,
}

pub fn load_wav(path: &Path) -> Result<LoadedWav> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_wav(&bytes, &path.to_string_lossy())
}

fn read_u16(bytes: &[u8], at: usize) -> Result<u16> {
    bytes
        .get(at..at + 2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .ok_or_else(|| Error::Format("unexpected end of file".into()))
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::Format("unexpected end of file".into()))
}

struct FmtChunk {
    format: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

/// Decode a RIFF/WAVE byte stream into a mono clip in [-1, 1].
pub fn decode_wav(bytes: &[u8], source_id: &str) -> Result<LoadedWav> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" {
        return Err(Error::Format("missing RIFF header".into()));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(Error::Format("missing WAVE marker".into()));
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    let mut at = 12usize;
    while at + 8 <= bytes.len() {
        let id = &bytes[at..at + 4];
        let size = read_u32(bytes, at + 4)? as usize;
        let body_start = at + 8;
        let body_end = body_start
            .checked_add(size)
            .ok_or_else(|| Error::Format("chunk size overflow".into()))?;
        if body_end > bytes.len() {
            return Err(Error::Format(format!(
                "chunk '{}' extends past end of file",
                String::from_utf8_lossy(id)
            )));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(Error::Format("fmt chunk too small".into()));
                }
                fmt = Some(FmtChunk {
                    format: read_u16(bytes, body_start)?,
                    channels: read_u16(bytes, body_start + 2)?,
                    sample_rate: read_u32(bytes, body_start + 4)?,
                    bits_per_sample: read_u16(bytes, body_start + 14)?,
                });
            }
            b"data" => {
                data = Some(&bytes[body_start..body_end]);
            }
            _ => {}
        }
        // Chunks are word-aligned; odd sizes carry a pad byte.
        at = body_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| Error::Format("no fmt chunk".into()))?;
    let data = data.ok_or_else(|| Error::Format("no data chunk".into()))?;

    if fmt.channels == 0 || fmt.channels > 2 {
        return Err(Error::UnsupportedCodec(format!(
            "{} channels (mono or stereo only)",
            fmt.channels
        )));
    }
    if fmt.sample_rate == 0 {
        return Err(Error::Format("zero sample rate in fmt chunk".into()));
    }

    let channels = fmt.channels as usize;
    let mut samples: Vec<f32> = match (fmt.format, fmt.bits_per_sample) {
        (FORMAT_PCM, 16) => {
            let frame_bytes = 2 * channels;
            if data.len() % frame_bytes != 0 {
                return Err(Error::Format("data chunk not a whole number of frames".into()));
            }
            data.chunks_exact(frame_bytes)
                .map(|frame| {
                    let mut acc = 0.0f32;
                    for ch in 0..channels {
                        let v = i16::from_le_bytes([frame[2 * ch], frame[2 * ch + 1]]);
                        acc += v as f32 / 32768.0;
                    }
                    acc / channels as f32
                })
                .collect()
        }
        (FORMAT_IEEE_FLOAT, 32) => {
            let frame_bytes = 4 * channels;
            if data.len() % frame_bytes != 0 {
                return Err(Error::Format("data chunk not a whole number of frames".into()));
            }
            let mut out = Vec::with_capacity(data.len() / frame_bytes);
            for frame in data.chunks_exact(frame_bytes) {
                let mut acc = 0.0f32;
                for ch in 0..channels {
                    let b = &frame[4 * ch..4 * ch + 4];
                    let v = f32::from_le_bytes([b[0], b[1], b[2], b[3]]);
                    if !v.is_finite() {
                        return Err(Error::Format("non-finite float sample".into()));
                    }
                    acc += v;
                }
                out.push(acc / channels as f32);
            }
            out
        }
        (FORMAT_PCM, bits) => {
            return Err(Error::UnsupportedCodec(format!("{bits}-bit PCM (16-bit only)")));
        }
        (FORMAT_IEEE_FLOAT, bits) => {
            return Err(Error::UnsupportedCodec(format!("{bits}-bit float (32-bit only)")));
        }
        (code, _) => {
            return Err(Error::UnsupportedCodec(format!("format code {code}")));
        }
    };

    if samples.is_empty() {
        return Err(Error::EmptyAudio);
    }
    let clamped_samples = clamp_unit(&mut samples);
    Ok(LoadedWav {
        clip: AudioClip::new(samples, fmt.sample_rate, source_id)?,
        clamped_samples,
    })
}

/// Encode a clip as mono PCM16. Values are scaled by 32768 and rounded half
/// away from zero, so a PCM16 decode/encode round trip is bit-exact.
pub fn encode_wav_pcm16(clip: &AudioClip) -> Vec<u8> {
    let data_len = clip.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&clip.sample_rate_hz().to_le_bytes());
    out.extend_from_slice(&(clip.sample_rate_hz() * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in clip.samples() {
        let v = (s as f64 * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn save_wav_pcm16(path: &Path, clip: &AudioClip) -> Result<()> {
    std::fs::write(path, encode_wav_pcm16(clip)).map_err(|e| Error::io(path, e))
}
