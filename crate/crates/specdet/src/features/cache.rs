//! Per-clip binary feature cache: 8-byte magic, u32 version, u32 frames,
//! u32 n_mels, then row-major little-endian f32 energies. The layout is
//! stable so other implementations can exchange features.

use std::io::{Read, Write};
use std::path::Path;

use super::Spectrogram;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"MELSPEC1";
const VERSION: u32 = 1;

pub fn write_feature_cache(path: &Path, spec: &Spectrogram) -> Result<()> {
    let mut out = Vec::with_capacity(20 + spec.data().len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(spec.frames() as u32).to_le_bytes());
    out.extend_from_slice(&(spec.n_mels() as u32).to_le_bytes());
    for &v in spec.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&out).map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_feature_cache(path: &Path) -> Result<Spectrogram> {
    let mut file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;

    if bytes.len() < 20 {
        return Err(Error::FeatureCacheFormat("file shorter than header".into()));
    }
    if &bytes[0..8] != MAGIC {
        return Err(Error::FeatureCacheFormat("bad magic".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::FeatureCacheFormat(format!(
            "version {version}, expected {VERSION}"
        )));
    }
    let frames = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let n_mels = u32::from_le_bytes(bytes[16..20].try_into().unwrap()) as usize;
    let expected = 20 + frames
        .checked_mul(n_mels)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::FeatureCacheFormat("dimension overflow".into()))?;
    if bytes.len() != expected {
        return Err(Error::FeatureCacheFormat(format!(
            "payload is {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    let data: Vec<f32> = bytes[20..]
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    Spectrogram::new(data, frames, n_mels)
}
