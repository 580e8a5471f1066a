//! Mono PCM16 WAV, headerless PCM and the `FEAT` binary matrix format.

use std::io::{self, Read, Write};

use thiserror::Error;

use super::{AudioBuffer, FeatureMatrix, FrontendError};

#[derive(Debug, Error)]
pub enum AudioIoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a RIFF/WAVE file")]
    NotWave,
    #[error("unsupported WAV format: {0}")]
    Unsupported(String),
    #[error("malformed file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Frontend(#[from] FrontendError),
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

pub fn pcm16le_to_i16(bytes: &[u8]) -> Vec<i16> {
    bytes
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]))
        .collect()
}

/// Parses a RIFF/WAVE byte image by walking its chunks.
pub fn parse_wav(bytes: &[u8]) -> Result<AudioBuffer, AudioIoError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(AudioIoError::NotWave);
    }
    let mut pos = 12;
    let mut format: Option<(u16, u16, u32, u16)> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body = pos + 8;
        match id {
            b"fmt " => {
                if size < 16 || body + 16 > bytes.len() {
                    return Err(AudioIoError::Malformed("short fmt chunk".into()));
                }
                format = Some((
                    u16_at(bytes, body),
                    u16_at(bytes, body + 2),
                    u32_at(bytes, body + 4),
                    u16_at(bytes, body + 14),
                ));
            }
            b"data" => {
                let (tag, channels, rate, bits) =
                    format.ok_or_else(|| AudioIoError::Malformed("data chunk before fmt".into()))?;
                if tag != 1 || channels != 1 || bits != 16 {
                    return Err(AudioIoError::Unsupported(format!(
                        "format {tag}, {channels} channels, {bits} bits; need mono 16-bit PCM"
                    )));
                }
                let end = (body + size).min(bytes.len());
                let pcm = pcm16le_to_i16(&bytes[body..end]);
                return Ok(AudioBuffer::from_pcm16(&pcm, rate)?);
            }
            _ => {}
        }
        pos = body + size + (size & 1);
    }
    Err(AudioIoError::Malformed("no data chunk".into()))
}

pub fn read_wav<R: Read>(mut r: R) -> Result<AudioBuffer, AudioIoError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse_wav(&bytes)
}

pub fn read_raw_pcm16<R: Read>(mut r: R, sample_rate_hz: u32) -> Result<AudioBuffer, AudioIoError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    Ok(AudioBuffer::from_pcm16(&pcm16le_to_i16(&bytes), sample_rate_hz)?)
}

/// Canonical 44-byte header followed by PCM16LE samples.
pub fn wav_bytes(pcm: &[i16], sample_rate_hz: u32) -> Vec<u8> {
    let data_len = (pcm.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + pcm.len() * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&(sample_rate_hz * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in pcm {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

pub fn write_feat<W: Write>(m: &FeatureMatrix, mut w: W) -> io::Result<()> {
    w.write_all(b"FEAT")?;
    w.write_all(&(m.rows() as u32).to_le_bytes())?;
    w.write_all(&(m.width() as u32).to_le_bytes())?;
    for v in m.as_slice() {
        w.write_all(&(*v as f32).to_le_bytes())?;
    }
    Ok(())
}

/// Reads a `FEAT` file; the frame shift is not stored and is set to `frame_shift_ms`.
pub fn read_feat<R: Read>(mut r: R, frame_shift_ms: f64) -> Result<FeatureMatrix, AudioIoError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 12 || &bytes[..4] != b"FEAT" {
        return Err(AudioIoError::Malformed("missing FEAT magic".into()));
    }
    let rows = u32_at(&bytes, 4) as usize;
    let cols = u32_at(&bytes, 8) as usize;
    if cols == 0 || bytes.len() != 12 + rows * cols * 4 {
        return Err(AudioIoError::Malformed(format!(
            "{rows}x{cols} matrix does not match {} payload bytes",
            bytes.len() - 12
        )));
    }
    let mut m = FeatureMatrix::new(cols, frame_shift_ms);
    let values: Vec<f64> = bytes[12..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    for row in values.chunks_exact(cols) {
        m.push_row(row)?;
    }
    Ok(m)
}
