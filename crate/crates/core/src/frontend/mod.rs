//! Acoustic front end: framing, MFCC, a pitch-based tone track and stacked
//! regression deltas.
//!
//! The canonical configuration yields `(13 + 1) * (1 + 3) = 56` values per
//! 10 ms frame. Every stage is a pure function of its input, and the
//! [`StreamingFrontend`] reproduces [`extract_features`] bit for bit when fed
//! the same samples in arbitrary chunks.

mod delta;
mod mfcc;
mod stream;
mod tone;
pub mod wav;

pub use delta::{append_deltas, delta_rows};
pub use mfcc::{compute_mfcc, MfccComputer};
pub use stream::StreamingFrontend;
pub use tone::{estimate_tone, fill_unvoiced, frame_pitch_hz};

use thiserror::Error;

/// Width of the base (pre-delta) feature vector: cepstra plus one tone value.
pub const fn base_width(num_cepstra: usize) -> usize {
    num_cepstra + 1
}

#[derive(Debug, Error, PartialEq)]
pub enum FrontendError {
    #[error("too-short input: {samples} samples, one frame needs {frame_len}")]
    TooShort { samples: usize, frame_len: usize },
    #[error("sample {index} out of range [-1, 1]: {value}")]
    SampleOutOfRange { index: usize, value: f32 },
    #[error("sample rate must be positive")]
    ZeroSampleRate,
    #[error("unsupported sample rate {got} Hz (expected {expected} Hz)")]
    UnsupportedSampleRate { got: u32, expected: u32 },
    #[error("invalid frontend config: {0}")]
    InvalidConfig(String),
    #[error("base feature width {got}, expected {expected}")]
    WidthMismatch { got: usize, expected: usize },
}

/// Mono audio normalized to [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f32>,
    sample_rate_hz: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f32>, sample_rate_hz: u32) -> Result<Self, FrontendError> {
        if sample_rate_hz == 0 {
            return Err(FrontendError::ZeroSampleRate);
        }
        if let Some((index, &value)) = samples
            .iter()
            .enumerate()
            .find(|(_, s)| !(-1.0..=1.0).contains(*s))
        {
            return Err(FrontendError::SampleOutOfRange { index, value });
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    /// Converts signed 16-bit PCM to the normalized range.
    pub fn from_pcm16(pcm: &[i16], sample_rate_hz: u32) -> Result<Self, FrontendError> {
        Self::new(pcm.iter().map(|&s| pcm16_to_f32(s)).collect(), sample_rate_hz)
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }
}

#[inline]
pub(crate) fn pcm16_to_f32(s: i16) -> f32 {
    s as f32 / 32768.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontendConfig {
    pub frame_length_ms: f64,
    pub frame_shift_ms: f64,
    pub num_mel_filters: usize,
    pub num_cepstra: usize,
    pub delta_order: usize,
    pub delta_window: usize,
    pub preemphasis_coeff: f64,
    pub f0_min_hz: f64,
    pub f0_max_hz: f64,
    /// Lower edge of the mel filterbank.
    pub low_freq_hz: f64,
    /// Upper edge of the mel filterbank; `None` means Nyquist.
    pub high_freq_hz: Option<f64>,
    /// Floor applied to filterbank energies before the log.
    pub energy_floor: f64,
    /// Minimum normalized autocorrelation peak for a frame to count as voiced.
    pub voicing_threshold: f64,
    /// When set, audio at any other rate is rejected.
    pub required_sample_rate_hz: Option<u32>,
}

impl Default for FrontendConfig {
    fn default() -> Self {
        Self {
            frame_length_ms: 25.0,
            frame_shift_ms: 10.0,
            num_mel_filters: 23,
            num_cepstra: 13,
            delta_order: 3,
            delta_window: 2,
            preemphasis_coeff: 0.97,
            f0_min_hz: 60.0,
            f0_max_hz: 400.0,
            low_freq_hz: 20.0,
            high_freq_hz: None,
            energy_floor: 1e-10,
            voicing_threshold: 0.7,
            required_sample_rate_hz: Some(16000),
        }
    }
}

impl FrontendConfig {
    pub fn frame_length(&self, sample_rate_hz: u32) -> usize {
        (self.frame_length_ms * sample_rate_hz as f64 / 1000.0).round() as usize
    }

    pub fn frame_shift(&self, sample_rate_hz: u32) -> usize {
        (self.frame_shift_ms * sample_rate_hz as f64 / 1000.0).round() as usize
    }

    /// Output row width: `(num_cepstra + 1) * (1 + delta_order)`.
    pub fn output_width(&self) -> usize {
        base_width(self.num_cepstra) * (1 + self.delta_order)
    }

    pub fn validate(&self) -> Result<(), FrontendError> {
        let bad = |m: &str| Err(FrontendError::InvalidConfig(m.to_string()));
        if !(self.frame_length_ms > 0.0 && self.frame_shift_ms > 0.0) {
            return bad("frame length and shift must be positive");
        }
        if self.frame_shift_ms > self.frame_length_ms {
            return bad("frame shift exceeds frame length");
        }
        if self.num_mel_filters == 0 || self.num_cepstra == 0 {
            return bad("filter and cepstrum counts must be positive");
        }
        if self.num_cepstra > self.num_mel_filters {
            return bad("more cepstra than mel filters");
        }
        if self.delta_order > 0 && self.delta_window == 0 {
            return bad("delta window must be positive");
        }
        if !(self.f0_min_hz > 0.0 && self.f0_min_hz < self.f0_max_hz) {
            return bad("pitch range must satisfy 0 < f0_min < f0_max");
        }
        if self.energy_floor <= 0.0 {
            return bad("energy floor must be positive");
        }
        Ok(())
    }

    pub(crate) fn check_rate(&self, sample_rate_hz: u32) -> Result<(), FrontendError> {
        if sample_rate_hz == 0 {
            return Err(FrontendError::ZeroSampleRate);
        }
        match self.required_sample_rate_hz {
            Some(expected) if expected != sample_rate_hz => Err(FrontendError::UnsupportedSampleRate {
                got: sample_rate_hz,
                expected,
            }),
            _ => Ok(()),
        }
    }

    /// Parses `key = value` lines; unknown keys are rejected, absent keys
    /// keep their defaults.
    pub fn parse(text: &str) -> Result<Self, FrontendError> {
        let mut cfg = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                FrontendError::InvalidConfig(format!("line {}: expected key = value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let num = || {
                value.parse::<f64>().map_err(|_| {
                    FrontendError::InvalidConfig(format!("line {}: bad number {value:?}", lineno + 1))
                })
            };
            match key {
                "frame_length_ms" => cfg.frame_length_ms = num()?,
                "frame_shift_ms" => cfg.frame_shift_ms = num()?,
                "num_mel_filters" => cfg.num_mel_filters = num()? as usize,
                "num_cepstra" => cfg.num_cepstra = num()? as usize,
                "delta_order" => cfg.delta_order = num()? as usize,
                "delta_window" => cfg.delta_window = num()? as usize,
                "preemphasis_coeff" => cfg.preemphasis_coeff = num()?,
                "f0_min_hz" => cfg.f0_min_hz = num()?,
                "f0_max_hz" => cfg.f0_max_hz = num()?,
                "low_freq_hz" => cfg.low_freq_hz = num()?,
                "high_freq_hz" => cfg.high_freq_hz = Some(num()?),
                "energy_floor" => cfg.energy_floor = num()?,
                "voicing_threshold" => cfg.voicing_threshold = num()?,
                "required_sample_rate_hz" => {
                    cfg.required_sample_rate_hz = match value {
                        "any" => None,
                        _ => Some(num()? as u32),
                    }
                }
                other => {
                    return Err(FrontendError::InvalidConfig(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One analysis frame: the raw samples and the pre-emphasized,
/// Hamming-windowed copy used for spectral analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub raw: Vec<f64>,
    pub windowed: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frames {
    pub sample_rate_hz: u32,
    pub frames: Vec<Frame>,
}

impl Frames {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Number of complete frames that fit in `n` samples.
pub fn frame_count(n: usize, frame_len: usize, frame_shift: usize) -> usize {
    if n < frame_len {
        0
    } else {
        1 + (n - frame_len) / frame_shift
    }
}

pub(crate) fn hamming(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let denom = (len - 1) as f64;
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * n as f64 / denom).cos())
        .collect()
}

/// Pre-emphasis is applied within each frame (the first sample is
/// emphasized against itself), so a frame depends only on its own samples.
pub(crate) fn make_frame(raw: &[f32], coeff: f64, window: &[f64]) -> Frame {
    let raw: Vec<f64> = raw.iter().map(|&s| s as f64).collect();
    let windowed = raw
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let prev = if i == 0 { x } else { raw[i - 1] };
            (x - coeff * prev) * window[i]
        })
        .collect();
    Frame { raw, windowed }
}

pub fn frame_signal(audio: &AudioBuffer, cfg: &FrontendConfig) -> Result<Frames, FrontendError> {
    cfg.validate()?;
    let sr = audio.sample_rate_hz();
    cfg.check_rate(sr)?;
    let len = cfg.frame_length(sr);
    let shift = cfg.frame_shift(sr);
    let n = audio.samples().len();
    if n < len || len == 0 {
        return Err(FrontendError::TooShort {
            samples: n,
            frame_len: len,
        });
    }
    let window = hamming(len);
    let frames = (0..frame_count(n, len, shift))
        .map(|i| make_frame(&audio.samples()[i * shift..i * shift + len], cfg.preemphasis_coeff, &window))
        .collect();
    Ok(Frames {
        sample_rate_hz: sr,
        frames,
    })
}

/// Row-major feature matrix with a fixed width.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    width: usize,
    frame_shift_ms: f64,
}

impl FeatureMatrix {
    pub fn new(width: usize, frame_shift_ms: f64) -> Self {
        assert!(width > 0, "feature width must be positive");
        Self {
            data: Vec::new(),
            width,
            frame_shift_ms,
        }
    }

    pub fn from_rows<R: AsRef<[f64]>>(
        rows: &[R],
        width: usize,
        frame_shift_ms: f64,
    ) -> Result<Self, FrontendError> {
        let mut m = Self::new(width, frame_shift_ms);
        for r in rows {
            m.push_row(r.as_ref())?;
        }
        Ok(m)
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<(), FrontendError> {
        if row.len() != self.width {
            return Err(FrontendError::WidthMismatch {
                got: row.len(),
                expected: self.width,
            });
        }
        self.data.extend_from_slice(row);
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.width
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn frame_shift_ms(&self) -> f64 {
        self.frame_shift_ms
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.width)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Full pipeline: frames → MFCC + tone → stacked deltas.
pub fn extract_features(audio: &AudioBuffer, cfg: &FrontendConfig) -> Result<FeatureMatrix, FrontendError> {
    let frames = frame_signal(audio, cfg)?;
    let cepstra = compute_mfcc(&frames, cfg);
    let tone = estimate_tone(&frames, cfg);
    let base: Vec<Vec<f64>> = cepstra
        .into_iter()
        .zip(tone)
        .map(|(mut c, t)| {
            c.push(t);
            c
        })
        .collect();
    append_deltas(&base, cfg)
}
