use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{FrontendConfig, Frames};

fn hz_to_mel(hz: f64) -> f64 {
    1127.0 * (1.0 + hz / 700.0).ln()
}

/// Triangular mel filterbank, power spectrum, log and orthonormal DCT-II.
///
/// Triangles are laid out in the mel domain between `low_freq_hz` and the
/// upper edge; bin `k` of an `n_fft`-point FFT sits at `k * sr / n_fft` Hz.
#[derive(Clone)]
pub struct MfccComputer {
    fft: Arc<dyn Fft<f64>>,
    n_fft: usize,
    filters: Vec<Vec<(usize, f64)>>,
    dct: Vec<Vec<f64>>,
    energy_floor: f64,
}

impl std::fmt::Debug for MfccComputer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MfccComputer")
            .field("n_fft", &self.n_fft)
            .field("filters", &self.filters.len())
            .field("cepstra", &self.dct.len())
            .finish()
    }
}

impl MfccComputer {
    pub fn new(cfg: &FrontendConfig, sample_rate_hz: u32) -> Self {
        let frame_len = cfg.frame_length(sample_rate_hz);
        let n_fft = frame_len.next_power_of_two();
        let fft = FftPlanner::new().plan_fft_forward(n_fft);
        let sr = sample_rate_hz as f64;
        let high = cfg.high_freq_hz.unwrap_or(sr / 2.0);
        let (mel_lo, mel_hi) = (hz_to_mel(cfg.low_freq_hz), hz_to_mel(high));
        let m = cfg.num_mel_filters;
        let step = (mel_hi - mel_lo) / (m + 1) as f64;

        let filters = (0..m)
            .map(|j| {
                let left = mel_lo + j as f64 * step;
                let center = left + step;
                let right = center + step;
                (0..=n_fft / 2)
                    .filter_map(|k| {
                        let mel = hz_to_mel(k as f64 * sr / n_fft as f64);
                        let w = if mel > left && mel <= center {
                            (mel - left) / (center - left)
                        } else if mel > center && mel < right {
                            (right - mel) / (right - center)
                        } else {
                            0.0
                        };
                        (w > 0.0).then_some((k, w))
                    })
                    .collect()
            })
            .collect();

        let dct = (0..cfg.num_cepstra)
            .map(|i| {
                let scale = if i == 0 { (1.0 / m as f64).sqrt() } else { (2.0 / m as f64).sqrt() };
                (0..m)
                    .map(|j| scale * (PI * i as f64 * (j as f64 + 0.5) / m as f64).cos())
                    .collect()
            })
            .collect();

        Self {
            fft,
            n_fft,
            filters,
            dct,
            energy_floor: cfg.energy_floor,
        }
    }

    pub fn power_spectrum(&self, windowed: &[f64]) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = windowed.iter().map(|&x| Complex::new(x, 0.0)).collect();
        buf.resize(self.n_fft, Complex::new(0.0, 0.0));
        self.fft.process(&mut buf);
        buf[..=self.n_fft / 2].iter().map(|c| c.norm_sqr()).collect()
    }

    /// Natural-log filterbank energies, floored.
    pub fn log_mel(&self, windowed: &[f64]) -> Vec<f64> {
        let power = self.power_spectrum(windowed);
        self.filters
            .iter()
            .map(|f| {
                let e: f64 = f.iter().map(|&(k, w)| w * power[k]).sum();
                e.max(self.energy_floor).ln()
            })
            .collect()
    }

    pub fn cepstra(&self, windowed: &[f64]) -> Vec<f64> {
        let log_mel = self.log_mel(windowed);
        self.dct
            .iter()
            .map(|basis| basis.iter().zip(&log_mel).map(|(b, e)| b * e).sum())
            .collect()
    }
}

pub fn compute_mfcc(frames: &Frames, cfg: &FrontendConfig) -> Vec<Vec<f64>> {
    let computer = MfccComputer::new(cfg, frames.sample_rate_hz);
    frames.frames.iter().map(|f| computer.cepstra(&f.windowed)).collect()
}
