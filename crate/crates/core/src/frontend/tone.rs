use super::{FrontendConfig, Frames};

/// Frames whose mean square falls below this are treated as silence.
const SILENCE_POWER: f64 = 1e-8;

/// Pitch of one frame by normalized autocorrelation, or `None` if unvoiced.
///
/// The lag search spans `[sr / f0_max, sr / f0_min]`. Among local maxima
/// reaching 90% of the global peak the shortest lag wins, which keeps
/// strongly periodic signals off their subharmonics.
pub fn frame_pitch_hz(raw: &[f64], sample_rate_hz: u32, cfg: &FrontendConfig) -> Option<f64> {
    let n = raw.len();
    let mean = raw.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = raw.iter().map(|v| v - mean).collect();
    if x.iter().map(|v| v * v).sum::<f64>() / (n as f64) < SILENCE_POWER {
        return None;
    }
    let sr = sample_rate_hz as f64;
    let min_lag = ((sr / cfg.f0_max_hz).floor() as usize).max(2);
    let max_lag = ((sr / cfg.f0_min_hz).ceil() as usize).min(n.saturating_sub(2));
    if min_lag + 2 > max_lag {
        return None;
    }

    // r[lag - lo] for lo = min_lag - 1 ..= max_lag + 1 so every candidate has neighbours
    let lo = min_lag - 1;
    let hi = (max_lag + 1).min(n - 1);
    let r: Vec<f64> = (lo..=hi)
        .map(|lag| {
            let (a, b) = (&x[..n - lag], &x[lag..]);
            let num: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
            let ea: f64 = a.iter().map(|v| v * v).sum();
            let eb: f64 = b.iter().map(|v| v * v).sum();
            let den = (ea * eb).sqrt();
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        })
        .collect();

    let candidates = (min_lag..=max_lag.min(hi - 1)).filter(|&lag| {
        let i = lag - lo;
        r[i] >= r[i - 1] && r[i] >= r[i + 1]
    });
    let peak = candidates
        .clone()
        .map(|lag| r[lag - lo])
        .fold(f64::NEG_INFINITY, f64::max);
    if peak.is_nan() || peak < cfg.voicing_threshold {
        return None;
    }
    let best = candidates.into_iter().find(|&lag| r[lag - lo] >= 0.9 * peak)?;

    let i = best - lo;
    let (ym, y0, yp) = (r[i - 1], r[i], r[i + 1]);
    let curvature = ym - 2.0 * y0 + yp;
    let offset = if curvature < 0.0 {
        (0.5 * (ym - yp) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    Some(sr / (best as f64 + offset))
}

/// Value at index `i` of the filled tone track.
///
/// Shared by the batch and streaming paths so both produce identical bits.
pub(crate) fn fill_value(
    prev: Option<(usize, f64)>,
    next: Option<(usize, f64)>,
    i: usize,
    f0_min_hz: f64,
) -> f64 {
    match (prev, next) {
        (Some((ia, a)), Some((ib, b))) => {
            if ia == ib {
                a
            } else {
                a + (b - a) * (i - ia) as f64 / (ib - ia) as f64
            }
        }
        (Some((_, a)), None) => a,
        (None, Some((_, b))) => b,
        (None, None) => f0_min_hz.ln(),
    }
}

/// Linear interpolation over unvoiced gaps; edges hold the nearest voiced
/// value; a track with no voiced frame is `ln(f0_min)` throughout.
pub fn fill_unvoiced(track: &[Option<f64>], f0_min_hz: f64) -> Vec<f64> {
    let mut next = vec![None; track.len()];
    let mut upcoming = None;
    for i in (0..track.len()).rev() {
        if let Some(v) = track[i] {
            upcoming = Some((i, v));
        }
        next[i] = upcoming;
    }
    let mut prev = None;
    track
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if let Some(v) = *v {
                prev = Some((i, v));
                return v;
            }
            fill_value(prev, next[i], i, f0_min_hz)
        })
        .collect()
}

/// Per-frame log-F0 (natural log), unvoiced frames filled.
pub fn estimate_tone(frames: &Frames, cfg: &FrontendConfig) -> Vec<f64> {
    let track: Vec<Option<f64>> = frames
        .frames
        .iter()
        .map(|f| frame_pitch_hz(&f.raw, frames.sample_rate_hz, cfg).map(f64::ln))
        .collect();
    fill_unvoiced(&track, cfg.f0_min_hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{frame_signal, AudioBuffer};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pulse_train(f0: usize, n: usize) -> AudioBuffer {
        let period = 16000 / f0;
        let s = (0..n).map(|i| if i % period == 0 { 0.8 } else { 0.0 }).collect();
        AudioBuffer::new(s, 16000).unwrap()
    }

    fn sine(freq: f64, n: usize) -> Vec<f32> {
        (0..n)
            .map(|i| 0.5 * (2.0 * std::f64::consts::PI * freq * i as f64 / 16000.0).sin() as f32)
            .collect()
    }

    #[test]
    fn pulse_train_200hz() {
        let cfg = FrontendConfig::default();
        let frames = frame_signal(&pulse_train(200, 16000), &cfg).unwrap();
        let interior = &frames.frames[2..frames.len() - 2];
        let hits = interior
            .iter()
            .filter(|f| matches!(frame_pitch_hz(&f.raw, 16000, &cfg), Some(hz) if (hz - 200.0).abs() <= 5.0))
            .count();
        assert!(hits as f64 >= 0.9 * interior.len() as f64, "{hits}/{}", interior.len());
    }

    #[test]
    fn white_noise_is_flat() {
        let cfg = FrontendConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = (0..16000).map(|_| rng.gen_range(-0.5f32..0.5)).collect();
        let frames = frame_signal(&AudioBuffer::new(s, 16000).unwrap(), &cfg).unwrap();
        let tone = estimate_tone(&frames, &cfg);
        assert!(tone.iter().all(|&t| t == tone[0]));
    }

    #[test]
    fn silence_gives_f0_min_floor() {
        let cfg = FrontendConfig::default();
        let frames = frame_signal(&AudioBuffer::new(vec![0.0; 4000], 16000).unwrap(), &cfg).unwrap();
        assert!(estimate_tone(&frames, &cfg).iter().all(|&t| t == 60f64.ln()));
    }

    #[test]
    fn gap_between_equal_pitches_is_flat() {
        let cfg = FrontendConfig::default();
        let mut s = sine(150.0, 4800);
        s.extend(std::iter::repeat_n(0.0, 4800));
        s.extend(sine(150.0, 4800));
        let frames = frame_signal(&AudioBuffer::new(s, 16000).unwrap(), &cfg).unwrap();
        let track: Vec<Option<f64>> = frames
            .frames
            .iter()
            .map(|f| frame_pitch_hz(&f.raw, 16000, &cfg).map(f64::ln))
            .collect();
        let filled = estimate_tone(&frames, &cfg);
        let mid = track.len() / 2;
        assert!(track[mid].is_none());
        let (ia, a) = (0..mid).rev().find_map(|i| track[i].map(|v| (i, v))).unwrap();
        let (ib, b) = (mid..track.len()).find_map(|i| track[i].map(|v| (i, v))).unwrap();
        assert!((a.exp() - 150.0).abs() < 2.0 && (b.exp() - 150.0).abs() < 2.0);
        let expected = a + (b - a) * (mid - ia) as f64 / (ib - ia) as f64;
        assert!((filled[mid] - expected).abs() < 1e-12);
        assert!((filled[mid] - 150f64.ln()).abs() < 0.02);
    }

    #[test]
    fn interpolation_between_equal_endpoints() {
        let v = 150f64.ln();
        let track = [Some(v), None, None, None, Some(v)];
        assert!(fill_unvoiced(&track, 60.0).iter().all(|&x| (x - v).abs() < 1e-12));
    }

    #[test]
    fn fill_rules() {
        let t = [None, Some(1.0), None, Some(3.0), None];
        assert_eq!(fill_unvoiced(&t, 60.0), vec![1.0, 1.0, 2.0, 3.0, 3.0]);
        assert_eq!(fill_unvoiced(&[None, None], 60.0), vec![60f64.ln(); 2]);
    }
}
