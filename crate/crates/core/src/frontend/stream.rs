use super::delta::delta_rows;
use super::mfcc::MfccComputer;
use super::tone::{fill_value, frame_pitch_hz};
use super::{hamming, make_frame, FrontendConfig, FrontendError};

/// Incremental feature extraction.
///
/// Rows are released only once they can no longer change: a tone value
/// needs the next voiced frame (or the end of input) and a delta row needs
/// `delta_order * delta_window` finalized rows after it. The concatenation
/// of everything returned by [`push`](Self::push) and
/// [`finish`](Self::finish) equals [`extract_features`](super::extract_features)
/// on the whole signal.
#[derive(Debug)]
pub struct StreamingFrontend {
    cfg: FrontendConfig,
    sample_rate_hz: u32,
    frame_len: usize,
    frame_shift: usize,
    window: Vec<f64>,
    mfcc: MfccComputer,
    pending: Vec<f32>,
    cepstra: Vec<Vec<f64>>,
    track: Vec<Option<f64>>,
    prev_voiced: Option<(usize, f64)>,
    base: Vec<Vec<f64>>,
    emitted: usize,
    finished: bool,
}

impl StreamingFrontend {
    pub fn new(cfg: FrontendConfig, sample_rate_hz: u32) -> Result<Self, FrontendError> {
        cfg.validate()?;
        cfg.check_rate(sample_rate_hz)?;
        let frame_len = cfg.frame_length(sample_rate_hz);
        let frame_shift = cfg.frame_shift(sample_rate_hz);
        Ok(Self {
            window: hamming(frame_len),
            mfcc: MfccComputer::new(&cfg, sample_rate_hz),
            cfg,
            sample_rate_hz,
            frame_len,
            frame_shift,
            pending: Vec::new(),
            cepstra: Vec::new(),
            track: Vec::new(),
            prev_voiced: None,
            base: Vec::new(),
            emitted: 0,
            finished: false,
        })
    }

    pub fn config(&self) -> &FrontendConfig {
        &self.cfg
    }

    pub fn width(&self) -> usize {
        self.cfg.output_width()
    }

    /// Frames analysed so far.
    pub fn frames_seen(&self) -> usize {
        self.track.len()
    }

    pub fn rows_emitted(&self) -> usize {
        self.emitted
    }

    /// Appends samples and returns any rows that became final.
    pub fn push(&mut self, samples: &[f32]) -> Vec<Vec<f64>> {
        assert!(!self.finished, "push after finish");
        self.pending.extend_from_slice(samples);
        let mut start = 0;
        while self.pending.len() - start >= self.frame_len {
            let frame = make_frame(
                &self.pending[start..start + self.frame_len],
                self.cfg.preemphasis_coeff,
                &self.window,
            );
            self.cepstra.push(self.mfcc.cepstra(&frame.windowed));
            self.track
                .push(frame_pitch_hz(&frame.raw, self.sample_rate_hz, &self.cfg).map(f64::ln));
            start += self.frame_shift;
        }
        self.pending.drain(..start.min(self.pending.len()));

        if let Some(last_voiced) = self.track.iter().rposition(Option::is_some) {
            self.resolve_tone(last_voiced + 1, true);
        }
        let margin = self.cfg.delta_order * self.cfg.delta_window;
        let ready = self.base.len().saturating_sub(margin);
        self.release(ready)
    }

    /// Flushes everything once the input has ended.
    pub fn finish(&mut self) -> Vec<Vec<f64>> {
        if self.finished {
            return Vec::new();
        }
        self.finished = true;
        self.resolve_tone(self.track.len(), false);
        self.release(self.base.len())
    }

    /// Finalizes base rows up to `end`. With `voiced_ahead`, `end - 1` is a
    /// voiced frame so every gap before it has a right neighbour.
    fn resolve_tone(&mut self, end: usize, voiced_ahead: bool) {
        for i in self.base.len()..end {
            let value = match self.track[i] {
                Some(v) => {
                    self.prev_voiced = Some((i, v));
                    v
                }
                None => {
                    let next = if voiced_ahead {
                        (i + 1..end).find_map(|j| self.track[j].map(|v| (j, v)))
                    } else {
                        None
                    };
                    fill_value(self.prev_voiced, next, i, self.cfg.f0_min_hz)
                }
            };
            let mut row = self.cepstra[i].clone();
            row.push(value);
            self.base.push(row);
        }
    }

    fn release(&mut self, ready: usize) -> Vec<Vec<f64>> {
        if ready <= self.emitted {
            return Vec::new();
        }
        let rows = delta_rows(
            &self.base,
            self.emitted..ready,
            self.cfg.delta_window,
            self.cfg.delta_order,
        );
        self.emitted = ready;
        rows
    }
}
