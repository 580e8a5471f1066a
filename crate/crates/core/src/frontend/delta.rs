use super::{base_width, FeatureMatrix, FrontendConfig, FrontendError};

/// Stacked regression deltas for rows `range` of `base`.
///
/// `d[t] = sum_k k * (c[t+k] - c[t-k]) / (2 * sum_k k^2)` for `k = 1..=window`,
/// applied `order` times, each layer on the previous one. Indices outside
/// `[0, base.len())` are clamped, i.e. the first and last rows are
/// replicated. Each returned row is `[base, d1, d2, ..]`.
///
/// A row's value depends only on rows within `order * window` of it, so a
/// caller holding a prefix of the utterance gets exactly the batch value
/// for every row at least that far from the end of the prefix.
pub fn delta_rows(
    base: &[Vec<f64>],
    range: std::ops::Range<usize>,
    window: usize,
    order: usize,
) -> Vec<Vec<f64>> {
    let n = base.len();
    if range.is_empty() || n == 0 {
        return Vec::new();
    }
    let dim = base[0].len();
    let norm = 2.0 * (1..=window).map(|k| (k * k) as f64).sum::<f64>();
    let clamp = |i: isize| i.clamp(0, n as isize - 1) as usize;

    // layers[j] covers [lo_j, hi_j) of layer j
    let span = |j: usize| {
        let reach = ((order - j) * window) as isize;
        let lo = clamp(range.start as isize - reach);
        let hi = (range.end + (order - j) * window).min(n);
        (lo, hi)
    };
    let mut layers: Vec<(usize, Vec<Vec<f64>>)> = Vec::with_capacity(order + 1);
    let (lo0, hi0) = span(0);
    layers.push((lo0, base[lo0..hi0].to_vec()));
    for j in 1..=order {
        let (lo, hi) = span(j);
        let (plo, prev) = &layers[j - 1];
        let at = |i: isize| &prev[clamp(i) - plo];
        let layer = (lo..hi)
            .map(|t| {
                (0..dim)
                    .map(|d| {
                        let mut acc = 0.0;
                        for k in 1..=window {
                            let kk = k as isize;
                            acc += k as f64 * (at(t as isize + kk)[d] - at(t as isize - kk)[d]);
                        }
                        acc / norm
                    })
                    .collect()
            })
            .collect();
        layers.push((lo, layer));
    }

    range
        .map(|t| {
            let mut row = Vec::with_capacity(dim * (order + 1));
            for (lo, layer) in &layers {
                row.extend_from_slice(&layer[t - lo]);
            }
            row
        })
        .collect()
}

pub fn append_deltas(base: &[Vec<f64>], cfg: &FrontendConfig) -> Result<FeatureMatrix, FrontendError> {
    let expected = base_width(cfg.num_cepstra);
    if let Some(bad) = base.iter().find(|r| r.len() != expected) {
        return Err(FrontendError::WidthMismatch {
            got: bad.len(),
            expected,
        });
    }
    let rows = delta_rows(base, 0..base.len(), cfg.delta_window, cfg.delta_order);
    FeatureMatrix::from_rows(&rows, cfg.output_width(), cfg.frame_shift_ms)
}
