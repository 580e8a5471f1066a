use std::collections::HashMap;
use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScorerError {
    #[error("scorer line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("variance must be positive (state {state}, dim {dim})")]
    NonPositiveVariance { state: usize, dim: usize },
}

/// Log-likelihood of a feature row under an acoustic state. Must be finite
/// and deterministic for a given (pdf, frame, row).
pub trait AcousticScorer: Send + Sync {
    fn score(&self, pdf: usize, frame: usize, row: &[f64]) -> f64;

    /// Number of acoustic states covered, if bounded.
    fn num_pdfs(&self) -> Option<usize> {
        None
    }

    /// Feature width required, if any.
    fn dim(&self) -> Option<usize> {
        None
    }
}

/// Fixed scores by (pdf, frame index), ignoring feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct TableScorer {
    default: f64,
    table: HashMap<(usize, usize), f64>,
}

impl TableScorer {
    pub fn new(default: f64) -> Self {
        Self {
            default,
            table: HashMap::new(),
        }
    }

    pub fn set(&mut self, pdf: usize, frame: usize, score: f64) {
        self.table.insert((pdf, frame), score);
    }

    /// `table <default>` then `pdf frame score` lines.
    pub fn parse(text: &str) -> Result<Self, ScorerError> {
        let mut lines = content_lines(text);
        let (line, header) = lines.next().ok_or(ScorerError::Parse {
            line: 0,
            msg: "empty scorer file".into(),
        })?;
        let default = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["table", d] => parse_num(d, line)?,
            _ => return Err(perr(line, "expected `table <default>`")),
        };
        let mut s = Self::new(default);
        for (line, l) in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 3 {
                return Err(perr(line, "expected `pdf frame score`"));
            }
            let pdf = f[0].parse().map_err(|_| perr(line, "bad pdf"))?;
            let frame = f[1].parse().map_err(|_| perr(line, "bad frame"))?;
            s.set(pdf, frame, parse_num(f[2], line)?);
        }
        Ok(s)
    }
}

impl AcousticScorer for TableScorer {
    fn score(&self, pdf: usize, frame: usize, _row: &[f64]) -> f64 {
        self.table.get(&(pdf, frame)).copied().unwrap_or(self.default)
    }
}

/// One diagonal-covariance Gaussian per acoustic state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalGaussianScorer {
    dim: usize,
    means: Vec<Vec<f64>>,
    inv_vars: Vec<Vec<f64>>,
    /// −½ Σ ln(2π σ²) per state.
    consts: Vec<f64>,
}

impl DiagonalGaussianScorer {
    pub fn new(means: Vec<Vec<f64>>, vars: Vec<Vec<f64>>) -> Result<Self, ScorerError> {
        let dim = means.first().map_or(0, Vec::len);
        if means.len() != vars.len() || means.iter().chain(&vars).any(|r| r.len() != dim) {
            return Err(perr(0, "mean and variance rows must all have the same length"));
        }
        let mut consts = Vec::with_capacity(vars.len());
        let mut inv_vars = Vec::with_capacity(vars.len());
        for (state, v) in vars.iter().enumerate() {
            if let Some(d) = v.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(ScorerError::NonPositiveVariance { state, dim: d });
            }
            consts.push(-0.5 * v.iter().map(|x| (2.0 * PI * x).ln()).sum::<f64>());
            inv_vars.push(v.iter().map(|x| 1.0 / x).collect());
        }
        Ok(Self {
            dim,
            means,
            inv_vars,
            consts,
        })
    }

    /// Header `<states> <dim>`, then per state a mean row and a variance row.
    pub fn parse(text: &str) -> Result<Self, ScorerError> {
        let mut lines = content_lines(text);
        let (line, header) = lines.next().ok_or(perr(0, "empty scorer file"))?;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| perr(line, "expected `<states> <dim>`")))
            .collect::<Result<_, _>>()?;
        let [states, dim] = h[..] else {
            return Err(perr(line, "expected `<states> <dim>`"));
        };
        let mut rows = |what: &str| -> Result<Vec<f64>, ScorerError> {
            let (line, l) = lines.next().ok_or_else(|| perr(0, &format!("missing {what} row")))?;
            let r: Vec<f64> = l.split_whitespace().map(|x| parse_num(x, line)).collect::<Result<_, _>>()?;
            if r.len() != dim {
                return Err(perr(line, &format!("{what} row has {} values, expected {dim}", r.len())));
            }
            Ok(r)
        };
        let mut means = Vec::with_capacity(states);
        let mut vars = Vec::with_capacity(states);
        for _ in 0..states {
            means.push(rows("mean")?);
            vars.push(rows("variance")?);
        }
        if let Some((line, _)) = lines.next() {
            return Err(perr(line, "trailing data after the declared states"));
        }
        Self::new(means, vars)
    }

    pub fn serialize(&self) -> String {
        let row = |r: &[f64]| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = format!("{} {}\n", self.means.len(), self.dim);
        for (m, iv) in self.means.iter().zip(&self.inv_vars) {
            let v: Vec<f64> = iv.iter().map(|x| 1.0 / x).collect();
            out.push_str(&format!("{}\n{}\n", row(m), row(&v)));
        }
        out
    }
}

impl AcousticScorer for DiagonalGaussianScorer {
    fn score(&self, pdf: usize, _frame: usize, row: &[f64]) -> f64 {
        let quad: f64 = row
            .iter()
            .zip(&self.means[pdf])
            .zip(&self.inv_vars[pdf])
            .map(|((x, m), iv)| (x - m) * (x - m) * iv)
            .sum();
        self.consts[pdf] - 0.5 * quad
    }

    fn num_pdfs(&self) -> Option<usize> {
        Some(self.means.len())
    }

    fn dim(&self) -> Option<usize> {
        Some(self.dim)
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn perr(line: usize, msg: &str) -> ScorerError {
    ScorerError::Parse { line, msg: msg.into() }
}

fn parse_num(s: &str, line: usize) -> Result<f64, ScorerError> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| perr(line, &format!("bad number {s:?}")))
}

/// Reads either scorer file format; table files start with `table`.
pub fn load_scorer(text: &str) -> Result<Box<dyn AcousticScorer>, ScorerError> {
    let first = content_lines(text).next().map(|(_, l)| l).unwrap_or("");
    if first.starts_with("table") {
        Ok(Box::new(TableScorer::parse(text)?))
    } else {
        Ok(Box::new(DiagonalGaussianScorer::parse(text)?))
    }
}
