use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid of `n_steps + 1` points from `t_start` to `t_end`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_steps: usize) -> Result<Self> {
        let g = TimeGrid { t_start, t_end, n_steps };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::invalid("time grid needs at least one step"));
        }
        if !(self.t_end > self.t_start) || !self.t_start.is_finite() || !self.t_end.is_finite() {
            return Err(Error::invalid("time grid must be finite and strictly increasing"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.n_steps as f64
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.dt()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }
}

/// Observable traces on a grid; `stderr` is present only for stochastic runs.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub grid: TimeGrid,
    pub labels: Vec<String>,
    /// One column per label, each of length `grid.len()`.
    pub values: Vec<Vec<f64>>,
    pub stderr: Option<Vec<Vec<f64>>>,
}

impl TimeSeries {
    pub fn new(grid: TimeGrid, labels: Vec<String>, values: Vec<Vec<f64>>, stderr: Option<Vec<Vec<f64>>>) -> Result<Self> {
        if values.len() != labels.len() || values.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::invalid("time-series columns do not match labels and grid"));
        }
        if let Some(se) = &stderr {
            if se.len() != labels.len() || se.iter().any(|c| c.len() != grid.len()) {
                return Err(Error::invalid("stderr columns do not match values"));
            }
        }
        Ok(TimeSeries { grid, labels, values, stderr })
    }

    pub fn column(&self, label: &str) -> Option<&[f64]> {
        self.labels.iter().position(|l| l == label).map(|i| self.values[i].as_slice())
    }

    pub fn stderr_column(&self, label: &str) -> Option<&[f64]> {
        let i = self.labels.iter().position(|l| l == label)?;
        self.stderr.as_ref().map(|s| s[i].as_slice())
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    /// `t,<label>[,<label>_stderr],...`; NaN is written as `NaN`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = vec!["t".to_string()];
        for l in &self.labels {
            header.push(l.clone());
            if self.stderr.is_some() {
                header.push(format!("{l}_stderr"));
            }
        }
        writeln!(w, "{}", header.join(","))?;
        for k in 0..self.grid.len() {
            let mut row = vec![fmt_num(self.grid.time(k))];
            for (i, col) in self.values.iter().enumerate() {
                row.push(fmt_num(col[k]));
                if let Some(se) = &self.stderr {
                    row.push(fmt_num(se[i][k]));
                }
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

pub(crate) fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.12e}")
    }
}
