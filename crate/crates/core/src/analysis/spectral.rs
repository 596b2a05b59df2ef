use std::collections::BTreeMap;

use rustfft::FftPlanner;
use serde::Serialize;

use crate::dynamics::TimeGrid;
use crate::error::{Error, Result};
use crate::C64;

const MIN_TAIL: usize = 64;

#[derive(Clone, Debug, Serialize)]
pub struct FourierSpectrum {
    /// Angular frequencies `2πk / (n·dt)`.
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl FourierSpectrum {
    /// Frequency of the largest amplitude.
    pub fn peak(&self) -> f64 {
        let k = (0..self.amplitudes.len()).max_by(|&a, &b| self.amplitudes[a].total_cmp(&self.amplitudes[b])).unwrap_or(0);
        self.frequencies[k]
    }

    /// Local maxima above `rel` times the global maximum, strongest first.
    pub fn peaks(&self, rel: f64) -> Vec<f64> {
        let a = &self.amplitudes;
        let top = a.iter().copied().fold(0.0, f64::max);
        let mut idx: Vec<usize> = (1..a.len().saturating_sub(1))
            .filter(|&k| a[k] >= a[k - 1] && a[k] > a[k + 1] && a[k] >= rel * top)
            .collect();
        idx.sort_by(|&x, &y| a[y].total_cmp(&a[x]));
        idx.into_iter().map(|k| self.frequencies[k]).collect()
    }
}

/// Amplitude spectrum of the mean-subtracted, Hann-windowed samples with
/// `t ≥ t_min` (the second half of the series when `t_min` is `None`).
pub fn fourier_amplitude(values: &[f64], grid: &TimeGrid, t_min: Option<f64>) -> Result<FourierSpectrum> {
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
    }
    let start = match t_min {
        None => grid.len() / 2,
        Some(t) => {
            if t < grid.t_start || t > grid.t_end {
                return Err(Error::invalid(format!("t_min = {t} lies outside the grid")));
            }
            ((t - grid.t_start) / grid.dt() - 1e-9).ceil().max(0.0) as usize
        }
    };
    let tail = &values[start..];
    let n = tail.len();
    if n < MIN_TAIL {
        return Err(Error::TooFewSamples { needed: MIN_TAIL, have: n });
    }
    let mean = tail.iter().sum::<f64>() / n as f64;
    let window: Vec<f64> = (0..n).map(|k| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos())).collect();
    let wsum: f64 = window.iter().sum();
    let mut buf: Vec<C64> = tail.iter().zip(&window).map(|(x, w)| C64::new((x - mean) * w, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2 + 1;
    let scale = 2.0 * std::f64::consts::PI / (n as f64 * grid.dt());
    Ok(FourierSpectrum {
        frequencies: (0..half).map(|k| k as f64 * scale).collect(),
        amplitudes: buf[..half].iter().map(|z| 2.0 * z.norm() / wsum).collect(),
    })
}

/// Times of local extrema, refined by a parabola through the three
/// neighbouring samples.
pub fn turning_points(values: &[f64], grid: &TimeGrid) -> Vec<f64> {
    let mut out = Vec::new();
    let mut last_sign = 0.0;
    let mut last_k = 0;
    for k in 0..values.len().saturating_sub(1) {
        let d = values[k + 1] - values[k];
        if d == 0.0 {
            continue;
        }
        let s = d.signum();
        if last_sign != 0.0 && s != last_sign {
            // extremum between the last move and this one; take the middle of any plateau
            let e = (last_k + 1 + k) / 2;
            let (y0, y1, y2) = (values[e - 1], values[e], values[e + 1]);
            let curv = y0 - 2.0 * y1 + y2;
            let off = if curv != 0.0 { (0.5 * (y0 - y2) / curv).clamp(-0.5, 0.5) } else { 0.0 };
            out.push(grid.time(e) + off * grid.dt());
        }
        last_sign = s;
        last_k = k;
    }
    out
}

/// Histogram of `π/Δt` over successive turning points, one row per series.
#[derive(Clone, Debug, Serialize)]
pub struct PrevalenceHistogram {
    pub edges: Vec<f64>,
    pub counts: BTreeMap<String, Vec<usize>>,
    /// Intervals whose frequency fell outside `edges`.
    pub outside: BTreeMap<String, usize>,
}

impl PrevalenceHistogram {
    pub fn n_bins(&self) -> usize {
        self.edges.len() - 1
    }

    /// Bin containing `x` (the last bin includes its upper edge).
    pub fn bin_of(&self, x: f64) -> Option<usize> {
        let (lo, hi) = (self.edges[0], self.edges[self.n_bins()]);
        if !(x >= lo && x <= hi) {
            return None;
        }
        let w = (hi - lo) / self.n_bins() as f64;
        Some((((x - lo) / w) as usize).min(self.n_bins() - 1))
    }

    pub fn peak_bin(&self, label: &str) -> Option<usize> {
        let c = self.counts.get(label)?;
        (0..c.len()).max_by(|&a, &b| c[a].cmp(&c[b]).then(b.cmp(&a)))
    }
}

/// Turning points up to `t_max` in each series, histogrammed into `bins`
/// equal bins over `range` (or over the observed frequencies).
pub fn turning_point_prevalence(
    series: &[(&str, &[f64])],
    grid: &TimeGrid,
    t_max: f64,
    bins: usize,
    range: Option<(f64, f64)>,
) -> Result<PrevalenceHistogram> {
    if bins == 0 {
        return Err(Error::invalid("histogram needs at least one bin"));
    }
    let mut freqs: Vec<(String, Vec<f64>)> = Vec::new();
    for (label, values) in series {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        let tp: Vec<f64> = turning_points(values, grid).into_iter().filter(|&t| t <= t_max).collect();
        if tp.len() < 2 {
            return Err(Error::TooFewTurningPoints(label.to_string()));
        }
        freqs.push((label.to_string(), tp.windows(2).map(|w| std::f64::consts::PI / (w[1] - w[0])).collect()));
    }
    let (lo, hi) = match range {
        Some((lo, hi)) if hi > lo => (lo, hi),
        Some(_) => return Err(Error::invalid("histogram range must be increasing")),
        None => {
            let all = freqs.iter().flat_map(|f| f.1.iter().copied());
            let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
            if hi > lo {
                (lo, hi)
            } else {
                (lo * 0.5, lo * 1.5 + f64::EPSILON)
            }
        }
    };
    let edges: Vec<f64> = (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect();
    let mut hist = PrevalenceHistogram { edges, counts: BTreeMap::new(), outside: BTreeMap::new() };
    for (label, fs) in freqs {
        let mut counts = vec![0; bins];
        let mut outside = 0;
        for f in fs {
            match hist.bin_of(f) {
                Some(b) => counts[b] += 1,
                None => outside += 1,
            }
        }
        hist.counts.insert(label.clone(), counts);
        hist.outside.insert(label, outside);
    }
    Ok(hist)
}
