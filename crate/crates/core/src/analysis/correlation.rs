use serde::{Deserialize, Serialize};

use crate::dynamics::{TimeGrid, TimeSeries};
use crate::error::{Error, Result};

/// Rolling window of total width `width` centred on each grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub width: f64,
}

impl WindowSpec {
    /// Half-width in grid steps.
    fn half_steps(&self, grid: &TimeGrid) -> Result<usize> {
        let steps = self.width / grid.dt();
        if !(steps >= 2.0 - 1e-9) {
            return Err(Error::invalid(format!("window width {} is narrower than two grid steps", self.width)));
        }
        Ok((0.5 * steps + 1e-9).floor() as usize)
    }
}

fn trapz(xs: impl Iterator<Item = f64>, h: f64) -> f64 {
    let v: Vec<f64> = xs.collect();
    if v.len() < 2 {
        return 0.0;
    }
    h * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1]))
}

/// Time-resolved Pearson coefficient of `f` and `g` over centred windows,
/// truncated symmetrically at the series ends. Windows on which either
/// signal has no variance give NaN.
pub fn pearson(f: &[f64], g: &[f64], grid: &TimeGrid, window: WindowSpec) -> Result<TimeSeries> {
    let n = grid.len();
    if f.len() != n || g.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: if f.len() != n { f.len() } else { g.len() } });
    }
    let m = window.half_steps(grid)?;
    if 2 * m >= n {
        return Err(Error::invalid("window does not fit within the series"));
    }
    let dt = grid.dt();
    let out = (0..n)
        .map(|k| {
            let h = m.min(k).min(n - 1 - k);
            if h == 0 {
                return f64::NAN;
            }
            let r = k - h..=k + h;
            let len = 2.0 * h as f64 * dt;
            let fm = trapz(f[r.clone()].iter().copied(), dt) / len;
            let gm = trapz(g[r.clone()].iter().copied(), dt) / len;
            let cov = trapz(r.clone().map(|i| (f[i] - fm) * (g[i] - gm)), dt);
            let vf = trapz(r.clone().map(|i| (f[i] - fm).powi(2)), dt);
            let vg = trapz(r.clone().map(|i| (g[i] - gm).powi(2)), dt);
            let sf = trapz(r.clone().map(|i| f[i] * f[i]), dt);
            let sg = trapz(r.map(|i| g[i] * g[i]), dt);
            if vf <= 1e-24 * sf.max(f64::MIN_POSITIVE) || vg <= 1e-24 * sg.max(f64::MIN_POSITIVE) {
                return f64::NAN;
            }
            (cov / (vf * vg).sqrt()).clamp(-1.0, 1.0)
        })
        .collect();
    TimeSeries::new(*grid, vec!["pearson".into()], vec![out], None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> TimeGrid {
        TimeGrid::new(0.0, 20.0, 2000).unwrap()
    }

    #[test]
    fn self_and_anti_correlation() {
        let g = grid();
        let f: Vec<f64> = g.times().iter().map(|t| (1.3 * t).sin() + 0.1 * t).collect();
        let neg: Vec<f64> = f.iter().map(|x| -x).collect();
        let w = WindowSpec { width: 3.0 };
        let same = pearson(&f, &f, &g, w).unwrap();
        let anti = pearson(&f, &neg, &g, w).unwrap();
        for (a, b) in same.values[0].iter().zip(&anti.values[0]).skip(1).take(g.len() - 2) {
            assert!((a - 1.0).abs() < 1e-12);
            assert!((b + 1.0).abs() < 1e-12);
        }
        assert!(same.values[0][0].is_nan());
    }

    #[test]
    fn sine_cosine_full_period() {
        let g = TimeGrid::new(0.0, 10.0 * std::f64::consts::PI, 10000).unwrap();
        let f: Vec<f64> = g.times().iter().map(|t| t.sin()).collect();
        let c: Vec<f64> = g.times().iter().map(|t| t.cos()).collect();
        let p = pearson(&f, &c, &g, WindowSpec { width: 2.0 * std::f64::consts::PI }).unwrap();
        let mid = g.len() / 2;
        assert!(p.values[0][mid].abs() < 1e-6, "{}", p.values[0][mid]);
    }

    #[test]
    fn constant_signal_is_undefined() {
        let g = grid();
        let f = vec![2.0; g.len()];
        let s: Vec<f64> = g.times().iter().map(|t| t.sin()).collect();
        let p = pearson(&f, &s, &g, WindowSpec { width: 2.0 }).unwrap();
        assert!(p.values[0].iter().all(|x| x.is_nan()));
    }

    #[test]
    fn narrow_window_rejected() {
        let g = grid();
        let f = vec![0.0; g.len()];
        assert!(pearson(&f, &f, &g, WindowSpec { width: 0.01 }).is_err());
    }

    proptest! {
        #[test]
        fn bounded_symmetric_affine(
            a in proptest::collection::vec(-5.0f64..5.0, 40),
            b in proptest::collection::vec(-5.0f64..5.0, 40),
            scale in 0.1f64..10.0,
            shift in -3.0f64..3.0,
        ) {
            let g = TimeGrid::new(0.0, 3.9, 39).unwrap();
            let w = WindowSpec { width: 1.0 };
            let p = pearson(&a, &b, &g, w).unwrap();
            let q = pearson(&b, &a, &g, w).unwrap();
            let af: Vec<f64> = a.iter().map(|x| scale * x + shift).collect();
            let r = pearson(&af, &b, &g, w).unwrap();
            for k in 0..g.len() {
                let (x, y, z) = (p.values[0][k], q.values[0][k], r.values[0][k]);
                if x.is_nan() { continue; }
                prop_assert!((-1.0..=1.0).contains(&x));
                prop_assert!((x - y).abs() < 1e-12);
                prop_assert!((x - z).abs() < 1e-9);
            }
        }
    }
}
