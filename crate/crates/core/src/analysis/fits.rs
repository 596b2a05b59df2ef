use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExponentialFit {
    /// `y ≈ amplitude · e^{−rate·x}`.
    pub amplitude: f64,
    pub rate: f64,
    /// RMS residual in log space.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GaussianFit {
    /// `y ≈ amplitude · exp(−x² / 2 width²)`.
    pub amplitude: f64,
    pub width: f64,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PowerLawFit {
    /// `y ≈ prefactor · x^exponent`.
    pub prefactor: f64,
    pub exponent: f64,
    pub residual: f64,
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, rms residual)`.
fn line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, have: xs.len() });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("abscissae are all equal"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    Ok((a, b, (rss / n).sqrt()))
}

fn logs(ys: &[f64]) -> Result<Vec<f64>> {
    if ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::NonPositiveData);
    }
    Ok(ys.iter().map(|y| y.ln()).collect())
}

/// Linear least squares on `ln y` against `x`.
pub fn fit_exponential(xs: &[f64], ys: &[f64]) -> Result<ExponentialFit> {
    let (a, b, residual) = line(xs, &logs(ys)?)?;
    Ok(ExponentialFit { amplitude: a.exp(), rate: -b, residual })
}

/// Linear least squares on `ln y` against `x²`.
pub fn fit_gaussian(xs: &[f64], ys: &[f64]) -> Result<GaussianFit> {
    let x2: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let (a, b, residual) = line(&x2, &logs(ys)?)?;
    if !(b < 0.0) {
        return Err(Error::Numerical("data do not decay away from the origin".into()));
    }
    Ok(GaussianFit { amplitude: a.exp(), width: (-0.5 / b).sqrt(), residual })
}

/// Linear least squares on `ln y` against `ln x`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    let (a, b, residual) = line(&logs(xs)?, &logs(ys)?)?;
    Ok(PowerLawFit { prefactor: a.exp(), exponent: b, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 2.0).collect();
        let ys: Vec<f64> = xs.iter().map(|t| 0.3 * (-0.04 * t).exp()).collect();
        let f = fit_exponential(&xs, &ys).unwrap();
        assert!((f.rate - 0.04).abs() < 1e-6);
        assert!((f.amplitude - 0.3).abs() < 1e-9);
    }

    #[test]
    fn exact_gaussian() {
        let xs: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.01).collect();
        let ys: Vec<f64> = xs.iter().map(|d| (-d * d / (2.0 * 0.05f64.powi(2))).exp()).collect();
        let f = fit_gaussian(&xs, &ys).unwrap();
        assert!((f.width - 0.05).abs() < 0.05 * 0.01);
    }

    #[test]
    fn exact_power_law() {
        let xs = [0.02, 0.04, 0.06, 0.08, 0.1];
        let ys: Vec<f64> = xs.iter().map(|d| 3.0 * d * d).collect();
        let f = fit_power_law(&xs, &ys).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(matches!(fit_exponential(&[0.0, 1.0], &[1.0, 0.0]), Err(Error::NonPositiveData)));
        assert!(matches!(fit_power_law(&[1.0], &[1.0]), Err(Error::TooFewSamples { .. })));
    }
}
