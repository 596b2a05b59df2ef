use serde::Serialize;

use super::spectrum::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::hilbert::Operator;
use crate::C64;

#[derive(Clone, Debug)]
pub struct AsymptoticTerm {
    /// `C_i = Tr(σ_i† ρ₀)`.
    pub coefficient: C64,
    /// Oscillation frequency `Im λ_i`; the term evolves as `e^{i·frequency·t}`.
    pub frequency: f64,
    pub mode: Operator,
}

/// Long-time state `ρ_∞(t) = Σ_i C_i e^{i ω_i t} ρ_i` over the zero and
/// imaginary modes.
#[derive(Clone, Debug)]
pub struct AsymptoticDecomposition {
    pub terms: Vec<AsymptoticTerm>,
    /// `‖ρ_∞(0)‖_F / ‖ρ₀‖_F`. Values far from what the physics suggests
    /// signal a kernel that does not span the long-time dynamics.
    pub captured_weight: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObservablePrediction {
    pub constant: f64,
    /// `(frequency, complex amplitude)` with `⟨X⟩(t) = constant + Σ Re(a e^{iωt})`
    /// summed over both signs of each frequency.
    pub components: Vec<(f64, (f64, f64))>,
}

impl AsymptoticDecomposition {
    pub fn state_at(&self, t: f64) -> Operator {
        let space = self.terms[0].mode.space().clone();
        self.terms.iter().fold(Operator::zeros(&space), |acc, term| {
            let phase = C64::from_polar(1.0, term.frequency * t);
            &acc + &term.mode.scale(term.coefficient * phase)
        })
    }

    /// `Tr(X ρ_∞(t))` for each time.
    pub fn expectation_series(&self, x: &Operator, times: &[f64]) -> Vec<C64> {
        let traces: Vec<C64> = self.terms.iter().map(|term| term.coefficient * x.adjoint().inner(&term.mode)).collect();
        times
            .iter()
            .map(|&t| {
                self.terms.iter().zip(&traces).map(|(term, tr)| tr * C64::from_polar(1.0, term.frequency * t)).sum()
            })
            .collect()
    }

    /// Group the prediction for `X` by frequency.
    pub fn predict(&self, x: &Operator, freq_tol: f64) -> ObservablePrediction {
        let mut constant = 0.0;
        let mut comps: Vec<(f64, C64)> = Vec::new();
        for term in &self.terms {
            let a = term.coefficient * x.adjoint().inner(&term.mode);
            if term.frequency.abs() < freq_tol {
                constant += a.re;
                continue;
            }
            match comps.iter_mut().find(|(w, _)| (w - term.frequency).abs() < freq_tol) {
                Some((_, acc)) => *acc += a,
                None => comps.push((term.frequency, a)),
            }
        }
        comps.sort_by(|a, b| a.0.total_cmp(&b.0));
        ObservablePrediction { constant, components: comps.into_iter().map(|(w, a)| (w, (a.re, a.im))).collect() }
    }
}

pub fn asymptotic_projection(rho0: &Operator, spec: &SpectralDecomposition) -> Result<AsymptoticDecomposition> {
    let left = spec.left_modes.as_ref().ok_or(Error::MissingLeftModes)?;
    let idx = spec.asymptotic_indices();
    if idx.is_empty() {
        return Err(Error::Numerical("spectrum has no zero or imaginary modes".into()));
    }
    if rho0.dim() != spec.right_modes[idx[0]].dim() {
        return Err(Error::DimensionMismatch { expected: spec.right_modes[idx[0]].dim(), found: rho0.dim() });
    }
    let terms: Vec<AsymptoticTerm> = idx
        .iter()
        .map(|&i| AsymptoticTerm {
            coefficient: left[i].inner(rho0),
            frequency: spec.eigenvalues[i].im,
            mode: spec.right_modes[i].clone(),
        })
        .collect();
    let mut out = AsymptoticDecomposition { terms, captured_weight: 0.0 };
    out.captured_weight = out.state_at(0.0).frobenius_norm() / rho0.frobenius_norm();
    Ok(out)
}
