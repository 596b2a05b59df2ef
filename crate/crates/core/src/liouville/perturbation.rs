use rayon::prelude::*;
use serde::Serialize;

use super::spectrum::{eigenvalues, spectrum_with, ModeClass};
use super::superop::build_superoperator;
use crate::analysis::fit_power_law;
use crate::error::{Error, Result};
use crate::hilbert::{commutator, Operator};
use crate::models::{build_spin1_chain, DetuningProfile, SpinChainParams};
use crate::tolerances::Tolerances;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FirstOrderShift {
    pub lambda1: (f64, f64),
    /// `false` when `δ̄ = 0` and the unscaled `−i[Σ δ_j f_j, ·]` form was used.
    pub scaled: bool,
}

impl FirstOrderShift {
    pub fn value(&self) -> C64 {
        C64::new(self.lambda1.0, self.lambda1.1)
    }
}

/// `λ⁽¹⁾ = Tr(ρ† L⁽¹⁾(ρ))` with `L⁽¹⁾ = −i[Σ_j (δ_j/δ̄) f_j, ·]`.
pub fn first_order_shift(mode: &Operator, profile: &DetuningProfile) -> Result<FirstOrderShift> {
    let norm = mode.frobenius_norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::invalid(format!("mode must have unit Frobenius norm, got {norm}")));
    }
    let v = profile.perturbation();
    if v.dim() != mode.dim() {
        return Err(Error::DimensionMismatch { expected: v.dim(), found: mode.dim() });
    }
    let scaled = profile.mean_detuning > 0.0;
    let v = if scaled { &v * (1.0 / profile.mean_detuning) } else { v };
    let l1 = commutator(&v, mode).scale(C64::new(0.0, -1.0));
    let value = mode.inner(&l1);
    Ok(FirstOrderShift { lambda1: (value.re, value.im), scaled })
}

/// Linear field profile `ω̄ + δ·(−1 … +1)` across the chain.
pub fn detuned_omegas(n: usize, mean: f64, delta: f64) -> Vec<f64> {
    if n == 1 {
        return vec![mean];
    }
    (0..n).map(|j| mean + delta * (2.0 * j as f64 / (n - 1) as f64 - 1.0)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftRow {
    pub delta: f64,
    pub mode_id: usize,
    pub lambda: (f64, f64),
    pub displacement: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModeTrack {
    pub mode_id: usize,
    /// Unperturbed imaginary eigenvalue.
    pub lambda0: (f64, f64),
    /// Log–log slope of displacement versus δ; `None` when the mode does
    /// not move measurably.
    pub exponent: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftScan {
    pub rows: Vec<ShiftRow>,
    pub modes: Vec<ModeTrack>,
}

/// Displacements below this are treated as "did not move" for fitting.
const DISPLACEMENT_FLOOR: f64 = 1e-10;
const MAX_REFINE_DEPTH: u32 = 6;

/// Track every imaginary eigenvalue of `base` (homogeneous at the mean
/// field) as the fields are detuned to `ω̄ + δ·(−1…+1)`.
pub fn shift_scan(base: &SpinChainParams, deltas: &[f64]) -> Result<ShiftScan> {
    shift_scan_with(base, deltas, &Tolerances::from_env())
}

pub fn shift_scan_with(base: &SpinChainParams, deltas: &[f64], tol: &Tolerances) -> Result<ShiftScan> {
    base.validate()?;
    let n = base.n_sites;
    let mean = base.omegas.iter().sum::<f64>() / n as f64;
    let params_at = |delta: f64| SpinChainParams { omegas: detuned_omegas(n, mean, delta), ..base.clone() };
    let eigs_at = |delta: f64| -> Result<Vec<C64>> {
        let model = build_spin1_chain(&params_at(delta))?;
        eigenvalues(&build_superoperator(&model), tol)
    };

    let sup0 = build_superoperator(&build_spin1_chain(&params_at(0.0))?);
    let spec0 = spectrum_with(&sup0, tol)?.without_left_modes();
    let tracked: Vec<C64> = spec0.indices_of(ModeClass::Imaginary).iter().map(|&i| spec0.eigenvalues[i]).collect();
    // matching radius: half the distance to the nearest other eigenvalue
    let radii: Vec<f64> = tracked
        .iter()
        .map(|l0| {
            let nearest = spec0
                .eigenvalues
                .iter()
                .map(|l| (l - l0).norm())
                .filter(|&d| d > spec0.tol_zero)
                .fold(f64::INFINITY, f64::min);
            0.5 * nearest
        })
        .collect();

    let mut order: Vec<usize> = (0..deltas.len()).collect();
    order.sort_by(|&a, &b| deltas[a].abs().total_cmp(&deltas[b].abs()));
    let spectra: Vec<Result<Vec<C64>>> = deltas.par_iter().map(|&d| eigs_at(d)).collect();
    let mut spectra: Vec<Vec<C64>> = spectra.into_iter().collect::<Result<_>>()?;

    // continuation from δ = 0 in order of increasing |δ|, separately per sign
    let mut found: Vec<Vec<C64>> = vec![Vec::new(); deltas.len()];
    for sign in [1.0, -1.0] {
        let mut current = tracked.clone();
        let mut prev_delta = 0.0;
        for &k in &order {
            let d = deltas[k];
            if d == 0.0 || d.signum() != sign {
                continue;
            }
            let eigs = std::mem::take(&mut spectra[k]);
            current = track_step(&current, &radii, prev_delta, d, eigs, &eigs_at, 0)?;
            found[k] = current.clone();
            prev_delta = d;
        }
    }

    let mut rows = Vec::new();
    for (k, &d) in deltas.iter().enumerate() {
        let lambdas = if d == 0.0 { tracked.clone() } else { found[k].clone() };
        for (id, (l, l0)) in lambdas.iter().zip(&tracked).enumerate() {
            let displacement = if d == 0.0 { 0.0 } else { (l - l0).norm() };
            rows.push(ShiftRow { delta: d, mode_id: id, lambda: (l.re, l.im), displacement });
        }
    }
    let modes = tracked
        .iter()
        .enumerate()
        .map(|(id, l0)| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.mode_id == id && r.delta != 0.0 && r.displacement > DISPLACEMENT_FLOOR)
                .map(|r| (r.delta.abs(), r.displacement))
                .unzip();
            let exponent = if xs.len() >= 2 { fit_power_law(&xs, &ys).ok().map(|f| f.exponent) } else { None };
            ModeTrack { mode_id: id, lambda0: (l0.re, l0.im), exponent }
        })
        .collect();
    Ok(ShiftScan { rows, modes })
}

fn track_step(
    current: &[C64],
    radii: &[f64],
    from: f64,
    to: f64,
    eigs: Vec<C64>,
    eigs_at: &(dyn Fn(f64) -> Result<Vec<C64>> + Sync),
    depth: u32,
) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(current.len());
    for (id, (&l, &r)) in current.iter().zip(radii).enumerate() {
        let candidates: Vec<C64> = eigs.iter().copied().filter(|e| (e - l).norm() < r).collect();
        if candidates.len() == 1 {
            out.push(candidates[0]);
            continue;
        }
        if depth >= MAX_REFINE_DEPTH {
            return Err(Error::TrackingAmbiguity { mode: id, delta: to });
        }
        // ambiguous or lost: halve the step and retry from the midpoint
        let mid = 0.5 * (from + to);
        let mid_state = track_step(current, radii, from, mid, eigs_at(mid)?, eigs_at, depth + 1)?;
        return track_step(&mid_state, radii, mid, to, eigs, eigs_at, depth + 1);
    }
    Ok(out)
}
