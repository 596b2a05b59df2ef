use faer::Mat;
use rayon::prelude::*;

use super::grid::{TimeGrid, TimeSeries};
use super::Observable;
use crate::error::{Error, Result};
use crate::hilbert::Operator;
use crate::liouville::{build_superoperator, devectorize, vectorize, Superoperator};
use crate::linalg;
use crate::models::LindbladModel;
use crate::tolerances::Tolerances;
use crate::C64;

#[derive(Clone, Debug)]
pub struct DenseOptions {
    pub tolerances: Tolerances,
    /// Run the trace/Hermiticity/positivity checks every this many steps
    /// (the first and last recorded states are always checked).
    pub check_stride: usize,
}

impl Default for DenseOptions {
    fn default() -> Self {
        DenseOptions { tolerances: Tolerances::from_env(), check_stride: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct DenseRun {
    pub series: TimeSeries,
    pub final_state: Operator,
    /// Worst values seen by the per-step checks.
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

pub type StateVisitor<'a> = dyn FnMut(usize, f64, &Operator) -> Result<()> + 'a;

/// `exp(L·dt)` restricted to each invariant block of `L`.
#[derive(Clone, Debug)]
pub struct BlockPropagator {
    blocks: Vec<(Vec<usize>, Mat<C64>)>,
    dim: usize,
}

impl BlockPropagator {
    pub fn new(sup: &Superoperator, dt: f64, cap: usize) -> Result<Self> {
        let blocks = sup.blocks();
        let largest = blocks.iter().map(Vec::len).max().unwrap_or(0);
        if largest > cap {
            return Err(Error::DenseCapExceeded { dim: largest, cap });
        }
        let blocks = blocks
            .into_par_iter()
            .map(|idx| {
                let m = sup.dense_block(&idx);
                let scaled = Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * dt);
                (idx, linalg::expm(&scaled))
            })
            .collect();
        Ok(BlockPropagator { blocks, dim: sup.dim() })
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::default(); self.dim];
        for (idx, e) in &self.blocks {
            let k = idx.len();
            for (r, &gr) in idx.iter().enumerate() {
                let mut acc = C64::default();
                for c in 0..k {
                    acc += e[(r, c)] * v[idx[c]];
                }
                out[gr] = acc;
            }
        }
        out
    }
}

fn check_state(rho: &Operator, tol: f64) -> Result<()> {
    if (rho.trace() - C64::new(1.0, 0.0)).norm() > tol.max(1e-10) {
        return Err(Error::NotAState(format!("trace is {}", rho.trace())));
    }
    if !rho.is_hermitian(1e-10) {
        return Err(Error::NotAState("initial state is not Hermitian".into()));
    }
    let min = linalg::hermitian_eigenvalues(&rho.to_dense_mat())?.into_iter().fold(f64::INFINITY, f64::min);
    if min < -1e-10 {
        return Err(Error::NotAState(format!("initial state has eigenvalue {min}")));
    }
    Ok(())
}

/// Coefficients `(k, w)` with `Tr(ρX) = Σ w·vec(ρ)[k]`.
pub(crate) fn trace_weights(x: &Operator) -> Vec<(usize, C64)> {
    let d = x.dim();
    x.triplets().into_iter().map(|(a, b, v)| (a * d + b, v)).collect()
}

/// Dense evolution with no state visitor.
pub fn evolve_dense(
    model: &LindbladModel,
    rho0: &Operator,
    grid: &TimeGrid,
    observables: &[Observable],
) -> Result<DenseRun> {
    evolve_dense_with(model, rho0, grid, observables, &DenseOptions::default(), None)
}

/// Propagates `vec ρ` with one block-wise `exp(L·dt)` applied repeatedly.
/// When given, `visit(k, t, ρ)` sees every recorded state.
pub fn evolve_dense_with(
    model: &LindbladModel,
    rho0: &Operator,
    grid: &TimeGrid,
    observables: &[Observable],
    opts: &DenseOptions,
    mut visit: Option<&mut StateVisitor<'_>>,
) -> Result<DenseRun> {
    grid.validate()?;
    let d = model.space().total_dim();
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rho0.dim() });
    }
    for o in observables {
        if o.op.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: o.op.dim() });
        }
    }
    check_state(rho0, opts.tolerances.trace_drift)?;
    let sup = build_superoperator(model);
    let prop = BlockPropagator::new(&sup, grid.dt(), opts.tolerances.dense_cap)?;
    let weights: Vec<_> = observables.iter().map(|o| trace_weights(&o.op)).collect();
    let stride = opts.check_stride.max(1);

    let mut values = vec![Vec::with_capacity(grid.len()); observables.len()];
    let mut v = vectorize(rho0);
    let mut run_stats = (0.0f64, 0.0f64, f64::INFINITY);
    let space = model.space().clone();
    for k in 0..grid.len() {
        if k > 0 {
            v = prop.apply(&v);
        }
        let t = grid.time(k);
        for (col, w) in values.iter_mut().zip(&weights) {
            let tr: C64 = w.iter().map(|(i, x)| v[*i] * x).sum();
            col.push(tr.re);
        }
        let check = k % stride == 0 || k + 1 == grid.len();
        if check || visit.is_some() {
            let rho = devectorize(&v, &space)?;
            if check {
                let tol = &opts.tolerances;
                let drift = (rho.trace() - C64::new(1.0, 0.0)).norm();
                if drift > tol.trace_drift {
                    return Err(Error::TraceDrift { t, deviation: drift });
                }
                let herm = (&rho - &rho.adjoint()).frobenius_norm();
                if herm > 1e-10 {
                    return Err(Error::Numerical(format!("state lost Hermiticity ({herm:.3e}) at t={t}")));
                }
                let sym = &(&rho + &rho.adjoint()) * 0.5;
                let min = linalg::hermitian_eigenvalues(&sym.to_dense_mat())?.into_iter().fold(f64::INFINITY, f64::min);
                if min < -tol.positivity {
                    return Err(Error::Positivity { t, min_eig: min });
                }
                run_stats = (run_stats.0.max(drift), run_stats.1.max(herm), run_stats.2.min(min));
            }
            if let Some(f) = visit.as_mut() {
                f(k, t, &rho)?;
            }
        }
    }
    let labels = observables.iter().map(|o| o.label.clone()).collect();
    let series = TimeSeries::new(*grid, labels, values, None)?;
    Ok(DenseRun {
        series,
        final_state: devectorize(&v, &space)?,
        max_trace_drift: run_stats.0,
        max_hermiticity_error: run_stats.1,
        min_eigenvalue: run_stats.2,
    })
}
