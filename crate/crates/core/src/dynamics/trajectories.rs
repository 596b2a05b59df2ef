use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{TimeGrid, TimeSeries};
use super::Observable;
use crate::error::{Error, Result};
use crate::hilbert::{Operator, StateVector};
use crate::models::LindbladModel;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub n_traj: usize,
    pub seed: u64,
    /// Jump times are located to this fraction of the grid step.
    #[serde(default = "default_bisection_tol")]
    pub jump_bisection_tol: f64,
    /// Trajectories per work unit. Results do not depend on the thread count.
    #[serde(default = "default_chunk")]
    pub chunk_size: usize,
}

fn default_chunk() -> usize {
    8
}

fn default_bisection_tol() -> f64 {
    1e-10
}

impl TrajectoryConfig {
    pub fn new(n_traj: usize, seed: u64) -> Self {
        TrajectoryConfig { n_traj, seed, jump_bisection_tol: default_bisection_tol(), chunk_size: default_chunk() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_traj == 0 {
            return Err(Error::invalid("n_traj must be at least 1"));
        }
        if !(self.jump_bisection_tol > 0.0 && self.jump_bisection_tol < 1.0) {
            return Err(Error::invalid("jump_bisection_tol must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// One unravelling of the master equation.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// `values[o][k]`: observable `o` at grid point `k`.
    pub values: Vec<Vec<f64>>,
    pub jump_times: Vec<f64>,
    pub jump_channels: Vec<usize>,
    pub final_state: StateVector,
}

/// Non-Hermitian generator `A = −i H_eff` with `H_eff = H − (i/2) Σ γ L†L`
/// and the rate-weighted jump operators.
struct Unravelling {
    generator: Operator,
    norm1: f64,
    jumps: Vec<(Operator, f64)>,
}

impl Unravelling {
    fn new(model: &LindbladModel) -> Self {
        let space = model.space();
        let mut heff = model.hamiltonian().clone().into_sparse();
        let mut jumps = Vec::new();
        for (l, g) in model.jumps() {
            if *g == 0.0 {
                continue;
            }
            let ldl = l.adjoint().matmul(l);
            heff = &heff - &ldl.scale(C64::new(0.0, 0.5 * g));
            jumps.push((l.clone().into_sparse(), *g));
        }
        let generator = heff.scale(C64::new(0.0, -1.0)).into_sparse();
        let mut cols = vec![0.0; space.total_dim()];
        for (_, c, v) in generator.triplets() {
            cols[c] += v.norm();
        }
        let norm1 = cols.into_iter().fold(0.0, f64::max);
        Unravelling { generator, norm1, jumps }
    }

    /// `exp(A·t) ψ` by truncated Taylor series over substeps with `‖A‖₁ h ≤ 0.5`.
    fn expmv(&self, t: f64, psi: &[C64]) -> Vec<C64> {
        let n_sub = ((self.norm1 * t.abs()) / 0.5).ceil().max(1.0) as usize;
        let h = t / n_sub as f64;
        let mut y = psi.to_vec();
        let mut term = vec![C64::default(); y.len()];
        let mut next = vec![C64::default(); y.len()];
        for _ in 0..n_sub {
            term.copy_from_slice(&y);
            for k in 1..=40 {
                self.generator.apply_into(&term, &mut next);
                let f = h / k as f64;
                let mut size = 0.0;
                for (tk, nk) in term.iter_mut().zip(&next) {
                    *tk = nk * f;
                    size += tk.norm_sqr();
                }
                for (yi, ti) in y.iter_mut().zip(&term) {
                    *yi += ti;
                }
                let ynorm = sq_norm(&y);
                if size <= 1e-32 * ynorm {
                    break;
                }
            }
        }
        y
    }

    fn jump(&self, psi: &[C64], rng: &mut ChaCha8Rng) -> Option<(usize, Vec<C64>)> {
        let candidates: Vec<(Vec<C64>, f64)> = self
            .jumps
            .iter()
            .map(|(l, g)| {
                let v = l.apply(psi);
                let w = g * sq_norm(&v);
                (v, w)
            })
            .collect();
        let total: f64 = candidates.iter().map(|c| c.1).sum();
        if !(total > 0.0) {
            return None;
        }
        let mut x = rng.gen::<f64>() * total;
        let last = candidates.iter().rposition(|c| c.1 > 0.0)?;
        for (k, (v, w)) in candidates.into_iter().enumerate() {
            if x < w || k == last {
                let n = sq_norm(&v).sqrt();
                return Some((k, v.into_iter().map(|z| z / n).collect()));
            }
            x -= w;
        }
        None
    }
}

fn sq_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn expectation(x: &Operator, psi: &[C64], n2: f64) -> f64 {
    let xpsi = x.apply(psi);
    let v: C64 = psi.iter().zip(&xpsi).map(|(a, b)| a.conj() * b).sum();
    v.re / n2
}

fn simulate(
    u: &Unravelling,
    psi0: &StateVector,
    grid: &TimeGrid,
    observables: &[Observable],
    bisection_tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Trajectory> {
    let mut psi = psi0.amplitudes().to_vec();
    let mut values = vec![Vec::with_capacity(grid.len()); observables.len()];
    let mut jump_times = Vec::new();
    let mut jump_channels = Vec::new();
    let mut r: f64 = rng.gen();
    let dt = grid.dt();

    let record = |psi: &[C64], values: &mut Vec<Vec<f64>>| {
        let n2 = sq_norm(psi);
        for (col, o) in values.iter_mut().zip(observables) {
            col.push(expectation(&o.op, psi, n2));
        }
    };
    record(&psi, &mut values);
    for k in 1..grid.len() {
        let mut t = grid.time(k - 1);
        let mut remaining = dt;
        loop {
            let next = u.expmv(remaining, &psi);
            let n2 = sq_norm(&next);
            if n2 < 1e-300 {
                return Err(Error::NormUnderflow { t });
            }
            if n2 > r || u.jumps.is_empty() {
                psi = next;
                break;
            }
            // jump inside (0, remaining]: bisect on ‖ψ(τ)‖² = r
            let (mut lo, mut hi) = (0.0, remaining);
            while hi - lo > bisection_tol * dt {
                let mid = 0.5 * (lo + hi);
                if sq_norm(&u.expmv(mid, &psi)) > r {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let at = u.expmv(hi, &psi);
            let (channel, after) = match u.jump(&at, rng) {
                Some(j) => j,
                None => return Err(Error::Numerical(format!("no jump channel available at t={}", t + hi))),
            };
            t += hi;
            remaining -= hi;
            jump_times.push(t);
            jump_channels.push(channel);
            psi = after;
            r = rng.gen();
            if remaining <= 0.0 {
                break;
            }
        }
        record(&psi, &mut values);
    }
    let final_state = StateVector::new(psi0.space(), psi)?;
    Ok(Trajectory { values, jump_times, jump_channels, final_state })
}

fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn check_inputs(model: &LindbladModel, psi0: &StateVector, observables: &[Observable]) -> Result<()> {
    let d = model.space().total_dim();
    if psi0.amplitudes().len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: psi0.amplitudes().len() });
    }
    for o in observables {
        if o.op.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: o.op.dim() });
        }
    }
    Ok(())
}

/// Trajectory number `index` of the ensemble seeded with `seed`.
pub fn run_trajectory(
    model: &LindbladModel,
    psi0: &StateVector,
    grid: &TimeGrid,
    observables: &[Observable],
    seed: u64,
    index: u64,
) -> Result<Trajectory> {
    grid.validate()?;
    check_inputs(model, psi0, observables)?;
    let tol = default_bisection_tol();
    simulate(&Unravelling::new(model), psi0, grid, observables, tol, &mut rng_for(seed, index))
}

/// Streaming mean and second central moment.
#[derive(Clone, Debug)]
struct Moments {
    n: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Moments { n: 0.0, mean: vec![0.0; len], m2: vec![0.0; len] }
    }

    fn push(&mut self, xs: impl Iterator<Item = f64>) {
        self.n += 1.0;
        for ((m, s), x) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(xs) {
            let delta = x - *m;
            *m += delta / self.n;
            *s += delta * (x - *m);
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0.0 {
            return;
        }
        let n = self.n + other.n;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * other.n / n;
            self.m2[i] += other.m2[i] + delta * delta * self.n * other.n / n;
        }
        self.n = n;
    }
}

/// Ensemble average over `config.n_traj` quantum-jump trajectories,
/// with standard errors `s/√n`.
pub fn evolve_trajectories(
    model: &LindbladModel,
    psi0: &StateVector,
    grid: &TimeGrid,
    observables: &[Observable],
    config: &TrajectoryConfig,
) -> Result<TimeSeries> {
    grid.validate()?;
    check_inputs(model, psi0, observables)?;
    config.validate()?;
    let u = Unravelling::new(model);
    let n_t = grid.len();
    let width = observables.len() * n_t;
    let chunk = config.chunk_size.max(1);
    let starts: Vec<usize> = (0..config.n_traj).step_by(chunk).collect();
    let partials: Vec<Result<Moments>> = starts
        .par_iter()
        .map(|&start| {
            let mut acc = Moments::new(width);
            for index in start..(start + chunk).min(config.n_traj) {
                let mut rng = rng_for(config.seed, index as u64);
                let traj = simulate(&u, psi0, grid, observables, config.jump_bisection_tol, &mut rng)?;
                acc.push(traj.values.iter().flatten().copied());
            }
            Ok(acc)
        })
        .collect();
    let mut total = Moments::new(width);
    for p in partials {
        total.merge(&p?);
    }
    let n = total.n;
    let split = |v: &[f64]| -> Vec<Vec<f64>> { v.chunks(n_t).map(<[f64]>::to_vec).collect() };
    let values = split(&total.mean);
    let stderr: Vec<f64> = total
        .m2
        .iter()
        .map(|s| if n > 1.0 { (s / (n - 1.0)).max(0.0).sqrt() / n.sqrt() } else { 0.0 })
        .collect();
    let labels = observables.iter().map(|o| o.label.clone()).collect();
    TimeSeries::new(*grid, labels, values, Some(split(&stderr)))
}
