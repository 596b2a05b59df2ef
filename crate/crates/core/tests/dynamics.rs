mod common;

use dynsync::dynamics::{
    evolve_dense, evolve_dense_with, evolve_trajectories, expectation, reduced_correlator, run_trajectory, DenseOptions,
    Observable, TimeGrid, TrajectoryConfig,
};
use dynsync::hilbert::{embed_local, Operator};
use dynsync::liouville::{asymptotic_projection, build_superoperator, spectrum, ModeClass};
use dynsync::models::hubbard::{charge, spin_x};
use dynsync::models::spin1::local;
use dynsync::models::{
    build_hubbard, build_spin1_chain, product_state, random_product_state, HubbardParams, LindbladModel, LocalKind,
    SpinChainParams,
};
use dynsync::{Error, C64};

type Rows = Vec<Vec<C64>>;

fn mul(a: &Rows, b: &Rows) -> Rows {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn dagger(a: &Rows) -> Rows {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| a[j][i].conj()).collect()).collect()
}

fn axpy(k: C64, x: &Rows, y: &Rows) -> Rows {
    y.iter().zip(x).map(|(ry, rx)| ry.iter().zip(rx).map(|(b, a)| b + k * a).collect()).collect()
}

/// Lindblad right-hand side written directly from the master equation.
struct Oracle {
    h: Rows,
    jumps: Vec<(Rows, Rows, Rows, f64)>,
}

impl Oracle {
    fn new(m: &LindbladModel) -> Self {
        let jumps = m
            .jumps()
            .iter()
            .map(|(l, g)| {
                let l = common::to_rows(l);
                let ld = dagger(&l);
                let ldl = mul(&ld, &l);
                (l, ld, ldl, *g)
            })
            .collect();
        Oracle { h: common::to_rows(m.hamiltonian()), jumps }
    }

    fn rhs(&self, rho: &Rows) -> Rows {
        let i = C64::new(0.0, 1.0);
        let comm = axpy(C64::new(-1.0, 0.0), &mul(rho, &self.h), &mul(&self.h, rho));
        let mut out = comm.iter().map(|r| r.iter().map(|x| -i * x).collect()).collect();
        for (l, ld, ldl, g) in &self.jumps {
            let g = C64::new(*g, 0.0);
            out = axpy(g, &mul(&mul(l, rho), ld), &out);
            out = axpy(-0.5 * g, &mul(ldl, rho), &out);
            out = axpy(-0.5 * g, &mul(rho, ldl), &out);
        }
        out
    }

    fn rk4(&self, rho: &Rows, h: f64) -> Rows {
        let c = |x: f64| C64::new(x, 0.0);
        let k1 = self.rhs(rho);
        let k2 = self.rhs(&axpy(c(h / 2.0), &k1, rho));
        let k3 = self.rhs(&axpy(c(h / 2.0), &k2, rho));
        let k4 = self.rhs(&axpy(c(h), &k3, rho));
        let mut out = axpy(c(h / 6.0), &k1, rho);
        out = axpy(c(h / 3.0), &k2, &out);
        out = axpy(c(h / 3.0), &k3, &out);
        axpy(c(h / 6.0), &k4, &out)
    }

    /// Integrate over `t` with step doubling until two resolutions agree.
    fn integrate(&self, rho: &Rows, t: f64) -> Rows {
        let run = |n: usize| (0..n).fold(rho.clone(), |r, _| self.rk4(&r, t / n as f64));
        let mut n = 4;
        let mut coarse = run(n);
        loop {
            n *= 2;
            let fine = run(n);
            let diff: f64 = fine.iter().flatten().zip(coarse.iter().flatten()).map(|(a, b)| (a - b).norm_sqr()).sum();
            if diff.sqrt() < 1e-13 || n > 1 << 12 {
                return fine;
            }
            coarse = fine;
        }
    }
}

fn sx2_all(m: &LindbladModel) -> Vec<Observable> {
    (0..m.space().n_sites()).map(|j| Observable::new(format!("sx2_{j}"), embed_local(&local::sx2(), j, m.space()).unwrap())).collect()
}

#[test]
fn one_step_matches_independent_integrator() {
    let m = build_spin1_chain(&SpinChainParams { omegas: vec![1.0, 1.2], ..SpinChainParams::uniform(2, 1.0, 0.5, 2.0) }).unwrap();
    let rho0 = random_product_state(LocalKind::Spin1, 2, 3).unwrap().projector();
    for dt in [0.05, 0.3] {
        let grid = TimeGrid::new(0.0, dt, 1).unwrap();
        let run = evolve_dense(&m, &rho0, &grid, &sx2_all(&m)).unwrap();
        let oracle = Oracle::new(&m);
        let expect = oracle.integrate(&common::to_rows(&rho0), dt);
        let got = common::to_rows(&run.final_state);
        let err: f64 = got.iter().flatten().zip(expect.iter().flatten()).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert!(err.sqrt() < 1e-8, "dt={dt}: {}", err.sqrt());
        // observable trace from the vectorized state agrees with Tr(ρX)
        let x = &sx2_all(&m)[1].op;
        let direct = expectation(&run.final_state, x).unwrap().re;
        assert!((run.series.values[1][1] - direct).abs() < 1e-12);
    }
}

#[test]
fn hubbard_step_matches_independent_integrator() {
    let p = HubbardParams {
        n_sites: 2,
        tunneling: 1.0,
        interaction: 1.0,
        omegas: vec![1.5, 1.5],
        chem_potentials: vec![0.2, -0.4],
        dephasing_rate: 2.5,
    };
    let m = build_hubbard(&p).unwrap();
    let rho0 = product_state(LocalKind::Hubbard, &["←", "↑"]).unwrap().projector();
    let grid = TimeGrid::new(0.0, 0.2, 1).unwrap();
    let run = evolve_dense(&m, &rho0, &grid, &[]).unwrap();
    let expect = Oracle::new(&m).integrate(&common::to_rows(&rho0), 0.2);
    let err: f64 =
        common::to_rows(&run.final_state).iter().flatten().zip(expect.iter().flatten()).map(|(a, b)| (a - b).norm_sqr()).sum();
    assert!(err.sqrt() < 1e-8);
}

#[test]
fn maximally_mixed_state_is_stationary() {
    let m = build_spin1_chain(&SpinChainParams::uniform(3, 1.0, 0.5, 2.0)).unwrap();
    let mixed = &Operator::identity(m.space()) * (1.0 / 27.0);
    let grid = TimeGrid::new(0.0, 20.0, 40).unwrap();
    let run = evolve_dense(&m, &mixed, &grid, &sx2_all(&m)).unwrap();
    assert!(common::residual(&run.final_state, &mixed) < 1e-12);
    for col in &run.series.values {
        assert!(col.iter().all(|v| (v - 2.0 / 3.0).abs() < 1e-12));
    }
}

#[test]
fn eigenstate_is_frozen_without_noise() {
    let m = build_spin1_chain(&SpinChainParams::uniform(3, 1.0, 0.5, 0.0)).unwrap();
    // |↑↑↑⟩ spans the maximal-magnetisation sector
    let psi = product_state(LocalKind::Spin1, &["↑", "↑", "↑"]).unwrap();
    let grid = TimeGrid::new(0.0, 10.0, 50).unwrap();
    let obs: Vec<Observable> = (0..3).map(|j| Observable::new(format!("z{j}"), embed_local(&local::sz(), j, m.space()).unwrap())).collect();
    let run = evolve_dense(&m, &psi.projector(), &grid, &obs).unwrap();
    for col in &run.series.values {
        assert!(col.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }
    let traj = evolve_trajectories(&m, &psi, &grid, &obs, &TrajectoryConfig::new(4, 1)).unwrap();
    for col in &traj.values {
        assert!(col.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }
}

#[test]
fn visitor_sees_every_state_and_checks_hold() {
    let m = build_spin1_chain(&SpinChainParams::uniform(2, 1.0, 0.5, 1.0)).unwrap();
    let rho0 = random_product_state(LocalKind::Spin1, 2, 9).unwrap().projector();
    let grid = TimeGrid::new(0.0, 5.0, 25).unwrap();
    let mut seen = Vec::new();
    let mut visit = |k: usize, t: f64, rho: &Operator| {
        seen.push((k, t, reduced_correlator(rho, &local_sx(rho, 0), &local_sx(rho, 1))?));
        Ok(())
    };
    let run = evolve_dense_with(&m, &rho0, &grid, &[], &DenseOptions::default(), Some(&mut visit)).unwrap();
    assert_eq!(seen.len(), grid.len());
    assert!(seen.iter().enumerate().all(|(i, (k, t, _))| *k == i && (t - grid.time(i)).abs() < 1e-15));
    assert!(run.max_trace_drift < 1e-9 && run.max_hermiticity_error < 1e-10 && run.min_eigenvalue > -1e-7);
}

fn local_sx(rho: &Operator, j: usize) -> Operator {
    embed_local(&local::sx(), j, rho.space()).unwrap()
}

#[test]
fn dense_rejects_bad_inputs() {
    let m = build_spin1_chain(&SpinChainParams::uniform(2, 1.0, 0.5, 1.0)).unwrap();
    let grid = TimeGrid::new(0.0, 1.0, 2).unwrap();
    let not_state = &Operator::identity(m.space()) * 0.5;
    assert!(matches!(evolve_dense(&m, &not_state, &grid, &[]), Err(Error::NotAState(_))));
    let rho = &Operator::identity(m.space()) * (1.0 / 9.0);
    let mut opts = DenseOptions::default();
    opts.tolerances.dense_cap = 4;
    assert!(matches!(evolve_dense_with(&m, &rho, &grid, &[], &opts, None), Err(Error::DenseCapExceeded { .. })));
}

fn hubbard2(gamma: f64) -> LindbladModel {
    build_hubbard(&HubbardParams {
        n_sites: 2,
        tunneling: 1.0,
        interaction: 1.0,
        omegas: vec![1.5, 1.5],
        chem_potentials: vec![0.3, -0.1],
        dephasing_rate: gamma,
    })
    .unwrap()
}

#[test]
fn trajectories_conserve_particle_number() {
    let m = hubbard2(2.5);
    let psi = product_state(LocalKind::Hubbard, &["←", "↑"]).unwrap();
    let total = &charge(2, 0).unwrap() + &charge(2, 1).unwrap();
    let grid = TimeGrid::new(0.0, 5.0, 50).unwrap();
    for index in 0..5 {
        let t = run_trajectory(&m, &psi, &grid, &[Observable::new("N", total.clone())], 17, index).unwrap();
        assert!(t.values[0].iter().all(|v| (v - 2.0).abs() < 1e-10));
        assert!((t.final_state.norm() - 1.0).abs() < 1e-10);
        assert_eq!(t.jump_times.len(), t.jump_channels.len());
    }
}

#[test]
fn noiseless_trajectories_equal_dense() {
    let m = hubbard2(0.0);
    let psi = product_state(LocalKind::Hubbard, &["←", "↑"]).unwrap();
    let obs: Vec<Observable> = (0..2).map(|j| Observable::new(format!("sx_{j}"), spin_x(2, j).unwrap())).collect();
    let grid = TimeGrid::new(0.0, 6.0, 60).unwrap();
    let dense = evolve_dense(&m, &psi.projector(), &grid, &obs).unwrap();
    let traj = evolve_trajectories(&m, &psi, &grid, &obs, &TrajectoryConfig::new(3, 5)).unwrap();
    let se = traj.stderr.as_ref().unwrap();
    for j in 0..2 {
        for k in 0..grid.len() {
            assert!((dense.series.values[j][k] - traj.values[j][k]).abs() < 1e-8);
            assert_eq!(se[j][k], 0.0);
        }
    }
}

#[test]
fn trajectory_average_tracks_dense() {
    let m = hubbard2(2.5);
    let psi = product_state(LocalKind::Hubbard, &["←", "↑"]).unwrap();
    let obs: Vec<Observable> = (0..2).map(|j| Observable::new(format!("sx_{j}"), spin_x(2, j).unwrap())).collect();
    let grid = TimeGrid::new(0.0, 4.0, 40).unwrap();
    let dense = evolve_dense(&m, &psi.projector(), &grid, &obs).unwrap();
    let traj = evolve_trajectories(&m, &psi, &grid, &obs, &TrajectoryConfig::new(400, 21)).unwrap();
    let se = traj.stderr.as_ref().unwrap();
    let mut outside = 0;
    for j in 0..2 {
        for k in 0..grid.len() {
            if (dense.series.values[j][k] - traj.values[j][k]).abs() > 3.0 * se[j][k] + 1e-12 {
                outside += 1;
            }
        }
    }
    // about 0.3 % of samples are expected beyond 3σ
    assert!(outside <= 4, "{outside} samples outside 3 stderr");
}

#[test]
fn trajectory_ensembles_are_reproducible() {
    let m = hubbard2(2.5);
    let psi = product_state(LocalKind::Hubbard, &["←", "↑"]).unwrap();
    let obs = vec![Observable::new("sx_0", spin_x(2, 0).unwrap())];
    let grid = TimeGrid::new(0.0, 2.0, 20).unwrap();
    let a = evolve_trajectories(&m, &psi, &grid, &obs, &TrajectoryConfig::new(40, 3)).unwrap();
    let b = evolve_trajectories(&m, &psi, &grid, &obs, &TrajectoryConfig::new(40, 3)).unwrap();
    assert_eq!(a, b);
    let c = evolve_trajectories(&m, &psi, &grid, &obs, &TrajectoryConfig::new(40, 4)).unwrap();
    assert_ne!(a.values, c.values);
}

#[test]
fn long_time_agreement_with_projection() {
    let m = build_spin1_chain(&SpinChainParams::uniform(3, 1.0, 0.5, 1.0)).unwrap();
    let spec = spectrum(&build_superoperator(&m)).unwrap();
    let gap = spec.indices_of(ModeClass::Decaying).iter().map(|&i| spec.eigenvalues[i].re).fold(f64::NEG_INFINITY, f64::max);
    let t_settle = 10.0 / gap.abs();
    let rho0 = random_product_state(LocalKind::Spin1, 3, 7).unwrap().projector();
    let grid = TimeGrid::new(0.0, t_settle + 20.0, ((t_settle + 20.0) * 10.0) as usize).unwrap();
    let obs = sx2_all(&m);
    let run = evolve_dense(&m, &rho0, &grid, &obs).unwrap();
    let p = asymptotic_projection(&rho0, &spec).unwrap();
    let times = grid.times();
    let mut gap_sup = 0.0f64;
    for (j, o) in obs.iter().enumerate() {
        let pred = p.expectation_series(&o.op, &times);
        for k in (0..times.len()).filter(|&k| times[k] >= t_settle) {
            gap_sup = gap_sup.max((pred[k].re - run.series.values[j][k]).abs());
        }
    }
    assert!(gap_sup < 1e-5, "{gap_sup}");
}
