use serde::Serialize;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, InitialState};
use crate::error::Result;

/// A named, ready-to-run experiment.
#[derive(Clone, Debug, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub parameters: &'static str,
    /// How the desk-scale run departs from the original setup, if at all.
    pub substitution: Option<&'static str>,
    #[serde(skip)]
    pub config: ExperimentConfig,
}

impl Preset {
    /// Replace the run seed (and the seed of a random initial state).
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.config.seed = seed;
        match &mut self.config.initial_state {
            Some(InitialState::RandomProduct { seed: s }) | Some(InitialState::RandomProductZeroSx { seed: s }) => *s = seed,
            _ => {}
        }
        self
    }
}

pub const PRESET_NAMES: [&str; 12] = [
    "fig2a",
    "fig2b",
    "fig3a",
    "fig3b",
    "fig3c",
    "fig4",
    "fig5",
    "fig6",
    "fig7_smallN",
    "fig8_smallN",
    "sm_s1",
    "sm_s2_random_detuning",
];

const SEED: u64 = 7;

fn spin(n: usize, omegas: Value, anisotropy: f64, gamma: f64) -> Value {
    json!({ "kind": "spin1", "n_sites": n, "omegas": omegas, "anisotropy": anisotropy, "dephasing_rate": gamma })
}

fn hubbard(n: usize, omegas: Value, u: f64, gamma: f64) -> Value {
    json!({
        "kind": "hubbard", "n_sites": n, "interaction": u, "omegas": omegas,
        "chem_potentials": vec![0.0; n], "dephasing_rate": gamma
    })
}

fn grid(t_end: f64, n_steps: usize) -> Value {
    json!({ "t_start": 0.0, "t_end": t_end, "n_steps": n_steps })
}

fn fig3(name: &str, anisotropy: f64, gamma: f64) -> Value {
    json!({
        "name": name,
        "model": spin(3, json!([1.0, 1.0, 1.0]), anisotropy, gamma),
        "initial_state": { "random_product": { "seed": SEED } },
        "grid": grid(100.0, 2000),
        "observables": [{ "name": "sx2" }],
        "analyses": [{ "kind": "pearson", "window": 10.0, "t_from": 50.0 }],
        "seed": SEED
    })
}

fn build(name: &'static str) -> Option<(&'static str, Option<&'static str>, Value)> {
    let homogeneous = || spin(3, json!([1.0, 1.0, 1.0]), 0.5, 2.0);
    let v = match name {
        "fig2a" => (
            "spin-1 N=3, ω=1.0J, Δ=0.5J, γ=2.0J; Liouvillian spectrum",
            None,
            json!({ "name": name, "model": homogeneous(), "analyses": [{ "kind": "spectrum" }], "seed": SEED }),
        ),
        "fig2b" => (
            "spin-1 N=3, ω=1.0J, Δ=0.5J, γ=2.0J; density matrix at tJ=100 from a random product state",
            None,
            json!({
                "name": name, "model": homogeneous(),
                "initial_state": { "random_product": { "seed": SEED } },
                "grid": grid(100.0, 1000),
                "analyses": [{ "kind": "final_state", "threshold": 1e-6 }],
                "seed": SEED
            }),
        ),
        "fig3a" => ("spin-1 N=3, ω=1.0J, Δ=0.5J, γ=1.0J; ⟨(S^x_j)²⟩ and pairwise Pearson, window 10", None, fig3(name, 0.5, 1.0)),
        "fig3b" => ("spin-1 N=3, ω=1.0J, Δ=0, γ=2.0J; ⟨(S^x_j)²⟩ and pairwise Pearson, window 10", None, fig3(name, 0.0, 2.0)),
        "fig3c" => ("spin-1 N=3, ω=1.0J, Δ=0.5J, γ=0; ⟨(S^x_j)²⟩ and pairwise Pearson, window 10", None, fig3(name, 0.5, 0.0)),
        "fig4" => (
            "spin-1 N=4, ω=1.0J, Δ=0.5J, γ=2.0J; reduced (S^x)² correlators from a random ⟨S^x⟩=0 state and their spectrum",
            None,
            json!({
                "name": name,
                "model": spin(4, json!([1.0, 1.0, 1.0, 1.0]), 0.5, 2.0),
                "initial_state": { "random_product_zero_sx": { "seed": SEED } },
                // dt = π/20 with a 2000-sample tail puts 2ω and 4ω on exact bins
                "grid": grid(3999.0 * std::f64::consts::PI / 20.0, 3999),
                "analyses": [
                    { "kind": "correlators", "name": "sx2" },
                    { "kind": "fourier", "observable": "A_sx2_0_1", "t_min": 100.0 * std::f64::consts::PI }
                ],
                "seed": SEED
            }),
        ),
        "fig5" => (
            "spin-1 N=3, ω={0.4,0.45,0.5}J, Δ=0.5J, γ=1.0J, |→00⟩; ⟨(S^x_j)²⟩, Pearson and turning-point prevalence up to tJ=100",
            None,
            json!({
                "name": name,
                "model": spin(3, json!([0.4, 0.45, 0.5]), 0.5, 1.0),
                "initial_state": { "labels": ["right", "zero", "zero"] },
                "grid": grid(100.0, 4000),
                "observables": [{ "name": "sx2" }],
                "analyses": [
                    { "kind": "pearson", "window": 2.0, "pairs": [["sx2_0", "sx2_1"]] },
                    { "kind": "prevalence", "t_max": 100.0, "bins": 36, "range": [0.025, 1.825] },
                    { "kind": "witnesses", "stride": 10 }
                ],
                "seed": SEED
            }),
        ),
        "fig6" => (
            "spin-1 N=3, ω={1−δ,1,1+δ}J, Δ=0.5J, γ=2.0J; imaginary-eigenvalue shifts on the δ grid [0.0, 0.01, …, 0.1]",
            None,
            json!({
                "name": name, "model": homogeneous(),
                "analyses": [{ "kind": "shift_scan", "deltas": (0..=10).map(|i| i as f64 * 0.01).collect::<Vec<_>>() }],
                "seed": SEED
            }),
        ),
        "fig7_smallN" => (
            "charge-dephased Hubbard, γ=2.5τ, U=1.0τ, ω=1.5τ, μ_j∈Rand[0,0.2]τ, |←↓↑←⟩; ⟨S^x_j⟩ by quantum trajectories, Pearson window 0.5",
            Some("reduced-scale substitute: N=4 sites with exact-state quantum trajectories instead of N=15 with tensor networks"),
            json!({
                "name": name,
                "model": hubbard(4, json!([1.5, 1.5, 1.5, 1.5]), 1.0, 2.5),
                "randomize": [{ "field": "chem_potentials", "low": 0.0, "high": 0.2 }],
                "initial_state": { "labels": ["left", "down", "up", "left"] },
                "grid": grid(10.0, 200),
                "method": { "kind": "trajectories", "n_traj": 100 },
                "observables": [{ "name": "sx" }],
                "analyses": [{ "kind": "pearson", "window": 0.5 }],
                "seed": SEED
            }),
        ),
        "fig8_smallN" => (
            "charge-dephased Hubbard, γ=0.5τ, U=1.0τ, ω_j evenly spaced over [1.35,1.65]τ, μ_j∈Rand[0,0.2]τ, |→←→⟩; ⟨S^x_j⟩, Pearson window 2.0, prevalence up to tτ=90",
            Some("reduced-scale substitute: N=3 sites with dense evolution instead of N=9"),
            json!({
                "name": name,
                "model": hubbard(3, json!([1.35, 1.5, 1.65]), 1.0, 0.5),
                "randomize": [{ "field": "chem_potentials", "low": 0.0, "high": 0.2 }],
                "initial_state": { "labels": ["right", "left", "right"] },
                "grid": grid(90.0, 1800),
                "observables": [{ "name": "sx" }],
                "analyses": [
                    { "kind": "pearson", "window": 2.0, "pairs": [["sx_0", "sx_2"]] },
                    { "kind": "prevalence", "t_max": 90.0, "bins": 60, "range": [0.025, 3.025] }
                ],
                "seed": SEED
            }),
        ),
        "sm_s1" => (
            "spin-1 N=3, ω={1−δ,1,1+δ}J, Δ=0.5J, γ=2.0J, |→00⟩; coherence decay rate and cross-section fits",
            Some("δ grid reduced to five values; time axis to tJ=250"),
            json!({
                "name": name, "model": homogeneous(),
                "initial_state": { "labels": ["right", "zero", "zero"] },
                "grid": grid(250.0, 1000),
                "analyses": [{
                    "kind": "detuning_scan", "deltas": [0.0, 0.025, 0.05, 0.075, 0.1],
                    "fit_window": [50.0, 250.0], "profile_time": 250.0
                }],
                "seed": SEED
            }),
        ),
        "sm_s2_random_detuning" => (
            "spin-1 N=3, ω_j=(1+ε_j)J with ε_j∈Rand[0,δ], δ=0.25, Δ=0.5J, γ=2.0J, |→00⟩; witnesses and turning-point prevalence",
            Some("a single disorder draw instead of an average over 100"),
            json!({
                "name": name, "model": homogeneous(),
                "randomize": [{ "field": "omegas", "low": 0.0, "high": 0.25 }],
                "initial_state": { "labels": ["right", "zero", "zero"] },
                "grid": grid(100.0, 4000),
                "observables": [{ "name": "sx2" }],
                "analyses": [
                    { "kind": "witnesses", "stride": 20 },
                    { "kind": "prevalence", "t_max": 100.0, "bins": 50, "range": [0.0, 5.0] }
                ],
                "seed": SEED
            }),
        ),
        _ => return None,
    };
    Some(v)
}

/// Look up a preset by name.
pub fn preset(name: &str) -> Option<Result<Preset>> {
    let name = PRESET_NAMES.iter().find(|n| **n == name)?;
    let (parameters, substitution, value) = build(name)?;
    Some(ExperimentConfig::from_value(value).map(|config| Preset { name, parameters, substitution, config }))
}

pub fn list_presets() -> Vec<Preset> {
    PRESET_NAMES.iter().map(|n| preset(n).expect("known name").expect("presets are valid")).collect()
}
