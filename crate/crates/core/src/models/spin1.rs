//! Spin-1 XXZ chain with quadratic dephasing `L_j = (S^z_j)²`.
//!
//! Local basis: index 0 = ↑ (m=+1), 1 = 0, 2 = ↓ (m=−1).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::LindbladModel;
use crate::error::{Error, Result};
use crate::hilbert::{embed_local, Operator, SpaceDescriptor};
use crate::C64;

fn default_hopping() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpinChainParams {
    pub n_sites: usize,
    pub omegas: Vec<f64>,
    #[serde(default = "default_hopping")]
    pub hopping: f64,
    pub anisotropy: f64,
    pub dephasing_rate: f64,
}

impl SpinChainParams {
    /// Homogeneous field `ω` on every site.
    pub fn uniform(n_sites: usize, omega: f64, anisotropy: f64, dephasing_rate: f64) -> Self {
        SpinChainParams { n_sites, omegas: vec![omega; n_sites], hopping: 1.0, anisotropy, dephasing_rate }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::invalid("n_sites must be positive"));
        }
        if self.omegas.len() != self.n_sites {
            return Err(Error::invalid(format!("expected {} omegas, got {}", self.n_sites, self.omegas.len())));
        }
        if !(self.dephasing_rate >= 0.0) {
            return Err(Error::invalid("dephasing_rate must be ≥ 0"));
        }
        let all = self.omegas.iter().chain([&self.hopping, &self.anisotropy, &self.dephasing_rate]);
        if all.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("spin-chain parameters must be finite"));
        }
        Ok(())
    }
}

/// Single-site spin-1 matrices.
pub mod local {
    use super::*;

    fn space() -> SpaceDescriptor {
        SpaceDescriptor::uniform(1, 3).expect("valid")
    }

    fn op(entries: &[(usize, usize, C64)]) -> Operator {
        Operator::from_triplets(&space(), entries).expect("3×3 entries")
    }

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    pub fn sz() -> Operator {
        op(&[(0, 0, r(1.0)), (2, 2, r(-1.0))])
    }

    pub fn splus() -> Operator {
        let s = std::f64::consts::SQRT_2;
        op(&[(0, 1, r(s)), (1, 2, r(s))])
    }

    pub fn sminus() -> Operator {
        splus().adjoint()
    }

    /// `(S⁺ + S⁻)/2`.
    pub fn sx() -> Operator {
        &(&splus() + &sminus()) * 0.5
    }

    /// `(S⁺ − S⁻)/2i`.
    pub fn sy() -> Operator {
        (&splus() - &sminus()).scale(C64::new(0.0, -0.5))
    }

    pub fn sz2() -> Operator {
        sz().pow(2)
    }

    pub fn sx2() -> Operator {
        sx().pow(2)
    }

    /// Spin flip `|↑⟩⟨↓| + |↓⟩⟨↑| + |0⟩⟨0|`.
    pub fn flip() -> Operator {
        op(&[(0, 2, r(1.0)), (2, 0, r(1.0)), (1, 1, r(1.0))])
    }
}

pub fn build_spin1_chain(params: &SpinChainParams) -> Result<LindbladModel> {
    params.validate()?;
    let n = params.n_sites;
    let space = SpaceDescriptor::uniform(n, 3)?;
    let sz: Vec<Operator> = (0..n).map(|j| embed_local(&local::sz(), j, &space)).collect::<Result<_>>()?;
    let sp: Vec<Operator> = (0..n).map(|j| embed_local(&local::splus(), j, &space)).collect::<Result<_>>()?;
    let sm: Vec<Operator> = sp.iter().map(Operator::adjoint).collect();

    let mut h = Operator::zeros(&space);
    for j in 0..n {
        h = &h + &(&sz[j] * params.omegas[j]);
    }
    for j in 0..n.saturating_sub(1) {
        let hop = &(&sp[j] * &sm[j + 1]) + &(&sm[j] * &sp[j + 1]);
        h = &h + &(&hop * params.hopping);
        h = &h + &(&(&sz[j] * &sz[j + 1]) * params.anisotropy);
    }
    let jumps = sz.iter().map(|z| (z * z, params.dephasing_rate)).collect();
    LindbladModel::new(h.pruned(0.0), jumps)
}

/// Magnetisation of each basis state of an `n`-site chain.
pub(crate) fn magnetisations(n: usize) -> Vec<i32> {
    let space = SpaceDescriptor::uniform(n, 3).expect("n ≥ 1");
    (0..space.total_dim()).map(|i| space.digits(i).iter().map(|&d| 1 - d as i32).sum()).collect()
}

/// Basis index of the spin-flipped state.
pub(crate) fn flipped_index(space: &SpaceDescriptor, index: usize) -> usize {
    let digits: Vec<usize> = space.digits(index).iter().map(|d| 2 - d).collect();
    space.index_of(&digits)
}

/// Coefficients of the steady-state family
/// `Σ_m λ_m Σ_i |m_i⟩⟨m_i| + λ₀′ Σ_i |0_i⟩⟨0′_i|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateSpec {
    pub lambdas: BTreeMap<i32, f64>,
    pub lambda0_prime: f64,
    /// `G_m`: number of basis states with magnetisation `m`.
    pub sector_counts: BTreeMap<i32, usize>,
}

impl SteadyStateSpec {
    /// Fills `sector_counts` for `n` sites. Missing `λ_m` are zero.
    pub fn new(n: usize, lambdas: BTreeMap<i32, f64>, lambda0_prime: f64) -> Self {
        SteadyStateSpec { lambdas, lambda0_prime, sector_counts: sector_counts(n) }
    }

    /// Maximally mixed state `λ_m = 3^{-N}`.
    pub fn maximally_mixed(n: usize) -> Self {
        let w = 3f64.powi(-(n as i32));
        let lambdas = (-(n as i32)..=n as i32).map(|m| (m, w)).collect();
        Self::new(n, lambdas, 0.0)
    }

    /// `λ₀′ + Σ_m λ_m G_m`, which must equal 1.
    pub fn total_weight(&self) -> f64 {
        self.lambda0_prime
            + self.lambdas.iter().map(|(m, l)| l * *self.sector_counts.get(m).unwrap_or(&0) as f64).sum::<f64>()
    }
}

/// `G_m` by enumeration of all `3^N` basis states.
pub fn sector_counts(n: usize) -> BTreeMap<i32, usize> {
    let mut counts = BTreeMap::new();
    for m in magnetisations(n) {
        *counts.entry(m).or_insert(0) += 1;
    }
    counts
}

/// `G_m = Σ_s C(N,s) C(N−s, (N−s+m)/2)`, skipping non-integer lower indices.
pub fn sector_count_formula(n: usize, m: i32) -> usize {
    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
    }
    (0..=n)
        .filter_map(|s| {
            let top = (n - s) as i32 + m;
            (top >= 0 && top % 2 == 0).then(|| binom(n, s) * binom(n - s, (top / 2) as usize))
        })
        .sum()
}

pub fn spin1_steady_state(n: usize, spec: &SteadyStateSpec) -> Result<Operator> {
    let expected = sector_counts(n);
    if spec.sector_counts != expected {
        return Err(Error::invalid("sector counts do not match the chain length"));
    }
    let total = spec.total_weight();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::NotAState(format!("steady-state weights sum to {total}, not 1")));
    }
    let space = SpaceDescriptor::uniform(n, 3)?;
    let mags = magnetisations(n);
    let mut entries = Vec::new();
    for (i, &m) in mags.iter().enumerate() {
        let l = spec.lambdas.get(&m).copied().unwrap_or(0.0);
        if l != 0.0 {
            entries.push((i, i, C64::new(l, 0.0)));
        }
        if m == 0 && spec.lambda0_prime != 0.0 {
            entries.push((i, flipped_index(&space, i), C64::new(spec.lambda0_prime, 0.0)));
        }
    }
    Operator::from_triplets(&space, &entries)
}

/// `A_m = Σ_i |m_i⟩⟨−m′_i|`.
pub fn spin1_symmetry(n: usize, m: i32) -> Result<Operator> {
    if m == 0 || m.unsigned_abs() as usize > n {
        return Err(Error::invalid(format!("symmetry index m={m} must satisfy 1 ≤ |m| ≤ {n}")));
    }
    let space = SpaceDescriptor::uniform(n, 3)?;
    let entries: Vec<_> = magnetisations(n)
        .into_iter()
        .enumerate()
        .filter(|&(_, mi)| mi == m)
        .map(|(i, _)| (i, flipped_index(&space, i), C64::new(1.0, 0.0)))
        .collect();
    Operator::from_triplets(&space, &entries)
}

/// The alternating operator `B = Σ_i (−1)^i |↑…↑⟩⟨↑…↑| (S⁺_i)²` (sites
/// counted from 1). It commutes with every `(S^z_j)²`, is an eigenoperator
/// of the `Δ = 0` Hamiltonian and is not swap-invariant.
#[allow(non_snake_case)]
pub fn sm_extra_symmetry_B(n: usize) -> Result<Operator> {
    let space = SpaceDescriptor::uniform(n, 3)?;
    let top = Operator::dyad(&space, 0, 0)?;
    let sp2 = local::splus().pow(2);
    let mut b = Operator::zeros(&space);
    for i in 0..n {
        let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
        b = &b + &(&(&top * &embed_local(&sp2, i, &space)?) * sign);
    }
    Ok(b.pruned(0.0))
}
