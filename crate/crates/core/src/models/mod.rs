//! The two physical systems: the quadratically dephased spin-1 chain and the
//! charge-dephased Hubbard chain, plus their symmetry operators and states.

pub mod hubbard;
pub mod spin1;
mod states;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{embed_local, Operator, SpaceDescriptor};

pub use hubbard::{build_hubbard, hubbard_spin_raising, HubbardParams};
pub use spin1::{
    build_spin1_chain, sm_extra_symmetry_B, spin1_steady_state, spin1_symmetry, SpinChainParams, SteadyStateSpec,
};
pub use states::{product_state, random_product_state, random_product_state_zero_sx, LocalKind};

/// Hamiltonian plus jump operators with their rates.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    space: SpaceDescriptor,
    hamiltonian: Operator,
    jumps: Vec<(Operator, f64)>,
}

impl LindbladModel {
    pub fn new(hamiltonian: Operator, jumps: Vec<(Operator, f64)>) -> Result<Self> {
        let space = hamiltonian.space().clone();
        let scale = hamiltonian.frobenius_norm().max(1.0);
        if !hamiltonian.is_hermitian(1e-12 * scale) {
            return Err(Error::invalid("Hamiltonian is not Hermitian"));
        }
        for (op, rate) in &jumps {
            if op.dim() != space.total_dim() {
                return Err(Error::DimensionMismatch { expected: space.total_dim(), found: op.dim() });
            }
            if !(*rate >= 0.0) || !rate.is_finite() {
                return Err(Error::invalid(format!("jump rate {rate} must be finite and ≥ 0")));
            }
        }
        Ok(LindbladModel { space, hamiltonian, jumps })
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[(Operator, f64)] {
        &self.jumps
    }

    /// Copy with `extra` added to the Hamiltonian.
    pub fn with_added_hamiltonian(&self, extra: &Operator) -> Result<Self> {
        LindbladModel::new(&self.hamiltonian + extra, self.jumps.clone())
    }
}

/// Site-dependent detunings `δ_j` of the fields `f_j` around a mean frequency.
#[derive(Clone, Debug)]
pub struct DetuningProfile {
    pub field_ops: Vec<Operator>,
    pub detunings: Vec<f64>,
    pub mean_frequency: f64,
    /// Width scale `δ̄`: the mean absolute detuning.
    pub mean_detuning: f64,
}

impl DetuningProfile {
    /// Builds a profile from raw natural frequencies. The mean is absorbed
    /// into `mean_frequency` so the stored detunings sum to zero.
    pub fn from_frequencies(field_ops: Vec<Operator>, frequencies: &[f64]) -> Result<Self> {
        if field_ops.len() != frequencies.len() || frequencies.is_empty() {
            return Err(Error::invalid("need one field operator per frequency"));
        }
        let n = frequencies.len() as f64;
        let mean_frequency = frequencies.iter().sum::<f64>() / n;
        let detunings: Vec<f64> = frequencies.iter().map(|w| w - mean_frequency).collect();
        let mean_detuning = detunings.iter().map(|d| d.abs()).sum::<f64>() / n;
        Ok(DetuningProfile { field_ops, detunings, mean_frequency, mean_detuning })
    }

    /// `S^z_j` fields on a spin-1 chain with natural frequencies `omegas`.
    pub fn spin1(omegas: &[f64]) -> Result<Self> {
        let space = SpaceDescriptor::uniform(omegas.len(), 3)?;
        let sz = spin1::local::sz();
        let ops = (0..omegas.len()).map(|j| embed_local(&sz, j, &space)).collect::<Result<Vec<_>>>()?;
        Self::from_frequencies(ops, omegas)
    }

    /// `ε = δ̄ / ω̄`.
    pub fn epsilon(&self) -> f64 {
        self.mean_detuning / self.mean_frequency
    }

    /// `Σ_j δ_j f_j`.
    pub fn perturbation(&self) -> Operator {
        let space = self.field_ops[0].space().clone();
        self.field_ops
            .iter()
            .zip(&self.detunings)
            .fold(Operator::zeros(&space), |acc, (f, d)| &acc + &(f * *d))
    }
}

/// Parameter records accepted by the CLI config.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelParams {
    Spin1(SpinChainParams),
    Hubbard(HubbardParams),
}

impl ModelParams {
    pub fn build(&self) -> Result<LindbladModel> {
        match self {
            ModelParams::Spin1(p) => build_spin1_chain(p),
            ModelParams::Hubbard(p) => build_hubbard(p),
        }
    }

    pub fn n_sites(&self) -> usize {
        match self {
            ModelParams::Spin1(p) => p.n_sites,
            ModelParams::Hubbard(p) => p.n_sites,
        }
    }

    pub fn local_kind(&self) -> LocalKind {
        match self {
            ModelParams::Spin1(_) => LocalKind::Spin1,
            ModelParams::Hubbard(_) => LocalKind::Hubbard,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detunings_are_recentred() {
        let p = DetuningProfile::spin1(&[0.4, 0.45, 0.5]).unwrap();
        assert!((p.mean_frequency - 0.45).abs() < 1e-15);
        assert!(p.detunings.iter().sum::<f64>().abs() < 1e-12);
        assert!((p.mean_detuning - 0.1 / 3.0).abs() < 1e-12);
        assert!(p.epsilon().is_finite());
    }

    #[test]
    fn rejects_non_hermitian_hamiltonian() {
        let s = SpaceDescriptor::uniform(1, 2).unwrap();
        let h = Operator::dyad(&s, 0, 1).unwrap();
        assert!(LindbladModel::new(h, vec![]).is_err());
        let id = Operator::identity(&s);
        assert!(LindbladModel::new(id.clone(), vec![(id, -1.0)]).is_err());
    }
}
