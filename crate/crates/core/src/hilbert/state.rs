use super::operator::Operator;
use super::space::SpaceDescriptor;
use crate::error::{Error, Result};
use crate::C64;

/// Normalized pure state.
#[derive(Clone, Debug)]
pub struct StateVector {
    space: SpaceDescriptor,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Normalizes `amplitudes`; fails on length mismatch or a zero vector.
    pub fn new(space: &SpaceDescriptor, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::DimensionMismatch { expected: space.total_dim(), found: amplitudes.len() });
        }
        let norm = norm(&amplitudes);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroOperator);
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(StateVector { space: space.clone(), amplitudes })
    }

    pub fn basis(space: &SpaceDescriptor, index: usize) -> Result<Self> {
        let mut amps = vec![C64::default(); space.total_dim()];
        *amps
            .get_mut(index)
            .ok_or(Error::DimensionMismatch { expected: space.total_dim(), found: index + 1 })? = C64::new(1.0, 0.0);
        Self::new(space, amps)
    }

    /// Tensor product of single-site states, site 0 first.
    pub fn product(locals: &[Vec<C64>]) -> Result<Self> {
        let dims: Vec<usize> = locals.iter().map(Vec::len).collect();
        let space = SpaceDescriptor::new(dims)?;
        let mut amps = vec![C64::new(1.0, 0.0)];
        for local in locals {
            amps = amps.iter().flat_map(|a| local.iter().map(move |b| a * b)).collect();
        }
        Self::new(&space, amps)
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `⟨ψ|X|ψ⟩`.
    pub fn expectation(&self, x: &Operator) -> C64 {
        let xv = x.apply(&self.amplitudes);
        self.amplitudes.iter().zip(&xv).map(|(a, b)| a.conj() * b).sum()
    }

    /// Density matrix `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> Operator {
        let d = self.amplitudes.len();
        let mat = faer::Mat::from_fn(d, d, |r, c| self.amplitudes[r] * self.amplitudes[c].conj());
        Operator::from_dense(&self.space, mat).expect("shape matches by construction")
    }
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}
