//! Charge-dephased Hubbard chain via a Jordan–Wigner encoding.
//!
//! Fermionic modes are ordered (0↑, 0↓, 1↑, 1↓, …). Grouping each site's
//! two modes gives a local dimension of 4 with index `2·n↑ + n↓`
//! (0 = empty, 1 = ↓, 2 = ↑, 3 = doubly occupied).

use serde::{Deserialize, Serialize};

use super::LindbladModel;
use crate::error::{Error, Result};
use crate::hilbert::{kron, Operator, SpaceDescriptor};
use crate::C64;

fn default_tunneling() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HubbardParams {
    pub n_sites: usize,
    #[serde(default = "default_tunneling")]
    pub tunneling: f64,
    pub interaction: f64,
    pub omegas: Vec<f64>,
    pub chem_potentials: Vec<f64>,
    pub dephasing_rate: f64,
}

impl HubbardParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::invalid("n_sites must be positive"));
        }
        if self.omegas.len() != self.n_sites || self.chem_potentials.len() != self.n_sites {
            return Err(Error::invalid(format!(
                "expected {} omegas and chem_potentials, got {} and {}",
                self.n_sites,
                self.omegas.len(),
                self.chem_potentials.len()
            )));
        }
        if !(self.dephasing_rate >= 0.0) {
            return Err(Error::invalid("dephasing_rate must be ≥ 0"));
        }
        let scalars = [self.tunneling, self.interaction, self.dephasing_rate];
        if self.omegas.iter().chain(&self.chem_potentials).chain(&scalars).any(|x| !x.is_finite()) {
            return Err(Error::invalid("Hubbard parameters must be finite"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// Site-grouped space of an `n`-site chain.
pub fn site_space(n: usize) -> Result<SpaceDescriptor> {
    SpaceDescriptor::uniform(n, 4)
}

fn mode_index(site: usize, spin: Spin) -> usize {
    2 * site + if spin == Spin::Up { 0 } else { 1 }
}

/// Annihilation operator `c_{σ,j}` with its Jordan–Wigner string.
pub fn annihilation(n: usize, site: usize, spin: Spin) -> Result<Operator> {
    if site >= n {
        return Err(Error::SiteOutOfRange { site, n_sites: n });
    }
    let q = SpaceDescriptor::uniform(1, 2)?;
    let r = |x: f64| C64::new(x, 0.0);
    let z = Operator::from_triplets(&q, &[(0, 0, r(1.0)), (1, 1, r(-1.0))])?;
    let a = Operator::from_triplets(&q, &[(0, 1, r(1.0))])?;
    let id = Operator::identity(&q);
    let k = mode_index(site, spin);
    let mut op: Option<Operator> = None;
    for mode in 0..2 * n {
        let f = if mode < k {
            &z
        } else if mode == k {
            &a
        } else {
            &id
        };
        op = Some(match op {
            None => f.clone(),
            Some(acc) => kron(&acc, f),
        });
    }
    op.expect("n ≥ 1").with_space(&site_space(n)?)
}

pub fn creation(n: usize, site: usize, spin: Spin) -> Result<Operator> {
    Ok(annihilation(n, site, spin)?.adjoint())
}

pub fn number(n: usize, site: usize, spin: Spin) -> Result<Operator> {
    let c = annihilation(n, site, spin)?;
    Ok(&c.adjoint() * &c)
}

/// `n_j = n_{↑,j} + n_{↓,j}`.
pub fn charge(n: usize, site: usize) -> Result<Operator> {
    Ok(&number(n, site, Spin::Up)? + &number(n, site, Spin::Down)?)
}

/// `c†_{↑,j} c_{↓,j}`.
pub fn local_raising(n: usize, site: usize) -> Result<Operator> {
    Ok(&creation(n, site, Spin::Up)? * &annihilation(n, site, Spin::Down)?)
}

/// `S^x_j = (c†_{↑,j}c_{↓,j} + h.c.)/2`.
pub fn spin_x(n: usize, site: usize) -> Result<Operator> {
    let sp = local_raising(n, site)?;
    Ok(&(&sp + &sp.adjoint()) * 0.5)
}

/// `S^y_j = (c†_{↑,j}c_{↓,j} − h.c.)/2i`.
pub fn spin_y(n: usize, site: usize) -> Result<Operator> {
    let sp = local_raising(n, site)?;
    Ok((&sp - &sp.adjoint()).scale(C64::new(0.0, -0.5)))
}

/// `S^z_j = (n_{↑,j} − n_{↓,j})/2`.
pub fn spin_z(n: usize, site: usize) -> Result<Operator> {
    Ok(&(&number(n, site, Spin::Up)? - &number(n, site, Spin::Down)?) * 0.5)
}

pub fn build_hubbard(params: &HubbardParams) -> Result<LindbladModel> {
    params.validate()?;
    let n = params.n_sites;
    let space = site_space(n)?;
    let mut h = Operator::zeros(&space);
    for spin in [Spin::Up, Spin::Down] {
        for j in 0..n.saturating_sub(1) {
            let hop = &creation(n, j, spin)? * &annihilation(n, j + 1, spin)?;
            let term = &hop + &hop.adjoint();
            h = &h - &(&term * params.tunneling);
        }
    }
    for j in 0..n {
        let nu = number(n, j, Spin::Up)?;
        let nd = number(n, j, Spin::Down)?;
        h = &h + &(&(&nu * &nd) * params.interaction);
        h = &h + &(&(&nu - &nd) * (0.5 * params.omegas[j]));
        h = &h + &(&(&nu + &nd) * params.chem_potentials[j]);
    }
    let jumps = (0..n).map(|j| Ok((charge(n, j)?, params.dephasing_rate))).collect::<Result<_>>()?;
    LindbladModel::new(h.pruned(0.0), jumps)
}

/// Global raising operator `S⁺ = Σ_j c†_{↑,j} c_{↓,j}`.
pub fn hubbard_spin_raising(n: usize) -> Result<Operator> {
    let space = site_space(n)?;
    (0..n).try_fold(Operator::zeros(&space), |acc, j| Ok(&acc + &local_raising(n, j)?))
}
