use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::Operator;
use crate::C64;

/// A named operator recorded along a time evolution.
#[derive(Clone, Debug, Serialize)]
pub struct Observable {
    pub label: String,
    #[serde(skip)]
    pub op: Operator,
}

impl Observable {
    pub fn new(label: impl Into<String>, op: Operator) -> Self {
        Observable { label: label.into(), op }
    }
}

fn check(rho: &Operator, x: &Operator) -> Result<()> {
    if rho.dim() != x.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: x.dim() });
    }
    Ok(())
}

/// `Tr(ρ X)`.
pub fn expectation(rho: &Operator, x: &Operator) -> Result<C64> {
    check(rho, x)?;
    Ok(rho.adjoint().inner(x))
}

/// `Tr(ρ x_j x_l) − Tr(ρ x_j) Tr(ρ x_l)`, real part.
pub fn reduced_correlator(rho: &Operator, xj: &Operator, xl: &Operator) -> Result<f64> {
    check(rho, xj)?;
    check(rho, xl)?;
    let joint = expectation(rho, &xj.matmul(xl))?;
    Ok((joint - expectation(rho, xj)? * expectation(rho, xl)?).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{embed_local, SpaceDescriptor, StateVector};
    use crate::models::spin1::local;

    #[test]
    fn identity_has_unit_expectation() {
        let s = SpaceDescriptor::uniform(2, 3).unwrap();
        let rho = &Operator::identity(&s) * (1.0 / 9.0);
        let e = expectation(&rho, &Operator::identity(&s)).unwrap();
        assert!((e - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn product_state_has_no_correlation() {
        let s = SpaceDescriptor::uniform(2, 3).unwrap();
        let a = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0)];
        let b = vec![C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.5, 0.5)];
        let psi = StateVector::product(&[a, b]).unwrap();
        let rho = psi.projector();
        let x0 = embed_local(&local::sx2(), 0, &s).unwrap();
        let x1 = embed_local(&local::sx2(), 1, &s).unwrap();
        assert!(reduced_correlator(&rho, &x0, &x1).unwrap().abs() < 1e-14);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let s2 = SpaceDescriptor::uniform(2, 3).unwrap();
        let rho = Operator::identity(&s2);
        assert!(expectation(&rho, &local::sz()).is_err());
    }
}
