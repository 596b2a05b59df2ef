use crate::error::{Error, Result};
use crate::hilbert::{partial_transpose, trace_norm, Operator};
use crate::C64;

/// `(‖ρ^{T_site}‖₁ − 1) / 2`.
pub fn negativity(rho: &Operator, site: usize) -> Result<f64> {
    if (rho.trace() - C64::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(Error::NotAState(format!("trace is {}", rho.trace())));
    }
    if !rho.is_hermitian(1e-10) {
        return Err(Error::NotAState("matrix is not Hermitian".into()));
    }
    let pt = partial_transpose(rho, site)?;
    Ok(0.5 * (trace_norm(&pt)? - 1.0))
}

/// Sum of moduli of the off-diagonal entries in the configuration basis.
pub fn coherence(rho: &Operator) -> f64 {
    rho.triplets().into_iter().filter(|(r, c, _)| r != c).map(|(_, _, v)| v.norm()).sum()
}
