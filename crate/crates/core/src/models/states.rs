use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::C64;

/// Which kind of site a label refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalKind {
    Spin1,
    Hubbard,
}

impl LocalKind {
    pub fn local_dim(self) -> usize {
        match self {
            LocalKind::Spin1 => 3,
            LocalKind::Hubbard => 4,
        }
    }
}

fn local_vector(kind: LocalKind, label: &str) -> Result<Vec<C64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| C64::new(x, 0.0);
    let v = match (kind, label) {
        (LocalKind::Spin1, "↑" | "up") => vec![r(1.0), r(0.0), r(0.0)],
        (LocalKind::Spin1, "0" | "zero") => vec![r(0.0), r(1.0), r(0.0)],
        (LocalKind::Spin1, "↓" | "down") => vec![r(0.0), r(0.0), r(1.0)],
        (LocalKind::Spin1, "→" | "right") => vec![r(h), r(0.0), r(h)],
        (LocalKind::Spin1, "←" | "left") => vec![r(h), r(0.0), r(-h)],
        (LocalKind::Hubbard, "empty") => vec![r(1.0), r(0.0), r(0.0), r(0.0)],
        (LocalKind::Hubbard, "↓" | "down") => vec![r(0.0), r(1.0), r(0.0), r(0.0)],
        (LocalKind::Hubbard, "↑" | "up") => vec![r(0.0), r(0.0), r(1.0), r(0.0)],
        (LocalKind::Hubbard, "double") => vec![r(0.0), r(0.0), r(0.0), r(1.0)],
        (LocalKind::Hubbard, "→" | "right") => vec![r(0.0), r(h), r(h), r(0.0)],
        (LocalKind::Hubbard, "←" | "left") => vec![r(0.0), r(-h), r(h), r(0.0)],
        (LocalKind::Hubbard, "0" | "zero") => {
            return Err(Error::UnknownLabel(format!("{label} is a spin-1 label, not a Hubbard one")))
        }
        (LocalKind::Spin1, "empty" | "double") => {
            return Err(Error::UnknownLabel(format!("{label} is a Hubbard label, not a spin-1 one")))
        }
        _ => return Err(Error::UnknownLabel(label.to_string())),
    };
    Ok(v)
}

/// Tensor product of labelled local states, site 0 first.
///
/// Spin-1 labels: `↑ 0 ↓ → ←` (or `up zero down right left`). Hubbard
/// labels: `↑ ↓ → ← empty double`; `→ = (c†_↑ + c†_↓)|vac⟩/√2`.
pub fn product_state<S: AsRef<str>>(kind: LocalKind, labels: &[S]) -> Result<StateVector> {
    if labels.is_empty() {
        return Err(Error::invalid("a product state needs at least one label"));
    }
    let locals = labels.iter().map(|l| local_vector(kind, l.as_ref())).collect::<Result<Vec<_>>>()?;
    StateVector::product(&locals)
}

fn gaussian_local(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    let mut v: Vec<C64> =
        (0..d).map(|_| C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

/// Product of independent Haar-random local states.
pub fn random_product_state(kind: LocalKind, n_sites: usize, seed: u64) -> Result<StateVector> {
    if n_sites == 0 {
        return Err(Error::invalid("n_sites must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let locals: Vec<_> = (0..n_sites).map(|_| gaussian_local(&mut rng, kind.local_dim())).collect();
    StateVector::product(&locals)
}

/// Random spin-1 product state with `⟨S^x_j⟩ = 0` on every site.
///
/// Each site draws `(a, b, c)` at random and then rotates the phase of `b`
/// so that `Re(b(ā + c̄)) = 0`, which is proportional to `⟨S^x⟩`.
pub fn random_product_state_zero_sx(n_sites: usize, seed: u64) -> Result<StateVector> {
    if n_sites == 0 {
        return Err(Error::invalid("n_sites must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let locals: Vec<_> = (0..n_sites)
        .map(|_| {
            let mut v = gaussian_local(&mut rng, 3);
            let s = v[0].conj() + v[2].conj();
            if s.norm() > 0.0 {
                let theta = std::f64::consts::FRAC_PI_2 - s.arg();
                v[1] = C64::from_polar(v[1].norm(), theta);
            }
            v
        })
        .collect();
    StateVector::product(&locals)
}
