#![allow(dead_code)]

use dynsync::hilbert::{Operator, SpaceDescriptor};
use dynsync::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_op(space: &SpaceDescriptor, seed: u64) -> Operator {
    let d = space.total_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = Vec::with_capacity(d * d);
    for r in 0..d {
        for c in 0..d {
            e.push((r, c, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        }
    }
    Operator::from_triplets(space, &e).unwrap()
}

/// Random density matrix `G G† / Tr(G G†)`.
pub fn random_density(space: &SpaceDescriptor, seed: u64) -> Operator {
    let g = random_op(space, seed);
    let p = &g * &g.adjoint();
    let tr = p.trace().re;
    &p * (1.0 / tr)
}

/// Plain O(d²) dense matrix as nested vectors, for oracles that must not
/// share code with the library.
pub fn to_rows(op: &Operator) -> Vec<Vec<C64>> {
    let d = op.dim();
    (0..d).map(|r| (0..d).map(|c| op.get(r, c)).collect()).collect()
}

pub fn residual(a: &Operator, b: &Operator) -> f64 {
    (a - b).frobenius_norm()
}
