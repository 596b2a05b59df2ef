use faer::Mat;
use serde::{Deserialize, Serialize};

use super::operator::{Operator, Storage};
use super::space::SpaceDescriptor;
use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

/// Kronecker product `a ⊗ b` on the concatenated space.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let space = a.space().tensor(b.space());
    match (a.storage(), b.storage()) {
        (Storage::Sparse(x), Storage::Sparse(y)) => {
            let k = sprs::kronecker_product(x.view(), y.view());
            Operator::from_sparse(&space, k).expect("kron dimension is a product")
        }
        _ => {
            let x = a.to_dense_mat();
            let y = b.to_dense_mat();
            let (m, n) = (y.nrows(), y.ncols());
            let mat = Mat::from_fn(x.nrows() * m, x.ncols() * n, |i, j| x[(i / m, j / n)] * y[(i % m, j % n)]);
            Operator::from_dense(&space, mat).expect("kron dimension is a product")
        }
    }
}

/// Place a single-site operator at `site`, identity elsewhere.
pub fn embed_local(op_local: &Operator, site: usize, space: &SpaceDescriptor) -> Result<Operator> {
    let d_site = space.local_dim(site)?;
    if op_local.dim() != d_site {
        return Err(Error::DimensionMismatch { expected: d_site, found: op_local.dim() });
    }
    let right = space.stride(site);
    let left = space.total_dim() / (right * d_site);
    let local = op_local.triplets();
    let mut entries = Vec::with_capacity(local.len() * left * right);
    for l in 0..left {
        for &(r, c, v) in &local {
            let row0 = (l * d_site + r) * right;
            let col0 = (l * d_site + c) * right;
            for k in 0..right {
                entries.push((row0 + k, col0 + k, v));
            }
        }
    }
    Operator::from_triplets(space, &entries)
}

/// Transpose the tensor factor at `site`.
pub fn partial_transpose(rho: &Operator, site: usize) -> Result<Operator> {
    let space = rho.space();
    let d_site = space.local_dim(site)?;
    let stride = space.stride(site);
    let digit = |i: usize| (i / stride) % d_site;
    let remap = |i: usize, j: usize| {
        let (di, dj) = (digit(i), digit(j));
        (i + dj * stride - di * stride, j + di * stride - dj * stride)
    };
    match rho.storage() {
        Storage::Dense(m) => {
            let d = m.nrows();
            let mut out = Mat::<C64>::zeros(d, d);
            for j in 0..d {
                for i in 0..d {
                    let (a, b) = remap(i, j);
                    out[(a, b)] = m[(i, j)];
                }
            }
            Operator::from_dense(space, out)
        }
        Storage::Sparse(_) => {
            let entries: Vec<_> = rho
                .triplets()
                .into_iter()
                .map(|(i, j, v)| {
                    let (a, b) = remap(i, j);
                    (a, b, v)
                })
                .collect();
            Operator::from_triplets(space, &entries)
        }
    }
}

/// `Tr √(A†A)`. Hermitian input (within `1e-12`) takes the eigenvalue
/// route, anything else goes through singular values.
pub fn trace_norm(a: &Operator) -> Result<f64> {
    let m = a.to_dense_mat();
    if a.is_hermitian(1e-12) {
        Ok(linalg::hermitian_eigenvalues(&m)?.iter().map(|x| x.abs()).sum())
    } else {
        Ok(linalg::singular_values(&m)?.iter().sum())
    }
}

/// Debug dump format for operators: `{dims, triplets: [[row, col, re, im]]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OperatorJson {
    pub dims: Vec<usize>,
    pub triplets: Vec<(usize, usize, f64, f64)>,
}

impl From<&Operator> for OperatorJson {
    fn from(op: &Operator) -> Self {
        OperatorJson {
            dims: op.space().local_dims().to_vec(),
            triplets: op.triplets().into_iter().map(|(r, c, v)| (r, c, v.re, v.im)).collect(),
        }
    }
}

impl TryFrom<OperatorJson> for Operator {
    type Error = Error;
    fn try_from(j: OperatorJson) -> Result<Operator> {
        let space = SpaceDescriptor::new(j.dims)?;
        let entries: Vec<_> = j.triplets.into_iter().map(|(r, c, re, im)| (r, c, C64::new(re, im))).collect();
        Operator::from_triplets(&space, &entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::operator::commutator;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn spin1_sz() -> Operator {
        let s = SpaceDescriptor::uniform(1, 3).unwrap();
        Operator::from_triplets(&s, &[(0, 0, c(1.0)), (2, 2, c(-1.0))]).unwrap()
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = Operator::identity(&SpaceDescriptor::uniform(1, 2).unwrap());
        let i3 = Operator::identity(&SpaceDescriptor::uniform(1, 3).unwrap());
        let k = kron(&i2, &i3);
        assert_eq!(k.dim(), 6);
        assert_eq!(k.space().local_dims(), &[2, 3]);
        assert!((&k - &Operator::identity(k.space())).frobenius_norm() == 0.0);
    }

    #[test]
    fn kron_sz_identity_spectrum() {
        let i3 = Operator::identity(&SpaceDescriptor::uniform(1, 3).unwrap());
        let k = kron(&spin1_sz(), &i3);
        let mut ev = linalg::hermitian_eigenvalues(&k.to_dense_mat()).unwrap();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn embed_identity_and_disjoint_commutation() {
        let space = SpaceDescriptor::uniform(3, 3).unwrap();
        let i3 = Operator::identity(&SpaceDescriptor::uniform(1, 3).unwrap());
        let e = embed_local(&i3, 1, &space).unwrap();
        assert_eq!(e.dim(), 27);
        assert_eq!((&e - &Operator::identity(&space)).frobenius_norm(), 0.0);

        let s = SpaceDescriptor::uniform(1, 3).unwrap();
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let sx = Operator::from_triplets(&s, &[(0, 1, c(r2)), (1, 0, c(r2)), (1, 2, c(r2)), (2, 1, c(r2))]).unwrap();
        let a = embed_local(&sx, 1, &space).unwrap();
        let b = embed_local(&spin1_sz(), 2, &space).unwrap();
        assert_eq!(commutator(&a, &b).frobenius_norm(), 0.0);
    }

    #[test]
    fn embed_sz_on_up_state() {
        let space = SpaceDescriptor::uniform(3, 3).unwrap();
        let sz0 = embed_local(&spin1_sz(), 0, &space).unwrap();
        // |↑00⟩ has digits (0,1,1)
        let idx = space.index_of(&[0, 1, 1]);
        let mut v = vec![C64::default(); 27];
        v[idx] = c(1.0);
        let w = sz0.apply(&v);
        assert_eq!(w, v);
    }

    #[test]
    fn embed_errors() {
        let space = SpaceDescriptor::uniform(2, 3).unwrap();
        assert!(matches!(embed_local(&spin1_sz(), 2, &space), Err(Error::SiteOutOfRange { .. })));
        let i2 = Operator::identity(&SpaceDescriptor::uniform(1, 2).unwrap());
        assert!(matches!(embed_local(&i2, 0, &space), Err(Error::DimensionMismatch { .. })));
    }

    fn bell() -> Operator {
        let s = SpaceDescriptor::uniform(2, 2).unwrap();
        let h = 0.5;
        Operator::from_triplets(&s, &[(0, 0, c(h)), (0, 3, c(h)), (3, 0, c(h)), (3, 3, c(h))]).unwrap()
    }

    #[test]
    fn bell_partial_transpose() {
        let pt = partial_transpose(&bell(), 1).unwrap();
        let ev = linalg::hermitian_eigenvalues(&pt.to_dense_mat()).unwrap();
        let min = ev.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min + 0.5).abs() < 1e-12);
        let twice = partial_transpose(&pt, 1).unwrap();
        assert_eq!((&twice - &bell()).frobenius_norm(), 0.0);
        assert!((trace_norm(&pt).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn product_partial_transpose_stays_psd() {
        let s1 = SpaceDescriptor::uniform(1, 2).unwrap();
        let ra = Operator::from_triplets(&s1, &[(0, 0, c(0.7)), (1, 1, c(0.3)), (0, 1, C64::new(0.1, 0.2)), (1, 0, C64::new(0.1, -0.2))]).unwrap();
        let rb = Operator::from_triplets(&s1, &[(0, 0, c(0.4)), (1, 1, c(0.6)), (0, 1, C64::new(0.0, 0.3)), (1, 0, C64::new(0.0, -0.3))]).unwrap();
        let pt = partial_transpose(&kron(&ra, &rb), 1).unwrap();
        assert!((&pt - &kron(&ra, &rb.transpose())).frobenius_norm() < 1e-15);
        let ev = linalg::hermitian_eigenvalues(&pt.to_dense_mat()).unwrap();
        assert!(ev.iter().all(|&x| x > -1e-12));
    }

    #[test]
    fn trace_norm_cases() {
        let s = SpaceDescriptor::uniform(1, 2).unwrap();
        let z = Operator::from_triplets(&s, &[(0, 0, c(1.0)), (1, 1, c(-1.0))]).unwrap();
        assert!((trace_norm(&z).unwrap() - 2.0).abs() < 1e-12);
        assert!((trace_norm(&bell()).unwrap() - 1.0).abs() < 1e-12);
        let space = SpaceDescriptor::uniform(3, 3).unwrap();
        let dyad = Operator::dyad(&space, 0, 26).unwrap();
        assert!((trace_norm(&dyad).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let op = bell();
        let j = OperatorJson::from(&op);
        let text = serde_json::to_string(&j).unwrap();
        let back: Operator = serde_json::from_str::<OperatorJson>(&text).unwrap().try_into().unwrap();
        assert_eq!((&back - &op).frobenius_norm(), 0.0);
    }
}
