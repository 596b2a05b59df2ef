use faer::Mat;
use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};
use crate::hilbert::operator::csr_apply;
use crate::hilbert::{Operator, SpaceDescriptor};
use crate::models::LindbladModel;
use crate::C64;

/// Column stacking: entry `(r, c)` of a `d×d` matrix goes to index `c·d + r`.
pub fn vectorize(rho: &Operator) -> Vec<C64> {
    let d = rho.dim();
    let mut v = vec![C64::default(); d * d];
    for (r, c, x) in rho.triplets() {
        v[c * d + r] = x;
    }
    v
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &[C64], space: &SpaceDescriptor) -> Result<Operator> {
    let d = space.total_dim();
    if v.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: v.len() });
    }
    Operator::from_dense(space, Mat::from_fn(d, d, |r, c| v[c * d + r]))
}

/// Like [`devectorize`] but keeps only nonzero entries in sparse storage.
pub(crate) fn devectorize_sparse(entries: impl Iterator<Item = (usize, C64)>, space: &SpaceDescriptor) -> Operator {
    let d = space.total_dim();
    let trip: Vec<_> = entries.filter(|(_, x)| *x != C64::default()).map(|(k, x)| (k % d, k / d, x)).collect();
    Operator::from_triplets(space, &trip).expect("indices below d²")
}

/// Vectorized Lindblad generator in the column-stacking convention.
#[derive(Clone, Debug)]
pub struct Superoperator {
    space: SpaceDescriptor,
    matrix: CsMat<C64>,
}

impl Superoperator {
    pub const CONVENTION: &'static str = "column-stacking";

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    /// Hilbert-space dimension `d`; the matrix is `d² × d²`.
    pub fn hilbert_dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn convention(&self) -> &'static str {
        Self::CONVENTION
    }

    /// Sparse matrix in CSR layout.
    pub fn matrix(&self) -> &CsMat<C64> {
        &self.matrix
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim(), "vector length does not match superoperator");
        let mut out = vec![C64::default(); v.len()];
        csr_apply(&self.matrix, v, &mut out);
        out
    }

    /// `L(ρ)` as an operator.
    pub fn apply_op(&self, rho: &Operator) -> Result<Operator> {
        if rho.dim() != self.hilbert_dim() {
            return Err(Error::DimensionMismatch { expected: self.hilbert_dim(), found: rho.dim() });
        }
        let out = self.apply(&vectorize(rho));
        Ok(devectorize_sparse(out.into_iter().enumerate(), &self.space))
    }

    /// Dense copy, refused above `cap` rows.
    pub fn to_dense(&self, cap: usize) -> Result<Mat<C64>> {
        if self.dim() > cap {
            return Err(Error::DenseCapExceeded { dim: self.dim(), cap });
        }
        Ok(self.dense_block(&(0..self.dim()).collect::<Vec<_>>()))
    }

    /// Dense restriction to the index set `idx` (rows and columns).
    pub fn dense_block(&self, idx: &[usize]) -> Mat<C64> {
        let mut pos = vec![usize::MAX; self.dim()];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k;
        }
        let mut m = Mat::<C64>::zeros(idx.len(), idx.len());
        for (k, &i) in idx.iter().enumerate() {
            if let Some(row) = self.matrix.outer_view(i) {
                for (j, v) in row.iter() {
                    let p = pos[j];
                    if p != usize::MAX {
                        m[(k, p)] += *v;
                    }
                }
            }
        }
        m
    }

    /// Connected components of the sparsity graph. The matrix is block
    /// diagonal over these index sets (each sorted ascending; components
    /// ordered by their smallest index).
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.dim();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (i, row) in self.matrix.outer_iterator().enumerate() {
            for (j, v) in row.iter() {
                if *v != C64::default() {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut comp_of_root = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            if comp_of_root[r] == usize::MAX {
                comp_of_root[r] = out.len();
                out.push(Vec::new());
            }
            out[comp_of_root[r]].push(i);
        }
        out
    }
}

fn csr_kron(a: &CsMat<C64>, b: &CsMat<C64>) -> CsMat<C64> {
    sprs::kronecker_product(a.view(), b.view()).to_csr()
}

fn scaled(m: &CsMat<C64>, k: C64) -> CsMat<C64> {
    m.map(|v| v * k)
}

/// `−i(I⊗H − Hᵀ⊗I) + Σ_j γ_j [L̄_j⊗L_j − ½ I⊗L_j†L_j − ½ (L_j†L_j)ᵀ⊗I]`.
pub fn build_superoperator(model: &LindbladModel) -> Superoperator {
    let d = model.space().total_dim();
    let id: CsMat<C64> = CsMat::eye(d);
    let h = model.hamiltonian().to_csr();
    let ht = model.hamiltonian().transpose().to_csr();
    let mi = C64::new(0.0, -1.0);
    let mut total = &scaled(&csr_kron(&id, &h), mi) - &scaled(&csr_kron(&ht, &id), mi);
    for (l, rate) in model.jumps() {
        if *rate == 0.0 {
            continue;
        }
        let g = C64::new(*rate, 0.0);
        let lbar = l.conj().to_csr();
        let ll = l.adjoint().matmul(l);
        let llt = ll.transpose().to_csr();
        let ll = ll.to_csr();
        let half = C64::new(0.5 * rate, 0.0);
        total = &total + &scaled(&csr_kron(&lbar, &l.to_csr()), g);
        total = &total - &scaled(&csr_kron(&id, &ll), half);
        total = &total - &scaled(&csr_kron(&llt, &id), half);
    }
    // drop exact cancellations so the sparsity graph reflects real couplings
    let mut tri = TriMat::new((d * d, d * d));
    for (v, (r, c)) in total.iter() {
        if *v != C64::default() {
            tri.add_triplet(r, c, *v);
        }
    }
    Superoperator { space: model.space().clone(), matrix: tri.to_csr() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::commutator;
    use crate::models::spin1::local;

    fn random_op(d: usize, seed: u64) -> Operator {
        let s = SpaceDescriptor::uniform(1, d).unwrap();
        let mut x = seed as f64 + 0.5;
        let mut next = || {
            x = (x * 7.31 + 0.123).sin() * 43758.5453;
            x - x.floor() - 0.5
        };
        let entries: Vec<_> =
            (0..d * d).map(|k| (k / d, k % d, C64::new(next(), next()))).collect();
        Operator::from_triplets(&s, &entries).unwrap()
    }

    #[test]
    fn vec_round_trip_and_kron_identity() {
        let (a, rho, b) = (random_op(3, 1), random_op(3, 2), random_op(3, 3));
        let back = devectorize(&vectorize(&rho), rho.space()).unwrap();
        assert_eq!((&back - &rho).frobenius_norm(), 0.0);
        let lhs = vectorize(&(&(&a * &rho) * &b));
        let k = csr_kron(&b.transpose().to_csr(), &a.to_csr());
        let mut rhs = vec![C64::default(); 9];
        csr_apply(&k, &vectorize(&rho), &mut rhs);
        let res: f64 = lhs.iter().zip(&rhs).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        assert!(res < 1e-13);
        let id = vectorize(&Operator::identity(&SpaceDescriptor::uniform(1, 4).unwrap()));
        assert_eq!(id.iter().filter(|x| **x == C64::new(1.0, 0.0)).count(), 4);
        assert_eq!(id.iter().filter(|x| **x != C64::default()).count(), 4);
    }

    #[test]
    fn matches_direct_lindblad_form() {
        let s = SpaceDescriptor::uniform(1, 3).unwrap();
        let h = &local::sz() * 0.7;
        let l = local::sx();
        let model = LindbladModel::new(h.clone(), vec![(l.clone(), 0.9)]).unwrap();
        let sup = build_superoperator(&model);
        let rho = random_op(3, 9).with_space(&s).unwrap();
        let direct = {
            let unitary = commutator(&h, &rho).scale(C64::new(0.0, -1.0));
            let ldl = &(&l * &rho) * &l.adjoint();
            let ll = &l.adjoint() * &l;
            let anti = &(&ll * &rho) + &(&rho * &ll);
            &unitary + &(&(&ldl - &(&anti * 0.5)) * 0.9)
        };
        let via = sup.apply_op(&rho).unwrap();
        assert!((&via - &direct).frobenius_norm() < 1e-13);
    }

    #[test]
    fn blocks_partition_indices() {
        let model = crate::models::build_spin1_chain(&crate::models::SpinChainParams::uniform(2, 1.0, 0.5, 1.0)).unwrap();
        let sup = build_superoperator(&model);
        let blocks = sup.blocks();
        let total: usize = blocks.iter().map(Vec::len).sum();
        assert_eq!(total, 81);
        assert!(blocks.len() > 1);
        // every stored entry stays inside its block
        let mut which = vec![0; 81];
        for (b, idx) in blocks.iter().enumerate() {
            for &i in idx {
                which[i] = b;
            }
        }
        for (_, (r, c)) in sup.matrix().iter() {
            assert_eq!(which[r], which[c]);
        }
    }
}
