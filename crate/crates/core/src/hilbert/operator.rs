use std::ops::{Add, Mul, Neg, Sub};

use faer::Mat;
use sprs::{CsMat, TriMat};

use super::space::SpaceDescriptor;
use crate::error::{Error, Result};
use crate::C64;

/// Backing store of an [`Operator`]. Both variants describe the same
/// mathematical object; which one is used only affects performance.
#[derive(Clone, Debug)]
pub enum Storage {
    Dense(Mat<C64>),
    /// Always kept in CSR layout.
    Sparse(CsMat<C64>),
}

/// Linear operator on a composite Hilbert space.
#[derive(Clone, Debug)]
pub struct Operator {
    space: SpaceDescriptor,
    storage: Storage,
}

impl Operator {
    pub fn zeros(space: &SpaceDescriptor) -> Self {
        let d = space.total_dim();
        Operator { space: space.clone(), storage: Storage::Sparse(CsMat::zero((d, d))) }
    }

    pub fn identity(space: &SpaceDescriptor) -> Self {
        Operator { space: space.clone(), storage: Storage::Sparse(CsMat::eye(space.total_dim())) }
    }

    pub fn from_dense(space: &SpaceDescriptor, mat: Mat<C64>) -> Result<Self> {
        let d = space.total_dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: mat.nrows().max(mat.ncols()) });
        }
        Ok(Operator { space: space.clone(), storage: Storage::Dense(mat) })
    }

    pub fn from_sparse(space: &SpaceDescriptor, mat: CsMat<C64>) -> Result<Self> {
        let d = space.total_dim();
        if mat.rows() != d || mat.cols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: mat.rows().max(mat.cols()) });
        }
        let mat = if mat.is_csr() { mat } else { mat.to_csr() };
        Ok(Operator { space: space.clone(), storage: Storage::Sparse(mat) })
    }

    /// Build from `(row, col, value)` entries; duplicates are summed.
    pub fn from_triplets(space: &SpaceDescriptor, entries: &[(usize, usize, C64)]) -> Result<Self> {
        let d = space.total_dim();
        let mut tri = TriMat::new((d, d));
        for &(r, c, v) in entries {
            if r >= d || c >= d {
                return Err(Error::DimensionMismatch { expected: d, found: r.max(c) + 1 });
            }
            tri.add_triplet(r, c, v);
        }
        Ok(Operator { space: space.clone(), storage: Storage::Sparse(tri.to_csr()) })
    }

    /// Single dyad `|ket⟩⟨bra|` between basis states.
    pub fn dyad(space: &SpaceDescriptor, ket: usize, bra: usize) -> Result<Self> {
        Self::from_triplets(space, &[(ket, bra, C64::new(1.0, 0.0))])
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    /// Same matrix, reinterpreted on another space of equal total dimension.
    pub fn with_space(mut self, space: &SpaceDescriptor) -> Result<Self> {
        if space.total_dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: space.total_dim() });
        }
        self.space = space.clone();
        Ok(self)
    }

    pub fn to_dense_mat(&self) -> Mat<C64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(s) => {
                let d = self.dim();
                let mut m = Mat::<C64>::zeros(d, d);
                for (v, (r, c)) in s.iter() {
                    m[(r, c)] += *v;
                }
                m
            }
        }
    }

    pub fn to_csr(&self) -> CsMat<C64> {
        match &self.storage {
            Storage::Sparse(s) => s.clone(),
            Storage::Dense(m) => dense_to_csr(m),
        }
    }

    pub fn into_dense(self) -> Self {
        match self.storage {
            Storage::Dense(_) => self,
            Storage::Sparse(_) => {
                let m = self.to_dense_mat();
                Operator { space: self.space, storage: Storage::Dense(m) }
            }
        }
    }

    pub fn into_sparse(self) -> Self {
        match self.storage {
            Storage::Sparse(_) => self,
            Storage::Dense(m) => Operator { space: self.space, storage: Storage::Sparse(dense_to_csr(&m)) },
        }
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m[(row, col)],
            Storage::Sparse(s) => s.get(row, col).copied().unwrap_or_default(),
        }
    }

    /// Explicitly stored entries as `(row, col, value)`, row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        match &self.storage {
            Storage::Sparse(s) => {
                let mut out: Vec<_> = s.iter().map(|(v, (r, c))| (r, c, *v)).collect();
                out.sort_by_key(|&(r, c, _)| (r, c));
                out
            }
            Storage::Dense(m) => {
                let d = m.nrows();
                let mut out = Vec::new();
                for r in 0..d {
                    for c in 0..d {
                        let v = m[(r, c)];
                        if v != C64::default() {
                            out.push((r, c, v));
                        }
                    }
                }
                out
            }
        }
    }

    pub fn map_entries(&self, f: impl Fn(C64) -> C64) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(Mat::from_fn(m.nrows(), m.ncols(), |i, j| f(m[(i, j)]))),
            Storage::Sparse(s) => Storage::Sparse(s.map(|&v| f(v))),
        };
        Operator { space: self.space.clone(), storage }
    }

    pub fn scale(&self, k: C64) -> Self {
        self.map_entries(|v| v * k)
    }

    pub fn conj(&self) -> Self {
        self.map_entries(|v| v.conj())
    }

    pub fn transpose(&self) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.transpose().to_owned()),
            Storage::Sparse(s) => Storage::Sparse(s.transpose_view().to_csr()),
        };
        Operator { space: self.space.clone(), storage }
    }

    pub fn adjoint(&self) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.adjoint().to_owned()),
            Storage::Sparse(s) => Storage::Sparse(s.transpose_view().map(|v| v.conj()).to_csr()),
        };
        Operator { space: self.space.clone(), storage }
    }

    pub fn trace(&self) -> C64 {
        match &self.storage {
            Storage::Dense(m) => (0..m.nrows()).map(|i| m[(i, i)]).sum(),
            Storage::Sparse(s) => s.iter().filter(|(_, (r, c))| r == c).map(|(v, _)| *v).sum(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        let sq: f64 = match &self.storage {
            Storage::Dense(m) => m.col_iter().flat_map(|c| c.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>()).sum(),
            Storage::Sparse(s) => s.data().iter().map(|v| v.norm_sqr()).sum(),
        };
        sq.sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.triplets().iter().map(|t| t.2.norm()).fold(0.0, f64::max)
    }

    /// Frobenius inner product `Tr(self† other)`.
    pub fn inner(&self, other: &Operator) -> C64 {
        self.assert_same_dim(other);
        match (&self.storage, &other.storage) {
            (Storage::Sparse(a), _) => a.iter().map(|(v, (r, c))| v.conj() * other.get(r, c)).sum(),
            (_, Storage::Sparse(b)) => b.iter().map(|(v, (r, c))| self.get(r, c).conj() * v).sum(),
            (Storage::Dense(a), Storage::Dense(b)) => {
                let mut acc = C64::default();
                for c in 0..a.ncols() {
                    for r in 0..a.nrows() {
                        acc += a[(r, c)].conj() * b[(r, c)];
                    }
                }
                acc
            }
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self - &self.adjoint()).frobenius_norm() <= tol
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim(), "vector length does not match operator");
        let mut out = vec![C64::default(); v.len()];
        self.apply_into(v, &mut out);
        out
    }

    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        match &self.storage {
            Storage::Sparse(s) => csr_apply(s, v, out),
            Storage::Dense(m) => {
                for (r, o) in out.iter_mut().enumerate() {
                    *o = (0..m.ncols()).map(|c| m[(r, c)] * v[c]).sum();
                }
            }
        }
    }

    pub fn matmul(&self, other: &Operator) -> Operator {
        self.assert_same_dim(other);
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a * b),
            _ => Storage::Dense(&self.to_dense_mat() * &other.to_dense_mat()),
        };
        Operator { space: self.space.clone(), storage }
    }

    pub fn pow(&self, n: u32) -> Operator {
        (0..n).fold(Operator::identity(&self.space), |acc, _| acc.matmul(self))
    }

    fn combine(&self, other: &Operator, sign: f64) -> Operator {
        self.assert_same_dim(other);
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => {
                if sign > 0.0 {
                    Storage::Sparse(a + b)
                } else {
                    Storage::Sparse(a - b)
                }
            }
            _ => {
                let a = self.to_dense_mat();
                let b = other.to_dense_mat();
                Storage::Dense(Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] + b[(i, j)] * sign))
            }
        };
        Operator { space: self.space.clone(), storage }
    }

    fn assert_same_dim(&self, other: &Operator) {
        assert_eq!(self.dim(), other.dim(), "operator dimensions differ");
    }

    /// Drop stored entries with modulus at or below `tol`.
    pub fn pruned(&self, tol: f64) -> Operator {
        let entries: Vec<_> = self.triplets().into_iter().filter(|t| t.2.norm() > tol).collect();
        Operator::from_triplets(&self.space, &entries).expect("entries come from a valid operator")
    }
}

/// `[a, b] = ab − ba`.
pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    &a.matmul(b) - &b.matmul(a)
}

/// `{a, b} = ab + ba`.
pub fn anticommutator(a: &Operator, b: &Operator) -> Operator {
    &a.matmul(b) + &b.matmul(a)
}

pub(crate) fn dense_to_csr(m: &Mat<C64>) -> CsMat<C64> {
    let mut tri = TriMat::new((m.nrows(), m.ncols()));
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let v = m[(r, c)];
            if v != C64::default() {
                tri.add_triplet(r, c, v);
            }
        }
    }
    tri.to_csr()
}

pub(crate) fn csr_apply(s: &CsMat<C64>, v: &[C64], out: &mut [C64]) {
    debug_assert!(s.is_csr());
    for (r, row) in s.outer_iterator().enumerate() {
        out[r] = row.iter().map(|(c, a)| *a * v[c]).sum();
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs)
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, k: C64) -> Operator {
        self.scale(k)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, k: f64) -> Operator {
        self.scale(C64::new(k, 0.0))
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(C64::new(-1.0, 0.0))
    }
}
