//! Dense linear-algebra helpers on top of `faer`.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::C64;

fn eig_err(e: impl std::fmt::Debug) -> Error {
    Error::Eigensolver(format!("{e:?}"))
}

pub fn hermitian_eigenvalues(m: &Mat<C64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower).map_err(eig_err)
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &Mat<C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let e = m.self_adjoint_eigen(Side::Lower).map_err(eig_err)?;
    let s = e.S().column_vector();
    let vals = (0..m.nrows()).map(|i| s[i].re).collect();
    Ok((vals, e.U().to_owned()))
}

pub fn singular_values(m: &Mat<C64>) -> Result<Vec<f64>> {
    m.singular_values().map_err(eig_err)
}

/// General eigendecomposition: eigenvalues and right eigenvectors as columns.
pub fn eigen(m: &Mat<C64>) -> Result<(Vec<C64>, Mat<C64>)> {
    if m.nrows() == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let e = m.eigen().map_err(eig_err)?;
    let s = e.S().column_vector();
    let vals: Vec<C64> = (0..m.nrows()).map(|i| s[i]).collect();
    if vals.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    Ok((vals, e.U().to_owned()))
}

pub fn inverse(m: &Mat<C64>) -> Mat<C64> {
    m.partial_piv_lu().inverse()
}

/// Solve `a x = b`.
pub fn solve(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    a.partial_piv_lu().solve(b)
}

/// Induced 1-norm (max column sum).
pub fn norm1(m: &Mat<C64>) -> f64 {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn frobenius(m: &Mat<C64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

fn axpby(a: f64, x: &Mat<C64>, b: f64, y: &Mat<C64>) -> Mat<C64> {
    Mat::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * a + y[(i, j)] * b)
}

fn add_diag(m: &mut Mat<C64>, k: f64) {
    for i in 0..m.nrows() {
        m[(i, i)] += C64::new(k, 0.0);
    }
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant (backward error below unit roundoff for `‖A‖₁/2^s ≤ θ₁₃`).
pub fn expm(a: &Mat<C64>) -> Mat<C64> {
    let n = a.nrows();
    let norm = norm1(a);
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(s);
    let a = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);
    let b = &PADE13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let inner_u = axpby(b[13], &a6, 1.0, &axpby(b[11], &a4, b[9], &a2));
    let mut u = &a6 * &inner_u;
    u = axpby(1.0, &u, 1.0, &axpby(b[7], &a6, 1.0, &axpby(b[5], &a4, b[3], &a2)));
    add_diag(&mut u, b[1]);
    let u = &a * &u;

    let inner_v = axpby(b[12], &a6, 1.0, &axpby(b[10], &a4, b[8], &a2));
    let mut v = &a6 * &inner_v;
    v = axpby(1.0, &v, 1.0, &axpby(b[6], &a6, 1.0, &axpby(b[4], &a4, b[2], &a2)));
    add_diag(&mut v, b[0]);

    let p = axpby(1.0, &v, 1.0, &u);
    let q = axpby(1.0, &v, -1.0, &u);
    let mut r = solve(&q, &p);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Orthonormal basis of the right nullspace: right singular vectors whose
/// singular value is at most `rel_tol` times the largest one.
pub fn nullspace(m: &Mat<C64>, rel_tol: f64) -> Result<Mat<C64>> {
    let (rows, cols) = (m.nrows(), m.ncols());
    if cols == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    if rows == 0 {
        return Ok(identity(cols));
    }
    let svd = m.svd().map_err(eig_err)?;
    let s = svd.S().column_vector();
    let k = rows.min(cols);
    let smax = (0..k).map(|i| s[i].re).fold(0.0, f64::max);
    let thresh = rel_tol * smax;
    let v = svd.V();
    let keep: Vec<usize> = (0..cols).filter(|&i| i >= k || smax == 0.0 || s[i].re <= thresh).collect();
    Ok(Mat::from_fn(cols, keep.len(), |i, j| v[(i, keep[j])]))
}

pub fn identity(n: usize) -> Mat<C64> {
    Mat::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::default() })
}

/// Orthonormal basis for the column span, dropping directions whose
/// singular value is below `rel_tol` times the largest.
pub fn orthonormal_basis(m: &Mat<C64>, rel_tol: f64) -> Result<Mat<C64>> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Ok(Mat::zeros(m.nrows(), 0));
    }
    let svd = m.thin_svd().map_err(eig_err)?;
    let s = svd.S().column_vector();
    let k = m.nrows().min(m.ncols());
    let smax = (0..k).map(|i| s[i].re).fold(0.0, f64::max);
    let keep: Vec<usize> = (0..k).filter(|&i| smax > 0.0 && s[i].re > rel_tol * smax).collect();
    let u = svd.U();
    Ok(Mat::from_fn(m.nrows(), keep.len(), |i, j| u[(i, keep[j])]))
}

/// Principal angles (radians, ascending) between two column spans.
pub fn principal_angles(a: &Mat<C64>, b: &Mat<C64>) -> Result<Vec<f64>> {
    let qa = orthonormal_basis(a, 1e-12)?;
    let qb = orthonormal_basis(b, 1e-12)?;
    if qa.ncols() == 0 || qb.ncols() == 0 {
        return Ok(Vec::new());
    }
    let overlap = qa.adjoint() * &qb;
    let mut sv = singular_values(&overlap)?;
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(sv.into_iter().map(|c| c.clamp(-1.0, 1.0).acos()).collect())
}

/// Largest principal angle between two spans, or `π/2` when their
/// dimensions differ.
pub fn span_distance(a: &Mat<C64>, b: &Mat<C64>) -> Result<f64> {
    let ra = orthonormal_basis(a, 1e-10)?.ncols();
    let rb = orthonormal_basis(b, 1e-10)?.ncols();
    if ra != rb {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    Ok(principal_angles(a, b)?.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn expm_of_diagonal() {
        let m = Mat::from_fn(3, 3, |i, j| if i == j { c(i as f64 - 1.0, 0.5 * i as f64) } else { c(0.0, 0.0) });
        let e = expm(&m);
        for i in 0..3 {
            let expected = m[(i, i)].exp();
            assert!((e[(i, i)] - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn expm_rotation_with_scaling() {
        // exp(θ[[0,-1],[1,0]]) is a rotation; θ large enough to force squaring
        let th = 37.3;
        let m = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(-th, 0.0),
            (1, 0) => c(th, 0.0),
            _ => c(0.0, 0.0),
        });
        let e = expm(&m);
        assert!((e[(0, 0)].re - th.cos()).abs() < 1e-11);
        assert!((e[(1, 0)].re - th.sin()).abs() < 1e-11);
    }

    #[test]
    fn expm_nilpotent() {
        let m = Mat::from_fn(3, 3, |i, j| if j == i + 1 { c(2.0, 0.0) } else { c(0.0, 0.0) });
        let e = expm(&m);
        // I + N + N²/2
        assert!((e[(0, 2)].re - 2.0).abs() < 1e-14);
        assert!((e[(0, 1)].re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let m = Mat::from_fn(3, 3, |i, j| c((i + 1) as f64 * (j as f64 + 1.0), 0.0));
        let n = nullspace(&m, 1e-10).unwrap();
        assert_eq!(n.ncols(), 2);
        let r = &m * &n;
        assert!(frobenius(&r) < 1e-12);
    }

    #[test]
    fn angles_of_equal_spans() {
        let a = Mat::from_fn(4, 2, |i, j| c(if i == j { 1.0 } else { 0.0 }, 0.0));
        let b = Mat::from_fn(4, 2, |i, j| c(if i < 2 { (i + j + 1) as f64 } else { 0.0 }, 0.0));
        assert!(span_distance(&a, &b).unwrap() < 1e-7);
        let e3 = Mat::from_fn(4, 1, |i, _| c(if i == 2 { 1.0 } else { 0.0 }, 0.0));
        let e0 = Mat::from_fn(4, 1, |i, _| c(if i == 0 { 1.0 } else { 0.0 }, 0.0));
        assert!((span_distance(&e0, &e3).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
