//! Strong dynamical symmetries: verification, mode ladders, swap
//! invariance and brute-force discovery.

use faer::Mat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{commutator, Operator, SpaceDescriptor};
use crate::liouville::{devectorize, vectorize};
use crate::linalg;
use crate::models::LindbladModel;
use crate::tolerances::dense_cap_from_env;
use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    #[serde(rename = "omega")]
    pub frequency: f64,
    #[serde(rename = "h_residual")]
    pub hamiltonian_residual: f64,
    /// `‖[L_j,A]‖/‖A‖` and `‖[L_j†,A]‖/‖A‖` interleaved per jump.
    pub jump_residuals: Vec<f64>,
    pub passes: bool,
}

/// Checks `[H,A] = ωA`, `[L_j,A] = [L_j†,A] = 0` with `ω` fitted by least
/// squares. Residuals are relative to `‖A‖_F`.
pub fn verify_dynamical_symmetry(model: &LindbladModel, a: &Operator, tol: f64) -> Result<SymmetryReport> {
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::ZeroOperator);
    }
    if a.dim() != model.space().total_dim() {
        return Err(Error::DimensionMismatch { expected: model.space().total_dim(), found: a.dim() });
    }
    let c = commutator(model.hamiltonian(), a);
    let omega = (a.inner(&c) / a.inner(a)).re;
    let hamiltonian_residual = (&c - &(a * omega)).frobenius_norm() / norm;
    let mut jump_residuals = Vec::with_capacity(2 * model.jumps().len());
    for (l, _) in model.jumps() {
        jump_residuals.push(commutator(l, a).frobenius_norm() / norm);
        jump_residuals.push(commutator(&l.adjoint(), a).frobenius_norm() / norm);
    }
    let passes = hamiltonian_residual < tol && jump_residuals.iter().all(|&r| r < tol);
    Ok(SymmetryReport { frequency: omega, hamiltonian_residual, jump_residuals, passes })
}

/// `ρ_{n,m} = Aⁿ ρ_ss (A†)ᵐ` for `0 ≤ n, m ≤ n_max`, normalized to unit
/// Frobenius norm. `(0, 0)` is `ρ_ss` itself; vanishing products are
/// dropped.
pub fn ladder_modes(a: &Operator, rho_ss: &Operator, n_max: usize) -> Vec<(usize, usize, Operator)> {
    let ad = a.adjoint();
    let mut left = vec![rho_ss.clone()];
    for n in 1..=n_max {
        left.push(a * &left[n - 1]);
    }
    let mut out = Vec::new();
    for (n, base) in left.iter().enumerate() {
        let mut cur = base.clone();
        for m in 0..=n_max {
            if m > 0 {
                cur = &cur * &ad;
            }
            if n == 0 && m == 0 {
                out.push((0, 0, rho_ss.clone()));
                continue;
            }
            let norm = cur.frobenius_norm();
            if norm >= 1e-12 {
                out.push((n, m, &cur * (1.0 / norm)));
            }
        }
    }
    out
}

/// Index permutation that exchanges sites `j` and `j+1`.
fn adjacent_swap(space: &SpaceDescriptor, j: usize) -> Vec<usize> {
    (0..space.total_dim())
        .map(|i| {
            let mut d = space.digits(i);
            d.swap(j, j + 1);
            space.index_of(&d)
        })
        .collect()
}

/// `P op P` for a basis permutation `P`.
fn permute(op: &Operator, perm: &[usize]) -> Operator {
    let entries: Vec<_> = op.triplets().into_iter().map(|(r, c, v)| (perm[r], perm[c], v)).collect();
    Operator::from_triplets(op.space(), &entries).expect("permutation keeps indices in range")
}

/// True iff `op` is unchanged (within `tol`, Frobenius) under every
/// adjacent site exchange.
pub fn swap_invariance(op: &Operator, space: &SpaceDescriptor, tol: f64) -> Result<bool> {
    if !space.is_uniform() {
        return Err(Error::HeterogeneousDims);
    }
    if op.dim() != space.total_dim() {
        return Err(Error::DimensionMismatch { expected: space.total_dim(), found: op.dim() });
    }
    for j in 0..space.n_sites().saturating_sub(1) {
        let perm = adjacent_swap(space, j);
        if (&permute(op, &perm) - op).frobenius_norm() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Average of `op` over all site permutations (its swap-invariant part).
pub fn symmetrize(op: &Operator, space: &SpaceDescriptor) -> Result<Operator> {
    if !space.is_uniform() {
        return Err(Error::HeterogeneousDims);
    }
    let n = space.n_sites();
    let perms = permutations(n);
    let count = perms.len() as f64;
    let mut acc = Operator::zeros(space);
    for p in &perms {
        let map: Vec<usize> = (0..space.total_dim())
            .map(|i| {
                let d = space.digits(i);
                let moved: Vec<usize> = p.iter().map(|&s| d[s]).collect();
                space.index_of(&moved)
            })
            .collect();
        acc = &acc + &permute(op, &map);
    }
    Ok(&acc * (1.0 / count))
}

/// Dense vectorized `[X, ·]`.
fn ad_matrix(x: &Operator) -> Mat<C64> {
    let d = x.dim();
    let m = x.to_dense_mat();
    // vec(Xρ − ρX) = (I⊗X − Xᵀ⊗I) vec ρ
    Mat::from_fn(d * d, d * d, |row, col| {
        let (r, c) = (row % d, row / d);
        let (r2, c2) = (col % d, col / d);
        let mut v = C64::default();
        if c == c2 {
            v += m[(r, r2)];
        }
        if r == r2 {
            v -= m[(c2, c)];
        }
        v
    })
}

/// Operators `A` with `[L_j,A] = [L_j†,A] = 0` for every jump and
/// `[H,A] = ωA`, `ω ≠ 0`, sorted by frequency. Each is validated by
/// [`verify_dynamical_symmetry`] at `tol`.
pub fn discover_symmetries(model: &LindbladModel, tol: f64) -> Result<Vec<(f64, Operator)>> {
    let d = model.space().total_dim();
    let d2 = d * d;
    let cap = dense_cap_from_env();
    if d2 > cap {
        return Err(Error::DenseCapExceeded { dim: d2, cap });
    }
    let mut blocks: Vec<Mat<C64>> = Vec::new();
    for (l, rate) in model.jumps() {
        if *rate == 0.0 {
            continue;
        }
        blocks.push(ad_matrix(l));
        if !l.is_hermitian(1e-14) {
            blocks.push(ad_matrix(&l.adjoint()));
        }
    }
    let q = if blocks.is_empty() {
        linalg::identity(d2)
    } else {
        let stacked = Mat::from_fn(blocks.len() * d2, d2, |i, j| blocks[i / d2][(i % d2, j)]);
        linalg::nullspace(&stacked, tol)?
    };
    if q.ncols() == 0 {
        return Ok(Vec::new());
    }
    let k = ad_matrix(model.hamiltonian());
    let kq = &k * &q;
    let compressed = q.adjoint() * &kq;
    let herm = Mat::from_fn(q.ncols(), q.ncols(), |i, j| 0.5 * (compressed[(i, j)] + compressed[(j, i)].conj()));
    let mut freqs = linalg::hermitian_eigenvalues(&herm)?;
    freqs.sort_by(f64::total_cmp);
    let scale = linalg::norm1(&k).max(1.0);
    let cluster = 1e-6 * scale;
    let mut candidates: Vec<f64> = Vec::new();
    for w in freqs {
        match candidates.last() {
            Some(&last) if (w - last).abs() < cluster => {}
            _ => candidates.push(w),
        }
    }

    let mut out = Vec::new();
    for w in candidates {
        if w.abs() < cluster {
            continue;
        }
        let shifted = Mat::from_fn(d2, q.ncols(), |i, j| kq[(i, j)] - q[(i, j)] * w);
        let y = linalg::nullspace(&shifted, tol)?;
        if y.ncols() == 0 {
            continue;
        }
        let basis = &q * &y;
        for col in 0..basis.ncols() {
            let v: Vec<C64> = (0..d2).map(|i| basis[(i, col)]).collect();
            let a = devectorize(&v, model.space())?;
            let a = &a * (1.0 / a.frobenius_norm());
            let report = verify_dynamical_symmetry(model, &a, tol.max(1e-10))?;
            if report.passes && report.frequency.abs() >= cluster {
                out.push((report.frequency, a.into_sparse().pruned(1e-14)));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Vectorized spans are compared through principal angles.
pub fn span_angle(a: &[Operator], b: &[Operator]) -> Result<f64> {
    let to_mat = |ops: &[Operator]| {
        let d2 = ops.first().map(|o| o.dim() * o.dim()).unwrap_or(0);
        let cols: Vec<Vec<C64>> = ops.iter().map(vectorize).collect();
        Mat::from_fn(d2, cols.len(), |i, j| cols[j][i])
    };
    linalg::span_distance(&to_mat(a), &to_mat(b))
}
