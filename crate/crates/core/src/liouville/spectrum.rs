use faer::Mat;
use rayon::prelude::*;
use serde::Serialize;

use super::superop::{devectorize_sparse, vectorize, Superoperator};
use crate::error::{Error, Result};
use crate::hilbert::Operator;
use crate::linalg;
use crate::tolerances::Tolerances;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeClass {
    Zero,
    Imaginary,
    Decaying,
}

impl ModeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeClass::Zero => "zero",
            ModeClass::Imaginary => "imaginary",
            ModeClass::Decaying => "decaying",
        }
    }

    pub fn of(lambda: C64, tol: f64) -> Self {
        if lambda.norm() < tol {
            ModeClass::Zero
        } else if lambda.re.abs() < tol {
            ModeClass::Imaginary
        } else {
            ModeClass::Decaying
        }
    }
}

/// Eigenvalues with paired right and left eigen-operators.
///
/// Right modes have unit Frobenius norm and a real positive leading
/// entry; left modes satisfy `Tr(σ_i† ρ_j) = δ_ij`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<C64>,
    pub right_modes: Vec<Operator>,
    /// `None` when left modes were discarded.
    pub left_modes: Option<Vec<Operator>>,
    pub classes: Vec<ModeClass>,
    /// Absolute classification threshold actually used.
    pub tol_zero: f64,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn indices_of(&self, class: ModeClass) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.classes[i] == class).collect()
    }

    pub fn count(&self, class: ModeClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    /// Indices of the zero and imaginary modes.
    pub fn asymptotic_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.classes[i] != ModeClass::Decaying).collect()
    }

    pub fn without_left_modes(mut self) -> Self {
        self.left_modes = None;
        self
    }

    /// `max |Tr(σ_i† ρ_j) − δ_ij|` over the given modes.
    pub fn biorthogonality_residual(&self, indices: &[usize]) -> Result<f64> {
        let left = self.left_modes.as_ref().ok_or(Error::MissingLeftModes)?;
        let mut worst: f64 = 0.0;
        for &i in indices {
            for &j in indices {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((left[i].inner(&self.right_modes[j]) - target).norm());
            }
        }
        Ok(worst)
    }

    /// Replace the zero-mode basis by `family` (which must span the same
    /// subspace) and update the dual basis accordingly. Returns the largest
    /// principal angle between the numerical kernel and `family`.
    pub fn rebasis_kernel(&mut self, family: &[Operator]) -> Result<f64> {
        let zero = self.indices_of(ModeClass::Zero);
        if zero.len() != family.len() {
            return Err(Error::Numerical(format!(
                "kernel has dimension {} but the family has {} members",
                zero.len(),
                family.len()
            )));
        }
        let left = self.left_modes.as_mut().ok_or(Error::MissingLeftModes)?;
        let d2 = family.first().map(|f| f.dim() * f.dim()).unwrap_or(0);
        let cols = |ops: Vec<Vec<C64>>| Mat::from_fn(d2, ops.len(), |i, j| ops[j][i]);
        let r = cols(zero.iter().map(|&i| vectorize(&self.right_modes[i])).collect());
        let q = cols(family.iter().map(vectorize).collect());
        let angle = linalg::span_distance(&r, &q)?;
        if angle > 1e-6 {
            return Err(Error::Numerical(format!("kernel and family differ by principal angle {angle:.3e}")));
        }
        // coefficients of the family in the current basis: T = Wᴴ Q
        let w = cols(zero.iter().map(|&i| vectorize(&left[i])).collect());
        let t = w.adjoint() * &q;
        let t_inv_h = linalg::inverse(&t).adjoint().to_owned();
        let new_w = &w * &t_inv_h;
        let space = family[0].space().clone();
        for (slot, &i) in zero.iter().enumerate() {
            self.right_modes[i] = family[slot].clone();
            left[i] = devectorize_sparse((0..d2).map(|row| (row, new_w[(row, slot)])), &space);
        }
        Ok(angle)
    }
}

fn eigen_block(m: &Mat<C64>) -> Result<(Vec<C64>, Mat<C64>, Mat<C64>)> {
    let (vals, v) = linalg::eigen(m)?;
    let vinv = linalg::inverse(&v);
    Ok((vals, v, vinv))
}

/// Scale factor that normalizes `v` and makes its leading entry real
/// positive (lowest index whose modulus is within `1e-8` of the largest).
fn normalizer(v: &[C64]) -> C64 {
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let max = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let lead = v.iter().find(|x| x.norm() >= max * (1.0 - 1e-8)).copied().unwrap_or(C64::new(1.0, 0.0));
    let phase = if lead.norm() > 0.0 { lead.conj() / lead.norm() } else { C64::new(1.0, 0.0) };
    phase / norm
}

fn check_cap(sup: &Superoperator, tol: &Tolerances) -> Result<()> {
    if sup.dim() > tol.dense_cap {
        return Err(Error::DenseCapExceeded { dim: sup.dim(), cap: tol.dense_cap });
    }
    Ok(())
}

/// Full spectrum using tolerances from the environment.
pub fn spectrum(sup: &Superoperator) -> Result<SpectralDecomposition> {
    spectrum_with(sup, &Tolerances::from_env())
}

pub fn spectrum_with(sup: &Superoperator, tol: &Tolerances) -> Result<SpectralDecomposition> {
    check_cap(sup, tol)?;
    let space = sup.space().clone();
    let blocks = sup.blocks();
    let per_block: Vec<Result<Vec<(C64, Operator, Operator)>>> = blocks
        .par_iter()
        .map(|idx| {
            let (vals, v, vinv) = eigen_block(&sup.dense_block(idx))?;
            let k = idx.len();
            Ok((0..k)
                .map(|j| {
                    let col: Vec<C64> = (0..k).map(|i| v[(i, j)]).collect();
                    let s = normalizer(&col);
                    let right = devectorize_sparse(idx.iter().zip(&col).map(|(&g, &x)| (g, x * s)), &space);
                    // left row j of V⁻¹ rescaled by 1/s; vec(σ) is its conjugate
                    let left = devectorize_sparse(
                        idx.iter().enumerate().map(|(i, &g)| (g, (vinv[(j, i)] / s).conj())),
                        &space,
                    );
                    (vals[j], right, left)
                })
                .collect())
        })
        .collect();

    let mut all = Vec::with_capacity(sup.dim());
    for b in per_block {
        all.extend(b?);
    }
    let radius = all.iter().map(|t| t.0.norm()).fold(0.0, f64::max);
    let tol_zero = tol.zero_eig_rel * radius.max(f64::MIN_POSITIVE);
    let class_rank = |c: ModeClass| c as u8;
    all.sort_by(|a, b| {
        let (ca, cb) = (ModeClass::of(a.0, tol_zero), ModeClass::of(b.0, tol_zero));
        class_rank(ca).cmp(&class_rank(cb)).then_with(|| match ca {
            ModeClass::Decaying => b.0.re.total_cmp(&a.0.re).then(a.0.im.total_cmp(&b.0.im)),
            _ => a.0.im.total_cmp(&b.0.im),
        })
    });
    let mut out = SpectralDecomposition {
        eigenvalues: Vec::with_capacity(all.len()),
        right_modes: Vec::with_capacity(all.len()),
        left_modes: Some(Vec::with_capacity(all.len())),
        classes: Vec::with_capacity(all.len()),
        tol_zero,
    };
    for (lambda, r, l) in all {
        out.classes.push(ModeClass::of(lambda, tol_zero));
        out.eigenvalues.push(lambda);
        out.right_modes.push(r);
        out.left_modes.as_mut().expect("just created").push(l);
    }
    Ok(out)
}

/// Eigenvalues only (no modes), block by block.
pub fn eigenvalues(sup: &Superoperator, tol: &Tolerances) -> Result<Vec<C64>> {
    check_cap(sup, tol)?;
    let per_block: Vec<Result<Vec<C64>>> = sup
        .blocks()
        .par_iter()
        .map(|idx| {
            let m = sup.dense_block(idx);
            if m.nrows() == 1 {
                return Ok(vec![m[(0, 0)]]);
            }
            m.eigenvalues().map_err(|e| Error::Eigensolver(format!("{e:?}")))
        })
        .collect();
    let mut out = Vec::new();
    for b in per_block {
        out.extend(b?);
    }
    Ok(out)
}
