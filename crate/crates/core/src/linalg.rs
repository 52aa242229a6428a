//! Dense linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{CMat, Error, RMat, Result};

/// Largest absolute entry.
pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest modulus of a complex matrix entry.
pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

/// Largest entry of `|m - mᵀ|`.
pub fn asymmetry(m: &RMat) -> f64 {
    max_abs(&(m - m.transpose()))
}

pub fn asymmetry_c(m: &CMat) -> f64 {
    max_abs_c(&(m - m.transpose()))
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_sym_eigenvalue(m: &RMat) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    s.symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |acc, &x| acc.min(x))
}

/// Positive definiteness of the symmetric part, with the smallest
/// eigenvalue required to exceed `1e-12` times the largest entry.
pub fn is_positive_definite(m: &RMat) -> bool {
    let scale = max_abs(m).max(f64::MIN_POSITIVE);
    min_sym_eigenvalue(m) > 1e-12 * scale
}

/// Null space of a real matrix as computed from its SVD.
#[derive(Debug, Clone)]
pub struct NullSpace {
    /// Orthonormal basis vectors of the numerical kernel.
    pub basis: Vec<DVector<f64>>,
    /// Singular values in decreasing order (padded with zeros when the
    /// matrix has fewer rows than columns).
    pub singular_values: Vec<f64>,
    pub rank: usize,
}

/// Numerical kernel of `m`: right singular vectors whose singular value is
/// at most `rel_tol * σ_max`.
pub fn null_space(m: &RMat, rel_tol: f64) -> NullSpace {
    let cols = m.ncols();
    if cols == 0 {
        return NullSpace {
            basis: vec![],
            singular_values: vec![],
            rank: 0,
        };
    }
    let padded;
    let a = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let thresh = rel_tol * smax;
    let mut basis = Vec::new();
    let mut rank = 0;
    for (k, &i) in order.iter().enumerate() {
        if smax > 0.0 && sv[k] > thresh {
            rank += 1;
        } else {
            basis.push(v_t.row(i).transpose());
        }
    }
    NullSpace {
        basis,
        singular_values: sv,
        rank,
    }
}

/// Numerical rank with the same relative threshold as [`null_space`].
pub fn rank(m: &RMat, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.singular_values();
    let smax = sv.iter().fold(0.0f64, |a, &x| a.max(x));
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Minimum-norm least-squares solution of `m x = b`, treating singular values
/// below `rel_tol * σ_max` as zero.
pub fn lstsq(m: &RMat, b: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
    if m.ncols() == 0 {
        return DVector::zeros(0);
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &x| a.max(x));
    let eps = (rel_tol * smax).max(f64::MIN_POSITIVE);
    svd.solve(b, eps)
        .unwrap_or_else(|_| DVector::zeros(m.ncols()))
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &RMat) -> RMat {
    let n = a.nrows();
    let norm = a.iter().map(|x| x.abs()).sum::<f64>().max(0.0);
    let mut s = 0;
    while norm / f64::powi(2.0, s) > 0.25 {
        s += 1;
    }
    let b = a / f64::powi(2.0, s);
    let mut term = RMat::identity(n, n);
    let mut sum = RMat::identity(n, n);
    for k in 1..=20 {
        term = &term * &b / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Inverse of a real matrix, failing when the smallest singular value is
/// below `1e-13` times the largest.
pub fn inverse(m: &RMat, what: &str) -> Result<RMat> {
    let sv = m.singular_values();
    let smax = sv.iter().fold(0.0f64, |a, &x| a.max(x));
    let smin = sv.iter().fold(f64::INFINITY, |a, &x| a.min(x));
    if smax == 0.0 || smin <= 1e-13 * smax {
        return Err(Error::Pole {
            what: what.to_string(),
            at: format!("matrix with condition {:.3e}", smax / smin),
        });
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Pole {
            what: what.to_string(),
            at: "singular matrix".into(),
        })
}

/// Inverse of a complex matrix with the same singularity test as [`inverse`].
pub fn inverse_c(m: &CMat, what: &str) -> Result<CMat> {
    let sv = m.clone().singular_values();
    let smax = sv.iter().fold(0.0f64, |a, &x| a.max(x));
    let smin = sv.iter().fold(f64::INFINITY, |a, &x| a.min(x));
    if smax == 0.0 || smin <= 1e-13 * smax {
        return Err(Error::Pole {
            what: what.to_string(),
            at: format!("matrix with condition {:.3e}", smax / smin),
        });
    }
    m.clone().try_inverse().ok_or_else(|| Error::Pole {
        what: what.to_string(),
        at: "singular matrix".into(),
    })
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn complex_from_parts(re: &RMat, im: &RMat) -> CMat {
    re.zip_map(im, Complex64::new)
}

pub fn re(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn im(m: &CMat) -> RMat {
    m.map(|z| z.im)
}
