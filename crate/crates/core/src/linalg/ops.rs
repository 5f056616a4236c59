use itertools::Itertools;
use rug::Float;

use super::functions::svd_values;
use super::matrix::{Matrix, MatrixFlags};
use crate::error::{Error, Result};
use crate::numerics::{Complex, PrecisionConfig, Real};

fn require_square(x: &Matrix, what: &str) -> Result<usize> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch(format!("{what} needs a square matrix, got {:?}", x.dim())));
    }
    Ok(x.rows())
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(x: &Matrix) -> Result<Complex> {
    let n = require_square(x, "determinant")?;
    let prec = x.prec();
    let mut a: Vec<Complex> = x.entries().to_vec();
    let mut det = Complex::one(prec);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm_sqr().partial_cmp(&a[j * n + col].norm_sqr()).unwrap())
            .unwrap();
        if a[pivot * n + col].is_zero() {
            return Ok(Complex::zero(prec));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let inv = a[col * n + col].recip()?;
        det = &det * &a[col * n + col];
        for row in (col + 1)..n {
            let factor = &a[row * n + col] * &inv;
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                let sub = &factor * &a[col * n + k];
                a[row * n + k] -= &sub;
            }
        }
    }
    Ok(det)
}

/// Inverse by Gauss–Jordan elimination with partial pivoting. The residual
/// `||X X^-1 - I||_F` must not exceed the tolerance.
pub fn inverse(x: &Matrix, cfg: &PrecisionConfig) -> Result<Matrix> {
    let n = require_square(x, "inverse")?;
    let prec = x.prec().max(cfg.bits());
    let mut a: Vec<Complex> = x.entries().iter().map(|z| z.with_prec(prec)).collect();
    let mut inv: Vec<Complex> = Matrix::identity(n, prec).entries().to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm_sqr().partial_cmp(&a[j * n + col].norm_sqr()).unwrap())
            .unwrap();
        if a[pivot * n + col].is_zero() {
            return Err(Error::Singularity("matrix is exactly singular".into()));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        let p = a[col * n + col].recip()?;
        for k in 0..n {
            a[col * n + k] = &a[col * n + k] * &p;
            inv[col * n + k] = &inv[col * n + k] * &p;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row * n + col].clone();
            if factor.is_zero() {
                continue;
            }
            for k in 0..n {
                let sa = &factor * &a[col * n + k];
                a[row * n + k] -= &sa;
                let si = &factor * &inv[col * n + k];
                inv[row * n + k] -= &si;
            }
        }
    }
    let mut out = Matrix::from_vec(n, n, inv)?;
    let residual = (&x.with_prec(prec) * &out).try_sub(&Matrix::identity(n, prec))?.frobenius_norm();
    if residual > cfg.tau() {
        return Err(Error::IllConditioned(format!("inverse residual {:.3e}", residual.to_f64())));
    }
    if x.has(MatrixFlags::HERMITIAN) {
        out = out.hermitian_part();
        if x.has(MatrixFlags::POSITIVE_DEFINITE) {
            out = out.with_flags(MatrixFlags::HERMITIAN | MatrixFlags::PSD | MatrixFlags::POSITIVE_DEFINITE);
        }
    }
    Ok(out)
}

/// Largest singular value.
pub fn operator_norm(x: &Matrix, cfg: &PrecisionConfig) -> Result<Real> {
    Ok(svd_values(x, cfg)?.values()[0].clone())
}

/// `||X||_F ||X^-1||_F`, or infinity when `X` cannot be inverted.
pub fn condition_estimate(x: &Matrix, cfg: &PrecisionConfig) -> Result<Real> {
    require_square(x, "condition estimate")?;
    match inverse(x, cfg) {
        Ok(inv) => Ok(x.frobenius_norm() * inv.frobenius_norm()),
        Err(Error::Singularity(_)) | Err(Error::IllConditioned(_)) => {
            Ok(Float::with_val(x.prec(), rug::float::Special::Infinity))
        }
        Err(e) => Err(e),
    }
}

/// k-th compound: the matrix of all k x k minors, rows and columns indexed
/// by k-subsets in lexicographic order.
pub fn compound(x: &Matrix, k: usize) -> Result<Matrix> {
    let d = require_square(x, "compound")?;
    if k == 0 || k > d {
        return Err(Error::OutOfRange(format!("compound order {k} outside 1..={d}")));
    }
    let subsets: Vec<Vec<usize>> = (0..d).combinations(k).collect();
    let m = subsets.len();
    let prec = x.prec();
    let mut data = Vec::with_capacity(m * m);
    for rows in &subsets {
        for cols in &subsets {
            let minor = Matrix::from_fn(k, k, prec, |i, j| x.get(rows[i], cols[j]).clone());
            data.push(determinant(&minor)?);
        }
    }
    Matrix::from_vec(m, m, data)
}
