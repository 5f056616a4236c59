use rug::Float;

use super::matrix::{Matrix, MatrixFlags};
use crate::error::{Error, Result};
use crate::numerics::{Complex, PrecisionConfig, Real};

const MAX_SWEEPS: usize = 80;

/// Eigen-decomposition of a hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigResult {
    /// Descending; ties keep their original index order.
    pub values: Vec<Real>,
    /// Unitary; column `j` belongs to `values[j]`.
    pub vectors: Matrix,
    /// `||H V - V diag(values)||_F`.
    pub residual: Real,
}

impl EigResult {
    pub fn min_value(&self) -> &Real {
        self.values.last().expect("empty spectrum")
    }

    pub fn max_value(&self) -> &Real {
        &self.values[0]
    }

    /// `V diag(f(values)) V*`, flagged hermitian.
    pub fn reconstruct_with(&self, mapped: &[Real]) -> Matrix {
        let n = self.values.len();
        let prec = self.vectors.prec();
        let scaled = Matrix::from_fn(n, n, prec, |i, j| self.vectors.get(i, j).scale(&mapped[j]));
        (&scaled * &self.vectors.adjoint()).hermitian_part()
    }
}

fn check_input(h: &Matrix, cfg: &PrecisionConfig) -> Result<Matrix> {
    if !h.is_square() {
        return Err(Error::NotHermitian(format!("non-square {:?}", h.dim())));
    }
    h.certify_hermitian(cfg)
}

/// Cyclic complex Jacobi on a copy of `h`. Returns the final diagonal and,
/// when requested, the accumulated rotations.
fn jacobi(h: &Matrix, want_vectors: bool, cfg: &PrecisionConfig) -> Result<(Vec<Real>, Option<Vec<Complex>>)> {
    let n = h.rows();
    let prec = h.prec().max(cfg.bits());
    let mut a: Vec<Complex> = h.entries().iter().map(|z| z.with_prec(prec)).collect();
    for i in 0..n {
        a[i * n + i].im = Float::new(prec);
    }
    let mut v = want_vectors.then(|| Matrix::identity(n, prec).entries().to_vec());

    let norm = h.frobenius_norm();
    if norm.is_zero() || n == 1 {
        let d = (0..n).map(|i| a[i * n + i].re.clone()).collect();
        return Ok((d, v));
    }
    // Rotations stop once every off-diagonal entry is below the working
    // roundoff of the whole matrix.
    let threshold = Float::with_val(prec, &norm * Float::with_val(prec, Float::i_exp(1, 4 - prec as i32)));
    let one = Float::with_val(prec, 1);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotations = 0usize;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q].clone();
                let r = apq.abs();
                if r <= threshold {
                    continue;
                }
                rotations += 1;
                // Unit phase e with apq = r e.
                let e = Complex::new(Float::with_val(prec, &apq.re / &r), Float::with_val(prec, &apq.im / &r));
                let e_conj = e.conj();
                let app = a[p * n + p].re.clone();
                let aqq = a[q * n + q].re.clone();
                let theta = Float::with_val(prec, &aqq - &app) / Float::with_val(prec, &r * 2u32);
                let t = if theta.is_zero() {
                    one.clone()
                } else {
                    let root = Float::with_val(prec, &theta * &theta + &one).sqrt();
                    let denom = Float::with_val(prec, theta.clone().abs() + root);
                    let t = Float::with_val(prec, &one / denom);
                    if theta.is_sign_negative() { -t } else { t }
                };
                let c = Float::with_val(prec, &one / Float::with_val(prec, &t * &t + &one).sqrt());
                let s = Float::with_val(prec, &t * &c);
                // U = [[c, s], [-s conj(e), c conj(e)]] acting on columns p, q.
                let u_qp = e_conj.scale(&Float::with_val(prec, -&s));
                let u_qq = e_conj.scale(&c);
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p].clone();
                    let akq = a[k * n + q].clone();
                    let mut new_kp = akp.scale(&c);
                    new_kp.add_mul(&akq, &u_qp);
                    let mut new_kq = akp.scale(&s);
                    new_kq.add_mul(&akq, &u_qq);
                    a[p * n + k] = new_kp.conj();
                    a[q * n + k] = new_kq.conj();
                    a[k * n + p] = new_kp;
                    a[k * n + q] = new_kq;
                }
                let tr = Float::with_val(prec, &t * &r);
                a[p * n + p] = Complex::from_real(Float::with_val(prec, &app - &tr));
                a[q * n + q] = Complex::from_real(Float::with_val(prec, &aqq + &tr));
                a[p * n + q] = Complex::zero(prec);
                a[q * n + p] = Complex::zero(prec);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p].clone();
                        let vkq = v[k * n + q].clone();
                        let mut new_kp = vkp.scale(&c);
                        new_kp.add_mul(&vkq, &u_qp);
                        let mut new_kq = vkp.scale(&s);
                        new_kq.add_mul(&vkq, &u_qq);
                        v[k * n + p] = new_kp;
                        v[k * n + q] = new_kq;
                    }
                }
            }
        }
        if rotations == 0 {
            converged = true;
            break;
        }
    }
    if !converged {
        let mut off = Float::new(prec);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[i * n + j].norm_sqr();
                }
            }
        }
        let off = off.sqrt();
        if off > cfg.tol(&norm) {
            return Err(Error::NoConvergence(format!(
                "Jacobi off-diagonal mass {:.3e} after {MAX_SWEEPS} sweeps",
                off.to_f64()
            )));
        }
    }
    let d = (0..n).map(|i| a[i * n + i].re.clone()).collect();
    Ok((d, v))
}

fn descending_order(values: &[Real]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).expect("NaN eigenvalue"));
    idx
}

/// Eigenvalues and eigenvectors of a hermitian matrix by cyclic Jacobi
/// rotations.
pub fn hermitian_eig(h: &Matrix, cfg: &PrecisionConfig) -> Result<EigResult> {
    let h = check_input(h, cfg)?;
    let n = h.rows();
    let (d, v) = jacobi(&h, true, cfg)?;
    let v = v.expect("vectors requested");
    let order = descending_order(&d);
    let values: Vec<Real> = order.iter().map(|&i| d[i].clone()).collect();
    let prec = h.prec().max(cfg.bits());
    let vectors = Matrix::from_fn(n, n, prec, |i, j| v[i * n + order[j]].clone());
    let hv = h.try_mul(&vectors)?;
    let mut acc = Float::new(prec);
    for i in 0..n {
        for j in 0..n {
            let diff = hv.get(i, j) - &vectors.get(i, j).scale(&values[j]);
            acc += diff.norm_sqr();
        }
    }
    Ok(EigResult { values, vectors, residual: acc.sqrt() })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(h: &Matrix, cfg: &PrecisionConfig) -> Result<Vec<Real>> {
    let h = check_input(h, cfg)?;
    let (d, _) = jacobi(&h, false, cfg)?;
    Ok(descending_order(&d).into_iter().map(|i| d[i].clone()).collect())
}

/// Smallest eigenvalue of a hermitian matrix.
pub fn min_eigenvalue(h: &Matrix, cfg: &PrecisionConfig) -> Result<Real> {
    Ok(hermitian_eigenvalues(h, cfg)?.pop().expect("empty matrix"))
}

/// Certifies positive semidefiniteness (`min eigenvalue >= -tol`), and
/// positive definiteness when the minimum clears `+tol`.
pub fn certify_psd(h: &Matrix, cfg: &PrecisionConfig) -> Result<Matrix> {
    let herm = h.certify_hermitian(cfg)?;
    let values = hermitian_eigenvalues(&herm, cfg)?;
    let min = values.last().expect("empty matrix");
    let scale = herm.frobenius_norm();
    let tol = cfg.tol(&scale);
    if *min < Float::with_val(min.prec(), -&tol) {
        return Err(Error::NotPsd(format!("{:.6e}", min.to_f64())));
    }
    let mut flags = herm.flags() | MatrixFlags::HERMITIAN | MatrixFlags::PSD;
    if *min > tol {
        flags |= MatrixFlags::POSITIVE_DEFINITE;
    }
    Ok(herm.with_flags(flags))
}

/// Like [`certify_psd`] but demands a positive definite result.
pub fn certify_positive_definite(h: &Matrix, cfg: &PrecisionConfig) -> Result<Matrix> {
    let m = certify_psd(h, cfg)?;
    if !m.has(MatrixFlags::POSITIVE_DEFINITE) {
        let min = min_eigenvalue(&m, cfg)?;
        return Err(Error::NotPositiveDefinite(format!("{:.6e}", min.to_f64())));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Real, b: f64, cfg: &PrecisionConfig) -> bool {
        Float::with_val(a.prec(), a - b).abs() < cfg.tau()
    }

    #[test]
    fn identity_and_diagonal() {
        let cfg = PrecisionConfig::default();
        let r = hermitian_eig(&Matrix::identity(2, cfg.bits()), &cfg).unwrap();
        assert!(r.values.iter().all(|v| close(v, 1.0, &cfg)));
        let d = Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 3.0]], &cfg).unwrap();
        let r = hermitian_eig(&d, &cfg).unwrap();
        assert!(close(&r.values[0], 3.0, &cfg) && close(&r.values[1], 1.0, &cfg));
    }

    #[test]
    fn symmetric_two_by_two() {
        let cfg = PrecisionConfig::default();
        let h = Matrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]], &cfg).unwrap();
        let r = hermitian_eig(&h, &cfg).unwrap();
        assert!(close(&r.values[0], 3.0, &cfg) && close(&r.values[1], 1.0, &cfg));
        // Columns are (1,1)/sqrt2 and (1,-1)/sqrt2 up to phase.
        let inv_sqrt2 = cfg.real(0.5).sqrt();
        for (j, sign) in [(0usize, 1.0), (1, -1.0)] {
            let v0 = r.vectors.get(0, j).clone();
            let v1 = r.vectors.get(1, j).clone();
            assert!(close(&v0.abs(), inv_sqrt2.to_f64(), &PrecisionConfig::with_digits(20).unwrap()));
            // v1 / v0 = sign
            let ratio = v1.div(&v0).unwrap();
            assert!(close(&ratio.re, sign, &cfg) && close(&ratio.im, 0.0, &cfg));
        }
        assert!(r.residual < cfg.tau());
    }

    #[test]
    fn complex_hermitian() {
        let cfg = PrecisionConfig::with_digits(40).unwrap();
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1.
        let mut h = Matrix::identity(2, cfg.bits()).scale(&cfg.real(2));
        h.set(0, 1, Complex::new(cfg.zero(), cfg.one()));
        h.set(1, 0, Complex::new(cfg.zero(), cfg.real(-1)));
        let r = hermitian_eig(&h, &cfg).unwrap();
        assert!(close(&r.values[0], 3.0, &cfg) && close(&r.values[1], 1.0, &cfg));
        assert!(r.residual < cfg.tau());
    }

    #[test]
    fn rejects_non_hermitian() {
        let cfg = PrecisionConfig::with_digits(30).unwrap();
        let x = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]], &cfg).unwrap();
        assert!(matches!(hermitian_eig(&x, &cfg), Err(Error::NotHermitian(_))));
        assert!(matches!(certify_psd(&Matrix::diag(&[cfg.real(-1)], cfg.bits()), &cfg), Err(Error::NotPsd(_))));
    }
}
