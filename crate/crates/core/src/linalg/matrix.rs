use std::fmt;
use std::ops::{Add, Mul, Sub};

use bitflags::bitflags;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{real_to_string, Complex, PrecisionConfig, Real};

bitflags! {
    /// Structural properties certified when a matrix was built.
    #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
    pub struct MatrixFlags: u8 {
        const HERMITIAN = 1;
        const PSD = 1 << 1;
        const POSITIVE_DEFINITE = 1 << 2;
        const DIAGONAL = 1 << 3;
        const NONNEGATIVE_DIAGONAL = 1 << 4;
    }
}

/// Dense row-major complex matrix at a fixed binary precision.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    prec: u32,
    data: Vec<Complex>,
    flags: MatrixFlags,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        Matrix { rows, cols, prec, data: vec![Complex::zero(prec); rows * cols], flags: MatrixFlags::empty() }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Self::zeros(n, n, prec);
        for i in 0..n {
            m.data[i * n + i] = Complex::one(prec);
        }
        m.flags = MatrixFlags::HERMITIAN
            | MatrixFlags::PSD
            | MatrixFlags::POSITIVE_DEFINITE
            | MatrixFlags::DIAGONAL
            | MatrixFlags::NONNEGATIVE_DIAGONAL;
        m
    }

    pub fn from_fn(rows: usize, cols: usize, prec: u32, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j).with_prec(prec));
            }
        }
        Matrix { rows, cols, prec, data, flags: MatrixFlags::empty() }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for {rows}x{cols}", data.len())));
        }
        let prec = data.iter().map(Complex::prec).max().unwrap_or(64);
        let data = data.into_iter().map(|z| z.with_prec(prec)).collect();
        Ok(Matrix { rows, cols, prec, data, flags: MatrixFlags::empty() })
    }

    /// Real matrix from `f64` rows (exactly representable inputs only).
    pub fn from_real_rows(rows: &[&[f64]], cfg: &PrecisionConfig) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self::from_fn(r, c, cfg.bits(), |i, j| Complex::from_real(cfg.real(rows[i][j]))))
    }

    /// Diagonal matrix; flags follow from the signs of the entries.
    pub fn diag(values: &[Real], prec: u32) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n, prec);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = Complex::from_real(Float::with_val(prec, v));
        }
        m.flags = MatrixFlags::DIAGONAL | MatrixFlags::HERMITIAN;
        if values.iter().all(|v| !v.is_sign_negative() || v.is_zero()) {
            m.flags |= MatrixFlags::NONNEGATIVE_DIAGONAL | MatrixFlags::PSD;
            if values.iter().all(|v| *v > 0) {
                m.flags |= MatrixFlags::POSITIVE_DEFINITE;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn flags(&self) -> MatrixFlags {
        self.flags
    }

    pub fn has(&self, flag: MatrixFlags) -> bool {
        self.flags.contains(flag)
    }

    /// Asserts structural flags the caller has established by construction.
    pub(crate) fn with_flags(mut self, flags: MatrixFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex {
        &self.data[i * self.cols + j]
    }

    /// Writes an entry; all certified flags are dropped.
    pub fn set(&mut self, i: usize, j: usize, value: Complex) {
        self.data[i * self.cols + j] = value.with_prec(self.prec);
        self.flags = MatrixFlags::empty();
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<Complex> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    /// Real parts of the diagonal.
    pub fn real_diagonal(&self) -> Vec<Real> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).re.clone()).collect()
    }

    pub fn with_prec(&self, prec: u32) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            prec,
            data: self.data.iter().map(|z| z.with_prec(prec)).collect(),
            flags: self.flags,
        }
    }

    pub fn adjoint(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).conj());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, prec: self.prec, data, flags: self.flags }
    }

    pub fn try_mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let prec = self.prec.max(rhs.prec);
        let mut out = Matrix::zeros(self.rows, rhs.cols, prec);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j].add_mul(a, rhs.get(k, j));
                }
            }
        }
        if self.has(MatrixFlags::DIAGONAL) && rhs.has(MatrixFlags::DIAGONAL) {
            out.flags = MatrixFlags::DIAGONAL;
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Matrix, what: &str, f: impl Fn(&Complex, &Complex) -> Complex) -> Result<Matrix> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch(format!("{what} of {:?} and {:?}", self.dim(), rhs.dim())));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, prec: self.prec.max(rhs.prec), data, flags: MatrixFlags::empty() })
    }

    pub fn try_add(&self, rhs: &Matrix) -> Result<Matrix> {
        let mut out = self.zip_with(rhs, "sum", |a, b| a + b)?;
        out.flags = self.flags & rhs.flags & (MatrixFlags::HERMITIAN | MatrixFlags::PSD | MatrixFlags::DIAGONAL);
        Ok(out)
    }

    pub fn try_sub(&self, rhs: &Matrix) -> Result<Matrix> {
        let mut out = self.zip_with(rhs, "difference", |a, b| a - b)?;
        out.flags = self.flags & rhs.flags & (MatrixFlags::HERMITIAN | MatrixFlags::DIAGONAL);
        Ok(out)
    }

    /// Entrywise (Schur) product.
    pub fn hadamard(&self, rhs: &Matrix) -> Result<Matrix> {
        let mut out = self.zip_with(rhs, "Hadamard product", |a, b| a * b)?;
        if self.has(MatrixFlags::PSD) && rhs.has(MatrixFlags::PSD) {
            out.flags = MatrixFlags::HERMITIAN | MatrixFlags::PSD;
        } else if self.has(MatrixFlags::HERMITIAN) && rhs.has(MatrixFlags::HERMITIAN) {
            out.flags = MatrixFlags::HERMITIAN;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Real) -> Matrix {
        let data = self.data.iter().map(|z| z.scale(c)).collect();
        let mut flags = self.flags & (MatrixFlags::HERMITIAN | MatrixFlags::DIAGONAL);
        if !c.is_sign_negative() || c.is_zero() {
            flags |= self.flags & (MatrixFlags::PSD | MatrixFlags::NONNEGATIVE_DIAGONAL);
            if *c > 0 {
                flags |= self.flags & MatrixFlags::POSITIVE_DEFINITE;
            }
        }
        Matrix { rows: self.rows, cols: self.cols, prec: self.prec, data, flags }
    }

    pub fn scale_complex(&self, c: &Complex) -> Matrix {
        let data = self.data.iter().map(|z| z * c).collect();
        Matrix { rows: self.rows, cols: self.cols, prec: self.prec, data, flags: MatrixFlags::empty() }
    }

    /// `self + shift * I`.
    pub fn add_identity(&self, shift: &Real) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("shift of a non-square matrix".into()));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            out.data[i * self.cols + i].re += shift;
        }
        out.flags &= MatrixFlags::HERMITIAN | MatrixFlags::DIAGONAL;
        Ok(out)
    }

    pub fn trace(&self) -> Complex {
        let mut acc = Complex::zero(self.prec);
        for i in 0..self.rows.min(self.cols) {
            acc += self.get(i, i);
        }
        acc
    }

    pub fn frobenius_norm(&self) -> Real {
        let mut acc = Float::new(self.prec);
        for z in &self.data {
            acc += z.norm_sqr();
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> Real {
        let mut m = Float::new(self.prec);
        for z in &self.data {
            let a = z.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Largest `|m_ij - conj(m_ji)|`.
    pub fn asymmetry(&self) -> Real {
        let mut worst = Float::new(self.prec);
        if !self.is_square() {
            return Float::with_val(self.prec, rug::float::Special::Infinity);
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.get(i, j) - &self.get(j, i).conj()).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// `(M + M*) / 2`, flagged hermitian.
    pub fn hermitian_part(&self) -> Matrix {
        assert!(self.is_square(), "hermitian part of a non-square matrix");
        let n = self.rows;
        let mut out = self.clone();
        for i in 0..n {
            let d = &mut out.data[i * n + i];
            d.im = Float::new(self.prec);
            for j in (i + 1)..n {
                let avg = (self.get(i, j) + &self.get(j, i).conj()).scale(&Float::with_val(self.prec, 0.5));
                out.data[j * n + i] = avg.conj();
                out.data[i * n + j] = avg;
            }
        }
        out.flags = self.flags | MatrixFlags::HERMITIAN;
        out
    }

    /// Checks `M = M*` within tolerance and returns the exactly hermitian
    /// part, flagged.
    pub fn certify_hermitian(&self, cfg: &PrecisionConfig) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotHermitian("non-square".into()));
        }
        if self.has(MatrixFlags::HERMITIAN) {
            return Ok(self.clone());
        }
        let asym = self.asymmetry();
        if asym > cfg.tol(&self.frobenius_norm()) {
            return Err(Error::NotHermitian(format!("{:.3e}", asym.to_f64())));
        }
        Ok(self.hermitian_part())
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(Complex::is_real)
    }

    pub fn to_json(&self, cfg: &PrecisionConfig) -> MatrixJson {
        MatrixJson {
            dim: [self.rows, self.cols],
            entries: self.data.iter().map(|z| [real_to_string(&z.re), real_to_string(&z.im)]).collect(),
            digits: cfg.digits(),
        }
    }

    /// Parses the wire format at the precision implied by its `digits`, or
    /// at `cfg` when given.
    pub fn from_json(json: &MatrixJson, cfg: Option<&PrecisionConfig>) -> Result<Matrix> {
        let own;
        let cfg = match cfg {
            Some(c) => c,
            None => {
                own = PrecisionConfig::with_digits(json.digits)?;
                &own
            }
        };
        let [r, c] = json.dim;
        if json.entries.len() != r * c {
            return Err(Error::Parse(format!("{} entries for {r}x{c}", json.entries.len())));
        }
        let data = json
            .entries
            .iter()
            .map(|[re, im]| Ok(Complex::new(cfg.parse_real(re)?, cfg.parse_real(im)?)))
            .collect::<Result<Vec<_>>>()?;
        let m = Matrix::from_vec(r, c, data)?;
        let exactly_diagonal = r == c
            && (0..r).all(|i| (0..c).all(|j| if i == j { m.get(i, j).im.is_zero() } else { m.get(i, j).is_zero() }));
        if exactly_diagonal {
            let values: Vec<Real> = (0..r).map(|i| m.get(i, i).re.clone()).collect();
            return Ok(Matrix::diag(&values, m.prec));
        }
        Ok(m)
    }
}

/// `{"dim": [r, c], "entries": [[re, im], ...], "digits": n}`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: [usize; 2],
    pub entries: Vec<[String; 2]>,
    pub digits: u32,
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(8);
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:.*}", digits, self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix product dimension mismatch")
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix sum dimension mismatch")
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix difference dimension mismatch")
    }
}
