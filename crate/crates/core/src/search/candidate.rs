use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, operator_norm, psd_power, EigResult, Matrix, MatrixFlags};
use crate::numerics::{real_power, real_to_string, Complex, Exponent, PrecisionConfig, Real, RngStream};

/// How the diagonal of `D` is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagonalLaw {
    /// `D_kk = 10^u`, `u` uniform on `[-3, log10 0.95]`.
    #[default]
    LogUniform,
    /// `D_kk` uniform on `(0.05, 0.95)`.
    Uniform,
}

impl std::str::FromStr for DiagonalLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-uniform" => Ok(DiagonalLaw::LogUniform),
            "uniform" => Ok(DiagonalLaw::Uniform),
            _ => Err(Error::Parse(format!("unknown diagonal law {s:?}"))),
        }
    }
}

impl DiagonalLaw {
    fn draw(self, rng: &mut RngStream) -> f64 {
        match self {
            DiagonalLaw::LogUniform => {
                let hi = 0.95f64.log10();
                10f64.powf(-3.0 + (hi + 3.0) * rng.next_f64())
            }
            DiagonalLaw::Uniform => 0.05 + 0.9 * rng.next_f64(),
        }
    }
}

/// Minimum relative gap between two diagonal entries of `D`.
pub const DIAGONAL_GAP: f64 = 1e-3;
/// Minimum modulus of an entry of `psi`.
pub const PSI_FLOOR: f64 = 1e-3;

/// Diagonal `D` with distinct entries in `(0, 1)` and a vector `psi` with
/// nonzero entries. They define the positive definite Cauchy-type matrix
/// `A^2 = (psi_k conj(psi_l) / (1 - D_kk D_ll))`.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSpec {
    pub diag: Vec<Real>,
    pub psi: Vec<Complex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateJson {
    pub digits: u32,
    pub diag: Vec<String>,
    pub psi: Vec<[String; 2]>,
}

impl CandidateSpec {
    pub fn new(diag: Vec<Real>, psi: Vec<Complex>) -> Result<Self> {
        if diag.len() != psi.len() || diag.is_empty() {
            return Err(Error::DimensionMismatch(format!("diag {} vs psi {}", diag.len(), psi.len())));
        }
        for (k, v) in diag.iter().enumerate() {
            if !(*v > 0 && *v < 1) {
                return Err(Error::Domain(format!("D[{k}] = {} not in (0, 1)", v.to_f64())));
            }
        }
        for k in 0..diag.len() {
            for l in 0..k {
                if diag[k] == diag[l] {
                    return Err(Error::Degenerate(format!("D[{k}] = D[{l}]")));
                }
            }
        }
        if let Some(k) = psi.iter().position(Complex::is_zero) {
            return Err(Error::Degenerate(format!("psi[{k}] = 0")));
        }
        Ok(CandidateSpec { diag, psi })
    }

    /// Draws by rejection: entries of `D` at relative distance at least
    /// [`DIAGONAL_GAP`], entries of `psi` complex normal with modulus at
    /// least [`PSI_FLOOR`].
    pub fn draw(rng: &mut RngStream, d: usize, law: DiagonalLaw, cfg: &PrecisionConfig) -> CandidateSpec {
        let mut diag: Vec<f64> = Vec::with_capacity(d);
        while diag.len() < d {
            let v = law.draw(rng);
            if diag.iter().all(|w| (v - w).abs() >= DIAGONAL_GAP * v.max(*w)) {
                diag.push(v);
            }
        }
        let floor = cfg.real(PSI_FLOOR);
        let psi = (0..d)
            .map(|_| loop {
                let z = rng.draw_complex_normal(cfg);
                if z.abs() >= floor {
                    break z;
                }
            })
            .collect();
        CandidateSpec { diag: diag.into_iter().map(|v| cfg.real(v)).collect(), psi }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn with_prec(&self, prec: u32) -> CandidateSpec {
        CandidateSpec {
            diag: self.diag.iter().map(|v| Float::with_val(prec, v)).collect(),
            psi: self.psi.iter().map(|z| z.with_prec(prec)).collect(),
        }
    }

    pub fn d_matrix(&self, prec: u32) -> Matrix {
        Matrix::diag(&self.with_prec(prec).diag, prec)
    }

    /// `A^2 = (psi_k conj(psi_l) / (1 - D_kk D_ll))`.
    pub fn a_squared(&self, prec: u32) -> Matrix {
        let spec = self.with_prec(prec);
        let d = spec.dim();
        let m = Matrix::from_fn(d, d, prec, |k, l| {
            let num = &spec.psi[k] * &spec.psi[l].conj();
            let den = Float::with_val(prec, 1u32 - Float::with_val(prec, &spec.diag[k] * &spec.diag[l]));
            num.scale(&den.recip())
        });
        m.hermitian_part()
    }

    /// Multiplies each `D_kk` by `exp(rel * n)` and moves each `psi_k` by
    /// `rel * |psi_k|` times a complex normal. Returns `None` if the result
    /// leaves the admissible set.
    pub fn perturb(&self, rng: &mut RngStream, rel: f64, cfg: &PrecisionConfig) -> Option<CandidateSpec> {
        let prec = cfg.bits();
        let rel = cfg.real(rel);
        let diag: Vec<Real> = self
            .diag
            .iter()
            .map(|v| {
                let n = rng.draw_normal(cfg);
                Float::with_val(prec, &rel * &n).exp() * v
            })
            .collect();
        let psi: Vec<Complex> = self
            .psi
            .iter()
            .map(|z| {
                let n = rng.draw_complex_normal(cfg);
                let step = Float::with_val(prec, &rel * z.abs());
                z + &n.scale(&step)
            })
            .collect();
        let spec = CandidateSpec::new(diag, psi).ok()?;
        let floor = cfg.real(PSI_FLOOR);
        let gap_ok = (0..spec.dim()).all(|k| {
            (0..k).all(|l| {
                let (a, b) = (&spec.diag[k], &spec.diag[l]);
                let gap = Float::with_val(prec, a - b).abs();
                gap >= Float::with_val(prec, a.max_ref(b)) * DIAGONAL_GAP
            })
        });
        (gap_ok && spec.psi.iter().all(|z| z.abs() >= floor)).then_some(spec)
    }

    pub fn to_json(&self, cfg: &PrecisionConfig) -> CandidateJson {
        CandidateJson {
            digits: cfg.digits(),
            diag: self.diag.iter().map(real_to_string).collect(),
            psi: self.psi.iter().map(|z| [real_to_string(&z.re), real_to_string(&z.im)]).collect(),
        }
    }

    /// Parses at `cfg` if given, else at the precision recorded in the JSON.
    pub fn from_json(json: &CandidateJson, cfg: Option<&PrecisionConfig>) -> Result<CandidateSpec> {
        let own;
        let cfg = match cfg {
            Some(c) => c,
            None => {
                own = PrecisionConfig::with_digits(json.digits)?;
                &own
            }
        };
        let diag = json.diag.iter().map(|s| cfg.parse_real(s)).collect::<Result<Vec<_>>>()?;
        let psi = json
            .psi
            .iter()
            .map(|[re, im]| Ok(Complex::new(cfg.parse_real(re)?, cfg.parse_real(im)?)))
            .collect::<Result<Vec<_>>>()?;
        CandidateSpec::new(diag, psi)
    }
}

/// The final-form pair `(A, B)` built from a [`CandidateSpec`].
#[derive(Clone, Debug)]
pub struct Candidate {
    pub a: Matrix,
    pub b: Matrix,
    pub a_squared: Matrix,
    /// Factor `c` with `B = c D` (premise side) or `B = (c D)^p` (converse side).
    pub normalisation: Real,
}

struct Roots {
    a: Matrix,
    a_inv: Matrix,
    eig: EigResult,
}

fn roots(a_squared: &Matrix, cfg: &PrecisionConfig) -> Result<Roots> {
    let eig = hermitian_eig(a_squared, cfg)?;
    let top = eig.values[0].clone();
    let min = eig.min_value();
    if *min <= cfg.tol(&top) {
        return Err(Error::Degenerate(format!("A^2 has eigenvalue {:.3e}", min.to_f64())));
    }
    let sqrt: Vec<Real> = eig.values.iter().map(|v| v.clone().sqrt()).collect();
    let inv: Vec<Real> = sqrt.iter().map(|v| v.clone().recip()).collect();
    let pd = MatrixFlags::HERMITIAN | MatrixFlags::PSD | MatrixFlags::POSITIVE_DEFINITE;
    Ok(Roots { a: eig.reconstruct_with(&sqrt).with_flags(pd), a_inv: eig.reconstruct_with(&inv).with_flags(pd), eig })
}

/// `A = (A^2)^{1/2}` and `B = c D` with `c = ||A^-1 D A^2 D A^-1||^{-1/2}`, so
/// that `(ABA)^2 <= A^4` holds with equality attained.
pub fn construct_candidate(spec: &CandidateSpec, cfg: &PrecisionConfig) -> Result<Candidate> {
    let prec = cfg.bits();
    let a_squared = spec.a_squared(prec);
    let r = roots(&a_squared, cfg)?;
    let d = spec.d_matrix(prec);
    // A^-1 D A^2 D A^-1 = Y Y* with Y = A^-1 D A
    let y = &(&r.a_inv * &d) * &r.a;
    let c = operator_norm(&y, cfg)?.recip();
    let b = d.scale(&c).with_flags(MatrixFlags::HERMITIAN | MatrixFlags::PSD | MatrixFlags::DIAGONAL);
    Ok(Candidate { a: r.a, b, a_squared, normalisation: c })
}

/// Same `A`, with `B = (c D)^p` where `c` makes `(A B^{1/p} A)^{2p} <= A^{4p}`
/// tight: `c^{2p} = 1 / lmax(A^{-2p} (A D A)^{2p} A^{-2p})`.
pub fn construct_converse_candidate(spec: &CandidateSpec, p: &Exponent, cfg: &PrecisionConfig) -> Result<Candidate> {
    let prec = cfg.bits();
    let pr = p.to_real(cfg);
    let a_squared = spec.a_squared(prec);
    let r = roots(&a_squared, cfg)?;
    let d = spec.d_matrix(prec);
    let ada = (&(&r.a * &d) * &r.a).hermitian_part();
    let ada_2p = psd_power(&ada, &Float::with_val(prec, &pr * 2u32), cfg)?;
    let neg_p = Float::with_val(prec, -&pr);
    let a_neg_2p = r.eig.reconstruct_with(&r.eig.values.iter().map(|v| real_power(v, &neg_p)).collect::<Result<Vec<_>>>()?);
    let sandwich = (&(&a_neg_2p * &ada_2p) * &a_neg_2p).hermitian_part();
    let top = crate::linalg::hermitian_eigenvalues(&sandwich, cfg)?.swap_remove(0);
    // c = top^{-1/(2p)}
    let exponent = Float::with_val(prec, -(Float::with_val(prec, &pr * 2u32).recip()));
    let c = real_power(&top, &exponent)?;
    let lam: Vec<Real> = spec.with_prec(prec).diag.iter().map(|v| real_power(&Float::with_val(prec, v * &c), &pr)).collect::<Result<_>>()?;
    let b = Matrix::diag(&lam, prec);
    Ok(Candidate { a: r.a, b, a_squared, normalisation: c })
}

/// Maps a final-form pair `(A_f, B_f)` to `(A, B) = (A_f^{-2}, A_f B_f^{1/p} A_f)`,
/// for which `||B^p A^p|| <= ||(BA)^p||` is equivalent to the final-form
/// implication at `(A_f, B_f)`.
pub fn lift_to_product_pair(a_f: &Matrix, b_f: &Matrix, p: &Exponent, cfg: &PrecisionConfig) -> Result<(Matrix, Matrix)> {
    let prec = cfg.bits();
    let inv_p = Float::with_val(prec, p.to_real(cfg).recip());
    let a = psd_power(a_f, &cfg.real(-2), cfg)?;
    let b_root = psd_power(b_f, &inv_p, cfg)?;
    let b = (&(a_f * &b_root) * a_f).hermitian_part();
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::loewner_leq;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::with_digits(50).unwrap()
    }

    #[test]
    fn draw_respects_floors() {
        let cfg = cfg();
        let mut rng = RngStream::new(1, 0);
        for law in [DiagonalLaw::LogUniform, DiagonalLaw::Uniform] {
            for _ in 0..20 {
                let s = CandidateSpec::draw(&mut rng, 4, law, &cfg);
                assert!(CandidateSpec::new(s.diag.clone(), s.psi.clone()).is_ok());
                for z in &s.psi {
                    assert!(z.abs() >= PSI_FLOOR);
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let cfg = cfg();
        let mut rng = RngStream::new(2, 0);
        let s = CandidateSpec::draw(&mut rng, 3, DiagonalLaw::LogUniform, &cfg);
        let back = CandidateSpec::from_json(&s.to_json(&cfg), None).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn premise_is_tight() {
        let cfg = cfg();
        let mut rng = RngStream::new(3, 0);
        for _ in 0..5 {
            let s = CandidateSpec::draw(&mut rng, 3, DiagonalLaw::LogUniform, &cfg);
            let c = construct_candidate(&s, &cfg).unwrap();
            let a4 = (&c.a_squared * &c.a_squared).hermitian_part();
            let aba = (&(&c.a * &c.b) * &c.a).hermitian_part();
            let v = loewner_leq(&(&aba * &aba).hermitian_part(), &a4, &cfg).unwrap();
            assert!(v.margin.clone().abs() <= v.tolerance, "{}", v.margin.to_f64());
            // ||A^-1 B A^2 B A^-1|| = 1
            let a_inv = psd_power(&c.a, &cfg.real(-1), &cfg).unwrap();
            let m = &(&(&(&a_inv * &c.b) * &c.a_squared) * &c.b) * &a_inv;
            let n = operator_norm(&m, &cfg).unwrap();
            assert!(Float::with_val(cfg.bits(), n - 1u32).abs() < cfg.tol(&cfg.one()) * 1000u32);
        }
    }

    #[test]
    fn converse_conclusion_is_tight() {
        let cfg = cfg();
        let p: Exponent = "1.15".parse().unwrap();
        let mut rng = RngStream::new(4, 0);
        let s = CandidateSpec::draw(&mut rng, 3, DiagonalLaw::LogUniform, &cfg);
        let c = construct_converse_candidate(&s, &p, &cfg).unwrap();
        let r = crate::theorems::check_implication(&c.a, &c.b, &p, &cfg).unwrap();
        let tol = Float::with_val(cfg.bits(), &r.conclusion.tolerance * 1000u32);
        assert!(r.conclusion.margin.clone().abs() <= tol, "{}", r.conclusion.margin.to_f64());
    }

    #[test]
    fn one_dimensional_candidate() {
        let cfg = cfg();
        let s = CandidateSpec::new(vec![cfg.real(0.5)], vec![Complex::one(cfg.bits())]).unwrap();
        let c = construct_candidate(&s, &cfg).unwrap();
        // A^2 = 4/3, B = c/2 with c = 1/||D|| = 2: B = 1
        assert!(Float::with_val(cfg.bits(), c.b.get(0, 0).re.clone() - 1u32).abs() < cfg.tau());
    }

    #[test]
    fn rejects_bad_specs() {
        let cfg = cfg();
        let one = Complex::one(cfg.bits());
        assert!(CandidateSpec::new(vec![cfg.real(1.0)], vec![one.clone()]).is_err());
        assert!(CandidateSpec::new(vec![cfg.real(0.5), cfg.real(0.5)], vec![one.clone(), one.clone()]).is_err());
        assert!(CandidateSpec::new(vec![cfg.real(0.5)], vec![Complex::zero(cfg.bits())]).is_err());
    }
}
