use rug::Float;
use serde::{Deserialize, Serialize};

use super::decompose::decompose_pair;
use super::validity::split_power_proven;
use super::{input_hash, Direction};
use crate::error::{Error, Result};
use crate::linalg::{
    certify_positive_definite, certify_psd, hermitian_eig, hermitian_eigenvalues, loewner_leq, operator_norm,
    psd_power, Matrix, LoewnerVerdict,
};
use crate::numerics::{real_power, real_to_string, Exponent, PrecisionConfig, Real};

/// Both sides of `(ABA)^2 <= A^4  =>  (A B^{1/p} A)^{2p} <= A^{4p}`.
#[derive(Clone, Debug)]
pub struct ImplicationReport {
    pub p: Exponent,
    pub premise: LoewnerVerdict,
    pub conclusion: LoewnerVerdict,
    /// The forward implication (p <= 1) or its converse (p >= 1) is proven
    /// at this `p` and dimension.
    pub proven: bool,
    pub input_hash: String,
}

impl ImplicationReport {
    pub fn premise_holds(&self) -> bool {
        self.premise.verdict
    }

    pub fn conclusion_holds(&self) -> bool {
        self.conclusion.verdict
    }

    /// `min eig(A^{4p} - (A B^{1/p} A)^{2p})`; negative when the conclusion fails.
    pub fn conclusion_margin(&self) -> &Real {
        &self.conclusion.margin
    }

    /// Forward for `p <= 1`, converse for `p > 1`.
    pub fn direction(&self) -> Direction {
        if self.p.le_int(1) {
            Direction::Forward
        } else {
            Direction::Reversed
        }
    }

    /// The implication under test fails although it is proven here.
    pub fn unexpected_violation(&self) -> bool {
        self.proven
            && match self.direction() {
                Direction::Forward => self.premise_holds() && !self.conclusion_holds(),
                Direction::Reversed => self.conclusion_holds() && !self.premise_holds(),
            }
    }

    pub fn to_json(&self) -> ImplicationJson {
        ImplicationJson {
            p: self.p.to_string(),
            premise: self.premise.verdict,
            premise_margin: real_to_string(&self.premise.margin),
            conclusion: self.conclusion.verdict,
            conclusion_margin: real_to_string(&self.conclusion.margin),
            proven: self.proven,
            input_hash: self.input_hash.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicationJson {
    pub p: String,
    pub premise: bool,
    pub premise_margin: String,
    pub conclusion: bool,
    pub conclusion_margin: String,
    pub proven: bool,
    pub input_hash: String,
}

fn square_hermitian(x: &Matrix) -> Matrix {
    (x * x).hermitian_part()
}

pub fn check_implication(a: &Matrix, b: &Matrix, p: &Exponent, cfg: &PrecisionConfig) -> Result<ImplicationReport> {
    if !a.is_square() || a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.dim(), b.dim())));
    }
    if !p.is_positive() {
        return Err(Error::Domain(format!("exponent {p} must be positive")));
    }
    let hash = input_hash(&[a, b], Some(p));
    let a = certify_positive_definite(a, cfg)?;
    let b = certify_psd(b, cfg)?;
    let pr = p.to_real(cfg);
    let prec = cfg.bits();

    let a2 = square_hermitian(&a);
    let a4 = square_hermitian(&a2);
    let aba = (&(&a * &b) * &a).hermitian_part();
    let premise = loewner_leq(&square_hermitian(&aba), &a4, cfg)?;

    let b_root = psd_power(&b, &Float::with_val(prec, pr.recip_ref()), cfg)?;
    let inner = (&(&a * &b_root) * &a).hermitian_part();
    let two_p = Float::with_val(prec, &pr * 2u32);
    let lhs = psd_power(&inner, &two_p, cfg)?;
    let rhs = psd_power(&a2, &two_p, cfg)?;
    let conclusion = loewner_leq(&lhs, &rhs, cfg)?;

    let direction = if p.le_int(1) { Direction::Forward } else { Direction::Reversed };
    Ok(ImplicationReport {
        p: p.clone(),
        premise,
        conclusion,
        proven: split_power_proven(a.rows(), p, direction),
        input_hash: hash,
    })
}

/// Three-way classification of a margin against its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormVerdict {
    Holds,
    Boundary,
    Fails,
}

impl FormVerdict {
    fn classify(margin: &Real, tolerance: &Real) -> FormVerdict {
        if margin.clone().abs() <= *tolerance {
            FormVerdict::Boundary
        } else if margin.is_sign_positive() {
            FormVerdict::Holds
        } else {
            FormVerdict::Fails
        }
    }
}

/// One form of the inequality evaluated on an instance.
#[derive(Clone, Debug)]
pub struct FormOutcome {
    pub verdict: FormVerdict,
    /// Positive when the inequality holds.
    pub margin: Real,
    pub tolerance: Real,
}

impl FormOutcome {
    fn new(margin: Real, scale: &Real, cfg: &PrecisionConfig) -> FormOutcome {
        let tolerance = cfg.tol(scale);
        FormOutcome { verdict: FormVerdict::classify(&margin, &tolerance), margin, tolerance }
    }
}

/// The same instance judged by the norm inequality
/// `||B^p A^p|| <= ||(BA)^p||` (`norm_form`), by the normalised
/// `Lambda`/`C` form from [`decompose_pair`] (`similarity_form`) and by the
/// final `(ABA)^2 <= A^4` form with `A = C^{1/2}`, `B = Lambda^p`
/// (`final_form`).
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub p: Exponent,
    pub norm_form: FormOutcome,
    pub similarity_form: FormOutcome,
    pub final_form: FormOutcome,
    pub input_hash: String,
}

impl EquivalenceReport {
    pub fn verdicts(&self) -> [FormVerdict; 3] {
        [self.norm_form.verdict, self.similarity_form.verdict, self.final_form.verdict]
    }

    /// No form holds strictly while another fails strictly.
    pub fn agree(&self) -> bool {
        let v = self.verdicts();
        !(v.contains(&FormVerdict::Holds) && v.contains(&FormVerdict::Fails))
    }

    pub fn to_json(&self) -> EquivalenceJson {
        let form = |f: &FormOutcome| FormJson {
            verdict: f.verdict,
            margin: real_to_string(&f.margin),
            tolerance: real_to_string(&f.tolerance),
        };
        EquivalenceJson {
            p: self.p.to_string(),
            agree: self.agree(),
            norm_form: form(&self.norm_form),
            similarity_form: form(&self.similarity_form),
            final_form: form(&self.final_form),
            input_hash: self.input_hash.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub verdict: FormVerdict,
    pub margin: String,
    pub tolerance: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceJson {
    pub p: String,
    pub agree: bool,
    pub norm_form: FormJson,
    pub similarity_form: FormJson,
    pub final_form: FormJson,
    pub input_hash: String,
}

fn relative(margin: Real, scale: &Real) -> Real {
    margin / scale
}

/// Evaluates the three forms for `0 < p <= 1`. Margins are divided by the
/// size of the larger side so the three are on a common scale.
pub fn check_equivalent_forms(a: &Matrix, b: &Matrix, p: &Exponent, cfg: &PrecisionConfig) -> Result<EquivalenceReport> {
    if !p.is_positive() || !p.le_int(1) {
        return Err(Error::Domain(format!("exponent {p} outside (0, 1]")));
    }
    let hash = input_hash(&[a, b], Some(p));
    let a = certify_positive_definite(a, cfg)?;
    let b = certify_psd(b, cfg)?;
    let prec = cfg.bits();
    let one = cfg.one();
    let pr = p.to_real(cfg);
    let two_p = Float::with_val(prec, &pr * 2u32);
    let dec = decompose_pair(&a, &b, cfg)?;

    if dec.lambda[0].is_zero() {
        let zero = || FormOutcome::new(cfg.zero(), &one, cfg);
        return Ok(EquivalenceReport { p: p.clone(), norm_form: zero(), similarity_form: zero(), final_form: zero(), input_hash: hash });
    }

    // ||B^p A^p|| <= ||(BA)^p||
    let split = &psd_power(&b, &pr, cfg)? * &psd_power(&a, &pr, cfg)?;
    let lhs = operator_norm(&split, cfg)?;
    let rhs = operator_norm(&dec.ba_power(&pr)?, cfg)?;
    let scale = Float::with_val(prec, lhs.max_ref(&rhs));
    let norm_form = FormOutcome::new(relative(Float::with_val(prec, &rhs - &lhs), &scale), &one, cfg);

    // Lambda_t^p C Lambda_t^p <= C made tight: t^{2p} = 1 / lmax(C^{-1/2} L^p C L^p C^{-1/2})
    let c = dec.c_matrix();
    let ec = hermitian_eig(&c, cfg)?;
    let c_inv_half = ec.reconstruct_with(&ec.values.iter().map(|v| v.clone().sqrt().recip()).collect::<Vec<_>>());
    let c_half = ec.reconstruct_with(&ec.values.iter().map(|v| v.clone().sqrt()).collect::<Vec<_>>());
    let lam_p: Vec<Real> = dec.lambda.iter().map(|v| real_power(v, &pr)).collect::<Result<_>>()?;
    let lam_p = Matrix::diag(&lam_p, prec);
    let y = &(&c_inv_half * &lam_p) * &c_half;
    let y_norm = operator_norm(&y, cfg)?;
    // t^p = 1 / ||C^{-1/2} L^p C^{1/2}||
    let t = real_power(&Float::with_val(prec, y_norm.recip_ref()), &Float::with_val(prec, pr.recip_ref()))?;
    let lambda_t: Vec<Real> = dec.lambda.iter().map(|v| Float::with_val(prec, v * &t)).collect();

    // B_t^{2p} <= A^{-2p} with B_t = S^-* L_t S^-1 and A^-1 = S^-* S^-1
    let s_inv_adj = dec.s_inv.adjoint();
    let b_t = (&(&s_inv_adj * &Matrix::diag(&lambda_t, prec)) * &dec.s_inv).hermitian_part();
    let a_inv = (&s_inv_adj * &dec.s_inv).hermitian_part();
    let lhs = psd_power(&b_t, &two_p, cfg)?;
    let rhs = psd_power(&a_inv, &two_p, cfg)?;
    let similarity_form = loewner_form(&lhs, &rhs, cfg)?;

    // (A_f B_f^{1/p} A_f)^{2p} <= A_f^{4p} with A_f = C^{1/2}, B_f = Lambda_t^p
    let b_root = Matrix::diag(&lambda_t, prec);
    let inner = (&(&c_half * &b_root) * &c_half).hermitian_part();
    let lhs = psd_power(&inner, &two_p, cfg)?;
    let rhs = psd_power(&c, &two_p, cfg)?;
    let final_form = loewner_form(&lhs, &rhs, cfg)?;

    Ok(EquivalenceReport { p: p.clone(), norm_form, similarity_form, final_form, input_hash: hash })
}

/// `min eig(rhs - lhs)` relative to the largest eigenvalue of `rhs`.
fn loewner_form(lhs: &Matrix, rhs: &Matrix, cfg: &PrecisionConfig) -> Result<FormOutcome> {
    let v: LoewnerVerdict = loewner_leq(lhs, rhs, cfg)?;
    let top = hermitian_eigenvalues(rhs, cfg)?.into_iter().next().expect("nonempty");
    let scale = top.max(&cfg.one());
    Ok(FormOutcome::new(relative(v.margin, &scale), &cfg.one(), cfg))
}
