use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use svmaj::linalg::{Matrix, MatrixJson};
use svmaj::numerics::quadrature::Integrator;
use svmaj::numerics::{real_to_string, Exponent, PrecisionConfig, Real, RngStream};
use svmaj::sample::{complex_normal_matrix, random_psd, uniform_vec};
use svmaj::theorems::{
    check_equivalent_forms, check_implication, check_power_product, check_power_quotient_integral,
    check_power_quotient_psd, check_similarity_power, check_split_power, decompose_pair, Direction, PairDecomposition,
    PowerQuotientSpec,
};

use crate::args::Target;
use crate::Failure;

/// Data of one checked instance, enough to run it again.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckInstance {
    Pair { a: MatrixJson, b: MatrixJson },
    Similarity { s: MatrixJson, lambda: MatrixJson },
    Nodes { digits: u32, lambdas: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub trial_index: u64,
    pub passed: bool,
    pub unexpected: bool,
    pub instance: CheckInstance,
    pub report: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutput {
    pub target: String,
    pub dim: usize,
    pub p: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    pub seed: u64,
    pub digits: u32,
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    pub unexpected: u64,
    pub skipped: u64,
    /// Every failing instance, expected or not.
    pub failures: Vec<InstanceOutcome>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skip_reasons: Vec<SkipReason>,
}

/// A trial whose instance could not be evaluated, e.g. a degenerate draw.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipReason {
    pub trial_index: u64,
    pub error: String,
}

pub type TrialResult = Result<Evaluated, SkipReason>;

fn skip(index: u64) -> impl Fn(svmaj::Error) -> SkipReason {
    move |e| SkipReason { trial_index: index, error: e.to_string() }
}

/// Result of a single trial, with a margin for the CSV view.
pub struct Evaluated {
    pub outcome: InstanceOutcome,
    pub margin: String,
}

pub struct CheckRun {
    pub target: Target,
    pub dim: usize,
    pub p: Exponent,
    pub direction: Option<Direction>,
    pub seed: u64,
    pub cfg: PrecisionConfig,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serialisable report")
}

impl CheckRun {
    pub fn validate(&self) -> Result<(), String> {
        if self.target == Target::Equivalence && !self.p.le_int(1) {
            return Err("equivalence needs 0 < p <= 1".into());
        }
        if self.direction.is_some() && self.target != Target::Theorem1 {
            return Err("--direction applies to theorem1 only".into());
        }
        Ok(())
    }

    fn direction(&self) -> Direction {
        self.direction.unwrap_or(if self.p.le_int(1) { Direction::Forward } else { Direction::Reversed })
    }

    pub fn draw(&self, index: u64) -> CheckInstance {
        let cfg = &self.cfg;
        let mut rng = RngStream::new(self.seed, index);
        match self.target {
            Target::Theorem3 => {
                let s = complex_normal_matrix(&mut rng, self.dim, self.dim, cfg);
                let lam = uniform_vec(&mut rng, self.dim, 0.0, 1.0, cfg).expect("nonempty interval");
                CheckInstance::Similarity { s: s.to_json(cfg), lambda: Matrix::diag(&lam, cfg.bits()).to_json(cfg) }
            }
            Target::LemmaFh => {
                let lam = uniform_vec(&mut rng, self.dim, 0.0, 1.0, cfg).expect("nonempty interval");
                CheckInstance::Nodes { digits: cfg.digits(), lambdas: lam.iter().map(real_to_string).collect() }
            }
            _ => {
                let a = random_psd(&mut rng, self.dim, cfg);
                let b = random_psd(&mut rng, self.dim, cfg);
                CheckInstance::Pair { a: a.to_json(cfg), b: b.to_json(cfg) }
            }
        }
    }

    fn pair(&self, inst: &CheckInstance) -> svmaj::Result<(Matrix, Matrix)> {
        match inst {
            CheckInstance::Pair { a, b } | CheckInstance::Similarity { s: a, lambda: b } => {
                Ok((Matrix::from_json(a, Some(&self.cfg))?, Matrix::from_json(b, Some(&self.cfg))?))
            }
            CheckInstance::Nodes { .. } => Err(svmaj::Error::Parse("expected a matrix pair".into())),
        }
    }

    /// Runs the check on one instance.
    pub fn evaluate(&self, index: u64, inst: CheckInstance, integrator: &mut Integrator) -> svmaj::Result<Evaluated> {
        let cfg = &self.cfg;
        let p = &self.p;
        let (passed, unexpected, report, margin) = match self.target {
            Target::Theorem1 | Target::Theorem2 | Target::Theorem3 => {
                let (a, b) = self.pair(&inst)?;
                let c = match self.target {
                    Target::Theorem1 => check_split_power(&a, &b, p, self.direction(), cfg)?,
                    Target::Theorem2 => check_power_product(&a, &b, p, cfg)?,
                    _ => check_similarity_power(&a, &b, p, cfg)?,
                };
                (c.verdict(), c.unexpected_violation(), to_value(&c.to_json()), real_to_string(c.report.min_margin()))
            }
            Target::LemmaFh => {
                let CheckInstance::Nodes { lambdas, .. } = &inst else {
                    return Err(svmaj::Error::Parse("expected nodes".into()));
                };
                let lambdas = lambdas.iter().map(|s| cfg.parse_real(s)).collect::<svmaj::Result<Vec<Real>>>()?;
                let spec = PowerQuotientSpec::new(lambdas, p.clone())?;
                let psd = check_power_quotient_psd(&spec, cfg)?;
                let deviation = check_power_quotient_integral(&spec, integrator)?;
                let integral_ok = deviation <= cfg.tau();
                let report = serde_json::json!({
                    "psd": psd.to_json(),
                    "integral_deviation": real_to_string(&deviation),
                });
                (psd.verdict && integral_ok, psd.unexpected_violation() || !integral_ok, report, real_to_string(&psd.min_eig))
            }
            Target::LemmaDecompose => {
                let (a, b) = self.pair(&inst)?;
                let dec = decompose_pair(&a, &b, cfg)?;
                let bound = PairDecomposition::residual_bound(&a, &b, cfg);
                let residual_b = dec.b_reconstruction().try_sub(&b)?.frobenius_norm();
                let ok = dec.residual_a <= bound && dec.residual_ab <= bound && residual_b <= bound;
                let worst = [&dec.residual_a, &dec.residual_ab, &residual_b]
                    .into_iter()
                    .max_by(|x, y| x.partial_cmp(y).expect("finite"))
                    .expect("three residuals")
                    .clone();
                let report = serde_json::json!({
                    "residual_a": real_to_string(&dec.residual_a),
                    "residual_ab": real_to_string(&dec.residual_ab),
                    "residual_b": real_to_string(&residual_b),
                    "bound": real_to_string(&bound),
                    "lambda": dec.lambda.iter().map(real_to_string).collect::<Vec<_>>(),
                });
                (ok, !ok, report, real_to_string(&worst))
            }
            Target::Implication => {
                let (a, b) = self.pair(&inst)?;
                let r = check_implication(&a, &b, p, cfg)?;
                let holds = match r.direction() {
                    Direction::Forward => !r.premise_holds() || r.conclusion_holds(),
                    Direction::Reversed => !r.conclusion_holds() || r.premise_holds(),
                };
                (holds, r.unexpected_violation(), to_value(&r.to_json()), real_to_string(r.conclusion_margin()))
            }
            Target::Equivalence => {
                let (a, b) = self.pair(&inst)?;
                let r = check_equivalent_forms(&a, &b, p, cfg)?;
                (r.agree(), !r.agree(), to_value(&r.to_json()), real_to_string(&r.norm_form.margin))
            }
        };
        Ok(Evaluated { outcome: InstanceOutcome { trial_index: index, passed, unexpected, instance: inst, report }, margin })
    }

    fn assemble(&self, trials: u64, results: &[TrialResult]) -> CheckOutput {
        let done: Vec<&Evaluated> = results.iter().flatten().collect();
        let skip_reasons: Vec<SkipReason> = results.iter().filter_map(|r| r.as_ref().err().cloned()).collect();
        let passed = done.iter().filter(|e| e.outcome.passed).count() as u64;
        CheckOutput {
            target: self.target.name().to_string(),
            dim: self.dim,
            p: self.p.to_string(),
            direction: (self.target == Target::Theorem1).then(|| self.direction()),
            seed: self.seed,
            digits: self.cfg.digits(),
            trials,
            passed,
            failed: done.len() as u64 - passed,
            unexpected: done.iter().filter(|e| e.outcome.unexpected).count() as u64,
            skipped: skip_reasons.len() as u64,
            failures: done.iter().filter(|e| !e.outcome.passed).map(|e| e.outcome.clone()).collect(),
            skip_reasons,
        }
    }

    pub fn run(&self, trials: u64, workers: usize) -> (CheckOutput, Vec<TrialResult>) {
        let go = || {
            (0..trials)
                .into_par_iter()
                .map_init(|| Integrator::new(self.cfg), |integ, i| self.evaluate(i, self.draw(i), integ).map_err(skip(i)))
                .collect::<Vec<_>>()
        };
        let results = with_workers(workers, go);
        (self.assemble(trials, &results), results)
    }

    pub fn replay(&self, previous: &CheckOutput) -> (CheckOutput, Vec<TrialResult>) {
        let mut integ = Integrator::new(self.cfg);
        let results: Vec<TrialResult> = previous
            .failures
            .iter()
            .map(|f| self.evaluate(f.trial_index, f.instance.clone(), &mut integ).map_err(skip(f.trial_index)))
            .collect();
        (self.assemble(previous.failures.len() as u64, &results), results)
    }
}

pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

pub fn to_csv(results: &[TrialResult]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(["trial", "passed", "unexpected", "margin"]).map_err(err)?;
    for r in results {
        match r {
            Ok(e) => w.write_record([
                e.outcome.trial_index.to_string(),
                e.outcome.passed.to_string(),
                e.outcome.unexpected.to_string(),
                e.margin.clone(),
            ]),
            Err(s) => w.write_record([s.trial_index.to_string(), "skipped".into(), String::new(), String::new()]),
        }
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}
