use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use super::candidate::{construct_candidate, construct_converse_candidate, lift_to_product_pair, CandidateSpec, DiagonalLaw};
use super::margins::{converse_violation_margin, direct_sigma_margins, violation_margin_scaled, Margin};
use super::record::{CounterexampleRecord, Instance, Objective, RecordJson, Sampler};
use crate::error::{Error, Result};
use crate::linalg::{psd_power, Matrix};
use crate::numerics::{real_to_string, Exponent, PrecisionConfig, RngStream};
use crate::sample::{complex_normal_matrix, gram, random_psd};
use crate::theorems::Direction;

/// Violations must exceed this multiple of `tau * scale`.
pub const THRESHOLD_FACTOR: u32 = 10;
/// Extra digits used to confirm a violation.
pub const VERIFY_EXTRA_DIGITS: i32 = 20;
/// Verified and original margins must agree to this relative difference.
pub const VERIFY_AGREEMENT: f64 = 1e-5;
/// Random streams at and above this index drive local refinement.
const REFINE_STREAM: u64 = 1 << 62;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub dim: usize,
    pub p: Exponent,
    pub trials: u64,
    pub seed: u64,
    pub precision: PrecisionConfig,
    pub objective: Objective,
    pub direction: Direction,
    pub sampler: Sampler,
    pub diagonal_law: DiagonalLaw,
    /// Gaussian perturbations applied to the best trial afterwards.
    pub refine_steps: usize,
    /// Relative size of each perturbation.
    pub refine_scale: f64,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
}

impl SearchConfig {
    /// Defaults: forward premise-form search for `p <= 1`, reversed
    /// direct-form search for `p > 1`; 50 refinement steps of size 1e-2.
    pub fn new(dim: usize, p: Exponent, trials: u64, seed: u64, precision: PrecisionConfig) -> Self {
        let (objective, direction) = if p.le_int(1) {
            (Objective::PremiseForm, Direction::Forward)
        } else {
            (Objective::DirectForm, Direction::Reversed)
        };
        SearchConfig {
            dim,
            p,
            trials,
            seed,
            precision,
            objective,
            direction,
            sampler: Sampler::default(),
            diagonal_law: DiagonalLaw::default(),
            refine_steps: 50,
            refine_scale: 1e-2,
            workers: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::OutOfRange(format!("dimension {} < 2", self.dim)));
        }
        if self.trials == 0 {
            return Err(Error::OutOfRange("no trials".into()));
        }
        if !self.p.is_positive() {
            return Err(Error::Domain(format!("exponent {} must be positive", self.p)));
        }
        Ok(())
    }

    fn uses_candidates(&self) -> bool {
        self.objective == Objective::PremiseForm || self.sampler == Sampler::Lifted
    }

    /// Draws the instance of trial `index` (independent of threading).
    pub fn draw_instance(&self, index: u64) -> Instance {
        let mut rng = RngStream::new(self.seed, index);
        let cfg = &self.precision;
        if self.uses_candidates() {
            Instance::Candidate(CandidateSpec::draw(&mut rng, self.dim, self.diagonal_law, cfg))
        } else {
            let a = random_psd(&mut rng, self.dim, cfg);
            let b = random_psd(&mut rng, self.dim, cfg);
            Instance::Pair { a, b }
        }
    }

    /// The product pair `(A, B)` judged by the direct form for this
    /// instance. Candidates are normalised on the side matching the
    /// direction and lifted.
    pub fn product_pair(&self, instance: &Instance, cfg: &PrecisionConfig) -> Result<(Matrix, Matrix)> {
        match instance {
            Instance::Pair { a, b } => Ok((a.clone(), b.clone())),
            Instance::Candidate(spec) => {
                let c = match self.direction {
                    Direction::Forward => construct_candidate(spec, cfg)?,
                    Direction::Reversed => construct_converse_candidate(spec, &self.p, cfg)?,
                };
                lift_to_product_pair(&c.a, &c.b, &self.p, cfg)
            }
        }
    }

    /// The search objective; positive values are violations.
    pub fn evaluate(&self, instance: &Instance, cfg: &PrecisionConfig) -> Result<Margin> {
        match self.objective {
            Objective::PremiseForm => {
                let Instance::Candidate(spec) = instance else {
                    return Err(Error::Domain("premise form needs a candidate".into()));
                };
                match self.direction {
                    Direction::Forward => {
                        let c = construct_candidate(spec, cfg)?;
                        violation_margin_scaled(&c.a, &c.b, &self.p, cfg)
                    }
                    Direction::Reversed => {
                        let c = construct_converse_candidate(spec, &self.p, cfg)?;
                        converse_violation_margin(&c.a, &c.b, &self.p, cfg)
                    }
                }
            }
            Objective::DirectForm => {
                let (a, b) = self.product_pair(instance, cfg)?;
                let (margins, scale) = direct_sigma_margins(&a, &b, &self.p, cfg)?;
                let signed = margins.into_iter().map(|m| match self.direction {
                    Direction::Forward => m,
                    Direction::Reversed => -m,
                });
                let (k, value) = signed
                    .enumerate()
                    .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(Ordering::Equal).then(y.0.cmp(&x.0)))
                    .expect("nonempty");
                Ok(Margin { value, scale, k: Some(k + 1) })
            }
        }
    }

    fn perturb(&self, instance: &Instance, rng: &mut RngStream) -> Option<Instance> {
        let cfg = &self.precision;
        match instance {
            Instance::Candidate(spec) => spec.perturb(rng, self.refine_scale, cfg).map(Instance::Candidate),
            Instance::Pair { a, b } => {
                let mut step = |m: &Matrix| -> Option<Matrix> {
                    let root = psd_power(m, &cfg.real(0.5), cfg).ok()?;
                    let size = root.frobenius_norm() / cfg.real(self.dim as f64).sqrt() * cfg.real(self.refine_scale);
                    let noise = complex_normal_matrix(rng, self.dim, self.dim, cfg).scale(&size);
                    Some(gram(&root.try_add(&noise).ok()?))
                };
                let a = step(a)?;
                let b = step(b)?;
                Some(Instance::Pair { a, b })
            }
        }
    }
}

/// Everything a search produced.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub config: SearchConfig,
    /// Sorted by descending margin, then trial index.
    pub records: Vec<CounterexampleRecord>,
    /// Trials whose instance could not be evaluated (degenerate draws).
    pub rejected: u64,
    /// Threshold crossings that failed confirmation at higher precision.
    pub unconfirmed: u64,
    /// Largest objective over all trials and refinement steps.
    pub best: Option<Margin>,
    pub best_trial: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeJson {
    pub dim: usize,
    pub p: String,
    pub objective: Objective,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<Sampler>,
    pub diagonal_law: DiagonalLaw,
    pub seed: u64,
    pub digits: u32,
    pub trials: u64,
    pub refine_steps: usize,
    pub found: usize,
    pub rejected: u64,
    pub unconfirmed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_margin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_trial: Option<u64>,
    pub records: Vec<RecordJson>,
}

impl SearchOutcome {
    pub fn found(&self) -> usize {
        self.records.len()
    }

    pub fn to_json(&self) -> OutcomeJson {
        let c = &self.config;
        let sampler = (c.objective == Objective::DirectForm).then_some(c.sampler);
        OutcomeJson {
            dim: c.dim,
            p: c.p.to_string(),
            objective: c.objective,
            direction: c.direction,
            sampler,
            diagonal_law: c.diagonal_law,
            seed: c.seed,
            digits: c.precision.digits(),
            trials: c.trials,
            refine_steps: c.refine_steps,
            found: self.records.len(),
            rejected: self.rejected,
            unconfirmed: self.unconfirmed,
            best_margin: self.best.as_ref().map(|m| real_to_string(&m.value)),
            best_trial: self.best_trial,
            records: self.records.iter().map(|r| r.to_json(&c.precision)).collect(),
        }
    }
}

fn cmp_margin(a: &Margin, b: &Margin) -> Ordering {
    a.value.partial_cmp(&b.value).unwrap_or(Ordering::Equal)
}

/// Recomputes the objective at `digits + 20`; `Some(margin)` when it still
/// exceeds the threshold and agrees with `original` to 5 significant figures.
pub fn confirm(config: &SearchConfig, instance: &Instance, original: &Margin) -> Result<Option<Margin>> {
    let hi = config.precision.shifted(VERIFY_EXTRA_DIGITS)?;
    let lifted = instance.with_prec(hi.bits());
    let m = config.evaluate(&lifted, &hi)?;
    if !m.exceeds(THRESHOLD_FACTOR, &hi) || m.k != original.k {
        return Ok(None);
    }
    let prec = hi.bits();
    let diff = Float::with_val(prec, &m.value - &original.value).abs();
    let bound = Float::with_val(prec, m.value.abs_ref()) * VERIFY_AGREEMENT;
    Ok((diff <= bound).then_some(m))
}

fn record(
    config: &SearchConfig,
    instance: Instance,
    margin: Margin,
    verified: Margin,
    trial_index: u64,
    refinement_step: Option<usize>,
) -> CounterexampleRecord {
    CounterexampleRecord {
        instance,
        p: config.p.clone(),
        objective: config.objective,
        direction: config.direction,
        sampler: (config.objective == Objective::DirectForm).then_some(config.sampler),
        margin,
        digits: config.precision.digits(),
        verified_digits: config.precision.digits() + VERIFY_EXTRA_DIGITS as u32,
        verified_margin: verified.value,
        seed: config.seed,
        trial_index,
        refinement_step,
    }
}

fn run_trials(config: &SearchConfig) -> Vec<Option<Margin>> {
    let eval = |i: u64| config.evaluate(&config.draw_instance(i), &config.precision).ok();
    let go = || (0..config.trials).into_par_iter().map(eval).collect::<Vec<_>>();
    if config.workers == 0 {
        return go();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(config.workers).build() {
        Ok(pool) => pool.install(go),
        Err(_) => go(),
    }
}

/// Seeded random search. Trial `i` uses the stream `(seed, i)`, so results
/// do not depend on the number of workers. Every margin above
/// `10 tau * scale` is confirmed at `digits + 20` before it is recorded;
/// afterwards the best trial is refined by `refine_steps` perturbations,
/// keeping improvements.
pub fn search_counterexamples(config: &SearchConfig) -> Result<SearchOutcome> {
    config.validate()?;
    let cfg = &config.precision;
    let margins = run_trials(config);
    let rejected = margins.iter().filter(|m| m.is_none()).count() as u64;

    let mut records = Vec::new();
    let mut unconfirmed = 0u64;
    let mut best: Option<(u64, Margin)> = None;
    for (i, m) in margins.into_iter().enumerate() {
        let Some(m) = m else { continue };
        let i = i as u64;
        if m.exceeds(THRESHOLD_FACTOR, cfg) {
            let instance = config.draw_instance(i);
            match confirm(config, &instance, &m)? {
                Some(v) => records.push(record(config, instance, m.clone(), v, i, None)),
                None => unconfirmed += 1,
            }
        }
        if best.as_ref().map_or(true, |(_, b)| cmp_margin(&m, b) == Ordering::Greater) {
            best = Some((i, m));
        }
    }

    let mut best_margin = best.as_ref().map(|(_, m)| m.clone());
    if let (Some((index, start)), true) = (best.as_ref(), config.refine_steps > 0) {
        let mut current = config.draw_instance(*index);
        let mut current_margin = start.clone();
        let mut improved_at = None;
        for step in 0..config.refine_steps {
            let mut rng = RngStream::new(config.seed, REFINE_STREAM + step as u64);
            let Some(next) = config.perturb(&current, &mut rng) else { continue };
            let Ok(m) = config.evaluate(&next, cfg) else { continue };
            if cmp_margin(&m, &current_margin) == Ordering::Greater {
                current = next;
                current_margin = m;
                improved_at = Some(step);
            }
        }
        if let Some(step) = improved_at {
            if current_margin.exceeds(THRESHOLD_FACTOR, cfg) {
                match confirm(config, &current, &current_margin)? {
                    Some(v) => records.push(record(config, current, current_margin.clone(), v, *index, Some(step))),
                    None => unconfirmed += 1,
                }
            }
            best_margin = Some(current_margin);
        }
    }

    records.sort_by(|a, b| {
        cmp_margin(&b.margin, &a.margin)
            .then(a.trial_index.cmp(&b.trial_index))
            .then(a.refinement_step.cmp(&b.refinement_step))
    });
    Ok(SearchOutcome {
        config: config.clone(),
        records,
        rejected,
        unconfirmed,
        best: best_margin,
        best_trial: best.map(|(i, _)| i),
    })
}

/// One row of a sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub p: Exponent,
    pub trials: u64,
    pub violations: usize,
    pub max_margin: Option<crate::numerics::Real>,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Columns `p, trials, violations, max_margin, seconds`. Rows without
    /// violations read "none found in N trials". With `timing == false`
    /// the seconds column is left empty so identical runs give identical
    /// bytes.
    pub fn to_csv(&self, timing: bool) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["p", "trials", "violations", "max_margin", "seconds"]).map_err(io)?;
        for r in &self.rows {
            let margin = match &r.max_margin {
                Some(m) => m.to_string_radix(10, Some(12)),
                None => format!("none found in {} trials", r.trials),
            };
            let seconds = if timing { format!("{:.3}", r.seconds) } else { String::new() };
            w.write_record([r.p.to_string(), r.trials.to_string(), r.violations.to_string(), margin, seconds]).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Runs [`search_counterexamples`] at every `p` of the grid with the same
/// seed, calling `on_row` after each row.
pub fn sweep(base: &SearchConfig, grid: &[Exponent], mut on_row: impl FnMut(&SweepRow)) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::OutOfRange("empty grid".into()));
    }
    let mut table = SweepTable::default();
    for p in grid {
        let config = SearchConfig { p: p.clone(), ..base.clone() };
        let start = Instant::now();
        let outcome = search_counterexamples(&config)?;
        let row = SweepRow {
            p: p.clone(),
            trials: config.trials,
            violations: outcome.found(),
            max_margin: outcome.records.first().map(|r| r.margin.value.clone()),
            seconds: start.elapsed().as_secs_f64(),
        };
        on_row(&row);
        table.rows.push(row);
    }
    Ok(table)
}

/// `from, from + step, ...` up to and including `to`, in exact arithmetic.
pub fn exponent_grid(from: &Exponent, to: &Exponent, step: &Exponent) -> Result<Vec<Exponent>> {
    if !step.is_positive() {
        return Err(Error::Domain("grid step must be positive".into()));
    }
    let mut out = Vec::new();
    let mut p = from.as_rational().clone();
    while p <= *to.as_rational() {
        out.push(Exponent::new(p.clone())?);
        p += step.as_rational();
        if out.len() > 100_000 {
            return Err(Error::OutOfRange("grid too long".into()));
        }
    }
    Ok(out)
}
