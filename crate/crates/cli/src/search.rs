use serde::{Deserialize, Serialize};

use svmaj::numerics::{real_to_string, Exponent, PrecisionConfig};
use svmaj::search::{
    confirm, exponent_grid, search_counterexamples, sweep, Instance, OutcomeJson, SearchConfig, SearchOutcome,
};

use crate::args::{CheckArgs, Common, Format, SearchArgs, SearchOptions, SweepArgs, Target};
use crate::check::{self, CheckOutput, CheckRun};
use crate::{read_input, usage, write_output, Failure};

fn precision(digits: u32) -> Result<PrecisionConfig, Failure> {
    PrecisionConfig::with_digits(digits).map_err(usage)
}

fn parse_exponent(s: &str) -> Result<Exponent, Failure> {
    s.parse().map_err(usage)
}

pub fn cmd_check(a: CheckArgs) -> Result<(), Failure> {
    let (run, output, results) = match &a.replay {
        Some(path) => {
            let previous: CheckOutput = serde_json::from_str(&read_input(path)?).map_err(usage)?;
            let target = Target::from_name(&previous.target).ok_or_else(|| usage("unknown target in replay file"))?;
            if target != a.target {
                return Err(usage(format!("replay file holds {} results", previous.target)));
            }
            let run = CheckRun {
                target,
                dim: previous.dim,
                p: parse_exponent(&previous.p)?,
                direction: previous.direction,
                seed: previous.seed,
                cfg: precision(previous.digits)?,
            };
            let (output, results) = run.replay(&previous);
            (run, output, results)
        }
        None => {
            let run = CheckRun {
                target: a.target,
                dim: a.common.dim,
                p: a.p.clone().ok_or_else(|| usage("--p is required"))?,
                direction: a.direction,
                seed: a.common.seed,
                cfg: precision(a.common.digits)?,
            };
            run.validate().map_err(usage)?;
            if a.common.trials == 0 {
                return Err(usage("--trials must be positive"));
            }
            let (output, results) = run.run(a.common.trials, a.common.workers);
            (run, output, results)
        }
    };
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&output).map_err(|e| Failure::Io(e.to_string()))?,
        Format::Csv => check::to_csv(&results)?,
    };
    write_output(a.common.out.as_deref(), &text)?;
    eprintln!(
        "{} d={} p={}: {} passed, {} failed ({} unexpected), {} skipped",
        run.target.name(),
        output.dim,
        output.p,
        output.passed,
        output.failed,
        output.unexpected,
        output.skipped
    );
    if output.unexpected > 0 {
        return Err(Failure::Violation);
    }
    Ok(())
}

fn search_config(common: &Common, p: Exponent, options: &SearchOptions) -> Result<SearchConfig, Failure> {
    if common.dim < 2 {
        return Err(usage("searches need --dim >= 2"));
    }
    if common.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let mut c = SearchConfig::new(common.dim, p, common.trials, common.seed, precision(common.digits)?);
    if let Some(o) = options.objective {
        c.objective = o;
    }
    if let Some(d) = options.direction {
        c.direction = d;
    }
    c.sampler = options.sampler;
    c.diagonal_law = options.diag_law;
    c.refine_steps = options.refine_steps;
    c.workers = common.workers;
    Ok(c)
}

fn records_csv(outcome: &SearchOutcome) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(["trial", "refinement_step", "k", "margin", "relative_margin", "verified_margin"]).map_err(err)?;
    for r in &outcome.records {
        w.write_record([
            r.trial_index.to_string(),
            r.refinement_step.map(|s| s.to_string()).unwrap_or_default(),
            r.margin.k.map(|k| k.to_string()).unwrap_or_default(),
            real_to_string(&r.margin.value),
            format!("{:e}", r.margin.relative()),
            real_to_string(&r.verified_margin),
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
struct ReplayedRecord {
    trial_index: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    refinement_step: Option<usize>,
    margin: String,
    replayed_margin: Option<String>,
    confirmed: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct ReplayOutput {
    replayed: usize,
    confirmed: usize,
    records: Vec<ReplayedRecord>,
}

fn replay_search(previous: &OutcomeJson) -> Result<ReplayOutput, Failure> {
    let cfg = precision(previous.digits)?;
    let mut c = SearchConfig::new(previous.dim, parse_exponent(&previous.p)?, previous.trials.max(1), previous.seed, cfg);
    c.objective = previous.objective;
    c.direction = previous.direction;
    if let Some(s) = previous.sampler {
        c.sampler = s;
    }
    c.diagonal_law = previous.diagonal_law;
    let mut records = Vec::new();
    for r in &previous.records {
        let instance = Instance::from_json(&r.instance, Some(&c.precision)).map_err(usage)?;
        let replayed = c.evaluate(&instance, &c.precision).ok();
        let confirmed = match &replayed {
            Some(m) => m.exceeds(svmaj::search::THRESHOLD_FACTOR, &c.precision) && confirm(&c, &instance, m).map_err(usage)?.is_some(),
            None => false,
        };
        records.push(ReplayedRecord {
            trial_index: r.trial_index,
            refinement_step: r.refinement_step,
            margin: r.margin.clone(),
            replayed_margin: replayed.map(|m| real_to_string(&m.value)),
            confirmed,
        });
    }
    Ok(ReplayOutput { replayed: records.len(), confirmed: records.iter().filter(|r| r.confirmed).count(), records })
}

pub fn cmd_search(a: SearchArgs) -> Result<(), Failure> {
    if let Some(path) = &a.replay {
        let previous: OutcomeJson = serde_json::from_str(&read_input(path)?).map_err(usage)?;
        let out = replay_search(&previous)?;
        eprintln!("replayed {} records, {} confirmed", out.replayed, out.confirmed);
        let text = serde_json::to_string_pretty(&out).map_err(|e| Failure::Io(e.to_string()))?;
        return write_output(a.common.out.as_deref(), &text);
    }
    let p = a.p.clone().ok_or_else(|| usage("--p is required"))?;
    let config = search_config(&a.common, p, &a.options)?;
    let outcome = search_counterexamples(&config).map_err(usage)?;
    eprintln!(
        "{} {} d={} p={}: found {} in {} trials ({} rejected, {} unconfirmed)",
        config.objective,
        config.direction,
        config.dim,
        config.p,
        outcome.found(),
        config.trials,
        outcome.rejected,
        outcome.unconfirmed
    );
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&outcome.to_json()).map_err(|e| Failure::Io(e.to_string()))?,
        Format::Csv => records_csv(&outcome)?,
    };
    write_output(a.common.out.as_deref(), &text)
}

#[derive(Debug, Serialize)]
struct SweepRowJson {
    p: String,
    trials: u64,
    violations: usize,
    max_margin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
}

pub fn cmd_sweep(a: SweepArgs) -> Result<(), Failure> {
    let grid = exponent_grid(&a.p_from, &a.p_to, &a.p_step).map_err(usage)?;
    if grid.is_empty() {
        return Err(usage("empty exponent range"));
    }
    let base = search_config(&a.common, grid[0].clone(), &a.options)?;
    let table = sweep(&base, &grid, |row| {
        eprintln!("p={} violations={} ({:.1}s)", row.p, row.violations, row.seconds);
    })
    .map_err(usage)?;
    let text = match a.format {
        Format::Csv => table.to_csv(!a.no_timing).map_err(|e| Failure::Io(e.to_string()))?,
        Format::Json => {
            let rows: Vec<SweepRowJson> = table
                .rows
                .iter()
                .map(|r| SweepRowJson {
                    p: r.p.to_string(),
                    trials: r.trials,
                    violations: r.violations,
                    max_margin: r.max_margin.as_ref().map(real_to_string),
                    seconds: (!a.no_timing).then_some(r.seconds),
                })
                .collect();
            serde_json::to_string_pretty(&rows).map_err(|e| Failure::Io(e.to_string()))?
        }
    };
    write_output(a.common.out.as_deref(), &text)
}
