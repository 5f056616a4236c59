use svmaj::numerics::{Exponent, PrecisionConfig};
use svmaj::search::{
    exponent_grid, search_counterexamples, sweep, CandidateSpec, Instance, Objective, OutcomeJson,
    Sampler, SearchConfig, THRESHOLD_FACTOR,
};
use svmaj::theorems::{
    check_equivalent_forms, check_implication, check_similarity_power, similarity_pair_from_psd, Direction, FormVerdict,
};

fn e(s: &str) -> Exponent {
    s.parse().unwrap()
}

fn config(d: usize, p: &str, trials: u64) -> SearchConfig {
    SearchConfig::new(d, e(p), trials, 42, PrecisionConfig::default())
}

#[test]
fn finds_forward_violations_at_p_095() {
    let out = search_counterexamples(&config(3, "0.95", 60)).unwrap();
    assert!(out.found() > 0);
    let cfg = PrecisionConfig::default();
    for r in &out.records {
        assert!(r.margin.exceeds(THRESHOLD_FACTOR, &cfg));
        assert_eq!(r.verified_digits, 80);
    }
    assert!(out.records.windows(2).all(|w| w[0].margin.value >= w[1].margin.value));
}

#[test]
fn forward_record_breaks_conclusion_not_premise() {
    let cfg = PrecisionConfig::default();
    let c = config(3, "0.95", 40);
    let out = search_counterexamples(&c).unwrap();
    let r = &out.records[0];
    let Instance::Candidate(spec) = &r.instance else { panic!("premise records hold candidates") };
    let cand = svmaj::search::construct_candidate(spec, &cfg).unwrap();
    let imp = check_implication(&cand.a, &cand.b, &r.p, &cfg).unwrap();
    assert!(imp.premise_holds());
    assert!(!imp.conclusion_holds());
    assert!(!imp.proven && !imp.unexpected_violation());
    // The lifted product pair fails the norm form as well.
    let (a, b) = c.product_pair(&r.instance, &cfg).unwrap();
    let eq = check_equivalent_forms(&a, &b, &r.p, &cfg).unwrap();
    assert!(eq.agree(), "{:?}", eq.verdicts());
    assert_eq!(eq.verdicts(), [FormVerdict::Fails; 3]);
}

#[test]
fn proven_ranges_yield_nothing() {
    for (d, p) in [(2, "0.95"), (2, "0.6"), (3, "0.5"), (4, "0.3")] {
        let out = search_counterexamples(&config(d, p, 40)).unwrap();
        assert_eq!(out.found(), 0, "d={d} p={p}");
    }
    let mut c = config(3, "2", 20);
    c.objective = Objective::DirectForm;
    assert_eq!(search_counterexamples(&c).unwrap().found(), 0);
}

#[test]
fn reversed_direct_search_finds_violations_at_115() {
    let out = search_counterexamples(&config(3, "1.15", 40)).unwrap();
    assert_eq!(out.config.direction, Direction::Reversed);
    assert_eq!(out.config.objective, Objective::DirectForm);
    assert!(out.found() > 0);
    assert!(out.records.iter().all(|r| r.margin.k.is_some()));
}

#[test]
fn gram_sampler_runs_and_records_pairs() {
    let mut c = config(3, "1.15", 10);
    c.sampler = Sampler::Gram;
    c.refine_steps = 5;
    let out = search_counterexamples(&c).unwrap();
    assert!(out.best.is_some());
    for r in &out.records {
        assert!(matches!(r.instance, Instance::Pair { .. }));
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let mut one = config(3, "0.95", 30);
    one.workers = 1;
    let mut three = one.clone();
    three.workers = 3;
    let a = serde_json::to_string(&search_counterexamples(&one).unwrap().to_json()).unwrap();
    let b = serde_json::to_string(&search_counterexamples(&three).unwrap().to_json()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn outcome_json_round_trips_and_replays() {
    let c = config(3, "0.95", 30);
    let out = search_counterexamples(&c).unwrap();
    let text = serde_json::to_string_pretty(&out.to_json()).unwrap();
    let back: OutcomeJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back.found, out.found());
    let rec = &back.records[0];
    let inst = Instance::from_json(&rec.instance, None).unwrap();
    let replay = c.evaluate(&inst, &c.precision).unwrap();
    let orig = c.precision.parse_real(&rec.margin).unwrap();
    let rel = ((replay.value.to_f64() - orig.to_f64()) / orig.to_f64()).abs();
    assert!(rel < 1e-8, "{rel}");
}

// Re-running a record 20 digits lower either still flags it or lands in the
// tolerance band; it never becomes a certified non-violation.
#[test]
fn lower_precision_never_flips_a_record() {
    let c = config(3, "0.95", 40);
    let out = search_counterexamples(&c).unwrap();
    let lo = c.precision.shifted(-20).unwrap();
    let lo_config = SearchConfig { precision: lo, ..c.clone() };
    for r in out.records.iter().take(5) {
        let inst = r.instance.with_prec(lo.bits());
        let m = lo_config.evaluate(&inst, &lo).unwrap();
        let band = lo.tol(&m.scale);
        assert!(m.value > -band, "{}", m.value.to_f64());
    }
}

#[test]
fn sweep_is_reproducible_and_zero_in_proven_range() {
    let base = config(3, "0.5", 15);
    let grid = exponent_grid(&e("0.1"), &e("0.5"), &e("0.2")).unwrap();
    assert_eq!(grid.iter().map(|p| p.to_string()).collect::<Vec<_>>(), ["0.1", "0.3", "0.5"]);
    let mut seen = 0;
    let t1 = sweep(&base, &grid, |_| seen += 1).unwrap();
    assert_eq!(seen, 3);
    assert!(t1.rows.iter().all(|r| r.violations == 0));
    let t2 = sweep(&base, &grid, |_| {}).unwrap();
    let (c1, c2) = (t1.to_csv(false).unwrap(), t2.to_csv(false).unwrap());
    assert_eq!(c1, c2);
    assert!(c1.starts_with("p,trials,violations,max_margin,seconds\n"));
    assert!(c1.contains("none found in 15 trials"));
}

#[test]
fn candidate_spec_keeps_exact_values_across_precisions() {
    let cfg = PrecisionConfig::default();
    let mut rng = svmaj::numerics::RngStream::new(5, 0);
    let s = CandidateSpec::draw(&mut rng, 3, Default::default(), &cfg);
    let hi = s.with_prec(cfg.bits() + 100);
    assert_eq!(hi.with_prec(cfg.bits()), s);
}

#[test]
fn records_outside_the_proven_range_break_the_similarity_form() {
    let cfg = PrecisionConfig::default();
    for p in ["0.95", "1.15"] {
        let c = config(3, p, 40);
        let out = search_counterexamples(&c).unwrap();
        let r = &out.records[0];
        let (a, b) = c.product_pair(&r.instance, &cfg).unwrap();
        let (s, lambda) = similarity_pair_from_psd(&a, &b, &cfg).unwrap();
        let check = check_similarity_power(&s, &lambda, &r.p, &cfg).unwrap();
        assert!(!check.proven, "p={p}");
        assert!(!check.verdict(), "p={p}");
        // O(1) failures, far beyond rounding.
        assert!(check.report.relative_min_margin() < -0.1, "p={p}");
    }
}
