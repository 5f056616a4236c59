//! Seeded searches for violations outside the proven exponent ranges.

mod candidate;
mod margins;
mod record;
mod run;

pub use candidate::{
    construct_candidate, construct_converse_candidate, lift_to_product_pair, Candidate, CandidateJson, CandidateSpec,
    DiagonalLaw, DIAGONAL_GAP, PSI_FLOOR,
};
pub use margins::{
    converse_violation_margin, direct_sigma_margin, direct_sigma_margins, violation_margin, violation_margin_scaled,
    Margin,
};
pub use record::{CounterexampleRecord, Instance, InstanceJson, Objective, RecordJson, Sampler};
pub use run::{
    confirm, exponent_grid, search_counterexamples, sweep, OutcomeJson, SearchConfig, SearchOutcome, SweepRow,
    SweepTable, THRESHOLD_FACTOR, VERIFY_AGREEMENT, VERIFY_EXTRA_DIGITS,
};
