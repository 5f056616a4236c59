use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::candidate::{CandidateJson, CandidateSpec};
use super::margins::Margin;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, MatrixJson};
use crate::numerics::{real_to_string, Exponent, PrecisionConfig, Real};
use crate::theorems::Direction;

/// Which formulation of the inequality a search scores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `(ABA)^2 <= A^4` against `(A B^{1/p} A)^{2p} <= A^{4p}` on
    /// constructed candidates.
    PremiseForm,
    /// Ky Fan sums of `sigma(B^p A^p)` against `sigma((BA)^p)`.
    DirectForm,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::PremiseForm => "premise_form",
            Objective::DirectForm => "direct_form",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "premise_form" | "premise" => Ok(Objective::PremiseForm),
            "direct_form" | "direct" => Ok(Objective::DirectForm),
            _ => Err(Error::Parse(format!("unknown objective {s:?}"))),
        }
    }
}

/// Instance generator for the direct form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// Constructed candidate mapped to a product pair with
    /// [`lift_to_product_pair`](super::lift_to_product_pair).
    #[default]
    Lifted,
    /// Gram matrices of complex normal factors.
    Gram,
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampler::Lifted => "lifted",
            Sampler::Gram => "gram",
        })
    }
}

impl FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lifted" => Ok(Sampler::Lifted),
            "gram" => Ok(Sampler::Gram),
            _ => Err(Error::Parse(format!("unknown sampler {s:?}"))),
        }
    }
}

/// The data a margin is recomputed from.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Candidate(CandidateSpec),
    Pair { a: Matrix, b: Matrix },
}

impl Instance {
    pub fn with_prec(&self, prec: u32) -> Instance {
        match self {
            Instance::Candidate(s) => Instance::Candidate(s.with_prec(prec)),
            Instance::Pair { a, b } => Instance::Pair { a: a.with_prec(prec), b: b.with_prec(prec) },
        }
    }

    pub fn to_json(&self, cfg: &PrecisionConfig) -> InstanceJson {
        match self {
            Instance::Candidate(s) => InstanceJson::Candidate(s.to_json(cfg)),
            Instance::Pair { a, b } => InstanceJson::Pair { a: a.to_json(cfg), b: b.to_json(cfg) },
        }
    }

    pub fn from_json(json: &InstanceJson, cfg: Option<&PrecisionConfig>) -> Result<Instance> {
        Ok(match json {
            InstanceJson::Candidate(c) => Instance::Candidate(CandidateSpec::from_json(c, cfg)?),
            InstanceJson::Pair { a, b } => Instance::Pair { a: Matrix::from_json(a, cfg)?, b: Matrix::from_json(b, cfg)? },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceJson {
    Candidate(CandidateJson),
    Pair { a: MatrixJson, b: MatrixJson },
}

/// A violation that exceeded `10 tau` and was confirmed at higher precision.
#[derive(Clone, Debug)]
pub struct CounterexampleRecord {
    pub instance: Instance,
    pub p: Exponent,
    pub objective: Objective,
    pub direction: Direction,
    pub sampler: Option<Sampler>,
    pub margin: Margin,
    pub digits: u32,
    pub verified_digits: u32,
    pub verified_margin: Real,
    pub seed: u64,
    pub trial_index: u64,
    /// Set when the instance came out of local refinement of this trial.
    pub refinement_step: Option<usize>,
}

impl CounterexampleRecord {
    pub fn to_json(&self, cfg: &PrecisionConfig) -> RecordJson {
        RecordJson {
            instance: self.instance.to_json(cfg),
            p: self.p.to_string(),
            objective: self.objective,
            direction: self.direction,
            sampler: self.sampler,
            k: self.margin.k,
            margin: real_to_string(&self.margin.value),
            scale: real_to_string(&self.margin.scale),
            relative_margin: self.margin.relative(),
            digits: self.digits,
            verified_digits: self.verified_digits,
            verified_margin: real_to_string(&self.verified_margin),
            seed: self.seed,
            trial_index: self.trial_index,
            refinement_step: self.refinement_step,
        }
    }
}

/// Wire format of a [`CounterexampleRecord`]; scalars are decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordJson {
    pub instance: InstanceJson,
    pub p: String,
    pub objective: Objective,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<Sampler>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub margin: String,
    pub scale: String,
    pub relative_margin: f64,
    pub digits: u32,
    pub verified_digits: u32,
    pub verified_margin: String,
    pub seed: u64,
    pub trial_index: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement_step: Option<usize>,
}
