//! Numerical checks of the majorisation inequalities, the power-quotient
//! kernel, and the chain of equivalent operator forms.

mod chain;
mod decompose;
mod kernel;
mod majorisation;
pub mod validity;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::linalg::Matrix;
use crate::numerics::{real_to_string, Exponent};

pub use chain::{
    check_equivalent_forms, check_implication, EquivalenceJson, EquivalenceReport, FormJson, FormOutcome, FormVerdict, ImplicationJson,
    ImplicationReport,
};
pub use decompose::{decompose_pair, PairDecomposition};
pub use kernel::{
    check_entrywise_power_psd, check_power_quotient_integral, check_power_quotient_psd, power_quotient_entry,
    power_quotient_matrix, PowerQuotientSpec, PsdCheck, PsdCheckJson,
};
pub use majorisation::{
    check_power_product, check_similarity_power, check_split_power, similarity_pair_from_psd, CheckJson,
    MajorisationCheck,
};

/// Which side of an inequality is claimed to be the smaller one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reversed,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Reversed => "reversed",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "forward" => Ok(Direction::Forward),
            "reversed" | "reverse" => Ok(Direction::Reversed),
            _ => Err(Error::Parse(format!("unknown direction {s:?}"))),
        }
    }
}

/// SHA-256 over the exact entries of the inputs and the exponent.
pub fn input_hash(matrices: &[&Matrix], p: Option<&Exponent>) -> String {
    let mut h = Sha256::new();
    for m in matrices {
        h.update(format!("{}x{};", m.rows(), m.cols()));
        for z in m.entries() {
            h.update(real_to_string(&z.re));
            h.update(",");
            h.update(real_to_string(&z.im));
            h.update(";");
        }
        h.update("|");
    }
    if let Some(p) = p {
        h.update(p.to_string());
    }
    hex::encode(h.finalize())
}
