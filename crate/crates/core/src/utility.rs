use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n × n` matrix of nonpositive utilities; entry `(a, x)` is agent `a`'s
/// utility for alternative `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUtility", into = "RawUtility")]
pub struct UtilityProfile {
    values: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawUtility {
    n: usize,
    values: Vec<Vec<f64>>,
}

impl TryFrom<RawUtility> for UtilityProfile {
    type Error = Error;

    fn try_from(raw: RawUtility) -> Result<Self> {
        if raw.values.len() != raw.n {
            return Err(Error::InvalidUtility(format!(
                "declared n = {} but {} rows given",
                raw.n,
                raw.values.len()
            )));
        }
        UtilityProfile::new(raw.values)
    }
}

impl From<UtilityProfile> for RawUtility {
    fn from(u: UtilityProfile) -> Self {
        RawUtility {
            n: u.n(),
            values: u.values,
        }
    }
}

impl UtilityProfile {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InvalidUtility("n must be at least 1".into()));
        }
        for (a, row) in values.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidUtility(format!(
                    "row {a} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (x, &v) in row.iter().enumerate() {
                if !(v <= 0.0) {
                    return Err(Error::InvalidUtility(format!(
                        "entry ({a}, {x}) = {v} is not a nonpositive number"
                    )));
                }
            }
        }
        Ok(UtilityProfile { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, agent: usize, alternative: usize) -> f64 {
        self.values[agent][alternative]
    }

    pub fn row(&self, agent: usize) -> &[f64] {
        &self.values[agent]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Largest absolute entry.
    pub fn scale(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}
