//! Market profiles: rules mapping ordinal profiles to utility profiles.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::all_profiles;
use crate::error::{Error, Result};
use crate::matching::{ordinal_from_utility, OrdinalProfile, Side, TiePolicy};
use crate::utility::UtilityProfile;

/// Largest `n` for which exhaustive enumeration of R^n is allowed.
pub const EXHAUSTIVE_CAP: usize = 4;

/// Which ordinal profiles an analysis ranges over.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ProfileSet {
    /// All of R^n. Rank-based markets collapse this to a single
    /// representative since their ratios do not depend on R.
    #[default]
    Exhaustive,
    Listed(Vec<OrdinalProfile>),
}

/// An explicit R → U[R] table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<TableEntry>", into = "Vec<TableEntry>")]
pub struct UtilityTable {
    n: usize,
    entries: Vec<TableEntry>,
    index: HashMap<OrdinalProfile, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub profile: OrdinalProfile,
    pub utilities: UtilityProfile,
}

impl TryFrom<Vec<TableEntry>> for UtilityTable {
    type Error = Error;

    fn try_from(entries: Vec<TableEntry>) -> Result<Self> {
        UtilityTable::new(entries)
    }
}

impl From<UtilityTable> for Vec<TableEntry> {
    fn from(t: UtilityTable) -> Self {
        t.entries
    }
}

impl UtilityTable {
    /// Checks that every entry is consistent, i.e. `R(U[R]) = R` strictly.
    pub fn new(entries: Vec<TableEntry>) -> Result<Self> {
        let n = entries
            .first()
            .map(|e| e.profile.n())
            .ok_or_else(|| Error::InvalidParameter("empty utility table".into()))?;
        let mut index = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if e.profile.n() != n || e.utilities.n() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    found: e.profile.n().max(e.utilities.n()),
                });
            }
            let extracted = ordinal_from_utility(&e.utilities, TiePolicy::Strict)
                .map_err(|_| Error::InconsistentMarket(e.profile.ranks().to_vec()))?;
            if extracted.profile != e.profile {
                return Err(Error::InconsistentMarket(e.profile.ranks().to_vec()));
            }
            if index.insert(e.profile.clone(), i).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "profile {:?} listed twice",
                    e.profile.ranks()
                )));
            }
        }
        Ok(UtilityTable { n, entries, index })
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn get(&self, r: &OrdinalProfile) -> Option<&UtilityProfile> {
        self.index.get(r).map(|&i| &self.entries[i].utilities)
    }
}

/// `U: R^n → utility profiles`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarketProfile {
    /// `values[a][i]` is the utility agent `a` gets from the alternative it
    /// ranks `i`-th, whatever the profile. Rows strictly decrease.
    RankBased { values: Vec<Vec<f64>> },
    Extensional { table: UtilityTable },
}

impl MarketProfile {
    pub fn rank_based(values: Vec<Vec<f64>>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InvalidUtility("n must be at least 1".into()));
        }
        for (a, row) in values.iter().enumerate() {
            if row.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !(*v <= 0.0)) {
                return Err(Error::InvalidUtility(format!(
                    "agent {a} has a positive or NaN rank utility"
                )));
            }
            if row.windows(2).any(|w| !(w[0] > w[1])) {
                return Err(Error::InvalidUtility(format!(
                    "agent {a}'s rank utilities are not strictly decreasing"
                )));
            }
        }
        Ok(MarketProfile::RankBased { values })
    }

    /// `u(a, i-th ranked) = -base^i`, so consecutive ratios are exactly `base`.
    pub fn geometric(n: usize, base: f64) -> Result<Self> {
        if !(base > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "geometric base must exceed 1, got {base}"
            )));
        }
        let row: Vec<f64> = (0..n).map(|i| -base.powi(i as i32)).collect();
        MarketProfile::rank_based(vec![row; n])
    }

    pub fn extensional(entries: Vec<TableEntry>) -> Result<Self> {
        Ok(MarketProfile::Extensional {
            table: UtilityTable::new(entries)?,
        })
    }

    /// A random full table over R^n: per row, a top utility in `[-1, -0.1]`
    /// followed by consecutive ratios drawn from `(1, max_ratio]`.
    pub fn random_extensional<R: Rng + ?Sized>(n: usize, max_ratio: f64, rng: &mut R) -> Result<Self> {
        if n > EXHAUSTIVE_CAP {
            return Err(Error::TooLarge {
                n,
                cap: EXHAUSTIVE_CAP,
            });
        }
        let entries = all_profiles(n)
            .map(|profile| {
                let mut values = vec![vec![0.0; n]; n];
                for (a, row) in values.iter_mut().enumerate() {
                    let mut u = -rng.random_range(0.1..=1.0);
                    for &x in profile.ranking(a) {
                        row[x] = u;
                        let ratio = 1.0 + rng.random_range(0.0..(max_ratio - 1.0)).max(1e-6);
                        u *= ratio;
                    }
                }
                TableEntry {
                    profile,
                    utilities: UtilityProfile::new(values).expect("negative"),
                }
            })
            .collect();
        MarketProfile::extensional(entries)
    }

    pub fn n(&self) -> usize {
        match self {
            MarketProfile::RankBased { values } => values.len(),
            MarketProfile::Extensional { table } => table.n,
        }
    }

    /// `U[R]`.
    pub fn utility(&self, r: &OrdinalProfile) -> Result<UtilityProfile> {
        if r.n() != self.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                found: r.n(),
            });
        }
        match self {
            MarketProfile::RankBased { values } => {
                let n = values.len();
                let mut u = vec![vec![0.0; n]; n];
                for (a, row) in u.iter_mut().enumerate() {
                    for (i, &x) in r.ranking(a).iter().enumerate() {
                        row[x] = values[a][i];
                    }
                }
                UtilityProfile::new(u)
            }
            MarketProfile::Extensional { table } => table
                .get(r)
                .cloned()
                .ok_or_else(|| Error::MissingProfile(r.ranks().to_vec())),
        }
    }

    /// The concrete profiles `set` stands for in this market.
    pub fn profiles(&self, set: &ProfileSet) -> Result<Vec<OrdinalProfile>> {
        let n = self.n();
        match (set, self) {
            (ProfileSet::Listed(list), _) => {
                if let Some(bad) = list.iter().find(|r| r.n() != n) {
                    return Err(Error::SizeMismatch {
                        expected: n,
                        found: bad.n(),
                    });
                }
                Ok(list.clone())
            }
            (ProfileSet::Exhaustive, MarketProfile::RankBased { .. }) => {
                Ok(vec![OrdinalProfile::identity(n)])
            }
            (ProfileSet::Exhaustive, MarketProfile::Extensional { .. }) => {
                if n > EXHAUSTIVE_CAP {
                    return Err(Error::TooLarge {
                        n,
                        cap: EXHAUSTIVE_CAP,
                    });
                }
                Ok(all_profiles(n).collect())
            }
        }
    }
}

/// `(U_M, U_W)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingMarket {
    pub men: MarketProfile,
    pub women: MarketProfile,
}

impl MatchingMarket {
    pub fn new(men: MarketProfile, women: MarketProfile) -> Result<Self> {
        if men.n() != women.n() {
            return Err(Error::SizeMismatch {
                expected: men.n(),
                found: women.n(),
            });
        }
        Ok(MatchingMarket { men, women })
    }

    /// Same geometric rank utilities on both sides.
    pub fn geometric(n: usize, base: f64) -> Result<Self> {
        let side = MarketProfile::geometric(n, base)?;
        MatchingMarket::new(side.clone(), side)
    }

    pub fn n(&self) -> usize {
        self.men.n()
    }

    pub fn side(&self, side: Side) -> &MarketProfile {
        match side {
            Side::Men => &self.men,
            Side::Women => &self.women,
        }
    }
}
