//! Ordinal preference profiles, deferred acceptance and stability.
//!
//! Agents on both sides are indexed `0..n`. The men are always the first
//! argument and assignments are stored as man → woman permutations.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::utility::UtilityProfile;

/// Default cap on `n` for the `n!` bijection enumeration in [`enumerate_stable`].
pub const DEFAULT_ENUMERATION_CAP: usize = 7;

/// Which side of the market proposes, or which side a profile belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Men,
    Women,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Men => Side::Women,
            Side::Women => Side::Men,
        }
    }
}

/// `n` strict, complete rankings (best first), one per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct OrdinalProfile {
    ranks: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    n: usize,
    ranks: Vec<Vec<usize>>,
}

impl TryFrom<RawProfile> for OrdinalProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        if raw.ranks.len() != raw.n {
            return Err(Error::InvalidProfile(format!(
                "declared n = {} but {} rankings given",
                raw.n,
                raw.ranks.len()
            )));
        }
        OrdinalProfile::new(raw.ranks)
    }
}

impl From<OrdinalProfile> for RawProfile {
    fn from(p: OrdinalProfile) -> Self {
        RawProfile {
            n: p.n(),
            ranks: p.ranks,
        }
    }
}

impl OrdinalProfile {
    pub fn new(ranks: Vec<Vec<usize>>) -> Result<Self> {
        let n = ranks.len();
        if n == 0 {
            return Err(Error::InvalidProfile("n must be at least 1".into()));
        }
        for (agent, ranking) in ranks.iter().enumerate() {
            if ranking.len() != n {
                return Err(Error::InvalidProfile(format!(
                    "agent {agent} ranks {} alternatives, expected {n}",
                    ranking.len()
                )));
            }
            let mut seen = vec![false; n];
            for &x in ranking {
                if x >= n || seen[x] {
                    return Err(Error::InvalidProfile(format!(
                        "agent {agent}'s ranking is not a permutation of 0..{n}"
                    )));
                }
                seen[x] = true;
            }
        }
        Ok(OrdinalProfile { ranks })
    }

    /// Every agent ranks alternatives in ascending index order.
    pub fn identity(n: usize) -> Self {
        OrdinalProfile {
            ranks: vec![(0..n).collect(); n],
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let ranks = (0..n)
            .map(|_| {
                let mut row: Vec<usize> = (0..n).collect();
                row.shuffle(rng);
                row
            })
            .collect();
        OrdinalProfile { ranks }
    }

    pub fn n(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[Vec<usize>] {
        &self.ranks
    }

    pub fn ranking(&self, agent: usize) -> &[usize] {
        &self.ranks[agent]
    }

    /// Alternative ranked at position `rank` (0 = best) by `agent`.
    pub fn at(&self, agent: usize, rank: usize) -> usize {
        self.ranks[agent][rank]
    }

    /// `positions()[a][x]` is the rank of `x` in agent `a`'s list.
    pub fn positions(&self) -> Vec<Vec<usize>> {
        self.ranks
            .iter()
            .map(|row| {
                let mut pos = vec![0; row.len()];
                for (i, &x) in row.iter().enumerate() {
                    pos[x] = i;
                }
                pos
            })
            .collect()
    }

    pub fn prefers(&self, agent: usize, x: usize, y: usize) -> bool {
        let row = &self.ranks[agent];
        let px = row.iter().position(|&z| z == x);
        let py = row.iter().position(|&z| z == y);
        px < py
    }

    pub fn into_ranks(self) -> Vec<Vec<usize>> {
        self.ranks
    }
}

/// A bijection men → women.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawAssignment", into = "RawAssignment")]
pub struct Assignment {
    pairing: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawAssignment {
    n: usize,
    pairing: Vec<usize>,
}

impl TryFrom<RawAssignment> for Assignment {
    type Error = Error;

    fn try_from(raw: RawAssignment) -> Result<Self> {
        if raw.pairing.len() != raw.n {
            return Err(Error::InvalidProfile(format!(
                "declared n = {} but pairing has {} entries",
                raw.n,
                raw.pairing.len()
            )));
        }
        Assignment::new(raw.pairing)
    }
}

impl From<Assignment> for RawAssignment {
    fn from(a: Assignment) -> Self {
        RawAssignment {
            n: a.n(),
            pairing: a.pairing,
        }
    }
}

impl Assignment {
    pub fn new(pairing: Vec<usize>) -> Result<Self> {
        let n = pairing.len();
        let mut seen = vec![false; n];
        for &w in &pairing {
            if w >= n || seen[w] {
                return Err(Error::InvalidProfile(
                    "pairing is not a bijection".to_string(),
                ));
            }
            seen[w] = true;
        }
        Ok(Assignment { pairing })
    }

    pub fn identity(n: usize) -> Self {
        Assignment {
            pairing: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.pairing.len()
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn partner_of_man(&self, man: usize) -> usize {
        self.pairing[man]
    }

    /// woman → man.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.pairing.len()];
        for (m, &w) in self.pairing.iter().enumerate() {
            inv[w] = m;
        }
        inv
    }
}

/// `Φ(R^M, R^W)`: the male- and female-optimal stable assignments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StablePair {
    pub male_optimal: Assignment,
    pub female_optimal: Assignment,
}

fn check_sizes(men: &OrdinalProfile, women: &OrdinalProfile) -> Result<()> {
    if men.n() != women.n() {
        return Err(Error::SizeMismatch {
            expected: men.n(),
            found: women.n(),
        });
    }
    Ok(())
}

/// Round-based deferred acceptance; returns proposer → receiver.
/// Within a round free proposers act in ascending index order.
fn propose(proposers: &OrdinalProfile, receivers: &OrdinalProfile) -> Vec<usize> {
    let n = proposers.n();
    let receiver_pos = receivers.positions();
    let mut next = vec![0usize; n];
    let mut held: Vec<Option<usize>> = vec![None; n];
    let mut matched: Vec<Option<usize>> = vec![None; n];

    loop {
        let free: Vec<usize> = (0..n).filter(|&p| matched[p].is_none()).collect();
        if free.is_empty() {
            break;
        }
        for p in free {
            let r = proposers.at(p, next[p]);
            next[p] += 1;
            match held[r] {
                None => {
                    held[r] = Some(p);
                    matched[p] = Some(r);
                }
                Some(q) if receiver_pos[r][p] < receiver_pos[r][q] => {
                    held[r] = Some(p);
                    matched[p] = Some(r);
                    matched[q] = None;
                }
                Some(_) => {}
            }
        }
    }
    matched.into_iter().map(|r| r.expect("complete lists")).collect()
}

pub fn deferred_acceptance(
    men: &OrdinalProfile,
    women: &OrdinalProfile,
    proposing: Side,
) -> Result<Assignment> {
    check_sizes(men, women)?;
    let pairing = match proposing {
        Side::Men => propose(men, women),
        Side::Women => {
            let woman_to_man = propose(women, men);
            let mut pairing = vec![0; men.n()];
            for (w, &m) in woman_to_man.iter().enumerate() {
                pairing[m] = w;
            }
            pairing
        }
    };
    Ok(Assignment { pairing })
}

pub fn phi(men: &OrdinalProfile, women: &OrdinalProfile) -> Result<StablePair> {
    Ok(StablePair {
        male_optimal: deferred_acceptance(men, women, Side::Men)?,
        female_optimal: deferred_acceptance(men, women, Side::Women)?,
    })
}

/// All `(m, w)` that strictly prefer each other to their partners under `mu`,
/// in lexicographic order.
pub fn blocking_pairs(
    men: &OrdinalProfile,
    women: &OrdinalProfile,
    mu: &Assignment,
) -> Result<Vec<(usize, usize)>> {
    check_sizes(men, women)?;
    check_sizes(men, &OrdinalProfile::identity(mu.n()))?;
    let n = men.n();
    let men_pos = men.positions();
    let women_pos = women.positions();
    let husband = mu.inverse();
    let mut pairs = Vec::new();
    for m in 0..n {
        for w in 0..n {
            let m_wants = men_pos[m][w] < men_pos[m][mu.partner_of_man(m)];
            let w_wants = women_pos[w][m] < women_pos[w][husband[w]];
            if m_wants && w_wants {
                pairs.push((m, w));
            }
        }
    }
    Ok(pairs)
}

pub fn is_stable(men: &OrdinalProfile, women: &OrdinalProfile, mu: &Assignment) -> Result<bool> {
    Ok(blocking_pairs(men, women, mu)?.is_empty())
}

/// Brute-force list of every stable assignment, ordered lexicographically.
pub fn enumerate_stable(men: &OrdinalProfile, women: &OrdinalProfile) -> Result<Vec<Assignment>> {
    enumerate_stable_with_cap(men, women, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_stable_with_cap(
    men: &OrdinalProfile,
    women: &OrdinalProfile,
    cap: usize,
) -> Result<Vec<Assignment>> {
    check_sizes(men, women)?;
    let n = men.n();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let mut stable = Vec::new();
    for pairing in crate::combinatorics::permutations(n) {
        let mu = Assignment { pairing };
        if blocking_pairs(men, women, &mu)?.is_empty() {
            stable.push(mu);
        }
    }
    Ok(stable)
}

/// Builds a profile for the opposite side on which `phi` separates `r` from
/// `r_prime`: the female-optimal assignments differ when the result is used
/// as the women's profile against `r` / `r_prime` as the men's.
///
/// Finds the first agent `m1` whose rankings differ and the first position
/// where they diverge, giving `w1 R w2` and `w2 R' w1`. Then `w1` and `w2`
/// rank `m1` then `m2` (the lowest other index); each remaining woman in
/// ascending order ranks a distinct remaining man first; every other slot
/// is filled in ascending index order.
pub fn distinguishing_profile(r: &OrdinalProfile, r_prime: &OrdinalProfile) -> Result<OrdinalProfile> {
    check_sizes(r, r_prime)?;
    let n = r.n();
    let (m1, k) = (0..n)
        .find_map(|m| {
            (0..n)
                .find(|&k| r.at(m, k) != r_prime.at(m, k))
                .map(|k| (m, k))
        })
        .ok_or(Error::IdenticalProfiles)?;
    let w1 = r.at(m1, k);
    let w2 = r_prime.at(m1, k);
    let m2 = (0..n).find(|&m| m != m1).expect("distinct profiles need n >= 2");

    let other_men: Vec<usize> = (0..n).filter(|&m| m != m1 && m != m2).collect();
    let other_women: Vec<usize> = (0..n).filter(|&w| w != w1 && w != w2).collect();

    let fill = |head: &[usize]| -> Vec<usize> {
        let mut row = head.to_vec();
        row.extend((0..n).filter(|m| !head.contains(m)));
        row
    };

    let mut ranks = vec![Vec::new(); n];
    ranks[w1] = fill(&[m1, m2]);
    ranks[w2] = fill(&[m1, m2]);
    for (&w, &m) in other_women.iter().zip(&other_men) {
        ranks[w] = fill(&[m]);
    }
    OrdinalProfile::new(ranks)
}

/// How [`ordinal_from_utility`] treats equal utilities within a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// Equal utilities are an error.
    #[default]
    Strict,
    /// Break ties by ascending alternative index and flag it.
    Index,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedOrdinal {
    pub profile: OrdinalProfile,
    pub had_ties: bool,
}

/// `R(u)`: each agent ranks alternatives by descending utility.
pub fn ordinal_from_utility(u: &UtilityProfile, policy: TiePolicy) -> Result<ExtractedOrdinal> {
    let n = u.n();
    let mut had_ties = false;
    let mut ranks = Vec::with_capacity(n);
    for a in 0..n {
        let row = u.row(a);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| row[y].total_cmp(&row[x]).then(x.cmp(&y)));
        for pair in order.windows(2) {
            if row[pair[0]] == row[pair[1]] {
                match policy {
                    TiePolicy::Strict => {
                        return Err(Error::Tie {
                            agent: a,
                            first: pair[0].min(pair[1]),
                            second: pair[0].max(pair[1]),
                        })
                    }
                    TiePolicy::Index => had_ties = true,
                }
            }
        }
        ranks.push(order);
    }
    Ok(ExtractedOrdinal {
        profile: OrdinalProfile { ranks },
        had_ties,
    })
}
