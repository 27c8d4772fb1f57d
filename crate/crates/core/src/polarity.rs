//! Polarity of utility profiles and their generating metric spaces.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::MarketProfile;
use crate::matching::{ordinal_from_utility, OrdinalProfile, TiePolicy};
use crate::metric::{Edge, MetricSpace, Placement, DIST_TOL};
use crate::planarity::{is_planar_graph, random_planar_graph};
use crate::rng::trial_rng;
use crate::utility::UtilityProfile;

/// First quadruple `(a, a', x, x')` in lexicographic order with
/// `u(a,x') − u(a,x) > −(u(a',x) + u(a',x'))`, up to a relative tolerance.
pub fn polarity_violation(u: &UtilityProfile) -> Option<[usize; 4]> {
    let n = u.n();
    let slack = DIST_TOL * max_abs(u).max(1.0);
    for a in 0..n {
        for a2 in 0..n {
            for x in 0..n {
                for x2 in 0..n {
                    let lhs = u.get(a, x2) - u.get(a, x);
                    let rhs = -(u.get(a2, x) + u.get(a2, x2));
                    if lhs > rhs + slack {
                        return Some([a, a2, x, x2]);
                    }
                }
            }
        }
    }
    None
}

pub fn is_polarized(u: &UtilityProfile) -> bool {
    polarity_violation(u).is_none()
}

fn max_abs(u: &UtilityProfile) -> f64 {
    u.values().iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `K_{n,n}` with agents on `0..n`, alternatives on `n..2n` and edge
/// weights `−u(a,x)`; endpoints of zero-weight edges are merged.
pub fn build_generating_space(u: &UtilityProfile) -> Result<(MetricSpace, Placement)> {
    if let Some(q) = polarity_violation(u) {
        return Err(Error::NotPolarized(q));
    }
    let n = u.n();
    let edges = (0..n)
        .flat_map(|a| (0..n).map(move |x| (a, x)))
        .map(|(a, x)| Edge(a, n + x, -u.get(a, x) + 0.0))
        .collect();
    let full = MetricSpace::new(2 * n, edges)?;
    let (space, map) = full.quotient_zero_edges();
    let placement = Placement {
        alpha: (0..n).map(|a| map[a]).collect(),
        beta: (0..n).map(|x| map[n + x]).collect(),
    };
    debug_assert!(verify_generating(&space, &placement, u, DIST_TOL * max_abs(u).max(1.0)));
    Ok((space, placement))
}

/// Disjoint union of the per-profile spaces, with each profile's placement
/// shifted into the union.
pub fn union_generating_space(profiles: &[UtilityProfile]) -> Result<(MetricSpace, Vec<Placement>)> {
    let mut parts = Vec::with_capacity(profiles.len());
    let mut placements = Vec::with_capacity(profiles.len());
    for u in profiles {
        let (space, p) = build_generating_space(u)?;
        parts.push(space);
        placements.push(p);
    }
    let (space, offsets) = MetricSpace::disjoint_union(&parts);
    let placements = placements
        .iter()
        .zip(offsets)
        .map(|(p, off)| p.shifted(off))
        .collect();
    Ok((space, placements))
}

/// Union over the given ordinal profiles of a market profile's utilities.
pub fn market_generating_space(
    market: &MarketProfile,
    profiles: &[OrdinalProfile],
) -> Result<(MetricSpace, Vec<Placement>)> {
    let utilities = profiles
        .iter()
        .map(|r| market.utility(r))
        .collect::<Result<Vec<_>>>()?;
    union_generating_space(&utilities)
}

/// `u(a,x) = −d(α(a), β(x))`.
pub fn utilities_from_space(space: &MetricSpace, p: &Placement, n: usize) -> Result<UtilityProfile> {
    for len in [p.alpha.len(), p.beta.len()] {
        if len != n {
            return Err(Error::SizeMismatch { expected: n, found: len });
        }
    }
    p.check(space)?;
    let mut values = vec![vec![0.0; n]; n];
    for a in 0..n {
        for x in 0..n {
            let d = space.dist(p.alpha[a], p.beta[x]);
            if !d.is_finite() {
                return Err(Error::Disconnected);
            }
            values[a][x] = -d + 0.0;
        }
    }
    UtilityProfile::new(values)
}

/// `max |u(a,x) + d(α(a), β(x))| ≤ tol`; false on any shape mismatch.
pub fn verify_generating(space: &MetricSpace, p: &Placement, u: &UtilityProfile, tol: f64) -> bool {
    let n = u.n();
    if p.alpha.len() != n || p.beta.len() != n || p.check(space).is_err() {
        return false;
    }
    (0..n).all(|a| (0..n).all(|x| (u.get(a, x) + space.dist(p.alpha[a], p.beta[x])).abs() <= tol))
}

/// Two shortest paths, `α(a) → β(x)` and `α(a') → β(x')`, meeting at `vertex`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinCase {
    pub a: usize,
    pub x: usize,
    pub a2: usize,
    pub x2: usize,
    pub vertex: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JoinReport {
    /// Quadruples checked (with `x ≠ x'`).
    pub checked: usize,
    /// Those whose shortest paths share at least one vertex.
    pub intersecting: usize,
    /// A case where `x R_a x'` holds but `x R_{a'} x'` does not.
    pub violation: Option<JoinCase>,
    /// Intersecting cases where `x R_{a'} x'` holds but `x R_a x'` does not.
    /// The implication only runs one way, so these are expected.
    pub converse_failures: usize,
}

impl JoinReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks the path-intersection preference rule: if some shortest path
/// `α(a) → β(x)` meets some shortest path `α(a') → β(x')`, then
/// `x R_a x' ⟹ x R_{a'} x'`.
///
/// `samples = None` scans every quadruple; otherwise that many quadruples
/// are drawn from the seeded stream. `(space, p)` must represent `r`
/// strictly.
pub fn path_preference_agreement_check(
    space: &MetricSpace,
    p: &Placement,
    r: &OrdinalProfile,
    samples: Option<usize>,
    seed: u64,
) -> Result<JoinReport> {
    let n = r.n();
    let u = utilities_from_space(space, p, n)?;
    match ordinal_from_utility(&u, TiePolicy::Strict) {
        Ok(e) if e.profile == *r => {}
        _ => return Err(Error::RepresentationMismatch),
    }
    let mut report = JoinReport {
        checked: 0,
        intersecting: 0,
        violation: None,
        converse_failures: 0,
    };
    let mut visit = |a: usize, x: usize, a2: usize, x2: usize| {
        if x == x2 {
            return;
        }
        report.checked += 1;
        let (s, t) = (p.alpha[a], p.beta[x]);
        let (s2, t2) = (p.alpha[a2], p.beta[x2]);
        let Some(vertex) = (0..space.vertex_count())
            .find(|&v| space.on_shortest_path(s, t, v) && space.on_shortest_path(s2, t2, v))
        else {
            return;
        };
        report.intersecting += 1;
        let first = r.prefers(a, x, x2);
        let second = r.prefers(a2, x, x2);
        if first && !second && report.violation.is_none() {
            report.violation = Some(JoinCase { a, x, a2, x2, vertex });
        }
        if second && !first {
            report.converse_failures += 1;
        }
    };
    match samples {
        None => {
            for a in 0..n {
                for x in 0..n {
                    for a2 in 0..n {
                        for x2 in 0..n {
                            visit(a, x, a2, x2);
                        }
                    }
                }
            }
        }
        Some(k) => {
            let mut rng = trial_rng(seed, 0);
            for _ in 0..k {
                let q: [usize; 4] = std::array::from_fn(|_| rng.random_range(0..n));
                visit(q[0], q[1], q[2], q[3]);
            }
        }
    }
    Ok(report)
}

/// Ranks fixed by the nine-agent nonplanarity construction (0-indexed):
/// every agent's top, every agent's second, and the thirds of agents 6..9.
pub const LEMMA_PLANAR_TOPS: [usize; 9] = [0, 1, 2, 3, 4, 5, 6, 7, 8];
pub const LEMMA_PLANAR_SECONDS: [usize; 9] = [3, 4, 5, 1, 2, 0, 3, 4, 5];
pub const LEMMA_PLANAR_THIRDS: [(usize, usize); 3] = [(6, 2), (7, 0), (8, 1)];

/// Constrained prefix of each of the first nine agents' rankings.
pub fn lemma_planar_prefixes() -> Vec<Vec<usize>> {
    (0..9)
        .map(|i| {
            let mut prefix = vec![LEMMA_PLANAR_TOPS[i], LEMMA_PLANAR_SECONDS[i]];
            if let Some(&(_, third)) = LEMMA_PLANAR_THIRDS.iter().find(|(a, _)| *a == i) {
                prefix.push(third);
            }
            prefix
        })
        .collect()
}

/// The full profile: constrained prefixes followed by the unused
/// alternatives in ascending order; agents from 9 on rank by index.
pub fn lemma_planar_profile(n: usize) -> Result<OrdinalProfile> {
    if n < 9 {
        return Err(Error::InvalidParameter(format!(
            "the nonplanar profile needs n >= 9, got {n}"
        )));
    }
    let prefixes = lemma_planar_prefixes();
    let ranks = (0..n)
        .map(|a| {
            let mut row = prefixes.get(a).cloned().unwrap_or_default();
            row.extend((0..n).filter(|x| !row.contains(x)).collect::<Vec<_>>());
            row
        })
        .collect();
    OrdinalProfile::new(ranks)
}

/// Number of constrained ranking prefixes (out of 21) realised strictly by
/// `−d(α(·), β(·))`: prefix entry `k` of agent `a` must be strictly nearer
/// than every alternative outside the first `k + 1` prefix entries.
pub fn lemma_planar_cells_satisfied(space: &MetricSpace, p: &Placement) -> Result<usize> {
    if p.alpha.len() < 9 || p.beta.len() < 9 {
        return Err(Error::SizeMismatch {
            expected: 9,
            found: p.alpha.len().min(p.beta.len()),
        });
    }
    p.check(space)?;
    let n = p.beta.len();
    let mut count = 0;
    for (a, prefix) in lemma_planar_prefixes().iter().enumerate() {
        let d = |x: usize| space.dist(p.alpha[a], p.beta[x]);
        for k in 0..prefix.len() {
            let y = prefix[k];
            let ok = (0..n)
                .filter(|z| !prefix[..=k].contains(z))
                .all(|z| d(y) < d(z));
            if ok {
                count += 1;
            }
        }
    }
    Ok(count)
}

pub const LEMMA_PLANAR_CELLS: usize = 21;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefutationReport {
    pub candidates: usize,
    /// Planar candidates realising every constrained cell.
    pub representations_found: usize,
    pub best_cells_satisfied: usize,
    pub total_cells: usize,
}

/// Randomized search for a planar space representing the nine-agent
/// profile. Each candidate is a random connected planar graph on 9..=24
/// vertices with weights in `[0.05, 1]` and a placement biased toward
/// giving each agent its top choice; a short weight hill-climb then tries to
/// satisfy more cells.
pub fn planar_refutation_search(candidates: usize, climb_steps: usize, seed: u64) -> RefutationReport {
    let mut report = RefutationReport {
        candidates,
        representations_found: 0,
        best_cells_satisfied: 0,
        total_cells: LEMMA_PLANAR_CELLS,
    };
    for trial in 0..candidates {
        let mut rng = trial_rng(seed, trial as u64);
        let v = rng.random_range(9..=24);
        let graph = random_planar_graph(v, rng.random_range(0.0..0.6), &mut rng);
        debug_assert!(is_planar_graph(&graph));
        let support: Vec<(usize, usize)> = (0..v)
            .flat_map(|u| graph.neighbors(u).iter().filter(move |&&w| u < w).map(move |&w| (u, w)))
            .collect();
        let mut weights: Vec<f64> = support.iter().map(|_| rng.random_range(0.05..1.0)).collect();
        let placement = random_placement(v, &mut rng);
        let build = |w: &[f64]| {
            MetricSpace::new(v, support.iter().zip(w).map(|(&(a, b), &w)| Edge(a, b, w)).collect())
                .expect("valid candidate")
        };
        let mut best = lemma_planar_cells_satisfied(&build(&weights), &placement).expect("valid placement");
        for _ in 0..climb_steps {
            if best == LEMMA_PLANAR_CELLS || support.is_empty() {
                break;
            }
            let e = rng.random_range(0..support.len());
            let old = weights[e];
            weights[e] = (old * rng.random_range(0.5..2.0)).clamp(0.01, 4.0);
            let score = lemma_planar_cells_satisfied(&build(&weights), &placement).expect("valid placement");
            if score >= best {
                best = score;
            } else {
                weights[e] = old;
            }
        }
        if best == LEMMA_PLANAR_CELLS {
            report.representations_found += 1;
        }
        report.best_cells_satisfied = report.best_cells_satisfied.max(best);
    }
    report
}

fn random_placement<R: Rng + ?Sized>(v: usize, rng: &mut R) -> Placement {
    let mut vertices: Vec<usize> = (0..v).collect();
    vertices.shuffle(rng);
    let beta: Vec<usize> = vertices[..9].to_vec();
    // half the time put each agent on its top alternative
    let colocate = rng.random_bool(0.5);
    let alpha = (0..9)
        .map(|a| if colocate { beta[a] } else { rng.random_range(0..v) })
        .collect();
    Placement { alpha, beta }
}

/// The `K_{9,9}` space of a rank-based polarized realization of the
/// nine-agent profile. Not planar, and realises every cell.
pub fn lemma_planar_control() -> (MetricSpace, Placement) {
    let r = lemma_planar_profile(9).expect("n = 9");
    let pos = r.positions();
    let values = (0..9)
        .map(|a| (0..9).map(|x| -(1.0 + 0.01 * pos[a][x] as f64)).collect())
        .collect();
    let u = UtilityProfile::new(values).expect("negative utilities");
    build_generating_space(&u).expect("near-uniform utilities are polarized")
}
