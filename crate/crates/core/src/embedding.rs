//! Fréchet-subset (Bourgain) embeddings into ℓ₂, distortion measurement,
//! the Condorcet-cycle placement search, and the embedding-based bound
//! formulas.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::ln_factorial;
use crate::error::{Error, Result};
use crate::matching::{ordinal_from_utility, OrdinalProfile, TiePolicy};
use crate::metric::{MetricSpace, DIST_TOL};
use crate::polarity::build_generating_space;
use crate::rng::{trial_rng, TrialRng};
use crate::utility::UtilityProfile;

/// Points in `ℝ^dim`, one per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanPlacement {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
}

impl EuclideanPlacement {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if let Some(v) = points.iter().position(|p| p.len() != dim) {
            return Err(Error::InvalidParameter(format!(
                "point {v} has {} coordinates, expected {dim}",
                points[v].len()
            )));
        }
        Ok(EuclideanPlacement { dim, points })
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        euclid(&self.points[a], &self.points[b])
    }
}

fn euclid(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// `⌊log₂ V⌋` scales, `quality · ⌈ln V⌉` random subsets per scale. Subsets at
/// scale `i = 1, 2, …` have `2^(i−1)` vertices, so none is the whole space;
/// coordinates are `d(v, S) / √k` for `k` coordinates in total.
pub fn bourgain_embed(space: &MetricSpace, quality: usize, seed: u64) -> Result<EuclideanPlacement> {
    let v = space.vertex_count();
    if v < 2 {
        return Err(Error::InvalidParameter("embedding needs at least two vertices".into()));
    }
    if quality == 0 {
        return Err(Error::InvalidParameter("quality must be at least 1".into()));
    }
    if !space.is_connected() {
        return Err(Error::Disconnected);
    }
    let scales = v.ilog2() as usize;
    let repeats = quality * (v as f64).ln().ceil() as usize;
    let k = scales * repeats;
    let norm = (k as f64).sqrt();
    let d = space.distances();
    let mut rng = trial_rng(seed, 0);
    let mut points = vec![Vec::with_capacity(k); v];
    for i in 1..=scales {
        let size = 1usize << (i - 1);
        for _ in 0..repeats {
            let subset = index::sample(&mut rng, v, size).into_vec();
            for (x, point) in points.iter_mut().enumerate() {
                let near = subset.iter().map(|&s| d[x][s]).fold(f64::INFINITY, f64::min);
                point.push(near / norm);
            }
        }
    }
    Ok(EuclideanPlacement { dim: k, points })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    /// Smallest ratio `‖T(a) − T(b)‖ / d(a, b)`; dividing by it makes the
    /// embedding non-contractive.
    pub scale: f64,
    /// Largest ratio divided by `scale`.
    pub max_expansion: f64,
    /// `1 / scale`, the raw contraction.
    pub max_contraction: f64,
    pub min_pair: (usize, usize),
    pub max_pair: (usize, usize),
}

pub fn measure_distortion(space: &MetricSpace, placement: &EuclideanPlacement) -> Result<DistortionReport> {
    let v = space.vertex_count();
    if placement.points.len() != v {
        return Err(Error::SizeMismatch {
            expected: v,
            found: placement.points.len(),
        });
    }
    if v < 2 {
        return Err(Error::InvalidParameter("distortion needs at least two vertices".into()));
    }
    let d = space.distances();
    let mut min = (f64::INFINITY, (0, 0));
    let mut max = (0.0f64, (0, 0));
    for a in 0..v {
        for b in a + 1..v {
            if !d[a][b].is_finite() {
                return Err(Error::Disconnected);
            }
            if d[a][b] == 0.0 {
                continue;
            }
            let e = placement.distance(a, b);
            if e == 0.0 {
                return Err(Error::CoincidentPoints(a, b));
            }
            let ratio = e / d[a][b];
            if ratio < min.0 {
                min = (ratio, (a, b));
            }
            if ratio > max.0 {
                max = (ratio, (a, b));
            }
        }
    }
    if !min.0.is_finite() {
        return Err(Error::InvalidParameter("no pair at positive distance".into()));
    }
    Ok(DistortionReport {
        scale: min.0,
        max_expansion: max.0 / min.0,
        max_contraction: 1.0 / min.0,
        min_pair: min.1,
        max_pair: max.1,
    })
}

/// Cyclic three-agent profile: agent `a` ranks `a, a+1, a+2 (mod 3)`.
pub fn condorcet_profile() -> OrdinalProfile {
    OrdinalProfile::new(vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).expect("valid permutations")
}

pub const MAX_EUCLIDEAN_DIM: usize = 10;

/// Minimum over the three agents of `d(a, next) / d(a, previous)` along each
/// agent's ranking, where utilities are negated Euclidean distances.
pub fn euclidean_profile_robustness(alpha: &[Vec<f64>], beta: &[Vec<f64>]) -> Result<f64> {
    if alpha.len() != 3 || beta.len() != 3 {
        return Err(Error::SizeMismatch {
            expected: 3,
            found: if alpha.len() != 3 { alpha.len() } else { beta.len() },
        });
    }
    let dim = alpha[0].len();
    if dim == 0 || dim > MAX_EUCLIDEAN_DIM || alpha.iter().chain(beta).any(|p| p.len() != dim) {
        return Err(Error::InvalidParameter(format!(
            "points must share one dimension in 1..={MAX_EUCLIDEAN_DIM}"
        )));
    }
    let d: Vec<Vec<f64>> = alpha.iter().map(|a| beta.iter().map(|x| euclid(a, x)).collect()).collect();
    let profile = condorcet_profile();
    for (a, row) in d.iter().enumerate() {
        let r = profile.ranking(a);
        if !(row[r[0]] < row[r[1]] && row[r[1]] < row[r[2]]) {
            return Err(Error::NotCondorcet(format!(
                "agent {a} distances {row:?} do not follow ranking {r:?}"
            )));
        }
        if row[r[0]] == 0.0 {
            return Err(Error::CoincidentPoints(a, r[0]));
        }
    }
    let mut best = f64::INFINITY;
    for (a, row) in d.iter().enumerate() {
        let r = profile.ranking(a);
        best = best.min(row[r[1]] / row[r[0]]).min(row[r[2]] / row[r[1]]);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanachSearch {
    pub dim: usize,
    pub restarts: usize,
    pub iters: usize,
    /// Restarts that found a feasible starting placement.
    pub feasible_restarts: usize,
    /// `None` when no restart found a placement realising the cycle.
    pub best_value: Option<f64>,
    pub best_alpha: Vec<Vec<f64>>,
    pub best_beta: Vec<Vec<f64>>,
}

const INIT_ATTEMPTS: usize = 5_000;
const INIT_STEP: f64 = 0.25;
const JOINT_MOVES: usize = 8;

/// Multistart coordinate search maximizing [`euclidean_profile_robustness`]
/// over placements realising the Condorcet profile. Restart `k` draws from
/// stream `k` of `seed`; each iteration sweeps every coordinate with `±step`,
/// then tries a few random joint moves of size up to `step`, keeping strictly
/// improving feasible moves. The step halves after an iteration without
/// improvement; points are recentred and rescaled after every iteration.
pub fn maximize_euclidean_robustness(dim: usize, restarts: usize, iters: usize, seed: u64) -> Result<BanachSearch> {
    if !(1..=MAX_EUCLIDEAN_DIM).contains(&dim) {
        return Err(Error::InvalidParameter(format!(
            "dim must be in 1..={MAX_EUCLIDEAN_DIM}, got {dim}"
        )));
    }
    let run = |k: usize| local_search(dim, iters, &mut trial_rng(seed, k as u64));
    #[cfg(feature = "parallel")]
    let outcomes: Vec<Option<(f64, Vec<Vec<f64>>)>> = {
        use rayon::prelude::*;
        (0..restarts).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Option<(f64, Vec<Vec<f64>>)>> = (0..restarts).map(run).collect();

    let feasible_restarts = outcomes.iter().filter(|o| o.is_some()).count();
    // first restart wins ties, so the result is independent of scheduling
    let best = outcomes
        .into_iter()
        .flatten()
        .fold(None::<(f64, Vec<Vec<f64>>)>, |acc, cur| match acc {
            Some(a) if a.0 >= cur.0 => Some(a),
            _ => Some(cur),
        });
    let (best_value, best_alpha, best_beta) = match best {
        Some((v, mut pts)) => {
            let beta = pts.split_off(3);
            (Some(v), pts, beta)
        }
        None => (None, Vec::new(), Vec::new()),
    };
    Ok(BanachSearch {
        dim,
        restarts,
        iters,
        feasible_restarts,
        best_value,
        best_alpha,
        best_beta,
    })
}

fn evaluate(points: &[Vec<f64>]) -> Option<f64> {
    euclidean_profile_robustness(&points[..3], &points[3..]).ok()
}

fn local_search(dim: usize, iters: usize, rng: &mut TrialRng) -> Option<(f64, Vec<Vec<f64>>)> {
    let (mut points, mut value) = (0..INIT_ATTEMPTS).find_map(|_| {
        let pts: Vec<Vec<f64>> = (0..6).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        evaluate(&pts).map(|v| (pts, v))
    })?;
    let mut best = (value, points.clone());
    let mut step = INIT_STEP;
    for _ in 0..iters {
        let mut improved = false;
        for p in 0..6 {
            for c in 0..dim {
                for sign in [1.0, -1.0] {
                    let old = points[p][c];
                    points[p][c] = old + sign * step;
                    match evaluate(&points) {
                        Some(v) if v > value => {
                            value = v;
                            improved = true;
                        }
                        _ => points[p][c] = old,
                    }
                }
            }
        }
        // random joint moves get past ridges where two ratios tie
        for _ in 0..JOINT_MOVES {
            let trial: Vec<Vec<f64>> = points
                .iter()
                .map(|p| p.iter().map(|x| x + step * rng.random_range(-1.0..1.0)).collect())
                .collect();
            if let Some(v) = evaluate(&trial).filter(|&v| v > value) {
                points = trial;
                value = v;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
        normalize(&mut points);
        if let Some(v) = evaluate(&points) {
            value = v;
            if v > best.0 {
                best = (v, points.clone());
            }
        }
    }
    Some(best)
}

/// Centroid to the origin, largest norm to 1.
fn normalize(points: &mut [Vec<f64>]) {
    let dim = points[0].len();
    let count = points.len() as f64;
    let centroid: Vec<f64> = (0..dim).map(|c| points.iter().map(|p| p[c]).sum::<f64>() / count).collect();
    for p in points.iter_mut() {
        for (x, m) in p.iter_mut().zip(&centroid) {
            *x -= m;
        }
    }
    let radius = points.iter().map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
    if radius > 0.0 {
        for x in points.iter_mut().flatten() {
            *x /= radius;
        }
    }
}

/// `c · ln |X|`.
pub fn detbound_value(space_size: u64, c: f64) -> Result<f64> {
    if space_size < 2 {
        return Err(Error::InvalidParameter(format!("space size must be >= 2, got {space_size}")));
    }
    Ok(c * (space_size as f64).ln())
}

/// `c · ln(2n (n!)^n)`, the size bound of the profile-union space.
pub fn detbound_market_value(n: usize, c: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(c * ((2 * n) as f64).ln() + c * n as f64 * ln_factorial(n))
}

/// `c · n² · ln n`.
pub fn detbound_n2logn(n: usize, c: f64) -> f64 {
    let n = n as f64;
    c * n * n * n.ln()
}

/// `c · ln(1 + g)`.
pub fn sid_bound_value(genus: u64, c: f64) -> Result<f64> {
    if genus < 1 {
        return Err(Error::InvalidParameter("genus must be at least 1".into()));
    }
    Ok(c * (genus as f64).ln_1p())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionReport {
    pub max_expansion: f64,
    pub pairs_checked: usize,
    /// `(agent, better, worse)` triples breaking the inequality.
    pub violations: Vec<(usize, usize, usize)>,
    /// Smallest `max_expansion · u'-ratio − u-ratio` over checked pairs.
    pub min_slack: f64,
}

/// Embeds the generating space of `u` and compares, for every agent and
/// every pair `x` strictly preferred to `x'` with `u(a,x) < 0`,
/// `u(a,x')/u(a,x)` against `max_expansion · u'(a,x')/u'(a,x)` where `u'` is
/// the negated embedded distance.
pub fn composition_check(u: &UtilityProfile, quality: usize, seed: u64) -> Result<CompositionReport> {
    let (space, p) = build_generating_space(u)?;
    let t = bourgain_embed(&space, quality, seed)?;
    let report = measure_distortion(&space, &t)?;
    let n = u.n();
    let mut out = CompositionReport {
        max_expansion: report.max_expansion,
        pairs_checked: 0,
        violations: Vec::new(),
        min_slack: f64::INFINITY,
    };
    let order = ordinal_from_utility(u, TiePolicy::Index)?.profile;
    for a in 0..n {
        let r = order.ranking(a);
        for i in 0..n {
            for j in i + 1..n {
                let (x, x2) = (r[i], r[j]);
                if u.get(a, x) == 0.0 || u.get(a, x) == u.get(a, x2) {
                    continue;
                }
                let e = t.distance(p.alpha[a], p.beta[x]);
                let e2 = t.distance(p.alpha[a], p.beta[x2]);
                let lhs = u.get(a, x2) / u.get(a, x);
                let rhs = report.max_expansion * e2 / e;
                out.pairs_checked += 1;
                out.min_slack = out.min_slack.min(rhs - lhs);
                if lhs > rhs * (1.0 + DIST_TOL) {
                    out.violations.push((a, x, x2));
                }
            }
        }
    }
    Ok(out)
}
