//! Multiplicative utility perturbations, deterministic robustness and the
//! probabilistic constructions built on top of them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{MarketProfile, MatchingMarket, ProfileSet};
use crate::matching::{distinguishing_profile, ordinal_from_utility, phi, OrdinalProfile, Side, StablePair, TiePolicy};
use crate::rng::{trial_rng, TrialRng};
use crate::utility::UtilityProfile;

/// `n × n` factors, each at least 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPerturbation", into = "RawPerturbation")]
pub struct Perturbation {
    factors: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawPerturbation {
    n: usize,
    factors: Vec<Vec<f64>>,
}

impl TryFrom<RawPerturbation> for Perturbation {
    type Error = Error;

    fn try_from(raw: RawPerturbation) -> Result<Self> {
        if raw.factors.len() != raw.n {
            return Err(Error::SizeMismatch {
                expected: raw.n,
                found: raw.factors.len(),
            });
        }
        Perturbation::new(raw.factors)
    }
}

impl From<Perturbation> for RawPerturbation {
    fn from(p: Perturbation) -> Self {
        RawPerturbation {
            n: p.n(),
            factors: p.factors,
        }
    }
}

impl Perturbation {
    pub fn new(factors: Vec<Vec<f64>>) -> Result<Self> {
        let n = factors.len();
        for (a, row) in factors.iter().enumerate() {
            if row.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (x, &value) in row.iter().enumerate() {
                if !(value >= 1.0) || !value.is_finite() {
                    return Err(Error::FactorBelowOne {
                        agent: a,
                        alternative: x,
                        value,
                    });
                }
            }
        }
        Ok(Perturbation { factors })
    }

    pub fn ones(n: usize) -> Self {
        Perturbation {
            factors: vec![vec![1.0; n]; n],
        }
    }

    /// Factor `value` at `(agent, alternative)`, 1 elsewhere.
    pub fn single(n: usize, agent: usize, alternative: usize, value: f64) -> Result<Self> {
        let mut p = Perturbation::ones(n);
        if value < 1.0 {
            return Err(Error::FactorBelowOne {
                agent,
                alternative,
                value,
            });
        }
        p.factors[agent][alternative] = value;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn get(&self, agent: usize, alternative: usize) -> f64 {
        self.factors[agent][alternative]
    }

    pub fn factors(&self) -> &[Vec<f64>] {
        &self.factors
    }

    pub fn max_factor(&self) -> f64 {
        self.factors.iter().flatten().copied().fold(1.0, f64::max)
    }
}

/// `δu`, the entrywise product.
pub fn apply_perturbation(delta: &Perturbation, u: &UtilityProfile) -> Result<UtilityProfile> {
    if delta.n() != u.n() {
        return Err(Error::SizeMismatch {
            expected: u.n(),
            found: delta.n(),
        });
    }
    let values = u
        .values()
        .iter()
        .zip(delta.factors())
        .map(|(urow, drow)| urow.iter().zip(drow).map(|(v, d)| v * d).collect())
        .collect();
    UtilityProfile::new(values)
}

/// Inner/outer minimum of the ratio formula together with its location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    /// `+inf` when no comparable pair exists (n = 1).
    pub xi: f64,
    pub argmin: Option<CriticalRatio>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalRatio {
    pub side: Side,
    pub profile: OrdinalProfile,
    pub agent: usize,
    pub better: usize,
    pub worse: usize,
    pub ratio: f64,
}

const SIDES: [Side; 2] = [Side::Men, Side::Women];

fn check_level(c: f64) -> Result<()> {
    if !(c >= 1.0) || c.is_nan() {
        return Err(Error::InvalidParameter(format!("C must be at least 1, got {c}")));
    }
    Ok(())
}

/// The ratio characterization: for every profile, agent and `x` ranked above
/// `x'`, `C·u(a,x) > u(a,x')` on both sides.
pub fn is_c_robust(market: &MatchingMarket, c: f64, set: &ProfileSet) -> Result<bool> {
    check_level(c)?;
    for side in SIDES {
        let profile = market.side(side);
        for r in profile.profiles(set)? {
            let u = profile.utility(&r)?;
            for a in 0..r.n() {
                let ranking = r.ranking(a);
                for (i, &x) in ranking.iter().enumerate() {
                    for &worse in &ranking[i + 1..] {
                        if !(c * u.get(a, x) > u.get(a, worse)) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Every ratio `u(a,x')/u(a,x)` with `x` ranked directly above `x'`.
pub fn critical_ratios(market: &MatchingMarket, set: &ProfileSet) -> Result<Vec<CriticalRatio>> {
    let mut out = Vec::new();
    for side in SIDES {
        let profile = market.side(side);
        for r in profile.profiles(set)? {
            let u = profile.utility(&r)?;
            for a in 0..r.n() {
                for pair in r.ranking(a).windows(2) {
                    let (better, worse) = (pair[0], pair[1]);
                    let denom = u.get(a, better);
                    if denom == 0.0 {
                        return Err(Error::DivisionByZeroUtility {
                            side,
                            profile: r.ranks().to_vec(),
                            agent: a,
                            alternative: better,
                        });
                    }
                    out.push(CriticalRatio {
                        side,
                        profile: r.clone(),
                        agent: a,
                        better,
                        worse,
                        ratio: u.get(a, worse) / denom,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Robustness as the double minimum over all ordered pairs of
/// `U[R](m,w') / U[R](m,w)` for `w R_m w'`, both sides.
pub fn robustness(market: &MatchingMarket, set: &ProfileSet) -> Result<RobustnessReport> {
    let mut best: Option<CriticalRatio> = None;
    for side in SIDES {
        let profile = market.side(side);
        for r in profile.profiles(set)? {
            let u = profile.utility(&r)?;
            for a in 0..r.n() {
                let ranking = r.ranking(a);
                for (i, &better) in ranking.iter().enumerate() {
                    for &worse in &ranking[i + 1..] {
                        let denom = u.get(a, better);
                        if denom == 0.0 {
                            return Err(Error::DivisionByZeroUtility {
                                side,
                                profile: r.ranks().to_vec(),
                                agent: a,
                                alternative: better,
                            });
                        }
                        let ratio = u.get(a, worse) / denom;
                        if best.as_ref().is_none_or(|b| ratio < b.ratio) {
                            best = Some(CriticalRatio {
                                side,
                                profile: r.clone(),
                                agent: a,
                                better,
                                worse,
                                ratio,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(RobustnessReport {
        xi: best.as_ref().map_or(f64::INFINITY, |b| b.ratio),
        argmin: best,
    })
}

/// A verified failure of C-robustness: a single-entry perturbation that
/// changes one side's ordinal profile, plus an opposite-side profile on
/// which the stable pair changes as a result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub side: Side,
    pub profile: OrdinalProfile,
    pub delta: Perturbation,
    pub perturbed_profile: OrdinalProfile,
    /// Profile of the other side that separates `profile` from `perturbed_profile`.
    pub counter_profile: OrdinalProfile,
    pub original: StablePair,
    pub perturbed: StablePair,
}

/// Order by perturbed utility; ties resolved against the original order, so
/// any tie shows up as a change.
fn adversarial_order(original: &OrdinalProfile, perturbed: &UtilityProfile) -> OrdinalProfile {
    let pos = original.positions();
    let n = original.n();
    let ranks = (0..n)
        .map(|a| {
            let row = perturbed.row(a);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&x, &y| row[y].total_cmp(&row[x]).then(pos[a][y].cmp(&pos[a][x])));
            order
        })
        .collect();
    OrdinalProfile::new(ranks).expect("permutation")
}

fn stable_pair_for(side: Side, own: &OrdinalProfile, other: &OrdinalProfile) -> Result<StablePair> {
    match side {
        Side::Men => phi(own, other),
        Side::Women => phi(other, own),
    }
}

/// Builds and verifies a witness from `r` and a differing `r_prime` on `side`.
fn verified_witness(
    side: Side,
    r: &OrdinalProfile,
    r_prime: OrdinalProfile,
    delta: Perturbation,
) -> Result<Option<Witness>> {
    let counter = distinguishing_profile(r, &r_prime)?;
    let original = stable_pair_for(side, r, &counter)?;
    let perturbed = stable_pair_for(side, &r_prime, &counter)?;
    if original == perturbed {
        return Ok(None);
    }
    Ok(Some(Witness {
        side,
        profile: r.clone(),
        delta,
        perturbed_profile: r_prime,
        counter_profile: counter,
        original,
        perturbed,
    }))
}

/// Searches single-entry perturbations with one factor equal to `C` (the
/// extremal case: a flip under any factor ≤ C also happens at C) over every
/// profile in `set`, both sides. Returns the first verified witness.
pub fn adversarial_witness_in(market: &MatchingMarket, c: f64, set: &ProfileSet) -> Result<Option<Witness>> {
    check_level(c)?;
    if c == 1.0 {
        return Ok(None);
    }
    let n = market.n();
    for side in SIDES {
        let profile = market.side(side);
        for r in profile.profiles(set)? {
            let u = profile.utility(&r)?;
            for a in 0..n {
                for x in 0..n {
                    let delta = Perturbation::single(n, a, x, c)?;
                    let perturbed = apply_perturbation(&delta, &u)?;
                    let r_prime = adversarial_order(&r, &perturbed);
                    if r_prime == r {
                        continue;
                    }
                    if let Some(w) = verified_witness(side, &r, r_prime, delta)? {
                        return Ok(Some(w));
                    }
                }
            }
        }
    }
    Ok(None)
}

pub fn adversarial_witness(market: &MatchingMarket, c: f64) -> Result<Option<Witness>> {
    adversarial_witness_in(market, c, &ProfileSet::Exhaustive)
}

/// Bisection on C using only the witness search (perturb, re-rank, compare
/// stable pairs). Independent of the ratio formula.
pub fn robustness_by_search(market: &MatchingMarket, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let n = market.n();
    let enumerated = matches!(market.men, MarketProfile::Extensional { .. })
        || matches!(market.women, MarketProfile::Extensional { .. });
    if enumerated && n > crate::market::EXHAUSTIVE_CAP {
        return Err(Error::TooLarge {
            n,
            cap: crate::market::EXHAUSTIVE_CAP,
        });
    }
    check_level(lo)?;
    if !(hi > lo) || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need lo < hi and tol > 0 (lo = {lo}, hi = {hi}, tol = {tol})"
        )));
    }
    let broken = |c: f64| -> Result<bool> { Ok(adversarial_witness(market, c)?.is_some()) };
    if broken(lo)? {
        return Ok(lo);
    }
    if !broken(hi)? {
        return Ok(f64::INFINITY);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if broken(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `2n(n-1)(C-1) + 1`: deterministic robustness sufficient for probabilistic
/// C-robustness.
pub fn theorem_ub_level(n: usize, c: f64) -> f64 {
    let pairs = 2.0 * n as f64 * (n as f64 - 1.0);
    pairs * (c - 1.0) + 1.0
}

/// Inverse of [`theorem_ub_level`]: the probabilistic level guaranteed by a
/// deterministic robustness `xi`. Infinite for n = 1.
pub fn guaranteed_probabilistic_level(n: usize, xi: f64) -> f64 {
    if n < 2 || xi.is_infinite() {
        return f64::INFINITY;
    }
    let pairs = 2.0 * n as f64 * (n as f64 - 1.0);
    (xi - 1.0) / pairs + 1.0
}

fn check_appendix_params(n: usize, c: f64, eps: f64) -> Result<()> {
    if n < 2 || !(c >= 1.0) || !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need n >= 2, C >= 1, eps > 0 (n = {n}, C = {c}, eps = {eps})"
        )));
    }
    Ok(())
}

/// Consecutive ratio `2n(n-1)((1 + eps/2)C - 1) + 1` of the critical market.
pub fn critical_ratio(n: usize, c: f64, eps: f64) -> f64 {
    theorem_ub_level(n, (1.0 + eps / 2.0) * c)
}

/// Spike `2n(n-1)((1 + eps)C - 1) + 1` used by [`AppendixSampler`].
pub fn spike_value(n: usize, c: f64, eps: f64) -> f64 {
    theorem_ub_level(n, (1.0 + eps) * c)
}

/// Rank-based market whose consecutive utility ratios all equal
/// [`critical_ratio`] on both sides, top utility -1.
pub fn critical_market(n: usize, c: f64, eps: f64) -> Result<MatchingMarket> {
    check_appendix_params(n, c, eps)?;
    let ratio = critical_ratio(n, c, eps);
    let row: Vec<f64> = (0..n).map(|i| -ratio.powi(i as i32)).collect();
    let side = MarketProfile::rank_based(vec![row; n])?;
    MatchingMarket::new(side.clone(), side)
}

/// One draw of profiles and perturbations for both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSample {
    pub men_profile: OrdinalProfile,
    pub women_profile: OrdinalProfile,
    pub men_delta: Perturbation,
    pub women_delta: Perturbation,
}

impl JointSample {
    /// The `2n(n-1)` rank-slot factors: `δ(a, X(R, a, i))` for every agent on
    /// both sides (men first) and every rank `i` except the last.
    pub fn rank_slot_factors(&self) -> Vec<f64> {
        let n = self.men_profile.n();
        let mut out = Vec::with_capacity(2 * n * n.saturating_sub(1));
        for (profile, delta) in [
            (&self.men_profile, &self.men_delta),
            (&self.women_profile, &self.women_delta),
        ] {
            for a in 0..n {
                for i in 0..n - 1 {
                    out.push(delta.get(a, profile.at(a, i)));
                }
            }
        }
        out
    }
}

/// A (possibly correlated) joint distribution over profiles and perturbations.
pub trait JointSampler: Sync {
    fn n(&self) -> usize;
    fn sample(&self, rng: &mut TrialRng) -> Result<JointSample>;
}

/// The same sample every time.
#[derive(Debug, Clone)]
pub struct FixedSampler(pub JointSample);

impl JointSampler for FixedSampler {
    fn n(&self) -> usize {
        self.0.men_profile.n()
    }

    fn sample(&self, _rng: &mut TrialRng) -> Result<JointSample> {
        Ok(self.0.clone())
    }
}

/// Uniform profiles; i.i.d. factors uniform on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct UniformFactorSampler {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
}

impl UniformFactorSampler {
    /// Factors bounded by `c` almost surely (a deterministic C-perturbation).
    pub fn bounded(n: usize, c: f64) -> Self {
        UniformFactorSampler { n, lo: 1.0, hi: c }
    }

    /// Factors on `[1, 2c - 1]`: mean exactly `c`, unbounded by `c`.
    pub fn mean(n: usize, c: f64) -> Self {
        UniformFactorSampler {
            n,
            lo: 1.0,
            hi: 2.0 * c - 1.0,
        }
    }

    fn draw(&self, rng: &mut TrialRng) -> Result<Perturbation> {
        let n = self.n;
        let factors = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| if self.hi > self.lo { rng.random_range(self.lo..=self.hi) } else { self.lo })
                    .collect()
            })
            .collect();
        Perturbation::new(factors)
    }
}

impl JointSampler for UniformFactorSampler {
    fn n(&self) -> usize {
        self.n
    }

    fn sample(&self, rng: &mut TrialRng) -> Result<JointSample> {
        let men_profile = OrdinalProfile::random(self.n, rng);
        let women_profile = OrdinalProfile::random(self.n, rng);
        Ok(JointSample {
            men_profile,
            women_profile,
            men_delta: self.draw(rng)?,
            women_delta: self.draw(rng)?,
        })
    }
}

/// Uniform profiles; one fixed factor at a fixed (side, agent, rank) slot.
#[derive(Debug, Clone)]
pub struct SpikeSampler {
    pub n: usize,
    pub side: Side,
    pub agent: usize,
    pub rank: usize,
    pub value: f64,
}

impl JointSampler for SpikeSampler {
    fn n(&self) -> usize {
        self.n
    }

    fn sample(&self, rng: &mut TrialRng) -> Result<JointSample> {
        let men_profile = OrdinalProfile::random(self.n, rng);
        let women_profile = OrdinalProfile::random(self.n, rng);
        let own = match self.side {
            Side::Men => &men_profile,
            Side::Women => &women_profile,
        };
        let spiked = Perturbation::single(self.n, self.agent, own.at(self.agent, self.rank), self.value)?;
        let (men_delta, women_delta) = match self.side {
            Side::Men => (spiked, Perturbation::ones(self.n)),
            Side::Women => (Perturbation::ones(self.n), spiked),
        };
        Ok(JointSample {
            men_profile,
            women_profile,
            men_delta,
            women_delta,
        })
    }
}

/// The joint distribution that defeats probabilistic `(1+eps)C`-robustness
/// on [`critical_market`]: pick a slot `(a*, i*)` uniformly from
/// `[2n] × [n-1]`, spike that agent's `i*`-th ranked entry by
/// [`spike_value`], draw the spiked side's profile uniformly, and give the
/// other side the profile separating the true and perturbed rankings.
#[derive(Debug, Clone)]
pub struct AppendixSampler {
    market: MatchingMarket,
    n: usize,
    spike: f64,
}

impl AppendixSampler {
    pub fn new(market: &MatchingMarket, c: f64, eps: f64) -> Result<Self> {
        let n = market.n();
        check_appendix_params(n, c, eps)?;
        let expected = critical_market(n, c, eps)?;
        let close = |a: &MarketProfile, b: &MarketProfile| match (a, b) {
            (MarketProfile::RankBased { values: x }, MarketProfile::RankBased { values: y }) => x
                .iter()
                .flatten()
                .zip(y.iter().flatten())
                .all(|(p, q)| (p - q).abs() <= 1e-12 * q.abs()),
            _ => false,
        };
        if !close(&market.men, &expected.men) || !close(&market.women, &expected.women) {
            return Err(Error::InvalidParameter(
                "market is not the critical market for these parameters".into(),
            ));
        }
        Ok(AppendixSampler {
            market: market.clone(),
            n,
            spike: spike_value(n, c, eps),
        })
    }

    pub fn spike(&self) -> f64 {
        self.spike
    }
}

impl JointSampler for AppendixSampler {
    fn n(&self) -> usize {
        self.n
    }

    fn sample(&self, rng: &mut TrialRng) -> Result<JointSample> {
        let n = self.n;
        let slot = rng.random_range(0..2 * n);
        let rank = rng.random_range(0..n - 1);
        let (side, agent) = if slot < n { (Side::Men, slot) } else { (Side::Women, slot - n) };

        let own = OrdinalProfile::random(n, rng);
        let delta = Perturbation::single(n, agent, own.at(agent, rank), self.spike)?;
        let u = self.market.side(side).utility(&own)?;
        let perturbed = ordinal_from_utility(&apply_perturbation(&delta, &u)?, TiePolicy::Index)?.profile;
        let other = distinguishing_profile(&own, &perturbed)?;

        Ok(match side {
            Side::Men => JointSample {
                men_profile: own,
                women_profile: other,
                men_delta: delta,
                women_delta: Perturbation::ones(n),
            },
            Side::Women => JointSample {
                men_profile: other,
                women_profile: own,
                men_delta: Perturbation::ones(n),
                women_delta: delta,
            },
        })
    }
}

/// Serializable description of a sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sampler", rename_all = "snake_case")]
pub enum SamplerSpec {
    Identity { n: usize },
    BoundedUniform { n: usize, c: f64 },
    MeanUniform { n: usize, c: f64 },
    Appendix { n: usize, c: f64, eps: f64 },
}

impl SamplerSpec {
    pub fn build(&self, market: &MatchingMarket) -> Result<Box<dyn JointSampler>> {
        Ok(match *self {
            SamplerSpec::Identity { n } => Box::new(UniformFactorSampler { n, lo: 1.0, hi: 1.0 }),
            SamplerSpec::BoundedUniform { n, c } => Box::new(UniformFactorSampler::bounded(n, c)),
            SamplerSpec::MeanUniform { n, c } => Box::new(UniformFactorSampler::mean(n, c)),
            SamplerSpec::Appendix { c, eps, .. } => Box::new(AppendixSampler::new(market, c, eps)?),
        })
    }
}

/// Monte Carlo estimate of how often the stable pair survives perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreservationEstimate {
    pub trials: u64,
    pub preserved: u64,
    pub fraction: f64,
}

fn trial_preserved(market: &MatchingMarket, sample: &JointSample) -> Result<bool> {
    let perturbed_side = |side: Side, r: &OrdinalProfile, delta: &Perturbation| -> Result<Option<OrdinalProfile>> {
        let u = market.side(side).utility(r)?;
        let e = ordinal_from_utility(&apply_perturbation(delta, &u)?, TiePolicy::Index)?;
        Ok((!e.had_ties).then_some(e.profile))
    };
    let Some(men) = perturbed_side(Side::Men, &sample.men_profile, &sample.men_delta)? else {
        return Ok(false);
    };
    let Some(women) = perturbed_side(Side::Women, &sample.women_profile, &sample.women_delta)? else {
        return Ok(false);
    };
    Ok(phi(&sample.men_profile, &sample.women_profile)? == phi(&men, &women)?)
}

/// Fraction of `trials` draws for which `Φ` of the perturbed ordinals equals
/// `Φ` of the true ones. Trial `t` uses stream `t` of `seed`; ties after
/// perturbation count as not preserved.
pub fn preservation_probability(
    market: &MatchingMarket,
    sampler: &dyn JointSampler,
    trials: u64,
    seed: u64,
) -> Result<PreservationEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if sampler.n() != market.n() {
        return Err(Error::SizeMismatch {
            expected: market.n(),
            found: sampler.n(),
        });
    }
    let run = |t: u64| -> Result<u64> {
        let mut rng = trial_rng(seed, t);
        let sample = sampler.sample(&mut rng)?;
        Ok(trial_preserved(market, &sample)? as u64)
    };
    #[cfg(feature = "parallel")]
    let preserved: u64 = {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(run).sum::<Result<u64>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let preserved: u64 = (0..trials).map(run).sum::<Result<u64>>()?;
    Ok(PreservationEstimate {
        trials,
        preserved,
        fraction: preserved as f64 / trials as f64,
    })
}

/// Mean and standard error of one rank-slot factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotStatistic {
    pub mean: f64,
    pub std_error: f64,
}

/// Per-slot sample mean of [`JointSample::rank_slot_factors`] over `draws`.
pub fn rank_slot_statistics(sampler: &dyn JointSampler, draws: u64, seed: u64) -> Result<Vec<SlotStatistic>> {
    if draws < 2 {
        return Err(Error::InvalidParameter("need at least 2 draws".into()));
    }
    let n = sampler.n();
    let slots = 2 * n * (n - 1);
    let mut sum = vec![0.0; slots];
    let mut sum_sq = vec![0.0; slots];
    for t in 0..draws {
        let mut rng = trial_rng(seed, t);
        let factors = sampler.sample(&mut rng)?.rank_slot_factors();
        for (k, f) in factors.into_iter().enumerate() {
            sum[k] += f;
            sum_sq[k] += f * f;
        }
    }
    let d = draws as f64;
    Ok(sum
        .iter()
        .zip(&sum_sq)
        .map(|(&s, &sq)| {
            let mean = s / d;
            let var = ((sq - d * mean * mean) / (d - 1.0)).max(0.0);
            SlotStatistic {
                mean,
                std_error: (var / d).sqrt(),
            }
        })
        .collect())
}
