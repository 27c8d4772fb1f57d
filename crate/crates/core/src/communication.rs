//! Decay and hardness functions, communication requirements
//! `T = D⁻¹(H(n) / ξ)`, finite-range admissibility trends and the
//! embedding-bound tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Increasing, continuous, unbounded `D: [0, ∞) → [0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DecayFunction {
    /// `slope · t`
    Linear { slope: f64 },
    /// `coef · t^exponent`
    Power { coef: f64, exponent: f64 },
    /// `coef · ln(1 + t)`
    Logarithmic { coef: f64 },
    /// `coef · (e^(rate·t) − 1)`
    Exponential { coef: f64, rate: f64 },
}

impl DecayFunction {
    pub fn validate(&self) -> Result<()> {
        let params: &[f64] = match self {
            DecayFunction::Linear { slope } => &[*slope],
            DecayFunction::Power { coef, exponent } => &[*coef, *exponent],
            DecayFunction::Logarithmic { coef } => &[*coef],
            DecayFunction::Exponential { coef, rate } => &[*coef, *rate],
        };
        if params.iter().all(|p| p.is_finite() && *p > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "decay parameters must be positive and finite: {self:?}"
            )))
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            DecayFunction::Linear { slope } => slope * t,
            DecayFunction::Power { coef, exponent } => coef * t.powf(exponent),
            DecayFunction::Logarithmic { coef } => coef * t.ln_1p(),
            DecayFunction::Exponential { coef, rate } => coef * (rate * t).exp_m1(),
        }
    }

    /// `D(0)`, the infimum of `D` on `t ≥ 0`.
    pub fn floor(&self) -> f64 {
        self.eval(0.0)
    }

    fn closed_form_inverse(&self, y: f64) -> f64 {
        match *self {
            DecayFunction::Linear { slope } => y / slope,
            DecayFunction::Power { coef, exponent } => (y / coef).powf(exponent.recip()),
            DecayFunction::Logarithmic { coef } => (y / coef).exp_m1(),
            DecayFunction::Exponential { coef, rate } => (y / coef).ln_1p() / rate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inverse {
    pub t: f64,
    /// `y ≤ D(0)`, so `t` was clamped to 0.
    pub clamped: bool,
}

const INVERSE_REL_TOL: f64 = 1e-10;

/// `D⁻¹(y)` via the closed form, polished by bisection when the closed form
/// misses the relative tolerance. Preimages beyond `f64::MAX` come back as
/// `+∞`.
pub fn decay_inverse(d: &DecayFunction, y: f64) -> Result<Inverse> {
    d.validate()?;
    if !(y.is_finite() && y >= 0.0) {
        return Err(Error::InvalidParameter(format!("target {y} must be finite and nonnegative")));
    }
    if y <= d.floor() {
        return Ok(Inverse { t: 0.0, clamped: true });
    }
    let t = d.closed_form_inverse(y);
    if t == f64::INFINITY {
        // the preimage exists but is not representable
        return Ok(Inverse { t, clamped: false });
    }
    if t.is_finite() && (d.eval(t) - y).abs() <= INVERSE_REL_TOL * y {
        return Ok(Inverse { t, clamped: false });
    }
    Ok(Inverse {
        t: bisect_inverse(|s| d.eval(s), y)?,
        clamped: false,
    })
}

/// Smallest `t ≥ 0` with `f(t) ≥ y` for increasing `f` with `f(0) < y`,
/// by doubling then bisection.
pub fn bisect_inverse(f: impl Fn(f64) -> f64, y: f64) -> Result<f64> {
    let mut hi = 1.0;
    while f(hi) < y {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::InvalidParameter(format!("target {y} is beyond the function's range")));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Nondecreasing positive `H(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum HardnessFunction {
    /// `value`
    Constant { value: f64 },
    /// `coef · ln(1 + n)`
    Log { coef: f64 },
    /// `coef · n^exponent`
    Polynomial { coef: f64, exponent: f64 },
    /// `coef · n² · ln(1 + n)`
    N2Log { coef: f64 },
}

impl HardnessFunction {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            HardnessFunction::Constant { value } => value > 0.0 && value.is_finite(),
            HardnessFunction::Log { coef } | HardnessFunction::N2Log { coef } => coef > 0.0 && coef.is_finite(),
            HardnessFunction::Polynomial { coef, exponent } => {
                coef > 0.0 && coef.is_finite() && exponent >= 0.0 && exponent.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid hardness parameters: {self:?}")))
        }
    }

    pub fn eval(&self, n: usize) -> f64 {
        let x = n as f64;
        match *self {
            HardnessFunction::Constant { value } => value,
            HardnessFunction::Log { coef } => coef * x.ln_1p(),
            HardnessFunction::Polynomial { coef, exponent } => coef * x.powf(exponent),
            HardnessFunction::N2Log { coef } => coef * x * x * x.ln_1p(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Requirement {
    pub t: f64,
    pub clamped: bool,
}

/// `D⁻¹(H(n) / ξ)`; `ξ = +∞` gives `T = 0`.
pub fn communication_requirement(xi: f64, h: &HardnessFunction, d: &DecayFunction, n: usize) -> Result<Requirement> {
    h.validate()?;
    if !(xi >= 1.0) {
        return Err(Error::InvalidParameter(format!("robustness must be at least 1, got {xi}")));
    }
    if xi == f64::INFINITY {
        d.validate()?;
        return Ok(Requirement { t: 0.0, clamped: true });
    }
    let inv = decay_inverse(d, h.eval(n) / xi)?;
    Ok(Requirement {
        t: inv.t,
        clamped: inv.clamped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Bounded,
    Growing,
}

/// Fitted exponents at or below this are classified as bounded.
pub const BOUNDED_EXPONENT: f64 = 0.05;

pub const TREND_CAVEAT: &str = "trend over the sampled range, not a limit";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityRow {
    pub n: usize,
    pub xi: f64,
    pub hardness: f64,
    pub ratio: f64,
    pub t: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub rows: Vec<AdmissibilityRow>,
    /// Least-squares slope of `ln(H(n)/ξ_n)` against `ln n`.
    pub exponent: f64,
    pub trend: Trend,
    pub caveat: String,
}

pub fn admissibility_report(
    xi_sequence: &[(usize, f64)],
    h: &HardnessFunction,
    d: &DecayFunction,
) -> Result<AdmissibilityReport> {
    if xi_sequence.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 sample points, got {}",
            xi_sequence.len()
        )));
    }
    let mut rows = Vec::with_capacity(xi_sequence.len());
    for &(n, xi) in xi_sequence {
        if n < 1 || !xi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sample (n = {n}, xi = {xi}) needs n >= 1 and finite xi"
            )));
        }
        let req = communication_requirement(xi, h, d, n)?;
        let hardness = h.eval(n);
        rows.push(AdmissibilityRow {
            n,
            xi,
            hardness,
            ratio: hardness / xi,
            t: req.t,
            clamped: req.clamped,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.ratio.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("sample points need at least two distinct n".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    Ok(AdmissibilityReport {
        rows,
        exponent,
        trend: if exponent <= BOUNDED_EXPONENT { Trend::Bounded } else { Trend::Growing },
        caveat: TREND_CAVEAT.to_string(),
    })
}

/// Constants standing in for the hidden factors of each bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundConstants {
    pub size: f64,
    pub genus: f64,
    pub agents: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        BoundConstants {
            size: 1.0,
            genus: 1.0,
            agents: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCell {
    /// The robustness bound the cell divides by.
    pub bound: f64,
    pub t: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub size: BoundCell,
    pub genus: BoundCell,
    pub agents: BoundCell,
}

/// Lower bounds on `T` (deterministic) and `T^P` (probabilistic), each
/// expressed through the space size `|X|`, the genus `g` and `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTable {
    pub n: usize,
    pub space_size: u64,
    pub genus: u64,
    pub hardness: f64,
    pub constants: BoundConstants,
    pub deterministic: BoundRow,
    pub probabilistic: BoundRow,
}

/// Cells: `D⁻¹(H(n) / b)` with `b = c·ln|X|`, `c·n²·ln(1+g)` (deterministic)
/// or `c·ln(1+g)` (probabilistic), and `c·n²·ln n`.
pub fn bound_table(
    n: usize,
    space_size: u64,
    genus: u64,
    h: &HardnessFunction,
    d: &DecayFunction,
    constants: BoundConstants,
) -> Result<BoundTable> {
    if n < 2 || space_size < 2 || genus < 1 {
        return Err(Error::InvalidParameter(format!(
            "bound table needs n >= 2, |X| >= 2 and g >= 1 (got n = {n}, |X| = {space_size}, g = {genus})"
        )));
    }
    for c in [constants.size, constants.genus, constants.agents] {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter("bound constants must be positive".into()));
        }
    }
    let hardness = h.eval(n);
    let nf = n as f64;
    let cell = |bound: f64| -> Result<BoundCell> {
        // a bound below 1 is no robustness guarantee at all
        let inv = decay_inverse(d, hardness / bound.max(1.0))?;
        Ok(BoundCell {
            bound,
            t: inv.t,
            clamped: inv.clamped,
        })
    };
    let size = constants.size * (space_size as f64).ln();
    let log_g = (genus as f64).ln_1p();
    let agents = constants.agents * nf * nf * nf.ln();
    Ok(BoundTable {
        n,
        space_size,
        genus,
        hardness,
        constants,
        deterministic: BoundRow {
            size: cell(size)?,
            genus: cell(constants.genus * nf * nf * log_g)?,
            agents: cell(agents)?,
        },
        probabilistic: BoundRow {
            size: cell(size)?,
            genus: cell(constants.genus * log_g)?,
            agents: cell(agents)?,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_examples() {
        let lin = DecayFunction::Linear { slope: 1.0 };
        assert_eq!(decay_inverse(&lin, 7.0).unwrap().t, 7.0);
        let sq = DecayFunction::Power { coef: 1.0, exponent: 2.0 };
        assert!((decay_inverse(&sq, 9.0).unwrap().t - 3.0).abs() < 1e-12);
        let zero = decay_inverse(&sq, 0.0).unwrap();
        assert!(zero.clamped && zero.t == 0.0);
    }

    #[test]
    fn bisection_matches_closed_forms() {
        let fams = [
            DecayFunction::Linear { slope: 0.3 },
            DecayFunction::Power { coef: 2.0, exponent: 0.5 },
            DecayFunction::Logarithmic { coef: 1.5 },
            DecayFunction::Exponential { coef: 0.5, rate: 2.0 },
        ];
        for d in fams {
            for y in [0.01, 0.5, 3.0, 40.0] {
                let closed = decay_inverse(&d, y).unwrap().t;
                let bis = bisect_inverse(|t| d.eval(t), y).unwrap();
                assert!((closed - bis).abs() <= 1e-9 * closed.max(1.0), "{d:?} {y}");
            }
        }
    }

    #[test]
    fn requirement_examples() {
        let h = HardnessFunction::Polynomial { coef: 1.0, exponent: 1.0 };
        let d = DecayFunction::Linear { slope: 1.0 };
        assert_eq!(communication_requirement(2.0, &h, &d, 10).unwrap().t, 5.0);
        assert_eq!(communication_requirement(f64::INFINITY, &h, &d, 10).unwrap().t, 0.0);
        assert!(communication_requirement(0.5, &h, &d, 10).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let d = DecayFunction::Linear { slope: 1.0 };
        let ns = [4usize, 8, 16, 32, 64];
        let flat: Vec<(usize, f64)> = ns.iter().map(|&n| (n, 2.0)).collect();
        let r = admissibility_report(&flat, &HardnessFunction::Constant { value: 3.0 }, &d).unwrap();
        assert_eq!(r.trend, Trend::Bounded);
        assert!(r.rows.iter().all(|row| row.t == 1.5));
        let banach: Vec<(usize, f64)> = ns.iter().map(|&n| (n, 3.0)).collect();
        let r = admissibility_report(&banach, &HardnessFunction::Log { coef: 1.0 }, &d).unwrap();
        assert_eq!(r.trend, Trend::Growing);
        let det: Vec<(usize, f64)> = ns.iter().map(|&n| (n, 0.5 * (n * n) as f64 * (n as f64).ln_1p())).collect();
        let r = admissibility_report(&det, &HardnessFunction::N2Log { coef: 1.0 }, &d).unwrap();
        assert_eq!(r.trend, Trend::Bounded);
        assert!(r.exponent.abs() < 1e-12);
        assert!(admissibility_report(&det[..2], &HardnessFunction::N2Log { coef: 1.0 }, &d).is_err());
    }

    #[test]
    fn table_structure() {
        let h = HardnessFunction::N2Log { coef: 1.0 };
        let d = DecayFunction::Power { coef: 1.0, exponent: 1.0 };
        let t = bound_table(5, 10_000, 3, &h, &d, BoundConstants::default()).unwrap();
        assert_eq!(t.deterministic.size, t.probabilistic.size);
        assert_eq!(t.deterministic.agents, t.probabilistic.agents);
        assert!((t.deterministic.genus.bound - 25.0 * t.probabilistic.genus.bound).abs() < 1e-9);
        assert!(t.probabilistic.genus.t >= t.deterministic.genus.t);
        assert!(bound_table(1, 10, 1, &h, &d, BoundConstants::default()).is_err());
    }

    #[test]
    fn config_shapes() {
        let d: DecayFunction = serde_json::from_str(r#"{"family":"power","coef":1.0,"exponent":2.0}"#).unwrap();
        assert_eq!(d, DecayFunction::Power { coef: 1.0, exponent: 2.0 });
        let h: HardnessFunction = serde_json::from_str(r#"{"family":"n2_log","coef":2.0}"#).unwrap();
        assert_eq!(h, HardnessFunction::N2Log { coef: 2.0 });
    }
}
