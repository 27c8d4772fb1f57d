//! Robustness, probabilistic robustness and communication requirements of
//! two-sided stable-matching markets under multiplicative utility
//! perturbations, together with the metric-space view of polarized markets.

pub mod combinatorics;
pub mod communication;
pub mod embedding;
mod error;
pub mod market;
pub mod matching;
pub mod metric;
pub mod perturbation;
pub mod planarity;
pub mod polarity;
pub mod rng;
pub mod utility;

pub use error::{Error, Result};
pub use market::{MarketProfile, MatchingMarket, ProfileSet};
pub use matching::{Assignment, OrdinalProfile, Side, StablePair, TiePolicy};
pub use metric::{MetricSpace, Placement};

pub use perturbation::Perturbation;
pub use utility::UtilityProfile;
