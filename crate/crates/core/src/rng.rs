//! Seed handling: one 64-bit seed, one ChaCha stream per trial.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Seed used whenever a caller does not supply one.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Independent generator for trial `stream` of `seed`; the result does not
/// depend on how many other trials ran or in what order.
pub fn trial_rng(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
