//! Per-trial random substreams.
//!
//! Trial `t` of grid point `p` under master seed `s` always uses ChaCha8
//! keyed by `(s, p)` on stream `t`, so results do not depend on how trials
//! are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DOMAIN_TAG: &[u8; 8] = b"pdra-sim";

pub fn substream(master_seed: u64, point_id: u64, trial_index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&point_id.to_le_bytes());
    key[16..24].copy_from_slice(DOMAIN_TAG);
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial_index);
    rng
}
