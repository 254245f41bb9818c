//! Seeded random substreams.
//!
//! Every unit of work draws from its own ChaCha8 stream: the key is the master
//! seed, the 64-bit stream id is the FNV-1a hash of `label` followed by the
//! little-endian bytes of `index`. Results therefore do not depend on how work
//! is scheduled across threads, and no global RNG exists.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn stream_id(label: &str, index: u64) -> u64 {
    label
        .as_bytes()
        .iter()
        .chain(index.to_le_bytes().iter())
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(*b)).wrapping_mul(FNV_PRIME))
}

pub fn substream(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream_id(label, index));
    rng
}
