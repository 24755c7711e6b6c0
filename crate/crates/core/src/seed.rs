//! Seed derivation for independent random substreams.
//!
//! Every replication (and every stage within a replication) seeds its own
//! generator from `mix_seed(master, stream)`, so results are identical no
//! matter how replications are scheduled across threads.

/// Derive a substream seed from a master seed and a stream index.
///
/// The stream index is spread by the golden-gamma constant `0x9E3779B97F4A7C15`
/// and the result is passed through the SplitMix64 finalizer
/// (multipliers `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`), a bijection
/// on `u64` with full avalanche.
pub fn mix_seed(master: u64, stream: u64) -> u64 {
    let mut z = master.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
