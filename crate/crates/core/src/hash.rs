//! 64-bit mixing used for seed derivation and key hashing.

/// SplitMix64 finalizer: a bijective avalanche mix of one word.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Combines a word into a running hash state.
#[inline]
pub fn combine(state: u64, word: u64) -> u64 {
    mix64(state ^ mix64(word))
}

/// Seed for trial `trial` at density index `density` of a sweep.
pub fn trial_seed(base_seed: u64, density: u64, trial: u64) -> u64 {
    combine(combine(mix64(base_seed), density), trial)
}

/// 64-bit digest of a byte key under `seed`.
#[inline]
pub fn key_digest(key: &[u8], seed: u64) -> u64 {
    xxhash_rust::xxh3::xxh3_64_with_seed(key, seed)
}

/// `index`-th hash word derived from a key digest.
#[inline]
pub fn derived(digest: u64, index: u64) -> u64 {
    combine(digest, index)
}

/// Maps a uniform 64-bit word onto `[0, n)` by multiply-shift.
#[inline]
pub fn reduce(word: u64, n: u64) -> u64 {
    ((word as u128 * n as u128) >> 64) as u64
}
