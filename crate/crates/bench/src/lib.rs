//! Shared fixtures for the criterion benches.

use era_core::arith::derive_rng;
use era_core::auction::AuctionConfig;
use era_core::paillier::KeyPair;

/// Small but realistic auction: cent bids up to $100, 32-bit mapped bids.
pub fn bench_config(l: usize, w: usize, key_bits: u64) -> AuctionConfig {
    AuctionConfig {
        key_bits,
        group_bits: 64,
        l,
        w,
        seed: 1,
        ..AuctionConfig::default()
    }
}

pub fn keys(bits: u64) -> KeyPair {
    KeyPair::generate(bits, &mut derive_rng(b"bench", "keys")).expect("key generation")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        bench_config(10, 2, 256).validate().unwrap();
        assert_eq!(keys(128).public().bits(), 128);
    }
}
