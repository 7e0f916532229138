//! Deterministic stream derivation. Every random draw in the library comes
//! from a ChaCha8 stream seeded by (master seed, domain, index), and fitness
//! evaluation consumes no randomness at all, so thread scheduling can never
//! perturb a stream or a result.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Swarm initialization draws (one stream per particle index).
pub const DOMAIN_INIT: u64 = 0x494e_4954;
/// Velocity-update draws (one stream per particle index).
pub const DOMAIN_VELOCITY: u64 = 0x5645_4c4f;
/// Tabu neighborhood draws (one stream per search invocation).
pub const DOMAIN_TABU: u64 = 0x5441_4255;

/// Algorithm identifier recorded in run metadata.
pub const PRNG_ID: &str = "chacha8 + splitmix64 stream derivation";

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for (domain, index) under a master seed. Two mixing rounds keep
/// adjacent indices and domains uncorrelated.
pub fn child_seed(master: u64, domain: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ domain) ^ index)
}

/// The ChaCha8 stream for (domain, index).
pub fn stream(master: u64, domain: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(master, domain, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn child_seed_is_frozen() {
        // Any change to the derivation would silently break reproducibility
        // of recorded runs, so the values are pinned.
        assert_eq!(child_seed(42, DOMAIN_INIT, 0), 0x68d7_aafa_f450_e5da);
        assert_eq!(child_seed(42, DOMAIN_VELOCITY, 3), 0x90a0_eeb9_64fd_4180);
        assert_eq!(child_seed(0, DOMAIN_TABU, 1), 0x042e_ed17_7581_c0d6);
    }

    #[test]
    fn streams_differ_across_domains_and_indices() {
        let a: f64 = stream(7, DOMAIN_INIT, 0).random();
        let b: f64 = stream(7, DOMAIN_VELOCITY, 0).random();
        let c: f64 = stream(7, DOMAIN_INIT, 1).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn same_stream_replays() {
        let mut s1 = stream(9, DOMAIN_TABU, 4);
        let mut s2 = stream(9, DOMAIN_TABU, 4);
        for _ in 0..32 {
            assert_eq!(s1.random::<u64>(), s2.random::<u64>());
        }
    }
}
