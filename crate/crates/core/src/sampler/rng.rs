//! Seed derivation for the chain's independent random streams.
//!
//! Every stream is a ChaCha8 generator seeded from the master seed (expanded
//! by `SeedableRng::seed_from_u64`) and placed on stream id
//! `fnv1a(domain tag || key)`. Conditions are keyed by their label, so
//! reordering conditions moves their streams with them and running the
//! conditions in parallel cannot change any draw.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ChainRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Domain {
    Init,
    Precision,
    Augmentation,
    Component,
    Concentration,
}

impl Domain {
    fn tag(self) -> &'static [u8] {
        match self {
            Domain::Init => b"init",
            Domain::Precision => b"precision",
            Domain::Augmentation => b"augmentation",
            Domain::Component => b"component",
            Domain::Concentration => b"concentration",
        }
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Key of the shared (condition-independent) DP component.
pub(crate) const SHARED_KEY: &str = "\u{0}shared";

pub(crate) fn substream(seed: u64, domain: Domain, key: &str) -> ChainRng {
    let mut id = domain.tag().to_vec();
    id.push(0xff);
    id.extend_from_slice(key.as_bytes());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(&id));
    rng
}

/// Stream keyed by an arbitrary string, for generators outside the chain.
pub fn keyed_stream(seed: u64, key: &str) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(key.as_bytes()));
    rng
}
