//! Counter-based random bits for simulated tournaments.
//!
//! Replication `r` under seed `s` owns the SplitMix64 stream whose state is
//! `mix64(mix64(s ^ SEED_SALT) + r * GAMMA)`. Word `i` of that stream is
//! `mix64(state + (i + 1) * GAMMA)`, so any word is computed directly from
//! `(seed, replication, i)` without touching the others. Games consume the
//! words 64 at a time in lexicographic pair order: game `g` is bit `g % 64`
//! of word `g / 64`.

pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const SEED_SALT: u64 = 0x243F_6A88_85A3_08D3;

/// SplitMix64 output finalizer (a bijection on `u64`).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub replication: u64,
}

impl StreamKey {
    pub fn new(seed: u64, replication: u64) -> Self {
        StreamKey { seed, replication }
    }

    pub fn stream(&self) -> Stream {
        let base = mix64(self.seed ^ SEED_SALT);
        Stream {
            state: mix64(base.wrapping_add(self.replication.wrapping_mul(GAMMA))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Stream {
    state: u64,
}

impl Stream {
    #[inline]
    pub fn word(&self, index: u64) -> u64 {
        mix64(self.state.wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)))
    }

    /// Bit `g` of the stream.
    pub fn bit(&self, g: u64) -> bool {
        self.word(g / 64) >> (g % 64) & 1 == 1
    }

    pub fn fill(&self, out: &mut [u64]) {
        for (i, w) in out.iter_mut().enumerate() {
            *w = self.word(i as u64);
        }
    }
}
