//! Counter-based random numbers (Philox4x32-10).
//!
//! Every draw is a pure function of `(key, counter)`, so sample `i` of
//! trial `t` can be produced in any order, on any thread, and still be
//! bit-identical. The key is the 64-bit experiment seed; the 128-bit
//! counter packs `(sample index, trial index, block)`.

const M0: u32 = 0xD251_1F53;
const M1: u32 = 0xCD9E_8D57;
const W0: u32 = 0x9E37_79B9;
const W1: u32 = 0xBB67_AE85;

/// Name of the generator and stream layout, recorded in sample sets.
pub const GENERATOR_ID: &str = "philox4x32-10/seed:key,ctr:(sample,trial,block)";

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = a as u64 * b as u64;
    ((p >> 32) as u32, p as u32)
}

/// The raw Philox4x32 bijection with 10 rounds.
pub fn philox4x32(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = counter;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(W0);
            k[1] = k[1].wrapping_add(W1);
        }
        let (hi0, lo0) = mulhilo(M0, c[0]);
        let (hi1, lo1) = mulhilo(M1, c[2]);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
    }
    c
}

/// A keyed stream of 256-bit blocks addressed by `(sample, trial, block)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterRng {
    key: [u32; 2],
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { key: [seed as u32, (seed >> 32) as u32] }
    }

    pub fn seed(&self) -> u64 {
        self.key[0] as u64 | (self.key[1] as u64) << 32
    }

    /// Two 64-bit words for one address.
    pub fn block(&self, sample: u64, trial: u32, block: u32) -> [u64; 2] {
        let out = philox4x32([sample as u32, (sample >> 32) as u32, trial, block], self.key);
        [
            (out[0] as u64) | ((out[1] as u64) << 32),
            (out[2] as u64) | ((out[3] as u64) << 32),
        ]
    }
}

/// Uniform double in `[0, 1)` from the top 53 bits.
#[inline]
pub fn unit_f64(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `[0, n)` by multiply-high; bias below `n / 2^64`.
#[inline]
pub fn below(x: u64, n: u64) -> u64 {
    ((x as u128 * n as u128) >> 64) as u64
}
