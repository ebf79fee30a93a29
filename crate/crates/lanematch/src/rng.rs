//! Pinned 64-bit PRNG so query sets and synthetic graphs reproduce
//! bit-exactly across runs, platforms and language ports.
//!
//! The generator is xoshiro256** seeded via splitmix64, exactly as published
//! by Blackman and Vigna:
//!
//!   splitmix64(z): z += 0x9E3779B97F4A7C15;
//!                  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//!                  z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
//!                  return z ^ (z >> 31)
//!
//!   xoshiro256** state s[0..3] initialized with four successive splitmix64
//!   outputs; next(): r = rotl(s[1] * 5, 7) * 9, then the standard xoshiro
//!   state transition with shifts (17, 45).

#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Rng { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, bound) without modulo bias (rejection on the top range).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    pub fn next_index(&mut self, len: usize) -> usize {
        self.next_below(len as u64) as usize
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_bool(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}
