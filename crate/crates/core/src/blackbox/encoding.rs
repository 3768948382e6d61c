//! Seed-keyed bijection on `b`-bit strings.
//!
//! Each round is `x -> (a*x + c) mod 2^b` with odd `a`, followed by a
//! right xorshift; both steps are invertible on `b` bits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ROUNDS: usize = 4;

#[derive(Debug, Clone)]
struct Round {
    mult: u64,
    mult_inv: u64,
    add: u64,
    shift: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct KeyedPermutation {
    bits: u32,
    mask: u64,
    rounds: Vec<Round>,
}

fn inverse_mod_pow2(a: u64) -> u64 {
    // Newton iteration doubles the number of correct low bits each step.
    let mut inv = a;
    for _ in 0..6 {
        inv = inv.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(inv)));
    }
    inv
}

impl KeyedPermutation {
    pub fn new(bits: u32, seed: u64) -> Self {
        assert!((1..=64).contains(&bits));
        let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rounds = (0..ROUNDS)
            .map(|_| {
                let mult = rng.gen::<u64>() | 1;
                Round {
                    mult,
                    mult_inv: inverse_mod_pow2(mult),
                    add: rng.gen::<u64>(),
                    shift: if bits > 1 { rng.gen_range(bits.div_ceil(2)..bits) } else { 1 },
                }
            })
            .collect();
        KeyedPermutation { bits, mask, rounds }
    }

    pub fn forward(&self, mut x: u64) -> u64 {
        for r in &self.rounds {
            x = r.mult.wrapping_mul(x).wrapping_add(r.add) & self.mask;
            x ^= x >> r.shift;
        }
        x
    }

    pub fn inverse(&self, mut y: u64) -> u64 {
        for r in self.rounds.iter().rev() {
            // undo y = x ^ (x >> s)
            let mut x = y;
            let mut covered = r.shift;
            while covered < self.bits {
                x = y ^ (x >> r.shift);
                covered += r.shift;
            }
            y = x;
            y = r.mult_inv.wrapping_mul(y.wrapping_sub(r.add)) & self.mask;
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_widths_are_bijections() {
        for bits in 1..=12 {
            let p = KeyedPermutation::new(bits, 42 + bits as u64);
            let mut seen = vec![false; 1 << bits];
            for x in 0..(1u64 << bits) {
                let y = p.forward(x);
                assert!(y < (1 << bits));
                assert!(!seen[y as usize]);
                seen[y as usize] = true;
                assert_eq!(p.inverse(y), x);
            }
        }
    }

    proptest! {
        #[test]
        fn inverse_undoes_forward(bits in 1u32..=64, seed: u64, x: u64) {
            let p = KeyedPermutation::new(bits, seed);
            let x = if bits == 64 { x } else { x & ((1 << bits) - 1) };
            prop_assert_eq!(p.inverse(p.forward(x)), x);
        }
    }
}
