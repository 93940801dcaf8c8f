//! 32-bit Mersenne Twister (MT19937) with the standard `init_genrand` seeding.
//!
//! Reals use the 53-bit construction from two consecutive draws, so a stream
//! of `uniform` values matches other MT19937 implementations that expose
//! `genrand_res53`.

use crate::error::{Error, Result};

const N: usize = 624;
const M: usize = 397;
const MATRIX_A: u32 = 0x9908_b0df;
const UPPER_MASK: u32 = 0x8000_0000;
const LOWER_MASK: u32 = 0x7fff_ffff;
const INIT_MULTIPLIER: u32 = 1_812_433_253;

/// Knuth's multiplicative hashing constant, used to derive substream seeds.
const CHILD_MULTIPLIER: u64 = 2_654_435_761;

#[derive(Clone)]
pub struct Mt19937 {
    state: [u32; N],
    index: usize,
    seed: u32,
}

impl std::fmt::Debug for Mt19937 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Mt19937")
            .field("seed", &self.seed)
            .field("index", &self.index)
            .finish_non_exhaustive()
    }
}

impl Mt19937 {
    pub fn new(seed: u32) -> Self {
        let mut state = [0u32; N];
        state[0] = seed;
        for i in 1..N {
            let prev = state[i - 1];
            state[i] = INIT_MULTIPLIER
                .wrapping_mul(prev ^ (prev >> 30))
                .wrapping_add(i as u32);
        }
        Self {
            state,
            index: N,
            seed,
        }
    }

    /// Generator for substream `index` of `base_seed`. See [`child_seed`].
    pub fn child(base_seed: u32, index: u64) -> Self {
        Self::new(child_seed(base_seed, index))
    }

    pub fn seed(&self) -> u32 {
        self.seed
    }

    /// Position in the word buffer; `624` means the next draw regenerates it.
    pub fn index(&self) -> usize {
        self.index
    }

    fn regenerate(&mut self) {
        for i in 0..N {
            let y = (self.state[i] & UPPER_MASK) | (self.state[(i + 1) % N] & LOWER_MASK);
            let mut next = self.state[(i + M) % N] ^ (y >> 1);
            if y & 1 != 0 {
                next ^= MATRIX_A;
            }
            self.state[i] = next;
        }
        self.index = 0;
    }

    pub fn next_u32(&mut self) -> u32 {
        if self.index >= N {
            self.regenerate();
        }
        let mut y = self.state[self.index];
        self.index += 1;

        y ^= y >> 11;
        y ^= (y << 7) & 0x9d2c_5680;
        y ^= (y << 15) & 0xefc6_0000;
        y ^= y >> 18;
        y
    }

    /// Real in `[0, 1)` with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        let a = (self.next_u32() >> 5) as f64;
        let b = (self.next_u32() >> 6) as f64;
        (a * 67_108_864.0 + b) / 9_007_199_254_740_992.0
    }

    /// `lo + u * (hi - lo)` with `u` from [`next_f64`](Self::next_f64).
    /// A degenerate interval returns `lo` without consuming any draws.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> Result<f64> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite);
        }
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "uniform interval has lo {lo} > hi {hi}"
            )));
        }
        if lo == hi {
            return Ok(lo);
        }
        let value = lo + self.next_f64() * (hi - lo);
        // lo + u*(hi-lo) can round up to hi when u is within an ulp of 1.
        Ok(if value < hi {
            value
        } else {
            lo.max(prev_down(hi))
        })
    }

    /// Index in `0..n`, for shuffling. `n` must be nonzero.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }

    /// Fisher-Yates shuffle driven by [`below`](Self::below).
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// `count` points in `[lo, hi)^n`. Coordinates are drawn point by point,
    /// dimension by dimension.
    pub fn sample_box(
        &mut self,
        lo: f64,
        hi: f64,
        dim: usize,
        count: usize,
    ) -> Result<Vec<Vec<f64>>> {
        let lower = vec![lo; dim];
        let upper = vec![hi; dim];
        self.sample_ranges(&lower, &upper, count)
    }

    /// Like [`sample_box`](Self::sample_box) with a separate interval per dimension.
    pub fn sample_ranges(
        &mut self,
        lower: &[f64],
        upper: &[f64],
        count: usize,
    ) -> Result<Vec<Vec<f64>>> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        (0..count)
            .map(|_| {
                lower
                    .iter()
                    .zip(upper)
                    .map(|(&lo, &hi)| self.uniform(lo, hi))
                    .collect()
            })
            .collect()
    }
}

/// Seed of substream `index`: the low 32 bits of `base_seed * 2654435761 + index`.
pub fn child_seed(base_seed: u32, index: u64) -> u32 {
    (base_seed as u64)
        .wrapping_mul(CHILD_MULTIPLIER)
        .wrapping_add(index) as u32
}

fn prev_down(x: f64) -> f64 {
    if x > 0.0 {
        f64::from_bits(x.to_bits() - 1)
    } else if x == 0.0 {
        -f64::from_bits(1)
    } else {
        f64::from_bits(x.to_bits() + 1)
    }
}
