// SPDX-License-Identifier: Apache-2.0

//! Streaming sample accumulators: pairwise (cascade) summation for the mean
//! and Welford moments for the spread.

use serde::{Deserialize, Serialize};

const BLOCK: usize = 256;

/// Sums a stream in blocks and combines block sums in a binary cascade, so
/// rounding error grows with `log N` rather than `N`.
#[derive(Clone, Debug, Default)]
pub struct PairwiseSum {
    block: f64,
    in_block: usize,
    /// `levels[l]` holds the sum of `2^l` blocks when occupied.
    levels: Vec<Option<f64>>,
}

impl PairwiseSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        self.block += x;
        self.in_block += 1;
        if self.in_block == BLOCK {
            let b = std::mem::take(&mut self.block);
            self.in_block = 0;
            self.push(b);
        }
    }

    fn push(&mut self, mut carry: f64) {
        for slot in self.levels.iter_mut() {
            match slot.take() {
                Some(v) => carry += v,
                None => {
                    *slot = Some(carry);
                    return;
                }
            }
        }
        self.levels.push(Some(carry));
    }

    pub fn total(&self) -> f64 {
        // smallest partial sums first
        let mut acc = self.block;
        for v in self.levels.iter().flatten() {
            acc += v;
        }
        acc
    }
}

/// Count, mean, second central moment, and range of a sample stream.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub min: f64,
    pub max: f64,
}

impl Default for Moments {
    fn default() -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
}

impl Moments {
    #[inline]
    pub fn add(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    /// Chan et al. parallel combination.
    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let wa = self.count as f64 / n;
        let wb = other.count as f64 / n;
        self.mean = self.mean * wa + other.mean * wb;
        self.m2 += other.m2 + delta * delta * (self.count as f64) * wb;
        self.count += other.count;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
    }

    /// Unbiased sample standard deviation (0 for fewer than two samples).
    pub fn std_dev(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2.max(0.0) / (self.count - 1) as f64).sqrt()
        }
    }
}

/// Per-worker accumulator.
#[derive(Clone, Debug, Default)]
pub struct SampleStats {
    pub sum: PairwiseSum,
    pub moments: Moments,
}

impl SampleStats {
    #[inline]
    pub fn add(&mut self, x: f64) {
        self.sum.add(x);
        self.moments.add(x);
    }
}
