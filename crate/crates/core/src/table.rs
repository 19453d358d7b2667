// SPDX-License-Identifier: Apache-2.0

//! Signed discrete distributions: the `(σ̂, ĉ)` sampler specialized to a
//! precomputed coefficient vector.

use rand::Rng;

/// Coefficients with magnitude at or below this are outside the support.
pub const ZERO_TOLERANCE: f64 = 1e-12;

/// Draws index `i` with probability `|w_i| / Σ|w|` and reports the weight
/// multiplier `sign(w_i) · Σ|w|`.
#[derive(Clone, Debug)]
pub struct SignedDistribution {
    indices: Vec<u32>,
    cumulative: Vec<f64>,
    multipliers: Vec<f64>,
    norm: f64,
}

impl SignedDistribution {
    /// `None` when every weight is (numerically) zero.
    pub fn new(weights: &[f64]) -> Option<Self> {
        let support: Vec<(u32, f64)> = weights
            .iter()
            .enumerate()
            .filter(|(_, w)| w.abs() > ZERO_TOLERANCE)
            .map(|(i, &w)| (i as u32, w))
            .collect();
        if support.is_empty() {
            return None;
        }
        let norm: f64 = support.iter().map(|(_, w)| w.abs()).sum();
        let mut running = 0.0;
        let mut cumulative = Vec::with_capacity(support.len());
        for (_, w) in &support {
            running += w.abs();
            cumulative.push(running / norm);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Some(Self {
            indices: support.iter().map(|(i, _)| *i).collect(),
            multipliers: support
                .iter()
                .map(|(_, w)| if *w > 0.0 { norm } else { -norm })
                .collect(),
            cumulative,
            norm,
        })
    }

    /// L1 norm of the weights: `𝒟` of the represented operator.
    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm
    }

    #[inline]
    pub fn is_deterministic(&self) -> bool {
        self.indices.len() == 1
    }

    /// The single outcome of a deterministic distribution.
    pub fn point_mass(&self) -> Option<(usize, f64)> {
        self.is_deterministic()
            .then(|| (self.indices[0] as usize, self.multipliers[0]))
    }

    /// `(index, cumulative probability, multiplier)` over the support.
    pub fn outcomes(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.indices
            .iter()
            .zip(&self.cumulative)
            .zip(&self.multipliers)
            .map(|((&i, &c), &m)| (i as usize, c, m))
    }

    pub fn support_len(&self) -> usize {
        self.indices.len()
    }

    /// Probability of drawing `index`.
    pub fn probability(&self, index: usize) -> f64 {
        match self.indices.iter().position(|&i| i as usize == index) {
            Some(0) => self.cumulative[0],
            Some(p) => self.cumulative[p] - self.cumulative[p - 1],
            None => 0.0,
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, f64) {
        if self.indices.len() == 1 {
            return (self.indices[0] as usize, self.multipliers[0]);
        }
        let u: f64 = rng.random();
        let pos = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.indices.len() - 1);
        (self.indices[pos] as usize, self.multipliers[pos])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_weights_have_no_distribution() {
        assert!(SignedDistribution::new(&[0.0, 1e-13, -1e-14]).is_none());
    }

    #[test]
    fn point_mass_never_draws() {
        let d = SignedDistribution::new(&[0.0, 0.0, -0.5, 0.0]).unwrap();
        assert!(d.is_deterministic());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(d.sample(&mut rng), (2, -0.5));
    }

    #[test]
    fn empirical_frequencies() {
        let d = SignedDistribution::new(&[0.5, -0.25, 0.0, 0.25]).unwrap();
        assert_eq!(d.norm(), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0usize; 4];
        let n = 200_000;
        for _ in 0..n {
            let (i, m) = d.sample(&mut rng);
            counts[i] += 1;
            assert_eq!(m, if i == 1 { -1.0 } else { 1.0 });
        }
        assert_eq!(counts[2], 0);
        for (i, p) in [(0, 0.5), (1, 0.25), (3, 0.25)] {
            let f = counts[i] as f64 / n as f64;
            assert!((f - p).abs() < 0.005, "index {i}: {f}");
            assert!((d.probability(i) - p).abs() < 1e-15);
        }
    }
}
