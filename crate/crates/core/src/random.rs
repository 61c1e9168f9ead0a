//! Seeded random finite instances.
//!
//! Entries are integer weights over a common denominator, so the same
//! generator yields exact rational instances and float instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::prob::{Channel, Joint, Pmf};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct InstanceGen {
    rng: ChaCha8Rng,
    /// Largest integer weight drawn for a single entry.
    resolution: i64,
}

impl InstanceGen {
    pub fn new(seed: u64, resolution: i64) -> Self {
        InstanceGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            resolution: resolution.max(1),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn size(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    /// Integer weights in `1..=resolution`, each zeroed with probability
    /// `zero_prob`, keeping at least one positive entry.
    fn weights(&mut self, n: usize, zero_prob: f64) -> Vec<i64> {
        let mut w: Vec<i64> = (0..n)
            .map(|_| {
                if self.rng.random_bool(zero_prob) {
                    0
                } else {
                    self.rng.random_range(1..=self.resolution)
                }
            })
            .collect();
        if w.iter().all(|&v| v == 0) {
            let i = self.rng.random_range(0..n);
            w[i] = self.rng.random_range(1..=self.resolution);
        }
        w
    }

    fn normalize<S: Scalar>(w: &[i64]) -> Vec<S> {
        let total: i64 = w.iter().sum();
        w.iter().map(|&v| S::from_ratio(v, total)).collect()
    }

    /// Full-support distribution on `n` points.
    pub fn pmf<S: Scalar>(&mut self, n: usize) -> Result<Pmf<S>> {
        let w = self.weights(n, 0.0);
        Pmf::new(Self::normalize(&w))
    }

    pub fn channel<S: Scalar>(&mut self, n_in: usize, n_out: usize, zero_prob: f64) -> Result<Channel<S>> {
        let rows = (0..n_in)
            .map(|_| Self::normalize(&self.weights(n_out, zero_prob)))
            .collect();
        Channel::new(rows)
    }

    pub fn joint<S: Scalar>(&mut self, n_in: usize, n_out: usize, zero_prob: f64) -> Result<Joint<S>> {
        let prior = self.pmf(n_in)?;
        Joint::new(prior, self.channel(n_in, n_out, zero_prob)?)
    }

    /// Kernel in which every output column has positive total mass.
    pub fn covering_channel<S: Scalar>(&mut self, n_in: usize, n_out: usize, zero_prob: f64) -> Result<Channel<S>> {
        loop {
            let ch = self.channel::<S>(n_in, n_out, zero_prob)?;
            if (0..n_out).all(|z| ch.column(z).iter().any(|v| *v > S::zero())) {
                return Ok(ch);
            }
        }
    }

    pub fn unit_interval(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn same_seed_same_instance() {
        let a: Joint<f64> = InstanceGen::new(5, 100).joint(3, 4, 0.2).unwrap();
        let b: Joint<f64> = InstanceGen::new(5, 100).joint(3, 4, 0.2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rational_instances_are_exact() {
        let mut g = InstanceGen::new(1, 9);
        for _ in 0..50 {
            let j: Joint<BigRational> = g.joint(2, 3, 0.3).unwrap();
            for row in j.channel().rows() {
                assert_eq!(row.iter().cloned().sum::<BigRational>(), BigRational::from_integer(1.into()));
            }
        }
    }

    #[test]
    fn covering_channel_has_no_empty_column() {
        let mut g = InstanceGen::new(2, 5);
        for _ in 0..50 {
            let ch: Channel<f64> = g.covering_channel(2, 4, 0.5).unwrap();
            assert!((0..4).all(|z| ch.column(z).iter().any(|&v| v > 0.0)));
        }
    }
}
