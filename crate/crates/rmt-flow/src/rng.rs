//! Keyed random streams and Monte Carlo estimates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A ChaCha8 stream determined only by `seed` and `key`, so that e.g. sample
/// i of a batch is reproducible whatever the batch size or worker count.
pub fn stream(seed: u64, key: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = 0x2545_f491_4f6c_dd1d_u64;
    for k in key {
        h = mix(h ^ mix(*k));
    }
    rng.set_stream(h);
    rng
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Sample of the radial part at time t of a Bessel process of index ν,
/// i.e. a draw from the density G^{(ν)}(t, ·|x).
pub fn bessel_radial(rng: &mut ChaCha8Rng, nu: f64, t: f64, x: f64) -> f64 {
    let half_dim = nu + 1.0;
    let lam = x * x / (2.0 * t);
    let k = if lam > 0.0 {
        Poisson::new(lam).expect("positive Poisson mean").sample(rng)
    } else {
        0.0
    };
    let g: f64 = Gamma::new(half_dim + k, 1.0).expect("positive gamma shape").sample(rng);
    (2.0 * t * g).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
}

impl MCEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        assert!(n >= 2, "an estimate needs at least two samples");
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        Self { value: mean, stderr: (var / n as f64).sqrt(), n }
    }

    /// (value − reference) in units of the standard error. The error is
    /// floored at rounding level so zero-variance estimates compare sanely.
    pub fn zscore(&self, reference: f64) -> f64 {
        let floor = 1e-12 * reference.abs().max(1.0);
        let diff = self.value - reference;
        if diff.abs() <= floor {
            return 0.0;
        }
        diff / self.stderr.max(floor)
    }
}

/// Deterministic pairwise sum, independent of how the input was produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_keyed() {
        let a = stream(7, &[1, 2]).next_u64();
        let b = stream(7, &[1, 2]).next_u64();
        let c = stream(7, &[2, 1]).next_u64();
        let d = stream(8, &[1, 2]).next_u64();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn bessel_radial_second_moment() {
        // E[Z²] = 2(ν+1)t + x² for the squared Bessel process.
        let (nu, t, x) = (0.5, 0.7, 1.2);
        let mut rng = stream(3, &[0]);
        let xs: Vec<f64> = (0..200_000).map(|_| bessel_radial(&mut rng, nu, t, x).powi(2)).collect();
        let e = MCEstimate::from_samples(&xs);
        assert!(e.zscore(2.0 * (nu + 1.0) * t + x * x).abs() < 4.0, "{e:?}");
    }
}
