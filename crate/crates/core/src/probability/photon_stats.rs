//! Photon-number statistics of squeezed sources and the protocol comparisons
//! built on them (heralded pair sources versus Gaussian sampling).

use num_bigint::BigUint;
use statrs::function::factorial::ln_binomial;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::gaussian::SqueezeParams;

/// `K` equal single-mode squeezers with parameter `r`, asked about `N` photon pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpeDistributionSpec {
    pub squeezers: usize,
    pub squeeze: f64,
    pub pairs: usize,
}

impl PpeDistributionSpec {
    pub fn new(squeezers: usize, squeeze: f64, pairs: usize) -> Result<Self> {
        if squeezers == 0 {
            return Err(Error::Domain("at least one squeezer is required".into()));
        }
        if !squeeze.is_finite() || squeeze < 0.0 {
            return Err(Error::Domain(format!(
                "squeezing must be finite and non-negative, got {squeeze}"
            )));
        }
        Ok(Self {
            squeezers,
            squeeze,
            pairs,
        })
    }

    pub fn with_pairs(self, pairs: usize) -> Self {
        Self { pairs, ..self }
    }
}

/// Probability of exactly `N` photon pairs (2N photons) from `K` squeezers:
/// `C(K/2 + N - 1, N) · sech^K r · tanh^{2N} r`, a negative binomial law.
///
/// The binomial coefficient has a half-integer top for odd `K` and is
/// evaluated through log-Gamma.
pub fn ppe_distribution(spec: &PpeDistributionSpec) -> f64 {
    ppe_probability(spec.squeezers as f64, spec.squeeze, spec.pairs)
}

fn ppe_probability(k: f64, r: f64, n: usize) -> f64 {
    if r == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let shape = k / 2.0;
    let nf = n as f64;
    let ln_coeff = ln_gamma(shape + nf) - ln_gamma(shape) - ln_gamma(nf + 1.0);
    let ln_p = ln_coeff - k * r.cosh().ln() + 2.0 * nf * r.tanh().ln();
    ln_p.exp()
}

/// `1 - Σ_{N ≤ max_pairs} P_K(N)`, clamped at zero.
pub fn ppe_tail_above(squeezers: usize, squeeze: f64, max_pairs: usize) -> f64 {
    let head: f64 = (0..=max_pairs)
        .map(|n| ppe_probability(squeezers as f64, squeeze, n))
        .sum();
    (1.0 - head).max(0.0)
}

/// Distribution of the total pair number for arbitrary (possibly unequal)
/// squeezers, entries `0..=max_pairs`. Equal squeezers reproduce
/// [`ppe_distribution`]; unequal ones are the convolution of the one-mode laws.
pub fn pair_number_law(params: &SqueezeParams, max_pairs: usize) -> Vec<f64> {
    let active: Vec<f64> = params.values().iter().copied().filter(|&r| r != 0.0).collect();
    let mut law = vec![0.0; max_pairs + 1];
    law[0] = 1.0;
    if active.is_empty() {
        return law;
    }
    if active.iter().all(|&r| r == active[0]) {
        return (0..=max_pairs)
            .map(|n| ppe_probability(active.len() as f64, active[0], n))
            .collect();
    }
    for &r in &active {
        let single: Vec<f64> = (0..=max_pairs).map(|n| ppe_probability(1.0, r, n)).collect();
        let mut next = vec![0.0; max_pairs + 1];
        for (i, &a) in law.iter().enumerate() {
            for (j, &b) in single.iter().enumerate().take(max_pairs + 1 - i) {
                next[i + j] += a * b;
            }
        }
        law = next;
    }
    law
}

/// Probability mass of patterns with more than `max_pairs` photon pairs.
pub fn pair_tail_above(params: &SqueezeParams, max_pairs: usize) -> f64 {
    (1.0 - pair_number_law(params, max_pairs).iter().sum::<f64>()).max(0.0)
}

/// `(n_mean, n_modal) = (K sinh² r, (K - 1) sinh² r)`, in photons.
pub fn mean_and_modal(spec: &PpeDistributionSpec) -> (f64, f64) {
    let s2 = spec.squeeze.sinh().powi(2);
    let k = spec.squeezers as f64;
    (k * s2, (k - 1.0) * s2)
}

/// Chance that `K` heralded pair sources fire exactly `N` single pairs:
/// `C(K, N) · sech^{2K} r · tanh^{2N} r`, zero when `N > K`.
pub fn pfbs_probability(squeezers: usize, photons: usize, squeeze: f64) -> f64 {
    if photons > squeezers {
        return 0.0;
    }
    if squeeze == 0.0 {
        return if photons == 0 { 1.0 } else { 0.0 };
    }
    let ln_p = ln_binomial(squeezers as u64, photons as u64)
        - 2.0 * squeezers as f64 * squeeze.cosh().ln()
        + 2.0 * photons as f64 * squeeze.tanh().ln();
    ln_p.exp()
}

/// Heralded-to-Gaussian generation ratio for `N` pairs from `K` sources:
/// `(exact, asymptotic) = (C(K, N) / C(K+N-1, N), ((K-N)/(K-1))^N)`.
pub fn generation_ratio(squeezers: usize, photons: usize) -> Result<(f64, f64)> {
    if photons < 1 || squeezers <= photons {
        return Err(Error::Domain(format!(
            "generation ratio needs K > N ≥ 1, got K = {squeezers}, N = {photons}"
        )));
    }
    let (k, n) = (squeezers as u64, photons as u64);
    let exact = (ln_binomial(k, n) - ln_binomial(k + n - 1, n)).exp();
    let asymptotic = ((k - n) as f64 / (k - 1) as f64).powi(photons as i32);
    Ok((exact, asymptotic))
}

/// Sampling-space sizes for `N` photons in `N²` modes:
/// Gaussian sampling `C(N², N)`, scattershot `C(N², N)²`.
pub fn sampling_space_sizes(photons: usize) -> Result<(BigUint, BigUint)> {
    if photons < 1 {
        return Err(Error::Domain("sampling space needs N ≥ 1".into()));
    }
    let gbs = big_binomial((photons * photons) as u64, photons as u64);
    let sbs = &gbs * &gbs;
    Ok((gbs, sbs))
}

fn big_binomial(n: u64, k: u64) -> BigUint {
    // Each partial product is itself a binomial coefficient, so the division is exact.
    (0..k).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}
