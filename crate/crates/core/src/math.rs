//! Scalar helpers shared by the environments and the bound engine.

use core::f64::consts::{PI, SQRT_2};

use rand_distr::{Distribution, StandardNormal};

use crate::rng::RandomStream;

pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let u = (x - mean) / sd;
    libm::exp(-0.5 * u * u) / (sd * libm::sqrt(2.0 * PI))
}

pub(crate) fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    0.5 * (1.0 + libm::erf((x - mean) / (sd * SQRT_2)))
}

/// Density of `N(mean, sd^2)` truncated to `[lo, hi]`.
pub(crate) fn truncnorm_pdf(x: f64, mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    if x < lo || x > hi {
        return 0.0;
    }
    let mass = normal_cdf(hi, mean, sd) - normal_cdf(lo, mean, sd);
    normal_pdf(x, mean, sd) / mass
}

pub(crate) fn sample_normal(rng: &mut RandomStream, mean: f64, sd: f64) -> f64 {
    let u: f64 = StandardNormal.sample(rng);
    mean + sd * u
}

/// Rejection sampler for the truncated normal; exact in distribution.
pub(crate) fn sample_truncnorm(rng: &mut RandomStream, mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    loop {
        let x = sample_normal(rng, mean, sd);
        if (lo..=hi).contains(&x) {
            return x;
        }
    }
}

#[cfg(test)]
pub(crate) fn truncnorm_mean(mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    let a = (lo - mean) / sd;
    let b = (hi - mean) / sd;
    let z = normal_cdf(b, 0.0, 1.0) - normal_cdf(a, 0.0, 1.0);
    mean + sd * (normal_pdf(a, 0.0, 1.0) - normal_pdf(b, 0.0, 1.0)) / z
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    #[test]
    fn truncnorm_samples_in_bounds_and_mean_matches() {
        let mut rng = RandomStream::from_seed(11);
        let (mean, sd, lo, hi) = (-0.6, 0.15, -1.0, -0.5);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_truncnorm(&mut rng, mean, sd, lo, hi)).collect();
        assert!(xs.iter().all(|x| (lo..=hi).contains(x)));
        let m = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
        let se = sqrt(var / n as f64);
        let analytic = truncnorm_mean(mean, sd, lo, hi);
        assert!((m - analytic).abs() < 3.0 * se, "{m} vs {analytic}");
    }

    #[test]
    fn truncnorm_pdf_integrates_to_one() {
        let (lo, hi) = (-1.5, 1.5);
        let steps = 200_000;
        let h = (hi - lo) / steps as f64;
        // composite Simpson
        let mut acc = truncnorm_pdf(lo, 0.3, 0.1, lo, hi) + truncnorm_pdf(hi, 0.3, 0.1, lo, hi);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * truncnorm_pdf(lo + i as f64 * h, 0.3, 0.1, lo, hi);
        }
        assert!((acc * h / 3.0 - 1.0).abs() < 1e-9);
    }
}
