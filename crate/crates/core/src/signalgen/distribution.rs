use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::distribution::{ChiSquared as ChiSquaredLaw, ContinuousCDF};

use super::TAG_SAMPLE;
use crate::error::{AzError, Result};
use crate::rng::CounterRng;

/// A scalar sampling distribution with zero median.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DistributionSpec {
    /// `N(0, 1)`.
    Gaussian,
    /// `chi2(d)` minus its median.
    Chi2Shifted(u32),
    /// Equal mixture of `N(-3, 1)` and `N(3, 1)`.
    GaussianMixture,
    /// Equal mixture of `chi2(1)` and `-chi2(5)`.
    Chi2Mixture,
    /// Equal mixture of `U[-4, 0)` and `U[0, 1)`.
    UniformMixture,
}

impl DistributionSpec {
    /// The six families used in the calibration and power studies.
    pub fn all() -> [DistributionSpec; 6] {
        [
            DistributionSpec::Gaussian,
            DistributionSpec::Chi2Shifted(1),
            DistributionSpec::Chi2Shifted(5),
            DistributionSpec::GaussianMixture,
            DistributionSpec::Chi2Mixture,
            DistributionSpec::UniformMixture,
        ]
    }

    /// Symmetric about zero, so any linear propagation keeps a null median.
    pub fn is_symmetric(&self) -> bool {
        matches!(self, DistributionSpec::Gaussian | DistributionSpec::GaussianMixture)
    }

    pub fn sampler(&self) -> Result<Sampler> {
        Sampler::new(*self)
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Gaussian => f.write_str("gauss"),
            DistributionSpec::Chi2Shifted(d) => write!(f, "chi2:{d}"),
            DistributionSpec::GaussianMixture => f.write_str("gaussmix"),
            DistributionSpec::Chi2Mixture => f.write_str("chi2mix"),
            DistributionSpec::UniformMixture => f.write_str("unifmix"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = AzError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss" => Ok(DistributionSpec::Gaussian),
            "gaussmix" => Ok(DistributionSpec::GaussianMixture),
            "chi2mix" => Ok(DistributionSpec::Chi2Mixture),
            "unifmix" => Ok(DistributionSpec::UniformMixture),
            _ => match s.strip_prefix("chi2:").map(str::parse::<u32>) {
                Some(Ok(d)) if d >= 1 => Ok(DistributionSpec::Chi2Shifted(d)),
                _ => Err(AzError::invalid(format!("unknown distribution '{s}'"))),
            },
        }
    }
}

/// A [`DistributionSpec`] with its constants resolved, ready to draw.
#[derive(Clone, Debug)]
pub struct Sampler {
    spec: DistributionSpec,
    chi_a: Option<ChiSquared<f64>>,
    chi_b: Option<ChiSquared<f64>>,
    shift: f64,
}

impl Sampler {
    fn new(spec: DistributionSpec) -> Result<Self> {
        let chi = |d: f64| ChiSquared::new(d).map_err(|e| AzError::invalid(e.to_string()));
        let mut s = Sampler {
            spec,
            chi_a: None,
            chi_b: None,
            shift: 0.0,
        };
        match spec {
            DistributionSpec::Chi2Shifted(d) => {
                let d = f64::from(d);
                s.chi_a = Some(chi(d)?);
                s.shift = ChiSquaredLaw::new(d)
                    .map_err(|e| AzError::invalid(e.to_string()))?
                    .inverse_cdf(0.5);
            }
            DistributionSpec::Chi2Mixture => {
                s.chi_a = Some(chi(1.0)?);
                s.chi_b = Some(chi(5.0)?);
            }
            _ => {}
        }
        Ok(s)
    }

    pub fn spec(&self) -> DistributionSpec {
        self.spec
    }

    /// Median subtracted from the raw chi-squared draw (zero otherwise).
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.spec {
            DistributionSpec::Gaussian => rng.sample(StandardNormal),
            DistributionSpec::Chi2Shifted(_) => {
                self.chi_a.as_ref().expect("chi2 law").sample(rng) - self.shift
            }
            DistributionSpec::GaussianMixture => {
                let mu = if rng.random::<bool>() { 3.0 } else { -3.0 };
                mu + rng.sample::<f64, _>(StandardNormal)
            }
            DistributionSpec::Chi2Mixture => {
                if rng.random::<bool>() {
                    self.chi_a.as_ref().expect("chi2(1)").sample(rng)
                } else {
                    -self.chi_b.as_ref().expect("chi2(5)").sample(rng)
                }
            }
            DistributionSpec::UniformMixture => {
                let u: f64 = rng.random();
                if rng.random::<bool>() {
                    -4.0 + 4.0 * u
                } else {
                    u
                }
            }
        }
    }
}

/// `n` i.i.d. draws; draw `i` comes from its own counter-addressed stream.
pub fn sample(spec: DistributionSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(AzError::invalid("sample size must be >= 1"));
    }
    let sampler = spec.sampler()?;
    let rng = CounterRng::new(seed);
    Ok((0..n as u64)
        .map(|i| sampler.draw(&mut rng.stream(&[TAG_SAMPLE, i])))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::median;

    #[test]
    fn chi2_medians() {
        let s1 = DistributionSpec::Chi2Shifted(1).sampler().unwrap();
        let s5 = DistributionSpec::Chi2Shifted(5).sampler().unwrap();
        assert!((s1.shift() - 0.454936423119572).abs() < 1e-9);
        assert!((s5.shift() - 4.351460191095526).abs() < 1e-9);
    }

    #[test]
    fn gaussian_median_near_zero() {
        let n = 40_000;
        let mut xs = sample(DistributionSpec::Gaussian, n, 3).unwrap();
        let m = median(&mut xs).unwrap();
        assert!(m.abs() < 3.0 * 1.2533 / (n as f64).sqrt(), "median {m}");
    }

    #[test]
    fn every_family_has_null_median() {
        let n = 40_000usize;
        for spec in DistributionSpec::all() {
            let xs = sample(spec, n, 17).unwrap();
            let pos = xs.iter().filter(|&&x| x > 0.0).count() as f64 / n as f64;
            assert!(
                (pos - 0.5).abs() < 3.0 / (2.0 * (n as f64).sqrt()),
                "{spec}: fraction positive {pos}"
            );
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = sample(DistributionSpec::Chi2Mixture, 100, 9).unwrap();
        assert_eq!(a, sample(DistributionSpec::Chi2Mixture, 100, 9).unwrap());
        assert_ne!(a, sample(DistributionSpec::Chi2Mixture, 100, 10).unwrap());
        assert!(sample(DistributionSpec::Gaussian, 0, 1).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for spec in DistributionSpec::all() {
            assert_eq!(spec.to_string().parse::<DistributionSpec>().unwrap(), spec);
        }
        assert!("chi2:0".parse::<DistributionSpec>().is_err());
        assert!("cauchy".parse::<DistributionSpec>().is_err());
    }
}
