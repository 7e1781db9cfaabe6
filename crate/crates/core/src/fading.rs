//! Small-scale fading of the received power: exponential (Rayleigh envelope)
//! and noncentral χ² with two degrees of freedom (Rician envelope).

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FadingSpec {
    /// Exponential power gain with rate `lambda`.
    Rayleigh { lambda: f64 },
    /// Rician power gain with LOS-to-scatter ratio `k_factor` and mean `omega`.
    Rician { k_factor: f64, omega: f64 },
}

/// Rician parameters in the form the outage series works with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rician {
    pub k_factor: f64,
    pub omega: f64,
}

impl Rician {
    /// (1 + K) / Ω, the rate of every Erlang component.
    pub fn rate(&self) -> f64 {
        (1.0 + self.k_factor) / self.omega
    }
}

impl FadingSpec {
    pub fn rayleigh(lambda: f64) -> Result<Self> {
        let spec = FadingSpec::Rayleigh { lambda };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rician(k_factor: f64, omega: f64) -> Result<Self> {
        let spec = FadingSpec::Rician { k_factor, omega };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FadingSpec::Rayleigh { lambda } if !(lambda > 0.0 && lambda.is_finite()) => Err(Error::Contract(format!(
                "rayleigh lambda must be positive, got {lambda}"
            ))),
            FadingSpec::Rician { k_factor, .. } if !(k_factor >= 0.0 && k_factor.is_finite()) => {
                Err(Error::Contract(format!("rician k_factor must be >= 0, got {k_factor}")))
            }
            FadingSpec::Rician { omega, .. } if !(omega > 0.0 && omega.is_finite()) => {
                Err(Error::Contract(format!("rician omega must be positive, got {omega}")))
            }
            _ => Ok(()),
        }
    }

    /// Mean power gain.
    pub fn mean(&self) -> f64 {
        match *self {
            FadingSpec::Rayleigh { lambda } => 1.0 / lambda,
            FadingSpec::Rician { omega, .. } => omega,
        }
    }

    /// The equivalent Rician description; an exponential law is Rician with K = 0.
    pub fn as_rician(&self) -> Rician {
        match *self {
            FadingSpec::Rayleigh { lambda } => Rician {
                k_factor: 0.0,
                omega: 1.0 / lambda,
            },
            FadingSpec::Rician { k_factor, omega } => Rician { k_factor, omega },
        }
    }

    pub fn is_rayleigh(&self) -> bool {
        matches!(self, FadingSpec::Rayleigh { .. })
    }

    fn check_arg(func: &'static str, x: f64) -> Result<()> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::domain(func, format!("power gain must be >= 0, got {x}")));
        }
        Ok(())
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Self::check_arg("fading::cdf", x)?;
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        match *self {
            FadingSpec::Rayleigh { lambda } => Ok(-(-lambda * x).exp_m1()),
            FadingSpec::Rician { k_factor, omega } => {
                specfun::marcum_q1_complement((2.0 * k_factor).sqrt(), (2.0 * (1.0 + k_factor) * x / omega).sqrt())
            }
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Self::check_arg("fading::pdf", x)?;
        if x == f64::INFINITY {
            return Ok(0.0);
        }
        match *self {
            FadingSpec::Rayleigh { lambda } => Ok(lambda * (-lambda * x).exp()),
            FadingSpec::Rician { k_factor, omega } => {
                let n = (1.0 + k_factor) / omega;
                let arg = 2.0 * (k_factor * n * x).sqrt();
                Ok((n.ln() - k_factor - n * x + specfun::log_bessel_i0(arg)?).exp())
            }
        }
    }

    /// Draws one power gain.
    ///
    /// The Rician draw is |s + σ(g₁ + i g₂)|² with s² = KΩ/(1+K) and
    /// 2σ² = Ω/(1+K), so the mean is Ω.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            FadingSpec::Rayleigh { lambda } => {
                // 1 - U lies in (0, 1], keeping the log finite
                let u: f64 = rng.random();
                -(1.0 - u).ln() / lambda
            }
            FadingSpec::Rician { k_factor, omega } => {
                let los = (k_factor * omega / (1.0 + k_factor)).sqrt();
                let sigma = (0.5 * omega / (1.0 + k_factor)).sqrt();
                let g1: f64 = StandardNormal.sample(rng);
                let g2: f64 = StandardNormal.sample(rng);
                let i = los + sigma * g1;
                let q = sigma * g2;
                i * i + q * q
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cdf_at_zero_is_zero() {
        for spec in [
            FadingSpec::Rayleigh { lambda: 2.0 },
            FadingSpec::Rician {
                k_factor: 10.0,
                omega: 1.0,
            },
            FadingSpec::Rician {
                k_factor: 0.0,
                omega: 3.0,
            },
        ] {
            assert_eq!(spec.cdf(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn rician_k0_is_exponential() {
        let spec = FadingSpec::Rician {
            k_factor: 0.0,
            omega: 1.0,
        };
        assert!((spec.cdf(1.0).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        let ray = FadingSpec::Rayleigh { lambda: 1.0 };
        for x in [0.0, 0.1, 0.7, 2.0, 9.0] {
            assert!((spec.pdf(x).unwrap() - ray.pdf(x).unwrap()).abs() < 1e-15);
        }
        assert_eq!(ray.pdf(0.0).unwrap(), 1.0);
    }

    #[test]
    fn negative_argument_rejected() {
        let spec = FadingSpec::Rayleigh { lambda: 1.0 };
        assert!(spec.cdf(-0.1).is_err());
        assert!(spec.pdf(-0.1).is_err());
        assert!(spec.cdf(f64::NAN).is_err());
    }

    #[test]
    fn construction_validates() {
        assert!(FadingSpec::rayleigh(0.0).is_err());
        assert!(FadingSpec::rician(-1.0, 1.0).is_err());
        assert!(FadingSpec::rician(1.0, 0.0).is_err());
        assert!(FadingSpec::rician(0.0, 1.0).is_ok());
    }

    #[test]
    fn exponential_sample_mean() {
        let spec = FadingSpec::Rayleigh { lambda: 1.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mean: f64 = (0..n).map(|_| spec.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.005, "{mean}");
    }

    #[test]
    fn rician_sample_mean_within_three_sigma() {
        for (k, omega) in [(1.0, 1.0), (10.0, 2.0)] {
            let spec = FadingSpec::Rician { k_factor: k, omega };
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let n = 200_000;
            let draws: Vec<f64> = (0..n).map(|_| spec.sample(&mut rng)).collect();
            let mean = draws.iter().sum::<f64>() / n as f64;
            let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!((mean - omega).abs() < 3.0 * (var / n as f64).sqrt());
        }
    }

    #[test]
    fn serde_shape() {
        let s = serde_json::to_string(&FadingSpec::Rician {
            k_factor: 10.0,
            omega: 1.0,
        })
        .unwrap();
        assert_eq!(s, r#"{"kind":"rician","k_factor":10.0,"omega":1.0}"#);
        let back: FadingSpec = serde_json::from_str(r#"{"kind":"rayleigh","lambda":2.0}"#).unwrap();
        assert_eq!(back, FadingSpec::Rayleigh { lambda: 2.0 });
    }
}
