use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::replication::block_rng;

/// A data-generating distribution for the simulation experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Normal {
        mu: f64,
        sigma: f64,
    },
    /// `exp(location + scale Z)` with `Z` standard normal.
    LogNormal {
        location: f64,
        scale: f64,
    },
    ChiSquare {
        df: u32,
    },
    Beta {
        alpha: f64,
        beta: f64,
    },
    Weibull {
        shape: f64,
        scale: f64,
    },
}

fn positive(value: f64, what: &str) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{what} must be positive and finite, got {value}"
        )))
    }
}

impl DistributionSpec {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        DistributionSpec::Normal { mu, sigma }.validated()
    }

    pub fn log_normal(location: f64, scale: f64) -> Result<Self> {
        DistributionSpec::LogNormal { location, scale }.validated()
    }

    pub fn chi_square(df: u32) -> Result<Self> {
        DistributionSpec::ChiSquare { df }.validated()
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        DistributionSpec::Beta { alpha, beta }.validated()
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        DistributionSpec::Weibull { shape, scale }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            DistributionSpec::Normal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::Domain(format!(
                        "normal mean must be finite, got {mu}"
                    )));
                }
                positive(sigma, "normal sigma")?;
            }
            DistributionSpec::LogNormal { location, scale } => {
                if !location.is_finite() {
                    return Err(Error::Domain(format!(
                        "log-normal location must be finite, got {location}"
                    )));
                }
                positive(scale, "log-normal scale")?;
            }
            DistributionSpec::ChiSquare { df } => {
                if df == 0 {
                    return Err(Error::Domain(
                        "chi-square degrees of freedom must be >= 1".into(),
                    ));
                }
            }
            DistributionSpec::Beta { alpha, beta } => {
                positive(alpha, "beta alpha")?;
                positive(beta, "beta beta")?;
            }
            DistributionSpec::Weibull { shape, scale } => {
                positive(shape, "Weibull shape")?;
                positive(scale, "Weibull scale")?;
            }
        }
        Ok(self)
    }

    /// Closed-form standard deviation.
    pub fn true_sigma(&self) -> f64 {
        match *self {
            DistributionSpec::Normal { sigma, .. } => sigma,
            DistributionSpec::LogNormal { location, scale } => {
                let s2 = scale * scale;
                (s2.exp_m1() * (2.0 * location + s2).exp()).sqrt()
            }
            DistributionSpec::ChiSquare { df } => (2.0 * df as f64).sqrt(),
            DistributionSpec::Beta { alpha, beta } => {
                let s = alpha + beta;
                (alpha * beta / (s * s * (s + 1.0))).sqrt()
            }
            DistributionSpec::Weibull { shape, scale } => {
                let g1 = gamma(1.0 + 1.0 / shape);
                let g2 = gamma(1.0 + 2.0 / shape);
                scale * (g2 - g1 * g1).sqrt()
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DistributionSpec::Normal { mu, .. } => mu,
            DistributionSpec::LogNormal { location, scale } => {
                (location + 0.5 * scale * scale).exp()
            }
            DistributionSpec::ChiSquare { df } => df as f64,
            DistributionSpec::Beta { alpha, beta } => alpha / (alpha + beta),
            DistributionSpec::Weibull { shape, scale } => scale * gamma(1.0 + 1.0 / shape),
        }
    }

    pub(crate) fn sampler(&self) -> Result<Sampler> {
        let gamma = |shape: f64, scale: f64| {
            Gamma::new(shape, scale)
                .map_err(|e| Error::Domain(format!("gamma({shape}, {scale}): {e}")))
        };
        Ok(match *self {
            DistributionSpec::Normal { mu, sigma } => Sampler::Normal { mu, sigma },
            DistributionSpec::LogNormal { location, scale } => {
                Sampler::LogNormal { location, scale }
            }
            DistributionSpec::ChiSquare { df } => Sampler::Gamma(gamma(0.5 * df as f64, 2.0)?),
            DistributionSpec::Beta { alpha, beta } => {
                Sampler::Beta(gamma(alpha, 1.0)?, gamma(beta, 1.0)?)
            }
            DistributionSpec::Weibull { shape, scale } => Sampler::Weibull {
                inv_shape: 1.0 / shape,
                scale,
            },
        })
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Normal { mu, sigma } => write!(f, "normal:{mu},{sigma}"),
            DistributionSpec::LogNormal { location, scale } => {
                write!(f, "lognormal:{location},{scale}")
            }
            DistributionSpec::ChiSquare { df } => write!(f, "chisq:{df}"),
            DistributionSpec::Beta { alpha, beta } => write!(f, "beta:{alpha},{beta}"),
            DistributionSpec::Weibull { shape, scale } => write!(f, "weibull:{shape},{scale}"),
        }
    }
}

/// Parses `normal:MU,SIGMA`, `lognormal:LOC,SCALE`, `chisq:DF`,
/// `beta:ALPHA,BETA` or `weibull:SHAPE,SCALE`.
impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse distribution {s:?}"));
        let (name, args) = s.split_once(':').ok_or_else(bad)?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        let num = |i: usize| -> Result<f64> { args[i].parse().map_err(|_| bad()) };
        let pair = || -> Result<(f64, f64)> {
            if args.len() != 2 {
                return Err(bad());
            }
            Ok((num(0)?, num(1)?))
        };
        match name.trim().to_ascii_lowercase().as_str() {
            "normal" => pair().and_then(|(a, b)| Self::normal(a, b)),
            "lognormal" => pair().and_then(|(a, b)| Self::log_normal(a, b)),
            "beta" => pair().and_then(|(a, b)| Self::beta(a, b)),
            "weibull" => pair().and_then(|(a, b)| Self::weibull(a, b)),
            "chisq" | "chisquare" => {
                if args.len() != 1 {
                    return Err(bad());
                }
                Self::chi_square(args[0].parse().map_err(|_| bad())?)
            }
            _ => Err(bad()),
        }
    }
}

pub(crate) enum Sampler {
    Normal { mu: f64, sigma: f64 },
    LogNormal { location: f64, scale: f64 },
    Gamma(Gamma<f64>),
    Beta(Gamma<f64>, Gamma<f64>),
    Weibull { inv_shape: f64, scale: f64 },
}

impl Sampler {
    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Normal { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                mu + sigma * z
            }
            Sampler::LogNormal { location, scale } => {
                let z: f64 = StandardNormal.sample(rng);
                (location + scale * z).exp()
            }
            Sampler::Gamma(g) => g.sample(rng),
            Sampler::Beta(x, y) => {
                let x = x.sample(rng);
                let y = y.sample(rng);
                x / (x + y)
            }
            Sampler::Weibull { inv_shape, scale } => {
                // 1 - U lies in (0, 1], so the log is finite.
                let u: f64 = rng.random();
                scale * (-(1.0 - u).ln()).powf(*inv_shape)
            }
        }
    }

    pub(crate) fn fill<R: Rng + ?Sized>(&self, rng: &mut R, buf: &mut [f64]) {
        for x in buf {
            *x = self.draw(rng);
        }
    }
}

/// `n` draws sorted ascending; a pure function of `(dist, n, seed)`.
pub fn draw_sample(dist: &DistributionSpec, n: u64, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be at least 1".into()));
    }
    let sampler = dist.validated()?.sampler()?;
    let mut rng = block_rng(seed, n, 0);
    let mut sample = vec![0.0; n as usize];
    sampler.fill(&mut rng, &mut sample);
    sample.sort_unstable_by(f64::total_cmp);
    Ok(sample)
}

/// Lanczos approximation (g = 7, 9 terms), accurate to about 1e-15 relative.
#[allow(clippy::excessive_precision)]
pub(crate) fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(x: &[f64]) -> (f64, f64) {
        let k = x.len() as f64;
        let mean = x.iter().sum::<f64>() / k;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
        (mean, var.sqrt())
    }

    #[test]
    fn gamma_known_values() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((gamma(0.5) - sqrt_pi).abs() < 1e-14);
        assert!((gamma(1.5) - 0.5 * sqrt_pi).abs() < 1e-14);
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(10.0) - 362_880.0).abs() < 1e-8);
    }

    #[test]
    fn closed_form_sigmas() {
        assert_eq!(
            DistributionSpec::normal(50.0, 17.0).unwrap().true_sigma(),
            17.0
        );
        let chi = DistributionSpec::chi_square(10).unwrap().true_sigma();
        assert!((chi - 20f64.sqrt()).abs() < 1e-15);
        assert!((chi - 4.4721).abs() < 1e-4);
        let beta = DistributionSpec::beta(9.0, 4.0).unwrap().true_sigma();
        assert!((beta - (36.0f64 / (169.0 * 14.0)).sqrt()).abs() < 1e-15);
        assert!((beta - 0.12336).abs() < 1e-5);
        let weibull = DistributionSpec::weibull(2.0, 35.0).unwrap().true_sigma();
        assert!((weibull - 35.0 * (1.0 - std::f64::consts::PI / 4.0).sqrt()).abs() < 1e-12);
        let ln = DistributionSpec::log_normal(4.0, 0.3).unwrap().true_sigma();
        let expected = ((0.09f64.exp() - 1.0) * (8.09f64).exp()).sqrt();
        assert!((ln - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DistributionSpec::normal(0.0, 0.0).is_err());
        assert!(DistributionSpec::normal(f64::NAN, 1.0).is_err());
        assert!(DistributionSpec::log_normal(0.0, -1.0).is_err());
        assert!(DistributionSpec::chi_square(0).is_err());
        assert!(DistributionSpec::beta(0.0, 1.0).is_err());
        assert!(DistributionSpec::weibull(1.0, f64::INFINITY).is_err());
        assert!(draw_sample(
            &DistributionSpec::Normal {
                mu: 0.0,
                sigma: -1.0
            },
            5,
            1
        )
        .is_err());
    }

    #[test]
    fn parses_command_line_forms() {
        for text in [
            "normal:50,17",
            "lognormal:4,0.3",
            "chisq:10",
            "beta:9,4",
            "weibull:2,35",
        ] {
            let d: DistributionSpec = text.parse().unwrap();
            assert_eq!(d.to_string(), text);
        }
        for bad in [
            "normal:1",
            "normal:1,-2",
            "chisq:1.5",
            "gamma:1,2",
            "normal",
            "beta:1,2,3",
        ] {
            assert!(bad.parse::<DistributionSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn samples_are_sorted_and_reproducible() {
        let d = DistributionSpec::beta(9.0, 4.0).unwrap();
        let a = draw_sample(&d, 101, 5).unwrap();
        assert_eq!(a, draw_sample(&d, 101, 5).unwrap());
        assert_ne!(a, draw_sample(&d, 101, 6).unwrap());
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
        assert!(draw_sample(&d, 0, 5).is_err());
    }

    // Law-of-large-numbers checks at three standard errors.
    #[test]
    fn large_samples_match_moments() {
        let n = 1_000_000;
        let d = DistributionSpec::normal(50.0, 17.0).unwrap();
        let (mean, sd) = moments(&draw_sample(&d, n, 42).unwrap());
        assert!((mean - 50.0).abs() < 0.1, "{mean}");
        assert!((sd - 17.0).abs() < 0.1, "{sd}");

        for d in [
            DistributionSpec::beta(9.0, 4.0).unwrap(),
            DistributionSpec::chi_square(10).unwrap(),
            DistributionSpec::weibull(2.0, 35.0).unwrap(),
            DistributionSpec::log_normal(4.0, 0.3).unwrap(),
        ] {
            let (mean, sd) = moments(&draw_sample(&d, n, 43).unwrap());
            let se = d.true_sigma() / (n as f64).sqrt();
            assert!(
                (mean - d.mean()).abs() < 3.0 * se,
                "{d}: mean {mean} vs {}",
                d.mean()
            );
            assert!((sd / d.true_sigma() - 1.0).abs() < 0.01, "{d}: sd {sd}");
        }
        assert!((DistributionSpec::beta(9.0, 4.0).unwrap().mean() - 9.0 / 13.0).abs() < 1e-15);
    }
}
