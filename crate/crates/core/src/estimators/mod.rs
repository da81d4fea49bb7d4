//! Closed-form estimators of the sample mean and standard deviation from a
//! reported five-number summary or one of its partial reports.
//!
//! Three reporting scenarios are distinguished:
//!
//! * `S1`: minimum, median, maximum and sample size,
//! * `S2`: first quartile, median, third quartile and sample size,
//! * `S3`: the full five-number summary and sample size.
//!
//! The standard-deviation estimators divide the range and the interquartile
//! range by the quantile-based constants ξ(n) and η(n) from
//! [`NormalizationConstants`]. [`sd_weighted`] combines the two components
//! with an arbitrary weight; [`sd_shi`] uses the sample-size dependent weight
//! `1 / (1 + 0.07 n^0.6)` through the θ₁/θ₂ shortcut.

mod table;

use std::fmt;
use std::str::FromStr;

pub use table::{coefficient_table, render_table_csv, render_table_text, CoefficientRow};

use crate::error::{Error, Result};
use crate::normal;
use crate::order_stats::OrderStatMoments;

/// Coefficient of the power law `c1 n^c2` approximating the moment ratio J(n).
pub const APPROX_J_COEFFICIENT: f64 = 0.07;
/// Exponent of the power law approximating J(n).
pub const APPROX_J_EXPONENT: f64 = 0.6;

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidInput(
            "sample size n must be at least 1".into(),
        ))
    } else {
        Ok(())
    }
}

fn check_values(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!(
                "{name} must be finite, got {v}"
            )));
        }
    }
    for pair in values.windows(2) {
        let (lo_name, lo) = pair[0];
        let (hi_name, hi) = pair[1];
        if lo > hi {
            return Err(Error::InvalidInput(format!(
                "summary values must be ordered: {lo_name} = {lo} exceeds {hi_name} = {hi}"
            )));
        }
    }
    Ok(())
}

/// Reported minimum, quartiles, median and maximum of a sample of size `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumberSummary {
    pub a: f64,
    pub q1: f64,
    pub m: f64,
    pub q3: f64,
    pub b: f64,
    pub n: u64,
}

impl FiveNumberSummary {
    pub fn new(a: f64, q1: f64, m: f64, q3: f64, b: f64, n: u64) -> Result<Self> {
        check_n(n)?;
        check_values(&[("a", a), ("q1", q1), ("m", m), ("q3", q3), ("b", b)])?;
        Ok(FiveNumberSummary { a, q1, m, q3, b, n })
    }

    pub fn range_part(&self) -> RangeSummary {
        RangeSummary {
            a: self.a,
            m: self.m,
            b: self.b,
            n: self.n,
        }
    }

    pub fn quartile_part(&self) -> QuartileSummary {
        QuartileSummary {
            q1: self.q1,
            m: self.m,
            q3: self.q3,
            n: self.n,
        }
    }
}

/// Scenario S1: minimum, median and maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSummary {
    pub a: f64,
    pub m: f64,
    pub b: f64,
    pub n: u64,
}

impl RangeSummary {
    pub fn new(a: f64, m: f64, b: f64, n: u64) -> Result<Self> {
        check_n(n)?;
        check_values(&[("a", a), ("m", m), ("b", b)])?;
        Ok(RangeSummary { a, m, b, n })
    }
}

/// Scenario S2: quartiles and median.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuartileSummary {
    pub q1: f64,
    pub m: f64,
    pub q3: f64,
    pub n: u64,
}

impl QuartileSummary {
    pub fn new(q1: f64, m: f64, q3: f64, n: u64) -> Result<Self> {
        check_n(n)?;
        check_values(&[("q1", q1), ("m", m), ("q3", q3)])?;
        Ok(QuartileSummary { q1, m, q3, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioData {
    S1(RangeSummary),
    S2(QuartileSummary),
    S3(FiveNumberSummary),
}

impl ScenarioData {
    pub fn n(&self) -> u64 {
        match self {
            ScenarioData::S1(d) => d.n,
            ScenarioData::S2(d) => d.n,
            ScenarioData::S3(d) => d.n,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ScenarioData::S1(_) => "S1",
            ScenarioData::S2(_) => "S2",
            ScenarioData::S3(_) => "S3",
        }
    }
}

/// ξ(n), η(n) and the shortcut divisors θ₁(n), θ₂(n).
///
/// `xi` and `eta` are zero at `n = 1` (both quantile arguments equal 0.5), so
/// every estimator that divides by them requires `n ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationConstants {
    pub n: u64,
    pub xi: f64,
    pub eta: f64,
    pub theta1: f64,
    pub theta2: f64,
}

pub fn normalization_constants(n: u64) -> Result<NormalizationConstants> {
    check_n(n)?;
    let nf = n as f64;
    let xi = 2.0 * normal::quantile((nf - 0.375) / (nf + 0.25));
    let eta = 2.0 * normal::quantile((0.75 * nf - 0.125) / (nf + 0.25));
    let j = approx_j(n);
    Ok(NormalizationConstants {
        n,
        xi,
        eta,
        theta1: (1.0 + j) * xi,
        theta2: eta * (1.0 + j) / j,
    })
}

impl NormalizationConstants {
    fn require_xi(&self) -> Result<f64> {
        if self.xi > 0.0 {
            Ok(self.xi)
        } else {
            Err(Error::Domain(format!(
                "xi(n) is not positive for n = {}; range-based estimators need n >= 2",
                self.n
            )))
        }
    }

    fn require_eta(&self) -> Result<f64> {
        if self.eta > 0.0 {
            Ok(self.eta)
        } else {
            Err(Error::Domain(format!(
                "eta(n) is not positive for n = {}; IQR-based estimators need n >= 2",
                self.n
            )))
        }
    }
}

/// Which estimator produced an [`Estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    HozoSd,
    WanSdS1,
    WanSdS2,
    BlandSd,
    WanSdS3,
    ShiSd,
    BlandMean,
    LuoMean,
    WeightedSd,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::HozoSd,
        Method::WanSdS1,
        Method::WanSdS2,
        Method::BlandSd,
        Method::WanSdS3,
        Method::ShiSd,
        Method::BlandMean,
        Method::LuoMean,
        Method::WeightedSd,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::HozoSd => "hozo_sd",
            Method::WanSdS1 => "wan_sd_s1",
            Method::WanSdS2 => "wan_sd_s2",
            Method::BlandSd => "bland_sd",
            Method::WanSdS3 => "wan_sd_s3",
            Method::ShiSd => "shi_sd",
            Method::BlandMean => "bland_mean",
            Method::LuoMean => "luo_mean",
            Method::WeightedSd => "weighted_sd",
        }
    }

    pub fn is_sd(self) -> bool {
        !matches!(self, Method::BlandMean | Method::LuoMean)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown estimator label '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub method: Method,
    pub weight_used: Option<f64>,
    /// `((b - a) / ξ, (q3 - q1) / η)` for the estimators built on them.
    pub components: Option<(f64, f64)>,
}

impl Estimate {
    fn plain(value: f64, method: Method) -> Self {
        Estimate {
            value,
            method,
            weight_used: None,
            components: None,
        }
    }
}

/// Hozo et al.'s three-branch step rule for scenario S1.
pub fn sd_hozo_s1(data: &RangeSummary) -> Result<Estimate> {
    let RangeSummary { a, m, b, n } = *data;
    let value = if n <= 15 {
        let skew = a - 2.0 * m + b;
        ((b - a).powi(2) + skew * skew / 4.0).sqrt() / 12f64.sqrt()
    } else if n <= 70 {
        (b - a) / 4.0
    } else {
        (b - a) / 6.0
    };
    Ok(Estimate::plain(value, Method::HozoSd))
}

/// `(b - a) / ξ(n)`.
pub fn sd_wan_s1(data: &RangeSummary) -> Result<Estimate> {
    let c = normalization_constants(data.n)?;
    let value = (data.b - data.a) / c.require_xi()?;
    Ok(Estimate {
        value,
        method: Method::WanSdS1,
        weight_used: Some(1.0),
        components: None,
    })
}

/// `(q3 - q1) / η(n)`.
pub fn sd_wan_s2(data: &QuartileSummary) -> Result<Estimate> {
    let c = normalization_constants(data.n)?;
    let value = (data.q3 - data.q1) / c.require_eta()?;
    Ok(Estimate {
        value,
        method: Method::WanSdS2,
        weight_used: Some(0.0),
        components: None,
    })
}

/// Bland's weighted mean `(a + 2q1 + 2m + 2q3 + b) / 8`.
pub fn mean_bland(data: &FiveNumberSummary) -> Result<Estimate> {
    let FiveNumberSummary {
        a, q1, m, q3, b, ..
    } = *data;
    Ok(Estimate::plain(
        (a + 2.0 * q1 + 2.0 * m + 2.0 * q3 + b) / 8.0,
        Method::BlandMean,
    ))
}

/// Weights `(w1, w2)` of the mid-range and mid-quartile components in
/// [`mean_luo`].
pub fn luo_mean_weights(n: u64) -> (f64, f64) {
    let nf = n as f64;
    let w1 = 2.2 / (2.2 + nf.powf(0.75));
    let w2 = 0.7 - 0.72 / nf.powf(0.55);
    (w1, w2)
}

pub fn mean_luo(data: &FiveNumberSummary) -> Result<Estimate> {
    check_n(data.n)?;
    let FiveNumberSummary { a, q1, m, q3, b, n } = *data;
    let (w1, w2) = luo_mean_weights(n);
    let value = w1 * (a + b) / 2.0 + w2 * (q1 + q3) / 2.0 + (1.0 - w1 - w2) * m;
    Ok(Estimate::plain(value, Method::LuoMean))
}

const BLAND_RADICAND_TOLERANCE: f64 = 1e-12;

/// Bland's standard deviation estimator; does not use `n`.
///
/// The expression depends only on differences of the summary values, so it
/// is evaluated on values centred at the median to limit cancellation.
pub fn sd_bland(data: &FiveNumberSummary) -> Result<Estimate> {
    let c = data.m;
    let (a, q1, m, q3, b) = (data.a - c, data.q1 - c, 0.0, data.q3 - c, data.b - c);
    let squares = (a * a + 2.0 * q1 * q1 + 2.0 * m * m + 2.0 * q3 * q3 + b * b) / 16.0;
    let cross = (a * q1 + q1 * m + m * q3 + q3 * b) / 8.0;
    let total = a + 2.0 * q1 + 2.0 * m + 2.0 * q3 + b;
    let radicand = squares + cross - total * total / 64.0;
    let radicand = if radicand >= 0.0 {
        radicand
    } else if radicand >= -BLAND_RADICAND_TOLERANCE {
        0.0
    } else {
        return Err(Error::NumericFailure(format!(
            "Bland radicand is negative ({radicand:e})"
        )));
    };
    Ok(Estimate::plain(radicand.sqrt(), Method::BlandSd))
}

fn check_weight(w: f64) -> Result<()> {
    if (0.0..=1.0).contains(&w) {
        Ok(())
    } else {
        Err(Error::Domain(format!("weight must lie in [0, 1], got {w}")))
    }
}

fn components(range: f64, iqr: f64, n: u64) -> Result<(f64, f64)> {
    let c = normalization_constants(n)?;
    Ok((range / c.require_xi()?, iqr / c.require_eta()?))
}

fn combine(w: f64, parts: (f64, f64)) -> f64 {
    w * parts.0 + (1.0 - w) * parts.1
}

/// `w (b - a) / ξ + (1 - w) (q3 - q1) / η`.
pub fn sd_weighted(data: &FiveNumberSummary, w: f64) -> Result<Estimate> {
    sd_weighted_from_widths(data.b - data.a, data.q3 - data.q1, data.n, w)
}

/// [`sd_weighted`] for a report that only gives the range and IQR widths.
pub fn sd_weighted_from_widths(range: f64, iqr: f64, n: u64, w: f64) -> Result<Estimate> {
    check_weight(w)?;
    check_widths(range, iqr)?;
    let parts = components(range, iqr, n)?;
    Ok(Estimate {
        value: combine(w, parts),
        method: Method::WeightedSd,
        weight_used: Some(w),
        components: Some(parts),
    })
}

fn check_widths(range: f64, iqr: f64) -> Result<()> {
    if !(range.is_finite() && iqr.is_finite()) || range < 0.0 || iqr < 0.0 {
        return Err(Error::InvalidInput(format!(
            "range and IQR must be finite and nonnegative, got {range} and {iqr}"
        )));
    }
    Ok(())
}

/// The equally weighted average of the range and IQR components.
pub fn sd_wan_s3(data: &FiveNumberSummary) -> Result<Estimate> {
    sd_wan_s3_from_widths(data.b - data.a, data.q3 - data.q1, data.n)
}

pub fn sd_wan_s3_from_widths(range: f64, iqr: f64, n: u64) -> Result<Estimate> {
    let est = sd_weighted_from_widths(range, iqr, n, 0.5)?;
    Ok(Estimate {
        method: Method::WanSdS3,
        ..est
    })
}

/// `1 / (1 + 0.07 n^0.6)`, the power-law approximation of the MSE-optimal
/// weight on the range component.
pub fn approx_optimal_weight(n: u64) -> Result<f64> {
    check_n(n)?;
    Ok(1.0 / (1.0 + approx_j(n)))
}

/// `0.07 n^0.6`.
pub fn approx_j(n: u64) -> f64 {
    APPROX_J_COEFFICIENT * (n as f64).powf(APPROX_J_EXPONENT)
}

/// `(b - a) / θ₁(n) + (q3 - q1) / θ₂(n)`.
pub fn sd_shi(data: &FiveNumberSummary) -> Result<Estimate> {
    sd_shi_from_widths(data.b - data.a, data.q3 - data.q1, data.n)
}

pub fn sd_shi_from_widths(range: f64, iqr: f64, n: u64) -> Result<Estimate> {
    check_widths(range, iqr)?;
    let c = normalization_constants(n)?;
    c.require_xi()?;
    c.require_eta()?;
    let w = approx_optimal_weight(n)?;
    Ok(Estimate {
        value: range / c.theta1 + iqr / c.theta2,
        method: Method::ShiSd,
        weight_used: Some(w),
        components: Some((range / c.xi, iqr / c.eta)),
    })
}

/// Applies the SD estimator `method` to a full five-number summary; the
/// single-scenario estimators see only the part they use. `WeightedSd` needs
/// an explicit weight and is rejected here, as are the mean estimators.
pub fn sd_from_summary(method: Method, data: &FiveNumberSummary) -> Result<Estimate> {
    match method {
        Method::HozoSd => sd_hozo_s1(&data.range_part()),
        Method::WanSdS1 => sd_wan_s1(&data.range_part()),
        Method::WanSdS2 => sd_wan_s2(&data.quartile_part()),
        Method::BlandSd => sd_bland(data),
        Method::WanSdS3 => sd_wan_s3(data),
        Method::ShiSd => sd_shi(data),
        Method::WeightedSd | Method::BlandMean | Method::LuoMean => Err(Error::InvalidInput(
            format!("{method} is not a fixed SD estimator for a five-number summary"),
        )),
    }
}

/// Mean squared error of the weighted estimator at weight `w` for normal data
/// with standard deviation `sigma`:
///
/// `σ² [w² Var(R)/ξ² + (1-w)² Var(I)/η² + 2 w (1-w) Cov(R, I)/(ξη)]`
///
/// where `R` and `I` are the standard-normal range and interquartile range.
/// The quadratic is minimised at [`crate::order_stats::optimal_weight_exact`].
pub fn mse_of_weight(
    w: f64,
    moments: &OrderStatMoments,
    constants: &NormalizationConstants,
    sigma: f64,
) -> Result<f64> {
    check_weight(w)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if moments.n != constants.n {
        return Err(Error::InvalidInput(format!(
            "moments for n = {} paired with constants for n = {}",
            moments.n, constants.n
        )));
    }
    let xi = constants.require_xi()?;
    let eta = constants.require_eta()?;
    let v_range = moments.var_range / (xi * xi);
    let v_iqr = moments.var_iqr / (eta * eta);
    let cov = moments.cov_range_iqr / (xi * eta);
    let u = 1.0 - w;
    Ok(sigma * sigma * (w * w * v_range + u * u * v_iqr + 2.0 * w * u * cov))
}
