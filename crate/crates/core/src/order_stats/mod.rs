//! Moments of standard-normal order statistics for samples of size
//! `n = 4Q + 1`, and the exact MSE-optimal weight built from them.
//!
//! For such `n` the reported summary consists of the order statistics of rank
//! 1, Q+1, 2Q+1, 3Q+1 and n. The weight on the range component that minimises
//! the MSE of the weighted SD estimator is `1 / (1 + J(n))` with
//!
//! ```text
//!        Var(R)/ξ² − Cov(R, I)/(ξη)
//! J(n) = ---------------------------,   R = Z(n) − Z(1),  I = Z(3Q+1) − Z(Q+1).
//!        Var(I)/η² − Cov(R, I)/(ξη)
//! ```
//!
//! Moments come either from deterministic quadrature of the order-statistic
//! densities ([`MomentMethod::Quadrature`]) or from seeded simulation
//! ([`MomentMethod::MonteCarlo`]); the two paths are independent and are
//! cross-checked in the test suite.

mod cache;
mod exact;
mod monte_carlo;

pub use cache::MomentCache;
pub use exact::quadrature_moments;
pub use monte_carlo::{monte_carlo_moments, MomentErrors, MonteCarloMoments};

use crate::error::{Error, Result};
use crate::estimators::NormalizationConstants;

/// Sample size of the form `n = 4Q + 1` with `Q ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SampleSizeQ {
    q: u64,
}

impl SampleSizeQ {
    pub fn from_q(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidInput("Q must be a positive integer".into()));
        }
        Ok(SampleSizeQ { q })
    }

    pub fn from_n(n: u64) -> Result<Self> {
        if n < 5 || !(n - 1).is_multiple_of(4) {
            return Err(Error::InvalidInput(format!(
                "sample size {n} is not of the form 4Q+1 with Q >= 1"
            )));
        }
        Ok(SampleSizeQ { q: (n - 1) / 4 })
    }

    pub fn q(self) -> u64 {
        self.q
    }

    pub fn n(self) -> u64 {
        4 * self.q + 1
    }

    /// 1-based ranks of the minimum, first quartile, median, third quartile
    /// and maximum.
    pub fn ranks(self) -> [u64; 5] {
        let q = self.q;
        [1, q + 1, 2 * q + 1, 3 * q + 1, 4 * q + 1]
    }
}

/// Means of the extreme and quartile order statistics of a standard-normal
/// sample plus the second moments of the range `R` and the IQR `I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderStatMoments {
    pub n: u64,
    pub e_min: f64,
    pub e_q1: f64,
    pub e_q3: f64,
    pub e_max: f64,
    pub var_range: f64,
    pub var_iqr: f64,
    pub cov_range_iqr: f64,
}

impl OrderStatMoments {
    /// Builds a symmetric moment set (`e_min = -e_max`, `e_q1 = -e_q3`) and
    /// checks the variance and Cauchy–Schwarz invariants.
    pub fn symmetric(
        n: u64,
        e_max: f64,
        e_q3: f64,
        var_range: f64,
        var_iqr: f64,
        cov_range_iqr: f64,
    ) -> Result<Self> {
        let m = OrderStatMoments {
            n,
            e_min: -e_max,
            e_q1: -e_q3,
            e_q3,
            e_max,
            var_range,
            var_iqr,
            cov_range_iqr,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.e_min,
            self.e_q1,
            self.e_q3,
            self.e_max,
            self.var_range,
            self.var_iqr,
            self.cov_range_iqr,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericFailure(format!(
                "non-finite moment for n = {}",
                self.n
            )));
        }
        if !(self.var_range > 0.0 && self.var_iqr > 0.0) {
            return Err(Error::NumericFailure(format!(
                "non-positive variance for n = {} (var_range = {}, var_iqr = {})",
                self.n, self.var_range, self.var_iqr
            )));
        }
        let bound = (self.var_range * self.var_iqr).sqrt();
        if self.cov_range_iqr.abs() > bound * (1.0 + 1e-12) {
            return Err(Error::NumericFailure(format!(
                "covariance {} violates the Cauchy-Schwarz bound {bound} for n = {}",
                self.cov_range_iqr, self.n
            )));
        }
        Ok(())
    }

    pub fn expected_range(&self) -> f64 {
        self.e_max - self.e_min
    }

    pub fn expected_iqr(&self) -> f64 {
        self.e_q3 - self.e_q1
    }
}

/// How [`order_stat_moments`] obtains the moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentMethod {
    /// Adaptive Gauss–Kronrod integration of the single and joint
    /// order-statistic densities to the given absolute tolerance.
    Quadrature { abs_tol: f64 },
    /// Sorted standard-normal samples; `reps` must be at least 10,000.
    MonteCarlo { reps: u64, seed: u64 },
}

impl Default for MomentMethod {
    fn default() -> Self {
        MomentMethod::Quadrature {
            abs_tol: exact::DEFAULT_ABS_TOL,
        }
    }
}

impl MomentMethod {
    /// Key identifying the method and its accuracy settings in a
    /// [`MomentCache`] file.
    pub fn cache_key(&self) -> String {
        match self {
            MomentMethod::Quadrature { abs_tol } => format!("method=quadrature tol={abs_tol:e}"),
            MomentMethod::MonteCarlo { reps, seed } => {
                format!("method=monte_carlo reps={reps} seed={seed}")
            }
        }
    }
}

pub const MIN_MONTE_CARLO_REPS: u64 = 10_000;

pub fn order_stat_moments(size: SampleSizeQ, method: &MomentMethod) -> Result<OrderStatMoments> {
    match *method {
        MomentMethod::Quadrature { abs_tol } => quadrature_moments(size, abs_tol),
        MomentMethod::MonteCarlo { reps, seed } => {
            Ok(monte_carlo_moments(size, reps, seed)?.moments)
        }
    }
}

fn j_parts(moments: &OrderStatMoments, constants: &NormalizationConstants) -> Result<(f64, f64)> {
    if moments.n != constants.n {
        return Err(Error::InvalidInput(format!(
            "moments for n = {} paired with constants for n = {}",
            moments.n, constants.n
        )));
    }
    let (xi, eta) = (constants.xi, constants.eta);
    if !(xi > 0.0 && eta > 0.0) {
        return Err(Error::NumericFailure(format!(
            "normalisation constants are not positive for n = {}",
            constants.n
        )));
    }
    let cross = moments.cov_range_iqr / (xi * eta);
    let num = moments.var_range / (xi * xi) - cross;
    let den = moments.var_iqr / (eta * eta) - cross;
    Ok((num, den))
}

/// The moment ratio J(n).
pub fn j_of_n(moments: &OrderStatMoments, constants: &NormalizationConstants) -> Result<f64> {
    let (num, den) = j_parts(moments, constants)?;
    if !(den > 0.0) {
        return Err(Error::NumericFailure(format!(
            "J(n) denominator is not positive ({den:e}) for n = {}",
            moments.n
        )));
    }
    if !(num > 0.0) {
        return Err(Error::NumericFailure(format!(
            "J(n) numerator is not positive ({num:e}) for n = {}",
            moments.n
        )));
    }
    Ok(num / den)
}

/// MSE-optimal weight `1 / (1 + J(n))` on the range component.
pub fn optimal_weight_exact(
    moments: &OrderStatMoments,
    constants: &NormalizationConstants,
) -> Result<f64> {
    Ok(1.0 / (1.0 + j_of_n(moments, constants)?))
}
