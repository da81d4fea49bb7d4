//! Least-squares fit of `c1 n^c2 + c0` to `(n, J(n))` samples.
//!
//! For a fixed exponent the model is linear in `c1` (and `c0`), so the fit
//! profiles those coefficients out and minimises the residual over
//! `c2 ∈ (0, 1)`: a coarse scan brackets the minimum and golden-section
//! search refines it. The ordinary log–log regression, exact when `c0 = 0`
//! and the data follow the model, is reported alongside.

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Sum of squared errors on the original scale.
    pub residual: f64,
    /// `(c1, c2)` from regressing `ln J` on `ln n`.
    pub log_linear: (f64, f64),
}

impl PowerLawFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.c1 * n.powf(self.c2) + self.c0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PowerLawOptions {
    /// Fit `c0` as well; otherwise `c0 = 0`.
    pub fit_intercept: bool,
}

/// Fit with `c0 = 0`.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    fit_power_law_with(samples, PowerLawOptions::default())
}

pub fn fit_power_law_with(samples: &[(f64, f64)], opts: PowerLawOptions) -> Result<PowerLawFit> {
    validate(samples)?;
    let log_linear = log_log_regression(samples)?;

    let profile = |c2: f64| linear_coefficients(samples, c2, opts.fit_intercept);

    const GRID: usize = 200;
    let objective = |c2: f64| profile(c2).2;
    let mut best = 1;
    let mut best_val = f64::INFINITY;
    for i in 1..GRID {
        let v = objective(i as f64 / GRID as f64);
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let (mut a, mut b) = (
        (best - 1) as f64 / GRID as f64,
        (best + 1) as f64 / GRID as f64,
    );
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..120 {
        let c = b - ratio * (b - a);
        let d = a + ratio * (b - a);
        if objective(c) <= objective(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let c2 = 0.5 * (a + b);
    if !(c2 > 1e-6 && c2 < 1.0 - 1e-6) {
        return Err(Error::NumericFailure(format!(
            "best power-law exponent {c2} lies on the boundary of (0, 1)"
        )));
    }
    let (c1, c0, residual) = profile(c2);
    Ok(PowerLawFit {
        c0,
        c1,
        c2,
        residual,
        log_linear,
    })
}

fn validate(samples: &[(f64, f64)]) -> Result<()> {
    if samples.len() < MIN_POINTS {
        return Err(Error::InvalidInput(format!(
            "power-law fit needs at least {MIN_POINTS} points, got {}",
            samples.len()
        )));
    }
    for &(n, j) in samples {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sample size must be positive, got {n}"
            )));
        }
        if !(j > 0.0 && j.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "J values must be positive, got {j}"
            )));
        }
    }
    Ok(())
}

/// `(c1, c2)` from ordinary least squares of `ln J` on `ln n`.
pub fn log_log_regression(samples: &[(f64, f64)]) -> Result<(f64, f64)> {
    validate(samples)?;
    let k = samples.len() as f64;
    let (sx, sy) = samples
        .iter()
        .fold((0.0, 0.0), |(sx, sy), &(n, j)| (sx + n.ln(), sy + j.ln()));
    let (mx, my) = (sx / k, sy / k);
    let (sxx, sxy) = samples.iter().fold((0.0, 0.0), |(sxx, sxy), &(n, j)| {
        let dx = n.ln() - mx;
        (sxx + dx * dx, sxy + dx * (j.ln() - my))
    });
    if sxx <= 0.0 {
        return Err(Error::InvalidInput(
            "sample sizes must not all be equal".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(((my - slope * mx).exp(), slope))
}

/// Best `(c1, c0, residual)` for a fixed exponent.
fn linear_coefficients(samples: &[(f64, f64)], c2: f64, intercept: bool) -> (f64, f64, f64) {
    let xs: Vec<f64> = samples.iter().map(|&(n, _)| n.powf(c2)).collect();
    let (c1, c0) = if intercept {
        let k = samples.len() as f64;
        let mx = xs.iter().sum::<f64>() / k;
        let my = samples.iter().map(|s| s.1).sum::<f64>() / k;
        let (sxx, sxy) = xs
            .iter()
            .zip(samples)
            .fold((0.0, 0.0), |(sxx, sxy), (&x, &(_, j))| {
                (sxx + (x - mx) * (x - mx), sxy + (x - mx) * (j - my))
            });
        let c1 = sxy / sxx;
        (c1, my - c1 * mx)
    } else {
        let (sxx, sxy) = xs
            .iter()
            .zip(samples)
            .fold((0.0, 0.0), |(sxx, sxy), (&x, &(_, j))| {
                (sxx + x * x, sxy + x * j)
            });
        (sxy / sxx, 0.0)
    };
    let residual = xs
        .iter()
        .zip(samples)
        .map(|(&x, &(_, j))| (j - c1 * x - c0).powi(2))
        .sum();
    (c1, c0, residual)
}
