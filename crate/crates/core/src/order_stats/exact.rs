//! Quadrature of normal order-statistic densities.
//!
//! The r-th order statistic of n standard normals has density
//!
//! ```text
//! f_r(z) = n! / ((r-1)! (n-r)!) Φ(z)^(r-1) (1-Φ(z))^(n-r) φ(z)
//! ```
//!
//! and the pair r < s has joint density on x < y
//!
//! ```text
//! f_rs(x, y) = n! / ((r-1)! (s-r-1)! (n-s)!)
//!              Φ(x)^(r-1) (Φ(y)-Φ(x))^(s-r-1) (1-Φ(y))^(n-s) φ(x) φ(y).
//! ```
//!
//! Both are evaluated in log space. Each order statistic is integrated over
//! the part of [-9, 9] where its log-density is within `LOG_DENSITY_DROP` of
//! its maximum; outside that window the density is below 1e-20 relative to
//! the mode.

use super::{OrderStatMoments, SampleSizeQ};
use crate::error::{Error, Result};
use crate::normal::{interval_prob, ln_cdf, ln_pdf};
use crate::quadrature::{integrate, QuadratureOptions};

pub(super) const DEFAULT_ABS_TOL: f64 = 1e-10;

const DOMAIN: (f64, f64) = (-9.0, 9.0);
const LOG_DENSITY_DROP: f64 = 46.0;
const MASS_TOLERANCE: f64 = 1e-8;
const SYMMETRY_TOLERANCE: f64 = 1e-8;

fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

#[derive(Debug, Clone, Copy)]
struct Marginal {
    n: u64,
    r: u64,
    ln_norm: f64,
    lo: f64,
    hi: f64,
}

impl Marginal {
    fn new(n: u64, r: u64) -> Self {
        let ln_norm = ln_factorial(n) - ln_factorial(r - 1) - ln_factorial(n - r);
        let mut m = Marginal {
            n,
            r,
            ln_norm,
            lo: DOMAIN.0,
            hi: DOMAIN.1,
        };
        let (lo, hi) = m.support();
        m.lo = lo;
        m.hi = hi;
        m
    }

    fn ln_density(&self, z: f64) -> f64 {
        let below = (self.r - 1) as f64;
        let above = (self.n - self.r) as f64;
        let mut l = self.ln_norm + ln_pdf(z);
        if below > 0.0 {
            l += below * ln_cdf(z);
        }
        if above > 0.0 {
            l += above * ln_cdf(-z);
        }
        l
    }

    // The density is log-concave, so the window is found from the mode by
    // bisection on each side.
    fn support(&self) -> (f64, f64) {
        let (mut a, mut b) = DOMAIN;
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let c = b - ratio * (b - a);
            let d = a + ratio * (b - a);
            if self.ln_density(c) >= self.ln_density(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let mode = 0.5 * (a + b);
        let cut = self.ln_density(mode) - LOG_DENSITY_DROP;
        let edge = |inside: f64, outside: f64| {
            if self.ln_density(outside) >= cut {
                return outside;
            }
            let (mut i, mut o) = (inside, outside);
            for _ in 0..100 {
                let mid = 0.5 * (i + o);
                if self.ln_density(mid) >= cut {
                    i = mid;
                } else {
                    o = mid;
                }
            }
            o
        };
        (edge(mode, DOMAIN.0), edge(mode, DOMAIN.1))
    }
}

struct MarginalMoments {
    mean: f64,
    var: f64,
}

fn opts(abs_tol: f64) -> QuadratureOptions {
    QuadratureOptions {
        abs_tol,
        max_intervals: 4000,
        initial_pieces: 4,
    }
}

fn check_mass(mass: f64, what: &str) -> Result<()> {
    if (mass - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::NumericFailure(format!(
            "{what} integrates to {mass} instead of 1"
        )));
    }
    Ok(())
}

fn marginal_moments(m: &Marginal, abs_tol: f64) -> Result<MarginalMoments> {
    let first = integrate(
        |z| {
            let f = m.ln_density(z).exp();
            [f, z * f]
        },
        m.lo,
        m.hi,
        &opts(abs_tol),
    )?;
    let [mass, mean] = first.value;
    check_mass(mass, &format!("density of Z({}) for n = {}", m.r, m.n))?;
    let second = integrate(
        |z| {
            let d = z - mean;
            [d * d * m.ln_density(z).exp()]
        },
        m.lo,
        m.hi,
        &opts(abs_tol),
    )?;
    Ok(MarginalMoments {
        mean,
        var: second.value[0],
    })
}

/// Cov(Z(r), Z(s)) for r < s given the two marginal means.
fn covariance(
    lower: &Marginal,
    upper: &Marginal,
    mean_lower: f64,
    mean_upper: f64,
    abs_tol: f64,
) -> Result<f64> {
    let (n, r, s) = (lower.n, lower.r, upper.r);
    debug_assert!(r < s && upper.n == n);
    let ln_norm =
        ln_factorial(n) - ln_factorial(r - 1) - ln_factorial(s - r - 1) - ln_factorial(n - s);
    let below = (r - 1) as f64;
    let between = (s - r - 1) as f64;
    let above = (n - s) as f64;

    let outer_width = upper.hi - upper.lo;
    let inner_opts = opts(abs_tol / (10.0 * outer_width.max(1.0)));
    let mut failure = None;

    let outer = integrate(
        |y| {
            let x_hi = y.min(lower.hi);
            if x_hi <= lower.lo {
                return [0.0, 0.0];
            }
            let mut y_part = ln_norm + ln_pdf(y);
            if above > 0.0 {
                y_part += above * ln_cdf(-y);
            }
            let inner = integrate(
                |x| {
                    let mut l = y_part + ln_pdf(x);
                    if below > 0.0 {
                        l += below * ln_cdf(x);
                    }
                    if between > 0.0 {
                        let p = interval_prob(x, y);
                        if p <= 0.0 {
                            return [0.0, 0.0];
                        }
                        l += between * p.ln();
                    }
                    let f = l.exp();
                    [f, (x - mean_lower) * f]
                },
                lower.lo,
                x_hi,
                &inner_opts,
            );
            match inner {
                Ok(v) => [v.value[0], (y - mean_upper) * v.value[1]],
                Err(e) => {
                    failure.get_or_insert(e);
                    [0.0, 0.0]
                }
            }
        },
        upper.lo,
        upper.hi,
        &opts(abs_tol),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let [mass, cov] = outer.value;
    check_mass(
        mass,
        &format!("joint density of Z({r}), Z({s}) for n = {n}"),
    )?;
    Ok(cov)
}

/// Moments by quadrature with absolute tolerance `abs_tol` on every integral.
pub fn quadrature_moments(size: SampleSizeQ, abs_tol: f64) -> Result<OrderStatMoments> {
    if !(abs_tol > 0.0 && abs_tol.is_finite()) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {abs_tol}"
        )));
    }
    let n = size.n();
    let [r_min, r_q1, _, r_q3, r_max] = size.ranks();
    let min = Marginal::new(n, r_min);
    let q1 = Marginal::new(n, r_q1);
    let q3 = Marginal::new(n, r_q3);
    let max = Marginal::new(n, r_max);

    let m_min = marginal_moments(&min, abs_tol)?;
    let m_q1 = marginal_moments(&q1, abs_tol)?;
    let m_q3 = marginal_moments(&q3, abs_tol)?;
    let m_max = marginal_moments(&max, abs_tol)?;

    for (lo, hi, what) in [(&m_min, &m_max, "extremes"), (&m_q1, &m_q3, "quartiles")] {
        if (lo.mean + hi.mean).abs() > SYMMETRY_TOLERANCE
            || (lo.var - hi.var).abs() > SYMMETRY_TOLERANCE
        {
            return Err(Error::NumericFailure(format!(
                "moments of the {what} are not symmetric for n = {n}"
            )));
        }
    }

    let cov = |a: &Marginal, ma: &MarginalMoments, b: &Marginal, mb: &MarginalMoments| {
        covariance(a, b, ma.mean, mb.mean, abs_tol)
    };
    let c_min_max = cov(&min, &m_min, &max, &m_max)?;
    let c_q1_q3 = cov(&q1, &m_q1, &q3, &m_q3)?;
    let c_min_q1 = cov(&min, &m_min, &q1, &m_q1)?;
    let c_min_q3 = cov(&min, &m_min, &q3, &m_q3)?;
    let c_q1_max = cov(&q1, &m_q1, &max, &m_max)?;
    let c_q3_max = cov(&q3, &m_q3, &max, &m_max)?;

    let var_range = m_max.var + m_min.var - 2.0 * c_min_max;
    let var_iqr = m_q3.var + m_q1.var - 2.0 * c_q1_q3;
    let cov_range_iqr = c_q3_max - c_q1_max - c_min_q3 + c_min_q1;

    let e_max = 0.5 * (m_max.mean - m_min.mean);
    let e_q3 = 0.5 * (m_q3.mean - m_q1.mean);
    OrderStatMoments::symmetric(n, e_max, e_q3, var_range, var_iqr, cov_range_iqr)
}
