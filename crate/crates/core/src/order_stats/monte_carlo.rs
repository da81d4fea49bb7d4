use rand_distr::{Distribution, StandardNormal};

use super::{j_of_n, OrderStatMoments, SampleSizeQ, MIN_MONTE_CARLO_REPS};
use crate::error::{Error, Result};
use crate::estimators::normalization_constants;
use crate::replication::{jackknife_se, run_blocks, total, DEFAULT_BLOCK_SIZE};

/// Jackknife standard errors matching the fields of [`OrderStatMoments`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentErrors {
    pub e_extreme: f64,
    pub e_quartile: f64,
    pub var_range: f64,
    pub var_iqr: f64,
    pub cov_range_iqr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloMoments {
    pub moments: OrderStatMoments,
    pub std_errors: MomentErrors,
    pub j: f64,
    pub j_se: f64,
    pub weight: f64,
    pub weight_se: f64,
    pub reps: u64,
}

// Per-block sums.
const COUNT: usize = 0;
const RANGE: usize = 1;
const IQR: usize = 2;
const RANGE_SQ: usize = 3;
const IQR_SQ: usize = 4;
const RANGE_IQR: usize = 5;
const SUMS: usize = 6;

type Sums = [f64; SUMS];

fn sample_moments(s: &Sums) -> (f64, f64, f64, f64, f64) {
    let k = s[COUNT];
    let mean_r = s[RANGE] / k;
    let mean_i = s[IQR] / k;
    let unbias = k / (k - 1.0);
    let var_r = (s[RANGE_SQ] / k - mean_r * mean_r) * unbias;
    let var_i = (s[IQR_SQ] / k - mean_i * mean_i) * unbias;
    let cov = (s[RANGE_IQR] / k - mean_r * mean_i) * unbias;
    // Reflection z -> -z maps Z(r) to -Z(n+1-r), so E[Z(n)] = E[R]/2 and
    // E[Z(3Q+1)] = E[I]/2 give symmetric estimates of the means.
    (0.5 * mean_r, 0.5 * mean_i, var_r, var_i, cov)
}

/// Moments estimated from `reps` seeded standard-normal samples, with
/// delete-one-block jackknife standard errors and the implied J(n) and
/// optimal weight.
pub fn monte_carlo_moments(size: SampleSizeQ, reps: u64, seed: u64) -> Result<MonteCarloMoments> {
    if reps < MIN_MONTE_CARLO_REPS {
        return Err(Error::InvalidInput(format!(
            "Monte Carlo moments need at least {MIN_MONTE_CARLO_REPS} replications, got {reps}"
        )));
    }
    let n = size.n();
    let q = size.q() as usize;
    let len = n as usize;

    let parts = run_blocks::<SUMS, Error, _>(reps, DEFAULT_BLOCK_SIZE, |block, count| {
        let mut rng = crate::replication::block_rng(seed, n, block);
        let mut buf = vec![0.0f64; len];
        let mut sums = [0.0; SUMS];
        for _ in 0..count {
            for z in buf.iter_mut() {
                *z = StandardNormal.sample(&mut rng);
            }
            let (lo, hi) = buf
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &z| {
                    (lo.min(z), hi.max(z))
                });
            let (_, &mut q1, upper) = buf.select_nth_unstable_by(q, f64::total_cmp);
            let (_, &mut q3, _) = upper.select_nth_unstable_by(2 * q - 1, f64::total_cmp);
            let range = hi - lo;
            let iqr = q3 - q1;
            sums[COUNT] += 1.0;
            sums[RANGE] += range;
            sums[IQR] += iqr;
            sums[RANGE_SQ] += range * range;
            sums[IQR_SQ] += iqr * iqr;
            sums[RANGE_IQR] += range * iqr;
        }
        Ok(sums)
    })?;

    let all = total(&parts);
    let (e_max, e_q3, var_range, var_iqr, cov_range_iqr) = sample_moments(&all);
    let moments = OrderStatMoments::symmetric(n, e_max, e_q3, var_range, var_iqr, cov_range_iqr)?;
    let constants = normalization_constants(n)?;
    let j = j_of_n(&moments, &constants)?;

    let j_from = |s: &Sums| {
        let (_, _, vr, vi, c) = sample_moments(s);
        let cross = c / (constants.xi * constants.eta);
        (vr / (constants.xi * constants.xi) - cross)
            / (vi / (constants.eta * constants.eta) - cross)
    };
    let se = |f: &dyn Fn(&Sums) -> f64| jackknife_se(&parts, f).unwrap_or(f64::NAN);
    let std_errors = MomentErrors {
        e_extreme: se(&|s| sample_moments(s).0),
        e_quartile: se(&|s| sample_moments(s).1),
        var_range: se(&|s| sample_moments(s).2),
        var_iqr: se(&|s| sample_moments(s).3),
        cov_range_iqr: se(&|s| sample_moments(s).4),
    };
    Ok(MonteCarloMoments {
        moments,
        std_errors,
        j,
        j_se: se(&j_from),
        weight: 1.0 / (1.0 + j),
        weight_se: se(&|s| 1.0 / (1.0 + j_from(s))),
        reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_reproducible() {
        let size = SampleSizeQ::from_q(1).unwrap();
        let a = monte_carlo_moments(size, 20_000, 11).unwrap();
        let b = monte_carlo_moments(size, 20_000, 11).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_moments(size, 20_000, 12).unwrap();
        assert_ne!(a.moments, c.moments);
        assert!(a.weight > 0.0 && a.weight < 1.0);
        assert!(a.std_errors.var_range > 0.0);
    }

    #[test]
    fn rejects_too_few_reps() {
        let size = SampleSizeQ::from_q(1).unwrap();
        assert!(monte_carlo_moments(size, 9_999, 1).is_err());
    }
}
