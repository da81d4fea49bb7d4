//! Standard normal density, distribution function and quantile function.
//!
//! The distribution function is built on W. J. Cody's rational Chebyshev
//! approximations of the complementary error function, which keep full
//! relative precision in the lower tail. The quantile starts from Acklam's
//! rational approximation (relative error about 1e-9) and is polished with a
//! single Halley step against the distribution function.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{ensure_finite, Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// A probability strictly inside the open unit interval.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(p: f64) -> Result<Self> {
        if p > 0.0 && p < 1.0 {
            Ok(Probability(p))
        } else {
            Err(Error::Domain(format!(
                "probability must lie in the open interval (0, 1), got {p}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        Probability::new(p)
    }
}

/// Density of the standard normal distribution.
pub fn std_normal_pdf(x: f64) -> Result<f64> {
    ensure_finite(x, "x")?;
    Ok(pdf(x))
}

/// Distribution function Φ of the standard normal distribution.
///
/// The result is a value in `[0, 1]`; it only reaches the endpoints when the
/// true value underflows (|x| beyond roughly 38).
pub fn std_normal_cdf(x: f64) -> Result<f64> {
    ensure_finite(x, "x")?;
    Ok(cdf(x))
}

/// Quantile function Φ⁻¹ of the standard normal distribution.
pub fn std_normal_quantile(p: Probability) -> Result<f64> {
    Ok(quantile(p.value()))
}

#[inline]
pub(crate) fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

#[inline]
pub(crate) fn ln_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

#[inline]
pub(crate) fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Natural log of Φ(x), accurate in the lower tail.
#[inline]
pub(crate) fn ln_cdf(x: f64) -> f64 {
    if x > 0.0 {
        (-0.5 * erfc(x * FRAC_1_SQRT_2)).ln_1p()
    } else {
        cdf(x).ln()
    }
}

/// P(x < Z ≤ y) for x ≤ y, computed on whichever tail avoids cancellation.
#[inline]
pub(crate) fn interval_prob(x: f64, y: f64) -> f64 {
    if x > 0.0 {
        cdf(-x) - cdf(-y)
    } else {
        cdf(y) - cdf(x)
    }
}

/// Complementary error function (Cody, Math. Comp. 1969), relative accuracy
/// near machine precision over the whole real line.
#[allow(clippy::excessive_precision)]
pub(crate) fn erfc(x: f64) -> f64 {
    const A: [f64; 5] = [
        3.161_123_743_870_565_60e0,
        1.138_641_541_510_501_56e2,
        3.774_852_376_853_020_21e2,
        3.209_377_589_138_469_47e3,
        1.857_777_061_846_031_53e-1,
    ];
    const B: [f64; 4] = [
        2.360_129_095_234_412_09e1,
        2.440_246_379_344_441_73e2,
        1.282_616_526_077_372_28e3,
        2.844_236_833_439_170_62e3,
    ];
    const C: [f64; 9] = [
        5.641_884_969_886_700_89e-1,
        8.883_149_794_388_375_94e0,
        6.611_919_063_714_162_95e1,
        2.986_351_381_974_001_31e2,
        8.819_522_212_417_690_90e2,
        1.712_047_612_634_070_58e3,
        2.051_078_377_826_071_47e3,
        1.230_339_354_797_997_25e3,
        2.153_115_354_744_038_46e-8,
    ];
    const D: [f64; 8] = [
        1.574_492_611_070_983_47e1,
        1.176_939_508_913_124_99e2,
        5.371_811_018_620_098_58e2,
        1.621_389_574_566_690_19e3,
        3.290_799_235_733_459_63e3,
        4.362_619_090_143_247_16e3,
        3.439_367_674_143_721_64e3,
        1.230_339_354_803_749_42e3,
    ];
    const P: [f64; 6] = [
        3.053_266_349_612_323_44e-1,
        3.603_448_999_498_044_39e-1,
        1.257_817_261_112_292_46e-1,
        1.608_378_514_874_227_66e-2,
        6.587_491_615_298_378_03e-4,
        1.631_538_713_730_209_78e-2,
    ];
    const Q: [f64; 5] = [
        2.568_520_192_289_822_42e0,
        1.872_952_849_923_467_25e0,
        5.279_051_029_514_284_12e-1,
        6.051_834_131_244_131_91e-2,
        2.335_204_976_268_691_85e-3,
    ];
    const FRAC_1_SQRT_PI: f64 = 5.641_895_835_477_562_87e-1;
    const THRESH: f64 = 0.468_75;
    const XSMALL: f64 = 1.11e-16;
    const XBIG: f64 = 26.543;

    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();

    if y <= THRESH {
        let ysq = if y > XSMALL { y * y } else { 0.0 };
        let mut xnum = A[4] * ysq;
        let mut xden = ysq;
        for i in 0..3 {
            xnum = (xnum + A[i]) * ysq;
            xden = (xden + B[i]) * ysq;
        }
        let erf = x * (xnum + A[3]) / (xden + B[3]);
        return 1.0 - erf;
    }

    let upper = if y <= 4.0 {
        let mut xnum = C[8] * y;
        let mut xden = y;
        for i in 0..7 {
            xnum = (xnum + C[i]) * y;
            xden = (xden + D[i]) * y;
        }
        let r = (xnum + C[7]) / (xden + D[7]);
        r * split_exp_neg_sq(y)
    } else if y >= XBIG {
        0.0
    } else {
        let ysq = 1.0 / (y * y);
        let mut xnum = P[5] * ysq;
        let mut xden = ysq;
        for i in 0..4 {
            xnum = (xnum + P[i]) * ysq;
            xden = (xden + Q[i]) * ysq;
        }
        let r = ysq * (xnum + P[4]) / (xden + Q[4]);
        let r = (FRAC_1_SQRT_PI - r) / y;
        r * split_exp_neg_sq(y)
    };

    if x < 0.0 {
        2.0 - upper
    } else {
        upper
    }
}

// exp(-y²) evaluated as exp(-ysq²)·exp(-(y-ysq)(y+ysq)) with ysq = y rounded
// down to a multiple of 1/16, which avoids the cancellation in y² for large y.
#[inline]
fn split_exp_neg_sq(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

/// Lower-tail quantile for p in (0, 1) without argument validation.
pub(crate) fn quantile(p: f64) -> f64 {
    if p > 0.5 {
        // 1 - p is exact for p in [0.5, 1].
        return -quantile(1.0 - p);
    }
    if p == 0.5 {
        return 0.0;
    }
    let x = acklam(p);
    halley_step(x, p)
}

fn halley_step(x: f64, p: f64) -> f64 {
    let e = cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

#[allow(clippy::excessive_precision)]
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_690e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239e0,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838e0,
        -2.549_732_539_343_734e0,
        4.374_664_141_464_968e0,
        2.938_163_982_698_783e0,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996e0,
        3.754_408_661_907_416e0,
    ];
    const P_LOW: f64 = 0.024_25;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: f64) -> f64 {
        std_normal_quantile(Probability::new(p).unwrap()).unwrap()
    }

    // Bisection on the distribution function; independent of the rational
    // approximation and the Halley refinement.
    fn bisect_quantile(p: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0, 40.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn pdf_values() {
        assert!((std_normal_pdf(0.0).unwrap() - 0.398_942_280_4).abs() < 1e-10);
        assert!((std_normal_pdf(1.0).unwrap() - 0.241_970_724_5).abs() < 1e-10);
        assert_eq!(pdf(1.7), pdf(-1.7));
        assert!(std_normal_pdf(f64::NAN).is_err());
        assert!(std_normal_pdf(f64::INFINITY).is_err());
    }

    #[test]
    fn cdf_values() {
        assert_eq!(std_normal_cdf(0.0).unwrap(), 0.5);
        assert!((std_normal_cdf(1.959_964).unwrap() - 0.975).abs() < 1e-7);
        let tail = std_normal_cdf(-8.0).unwrap();
        assert!(tail > 0.0 && tail < 1e-14);
        assert!(std_normal_cdf(f64::NEG_INFINITY).is_err());
    }

    // Independent erfc: all-positive Kummer series below 2, Lentz continued
    // fraction above.
    fn erfc_oracle(x: f64) -> f64 {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        if x < 2.0 {
            let mut term = 1.0;
            let mut sum = 1.0;
            let mut k = 0.0;
            while term > 1e-18 * sum {
                k += 1.0;
                term *= 2.0 * x * x / (2.0 * k + 1.0);
                sum += term;
            }
            1.0 - 2.0 * x * (-x * x).exp() * sum / sqrt_pi
        } else {
            let tiny = 1e-300;
            let mut f = x;
            let mut c = x;
            let mut d = 0.0;
            for k in 1..500 {
                let a = k as f64 / 2.0;
                d = x + a * d;
                d = if d == 0.0 { tiny } else { 1.0 / d };
                c = x + a / c;
                let delta = c * d;
                f *= delta;
                if (delta - 1.0).abs() < 1e-16 {
                    break;
                }
            }
            (-x * x).exp() / (sqrt_pi * f)
        }
    }

    #[test]
    fn erfc_matches_series_oracle() {
        let mut x = -6.0;
        while x <= 26.0 {
            let ours = erfc(x);
            let theirs = erfc_oracle(x);
            let rel = ((ours - theirs) / theirs).abs();
            let tol = if (0.5..2.0).contains(&x) {
                1e-11
            } else {
                1e-13
            };
            assert!(rel < tol, "x={x}: {ours} vs {theirs}");
            x += 0.0137;
        }
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(q(0.5), 0.0);
        let p: f64 = (5.0 - 0.375) / (5.0 + 0.25);
        assert!((p - 0.880_952).abs() < 1e-6);
        assert!((q(p) - 1.179_76).abs() < 1e-4);
        assert!((q(p) - bisect_quantile(p)).abs() < 1e-12);
        assert!((q(0.975) - 1.959_963_984_540_054).abs() < 1e-12);
    }

    #[test]
    fn quantile_rejects_degenerate_probabilities() {
        assert!(Probability::new(0.0).is_err());
        assert!(Probability::new(1.0).is_err());
        assert!(Probability::new(-0.1).is_err());
        assert!(Probability::new(f64::NAN).is_err());
    }

    #[test]
    fn round_trip_and_antisymmetry_on_dense_grid() {
        let mut grid: Vec<f64> = (1..10).map(|k| 10f64.powi(-k)).collect();
        grid.push(1e-10);
        grid.extend((1..2000).map(|i| i as f64 / 2000.0));
        let lower: Vec<f64> = grid.iter().map(|p| 1.0 - p).collect();
        grid.extend(lower);
        grid.retain(|&p| (1e-10..=1.0 - 1e-10).contains(&p));
        grid.sort_by(f64::total_cmp);

        let mut prev = f64::NEG_INFINITY;
        for &p in &grid {
            let x = q(p);
            assert!((cdf(x) - p).abs() <= 1e-12, "p={p}");
            // 1 - p rounds, so compare against its exact complement.
            let upper = 1.0 - p;
            assert_eq!(q(upper), -q(1.0 - upper), "p={p}");
            assert!(
                x >= prev - 1e-15 * x.abs().max(1.0),
                "p={p} x={x} prev={prev}"
            );
            prev = x;
        }
    }

    #[test]
    fn ln_cdf_tails() {
        assert!((ln_cdf(-30.0) - erfc_oracle(30.0 / 2f64.sqrt()).ln() + 2f64.ln()).abs() < 1e-10);
        assert!((ln_cdf(8.0) + cdf(-8.0)).abs() < 1e-25);
        assert!((interval_prob(6.0, 7.0) - (cdf(-6.0) - cdf(-7.0))).abs() < 1e-24);
    }

    proptest::proptest! {
        #[test]
        fn cdf_is_monotone_and_symmetric(a in -12.0f64..12.0, b in -12.0f64..12.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            proptest::prop_assert!(cdf(lo) <= cdf(hi));
            proptest::prop_assert!((cdf(-a) - (1.0 - cdf(a))).abs() < 1e-15);
        }
    }
}
