//! Globally adaptive 21-point Gauss–Kronrod quadrature for small vector-valued
//! integrands.
//!
//! Several moments of the same density are integrated in one pass, so the
//! integrand returns `[f64; K]` and the error of an interval is the largest
//! component error.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Absolute tolerance on every component of the integral.
    pub abs_tol: f64,
    /// Interval count at which refinement gives up.
    pub max_intervals: usize,
    /// Number of equal pieces the domain is split into before refinement.
    pub initial_pieces: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            abs_tol: 1e-10,
            max_intervals: 2000,
            initial_pieces: 4,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral<const K: usize> {
    pub value: [f64; K],
    pub abs_error: f64,
    pub evaluations: usize,
}

struct Piece<const K: usize> {
    a: f64,
    b: f64,
    value: [f64; K],
    error: f64,
}

impl<const K: usize> PartialEq for Piece<K> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const K: usize> Eq for Piece<K> {}
impl<const K: usize> PartialOrd for Piece<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const K: usize> Ord for Piece<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<const K: usize, F>(f: &mut F, a: f64, b: f64) -> ([f64; K], f64)
where
    F: FnMut(f64) -> [f64; K],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = [0.0; K];
    let mut gauss = [0.0; K];
    for k in 0..K {
        kronrod[k] = WGK[10] * fc[k];
    }
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for k in 0..K {
            let s = f1[k] + f2[k];
            kronrod[k] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
    }
    let mut err = 0.0f64;
    for k in 0..K {
        err = err.max(((kronrod[k] - gauss[k]) * half).abs());
        kronrod[k] *= half;
    }
    (kronrod, err)
}

/// Integrates `f` over `[a, b]` until the summed error estimate drops below
/// `opts.abs_tol`. An empty or reversed interval integrates to zero.
pub fn integrate<const K: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<Integral<K>>
where
    F: FnMut(f64) -> [f64; K],
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    if b <= a {
        return Ok(Integral {
            value: [0.0; K],
            abs_error: 0.0,
            evaluations: 0,
        });
    }

    let pieces = opts.initial_pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut heap = BinaryHeap::with_capacity(opts.max_intervals + 1);
    let mut evaluations = 0;
    for i in 0..pieces {
        let lo = a + width * i as f64;
        let hi = if i + 1 == pieces { b } else { lo + width };
        let (value, error) = gauss_kronrod(&mut f, lo, hi);
        evaluations += 21;
        heap.push(Piece {
            a: lo,
            b: hi,
            value,
            error,
        });
    }

    loop {
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        if total_err <= opts.abs_tol {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::NumericFailure(format!(
                "adaptive quadrature on [{a}, {b}] did not reach tolerance {:e} \
                 (error estimate {total_err:e} after {} intervals)",
                opts.abs_tol,
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::NumericFailure(format!(
                "adaptive quadrature cannot bisect [{}, {}] further",
                worst.a, worst.b
            )));
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gauss_kronrod(&mut f, lo, hi);
            evaluations += 21;
            heap.push(Piece {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
    }

    // Sum in position order so the result does not depend on heap layout.
    let mut pieces: Vec<Piece<K>> = heap.into_vec();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = [0.0; K];
    let mut abs_error = 0.0;
    for p in &pieces {
        for k in 0..K {
            value[k] += p.value[k];
        }
        abs_error += p.error;
    }
    Ok(Integral {
        value,
        abs_error,
        evaluations,
    })
}
