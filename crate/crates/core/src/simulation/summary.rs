use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimators::FiveNumberSummary;

/// How quartiles and the median are read off a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SummaryConvention {
    /// Order statistics of rank 1, Q+1, 2Q+1, 3Q+1 and n; requires `n = 4Q + 1`.
    Ranks4Q1,
    /// Linear interpolation at probabilities 0.25, 0.5 and 0.75 over
    /// positions 1..n, i.e. position `1 + (n - 1) p`. For `n = 4Q + 1` this
    /// lands exactly on the ranks used by [`SummaryConvention::Ranks4Q1`].
    Interpolated,
}

impl SummaryConvention {
    /// `Ranks4Q1` when `n = 4Q + 1`, otherwise `Interpolated`.
    pub fn natural(n: u64) -> Self {
        if n >= 5 && (n - 1).is_multiple_of(4) {
            SummaryConvention::Ranks4Q1
        } else {
            SummaryConvention::Interpolated
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SummaryConvention::Ranks4Q1 => "ranks_4q1",
            SummaryConvention::Interpolated => "interpolated",
        }
    }
}

impl fmt::Display for SummaryConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SummaryConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ranks_4q1" => Ok(SummaryConvention::Ranks4Q1),
            "interpolated" => Ok(SummaryConvention::Interpolated),
            _ => Err(Error::InvalidInput(format!(
                "unknown summary convention {s:?}"
            ))),
        }
    }
}

/// Zero-based positions of (min, q1, m, q3, max) and interpolation weights
/// for the three inner values.
#[derive(Debug, Clone, Copy)]
struct Positions {
    lo: [usize; 3],
    frac: [f64; 3],
    last: usize,
}

fn positions(n: usize, convention: SummaryConvention) -> Result<Positions> {
    if n == 0 {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    match convention {
        SummaryConvention::Ranks4Q1 => {
            if n < 5 || !(n - 1).is_multiple_of(4) {
                return Err(Error::InvalidInput(format!(
                    "sample size {n} is not of the form 4Q+1; use the interpolated convention"
                )));
            }
            let q = (n - 1) / 4;
            Ok(Positions {
                lo: [q, 2 * q, 3 * q],
                frac: [0.0; 3],
                last: n - 1,
            })
        }
        SummaryConvention::Interpolated => {
            let mut lo = [0; 3];
            let mut frac = [0.0; 3];
            for (i, p) in [0.25, 0.5, 0.75].into_iter().enumerate() {
                let h = (n - 1) as f64 * p;
                lo[i] = h.floor() as usize;
                frac[i] = h - h.floor();
            }
            Ok(Positions {
                lo,
                frac,
                last: n - 1,
            })
        }
    }
}

fn assemble(pos: &Positions, at: impl Fn(usize) -> f64, n: usize) -> Result<FiveNumberSummary> {
    let inner = |i: usize| {
        let x = at(pos.lo[i]);
        if pos.frac[i] == 0.0 {
            x
        } else {
            x + pos.frac[i] * (at(pos.lo[i] + 1) - x)
        }
    };
    FiveNumberSummary::new(at(0), inner(0), inner(1), inner(2), at(pos.last), n as u64)
}

/// Five-number summary of an ascending sample.
pub fn five_number_summary(
    sample: &[f64],
    convention: SummaryConvention,
) -> Result<FiveNumberSummary> {
    let pos = positions(sample.len(), convention)?;
    if sample.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidInput(
            "sample must be sorted ascending".into(),
        ));
    }
    assemble(&pos, |i| sample[i], sample.len())
}

/// Same result as [`five_number_summary`] on the sorted sample, computed by
/// partial selection. Reorders `buf`.
pub(crate) fn five_number_summary_unsorted(
    buf: &mut [f64],
    convention: SummaryConvention,
) -> Result<FiveNumberSummary> {
    let pos = positions(buf.len(), convention)?;
    let mut ranks = vec![0, pos.last];
    for i in 0..3 {
        ranks.push(pos.lo[i]);
        if pos.frac[i] != 0.0 {
            ranks.push(pos.lo[i] + 1);
        }
    }
    ranks.sort_unstable();
    ranks.dedup();
    let mut values = vec![0.0; ranks.len()];
    select_ranks(buf, 0, &ranks, &mut values);
    let at = |r: usize| values[ranks.binary_search(&r).expect("rank selected")];
    assemble(&pos, at, buf.len())
}

/// Writes the order statistics at `ranks` (ascending, relative to the full
/// buffer whose first element sits at `offset`) into `out`.
fn select_ranks(buf: &mut [f64], offset: usize, ranks: &[usize], out: &mut [f64]) {
    if ranks.is_empty() {
        return;
    }
    let mid = ranks.len() / 2;
    let k = ranks[mid] - offset;
    let (left, &mut pivot, right) = buf.select_nth_unstable_by(k, f64::total_cmp);
    out[mid] = pivot;
    select_ranks(left, offset, &ranks[..mid], &mut out[..mid]);
    select_ranks(
        right,
        offset + k + 1,
        &ranks[mid + 1..],
        &mut out[mid + 1..],
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tuple(s: &FiveNumberSummary) -> [f64; 5] {
        [s.a, s.q1, s.m, s.q3, s.b]
    }

    #[test]
    fn rank_convention_reads_ranks() {
        let five = [1.0, 2.0, 3.0, 4.0, 5.0];
        let s = five_number_summary(&five, SummaryConvention::Ranks4Q1).unwrap();
        assert_eq!(tuple(&s), five);
        let nine: Vec<f64> = (1..=9).map(f64::from).collect();
        let s = five_number_summary(&nine, SummaryConvention::Ranks4Q1).unwrap();
        assert_eq!(tuple(&s), [1.0, 3.0, 5.0, 7.0, 9.0]);
        let eight: Vec<f64> = (1..=8).map(f64::from).collect();
        assert!(five_number_summary(&eight, SummaryConvention::Ranks4Q1).is_err());
    }

    #[test]
    fn interpolated_median() {
        let eight: Vec<f64> = (1..=8).map(f64::from).collect();
        let s = five_number_summary(&eight, SummaryConvention::Interpolated).unwrap();
        // Brute force: median sits halfway between the 4th and 5th values.
        assert_eq!(s.m, 0.5 * (eight[3] + eight[4]));
        assert_eq!(s.m, 4.5);
        assert_eq!(s.q1, 2.75);
        assert_eq!(s.q3, 6.25);
    }

    #[test]
    fn conventions_agree_on_4q1() {
        let x: Vec<f64> = (0..41).map(|i| (i as f64).powf(1.3)).collect();
        let a = five_number_summary(&x, SummaryConvention::Ranks4Q1).unwrap();
        let b = five_number_summary(&x, SummaryConvention::Interpolated).unwrap();
        assert_eq!(tuple(&a), tuple(&b));
        assert_eq!(SummaryConvention::natural(41), SummaryConvention::Ranks4Q1);
        assert_eq!(
            SummaryConvention::natural(84),
            SummaryConvention::Interpolated
        );
    }

    #[test]
    fn rejects_unsorted_or_empty() {
        assert!(five_number_summary(&[2.0, 1.0, 3.0], SummaryConvention::Interpolated).is_err());
        assert!(five_number_summary(&[], SummaryConvention::Interpolated).is_err());
        let one = five_number_summary(&[3.0], SummaryConvention::Interpolated).unwrap();
        assert_eq!(tuple(&one), [3.0; 5]);
    }

    proptest! {
        #[test]
        fn selection_matches_sorting(mut xs in proptest::collection::vec(-1e3f64..1e3, 1..120)) {
            let mut sorted = xs.clone();
            sorted.sort_by(f64::total_cmp);
            let conv = SummaryConvention::natural(xs.len() as u64);
            let expected = five_number_summary(&sorted, conv).unwrap();
            let got = five_number_summary_unsorted(&mut xs, conv).unwrap();
            prop_assert_eq!(tuple(&expected), tuple(&got));
        }
    }
}
