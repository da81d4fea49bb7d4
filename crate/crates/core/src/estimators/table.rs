use std::fmt::Write as _;

use super::normalization_constants;
use crate::error::{Error, Result};

/// One row of the θ₁/θ₂ coefficient table, kept at full precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientRow {
    pub q: u64,
    pub n: u64,
    pub theta1: f64,
    pub theta2: f64,
}

/// Shortcut coefficients for `n = 4Q + 1`, `Q = 1..=q_max`.
pub fn coefficient_table(q_max: u64) -> Result<Vec<CoefficientRow>> {
    if q_max == 0 {
        return Err(Error::InvalidInput("q_max must be at least 1".into()));
    }
    (1..=q_max)
        .map(|q| {
            let n = 4 * q + 1;
            let c = normalization_constants(n)?;
            Ok(CoefficientRow {
                q,
                n,
                theta1: c.theta1,
                theta2: c.theta2,
            })
        })
        .collect()
}

/// CSV with header `Q,n,theta1,theta2` and 4-decimal values.
pub fn render_table_csv(rows: &[CoefficientRow]) -> String {
    let mut out = String::from("Q,n,theta1,theta2\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{:.4},{:.4}", r.q, r.n, r.theta1, r.theta2);
    }
    out
}

/// Right-aligned plain-text table with the same columns as the CSV form.
pub fn render_table_text(rows: &[CoefficientRow]) -> String {
    let mut out = format!("{:>5} {:>6} {:>10} {:>10}\n", "Q", "n", "theta1", "theta2");
    for r in rows {
        let _ = writeln!(
            out,
            "{:>5} {:>6} {:>10.4} {:>10.4}",
            r.q, r.n, r.theta1, r.theta2
        );
    }
    out
}
