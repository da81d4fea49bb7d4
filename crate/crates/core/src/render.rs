//! Stable text rendering of floating-point output.

pub const SIGNIFICANT_DIGITS: usize = 9;

/// Fixed-notation rendering with [`SIGNIFICANT_DIGITS`] significant digits.
/// Trailing zeros are kept so that columns are stable across runs.
pub fn sig9(x: f64) -> String {
    sig(x, SIGNIFICANT_DIGITS)
}

pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = |e: i32| (digits as i32 - 1 - e).max(0) as usize;
    let text = format!("{:.*}", decimals(exponent), x);
    // Rounding can carry into a new leading digit (9.9999999996 -> 10.00000000).
    let rounded: f64 = text.parse().unwrap_or(x);
    if rounded != 0.0 && rounded.abs().log10().floor() as i32 > exponent {
        return format!("{:.*}", decimals(exponent + 1), x);
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(3.3481234567), "3.34812346");
        assert_eq!(sig9(0.0412345678912), "0.0412345679");
        assert_eq!(sig9(123456.789012), "123456.789");
        assert_eq!(sig9(-2.5), "-2.50000000");
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(9.9999999996), "10.0000000");
        assert_eq!(sig9(1e-7), "0.000000100000000");
        assert_eq!(sig9(12345678901.0), "12345678901");
        assert_eq!(sig9(f64::NAN), "NaN");
    }
}
