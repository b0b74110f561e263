//! Fixed textual form of floating-point output.

/// Significant digits written to CSV cells.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Formats `x` with nine significant digits: positional notation for
/// magnitudes in `[1e-5, 1e9)`, scientific otherwise.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".to_owned()
        } else if x > 0.0 {
            "inf".to_owned()
        } else {
            "-inf".to_owned()
        };
    }
    if x == 0.0 {
        return "0".to_owned();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if !(-5..9).contains(&exp) {
        return sci;
    }
    // Rounding already fixed the exponent, so the decimal count is exact.
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representative_values() {
        assert_eq!(sig9(2.0 / 3.0), "0.666666667");
        assert_eq!(sig9(0.5), "0.500000000");
        assert_eq!(sig9(1.0), "1.00000000");
        assert_eq!(sig9(-12.5), "-12.5000000");
        assert_eq!(sig9(0.977731983), "0.977731983");
        assert_eq!(sig9(9.999999999), "10.0000000");
        assert_eq!(sig9(1.23456789012e-7), "1.23456789e-7");
        assert_eq!(sig9(123456789.4), "123456789");
        assert_eq!(sig9(0.0), "0");
    }

    proptest::proptest! {
        #[test]
        fn parses_back_within_nine_digits(m in 1.0f64..10.0, e in -12i32..20, neg: bool) {
            let x = if neg { -m } else { m } * 10f64.powi(e);
            let s = sig9(x);
            let y: f64 = s.parse().unwrap();
            proptest::prop_assert!(((x - y) / x).abs() < 5.1e-9, "{x} -> {s}");
            let digits = s.split('e').next().unwrap().trim_start_matches(['-', '0', '.']).chars().filter(char::is_ascii_digit).count();
            proptest::prop_assert_eq!(digits, SIGNIFICANT_DIGITS, "{}", s);
        }
    }
}
