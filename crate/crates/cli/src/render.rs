//! Text renderings of counts for the JSON output.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Longest integer printed digit by digit.
pub const MAX_DECIMAL_DIGITS: usize = 4000;
/// Significant digits of a non-terminating fraction.
const FRACTION_DIGITS: usize = 30;

/// The exact value as an integer or `p/q` string.
pub fn exact_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal digits of an exact value: all of them for integers below the digit budget,
/// otherwise a truncated expansion.
pub fn exact_decimal(r: &BigRational) -> Option<String> {
    if r.is_integer() {
        let s = r.to_integer().to_string();
        return (s.len() <= MAX_DECIMAL_DIGITS).then_some(s);
    }
    let (num, den) = (r.numer().abs(), r.denom().clone());
    let (int, rem) = num.div_rem(&den);
    let int_s = int.to_string();
    if int_s.len() > MAX_DECIMAL_DIGITS {
        return None;
    }
    // enough fractional digits to show FRACTION_DIGITS significant ones
    let lead_zeros = if int.is_zero() { leading_fraction_zeros(&rem, &den) } else { 0 };
    let frac_len = if int.is_zero() {
        lead_zeros + FRACTION_DIGITS
    } else {
        FRACTION_DIGITS.saturating_sub(int_s.len()).max(1)
    };
    let scaled = rem * BigInt::from(10).pow(frac_len as u32) / &den;
    let frac = format!("{:0>width$}", scaled.to_string(), width = frac_len);
    let frac = frac.trim_end_matches('0');
    let sign = if r.is_negative() { "-" } else { "" };
    Some(if frac.is_empty() {
        format!("{sign}{int_s}")
    } else {
        format!("{sign}{int_s}.{frac}")
    })
}

fn leading_fraction_zeros(rem: &BigInt, den: &BigInt) -> usize {
    let mut zeros = 0;
    let mut r = rem.clone();
    while !r.is_zero() && zeros < 10_000 {
        r *= 10;
        if &r >= den {
            break;
        }
        zeros += 1;
    }
    zeros
}

/// Scientific rendering of `e^{log_value}`, valid far beyond the `f64` range.
pub fn scientific_from_ln(log_value: f64) -> Option<String> {
    if !log_value.is_finite() {
        return None;
    }
    let log10 = log_value / std::f64::consts::LN_10;
    let mut exp = log10.floor();
    let mut mantissa = 10f64.powf(log10 - exp);
    if mantissa >= 9.999_999_999_5 {
        mantissa /= 10.0;
        exp += 1.0;
    }
    Some(format!("{mantissa:.10}e{exp}"))
}
