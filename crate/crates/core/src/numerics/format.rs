use rug::Float;

use crate::error::{Error, Result};

/// Significant digits used for every printed or serialized value.
pub const PRINT_DIGITS: usize = 40;

/// Scientific notation with exactly `digits` significant digits,
/// e.g. `-1.250000000000000000000000000000000000000e-3`. Zero renders as `0`.
pub fn format_sig(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let (neg, mantissa, exp) = x.to_sign_string_exp(10, Some(digits));
    // mantissa is "ddddd" with value 0.ddddd × 10^exp
    let exp = exp.expect("finite nonzero value has an exponent") - 1;
    let (head, tail) = mantissa.split_at(1);
    let mut s = String::with_capacity(digits + 8);
    if neg {
        s.push('-');
    }
    s.push_str(head);
    if !tail.is_empty() {
        s.push('.');
        s.push_str(tail);
    }
    s.push('e');
    s.push_str(&exp.to_string());
    s
}

/// [`format_sig`] at [`PRINT_DIGITS`].
pub fn format40(x: &Float) -> String {
    format_sig(x, PRINT_DIGITS)
}

/// Parse a plain decimal literal (no expressions) at `prec`.
pub fn parse_decimal(s: &str, prec: u32) -> Result<Float> {
    let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
    Ok(Float::with_val(prec, parsed))
}
