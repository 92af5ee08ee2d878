//! Fixed-precision decimal rendering shared by every text output.

/// Significant digits used for all emitted real numbers.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Render `x` with 12 significant digits, trailing zeros trimmed.
///
/// Magnitudes outside `[1e-6, 1e15)` switch to exponent notation so the
/// digit count stays fixed.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs();
    if !(1e-6..1e15).contains(&magnitude) {
        return format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    }
    // round first so that e.g. 9.99999999999951 does not end up with 13 digits
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap();
    let exponent = rounded.abs().log10().floor() as i32;
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exponent).max(0) as usize;
    let mut s = format!("{:.*}", decimals, rounded);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Like [`fmt_real`], with `NA` for missing values.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_else(|| "NA".to_string())
}
