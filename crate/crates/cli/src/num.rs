//! Fixed-precision number formatting for reports.
//!
//! Every float is rounded to 12 significant digits (ties to even) before it
//! is printed, so reports are byte-identical across platforms and runs.

use fredholm_core::poly::C64;
use serde_json::Value;

pub const DIGITS: usize = 12;

/// Rounds to 12 significant digits; `-0` becomes `0`.
pub fn round(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let s = format!("{:.*e}", DIGITS - 1, x);
    let y: f64 = s.parse().expect("formatted float parses");
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

/// Human-readable form: plain decimals in `[1e-4, 1e12)`, exponent form otherwise.
pub fn text(x: f64) -> String {
    let y = round(x);
    if !y.is_finite() {
        return if y.is_nan() { "nan".into() } else if y > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = y.abs();
    if y == 0.0 || (1e-4..1e12).contains(&a) {
        format!("{y}")
    } else {
        format!("{y:e}")
    }
}

pub fn text_c(z: C64) -> String {
    let (re, im) = (round(z.re), round(z.im));
    if im == 0.0 {
        text(re)
    } else if im < 0.0 {
        format!("{}-{}i", text(re), text(-im))
    } else {
        format!("{}+{}i", text(re), text(im))
    }
}

/// JSON number (non-finite values become strings).
pub fn json(x: f64) -> Value {
    let y = round(x);
    match serde_json::Number::from_f64(y) {
        Some(n) => Value::Number(n),
        None => Value::String(text(y)),
    }
}

pub fn json_c(z: C64) -> Value {
    Value::Array(vec![json(z.re), json(z.im)])
}

pub fn json_vec(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| json(x)).collect())
}
