//! Lengths and angles written with explicit units.
//!
//! Parsing folds the unit into the decimal exponent before converting, so
//! `"670nm"` yields exactly the double nearest 670×10⁻⁹, the same value as the
//! literal `670e-9`. Formatting writes the shortest round-trip decimal and
//! shifts its exponent into a unit, so format-then-parse is the identity.

use crate::error::{Error, Result};

const LENGTH_UNITS: &[(&str, i32)] = &[
    ("nm", -9),
    ("um", -6),
    ("µm", -6),
    ("mm", -3),
    ("cm", -2),
    ("m", 0),
];

const ANGLE_UNITS: &[&str] = &["mrad", "rad", "deg"];

fn split_unit<'a>(text: &'a str, units: &[&'static str]) -> Result<(&'a str, &'static str)> {
    let t = text.trim();
    // Longest suffix first so "mrad" is not read as "rad".
    let mut sorted: Vec<&'static str> = units.to_vec();
    sorted.sort_by_key(|u| std::cmp::Reverse(u.len()));
    for unit in sorted {
        if let Some(num) = t.strip_suffix(unit) {
            if !num.trim().is_empty() {
                return Ok((num.trim(), unit));
            }
        }
    }
    Err(Error::Parse(format!(
        "{text:?} lacks a unit (expected one of {})",
        units.join(", ")
    )))
}

/// Parses a decimal number scaled by `10^shift`.
fn parse_scaled(num: &str, shift: i32, original: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("{original:?} is not a number with a unit"));
    if num.is_empty() || !num.chars().all(|c| c.is_ascii_digit() || "+-.eE".contains(c)) {
        return Err(bad());
    }
    let (mantissa, exponent) = match num.find(['e', 'E']) {
        Some(i) => (&num[..i], num[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (num, 0),
    };
    let value: f64 = format!("{mantissa}e{}", exponent + shift).parse().map_err(|_| bad())?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Length in meters from text such as `"670nm"` or `"0.05 mm"`.
pub fn parse_length(text: &str) -> Result<f64> {
    let names: Vec<&'static str> = LENGTH_UNITS.iter().map(|u| u.0).collect();
    let (num, unit) = split_unit(text, &names)?;
    let shift = LENGTH_UNITS.iter().find(|u| u.0 == unit).map(|u| u.1).unwrap_or(0);
    parse_scaled(num, shift, text)
}

/// Angle in radians from text such as `"1deg"`, `"0.5 mrad"` or `"-1.2rad"`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let (num, unit) = split_unit(text, ANGLE_UNITS)?;
    match unit {
        "deg" => Ok(parse_scaled(num, 0, text)?.to_radians()),
        "mrad" => parse_scaled(num, -3, text),
        _ => parse_scaled(num, 0, text),
    }
}

/// Shortest round-trip digits of `value` and its decimal exponent, e.g.
/// 6.7e-7 → ("67", -7) meaning 6.7 × 10⁻⁷.
fn decimal_parts(value: f64) -> (bool, String, i32) {
    let s = format!("{:e}", value.abs());
    let (mantissa, exp) = s.split_once('e').expect("exponential format");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    (value.is_sign_negative(), digits, exp.parse().expect("integer exponent"))
}

/// Writes `digits` (d.ddd × 10^exp) as a plain decimal scaled by 10^-shift.
fn plain_decimal(negative: bool, digits: &str, exp: i32, shift: i32) -> String {
    let point = exp - shift + 1; // digits before the decimal point
    let mut s = String::new();
    if negative {
        s.push('-');
    }
    if point <= 0 {
        s.push_str("0.");
        s.extend(std::iter::repeat_n('0', (-point) as usize));
        s.push_str(digits);
    } else if point as usize >= digits.len() {
        s.push_str(digits);
        s.extend(std::iter::repeat_n('0', point as usize - digits.len()));
    } else {
        s.push_str(&digits[..point as usize]);
        s.push('.');
        s.push_str(&digits[point as usize..]);
    }
    s
}

/// Text for a length that [`parse_length`] maps back to exactly `meters`.
pub fn format_length(meters: f64) -> String {
    if meters == 0.0 {
        return if meters.is_sign_negative() { "-0m" } else { "0m" }.into();
    }
    let (negative, digits, exp) = decimal_parts(meters);
    let unit = [("m", 0), ("mm", -3), ("um", -6), ("nm", -9)]
        .into_iter()
        .find(|&(_, shift)| exp >= shift)
        .unwrap_or(("nm", -9));
    format!("{}{}", plain_decimal(negative, &digits, exp, unit.1), unit.0)
}

/// Text for an angle that [`parse_angle`] maps back to exactly `radians`.
pub fn format_angle(radians: f64) -> String {
    if radians == 0.0 {
        return if radians.is_sign_negative() { "-0rad" } else { "0rad" }.into();
    }
    let (negative, digits, exp) = decimal_parts(radians);
    format!("{}rad", plain_decimal(negative, &digits, exp, 0))
}
