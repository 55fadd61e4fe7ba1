//! Display rounding: four significant digits, ties to even.
//!
//! Rounding operates on the shortest decimal representation of the `f64`
//! (the digits `{}` would print), so a value that prints as `0.12345` rounds
//! to `0.1234` rather than depending on its binary expansion.

/// Rounds `value` to `digits` significant digits, returning the digit string
/// and the decimal exponent of the first digit.
fn round_significant(value: f64, digits: usize) -> (Vec<u8>, i32) {
    let sci = format!("{:e}", value.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let mut exp: i32 = exp.parse().expect("exponent");
    let mut ds: Vec<u8> = mantissa
        .bytes()
        .filter(u8::is_ascii_digit)
        .map(|b| b - b'0')
        .collect();

    if ds.len() > digits {
        let rest = &ds[digits..];
        let first = rest[0];
        let tail_nonzero = rest[1..].iter().any(|&d| d != 0);
        let round_up = first > 5 || (first == 5 && (tail_nonzero || ds[digits - 1] % 2 == 1));
        ds.truncate(digits);
        if round_up {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.truncate(digits);
                    exp += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
    }
    ds.resize(digits, 0);
    (ds, exp)
}

/// Formats with four significant digits. Magnitudes in `[1e-3, 1e4)` use
/// positional notation, everything else `d.ddde±x`. Zero prints as `0.000`.
pub fn sig4(value: f64) -> String {
    if value == 0.0 {
        return "0.000".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sign = if value < 0.0 { "-" } else { "" };
    let (ds, exp) = round_significant(value, 4);
    let digits: String = ds.iter().map(|d| char::from(b'0' + d)).collect();
    let body = if (-3..=3).contains(&exp) {
        if exp >= 0 {
            let split = (exp + 1) as usize;
            let (int, frac) = digits.split_at(split);
            if frac.is_empty() {
                int.to_string()
            } else {
                format!("{int}.{frac}")
            }
        } else {
            format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
        }
    } else {
        format!("{}.{}e{exp}", &digits[..1], &digits[1..])
    };
    format!("{sign}{body}")
}
