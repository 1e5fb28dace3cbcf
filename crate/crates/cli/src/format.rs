//! Number formatting for reproducible output.

use serde_json::Value;

/// Significant digits for JSON numbers.
pub const JSON_DIGITS: usize = 12;
/// Significant digits for CSV numbers.
pub const CSV_DIGITS: usize = 9;

/// Rounds to `digits` significant digits; the result prints in its shortest
/// round-trip form.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().expect("formatted float parses");
    if rounded == 0.0 { 0.0 } else { rounded }
}

/// Rounds every floating-point number in `value` to [`JSON_DIGITS`].
pub fn round_json(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"), JSON_DIGITS);
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

/// CSV field with [`CSV_DIGITS`] significant digits; magnitudes below 1e-4
/// use exponent notation.
pub fn csv_number(x: f64) -> String {
    let r = round_sig(x, CSV_DIGITS);
    if r != 0.0 && r.abs() < 1e-4 {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(round_sig(0.1234567890123456, 9), 0.123456789);
        assert_eq!(round_sig(1234.56789012345, 12), 1234.56789012);
        assert_eq!(round_sig(-2.0e-14, 12), -2.0e-14);
        assert_eq!(round_sig(0.0, 12), 0.0);
        assert_eq!(csv_number(0.99999999999), "1");
        assert_eq!(csv_number(5.551115123125783e-17), "5.55111512e-17");
        assert_eq!(csv_number(0.25), "0.25");
    }

    #[test]
    fn json_rounding_keeps_integers() {
        let v = serde_json::json!({"a": 1, "b": [0.1234567890123456, 3], "c": {"d": 2.5}});
        let r = round_json(v);
        assert_eq!(r["a"], 1);
        assert_eq!(r["b"][0].as_f64().unwrap(), 0.123456789012);
        assert_eq!(r["b"][1], 3);
        assert_eq!(r["c"]["d"].as_f64().unwrap(), 2.5);
    }
}
