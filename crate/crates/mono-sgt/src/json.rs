//! Deterministic JSON and number rendering.
//!
//! Objects come out with sorted keys (serde_json's default map is a
//! `BTreeMap`), floats with up to 17 significant digits, and non-finite
//! floats as `null`.

use serde::Serialize;
use serde_json::Value;

/// Shortest decimal with at most 17 significant digits that the float was
/// printed from; trailing zeros are dropped and `-0` prints as `0`.
pub fn fmt_f64(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let neg = mant.starts_with('-');
    let mut digits: String = mant.chars().filter(char::is_ascii_digit).collect();
    while digits.len() > 1 && digits.ends_with('0') {
        digits.pop();
    }
    let mut out = String::with_capacity(24);
    if neg {
        out.push('-');
    }
    if (-5..17).contains(&exp) {
        if exp >= 0 {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                out.push_str(&digits);
                out.extend(std::iter::repeat_n('0', int_len - digits.len()));
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        } else {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
            out.push_str(&digits);
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push_str(&exp.to_string());
    }
    out
}

/// Pretty-printed JSON of `value` with a trailing newline.
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

/// Like [`to_string`] but with `"artifact": kind` added to a top-level
/// object so that `plot` can recognise the file.
pub fn artifact<T: Serialize + ?Sized>(kind: &str, value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    if let Value::Object(m) = &mut v {
        m.insert("artifact".into(), Value::String(kind.into()));
    }
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_number(n: &serde_json::Number, out: &mut String) {
    if n.is_f64() {
        let f = n.as_f64().expect("f64 number");
        if f.is_finite() {
            out.push_str(&fmt_f64(f));
        } else {
            out.push_str("null");
        }
    } else {
        out.push_str(&n.to_string());
    }
}

fn write_value(v: &Value, level: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(n, out),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) if a.iter().all(|x| matches!(x, Value::Number(_) | Value::Null | Value::Bool(_))) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(x, level, out);
            }
            out.push(']');
        }
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                indent(level + 1, out);
                write_value(x, level + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            indent(level, out);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                indent(level + 1, out);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(x, level + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            indent(level, out);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [2.528922417114728, 0.1, 1.0 / 3.0, 1e-7, 6.02e23, -4.5, 123456.0, 5e-324, f64::MAX] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_f64(4.0), "4");
        assert_eq!(fmt_f64(-0.0), "0");
        assert_eq!(fmt_f64(0.45), "0.45000000000000001");
        assert_eq!(fmt_f64(1e20), "1e20");
        assert_eq!(fmt_f64(0.00012), "0.00012");
        assert_eq!(fmt_f64(0.1), "0.10000000000000001");
    }

    #[test]
    fn json_layout_is_sorted_and_compact_for_numbers() {
        let v = serde_json::json!({"b": [1.5, 2.0, f64::NAN], "a": {"z": "x", "y": []}});
        let s = artifact("demo", &v).unwrap();
        assert_eq!(
            s,
            "{\n  \"a\": {\n    \"y\": [],\n    \"z\": \"x\"\n  },\n  \"artifact\": \"demo\",\n  \"b\": [1.5, 2, null]\n}\n"
        );
    }
}
