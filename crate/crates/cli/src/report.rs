//! Number formatting shared by the JSON and CSV writers.

use std::str::FromStr;

use serde_json::{Number, Value};

/// 17 significant digits, which round-trips every double.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A JSON number at 17 significant digits; `null` when not finite.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt17(x)).expect("valid JSON number"))
    } else {
        Value::Null
    }
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// Pretty JSON with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}
