//! Canonical JSON output: keys keep their insertion order, floats are
//! printed with a fixed 17-significant-digit scientific format, and the
//! writer is deterministic byte for byte.  Reports produced from the same
//! inputs therefore diff cleanly.

use weighted_cuntz::cmat::CMatrix;

/// JSON value with deterministic serialization.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj() -> Self {
        Json::Obj(Vec::new())
    }

    /// Appends a key; meaningful only on the object variant.
    pub fn push(&mut self, key: &str, value: Json) {
        if let Json::Obj(entries) = self {
            entries.push((key.to_string(), value));
        }
    }

    pub fn from_usize(v: usize) -> Json {
        Json::Int(v as i64)
    }

    pub fn usize_list(vs: &[usize]) -> Json {
        Json::Arr(vs.iter().map(|&v| Json::from_usize(v)).collect())
    }

    pub fn float_list(vs: &[f64]) -> Json {
        Json::Arr(vs.iter().map(|&v| Json::Float(v)).collect())
    }

    /// Matrix as nested rows of `[re, im]` pairs.
    pub fn matrix(m: &CMatrix) -> Json {
        let rows = (0..m.nrows())
            .map(|i| {
                Json::Arr(
                    (0..m.ncols())
                        .map(|j| {
                            let z = m[(i, j)];
                            Json::Arr(vec![Json::Float(z.re), Json::Float(z.im)])
                        })
                        .collect(),
                )
            })
            .collect();
        Json::Arr(rows)
    }

    pub fn matrix_list(ms: &[CMatrix]) -> Json {
        Json::Arr(ms.iter().map(Json::matrix).collect())
    }

    /// Serializes with a trailing newline.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(v) => out.push_str(&v.to_string()),
            Json::Float(v) => out.push_str(&format_float(*v)),
            Json::Str(s) => write_string(s, out),
            Json::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            Json::Obj(entries) => {
                out.push('{');
                for (i, (key, value)) in entries.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_string(key, out);
                    out.push(':');
                    value.write(out);
                }
                out.push('}');
            }
        }
    }
}

/// Fixed-width scientific notation with 17 significant digits.  Non-finite
/// values have no JSON representation and are reported as null.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

fn write_string(s: &str, out: &mut String) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
}
