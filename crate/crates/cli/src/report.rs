//! Hand-rolled JSON with insertion-ordered keys and a fixed floating-point
//! rendering (17 significant digits), so identical runs produce identical
//! bytes and reports diff cleanly.

use std::fmt::Write as _;

#[derive(Clone, Debug)]
pub enum Json {
    Null,
    Bool(bool),
    UInt(u64),
    /// Finite floats only; the caller routes non-finite values to the
    /// domain-error path before building a report.
    Float(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn str(s: impl Into<String>) -> Json {
        Json::Str(s.into())
    }

    pub fn obj(pairs: Vec<(&str, Json)>) -> Json {
        Json::Obj(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn floats(values: impl IntoIterator<Item = f64>) -> Json {
        Json::Arr(values.into_iter().map(Json::Float).collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::UInt(n) => {
                let _ = write!(out, "{n}");
            }
            Json::Float(v) => {
                debug_assert!(v.is_finite(), "reports carry finite numbers only");
                let _ = write!(out, "{v:.16e}");
            }
            Json::Str(s) => write_escaped(out, s),
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    item.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push(']');
            }
            Json::Obj(pairs) => {
                if pairs.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (key, value)) in pairs.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    write_escaped(out, key);
                    out.push_str(": ");
                    value.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn push_indent(out: &mut String, levels: usize) {
    for _ in 0..levels {
        out.push_str("  ");
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// The top-level report: fixed key order `command`, `config`, `result`,
/// `verdict`, `tool_version`, `wall_time_ms`.
pub fn report(
    command: &str,
    config: Json,
    result: Json,
    verdict: &str,
    wall_time_ms: u64,
) -> Json {
    Json::obj(vec![
        ("command", Json::str(command)),
        ("config", config),
        ("result", result),
        ("verdict", Json::str(verdict)),
        ("tool_version", Json::str(env!("CARGO_PKG_VERSION"))),
        ("wall_time_ms", Json::UInt(wall_time_ms)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_stable_shape() {
        let j = Json::obj(vec![
            ("name", Json::str("grid")),
            ("counts", Json::Arr(vec![Json::UInt(5), Json::UInt(5), Json::UInt(5)])),
            ("tol", Json::Float(1e-8)),
            ("empty", Json::obj(vec![])),
        ]);
        let text = j.render();
        assert_eq!(
            text,
            "{\n  \"name\": \"grid\",\n  \"counts\": [\n    5,\n    5,\n    5\n  ],\n  \"tol\": 1.0000000000000000e-8,\n  \"empty\": {}\n}\n"
        );
    }

    #[test]
    fn floats_round_trip_17_digits() {
        for v in [0.1f64, -3.5e-7, 123456.789, 1.0 / 3.0] {
            let rendered = format!("{v:.16e}");
            let back: f64 = rendered.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{rendered}");
        }
    }

    #[test]
    fn strings_are_escaped() {
        let mut s = String::new();
        write_escaped(&mut s, "a\"b\\c\nd");
        assert_eq!(s, "\"a\\\"b\\\\c\\nd\"");
    }
}
