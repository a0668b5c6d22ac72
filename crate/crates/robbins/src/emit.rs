//! Deterministic serialization for the CLI: a JSON envelope with sorted
//! keys and fixed float formatting (12 significant digits, '.' decimal
//! separator, locale-independent), and RFC-4180-style CSV with LF line
//! endings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Formats a float with 12 significant digits. Positional notation for
/// moderate exponents, `<mantissa>e<exp>` otherwise; trailing zeros in
/// the fraction are dropped so the rendering is canonical.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "Inf" } else { "-Inf" }.to_string();
    }
    let sci = format!("{:.*e}", 11, x); // d.ddddddddddde<exp>
    let (mantissa, exp) = sci.split_once('e').expect("always has exponent");
    let exp: i32 = exp.parse().expect("valid exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);
    let sign = if neg { "-" } else { "" };

    if (-4..=15).contains(&exp) {
        // Positional: place the decimal point after exp + 1 digits.
        let point = exp + 1;
        let mut out = String::new();
        if point <= 0 {
            out.push_str("0.");
            for _ in 0..-point {
                out.push('0');
            }
            out.push_str(&digits);
        } else if (point as usize) >= digits.len() {
            out.push_str(&digits);
            for _ in 0..(point as usize - digits.len()) {
                out.push('0');
            }
        } else {
            out.push_str(&digits[..point as usize]);
            out.push('.');
            out.push_str(&digits[point as usize..]);
        }
        if out.contains('.') {
            let trimmed = out.trim_end_matches('0').trim_end_matches('.');
            out = trimmed.to_string();
        }
        format!("{sign}{out}")
    } else {
        let head = &digits[..1];
        let tail = digits[1..].trim_end_matches('0');
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }
}

/// A JSON value whose rendering is deterministic: object keys are sorted
/// and floats go through [`fmt_f64`].
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    UInt(u64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(BTreeMap<String, Json>),
}

impl Json {
    pub fn obj(entries: impl IntoIterator<Item = (&'static str, Json)>) -> Json {
        Json::Obj(
            entries
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        )
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out
    }

    fn write(&self, out: &mut String) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::UInt(u) => {
                let _ = write!(out, "{u}");
            }
            Json::Num(x) => out.push_str(&fmt_f64(*x)),
            Json::Str(s) => write_json_string(out, s),
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
            Json::Obj(map) => {
                out.push('{');
                for (i, (k, v)) in map.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_json_string(out, k);
                    out.push(':');
                    v.write(out);
                }
                out.push('}');
            }
        }
    }
}

impl From<&str> for Json {
    fn from(s: &str) -> Self {
        Json::Str(s.to_string())
    }
}

impl From<f64> for Json {
    fn from(x: f64) -> Self {
        Json::Num(x)
    }
}

impl From<u64> for Json {
    fn from(x: u64) -> Self {
        Json::UInt(x)
    }
}

fn write_json_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// The envelope every CLI command emits in JSON mode.
#[derive(Debug, Clone)]
pub struct Envelope {
    pub command: String,
    pub params: BTreeMap<String, Json>,
    pub results: Json,
}

impl Envelope {
    pub fn new(command: &str) -> Self {
        Envelope {
            command: command.to_string(),
            params: BTreeMap::new(),
            results: Json::Null,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Json>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn results(mut self, results: Json) -> Self {
        self.results = results;
        self
    }

    pub fn render(&self) -> String {
        let mut top = BTreeMap::new();
        top.insert(
            "artifact-version".to_string(),
            Json::Str(crate::ARTIFACT_VERSION.to_string()),
        );
        top.insert("command".to_string(), Json::Str(self.command.clone()));
        top.insert("params".to_string(), Json::Obj(self.params.clone()));
        top.insert("results".to_string(), self.results.clone());
        let mut s = Json::Obj(top).render();
        s.push('\n');
        s
    }
}

/// Renders a CSV table with a header row, LF endings, floats via
/// [`fmt_f64`]. Fields here never contain commas or quotes, so no
/// escaping is required; debug builds assert that.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert!(row
            .iter()
            .all(|f| !f.contains(',') && !f.contains('"') && !f.contains('\n')));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_canonical() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(1.25), "1.25");
        assert_eq!(fmt_f64(-1.25), "-1.25");
        assert_eq!(fmt_f64(0.5), "0.5");
        assert_eq!(fmt_f64(1e16), "1e16");
        assert_eq!(fmt_f64(1.5e-7), "1.5e-7");
        assert_eq!(fmt_f64(1.5e-4), "0.00015");
        assert_eq!(fmt_f64(3.0e-5), "3e-5");
        assert_eq!(fmt_f64(1.23e-9), "1.23e-9");
        assert_eq!(fmt_f64(123456789.0), "123456789");
        // 12 significant digits, then truncation of trailing zeros.
        assert_eq!(fmt_f64(1.0 / 3.0), "0.333333333333");
    }

    #[test]
    fn formatting_is_stable_under_reparse() {
        let stream = crate::rng::RandomStream::new(5, 0);
        for i in 0..10_000u64 {
            let x = (stream.uniform(i) - 0.5) * 10f64.powi((i % 30) as i32 - 15);
            let s = fmt_f64(x);
            let reparsed: f64 = s.parse().unwrap();
            assert_eq!(fmt_f64(reparsed), s, "x = {x:e}");
        }
    }

    #[test]
    fn envelope_keys_are_sorted_and_roundtrip() {
        let env = Envelope::new("simulate")
            .param("seed", 42u64)
            .param("trials", 1000u64)
            .results(Json::obj([("mean", Json::Num(1.25))]));
        let rendered = env.render();
        let a = rendered.find("\"artifact-version\"").unwrap();
        let c = rendered.find("\"command\"").unwrap();
        let p = rendered.find("\"params\"").unwrap();
        let r = rendered.find("\"results\"").unwrap();
        assert!(a < c && c < p && p < r);
        // Parse with an independent JSON implementation and re-render.
        let value: serde_json::Value = serde_json::from_str(&rendered).unwrap();
        assert_eq!(value["command"], "simulate");
        assert_eq!(value["results"]["mean"], 1.25);
    }

    #[test]
    fn csv_has_header_and_lf_endings() {
        let s = csv(
            &["n", "v"],
            &[vec!["1".into(), fmt_f64(1.0)], vec!["2".into(), fmt_f64(1.25)]],
        );
        assert_eq!(s, "n,v\n1,1\n2,1.25\n");
    }
}
