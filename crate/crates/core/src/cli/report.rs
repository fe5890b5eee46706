//! Deterministic JSON reports: sorted keys, floats with 17 significant
//! digits, NaN and infinities as `null`.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Pretty-printing formatter that writes every float as `{:.16e}`.
struct FixedFloats {
    indent: usize,
    first: bool,
}

impl FixedFloats {
    fn newline<W: ?Sized + Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.indent {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.first = true;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if !self.first {
            self.newline(w)?;
        }
        self.first = false;
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.first = false;
        Ok(())
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent += 1;
        self.first = true;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.indent -= 1;
        if !self.first {
            self.newline(w)?;
        }
        self.first = false;
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.first = false;
        Ok(())
    }
}

/// Serializes through [`Value`] (whose maps are sorted) with fixed float
/// formatting and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let value: Value = serde_json::to_value(value).expect("report values serialize");
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats { indent: 0, first: true });
    value.serialize(&mut ser).expect("writing to a Vec cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// Single-line variant, used inside CSV comments and tests.
pub fn to_compact_json<T: Serialize>(value: &T) -> String {
    let value: Value = serde_json::to_value(value).expect("report values serialize");
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CompactFormatter);
    value.serialize(&mut ser).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("JSON is UTF-8")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

/// A float in the report's fixed format, for CSV cells.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "NaN".to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_floats_fixed() {
        let s = to_json(&json!({"b": 0.1, "a": [1, 2.5], "c": {}}));
        assert_eq!(s, "{\n  \"a\": [\n    1,\n    2.5000000000000000e0\n  ],\n  \"b\": 1.0000000000000001e-1,\n  \"c\": {}\n}\n");
    }

    #[test]
    fn nan_is_null() {
        assert_eq!(to_compact_json(&json!({"x": f64::NAN})), "{\"x\":null}");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn digest() {
        assert_eq!(
            sha256_hex(b""),
            "sha256:e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
