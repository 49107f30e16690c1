//! Report assembly and serialization.
//!
//! Floats are written in scientific notation with 17 significant digits so
//! that every value round-trips exactly and carries at least ten digits.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

struct PreciseFormatter {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! forward {
    ($($name:ident),*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
                self.inner.$name(w)
            }
        )*
    };
}

macro_rules! forward_first {
    ($($name:ident),*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
                self.inner.$name(w, first)
            }
        )*
    };
}

impl Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    forward!(begin_array, end_array, end_array_value, begin_object, end_object, begin_object_value, end_object_value);
    forward_first!(begin_array_value, begin_object_key);
}

/// Serializes `value` as pretty JSON with full-precision floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let fmt = PreciseFormatter { inner: serde_json::ser::PrettyFormatter::with_indent(b"  ") };
    let mut ser = Serializer::with_formatter(&mut buf, fmt);
    value.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

/// Everything that must be reproducible from (files, flags, seed).
#[derive(Clone, Debug, Serialize)]
pub struct Deterministic {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub config: Map<String, Value>,
    pub results: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub wall_clock_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub deterministic: Deterministic,
    pub timings: Timings,
}

impl Report {
    pub fn render(&self) -> String {
        to_json(self)
    }

    /// The reproducible part alone, as rendered text.
    pub fn render_deterministic(&self) -> String {
        to_json(&self.deterministic)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_carry_seventeen_digits_and_round_trip() {
        let x = 0.1f64 + 0.2;
        let text = to_json(&json!({ "x": x, "half": 0.5, "n": 3 }));
        assert!(text.contains("5.0000000000000000e-1"), "{text}");
        assert!(text.contains("\"n\": 3"));
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), x);
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
