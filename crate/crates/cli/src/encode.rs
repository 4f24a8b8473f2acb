//! Deterministic JSON encoding.
//!
//! Objects are indented two spaces per level, arrays stay on one line, and
//! every float is printed as `{:.16e}` (17 significant digits), which
//! round-trips exactly.

use std::io::{self, Write};

use gateaux_core::{Complex64, ComplexMatrix, ToleranceConfig};
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Value};

#[derive(Default)]
struct StableFormatter {
    indent: usize,
    array_depth: usize,
    has_value: bool,
}

impl StableFormatter {
    fn newline<W: ?Sized + Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.indent {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for StableFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.array_depth += 1;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.array_depth -= 1;
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        Ok(())
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        if self.array_depth == 0 {
            self.indent += 1;
            self.has_value = false;
        }
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        if self.array_depth == 0 {
            self.indent -= 1;
            if self.has_value {
                self.newline(w)?;
            }
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if self.array_depth == 0 {
            if !first {
                w.write_all(b",")?;
            }
            self.newline(w)
        } else if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

/// Serializes with [`StableFormatter`] and a trailing newline.
pub fn to_stable_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, StableFormatter::default());
    value.serialize(&mut ser).expect("writing to a Vec cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// A float as JSON; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn complex(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

pub fn vector(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

pub fn matrix(m: &ComplexMatrix) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "data": vector(m.data()),
    })
}

pub fn tolerances(t: &ToleranceConfig) -> Value {
    json!({
        "eig_offdiag": num(t.eig_offdiag),
        "cluster_rel": num(t.cluster_rel),
        "feas_eps": num(t.feas_eps),
        "fw_gap_eps": num(t.fw_gap_eps),
        "psd_tol": num(t.psd_tol),
        "fd_steps": nums(&t.fd_steps),
        "grid_phi": t.grid_phi,
        "max_iter": t.max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let v = json!({"x": num(0.1), "y": [num(1.0), num(-2.5e-300)], "n": 3});
        let s = to_stable_string(&v);
        assert_eq!(
            s,
            "{\n  \"x\": 1.0000000000000001e-1,\n  \"y\": [1.0000000000000000e0, -2.5000000000000000e-300],\n  \"n\": 3\n}\n"
        );
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn nested_objects_and_empty_containers() {
        let v = json!({"a": {"b": {}}, "c": [], "d": [{"e": 1}]});
        assert_eq!(
            to_stable_string(&v),
            "{\n  \"a\": {\n    \"b\": {}\n  },\n  \"c\": [],\n  \"d\": [{\"e\": 1}]\n}\n"
        );
    }
}
