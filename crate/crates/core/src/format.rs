//! Text formats: 17-significant-digit decimals, a small JSON emitter that
//! uses them, the trajectory CSV, and parsers for class and triangle files.

use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::iteration::{Trajectory, RATIO_FLOOR};
use crate::minkowski::{HPoint, MVec};
use crate::triangle::{CongruenceClass, Triangle};

/// Decimal with up to 17 significant digits (enough to round-trip any f64).
/// Trailing zeros are dropped; exponents outside `[-5, 16]` use `e` notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    if !(-5..=16).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        };
    }
    let point = exp + 1;
    let mut out = String::from(sign);
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-point) as usize));
        out.push_str(digits);
    } else if point as usize >= digits.len() {
        out.push_str(digits);
        out.extend(std::iter::repeat_n('0', point as usize - digits.len()));
    } else {
        let (a, b) = digits.split_at(point as usize);
        out.push_str(a);
        out.push('.');
        out.push_str(b);
    }
    out
}

/// Minimal JSON tree, emitted with [`fmt_f64`] for numbers.
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj<K: Into<String>>(fields: impl IntoIterator<Item = (K, Json)>) -> Json {
        Json::Obj(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn nums(xs: &[f64]) -> Json {
        Json::Arr(xs.iter().map(|&x| Json::Num(x)).collect())
    }

    pub fn opt_num(x: Option<f64>) -> Json {
        x.map_or(Json::Null, Json::Num)
    }

    pub fn str(s: impl Into<String>) -> Json {
        Json::Str(s.into())
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(x) if x.is_finite() => out.push_str(&fmt_f64(*x)),
            Json::Num(_) => out.push_str("null"),
            Json::Str(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
            Json::Arr(items) => {
                let flat = items
                    .iter()
                    .all(|j| matches!(j, Json::Num(_) | Json::Int(_) | Json::Null | Json::Bool(_)));
                if flat {
                    out.push('[');
                    for (i, item) in items.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        item.write(out, indent);
                    }
                    out.push(']');
                } else {
                    out.push('[');
                    for (i, item) in items.iter().enumerate() {
                        out.push_str(if i > 0 { ",\n" } else { "\n" });
                        pad(out, indent + 1);
                        item.write(out, indent + 1);
                    }
                    if !items.is_empty() {
                        out.push('\n');
                        pad(out, indent);
                    }
                    out.push(']');
                }
            }
            Json::Obj(fields) => {
                out.push('{');
                for (i, (k, v)) in fields.iter().enumerate() {
                    out.push_str(if i > 0 { ",\n" } else { "\n" });
                    pad(out, indent + 1);
                    out.push_str(&serde_json::to_string(k).expect("key serializes"));
                    out.push_str(": ");
                    v.write(out, indent + 1);
                }
                if !fields.is_empty() {
                    out.push('\n');
                    pad(out, indent);
                }
                out.push('}');
            }
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0);
        s.push('\n');
        s
    }
}

fn pad(out: &mut String, n: usize) {
    out.extend(std::iter::repeat_n(' ', 2 * n));
}

pub fn class_json(c: &CongruenceClass) -> Json {
    Json::obj([("d", Json::nums(&c.d()))])
}

pub fn point_json(p: HPoint) -> Json {
    Json::nums(&p.vec().to_array())
}

pub fn triangle_json(t: &Triangle) -> Json {
    Json::obj([("vertices", Json::Arr(t.vertices().map(point_json).to_vec()))])
}

pub fn error_json(e: &Error) -> Json {
    Json::obj([("error", Json::str(e.code())), ("message", Json::str(e.to_string()))])
}

#[derive(Deserialize)]
struct ClassFile {
    d: [f64; 3],
}

#[derive(Deserialize)]
struct TriangleFile {
    vertices: [[f64; 3]; 3],
}

pub fn parse_class_json(s: &str) -> Result<CongruenceClass> {
    let f: ClassFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    CongruenceClass::new(f.d)
}

pub fn parse_triangle_json(s: &str) -> Result<Triangle> {
    let f: TriangleFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    let mut v = [HPoint::ORIGIN; 3];
    for (p, x) in v.iter_mut().zip(f.vertices) {
        *p = HPoint::new(MVec::from_array(x))?;
    }
    Triangle::new(v)
}

/// `d0,d1,d2` as on the command line.
pub fn parse_class_list(s: &str) -> Result<CongruenceClass> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "expected three comma-separated values, got {s:?}"
        )));
    }
    let mut d = [0.0; 3];
    for (x, p) in d.iter_mut().zip(&parts) {
        *x = p.parse().map_err(|_| Error::Parse(format!("not a number: {p:?}")))?;
    }
    CongruenceClass::new(d)
}

pub const TRAJECTORY_HEADER: &str = "k,d0,d1,d2,alpha,chi,r_d,mu,gap_max,ratio_mu,ratio_gap";

/// Trajectory CSV; ratio columns are empty when the previous value is below 1e-12.
pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    let mut prev: Option<(f64, f64)> = None;
    for r in &t.records {
        let [d0, d1, d2] = r.class.d();
        let ratio = |now: f64, before: Option<f64>| match before {
            Some(b) if b >= RATIO_FLOOR => fmt_f64(now / b),
            _ => String::new(),
        };
        let fields = [
            r.k.to_string(),
            fmt_f64(d0),
            fmt_f64(d1),
            fmt_f64(d2),
            fmt_f64(r.alpha),
            fmt_f64(r.chi),
            fmt_f64(r.r_d),
            fmt_f64(r.mu),
            fmt_f64(r.gap_max),
            ratio(r.mu, prev.map(|p| p.0)),
            ratio(r.gap_max, prev.map(|p| p.1)),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
        prev = Some((r.mu, r.gap_max));
    }
    out
}

pub fn trajectory_json(t: &Trajectory) -> Json {
    let records = t
        .records
        .iter()
        .map(|r| {
            Json::obj([
                ("k", Json::Int(r.k as i64)),
                ("d", Json::nums(&r.class.d())),
                ("alpha", Json::Num(r.alpha)),
                ("chi", Json::Num(r.chi)),
                ("gamma", Json::Num(r.gamma)),
                ("r_d", Json::Num(r.r_d)),
                ("r_i_max", Json::Num(r.r_i_max)),
                ("mu", Json::Num(r.mu)),
                ("gap_max", Json::Num(r.gap_max)),
            ])
        })
        .collect();
    Json::obj([
        ("epsilon", Json::str(t.epsilon.to_string())),
        ("termination", Json::str(format!("{:?}", t.termination))),
        ("records", Json::Arr(records)),
    ])
}
