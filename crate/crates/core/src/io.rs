//! JSON coefficient files, grid sample dumps and canonical JSON output.
//!
//! Coefficients: `{"L": int, "blocks": [{"j": int, "l": int|null, "m": [int], "re": [..], "im": [..]}]}`,
//! with a top-level `"s"` for TSH files and an optional `"path": [j1, j2]` on tensor-product
//! outputs. Samples: `{"grid": {...}, "s": int, "components": [{"ms": int, "re": [..], "im": [..]}]}`.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{invalid, Error, Result};
use crate::sht::{BlockKey, IrrepCoeffs, SphereGrid, Tag};
use crate::tsh::{SpinSignal, TshCoeffs};

/// Number formatting for [`to_canonical_string`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FloatFormat {
    /// 17 significant digits, `d.dddddddddddddddde±x`.
    Full,
    /// Fixed notation with this many decimals; `-0` prints as `0`.
    Decimals(usize),
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        pointer: pointer.into(),
        message: message.into(),
    }
}

fn format_float(v: f64, fmt: FloatFormat) -> Result<String> {
    if !v.is_finite() {
        return Err(invalid(format!(
            "non-finite number {v} cannot be written as JSON"
        )));
    }
    Ok(match fmt {
        FloatFormat::Full => format!("{:.16e}", if v == 0.0 { 0.0 } else { v }),
        FloatFormat::Decimals(d) => {
            let s = format!("{v:.d$}");
            if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
                s[1..].to_string()
            } else {
                s
            }
        }
    })
}

fn write_value(out: &mut String, v: &Value, fmt: FloatFormat) -> Result<()> {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().expect("f64 number"), fmt)?);
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s)?),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item, fmt)?;
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}:", serde_json::to_string(k)?);
                write_value(out, &map[k], fmt)?;
            }
            out.push('}');
        }
    }
    Ok(())
}

/// Sorted keys, fixed float formatting, no whitespace, trailing LF.
pub fn to_canonical_string(v: &Value, fmt: FloatFormat) -> Result<String> {
    let mut out = String::new();
    write_value(&mut out, v, fmt)?;
    out.push('\n');
    Ok(out)
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_canonical(path: &Path, v: &Value, fmt: FloatFormat) -> Result<()> {
    std::fs::write(path, to_canonical_string(v, fmt)?)?;
    Ok(())
}

fn float_array(values: impl Iterator<Item = f64>) -> Value {
    Value::Array(values.map(|v| Value::from(v)).collect())
}

fn block_json(j: u32, l: Option<u32>, path: Option<(u32, u32)>, v: &[Complex64]) -> Value {
    let mut m = Map::new();
    m.insert("j".into(), json!(j));
    m.insert("l".into(), l.map_or(Value::Null, |l| json!(l)));
    m.insert(
        "m".into(),
        Value::Array((-(j as i64)..=j as i64).map(|m| json!(m)).collect()),
    );
    m.insert("re".into(), float_array(v.iter().map(|c| c.re)));
    m.insert("im".into(), float_array(v.iter().map(|c| c.im)));
    if let Some((a, b)) = path {
        m.insert("path".into(), json!([a, b]));
    }
    Value::Object(m)
}

pub fn irreps_to_json(x: &IrrepCoeffs) -> Value {
    let blocks: Vec<Value> = x
        .blocks()
        .map(|(k, v)| match k.tag {
            Tag::None => block_json(k.j, None, None, v),
            Tag::Orbital(l) => block_json(k.j, Some(l), None, v),
            Tag::Path(a, b) => block_json(k.j, None, Some((a, b)), v),
        })
        .collect();
    json!({ "L": x.lmax(), "blocks": blocks })
}

pub fn tsh_to_json(x: &TshCoeffs) -> Value {
    let blocks: Vec<Value> = x
        .blocks()
        .map(|((j, l), v)| block_json(j, Some(l), None, v))
        .collect();
    json!({ "s": x.s(), "L": x.lmax(), "blocks": blocks })
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(format!("{at}/{key}"), "missing field"))
}

fn as_object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| schema(at_or_root(at), "expected an object"))
}

fn at_or_root(at: &str) -> String {
    if at.is_empty() {
        "/".to_string()
    } else {
        at.to_string()
    }
}

fn as_u32(v: &Value, at: &str) -> Result<u32> {
    v.as_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or_else(|| schema(at, "expected a non-negative integer"))
}

fn as_floats(v: &Value, at: &str, len: usize) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema(at, "expected an array of numbers"))?;
    if arr.len() != len {
        return Err(schema(
            at,
            format!("expected {len} entries, got {}", arr.len()),
        ));
    }
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_f64()
                .ok_or_else(|| schema(format!("{at}/{i}"), "expected a number"))
        })
        .collect()
}

struct RawBlock {
    j: u32,
    l: Option<u32>,
    path: Option<(u32, u32)>,
    values: Vec<Complex64>,
}

fn parse_blocks(root: &Map<String, Value>) -> Result<Vec<RawBlock>> {
    let arr = get(root, "blocks", "")?
        .as_array()
        .ok_or_else(|| schema("/blocks", "expected an array"))?;
    let mut out = Vec::with_capacity(arr.len());
    for (i, b) in arr.iter().enumerate() {
        let at = format!("/blocks/{i}");
        let obj = as_object(b, &at)?;
        let j = as_u32(get(obj, "j", &at)?, &format!("{at}/j"))?;
        let l = match obj.get("l") {
            None | Some(Value::Null) => None,
            Some(v) => Some(as_u32(v, &format!("{at}/l"))?),
        };
        let n = 2 * j as usize + 1;
        let m = get(obj, "m", &at)?
            .as_array()
            .ok_or_else(|| schema(format!("{at}/m"), "expected an array"))?;
        let expected = (-(j as i64)..=j as i64).collect::<Vec<_>>();
        if m.len() != n || m.iter().zip(&expected).any(|(a, &b)| a.as_i64() != Some(b)) {
            return Err(schema(
                format!("{at}/m"),
                format!("expected the integers {} to {j} in order", -(j as i64)),
            ));
        }
        let re = as_floats(get(obj, "re", &at)?, &format!("{at}/re"), n)?;
        let im = as_floats(get(obj, "im", &at)?, &format!("{at}/im"), n)?;
        let path = match obj.get("path") {
            None | Some(Value::Null) => None,
            Some(v) => {
                let p = v
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| schema(format!("{at}/path"), "expected [j1, j2]"))?;
                Some((
                    as_u32(&p[0], &format!("{at}/path/0"))?,
                    as_u32(&p[1], &format!("{at}/path/1"))?,
                ))
            }
        };
        let values = re
            .into_iter()
            .zip(im)
            .map(|(a, b)| Complex64::new(a, b))
            .collect();
        out.push(RawBlock { j, l, path, values });
    }
    Ok(out)
}

fn wrap_at(e: Error, at: String) -> Error {
    match e {
        Error::InvalidArgument(m) => schema(at, m),
        e => e,
    }
}

pub fn irreps_from_json(v: &Value) -> Result<IrrepCoeffs> {
    let root = as_object(v, "")?;
    if root.contains_key("s") {
        return Err(schema("/s", "scalar coefficient files carry no spin field"));
    }
    let lmax = as_u32(get(root, "L", "")?, "/L")?;
    let mut x = IrrepCoeffs::new(lmax);
    for (i, b) in parse_blocks(root)?.into_iter().enumerate() {
        let tag = match (b.l, b.path) {
            (None, None) => Tag::None,
            (Some(l), None) => Tag::Orbital(l),
            (None, Some((a, c))) => Tag::Path(a, c),
            (Some(_), Some(_)) => {
                return Err(schema(
                    format!("/blocks/{i}"),
                    "a block has either l or path, not both",
                ))
            }
        };
        let key = BlockKey { j: b.j, tag };
        if x.get(&key).is_some() {
            return Err(schema(format!("/blocks/{i}"), "duplicate block"));
        }
        x.insert(key, b.values)
            .map_err(|e| wrap_at(e, format!("/blocks/{i}")))?;
    }
    Ok(x)
}

pub fn tsh_from_json(v: &Value) -> Result<TshCoeffs> {
    let root = as_object(v, "")?;
    let s = as_u32(get(root, "s", "")?, "/s")?;
    let lmax = as_u32(get(root, "L", "")?, "/L")?;
    let mut x = TshCoeffs::new(s, lmax);
    for (i, b) in parse_blocks(root)?.into_iter().enumerate() {
        let at = format!("/blocks/{i}");
        let l =
            b.l.ok_or_else(|| schema(format!("{at}/l"), "TSH blocks need an orbital degree"))?;
        if b.path.is_some() {
            return Err(schema(format!("{at}/path"), "TSH blocks carry no path"));
        }
        if x.get(b.j, l).is_some() {
            return Err(schema(at, "duplicate block"));
        }
        x.insert(b.j, l, b.values).map_err(|e| wrap_at(e, at))?;
    }
    Ok(x)
}

/// A parsed coefficient file: TSH when it has a top-level `"s"`, scalar otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum CoeffFile {
    Scalar(IrrepCoeffs),
    Tsh(TshCoeffs),
}

impl CoeffFile {
    pub fn parse(v: &Value) -> Result<Self> {
        if as_object(v, "")?.contains_key("s") {
            Ok(CoeffFile::Tsh(tsh_from_json(v)?))
        } else {
            Ok(CoeffFile::Scalar(irreps_from_json(v)?))
        }
    }

    pub fn spin(&self) -> u32 {
        match self {
            CoeffFile::Scalar(_) => 0,
            CoeffFile::Tsh(x) => x.s(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CoeffFile::Scalar(x) => irreps_to_json(x),
            CoeffFile::Tsh(x) => tsh_to_json(x),
        }
    }
}

fn grid_header(grid: &SphereGrid) -> Value {
    json!({
        "Lg": grid.lg(),
        "n_theta": grid.n_theta(),
        "n_phi": grid.n_phi(),
        "cos_theta": float_array(grid.cos_theta().iter().copied()),
        "phi": float_array((0..grid.n_phi()).map(|k| grid.phi(k))),
    })
}

/// Sample dump of a spin signal; samples are row-major, theta rows then phi.
pub fn samples_to_json(f: &SpinSignal) -> Value {
    let s = f.s as i32;
    let comps: Vec<Value> = (-s..=s)
        .map(|ms| {
            let c = f.component(ms);
            json!({
                "ms": ms,
                "re": float_array(c.iter().map(|v| v.re)),
                "im": float_array(c.iter().map(|v| v.im)),
            })
        })
        .collect();
    json!({ "grid": grid_header(&f.grid), "s": f.s, "components": comps })
}

/// Inverse of [`samples_to_json`]; the grid is rebuilt from `Lg` and its header checked.
pub fn samples_from_json(v: &Value) -> Result<SpinSignal> {
    let root = as_object(v, "")?;
    let header = as_object(get(root, "grid", "")?, "/grid")?;
    let lg = as_u32(get(header, "Lg", "/grid")?, "/grid/Lg")?;
    let grid = Arc::new(SphereGrid::new(lg));
    for (key, want) in [("n_theta", grid.n_theta()), ("n_phi", grid.n_phi())] {
        let got = as_u32(get(header, key, "/grid")?, &format!("/grid/{key}"))?;
        if got as usize != want {
            return Err(schema(
                format!("/grid/{key}"),
                format!("expected {want} for Lg = {lg}, got {got}"),
            ));
        }
    }
    let s = as_u32(get(root, "s", "")?, "/s")?;
    let arr = get(root, "components", "")?
        .as_array()
        .ok_or_else(|| schema("/components", "expected an array"))?;
    if arr.len() != 2 * s as usize + 1 {
        return Err(schema(
            "/components",
            format!("spin {s} needs {} components, got {}", 2 * s + 1, arr.len()),
        ));
    }
    let n = grid.n_points();
    let mut comps = Vec::with_capacity(arr.len());
    for (i, c) in arr.iter().enumerate() {
        let at = format!("/components/{i}");
        let obj = as_object(c, &at)?;
        let ms = get(obj, "ms", &at)?.as_i64();
        if ms != Some(i as i64 - s as i64) {
            return Err(schema(
                format!("{at}/ms"),
                format!("expected {}", i as i64 - s as i64),
            ));
        }
        let re = as_floats(get(obj, "re", &at)?, &format!("{at}/re"), n)?;
        let im = as_floats(get(obj, "im", &at)?, &format!("{at}/im"), n)?;
        comps.push(
            re.into_iter()
                .zip(im)
                .map(|(a, b)| Complex64::new(a, b))
                .collect(),
        );
    }
    SpinSignal::new(s, grid, comps)
}
