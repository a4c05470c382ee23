//! Binary field files.
//!
//! One header line of `key=value` tokens separated by single spaces,
//!
//! ```text
//! version=1 kind=vector n=2 shape=32,32 rows=2 cols=1 dtype=f64le layout=component-major
//! ```
//!
//! terminated by `\n`, followed by the samples as little-endian `f64` in the
//! component-major layout of [`Field`].

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{Field, FieldKind};
use crate::grid::Grid;

const KEYS: [&str; 8] = ["version", "kind", "n", "shape", "rows", "cols", "dtype", "layout"];

pub fn header(field: &Field) -> String {
    let (rows, cols) = field.dims();
    let shape: Vec<String> = field.grid().shape().iter().map(|m| m.to_string()).collect();
    format!(
        "version=1 kind={} n={} shape={} rows={rows} cols={cols} dtype=f64le layout=component-major\n",
        field.kind().name(),
        field.n(),
        shape.join(",")
    )
}

pub fn to_bytes(field: &Field) -> Vec<u8> {
    let head = header(field);
    let mut out = Vec::with_capacity(head.len() + 8 * field.data().len());
    out.extend_from_slice(head.as_bytes());
    for x in field.data() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn write_field<W: Write>(mut w: W, field: &Field) -> Result<()> {
    w.write_all(&to_bytes(field))?;
    Ok(())
}

pub fn save(path: impl AsRef<Path>, field: &Field) -> Result<()> {
    fs::write(path, to_bytes(field))?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<Field> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

pub fn load(path: impl AsRef<Path>) -> Result<Field> {
    from_bytes(&fs::read(path)?)
}

fn parse_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse { offset, message: message.into() }
}

struct Token<'a> {
    offset: usize,
    value: &'a str,
}

fn parse_usize(t: &Token<'_>, key: &str) -> Result<usize> {
    t.value
        .parse()
        .map_err(|_| parse_err(t.offset, format!("`{key}` must be a non-negative integer, got `{}`", t.value)))
}

pub fn from_bytes(bytes: &[u8]) -> Result<Field> {
    let end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| parse_err(bytes.len(), "header line is not terminated by a newline"))?;
    let line = std::str::from_utf8(&bytes[..end])
        .map_err(|e| parse_err(e.valid_up_to(), "header is not valid UTF-8"))?;

    let mut tokens: Vec<Option<Token<'_>>> = (0..KEYS.len()).map(|_| None).collect();
    let mut offset = 0;
    for raw in line.split(' ') {
        let (key, value) = raw
            .split_once('=')
            .ok_or_else(|| parse_err(offset, format!("expected key=value, got `{raw}`")))?;
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| parse_err(offset, format!("unknown header key `{key}`")))?;
        if tokens[slot].is_some() {
            return Err(parse_err(offset, format!("duplicate header key `{key}`")));
        }
        tokens[slot] = Some(Token { offset: offset + key.len() + 1, value });
        offset += raw.len() + 1;
    }
    let mut get = |i: usize| {
        tokens[i]
            .take()
            .ok_or_else(|| parse_err(end, format!("missing header key `{}`", KEYS[i])))
    };
    let version = get(0)?;
    let kind = get(1)?;
    let n_tok = get(2)?;
    let shape_tok = get(3)?;
    let rows_tok = get(4)?;
    let cols_tok = get(5)?;
    let dtype = get(6)?;
    let layout = get(7)?;

    if version.value != "1" {
        return Err(parse_err(version.offset, format!("unsupported version `{}`", version.value)));
    }
    if dtype.value != "f64le" {
        return Err(parse_err(dtype.offset, format!("unsupported dtype `{}`", dtype.value)));
    }
    if layout.value != "component-major" {
        return Err(parse_err(layout.offset, format!("unsupported layout `{}`", layout.value)));
    }
    let n = parse_usize(&n_tok, "n")?;
    let mut shape = Vec::new();
    let mut pos = shape_tok.offset;
    for part in shape_tok.value.split(',') {
        let t = Token { offset: pos, value: part };
        shape.push(parse_usize(&t, "shape")?);
        pos += part.len() + 1;
    }
    if shape.len() != n {
        return Err(parse_err(shape_tok.offset, format!("shape has {} axes but n = {n}", shape.len())));
    }
    let grid = Grid::new(&shape).map_err(|e| parse_err(shape_tok.offset, e.to_string()))?;
    let rows = parse_usize(&rows_tok, "rows")?;
    let cols = parse_usize(&cols_tok, "cols")?;
    let big = n * n.saturating_sub(1) / 2;
    let field_kind = match kind.value {
        "scalar" if rows == 1 && cols == 1 => FieldKind::Scalar,
        "vector" if cols == 1 && rows > 0 => FieldKind::Vector(rows),
        "cross" if cols == 1 && rows == big => FieldKind::Cross,
        "matrix" if rows > 0 && cols > 0 => FieldKind::Matrix { rows, cols },
        "scalar" | "vector" | "cross" | "matrix" => {
            return Err(parse_err(
                rows_tok.offset,
                format!("rows={rows} cols={cols} do not fit kind `{}`", kind.value),
            ))
        }
        other => return Err(parse_err(kind.offset, format!("unknown kind `{other}`"))),
    };

    let start = end + 1;
    let count = field_kind.components(n) * grid.len();
    let expected = count * 8;
    let body = &bytes[start..];
    if body.len() < expected {
        return Err(parse_err(
            bytes.len(),
            format!("truncated data: expected {expected} bytes after the header, found {}", body.len()),
        ));
    }
    if body.len() > expected {
        return Err(parse_err(
            start + expected,
            format!("{} trailing bytes after the data", body.len() - expected),
        ));
    }
    let mut data = Vec::with_capacity(count);
    for (i, chunk) in body.chunks_exact(8).enumerate() {
        let x = f64::from_le_bytes(chunk.try_into().expect("chunks are 8 bytes"));
        if !x.is_finite() {
            return Err(parse_err(start + 8 * i, "non-finite sample"));
        }
        data.push(x);
    }
    Field::new(&grid, field_kind, data)
}
