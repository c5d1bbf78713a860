//! Plain-text formats for germs, fields and operators.
//!
//! Germ tables start with a header line
//!
//! ```text
//! # d=2 s=1,1 eps=1.0000000000000000e0 lo=-4,-4 hi=4,4
//! x1,x2,y1,y2,re,im
//! ```
//!
//! followed by one row per (base point, active point) in window order.
//! Fields use the same header and rows `k1,...,kd,re,im`; a field file may
//! omit points, which then count as outside its domain. Numbers are written
//! with 17 significant digits, so tables round-trip bit for bit.
//!
//! Operators are written as a header `d=2 s=1,1 m=2` and one line
//! `gamma=1,0 delta=1,0 re=-1 im=0` per term.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use schauder_core::ops::{DiffOperator, Term};
use schauder_core::{Field, Germ, LatticeWindow, MultiIndex, Scaling, C64};

use crate::config::parse_list;
use crate::error::{Error, Result};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn window_header(w: &LatticeWindow) -> String {
    format!(
        "# d={} s={} eps={} lo={} hi={}",
        w.dim(),
        join(w.scaling().weights()),
        num(w.eps()),
        join(w.lo()),
        join(w.hi())
    )
}

/// `key=value` pairs separated by whitespace.
fn fields<'a>(line: &'a str, path: &Path, n: usize) -> Result<HashMap<&'a str, &'a str>> {
    line.split_whitespace()
        .map(|tok| tok.split_once('=').ok_or_else(|| Error::parse(path, n, format!("expected key=value, found {tok:?}"))))
        .collect()
}

fn need<'a>(map: &HashMap<&str, &'a str>, key: &str, path: &Path, n: usize) -> Result<&'a str> {
    map.get(key).copied().ok_or_else(|| Error::parse(path, n, format!("missing field {key}")))
}

fn list<T: std::str::FromStr>(s: &str, key: &str, path: &Path, n: usize) -> Result<Vec<T>> {
    parse_list(s).map_err(|_| Error::parse(path, n, format!("cannot parse {key}={s:?}")))
}

fn parse_window(line: &str, path: &Path) -> Result<LatticeWindow> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::parse(path, 1, "header must start with '#'"))?;
    let map = fields(body, path, 1)?;
    let d: usize = need(&map, "d", path, 1)?.parse().map_err(|_| Error::parse(path, 1, "cannot parse d"))?;
    let s: Vec<u32> = list(need(&map, "s", path, 1)?, "s", path, 1)?;
    let eps: f64 = need(&map, "eps", path, 1)?.parse().map_err(|_| Error::parse(path, 1, "cannot parse eps"))?;
    let lo: Vec<i64> = list(need(&map, "lo", path, 1)?, "lo", path, 1)?;
    let hi: Vec<i64> = list(need(&map, "hi", path, 1)?, "hi", path, 1)?;
    if s.len() != d || lo.len() != d || hi.len() != d {
        return Err(Error::parse(path, 1, format!("s, lo and hi must have d = {d} entries")));
    }
    let scaling = Scaling::new(s).map_err(|e| Error::parse(path, 1, e.to_string()))?;
    LatticeWindow::new(scaling, eps, lo, hi).map_err(|e| Error::parse(path, 1, e.to_string()))
}

/// Data rows after the header and the column-name line.
fn rows<'a>(text: &'a str, path: &Path, width: usize) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate().skip(2) {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != width {
            return Err(Error::parse(path, n + 1, format!("expected {width} columns, found {}", cells.len())));
        }
        out.push((n + 1, cells));
    }
    Ok(out)
}

fn cell<T: std::str::FromStr>(c: &str, path: &Path, n: usize) -> Result<T> {
    c.parse().map_err(|_| Error::parse(path, n, format!("cannot parse {c:?}")))
}

fn column_names(d: usize, groups: &[&str]) -> String {
    let mut cols: Vec<String> = Vec::new();
    for g in groups {
        cols.extend((1..=d).map(|j| format!("{g}{j}")));
    }
    cols.push("re".into());
    cols.push("im".into());
    cols.join(",")
}

pub fn germ_to_string(u: &Germ) -> String {
    let w = u.window();
    let d = w.dim();
    let mut out = window_header(w);
    out.push('\n');
    out.push_str(&column_names(d, &["x", "y"]));
    out.push('\n');
    let actives: Vec<Vec<i64>> = w.indices().collect();
    for (b, x) in u.bases().iter().enumerate() {
        let xs = join(x);
        for (y, v) in actives.iter().zip(u.slice(b)) {
            let _ = writeln!(out, "{xs},{},{},{}", join(y), num(v.re), num(v.im));
        }
    }
    out
}

pub fn germ_from_str(text: &str, path: &Path) -> Result<Germ> {
    let header = text.lines().next().ok_or_else(|| Error::parse(path, 1, "empty file"))?;
    let w = parse_window(header, path)?;
    let d = w.dim();
    let n = w.len();
    let mut bases: Vec<Vec<i64>> = Vec::new();
    let mut values: Vec<C64> = Vec::new();
    let mut filled: Vec<bool> = Vec::new();
    for (line, cells) in rows(text, path, 2 * d + 2)? {
        let x: Vec<i64> = cells[..d].iter().map(|c| cell(c, path, line)).collect::<Result<_>>()?;
        let y: Vec<i64> = cells[d..2 * d].iter().map(|c| cell(c, path, line)).collect::<Result<_>>()?;
        let v = C64::new(cell(cells[2 * d], path, line)?, cell(cells[2 * d + 1], path, line)?);
        let b = match bases.iter().position(|b| *b == x) {
            Some(b) => b,
            None => {
                if !w.contains(&x) {
                    return Err(Error::parse(path, line, format!("base point {x:?} outside the window")));
                }
                bases.push(x);
                values.resize(bases.len() * n, C64::new(0.0, 0.0));
                filled.resize(bases.len() * n, false);
                bases.len() - 1
            }
        };
        let k = w.linear(&y).ok_or_else(|| Error::parse(path, line, format!("active point {y:?} outside the window")))?;
        if filled[b * n + k] {
            return Err(Error::parse(path, line, format!("duplicate row for base {:?}, active {y:?}", bases[b])));
        }
        filled[b * n + k] = true;
        values[b * n + k] = v;
    }
    if let Some(i) = filled.iter().position(|f| !f) {
        return Err(Error::parse(
            path,
            1,
            format!("incomplete table: base {:?} lacks active point {:?}", bases[i / n], w.index_of(i % n)),
        ));
    }
    Ok(Germ::new(w, bases, values)?)
}

pub fn read_germ(path: &Path) -> Result<Germ> {
    germ_from_str(&read(path)?, path)
}

pub fn write_germ(path: &Path, u: &Germ) -> Result<()> {
    write_text(path, &germ_to_string(u))
}

/// Writes the points with `domain[i]` set (all points when `None`).
pub fn field_to_string(f: &Field, domain: Option<&[bool]>) -> String {
    let w = f.window();
    let mut out = window_header(w);
    out.push('\n');
    out.push_str(&column_names(w.dim(), &["k"]));
    out.push('\n');
    for (i, v) in f.values().iter().enumerate() {
        if domain.map_or(true, |m| m[i]) {
            let _ = writeln!(out, "{},{},{}", join(&w.index_of(i)), num(v.re), num(v.im));
        }
    }
    out
}

/// The field (zero off the listed points) and the mask of listed points.
pub fn field_from_str(text: &str, path: &Path) -> Result<(Field, Vec<bool>)> {
    let header = text.lines().next().ok_or_else(|| Error::parse(path, 1, "empty file"))?;
    let w = parse_window(header, path)?;
    let d = w.dim();
    let mut values = vec![C64::new(0.0, 0.0); w.len()];
    let mut mask = vec![false; w.len()];
    for (line, cells) in rows(text, path, d + 2)? {
        let k: Vec<i64> = cells[..d].iter().map(|c| cell(c, path, line)).collect::<Result<_>>()?;
        let i = w.linear(&k).ok_or_else(|| Error::parse(path, line, format!("point {k:?} outside the window")))?;
        if mask[i] {
            return Err(Error::parse(path, line, format!("duplicate row for {k:?}")));
        }
        mask[i] = true;
        values[i] = C64::new(cell(cells[d], path, line)?, cell(cells[d + 1], path, line)?);
    }
    Ok((Field::new(w, values)?, mask))
}

pub fn read_field(path: &Path) -> Result<(Field, Vec<bool>)> {
    field_from_str(&read(path)?, path)
}

pub fn operator_to_string(op: &DiffOperator) -> String {
    let s = op.scaling();
    let mut out = format!("d={} s={} m={}\n", s.dim(), join(s.weights()), op.order());
    for t in op.terms() {
        let _ = writeln!(
            out,
            "gamma={} delta={} re={} im={}",
            join(t.gamma.entries()),
            join(t.delta.entries()),
            num(t.coeff.re),
            num(t.coeff.im)
        );
    }
    out
}

pub fn operator_from_str(text: &str, path: &Path) -> Result<DiffOperator> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (n0, header) = lines.next().ok_or_else(|| Error::parse(path, 1, "empty operator file"))?;
    let map = fields(header, path, n0 + 1)?;
    let d: usize = cell(need(&map, "d", path, n0 + 1)?, path, n0 + 1)?;
    let s: Vec<u32> = list(need(&map, "s", path, n0 + 1)?, "s", path, n0 + 1)?;
    if s.len() != d {
        return Err(Error::parse(path, n0 + 1, format!("s must have d = {d} entries")));
    }
    let m: Option<u32> = map.get("m").map(|v| cell(v, path, n0 + 1)).transpose()?;
    let scaling = Scaling::new(s).map_err(|e| Error::parse(path, n0 + 1, e.to_string()))?;
    let mut terms = Vec::new();
    for (n, line) in lines {
        let map = fields(line, path, n + 1)?;
        let gamma: Vec<u32> = list(need(&map, "gamma", path, n + 1)?, "gamma", path, n + 1)?;
        let delta: Vec<u32> = list(need(&map, "delta", path, n + 1)?, "delta", path, n + 1)?;
        if gamma.len() != d || delta.len() != d {
            return Err(Error::parse(path, n + 1, format!("gamma and delta must have d = {d} entries")));
        }
        let re: f64 = cell(need(&map, "re", path, n + 1)?, path, n + 1)?;
        let im: f64 = map.get("im").map(|v| cell(v, path, n + 1)).transpose()?.unwrap_or(0.0);
        terms.push(Term { gamma: MultiIndex::new(gamma), delta: MultiIndex::new(delta), coeff: C64::new(re, im) });
    }
    let op = DiffOperator::new(scaling, terms).map_err(|e| Error::parse(path, n0 + 1, e.to_string()))?;
    if let Some(m) = m {
        if m != op.order() {
            return Err(Error::parse(path, n0 + 1, format!("header says m={m} but the terms have order {}", op.order())));
        }
    }
    Ok(op)
}

pub fn read_operator(path: &Path) -> Result<DiffOperator> {
    operator_from_str(&read(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_round_trip() {
        for op in [DiffOperator::laplacian(2), DiffOperator::heat(3).unwrap(), DiffOperator::cauchy_riemann()] {
            let back = operator_from_str(&operator_to_string(&op), Path::new("op")).unwrap();
            assert_eq!(back, op);
        }
    }

    #[test]
    fn operator_errors_name_the_field() {
        let e = operator_from_str("d=2 s=1,1\ngamma=1,0 re=1", Path::new("op")).unwrap_err();
        assert!(e.to_string().contains("delta"), "{e}");
        let e = operator_from_str("d=1 s=1 m=3\ngamma=1 delta=1 re=1", Path::new("op")).unwrap_err();
        assert!(e.to_string().contains("m=3"), "{e}");
    }

    #[test]
    fn partial_field_gives_mask() {
        let text = "# d=1 s=1 eps=1 lo=-1 hi=1\nk1,re,im\n0,2.5,0\n";
        let (f, mask) = field_from_str(text, Path::new("f")).unwrap();
        assert_eq!(mask, vec![false, true, false]);
        assert_eq!(f.values()[1], C64::new(2.5, 0.0));
    }

    #[test]
    fn incomplete_germ_is_rejected() {
        let text = "# d=1 s=1 eps=1 lo=0 hi=1\nx1,y1,re,im\n0,0,1,0\n";
        let e = germ_from_str(text, Path::new("g")).unwrap_err();
        assert!(e.to_string().contains("incomplete"), "{e}");
    }
}
