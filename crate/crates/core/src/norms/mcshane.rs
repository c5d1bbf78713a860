//! McShane extension of Hölder functions from a subset of a window.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{check_dim, Error, Result};
use crate::window::Field;
use crate::C64;

fn real_values(f: &Field) -> Result<Vec<f64>> {
    if f.values().iter().any(|v| v.im != 0.0) {
        return Err(Error::InvalidParameter("extension needs a real-valued field".into()));
    }
    Ok(f.values().iter().map(|v| v.re).collect())
}

/// `max |f(x) - f(y)| / d(x,y)^α` over distinct pairs in `domain`.
pub fn holder_constant(f: &Field, domain: &[bool], alpha: f64) -> Result<f64> {
    let w = f.window();
    check_dim(w.len(), domain.len())?;
    let vals = real_values(f)?;
    let s = w.scaling();
    let d = w.dim();
    let coords = w.all_coords();
    let pts: Vec<usize> = (0..w.len()).filter(|&i| domain[i]).collect();
    let mut best = 0.0f64;
    for (a, &i) in pts.iter().enumerate() {
        for &j in &pts[a + 1..] {
            let dist = s.distance_slices(&coords[i * d..(i + 1) * d], &coords[j * d..(j + 1) * d]);
            best = best.max((vals[i] - vals[j]).abs() / Float::powf(dist, alpha));
        }
    }
    Ok(best)
}

/// `g(x) = min_{y ∈ D} f(y) + M d(x,y)^α`, with `g = f` on `D`. Requires
/// `α ∈ (0,1]` and the Hölder bound `M` on `D`.
pub fn mcshane_extend(f: &Field, domain: &[bool], alpha: f64, m: f64) -> Result<Field> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0, 1]".into()));
    }
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::InvalidParameter("Hölder constant must be non-negative".into()));
    }
    let w = f.window();
    check_dim(w.len(), domain.len())?;
    if !domain.iter().any(|&b| b) {
        return Err(Error::EmptyWindow);
    }
    let ratio = holder_constant(f, domain, alpha)?;
    if ratio > m * (1.0 + 1e-12) + 1e-300 {
        return Err(Error::NotHolder { ratio, bound: m });
    }
    let vals = real_values(f)?;
    let s = w.scaling();
    let d = w.dim();
    let coords = w.all_coords();
    let pts: Vec<usize> = (0..w.len()).filter(|&i| domain[i]).collect();
    let mut out = Vec::with_capacity(w.len());
    for x in 0..w.len() {
        if domain[x] {
            out.push(C64::new(vals[x], 0.0));
            continue;
        }
        let cx = &coords[x * d..(x + 1) * d];
        let g = pts
            .iter()
            .map(|&y| vals[y] + m * Float::powf(s.distance_slices(cx, &coords[y * d..(y + 1) * d]), alpha))
            .fold(f64::INFINITY, f64::min);
        out.push(C64::new(g, 0.0));
    }
    Field::new(w.clone(), out)
}
