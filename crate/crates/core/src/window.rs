//! Finite boxes of the anisotropic lattice and scalar fields on them.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{axis_root, Scaling};
use crate::C64;

/// Box `{k : lo_j <= k_j <= hi_j}` of `Λ_ε`, the point with index `k` sitting at
/// physical coordinates `k_j ε^{s_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeWindow {
    scaling: Scaling,
    eps: f64,
    lo: Vec<i64>,
    hi: Vec<i64>,
    steps: Vec<f64>,
}

impl LatticeWindow {
    pub fn new(scaling: Scaling, eps: f64, lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParameter("eps must be positive and finite".into()));
        }
        check_dim(scaling.dim(), lo.len())?;
        check_dim(scaling.dim(), hi.len())?;
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::InvalidParameter("window needs lo <= hi on every axis".into()));
        }
        let steps = scaling.weights().iter().map(|&s| Float::powi(eps, s as i32)).collect();
        Ok(LatticeWindow { scaling, eps, lo, hi, steps })
    }

    /// Indices `-radius..=radius` on every axis.
    pub fn centered(scaling: Scaling, eps: f64, radius: i64) -> Result<Self> {
        let d = scaling.dim();
        LatticeWindow::new(scaling, eps, alloc::vec![-radius; d], alloc::vec![radius; d])
    }

    pub fn scaling(&self) -> &Scaling {
        &self.scaling
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Grid step `ε^{s_j}` of axis `j`.
    pub fn step(&self, axis: usize) -> f64 {
        self.steps[axis]
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn shape(&self) -> Vec<usize> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l + 1) as usize).collect()
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, idx: &[i64]) -> bool {
        idx.len() == self.dim()
            && idx.iter().zip(self.lo.iter().zip(&self.hi)).all(|(k, (l, h))| l <= k && k <= h)
    }

    /// Row-major position of `idx` (last axis fastest).
    pub fn linear(&self, idx: &[i64]) -> Option<usize> {
        if !self.contains(idx) {
            return None;
        }
        let mut lin = 0usize;
        for j in 0..self.dim() {
            let n = (self.hi[j] - self.lo[j] + 1) as usize;
            lin = lin * n + (idx[j] - self.lo[j]) as usize;
        }
        Some(lin)
    }

    pub fn index_of(&self, mut lin: usize) -> Vec<i64> {
        let d = self.dim();
        let mut idx = alloc::vec![0i64; d];
        for j in (0..d).rev() {
            let n = (self.hi[j] - self.lo[j] + 1) as usize;
            idx[j] = self.lo[j] + (lin % n) as i64;
            lin /= n;
        }
        idx
    }

    pub fn coords(&self, idx: &[i64]) -> Vec<f64> {
        idx.iter().zip(&self.steps).map(|(&k, &h)| k as f64 * h).collect()
    }

    pub fn indices(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(move |lin| self.index_of(lin))
    }

    /// Flattened physical coordinates of every point, `len() * dim()` entries.
    pub fn all_coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len() * self.dim());
        for lin in 0..self.len() {
            out.extend(self.coords(&self.index_of(lin)));
        }
        out
    }

    /// Radius of the largest anisotropic ball centred at the box centre that
    /// fits in the box.
    pub fn radius(&self) -> f64 {
        (0..self.dim())
            .map(|j| {
                let half = 0.5 * (self.hi[j] - self.lo[j]) as f64 * self.steps[j];
                axis_root(half, self.scaling.weight(j))
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Anisotropic diameter of the box.
    pub fn diameter(&self) -> f64 {
        (0..self.dim())
            .map(|j| {
                let full = (self.hi[j] - self.lo[j]) as f64 * self.steps[j];
                axis_root(full, self.scaling.weight(j))
            })
            .sum()
    }

    /// Window with `lo + below` and `hi - above` per axis.
    pub fn shrink(&self, below: &[i64], above: &[i64]) -> Result<LatticeWindow> {
        let lo: Vec<i64> = self.lo.iter().zip(below).map(|(l, b)| l + b).collect();
        let hi: Vec<i64> = self.hi.iter().zip(above).map(|(h, a)| h - a).collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::Boundary("window too small for the stencil".into()));
        }
        LatticeWindow::new(self.scaling.clone(), self.eps, lo, hi)
    }

    /// Whether the physical box `[c_j - r_j, c_j + r_j]` lies inside the
    /// window's physical extent.
    pub(crate) fn box_inside(&self, center: &[f64], half: &[f64]) -> bool {
        const SLACK: f64 = 1e-12;
        (0..self.dim()).all(|j| {
            let lo = self.lo[j] as f64 * self.steps[j];
            let hi = self.hi[j] as f64 * self.steps[j];
            let tol = SLACK * (hi - lo).abs().max(self.steps[j]);
            center[j] - half[j] >= lo - tol && center[j] + half[j] <= hi + tol
        })
    }

    pub(crate) fn same_lattice(&self, other: &LatticeWindow) -> bool {
        self.scaling == other.scaling && self.eps == other.eps
    }
}

/// Complex scalar field tabulated on a window.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    window: LatticeWindow,
    values: Vec<C64>,
}

impl Field {
    pub fn new(window: LatticeWindow, values: Vec<C64>) -> Result<Self> {
        check_dim(window.len(), values.len())?;
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("field values must be finite".into()));
        }
        Ok(Field { window, values })
    }

    pub fn zeros(window: LatticeWindow) -> Self {
        let n = window.len();
        Field { window, values: alloc::vec![C64::new(0.0, 0.0); n] }
    }

    /// Tabulates `f(coords, index)` on the window.
    pub fn from_fn<F>(window: LatticeWindow, mut f: F) -> Self
    where
        F: FnMut(&[f64], &[i64]) -> C64,
    {
        let values = (0..window.len())
            .map(|lin| {
                let idx = window.index_of(lin);
                let x = window.coords(&idx);
                f(&x, &idx)
            })
            .collect();
        Field { window, values }
    }

    pub fn from_real(window: LatticeWindow, values: Vec<f64>) -> Result<Self> {
        Field::new(window, values.into_iter().map(|v| C64::new(v, 0.0)).collect())
    }

    pub fn window(&self) -> &LatticeWindow {
        &self.window
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn get(&self, idx: &[i64]) -> Option<C64> {
        self.window.linear(idx).map(|l| self.values[l])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Restriction to a sub-window of the same lattice.
    pub fn restrict(&self, sub: &LatticeWindow) -> Result<Field> {
        if !self.window.same_lattice(sub) {
            return Err(Error::Domain("sub-window lives on a different lattice".into()));
        }
        let mut values = Vec::with_capacity(sub.len());
        for idx in sub.indices() {
            values.push(self.get(&idx).ok_or_else(|| Error::Domain("sub-window exceeds window".into()))?);
        }
        Ok(Field { window: sub.clone(), values })
    }
}
