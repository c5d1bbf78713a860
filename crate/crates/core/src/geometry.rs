//! Anisotropic grading, distance and the rescaling/recentering maps.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Float;

use crate::error::{check_dim, Error, Result};

/// Integer grading `s = (s_1, …, s_d)` of the coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scaling(Vec<u32>);

impl Scaling {
    pub fn new(weights: Vec<u32>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("scaling needs at least one axis".into()));
        }
        if weights.iter().any(|&w| w == 0) {
            return Err(Error::InvalidParameter("scaling entries must be >= 1".into()));
        }
        Ok(Scaling(weights))
    }

    /// `(1, …, 1)`.
    pub fn isotropic(dim: usize) -> Self {
        Scaling(alloc::vec![1; dim.max(1)])
    }

    /// `(2, 1, …, 1)`, time first.
    pub fn parabolic(dim: usize) -> Self {
        let mut w = alloc::vec![1; dim.max(1)];
        w[0] = 2;
        Scaling(w)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn weights(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    /// `Σ s_i`, the homogeneity of the volume element.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_isotropic(&self) -> bool {
        self.0.iter().all(|&w| w == 1)
    }

    /// Anisotropic degree `|γ| = Σ s_i γ_i`.
    pub fn degree(&self, gamma: &MultiIndex) -> Result<u32> {
        check_dim(self.dim(), gamma.dim())?;
        Ok(self.degree_unchecked(gamma))
    }

    pub(crate) fn degree_unchecked(&self, gamma: &MultiIndex) -> u32 {
        self.0.iter().zip(gamma.0.iter()).map(|(s, g)| s * g).sum()
    }

    /// Anisotropic distance `Σ |x_i - y_i|^{1/s_i}`.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        check_dim(self.dim(), x.dim())?;
        check_dim(self.dim(), y.dim())?;
        Ok(self.distance_slices(x.coords(), y.coords()))
    }

    #[inline]
    pub(crate) fn distance_slices(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for ((&s, &a), &b) in self.0.iter().zip(x).zip(y) {
            acc += axis_root((a - b).abs(), s);
        }
        acc
    }

    /// Every multi-index with `|β| <= eta`, sorted by degree and then
    /// lexicographically.
    pub fn indices_up_to(&self, eta: f64) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        if eta < 0.0 {
            return out;
        }
        let cap = Float::floor(eta) as u32;
        let mut cur = alloc::vec![0u32; self.dim()];
        self.fill_indices(0, cap, &mut cur, &mut out);
        out.sort_by(|a, b| self.precedes_cmp(a, b));
        out
    }

    fn fill_indices(&self, axis: usize, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if axis == self.dim() {
            out.push(MultiIndex(cur.clone()));
            return;
        }
        let s = self.0[axis];
        let mut k = 0;
        while k * s <= budget {
            cur[axis] = k;
            self.fill_indices(axis + 1, budget - k * s, cur, out);
            k += 1;
        }
        cur[axis] = 0;
    }

    /// The ordering `≺`: smaller degree first, then the first differing
    /// component decides.
    pub fn precedes_cmp(&self, a: &MultiIndex, b: &MultiIndex) -> Ordering {
        self.degree_unchecked(a)
            .cmp(&self.degree_unchecked(b))
            .then_with(|| a.0.cmp(&b.0))
    }
}

#[inline]
pub(crate) fn axis_root(v: f64, s: u32) -> f64 {
    match s {
        1 => v,
        2 => Float::sqrt(v),
        3 => Float::cbrt(v),
        _ => Float::powf(v, 1.0 / s as f64),
    }
}

/// Multi-index `γ ∈ N_0^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        MultiIndex(alloc::vec![0; dim])
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = alloc::vec![0; dim];
        v[axis] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&g| g == 0)
    }

    /// Ordinary length `Σ γ_i`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self - other`, if componentwise non-negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// `γ! = Π γ_i!`.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&g| (1..=g).map(|k| k as f64).product::<f64>()).product()
    }
}

/// A point of `R^d`; lattice points are points whose coordinates lie on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(alloc::vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

/// Recentering/rescaling map `S_w^R y = w + R^s y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleMap {
    pub center: Point,
    pub scale: f64,
}

impl ScaleMap {
    pub fn new(center: Point, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter("scale must be positive and finite".into()));
        }
        if center.0.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("recentering point must be finite".into()));
        }
        Ok(ScaleMap { center, scale })
    }

    pub fn identity(dim: usize) -> Self {
        ScaleMap { center: Point::origin(dim), scale: 1.0 }
    }

    pub fn apply(&self, s: &Scaling, y: &Point) -> Result<Point> {
        check_dim(s.dim(), y.dim())?;
        check_dim(s.dim(), self.center.dim())?;
        Ok(Point(self.apply_slice(s, y.coords())))
    }

    pub(crate) fn apply_slice(&self, s: &Scaling, y: &[f64]) -> Vec<f64> {
        y.iter()
            .enumerate()
            .map(|(j, &v)| self.center.0[j] + Float::powi(self.scale, s.weight(j) as i32) * v)
            .collect()
    }

    /// `self ∘ inner`, which equals `S^{λρ}_{S_x^λ z}`.
    pub fn compose(&self, inner: &ScaleMap, s: &Scaling) -> Result<ScaleMap> {
        let center = self.apply(s, &inner.center)?;
        ScaleMap::new(center, self.scale * inner.scale)
    }

    /// `(S_x^λ)^{-1} = S^{1/λ}_{-(1/λ)^s x}`.
    pub fn inverse(&self, s: &Scaling) -> Result<ScaleMap> {
        check_dim(s.dim(), self.center.dim())?;
        let inv = 1.0 / self.scale;
        let center = self
            .center
            .0
            .iter()
            .enumerate()
            .map(|(j, &c)| -Float::powi(inv, s.weight(j) as i32) * c)
            .collect();
        ScaleMap::new(Point(center), inv)
    }
}
