//! Germs `(U_x)_x` tabulated on lattice windows.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{MultiIndex, ScaleMap, Scaling};
use crate::ops::{discrete_monomial, DiffOperator, Stencil};
use crate::window::{Field, LatticeWindow};
use crate::C64;

/// Dense table `U_x(y)` for base points `x` in a list of window indices and
/// active points `y` ranging over the whole window. Row `b` holds the slice
/// `U_{x_b}(·)` in the window's row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Germ {
    window: LatticeWindow,
    bases: Vec<Vec<i64>>,
    values: Vec<C64>,
}

/// A germ read against the pairing `⟨f, g⟩_ε = ε^{Σs} Σ f g`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistGerm(pub Germ);

impl Germ {
    pub fn new(window: LatticeWindow, bases: Vec<Vec<i64>>, values: Vec<C64>) -> Result<Self> {
        for b in &bases {
            check_dim(window.dim(), b.len())?;
            if !window.contains(b) {
                return Err(Error::Domain(alloc::format!("base point {b:?} lies outside the window")));
            }
        }
        check_dim(bases.len() * window.len(), values.len())?;
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("germ values must be finite".into()));
        }
        Ok(Germ { window, bases, values })
    }

    /// Every window point as a base point.
    pub fn all_bases(window: &LatticeWindow) -> Vec<Vec<i64>> {
        window.indices().collect()
    }

    pub fn zeros(window: LatticeWindow, bases: Vec<Vec<i64>>) -> Self {
        let n = bases.len() * window.len();
        Germ { window, bases, values: alloc::vec![C64::new(0.0, 0.0); n] }
    }

    /// Tabulates `f(x, y)` from physical coordinates.
    pub fn from_fn<F>(window: LatticeWindow, bases: Vec<Vec<i64>>, mut f: F) -> Self
    where
        F: FnMut(&[f64], &[f64]) -> C64,
    {
        let coords = window.all_coords();
        let d = window.dim();
        let mut values = Vec::with_capacity(bases.len() * window.len());
        for b in &bases {
            let x = window.coords(b);
            for y in coords.chunks(d) {
                values.push(f(&x, y));
            }
        }
        Germ { window, bases, values }
    }

    pub fn window(&self) -> &LatticeWindow {
        &self.window
    }

    pub fn scaling(&self) -> &Scaling {
        self.window.scaling()
    }

    pub fn bases(&self) -> &[Vec<i64>] {
        &self.bases
    }

    pub fn n_bases(&self) -> usize {
        self.bases.len()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// `U_{x_b}(·)` over the window.
    pub fn slice(&self, b: usize) -> &[C64] {
        let n = self.window.len();
        &self.values[b * n..(b + 1) * n]
    }

    pub fn base_coords(&self, b: usize) -> Vec<f64> {
        self.window.coords(&self.bases[b])
    }

    pub fn base_position(&self, idx: &[i64]) -> Option<usize> {
        self.bases.iter().position(|b| b.as_slice() == idx)
    }

    pub fn value(&self, b: usize, active: &[i64]) -> Option<C64> {
        self.window.linear(active).map(|l| self.slice(b)[l])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn compatible(&self, other: &Germ) -> Result<()> {
        if self.window != other.window || self.bases != other.bases {
            return Err(Error::Domain("germs live on different windows or base sets".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Germ) -> Result<Germ> {
        self.compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Germ { window: self.window.clone(), bases: self.bases.clone(), values })
    }

    pub fn scale_values(&self, c: C64) -> Germ {
        Germ { window: self.window.clone(), bases: self.bases.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Keeps the base points satisfying `keep`.
    pub fn select_bases<P: FnMut(&[i64]) -> bool>(&self, mut keep: P) -> Germ {
        let n = self.window.len();
        let mut bases = Vec::new();
        let mut values = Vec::new();
        for (b, idx) in self.bases.iter().enumerate() {
            if keep(idx) {
                bases.push(idx.clone());
                values.extend_from_slice(&self.values[b * n..(b + 1) * n]);
            }
        }
        Germ { window: self.window.clone(), bases, values }
    }

    /// `y ↦ (L U_x)(y)` for every base point, on the sub-window where the
    /// stencil fits.
    pub fn apply_operator(&self, op: &DiffOperator) -> Result<DistGerm> {
        if op.scaling() != self.scaling() {
            return Err(Error::InvalidParameter("operator and germ use different scalings".into()));
        }
        let st = op.stencil(self.window.eps());
        let out = st.output_window(&self.window)?;
        let mut values = Vec::with_capacity(self.bases.len() * out.len());
        for b in 0..self.bases.len() {
            values.extend(st.apply_values(&self.window, self.slice(b), &out));
        }
        Ok(DistGerm(Germ { window: out, bases: self.bases.clone(), values }))
    }
}

impl DistGerm {
    pub fn germ(&self) -> &Germ {
        &self.0
    }

    pub fn window(&self) -> &LatticeWindow {
        &self.0.window
    }
}

/// Forward-difference stencils `D^γ` for every `|γ| <= order`.
fn jet_stencils(window: &LatticeWindow, order: u32) -> Vec<(MultiIndex, Vec<(Vec<i64>, f64)>)> {
    let zero = MultiIndex::zeros(window.dim());
    window
        .scaling()
        .indices_up_to(order as f64)
        .into_iter()
        .map(|g| {
            let st = Stencil::difference(&g, &zero, window.steps());
            let taps = st.entries().map(|(k, v)| (k.clone(), v.re)).collect();
            (g, taps)
        })
        .collect()
}

fn stencil_fits(window: &LatticeWindow, x: &[i64], gamma: &MultiIndex) -> bool {
    x.iter().zip(&gamma.0).zip(window.hi()).all(|((xi, g), hi)| xi + *g as i64 <= *hi)
}

/// Jet coefficients `D^γ u(x) / γ!` at base `x`.
fn jet_at(u: &Field, x: &[i64], stencils: &[(MultiIndex, Vec<(Vec<i64>, f64)>)]) -> Vec<C64> {
    let mut pt = alloc::vec![0i64; x.len()];
    stencils
        .iter()
        .map(|(g, taps)| {
            let mut acc = C64::new(0.0, 0.0);
            for (off, w) in taps {
                for j in 0..x.len() {
                    pt[j] = x[j] + off[j];
                }
                acc += u.get(&pt).expect("stencil checked to fit") * *w;
            }
            acc / g.factorial()
        })
        .collect()
}

fn resolve_bases(u: &Field, order: u32, bases: Option<Vec<Vec<i64>>>) -> Result<Vec<Vec<i64>>> {
    let w = u.window();
    let top: Vec<MultiIndex> = w.scaling().indices_up_to(order as f64);
    let fits = |x: &[i64]| top.iter().all(|g| stencil_fits(w, x, g));
    match bases {
        Some(list) => {
            for x in &list {
                check_dim(w.dim(), x.len())?;
                if !w.contains(x) || !fits(x) {
                    return Err(Error::Boundary(alloc::format!(
                        "jet stencil at base {x:?} leaves the window; shrink the base set"
                    )));
                }
            }
            Ok(list)
        }
        None => {
            let list: Vec<Vec<i64>> = w.indices().filter(|x| fits(x)).collect();
            if list.is_empty() {
                return Err(Error::Boundary("no base point admits the jet stencil".into()));
            }
            Ok(list)
        }
    }
}

fn jet_remainder_rows(u: &Field, order: u32, bases: &[Vec<i64>]) -> Vec<C64> {
    let w = u.window();
    let s = w.scaling();
    let eps = w.eps();
    let stencils = jet_stencils(w, order);
    let coords = w.all_coords();
    let d = w.dim();
    // monomial values (y - x)^{(γ)} depend only on the index difference
    let mut values = Vec::with_capacity(bases.len() * w.len());
    let mut diff = alloc::vec![0.0; d];
    for x in bases {
        let coef = jet_at(u, x, &stencils);
        let xc = w.coords(x);
        for (lin, y) in coords.chunks(d).enumerate() {
            for j in 0..d {
                diff[j] = y[j] - xc[j];
            }
            let mut q = C64::new(0.0, 0.0);
            for ((g, _), c) in stencils.iter().zip(&coef) {
                q += c * discrete_monomial(s, eps, g, &diff);
            }
            values.push(u.values()[lin] - q);
        }
    }
    values
}

/// `U_x = u - Q_x` with `Q_x(y) = Σ_{|γ|<=order} D^γ u(x)/γ! (y - x)^{(γ)}`.
///
/// With `bases = None` every point whose forward stencils fit in the window
/// becomes a base point; an explicit list must satisfy this.
pub fn jet_germ(u: &Field, order: u32, bases: Option<Vec<Vec<i64>>>) -> Result<Germ> {
    let bases = resolve_bases(u, order, bases)?;
    let values = jet_remainder_rows(u, order, &bases);
    Ok(Germ { window: u.window().clone(), bases, values })
}

/// `U_x = u - a(x) v - P_x` with `P_x` the jet of `u - a(x) v` at `x`.
pub fn frozen_coefficient_germ(
    u: &Field,
    v: &Field,
    a: &Field,
    order: u32,
    bases: Option<Vec<Vec<i64>>>,
) -> Result<Germ> {
    if u.window() != v.window() || u.window() != a.window() {
        return Err(Error::Domain("fields must share one window".into()));
    }
    let bases = resolve_bases(u, order, bases)?;
    let ru = jet_remainder_rows(u, order, &bases);
    let rv = jet_remainder_rows(v, order, &bases);
    let n = u.window().len();
    let mut values = Vec::with_capacity(ru.len());
    for (b, x) in bases.iter().enumerate() {
        let ax = a.get(x).unwrap();
        for i in 0..n {
            values.push(ru[b * n + i] - ax * rv[b * n + i]);
        }
    }
    Ok(Germ { window: u.window().clone(), bases, values })
}

fn on_grid(v: f64, h: f64) -> Option<i64> {
    let k = v / h;
    let r = Float::round(k);
    if (k - r).abs() <= 1e-9 * (1.0 + r.abs()) {
        Some(r as i64)
    } else {
        None
    }
}

/// `(S_w^R U)_x = U_{S_w^R x} ∘ S_w^R` over `(S_w^R)^{-1}` of the window,
/// a window of `Λ_{ε/R}`. The table itself is unchanged: index `k` of the
/// new window corresponds to index `k + w/ε^s` of the old one.
pub fn scale_germ(u: &Germ, m: &ScaleMap) -> Result<Germ> {
    let w = u.window();
    check_dim(w.dim(), m.center.dim())?;
    let mut shift = Vec::with_capacity(w.dim());
    for j in 0..w.dim() {
        let k = on_grid(m.center.0[j], w.step(j)).ok_or_else(|| {
            Error::LatticeIncompatible(alloc::format!(
                "recentering coordinate {} is not a multiple of the step {}",
                m.center.0[j],
                w.step(j)
            ))
        })?;
        shift.push(k);
    }
    let lo = w.lo().iter().zip(&shift).map(|(a, b)| a - b).collect();
    let hi = w.hi().iter().zip(&shift).map(|(a, b)| a - b).collect();
    let nw = LatticeWindow::new(w.scaling().clone(), w.eps() / m.scale, lo, hi)?;
    let bases = u.bases.iter().map(|b| b.iter().zip(&shift).map(|(a, s)| a - s).collect()).collect();
    Ok(Germ { window: nw, bases, values: u.values.clone() })
}

/// Same action on distribution-valued germs.
pub fn scale_dist_germ(v: &DistGerm, m: &ScaleMap) -> Result<DistGerm> {
    scale_germ(&v.0, m).map(DistGerm)
}

/// The germ on the slice `x_0 = 0`: base `(0, x')`, active `(0, y')`.
pub fn restrict_initial(u: &Germ) -> Result<Germ> {
    let w = u.window();
    let d = w.dim();
    if d < 2 {
        return Err(Error::Domain("the time-zero slice needs d >= 2".into()));
    }
    if !(w.lo()[0] <= 0 && 0 <= w.hi()[0]) {
        return Err(Error::Domain("window does not contain the time-zero slice".into()));
    }
    let s = Scaling::new(w.scaling().weights()[1..].to_vec())?;
    let nw = LatticeWindow::new(s, w.eps(), w.lo()[1..].to_vec(), w.hi()[1..].to_vec())?;
    let active: Vec<usize> = w.indices().enumerate().filter(|(_, k)| k[0] == 0).map(|(l, _)| l).collect();
    let mut bases = Vec::new();
    let mut values = Vec::new();
    for (b, x) in u.bases.iter().enumerate() {
        if x[0] != 0 {
            continue;
        }
        bases.push(x[1..].to_vec());
        let row = u.slice(b);
        values.extend(active.iter().map(|&l| row[l]));
    }
    if bases.is_empty() {
        return Err(Error::Domain("no base point lies on the time-zero slice".into()));
    }
    Ok(Germ { window: nw, bases, values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterReport {
    pub centered: bool,
    /// Largest `|D^γ U_x(x)|` found.
    pub worst: f64,
    pub base: Vec<i64>,
    pub gamma: MultiIndex,
    /// Number of base points whose stencils fit.
    pub checked: usize,
}

/// Checks `D^γ U_x(x) = 0` for `|γ| <= η` at base points whose forward
/// stencils fit in the window, with absolute tolerance `tol`.
pub fn center_check_tol(u: &Germ, eta: f64, tol: f64) -> CenterReport {
    let w = u.window();
    let top = Float::floor(eta.max(0.0)) as u32;
    let stencils = jet_stencils(w, top);
    let mut rep = CenterReport {
        centered: true,
        worst: 0.0,
        base: Vec::new(),
        gamma: MultiIndex::zeros(w.dim()),
        checked: 0,
    };
    let mut pt = alloc::vec![0i64; w.dim()];
    for (b, x) in u.bases.iter().enumerate() {
        if !stencils.iter().all(|(g, _)| stencil_fits(w, x, g)) {
            continue;
        }
        rep.checked += 1;
        let row = u.slice(b);
        for (g, taps) in &stencils {
            let mut acc = C64::new(0.0, 0.0);
            for (off, c) in taps {
                for j in 0..x.len() {
                    pt[j] = x[j] + off[j];
                }
                acc += row[w.linear(&pt).unwrap()] * *c;
            }
            if acc.norm() > rep.worst {
                rep.worst = acc.norm();
                rep.base = x.clone();
                rep.gamma = g.clone();
            }
        }
    }
    rep.centered = rep.worst <= tol;
    rep
}

pub fn center_check(u: &Germ, eta: f64) -> CenterReport {
    center_check_tol(u, eta, 1e-10)
}
