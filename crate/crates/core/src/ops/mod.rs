//! Constant-coefficient difference operators `Σ a_{γ,δ} D^γ D̄^δ`.

pub(crate) mod ellipticity;
mod monomials;
mod symbol;

pub use ellipticity::{
    continuum_ellipticity, discrete_ellipticity, is_discretely_elliptic, EllipticityReport, SymbolCheck, Verdict,
};
pub use monomials::{discrete_monomial, forward_difference, monomial_field, monomial_rule_error};
pub use symbol::{fractional_symbol, refine_zero, symbol_scale};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{MultiIndex, Scaling};
use crate::window::{Field, LatticeWindow};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub gamma: MultiIndex,
    pub delta: MultiIndex,
    pub coeff: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffOperator {
    scaling: Scaling,
    order: u32,
    terms: Vec<Term>,
}

impl DiffOperator {
    /// Merges repeated `(γ, δ)` pairs and drops zero coefficients. Every term
    /// must have the same anisotropic order `|γ| + |δ| >= 1`.
    pub fn new(scaling: Scaling, terms: Vec<Term>) -> Result<Self> {
        let mut merged: BTreeMap<(Vec<u32>, Vec<u32>), C64> = BTreeMap::new();
        for t in &terms {
            check_dim(scaling.dim(), t.gamma.dim())?;
            check_dim(scaling.dim(), t.delta.dim())?;
            if !t.coeff.re.is_finite() || !t.coeff.im.is_finite() {
                return Err(Error::InvalidParameter("operator coefficients must be finite".into()));
            }
            *merged.entry((t.gamma.0.clone(), t.delta.0.clone())).or_insert(C64::new(0.0, 0.0)) += t.coeff;
        }
        let terms: Vec<Term> = merged
            .into_iter()
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
            .map(|((g, d), coeff)| Term { gamma: MultiIndex(g), delta: MultiIndex(d), coeff })
            .collect();
        let first = terms.first().ok_or_else(|| Error::InvalidParameter("operator has no nonzero term".into()))?;
        let order = scaling.degree_unchecked(&first.gamma) + scaling.degree_unchecked(&first.delta);
        if order == 0 {
            return Err(Error::InvalidParameter("operator order must be at least 1".into()));
        }
        for t in &terms {
            let m = scaling.degree_unchecked(&t.gamma) + scaling.degree_unchecked(&t.delta);
            if m != order {
                return Err(Error::InvalidParameter(alloc::format!(
                    "term gamma={:?} delta={:?} has order {m}, expected {order}",
                    t.gamma.0, t.delta.0
                )));
            }
        }
        Ok(DiffOperator { scaling, order, terms })
    }

    pub fn scaling(&self) -> &Scaling {
        &self.scaling
    }

    pub fn dim(&self) -> usize {
        self.scaling.dim()
    }

    /// Anisotropic order `m`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// `Σ_j D_j D̄_j` with isotropic scaling.
    pub fn laplacian(dim: usize) -> Self {
        let s = Scaling::isotropic(dim);
        let terms = (0..dim)
            .map(|j| Term { gamma: MultiIndex::unit(dim, j), delta: MultiIndex::unit(dim, j), coeff: C64::new(1.0, 0.0) })
            .collect();
        DiffOperator::new(s, terms).expect("laplacian is well formed")
    }

    /// `D̄_0 - Σ_{j>=1} D_j D̄_j` with scaling `(2, 1, …, 1)`; time is axis 0.
    pub fn heat(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter("heat operator needs d >= 2".into()));
        }
        let mut terms =
            alloc::vec![Term { gamma: MultiIndex::zeros(dim), delta: MultiIndex::unit(dim, 0), coeff: C64::new(1.0, 0.0) }];
        for j in 1..dim {
            terms.push(Term { gamma: MultiIndex::unit(dim, j), delta: MultiIndex::unit(dim, j), coeff: C64::new(-1.0, 0.0) });
        }
        DiffOperator::new(Scaling::parabolic(dim), terms)
    }

    /// `½ (D_1 + i D_2)` in two dimensions.
    pub fn cauchy_riemann() -> Self {
        let terms = alloc::vec![
            Term { gamma: MultiIndex::unit(2, 0), delta: MultiIndex::zeros(2), coeff: C64::new(0.5, 0.0) },
            Term { gamma: MultiIndex::unit(2, 1), delta: MultiIndex::zeros(2), coeff: C64::new(0.0, 0.5) },
        ];
        DiffOperator::new(Scaling::isotropic(2), terms).expect("cauchy-riemann is well formed")
    }

    /// `Σ_j (D_j - D̄_j)`, which equals `ε Δ_ε` and has vanishing continuum
    /// symbol.
    pub fn eps_degenerate(dim: usize) -> Self {
        let mut terms = Vec::new();
        for j in 0..dim {
            terms.push(Term { gamma: MultiIndex::unit(dim, j), delta: MultiIndex::zeros(dim), coeff: C64::new(1.0, 0.0) });
            terms.push(Term { gamma: MultiIndex::zeros(dim), delta: MultiIndex::unit(dim, j), coeff: C64::new(-1.0, 0.0) });
        }
        DiffOperator::new(Scaling::isotropic(dim), terms).expect("eps-degenerate operator is well formed")
    }

    /// Named presets: `laplacian`, `heat`, `cauchy-riemann`, `eps-degenerate`.
    pub fn preset(name: &str, dim: usize) -> Result<Self> {
        match name {
            "laplacian" => Ok(DiffOperator::laplacian(dim)),
            "heat" => DiffOperator::heat(dim),
            "cauchy-riemann" => {
                if dim != 2 {
                    return Err(Error::InvalidParameter("cauchy-riemann is two-dimensional".into()));
                }
                Ok(DiffOperator::cauchy_riemann())
            }
            "eps-degenerate" => Ok(DiffOperator::eps_degenerate(dim)),
            other => Err(Error::InvalidParameter(alloc::format!(
                "unknown preset '{other}' (laplacian, heat, cauchy-riemann, eps-degenerate)"
            ))),
        }
    }

    /// Formal adjoint for the pairing `ε^{Σs} Σ f g`: `D_j ↦ -D̄_j`,
    /// `D̄_j ↦ -D_j`.
    pub fn adjoint(&self) -> DiffOperator {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let flips = t.gamma.order() + t.delta.order();
                let sign = if flips % 2 == 0 { 1.0 } else { -1.0 };
                Term { gamma: t.delta.clone(), delta: t.gamma.clone(), coeff: t.coeff * sign }
            })
            .collect();
        DiffOperator::new(self.scaling.clone(), terms).expect("adjoint preserves well-formedness")
    }

    /// Stencil of the operator on `Λ_ε`.
    pub fn stencil(&self, eps: f64) -> Stencil {
        let steps: Vec<f64> = self.scaling.weights().iter().map(|&s| Float::powi(eps, s as i32)).collect();
        let mut acc = Stencil::empty(self.dim());
        for t in &self.terms {
            acc.add_scaled(&Stencil::difference(&t.gamma, &t.delta, &steps), t.coeff);
        }
        acc.prune();
        acc
    }

    /// `L_ε f` on the sub-window where the stencil fits.
    pub fn apply(&self, f: &Field) -> Result<Field> {
        check_dim(self.dim(), f.window().dim())?;
        if f.window().scaling() != &self.scaling {
            return Err(Error::InvalidParameter("field and operator use different scalings".into()));
        }
        self.stencil(f.window().eps()).apply(f)
    }

    /// One line per term in the operator text format.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&alloc::format!(
                "gamma={:?} delta={:?} re={} im={}\n",
                t.gamma.0, t.delta.0, t.coeff.re, t.coeff.im
            ));
        }
        out
    }
}

/// Finite map from lattice offsets to complex weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    dim: usize,
    entries: BTreeMap<Vec<i64>, C64>,
}

impl Stencil {
    pub fn empty(dim: usize) -> Self {
        Stencil { dim, entries: BTreeMap::new() }
    }

    /// `D^γ D̄^δ` for the given per-axis steps.
    pub fn difference(gamma: &MultiIndex, delta: &MultiIndex, steps: &[f64]) -> Self {
        let d = steps.len();
        // per-axis Laurent polynomials in the shift, exponent offset by -δ_j
        let mut axes: Vec<(i64, Vec<f64>)> = Vec::with_capacity(d);
        for j in 0..d {
            let (a, b) = (gamma.0[j] as usize, delta.0[j] as usize);
            let fwd: Vec<f64> = (0..=a).map(|k| binom(a, k) * if (a - k) % 2 == 0 { 1.0 } else { -1.0 }).collect();
            // (1 - τ^{-1})^b = Σ_k C(b,k) (-1)^k τ^{-k}; stored from τ^{-b} up
            let bwd: Vec<f64> = (0..=b).map(|i| {
                let k = b - i;
                binom(b, k) * if k % 2 == 0 { 1.0 } else { -1.0 }
            }).collect();
            let mut poly = alloc::vec![0.0; a + b + 1];
            for (p, x) in fwd.iter().enumerate() {
                for (q, y) in bwd.iter().enumerate() {
                    poly[p + q] += x * y;
                }
            }
            let scale = Float::powi(steps[j], -((a + b) as i32));
            for v in poly.iter_mut() {
                *v *= scale;
            }
            axes.push((-(b as i64), poly));
        }
        let mut entries = BTreeMap::new();
        let mut offset = alloc::vec![0i64; d];
        fn rec(j: usize, w: f64, axes: &[(i64, Vec<f64>)], offset: &mut Vec<i64>, out: &mut BTreeMap<Vec<i64>, C64>) {
            if j == axes.len() {
                if w != 0.0 {
                    *out.entry(offset.clone()).or_insert(C64::new(0.0, 0.0)) += C64::new(w, 0.0);
                }
                return;
            }
            let (start, ref poly) = axes[j];
            for (k, &c) in poly.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                offset[j] = start + k as i64;
                rec(j + 1, w * c, axes, offset, out);
            }
            offset[j] = 0;
        }
        rec(0, 1.0, &axes, &mut offset, &mut entries);
        Stencil { dim: d, entries }
    }

    fn add_scaled(&mut self, other: &Stencil, c: C64) {
        for (k, v) in &other.entries {
            *self.entries.entry(k.clone()).or_insert(C64::new(0.0, 0.0)) += v * c;
        }
    }

    fn prune(&mut self) {
        let max = self.entries.values().fold(0.0f64, |m, v| m.max(v.norm()));
        self.entries.retain(|_, v| v.norm() > 1e-15 * max);
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<i64>, &C64)> {
        self.entries.iter()
    }

    /// Smallest and largest offset per axis (zero when empty).
    pub fn reach(&self) -> (Vec<i64>, Vec<i64>) {
        let mut lo = alloc::vec![0i64; self.dim];
        let mut hi = alloc::vec![0i64; self.dim];
        for k in self.entries.keys() {
            for j in 0..self.dim {
                lo[j] = lo[j].min(k[j]);
                hi[j] = hi[j].max(k[j]);
            }
        }
        (lo, hi)
    }

    /// Output window of `apply` on `w`.
    pub fn output_window(&self, w: &LatticeWindow) -> Result<LatticeWindow> {
        let (lo, hi) = self.reach();
        let below: Vec<i64> = lo.iter().map(|v| -v).collect();
        w.shrink(&below, &hi)
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        let out_w = self.output_window(f.window())?;
        let values = self.apply_values(f.window(), f.values(), &out_w);
        Field::new(out_w, values)
    }

    /// Applies the stencil to row-major `values` on `w`, producing values on
    /// `out` (a sub-window on which the stencil fits).
    pub fn apply_values(&self, w: &LatticeWindow, values: &[C64], out: &LatticeWindow) -> Vec<C64> {
        let shape = w.shape();
        let mut strides = alloc::vec![1i64; shape.len()];
        for j in (0..shape.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * shape[j + 1] as i64;
        }
        let taps: Vec<(i64, C64)> = self
            .entries
            .iter()
            .map(|(k, v)| (k.iter().zip(&strides).map(|(a, b)| a * b).sum::<i64>(), *v))
            .collect();
        let mut res = Vec::with_capacity(out.len());
        for idx in out.indices() {
            let base = w.linear(&idx).expect("output window inside input") as i64;
            let mut acc = C64::new(0.0, 0.0);
            for &(off, c) in &taps {
                acc += values[(base + off) as usize] * c;
            }
            res.push(acc);
        }
        res
    }
}

fn binom(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// The discrete Laplacian in neighbour form
/// `ε^{-2} Σ_{d(y,z)=ε} (u(z) - u(y))` on isotropic lattices.
pub fn laplacian_neighbour_form(f: &Field) -> Result<Field> {
    let w = f.window();
    if !w.scaling().is_isotropic() {
        return Err(Error::InvalidParameter("neighbour form needs isotropic scaling".into()));
    }
    let d = w.dim();
    let one = alloc::vec![1i64; d];
    let out = w.shrink(&one, &one)?;
    let inv = 1.0 / (w.eps() * w.eps());
    let mut values = Vec::with_capacity(out.len());
    for idx in out.indices() {
        let centre = f.get(&idx).unwrap();
        let mut acc = C64::new(0.0, 0.0);
        let mut nb = idx.clone();
        for j in 0..d {
            for step in [-1i64, 1] {
                nb[j] = idx[j] + step;
                acc += f.get(&nb).unwrap() - centre;
            }
            nb[j] = idx[j];
        }
        values.push(acc * inv);
    }
    Field::new(out, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constants_are_annihilated() {
        for op in [DiffOperator::laplacian(2), DiffOperator::heat(2).unwrap(), DiffOperator::cauchy_riemann()] {
            let w = LatticeWindow::centered(op.scaling().clone(), 0.5, 3).unwrap();
            let f = Field::from_fn(w, |_, _| C64::new(2.5, -1.0));
            assert!(op.apply(&f).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_quadratic() {
        let w = LatticeWindow::centered(Scaling::isotropic(2), 1.0, 4).unwrap();
        let f = Field::from_fn(w, |x, _| C64::new(x[0] * x[0] - x[1] * x[1], 0.0));
        let out = DiffOperator::laplacian(2).apply(&f).unwrap();
        assert!(out.values().iter().all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn laplacian_forms_agree() {
        let w = LatticeWindow::centered(Scaling::isotropic(2), 1.0, 3).unwrap();
        let f = Field::from_fn(w, |_, k| C64::new(((k[0] * 7 + k[1] * 13) % 5) as f64, 0.0));
        let a = DiffOperator::laplacian(2).apply(&f).unwrap();
        let b = laplacian_neighbour_form(&f).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(DiffOperator::laplacian(3).adjoint(), DiffOperator::laplacian(3));
        let h = DiffOperator::heat(3).unwrap();
        assert_eq!(h.adjoint().adjoint(), h);
    }

    #[test]
    fn rejects_inhomogeneous() {
        let s = Scaling::isotropic(1);
        let terms = vec![
            Term { gamma: MultiIndex::new(vec![1]), delta: MultiIndex::new(vec![0]), coeff: C64::new(1.0, 0.0) },
            Term { gamma: MultiIndex::new(vec![1]), delta: MultiIndex::new(vec![1]), coeff: C64::new(1.0, 0.0) },
        ];
        assert!(DiffOperator::new(s.clone(), terms).is_err());
        assert!(DiffOperator::new(s, vec![]).is_err());
    }

    #[test]
    fn window_too_small() {
        let w = LatticeWindow::centered(Scaling::isotropic(1), 1.0, 0).unwrap();
        let f = Field::zeros(w);
        assert!(matches!(DiffOperator::laplacian(1).apply(&f), Err(Error::Boundary(_))));
    }
}
