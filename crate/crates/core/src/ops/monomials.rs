//! Discrete monomials `k^{(γ)} = Π_j Π_{m<γ_j} (k_j - ε^{s_j} m)`.

use alloc::vec::Vec;

use num_traits::Float;

use super::Stencil;
use crate::error::{check_dim, Result};
use crate::geometry::{MultiIndex, Scaling};
use crate::window::{Field, LatticeWindow};
use crate::C64;

pub fn discrete_monomial(scaling: &Scaling, eps: f64, gamma: &MultiIndex, k: &[f64]) -> f64 {
    let mut acc = 1.0;
    for (j, &g) in gamma.0.iter().enumerate() {
        let h = Float::powi(eps, scaling.weight(j) as i32);
        for m in 0..g {
            acc *= k[j] - h * m as f64;
        }
    }
    acc
}

/// `k ↦ (k - x)^{(γ)}` tabulated on the window.
pub fn monomial_field(window: &LatticeWindow, gamma: &MultiIndex, center: &[f64]) -> Field {
    let s = window.scaling().clone();
    let eps = window.eps();
    Field::from_fn(window.clone(), |x, _| {
        let shifted: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
        C64::new(discrete_monomial(&s, eps, gamma, &shifted), 0.0)
    })
}

/// `D_ε^γ f` (forward differences) on the sub-window where it is defined.
pub fn forward_difference(f: &Field, gamma: &MultiIndex) -> Result<Field> {
    check_dim(f.window().dim(), gamma.dim())?;
    if gamma.is_zero() {
        return Ok(f.clone());
    }
    Stencil::difference(gamma, &MultiIndex::zeros(gamma.dim()), f.window().steps()).apply(f)
}

/// Largest deviation from `D^γ k^{(δ)} = δ!/(δ-γ)! k^{(δ-γ)}` (zero right
/// side when `γ ≰ δ`) over the window where the stencil fits.
pub fn monomial_rule_error(window: &LatticeWindow, gamma: &MultiIndex, delta: &MultiIndex) -> Result<f64> {
    let d = window.dim();
    let origin = alloc::vec![0.0; d];
    let f = monomial_field(window, delta, &origin);
    let lhs = forward_difference(&f, gamma)?;
    let s = window.scaling();
    let eps = window.eps();
    let mut err = 0.0f64;
    for (lin, idx) in lhs.window().indices().enumerate() {
        let x = lhs.window().coords(&idx);
        let rhs = match delta.checked_sub(gamma) {
            Some(rest) => delta.factorial() / rest.factorial() * discrete_monomial(s, eps, &rest, &x),
            None => 0.0,
        };
        err = err.max((lhs.values()[lin] - C64::new(rhs, 0.0)).norm());
    }
    Ok(err)
}
