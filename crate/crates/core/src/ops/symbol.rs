//! Continuum and discrete Fourier symbols.

use alloc::vec::Vec;

use num_traits::Float;

use super::DiffOperator;
use crate::linalg::{Lu, Matrix};
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

impl DiffOperator {
    /// `Σ a_{γ,δ} (iξ)^{γ+δ}`.
    pub fn continuum_symbol(&self, xi: &[f64]) -> C64 {
        self.continuum_with_grad(xi, false).0
    }

    /// `Σ |a_{γ,δ}| |ξ^{γ+δ}|`, the size of the symbol without cancellation.
    pub fn continuum_magnitude(&self, xi: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coeff.norm()
                    * (0..xi.len())
                        .map(|j| Float::powi(xi[j].abs(), (t.gamma.0[j] + t.delta.0[j]) as i32))
                        .product::<f64>()
            })
            .sum()
    }

    pub(crate) fn continuum_with_grad(&self, xi: &[f64], grad: bool) -> (C64, Vec<C64>) {
        let d = xi.len();
        let f: Vec<C64> = xi.iter().map(|&x| I * x).collect();
        let mut val = C64::new(0.0, 0.0);
        let mut g = alloc::vec![C64::new(0.0, 0.0); if grad { d } else { 0 }];
        for t in &self.terms {
            let pw: Vec<u32> = (0..d).map(|j| t.gamma.0[j] + t.delta.0[j]).collect();
            let factors: Vec<C64> = (0..d).map(|j| f[j].powi(pw[j] as i32)).collect();
            val += t.coeff * factors.iter().product::<C64>();
            if grad {
                for j in 0..d {
                    if pw[j] == 0 {
                        continue;
                    }
                    let mut p = t.coeff * I * pw[j] as f64 * f[j].powi(pw[j] as i32 - 1);
                    for (k, fk) in factors.iter().enumerate() {
                        if k != j {
                            p *= fk;
                        }
                    }
                    g[j] += p;
                }
            }
        }
        (val, g)
    }

    /// `Σ a_{γ,δ} (iξ^ε_θ)^γ (i conj ξ^ε_θ)^δ` with
    /// `iξ^ε_{θ,j} = ε^{-s_j}(e^{iε^{s_j}θ_j} - 1)` and
    /// `i conj ξ^ε_{θ,j} = ε^{-s_j}(1 - e^{-iε^{s_j}θ_j})`.
    pub fn discrete_symbol(&self, eps: f64, theta: &[f64]) -> C64 {
        self.discrete_with_grad(eps, theta, false).0
    }

    /// `Σ |a| |iξ^ε|^γ |i conj ξ^ε|^δ`.
    pub fn discrete_magnitude(&self, eps: f64, theta: &[f64]) -> f64 {
        let (f, g, _, _) = self.factors(eps, theta);
        self.terms
            .iter()
            .map(|t| {
                t.coeff.norm()
                    * (0..theta.len())
                        .map(|j| {
                            Float::powi(f[j].norm(), t.gamma.0[j] as i32) * Float::powi(g[j].norm(), t.delta.0[j] as i32)
                        })
                        .product::<f64>()
            })
            .sum()
    }

    fn factors(&self, eps: f64, theta: &[f64]) -> (Vec<C64>, Vec<C64>, Vec<C64>, Vec<C64>) {
        let d = theta.len();
        let (mut f, mut g, mut fp, mut gp) = (Vec::with_capacity(d), Vec::with_capacity(d), Vec::with_capacity(d), Vec::with_capacity(d));
        for j in 0..d {
            let h = Float::powi(eps, self.scaling.weight(j) as i32);
            let e = C64::new(0.0, h * theta[j]).exp();
            let em = e.conj();
            f.push((e - 1.0) / h);
            g.push((-em + 1.0) / h);
            fp.push(I * e);
            gp.push(I * em);
        }
        (f, g, fp, gp)
    }

    pub(crate) fn discrete_with_grad(&self, eps: f64, theta: &[f64], grad: bool) -> (C64, Vec<C64>) {
        let d = theta.len();
        let (f, g, fp, gp) = self.factors(eps, theta);
        let mut val = C64::new(0.0, 0.0);
        let mut gr = alloc::vec![C64::new(0.0, 0.0); if grad { d } else { 0 }];
        for t in &self.terms {
            let per: Vec<C64> =
                (0..d).map(|j| f[j].powi(t.gamma.0[j] as i32) * g[j].powi(t.delta.0[j] as i32)).collect();
            val += t.coeff * per.iter().product::<C64>();
            if grad {
                for j in 0..d {
                    let (a, b) = (t.gamma.0[j] as i32, t.delta.0[j] as i32);
                    if a + b == 0 {
                        continue;
                    }
                    let mut dj = C64::new(0.0, 0.0);
                    if a > 0 {
                        dj += fp[j] * a as f64 * f[j].powi(a - 1) * g[j].powi(b);
                    }
                    if b > 0 {
                        dj += gp[j] * b as f64 * f[j].powi(a) * g[j].powi(b - 1);
                    }
                    let mut p = t.coeff * dj;
                    for (k, pk) in per.iter().enumerate() {
                        if k != j {
                            p *= pk;
                        }
                    }
                    gr[j] += p;
                }
            }
        }
        (val, gr)
    }
}

/// `(ε/ε₀)^s θ`, the frequency on `Λ̂_{ε₀}` matching `θ ∈ Λ̂_ε`.
pub fn symbol_scale(scaling: &crate::Scaling, eps: f64, eps0: f64, theta: &[f64]) -> Vec<f64> {
    let r = eps / eps0;
    theta.iter().enumerate().map(|(j, t)| t * Float::powi(r, scaling.weight(j) as i32)).collect()
}

/// `|ξ|^s` (Euclidean modulus).
pub fn fractional_symbol(s_exp: f64, xi: &[f64]) -> f64 {
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    if r2 == 0.0 {
        0.0
    } else {
        Float::powf(Float::sqrt(r2), s_exp)
    }
}

/// Levenberg–Marquardt descent on `|F|²` for `F: R^d → C` given value and
/// gradient. `project` is applied after every accepted step.
pub(crate) fn levenberg_marquardt<F, P>(mut x: Vec<f64>, eval: F, project: P, iters: usize) -> (Vec<f64>, C64)
where
    F: Fn(&[f64]) -> (C64, Vec<C64>),
    P: Fn(&mut Vec<f64>),
{
    let d = x.len();
    let (mut fx, mut gx) = eval(&x);
    let mut mu = 1e-3;
    for _ in 0..iters {
        if fx.norm() == 0.0 {
            break;
        }
        // J rows: Re and Im parts of the gradient
        let mut jtj = Matrix::zeros(d, d);
        let mut jtr = alloc::vec![0.0; d];
        for a in 0..d {
            for b in 0..d {
                jtj[(a, b)] = gx[a].re * gx[b].re + gx[a].im * gx[b].im;
            }
            jtr[a] = gx[a].re * fx.re + gx[a].im * fx.im;
        }
        let diag = (0..d).map(|a| jtj[(a, a)]).fold(0.0f64, f64::max).max(1e-300);
        let mut improved = false;
        for _ in 0..30 {
            let mut m = jtj.clone();
            for a in 0..d {
                m[(a, a)] += mu * diag;
            }
            let Some(lu) = Lu::new(&m, 1e-300) else {
                mu *= 10.0;
                continue;
            };
            let step = lu.solve(&jtr);
            let mut trial: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - s).collect();
            project(&mut trial);
            let (ft, gt) = eval(&trial);
            if ft.norm() < fx.norm() {
                let moved = x.iter().zip(&trial).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                x = trial;
                fx = ft;
                gx = gt;
                mu = (mu * 0.3).max(1e-15);
                improved = moved > 0.0;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (x, fx)
}

/// Wraps `θ` into the dual torus `Π [-π ε^{-s_j}, π ε^{-s_j})`.
pub(crate) fn wrap_torus(op: &DiffOperator, eps: f64, theta: &mut [f64]) {
    for (j, t) in theta.iter_mut().enumerate() {
        let period = 2.0 * core::f64::consts::PI / Float::powi(eps, op.scaling().weight(j) as i32);
        let half = 0.5 * period;
        *t = num_traits::Euclid::rem_euclid(&(*t + half), &period) - half;
    }
}

/// Local minimisation of `|L̂_ε|` from `theta0`; returns the refined point
/// and the symbol there.
pub fn refine_zero(op: &DiffOperator, eps: f64, theta0: &[f64]) -> (Vec<f64>, C64) {
    levenberg_marquardt(
        theta0.to_vec(),
        |t| op.discrete_with_grad(eps, t, true),
        |t| wrap_torus(op, eps, t),
        200,
    )
}
