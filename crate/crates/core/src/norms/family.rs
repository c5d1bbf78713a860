//! Smooth test functions supported in the unit anisotropic ball.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::Scaling;

/// `ψ(t) = exp(-1/(1-t²))` on `|t| < 1`.
fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        Float::exp(-1.0 / (1.0 - t * t))
    }
}

/// Taylor coefficients at `t0` of `ψ` (`odd = false`) or `t ψ`, up to
/// order `k`.
fn taylor(t0: f64, k: usize, odd: bool) -> Vec<f64> {
    let n = k + 2;
    let mut u = alloc::vec![0.0; n];
    u[0] = 1.0 - t0 * t0;
    if n > 1 {
        u[1] = -2.0 * t0;
    }
    if n > 2 {
        u[2] = -1.0;
    }
    let mut r = alloc::vec![0.0; n];
    r[0] = 1.0 / u[0];
    for i in 1..n {
        let mut acc = 0.0;
        for j in 1..=i {
            acc += u[j] * r[i - j];
        }
        r[i] = -acc / u[0];
    }
    let g: Vec<f64> = r.iter().map(|v| -v).collect();
    let mut e = alloc::vec![0.0; n];
    e[0] = Float::exp(g[0]);
    for i in 1..n {
        let mut acc = 0.0;
        for j in 1..=i {
            acc += j as f64 * g[j] * e[i - j];
        }
        e[i] = acc / i as f64;
    }
    if odd {
        let mut o = alloc::vec![0.0; n];
        for i in 0..n {
            o[i] = t0 * e[i] + if i > 0 { e[i - 1] } else { 0.0 };
        }
        o.truncate(k + 1);
        o
    } else {
        e.truncate(k + 1);
        e
    }
}

/// `sup_t |f^{(r)}(t)|` for `r = 0..=k`, sampled on a fine grid.
fn derivative_sups(k: usize, odd: bool) -> Vec<f64> {
    const N: usize = 20_000;
    let mut sups = alloc::vec![0.0f64; k + 1];
    for i in 0..N {
        let t = -1.0 + (i as f64 + 0.5) * 2.0 / N as f64;
        let c = taylor(t, k, odd);
        let mut fact = 1.0;
        for r in 0..=k {
            if r > 0 {
                fact *= r as f64;
            }
            sups[r] = sups[r].max((c[r] * fact).abs());
        }
    }
    sups
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    /// `Π_j ψ(a_j y_j)`.
    Bump,
    /// `(a_i y_i) Π_j ψ(a_j y_j)`.
    Odd(usize),
}

/// `c · Π_j f_j(a_j y_j)` with `a_j = d^{s_j}`, which keeps the support box
/// inside the unit anisotropic ball.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub kind: TestKind,
    pub scale: f64,
    pub stretch: Vec<f64>,
}

impl TestFunction {
    pub fn eval(&self, y: &[f64]) -> f64 {
        let mut acc = self.scale;
        for (j, (&yj, &a)) in y.iter().zip(&self.stretch).enumerate() {
            let t = a * yj;
            let f = bump(t);
            if f == 0.0 {
                return 0.0;
            }
            acc *= f;
            if self.kind == TestKind::Odd(j) {
                acc *= t;
            }
        }
        acc
    }

    /// `Σ_{|β|<=k} sup |∂^β φ|` (anisotropic degree), from the factorised
    /// derivative sups.
    pub fn ck_norm(&self, scaling: &Scaling, k: u32) -> f64 {
        let top = k as usize;
        let even = derivative_sups(top, false);
        let odd = derivative_sups(top, true);
        let mut total = 0.0;
        for beta in scaling.indices_up_to(k as f64) {
            let mut p = self.scale;
            for (j, &b) in beta.0.iter().enumerate() {
                let table = if self.kind == TestKind::Odd(j) { &odd } else { &even };
                p *= Float::powi(self.stretch[j], b as i32) * table[b as usize];
            }
            total += p;
        }
        total
    }
}

/// Bump plus one odd modulation per axis, each normalised to unit `C^k`
/// norm. A fixed finite family, so negative norms computed with it are
/// lower bounds for the supremum over the whole unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunctionFamily {
    scaling: Scaling,
    k: u32,
    members: Vec<TestFunction>,
    lambda: Option<Vec<f64>>,
}

impl TestFunctionFamily {
    pub fn new(scaling: &Scaling, k: u32) -> Self {
        let d = scaling.dim();
        let stretch: Vec<f64> = scaling.weights().iter().map(|&s| Float::powi(d as f64, s as i32)).collect();
        let mut members = alloc::vec![TestFunction { kind: TestKind::Bump, scale: 1.0, stretch: stretch.clone() }];
        for j in 0..d {
            members.push(TestFunction { kind: TestKind::Odd(j), scale: 1.0, stretch: stretch.clone() });
        }
        for m in members.iter_mut() {
            // small safety factor for the sampled sups
            m.scale = 1.0 / (m.ck_norm(scaling, k) * 1.001);
        }
        TestFunctionFamily { scaling: scaling.clone(), k, members, lambda: None }
    }

    /// Family for a negative exponent `γ`, with `k = ⌈-γ⌉`.
    pub fn for_gamma(scaling: &Scaling, gamma: f64) -> Result<Self> {
        if !(gamma < 0.0) {
            return Err(Error::InvalidParameter("negative norms need gamma < 0".into()));
        }
        Ok(TestFunctionFamily::new(scaling, Float::ceil(-gamma) as u32))
    }

    /// Uses an explicit scale grid instead of the default geometric one.
    pub fn with_lambda_grid(mut self, grid: Vec<f64>) -> Result<Self> {
        if grid.is_empty() || grid.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidParameter("lambda grid needs positive finite entries".into()));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("lambda grid must be strictly increasing".into()));
        }
        self.lambda = Some(grid);
        Ok(self)
    }

    pub fn scaling(&self) -> &Scaling {
        &self.scaling
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn members(&self) -> &[TestFunction] {
        &self.members
    }

    pub fn lambda_grid(&self) -> Option<&[f64]> {
        self.lambda.as_deref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn taylor_matches_function() {
        let t0 = 0.3;
        let c = taylor(t0, 3, false);
        assert!((c[0] - bump(t0)).abs() < 1e-15);
        let h = 1e-5;
        let fd = (bump(t0 + h) - bump(t0 - h)) / (2.0 * h);
        assert!((c[1] - fd).abs() < 1e-8);
        let o = taylor(t0, 2, true);
        assert!((o[1] - (bump(t0) + t0 * c[1])).abs() < 1e-14);
    }

    #[test]
    fn members_supported_in_unit_ball() {
        let s = Scaling::new(vec![2, 1]).unwrap();
        let fam = TestFunctionFamily::new(&s, 1);
        assert_eq!(fam.members().len(), 3);
        for m in fam.members() {
            assert!(m.ck_norm(&s, 1) <= 1.0);
            for &(a, b) in &[(0.26, 0.0), (0.0, 0.51), (0.2, 0.55)] {
                // outside the support box |y_j| < d^{-s_j}
                assert_eq!(m.eval(&[a, b]), 0.0);
            }
            // the support box lies in the unit ball
            let corner = [0.25f64, 0.5];
            assert!(corner[0].sqrt() + corner[1] <= 1.0 + 1e-15);
        }
        assert!(fam.members()[0].eval(&[0.0, 0.0]) > 0.0);
    }
}
