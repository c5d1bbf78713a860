//! Symbol scans deciding ellipticity.
//!
//! Both scans work with the cancellation ratio `|L̂| / Σ|a||monomial|`,
//! which is homogeneous of degree zero, lies in `[0, 1]` and vanishes
//! exactly at zeros of the symbol. A scan is certified elliptic when the
//! smallest sampled ratio exceeds the largest jump of the ratio between
//! neighbouring samples.

use alloc::vec::Vec;

use num_traits::Float;

use super::symbol::{levenberg_marquardt, wrap_torus};
use super::DiffOperator;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Elliptic,
    NotElliptic,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Elliptic => "elliptic",
            Verdict::NotElliptic => "not-elliptic",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolCheck {
    pub verdict: Verdict,
    /// Smallest cancellation ratio found.
    pub min_ratio: f64,
    /// Largest ratio jump between neighbouring samples.
    pub modulus: f64,
    /// Frequency realising `min_ratio` (a zero for `NotElliptic`).
    pub witness: Vec<f64>,
    pub symbol: C64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticityReport {
    pub continuum: SymbolCheck,
    pub discrete: SymbolCheck,
    pub overall: Verdict,
    pub eps: f64,
    pub resolution: usize,
}

const ZERO_RATIO: f64 = 1e-12;

fn ratio(value: C64, magnitude: f64) -> f64 {
    if magnitude > 0.0 {
        value.norm() / magnitude
    } else {
        0.0
    }
}

fn sphere_point(op: &DiffOperator, k: &[i64], n: i64) -> Vec<f64> {
    k.iter()
        .enumerate()
        .map(|(j, &kj)| {
            let u = kj as f64 / n as f64;
            u.signum() * Float::powi(u.abs(), op.scaling().weight(j) as i32)
        })
        .collect()
}

fn project_sphere(op: &DiffOperator, xi: &mut [f64]) {
    let rho: f64 = xi
        .iter()
        .enumerate()
        .map(|(j, x)| crate::geometry::axis_root(x.abs(), op.scaling().weight(j)))
        .sum();
    if rho > 0.0 {
        for (j, x) in xi.iter_mut().enumerate() {
            *x /= Float::powi(rho, op.scaling().weight(j) as i32);
        }
    }
}

fn l1_sphere(d: usize, n: i64) -> Vec<Vec<i64>> {
    fn rec(j: usize, d: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if j == d - 1 {
            cur.push(left);
            out.push(cur.clone());
            if left != 0 {
                *cur.last_mut().unwrap() = -left;
                out.push(cur.clone());
            }
            cur.pop();
            return;
        }
        for a in 0..=left {
            for s in [1i64, -1] {
                if a == 0 && s == -1 {
                    continue;
                }
                cur.push(s * a);
                rec(j + 1, d, left - a, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(0, d, n, &mut Vec::new(), &mut out);
    out
}

/// Samples the anisotropic unit sphere `Σ|ξ_j|^{1/s_j} = 1` through the
/// lattice points of the ℓ¹ sphere of radius `resolution`.
pub fn continuum_ellipticity(op: &DiffOperator, resolution: usize) -> SymbolCheck {
    let d = op.dim();
    let n = resolution.max(2) as i64;
    let pts = l1_sphere(d, n);
    let q_at = |k: &[i64]| {
        let xi = sphere_point(op, k, n);
        let v = op.continuum_symbol(&xi);
        (ratio(v, op.continuum_magnitude(&xi)), v, xi)
    };
    let mut best = (f64::INFINITY, C64::new(0.0, 0.0), Vec::new());
    let mut modulus = 0.0f64;
    for k in &pts {
        let (q, v, xi) = q_at(k);
        if q < best.0 {
            best = (q, v, xi);
        }
        for a in 0..d {
            for b in 0..d {
                if a == b {
                    continue;
                }
                let mut k2 = k.clone();
                k2[a] += 1;
                k2[b] -= 1;
                if k2.iter().map(|v| v.abs()).sum::<i64>() == n {
                    modulus = modulus.max((q - q_at(&k2).0).abs());
                }
            }
        }
    }
    let samples = pts.len();
    if best.0 <= ZERO_RATIO {
        return SymbolCheck { verdict: Verdict::NotElliptic, min_ratio: best.0, modulus, witness: best.2, symbol: best.1, samples };
    }
    let (xi, v) = levenberg_marquardt(
        best.2.clone(),
        |x| op.continuum_with_grad(x, true),
        |x| project_sphere(op, x),
        100,
    );
    let q = ratio(v, op.continuum_magnitude(&xi));
    if q <= ZERO_RATIO {
        return SymbolCheck { verdict: Verdict::NotElliptic, min_ratio: q, modulus, witness: xi, symbol: v, samples };
    }
    let (min_ratio, witness, symbol) = if q < best.0 { (q, xi, v) } else { (best.0, best.2, best.1) };
    let verdict = if best.0 > modulus { Verdict::Elliptic } else { Verdict::Inconclusive };
    SymbolCheck { verdict, min_ratio, modulus, witness, symbol, samples }
}

/// Ratio table of the discrete symbol on the `resolution^d` torus grid.
pub(crate) struct TorusScan {
    pub res: usize,
    pub ratios: Vec<f64>,
    pub excluded: Vec<bool>,
    pub modulus: f64,
}

impl TorusScan {
    pub fn theta(&self, op: &DiffOperator, eps: f64, lin: usize) -> Vec<f64> {
        let d = op.dim();
        let mut k = alloc::vec![0usize; d];
        let mut rest = lin;
        for j in (0..d).rev() {
            k[j] = rest % self.res;
            rest /= self.res;
        }
        k.iter()
            .enumerate()
            .map(|(j, &kj)| {
                let h = Float::powi(eps, op.scaling().weight(j) as i32);
                (kj as f64 - (self.res / 2) as f64) * 2.0 * core::f64::consts::PI / (self.res as f64 * h)
            })
            .collect()
    }

    fn neighbours(&self, d: usize, lin: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * d);
        let mut stride = 1;
        for _ in 0..d {
            let kj = (lin / stride) % self.res;
            let up = if kj + 1 == self.res { lin + stride - self.res * stride } else { lin + stride };
            let down = if kj == 0 { lin + (self.res - 1) * stride } else { lin - stride };
            out.push(up);
            out.push(down);
            stride *= self.res;
        }
        out
    }

    /// Non-excluded grid points that are no larger than their neighbours,
    /// smallest ratio first.
    pub fn local_minima(&self, d: usize) -> Vec<usize> {
        let mut mins: Vec<usize> = (0..self.ratios.len())
            .filter(|&i| !self.excluded[i])
            .filter(|&i| self.neighbours(d, i).iter().all(|&n| self.excluded[n] || self.ratios[i] <= self.ratios[n]))
            .collect();
        mins.sort_by(|&a, &b| self.ratios[a].partial_cmp(&self.ratios[b]).unwrap().then(a.cmp(&b)));
        mins
    }
}

pub(crate) fn scan_torus(op: &DiffOperator, eps: f64, resolution: usize) -> TorusScan {
    let d = op.dim();
    let res = resolution.max(8);
    let total = res.pow(d as u32);
    let mut scan = TorusScan { res, ratios: alloc::vec![0.0; total], excluded: alloc::vec![false; total], modulus: 0.0 };
    let mid = (res / 2) as i64;
    for lin in 0..total {
        let mut rest = lin;
        let mut near = true;
        for _ in 0..d {
            if ((rest % res) as i64 - mid).abs() > 1 {
                near = false;
            }
            rest /= res;
        }
        scan.excluded[lin] = near;
        let th = scan.theta(op, eps, lin);
        scan.ratios[lin] = ratio(op.discrete_symbol(eps, &th), op.discrete_magnitude(eps, &th));
    }
    let mut modulus = 0.0f64;
    for lin in 0..total {
        if scan.excluded[lin] {
            continue;
        }
        for n in scan.neighbours(d, lin) {
            if !scan.excluded[n] {
                modulus = modulus.max((scan.ratios[lin] - scan.ratios[n]).abs());
            }
        }
    }
    scan.modulus = modulus;
    scan
}

/// Whether `θ` is within half a grid cell of the origin in every axis.
pub(crate) fn near_origin(op: &DiffOperator, eps: f64, theta: &[f64], res: usize) -> bool {
    theta.iter().enumerate().all(|(j, t)| {
        let h = Float::powi(eps, op.scaling().weight(j) as i32);
        (t * h).abs() < core::f64::consts::PI / res as f64
    })
}

/// Scan of `θ ↦ L̂_ε(θ)` over the torus grid with the cells around the
/// origin removed, followed by local refinement of the grid minima.
pub fn discrete_ellipticity(op: &DiffOperator, eps: f64, resolution: usize) -> SymbolCheck {
    let d = op.dim();
    let scan = scan_torus(op, eps, resolution);
    let samples = scan.ratios.len();
    let minima = scan.local_minima(d);
    let Some(&first) = minima.first() else {
        return SymbolCheck {
            verdict: Verdict::Inconclusive,
            min_ratio: f64::NAN,
            modulus: scan.modulus,
            witness: alloc::vec![0.0; d],
            symbol: C64::new(0.0, 0.0),
            samples,
        };
    };
    let grid_min = scan.ratios[first];
    let mut best_th = scan.theta(op, eps, first);
    let mut best = (grid_min, op.discrete_symbol(eps, &best_th));
    for &lin in minima.iter().take(64) {
        if scan.ratios[lin] > grid_min + 2.0 * scan.modulus {
            break;
        }
        let th0 = scan.theta(op, eps, lin);
        let (th, v) = levenberg_marquardt(th0, |t| op.discrete_with_grad(eps, t, true), |t| wrap_torus(op, eps, t), 200);
        if near_origin(op, eps, &th, scan.res) {
            continue;
        }
        let q = ratio(v, op.discrete_magnitude(eps, &th));
        if q < best.0 {
            best = (q, v);
            best_th = th;
        }
    }
    let verdict = if best.0 <= ZERO_RATIO {
        Verdict::NotElliptic
    } else if grid_min > scan.modulus {
        Verdict::Elliptic
    } else {
        Verdict::Inconclusive
    };
    SymbolCheck { verdict, min_ratio: best.0, modulus: scan.modulus, witness: best_th, symbol: best.1, samples }
}

/// Both symbol conditions: discrete symbol nonzero off the origin and
/// continuum symbol nonzero off the origin.
pub fn is_discretely_elliptic(op: &DiffOperator, eps: f64, resolution: usize) -> EllipticityReport {
    let resolution = resolution.max(8);
    let continuum = continuum_ellipticity(op, resolution);
    let discrete = discrete_ellipticity(op, eps, resolution);
    let overall = match (continuum.verdict, discrete.verdict) {
        (Verdict::NotElliptic, _) | (_, Verdict::NotElliptic) => Verdict::NotElliptic,
        (Verdict::Elliptic, Verdict::Elliptic) => Verdict::Elliptic,
        _ => Verdict::Inconclusive,
    };
    EllipticityReport { continuum, discrete, overall, eps, resolution }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_is_elliptic() {
        for d in 1..=3 {
            let r = is_discretely_elliptic(&DiffOperator::laplacian(d), 1.0, 16);
            assert_eq!(r.overall, Verdict::Elliptic, "{r:?}");
        }
    }

    #[test]
    fn degenerate_fails_in_the_continuum() {
        let r = is_discretely_elliptic(&DiffOperator::eps_degenerate(2), 1.0, 32);
        assert_eq!(r.continuum.verdict, Verdict::NotElliptic);
        assert_eq!(r.overall, Verdict::NotElliptic);
        assert_ne!(r.discrete.verdict, Verdict::NotElliptic);
    }

    #[test]
    fn heat_is_elliptic() {
        let r = is_discretely_elliptic(&DiffOperator::heat(2).unwrap(), 1.0, 64);
        assert_eq!(r.overall, Verdict::Elliptic, "{r:?}");
    }

    #[test]
    fn cauchy_riemann_verdicts() {
        let r = is_discretely_elliptic(&DiffOperator::cauchy_riemann(), 1.0, 64);
        assert_eq!(r.continuum.verdict, Verdict::Elliptic, "{r:?}");
        assert_eq!(r.discrete.verdict, Verdict::NotElliptic);
        assert!(r.discrete.symbol.norm() < 1e-12);
    }

    #[test]
    fn sphere_enumeration() {
        assert_eq!(l1_sphere(2, 3).len(), 12);
        assert_eq!(l1_sphere(1, 5).len(), 2);
    }
}
