//! Weights `(κ_β, ε_{|β|}, ρ_β)` for the absorption argument behind the
//! coefficient bounds, and extraction of comparison-polynomial coefficients
//! by probing a germ along lattice rays.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{MultiIndex, Scaling};
use crate::germs::Germ;
use crate::linalg::{Lu, Matrix};
use crate::C64;

/// `A = {β : |β| <= η}` in the order `≺`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSetA {
    scaling: Scaling,
    indices: Vec<MultiIndex>,
}

impl IndexSetA {
    pub fn new(s: &Scaling, eta: f64) -> Result<Self> {
        let indices = s.indices_up_to(eta);
        if indices.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        Ok(IndexSetA { scaling: s.clone(), indices })
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn degree(&self, b: &MultiIndex) -> u32 {
        self.scaling.degree_unchecked(b)
    }

    /// First axis where two indices of equal degree differ.
    pub fn first_differing(a: &MultiIndex, b: &MultiIndex) -> Option<usize> {
        a.0.iter().zip(&b.0).position(|(x, y)| x != y)
    }

    pub fn precedes(&self, a: &MultiIndex, b: &MultiIndex) -> bool {
        self.scaling.precedes_cmp(a, b) == core::cmp::Ordering::Less
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSystem {
    pub scaling: Scaling,
    pub indices: Vec<MultiIndex>,
    pub kappa: Vec<f64>,
    /// `ε_L` per degree level `L`.
    pub eps_level: BTreeMap<u32, u64>,
    pub rho: Vec<Vec<u64>>,
    pub delta: f64,
}

/// `ρ^{s(γ-β)} = Π_j ρ_j^{s_j (γ_j - β_j)}`.
fn rho_pow(s: &Scaling, rho: &[u64], gamma: &MultiIndex, beta: &MultiIndex) -> f64 {
    let mut acc = 1.0;
    for j in 0..s.dim() {
        let e = s.weight(j) as i64 * (gamma.0[j] as i64 - beta.0[j] as i64);
        if e != 0 {
            acc *= Float::powi(rho[j] as f64, e as i32);
        }
    }
    acc
}

impl WeightSystem {
    fn level(&self, b: &MultiIndex) -> u32 {
        self.scaling.degree_unchecked(b)
    }

    /// `Σ_{β≠γ} κ_β ε_{|β|}^{|γ|-|β|} ρ_β^{s(γ-β)}` for the `i`-th index `γ`.
    pub fn absorption_sum(&self, i: usize) -> f64 {
        let gamma = &self.indices[i];
        let lg = self.level(gamma) as i32;
        let mut sum = 0.0;
        for (k, beta) in self.indices.iter().enumerate() {
            if k == i {
                continue;
            }
            let lb = self.level(beta);
            let e = self.eps_level[&lb] as f64;
            sum += self.kappa[k] * Float::powi(e, lg - lb as i32) * rho_pow(&self.scaling, &self.rho[k], gamma, beta);
        }
        sum
    }

    /// Largest `absorption_sum(γ) / (δ κ_γ)`; at most one when the system is
    /// valid.
    pub fn worst_ratio(&self) -> f64 {
        (0..self.indices.len())
            .map(|i| self.absorption_sum(i) / (self.delta * self.kappa[i]))
            .fold(0.0, f64::max)
    }

    /// Direct check of the absorption inequality for every `γ`, allowing
    /// relative rounding `1e-12`.
    pub fn verify(&self) -> bool {
        self.worst_ratio() <= 1.0 + 1e-12
    }
}

/// Smallest power of two `>= max(1, v)`.
fn pow2_at_least(v: f64) -> f64 {
    let mut k = 1.0;
    while k < v {
        k *= 2.0;
    }
    k
}

/// Smallest positive integer `n` with `f(n)` true, for `f` monotone.
fn smallest_integer<F: Fn(f64) -> bool>(guess: f64, f: F) -> Result<u64> {
    let mut n = if guess.is_finite() { Float::ceil(guess).max(1.0) } else { 1.0 };
    if n > 9.0e15 {
        return Err(Error::NoConvergence("weight exceeds integer range"));
    }
    while n > 1.0 && f(n - 1.0) {
        n -= 1.0;
    }
    while !f(n) {
        n += 1.0;
        if n > 9.0e15 {
            return Err(Error::NoConvergence("weight exceeds integer range"));
        }
    }
    Ok(n as u64)
}

/// Inductive construction in the order `≺`: `κ_γ` as the smallest power of
/// two covering all earlier indices, `ρ_γ` component by component from the
/// last first-differing axis down, and `ε_L` once level `L` is complete.
/// Every inequality uses the share `δ / (|A| - 1)`.
pub fn construct_weights(s: &Scaling, eta: f64, delta: f64) -> Result<WeightSystem> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter("eta must be positive".into()));
    }
    let set = IndexSetA::new(s, eta)?;
    let a = set.indices().to_vec();
    let n = a.len();
    let d = s.dim();
    let mut kappa = alloc::vec![1.0; n];
    let mut rho = alloc::vec![alloc::vec![1u64; d]; n];
    let mut eps_level: BTreeMap<u32, u64> = BTreeMap::new();
    eps_level.insert(0, 1);
    if n == 1 {
        return Ok(WeightSystem { scaling: s.clone(), indices: a, kappa, eps_level, rho, delta });
    }
    let share = delta / (n - 1) as f64;
    let deg: Vec<u32> = a.iter().map(|b| set.degree(b)).collect();
    for g in 1..n {
        let lg = deg[g];
        // κ_γ
        let mut need = 1.0f64;
        for b in 0..g {
            let base = kappa[b] * rho_pow(s, &rho[b], &a[g], &a[b]);
            let v = if deg[b] < lg { base * Float::powi(eps_level[&deg[b]] as f64, (lg - deg[b]) as i32) } else { base };
            need = need.max(v / share);
        }
        let mut k = pow2_at_least(need);
        // the powers of two are exact, so only rounding in `need` can bite
        while (0..g).any(|b| {
            let base = kappa[b] * rho_pow(s, &rho[b], &a[g], &a[b]);
            let v = if deg[b] < lg { base * Float::powi(eps_level[&deg[b]] as f64, (lg - deg[b]) as i32) } else { base };
            v > share * k
        }) {
            k *= 2.0;
        }
        kappa[g] = k;
        // ρ_γ
        let same: Vec<(usize, usize)> = (0..g)
            .filter(|&b| deg[b] == lg)
            .map(|b| (b, IndexSetA::first_differing(&a[b], &a[g]).expect("distinct indices")))
            .collect();
        if let Some(top) = same.iter().map(|&(_, l)| l).max() {
            for l in (0..=top).rev() {
                let group: Vec<usize> = same.iter().filter(|&&(_, fl)| fl == l).map(|&(b, _)| b).collect();
                if group.is_empty() {
                    continue;
                }
                // components above l are fixed; exponent on ρ_l is negative
                let ok = |r: f64, b: usize, rho_g: &[u64]| {
                    let mut prod = kappa[g];
                    for j in l..d {
                        let e = s.weight(j) as i32 * (a[b].0[j] as i32 - a[g].0[j] as i32);
                        let base = if j == l { r } else { rho_g[j] as f64 };
                        prod *= Float::powi(base, e);
                    }
                    prod <= share * kappa[b]
                };
                let mut guess = 1.0f64;
                for &b in &group {
                    let mut rest = kappa[g];
                    for j in l + 1..d {
                        let e = s.weight(j) as i32 * (a[b].0[j] as i32 - a[g].0[j] as i32);
                        rest *= Float::powi(rho[g][j] as f64, e);
                    }
                    let e = (s.weight(l) * (a[g].0[l] - a[b].0[l])) as f64;
                    guess = guess.max(Float::powf(rest / (share * kappa[b]), 1.0 / e));
                }
                let rho_g = rho[g].clone();
                rho[g][l] = smallest_integer(guess, |r| group.iter().all(|&b| ok(r, b, &rho_g)))?;
            }
        }
        // ε at the end of a level
        if g + 1 == n || deg[g + 1] != lg {
            let level: Vec<usize> = (0..=g).filter(|&m| deg[m] == lg).collect();
            let lower: Vec<usize> = (0..g).filter(|&b| deg[b] < lg).collect();
            let ok = |e: f64| {
                level.iter().all(|&m| {
                    lower.iter().all(|&b| {
                        kappa[m] * Float::powi(e, deg[b] as i32 - lg as i32) * rho_pow(s, &rho[m], &a[b], &a[m])
                            <= share * kappa[b]
                    })
                })
            };
            let mut guess = 1.0f64;
            for &m in &level {
                for &b in &lower {
                    let v = kappa[m] * rho_pow(s, &rho[m], &a[b], &a[m]) / (share * kappa[b]);
                    guess = guess.max(Float::powf(v, 1.0 / (lg - deg[b]) as f64));
                }
            }
            eps_level.insert(lg, smallest_integer(guess, ok)?);
        }
    }
    Ok(WeightSystem { scaling: s.clone(), indices: a, kappa, eps_level, rho, delta })
}

/// Coefficients of the comparison polynomial recovered from probes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    /// `ν_β` for `P(z) = Σ ν_β (z - y)^β` with ordinary powers.
    pub coefficients: Vec<(MultiIndex, C64)>,
    /// `|ν_β| / d(x,y)^{η-|β|}`.
    pub ratios: Vec<f64>,
    /// Probe points (window indices), one per `β`.
    pub probes: Vec<Vec<i64>>,
    /// Physical rounding offset of each probe.
    pub offsets: Vec<Vec<f64>>,
    /// `max_z |U_x(z) - U_y(z) - P(z)|` over the window.
    pub residual: f64,
}

/// One probe per `β ∈ A` at `z = y + Σ_j (ε_{|β|} ρ_{βj} d(x,y))^{s_j} e_j`,
/// rounded to the lattice, then `ν` from the square system
/// `P(z_β) = U_x(z_β) - U_y(z_β)`.
pub fn probe_coefficients(u: &Germ, x: &[i64], y: &[i64], eta: f64, alpha: f64, weights: &WeightSystem) -> Result<ProbeReport> {
    if !(alpha > 0.0 && alpha < eta) {
        return Err(Error::InvalidParameter("need 0 < alpha < eta".into()));
    }
    let w = u.window();
    let s = w.scaling();
    if *s != weights.scaling {
        return Err(Error::InvalidParameter("weights use a different scaling".into()));
    }
    let a = s.indices_up_to(eta);
    if a != weights.indices {
        return Err(Error::InvalidParameter("weights were built for a different eta".into()));
    }
    let xb = u.base_position(x).ok_or_else(|| Error::Domain("x is not a base point".into()))?;
    let yb = u.base_position(y).ok_or_else(|| Error::Domain("y is not a base point".into()))?;
    if xb == yb {
        return Err(Error::InvalidParameter("probing needs x != y".into()));
    }
    let d = w.dim();
    let yc = w.coords(y);
    let dxy = s.distance_slices(&w.coords(x), &yc);
    let n = a.len();
    let mut probes = Vec::with_capacity(n);
    let mut offsets = Vec::with_capacity(n);
    let mut m = Matrix::zeros(n, n);
    let mut rhs_re = Vec::with_capacity(n);
    let mut rhs_im = Vec::with_capacity(n);
    for (i, beta) in a.iter().enumerate() {
        let e = weights.eps_level[&s.degree_unchecked(beta)] as f64;
        let mut idx = Vec::with_capacity(d);
        let mut off = Vec::with_capacity(d);
        for j in 0..d {
            let target = yc[j] + Float::powi(e * weights.rho[i][j] as f64 * dxy, s.weight(j) as i32);
            let k = Float::round(target / w.step(j));
            idx.push(k as i64);
            off.push(k * w.step(j) - target);
        }
        if !w.contains(&idx) {
            return Err(Error::WindowTooSmall(alloc::format!("probe {idx:?} for {:?} lies outside the window", beta.0)));
        }
        let zc = w.coords(&idx);
        for (c, g) in a.iter().enumerate() {
            let mut v = 1.0;
            for j in 0..d {
                v *= Float::powi(zc[j] - yc[j], g.0[j] as i32);
            }
            m[(i, c)] = v;
        }
        let diff = u.value(xb, &idx).unwrap() - u.value(yb, &idx).unwrap();
        rhs_re.push(diff.re);
        rhs_im.push(diff.im);
        probes.push(idx);
        offsets.push(off);
    }
    // column scaling keeps the pivot test meaningful across degrees
    let mut scale = alloc::vec![1.0; n];
    for (c, sc) in scale.iter_mut().enumerate() {
        let v = (0..n).fold(0.0f64, |acc, r| acc.max(m[(r, c)].abs()));
        if v > 0.0 {
            *sc = v;
            for r in 0..n {
                m[(r, c)] /= v;
            }
        }
    }
    let lu = Lu::new(&m, 1e-12).ok_or(Error::DegenerateProbe)?;
    let re = lu.solve(&rhs_re);
    let im = lu.solve(&rhs_im);
    let nu: Vec<C64> = (0..n).map(|c| C64::new(re[c], im[c]) / scale[c]).collect();
    let ratios = a
        .iter()
        .zip(&nu)
        .map(|(b, v)| v.norm() / Float::powf(dxy, eta - s.degree_unchecked(b) as f64))
        .collect();
    let coords = w.all_coords();
    let mut residual = 0.0f64;
    for (lz, z) in coords.chunks(d).enumerate() {
        let mut p = C64::new(0.0, 0.0);
        for (g, c) in a.iter().zip(&nu) {
            let mut v = 1.0;
            for j in 0..d {
                v *= Float::powi(z[j] - yc[j], g.0[j] as i32);
            }
            p += c * v;
        }
        residual = residual.max((u.slice(xb)[lz] - u.slice(yb)[lz] - p).norm());
    }
    Ok(ProbeReport { coefficients: a.into_iter().zip(nu).collect(), ratios, probes, offsets, residual })
}
