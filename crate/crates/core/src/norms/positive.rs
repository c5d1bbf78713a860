//! Positive-order semi-norms: `G^η`, `G^{η,α}` and the recentred local
//! Hölder semi-norm, with their locally uniform variants.

use alloc::vec::Vec;

use num_traits::Float;

use super::{NormReport, PolyFit, Witness};
use crate::error::{Error, Result};
use crate::geometry::{MultiIndex, Point, Scaling};
use crate::germs::Germ;
use crate::linalg::Matrix;
use crate::minimax::chebyshev_complex;
use crate::window::{Field, LatticeWindow};
use crate::C64;

/// Polygonal directions used for complex-valued fits.
const DIRECTIONS: usize = 16;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("{name} must be positive and finite")));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    Ok(())
}

#[inline]
fn pow(v: f64, e: f64) -> f64 {
    if e == Float::round(e) && Float::abs(e) < 64.0 {
        Float::powi(v, e as i32)
    } else {
        Float::powf(v, e)
    }
}

/// Non-constant monomials of anisotropic degree `<= ⌊eta⌋`.
fn fit_basis(s: &Scaling, eta: f64) -> Vec<MultiIndex> {
    s.indices_up_to(Float::floor(eta)).into_iter().filter(|b| !b.is_zero()).collect()
}

#[inline]
fn monomial(beta: &MultiIndex, z: &[f64], y: &[f64]) -> f64 {
    let mut m = 1.0;
    for (j, &e) in beta.0.iter().enumerate() {
        if e > 0 {
            m *= Float::powi(z[j] - y[j], e as i32);
        }
    }
    m
}

/// Whether `(a, b)` precedes `(c, d)` lexicographically by window index.
fn lex_less(a: &[i64], b: &[i64], c: &[i64], d: &[i64]) -> bool {
    (a, b) < (c, d)
}

fn g_eta_impl(u: &Germ, eta: f64, radius: Option<f64>, name: &str) -> Result<NormReport> {
    check_positive("eta", eta)?;
    let w = u.window();
    if w.is_empty() || u.n_bases() == 0 {
        return Err(Error::EmptyWindow);
    }
    let s = w.scaling();
    let d = w.dim();
    let coords = w.all_coords();
    let mut rep = NormReport::new(name, w);
    rep.eta = Some(eta);
    rep.radius = radius;
    let mut best: Option<(f64, usize, usize)> = None;
    for b in 0..u.n_bases() {
        let x = u.base_coords(b);
        let lx = w.linear(&u.bases()[b]).unwrap();
        let row = u.slice(b);
        for (ly, y) in coords.chunks(d).enumerate() {
            if ly == lx {
                continue;
            }
            let dist = s.distance_slices(&x, y);
            if let Some(r) = radius {
                if dist >= r {
                    continue;
                }
            }
            let v = row[ly].norm() / pow(dist, eta);
            if best.map_or(true, |(bv, _, _)| v > bv) {
                best = Some((v, b, ly));
            }
        }
    }
    if let Some((v, b, ly)) = best {
        rep.value = v;
        rep.witness = Witness::Pair { x: u.bases()[b].clone(), y: w.index_of(ly) };
    }
    Ok(rep)
}

/// `‖U‖_{G^η} = sup_{x≠y} |U_x(y)| / d(x,y)^η` over base points `x` and
/// window points `y`.
pub fn norm_g_eta(u: &Germ, eta: f64) -> Result<NormReport> {
    g_eta_impl(u, eta, None, "G^eta")
}

/// `[U]_{G_R^η}`: as [`norm_g_eta`] restricted to `0 < d(x,y) < R`.
pub fn norm_g_eta_local(u: &Germ, eta: f64, r: f64) -> Result<NormReport> {
    check_radius(r)?;
    g_eta_impl(u, eta, Some(r), "G_R^eta")
}

/// `‖U‖_{<R} = sup_{d(x,y) < R} |U_x(y)|`.
pub fn sup_below(u: &Germ, r: f64) -> Result<NormReport> {
    check_radius(r)?;
    let w = u.window();
    if w.is_empty() || u.n_bases() == 0 {
        return Err(Error::EmptyWindow);
    }
    let s = w.scaling();
    let coords = w.all_coords();
    let mut rep = NormReport::new("sup_below", w);
    rep.radius = Some(r);
    let mut best: Option<(f64, usize, usize)> = None;
    for b in 0..u.n_bases() {
        let x = u.base_coords(b);
        let row = u.slice(b);
        for (ly, y) in coords.chunks(w.dim()).enumerate() {
            if s.distance_slices(&x, y) >= r {
                continue;
            }
            let v = row[ly].norm();
            if best.map_or(true, |(bv, _, _)| v > bv) {
                best = Some((v, b, ly));
            }
        }
    }
    if let Some((v, b, ly)) = best {
        rep.value = v;
        rep.witness = Witness::Pair { x: u.bases()[b].clone(), y: w.index_of(ly) };
    }
    Ok(rep)
}

/// Sample points `z` around a fixed centre `y` with their distances and
/// monomials `(z - y)^β`.
struct Samples {
    center: Vec<f64>,
    z: Vec<usize>,
    dist: Vec<f64>,
    /// `dist^α`.
    dpow: Vec<f64>,
    mono: Vec<f64>,
}

impl Samples {
    /// Every window point `z ≠ y` with `d(y,z) < R` (when given) and
    /// `d(c,z) < Rc` for an extra ball `(c, Rc)` (when given).
    fn collect(
        w: &LatticeWindow,
        coords: &[f64],
        ly: usize,
        basis: &[MultiIndex],
        alpha: f64,
        radius: Option<f64>,
        ball: Option<(&[f64], f64)>,
    ) -> Samples {
        let s = w.scaling();
        let d = w.dim();
        let y = coords[ly * d..(ly + 1) * d].to_vec();
        let mut out = Samples { center: y, z: Vec::new(), dist: Vec::new(), dpow: Vec::new(), mono: Vec::new() };
        for (lz, z) in coords.chunks(d).enumerate() {
            if lz == ly {
                continue;
            }
            let dist = s.distance_slices(&out.center, z);
            if radius.map_or(false, |r| dist >= r) {
                continue;
            }
            if let Some((c, rc)) = ball {
                if s.distance_slices(c, z) >= rc {
                    continue;
                }
            }
            out.z.push(lz);
            out.dist.push(dist);
            out.dpow.push(pow(dist, alpha));
            for b in basis {
                out.mono.push(monomial(b, z, &out.center));
            }
        }
        out
    }
}

struct PairFit {
    value: f64,
    argmax: usize,
    coeffs: Vec<C64>,
}

/// `min_ν max_z |data_z - Σ ν_β mono_{zβ}| / weight_z`.
fn weighted_fit(smp: &Samples, n: usize, data: &[C64], inv: &[f64]) -> Result<PairFit> {
    let m = smp.z.len();
    if m < n {
        return Err(Error::Underdetermined { samples: m, unknowns: n });
    }
    if m == 0 {
        return Ok(PairFit { value: 0.0, argmax: 0, coeffs: Vec::new() });
    }
    let coeffs = if n == 0 {
        Vec::new()
    } else if let Some(fit) = exact_fit(smp, n, data, inv) {
        return Ok(fit);
    } else {
        let mut a = Vec::with_capacity(m * n);
        let mut b = Vec::with_capacity(m);
        for i in 0..m {
            a.extend(smp.mono[i * n..(i + 1) * n].iter().map(|v| v * inv[i]));
            b.push(data[i] * inv[i]);
        }
        chebyshev_complex(&Matrix::from_vec(m, n, a), &b, DIRECTIONS)?.coeffs
    };
    let mut best = (f64::NEG_INFINITY, 0);
    for i in 0..m {
        let mut r = data[i];
        for (k, c) in coeffs.iter().enumerate() {
            r -= c * smp.mono[i * n + k];
        }
        let v = r.norm() * inv[i];
        if v > best.0 {
            best = (v, i);
        }
    }
    Ok(PairFit { value: best.0, argmax: best.1, coeffs })
}

/// Weighted least squares through the normal equations, kept only when it
/// interpolates the data to round-off; real data only.
fn exact_fit(smp: &Samples, n: usize, data: &[C64], inv: &[f64]) -> Option<PairFit> {
    if n > 8 {
        return None;
    }
    let m = smp.z.len();
    let mut g = [[0.0f64; 8]; 8];
    let mut rhs = [0.0f64; 8];
    let mut bmax = 0.0f64;
    for i in 0..m {
        if data[i].im != 0.0 {
            return None;
        }
        let a = &smp.mono[i * n..(i + 1) * n];
        let iw = inv[i];
        let b = data[i].re * iw;
        bmax = bmax.max(b.abs());
        for p in 0..n {
            let ap = a[p] * iw;
            rhs[p] += ap * b;
            for q in 0..=p {
                g[p][q] += ap * a[q] * iw;
            }
        }
    }
    let mut mat = Matrix::zeros(n, n);
    let mut scale = [1.0f64; 8];
    for p in 0..n {
        if g[p][p] > 0.0 {
            scale[p] = 1.0 / Float::sqrt(g[p][p]);
        }
    }
    for p in 0..n {
        for q in 0..=p {
            mat[(p, q)] = g[p][q] * scale[p] * scale[q];
            mat[(q, p)] = mat[(p, q)];
        }
    }
    let lu = crate::linalg::Lu::new(&mat, 1e-13)?;
    let tol = 1e-12 * (1.0 + bmax);
    let rs: Vec<f64> = (0..n).map(|p| rhs[p] * scale[p]).collect();
    let mut c: Vec<f64> = lu.solve(&rs).iter().zip(&scale).map(|(v, sc)| v * sc).collect();
    for _ in 0..2 {
        let mut res = [0.0f64; 8];
        let mut best = (f64::NEG_INFINITY, 0);
        for i in 0..m {
            let a = &smp.mono[i * n..(i + 1) * n];
            let mut r = data[i].re;
            for p in 0..n {
                r -= a[p] * c[p];
            }
            let r = r * inv[i];
            if r.abs() > best.0 {
                best = (r.abs(), i);
            }
            for p in 0..n {
                res[p] += a[p] * inv[i] * r;
            }
        }
        if best.0 <= tol {
            let coeffs = c.into_iter().map(|v| C64::new(v, 0.0)).collect();
            return Some(PairFit { value: best.0, argmax: best.1, coeffs });
        }
        let rs: Vec<f64> = (0..n).map(|p| res[p] * scale[p]).collect();
        let step = lu.solve(&rs);
        for p in 0..n {
            c[p] += step[p] * scale[p];
        }
    }
    None
}

fn poly(basis: &[MultiIndex], c0: C64, coeffs: &[C64], center: &[f64], value: f64) -> PolyFit {
    let d = center.len();
    let mut coefficients = alloc::vec![(MultiIndex::zeros(d), c0)];
    coefficients.extend(basis.iter().cloned().zip(coeffs.iter().copied()));
    PolyFit { coefficients, center: Point::new(center.to_vec()), value }
}

struct EtaAlpha<'a> {
    u: &'a Germ,
    eta: f64,
    alpha: f64,
    basis: Vec<MultiIndex>,
}

impl EtaAlpha<'_> {
    fn solve(&self, xb: usize, yb: usize, smp: &Samples, dxy: f64) -> Result<(PairFit, C64)> {
        let w = self.u.window();
        let ly = w.linear(&self.u.bases()[yb]).unwrap();
        let ux = self.u.slice(xb);
        let uy = self.u.slice(yb);
        let c0 = ux[ly] - uy[ly];
        let e = self.eta - self.alpha;
        let mut data = Vec::with_capacity(smp.z.len());
        let mut inv = Vec::with_capacity(smp.z.len());
        for (i, &lz) in smp.z.iter().enumerate() {
            data.push(ux[lz] - uy[lz] - c0);
            let dz = smp.dist[i];
            inv.push(1.0 / (smp.dpow[i] * pow(dxy + dz, e)));
        }
        Ok((weighted_fit(smp, self.basis.len(), &data, &inv)?, c0))
    }
}

fn check_eta_alpha(eta: f64, alpha: f64) -> Result<()> {
    check_positive("eta", eta)?;
    check_positive("alpha", alpha)?;
    if alpha >= eta {
        return Err(Error::InvalidParameter("need 0 < alpha < eta".into()));
    }
    Ok(())
}

fn g_eta_alpha_impl(u: &Germ, eta: f64, alpha: f64, radius: Option<f64>, name: &str) -> Result<NormReport> {
    check_eta_alpha(eta, alpha)?;
    let w = u.window();
    if w.is_empty() || u.n_bases() == 0 {
        return Err(Error::EmptyWindow);
    }
    let s = w.scaling();
    let coords = w.all_coords();
    let ctx = EtaAlpha { u, eta, alpha, basis: fit_basis(s, eta) };
    let mut rep = NormReport::new(name, w);
    rep.eta = Some(eta);
    rep.alpha = Some(alpha);
    rep.radius = radius;
    let bases = u.bases();
    let base_coords: Vec<Vec<f64>> = (0..u.n_bases()).map(|b| u.base_coords(b)).collect();
    let mut best: Option<(f64, usize, usize, usize, PolyFit)> = None;
    for yb in 0..u.n_bases() {
        let ly = w.linear(&bases[yb]).unwrap();
        let smp = Samples::collect(w, &coords, ly, &ctx.basis, alpha, radius, None);
        for xb in 0..u.n_bases() {
            if xb == yb {
                continue;
            }
            let dxy = s.distance_slices(&base_coords[xb], &base_coords[yb]);
            if dxy == 0.0 || radius.map_or(false, |r| dxy >= r) {
                continue;
            }
            let (fit, c0) = ctx.solve(xb, yb, &smp, dxy)?;
            if smp.z.is_empty() {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bv, bx, by, _, _)) => {
                    fit.value > *bv || (fit.value == *bv && lex_less(&bases[xb], &bases[yb], &bases[*bx], &bases[*by]))
                }
            };
            if better {
                let p = poly(&ctx.basis, c0, &fit.coeffs, &smp.center, fit.value);
                best = Some((fit.value, xb, yb, smp.z[fit.argmax], p));
            }
        }
    }
    if let Some((v, xb, yb, lz, p)) = best {
        rep.value = v;
        rep.witness = Witness::Triple { x: bases[xb].clone(), y: bases[yb].clone(), z: w.index_of(lz) };
        rep.fit = Some(p);
    }
    Ok(rep)
}

/// `[U]_{G^{η,α}}`: for each pair of base points `x ≠ y`, the weighted
/// minimax distance of `z ↦ U_x(z) - U_y(z)` from polynomials of degree
/// `<= ⌊η⌋` with weight `d(y,z)^α (d(x,y) + d(y,z))^{η-α}`. The weight
/// vanishes at `z = y`, so `P(y) = U_x(y) - U_y(y)` is imposed exactly.
/// Complex data use a 16-direction polygonal norm (relative excess at most
/// `1/cos(π/32) - 1`).
pub fn seminorm_g_eta_alpha(u: &Germ, eta: f64, alpha: f64) -> Result<NormReport> {
    g_eta_alpha_impl(u, eta, alpha, None, "G^eta,alpha")
}

/// `[U]_{G_R^{η,α}}`: pairs with `0 < d(x,y) < R`, samples with
/// `0 < d(y,z) < R`.
pub fn seminorm_g_eta_alpha_local(u: &Germ, eta: f64, alpha: f64, r: f64) -> Result<NormReport> {
    check_radius(r)?;
    g_eta_alpha_impl(u, eta, alpha, Some(r), "G_R^eta,alpha")
}

/// The minimising polynomial for a single pair of base points, centred at
/// `y`. `radius` restricts samples as in the local semi-norm.
pub fn fit_pair(u: &Germ, x: &[i64], y: &[i64], eta: f64, alpha: f64, radius: Option<f64>) -> Result<PolyFit> {
    check_eta_alpha(eta, alpha)?;
    if let Some(r) = radius {
        check_radius(r)?;
    }
    let xb = u.base_position(x).ok_or_else(|| Error::Domain("x is not a base point".into()))?;
    let yb = u.base_position(y).ok_or_else(|| Error::Domain("y is not a base point".into()))?;
    let w = u.window();
    let ctx = EtaAlpha { u, eta, alpha, basis: fit_basis(w.scaling(), eta) };
    let coords = w.all_coords();
    let smp = Samples::collect(w, &coords, w.linear(y).unwrap(), &ctx.basis, alpha, radius, None);
    let dxy = w.scaling().distance_slices(&u.base_coords(xb), &u.base_coords(yb));
    let (fit, c0) = ctx.solve(xb, yb, &smp, dxy)?;
    Ok(poly(&ctx.basis, c0, &fit.coeffs, &smp.center, fit.value.max(0.0)))
}

/// Recentred Hölder semi-norm of `f` on `B_R(x)`: for each `y` in the ball,
/// the minimax distance of `f` from polynomials of degree `<= ⌊α⌋` with
/// `P(y) = f(y)`, weighted by `d(z,y)^α` over `z` in the ball; maximised
/// over `y`. Integer `α` is accepted but is not the classical semi-norm.
pub fn holder_local(f: &Field, alpha: f64, center: &[i64], r: f64) -> Result<f64> {
    Ok(holder_local_witness(f, alpha, center, r)?.0)
}

pub(crate) fn holder_local_witness(f: &Field, alpha: f64, center: &[i64], r: f64) -> Result<(f64, Option<Vec<i64>>)> {
    check_positive("alpha", alpha)?;
    check_radius(r)?;
    let w = f.window();
    crate::error::check_dim(w.dim(), center.len())?;
    let s = w.scaling();
    let d = w.dim();
    let c = w.coords(center);
    let coords = w.all_coords();
    let basis = fit_basis(s, alpha);
    let vals = f.values();
    let mut best: (f64, Option<usize>) = (0.0, None);
    for (ly, y) in coords.chunks(d).enumerate() {
        if s.distance_slices(&c, y) >= r {
            continue;
        }
        let smp = Samples::collect(w, &coords, ly, &basis, alpha, None, Some((&c, r)));
        if smp.z.is_empty() {
            continue;
        }
        let data: Vec<C64> = smp.z.iter().map(|&lz| vals[lz] - vals[ly]).collect();
        let inv: Vec<f64> = smp.dpow.iter().map(|v| 1.0 / v).collect();
        let fit = weighted_fit(&smp, basis.len(), &data, &inv)?;
        if best.1.is_none() || fit.value > best.0 {
            best = (fit.value, Some(ly));
        }
    }
    Ok((best.0, best.1.map(|l| w.index_of(l))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germs::jet_germ;
    use alloc::vec;

    fn win(s: Vec<u32>, eps: f64, r: i64) -> LatticeWindow {
        LatticeWindow::centered(Scaling::new(s).unwrap(), eps, r).unwrap()
    }

    #[test]
    fn g_eta_of_distance_power_is_one() {
        let w = win(vec![2, 1], 0.5, 3);
        let s = w.scaling().clone();
        let u = Germ::from_fn(w.clone(), Germ::all_bases(&w), |x, y| C64::new(pow(s.distance_slices(x, y), 1.7), 0.0));
        let rep = norm_g_eta(&u, 1.7).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-12);
        let z = Germ::zeros(w.clone(), Germ::all_bases(&w));
        assert_eq!(norm_g_eta(&z, 1.7).unwrap().value, 0.0);
    }

    #[test]
    fn jets_of_affine_and_quadratic_vanish() {
        let w = win(vec![1, 1], 1.0, 3);
        let f = Field::from_fn(w.clone(), |c, _| C64::new(2.0 * c[0] - c[1] + 0.5 * c[0] * c[1], 0.0));
        let u = jet_germ(&f, 2, None).unwrap();
        let rep = seminorm_g_eta_alpha(&u, 2.5, 1.5).unwrap();
        assert!(rep.value < 1e-8, "{}", rep.value);
    }

    #[test]
    fn fit_reproduces_witness() {
        let w = win(vec![1], 1.0, 4);
        let u = Germ::from_fn(w.clone(), Germ::all_bases(&w), |x, y| {
            C64::new(Float::sin(x[0] * y[0]) + Float::cos(y[0]), 0.0)
        });
        let rep = seminorm_g_eta_alpha(&u, 1.5, 0.5).unwrap();
        let Witness::Triple { x, y, z } = rep.witness.clone() else { panic!() };
        let p = fit_pair(&u, &x, &y, 1.5, 0.5, None).unwrap();
        let s = w.scaling();
        let (xc, yc, zc) = (w.coords(&x), w.coords(&y), w.coords(&z));
        let dxy = s.distance_slices(&xc, &yc);
        let dz = s.distance_slices(&yc, &zc);
        let xb = u.base_position(&x).unwrap();
        let yb = u.base_position(&y).unwrap();
        let r = u.value(xb, &z).unwrap() - u.value(yb, &z).unwrap() - p.eval(&zc);
        let v = r.norm() / (pow(dz, 0.5) * pow(dxy + dz, 1.0));
        assert!((v - rep.value).abs() <= 1e-12 * rep.value.max(1.0));
    }

    #[test]
    fn holder_local_examples() {
        let w = win(vec![1], 1.0, 4);
        let c = Field::from_fn(w.clone(), |_, _| C64::new(3.0, 0.0));
        assert_eq!(holder_local(&c, 0.5, &[0], 10.0).unwrap(), 0.0);
        let lin = Field::from_fn(w.clone(), |x, _| C64::new(x[0], 0.0));
        assert!(holder_local(&lin, 1.5, &[0], 10.0).unwrap() < 1e-12);
        assert!(holder_local(&lin, 0.5, &[0], 10.0).unwrap() > 0.0);
    }

    #[test]
    fn local_variant_with_large_radius_matches() {
        let w = win(vec![1, 1], 1.0, 2);
        let u = Germ::from_fn(w.clone(), Germ::all_bases(&w), |x, y| C64::new(x[0] * y[1] - y[0] * y[0], 0.0));
        let big = 10.0 * w.diameter();
        assert_eq!(norm_g_eta(&u, 0.8).unwrap().value, norm_g_eta_local(&u, 0.8, big).unwrap().value);
        let a = seminorm_g_eta_alpha(&u, 1.5, 0.5).unwrap().value;
        let b = seminorm_g_eta_alpha_local(&u, 1.5, 0.5, big).unwrap().value;
        assert!((a - b).abs() < 1e-12 * a.max(1.0));
        assert_eq!(sup_below(&u, big).unwrap().value, u.max_abs());
    }
}
