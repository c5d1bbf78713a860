//! Negative-order semi-norms tested against a [`TestFunctionFamily`].

use alloc::vec::Vec;

use num_traits::Float;

use super::{NormReport, TestFunctionFamily, Witness};
use crate::error::{check_dim, Error, Result};
use crate::germs::DistGerm;
use crate::window::{Field, LatticeWindow};
use crate::C64;

/// `ε · 2^{i/2}` for `i = 0, 1, …` up to the window radius.
pub fn default_lambda_grid(w: &LatticeWindow) -> Vec<f64> {
    let top = w.radius() * (1.0 + 1e-12);
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let l = w.eps() * Float::powf(2.0, 0.5 * i as f64);
        if l > top {
            break;
        }
        out.push(l);
        i += 1;
    }
    out
}

/// Lattice weights of `φ_x^λ` relative to `x`, as (linear offset, weight)
/// pairs; the pairing factor `ε^{Σs}` is folded in.
struct Tested {
    half: Vec<f64>,
    taps: Vec<(isize, f64)>,
}

fn tested(w: &LatticeWindow, fam: &TestFunctionFamily, member: usize, lambda: f64) -> Tested {
    let s = w.scaling();
    let d = w.dim();
    let phi = &fam.members()[member];
    let shape = w.shape();
    let mut stride = alloc::vec![1isize; d];
    for j in (0..d.saturating_sub(1)).rev() {
        stride[j] = stride[j + 1] * shape[j + 1] as isize;
    }
    let scale: Vec<f64> = (0..d).map(|j| Float::powi(lambda, s.weight(j) as i32)).collect();
    let half = scale.clone();
    // support of φ lies in |y_j| < 1/a_j
    let reach: Vec<i64> = (0..d).map(|j| Float::floor(scale[j] / (phi.stretch[j] * w.step(j))) as i64).collect();
    let factor = Float::powf(w.eps(), s.total() as f64) / Float::powf(lambda, s.total() as f64);
    let mut taps = Vec::new();
    let mut k: Vec<i64> = reach.iter().map(|r| -r).collect();
    let mut y = alloc::vec![0.0; d];
    'outer: loop {
        for j in 0..d {
            y[j] = k[j] as f64 * w.step(j) / scale[j];
        }
        let v = phi.eval(&y);
        if v != 0.0 {
            let off: isize = k.iter().zip(&stride).map(|(a, b)| *a as isize * b).sum();
            taps.push((off, v * factor));
        }
        for j in (0..d).rev() {
            if k[j] < reach[j] {
                k[j] += 1;
                continue 'outer;
            }
            k[j] = -reach[j];
        }
        break;
    }
    Tested { half, taps }
}

fn pair(values: &[C64], lx: usize, t: &Tested) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &(off, wt) in &t.taps {
        acc += values[(lx as isize + off) as usize] * wt;
    }
    acc
}

fn lambda_grid(w: &LatticeWindow, fam: &TestFunctionFamily) -> Result<Vec<f64>> {
    let grid = match fam.lambda_grid() {
        Some(g) => g.to_vec(),
        None => default_lambda_grid(w),
    };
    if grid.iter().any(|&l| l < w.eps() * (1.0 - 1e-12)) {
        return Err(Error::InvalidParameter("lambda grid entries must be at least eps".into()));
    }
    Ok(grid)
}

fn g_gamma_impl(v: &DistGerm, gamma: f64, fam: &TestFunctionFamily, radius: Option<f64>, name: &str) -> Result<NormReport> {
    if !(gamma < 0.0) {
        return Err(Error::InvalidParameter("gamma must be negative".into()));
    }
    let u = v.germ();
    let w = u.window();
    if fam.scaling() != w.scaling() {
        return Err(Error::InvalidParameter("family and germ use different scalings".into()));
    }
    let grid = lambda_grid(w, fam)?;
    let mut rep = NormReport::new(name, w);
    rep.gamma = Some(gamma);
    rep.radius = radius;
    let mut best: Option<(f64, usize, f64, usize)> = None;
    let mut admissible = false;
    for m in 0..fam.members().len() {
        for &lambda in &grid {
            if radius.map_or(false, |r| lambda >= r) {
                continue;
            }
            let t = tested(w, fam, m, lambda);
            let weight = Float::powf(lambda, -gamma);
            for b in 0..u.n_bases() {
                let x = u.base_coords(b);
                if !w.box_inside(&x, &t.half) {
                    continue;
                }
                admissible = true;
                let lx = w.linear(&u.bases()[b]).unwrap();
                let val = weight * pair(u.slice(b), lx, &t).norm();
                if best.map_or(true, |(bv, _, _, _)| val > bv) {
                    best = Some((val, b, lambda, m));
                }
            }
        }
    }
    if !admissible {
        return Err(Error::DomainTooSmall);
    }
    if let Some((val, b, lambda, member)) = best {
        rep.value = val;
        rep.witness = Witness::Scale { x: u.bases()[b].clone(), lambda, member };
    }
    Ok(rep)
}

/// `[V]_{G^γ} = sup_{φ, λ, x} λ^{-γ} |⟨V_x, φ_x^λ⟩_ε|` over family members,
/// grid scales and base points whose support box `x ± λ^s` lies in the
/// window. The family is finite, so this is a lower bound of the supremum
/// over the whole unit ball of `C^k`.
pub fn seminorm_g_gamma(v: &DistGerm, gamma: f64, fam: &TestFunctionFamily) -> Result<NormReport> {
    g_gamma_impl(v, gamma, fam, None, "G^gamma")
}

/// `[V]_{G_R^γ}`: scales `λ < R` only.
pub fn seminorm_g_gamma_local(v: &DistGerm, gamma: f64, fam: &TestFunctionFamily, r: f64) -> Result<NormReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    g_gamma_impl(v, gamma, fam, Some(r), "G_R^gamma")
}

/// Negative Hölder norm of `f` on `B_R(x)`: `sup λ^{-γ} |⟨f, φ_y^λ⟩_ε|` over
/// `y` and `λ` with `d(x,y) + λ <= R`, so that `B_λ(y) ⊆ B_R(x)`.
pub fn negative_holder_local(f: &Field, gamma: f64, fam: &TestFunctionFamily, center: &[f64], r: f64) -> Result<f64> {
    if !(gamma < 0.0) {
        return Err(Error::InvalidParameter("gamma must be negative".into()));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let w = f.window();
    check_dim(w.dim(), center.len())?;
    let s = w.scaling();
    let d = w.dim();
    let grid = lambda_grid(w, fam)?;
    let coords = w.all_coords();
    let mut best = 0.0f64;
    for m in 0..fam.members().len() {
        for &lambda in &grid {
            if lambda > r {
                break;
            }
            let t = tested(w, fam, m, lambda);
            let weight = Float::powf(lambda, -gamma);
            for (ly, y) in coords.chunks(d).enumerate() {
                if s.distance_slices(center, y) + lambda > r * (1.0 + 1e-12) || !w.box_inside(y, &t.half) {
                    continue;
                }
                best = best.max(weight * pair(f.values(), ly, &t).norm());
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Scaling;
    use crate::germs::Germ;
    use alloc::vec;

    #[test]
    fn constant_germ_matches_direct_sum() {
        let s = Scaling::new(vec![2, 1]).unwrap();
        let w = LatticeWindow::centered(s.clone(), 0.5, 6).unwrap();
        let fam = TestFunctionFamily::new(&s, 1);
        let v = DistGerm(Germ::from_fn(w.clone(), Germ::all_bases(&w), |_, _| C64::new(1.0, 0.0)));
        let rep = seminorm_g_gamma(&v, -0.5, &fam).unwrap();
        let Witness::Scale { x, lambda, member } = rep.witness.clone() else { panic!() };
        let xc = w.coords(&x);
        let phi = &fam.members()[member];
        let mut acc = 0.0;
        for idx in w.indices() {
            let y = w.coords(&idx);
            let arg: Vec<f64> = (0..2).map(|j| (y[j] - xc[j]) / Float::powi(lambda, s.weight(j) as i32)).collect();
            acc += phi.eval(&arg);
        }
        let direct = Float::powf(lambda, 0.5) * Float::powf(0.5, 3.0) * Float::powf(lambda, -3.0) * acc.abs();
        assert!((direct - rep.value).abs() < 1e-12 * direct);
        let z = DistGerm(Germ::zeros(w.clone(), Germ::all_bases(&w)));
        assert_eq!(seminorm_g_gamma(&z, -0.5, &fam).unwrap().value, 0.0);
    }

    #[test]
    fn grid_is_geometric_from_eps() {
        let w = LatticeWindow::centered(Scaling::isotropic(1), 0.25, 16).unwrap();
        let g = default_lambda_grid(&w);
        assert_eq!(g[0], 0.25);
        assert!((g[1] / g[0] - Float::sqrt(2.0)).abs() < 1e-15);
        assert!(*g.last().unwrap() <= w.radius() * (1.0 + 1e-12));
    }
}
