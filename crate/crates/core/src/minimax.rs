//! Discrete Chebyshev (L∞) regression: `min_c max_i |b_i - a_i · c|`.
//!
//! Three routes are provided: a linear program solved through its dual, a
//! Stiefel-type exchange iteration, and a least-squares shortcut used when
//! the data are fitted exactly.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{dot, lstsq, Lu, Matrix};
use crate::lp::solve_standard;
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevFit {
    pub coeffs: Vec<f64>,
    /// `max_i |b_i - a_i · c|` for the returned coefficients.
    pub value: f64,
    /// First row attaining `value`.
    pub argmax: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFit {
    pub coeffs: Vec<C64>,
    pub value: f64,
    pub argmax: usize,
}

fn check_shape(a: &Matrix, b: &[f64]) -> Result<()> {
    crate::error::check_dim(a.rows(), b.len())?;
    if a.rows() < a.cols() || a.rows() == 0 {
        return Err(Error::Underdetermined { samples: a.rows(), unknowns: a.cols() });
    }
    Ok(())
}

/// Residual maximum and its first position.
pub fn max_residual(a: &Matrix, b: &[f64], c: &[f64]) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for i in 0..a.rows() {
        let r = (b[i] - dot(a.row(i), c)).abs();
        if r > best.0 {
            best = (r, i);
        }
    }
    best
}

/// Divides every column by its largest entry; returns the scaled matrix and
/// the factors.
fn scale_columns(a: &Matrix) -> (Matrix, Vec<f64>) {
    let mut s = alloc::vec![1.0; a.cols()];
    for (j, sj) in s.iter_mut().enumerate() {
        let m = (0..a.rows()).fold(0.0f64, |m, i| m.max(a[(i, j)].abs()));
        if m > 0.0 {
            *sj = m;
        }
    }
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out[(i, j)] /= s[j];
        }
    }
    (out, s)
}

fn finish(a: &Matrix, b: &[f64], coeffs: Vec<f64>) -> ChebyshevFit {
    let (value, argmax) = max_residual(a, b, &coeffs);
    ChebyshevFit { coeffs, value, argmax }
}

fn no_unknowns(b: &[f64]) -> ChebyshevFit {
    let (value, argmax) = b
        .iter()
        .enumerate()
        .fold((f64::NEG_INFINITY, 0), |acc, (i, v)| if v.abs() > acc.0 { (v.abs(), i) } else { acc });
    ChebyshevFit { coeffs: Vec::new(), value, argmax }
}

/// Linear-programming route. The primal `min t` subject to
/// `|b_i - a_i c| <= t` is solved through its dual
/// `max Σ b_i (u_i - v_i)` with `Σ a_i (u_i - v_i) = 0`, `Σ (u_i + v_i) = 1`;
/// the coefficients are read off the simplex multipliers.
pub fn chebyshev_lp(a: &Matrix, b: &[f64]) -> Result<ChebyshevFit> {
    check_shape(a, b)?;
    let (rows, n) = (a.rows(), a.cols());
    if n == 0 {
        return Ok(no_unknowns(b));
    }
    let (sa, scale) = scale_columns(a);
    let mut eq = Matrix::zeros(n + 1, 2 * rows);
    let mut cost = alloc::vec![0.0; 2 * rows];
    for i in 0..rows {
        for k in 0..n {
            eq[(k, i)] = sa[(i, k)];
            eq[(k, rows + i)] = -sa[(i, k)];
        }
        eq[(n, i)] = 1.0;
        eq[(n, rows + i)] = 1.0;
        cost[i] = -b[i];
        cost[rows + i] = b[i];
    }
    let mut rhs = alloc::vec![0.0; n + 1];
    rhs[n] = 1.0;
    let sol = solve_standard(&eq, &rhs, &cost)?;
    let coeffs: Vec<f64> = (0..n).map(|k| -sol.dual[k] / scale[k]).collect();
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NoConvergence("non-finite minimax coefficients"));
    }
    Ok(finish(a, b, coeffs))
}

/// Least-squares shortcut followed by the LP when the data are not fitted
/// exactly.
pub fn chebyshev(a: &Matrix, b: &[f64]) -> Result<ChebyshevFit> {
    check_shape(a, b)?;
    if a.cols() == 0 {
        return Ok(no_unknowns(b));
    }
    let (sa, scale) = scale_columns(a);
    if let Some(c) = lstsq(&sa, b) {
        let coeffs: Vec<f64> = c.iter().zip(&scale).map(|(c, s)| c / s).collect();
        let fit = finish(a, b, coeffs);
        let bmax = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if fit.value <= 1e-12 * (1.0 + bmax) {
            return Ok(fit);
        }
    }
    chebyshev_lp(a, b)
}

/// Complex data with a real design matrix. `|r|` is replaced by the
/// polygonal norm `max_k |Re(r e^{-iθ_k})|` over `directions` angles in
/// `[0, π)`; the reported value is the true modulus maximum of the returned
/// coefficients, an upper bound of the exact optimum within a factor
/// `1/cos(π/(2·directions))`.
pub fn chebyshev_complex(a: &Matrix, b: &[C64], directions: usize) -> Result<ComplexFit> {
    crate::error::check_dim(a.rows(), b.len())?;
    let n = a.cols();
    if b.iter().all(|v| v.im == 0.0) {
        let re: Vec<f64> = b.iter().map(|v| v.re).collect();
        let fit = chebyshev(a, &re)?;
        return Ok(ComplexFit {
            coeffs: fit.coeffs.into_iter().map(|c| C64::new(c, 0.0)).collect(),
            value: fit.value,
            argmax: fit.argmax,
        });
    }
    let k = directions.max(2);
    let mut rows = Vec::with_capacity(a.rows() * k);
    let mut rhs = Vec::with_capacity(a.rows() * k);
    for i in 0..a.rows() {
        for t in 0..k {
            let th = core::f64::consts::PI * t as f64 / k as f64;
            let (s, c) = (Float::sin(th), Float::cos(th));
            let mut row = Vec::with_capacity(2 * n);
            row.extend(a.row(i).iter().map(|v| v * c));
            row.extend(a.row(i).iter().map(|v| v * s));
            rows.push(row);
            rhs.push(b[i].re * c + b[i].im * s);
        }
    }
    let big = Matrix::from_vec(rows.len(), 2 * n, rows.concat());
    let fit = chebyshev(&big, &rhs)?;
    let coeffs: Vec<C64> = (0..n).map(|j| C64::new(fit.coeffs[j], fit.coeffs[n + j])).collect();
    let mut best = (f64::NEG_INFINITY, 0);
    for i in 0..a.rows() {
        let mut p = C64::new(0.0, 0.0);
        for j in 0..n {
            p += coeffs[j] * a[(i, j)];
        }
        let r = (b[i] - p).norm();
        if r > best.0 {
            best = (r, i);
        }
    }
    Ok(ComplexFit { coeffs, value: best.0, argmax: best.1 })
}

/// Null vector `λ` of `A_Rᵀ` (rows `refs` of `a`) normalised by `λ_p = 1`,
/// where `p` is the first position admitting a nonsingular complement.
fn left_null(a: &Matrix, refs: &[usize]) -> Option<Vec<f64>> {
    let n = a.cols();
    for p in (0..refs.len()).rev() {
        let mut m = Matrix::zeros(n, n);
        let mut col = 0;
        for (q, &r) in refs.iter().enumerate() {
            if q == p {
                continue;
            }
            for k in 0..n {
                m[(k, col)] = a[(r, k)];
            }
            col += 1;
        }
        if let Some(lu) = Lu::new(&m, 1e-12) {
            let rhs: Vec<f64> = a.row(refs[p]).iter().map(|v| -v).collect();
            let mu = lu.solve(&rhs);
            let mut lam = Vec::with_capacity(refs.len());
            let mut it = mu.into_iter();
            for q in 0..refs.len() {
                lam.push(if q == p { 1.0 } else { it.next().unwrap() });
            }
            return Some(lam);
        }
    }
    None
}

/// Solves `a_i · c = target_i` on the reference with the row of largest
/// `|λ|` dropped.
fn solve_on_reference(a: &Matrix, refs: &[usize], lam: &[f64], target: &[f64]) -> Option<Vec<f64>> {
    let n = a.cols();
    let p = (0..lam.len()).max_by(|&i, &j| lam[i].abs().partial_cmp(&lam[j].abs()).unwrap())?;
    let mut m = Matrix::zeros(n, n);
    let mut rhs = Vec::with_capacity(n);
    let mut row = 0;
    for (q, &r) in refs.iter().enumerate() {
        if q == p {
            continue;
        }
        m.row_mut(row).copy_from_slice(a.row(r));
        rhs.push(target[q]);
        row += 1;
    }
    Lu::new(&m, 1e-13).map(|lu| lu.solve(&rhs))
}

/// Greedy initial reference: `n` rows by pivoted Gram–Schmidt, plus the row
/// of largest least-squares residual.
fn initial_reference(a: &Matrix, b: &[f64]) -> Vec<usize> {
    let (rows, n) = (a.rows(), a.cols());
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut refs = Vec::new();
    for _ in 0..n {
        let mut best = (0.0, usize::MAX, Vec::new());
        for i in 0..rows {
            if refs.contains(&i) {
                continue;
            }
            let mut v = a.row(i).to_vec();
            for q in &basis {
                let d = dot(&v, q);
                for (vk, qk) in v.iter_mut().zip(q) {
                    *vk -= d * qk;
                }
            }
            let nv = Float::sqrt(dot(&v, &v));
            if nv > best.0 {
                best = (nv, i, v);
            }
        }
        if best.1 == usize::MAX {
            break;
        }
        let (nv, i, mut v) = best;
        for vk in v.iter_mut() {
            *vk /= nv;
        }
        basis.push(v);
        refs.push(i);
    }
    let extra = lstsq(a, b)
        .map(|c| {
            let mut best = (-1.0, 0);
            for i in 0..rows {
                if refs.contains(&i) {
                    continue;
                }
                let r = (b[i] - dot(a.row(i), &c)).abs();
                if r > best.0 {
                    best = (r, i);
                }
            }
            best.1
        })
        .unwrap_or_else(|| (0..rows).find(|i| !refs.contains(i)).unwrap_or(0));
    refs.push(extra);
    refs
}

/// Exchange (ascent) iteration on references of `n + 1` rows. Each step
/// levels the error on the reference, brings in the row of largest
/// residual and drops the row selected by the ratio test, so that the
/// levelled error increases strictly.
pub fn chebyshev_exchange(a: &Matrix, b: &[f64]) -> Result<ChebyshevFit> {
    check_shape(a, b)?;
    let n = a.cols();
    if n == 0 {
        return Ok(no_unknowns(b));
    }
    if a.rows() == n {
        let c = crate::linalg::solve(a, b).ok_or(Error::NoConvergence("singular square fit"))?;
        return Ok(finish(a, b, c));
    }
    let orig = a;
    let (sa, scale) = scale_columns(a);
    let a = &sa;
    let bmax = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut refs = initial_reference(a, b);
    for _ in 0..2000 {
        let lam = left_null(a, &refs).ok_or(Error::NoConvergence("degenerate exchange reference"))?;
        let lsum: f64 = lam.iter().map(|l| l.abs()).sum();
        let h = refs.iter().zip(&lam).map(|(&r, l)| l * b[r]).sum::<f64>() / lsum;
        let target: Vec<f64> = refs
            .iter()
            .zip(&lam)
            .map(|(&r, l)| b[r] - if *l > 0.0 { h } else if *l < 0.0 { -h } else { 0.0 })
            .collect();
        let c = solve_on_reference(a, &refs, &lam, &target)
            .ok_or(Error::NoConvergence("singular exchange reference"))?;
        let (rmax, j) = max_residual(a, b, &c);
        if rmax <= h.abs() + 1e-13 * (1.0 + bmax) || refs.contains(&j) {
            let coeffs = c.iter().zip(&scale).map(|(c, s)| c / s).collect();
            return Ok(finish(orig, b, coeffs));
        }
        let rj = b[j] - dot(a.row(j), &c);
        let nu = combination(a, &refs, &lam, j).ok_or(Error::NoConvergence("degenerate exchange step"))?;
        let hs = if h < 0.0 { -1.0 } else { 1.0 };
        let s = -rj.signum() * hs;
        let mut pick: Option<(usize, f64)> = None;
        for (q, (&nq, &lq)) in nu.iter().zip(&lam).enumerate() {
            if lq == 0.0 {
                continue;
            }
            let ratio = nq / lq;
            let better = match pick {
                None => true,
                Some((_, t)) => if s > 0.0 { ratio < t } else { ratio > t },
            };
            if better {
                pick = Some((q, ratio));
            }
        }
        let (k, _) = pick.ok_or(Error::NoConvergence("empty ratio test"))?;
        refs[k] = j;
    }
    Err(Error::NoConvergence("exchange iteration limit"))
}

/// Some `ν` with `Σ_q ν_q a_{refs[q]} = a_j`, taking `ν_p = 0` at the
/// position of largest `|λ|`.
fn combination(a: &Matrix, refs: &[usize], lam: &[f64], j: usize) -> Option<Vec<f64>> {
    let n = a.cols();
    let p = (0..lam.len()).max_by(|&x, &y| lam[x].abs().partial_cmp(&lam[y].abs()).unwrap())?;
    let mut m = Matrix::zeros(n, n);
    let mut col = 0;
    for (q, &r) in refs.iter().enumerate() {
        if q == p {
            continue;
        }
        for k in 0..n {
            m[(k, col)] = a[(r, k)];
        }
        col += 1;
    }
    let mu = Lu::new(&m, 1e-13)?.solve(a.row(j));
    let mut it = mu.into_iter();
    Some((0..refs.len()).map(|q| if q == p { 0.0 } else { it.next().unwrap() }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn line_problem() -> (Matrix, Vec<f64>) {
        // best constant-plus-slope fit of |x| on [-1, 1]: error 1/2
        let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, x]).collect();
        (Matrix::from_rows(&rows), xs.iter().map(|x| x.abs()).collect())
    }

    #[test]
    fn lp_matches_classical_value() {
        let (a, b) = line_problem();
        let fit = chebyshev_lp(&a, &b).unwrap();
        assert!((fit.value - 0.5).abs() < 1e-12, "{}", fit.value);
        assert!((fit.coeffs[0] - 0.5).abs() < 1e-12 && fit.coeffs[1].abs() < 1e-12);
    }

    #[test]
    fn exchange_matches_lp() {
        let (a, b) = line_problem();
        let e = chebyshev_exchange(&a, &b).unwrap();
        assert!((e.value - 0.5).abs() < 1e-12, "{}", e.value);
    }

    #[test]
    fn exact_data_takes_shortcut() {
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![1.0, i as f64]).collect();
        let b: Vec<f64> = (0..5).map(|i| 3.0 * i as f64 - 1.0).collect();
        let fit = chebyshev(&Matrix::from_rows(&rows), &b).unwrap();
        assert!(fit.value < 1e-12);
    }

    #[test]
    fn underdetermined_rejected() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0]]);
        assert!(matches!(chebyshev_lp(&a, &[1.0]), Err(Error::Underdetermined { .. })));
    }

    #[test]
    fn complex_fit_is_upper_bound() {
        let a = Matrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]);
        let b = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0)];
        let fit = chebyshev_complex(&a, &b, 16).unwrap();
        // the smallest enclosing disc of the three points has radius 1
        assert!(fit.value >= 1.0 - 1e-12 && fit.value <= 1.0 / (core::f64::consts::PI / 32.0).cos() + 1e-12);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;
    use std::vec::Vec;

    fn instance() -> impl Strategy<Value = (Matrix, Vec<f64>)> {
        (2usize..=6, 8usize..=40).prop_flat_map(|(n, m)| {
            (
                proptest::collection::vec(-1.0f64..1.0, m),
                proptest::collection::vec(-2.0f64..2.0, m),
            )
                .prop_map(move |(xs, b)| {
                    let rows: Vec<Vec<f64>> =
                        xs.iter().map(|&x| (0..n).map(|k| x.powi(k as i32)).collect()).collect();
                    (Matrix::from_rows(&rows), b)
                })
        })
    }

    proptest! {
        #[test]
        fn routes_agree((a, b) in instance()) {
            let lp = chebyshev_lp(&a, &b).unwrap();
            let ex = chebyshev_exchange(&a, &b).unwrap();
            prop_assert!((lp.value - ex.value).abs() <= 1e-6 * (1.0 + lp.value), "{} {}", lp.value, ex.value);
            let ls = lstsq(&a, &b).unwrap();
            prop_assert!(lp.value <= max_residual(&a, &b, &ls).0 + 1e-12);
        }
    }
}
