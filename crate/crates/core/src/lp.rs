//! Dense two-phase simplex for `min cᵀx` subject to `Ax = b`, `x >= 0`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Simplex multipliers `y` with `Bᵀy = c_B`; optimal for the dual
    /// `max bᵀy` subject to `Aᵀy <= c`.
    pub dual: Vec<f64>,
    pub objective: f64,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-12;

struct Tableau {
    m: usize,
    width: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.at(r, c);
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.at(i, c);
            if f != 0.0 {
                for j in 0..w {
                    self.t[i * w + j] -= f * self.t[r * w + j];
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs the simplex on reduced costs computed from `cost`, restricted to
    /// columns `allowed`. Dantzig pricing, switching to Bland's rule after a
    /// run of degenerate pivots.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<()> {
        let rhs = self.width - 1;
        let mut degenerate = 0usize;
        for _ in 0..50_000 {
            let mut y = alloc::vec![0.0; allowed];
            // reduced costs d_j = c_j - Σ_i c_{B_i} t_{ij}
            for (j, dj) in y.iter_mut().enumerate() {
                let mut acc = cost[j];
                for i in 0..self.m {
                    acc -= cost[self.basis[i]] * self.at(i, j);
                }
                *dj = acc;
            }
            let scale = 1.0 + cost.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let bland = degenerate > 50;
            let mut enter = None;
            let mut best = -COST_TOL * scale;
            for (j, &dj) in y.iter().enumerate() {
                if self.basis.contains(&j) {
                    continue;
                }
                if bland {
                    if dj < -COST_TOL * scale {
                        enter = Some(j);
                        break;
                    }
                } else if dj < best {
                    best = dj;
                    enter = Some(j);
                }
            }
            let Some(c) = enter else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.at(i, rhs) / a;
                    let better = match leave {
                        None => true,
                        Some((r, best)) => {
                            ratio < best - 1e-14 || (ratio <= best + 1e-14 && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::NoConvergence("linear program is unbounded"));
            };
            degenerate = if ratio.abs() < 1e-14 { degenerate + 1 } else { 0 };
            self.pivot(r, c);
        }
        Err(Error::NoConvergence("simplex iteration limit"))
    }
}

/// Solves `min cᵀx` over `{Ax = b, x >= 0}`.
pub fn solve_standard(a: &Matrix, b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);
    // columns: n structural, m artificial, rhs
    let width = n + m + 1;
    let mut t = alloc::vec![0.0; m * width];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i * width + j] = sign * a[(i, j)];
        }
        t[i * width + n + i] = 1.0;
        t[i * width + n + m] = sign * b[i];
    }
    let mut tab = Tableau { m, width, t, basis: (n..n + m).collect() };

    let mut phase1 = alloc::vec![0.0; n + m];
    for v in phase1[n..].iter_mut() {
        *v = 1.0;
    }
    tab.optimize(&phase1, n + m)?;
    let infeas: f64 = (0..m).filter(|&i| tab.basis[i] >= n).map(|i| tab.at(i, n + m)).sum();
    let bscale = 1.0 + b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if infeas > 1e-9 * bscale {
        return Err(Error::NoConvergence("linear program is infeasible"));
    }
    // drive remaining artificials out of the basis where possible
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.basis.contains(&j) && tab.at(i, j).abs() > 1e-9) {
                tab.pivot(i, j);
            }
        }
    }
    let mut phase2 = alloc::vec![0.0; n + m];
    phase2[..n].copy_from_slice(c);
    tab.optimize(&phase2, n)?;

    let mut x = alloc::vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.at(i, n + m);
        }
    }
    // multipliers from the original columns of the final basis
    let mut bmat = Matrix::zeros(m, m);
    let mut cb = alloc::vec![0.0; m];
    for (k, &j) in tab.basis.iter().enumerate() {
        for i in 0..m {
            bmat[(i, k)] = if j < n { a[(i, j)] } else if j - n == i { 1.0 } else { 0.0 };
        }
        cb[k] = if j < n { c[j] } else { 0.0 };
    }
    let dual = match Lu::new(&bmat, 1e-14) {
        Some(lu) => lu.solve_transpose(&cb),
        None => {
            // fall back on the tableau's artificial columns, which hold B⁻¹
            let mut y = alloc::vec![0.0; m];
            for (k, &j) in tab.basis.iter().enumerate() {
                let cj = if j < n { c[j] } else { 0.0 };
                for (i, yi) in y.iter_mut().enumerate() {
                    let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
                    *yi += cj * tab.at(k, n + i) * sign;
                }
            }
            y
        }
    };
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, dual, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn small_program() {
        // min -x1 - 2x2  s.t. x1 + x2 + s1 = 4, x2 + s2 = 3
        let a = Matrix::from_rows(&[vec![1.0, 1.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]]);
        let sol = solve_standard(&a, &[4.0, 3.0], &[-1.0, -2.0, 0.0, 0.0]).unwrap();
        assert!((sol.objective + 7.0).abs() < 1e-12);
        // strong duality
        let dual_obj = 4.0 * sol.dual[0] + 3.0 * sol.dual[1];
        assert!((dual_obj - sol.objective).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]);
        assert!(solve_standard(&a, &[-1.0], &[1.0, 1.0]).is_err());
    }
}
