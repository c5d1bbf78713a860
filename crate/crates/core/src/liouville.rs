//! Polynomial kernels of difference operators, rigidity of centred
//! polynomials, and exponential solutions at zeros of the discrete symbol.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{MultiIndex, Scaling};
use crate::linalg::{null_space, rank, Matrix};
use crate::ops::ellipticity::{near_origin, scan_torus};
use crate::ops::{discrete_monomial, refine_zero, DiffOperator, Stencil};
use crate::window::{Field, LatticeWindow};
use crate::C64;

const CUTOFF: f64 = 1e-10;

/// Polynomials `Σ c_γ k^{(γ)}` with `|γ| <= η` annihilated by `L_ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBasis {
    pub eta: f64,
    pub eps: f64,
    pub operator: DiffOperator,
    /// Discrete monomials indexing the coefficient vectors.
    pub monomials: Vec<MultiIndex>,
    /// One coefficient vector per basis element.
    pub basis: Vec<Vec<C64>>,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Evaluates basis element `i` at physical coordinates `k`.
    pub fn eval(&self, i: usize, k: &[f64]) -> C64 {
        let s = self.operator.scaling();
        self.monomials
            .iter()
            .zip(&self.basis[i])
            .map(|(g, c)| c * discrete_monomial(s, self.eps, g, k))
            .sum()
    }

    /// Largest `|L_ε p|` over basis elements `p` on the output window of
    /// `w`, relative to the largest value of `p` on `w`.
    pub fn residual(&self, w: &LatticeWindow) -> Result<f64> {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            let f = Field::from_fn(w.clone(), |k, _| self.eval(i, k));
            let lf = self.operator.apply(&f)?;
            let scale = f.max_abs().max(1.0);
            worst = worst.max(lf.max_abs() / scale);
        }
        Ok(worst)
    }
}

/// `(L p)(y) = Σ_o c_o p(y + o h)` for every output point and monomial,
/// as a complex matrix (rows: points, columns: monomials).
fn action_matrix(op: &DiffOperator, eps: f64, monomials: &[MultiIndex], widths: &[usize]) -> (Vec<C64>, usize) {
    let s = op.scaling();
    let d = s.dim();
    let h: Vec<f64> = (0..d).map(|j| Float::powi(eps, s.weight(j) as i32)).collect();
    let st = op.stencil(eps);
    let taps: Vec<(Vec<f64>, C64)> =
        st.entries().map(|(o, c)| ((0..d).map(|j| o[j] as f64 * h[j]).collect(), *c)).collect();
    let npts: usize = widths.iter().product();
    let mut out = Vec::with_capacity(npts * monomials.len());
    let mut idx = alloc::vec![0usize; d];
    let mut y = alloc::vec![0.0; d];
    for _ in 0..npts {
        for j in 0..d {
            y[j] = idx[j] as f64 * h[j];
        }
        for g in monomials {
            let mut acc = C64::new(0.0, 0.0);
            for (o, c) in &taps {
                let k: Vec<f64> = y.iter().zip(o).map(|(a, b)| a + b).collect();
                acc += c * discrete_monomial(s, eps, g, &k);
            }
            out.push(acc);
        }
        for j in (0..d).rev() {
            idx[j] += 1;
            if idx[j] < widths[j] {
                break;
            }
            idx[j] = 0;
        }
    }
    (out, npts)
}

/// Real form `[[Re, -Im], [Im, Re]]` of a complex matrix, or just the real
/// part when the imaginary part vanishes.
fn realify(a: &[C64], rows: usize, cols: usize) -> (Matrix, bool) {
    let complex = a.iter().any(|v| v.im != 0.0);
    if !complex {
        return (Matrix::from_vec(rows, cols, a.iter().map(|v| v.re).collect()), false);
    }
    let mut m = Matrix::zeros(2 * rows, 2 * cols);
    for i in 0..rows {
        for j in 0..cols {
            let v = a[i * cols + j];
            m[(i, j)] = v.re;
            m[(i, cols + j)] = -v.im;
            m[(rows + i, j)] = v.im;
            m[(rows + i, cols + j)] = v.re;
        }
    }
    (m, true)
}

/// Divides columns by their largest entries; returns the factors.
fn normalise_columns(m: &mut Matrix) -> Vec<f64> {
    let mut f = alloc::vec![1.0; m.cols()];
    for (j, fj) in f.iter_mut().enumerate() {
        let c = (0..m.rows()).fold(0.0f64, |acc, i| acc.max(m[(i, j)].abs()));
        if c > 0.0 {
            *fj = c;
            for i in 0..m.rows() {
                m[(i, j)] /= c;
            }
        }
    }
    f
}

/// Complex null space of the realified matrix: pairs `(a, b)` become
/// `a + ib`, reduced to a complex-independent set.
fn complex_null(m: &Matrix, complex: bool, n: usize, factors: &[f64]) -> Vec<Vec<C64>> {
    let raw = null_space(m, CUTOFF);
    let vecs: Vec<Vec<C64>> = raw
        .iter()
        .map(|v| {
            (0..n)
                .map(|j| {
                    let im = if complex { v[n + j] / factors[n + j] } else { 0.0 };
                    C64::new(v[j] / factors[j], im)
                })
                .collect()
        })
        .collect();
    if !complex {
        return vecs.into_iter().map(normalise).collect();
    }
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for mut v in vecs {
        for b in &basis {
            let p: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= p * y;
            }
        }
        let nrm = Float::sqrt(v.iter().map(|x| x.norm_sqr()).sum::<f64>());
        if nrm > 1e-6 {
            basis.push(v.into_iter().map(|x| x / nrm).collect());
        }
    }
    basis
}

fn normalise(v: Vec<C64>) -> Vec<C64> {
    let nrm = Float::sqrt(v.iter().map(|x| x.norm_sqr()).sum::<f64>());
    if nrm > 0.0 {
        v.into_iter().map(|x| x / nrm).collect()
    } else {
        v
    }
}

/// Kernel of `L_ε` on discrete polynomials of anisotropic degree `<= η`,
/// determined on a grid of `⌊η/s_j⌋ + m + 2` points per axis.
pub fn polynomial_kernel(op: &DiffOperator, eps: f64, eta: f64) -> Result<KernelBasis> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter("eta must be non-negative".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    let s = op.scaling();
    let monomials = s.indices_up_to(eta);
    let n = monomials.len();
    let widths: Vec<usize> =
        s.weights().iter().map(|&sj| Float::floor(eta / sj as f64) as usize + op.order() as usize + 2).collect();
    let (a, rows) = action_matrix(op, eps, &monomials, &widths);
    let (mut m, complex) = realify(&a, rows, n);
    let factors = normalise_columns(&mut m);
    let basis = complex_null(&m, complex, n, &factors);
    Ok(KernelBasis { eta, eps, operator: op.clone(), monomials, basis })
}

/// Dimension of the kernel of the continuum operator `Σ a ∂^{γ+δ}` on
/// ordinary polynomials of anisotropic degree `<= η`, computed from exact
/// monomial differentiation.
pub fn continuum_kernel_dim(op: &DiffOperator, eta: f64) -> usize {
    let s = op.scaling();
    let monomials = s.indices_up_to(eta);
    let n = monomials.len();
    let mut a = alloc::vec![C64::new(0.0, 0.0); n * n];
    for (c, beta) in monomials.iter().enumerate() {
        for t in op.terms() {
            let mu = t.gamma.add(&t.delta);
            let Some(rest) = beta.checked_sub(&mu) else { continue };
            let r = monomials.iter().position(|g| *g == rest).expect("lower degree monomial");
            a[r * n + c] += t.coeff * (beta.factorial() / rest.factorial());
        }
    }
    let (mut m, complex) = realify(&a, n, n);
    normalise_columns(&mut m);
    let real_dim = m.cols() - rank(&m, CUTOFF);
    if complex {
        real_dim / 2
    } else {
        real_dim
    }
}

/// Whether `D_ε^γ u(0) = 0` for all `|γ| <= η` forces a discrete polynomial
/// `u` of degree `<= η` to vanish.
pub fn centered_rigidity_check(s: &Scaling, eps: f64, eta: f64) -> bool {
    if !(eta >= 0.0) || !(eps > 0.0) {
        return false;
    }
    let d = s.dim();
    let steps: Vec<f64> = (0..d).map(|j| Float::powi(eps, s.weight(j) as i32)).collect();
    let monomials = s.indices_up_to(eta);
    let n = monomials.len();
    let zero = MultiIndex::zeros(d);
    let mut m = Matrix::zeros(n, n);
    for (r, g) in monomials.iter().enumerate() {
        let st = Stencil::difference(g, &zero, &steps);
        for (c, b) in monomials.iter().enumerate() {
            let mut acc = 0.0;
            for (o, w) in st.entries() {
                let k: Vec<f64> = o.iter().zip(&steps).map(|(a, h)| *a as f64 * h).collect();
                acc += w.re * discrete_monomial(s, eps, b, &k);
            }
            m[(r, c)] = acc;
        }
    }
    normalise_columns(&mut m);
    rank(&m, CUTOFF) == n
}

/// A nonzero `θ` with `L̂_ε(θ) ≈ 0`, and the residual of `L_ε e^{iθ·k}` on a
/// 17-point-per-axis window.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolZero {
    pub theta: Vec<f64>,
    pub symbol: C64,
    pub residual: f64,
    /// `residual <= 1e-8`.
    pub verified: bool,
}

/// Grid scan of the discrete symbol, refinement of the grid minima, and
/// verification of the exponential solution at every refined zero away from
/// the origin.
pub fn symbol_zero_search(op: &DiffOperator, eps: f64, resolution: usize) -> Result<Vec<SymbolZero>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    let d = op.dim();
    let scan = scan_torus(op, eps, resolution);
    let h: Vec<f64> = (0..d).map(|j| Float::powi(eps, op.scaling().weight(j) as i32)).collect();
    let w = LatticeWindow::centered(op.scaling().clone(), eps, 8)?;
    let mut out: Vec<SymbolZero> = Vec::new();
    for lin in scan.local_minima(d).into_iter().take(256) {
        if scan.ratios[lin] > 2.0 * scan.modulus {
            break;
        }
        let (theta, v) = refine_zero(op, eps, &scan.theta(op, eps, lin));
        if v.norm() > 1e-10 || near_origin(op, eps, &theta, scan.res) {
            continue;
        }
        let dup = out.iter().any(|z| {
            z.theta.iter().zip(&theta).enumerate().all(|(j, (a, b))| {
                let p = 2.0 * core::f64::consts::PI / h[j];
                let diff = num_traits::Euclid::rem_euclid(&(a - b), &p);
                diff.min(p - diff) * h[j] < core::f64::consts::PI / scan.res as f64
            })
        });
        if dup {
            continue;
        }
        let f = Field::from_fn(w.clone(), |k, _| {
            let ph: f64 = k.iter().zip(&theta).map(|(a, b)| a * b).sum();
            C64::new(Float::cos(ph), Float::sin(ph))
        });
        let residual = op.apply(&f)?.max_abs();
        out.push(SymbolZero { theta, symbol: v, residual, verified: residual <= 1e-8 });
    }
    Ok(out)
}
