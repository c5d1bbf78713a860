use approx::assert_relative_eq;
use schauder_core::coeff_bounds::{construct_weights, probe_coefficients};
use schauder_core::fourier::{dft, mode_frequency};
use schauder_core::germs::{center_check, frozen_coefficient_germ, jet_germ};
use schauder_core::harness::GaussianSource;
use schauder_core::linalg::{lstsq, svd, Matrix};
use schauder_core::liouville::polynomial_kernel;
use schauder_core::ops::DiffOperator;
use schauder_core::{Field, LatticeWindow, Scaling, C64};

fn gaussian_matrix(seed: u64, rows: usize, cols: usize) -> (Matrix, nalgebra::DMatrix<f64>) {
    let mut g = GaussianSource::new(seed, 0, 0);
    let data: Vec<f64> = (0..rows * cols).map(|_| g.next()).collect();
    (Matrix::from_vec(rows, cols, data.clone()), nalgebra::DMatrix::from_row_slice(rows, cols, &data))
}

fn random_field(w: &LatticeWindow, seed: u64) -> Field {
    let mut g = GaussianSource::new(seed, 2, 0);
    Field::new(w.clone(), (0..w.len()).map(|_| C64::new(g.next(), g.next())).collect()).unwrap()
}

#[test]
fn singular_values_match_nalgebra() {
    for seed in 0..10 {
        let (a, b) = gaussian_matrix(seed, 9, 5);
        let mut ours = svd(&a).sigma;
        ours.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let theirs = b.singular_values();
        for (x, y) in ours.iter().zip(theirs.iter()) {
            assert_relative_eq!(*x, *y, max_relative = 1e-10);
        }
    }
}

#[test]
fn least_squares_matches_nalgebra() {
    for seed in 0..10 {
        let (a, b) = gaussian_matrix(seed, 12, 4);
        let mut g = GaussianSource::new(seed, 1, 0);
        let rhs: Vec<f64> = (0..12).map(|_| g.next()).collect();
        let ours = lstsq(&a, &rhs).unwrap();
        let theirs = b.svd(true, true).solve(&nalgebra::DVector::from_vec(rhs), 1e-14).unwrap();
        for (x, y) in ours.iter().zip(theirs.iter()) {
            assert_relative_eq!(*x, *y, epsilon = 1e-10);
        }
    }
}

/// `ε^{Σs} Σ_x (Lf)(x) conj f(x)` against `ε^{Σs} N^{-1} Σ_θ L̂_ε(θ) |f̂(θ)|²`.
#[test]
fn pairing_matches_dual_quadrature() {
    let ops = [
        (DiffOperator::laplacian(2), 1.0),
        (DiffOperator::heat(2).unwrap(), 0.5),
        (DiffOperator::cauchy_riemann(), 0.5),
    ];
    for (seed, (op, eps)) in ops.into_iter().enumerate() {
        let s = op.scaling().clone();
        let w = LatticeWindow::centered(s.clone(), eps, 8).unwrap();
        let mut f = random_field(&w, seed as u64);
        for (lin, v) in f.values_mut().iter_mut().enumerate() {
            if w.index_of(lin).iter().any(|k| k.abs() > 5) {
                *v = C64::new(0.0, 0.0);
            }
        }
        let lf = op.apply(&f).unwrap();
        let vol = eps.powi(s.total() as i32);
        let mut physical = C64::new(0.0, 0.0);
        for k in lf.window().indices() {
            physical += lf.get(&k).unwrap() * f.get(&k).unwrap().conj();
        }
        physical *= vol;

        let shape = w.shape();
        let mut hat = f.values().to_vec();
        dft(&mut hat, &shape, false);
        let n: usize = shape.iter().product();
        let mut dual = C64::new(0.0, 0.0);
        for (lin, fh) in hat.iter().enumerate() {
            let mut rem = lin;
            let mut theta = vec![0.0; shape.len()];
            for j in (0..shape.len()).rev() {
                theta[j] = mode_frequency(rem % shape[j], shape[j], w.step(j));
                rem /= shape[j];
            }
            dual += op.discrete_symbol(eps, &theta) * fh.norm_sqr();
        }
        dual *= vol / n as f64;
        assert!((physical - dual).norm() <= 1e-9 * physical.norm().max(dual.norm()), "{physical} vs {dual}");
    }
}

#[test]
fn discrete_symbol_converges_at_first_order_or_better() {
    let ops = [DiffOperator::laplacian(2), DiffOperator::heat(2).unwrap(), DiffOperator::cauchy_riemann()];
    for op in &ops {
        for xi in [[0.7, -0.3], [1.5, 2.0], [-0.4, 0.9]] {
            let err = |eps: f64| (op.discrete_symbol(eps, &xi) - op.continuum_symbol(&xi)).norm();
            let mut prev = err(0.1);
            for k in 1..4 {
                let e = err(0.1 / 2f64.powi(k));
                assert!((prev / e).log2() >= 0.9, "rate too low for {}", op.describe());
                prev = e;
            }
        }
    }
}

#[test]
fn frozen_constant_coefficient_is_a_jet() {
    let w = LatticeWindow::centered(Scaling::isotropic(2), 0.5, 4).unwrap();
    let u = random_field(&w, 11);
    let v = random_field(&w, 12);
    let a0 = C64::new(0.7, -0.2);
    let a = Field::new(w.clone(), vec![a0; w.len()]).unwrap();
    let diff = Field::new(w.clone(), u.values().iter().zip(v.values()).map(|(p, q)| p - a0 * q).collect()).unwrap();
    let frozen = frozen_coefficient_germ(&u, &v, &a, 2, None).unwrap();
    let jet = jet_germ(&diff, 2, None).unwrap();
    assert_eq!(frozen.bases(), jet.bases());
    for (p, q) in frozen.values().iter().zip(jet.values()) {
        assert!((p - q).norm() <= 1e-12 * (1.0 + q.norm()));
    }
}

#[test]
fn jets_are_centered_at_every_base() {
    for (s, eps) in [(Scaling::isotropic(2), 1.0), (Scaling::new(vec![2, 1]).unwrap(), 0.5)] {
        let w = LatticeWindow::centered(s, eps, 4).unwrap();
        let u = random_field(&w, 5);
        for eta in [1.5, 2.5] {
            let rep = center_check(&jet_germ(&u, eta as u32, None).unwrap(), eta);
            assert!(rep.centered && rep.checked > 0, "worst {}", rep.worst);
        }
    }
}

#[test]
fn rescaled_kernel_elements_stay_in_the_kernel() {
    for op in [DiffOperator::laplacian(2), DiffOperator::heat(2).unwrap()] {
        let s = op.scaling().clone();
        let kb = polynomial_kernel(&op, 1.0, 2.5).unwrap();
        assert!(kb.dim() > 0);
        for eps in [0.5, 0.25] {
            let w = LatticeWindow::centered(s.clone(), eps, 5).unwrap();
            for i in 0..kb.dim() {
                let f = Field::from_fn(w.clone(), |x, _| {
                    let unit: Vec<f64> = x.iter().enumerate().map(|(j, v)| v / eps.powi(s.weight(j) as i32)).collect();
                    kb.eval(i, &unit)
                });
                let lf = op.apply(&f).unwrap();
                let scale = f.max_abs().max(1.0) * eps.powi(-(op.order() as i32));
                assert!(lf.max_abs() <= 1e-9 * scale, "{} at eps {eps}", op.describe());
            }
        }
    }
}

#[test]
fn probes_are_exact_on_jet_germs() {
    let cases = [
        (Scaling::isotropic(1), 1.5, vec![-2], vec![20]),
        (Scaling::isotropic(1), 2.5, vec![-2], vec![260]),
        (Scaling::isotropic(2), 1.5, vec![-2, -2], vec![520, 40]),
    ];
    for (s, eta, lo, hi) in cases {
        let w = LatticeWindow::new(s.clone(), 1.0, lo, hi).unwrap();
        let mut g = GaussianSource::new(3, 2, 0);
        let c: Vec<f64> = (0..6).map(|_| g.next()).collect();
        // Smooth data keeps the jets of moderate size on the long window.
        let u = Field::from_fn(w.clone(), |x, _| {
            let t: f64 = x.iter().enumerate().map(|(j, v)| c[j] * v / 50.0).sum();
            C64::new((t + c[4]).sin(), (t * c[5]).cos())
        });
        let d = s.dim();
        let (x, y) = (vec![1i64; d], vec![0i64; d]);
        let germ = jet_germ(&u, eta as u32, Some(vec![x.clone(), y.clone()])).unwrap();
        let weights = construct_weights(&s, eta, 0.5).unwrap();
        let rep = probe_coefficients(&germ, &x, &y, eta, 0.5, &weights).unwrap();
        let scale = germ.max_abs().max(1.0);
        assert!(rep.residual <= 1e-8 * scale, "residual {}", rep.residual);
    }
}
