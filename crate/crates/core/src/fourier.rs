//! Separable discrete Fourier transform on row-major boxes.

use alloc::vec::Vec;

use num_traits::Float;

use crate::C64;

/// In-place DFT along every axis of a row-major array of the given shape.
/// The inverse carries the `1/N` normalisation.
pub fn dft(data: &mut [C64], shape: &[usize], inverse: bool) {
    let total: usize = shape.iter().product();
    assert_eq!(total, data.len());
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut stride = total;
    for &n in shape {
        stride /= n;
        if n <= 1 {
            continue;
        }
        let twiddle: Vec<C64> = (0..n)
            .map(|k| {
                let a = sign * 2.0 * core::f64::consts::PI * k as f64 / n as f64;
                C64::new(Float::cos(a), Float::sin(a))
            })
            .collect();
        let block = n * stride;
        let mut line = alloc::vec![C64::new(0.0, 0.0); n];
        let mut out = alloc::vec![C64::new(0.0, 0.0); n];
        for start in (0..total).step_by(block) {
            for off in 0..stride {
                for (k, l) in line.iter_mut().enumerate() {
                    *l = data[start + off + k * stride];
                }
                for (k, o) in out.iter_mut().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for (t, l) in line.iter().enumerate() {
                        acc += l * twiddle[(k * t) % n];
                    }
                    *o = acc;
                }
                for (k, o) in out.iter().enumerate() {
                    data[start + off + k * stride] = *o;
                }
            }
        }
    }
    if inverse {
        let inv = 1.0 / total as f64;
        for v in data.iter_mut() {
            *v *= inv;
        }
    }
}

/// Dual-torus frequency of DFT mode `k` on an axis of `n` points with step
/// `h`, wrapped into `[-π/h, π/h)`.
pub fn mode_frequency(k: usize, n: usize, h: f64) -> f64 {
    let kk = if 2 * k >= n { k as f64 - n as f64 } else { k as f64 };
    2.0 * core::f64::consts::PI * kk / (n as f64 * h)
}
