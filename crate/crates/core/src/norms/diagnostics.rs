//! Both sides of the local Hölder bounds for germs, as ratio reports.

use num_traits::Float;

use super::negative::negative_holder_local;
use super::positive::holder_local_witness;
use super::{norm_g_eta, seminorm_g_eta_alpha, seminorm_g_gamma, TestFunctionFamily};
use crate::error::{Error, Result};
use crate::germs::Germ;
use crate::ops::DiffOperator;
use crate::window::Field;

#[derive(Debug, Clone, PartialEq)]
pub struct RatioDiagnostic {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; `0` when both vanish, infinite when only `rhs` does.
    pub ratio: f64,
    /// `rhs == 0 < lhs`.
    pub violation: bool,
    /// Base point attaining `lhs`.
    pub base: Option<alloc::vec::Vec<i64>>,
}

impl RatioDiagnostic {
    fn new(lhs: f64, rhs: f64, base: Option<alloc::vec::Vec<i64>>) -> Self {
        let (ratio, violation) = if rhs > 0.0 {
            (lhs / rhs, false)
        } else if lhs > 0.0 {
            (f64::INFINITY, true)
        } else {
            (0.0, false)
        };
        RatioDiagnostic { lhs, rhs, ratio, violation, base }
    }
}

fn check(eta: f64, alpha: f64, r: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < eta && eta.is_finite()) {
        return Err(Error::InvalidParameter("need 0 < alpha < eta".into()));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    Ok(())
}

/// LHS `sup_x [U_x]_{C^α(B_R(x))}` against
/// RHS `(‖U‖_{G^η} + [U]_{G^{η,α}}) R^{η-α}`.
pub fn diagnostic_e33(u: &Germ, eta: f64, alpha: f64, r: f64) -> Result<RatioDiagnostic> {
    check(eta, alpha, r)?;
    let w = u.window();
    let mut lhs = 0.0f64;
    let mut base = None;
    for b in 0..u.n_bases() {
        let f = Field::new(w.clone(), u.slice(b).to_vec())?;
        let (v, _) = holder_local_witness(&f, alpha, &u.bases()[b], r)?;
        if base.is_none() || v > lhs {
            lhs = v;
            base = Some(u.bases()[b].clone());
        }
    }
    let rhs = (norm_g_eta(u, eta)?.value + seminorm_g_eta_alpha(u, eta, alpha)?.value) * Float::powf(r, eta - alpha);
    Ok(RatioDiagnostic::new(lhs, rhs, base))
}

/// LHS `sup_x ‖L U_x‖_{C^{α-m}(B_R(x))}` against
/// RHS `([L U]_{G^{η-m}} + [U]_{G^{η,α}}) R^{η-α}`, with `m` the order of
/// `L`.
pub fn diagnostic_e37(
    u: &Germ,
    op: &DiffOperator,
    eta: f64,
    alpha: f64,
    r: f64,
    fam: &TestFunctionFamily,
) -> Result<RatioDiagnostic> {
    check(eta, alpha, r)?;
    let m = op.order() as f64;
    if !(eta < m) {
        return Err(Error::InvalidParameter("need eta below the operator order".into()));
    }
    let lu = u.apply_operator(op)?;
    let out = lu.window();
    let mut lhs = 0.0f64;
    let mut base = None;
    for b in 0..u.n_bases() {
        let f = Field::new(out.clone(), lu.germ().slice(b).to_vec())?;
        let v = negative_holder_local(&f, alpha - m, fam, &u.base_coords(b), r)?;
        if base.is_none() || v > lhs {
            lhs = v;
            base = Some(u.bases()[b].clone());
        }
    }
    let rhs = (seminorm_g_gamma(&lu, eta - m, fam)?.value + seminorm_g_eta_alpha(u, eta, alpha)?.value)
        * Float::powf(r, eta - alpha);
    Ok(RatioDiagnostic::new(lhs, rhs, base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Scaling;
    use crate::window::LatticeWindow;
    use crate::C64;

    #[test]
    fn zero_germ_gives_zero_ratio() {
        let s = Scaling::isotropic(1);
        let w = LatticeWindow::centered(s.clone(), 1.0, 8).unwrap();
        let u = Germ::zeros(w.clone(), Germ::all_bases(&w));
        let d = diagnostic_e33(&u, 1.5, 0.5, 4.0).unwrap();
        assert_eq!((d.lhs, d.rhs, d.ratio, d.violation), (0.0, 0.0, 0.0, false));
        let fam = TestFunctionFamily::new(&s, 2);
        let d = diagnostic_e37(&u, &DiffOperator::laplacian(1), 1.5, 0.5, 4.0, &fam).unwrap();
        assert_eq!(d.ratio, 0.0);
    }

    #[test]
    fn distance_power_ratio_bounded() {
        let s = Scaling::isotropic(1);
        let w = LatticeWindow::centered(s.clone(), 1.0, 8).unwrap();
        let u = Germ::from_fn(w.clone(), Germ::all_bases(&w), |x, y| C64::new(Float::powf((x[0] - y[0]).abs(), 1.5), 0.0));
        let d = diagnostic_e33(&u, 1.5, 0.5, 4.0).unwrap();
        assert!(d.rhs > 0.0 && d.ratio.is_finite() && d.ratio < 10.0);
    }
}
