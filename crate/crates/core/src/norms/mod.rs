//! Germ semi-norms on finite windows.
//!
//! Every value is the supremum restricted to the window the germ lives on;
//! reports carry that window.

mod diagnostics;
mod family;
mod mcshane;
mod negative;
mod positive;

pub use diagnostics::{diagnostic_e33, diagnostic_e37, RatioDiagnostic};
pub use family::{TestFunction, TestFunctionFamily, TestKind};
pub use mcshane::{holder_constant, mcshane_extend};
pub use negative::{default_lambda_grid, negative_holder_local, seminorm_g_gamma, seminorm_g_gamma_local};
pub use positive::{
    fit_pair, holder_local, norm_g_eta, norm_g_eta_local, seminorm_g_eta_alpha, seminorm_g_eta_alpha_local, sup_below,
};

use alloc::string::String;
use alloc::vec::Vec;

use crate::geometry::{MultiIndex, Point};
use crate::window::LatticeWindow;
use crate::C64;

/// Where a supremum is attained (window indices).
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    None,
    Pair { x: Vec<i64>, y: Vec<i64> },
    Triple { x: Vec<i64>, y: Vec<i64>, z: Vec<i64> },
    Scale { x: Vec<i64>, lambda: f64, member: usize },
}

/// Polynomial `P(z) = Σ ν_β (z - center)^β`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub coefficients: Vec<(MultiIndex, C64)>,
    pub center: Point,
    pub value: f64,
}

impl PolyFit {
    pub fn eval(&self, z: &[f64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (b, c) in &self.coefficients {
            let mut m = 1.0;
            for (j, &e) in b.0.iter().enumerate() {
                m *= num_traits::Float::powi(z[j] - self.center.0[j], e as i32);
            }
            acc += c * m;
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub name: String,
    pub value: f64,
    pub witness: Witness,
    pub eta: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub radius: Option<f64>,
    pub window: LatticeWindow,
    /// Minimising polynomial at the witness pair, for fitted semi-norms.
    pub fit: Option<PolyFit>,
}

impl NormReport {
    pub(crate) fn new(name: &str, window: &LatticeWindow) -> Self {
        NormReport {
            name: name.into(),
            value: 0.0,
            witness: Witness::None,
            eta: None,
            alpha: None,
            gamma: None,
            radius: None,
            window: window.clone(),
            fit: None,
        }
    }
}
