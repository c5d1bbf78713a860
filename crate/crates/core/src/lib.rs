//! Anisotropic germ calculus on lattices.
//!
//! The crate works on finite boxes of the anisotropic lattice
//! `Λ_ε = ε^{s_1} Z × … × ε^{s_d} Z` and provides
//!
//! * the anisotropic degree, distance and rescaling maps ([`geometry`]),
//! * tabulated germs `U_x(y)` with jet and frozen-coefficient constructions ([`germs`]),
//! * the germ semi-norms `G^η`, `G^{η,α}`, `G^γ` (γ < 0), their locally uniform
//!   variants, recentered Hölder semi-norms and the McShane extension ([`norms`]),
//! * constant-coefficient difference operators, their Fourier symbols and an
//!   ellipticity classifier ([`ops`]),
//! * polynomial kernels and symbol-zero searches ([`liouville`]),
//! * the weight construction used to bound polynomial coefficients ([`coeff_bounds`]),
//! * ensemble probes of the Schauder inequalities ([`harness`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command-line
//! front end and the parallel runner live in the `schauder` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod coeff_bounds;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod germs;
pub mod harness;
pub mod linalg;
pub mod liouville;
pub mod lp;
pub mod minimax;
pub mod norms;
pub mod ops;
pub mod window;

pub use error::{Error, Result};
pub use geometry::{MultiIndex, Point, ScaleMap, Scaling};
pub use germs::{DistGerm, Germ};
pub use window::{Field, LatticeWindow};

/// Complex scalar used for every tabulated value.
pub type C64 = num_complex::Complex64;
