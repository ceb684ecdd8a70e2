//! Shell functions Ω_N(x; μ, ν): isotropic functions concentrated on a sphere
//! of radius μ and blurred by a Gaussian of variance ν, closed under further
//! Gaussian convolution. The crate evaluates them, fits sums of them to
//! oscillating radial profiles, and uses those sums to synthesize
//! limited-resolution, blurred images and 3-D maps.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod decomp;
pub mod error;
pub mod imaging;
pub mod io;
pub mod rfourier;
pub mod shells;
pub mod specfun;

#[cfg(test)]
mod oracle;

pub use error::{Error, Result};
pub use shells::{Dim, PeakKind, PeakReport, ShellModel, ShellTerm};
