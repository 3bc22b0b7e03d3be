//! Long-time L^p asymptotics of the heat equation on real hyperbolic space
//! `H^n`, with a general-rank structural layer (root systems, c-functions).
//!
//! Module map:
//! - [`rootsys`]: root data, chamber geometry, critical-region membership.
//! - [`plancherel`]: Gindikin–Karpelevič c-function, Plancherel density, b-function.
//! - [`hgeom`]: hyperboloid-model geometry, Poisson kernel powers, volume quadrature.
//! - [`spherical`]: spherical functions and the radial spherical transform pair.
//! - [`heatkernel`]: heat kernels by three routes, L^p norms, concentration, kernel quotients.
//! - [`massfn`]: initial data and mass functions.
//! - [`evolve`]: heat evolution and the normalized L^p convergence experiments.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod evolve;
pub mod heatkernel;
pub mod hgeom;
pub mod logval;
pub mod massfn;
pub mod output;
pub mod plancherel;
pub mod quad;
pub mod rootsys;
pub mod schedule;
pub mod special;
pub mod spherical;

pub use error::{Error, Result};
pub use logval::LogVal;
