//! Synthesis of strongly stabilizing (stable) H-infinity controllers that
//! minimize weighted sensitivity for SISO time-delay plants.
//!
//! The pipeline factors a retarded/neutral delay plant into inner/inner/outer
//! form, sets up Nevanlinna-Pick interpolation data at the plant's
//! right-half-plane zeros, computes the optimal level `gamma_ss` (and its
//! strip-constrained variant `gamma_ss_rho`), extracts optimal or central
//! interpolants, searches for finite-dimensional units with a first-order
//! free parameter, and assembles/verifies the resulting controller.

pub mod error;
pub mod factorization;
pub mod nevpick;
pub mod plantfile;
pub mod quasipoly;
pub mod rational;
pub mod strip;
pub mod synthesis;
pub mod unitsearch;

pub use error::{Error, Result};
pub use factorization::{factorize, relative_degree, FactorizationCase, PlantFactorization};
pub use nevpick::{gamma_ss, gamma_wsm, interp_data, np_interpolant, np_parametrization, pick_matrix, InterpData, Interpolant, NpParametrization};
pub use quasipoly::{QuasiPolynomial, RhpZeroReport, SystemClass, ZeroBox};
pub use rational::{BlaschkeProduct, Polynomial, RationalFn};
