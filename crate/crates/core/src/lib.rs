//! Saddle-node arcs inside a planar horseshoe.
//!
//! This crate constructs a one-parameter family of 1D maps passing through a
//! saddle-node bifurcation at `mu = 0`, embeds it as the vertical dynamics of
//! a planar horseshoe-like family, and numerically certifies that the maximal
//! invariant set of the planar family is uniformly hyperbolic for every
//! `mu != 0` in the parameter window, i.e. that the bifurcation is isolated.
//!
//! The pipeline, bottom to top:
//!
//! * [`normal_form`]: the truncated saddle-node field and its exact time-one
//!   maps;
//! * [`global_map`]: the full 1D diffeomorphism on `J_mu` with validated
//!   derivative bounds `c1`, `c2`;
//! * [`escape`]: passage counts through the slow channel and the uniform
//!   lower bounds `sigma_0..sigma_3` for derivatives of iterates;
//! * [`horseshoe`]: the planar family, a skew product on the strip `H` and a
//!   strongly expanding flip on `H_tilde`, with the solved constants
//!   `(sigma_tilde, lambda)`;
//! * [`cover`]: adaptive box covers outer-approximating the maximal
//!   invariant set, with a transition graph;
//! * [`hyperbolicity`]: interval-certified expansion witnesses, cone-field
//!   checks, and the uniform hyperbolicity constants `(C, zeta)`.
//!
//! The `examples/` directory exercises each capability; a thin `horseshoe`
//! binary exposes the same pipeline as subcommands.

// Guards are written `!(x > 0.0)` on purpose: they must also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod cover;
pub mod error;
pub mod escape;
pub mod global_map;
pub mod horseshoe;
pub mod hyperbolicity;
pub mod interval;
pub mod json;
pub mod normal_form;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use escape::EscapeConstants;
pub use global_map::{GlobalMap1D, GlobalMapSpec};
pub use horseshoe::{HorseshoeMap2D, Region};
pub use hyperbolicity::{BoxCover, HyperbolicityCertificate};
pub use normal_form::SaddleNodeNormalForm;
