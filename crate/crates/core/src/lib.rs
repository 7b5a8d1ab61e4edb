//! Radial projections of harmonic measure of star-shaped domains.
//!
//! A continuous strictly increasing probability distribution `ν` on
//! `[0, 2π]` is the angular distribution of Brownian exit points, seen from
//! the origin, of some strictly star-shaped domain exactly when its inverse
//! satisfies a vanishing Dini-type defect condition (class A). This crate
//! builds that domain from `ν`, estimates harmonic measure independently by
//! walk-on-spheres, and tests the related log-log majorant conditions.

pub mod clausen;
pub mod construction;
pub mod error;
pub mod harmonic_measure;
pub mod harness;
pub mod io;
pub mod measures;
pub mod potentials;
pub mod quad;

pub use error::{Error, Result};
