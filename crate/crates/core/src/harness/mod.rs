//! Numerical profiles of the growth theorems on explicit test functions, the
//! Matsaev weight construction and Carleman's formula in a sector.

pub mod carleman;
pub mod functions;
pub mod levinson;
pub mod matsaev;
pub mod phragmen;
pub mod theorem1;

pub use carleman::{
    carleman_identity_residual, carleman_terms, observed_orders, CarlemanTerms, SectorSpec,
};
pub use functions::{FunctionKind, Part, TestFunction};
pub use levinson::{levinson_profile, LevinsonReport, Rect};
pub use matsaev::{
    lambda, matsaev_log_minus, matsaev_profile, matsaev_weight, matsaev_weight_grid, psi_weight, MatsaevProfile,
    MatsaevWeight, Phi,
};
pub use phragmen::{phragmen_check, PhragmenConfig, PhragmenReport, PhragmenStatus};
pub use theorem1::{theorem1_profile, IntegratedProfile, Theorem1Config, Theorem1Report};

use crate::error::{Error, Result};
use crate::measures::SegmentMeasure;
use crate::quad::{integrate, Tolerance};

/// `∫ g dν` with `g` integrated adaptively against the constant density on each cell.
pub(crate) fn integrate_against<G: Fn(f64) -> f64>(nu: &SegmentMeasure, g: G) -> f64 {
    let tol = Tolerance::new(1e-14, 1e-12);
    let t = nu.abscissae();
    let v = nu.values();
    let mut sum = 0.0;
    for i in 0..t.len() - 1 {
        let mass = v[i + 1] - v[i];
        if mass == 0.0 {
            continue;
        }
        let width = t[i + 1] - t[i];
        sum += mass / width * integrate(&g, t[i], t[i + 1], tol).value;
    }
    sum
}

pub(crate) fn check_grid(name: &str, grid: &[f64], positive: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput(format!("{name} is empty")));
    }
    if grid.iter().any(|x| !x.is_finite() || (positive && *x <= 0.0)) {
        return Err(Error::InvalidInput(format!("{name} has non-finite or nonpositive entries")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

/// `n` points spaced geometrically from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|k| lo * (ratio * k as f64).exp()).collect();
    g[n - 1] = hi;
    g
}

/// `n` points spaced uniformly from `lo` to `hi`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let mut g: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    g[n - 1] = hi;
    g
}
