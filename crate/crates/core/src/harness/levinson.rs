//! Levinson-type local bound in the square `Q = {|x| < 1, |y| < 1}`: uniform
//! control of `∫ u⁺(x+iy) dν(y)` on vertical lines bounds `u` on compacts.

use num_complex::Complex64;
use serde::Serialize;

use super::{check_grid, integrate_against, linear_grid, TestFunction};
use crate::error::{out_of_range, Error, Result};
use crate::measures::SegmentMeasure;

/// Closed rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 <= x1 && y0 <= y1) || [x0, x1, y0, y1].iter().any(|v| !v.is_finite()) {
            return Err(Error::Geometry(format!("bad rectangle [{x0}, {x1}] × [{y0}, {y1}]")));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    pub fn centered(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width)
    }

    fn inside_square(&self) -> bool {
        [self.x0, self.x1, self.y0, self.y1].iter().all(|v| v.abs() < 1.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevinsonReport {
    pub function: String,
    pub k: Rect,
    pub grid: Vec<f64>,
    /// `∫_{−1}^{1} u⁺(x+iy) dν(y)` for each `x` in the grid.
    pub line_integrals: Vec<f64>,
    pub sup_line: f64,
    /// Maximum of `u` over a `samples × samples` lattice of `K`.
    pub sup_k: f64,
    /// `sup_k / sup_line`: the bound for `u` normalized so that the line integrals are at most 1.
    pub normalized_sup_k: f64,
    pub samples: usize,
}

pub fn levinson_profile(
    u: &TestFunction,
    nu: &SegmentMeasure,
    x_grid: &[f64],
    k: Rect,
    samples: usize,
) -> Result<LevinsonReport> {
    nu.require_segment(-1.0, 1.0)?;
    check_grid("x_grid", x_grid, false)?;
    if x_grid.iter().any(|x| x.abs() >= 1.0) {
        return Err(Error::InvalidInput("x_grid must lie in (−1, 1)".into()));
    }
    if !k.inside_square() {
        return Err(Error::Geometry("K must lie strictly inside the square |x|, |y| < 1".into()));
    }
    if samples < 2 {
        return Err(out_of_range("samples", samples as f64, "samples >= 2"));
    }
    let line_integrals: Vec<f64> = x_grid
        .iter()
        .map(|&x| {
            integrate_against(nu, |y| {
                let v = u.extended(Complex64::new(x, y));
                if v.is_nan() {
                    0.0
                } else {
                    v.max(0.0)
                }
            })
        })
        .collect();
    let sup_line = line_integrals.iter().copied().fold(0.0, f64::max);
    let sup_k = linear_grid(k.x0, k.x1, samples)
        .into_iter()
        .flat_map(|x| linear_grid(k.y0, k.y1, samples).into_iter().map(move |y| Complex64::new(x, y)))
        .map(|z| u.extended(z))
        .filter(|v| !v.is_nan())
        .fold(f64::NEG_INFINITY, f64::max);
    let normalized_sup_k = if sup_line > 0.0 { sup_k / sup_line } else if sup_k <= 0.0 { 0.0 } else { f64::INFINITY };
    Ok(LevinsonReport {
        function: u.to_string(),
        k,
        grid: x_grid.to_vec(),
        line_integrals,
        sup_line,
        sup_k,
        normalized_sup_k,
        samples,
    })
}
