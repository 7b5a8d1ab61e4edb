//! Logarithmic potentials of the measure `dμ` on a segment and on the unit circle.
//!
//! Every profile is piecewise linear, so `dμ` has a piecewise-constant
//! density and the log kernel integrates in closed form on each cell: the
//! segment kernel through `(t−x) log|t−x| − t`, the circle kernel through the
//! Clausen function.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::clausen::clausen2;
use crate::error::{out_of_range, Result};
use crate::measures::InverseProfile;
use crate::quad::{integrate_with_breaks, Tolerance};

/// `N(x) = ∫₀¹ log|x − t| dμ(t)`.
pub fn segment_log_potential(mu: &InverseProfile, x: f64) -> f64 {
    let antiderivative = |t: f64| {
        let d = t - x;
        if d == 0.0 {
            -t
        } else {
            d * d.abs().ln() - t
        }
    };
    let s = mu.arguments();
    s.windows(2)
        .zip(mu.slopes())
        .filter(|(_, slope)| *slope != 0.0)
        .map(|(w, slope)| slope * (antiderivative(w[1]) - antiderivative(w[0])))
        .sum()
}

/// Cells `[θᵢ, θᵢ₊₁]` of `θ ↦ μ(θ/2π)` with the density of `dμ(θ/2π)` on each.
fn circle_cells(mu: &InverseProfile) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
    let s = mu.arguments();
    let v = mu.values();
    (0..s.len() - 1).filter_map(move |i| {
        let (t0, t1) = (TAU * s[i], TAU * s[i + 1]);
        let density = (v[i + 1] - v[i]) / (t1 - t0);
        (density != 0.0).then_some((t0, t1, density))
    })
}

/// Cells narrower than this are integrated locally instead of through `Cl₂`
/// differences, which lose all precision once the density is huge.
const NARROW_CELL: f64 = 1e-4;

/// `u(e^{iψ}) = (1/π) ∫₀^{2π} log|e^{iθ} − e^{iψ}| dμ(θ/2π)` through `Cl₂`.
pub fn circle_potential_on_circle(mu: &InverseProfile, psi: f64) -> f64 {
    // ∫ log|2 sin((θ−ψ)/2)| dθ = −Cl₂(θ − ψ)
    let s = mu.arguments();
    let v = mu.values();
    let mut cached: Option<(usize, f64)> = None;
    let mut cl = |i: usize| -> f64 {
        match cached {
            Some((j, value)) if j == i => value,
            _ => {
                let value = clausen2(TAU * s[i] - psi);
                cached = Some((i, value));
                value
            }
        }
    };
    let mut sum = 0.0;
    for i in 0..s.len() - 1 {
        let mass = v[i + 1] - v[i];
        if mass == 0.0 {
            continue;
        }
        let (t0, t1) = (TAU * s[i], TAU * s[i + 1]);
        let width = t1 - t0;
        if width >= NARROW_CELL {
            let c0 = cl(i);
            let c1 = cl(i + 1);
            sum += mass / width * (c0 - c1);
        } else {
            sum += mass * narrow_cell_mean(t0, width, psi);
        }
    }
    sum / PI
}

/// Mean of `log|2 sin((θ−ψ)/2)|` over `[t0, t0 + width]` for a narrow cell.
fn narrow_cell_mean(t0: f64, width: f64, psi: f64) -> f64 {
    let x0 = (t0 - psi + PI).rem_euclid(TAU) - PI;
    let x1 = x0 + width;
    let kernel = |x: f64| (2.0 * (0.5 * x).sin()).abs().ln();
    let gap = if x0 > 0.0 { x0 } else if x1 < 0.0 { -x1 } else { 0.0 };
    let gap = gap.min(TAU - x1.abs().max(x0.abs()));
    if gap > 100.0 * width {
        let h = 0.5 * width / 3f64.sqrt();
        let m = x0 + 0.5 * width;
        return 0.5 * (kernel(m - h) + kernel(m + h));
    }
    // log|x| exactly, plus the smooth remainder log(sin(x/2)/(x/2)) at the midpoint
    let f = |x: f64| if x == 0.0 { 0.0 } else { x * x.abs().ln() - x };
    let m = x0 + 0.5 * width;
    let smooth = if m == 0.0 { 0.0 } else { ((0.5 * m).sin() / (0.5 * m)).ln() };
    (f(x1) - f(x0)) / width + smooth
}

/// `u(z)` by adaptive quadrature on each cell, splitting at `θ = arg z`.
pub fn circle_log_potential_quadrature(mu: &InverseProfile, z: Complex64) -> f64 {
    let tol = Tolerance::new(1e-14, 1e-13);
    let arg = z.arg().rem_euclid(TAU);
    let r = z.norm();
    // |e^{iθ} − z|² = (1 − r)² + 4r sin²((θ − arg z)/2), free of cancellation near θ = arg z
    let kernel = |theta: f64| {
        let h = (0.5 * (theta - arg)).sin();
        let d2 = (1.0 - r) * (1.0 - r) + 4.0 * r * h * h;
        if d2 > 0.0 {
            0.5 * d2.ln()
        } else {
            0.0
        }
    };
    let mut sum = 0.0;
    for (t0, t1, density) in circle_cells(mu) {
        let mut pts = vec![t0];
        if arg > t0 && arg < t1 {
            pts.push(arg);
        }
        pts.push(t1);
        sum += density * integrate_with_breaks(kernel, &pts, tol).value;
    }
    sum / PI
}

/// `u(z) = (1/π) ∫₀^{2π} log|e^{iθ} − z| dμ(θ/2π)`; exact on the unit circle,
/// adaptive quadrature elsewhere.
pub fn circle_log_potential(mu: &InverseProfile, z: Complex64) -> f64 {
    if z == Complex64::new(0.0, 0.0) {
        return 0.0;
    }
    if (z.norm() - 1.0).abs() <= 1e-14 {
        circle_potential_on_circle(mu, z.arg())
    } else {
        circle_log_potential_quadrature(mu, z)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityReport {
    pub grid_size: usize,
    /// Dyadic scales `2π · 2⁻ᵏ`.
    pub scales: Vec<f64>,
    /// Empirical modulus of continuity of `u` on the refined grid at each scale.
    pub modulus: Vec<f64>,
    /// Oscillation of `u` within each scale around its minimum point.
    pub local_oscillation: Vec<f64>,
    pub argmin: f64,
    /// Same modulus on the coarse grid, for comparison.
    pub coarse_modulus: Vec<f64>,
    /// Finest-scale moduli keep shrinking.
    pub shrinking: bool,
}

/// Samples `u` on the circle at `grid_size` and `2·grid_size` points and reports
/// the empirical modulus of continuity at dyadic scales.
pub fn potential_continuity_probe(mu: &InverseProfile, grid_size: usize) -> Result<ContinuityReport> {
    if grid_size < 16 {
        return Err(out_of_range("grid_size", grid_size as f64, "grid_size >= 16"));
    }
    let fine_n = 2 * grid_size;
    let fine: Vec<f64> = (0..fine_n)
        .map(|j| circle_potential_on_circle(mu, TAU * j as f64 / fine_n as f64))
        .collect();
    let coarse: Vec<f64> = fine.iter().step_by(2).copied().collect();

    let levels = fine_n.trailing_zeros().max(1) as usize;
    let levels = levels.min((usize::BITS - fine_n.leading_zeros()) as usize);
    let mut scales = Vec::new();
    let mut modulus = Vec::new();
    let mut coarse_modulus = Vec::new();
    let mut local_oscillation = Vec::new();

    let (imin, _) = fine
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });

    for k in 1..=levels {
        let scale = TAU / (1u64 << k) as f64;
        let fine_steps = ((scale / (TAU / fine_n as f64)).round() as usize).max(1);
        if fine_steps > fine_n / 2 {
            continue;
        }
        scales.push(scale);
        modulus.push(periodic_modulus(&fine, fine_steps));
        let coarse_steps = fine_steps / 2;
        coarse_modulus.push(if coarse_steps == 0 {
            f64::NAN
        } else {
            periodic_modulus(&coarse, coarse_steps)
        });
        let local = (0..=2 * fine_steps)
            .map(|j| fine[(imin + fine_n + j - fine_steps) % fine_n])
            .fold(f64::NEG_INFINITY, f64::max)
            - fine[imin];
        local_oscillation.push(local);
    }

    let tail = &modulus[modulus.len().saturating_sub(4)..];
    let shrinking = tail.len() >= 2 && tail.windows(2).all(|w| w[1] <= 0.9 * w[0] || w[0] < 1e-12);

    Ok(ContinuityReport {
        grid_size,
        scales,
        modulus,
        local_oscillation,
        argmin: TAU * imin as f64 / fine_n as f64,
        coarse_modulus,
        shrinking,
    })
}

/// `max |f(i) − f(j)|` over cyclic index distance `1..=steps`.
fn periodic_modulus(values: &[f64], steps: usize) -> f64 {
    let n = values.len();
    let mut best = 0.0f64;
    for i in 0..n {
        for d in 1..=steps {
            best = best.max((values[i] - values[(i + d) % n]).abs());
        }
    }
    best
}
