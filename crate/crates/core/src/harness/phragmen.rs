//! Phragmén–Lindelöf in the upper half-plane with a class-A weight:
//! boundary values `≤ 0` and `t⁻¹ ∫₀^π u⁺(te^{iθ}) dν(θ) → 0` force `u ≤ 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{check_grid, integrate_against, linear_grid, TestFunction};
use crate::error::{out_of_range, Result};
use crate::measures::SegmentMeasure;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhragmenConfig {
    /// Boundary samples on `[−X, X]` with `X` the last grid radius.
    pub boundary_samples: usize,
    /// Radial and angular samples of the closed half-disk for the conclusion.
    pub radial_samples: usize,
    pub angular_samples: usize,
    /// Tail points over which `t⁻¹L(t)` must be nonincreasing.
    pub tail: usize,
    pub tol: f64,
}

impl Default for PhragmenConfig {
    fn default() -> Self {
        Self {
            boundary_samples: 4001,
            radial_samples: 64,
            angular_samples: 129,
            tail: 3,
            tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhragmenStatus {
    /// Both hypotheses hold and so does the conclusion.
    ConclusionHolds,
    /// A hypothesis fails, so the theorem says nothing.
    HypothesisViolated,
    /// Both hypotheses hold but `u > 0` somewhere: a counterexample.
    TheoremViolated,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhragmenReport {
    pub function: String,
    pub config: PhragmenConfig,
    pub grid: Vec<f64>,
    /// `t⁻¹ ∫₀^π u⁺(te^{iθ}) dν(θ)`.
    pub growth: Vec<f64>,
    pub boundary_max: f64,
    pub half_disk_max: f64,
    pub h1: bool,
    pub h2: bool,
    pub conclusion: bool,
    pub status: PhragmenStatus,
}

pub fn phragmen_check(
    u: &TestFunction,
    nu: &SegmentMeasure,
    t_grid: &[f64],
    cfg: &PhragmenConfig,
) -> Result<PhragmenReport> {
    nu.require_segment(0.0, PI)?;
    check_grid("t_grid", t_grid, true)?;
    if cfg.boundary_samples < 2 || cfg.radial_samples < 2 || cfg.angular_samples < 2 {
        return Err(out_of_range("samples", 1.0, "every sample count >= 2"));
    }
    if cfg.tail == 0 || !(cfg.tol >= 0.0) {
        return Err(out_of_range("tail", cfg.tail as f64, "tail >= 1 and tol >= 0"));
    }
    let radius = *t_grid.last().unwrap();
    let finite_max = |it: &mut dyn Iterator<Item = f64>| {
        it.filter(|v| !v.is_nan()).fold(f64::NEG_INFINITY, f64::max)
    };

    let boundary_max = finite_max(
        &mut linear_grid(-radius, radius, cfg.boundary_samples)
            .into_iter()
            .map(|x| u.extended(Complex64::new(x, 0.0))),
    );
    let h1 = boundary_max <= cfg.tol;

    let growth: Vec<f64> = t_grid
        .iter()
        .map(|&t| {
            integrate_against(nu, |th| {
                let v = u.extended(Complex64::from_polar(t, th));
                if v.is_nan() {
                    0.0
                } else {
                    v.max(0.0)
                }
            }) / t
        })
        .collect();
    let tail = &growth[growth.len().saturating_sub(cfg.tail + 1)..];
    let h2 = *growth.last().unwrap() <= cfg.tol
        && tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-300);

    let half_disk_max = finite_max(&mut linear_grid(0.0, radius, cfg.radial_samples + 1).into_iter().skip(1).flat_map(
        |r| {
            // open half-disk: stay off the real axis
            linear_grid(0.0, PI, cfg.angular_samples + 2)
                .into_iter()
                .skip(1)
                .take(cfg.angular_samples)
                .map(move |th| u.extended(Complex64::from_polar(r, th)))
        },
    ));
    let conclusion = half_disk_max <= cfg.tol;

    let status = if !(h1 && h2) {
        PhragmenStatus::HypothesisViolated
    } else if conclusion {
        PhragmenStatus::ConclusionHolds
    } else {
        PhragmenStatus::TheoremViolated
    };
    Ok(PhragmenReport {
        function: u.to_string(),
        config: *cfg,
        grid: t_grid.to_vec(),
        growth,
        boundary_max,
        half_disk_max,
        h1,
        h2,
        conclusion,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{geometric_grid, Part};

    fn half_uniform() -> SegmentMeasure {
        SegmentMeasure::uniform(0.0, PI).unwrap()
    }

    fn run(u: &TestFunction) -> PhragmenReport {
        phragmen_check(u, &half_uniform(), &geometric_grid(1.0, 1e4, 20), &Default::default()).unwrap()
    }

    #[test]
    fn mobius_satisfies_everything() {
        let r = run(&TestFunction::HalfPlaneMobius);
        assert!(r.h1 && r.h2 && r.conclusion);
        assert_eq!(r.status, PhragmenStatus::ConclusionHolds);
    }

    #[test]
    fn negative_im_z_satisfies_everything() {
        let r = run(&TestFunction::monomial(1, Part::Im, -1.0));
        assert_eq!(r.status, PhragmenStatus::ConclusionHolds);
        assert!(r.growth.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn im_z_violates_growth_hypothesis() {
        let r = run(&TestFunction::monomial(1, Part::Im, 1.0));
        assert!(r.h1);
        assert!(!r.h2);
        // t⁻¹L(t) = ∫ sin θ dθ/π = 2/π
        for g in &r.growth {
            assert!((g - 2.0 / PI).abs() < 1e-12);
        }
        assert_eq!(r.status, PhragmenStatus::HypothesisViolated);
    }

    #[test]
    fn family_has_no_counterexample() {
        for u in TestFunction::full_family() {
            let r = run(&u);
            assert_ne!(r.status, PhragmenStatus::TheoremViolated, "{u}");
        }
    }

    #[test]
    fn wrong_segment_is_rejected() {
        let nu = SegmentMeasure::uniform(0.0, 1.0).unwrap();
        assert!(phragmen_check(&TestFunction::zero(), &nu, &[1.0], &Default::default()).is_err());
    }
}
