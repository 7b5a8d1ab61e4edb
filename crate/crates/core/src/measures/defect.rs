//! The class-A defect `D(δ) = sup_x ∫₀^δ (μ(x+t) − μ(x−t))/t dt` and the
//! membership tester built on its dyadic sequence.

use std::fmt;

use serde::Serialize;

use super::segment::{InverseProfile, SegmentMeasure};
use crate::error::{out_of_range, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassVerdict {
    InClassA,
    NotInClassA,
    Inconclusive,
}

impl fmt::Display for ClassVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::InClassA => "in A",
            Self::NotInClassA => "not in A",
            Self::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DefectConfig {
    /// Largest `k` in the sequence `D(2⁻ᵏ)`.
    pub k_max: usize,
    /// Membership requires the last defect below this value.
    pub tol: f64,
    /// Size of the first uniform refinement grid for the sup over `x`.
    pub initial_grid: usize,
    /// The uniform grid is doubled until the sup moves by less than this fraction.
    pub sup_rel_change: f64,
    /// A tail `D(2⁻ᴷ)/D(2⁻⁽ᴷ⁻³⁾)` at or above this ratio counts as stalled.
    pub stall_ratio: f64,
}

impl Default for DefectConfig {
    fn default() -> Self {
        Self {
            k_max: 14,
            tol: 1e-2,
            initial_grid: 64,
            sup_rel_change: 0.01,
            stall_ratio: 0.8,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DefectReport {
    pub deltas: Vec<f64>,
    pub defects: Vec<f64>,
    /// Location `x` where each sup was attained.
    pub argmax: Vec<f64>,
    pub tol: f64,
    pub verdict: ClassVerdict,
}

/// `∫₀^δ (μ(x+t) − μ(x−t))/t dt`, exact for piecewise-linear `μ`.
///
/// `r(t) = μ(x+t) − μ(x−t)` is linear between the breakpoints `|sᵢ − x|` and
/// vanishes at `t = 0`, so each piece integrates to `Δr + β log(t₂/t₁)`.
pub fn inner_integral(mu: &InverseProfile, x: f64, delta: f64) -> f64 {
    let s = mu.arguments();
    let v = mu.values();
    let n = s.len();
    // right walker: first node strictly above x; left walker: last node strictly below x
    let mut right = s.partition_point(|&node| node <= x);
    let mut left = s.partition_point(|&node| node < x) as isize - 1;

    let value_at = |upper: usize, y: f64| -> f64 {
        if upper == 0 {
            v[0]
        } else if upper >= n {
            v[n - 1]
        } else {
            let (s0, s1) = (s[upper - 1], s[upper]);
            v[upper - 1] + (v[upper] - v[upper - 1]) * ((y - s0) / (s1 - s0))
        }
    };

    let mut total = 0.0;
    let mut t_prev = 0.0;
    let mut r_prev = 0.0;
    loop {
        let next_right = if right < n { s[right] - x } else { f64::INFINITY };
        let next_left = if left >= 0 { x - s[left as usize] } else { f64::INFINITY };
        let t_next = next_right.min(next_left).min(delta);
        // segment index containing x + t and x − t on (t_prev, t_next)
        let hi = value_at(right, x + t_next);
        let lo = value_at((left + 1) as usize, x - t_next);
        let r_next = hi - lo;
        if t_prev == 0.0 {
            total += r_next;
        } else {
            let beta = (r_prev * t_next - r_next * t_prev) / (t_next - t_prev);
            total += (r_next - r_prev) + beta * (t_next / t_prev).ln();
        }
        if t_next >= delta {
            break;
        }
        if next_right == t_next {
            right += 1;
        }
        if next_left == t_next {
            left -= 1;
        }
        t_prev = t_next;
        r_prev = r_next;
    }
    total
}

/// `D(δ)` together with the maximizing `x`.
pub fn class_a_defect_with_argmax(
    mu: &InverseProfile,
    delta: f64,
    cfg: &DefectConfig,
) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(out_of_range("delta", delta, "0 < delta <= 1"));
    }
    let mut best = (f64::NEG_INFINITY, 0.0);
    let consider = |x: f64, best: &mut (f64, f64)| {
        let value = inner_integral(mu, x, delta);
        if value > best.0 {
            *best = (value, x);
        }
    };

    for &s in mu.arguments() {
        consider(s, &mut best);
        consider(s - delta, &mut best);
        consider(s + delta, &mut best);
    }
    for w in mu.arguments().windows(2) {
        consider(0.5 * (w[0] + w[1]), &mut best);
    }

    let lo = -delta;
    let hi = 1.0 + delta;
    let mut grid = cfg.initial_grid.max(8);
    let mut previous = f64::NAN;
    loop {
        for i in 0..=grid {
            consider(lo + (hi - lo) * i as f64 / grid as f64, &mut best);
        }
        let settled = (best.0 - previous).abs() <= cfg.sup_rel_change * best.0.abs();
        if settled || grid >= 1 << 16 {
            break;
        }
        previous = best.0;
        grid *= 2;
    }

    // polish around the best candidate
    let mut half_width = (hi - lo) / grid as f64;
    for _ in 0..6 {
        let center = best.1;
        for i in 0..=16 {
            consider(center - half_width + 2.0 * half_width * i as f64 / 16.0, &mut best);
        }
        half_width /= 8.0;
    }
    Ok(best)
}

/// `D(δ)` for an inverse profile.
pub fn class_a_defect(mu: &InverseProfile, delta: f64) -> Result<f64> {
    class_a_defect_with_argmax(mu, delta, &DefectConfig::default()).map(|(d, _)| d)
}

/// The dyadic sequence `D(2⁻ᵏ)`, `k = 1..=k_max`, and the membership verdict.
pub fn class_a_report(mu: &InverseProfile, cfg: &DefectConfig) -> Result<DefectReport> {
    let mut deltas = Vec::with_capacity(cfg.k_max);
    let mut defects = Vec::with_capacity(cfg.k_max);
    let mut argmax = Vec::with_capacity(cfg.k_max);
    for k in 1..=cfg.k_max {
        let delta = 0.5f64.powi(k as i32);
        let (d, x) = class_a_defect_with_argmax(mu, delta, cfg)?;
        deltas.push(delta);
        defects.push(d);
        argmax.push(x);
    }
    let verdict = classify(&defects, cfg);
    Ok(DefectReport {
        deltas,
        defects,
        argmax,
        tol: cfg.tol,
        verdict,
    })
}

impl SegmentMeasure {
    pub fn class_a_report(&self, cfg: &DefectConfig) -> Result<DefectReport> {
        class_a_report(&self.inverse(), cfg)
    }
}

fn classify(defects: &[f64], cfg: &DefectConfig) -> ClassVerdict {
    let Some(&last) = defects.last() else {
        return ClassVerdict::Inconclusive;
    };
    let nonincreasing = defects
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15);
    if nonincreasing && last < cfg.tol {
        return ClassVerdict::InClassA;
    }
    if last >= cfg.tol && defects.len() >= 4 {
        let earlier = defects[defects.len() - 4];
        if last >= cfg.stall_ratio * earlier {
            return ClassVerdict::NotInClassA;
        }
    }
    ClassVerdict::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::builtin::nonmember_profile;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{PI, TAU};

    fn sqrt_measure(cells: usize) -> SegmentMeasure {
        SegmentMeasure::from_cdf(0.0, 1.0, cells, |t| t * t).unwrap()
    }

    /// Brute-force oracle: midpoint rule in t on a dense grid, dense scan in x.
    fn brute_force_defect(mu: &InverseProfile, delta: f64) -> f64 {
        let steps = 20_000;
        let h = delta / steps as f64;
        let scan = 2000;
        (0..=scan)
            .map(|i| -delta + (1.0 + 2.0 * delta) * i as f64 / scan as f64)
            .map(|x| {
                (0..steps)
                    .map(|j| {
                        let t = (j as f64 + 0.5) * h;
                        (mu.eval(x + t) - mu.eval(x - t)) / t * h
                    })
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn uniform_defect_is_linear() {
        let mu = SegmentMeasure::uniform(0.0, TAU).unwrap().inverse();
        for k in 2..8 {
            let delta = 0.5f64.powi(k);
            assert_abs_diff_eq!(class_a_defect(&mu, delta).unwrap(), 4.0 * PI * delta, epsilon = 1e-12);
        }
    }

    #[test]
    fn sqrt_profile_matches_closed_form_and_scan() {
        let mu = sqrt_measure(4000).inverse();
        for &delta in &[0.25, 0.0625, 0.01] {
            let (d, x) = class_a_defect_with_argmax(&mu, delta, &DefectConfig::default()).unwrap();
            assert_abs_diff_eq!(d, 2.0 * delta.sqrt(), epsilon = 2e-3);
            assert!(x.abs() < 1e-3);
            let brute = brute_force_defect(&mu, delta);
            assert!(d >= brute - 1e-3, "sup {d} below scan {brute}");
            assert_abs_diff_eq!(d, brute, epsilon = 5e-3);
        }
    }

    #[test]
    fn inner_integral_matches_quadrature() {
        let s: Vec<f64> = (0..=2000).map(|i| (i as f64 / 2000.0).powi(2)).collect();
        let mu = InverseProfile::from_fn(s.clone(), f64::sqrt).unwrap();
        for &(x, delta) in &[(0.0, 0.36), (0.2, 0.1), (0.9, 0.3), (-0.05, 0.2)] {
            let mut breaks: Vec<f64> = s
                .iter()
                .map(|node: &f64| (node - x).abs())
                .filter(|b| *b > 0.0 && *b < delta)
                .collect();
            breaks.push(0.0);
            breaks.push(delta);
            breaks.sort_by(f64::total_cmp);
            let q = crate::quad::integrate_with_breaks(
                |t: f64| if t == 0.0 { 0.0 } else { (mu.eval(x + t) - mu.eval(x - t)) / t },
                &breaks,
                crate::quad::Tolerance::default(),
            );
            assert_abs_diff_eq!(inner_integral(&mu, x, delta), q.value, epsilon = 1e-10);
        }
        // ∫₀^δ √t/t dt = 2√δ up to interpolation error
        assert_abs_diff_eq!(inner_integral(&mu, 0.0, 0.36), 1.2, epsilon = 1e-3);
    }

    #[test]
    fn nonmember_defect_does_not_vanish() {
        let mu = nonmember_profile(0.0, 1.0).unwrap();
        let cfg = DefectConfig {
            k_max: 20,
            ..DefectConfig::default()
        };
        let report = class_a_report(&mu, &cfg).unwrap();
        assert_eq!(report.verdict, ClassVerdict::NotInClassA);
        // at x = 0 the integral is at least ∫ μ(t)/t = log log(e/s_min) − log log(e/δ)
        for (&delta, &d) in report.deltas.iter().zip(&report.defects) {
            assert!(d >= (1.0 - 2.0f64.powi(-1000).ln()).ln() - (1.0 - delta.ln()).ln() - 0.05);
        }
    }

    #[test]
    fn delta_out_of_range() {
        let mu = SegmentMeasure::uniform(0.0, 1.0).unwrap().inverse();
        assert!(class_a_defect(&mu, 0.0).is_err());
        assert!(class_a_defect(&mu, 1.5).is_err());
    }

    #[test]
    fn defect_nondecreasing_and_slope_bounded() {
        let (nu, _) = SegmentMeasure::from_density(0.0, TAU, 256, |t| 2.0 + t.cos()).unwrap();
        let mu = nu.inverse();
        let bound = mu.max_slope();
        let mut prev = 0.0;
        for k in (1..=12).rev() {
            let delta = 0.5f64.powi(k);
            let d = class_a_defect(&mu, delta).unwrap();
            assert!(d >= prev);
            assert!(d <= 2.0 * delta * bound * (1.0 + 1e-12));
            prev = d;
        }
    }

    #[test]
    fn classify_rules() {
        let cfg = DefectConfig::default();
        assert_eq!(classify(&[0.5, 0.2, 0.05, 0.009], &cfg), ClassVerdict::InClassA);
        assert_eq!(classify(&[0.5, 0.49, 0.48, 0.47], &cfg), ClassVerdict::NotInClassA);
        assert_eq!(classify(&[0.5, 0.2, 0.1, 0.05], &cfg), ClassVerdict::Inconclusive);
    }
}
