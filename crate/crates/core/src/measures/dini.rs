//! Modulus of continuity of a piecewise-linear profile, its Dini integral and
//! the decreasing rearrangement of the profile's density.

use serde::Serialize;

use super::conditions::ExtendedValue;
use super::segment::InverseProfile;

/// Grid points per octave used for the Dini integral.
const PER_OCTAVE: usize = 16;
/// Octave contributions decaying slower than this ratio are read as divergence.
const DIVERGENCE_RATIO: f64 = 0.95;

/// `Δ(t) = sup_{|x−y|≤t} |μ(x) − μ(y)|`, exact for piecewise-linear `μ`.
///
/// `x ↦ μ(x+t) − μ(x)` is piecewise linear with kinks at `x = sᵢ` and
/// `x = sᵢ − t`, so its maximum sits on one of them.
pub fn modulus_of_continuity(mu: &InverseProfile, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    mu.arguments()
        .iter()
        .map(|&s| (mu.eval(s + t) - mu.eval(s)).max(mu.eval(s) - mu.eval(s - t)))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct DiniReport {
    /// `∫₀¹ Δ(t)/t dt`
    pub dini: ExtendedValue,
    /// Below this scale `Δ(t) = t · max slope` exactly.
    pub linear_scale: f64,
    pub max_slope: f64,
    /// `(2⁻ʲ, ∫_{2⁻ʲ⁻¹}^{2⁻ʲ} Δ(t)/t dt)` for the resolved octaves.
    pub octaves: Vec<(f64, f64)>,
}

/// Modulus of continuity and Dini integral of `μ` over `(0, 1]`.
pub fn dini_modulus(mu: &InverseProfile) -> DiniReport {
    let max_slope = mu.max_slope();
    let linear_scale = mu
        .arguments()
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(1.0, f64::min);

    // geometric grid from 1 down to the linear regime
    let octave_count = (1.0 / linear_scale).log2().ceil().max(1.0) as usize;
    let mut grid: Vec<f64> = (0..=octave_count * PER_OCTAVE)
        .map(|i| 0.5f64.powf(i as f64 / PER_OCTAVE as f64))
        .filter(|&t| t >= linear_scale)
        .collect();
    if grid.last().copied() != Some(linear_scale) {
        grid.push(linear_scale);
    }
    let deltas: Vec<f64> = grid.iter().map(|&t| modulus_of_continuity(mu, t)).collect();

    let mut octaves = Vec::with_capacity(octave_count);
    let mut current = 0.0;
    let mut total = max_slope * linear_scale;
    for (i, (tw, dw)) in grid.windows(2).zip(deltas.windows(2)).enumerate() {
        // grid runs downward: tw[0] > tw[1]
        let (t_hi, t_lo) = (tw[0], tw[1]);
        let (d_hi, d_lo) = (dw[0], dw[1]);
        let beta = (d_lo * t_hi - d_hi * t_lo) / (t_hi - t_lo);
        let piece = (d_hi - d_lo) + beta * (t_hi / t_lo).ln();
        total += piece;
        current += piece;
        if (i + 1) % PER_OCTAVE == 0 {
            octaves.push((t_hi * 2f64.powf((PER_OCTAVE - 1) as f64 / PER_OCTAVE as f64), current));
            current = 0.0;
        }
    }

    // octaves well above the node scale carry the profile's own decay
    let resolved: Vec<f64> = octaves
        .iter()
        .filter(|(scale, _)| *scale >= 64.0 * linear_scale)
        .map(|o| o.1)
        .collect();
    let divergent = resolved.len() >= 9 && {
        let tail = &resolved[resolved.len() - 9..];
        let mean_ratio = tail
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
            .sum::<f64>()
            / 8.0;
        mean_ratio >= DIVERGENCE_RATIO && tail[8] > 1e-3
    };

    DiniReport {
        dini: if divergent || !total.is_finite() {
            ExtendedValue::Divergent
        } else {
            ExtendedValue::Finite(total)
        },
        linear_scale,
        max_slope,
        octaves,
    }
}

/// One step of the nonincreasing rearrangement `h` of the density of `dμ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RearrangedStep {
    pub length: f64,
    pub height: f64,
}

/// Nonincreasing equimeasurable rearrangement of the slopes of `μ`.
pub fn rearranged_density(mu: &InverseProfile) -> Vec<RearrangedStep> {
    let mut steps: Vec<RearrangedStep> = mu
        .arguments()
        .windows(2)
        .zip(mu.slopes())
        .map(|(w, height)| RearrangedStep {
            length: w[1] - w[0],
            height,
        })
        .collect();
    steps.sort_by(|x, y| y.height.total_cmp(&x.height));
    steps
}

/// `∫₀ᵗ h(s) ds`, an upper bound for the modulus of continuity.
pub fn rearranged_modulus(steps: &[RearrangedStep], t: f64) -> f64 {
    let mut left = t;
    let mut acc = 0.0;
    for step in steps {
        if left <= 0.0 {
            break;
        }
        let used = step.length.min(left);
        acc += used * step.height;
        left -= used;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::builtin::nonmember_profile;
    use crate::measures::segment::SegmentMeasure;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::TAU;

    #[test]
    fn uniform_modulus() {
        let mu = SegmentMeasure::uniform(0.0, TAU).unwrap().inverse();
        assert_abs_diff_eq!(modulus_of_continuity(&mu, 0.3), TAU * 0.3, epsilon = 1e-14);
        let report = dini_modulus(&mu);
        assert_abs_diff_eq!(report.dini.finite().unwrap(), TAU, epsilon = 1e-12);
    }

    #[test]
    fn sqrt_modulus_and_dini() {
        let nu = SegmentMeasure::from_cdf(0.0, 1.0, 2000, |t| t * t).unwrap();
        let mu = nu.inverse();
        for &t in &[0.5, 0.1, 0.01] {
            assert_abs_diff_eq!(modulus_of_continuity(&mu, t), t.sqrt(), epsilon = 1e-6);
        }
        let report = dini_modulus(&mu);
        assert_abs_diff_eq!(report.dini.finite().unwrap(), 2.0, epsilon = 1e-3);
    }

    #[test]
    fn nonmember_dini_is_flagged() {
        let mu = nonmember_profile(0.0, 1.0).unwrap();
        assert_eq!(dini_modulus(&mu).dini, ExtendedValue::Divergent);
    }

    #[test]
    fn rearrangement_preserves_mass() {
        // slope 3 on [0, 1/3], slope 1/2 on [1/3, 1]
        let mu = InverseProfile::new(vec![0.0, 1.0 / 3.0, 1.0], vec![0.0, 1.0, 4.0 / 3.0]).unwrap();
        let h = rearranged_density(&mu);
        assert_eq!(h.len(), 2);
        assert!(h[0].height >= h[1].height);
        let mass: f64 = h.iter().map(|s| s.length * s.height).sum();
        assert_abs_diff_eq!(mass, mu.eval(1.0) - mu.eval(0.0), epsilon = 1e-15);
        assert_abs_diff_eq!(rearranged_modulus(&h, 1.0), 4.0 / 3.0, epsilon = 1e-15);
        for &t in &[0.05, 0.2, 0.5, 0.9] {
            assert!(modulus_of_continuity(&mu, t) <= rearranged_modulus(&h, t) + 1e-15);
        }
    }

    #[test]
    fn rearranged_slopes_sorted() {
        let mu = SegmentMeasure::from_cdf(0.0, 2.0, 50, |t| t + 0.3 * (3.0 * t).sin())
            .unwrap()
            .inverse();
        let h = rearranged_density(&mu);
        assert!(h.windows(2).all(|w| w[0].height >= w[1].height));
    }
}
