//! Clausen function `Cl₂`.
//!
//! `Cl₂(x) = Σ sin(kx)/k² = −∫₀ˣ log|2 sin(s/2)| ds`. It is the exact
//! antiderivative of the circular logarithmic kernel, which is what the
//! potentials module needs.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

const TERMS: usize = 30;

/// Coefficients `2ζ(2n) / (2n(2n+1))` of the expansion
/// `Cl₂(x) = x − x log|x| + x Σ cₙ (x/2π)^{2n}`, valid for `|x| < 2π`.
fn coefficients() -> &'static [f64; TERMS] {
    static COEFFS: OnceLock<[f64; TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut c = [0.0; TERMS];
        for (i, slot) in c.iter_mut().enumerate() {
            let n = (i + 1) as f64;
            let s = 2.0 * n;
            let zeta = match i {
                0 => PI * PI / 6.0,
                1 => PI.powi(4) / 90.0,
                _ => {
                    // sum the small terms first
                    let mut z = 0.0;
                    for k in (1..=2000u32).rev() {
                        z += f64::from(k).powf(-s);
                    }
                    z
                }
            };
            *slot = 2.0 * zeta / (s * (s + 1.0));
        }
        c
    })
}

/// Clausen function of order two.
pub fn clausen2(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    if y == 0.0 {
        return 0.0;
    }
    let sign = y.signum();
    let y = y.abs();
    let q = (y / TAU).powi(2);
    let mut sum = 0.0;
    for &c in coefficients().iter().rev() {
        sum = sum * q + c;
    }
    sign * (y - y * y.ln() + y * q * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, Tolerance};
    use approx::assert_abs_diff_eq;

    /// Sine series with Kahan summation and an Euler–Maclaurin style tail estimate.
    fn sine_series(x: f64, terms: u64) -> f64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for k in 1..=terms {
            let kf = k as f64;
            let term = (kf * x).sin() / (kf * kf) - comp;
            let t = sum + term;
            comp = (t - sum) - term;
            sum = t;
        }
        sum
    }

    /// `−∫₀ˣ log|2 sin(s/2)| ds` with the log singularity subtracted analytically.
    fn quadrature_oracle(x: f64) -> f64 {
        let smooth = integrate(
            |s: f64| {
                if s == 0.0 {
                    0.0
                } else {
                    (2.0 * (s / 2.0).sin() / s).ln()
                }
            },
            0.0,
            x,
            Tolerance::default(),
        );
        -(x * x.ln() - x) - smooth.value
    }

    #[test]
    fn known_constants() {
        let catalan = 0.915_965_594_177_219_015_054_603_514_932_384_1;
        assert_abs_diff_eq!(clausen2(PI / 2.0), catalan, epsilon = 1e-14);
        assert_abs_diff_eq!(clausen2(PI / 3.0), 1.014_941_606_409_653_625_021_2, epsilon = 1e-14);
        assert_abs_diff_eq!(clausen2(PI), 0.0, epsilon = 1e-15);
        assert_eq!(clausen2(0.0), 0.0);
    }

    #[test]
    fn agrees_with_quadrature_and_series() {
        for i in 1..60 {
            let x = i as f64 * 0.05;
            let c = clausen2(x);
            assert_abs_diff_eq!(c, quadrature_oracle(x), epsilon = 1e-12);
            // the raw series converges like 1/K², so only a loose check
            assert_abs_diff_eq!(c, sine_series(x, 200_000), epsilon = 1e-5);
        }
    }

    #[test]
    fn odd_and_periodic() {
        for i in 0..40 {
            let x = -7.0 + 0.37 * i as f64;
            assert_abs_diff_eq!(clausen2(-x), -clausen2(x), epsilon = 1e-14);
            assert_abs_diff_eq!(clausen2(x + TAU), clausen2(x), epsilon = 1e-13);
        }
    }
}
