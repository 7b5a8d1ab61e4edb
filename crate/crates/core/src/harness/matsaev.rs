//! Matsaev weights `f(θ) = λ²(θ) Φ(sin(πλ(θ)/2))` and
//! `Ψ(θ) = ∫₀^{λ(θ)} sin(b(θ − aπ)) Φ(sin πa) da`, `b = (1 − 2a)⁻¹`,
//! with `λ(θ) = min{θ/π, 1 − θ/π, τ}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{check_grid, TestFunction};
use crate::error::{out_of_range, Error, Result};
use crate::measures::{condition_integral, ConditionKind, ExtendedValue, LogValue, MajorantSpec};
use crate::quad::{integrate_with_breaks, Tolerance};

/// Nondecreasing `Φ` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Phi {
    One,
    /// `t^p`, `p ≥ 0`.
    Power { p: f64 },
    /// Linear interpolation of samples on `[0, 1]`.
    Sampled { t: Vec<f64>, values: Vec<f64> },
}

impl Phi {
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(out_of_range("p", p, "p >= 0"));
        }
        Ok(Self::Power { p })
    }

    pub fn sampled(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if t.len() != values.len() || t.len() < 2 {
            return Err(Error::InvalidInput("Φ needs at least two matching samples".into()));
        }
        if t[0] != 0.0 || t[t.len() - 1] != 1.0 || t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("Φ abscissae must increase from 0 to 1".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput("Φ must be finite, nonnegative and nondecreasing".into()));
        }
        Ok(Self::Sampled { t, values })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::One => 1.0,
            Self::Power { p } => {
                if *p == 0.0 {
                    1.0
                } else {
                    x.max(0.0).powf(*p)
                }
            }
            Self::Sampled { t, values } => {
                let x = x.clamp(0.0, 1.0);
                let i = t.partition_point(|&s| s <= x).clamp(1, t.len() - 1);
                let w = (x - t[i - 1]) / (t[i] - t[i - 1]);
                values[i - 1] + w * (values[i] - values[i - 1])
            }
        }
    }

    fn nodes(&self) -> &[f64] {
        match self {
            Self::Sampled { t, .. } => t,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatsaevWeight {
    pub phi: Phi,
    pub tau: f64,
    /// Growth margin: when present, `β = (1 − 2τ)⁻¹ < 1 + δ` is enforced.
    pub delta: Option<f64>,
}

impl MatsaevWeight {
    pub fn new(phi: Phi, tau: f64, delta: Option<f64>) -> Result<Self> {
        if !(tau > 0.0 && tau < 0.25) {
            return Err(out_of_range("tau", tau, "0 < tau < 1/4"));
        }
        let w = Self { phi, tau, delta };
        if let Some(d) = delta {
            if !(d > 0.0) {
                return Err(out_of_range("delta", d, "delta > 0"));
            }
            if w.beta() >= 1.0 + d {
                return Err(out_of_range("tau", tau, "(1 - 2 tau)^-1 < 1 + delta"));
            }
        }
        Ok(w)
    }

    pub fn beta(&self) -> f64 {
        1.0 / (1.0 - 2.0 * self.tau)
    }
}

pub fn lambda(theta: f64, tau: f64) -> f64 {
    (theta / PI).min(1.0 - theta / PI).min(tau)
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(out_of_range("theta", theta, "0 <= theta <= pi"));
    }
    Ok(())
}

fn check_tau(w: &MatsaevWeight) -> Result<()> {
    if !(w.tau > 0.0 && w.tau < 0.25) {
        return Err(out_of_range("tau", w.tau, "0 < tau < 1/4"));
    }
    Ok(())
}

fn f_unchecked(w: &MatsaevWeight, theta: f64) -> f64 {
    let l = lambda(theta, w.tau);
    l * l * w.phi.eval((PI * l / 2.0).sin())
}

/// `f(θ)` for `θ ∈ [0, π]`.
pub fn matsaev_weight(w: &MatsaevWeight, theta: f64) -> Result<f64> {
    check_tau(w)?;
    check_theta(theta)?;
    Ok(f_unchecked(w, theta))
}

/// `f(πj/n)` for `j = 0..=n`, with `λ` taken from `min(j, n − j)` so that the
/// values are exactly symmetric about `π/2`.
pub fn matsaev_weight_grid(w: &MatsaevWeight, n: usize) -> Result<Vec<f64>> {
    check_tau(w)?;
    if n == 0 {
        return Err(out_of_range("n", 0.0, "n >= 1"));
    }
    Ok((0..=n)
        .map(|j| {
            let l = (j.min(n - j) as f64 / n as f64).min(w.tau);
            l * l * w.phi.eval((PI * l / 2.0).sin())
        })
        .collect())
}

/// `Ψ(θ)` for `θ ∈ [0, π]`.
pub fn psi_weight(w: &MatsaevWeight, theta: f64) -> Result<f64> {
    check_tau(w)?;
    check_theta(theta)?;
    let l = lambda(theta, w.tau);
    if l == 0.0 {
        return Ok(0.0);
    }
    let integrand = |a: f64| {
        let b = 1.0 / (1.0 - 2.0 * a);
        (b * (theta - a * PI)).sin() * w.phi.eval((PI * a).sin())
    };
    let mut pts = vec![0.0];
    pts.extend(
        w.phi
            .nodes()
            .iter()
            .map(|&s| s.asin() / PI)
            .filter(|&a| a > 0.0 && a < l),
    );
    pts.push(l);
    Ok(integrate_with_breaks(integrand, &pts, Tolerance::new(1e-15, 1e-13)).value)
}

/// `∫₀^π log⁻ f(θ) dθ`.
pub fn matsaev_log_minus(w: &MatsaevWeight) -> Result<ExtendedValue> {
    check_tau(w)?;
    let owned = w.clone();
    let spec = MajorantSpec::closed("matsaev-f", 0.0, PI, move |theta| {
        LogValue::Log(f_unchecked(&owned, theta).ln())
    })
    .with_singular_points(vec![w.tau * PI, PI - w.tau * PI]);
    condition_integral(ConditionKind::LogMinus, &spec)
}

#[derive(Debug, Clone, Serialize)]
pub struct MatsaevProfile {
    pub function: String,
    pub weight: MatsaevWeight,
    pub grid: Vec<f64>,
    /// `∫_{−π}^{π} u⁺(re^{iθ}) f(|θ|) dθ`.
    pub weighted_plus: Vec<f64>,
    /// `∫_{−π}^{π} u⁻(re^{iθ}) Φ(|sin θ|) dθ`.
    pub weighted_minus: Vec<f64>,
    /// `max_r weighted_plus / weighted_minus`, with `0/0 = 0`.
    pub c_fit: ExtendedValue,
}

/// Compares both sides of the weighted bound on circles of the given radii.
pub fn matsaev_profile(u: &TestFunction, w: &MatsaevWeight, r_grid: &[f64]) -> Result<MatsaevProfile> {
    check_tau(w)?;
    check_grid("r_grid", r_grid, true)?;
    let tp = w.tau * PI;
    let breaks = [-PI, -PI + tp, -tp, 0.0, tp, PI - tp, PI];
    let tol = Tolerance::new(1e-13, 1e-11);
    let value = |r: f64, th: f64| {
        let v = u.extended(Complex64::from_polar(r, th));
        if v.is_nan() {
            0.0
        } else {
            v
        }
    };
    let mut weighted_plus = Vec::with_capacity(r_grid.len());
    let mut weighted_minus = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let plus = integrate_with_breaks(|th| value(r, th).max(0.0) * f_unchecked(w, th.abs()), &breaks, tol);
        let minus = integrate_with_breaks(
            |th| {
                let v = (-value(r, th)).max(0.0);
                if v == 0.0 {
                    0.0
                } else {
                    v * w.phi.eval(th.sin().abs())
                }
            },
            &breaks,
            tol,
        );
        weighted_plus.push(plus.value);
        weighted_minus.push(minus.value);
    }
    let mut c: f64 = 0.0;
    let mut divergent = false;
    for (p, m) in weighted_plus.iter().zip(&weighted_minus) {
        if *m > 0.0 {
            c = c.max(p / m);
        } else if *p > 0.0 {
            divergent = true;
        }
    }
    Ok(MatsaevProfile {
        function: u.to_string(),
        weight: w.clone(),
        grid: r_grid.to_vec(),
        weighted_plus,
        weighted_minus,
        c_fit: if divergent { ExtendedValue::Divergent } else { ExtendedValue::Finite(c) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::geometric_grid;
    use crate::quad::simpson;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn family() -> Vec<MatsaevWeight> {
        let mut out = Vec::new();
        for phi in [Phi::One, Phi::power(1.0).unwrap(), Phi::power(2.0).unwrap()] {
            for tau in [0.1, 0.2] {
                out.push(MatsaevWeight::new(phi.clone(), tau, None).unwrap());
            }
        }
        out
    }

    #[test]
    fn f_examples() {
        let w = MatsaevWeight::new(Phi::One, 0.2, None).unwrap();
        assert_abs_diff_eq!(matsaev_weight(&w, PI / 2.0).unwrap(), 0.04, epsilon = 1e-16);
        assert_eq!(matsaev_weight(&w, 0.0).unwrap(), 0.0);
        assert!(matsaev_weight(&w, 1e-8).unwrap() < 1e-16);
        assert!(matsaev_weight(&w, 4.0).is_err());
        for w in family() {
            let expected = w.tau * w.tau * w.phi.eval((PI * w.tau / 2.0).sin());
            assert_eq!(matsaev_weight(&w, PI / 2.0).unwrap(), expected);
        }
    }

    #[test]
    fn tau_and_delta_validation() {
        assert!(MatsaevWeight::new(Phi::One, 0.25, None).is_err());
        assert!(MatsaevWeight::new(Phi::One, 0.0, None).is_err());
        // β = 1/(1 − 0.4) = 5/3
        assert!(MatsaevWeight::new(Phi::One, 0.2, Some(0.5)).is_err());
        assert!(MatsaevWeight::new(Phi::One, 0.2, Some(0.7)).is_ok());
        assert!(Phi::sampled(vec![0.0, 0.5, 1.0], vec![1.0, 0.5, 2.0]).is_err());
        let bad = MatsaevWeight { phi: Phi::One, tau: 0.3, delta: None };
        assert!(psi_weight(&bad, 1.0).is_err());
    }

    #[test]
    fn grid_weights_are_exactly_symmetric() {
        for w in family() {
            let g = matsaev_weight_grid(&w, 1023).unwrap();
            for j in 0..=1023 {
                assert_eq!(g[j], g[1023 - j]);
                let direct = matsaev_weight(&w, PI * j as f64 / 1023.0).unwrap();
                assert!((g[j] - direct).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn psi_matches_simpson_oracle() {
        let w = MatsaevWeight::new(Phi::One, 0.2, None).unwrap();
        let theta = PI / 2.0;
        let oracle = simpson(|a| (1.0 / (1.0 - 2.0 * a) * (theta - a * PI)).sin(), 0.0, 0.2, 20_000);
        assert_abs_diff_eq!(psi_weight(&w, theta).unwrap(), oracle, epsilon = 1e-8);
        assert_eq!(psi_weight(&w, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn psi_dominates_f_on_grid() {
        for w in family() {
            for j in 0..1024 {
                let theta = PI * j as f64 / 1023.0;
                let f = matsaev_weight(&w, theta).unwrap();
                let psi = psi_weight(&w, theta).unwrap();
                assert!(f >= 0.0 && psi >= f, "τ={} θ={theta}: Ψ={psi} f={f}", w.tau);
            }
        }
    }

    #[test]
    fn log_minus_is_finite() {
        for w in family() {
            let v = matsaev_log_minus(&w).unwrap();
            assert!(v.is_finite(), "{w:?}");
        }
        // Φ ≡ 1, τ: ∫ log⁻ λ² = 2·2∫₀^{τπ} log(π/θ) dθ + (π − 2τπ)·2 log(1/τ)
        let w = MatsaevWeight::new(Phi::One, 0.1, None).unwrap();
        let tp = 0.1 * PI;
        let exact = 4.0 * (tp * PI.ln() - (tp * tp.ln() - tp)) + (PI - 2.0 * tp) * 2.0 * 10f64.ln();
        assert_abs_diff_eq!(matsaev_log_minus(&w).unwrap().finite().unwrap(), exact, epsilon = 1e-8);
    }

    #[test]
    fn profile_on_real_zeros() {
        let w = MatsaevWeight::new(Phi::power(1.0).unwrap(), 0.1, None).unwrap();
        let u = TestFunction::log_abs(&[Complex64::new(-0.5, 0.0), Complex64::new(0.5, 0.0)]);
        let r = matsaev_profile(&u, &w, &geometric_grid(0.5, 50.0, 10)).unwrap();
        assert!(r.weighted_plus.iter().all(|v| v.is_finite() && *v >= 0.0));
        assert!(r.weighted_minus[0] > 0.0);
    }

    proptest! {
        #[test]
        fn weights_are_symmetric_and_nonnegative(theta in 0.0f64..=PI, tau in 0.01f64..0.249, p in 0.0f64..3.0) {
            let w = MatsaevWeight::new(Phi::power(p).unwrap(), tau, None).unwrap();
            let f = matsaev_weight(&w, theta).unwrap();
            prop_assert!(f >= 0.0);
            prop_assert!((lambda(theta, tau) - lambda(PI - theta, tau)).abs() <= 1e-15);
            prop_assert!(psi_weight(&w, theta).unwrap() >= 0.0);
        }
    }
}
