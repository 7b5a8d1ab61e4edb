//! Built-in test measures.

use std::f64::consts::{E, TAU};
use std::fmt;
use std::str::FromStr;

use super::segment::{InverseProfile, SegmentMeasure};
use crate::error::{Error, Result};

/// Densities on `[0, 2π]` used by the harness and the acceptance suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinDensity {
    Uniform,
    /// `∝ 2 + cos θ`
    Cosine,
    /// `∝ 1 + 0.8 cos 2θ`
    Bimodal,
    /// `∝ exp(sin θ)`
    VonMises,
    /// `∝ exp(−1/√sin(θ/2))`, vanishing to infinite order at `θ = 0`.
    ExpFlat,
}

impl BuiltinDensity {
    pub const ALL: [Self; 5] = [
        Self::Uniform,
        Self::Cosine,
        Self::Bimodal,
        Self::VonMises,
        Self::ExpFlat,
    ];

    /// Szegő densities bounded away from zero.
    pub const SZEGO: [Self; 3] = [Self::Cosine, Self::Bimodal, Self::VonMises];

    pub fn name(self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::Cosine => "cosine",
            Self::Bimodal => "bimodal",
            Self::VonMises => "von-mises",
            Self::ExpFlat => "exp-flat",
        }
    }

    /// Unnormalized density at `θ`.
    pub fn density(self, theta: f64) -> f64 {
        match self {
            Self::Uniform => 1.0,
            Self::Cosine => 2.0 + theta.cos(),
            Self::Bimodal => 1.0 + 0.8 * (2.0 * theta).cos(),
            Self::VonMises => theta.sin().exp(),
            Self::ExpFlat => {
                let s = (0.5 * theta).sin().abs();
                if s == 0.0 {
                    0.0
                } else {
                    (-1.0 / s.sqrt()).exp()
                }
            }
        }
    }

    /// Piecewise-linear measure on `[0, 2π]` with `cells` cells.
    pub fn measure(self, cells: usize) -> Result<SegmentMeasure> {
        match self {
            Self::Uniform => SegmentMeasure::uniform(0.0, TAU),
            Self::Cosine => SegmentMeasure::from_cdf(0.0, TAU, cells, |t| 2.0 * t + t.sin()),
            _ => SegmentMeasure::from_density(0.0, TAU, cells, |t| self.density(t)).map(|(m, _)| m),
        }
    }
}

impl fmt::Display for BuiltinDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinDensity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown built-in density '{s}'")))
    }
}

/// The profile `μ(s) = 1/log(e/s)` mapped onto `[a, b]`, sampled at
/// `s = 4⁻ʲ` down to `2⁻¹⁰⁰⁰` and uniformly on `[1/4, 1]`.
///
/// `∫₀^δ μ(t)/t dt` diverges, so the measure inverse to it is not in class A.
pub fn nonmember_profile(a: f64, b: f64) -> Result<InverseProfile> {
    let mut s = vec![0.0];
    s.extend((1..=500).rev().map(|j| 0.25f64.powi(j)));
    s.extend((1..=24).map(|i| 0.25 + 0.75 * i as f64 / 24.0));
    let s_len = s.len();
    s[s_len - 1] = 1.0;
    let profile = InverseProfile::from_fn(s, |x| if x == 0.0 { 0.0 } else { 1.0 / (E / x).ln() })?;
    profile.rescaled(a, b)
}
