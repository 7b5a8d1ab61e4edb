//! Piecewise-linear distribution functions on a segment and their clamped inverses.

use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::quad::{integrate, Tolerance};

/// A continuous, strictly increasing probability distribution `ν` on `[a, b]`,
/// linear between nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentMeasure {
    t: Vec<f64>,
    nu: Vec<f64>,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

impl SegmentMeasure {
    /// Builds a measure from node abscissae `t` and distribution values `nu`.
    pub fn new(t: Vec<f64>, nu: Vec<f64>) -> Result<Self> {
        if t.len() != nu.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} abscissae but {} distribution values",
                t.len(),
                nu.len()
            )));
        }
        if t.len() < 2 {
            return Err(Error::InvalidMeasure("at least two nodes required".into()));
        }
        if t.iter().chain(nu.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure("non-finite node".into()));
        }
        if !strictly_increasing(&t) {
            return Err(Error::InvalidMeasure("node abscissae must be strictly increasing".into()));
        }
        if !strictly_increasing(&nu) {
            return Err(Error::InvalidMeasure(
                "distribution values must be strictly increasing".into(),
            ));
        }
        if nu[0] != 0.0 || nu[nu.len() - 1] != 1.0 {
            return Err(Error::InvalidMeasure(format!(
                "distribution must run from 0 to 1, found {} to {}",
                nu[0],
                nu[nu.len() - 1]
            )));
        }
        Ok(Self { t, nu })
    }

    pub fn from_nodes(nodes: &[(f64, f64)]) -> Result<Self> {
        let (t, nu) = nodes.iter().copied().unzip();
        Self::new(t, nu)
    }

    /// Uniform probability measure on `[a, b]`.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![0.0, 1.0])
    }

    /// Samples a distribution function `cdf` on a uniform grid of `cells` cells
    /// and rescales it so that it runs from 0 to 1.
    pub fn from_cdf<F: Fn(f64) -> f64>(a: f64, b: f64, cells: usize, cdf: F) -> Result<Self> {
        if cells == 0 || !(b > a) {
            return Err(Error::InvalidInput(format!("bad grid [{a}, {b}] with {cells} cells")));
        }
        let t = uniform_grid(a, b, cells);
        let lo = cdf(a);
        let hi = cdf(b);
        if !(hi > lo) {
            return Err(Error::DegenerateMeasure);
        }
        let mut nu: Vec<f64> = t.iter().map(|&x| (cdf(x) - lo) / (hi - lo)).collect();
        nu[0] = 0.0;
        nu[cells] = 1.0;
        Self::new(t, nu)
    }

    /// Normalized cumulative integral of a nonnegative `density` over a uniform
    /// grid of `cells` cells. Returns the measure and the normalization constant.
    pub fn from_density<F: Fn(f64) -> f64>(
        a: f64,
        b: f64,
        cells: usize,
        density: F,
    ) -> Result<(Self, f64)> {
        if cells == 0 || !(b > a) {
            return Err(Error::InvalidInput(format!("bad grid [{a}, {b}] with {cells} cells")));
        }
        let t = uniform_grid(a, b, cells);
        Self::from_density_on_grid(t, density)
    }

    pub(crate) fn from_density_on_grid<F: Fn(f64) -> f64>(
        t: Vec<f64>,
        density: F,
    ) -> Result<(Self, f64)> {
        let mut cumulative = Vec::with_capacity(t.len());
        cumulative.push(0.0);
        let mut total = 0.0;
        for w in t.windows(2) {
            let q = integrate(&density, w[0], w[1], Tolerance::new(0.0, 1e-13));
            if !(q.value >= 0.0) || !q.value.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "density is negative or not finite on [{}, {}]",
                    w[0], w[1]
                )));
            }
            total += q.value;
            cumulative.push(total);
        }
        if !(total > 0.0) {
            return Err(Error::DegenerateMeasure);
        }
        let n = cumulative.len();
        let mut nu: Vec<f64> = cumulative.iter().map(|c| c / total).collect();
        nu[n - 1] = 1.0;
        Ok((Self::new(t, nu)?, total))
    }

    pub fn a(&self) -> f64 {
        self.t[0]
    }

    pub fn b(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.nu
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().copied().zip(self.nu.iter().copied())
    }

    /// Distribution function `ν([a, x])`, 0 below `a` and 1 above `b`.
    pub fn cdf(&self, x: f64) -> f64 {
        interpolate_clamped(&self.t, &self.nu, x)
    }

    /// Mass of `[lo, hi]`.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        self.cdf(hi) - self.cdf(lo)
    }

    /// Piecewise-constant density on each cell `[t_i, t_{i+1}]`.
    pub fn densities(&self) -> Vec<f64> {
        slopes(&self.t, &self.nu)
    }

    pub fn inverse(&self) -> InverseProfile {
        inverse_distribution(self)
    }

    pub fn is_on(&self, a: f64, b: f64) -> bool {
        let scale = 1.0 + a.abs().max(b.abs());
        (self.a() - a).abs() <= 1e-12 * scale && (self.b() - b).abs() <= 1e-12 * scale
    }

    pub(crate) fn require_segment(&self, a: f64, b: f64) -> Result<()> {
        if self.is_on(a, b) {
            Ok(())
        } else {
            Err(Error::SegmentMismatch {
                expected_a: a,
                expected_b: b,
                found_a: self.a(),
                found_b: self.b(),
            })
        }
    }

    /// The measure transported by the rotation `t ↦ t + φ` of the segment
    /// viewed as a circle of circumference `b − a`.
    pub fn rotated(&self, phi: f64) -> Result<Self> {
        let a = self.a();
        let len = self.b() - a;
        let shift = phi.rem_euclid(len);
        if shift == 0.0 {
            return Ok(self.clone());
        }
        let cut = self.cdf(self.b() - shift);
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(self.len() + 2);
        // the last node coincides with the first on the circle
        for (&t, &nu) in self.t.iter().zip(&self.nu).take(self.len() - 1) {
            let moved = a + (t - a + shift).rem_euclid(len);
            let value = if t - a < len - shift { nu + 1.0 - cut } else { nu - cut };
            pts.push((moved, value));
        }
        pts.push((a, 0.0));
        pts.push((self.b(), 1.0));
        pts.push((a + shift, 1.0 - cut));
        pts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let eps = 1e-13 * len;
        pts.dedup_by(|x, y| x.0 - y.0 <= eps);
        let (mut t, mut nu): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let last = nu.len() - 1;
        if t[last] < self.b() {
            t.push(self.b());
            nu.push(1.0);
        }
        let last = nu.len() - 1;
        t[0] = a;
        t[last] = self.b();
        nu[0] = 0.0;
        nu[last] = 1.0;
        Self::new(t, nu)
    }
}

/// The clamped inverse `μ` of a distribution function: nondecreasing on ℝ,
/// equal to `a` on `(−∞, 0]` and to `b` on `[1, ∞)`, linear between nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseProfile {
    s: Vec<f64>,
    t: Vec<f64>,
}

impl InverseProfile {
    /// Nodes `(s_i, μ(s_i))` with `s` strictly increasing from 0 to 1 and `μ` nondecreasing.
    pub fn new(s: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        if s.len() != t.len() || s.len() < 2 {
            return Err(Error::InvalidMeasure("mismatched or too few profile nodes".into()));
        }
        if s.iter().chain(t.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure("non-finite profile node".into()));
        }
        if !strictly_increasing(&s) || s[0] != 0.0 || s[s.len() - 1] != 1.0 {
            return Err(Error::InvalidMeasure(
                "profile arguments must increase strictly from 0 to 1".into(),
            ));
        }
        if t.windows(2).any(|w| w[1] < w[0]) || t[t.len() - 1] <= t[0] {
            return Err(Error::InvalidMeasure("profile values must be nondecreasing".into()));
        }
        Ok(Self { s, t })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(s: Vec<f64>, mu: F) -> Result<Self> {
        let t = s.iter().map(|&x| mu(x)).collect();
        Self::new(s, t)
    }

    pub fn a(&self) -> f64 {
        self.t[0]
    }

    pub fn b(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    pub fn arguments(&self) -> &[f64] {
        &self.s
    }

    pub fn values(&self) -> &[f64] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        interpolate_clamped(&self.s, &self.t, x)
    }

    /// Slope of `μ` on each cell `[s_i, s_{i+1}]`, i.e. the density `g` of `dμ`.
    pub fn slopes(&self) -> Vec<f64> {
        slopes(&self.s, &self.t)
    }

    pub fn max_slope(&self) -> f64 {
        self.slopes().into_iter().fold(0.0, f64::max)
    }

    /// Back to a distribution function; fails when `μ` has flat pieces.
    pub fn to_measure(&self) -> Result<SegmentMeasure> {
        SegmentMeasure::new(self.t.clone(), self.s.clone())
    }

    /// Same profile with values mapped affinely onto `[a, b]`.
    pub fn rescaled(&self, a: f64, b: f64) -> Result<Self> {
        let (a0, b0) = (self.a(), self.b());
        let t = self
            .t
            .iter()
            .map(|&v| a + (v - a0) * (b - a) / (b0 - a0))
            .collect::<Vec<_>>();
        let mut t = t;
        let n = t.len();
        t[0] = a;
        t[n - 1] = b;
        Self::new(self.s.clone(), t)
    }

    /// `α·self + (1 − α)·other` on the merged node grid.
    pub fn convex_combination(&self, other: &Self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(out_of_range("alpha", alpha, "0 <= alpha <= 1"));
        }
        if self.a() != other.a() || self.b() != other.b() {
            return Err(Error::SegmentMismatch {
                expected_a: self.a(),
                expected_b: self.b(),
                found_a: other.a(),
                found_b: other.b(),
            });
        }
        let mut s: Vec<f64> = self.s.iter().chain(other.s.iter()).copied().collect();
        s.sort_by(f64::total_cmp);
        s.dedup();
        let t = s
            .iter()
            .map(|&x| alpha * self.eval(x) + (1.0 - alpha) * other.eval(x))
            .collect();
        Self::new(s, t)
    }
}

/// Transposes the node table of `ν`.
pub fn inverse_distribution(nu: &SegmentMeasure) -> InverseProfile {
    InverseProfile {
        s: nu.nu.clone(),
        t: nu.t.clone(),
    }
}

pub(crate) fn uniform_grid(a: f64, b: f64, cells: usize) -> Vec<f64> {
    let mut t: Vec<f64> = (0..=cells)
        .map(|i| a + (b - a) * i as f64 / cells as f64)
        .collect();
    t[cells] = b;
    t
}

fn slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| (ys[1] - ys[0]) / (xs[1] - xs[0]))
        .collect()
}

pub(crate) fn interpolate_clamped(x: &[f64], y: &[f64], at: f64) -> f64 {
    let n = x.len();
    if at <= x[0] {
        return y[0];
    }
    if at >= x[n - 1] {
        return y[n - 1];
    }
    let i = x.partition_point(|&v| v <= at);
    let (x0, x1, y0, y1) = (x[i - 1], x[i], y[i - 1], y[i]);
    if at == x0 {
        return y0;
    }
    y0 + (y1 - y0) * ((at - x0) / (x1 - x0))
}
