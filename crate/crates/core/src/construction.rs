//! Strictly star-shaped domains with prescribed radial projection of
//! harmonic measure.
//!
//! For `ν` in class A with inverse `μ`, let `u` be the circle potential of
//! `dμ(θ/2π)`. The boundary map `e^{iψ} ↦ exp(−u(e^{iψ})) e^{iμ(ψ/2π)}`
//! pushes the uniform measure forward to `ν`, so the domain bounded by
//! `r(θ) = exp(−u(e^{2πiν(θ)}))` has `ν` as the angular distribution of
//! Brownian exit points seen from the origin.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::measures::{ClassVerdict, DefectConfig, SegmentMeasure};
use crate::potentials::circle_potential_on_circle;

/// `{ρe^{iθ} : ρ < r(θ)}` with the boundary stored as the closed polyline
/// through `r_j e^{iθ_j}`.
#[derive(Debug, Clone)]
pub struct StarShapedDomain {
    theta: Vec<f64>,
    r: Vec<f64>,
    vertices: Vec<Complex64>,
    buckets: Vec<Vec<u32>>,
    /// Radial extent `(lo, hi)` of the segments in each bucket.
    extents: Vec<(f64, f64)>,
    /// Box tree over the segments, root first.
    tree: Vec<Node>,
    /// Distance from the origin to the polyline and the nearest point.
    origin: (f64, Complex64),
}

/// Buckets scanned one by one around the home bucket before falling back to the tree.
const NEAR_BUCKETS: usize = 4;

/// Axis-aligned box around the segments `start..end`; children are
/// `left` and `right`, or none for a leaf.
#[derive(Debug, Clone, Copy)]
struct Node {
    lo: [f64; 2],
    hi: [f64; 2],
    start: u32,
    end: u32,
    children: Option<(u32, u32)>,
}

const LEAF: usize = 4;

impl Node {
    fn distance_sqr(&self, z: Complex64) -> f64 {
        let dx = (self.lo[0] - z.re).max(z.re - self.hi[0]).max(0.0);
        let dy = (self.lo[1] - z.im).max(z.im - self.hi[1]).max(0.0);
        dx * dx + dy * dy
    }
}

fn build_tree(vertices: &[Complex64], start: usize, end: usize, nodes: &mut Vec<Node>) -> u32 {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in &vertices[start..=end] {
        lo = [lo[0].min(v.re), lo[1].min(v.im)];
        hi = [hi[0].max(v.re), hi[1].max(v.im)];
    }
    let id = nodes.len();
    nodes.push(Node { lo, hi, start: start as u32, end: end as u32, children: None });
    if end - start > LEAF {
        let mid = start + (end - start) / 2;
        let l = build_tree(vertices, start, mid, nodes);
        let r = build_tree(vertices, mid, end, nodes);
        nodes[id].children = Some((l, r));
    }
    id as u32
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestPoint {
    pub point: Complex64,
    pub distance: f64,
    pub segment: usize,
}

impl StarShapedDomain {
    /// Samples `(θ_j, r_j)` for `j = 0..=M` with `θ_0 = 0`, `θ_M = 2π` and `r_0 = r_M`.
    pub fn new(theta: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        if theta.len() != r.len() {
            return Err(Error::Geometry(format!(
                "{} angles but {} radii",
                theta.len(),
                r.len()
            )));
        }
        if theta.len() < 4 {
            return Err(Error::Geometry("need at least 3 boundary segments".into()));
        }
        let m = theta.len() - 1;
        if theta[0] != 0.0 || (theta[m] - TAU).abs() > 1e-12 {
            return Err(Error::Geometry(format!(
                "angles must run from 0 to 2π, got [{}, {}]",
                theta[0], theta[m]
            )));
        }
        if theta.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Geometry("angles must be strictly increasing".into()));
        }
        if let Some(&bad) = r.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Geometry(format!("radius {bad} is not positive")));
        }
        if (r[0] - r[m]).abs() > 1e-12 * r[0] {
            return Err(Error::Geometry(format!(
                "radius is not periodic: r(0) = {}, r(2π) = {}",
                r[0], r[m]
            )));
        }
        let mut theta = theta;
        let mut r = r;
        theta[m] = TAU;
        r[m] = r[0];
        Ok(Self::assemble(theta, r))
    }

    /// Radii on the uniform grid `θ_j = 2πj/M`, `j = 0..M`; the closing sample is added.
    pub fn from_periodic(r: Vec<f64>) -> Result<Self> {
        let m = r.len();
        let mut theta: Vec<f64> = (0..m).map(|j| TAU * j as f64 / m as f64).collect();
        theta.push(TAU);
        let mut r = r;
        if let Some(&first) = r.first() {
            r.push(first);
        }
        Self::new(theta, r)
    }

    /// The disk of radius `radius` with `samples` boundary segments.
    pub fn disk(radius: f64, samples: usize) -> Result<Self> {
        Self::from_periodic(vec![radius; samples])
    }

    fn assemble(theta: Vec<f64>, r: Vec<f64>) -> Self {
        let vertices: Vec<Complex64> = theta
            .iter()
            .zip(&r)
            .map(|(&t, &rho)| Complex64::from_polar(rho, t))
            .collect();
        let m = theta.len() - 1;
        let nb = m.clamp(16, 1 << 16);
        let width = TAU / nb as f64;
        let mut buckets = vec![Vec::new(); nb];
        for j in 0..m {
            let lo = ((theta[j] / width).floor() as usize).min(nb - 1);
            let hi = ((theta[j + 1] / width).ceil() as usize).clamp(lo + 1, nb);
            for bucket in &mut buckets[lo..hi] {
                bucket.push(j as u32);
            }
        }
        let mut dom = Self {
            theta,
            r,
            vertices,
            buckets,
            extents: Vec::new(),
            tree: Vec::new(),
            origin: (0.0, Complex64::new(0.0, 0.0)),
        };
        let zero = Complex64::new(0.0, 0.0);
        let near: Vec<(Complex64, f64)> = (0..m).map(|j| dom.segment_projection(j, zero)).collect();
        let best = near.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        dom.origin = (best.1, best.0);
        dom.extents = dom
            .buckets
            .iter()
            .map(|b| {
                b.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &j| {
                    let j = j as usize;
                    (lo.min(near[j].1), hi.max(dom.r[j].max(dom.r[j + 1])))
                })
            })
            .collect();
        build_tree(&dom.vertices, 0, m, &mut dom.tree);
        dom
    }

    /// Number of boundary segments `M`.
    pub fn samples(&self) -> usize {
        self.theta.len() - 1
    }

    pub fn thetas(&self) -> &[f64] {
        &self.theta
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn max_radius(&self) -> f64 {
        self.r.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_radius(&self) -> f64 {
        self.r.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// All radii multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(out_of_range("factor", factor, "factor > 0"));
        }
        Self::new(self.theta.clone(), self.r.iter().map(|x| x * factor).collect())
    }

    fn segment_of(&self, angle: f64) -> usize {
        let m = self.samples();
        self.theta.partition_point(|&t| t <= angle).clamp(1, m) - 1
    }

    /// Radius interpolated linearly in `θ`.
    pub fn radius_at(&self, theta: f64) -> f64 {
        let t = theta.rem_euclid(TAU);
        let j = self.segment_of(t);
        let w = (t - self.theta[j]) / (self.theta[j + 1] - self.theta[j]);
        self.r[j] + w * (self.r[j + 1] - self.r[j])
    }

    /// Distance from the origin to the boundary polyline along the ray at angle `theta`.
    pub fn polyline_radius(&self, theta: f64) -> f64 {
        let t = theta.rem_euclid(TAU);
        let j = self.segment_of(t);
        let e = Complex64::from_polar(1.0, t);
        let v = self.vertices[j];
        let d = self.vertices[j + 1] - v;
        cross(v, d) / cross(e, d)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let rho = z.norm();
        rho == 0.0 || rho < self.polyline_radius(z.arg())
    }

    fn segment_projection(&self, j: usize, z: Complex64) -> (Complex64, f64) {
        let v0 = self.vertices[j];
        let v1 = self.vertices[j + 1];
        let d = v1 - v0;
        let t = ((z - v0).re * d.re + (z - v0).im * d.im) / d.norm_sqr();
        let p = if t <= 0.0 {
            v0
        } else if t >= 1.0 {
            v1
        } else {
            v0 + d * t
        };
        (p, (z - p).norm())
    }

    /// Closest point of the boundary polyline to `z`.
    pub fn nearest_point(&self, z: Complex64) -> NearestPoint {
        self.nearest_point_within(z, 0.0)
    }

    /// A boundary point whose distance to `z` is at most `1 + slack` times the
    /// true distance. Larger `slack` prunes more of the search.
    pub fn nearest_point_within(&self, z: Complex64, slack: f64) -> NearestPoint {
        let grow = 1.0 + slack.max(0.0);
        let rad = z.norm();
        if rad == 0.0 {
            let (distance, point) = self.origin;
            let segment = self.segment_of(point.arg().rem_euclid(TAU));
            return NearestPoint { point, distance, segment };
        }
        let nb = self.buckets.len();
        let width = TAU / nb as f64;
        let phi = z.arg().rem_euclid(TAU);
        let home = ((phi / width) as usize).min(nb - 1);
        let rho_min = self.origin.0;

        let mut best = NearestPoint {
            point: z,
            distance: f64::INFINITY,
            segment: 0,
        };
        let scan = |b: usize, best: &mut NearestPoint| {
            let (lo, hi) = self.extents[b];
            if (lo - rad).max(rad - hi) * grow >= best.distance {
                return;
            }
            for &j in &self.buckets[b] {
                let (p, dist) = self.segment_projection(j as usize, z);
                if dist < best.distance {
                    *best = NearestPoint {
                        point: p,
                        distance: dist,
                        segment: j as usize,
                    };
                }
            }
        };
        scan(home, &mut best);
        for k in 1..=NEAR_BUCKETS.min(nb / 2) {
            // every point of a bucket k steps away is at least (k−1)·width off in angle
            if lower_bound(rad, rho_min, (k - 1) as f64 * width) * grow >= best.distance {
                return best;
            }
            let up = (home + k) % nb;
            let down = (home + nb - k) % nb;
            scan(up, &mut best);
            if down != up {
                scan(down, &mut best);
            }
        }
        let mut best_sqr = best.distance * best.distance;
        // depth-first; the tree is balanced so depth stays near log2(M)
        let mut stack = [0u32; 64];
        let mut top = 1;
        while top > 0 {
            top -= 1;
            let id = stack[top];
            let node = &self.tree[id as usize];
            if node.distance_sqr(z) * grow * grow >= best_sqr {
                continue;
            }
            match node.children {
                Some((l, r)) => {
                    // nearer child on top
                    let (dl, dr) = (self.tree[l as usize].distance_sqr(z), self.tree[r as usize].distance_sqr(z));
                    let (far, near) = if dl <= dr { (r, l) } else { (l, r) };
                    stack[top] = far;
                    stack[top + 1] = near;
                    top += 2;
                }
                None => {
                    for j in node.start as usize..node.end as usize {
                        let (p, dist) = self.segment_projection(j, z);
                        if dist < best.distance {
                            best = NearestPoint { point: p, distance: dist, segment: j };
                            best_sqr = dist * dist;
                        }
                    }
                }
            }
        }
        best
    }

    /// Distance to the boundary, positive inside and negative outside.
    pub fn signed_distance(&self, z: Complex64) -> f64 {
        let d = self.nearest_point(z).distance;
        if self.contains(z) {
            d
        } else {
            -d
        }
    }
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Smallest distance from a point at radius `rad` to any point at radius
/// `≥ rho_min` whose angle differs by at least `alpha`.
fn lower_bound(rad: f64, rho_min: f64, alpha: f64) -> f64 {
    if alpha >= std::f64::consts::PI {
        return rad + rho_min;
    }
    let c = alpha.cos();
    if alpha < std::f64::consts::FRAC_PI_2 && rad * c >= rho_min {
        rad * alpha.sin()
    } else {
        (rad * rad + rho_min * rho_min - 2.0 * rad * rho_min * c).max(0.0).sqrt()
    }
}

/// Signed distance from `z` to `∂Ω`.
pub fn domain_distance(domain: &StarShapedDomain, z: Complex64) -> f64 {
    domain.signed_distance(z)
}


fn check_membership(nu: &SegmentMeasure, force: bool) -> Result<ClassVerdict> {
    let verdict = nu.class_a_report(&DefectConfig::default())?.verdict;
    if verdict != ClassVerdict::InClassA && !force {
        return Err(Error::NotInClass(verdict));
    }
    Ok(verdict)
}

/// `r(θ_j) = exp(−u(e^{2πiν(θ_j)}))` at the given angles.
fn radii_at(nu: &SegmentMeasure, angles: &[f64]) -> Vec<f64> {
    let mu = nu.inverse();
    angles
        .par_iter()
        .map(|&t| (-circle_potential_on_circle(&mu, TAU * nu.cdf(t))).exp())
        .collect()
}

/// Domain whose harmonic measure at 0 projects radially onto `ν`, sampled at
/// `samples` uniform angles.
///
/// Fails with [`Error::NotInClass`] unless `ν` tests as class A or `force` is set.
pub fn build_domain(nu: &SegmentMeasure, samples: usize, force: bool) -> Result<StarShapedDomain> {
    nu.require_segment(0.0, TAU)?;
    if samples < 8 {
        return Err(out_of_range("samples", samples as f64, "samples >= 8"));
    }
    check_membership(nu, force)?;
    let angles: Vec<f64> = (0..samples).map(|j| TAU * j as f64 / samples as f64).collect();
    StarShapedDomain::from_periodic(radii_at(nu, &angles))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RefinementConfig {
    pub initial_samples: usize,
    pub max_samples: usize,
    pub tol: f64,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        Self {
            initial_samples: 4096,
            max_samples: 1 << 16,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RefinedDomain {
    pub domain: StarShapedDomain,
    /// `max |r^(2M) − r^(M)|` at the last doubling.
    pub change: f64,
    pub converged: bool,
}

/// Doubles the sample count until the radii of consecutive grids differ by
/// less than `cfg.tol` (comparing the fine grid with linear interpolation of
/// the coarse one).
pub fn build_domain_refined(
    nu: &SegmentMeasure,
    cfg: &RefinementConfig,
    force: bool,
) -> Result<RefinedDomain> {
    nu.require_segment(0.0, TAU)?;
    if cfg.initial_samples < 8 {
        return Err(out_of_range("initial_samples", cfg.initial_samples as f64, "initial_samples >= 8"));
    }
    if !(cfg.tol > 0.0) {
        return Err(out_of_range("tol", cfg.tol, "tol > 0"));
    }
    check_membership(nu, force)?;
    let mut m = cfg.initial_samples;
    let mut r = radii_at(
        nu,
        &(0..m).map(|j| TAU * j as f64 / m as f64).collect::<Vec<_>>(),
    );
    let mut change = f64::INFINITY;
    while m < cfg.max_samples {
        let mid: Vec<f64> = (0..m).map(|j| TAU * (j as f64 + 0.5) / m as f64).collect();
        let r_mid = radii_at(nu, &mid);
        change = (0..m)
            .map(|j| (r_mid[j] - 0.5 * (r[j] + r[(j + 1) % m])).abs())
            .fold(0.0, f64::max);
        r = r.iter().zip(&r_mid).flat_map(|(&a, &b)| [a, b]).collect();
        m *= 2;
        if change < cfg.tol {
            break;
        }
    }
    Ok(RefinedDomain {
        domain: StarShapedDomain::from_periodic(r)?,
        change,
        converged: change < cfg.tol,
    })
}

/// Image of `e^{iψ}` under the boundary extension of the map onto the
/// constructed domain: `(μ(ψ/2π), exp(−u(e^{iψ})))`.
pub fn boundary_correspondence(nu: &SegmentMeasure, psi: f64) -> (f64, f64) {
    let mu = nu.inverse();
    let arg = mu.eval(psi / TAU);
    (arg, (-circle_potential_on_circle(&mu, psi)).exp())
}
