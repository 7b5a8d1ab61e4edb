//! Harmonic measure: walk-on-spheres estimates of the radial projection,
//! the exact disk case, and the comparison constant `C(K)` with `ν`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::construction::StarShapedDomain;
use crate::error::{out_of_range, Error, Result};
use crate::measures::SegmentMeasure;

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WalkConfig {
    pub walks: u64,
    /// Absorption shell, relative to the largest boundary radius.
    pub eps: f64,
    pub seed: u64,
    pub workers: usize,
    pub bins: usize,
    pub max_steps: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            walks: 100_000,
            eps: 1e-4,
            seed: 0,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            bins: 64,
            max_steps: 10_000,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walks == 0 {
            return Err(out_of_range("walks", 0.0, "walks >= 1"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(out_of_range("eps", self.eps, "eps > 0"));
        }
        if self.bins < 8 {
            return Err(out_of_range("bins", self.bins as f64, "bins >= 8"));
        }
        if self.workers == 0 {
            return Err(out_of_range("workers", 0.0, "workers >= 1"));
        }
        if self.max_steps == 0 {
            return Err(out_of_range("max_steps", 0.0, "max_steps >= 1"));
        }
        Ok(())
    }
}

/// Empirical distribution of exit angles on uniform bins over `[0, 2π]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularDistribution {
    pub bins: usize,
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub stderr: Vec<f64>,
    pub walks: u64,
    pub seed: u64,
    pub counts: Vec<u64>,
    /// Walks stopped by the step cap rather than by absorption.
    pub cap_hits: u64,
}

impl AngularDistribution {
    pub fn from_counts(counts: Vec<u64>, seed: u64, cap_hits: u64) -> Result<Self> {
        let bins = counts.len();
        if bins < 8 {
            return Err(out_of_range("bins", bins as f64, "bins >= 8"));
        }
        let walks: u64 = counts.iter().sum();
        if walks == 0 {
            return Err(Error::InvalidInput("no samples".into()));
        }
        let n = walks as f64;
        let masses: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let stderr = masses.iter().map(|p| (p * (1.0 - p) / n).sqrt()).collect();
        Ok(Self {
            bins,
            edges: bin_edges(bins),
            masses,
            stderr,
            walks,
            seed,
            counts,
            cap_hits,
        })
    }

    /// Cumulative mass at each edge, starting with 0.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        std::iter::once(0.0)
            .chain(self.masses.iter().map(|m| {
                acc += m;
                acc
            }))
            .collect()
    }
}

pub fn bin_edges(bins: usize) -> Vec<f64> {
    let mut edges: Vec<f64> = (0..bins).map(|k| TAU * k as f64 / bins as f64).collect();
    edges.push(TAU);
    edges
}

fn bin_of(angle: f64, bins: usize) -> usize {
    let a = angle.rem_euclid(TAU);
    ((a / TAU * bins as f64) as usize).min(bins - 1)
}

struct Tally {
    counts: Vec<u64>,
    cap_hits: u64,
}

/// Relative slack of the nearest-point search used for step radii.
const SLACK: f64 = 1e-2;

fn walk(domain: &StarShapedDomain, start: Complex64, eps: f64, max_steps: u64, rng: &mut ChaCha8Rng) -> (f64, bool) {
    let mut x = start;
    for _ in 0..max_steps {
        let near = domain.nearest_point_within(x, SLACK);
        // a circle inside the maximal one keeps the exit law exact
        let radius = near.distance / (1.0 + SLACK);
        if radius < eps {
            return (near.point.arg(), false);
        }
        let phase: f64 = rng.random::<f64>() * TAU;
        x += Complex64::from_polar(radius, phase);
    }
    (domain.nearest_point(x).point.arg(), true)
}

/// Walk-on-spheres estimate of the angular distribution of exit points from `z`.
///
/// Walk `i` draws from its own ChaCha8 stream `(seed, i)` and bins are
/// integer counts, so the result does not depend on `workers`.
pub fn wos_project(domain: &StarShapedDomain, z: Complex64, cfg: &WalkConfig) -> Result<AngularDistribution> {
    cfg.validate()?;
    let eps = cfg.eps * domain.max_radius();
    let clearance = domain.signed_distance(z);
    if !(clearance > eps) {
        return Err(Error::Geometry(format!(
            "start point {z} has boundary clearance {clearance}, need more than {eps}"
        )));
    }
    let chunks = cfg.walks.div_ceil(CHUNK);
    let run_chunk = |c: u64| {
        let mut tally = Tally {
            counts: vec![0; cfg.bins],
            cap_hits: 0,
        };
        for i in c * CHUNK..((c + 1) * CHUNK).min(cfg.walks) {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i);
            let (angle, capped) = walk(domain, z, eps, cfg.max_steps, &mut rng);
            tally.counts[bin_of(angle, cfg.bins)] += 1;
            tally.cap_hits += capped as u64;
        }
        tally
    };
    let merge = |mut a: Tally, b: Tally| {
        for (x, y) in a.counts.iter_mut().zip(&b.counts) {
            *x += y;
        }
        a.cap_hits += b.cap_hits;
        a
    };
    let empty = || Tally {
        counts: vec![0; cfg.bins],
        cap_hits: 0,
    };
    let tally = if cfg.workers == 1 {
        (0..chunks).map(run_chunk).fold(empty(), merge)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..chunks).into_par_iter().map(run_chunk).reduce(empty, merge))
    };
    AngularDistribution::from_counts(tally.counts, cfg.seed, tally.cap_hits)
}

/// Harmonic measure of the arc `{e^{it} : α < t < β}` in the unit disk at `z`,
/// from the antiderivative of the Poisson kernel.
pub fn disk_harmonic_measure(z: Complex64, alpha: f64, beta: f64) -> Result<f64> {
    let rho = z.norm();
    if !(rho < 1.0) {
        return Err(out_of_range("|z|", rho, "|z| < 1"));
    }
    if !(alpha <= beta && beta - alpha <= TAU + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "arc ({alpha}, {beta}) must satisfy alpha <= beta <= alpha + 2π"
        )));
    }
    if beta - alpha >= TAU {
        return Ok(1.0);
    }
    let k = (1.0 + rho) / (1.0 - rho);
    let phi = z.arg();
    let g = |t: f64| {
        let u = 0.5 * (t - phi);
        (k * u.sin()).atan2(u.cos()) + TAU * (u / TAU).round()
    };
    Ok(((g(beta) - g(alpha)) / PI).clamp(0.0, 1.0))
}

/// Exact disk harmonic measure of each of `bins` uniform arcs.
pub fn disk_bin_masses(z: Complex64, bins: usize) -> Result<Vec<f64>> {
    let edges = bin_edges(bins);
    edges
        .windows(2)
        .map(|w| disk_harmonic_measure(z, w[0], w[1]))
        .collect()
}


/// `sup` over bin edges of `|F_emp − ν|`.
pub fn ks_distance(d: &AngularDistribution, nu: &SegmentMeasure) -> Result<f64> {
    nu.require_segment(0.0, TAU)?;
    Ok(d.edges
        .iter()
        .zip(d.cdf())
        .map(|(&e, f)| (f - nu.cdf(e)).abs())
        .fold(0.0, f64::max))
}

/// Closed disk `{|z − center| ≤ radius}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

impl DiskSpec {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(out_of_range("radius", radius, "radius >= 0"));
        }
        Ok(Self {
            center: [center.re, center.im],
            radius,
        })
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(self.center[0], self.center[1])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRatio {
    pub z: [f64; 2],
    pub ratio: f64,
    pub bin: usize,
    pub stderr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundConstantReport {
    /// `max_{z, j} ω(z, E_j, Ω) / ν(E_j)`, an empirical lower bound for `C(K)`.
    pub constant: f64,
    pub stderr: f64,
    pub argmax: PointRatio,
    pub points: Vec<PointRatio>,
    /// Bins whose `ν`-mass is below `mass_floor`, left out of the maximum.
    pub excluded_bins: Vec<usize>,
    pub mass_floor: f64,
    pub disk: DiskSpec,
    pub walks: u64,
    pub bins: usize,
    pub seed: u64,
}

/// Number of sample points on `∂K`.
pub const BOUND_POINTS: usize = 8;

fn point_seed(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Estimates `C(K)` in `ω(z, E, Ω) ≤ C(K) ν(arg E)` by walk-on-spheres from
/// points of `∂K`, over the uniform angular bins.
pub fn bound_constant(
    domain: &StarShapedDomain,
    disk: DiskSpec,
    nu: &SegmentMeasure,
    cfg: &WalkConfig,
) -> Result<BoundConstantReport> {
    nu.require_segment(0.0, TAU)?;
    cfg.validate()?;
    let center = disk.center();
    let clearance = domain.signed_distance(center) - disk.radius;
    if !(clearance > cfg.eps * domain.max_radius()) {
        return Err(Error::Geometry(format!(
            "disk of radius {} about {center} is not inside the domain (clearance {clearance})",
            disk.radius
        )));
    }
    let edges = bin_edges(cfg.bins);
    let nu_mass: Vec<f64> = edges.windows(2).map(|w| nu.mass(w[0], w[1])).collect();
    let mass_floor = 0.1 / cfg.bins as f64;
    let excluded_bins: Vec<usize> = (0..cfg.bins).filter(|&j| nu_mass[j] < mass_floor).collect();

    let sample_points: Vec<Complex64> = if disk.radius == 0.0 {
        vec![center]
    } else {
        (0..BOUND_POINTS)
            .map(|k| {
                let angle = TAU * k as f64 / BOUND_POINTS as f64 + PI / cfg.bins as f64;
                center + Complex64::from_polar(disk.radius, angle)
            })
            .collect()
    };

    let mut points = Vec::with_capacity(sample_points.len());
    for (k, &z) in sample_points.iter().enumerate() {
        let point_cfg = WalkConfig {
            seed: point_seed(cfg.seed, k),
            ..*cfg
        };
        let dist = wos_project(domain, z, &point_cfg)?;
        let best = (0..cfg.bins)
            .filter(|&j| nu_mass[j] >= mass_floor)
            .map(|j| (j, dist.masses[j] / nu_mass[j], dist.stderr[j] / nu_mass[j]))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::InvalidInput("every bin is below the mass floor".into()))?;
        points.push(PointRatio {
            z: [z.re, z.im],
            ratio: best.1,
            bin: best.0,
            stderr: best.2,
        });
    }
    let argmax = points
        .iter()
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .cloned()
        .expect("at least one sample point");
    Ok(BoundConstantReport {
        constant: argmax.ratio,
        stderr: argmax.stderr,
        argmax,
        points,
        excluded_bins,
        mass_floor,
        disk,
        walks: cfg.walks,
        bins: cfg.bins,
        seed: cfg.seed,
    })
}
