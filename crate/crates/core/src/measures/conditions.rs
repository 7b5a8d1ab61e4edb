//! Log-log and log-minus condition integrals, and measures built from majorants.
//!
//! Functions are handled on a logarithmic scale throughout so that majorants
//! such as `exp exp(1/√t)` never overflow.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::segment::{uniform_grid, SegmentMeasure};
use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};

/// A nonnegative real or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtendedValue {
    Finite(f64),
    Divergent,
}

impl ExtendedValue {
    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Divergent => None,
        }
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Divergent => f.write_str("+inf (divergent)"),
        }
    }
}

/// Value of a nonnegative function `M` at a point, on a logarithmic scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogValue {
    /// `log M` (may be `−∞` where `M = 0`, `+∞` where `M = ∞`).
    Log(f64),
    /// `log log M`; implies `M > 1`.
    LogLog(f64),
}

impl LogValue {
    /// `log⁺ log⁺ M`
    pub fn loglog_plus(self) -> f64 {
        match self {
            Self::Log(l) if l > 1.0 => l.ln(),
            Self::Log(_) => 0.0,
            Self::LogLog(q) => q.max(0.0),
        }
    }

    /// `log⁻ M`
    pub fn log_minus(self) -> f64 {
        match self {
            Self::Log(l) => (-l).max(0.0),
            Self::LogLog(_) => 0.0,
        }
    }

    /// `min{1, 1/M}`
    pub fn inverse_capped(self) -> f64 {
        match self {
            Self::Log(l) => (-l.max(0.0)).exp(),
            Self::LogLog(q) => (-q.exp()).exp(),
        }
    }

    /// `min{1, 1/log⁺ M}`
    pub fn inverse_log_capped(self) -> f64 {
        match self {
            Self::Log(l) if l > 1.0 => 1.0 / l,
            Self::Log(_) => 1.0,
            Self::LogLog(q) if q > 0.0 => (-q).exp(),
            Self::LogLog(_) => 1.0,
        }
    }
}

type LogFn = Arc<dyn Fn(f64) -> LogValue + Send + Sync>;

/// A nonnegative function on a segment: either grid samples with log-linear
/// interpolation or a closed form given on the log scale.
#[derive(Clone)]
pub enum MajorantSpec {
    Sampled {
        t: Vec<f64>,
        values: Vec<f64>,
    },
    Closed {
        tag: String,
        a: f64,
        b: f64,
        /// Interior points where the function may blow up or vanish.
        singular: Vec<f64>,
        log_value: LogFn,
    },
}

impl fmt::Debug for MajorantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sampled { t, values } => f
                .debug_struct("Sampled")
                .field("nodes", &t.len())
                .field("a", &t.first())
                .field("b", &t.last())
                .field("values", &values.len())
                .finish(),
            Self::Closed { tag, a, b, .. } => f
                .debug_struct("Closed")
                .field("tag", tag)
                .field("a", a)
                .field("b", b)
                .finish(),
        }
    }
}

impl MajorantSpec {
    /// Grid samples; `+∞` is allowed at isolated nodes, negative or NaN values are rejected.
    pub fn sampled(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if t.len() != values.len() || t.len() < 2 {
            return Err(Error::InvalidInput("mismatched or too few samples".into()));
        }
        if t.iter().any(|x| !x.is_finite()) || t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("sample abscissae must be finite and increasing".into()));
        }
        if let Some(bad) = values.iter().find(|v| v.is_nan() || **v < 0.0) {
            return Err(Error::InvalidInput(format!("negative or NaN sample {bad}")));
        }
        let infinite_neighbours = values
            .windows(2)
            .any(|w| w[0] == f64::INFINITY && w[1] == f64::INFINITY);
        if infinite_neighbours {
            return Err(Error::InvalidInput("+inf samples must be isolated".into()));
        }
        Ok(Self::Sampled { t, values })
    }

    pub fn closed<F>(tag: impl Into<String>, a: f64, b: f64, log_value: F) -> Self
    where
        F: Fn(f64) -> LogValue + Send + Sync + 'static,
    {
        Self::Closed {
            tag: tag.into(),
            a,
            b,
            singular: Vec::new(),
            log_value: Arc::new(log_value),
        }
    }

    pub fn with_singular_points(mut self, points: Vec<f64>) -> Self {
        if let Self::Closed { singular, .. } = &mut self {
            *singular = points;
        }
        self
    }

    pub fn constant(a: f64, b: f64, value: f64) -> Result<Self> {
        Self::sampled(vec![a, b], vec![value, value])
    }

    pub fn segment(&self) -> (f64, f64) {
        match self {
            Self::Sampled { t, .. } => (t[0], t[t.len() - 1]),
            Self::Closed { a, b, .. } => (*a, *b),
        }
    }

    /// `M(t)` on the log scale.
    pub fn log_value(&self, x: f64) -> LogValue {
        match self {
            Self::Closed { log_value, .. } => log_value(x),
            Self::Sampled { t, values } => {
                let logs = finite_logs(t, values);
                LogValue::Log(interpolate_logs(&logs, x))
            }
        }
    }
}

/// `(t, log M(t))` at nodes with finite log; isolated zero or infinite samples drop out.
fn finite_logs(t: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    t.iter()
        .zip(values)
        .filter(|(_, v)| v.is_finite() && **v > 0.0)
        .map(|(x, v)| (*x, v.ln()))
        .collect()
}

fn interpolate_logs(logs: &[(f64, f64)], x: f64) -> f64 {
    match logs.len() {
        0 => f64::NAN,
        1 => logs[0].1,
        n => {
            if x <= logs[0].0 {
                return logs[0].1;
            }
            if x >= logs[n - 1].0 {
                return logs[n - 1].1;
            }
            let i = logs.partition_point(|p| p.0 <= x);
            let (x0, y0) = logs[i - 1];
            let (x1, y1) = logs[i];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionKind {
    /// `∫ log⁺ log⁺ M`
    LogLogPlus,
    /// `∫ log⁻ g`
    LogMinus,
}

/// `∫ₐᵇ log⁺log⁺ M` or `∫ₐᵇ log⁻ g`.
pub fn condition_integral(kind: ConditionKind, f: &MajorantSpec) -> Result<ExtendedValue> {
    match f {
        MajorantSpec::Sampled { t, values } => Ok(sampled_condition(kind, t, values)),
        MajorantSpec::Closed {
            a,
            b,
            singular,
            log_value,
            ..
        } => {
            let integrand = |x: f64| match kind {
                ConditionKind::LogLogPlus => log_value(x).loglog_plus(),
                ConditionKind::LogMinus => log_value(x).log_minus(),
            };
            let mut points = vec![*a];
            points.extend(singular.iter().copied().filter(|p| p > a && p < b));
            points.push(*b);
            points.sort_by(f64::total_cmp);
            let mut total = 0.0;
            for w in points.windows(2) {
                match singular_segment_integral(&integrand, w[0], w[1]) {
                    ExtendedValue::Finite(v) => total += v,
                    ExtendedValue::Divergent => return Ok(ExtendedValue::Divergent),
                }
            }
            Ok(ExtendedValue::Finite(total))
        }
    }
}

/// Exact integral for log-linear interpolation: on each cell `log M` is linear.
fn sampled_condition(kind: ConditionKind, t: &[f64], values: &[f64]) -> ExtendedValue {
    let logs = finite_logs(t, values);
    if logs.is_empty() {
        let all_infinite = values.iter().all(|v| *v == f64::INFINITY);
        return match kind {
            ConditionKind::LogLogPlus if all_infinite => ExtendedValue::Divergent,
            ConditionKind::LogLogPlus => ExtendedValue::Finite(0.0),
            ConditionKind::LogMinus if values.contains(&0.0) => ExtendedValue::Divergent,
            ConditionKind::LogMinus => ExtendedValue::Finite(0.0),
        };
    }
    let (a, b) = (t[0], t[t.len() - 1]);
    let mut knots = vec![(a, interpolate_logs(&logs, a))];
    knots.extend(logs.iter().copied().filter(|p| p.0 > a && p.0 < b));
    knots.push((b, interpolate_logs(&logs, b)));
    let total = knots
        .windows(2)
        .map(|w| {
            let (x0, l0) = w[0];
            let (x1, l1) = w[1];
            match kind {
                ConditionKind::LogMinus => positive_part_integral(-l0, -l1, x1 - x0),
                ConditionKind::LogLogPlus => log_above_one_integral(l0, l1, x1 - x0),
            }
        })
        .sum();
    ExtendedValue::Finite(total)
}

/// `∫ max(0, y)` for `y` linear from `y0` to `y1` over a cell of width `h`.
fn positive_part_integral(y0: f64, y1: f64, h: f64) -> f64 {
    if y0 >= 0.0 && y1 >= 0.0 {
        0.5 * (y0 + y1) * h
    } else if y0 <= 0.0 && y1 <= 0.0 {
        0.0
    } else {
        let top = y0.max(y1);
        let frac = top / (y0 - y1).abs();
        0.5 * top * frac * h
    }
}

/// `∫ log⁺ y` for `y` linear from `y0` to `y1` over a cell of width `h`.
fn log_above_one_integral(y0: f64, y1: f64, h: f64) -> f64 {
    let g = |y: f64| y * y.ln() - y;
    if y0.max(y1) <= 1.0 {
        return 0.0;
    }
    if (y1 - y0).abs() <= 1e-12 * y0.abs().max(1.0) {
        return h * (0.5 * (y0 + y1)).ln().max(0.0);
    }
    let slope = (y1 - y0) / h;
    let lo = y0.min(y1).max(1.0);
    let hi = y0.max(y1);
    (g(hi) - g(lo)) / slope.abs()
}

/// Integral over `[a, b]` of a function that may be singular at either end.
///
/// The substitution `t = a + (b−a)(3s² − 2s³)` tames logarithmic and
/// inverse-root blow-ups; the dyadic end pieces `[2⁻ᵏ⁻¹, 2⁻ᵏ]` are then
/// summed and their decay decides convergence.
pub(crate) fn singular_segment_integral<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> ExtendedValue {
    const FIRST: i32 = 3;
    const LAST: i32 = 48;
    let len = b - a;
    let phi = |s: f64| s * s * (3.0 - 2.0 * s);
    let dphi = |s: f64| 6.0 * s * (1.0 - s) * len;
    // each half is parametrized by its distance from the end, so the
    // offsets stay representable near a nonzero endpoint
    let left = |s: f64| {
        let t = a + len * phi(s);
        if t <= a {
            0.0
        } else {
            f(t) * dphi(s)
        }
    };
    let right = |s: f64| {
        let t = b - len * phi(s);
        if t >= b {
            0.0
        } else {
            f(t) * dphi(s)
        }
    };
    let tol = Tolerance::new(1e-15, 1e-13);

    let edge = 0.5f64.powi(FIRST);
    let mut total = 0.0;
    for side in [&left as &dyn Fn(f64) -> f64, &right] {
        let core = integrate(side, edge, 0.5, tol).value;
        if !core.is_finite() {
            return ExtendedValue::Divergent;
        }
        total += core;
    }
    for side in [&left as &dyn Fn(f64) -> f64, &right] {
        let mut pieces = Vec::with_capacity((LAST - FIRST) as usize);
        for k in FIRST..LAST {
            let hi = 0.5f64.powi(k);
            let q = integrate(side, 0.5 * hi, hi, tol).value;
            if !q.is_finite() {
                return ExtendedValue::Divergent;
            }
            pieces.push(q);
        }
        let n = pieces.len();
        let last = pieces[n - 1].abs();
        let prev = pieces[n - 2].abs();
        let scale = 1.0f64.max(total.abs());
        total += pieces.iter().sum::<f64>();
        if last <= 1e-14 * scale {
            continue;
        }
        let ratio = last / prev;
        if ratio < 0.9 {
            total += pieces[n - 1] * ratio / (1.0 - ratio);
        } else {
            return ExtendedValue::Divergent;
        }
    }
    ExtendedValue::Finite(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MajorantScale {
    /// `M` majorizes a subharmonic function: density `min{1, 1/M}`.
    Subharmonic,
    /// `M` majorizes `|f|`: density `min{1, 1/log⁺ M}`.
    Modulus,
}

#[derive(Debug, Clone)]
pub struct MajorantMeasure {
    pub measure: SegmentMeasure,
    /// `∫ w` before normalization.
    pub normalization: f64,
}

/// Normalized cumulative integral of the capped density built from `M`.
pub fn measure_from_majorant(m: &MajorantSpec, scale: MajorantScale) -> Result<MajorantMeasure> {
    measure_from_majorant_with(m, scale, 1024)
}

pub fn measure_from_majorant_with(
    m: &MajorantSpec,
    scale: MajorantScale,
    cells: usize,
) -> Result<MajorantMeasure> {
    let weight = |x: f64| {
        let lv = m.log_value(x);
        match scale {
            MajorantScale::Subharmonic => lv.inverse_capped(),
            MajorantScale::Modulus => lv.inverse_log_capped(),
        }
    };
    let (a, b) = m.segment();
    let mut grid = uniform_grid(a, b, cells.max(1));
    match m {
        MajorantSpec::Sampled { t, .. } => grid.extend(t.iter().copied()),
        MajorantSpec::Closed { singular, .. } => {
            grid.extend(singular.iter().copied().filter(|p| *p > a && *p < b))
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let (measure, normalization) = SegmentMeasure::from_density_on_grid(grid, weight)
        .map_err(|e| match e {
            Error::InvalidMeasure(msg) => {
                Error::InvalidMeasure(format!("capped density vanishes on a cell: {msg}"))
            }
            other => other,
        })?;
    Ok(MajorantMeasure {
        measure,
        normalization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    fn log_of(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> impl Fn(f64) -> LogValue + Send + Sync {
        move |x| LogValue::Log(f(x))
    }

    #[test]
    fn constant_e_to_the_e() {
        let m = MajorantSpec::constant(0.0, 1.0, E.powf(E)).unwrap();
        let v = condition_integral(ConditionKind::LogLogPlus, &m).unwrap();
        assert_abs_diff_eq!(v.finite().unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn exp_inverse_t_majorant() {
        let m = MajorantSpec::closed("exp(1/t)", 0.0, 1.0, log_of(|t| 1.0 / t));
        let v = condition_integral(ConditionKind::LogLogPlus, &m).unwrap();
        assert_abs_diff_eq!(v.finite().unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn logminus_closed_forms() {
        let g = MajorantSpec::closed("t", 0.0, 1.0, log_of(f64::ln));
        assert_abs_diff_eq!(
            condition_integral(ConditionKind::LogMinus, &g).unwrap().finite().unwrap(),
            1.0,
            epsilon = 1e-10
        );
        let flat = MajorantSpec::closed("exp(-1/t)", 0.0, 1.0, log_of(|t| -1.0 / t));
        assert_eq!(condition_integral(ConditionKind::LogMinus, &flat).unwrap(), ExtendedValue::Divergent);
        let root = MajorantSpec::closed("exp(-1/sqrt t)", 0.0, 1.0, log_of(|t| -1.0 / t.sqrt()));
        assert_abs_diff_eq!(
            condition_integral(ConditionKind::LogMinus, &root).unwrap().finite().unwrap(),
            2.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn sampled_logminus_is_exact_for_log_linear_data() {
        // g = e^{-3t} is log-linear, ∫₀¹ 3t dt = 1.5
        let t: Vec<f64> = (0..=7).map(|i| i as f64 / 7.0).collect();
        let g = t.iter().map(|x| (-3.0 * x).exp()).collect();
        let spec = MajorantSpec::sampled(t, g).unwrap();
        assert_abs_diff_eq!(
            condition_integral(ConditionKind::LogMinus, &spec).unwrap().finite().unwrap(),
            1.5,
            epsilon = 1e-13
        );
    }

    #[test]
    fn sampled_loglogplus_exact() {
        // log M = 1 + 2t on [0, 1]: ∫ log(1+2t) = (3 ln 3 − 2)/2
        let spec = MajorantSpec::sampled(vec![0.0, 1.0], vec![E, (3.0f64).exp()]).unwrap();
        let expected = (3.0 * 3f64.ln() - 2.0) / 2.0;
        assert_abs_diff_eq!(
            condition_integral(ConditionKind::LogLogPlus, &spec).unwrap().finite().unwrap(),
            expected,
            epsilon = 1e-13
        );
    }

    #[test]
    fn sampled_rejects_negative_and_flags_zero_density() {
        assert!(MajorantSpec::sampled(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
        assert!(MajorantSpec::sampled(vec![0.0, 1.0], vec![f64::NAN, 1.0]).is_err());
        let zero = MajorantSpec::sampled(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(condition_integral(ConditionKind::LogMinus, &zero).unwrap(), ExtendedValue::Divergent);
    }

    #[test]
    fn majorant_measures() {
        let e = MajorantSpec::constant(0.0, 2.0, E).unwrap();
        let m = measure_from_majorant(&e, MajorantScale::Subharmonic).unwrap();
        assert_abs_diff_eq!(m.normalization, 2.0 / E, epsilon = 1e-12);
        assert_abs_diff_eq!(m.measure.cdf(0.5), 0.25, epsilon = 1e-13);

        let one = MajorantSpec::constant(-1.0, 3.0, 1.0).unwrap();
        for scale in [MajorantScale::Subharmonic, MajorantScale::Modulus] {
            let m = measure_from_majorant(&one, scale).unwrap();
            assert_abs_diff_eq!(m.normalization, 4.0, epsilon = 1e-12);
            assert_abs_diff_eq!(m.measure.cdf(1.0), 0.5, epsilon = 1e-13);
        }
    }

    #[test]
    fn double_exponential_majorant_gives_szego_density() {
        // M = exp exp(1/√|t|): the modulus-scale density is exp(−1/√|t|), ∫ log⁻ = ∫ |t|^{-1/2} = 4
        let m = MajorantSpec::closed("expexp", -1.0, 1.0, |t: f64| LogValue::LogLog(1.0 / t.abs().sqrt()))
            .with_singular_points(vec![0.0]);
        let mm = measure_from_majorant(&m, MajorantScale::Modulus).unwrap();
        let density = MajorantSpec::closed("w", -1.0, 1.0, |t: f64| LogValue::Log(-1.0 / t.abs().sqrt()))
            .with_singular_points(vec![0.0]);
        let lm = condition_integral(ConditionKind::LogMinus, &density).unwrap();
        assert_abs_diff_eq!(lm.finite().unwrap(), 4.0, epsilon = 1e-8);
        assert!(mm.measure.is_on(-1.0, 1.0));
        assert_abs_diff_eq!(mm.measure.cdf(0.0), 0.5, epsilon = 1e-10);
        let llp = condition_integral(ConditionKind::LogLogPlus, &m).unwrap();
        assert_abs_diff_eq!(llp.finite().unwrap(), 4.0, epsilon = 1e-8);
    }

    #[test]
    fn root_majorant_gives_root_density() {
        // M = exp(1/√|t|): density min{1, √|t|}, ∫ log⁻ √|t| = 1
        let m = MajorantSpec::closed("exp(1/sqrt|t|)", -1.0, 1.0, log_of(|t: f64| 1.0 / t.abs().sqrt()))
            .with_singular_points(vec![0.0]);
        let mm = measure_from_majorant_with(&m, MajorantScale::Modulus, 2000).unwrap();
        let dens = mm.measure.densities();
        let mid = dens.len() * 3 / 4;
        let t_mid = 0.5 * (mm.measure.abscissae()[mid] + mm.measure.abscissae()[mid + 1]);
        assert_abs_diff_eq!(dens[mid] * mm.normalization, t_mid.sqrt(), epsilon = 1e-6);
        let w = MajorantSpec::closed("sqrt|t|", -1.0, 1.0, log_of(|t: f64| 0.5 * t.abs().ln()))
            .with_singular_points(vec![0.0]);
        assert_abs_diff_eq!(
            condition_integral(ConditionKind::LogMinus, &w).unwrap().finite().unwrap(),
            1.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn flat_majorant_is_degenerate() {
        let inf = MajorantSpec::closed("inf", 0.0, 1.0, |_| LogValue::Log(f64::INFINITY));
        assert!(matches!(
            measure_from_majorant(&inf, MajorantScale::Subharmonic),
            Err(Error::DegenerateMeasure)
        ));
    }
}
