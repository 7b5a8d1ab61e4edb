//! Carleman's formula for a function harmonic in the sector
//! `D = {r < |z| < R, |arg z − π/2| < π(1/2 − a)}`, checked as an identity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::TestFunction;
use crate::error::{out_of_range, Error, Result};
use crate::quad::simpson;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorSpec {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub a: f64,
}

impl SectorSpec {
    pub fn new(r: f64, big_r: f64, a: f64) -> Result<Self> {
        if !(r > 0.0 && r < big_r && big_r.is_finite()) {
            return Err(out_of_range("r", r, "0 < r < R"));
        }
        if !(a > 0.0 && a < 0.25) {
            return Err(out_of_range("a", a, "0 < a < 1/4"));
        }
        Ok(Self { r, big_r, a })
    }

    pub fn b(&self) -> f64 {
        1.0 / (1.0 - 2.0 * self.a)
    }
}

/// The four terms of the formula; they sum to zero for harmonic `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarlemanTerms {
    pub outer_arc: f64,
    pub inner_arc: f64,
    pub inner_derivative: f64,
    pub sides: f64,
    pub quad_n: usize,
}

impl CarlemanTerms {
    pub fn residual(&self) -> f64 {
        (self.outer_arc + self.inner_arc + self.inner_derivative + self.sides).abs()
    }
}

/// Evaluates each term by composite Simpson with `quad_n` subintervals.
pub fn carleman_terms(u: &TestFunction, sector: &SectorSpec, quad_n: usize) -> Result<CarlemanTerms> {
    if !matches!(u, TestFunction::HarmonicPoly { .. }) {
        return Err(Error::UnsupportedFunction(format!(
            "{u} is not a harmonic polynomial"
        )));
    }
    if quad_n < 2 {
        return Err(out_of_range("quad_n", quad_n as f64, "quad_n >= 2"));
    }
    let SectorSpec { r, big_r, a } = *sector;
    let b = sector.b();
    let (lo, hi) = (PI * a, PI - PI * a);
    let s = |th: f64| (b * (th - PI * a)).sin();
    let val = |z: Complex64| u.eval(z).expect("polynomials are entire");
    let rad = |z: Complex64| u.radial_derivative(z).expect("z is off the origin");
    let r2b = big_r.powf(-2.0 * b);

    let outer_arc = 2.0 * b * big_r.powf(-b) * simpson(|th| val(Complex64::from_polar(big_r, th)) * s(th), lo, hi, quad_n);
    let inner_arc = -b * (r.powf(-b) + r.powf(b) * r2b) * simpson(|th| val(Complex64::from_polar(r, th)) * s(th), lo, hi, quad_n);
    let inner_derivative = -(r.powf(1.0 - b) - r.powf(1.0 + b) * r2b)
        * simpson(|th| rad(Complex64::from_polar(r, th)) * s(th), lo, hi, quad_n);
    let sides = b * simpson(
        |x| {
            (val(Complex64::from_polar(x, lo)) + val(Complex64::from_polar(x, hi)))
                * (x.powf(-b - 1.0) - x.powf(b - 1.0) * r2b)
        },
        r,
        big_r,
        quad_n,
    );
    Ok(CarlemanTerms {
        outer_arc,
        inner_arc,
        inner_derivative,
        sides,
        quad_n,
    })
}

/// Absolute value of the sum of the four terms.
pub fn carleman_identity_residual(u: &TestFunction, sector: &SectorSpec, quad_n: usize) -> Result<f64> {
    carleman_terms(u, sector, quad_n).map(|t| t.residual())
}

/// `log₂(residual(n)/residual(2n))` for consecutive doublings, skipping pairs
/// whose finer residual is at the roundoff floor.
pub fn observed_orders(residuals: &[(usize, f64)], floor: f64) -> Vec<f64> {
    residuals
        .windows(2)
        .filter(|w| w[1].0 == 2 * w[0].0 && w[1].1 > floor)
        .map(|w| (w[0].1 / w[1].1).log2())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Part;

    fn sector() -> SectorSpec {
        SectorSpec::new(0.5, 2.0, 0.1).unwrap()
    }

    fn family() -> Vec<TestFunction> {
        vec![
            TestFunction::monomial(1, Part::Im, 1.0),
            TestFunction::monomial(2, Part::Re, 1.0),
            TestFunction::monomial(3, Part::Im, 1.0),
            TestFunction::poly(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(-0.5, 0.3)], Part::Re),
            TestFunction::monomial(0, Part::Re, 1.0),
        ]
    }

    #[test]
    fn zero_function_has_zero_residual() {
        assert_eq!(carleman_identity_residual(&TestFunction::zero(), &sector(), 16).unwrap(), 0.0);
    }

    #[test]
    fn identity_holds_and_converges() {
        for u in family() {
            let res512 = carleman_identity_residual(&u, &sector(), 512).unwrap();
            let res1024 = carleman_identity_residual(&u, &sector(), 1024).unwrap();
            assert!(res512 < 1e-6 && res1024 < 1e-6, "{u}: {res512} {res1024}");
            let seq: Vec<(usize, f64)> = [8, 16, 32, 64]
                .iter()
                .map(|&n| (n, carleman_identity_residual(&u, &sector(), n).unwrap()))
                .collect();
            let orders = observed_orders(&seq, 1e-12);
            assert!(orders.iter().all(|&p| p >= 2.0), "{u}: {seq:?} {orders:?}");
        }
    }

    #[test]
    fn rejects_non_harmonic_and_bad_sector() {
        assert!(carleman_identity_residual(&TestFunction::RadialLog { c: 1.0 }, &sector(), 16).is_err());
        assert!(SectorSpec::new(2.0, 1.0, 0.1).is_err());
        assert!(SectorSpec::new(0.5, 2.0, 0.25).is_err());
    }

    #[test]
    fn wrong_range_for_derivative_term_breaks_identity() {
        // integrating u'_r over [−πa, πa] instead of the sector's arc does not close
        let u = TestFunction::monomial(1, Part::Im, 1.0);
        let s = sector();
        let t = carleman_terms(&u, &s, 512).unwrap();
        let b = s.b();
        let alt = -(s.r.powf(1.0 - b) - s.r.powf(1.0 + b) * s.big_r.powf(-2.0 * b))
            * simpson(
                |th| u.radial_derivative(Complex64::from_polar(s.r, th)).unwrap() * (b * (th - PI * s.a)).sin(),
                -PI * s.a,
                PI * s.a,
                512,
            );
        let broken = (t.outer_arc + t.inner_arc + alt + t.sides).abs();
        assert!(broken > 1e-3);
    }
}
