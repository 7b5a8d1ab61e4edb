//! Explicit (sub)harmonic test functions.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Re,
    Im,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionKind {
    /// Harmonic off the singular set.
    Harmonic,
    /// Subharmonic on the whole plane but not harmonic.
    Subharmonic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `Re P` or `Im P` for `P(z) = Σ c_k z^k`.
    HarmonicPoly { coeffs: Vec<[f64; 2]>, part: Part },
    /// `Σ log|z − a_j|`.
    LogAbsEntire { zeros: Vec<[f64; 2]> },
    /// `c · log⁺|z|`.
    RadialLog { c: f64 },
    /// `log|(z − i)/(z + i)|`.
    HalfPlaneMobius,
    /// `Re 1/(1 − z)`.
    SquarePole,
}

fn c64(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn horner(coeffs: &[[f64; 2]], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c64(c))
}

fn singular(z: Complex64) -> Error {
    Error::SingularPoint { re: z.re, im: z.im }
}

impl TestFunction {
    pub fn poly(coeffs: &[Complex64], part: Part) -> Self {
        Self::HarmonicPoly {
            coeffs: coeffs.iter().map(|c| [c.re, c.im]).collect(),
            part,
        }
    }

    /// `Re z^n` or `Im z^n`, times `scale`.
    pub fn monomial(n: usize, part: Part, scale: f64) -> Self {
        let mut coeffs = vec![[0.0, 0.0]; n + 1];
        coeffs[n] = [scale, 0.0];
        Self::HarmonicPoly { coeffs, part }
    }

    pub fn zero() -> Self {
        Self::HarmonicPoly {
            coeffs: Vec::new(),
            part: Part::Re,
        }
    }

    pub fn log_abs(zeros: &[Complex64]) -> Self {
        Self::LogAbsEntire {
            zeros: zeros.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn kind(&self) -> FunctionKind {
        match self {
            Self::HarmonicPoly { .. } | Self::HalfPlaneMobius | Self::SquarePole => FunctionKind::Harmonic,
            Self::LogAbsEntire { .. } | Self::RadialLog { .. } => FunctionKind::Subharmonic,
        }
    }

    /// Subharmonic on all of `ℂ` (no poles).
    pub fn is_entire(&self) -> bool {
        !matches!(self, Self::HalfPlaneMobius | Self::SquarePole)
    }

    pub fn eval(&self, z: Complex64) -> Result<f64> {
        let v = match self {
            Self::HarmonicPoly { coeffs, part } => {
                let w = horner(coeffs, z);
                match part {
                    Part::Re => w.re,
                    Part::Im => w.im,
                }
            }
            Self::LogAbsEntire { zeros } => {
                let mut sum = 0.0;
                for &a in zeros {
                    let d = (z - c64(a)).norm();
                    if d == 0.0 {
                        return Err(singular(z));
                    }
                    sum += d.ln();
                }
                sum
            }
            Self::RadialLog { c } => c * z.norm().ln().max(0.0),
            Self::HalfPlaneMobius => {
                let i = Complex64::i();
                let (num, den) = ((z - i).norm(), (z + i).norm());
                if num == 0.0 || den == 0.0 {
                    return Err(singular(z));
                }
                (num / den).ln()
            }
            Self::SquarePole => {
                let d = Complex64::new(1.0, 0.0) - z;
                if d.norm() == 0.0 {
                    return Err(singular(z));
                }
                d.inv().re
            }
        };
        Ok(v)
    }

    /// Value with limits at the singular set: `−∞` at zeros of `log|·|`,
    /// `±∞` at the poles of the Möbius quotient, NaN at the pole of `1/(1 − z)`.
    pub fn extended(&self, z: Complex64) -> f64 {
        match self.eval(z) {
            Ok(v) => v,
            Err(_) => match self {
                Self::LogAbsEntire { .. } => f64::NEG_INFINITY,
                Self::HalfPlaneMobius if z.im > 0.0 => f64::NEG_INFINITY,
                Self::HalfPlaneMobius => f64::INFINITY,
                _ => f64::NAN,
            },
        }
    }

    pub fn positive_part(&self, z: Complex64) -> Result<f64> {
        self.eval(z).map(|v| v.max(0.0))
    }

    pub fn negative_part(&self, z: Complex64) -> Result<f64> {
        self.eval(z).map(|v| (-v).max(0.0))
    }

    /// `∂u/∂r` at `z ≠ 0`, from the complex derivative.
    pub fn radial_derivative(&self, z: Complex64) -> Result<f64> {
        let rho = z.norm();
        if rho == 0.0 {
            return Err(singular(z));
        }
        let e = z / rho;
        let v = match self {
            Self::HarmonicPoly { coeffs, part } => {
                let deriv: Vec<[f64; 2]> = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| [k as f64 * c[0], k as f64 * c[1]])
                    .collect();
                let w = horner(&deriv, z) * e;
                match part {
                    Part::Re => w.re,
                    Part::Im => w.im,
                }
            }
            Self::LogAbsEntire { zeros } => {
                let mut sum = Complex64::new(0.0, 0.0);
                for &a in zeros {
                    let d = z - c64(a);
                    if d.norm() == 0.0 {
                        return Err(singular(z));
                    }
                    sum += d.inv();
                }
                (sum * e).re
            }
            Self::RadialLog { c } => {
                if rho == 1.0 {
                    return Err(singular(z));
                }
                if rho > 1.0 {
                    c / rho
                } else {
                    0.0
                }
            }
            Self::HalfPlaneMobius => {
                let i = Complex64::i();
                if (z - i).norm() == 0.0 || (z + i).norm() == 0.0 {
                    return Err(singular(z));
                }
                (((z - i).inv() - (z + i).inv()) * e).re
            }
            Self::SquarePole => {
                let d = Complex64::new(1.0, 0.0) - z;
                if d.norm() == 0.0 {
                    return Err(singular(z));
                }
                ((d * d).inv() * e).re
            }
        };
        Ok(v)
    }

    /// `z ↦ u(kz)` for polynomial and radial variants.
    pub fn dilated(&self, k: f64) -> Result<Self> {
        match self {
            Self::HarmonicPoly { coeffs, part } => Ok(Self::HarmonicPoly {
                coeffs: coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let s = k.powi(j as i32);
                        [c[0] * s, c[1] * s]
                    })
                    .collect(),
                part: *part,
            }),
            _ => Err(Error::UnsupportedFunction(format!("dilation of {self}"))),
        }
    }

    /// Functions subharmonic on the whole plane.
    pub fn entire_family() -> Vec<Self> {
        vec![
            Self::monomial(1, Part::Re, 1.0),
            Self::monomial(1, Part::Im, 1.0),
            Self::monomial(2, Part::Re, 1.0),
            Self::monomial(3, Part::Im, 1.0),
            Self::log_abs(&[Complex64::new(0.0, 0.0)]),
            Self::log_abs(&[Complex64::new(-1.0, 0.0), Complex64::new(2.0, 0.0)]),
            Self::RadialLog { c: 1.0 },
        ]
    }

    /// The entire family plus the functions with poles.
    pub fn full_family() -> Vec<Self> {
        let mut all = Self::entire_family();
        all.push(Self::monomial(1, Part::Im, -1.0));
        all.push(Self::HalfPlaneMobius);
        all.push(Self::SquarePole);
        all
    }
}

fn fmt_complex(c: [f64; 2]) -> String {
    if c[1] == 0.0 {
        format!("{}", c[0])
    } else {
        format!("{}:{}", c[0], c[1])
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HarmonicPoly { coeffs, part } => {
                let p = match part {
                    Part::Re => "re",
                    Part::Im => "im",
                };
                let list: Vec<String> = coeffs.iter().map(|&c| fmt_complex(c)).collect();
                write!(f, "{p}-poly:{}", list.join(","))
            }
            Self::LogAbsEntire { zeros } => {
                let list: Vec<String> = zeros.iter().map(|&c| fmt_complex(c)).collect();
                write!(f, "log-abs:{}", list.join(","))
            }
            Self::RadialLog { c } => write!(f, "radial-log:{c}"),
            Self::HalfPlaneMobius => f.write_str("mobius"),
            Self::SquarePole => f.write_str("square-pole"),
        }
    }
}

fn parse_complex_list(s: &str) -> Result<Vec<[f64; 2]>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| {
            let mut parts = item.trim().splitn(2, ':');
            let re = parts.next().unwrap_or("");
            let im = parts.next().unwrap_or("0");
            let parse = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::InvalidInput(format!("bad number '{x}' in '{s}'")))
            };
            Ok([parse(re)?, parse(im)?])
        })
        .collect()
}

impl FromStr for TestFunction {
    type Err = Error;

    /// Accepts `re-z`, `im-z`, `neg-im-z`, `re-z2`, `im-z3`, `zero`, `mobius`,
    /// `square-pole`, `radial-log[:c]`, `re-poly:c0,c1,…`, `im-poly:…` and
    /// `log-abs:a1,a2,…`, with complex numbers written `re:im`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let f = match (head, tail) {
            ("re-z", None) => Self::monomial(1, Part::Re, 1.0),
            ("im-z", None) => Self::monomial(1, Part::Im, 1.0),
            ("neg-im-z", None) => Self::monomial(1, Part::Im, -1.0),
            ("re-z2", None) => Self::monomial(2, Part::Re, 1.0),
            ("im-z3", None) => Self::monomial(3, Part::Im, 1.0),
            ("zero", None) => Self::zero(),
            ("mobius", None) => Self::HalfPlaneMobius,
            ("square-pole", None) => Self::SquarePole,
            ("radial-log", None) => Self::RadialLog { c: 1.0 },
            ("radial-log", Some(c)) => Self::RadialLog {
                c: c.trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad constant in '{s}'")))?,
            },
            ("re-poly", Some(list)) => Self::HarmonicPoly {
                coeffs: parse_complex_list(list)?,
                part: Part::Re,
            },
            ("im-poly", Some(list)) => Self::HarmonicPoly {
                coeffs: parse_complex_list(list)?,
                part: Part::Im,
            },
            ("log-abs", Some(list)) => Self::LogAbsEntire {
                zeros: parse_complex_list(list)?,
            },
            _ => return Err(Error::InvalidInput(format!("unknown test function '{s}'"))),
        };
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{E, PI};

    #[test]
    fn examples() {
        let re = TestFunction::monomial(1, Part::Re, 1.0);
        assert_abs_diff_eq!(re.eval(Complex64::from_polar(2.0, PI / 3.0)).unwrap(), 1.0, epsilon = 1e-15);
        let log = TestFunction::log_abs(&[Complex64::new(0.0, 0.0)]);
        assert_abs_diff_eq!(log.eval(Complex64::new(E, 0.0)).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(TestFunction::SquarePole.eval(Complex64::new(0.0, 0.0)).unwrap(), 1.0);
        assert!(TestFunction::SquarePole.eval(Complex64::new(1.0, 0.0)).is_err());
        assert!(log.eval(Complex64::new(0.0, 0.0)).is_err());
        assert!(TestFunction::HalfPlaneMobius.eval(Complex64::i()).is_err());
        assert_eq!(TestFunction::zero().eval(Complex64::new(3.0, 1.0)).unwrap(), 0.0);
        let neg = TestFunction::monomial(1, Part::Re, 1.0);
        assert_eq!(neg.negative_part(Complex64::new(-2.0, 0.0)).unwrap(), 2.0);
        assert_eq!(neg.positive_part(Complex64::new(-2.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn parse_round_trip() {
        for f in TestFunction::full_family() {
            let text = f.to_string();
            assert_eq!(text.parse::<TestFunction>().unwrap(), f, "{text}");
        }
        assert_eq!("re-z".parse::<TestFunction>().unwrap(), TestFunction::monomial(1, Part::Re, 1.0));
        assert!("nope".parse::<TestFunction>().is_err());
        assert!("re-poly:1,x".parse::<TestFunction>().is_err());
    }

    fn numeric_radial(f: &TestFunction, z: Complex64) -> f64 {
        let h = 1e-6;
        let e = z / z.norm();
        (f.eval(z + e * h).unwrap() - f.eval(z - e * h).unwrap()) / (2.0 * h)
    }

    proptest! {
        #[test]
        fn radial_derivative_matches_finite_difference(rho in 0.2f64..3.0, th in 0.1f64..3.0, k in 0usize..10) {
            let f = &TestFunction::full_family()[k];
            let z = Complex64::from_polar(rho, th);
            prop_assume!((rho - 1.0).abs() > 1e-3);
            let exact = f.radial_derivative(z).unwrap();
            let fd = numeric_radial(f, z);
            prop_assert!((exact - fd).abs() <= 1e-5 * (1.0 + exact.abs()), "{f}: {exact} vs {fd}");
        }

        #[test]
        fn dilation_composes(k in 0.1f64..4.0, x in -2.0f64..2.0, y in -2.0f64..2.0) {
            let f = TestFunction::poly(&[Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0), Complex64::new(0.5, 0.0)], Part::Im);
            let z = Complex64::new(x, y);
            let g = f.dilated(k).unwrap();
            prop_assert!((g.eval(z).unwrap() - f.eval(z * k).unwrap()).abs() < 1e-12);
        }
    }
}
