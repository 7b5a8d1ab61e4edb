//! CSV files: measures `t,nu`, densities `t,density` and domains `theta,r`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::construction::StarShapedDomain;
use crate::error::{Error, Result};
use crate::measures::{MajorantSpec, SegmentMeasure};

fn read_pairs<R: Read>(reader: R, header: [&str; 2]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(Error::InvalidInput(format!(
            "expected header '{}', found '{}'",
            header.join(","),
            found.join(",")
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::InvalidInput(format!("row {}: expected 2 fields", row + 2)));
        }
        let parse = |i: usize| -> Result<f64> {
            let field = &record[i];
            let v: f64 = field
                .parse()
                .map_err(|_| Error::InvalidInput(format!("row {}: '{field}' is not a number", row + 2)))?;
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("row {}: non-finite value '{field}'", row + 2)));
            }
            Ok(v)
        };
        let (x, y) = (parse(0)?, parse(1)?);
        if let Some(&prev) = xs.last() {
            if x <= prev {
                return Err(Error::InvalidInput(format!(
                    "row {}: {} = {x} is not greater than {prev}",
                    row + 2,
                    header[0]
                )));
            }
        }
        xs.push(x);
        ys.push(y);
    }
    if xs.len() < 2 {
        return Err(Error::InvalidInput("need at least two rows".into()));
    }
    Ok((xs, ys))
}

fn write_pairs<W: Write>(writer: W, header: [&str; 2], xs: &[f64], ys: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header)?;
    for (x, y) in xs.iter().zip(ys) {
        w.write_record([format!("{x:?}"), format!("{y:?}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `t,nu` rows: sorted by `t`, first row `(a, 0)`, last row `(b, 1)`.
pub fn read_measure<R: Read>(reader: R) -> Result<SegmentMeasure> {
    let (t, nu) = read_pairs(reader, ["t", "nu"])?;
    SegmentMeasure::new(t, nu)
}

pub fn write_measure<W: Write>(writer: W, nu: &SegmentMeasure) -> Result<()> {
    write_pairs(writer, ["t", "nu"], nu.abscissae(), nu.values())
}

/// Density samples `t,density`, linear between rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySamples {
    pub t: Vec<f64>,
    pub density: Vec<f64>,
}

impl DensitySamples {
    pub fn new(t: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if let Some(bad) = density.iter().find(|d| **d < 0.0) {
            return Err(Error::InvalidInput(format!("negative density {bad}")));
        }
        if t.len() != density.len() || t.len() < 2 {
            return Err(Error::InvalidInput("mismatched or too few density samples".into()));
        }
        Ok(Self { t, density })
    }

    /// Normalized cumulative integral (trapezoidal, exact for the linear interpolant),
    /// together with the total mass.
    pub fn to_measure(&self) -> Result<(SegmentMeasure, f64)> {
        let mut cum = vec![0.0];
        for i in 1..self.t.len() {
            let step = 0.5 * (self.density[i] + self.density[i - 1]) * (self.t[i] - self.t[i - 1]);
            cum.push(cum[i - 1] + step);
        }
        let total = *cum.last().unwrap();
        if !(total > 0.0) {
            return Err(Error::DegenerateMeasure);
        }
        // cells without mass would break strict monotonicity; drop their right node
        let mut t = vec![self.t[0]];
        let mut nu = vec![0.0];
        for i in 1..self.t.len() {
            let v = cum[i] / total;
            if v > *nu.last().unwrap() {
                t.push(self.t[i]);
                nu.push(v);
            }
        }
        let last = nu.len() - 1;
        nu[last] = 1.0;
        *t.last_mut().unwrap() = *self.t.last().unwrap();
        Ok((SegmentMeasure::new(t, nu)?, total))
    }

    pub fn to_spec(&self) -> Result<MajorantSpec> {
        MajorantSpec::sampled(self.t.clone(), self.density.clone())
    }
}

pub fn read_density<R: Read>(reader: R) -> Result<DensitySamples> {
    let (t, density) = read_pairs(reader, ["t", "density"])?;
    DensitySamples::new(t, density)
}

pub fn write_density<W: Write>(writer: W, d: &DensitySamples) -> Result<()> {
    write_pairs(writer, ["t", "density"], &d.t, &d.density)
}

/// Reads `theta,r` rows from `θ = 0` to `θ = 2π` with equal first and last radii.
pub fn read_domain<R: Read>(reader: R) -> Result<StarShapedDomain> {
    let (theta, r) = read_pairs(reader, ["theta", "r"])?;
    StarShapedDomain::new(theta, r)
}

pub fn write_domain<W: Write>(writer: W, domain: &StarShapedDomain) -> Result<()> {
    write_pairs(writer, ["theta", "r"], domain.thetas(), domain.radii())
}

pub fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::BuiltinDensity;

    #[test]
    fn measure_round_trip_is_exact() {
        let nu = BuiltinDensity::VonMises.measure(64).unwrap();
        let mut buf = Vec::new();
        write_measure(&mut buf, &nu).unwrap();
        assert_eq!(read_measure(buf.as_slice()).unwrap(), nu);
    }

    #[test]
    fn tiny_values_stay_compact() {
        let nu = SegmentMeasure::new(vec![0.0, 1e-301, 1.0], vec![0.0, 1e-300, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_measure(&mut buf, &nu).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("1e-301") && text.len() < 60, "{text}");
        assert_eq!(read_measure(buf.as_slice()).unwrap(), nu);
    }

    #[test]
    fn domain_round_trip() {
        let d = StarShapedDomain::from_periodic(vec![1.0, 1.5, 0.7, 1.2]).unwrap();
        let mut buf = Vec::new();
        write_domain(&mut buf, &d).unwrap();
        let back = read_domain(buf.as_slice()).unwrap();
        assert_eq!(back.radii(), d.radii());
        assert_eq!(back.thetas(), d.thetas());
    }

    #[test]
    fn rejects_bad_files() {
        let bad = [
            "t,nu\n0,0\n1,NaN\n",
            "t,nu\n0,0\n1,inf\n",
            "t,nu\n0,0\n2,0.5\n1,1\n",
            "x,nu\n0,0\n1,1\n",
            "t,nu\n0,0.1\n1,1\n",
            "t,nu\n0,0\n1,abc\n",
            "t,nu\n0,0\n",
        ];
        for text in bad {
            assert!(read_measure(text.as_bytes()).is_err(), "{text}");
        }
        assert!(read_density("t,density\n0,1\n1,-1\n".as_bytes()).is_err());
        assert!(read_domain("theta,r\n0,1\n1,1\n2,1\n6.283185307179586,2\n".as_bytes()).is_err());
    }

    #[test]
    fn density_to_measure() {
        let d = read_density("t,density\n0,1\n1,1\n2,3\n".as_bytes()).unwrap();
        let (nu, total) = d.to_measure().unwrap();
        assert_eq!(total, 3.0);
        assert_eq!(nu.values(), &[0.0, 1.0 / 3.0, 1.0]);
        let flat = read_density("t,density\n0,0\n1,0\n2,2\n3,0\n".as_bytes()).unwrap();
        let (nu, _) = flat.to_measure().unwrap();
        assert_eq!(nu.a(), 0.0);
        assert_eq!(nu.b(), 3.0);
    }
}
