use std::f64::consts::{PI, TAU};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use starmeasure::construction::{build_domain, build_domain_refined, RefinementConfig, StarShapedDomain};
use starmeasure::harmonic_measure::{bound_constant, ks_distance, wos_project, AngularDistribution, DiskSpec, WalkConfig};
use starmeasure::harness::{
    carleman_terms, geometric_grid, levinson_profile, linear_grid, matsaev_log_minus, matsaev_weight_grid,
    phragmen_check, psi_weight, theorem1_profile, MatsaevWeight, Phi, PhragmenConfig, PhragmenStatus, Rect,
    SectorSpec, TestFunction, Theorem1Config,
};
use starmeasure::io::{self, read_density, read_domain, read_measure, write_domain, write_measure};
use starmeasure::measures::{
    condition_integral, dini_modulus, nonmember_profile, BuiltinDensity, ClassVerdict, ConditionKind, DefectConfig,
    ExtendedValue, SegmentMeasure,
};
use starmeasure::{Error, Result};

use crate::report::{emit, Report, Table};
use crate::{Command, MeasureArgs, OutputArgs, WalkArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Logminus,
    Loglogplus,
}

pub fn run(command: Command, out: &OutputArgs) -> Result<bool> {
    let output = out.output.as_deref();
    let report = match command {
        Command::CheckClassA { measure, tol, delta_min } => check_class_a(&measure, tol, delta_min)?,
        Command::CheckConditions { density, kind } => check_conditions(&density, kind)?,
        Command::BuildDomain { measure, samples, tol, force } => {
            return build(&measure, samples, tol, force, output);
        }
        Command::Project { domain, walk, z } => project(&domain, &walk, &z)?,
        Command::Roundtrip { measure, walk, samples, tol, force } => roundtrip(&measure, &walk, samples, tol, force)?,
        Command::BoundConstant { domain, measure, center, radius, walk } => {
            bound(&domain, &measure, &center, radius, &walk)?
        }
        Command::Theorem1 { function, measure, a, t_min, t_max, t_points, theta_samples, integrated } => {
            let cfg = Theorem1Config { a, theta_samples, integrated };
            theorem1(&function, &measure, &cfg, t_min, t_max, t_points)?
        }
        Command::Phragmen { function, measure, t_min, t_max, t_points, tol } => {
            phragmen(&function, &measure, t_min, t_max, t_points, tol)?
        }
        Command::Levinson { function, measure, k, x_points, samples } => {
            levinson(&function, &measure, k, x_points, samples)?
        }
        Command::Matsaev { phi, tau, delta, points } => matsaev(&phi, tau, delta, points)?,
        Command::CarlemanIdentity { function, r, big_r, a, quad_n, tol } => {
            carleman(&function, r, big_r, a, quad_n, tol)?
        }
        Command::Builtin { name, cells } => {
            let nu = builtin_measure(&name, cells)?;
            let mut buf = Vec::new();
            write_measure(&mut buf, &nu)?;
            emit(&String::from_utf8_lossy(&buf), output)?;
            return Ok(true);
        }
    };
    emit(&report.render(out.format), output)?;
    Ok(report.passed)
}

fn load_measure(path: &Path) -> Result<SegmentMeasure> {
    read_measure(io::open(path)?)
}

fn load_domain(path: &Path) -> Result<StarShapedDomain> {
    read_domain(io::open(path)?)
}

fn builtin_measure(name: &str, cells: usize) -> Result<SegmentMeasure> {
    if name == "nonmember" {
        return nonmember_profile(0.0, TAU)?.to_measure();
    }
    name.parse::<BuiltinDensity>()?.measure(cells)
}

/// The measure from `--measure` or `--builtin`, moved onto `[a, b]`; uniform when neither is given.
fn measure_on(args: &MeasureArgs, a: f64, b: f64) -> Result<SegmentMeasure> {
    let nu = match (&args.measure, &args.builtin) {
        (Some(path), _) => load_measure(path)?,
        (None, Some(name)) => builtin_measure(name, args.cells)?,
        (None, None) => SegmentMeasure::uniform(a, b)?,
    };
    if nu.is_on(a, b) {
        Ok(nu)
    } else {
        nu.inverse().rescaled(a, b)?.to_measure()
    }
}

fn describe(args: &MeasureArgs) -> String {
    match (&args.measure, &args.builtin) {
        (Some(p), _) => p.display().to_string(),
        (None, Some(name)) => format!("builtin:{name}:{}", args.cells),
        (None, None) => "uniform".into(),
    }
}

fn parse_point(s: &str) -> Result<Complex64> {
    let bad = || Error::InvalidInput(format!("expected a point 're,im', got '{s}'"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn walk_config(w: &WalkArgs) -> Result<WalkConfig> {
    let mut cfg = WalkConfig {
        walks: w.walks,
        eps: w.eps,
        seed: w.seed,
        bins: w.bins,
        max_steps: w.max_steps,
        ..WalkConfig::default()
    };
    if let Some(n) = w.workers {
        cfg.workers = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn distribution_table(d: &AngularDistribution) -> Table {
    Table::new(
        vec!["lo", "hi", "mass", "stderr"],
        vec![
            d.edges[..d.bins].to_vec(),
            d.edges[1..].to_vec(),
            d.masses.clone(),
            d.stderr.clone(),
        ],
    )
}

fn check_class_a(path: &Path, tol: f64, delta_min: f64) -> Result<Report> {
    if !(delta_min > 0.0 && delta_min <= 0.5) {
        return Err(Error::OutOfRange { name: "delta-min", value: delta_min, expected: "0 < delta-min <= 1/2" });
    }
    if !(tol > 0.0) {
        return Err(Error::OutOfRange { name: "tol", value: tol, expected: "tol > 0" });
    }
    let nu = load_measure(path)?;
    let k_max = (-delta_min.log2()).floor().max(1.0) as usize;
    let cfg = DefectConfig { k_max, tol, ..DefectConfig::default() };
    let defect = nu.class_a_report(&cfg)?;
    let dini = dini_modulus(&nu.inverse());

    #[derive(Serialize)]
    struct Config<'a> {
        command: &'static str,
        measure: String,
        k_max: usize,
        tol: f64,
        delta_min: f64,
        defect: &'a DefectConfig,
    }
    #[derive(Serialize)]
    struct Body<'a> {
        config: Config<'a>,
        deltas: &'a [f64],
        defects: &'a [f64],
        argmax: &'a [f64],
        verdict: ClassVerdict,
        dini: ExtendedValue,
    }
    let body = Body {
        config: Config { command: "check-class-a", measure: path.display().to_string(), k_max, tol, delta_min, defect: &cfg },
        deltas: &defect.deltas,
        defects: &defect.defects,
        argmax: &defect.argmax,
        verdict: defect.verdict,
        dini: dini.dini,
    };
    Ok(Report::new(&body, defect.verdict == ClassVerdict::InClassA)?
        .with_table(Table::new(vec!["delta", "defect"], vec![defect.deltas.clone(), defect.defects.clone()])))
}

fn check_conditions(path: &Path, kind: Kind) -> Result<Report> {
    let samples = read_density(io::open(path)?)?;
    let spec = samples.to_spec()?;
    let ck = match kind {
        Kind::Logminus => ConditionKind::LogMinus,
        Kind::Loglogplus => ConditionKind::LogLogPlus,
    };
    let value = condition_integral(ck, &spec)?;
    let (verdict, normalization) = match kind {
        Kind::Logminus => {
            let (nu, total) = samples.to_measure()?;
            let report = nu.class_a_report(&DefectConfig::default())?;
            (Some(report.verdict), Some(total))
        }
        Kind::Loglogplus => (None, None),
    };

    #[derive(Serialize)]
    struct Body {
        config: serde_json::Value,
        kind: Kind,
        integral: ExtendedValue,
        finite: bool,
        class_a_verdict: Option<ClassVerdict>,
        normalization: Option<f64>,
    }
    let body = Body {
        config: serde_json::json!({"command": "check-conditions", "density": path.display().to_string(), "kind": kind}),
        kind,
        integral: value,
        finite: value.is_finite(),
        class_a_verdict: verdict,
        normalization,
    };
    Report::new(&body, value.is_finite())
}

fn build(path: &Path, samples: usize, tol: Option<f64>, force: bool, output: Option<&Path>) -> Result<bool> {
    let nu = load_measure(path)?;
    let (domain, change, converged) = match tol {
        Some(tol) => {
            let cfg = RefinementConfig { initial_samples: samples, tol, ..RefinementConfig::default() };
            let out = build_domain_refined(&nu, &cfg, force)?;
            (out.domain, Some(out.change), out.converged)
        }
        None => (build_domain(&nu, samples, force)?, None, true),
    };
    let mut buf = Vec::new();
    write_domain(&mut buf, &domain)?;
    emit(&String::from_utf8_lossy(&buf), output)?;
    if output.is_some() {
        let summary = serde_json::json!({
            "config": {"command": "build-domain", "measure": path.display().to_string(), "samples": samples, "tol": tol, "force": force},
            "samples": domain.samples(),
            "r_min": domain.min_radius(),
            "r_max": domain.max_radius(),
            "change": change,
            "converged": converged,
        });
        emit(&format!("{}\n", serde_json::to_string_pretty(&summary).expect("json")), None)?;
    }
    Ok(converged)
}

fn project(path: &Path, walk: &WalkArgs, z: &str) -> Result<Report> {
    let domain = load_domain(path)?;
    let start = parse_point(z)?;
    let cfg = walk_config(walk)?;
    let dist = wos_project(&domain, start, &cfg)?;
    let body = serde_json::json!({
        "config": {"command": "project", "domain": path.display().to_string(), "z": [start.re, start.im], "walk": cfg},
        "distribution": dist,
    });
    Ok(Report::new(&body, true)?.with_table(distribution_table(&dist)))
}

fn roundtrip(path: &Path, walk: &WalkArgs, samples: usize, tol: f64, force: bool) -> Result<Report> {
    let nu = load_measure(path)?;
    let cfg = walk_config(walk)?;
    let domain = build_domain(&nu, samples, force)?;
    let dist = wos_project(&domain, Complex64::new(0.0, 0.0), &cfg)?;
    let ks = ks_distance(&dist, &nu)?;
    let passed = ks <= tol;
    let body = serde_json::json!({
        "config": {"command": "roundtrip", "measure": path.display().to_string(), "samples": samples, "tol": tol, "force": force, "walk": cfg},
        "ks": ks,
        "passed": passed,
        "r_min": domain.min_radius(),
        "r_max": domain.max_radius(),
        "distribution": dist,
    });
    Ok(Report::new(&body, passed)?.with_table(distribution_table(&dist)))
}

fn bound(domain: &Path, measure: &Path, center: &str, radius: f64, walk: &WalkArgs) -> Result<Report> {
    let dom = load_domain(domain)?;
    let nu = load_measure(measure)?;
    let cfg = walk_config(walk)?;
    let disk = DiskSpec::new(parse_point(center)?, radius)?;
    let r = bound_constant(&dom, disk, &nu, &cfg)?;
    let body = serde_json::json!({
        "config": {"command": "bound-constant", "domain": domain.display().to_string(), "measure": measure.display().to_string(), "disk": disk, "walk": cfg},
        "result": r,
    });
    Report::new(&body, true)
}

fn theorem1(function: &str, m: &MeasureArgs, cfg: &Theorem1Config, t_min: f64, t_max: f64, n: usize) -> Result<Report> {
    let u: TestFunction = function.parse()?;
    let nu = measure_on(m, 0.0, TAU)?;
    check_range(t_min, t_max, n)?;
    let grid = geometric_grid(t_min, t_max, n);
    let r = theorem1_profile(&u, &nu, &grid, cfg)?;
    let body = serde_json::json!({
        "config": {"command": "theorem1", "function": function, "measure": describe(m), "t_min": t_min, "t_max": t_max, "t_points": n, "profile": cfg},
        "profile": r,
    });
    let table = Table::new(
        vec!["t", "L", "V", "S", "V_at"],
        vec![r.grid.clone(), r.l.clone(), r.v.clone(), r.s.clone(), r.v_at.clone()],
    );
    Ok(Report::new(&body, r.c_fit.is_finite())?.with_table(table))
}

fn check_range(lo: f64, hi: f64, n: usize) -> Result<()> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n < 2 {
        return Err(Error::InvalidInput(format!("need 0 < t-min < t-max and at least 2 points, got [{lo}, {hi}] with {n}")));
    }
    Ok(())
}

fn phragmen(function: &str, m: &MeasureArgs, t_min: f64, t_max: f64, n: usize, tol: f64) -> Result<Report> {
    let u: TestFunction = function.parse()?;
    let nu = measure_on(m, 0.0, PI)?;
    check_range(t_min, t_max, n)?;
    let cfg = PhragmenConfig { tol, ..PhragmenConfig::default() };
    let r = phragmen_check(&u, &nu, &geometric_grid(t_min, t_max, n), &cfg)?;
    let body = serde_json::json!({
        "config": {"command": "phragmen", "function": function, "measure": describe(m), "t_min": t_min, "t_max": t_max, "t_points": n, "check": cfg},
        "report": r,
    });
    let table = Table::new(vec!["t", "growth"], vec![r.grid.clone(), r.growth.clone()]);
    Ok(Report::new(&body, r.status != PhragmenStatus::TheoremViolated)?.with_table(table))
}

fn levinson(function: &str, m: &MeasureArgs, k: f64, x_points: usize, samples: usize) -> Result<Report> {
    let u: TestFunction = function.parse()?;
    let nu = measure_on(m, -1.0, 1.0)?;
    if x_points < 2 {
        return Err(Error::OutOfRange { name: "x-points", value: x_points as f64, expected: "x-points >= 2" });
    }
    // interior lines, denser towards the vertical sides
    let grid: Vec<f64> = linear_grid(-1.0, 1.0, x_points + 2)[1..=x_points]
        .iter()
        .map(|&s| (0.5 * PI * s).sin())
        .collect();
    let r = levinson_profile(&u, &nu, &grid, Rect::centered(k)?, samples)?;
    let body = serde_json::json!({
        "config": {"command": "levinson", "function": function, "measure": describe(m), "k": k, "x_points": x_points, "samples": samples},
        "report": r,
    });
    let table = Table::new(vec!["x", "line_integral"], vec![r.grid.clone(), r.line_integrals.clone()]);
    Ok(Report::new(&body, r.normalized_sup_k.is_finite())?.with_table(table))
}

fn parse_phi(s: &str) -> Result<Phi> {
    match s.split_once(':') {
        None if s == "one" => Ok(Phi::One),
        Some(("power", p)) => Phi::power(
            p.trim().parse().map_err(|_| Error::InvalidInput(format!("bad exponent in '{s}'")))?,
        ),
        _ => Err(Error::InvalidInput(format!("unknown Φ '{s}', expected 'one' or 'power:p'"))),
    }
}

fn matsaev(phi: &str, tau: f64, delta: Option<f64>, points: usize) -> Result<Report> {
    let w = MatsaevWeight::new(parse_phi(phi)?, tau, delta)?;
    if points < 2 {
        return Err(Error::OutOfRange { name: "points", value: points as f64, expected: "points >= 2" });
    }
    let n = points - 1;
    let theta: Vec<f64> = (0..=n).map(|j| PI * j as f64 / n as f64).collect();
    let f = matsaev_weight_grid(&w, n)?;
    let psi = theta.iter().map(|&t| psi_weight(&w, t)).collect::<Result<Vec<_>>>()?;
    let dominated = f.iter().zip(&psi).all(|(f, p)| *f >= 0.0 && p >= f);
    let log_minus = matsaev_log_minus(&w)?;
    let body = serde_json::json!({
        "config": {"command": "matsaev", "phi": phi, "tau": tau, "delta": delta, "points": points},
        "beta": w.beta(),
        "log_minus": log_minus,
        "psi_dominates_f": dominated,
        "theta": theta,
        "f": f,
        "psi": psi,
    });
    let passed = dominated && log_minus.is_finite();
    Ok(Report::new(&body, passed)?.with_table(Table::new(vec!["theta", "f", "psi"], vec![theta, f, psi])))
}

fn carleman(function: &str, r: f64, big_r: f64, a: f64, quad_n: usize, tol: f64) -> Result<Report> {
    let u: TestFunction = function.parse()?;
    let sector = SectorSpec::new(r, big_r, a)?;
    let terms = carleman_terms(&u, &sector, quad_n)?;
    let residual = terms.residual();
    let body = serde_json::json!({
        "config": {"command": "carleman-identity", "function": function, "sector": sector, "quad_n": quad_n, "tol": tol},
        "terms": terms,
        "residual": residual,
    });
    Report::new(&body, residual <= tol)
}
