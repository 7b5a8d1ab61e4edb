//! `starmeasure`: class-A tests, domain construction, walk-on-spheres
//! projection and the growth-theorem harness from the command line.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::Format;

#[derive(Parser)]
#[command(name = "starmeasure", version, about = "Radial projections of harmonic measure on star-shaped domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Clone)]
pub struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
pub struct WalkArgs {
    /// Number of walk-on-spheres trajectories.
    #[arg(long, default_value_t = 100_000)]
    pub walks: u64,
    /// Absorption shell relative to the largest boundary radius.
    #[arg(long, default_value_t = 1e-4)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub bins: usize,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: u64,
}

/// Where a measure comes from: a `t,nu` file or a built-in density.
#[derive(Args, Clone, Debug)]
pub struct MeasureArgs {
    /// Measure file with header `t,nu`.
    #[arg(long, conflicts_with = "builtin")]
    pub measure: Option<PathBuf>,
    /// Built-in density: uniform, cosine, bimodal, von-mises, exp-flat.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Cells used to discretize a built-in density.
    #[arg(long, default_value_t = 1024)]
    pub cells: usize,
}

#[derive(Subcommand)]
pub enum Command {
    /// Dyadic class-A defect sequence and verdict for a `t,nu` measure.
    CheckClassA {
        measure: PathBuf,
        /// Verdict tolerance on the last defect.
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        /// Smallest δ; the sequence runs over δ = 2⁻ᵏ down to this value.
        #[arg(long, default_value_t = 6.103515625e-5)]
        delta_min: f64,
    },
    /// `∫ log⁻` of a `t,density` file (or `∫ log⁺log⁺` with `--kind loglogplus`).
    CheckConditions {
        density: PathBuf,
        #[arg(long, value_enum, default_value = "logminus")]
        kind: commands::Kind,
    },
    /// Build the star-shaped domain of a measure on [0, 2π] and write it as `theta,r`.
    BuildDomain {
        measure: PathBuf,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        /// Double the samples until radii change by less than this.
        #[arg(long)]
        tol: Option<f64>,
        /// Build even when the measure is not certified as class A.
        #[arg(long)]
        force: bool,
    },
    /// Walk-on-spheres estimate of the angular exit distribution from a point.
    Project {
        domain: PathBuf,
        #[command(flatten)]
        walk: WalkArgs,
        /// Start point `re,im`.
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        z: String,
    },
    /// Build a domain from a measure, project it back and report the KS distance.
    Roundtrip {
        measure: PathBuf,
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        /// KS distance above which the round trip fails.
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        #[arg(long)]
        force: bool,
    },
    /// Estimate `C(K)` with `ω(z, E, Ω) ≤ C(K) ν(arg E)` for the disk K.
    BoundConstant {
        domain: PathBuf,
        measure: PathBuf,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        center: String,
        #[arg(long, default_value_t = 0.0)]
        radius: f64,
        #[command(flatten)]
        walk: WalkArgs,
    },
    /// Profile `∫u⁺ dν ≤ V(t)` against `u ≤ cV(At)`.
    Theorem1 {
        #[arg(long, default_value = "re-z")]
        function: String,
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        t_min: f64,
        #[arg(long, default_value_t = 1000.0)]
        t_max: f64,
        #[arg(long, default_value_t = 31)]
        t_points: usize,
        #[arg(long, default_value_t = 2048)]
        theta_samples: usize,
        /// Also fit the integrated form `u ≤ c t⁻¹ W(At)`.
        #[arg(long)]
        integrated: bool,
    },
    /// Phragmén–Lindelöf check in the upper half-plane.
    Phragmen {
        #[arg(long, default_value = "mobius")]
        function: String,
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, default_value_t = 1.0)]
        t_min: f64,
        #[arg(long, default_value_t = 1e4)]
        t_max: f64,
        #[arg(long, default_value_t = 20)]
        t_points: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Line integrals over the square and the resulting bound on a centred rectangle.
    Levinson {
        #[arg(long, default_value = "square-pole")]
        function: String,
        #[command(flatten)]
        measure: MeasureArgs,
        /// Half-width of the square K.
        #[arg(long, default_value_t = 0.5)]
        k: f64,
        #[arg(long, default_value_t = 65)]
        x_points: usize,
        #[arg(long, default_value_t = 33)]
        samples: usize,
    },
    /// Matsaev weights f and Ψ on a grid, with the `log⁻` integral of f.
    Matsaev {
        /// `one`, `power:p`.
        #[arg(long, default_value = "one")]
        phi: String,
        #[arg(long, default_value_t = 0.2)]
        tau: f64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 1024)]
        points: usize,
    },
    /// Residual of Carleman's formula in the sector {r < |z| < R, |arg z − π/2| < π(1/2 − a)}.
    CarlemanIdentity {
        #[arg(long, default_value = "im-z")]
        function: String,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long = "big-r", default_value_t = 2.0)]
        big_r: f64,
        #[arg(long, default_value_t = 0.1)]
        a: f64,
        #[arg(long, default_value_t = 1024)]
        quad_n: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Write a built-in measure (or `nonmember`) as a `t,nu` file.
    Builtin {
        name: String,
        #[arg(long, default_value_t = 1024)]
        cells: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, &cli.output) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
