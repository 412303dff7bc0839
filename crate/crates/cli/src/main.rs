use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::Matrix4;
use num_complex::Complex64;
use serde_json::{json, Value};

use pktorus::actions::{hamiltonian, moment_map};
use pktorus::kahler::{complex_structure_at, metric_at, metric_det, omega_at};
use pktorus::pick::{norm_sq, ModuliPoint};
use pktorus::sphere::{export_mesh, holonomy, spectral_data, wang_solution, CubicCoefficient};
use pktorus::verify::{run_suite, Suite};
use pktorus::{Error, WeightFunction};

#[derive(Parser)]
#[command(name = "pktorus", version, about = "Pseudo-Kähler geometry of convex projective tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate g, ω, I and the Hamiltonian data at a point (x, y, u, v).
    Eval {
        /// Point as `x,y,u,v`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Weight function: `linear:<k>` or `log:<k>`.
        #[arg(long, default_value = "linear:1")]
        weight: String,
    },
    /// Run verification suites and print their reports.
    Verify {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "linear:1")]
        weight: String,
        /// Override the suite tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Build the affine sphere of `c dz^3` and export it as an OBJ mesh.
    Sphere {
        /// Cubic coefficient as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, default_value_t = 50)]
        grid: usize,
        #[arg(long, default_value_t = 1.5)]
        range: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure modes mapped onto the exit-code contract.
enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn parse_reals(text: &str, n: usize, what: &str) -> Result<Vec<f64>, Failure> {
    let values: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match values {
        Ok(v) if v.len() == n && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(Failure::Usage(format!(
            "malformed {what} `{text}`; expected {n} comma-separated finite numbers"
        ))),
    }
}

fn rows(m: &Matrix4<f64>) -> Value {
    json!((0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect::<Vec<f64>>()).collect::<Vec<_>>())
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn eval(point: &str, weight: &str) -> Result<Value, Failure> {
    let wf: WeightFunction = weight.parse()?;
    let c = parse_reals(point, 4, "point")?;
    let p = ModuliPoint::from_coords(c[0], c[1], c[2], c[3])?;
    let (closed, numeric) = metric_det(&p, &wf);
    let mu = moment_map(&p, &wf);
    Ok(json!({
        "point": c,
        "weight": wf.to_string(),
        "metric": rows(&metric_at(&p, &wf)),
        "omega": rows(&omega_at(&p, &wf)),
        "complex_structure": rows(&complex_structure_at(&p)),
        "det_g_closed": closed,
        "det_g_numeric": numeric,
        "norm_sq": norm_sq(&p),
        "hamiltonian": hamiltonian(&p, &wf),
        "moment": { "xi1": mu.xi1, "xi2": mu.xi2, "xi3": mu.xi3 },
    }))
}

fn verify(suite: &str, samples: usize, seed: u64, weight: &str, tol: Option<f64>) -> Result<(Value, bool), Failure> {
    let wf: WeightFunction = weight.parse()?;
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        suite
            .split(',')
            .map(|s| s.trim().parse::<Suite>())
            .collect::<Result<_, _>>()?
    };
    let reports: Vec<_> = suites.iter().map(|s| run_suite(*s, &wf, samples, seed, tol)).collect();
    let passed = reports.iter().all(|r| r.passed);
    let value = json!({ "passed": passed, "reports": reports });
    Ok((value, passed))
}

fn sphere(c: &str, grid: usize, range: f64, out: &Path) -> Result<Value, Failure> {
    let parts = parse_reals(c, 2, "coefficient")?;
    let coefficient = CubicCoefficient::new(Complex64::new(parts[0], parts[1]))?;
    let sd = spectral_data(&coefficient);
    let mesh = export_mesh(&coefficient, grid, range, out)?;
    let diag = |omega: Complex64| -> Result<Value, Failure> {
        let h = holonomy(&coefficient, omega)?;
        Ok(json!([h[(0, 0)], h[(1, 1)], h[(2, 2)]]))
    };
    Ok(json!({
        "c": parts,
        "lambda0": complex(sd.lambda0),
        "zeta": complex(sd.zeta),
        "psi": wang_solution(&coefficient),
        "holonomy": {
            "omega_1": diag(Complex64::new(1.0, 0.0))?,
            "omega_i": diag(Complex64::new(0.0, 1.0))?,
        },
        "titeica_max_dev": mesh.titeica_max_deviation(),
        "vertices": mesh.vertices.len(),
        "faces": mesh.faces.len(),
        "out": out.display().to_string(),
    }))
}

fn print(value: &Value) {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval { point, weight } => eval(point, weight).map(|v| print(&v)),
        Command::Verify {
            suite,
            samples,
            seed,
            weight,
            tol,
        } => verify(suite, *samples, *seed, weight, *tol).and_then(|(v, passed)| {
            print(&v);
            if passed {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }),
        Command::Sphere { c, grid, range, out } => sphere(c, *grid, *range, out).map(|v| print(&v)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
