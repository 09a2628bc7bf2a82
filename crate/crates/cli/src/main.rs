//! `sommerfeld` — field sweeps and the quadrature benchmark from a flat
//! TOML scenario file.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use sommerfeld::em::{Geometry, Medium, Scenario, Source};
use sommerfeld::quadrature::{Method, QuadratureSpec, DEFAULT_MAX_EVALS};
use sommerfeld::sweep::{
    emit_csv, parse_methods, run_benchmark, run_sweep, write_csv, Axis, BenchmarkSpec, Scale, SweepSpec,
};

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "sommerfeld", version, about = "Vertical dipole over lossy ground: field sweeps and quadrature benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the selected solvers over a frequency or distance grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// freq or dist; overrides `axis` in the config
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated methods, e.g. ni,spm,etalon
        #[arg(long)]
        methods: Option<String>,
    },
    /// Time the scattered-field integral over frequencies and tolerances.
    Bench {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// CSV output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// simpson or trapezoid
    #[arg(long)]
    quadrature: Option<String>,
    /// Exit with status 3 if any point or cell failed
    #[arg(long)]
    strict: bool,
}

fn default_methods() -> Vec<String> {
    ["NI", "SPM", "Etalon"].map(String::from).to_vec()
}

/// Flat scenario file; key names follow the usual symbols (heights in m,
/// σ in S/m, μ in H/m).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    f_min: f64,
    f_max: f64,
    #[serde(rename = "X0")]
    x0: f64,
    #[serde(rename = "X")]
    x: f64,
    #[serde(rename = "I")]
    current: f64,
    two_h: f64,
    sigma: f64,
    eps_r: f64,
    mu: f64,
    #[serde(default = "default_methods")]
    methods: Vec<String>,
    #[serde(default = "default_rel_tol")]
    rel_tol: f64,
    #[serde(default = "default_quadrature")]
    quadrature: String,
    #[serde(default)]
    max_evals: Option<usize>,

    #[serde(default = "default_axis")]
    axis: String,
    #[serde(default = "default_scale")]
    scale: String,
    #[serde(default = "default_points")]
    points: usize,
    /// Horizontal distance for frequency sweeps and the benchmark.
    #[serde(default = "default_rho")]
    rho: f64,
    #[serde(default)]
    rho_min: Option<f64>,
    #[serde(default)]
    rho_max: Option<f64>,
    /// Frequency for distance sweeps; `f_min` when absent.
    #[serde(default)]
    frequency: Option<f64>,
    /// Exclusion half-width (units of k01) for NaiveNI.
    #[serde(default)]
    naive_exclusion: Option<f64>,

    #[serde(default)]
    bench_frequencies: Option<Vec<f64>>,
    #[serde(default)]
    bench_tolerances: Option<Vec<f64>>,
    #[serde(default)]
    bench_methods: Option<Vec<String>>,
    #[serde(default)]
    repetitions: Option<usize>,
}

fn default_rel_tol() -> f64 {
    1e-6
}
fn default_quadrature() -> String {
    "simpson".into()
}
fn default_axis() -> String {
    "freq".into()
}
fn default_scale() -> String {
    "log".into()
}
fn default_points() -> usize {
    31
}
fn default_rho() -> f64 {
    1000.0
}

impl Config {
    fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    fn scenario(&self, rho: f64, frequency: f64) -> anyhow::Result<Scenario> {
        let source = Source::new(self.current, self.two_h)?;
        let geometry = Geometry::new(self.x0, self.x, rho)?;
        let ground = Medium::new(self.eps_r, self.sigma, self.mu)?;
        Ok(Scenario::new(source, geometry, ground, frequency)?)
    }

    fn quadrature(&self, common: &Common) -> anyhow::Result<QuadratureSpec> {
        let name = common.quadrature.as_deref().unwrap_or(&self.quadrature);
        let method: Method = name.parse()?;
        let q = QuadratureSpec::new(method, common.rel_tol.unwrap_or(self.rel_tol))?;
        Ok(q.with_max_evals(self.max_evals.unwrap_or(DEFAULT_MAX_EVALS)))
    }
}

enum Failure {
    Config(anyhow::Error),
    Solver,
}

fn sweep(common: &Common, axis: Option<&str>, methods: Option<&str>) -> Result<(), Failure> {
    let cfg = Config::load(&common.config).map_err(Failure::Config)?;
    let build = || -> anyhow::Result<(SweepSpec, Scenario)> {
        let axis: Axis = axis.unwrap_or(&cfg.axis).parse()?;
        let methods = match methods {
            Some(m) => parse_methods(m)?,
            None => parse_methods(&cfg.methods.join(","))?,
        };
        let (start, stop, scenario) = match axis {
            Axis::Frequency => (cfg.f_min, cfg.f_max, cfg.scenario(cfg.rho, cfg.f_min)?),
            Axis::Distance => {
                let (Some(a), Some(b)) = (cfg.rho_min, cfg.rho_max) else {
                    bail!("distance sweeps need rho_min and rho_max");
                };
                (a, b, cfg.scenario(a, cfg.frequency.unwrap_or(cfg.f_min))?)
            }
        };
        let spec = SweepSpec {
            axis,
            start,
            stop,
            points: cfg.points,
            scale: cfg.scale.parse::<Scale>()?,
            methods,
            quadrature: cfg.quadrature(common)?,
            naive_exclusion: cfg.naive_exclusion,
        };
        spec.validate()?;
        Ok((spec, scenario))
    };
    let (spec, scenario) = build().map_err(Failure::Config)?;
    let rows = run_sweep(&spec, &scenario).map_err(|e| Failure::Config(e.into()))?;
    output(&rows, common.out.as_deref()).map_err(Failure::Config)?;
    let failed = rows.iter().filter(|r| !r.error.is_empty()).count();
    if failed > 0 {
        eprintln!("sommerfeld: {failed} of {} sweep points failed (see the error column)", rows.len());
        if common.strict {
            return Err(Failure::Solver);
        }
    }
    Ok(())
}

fn bench(common: &Common) -> Result<(), Failure> {
    let cfg = Config::load(&common.config).map_err(Failure::Config)?;
    let build = || -> anyhow::Result<(BenchmarkSpec, Scenario)> {
        let mut spec = BenchmarkSpec::default();
        if let Some(f) = &cfg.bench_frequencies {
            spec.frequencies = f.clone();
        }
        if let Some(t) = &cfg.bench_tolerances {
            spec.tolerances = t.clone();
        }
        if let Some(t) = common.rel_tol {
            spec.tolerances = vec![t];
        }
        if let Some(m) = &cfg.bench_methods {
            spec.methods = m.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
        }
        if let Some(q) = &common.quadrature {
            spec.methods = vec![q.parse()?];
        }
        if let Some(r) = cfg.repetitions {
            spec.repetitions = r;
        }
        if let Some(m) = cfg.max_evals {
            spec.max_evals = m;
        }
        spec.validate()?;
        Ok((spec, cfg.scenario(cfg.rho, cfg.f_min)?))
    };
    let (spec, scenario) = build().map_err(Failure::Config)?;
    let rows = run_benchmark(&spec, &scenario).map_err(|e| Failure::Config(e.into()))?;
    output(&rows, common.out.as_deref()).map_err(Failure::Config)?;
    let failed = rows.iter().filter(|r| !r.error.is_empty()).count();
    if failed > 0 {
        eprintln!("sommerfeld: {failed} of {} benchmark cells failed", rows.len());
        if common.strict {
            return Err(Failure::Solver);
        }
    }
    Ok(())
}

fn output<T: serde::Serialize>(rows: &[T], out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => emit_csv(rows, p)?,
        None => write_csv(rows, std::io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep { common, axis, methods } => sweep(common, axis.as_deref(), methods.as_deref()),
        Command::Bench { common } => bench(common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("sommerfeld: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Solver) => ExitCode::from(EXIT_SOLVER),
    }
}
