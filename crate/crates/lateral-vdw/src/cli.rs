//! Command-line front end: JSON scenario configs, sweep orchestration, and
//! plot-ready CSV/JSON emission.
//!
//! Every run reads one config file (`--config`) holding a `scenario` block,
//! one `task` block matching the subcommand, and an optional `output` block;
//! see the `configs/` directory for complete examples. Exit codes: 0 on
//! success, 1 on numerical failure, 2 on configuration errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::analysis::{
    self, ProfileFamily, Regime, Scenario,
};
use crate::energy::{energy_ratio_pfa, Mode, PhysicalSetup};
use crate::error::Error;
use crate::profile::{Profile, ProfileSign, QuadratureSpec};
use crate::response::{gamma_from_polarizability, GammaParams, Orientation};

/// CODATA 2018 reduced Planck constant (J s); injected default, overridable
/// per config.
pub const HBAR: f64 = 1.054_571_817e-34;
/// CODATA 2018 vacuum permittivity (F/m).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

const EXIT_NUMERICAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(
    name = "lateral-vdw",
    version,
    about = "Lateral van der Waals interaction above a corrugated conducting plane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Path to the JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the quadrature relative tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file path (default: stdout, or the config's output.path).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads for sweeps (0 = automatic); falls back to the
    /// LATERAL_VDW_THREADS environment variable.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Evaluate the energy ratio (or lateral force) at one point.
    Eval,
    /// 1D sweep of the ratio along x; emits x0_over_z0,ratio rows.
    Scan,
    /// 2D grid of the ratio; emits x0_over_z0,y0_over_z0,ratio rows.
    Map,
    /// Critical-width boundary over a list of gamma_s values.
    Phase,
    /// Trap-frequency deviation report.
    Trap,
    /// Peak/valley classification of a grating scenario.
    Regime,
    /// Interior minima of the ratio along x.
    Minima,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Scan => "scan",
            Command::Map => "map",
            Command::Phase => "phase",
            Command::Trap => "trap",
            Command::Regime => "regime",
            Command::Minima => "minima",
        }
    }
}

// ---------------------------------------------------------------------------
// config schema

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    scenario: ScenarioConfig,
    #[serde(default)]
    quad: Option<QuadConfig>,
    task: TaskConfig,
    #[serde(default)]
    output: Option<OutputConfig>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioConfig {
    profile: ProfileConfig,
    #[serde(default)]
    particle: Option<ParticleConfig>,
    orientation: OrientationConfig,
    #[serde(default)]
    mode: Option<String>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ProfileConfig {
    Gaussian {
        d_over_z0: f64,
        #[serde(default)]
        sign: Option<i8>,
    },
    Strip {
        d_over_z0: f64,
        #[serde(default)]
        sign: Option<i8>,
    },
    Grating {
        d_over_z0: f64,
        l_over_z0: f64,
        n_strips: u32,
        #[serde(default)]
        sign: Option<i8>,
    },
    Tabulated {
        path: String,
        #[serde(default)]
        sign: Option<i8>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParticleConfig {
    #[serde(default)]
    gamma_s: Option<f64>,
    #[serde(default)]
    gamma_a: Option<f64>,
    #[serde(default)]
    gamma_iso: Option<f64>,
    #[serde(default)]
    alpha_diagonal: Option<[f64; 3]>,
    /// Skips the gamma domain validation for exploratory sweeps.
    #[serde(default)]
    allow_out_of_domain: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OrientationConfig {
    /// "radians" or "degrees"; required so angle units are never guessed.
    unit: String,
    phi: f64,
    theta: f64,
    psi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadConfig {
    #[serde(default)]
    rel_tol: Option<f64>,
    #[serde(default)]
    abs_tol: Option<f64>,
    #[serde(default)]
    u_max: Option<f64>,
    #[serde(default)]
    max_refinements: Option<u32>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum TaskConfig {
    Eval {
        x0_over_z0: f64,
        #[serde(default)]
        y0_over_z0: Option<f64>,
        #[serde(default)]
        observable: Option<String>,
    },
    Scan {
        x_min: f64,
        x_max: f64,
        samples: usize,
        #[serde(default)]
        y0_over_z0: Option<f64>,
    },
    Map {
        x_min: f64,
        x_max: f64,
        nx: usize,
        y_min: f64,
        y_max: f64,
        ny: usize,
        /// Emit the proximity-force approximation instead of the full ratio.
        #[serde(default)]
        pfa: Option<bool>,
    },
    Phase {
        family: String,
        gamma_s_values: Vec<f64>,
        #[serde(default)]
        width_tol: Option<f64>,
    },
    Trap {
        setup: SetupConfig,
    },
    Regime {},
    Minima {
        x_min: f64,
        x_max: f64,
        grid_n: usize,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SetupConfig {
    #[serde(default)]
    hbar: Option<f64>,
    #[serde(default)]
    epsilon0: Option<f64>,
    amplitude_a: f64,
    z0: f64,
    #[serde(default)]
    gamma_iso: Option<f64>,
    #[serde(default)]
    dipole_p: Option<f64>,
    mass: f64,
    omega_trap: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputConfig {
    #[serde(default)]
    format: Option<String>,
    #[serde(default)]
    path: Option<String>,
    #[serde(default)]
    precision: Option<usize>,
}

// ---------------------------------------------------------------------------
// error plumbing

enum RunError {
    Config(String),
    Numerical(Error),
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Numerical(e) => write!(f, "numerical error: {e}"),
        }
    }
}

fn config_err<T>(msg: impl Into<String>) -> std::result::Result<T, RunError> {
    Err(RunError::Config(msg.into()))
}

/// Library errors raised while building the scenario are configuration
/// problems; errors raised during evaluation are numerical.
fn as_config(e: Error) -> RunError {
    RunError::Config(e.to_string())
}

type RunResult<T> = std::result::Result<T, RunError>;

// ---------------------------------------------------------------------------
// config -> domain objects

fn parse_sign(sign: Option<i8>) -> RunResult<ProfileSign> {
    match sign {
        None | Some(1) => Ok(ProfileSign::Bump),
        Some(-1) => Ok(ProfileSign::Hole),
        Some(other) => config_err(format!("profile.sign must be 1 or -1, got {other}")),
    }
}

fn build_profile(cfg: &ProfileConfig, config_dir: &Path) -> RunResult<Profile> {
    match cfg {
        ProfileConfig::Gaussian { d_over_z0, sign } => {
            Profile::gaussian(*d_over_z0, parse_sign(*sign)?).map_err(as_config)
        }
        ProfileConfig::Strip { d_over_z0, sign } => {
            Profile::strip(*d_over_z0, parse_sign(*sign)?).map_err(as_config)
        }
        ProfileConfig::Grating {
            d_over_z0,
            l_over_z0,
            n_strips,
            sign,
        } => Profile::grating(*d_over_z0, *l_over_z0, *n_strips, parse_sign(*sign)?)
            .map_err(as_config),
        ProfileConfig::Tabulated { path, sign } => {
            let p = PathBuf::from(path);
            let resolved = if p.is_relative() {
                config_dir.join(p)
            } else {
                p
            };
            Profile::tabulated_from_path(&resolved, parse_sign(*sign)?).map_err(as_config)
        }
    }
}

fn build_particle(cfg: Option<&ParticleConfig>, mode: Mode) -> RunResult<GammaParams> {
    let Some(p) = cfg else {
        return match mode {
            // the classical dipole response carries no gamma freedom
            Mode::Classical => Ok(GammaParams::new_unchecked(1.0, 0.0, 0.0)),
            Mode::Quantum => config_err("scenario.particle is required in quantum mode"),
        };
    };
    match (&p.alpha_diagonal, p.gamma_s) {
        (Some(_), Some(_)) => {
            config_err("scenario.particle: give either alpha_diagonal or gamma_s, not both")
        }
        (Some([a1, a2, a3]), None) => gamma_from_polarizability(*a1, *a2, *a3).map_err(as_config),
        (None, Some(gs)) => {
            let ga = p.gamma_a.unwrap_or(0.0);
            let iso = p.gamma_iso.unwrap_or(1.0);
            if p.allow_out_of_domain.unwrap_or(false) {
                Ok(GammaParams::new_unchecked(iso, gs, ga))
            } else {
                GammaParams::new(iso, gs, ga).map_err(as_config)
            }
        }
        (None, None) => config_err(
            "scenario.particle needs gamma_s (plus optional gamma_a, gamma_iso) or alpha_diagonal",
        ),
    }
}

fn build_orientation(cfg: &OrientationConfig) -> RunResult<Orientation> {
    let to_rad = match cfg.unit.as_str() {
        "radians" => 1.0,
        "degrees" => std::f64::consts::PI / 180.0,
        other => {
            return config_err(format!(
                "orientation.unit must be \"radians\" or \"degrees\", got \"{other}\""
            ))
        }
    };
    Orientation::new(cfg.phi * to_rad, cfg.theta * to_rad, cfg.psi * to_rad).map_err(as_config)
}

fn build_mode(mode: Option<&String>) -> RunResult<Mode> {
    match mode.map(String::as_str) {
        None | Some("quantum") => Ok(Mode::Quantum),
        Some("classical") => Ok(Mode::Classical),
        Some(other) => config_err(format!(
            "scenario.mode must be \"quantum\" or \"classical\", got \"{other}\""
        )),
    }
}

fn build_quad(cfg: Option<&QuadConfig>, tol_override: Option<f64>) -> RunResult<QuadratureSpec> {
    let mut q = QuadratureSpec::default();
    if let Some(c) = cfg {
        if let Some(v) = c.rel_tol {
            q.rel_tol = v;
        }
        if let Some(v) = c.abs_tol {
            q.abs_tol = v;
        }
        if let Some(v) = c.u_max {
            q.u_max = v;
        }
        if let Some(v) = c.max_refinements {
            q.max_refinements = v;
        }
    }
    if let Some(t) = tol_override {
        q.rel_tol = t;
    }
    q.validate().map_err(as_config)?;
    Ok(q)
}

fn build_scenario(cfg: &RunConfig, config_dir: &Path, tol: Option<f64>) -> RunResult<Scenario> {
    let mode = build_mode(cfg.scenario.mode.as_ref())?;
    Scenario::new(
        build_profile(&cfg.scenario.profile, config_dir)?,
        build_particle(cfg.scenario.particle.as_ref(), mode)?,
        build_orientation(&cfg.scenario.orientation)?,
        mode,
        build_quad(cfg.quad.as_ref(), tol)?,
    )
    .map_err(as_config)
}

fn build_setup(cfg: &SetupConfig) -> PhysicalSetup {
    PhysicalSetup {
        hbar: cfg.hbar.unwrap_or(HBAR),
        epsilon0: cfg.epsilon0.unwrap_or(EPSILON_0),
        amplitude_a: cfg.amplitude_a,
        z0: cfg.z0,
        gamma_iso: cfg.gamma_iso.unwrap_or(1.0),
        dipole_p: cfg.dipole_p.unwrap_or(0.0),
        mass: cfg.mass,
        omega_trap: cfg.omega_trap,
    }
}

// ---------------------------------------------------------------------------
// output

#[derive(Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Csv,
    Json,
}

struct OutputSink {
    format: OutputFormat,
    path: Option<PathBuf>,
    precision: usize,
}

impl OutputSink {
    fn resolve(
        cfg: Option<&OutputConfig>,
        cli_format: Option<&String>,
        cli_out: Option<&PathBuf>,
        default_format: OutputFormat,
    ) -> RunResult<OutputSink> {
        let fmt_name = cli_format
            .cloned()
            .or_else(|| cfg.and_then(|c| c.format.clone()));
        let format = match fmt_name.as_deref() {
            None => default_format,
            Some("csv") => OutputFormat::Csv,
            Some("json") => OutputFormat::Json,
            Some(other) => {
                return config_err(format!("format must be \"csv\" or \"json\", got \"{other}\""))
            }
        };
        let path = cli_out
            .cloned()
            .or_else(|| cfg.and_then(|c| c.path.as_ref().map(PathBuf::from)));
        let precision = cfg.and_then(|c| c.precision).unwrap_or(9);
        if precision == 0 || precision > 17 {
            return config_err(format!(
                "output.precision must be in 1..=17, got {precision}"
            ));
        }
        Ok(OutputSink {
            format,
            path,
            precision,
        })
    }

    fn emit(&self, content: &str) -> RunResult<()> {
        match &self.path {
            Some(p) => std::fs::write(p, content)
                .map_err(|e| RunError::Config(format!("cannot write {}: {e}", p.display()))),
            None => {
                print!("{content}");
                Ok(())
            }
        }
    }
}

/// Fixed-significant-digit scientific formatting; locale-free and
/// deterministic across runs.
fn fmt_sig(v: f64, precision: usize) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    format!("{:.*e}", precision - 1, v)
}

// ---------------------------------------------------------------------------
// task runners

fn numerical(e: Error) -> RunError {
    RunError::Numerical(e)
}

fn run_eval(
    s: &Scenario,
    x0: f64,
    y0: f64,
    observable: Option<&String>,
    sink: &OutputSink,
) -> RunResult<()> {
    let value = match observable.map(String::as_str) {
        None | Some("ratio") => analysis::ratio_at(s, x0, y0).map_err(numerical)?,
        Some("force") => {
            if y0 != 0.0 {
                return config_err("observable \"force\" requires y0_over_z0 = 0");
            }
            analysis::lateral_force_ratio(s, x0).map_err(numerical)?.value
        }
        Some(other) => {
            return config_err(format!(
                "observable must be \"ratio\" or \"force\", got \"{other}\""
            ))
        }
    };
    let line = match sink.format {
        OutputFormat::Csv => format!("{}\n", fmt_sig(value, sink.precision)),
        OutputFormat::Json => format!("{{\"value\": {}}}\n", fmt_sig(value, sink.precision)),
    };
    print!("{line}");
    if sink.path.is_some() {
        sink.emit(&line)?;
    }
    Ok(())
}

fn run_scan(
    s: &Scenario,
    x_min: f64,
    x_max: f64,
    samples: usize,
    y0: f64,
    sink: &OutputSink,
) -> RunResult<()> {
    if x_min > x_max {
        return config_err(format!("reversed scan range: x_min {x_min} > x_max {x_max}"));
    }
    let xs: Vec<f64> = if samples == 1 {
        vec![x_min]
    } else {
        (0..samples)
            .map(|i| x_min + (x_max - x_min) * (i as f64) / ((samples - 1) as f64))
            .collect()
    };
    use rayon::prelude::*;
    let rows: Vec<(f64, f64)> = xs
        .par_iter()
        .map(|&x| analysis::ratio_at(s, x, y0).map(|r| (x, r)))
        .collect::<std::result::Result<_, Error>>()
        .map_err(numerical)?;

    let content = match sink.format {
        OutputFormat::Csv => {
            let mut out = String::from("x0_over_z0,ratio\n");
            for (x, r) in &rows {
                let _ = writeln!(
                    out,
                    "{},{}",
                    fmt_sig(*x, sink.precision),
                    fmt_sig(*r, sink.precision)
                );
            }
            out
        }
        OutputFormat::Json => json_table(&["x0_over_z0", "ratio"], rows.iter().map(|(x, r)| vec![*x, *r]), sink.precision, &[]),
    };
    sink.emit(&content)
}

fn run_map(
    s: &Scenario,
    x_range: (f64, f64),
    y_range: (f64, f64),
    nx: usize,
    ny: usize,
    pfa: bool,
    sink: &OutputSink,
) -> RunResult<()> {
    if x_range.0 > x_range.1 || y_range.0 > y_range.1 {
        return config_err("reversed map range");
    }
    if nx == 0 || ny == 0 {
        return config_err("map grid sizes must be >= 1");
    }

    let map = if pfa {
        // proximity-force limit: local height against the flat-plane weight
        let m = s.response();
        let mut values = Vec::with_capacity(nx * ny);
        let xs = lin(x_range, nx);
        let ys = lin(y_range, ny);
        for &x in &xs {
            for &y in &ys {
                values.push(energy_ratio_pfa(s.profile.height_ratio(x, y), &m));
            }
        }
        analysis::EnergyMap {
            xs,
            ys,
            values,
            failures: vec![],
        }
    } else {
        analysis::energy_map_2d(s, x_range, y_range, nx, ny).map_err(numerical)?
    };

    let content = match sink.format {
        OutputFormat::Csv => {
            let mut out = String::from("x0_over_z0,y0_over_z0,ratio\n");
            for (ix, &x) in map.xs.iter().enumerate() {
                for (iy, &y) in map.ys.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        fmt_sig(x, sink.precision),
                        fmt_sig(y, sink.precision),
                        fmt_sig(map.values[ix * map.ys.len() + iy], sink.precision)
                    );
                }
            }
            out
        }
        OutputFormat::Json => {
            let rows = map.xs.iter().enumerate().flat_map(|(ix, &x)| {
                let ys = &map.ys;
                let values = &map.values;
                ys.iter()
                    .enumerate()
                    .map(move |(iy, &y)| vec![x, y, values[ix * ys.len() + iy]])
            });
            json_table(&["x0_over_z0", "y0_over_z0", "ratio"], rows, sink.precision, &[])
        }
    };
    sink.emit(&content)?;

    if !map.failures.is_empty() {
        let f = &map.failures[0];
        eprintln!(
            "{} map point(s) failed; first at grid ({}, {}): {}",
            map.failures.len(),
            f.ix,
            f.iy,
            f.error
        );
        return Err(RunError::Numerical(f.error.clone()));
    }
    Ok(())
}

fn lin(range: (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range.0];
    }
    (0..n)
        .map(|i| range.0 + (range.1 - range.0) * (i as f64) / ((n - 1) as f64))
        .collect()
}

fn run_phase(
    family_name: &str,
    gamma_values: &[f64],
    width_tol: f64,
    sink: &OutputSink,
) -> RunResult<()> {
    let family = match family_name {
        "gaussian" => ProfileFamily::Gaussian,
        "strip" => ProfileFamily::Strip,
        other => {
            return config_err(format!(
                "phase.family must be \"gaussian\" or \"strip\", got \"{other}\""
            ))
        }
    };
    let threshold = analysis::threshold_gamma(family).map_err(numerical)?;

    use rayon::prelude::*;
    let rows: Vec<(f64, Option<f64>)> = gamma_values
        .par_iter()
        .map(|&g| match analysis::critical_width(g, family, width_tol) {
            Ok(d) => Ok((g, Some(d))),
            Err(Error::NoSignChange { .. }) => Ok((g, None)),
            Err(e) => Err(e),
        })
        .collect::<std::result::Result<_, Error>>()
        .map_err(numerical)?;

    let content = match sink.format {
        OutputFormat::Csv => {
            let mut out = String::from("gamma_s,critical_d_over_z0\n");
            for (g, d) in &rows {
                match d {
                    Some(d) => {
                        let _ = writeln!(
                            out,
                            "{},{}",
                            fmt_sig(*g, sink.precision),
                            fmt_sig(*d, sink.precision)
                        );
                    }
                    None => {
                        let _ = writeln!(out, "{},", fmt_sig(*g, sink.precision));
                    }
                }
            }
            let _ = writeln!(out, "# threshold_gamma_s = {}", fmt_sig(threshold, sink.precision));
            out
        }
        OutputFormat::Json => {
            let rows_json: Vec<String> = rows
                .iter()
                .map(|(g, d)| {
                    let dtxt = d
                        .map(|v| fmt_sig(v, sink.precision))
                        .unwrap_or_else(|| "null".into());
                    format!("[{}, {}]", fmt_sig(*g, sink.precision), dtxt)
                })
                .collect();
            format!(
                "{{\n  \"header\": [\"gamma_s\", \"critical_d_over_z0\"],\n  \"rows\": [{}],\n  \"threshold_gamma_s\": {}\n}}\n",
                rows_json.join(", "),
                fmt_sig(threshold, sink.precision)
            )
        }
    };
    sink.emit(&content)
}

fn run_trap(s: &Scenario, setup: &PhysicalSetup, sink: &OutputSink) -> RunResult<()> {
    if let Some(w) = setup.perturbative_warning() {
        eprintln!("warning: {w}");
    }
    let report = analysis::trap_shift(s, setup).map_err(numerical)?;
    let p = sink.precision.max(12);
    let content = match sink.format {
        OutputFormat::Json => format!(
            "{{\n  \"curvature\": {},\n  \"omega_prime\": {},\n  \"delta_omega\": {}\n}}\n",
            fmt_sig(report.curvature, p),
            fmt_sig(report.omega_prime, p),
            fmt_sig(report.delta_omega, p)
        ),
        OutputFormat::Csv => format!(
            "curvature,omega_prime,delta_omega\n{},{},{}\n",
            fmt_sig(report.curvature, p),
            fmt_sig(report.omega_prime, p),
            fmt_sig(report.delta_omega, p)
        ),
    };
    sink.emit(&content)
}

fn run_regime(s: &Scenario, sink: &OutputSink) -> RunResult<()> {
    let regime = analysis::regime_classify(s).map_err(numerical)?;
    let name = match regime {
        Regime::Peak => "peak",
        Regime::Valley => "valley",
        Regime::Degenerate => "degenerate",
    };
    let content = match sink.format {
        OutputFormat::Json => format!("{{\"regime\": \"{name}\"}}\n"),
        OutputFormat::Csv => format!("regime\n{name}\n"),
    };
    sink.emit(&content)
}

fn run_minima(
    s: &Scenario,
    x_min: f64,
    x_max: f64,
    grid_n: usize,
    sink: &OutputSink,
) -> RunResult<()> {
    if x_min >= x_max {
        return config_err(format!(
            "minima range must satisfy x_min < x_max, got [{x_min}, {x_max}]"
        ));
    }
    let scan = analysis::find_minima_1d(s, x_min, x_max, grid_n).map_err(numerical)?;
    let kind_name = |k: analysis::ExtremumKind| match k {
        analysis::ExtremumKind::Minimum => "minimum",
        analysis::ExtremumKind::Maximum => "maximum",
        analysis::ExtremumKind::Saddle => "saddle",
        analysis::ExtremumKind::Degenerate => "degenerate",
    };
    let content = match sink.format {
        OutputFormat::Csv => {
            let mut out = String::from("location,value,curvature,kind,is_global\n");
            for m in &scan.minima {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt_sig(m.location, sink.precision),
                    fmt_sig(m.value, sink.precision),
                    fmt_sig(m.curvature, sink.precision),
                    kind_name(m.kind),
                    m.is_global
                );
            }
            out
        }
        OutputFormat::Json => {
            let items: Vec<String> = scan
                .minima
                .iter()
                .map(|m| {
                    format!(
                        "{{\"location\": {}, \"value\": {}, \"curvature\": {}, \"kind\": \"{}\", \"is_global\": {}}}",
                        fmt_sig(m.location, sink.precision),
                        fmt_sig(m.value, sink.precision),
                        fmt_sig(m.curvature, sink.precision),
                        kind_name(m.kind),
                        m.is_global
                    )
                })
                .collect();
            format!("{{\"minima\": [{}]}}\n", items.join(", "))
        }
    };
    sink.emit(&content)
}

fn json_table(
    header: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
    precision: usize,
    extra: &[(&str, String)],
) -> String {
    let header_json: Vec<String> = header.iter().map(|h| format!("\"{h}\"")).collect();
    let rows_json: Vec<String> = rows
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|v| fmt_sig(*v, precision)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    let mut out = format!(
        "{{\n  \"header\": [{}],\n  \"rows\": [\n    {}\n  ]",
        header_json.join(", "),
        rows_json.join(",\n    ")
    );
    for (k, v) in extra {
        let _ = write!(out, ",\n  \"{k}\": {v}");
    }
    out.push_str("\n}\n");
    out
}

// ---------------------------------------------------------------------------
// entry points

fn dispatch(cli: &Cli) -> RunResult<()> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| RunError::Config("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(config_path).map_err(|e| {
        RunError::Config(format!("cannot read {}: {e}", config_path.display()))
    })?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| RunError::Config(format!("{}: {e}", config_path.display())))?;
    let config_dir = config_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));

    // the subcommand must match the configured task
    let task_name = match cfg.task {
        TaskConfig::Eval { .. } => "eval",
        TaskConfig::Scan { .. } => "scan",
        TaskConfig::Map { .. } => "map",
        TaskConfig::Phase { .. } => "phase",
        TaskConfig::Trap { .. } => "trap",
        TaskConfig::Regime {} => "regime",
        TaskConfig::Minima { .. } => "minima",
    };
    if task_name != cli.command.name() {
        return config_err(format!(
            "config task kind \"{task_name}\" does not match subcommand \"{}\"",
            cli.command.name()
        ));
    }

    let default_format = match cli.command {
        Command::Trap | Command::Regime => OutputFormat::Json,
        _ => OutputFormat::Csv,
    };
    let sink = OutputSink::resolve(
        cfg.output.as_ref(),
        cli.format.as_ref(),
        cli.out.as_ref(),
        default_format,
    )?;

    match &cfg.task {
        TaskConfig::Phase {
            family,
            gamma_s_values,
            width_tol,
        } => {
            let tol = width_tol.unwrap_or(1e-4);
            if tol <= 0.0 || !tol.is_finite() {
                return config_err(format!("phase.width_tol must be positive, got {tol}"));
            }
            // phase tasks have no particle/orientation freedom; ignore the
            // scenario particle but still validate the profile-independent
            // parts of the config by building it
            let _ = build_quad(cfg.quad.as_ref(), cli.tol)?;
            run_phase(family, gamma_s_values, tol, &sink)
        }
        task => {
            let scenario = build_scenario(&cfg, &config_dir, cli.tol)?;
            match task {
                TaskConfig::Eval {
                    x0_over_z0,
                    y0_over_z0,
                    observable,
                } => run_eval(
                    &scenario,
                    *x0_over_z0,
                    y0_over_z0.unwrap_or(0.0),
                    observable.as_ref(),
                    &sink,
                ),
                TaskConfig::Scan {
                    x_min,
                    x_max,
                    samples,
                    y0_over_z0,
                } => run_scan(
                    &scenario,
                    *x_min,
                    *x_max,
                    *samples,
                    y0_over_z0.unwrap_or(0.0),
                    &sink,
                ),
                TaskConfig::Map {
                    x_min,
                    x_max,
                    nx,
                    y_min,
                    y_max,
                    ny,
                    pfa,
                } => run_map(
                    &scenario,
                    (*x_min, *x_max),
                    (*y_min, *y_max),
                    *nx,
                    *ny,
                    pfa.unwrap_or(false),
                    &sink,
                ),
                TaskConfig::Trap { setup } => run_trap(&scenario, &build_setup(setup), &sink),
                TaskConfig::Regime {} => run_regime(&scenario, &sink),
                TaskConfig::Minima {
                    x_min,
                    x_max,
                    grid_n,
                } => run_minima(&scenario, *x_min, *x_max, *grid_n, &sink),
                TaskConfig::Phase { .. } => unreachable!("handled above"),
            }
        }
    }
}

fn thread_count(cli_threads: Option<usize>) -> RunResult<Option<usize>> {
    if let Some(n) = cli_threads {
        return Ok(if n == 0 { None } else { Some(n) });
    }
    match std::env::var("LATERAL_VDW_THREADS") {
        Ok(v) => {
            let n: usize = v.parse().map_err(|_| {
                RunError::Config(format!(
                    "LATERAL_VDW_THREADS must be a non-negative integer, got \"{v}\""
                ))
            })?;
            Ok(if n == 0 { None } else { Some(n) })
        }
        Err(_) => Ok(None),
    }
}

/// Runs the CLI with the given arguments; the binary forwards
/// `std::env::args`. Point sweeps run inside a dedicated thread pool when a
/// thread count is requested; results are identical regardless.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap renders its own message; usage problems are config errors
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };

    let threads = match thread_count(cli.threads) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code());
        }
    };

    let outcome = match threads {
        Some(n) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("configuration error: cannot build thread pool: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            pool.install(|| dispatch(&cli))
        }
        None => dispatch(&cli),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
