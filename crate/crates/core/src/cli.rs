//! Command-line front end.
//!
//! Settings come from, in increasing priority: built-in per-command
//! defaults, an optional TOML file (`--config`), and flags.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid arguments or
//! configuration, 3 runtime failure (I/O or numerics).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{
    symmetric_bound_nonlinear, theta_to_g, ultimate_bound, FisherInfo, HbarUnits, PotentialSpec, SensitivityReport,
    SCHEMA_VERSION,
};
use crate::error::Error;
use crate::farfield::QuadratureGrid;
use crate::figures::{fig1, fig2, fig3, JosephsonSweep, SigmaSweep, SweepMode, FIG1_REFERENCE};
use crate::verify::{verify, Scope};

pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_INVALID_CONFIG: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "multipath",
    version,
    about = "Phase-estimation sensitivities of a multi-path lattice interferometer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Ultimate bound 1/(M^j − 1)² against the number of sites.
    Fig1,
    /// Two-well fit sensitivity against phase squeezing.
    Fig2,
    /// Normalized fit sensitivity for several lattice sizes.
    Fig3,
    /// Evaluate a single closed-form bound (JSON).
    Bound,
    /// Run oracle suites; exits 1 if any check fails.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every subcommand. Every field mirrors a key of the
/// config file.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// Particle number (total mean atom number for fig3).
    #[arg(long = "N", global = true)]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub particles: Option<f64>,
    /// Number of sites; repeat for a list.
    #[arg(long = "M", global = true)]
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub sites: Option<Vec<usize>>,
    /// Potential exponent; repeat for a list.
    #[arg(long = "j", global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<f64>>,
    /// Independent repetitions.
    #[arg(long = "m", global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Entanglement function f(N) for the symmetric-state bound.
    #[arg(long = "fN", global = true)]
    #[serde(rename = "fN", skip_serializing_if = "Option::is_none")]
    pub f_n: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_min: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_max: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_steps: Option<usize>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ej_min: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ej_max: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ej_steps: Option<usize>,
    #[arg(long = "grid-1d", global = true)]
    #[serde(rename = "grid-1d", skip_serializing_if = "Option::is_none")]
    pub grid_1d: Option<usize>,
    #[arg(long = "grid-2d", global = true)]
    #[serde(rename = "grid-2d", skip_serializing_if = "Option::is_none")]
    pub grid_2d: Option<usize>,
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<SweepMode>,
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hbar: Option<HbarUnits>,
    /// Lattice spacing, for converting Δ²θ into Δ²g.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    /// Interaction time, for converting Δ²θ into Δ²g.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Verification suite; repeat for several.
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scope: Option<Vec<Scope>>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// TOML file with any of the keys above.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Print the effective settings and exit.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub show_config: bool,
}

impl Options {
    /// Fields set here win over those in `base`.
    fn over(self, base: Options) -> Options {
        Options {
            particles: self.particles.or(base.particles),
            sites: self.sites.or(base.sites),
            j: self.j.or(base.j),
            m: self.m.or(base.m),
            f_n: self.f_n.or(base.f_n),
            sigma_min: self.sigma_min.or(base.sigma_min),
            sigma_max: self.sigma_max.or(base.sigma_max),
            sigma_steps: self.sigma_steps.or(base.sigma_steps),
            ej_min: self.ej_min.or(base.ej_min),
            ej_max: self.ej_max.or(base.ej_max),
            ej_steps: self.ej_steps.or(base.ej_steps),
            grid_1d: self.grid_1d.or(base.grid_1d),
            grid_2d: self.grid_2d.or(base.grid_2d),
            mode: self.mode.or(base.mode),
            format: self.format.or(base.format),
            hbar: self.hbar.or(base.hbar),
            x0: self.x0.or(base.x0),
            t: self.t.or(base.t),
            scope: self.scope.or(base.scope),
            out: self.out.or(base.out),
            config: self.config.or(base.config),
            show_config: self.show_config || base.show_config,
        }
    }
}

/// Built-in settings for `command`.
pub fn defaults(command: Command) -> Options {
    let sigma = SigmaSweep::default();
    let ej = JosephsonSweep::default();
    let grid = QuadratureGrid::default();
    let mut o = Options {
        m: Some(1),
        hbar: Some(HbarUnits::Natural),
        grid_1d: Some(grid.nodes_1d),
        grid_2d: Some(grid.nodes_2d),
        ..Options::default()
    };
    match command {
        Command::Fig1 => {
            o.j = Some(vec![-2.0, -1.0, 1.0, 2.0]);
            o.sites = Some((2..=30).collect());
            o.format = Some(OutputFormat::Csv);
        }
        Command::Fig2 => {
            o.particles = Some(200.0);
            o.sites = Some(vec![2]);
            o.sigma_min = Some(sigma.min);
            o.sigma_max = Some(sigma.max);
            o.sigma_steps = Some(sigma.steps);
            o.ej_min = Some(ej.min);
            o.ej_max = Some(ej.max);
            o.ej_steps = Some(ej.steps);
            o.format = Some(OutputFormat::Csv);
        }
        Command::Fig3 => {
            o.particles = Some(5e4);
            o.sites = Some(vec![2, 4, 6, 8, 10, 12]);
            o.sigma_min = Some(sigma.min);
            o.sigma_max = Some(sigma.max);
            o.sigma_steps = Some(sigma.steps);
            o.mode = Some(SweepMode::FixedTotal);
            o.format = Some(OutputFormat::Csv);
        }
        Command::Bound => {
            o.particles = Some(1.0);
            o.sites = Some(vec![2]);
            o.j = Some(vec![1.0]);
            o.format = Some(OutputFormat::Json);
        }
        Command::Verify => {
            o.scope = Some(Scope::ALL.to_vec());
            o.format = Some(OutputFormat::Json);
        }
    }
    o
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Runtime(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument { .. } | Error::BasisTooLarge { .. } | Error::DegeneratePotential => {
                Failure::Config(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli, &mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID_CONFIG)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn load_config(path: &Path) -> Result<Options, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// Flags, then the config file, then per-command defaults.
pub fn resolve(command: Command, flags: Options) -> Result<Options, String> {
    let file = match &flags.config {
        Some(path) => match load_config(path) {
            Ok(o) => o,
            Err(Failure::Config(msg)) => return Err(msg),
            Err(_) => unreachable!("load_config only fails with Config"),
        },
        None => Options::default(),
    };
    Ok(flags.over(file).over(defaults(command)))
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let command = cli.command;
    let options = resolve(command, cli.options).map_err(Failure::Config)?;
    grid(&options)?;
    if options.show_config {
        let text = toml::to_string(&options).map_err(|e| Failure::Runtime(e.to_string()))?;
        stdout.write_all(text.as_bytes())?;
        return Ok(());
    }
    let body = match command {
        Command::Fig1 => run_fig1(&options)?,
        Command::Fig2 => run_fig2(&options)?,
        Command::Fig3 => run_fig3(&options)?,
        Command::Bound => run_bound(&options)?,
        Command::Verify => {
            let scopes = options.scope.clone().unwrap_or_default();
            let report = verify(&scopes, &grid(&options)?)?;
            let text = json(&report)?;
            emit(&options, stdout, &text)?;
            if !report.passed {
                return Err(Failure::Verification);
            }
            return Ok(());
        }
    };
    emit(&options, stdout, &body)
}

fn emit(options: &Options, stdout: &mut dyn Write, text: &str) -> Result<(), Failure> {
    match &options.out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn required<T: Clone>(value: &Option<T>, name: &str) -> Result<T, Failure> {
    value
        .clone()
        .ok_or_else(|| Failure::Config(format!("missing setting `{name}`")))
}

fn grid(o: &Options) -> Result<QuadratureGrid, Failure> {
    Ok(QuadratureGrid::new(
        required(&o.grid_1d, "grid-1d")?,
        required(&o.grid_2d, "grid-2d")?,
    )?)
}

fn sigma(o: &Options) -> Result<SigmaSweep, Failure> {
    Ok(SigmaSweep {
        min: required(&o.sigma_min, "sigma-min")?,
        max: required(&o.sigma_max, "sigma-max")?,
        steps: required(&o.sigma_steps, "sigma-steps")?,
    })
}

fn whole_particles(o: &Options) -> Result<u32, Failure> {
    let n = required(&o.particles, "N")?;
    if !(n >= 1.0 && n.fract() == 0.0 && n <= f64::from(u32::MAX)) {
        return Err(Failure::Config(format!("`N` must be a positive integer, got {n}")));
    }
    Ok(n as u32)
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// One CSV field.
pub enum Cell<'a> {
    Int(u64),
    Float(f64),
    Text(&'a str),
}

fn render(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => format!("{v:.16e}"),
        Cell::Text(s) => (*s).to_owned(),
    }
}

/// CSV with a `# schema_version` comment line, a header row and LF endings.
pub fn csv_table(header: &[&str], rows: &[Vec<Cell>]) -> Result<String, Error> {
    let mut out = format!("# schema_version={SCHEMA_VERSION}\n").into_bytes();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        let io_err = |e: csv::Error| Error::invalid("csv", e.to_string());
        w.write_record(header).map_err(io_err)?;
        for row in rows {
            w.write_record(row.iter().map(render)).map_err(io_err)?;
        }
        w.flush().map_err(|e| Error::invalid("csv", e.to_string()))?;
    }
    Ok(String::from_utf8(out).expect("csv output is UTF-8"))
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    schema_version: u32,
    command: Command,
    #[serde(flatten)]
    body: &'a T,
}

fn document<T: Serialize>(command: Command, body: &T) -> Result<String, Failure> {
    json(&Document {
        schema_version: SCHEMA_VERSION,
        command,
        body,
    })
}

fn run_fig1(o: &Options) -> Result<String, Failure> {
    let rows = fig1(&required(&o.j, "j")?, &required(&o.sites, "M")?)?;
    match o.format.unwrap_or_default() {
        OutputFormat::Csv => {
            let cells: Vec<Vec<Cell>> = rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::Int(r.sites as u64),
                        Cell::Float(r.exponent),
                        Cell::Float(r.delta2_theta),
                        Cell::Float(FIG1_REFERENCE),
                    ]
                })
                .collect();
            Ok(csv_table(&["M", "j", "delta2_theta", "reference"], &cells)?)
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                reference: f64,
                rows: &'a [crate::figures::Fig1Row],
            }
            document(
                Command::Fig1,
                &Body {
                    reference: FIG1_REFERENCE,
                    rows: &rows,
                },
            )
        }
    }
}

fn run_fig2(o: &Options) -> Result<String, Failure> {
    if o.sites.as_deref().is_some_and(|s| s != [2]) {
        return Err(Failure::Config("fig2 is a two-site figure; `M` must be 2".into()));
    }
    let ej = JosephsonSweep {
        min: required(&o.ej_min, "ej-min")?,
        max: required(&o.ej_max, "ej-max")?,
        steps: required(&o.ej_steps, "ej-steps")?,
    };
    let data = fig2(whole_particles(o)?, &ej, &sigma(o)?, &grid(o)?)?;
    match o.format.unwrap_or_default() {
        OutputFormat::Csv => {
            let cells: Vec<Vec<Cell>> = data
                .rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::Text(r.curve.as_str()),
                        Cell::Float(r.parameter),
                        Cell::Float(r.xi2),
                        Cell::Float(r.visibility),
                        Cell::Float(r.var_n),
                        Cell::Float(r.normalized),
                        Cell::Float(r.qfi_line),
                        Cell::Float(1.0),
                    ]
                })
                .collect();
            Ok(csv_table(
                &[
                    "curve",
                    "parameter",
                    "xi2",
                    "visibility",
                    "var_n",
                    "normalized",
                    "qfi_line",
                    "snl",
                ],
                &cells,
            )?)
        }
        OutputFormat::Json => document(Command::Fig2, &data),
    }
}

fn run_fig3(o: &Options) -> Result<String, Failure> {
    let data = fig3(
        required(&o.particles, "N")?,
        &required(&o.sites, "M")?,
        &sigma(o)?,
        required(&o.mode, "mode")?,
        &grid(o)?,
    )?;
    match o.format.unwrap_or_default() {
        OutputFormat::Csv => {
            let cells: Vec<Vec<Cell>> = data
                .rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::Int(r.sites as u64),
                        Cell::Float(r.sigma_ratio),
                        Cell::Float(r.sigma),
                        Cell::Float(r.mean_site),
                        Cell::Float(r.total_atoms),
                        Cell::Float(r.xi2),
                        Cell::Float(r.coherence),
                        Cell::Float(r.f1),
                        Cell::Float(r.c),
                        Cell::Float(r.variance_theta),
                        Cell::Float(r.normalized),
                    ]
                })
                .collect();
            Ok(csv_table(
                &[
                    "M",
                    "sigma_ratio",
                    "sigma",
                    "mean_site",
                    "total_atoms",
                    "xi2",
                    "coherence",
                    "f1",
                    "c",
                    "variance_theta",
                    "normalized",
                ],
                &cells,
            )?)
        }
        OutputFormat::Json => document(Command::Fig3, &data),
    }
}

fn single<T: Copy>(list: &Option<Vec<T>>, name: &str) -> Result<T, Failure> {
    match list.as_deref() {
        Some([x]) => Ok(*x),
        _ => Err(Failure::Config(format!(
            "`{name}` takes exactly one value for this command"
        ))),
    }
}

fn run_bound(o: &Options) -> Result<String, Failure> {
    let particles = whole_particles(o)?;
    let sites = single(&o.sites, "M")?;
    let j = single(&o.j, "j")?;
    let m = required(&o.m, "m")?;
    let mut report = match o.f_n {
        Some(f_n) => SensitivityReport::new(
            symmetric_bound_nonlinear(sites, j, f_n, m)?,
            FisherInfo::Quantum {
                fisher: f_n * symmetric_fisher_factor(sites, j)?,
            },
            m,
            "symmetric_bound_nonlinear",
        ),
        None => {
            let value = ultimate_bound(particles, sites, j, m)?;
            SensitivityReport::new(
                value,
                FisherInfo::Quantum {
                    fisher: 1.0 / (value * f64::from(m)),
                },
                m,
                "ultimate_bound",
            )
        }
    };
    if let (Some(x0), Some(t)) = (o.x0, o.t) {
        let spec = PotentialSpec::new(j, 1.0, x0, t)?;
        report.variance_g = Some(theta_to_g(
            report.variance_theta,
            &spec,
            o.hbar.unwrap_or_default().value(),
        )?);
    }
    json(&report)
}

/// `F_Q/f(N)` for a symmetric state.
fn symmetric_fisher_factor(sites: usize, j: f64) -> Result<f64, Error> {
    Ok(1.0 / symmetric_bound_nonlinear(sites, j, 1.0, 1)?)
}
