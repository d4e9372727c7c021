//! The `damped-search` command line.
//!
//! Every subcommand writes exactly one CSV table (header row, comma separated,
//! LF line endings) to `--out` or stdout. Floats are printed with 17
//! significant digits in scientific notation so values survive a round trip.
//!
//! Exit codes: 0 on success, 1 when a computation or validation fails, 2 for
//! unusable arguments.

use std::fmt;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::blochmap::{trajectory, BlochState, SearchSpace};
use crate::cost::{cost_surface, ratio_curve, schedule_phi, DEFAULT_EPS};
use crate::error::Error;
use crate::fullsim::{simulate, FullState};
use crate::lindblad::{integrate, LindbladParams};
use crate::spectral::{critical_phi_closed, eigencurve};

/// Largest fullsim/map deviation `validate` accepts.
pub const VALIDATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "damped-search",
    version,
    about = "Damped Grover search datasets as CSV"
)]
pub struct RunConfig {
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for target placement in `validate`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Eigenvalues of the damped map along a grid of damping angles.
    Eigencurve {
        #[command(flatten)]
        space: SpaceArgs,
        /// Damping grid `min:max:points`.
        #[arg(long)]
        grid: GridSpec,
    },
    /// Expected oracle calls at fixed damping over (n, phi).
    CostSurface {
        /// Comma-separated item counts.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        m: u64,
        #[arg(long)]
        grid: GridSpec,
    },
    /// Reduced state after each damped iteration.
    Trajectory {
        #[command(flatten)]
        space: SpaceArgs,
        /// A number, `critical`, `critical-m1` or `schedule`.
        #[arg(long)]
        phi: PhiArg,
        /// Number of iterations.
        #[arg(long)]
        steps: usize,
    },
    /// Scheduled damping cost against the undamped search with known m.
    Ratio {
        /// Number of items.
        #[arg(long)]
        n: u64,
        /// Comma-separated target counts.
        #[arg(long, value_delimiter = ',', required = true)]
        m_list: Vec<u64>,
        /// Stop once the unflipped probability falls below this.
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// State-vector simulation checked against the reduced map.
    Validate {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        phi: PhiArg,
        /// Number of iterations.
        #[arg(long)]
        steps: usize,
    },
    /// Continuous-time damped evolution from the uniform superposition.
    Lindblad {
        #[command(flatten)]
        space: SpaceArgs,
        /// Damping rate.
        #[arg(long)]
        c: f64,
        /// Total evolution time.
        #[arg(long)]
        time: f64,
        /// Integrator step, also the sampling interval.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SpaceArgs {
    /// Number of items.
    #[arg(long)]
    pub n: u64,
    /// Number of targets.
    #[arg(long)]
    pub m: u64,
}

impl SpaceArgs {
    fn space(&self) -> Result<SearchSpace, CliError> {
        Ok(SearchSpace::new(self.n, self.m)?)
    }
}

/// Inclusive, evenly spaced grid written `min:max:points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.max
                } else {
                    self.min + step * k as f64
                }
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, points] = parts[..] else {
            return Err(format!("expected min:max:points, got {s:?}"));
        };
        let min: f64 = min.trim().parse().map_err(|e| format!("grid min: {e}"))?;
        let max: f64 = max.trim().parse().map_err(|e| format!("grid max: {e}"))?;
        let points: usize = points
            .trim()
            .parse()
            .map_err(|e| format!("grid points: {e}"))?;
        if !min.is_finite() || !max.is_finite() {
            return Err("grid bounds must be finite".into());
        }
        if min >= max {
            return Err(format!("grid needs min < max, got {min} >= {max}"));
        }
        if points < 2 {
            return Err(format!("grid needs at least 2 points, got {points}"));
        }
        Ok(GridSpec { min, max, points })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiArg {
    Value(f64),
    /// Critical damping for the actual target count.
    Critical,
    /// Critical damping assuming a single target.
    CriticalM1,
    /// The decreasing schedule `φ_k`, one angle per iteration.
    Schedule,
}

impl FromStr for PhiArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "critical" => Ok(PhiArg::Critical),
            "critical-m1" => Ok(PhiArg::CriticalM1),
            "schedule" => Ok(PhiArg::Schedule),
            _ => {
                let v: f64 = s.parse().map_err(|_| {
                    format!("phi must be a number, critical, critical-m1 or schedule, got {s:?}")
                })?;
                if v.is_finite() {
                    Ok(PhiArg::Value(v))
                } else {
                    Err(format!("phi must be finite, got {v}"))
                }
            }
        }
    }
}

impl PhiArg {
    /// Damping angles for `steps` iterations: one entry for a constant angle.
    pub fn resolve(&self, space: &SearchSpace, steps: usize) -> crate::Result<Vec<f64>> {
        match *self {
            PhiArg::Value(v) => Ok(vec![v]),
            PhiArg::Critical => Ok(vec![critical_phi_closed(space.theta())?]),
            PhiArg::CriticalM1 => Ok(vec![critical_phi_closed(
                SearchSpace::new(space.n(), 1)?.theta(),
            )?]),
            PhiArg::Schedule => {
                if steps == 0 {
                    Ok(vec![schedule_phi(1)?])
                } else {
                    (1..=steps as u64).map(schedule_phi).collect()
                }
            }
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Arguments parsed but are unusable (exit 2).
    Usage(String),
    /// A computation or check failed (exit 1).
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Failure(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateSpace { .. } | Error::PhiOutOfRange(_) | Error::InvalidArgument(_) => {
                CliError::Usage(e.to_string())
            }
            Error::NoBracket { .. } | Error::NotConverged(_) | Error::Invariant(_) => {
                CliError::Failure(e.to_string())
            }
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failure(format!("csv: {e}"))
    }
}

/// A CSV table held as strings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// A column parsed as floats.
    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        self.rows.iter().map(|r| r.get(i)?.parse().ok()).collect()
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Parses a CSV produced by this tool. Rows whose width differs from the
/// header are rejected.
pub fn read_table<R: Read>(input: R) -> Result<Table, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(input);
    let header = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()?;
    Ok(Table { header, rows })
}

/// Float format used for every CSV cell: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn bloch_row(iter: usize, s: &BlochState) -> Vec<String> {
    vec![iter.to_string(), fmt_f64(s.x), fmt_f64(s.z), fmt_f64(s.t)]
}

/// Computes the table for a parsed configuration without writing it.
pub fn build_table(config: &RunConfig) -> Result<Table, CliError> {
    match &config.command {
        Command::Eigencurve { space, grid } => {
            let theta = space.space()?.theta();
            let mut table = Table::new(&["phi", "re1", "im1", "re2", "im2", "re3", "im3"]);
            for row in eigencurve(theta, &grid.values())? {
                let mut cells = vec![fmt_f64(row.phi)];
                for l in row.values {
                    cells.push(fmt_f64(l.re));
                    cells.push(fmt_f64(l.im));
                }
                table.push(cells);
            }
            Ok(table)
        }
        Command::CostSurface { n_list, m, grid } => {
            let mut table = Table::new(&["n", "phi", "expected_calls", "best_r"]);
            for row in cost_surface(n_list, &grid.values(), *m)? {
                table.push(vec![
                    row.n.to_string(),
                    fmt_f64(row.phi),
                    fmt_f64(row.expected_calls),
                    row.best_r.to_string(),
                ]);
            }
            Ok(table)
        }
        Command::Trajectory { space, phi, steps } => {
            let space = space.space()?;
            let phis = phi.resolve(&space, *steps)?;
            let mut table = Table::new(&["iter", "x", "z", "t"]);
            for (k, s) in trajectory(&space, phis.as_slice(), *steps)?
                .iter()
                .enumerate()
            {
                table.push(bloch_row(k, s));
            }
            Ok(table)
        }
        Command::Ratio { n, m_list, eps } => {
            let mut table = Table::new(&["m", "scheduled", "baseline", "ratio"]);
            for row in ratio_curve(*n, m_list, *eps)? {
                table.push(vec![
                    row.m.to_string(),
                    fmt_f64(row.scheduled),
                    fmt_f64(row.baseline),
                    fmt_f64(row.ratio),
                ]);
            }
            Ok(table)
        }
        Command::Validate {
            space: args,
            phi,
            steps,
        } => {
            let space = args.space()?;
            let phis = phi.resolve(&space, *steps)?;
            let n = usize::try_from(args.n)
                .map_err(|_| CliError::Usage(format!("n = {} is too large", args.n)))?;
            let mut state = FullState::initial_random(n, args.m as usize, config.seed)?;
            let reduced = trajectory(&space, phis.as_slice(), *steps)?;

            // replay so the y component can be read at every step
            let mut ys = vec![state.y_component()];
            let mut full = vec![state.reduced_bloch()?];
            for k in 0..*steps {
                let step_phi = if phis.len() == 1 { phis[0] } else { phis[k] };
                let (traj, _) = simulate(&mut state, &[step_phi], 1)?;
                full.push(traj[1]);
                ys.push(state.y_component());
            }

            let mut table = Table::new(&[
                "iter",
                "x_full",
                "z_full",
                "t_full",
                "x_map",
                "z_map",
                "t_map",
                "y_full",
                "deviation",
            ]);
            for (k, ((f, r), y)) in full.iter().zip(&reduced).zip(&ys).enumerate() {
                let dev = f.max_abs_diff(r).max(y.abs());
                table.push(vec![
                    k.to_string(),
                    fmt_f64(f.x),
                    fmt_f64(f.z),
                    fmt_f64(f.t),
                    fmt_f64(r.x),
                    fmt_f64(r.z),
                    fmt_f64(r.t),
                    fmt_f64(*y),
                    fmt_f64(dev),
                ]);
            }
            Ok(table)
        }
        Command::Lindblad { space, c, time, dt } => {
            let space = space.space()?;
            let samples = integrate(
                &BlochState::initial(&space),
                &LindbladParams::new(*c)?,
                *time,
                *dt,
            )?;
            let mut table = Table::new(&["time", "x", "z", "t"]);
            for s in samples {
                table.push(vec![
                    fmt_f64(s.time),
                    fmt_f64(s.state.x),
                    fmt_f64(s.state.z),
                    fmt_f64(s.state.t),
                ]);
            }
            Ok(table)
        }
    }
}

/// Post-write check: a `validate` table whose deviation column exceeds
/// [`VALIDATE_TOL`] is a failure.
pub fn check_table(config: &RunConfig, table: &Table) -> Result<(), CliError> {
    if !matches!(config.command, Command::Validate { .. }) {
        return Ok(());
    }
    let devs = table
        .column_f64("deviation")
        .ok_or_else(|| CliError::Failure("validate table lacks a deviation column".into()))?;
    let worst = devs.iter().copied().fold(
        0.0,
        |a: f64, d| if d.is_nan() { f64::NAN } else { a.max(d) },
    );
    if worst.is_nan() || worst > VALIDATE_TOL {
        return Err(CliError::Failure(format!(
            "invariant violated: fullsim/blochmap agreement, max deviation {worst:e} exceeds {VALIDATE_TOL:e}"
        )));
    }
    Ok(())
}

fn write_table(config: &RunConfig, table: &Table) -> Result<(), CliError> {
    match &config.out {
        Some(path) => table.write_to(io::BufWriter::new(File::create(path)?)),
        None => table.write_to(io::stdout().lock()),
    }
}

/// Runs one configuration, writing its CSV. A failed `validate` still writes
/// its table before reporting.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let table = build_table(config)?;
    write_table(config, &table)?;
    check_table(config, &table)
}

/// Parses `args` (program name first), runs, prints diagnostics to stderr and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
