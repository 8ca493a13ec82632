//! Command-line front end.
//!
//! Every command writes one CSV table (to `--out` or stdout) whose first
//! line is a `# params:` comment. Values come from flags, then from the
//! `--config` file, then from built-in defaults.
//!
//! Exit codes: 0 success, 2 invalid parameters, 3 infeasible
//! optimization, 4 numeric failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use crate::detection::{detection_at, min_detection};
use crate::discrepancy::build_report;
use crate::error::Error;
use crate::figures::{figure, FigureConfig, FIGURES};
use crate::model::{defaults, rho_from_db, AntennaConfig, ConstraintSet, KeyValues, RateParams, SystemParams};
use crate::montecarlo::default_workers;
use crate::optimize::{optimize_multi_traced, optimize_single, symmetric_covert_power, MultiSearch, Optimum};
use crate::table::{Cell, Table};
use crate::throughput::{mc_throughput, throughput, Scenario};
use crate::validation::{checks_table, run_campaign, Campaign};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Keys accepted in a `--config` file.
pub const CONFIG_KEYS: [&str; 25] = [
    "seed",
    "workers",
    "sigma_n_dbm",
    "rho",
    "rho_db",
    "epsilon",
    "delta",
    "p_max",
    "ps",
    "pr",
    "t",
    "tau",
    "n_t",
    "n_r",
    "n_s",
    "n_rr",
    "n_rt",
    "n_d",
    "samples",
    "h1",
    "h2",
    "h3",
    "phi",
    "v_max",
    "which",
];

#[derive(Parser, Debug)]
#[command(
    name = "covert-relay",
    version,
    about = "Covert throughput of a two-hop relay under a noise-uncertain warden"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// Monte-Carlo seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte-Carlo shards; results depend on this count.
    #[arg(long, global = true)]
    pub workers: Option<u32>,
    /// `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output CSV path (default stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Nominal noise power in dBm.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub sigma_n_dbm: Option<f64>,
    /// Noise uncertainty as a ratio (> 1).
    #[arg(long, global = true, conflicts_with = "rho_db")]
    pub rho: Option<f64>,
    /// Noise uncertainty in dB, converted by 10^(dB/10).
    #[arg(long, global = true)]
    pub rho_db: Option<f64>,
    /// Covertness budget: xi* >= 1 - epsilon.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Reliability budget: outage <= delta.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Per-node power limit in watts.
    #[arg(long, global = true)]
    pub p_max: Option<f64>,
}

#[derive(Args, Debug, Default, Clone, Copy)]
pub struct AntennaArgs {
    /// Transmit antennas at source and relay.
    #[arg(long)]
    pub n_t: Option<u32>,
    /// Receive antennas at relay and destination.
    #[arg(long)]
    pub n_r: Option<u32>,
    /// Source antennas (overrides --n-t).
    #[arg(long)]
    pub n_s: Option<u32>,
    /// Relay receive antennas (overrides --n-r).
    #[arg(long)]
    pub n_rr: Option<u32>,
    /// Relay transmit antennas (overrides --n-t).
    #[arg(long)]
    pub n_rt: Option<u32>,
    /// Destination antennas (overrides --n-r).
    #[arg(long)]
    pub n_d: Option<u32>,
}

#[derive(Args, Debug, Default, Clone, Copy)]
pub struct PowerArgs {
    /// Source power in watts.
    #[arg(long)]
    pub ps: Option<f64>,
    /// Relay power in watts.
    #[arg(long)]
    pub pr: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Optimal threshold, per-slot and two-hop minimum DEP.
    Dep {
        #[command(flatten)]
        power: PowerArgs,
        /// Evaluate at this threshold instead of the optimal one.
        #[arg(long)]
        tau: Option<f64>,
    },
    /// One-dimensional sweep of DEP, outage and throughput.
    Sweep(SweepArgs),
    /// Outage and throughput at one operating point.
    Throughput {
        #[command(flatten)]
        power: PowerArgs,
        #[command(flatten)]
        antennas: AntennaArgs,
        /// Target rate in bit/s/Hz.
        #[arg(long)]
        t: Option<f64>,
        /// Add a Monte-Carlo estimate with this many trials.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Single-antenna throughput maximization.
    OptimizeSingle,
    /// Multi-antenna throughput maximization by grid search.
    OptimizeMulti {
        #[command(flatten)]
        antennas: AntennaArgs,
        /// Source power step in watts.
        #[arg(long)]
        h1: Option<f64>,
        /// Relay power step in watts.
        #[arg(long)]
        h2: Option<f64>,
        /// Rate step.
        #[arg(long)]
        h3: Option<f64>,
        /// Rate-loop stopping distance.
        #[arg(long)]
        phi: Option<f64>,
        /// Evaluation budget.
        #[arg(long)]
        v_max: Option<u64>,
    },
    /// Monte-Carlo validation campaign and printed-formula discrepancy report.
    Validate {
        /// Trials per check.
        #[arg(long)]
        samples: Option<u64>,
        /// Directory for discrepancies.csv.
        #[arg(long, default_value = ".")]
        report_dir: PathBuf,
    },
    /// Figure data as fig<N>.csv files.
    Figures {
        /// Figure number 3-8, or `all`.
        #[arg(long)]
        which: Option<String>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
    },
}

/// Swept variable.
#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
pub enum SweepVar {
    /// Equal power of both hops.
    P,
    #[value(name = "p_s")]
    PS,
    #[value(name = "p_r")]
    PR,
    Rho,
    /// Nominal noise in dBm.
    SigmaN2Dbm,
    T,
    /// Covertness budget; both hops transmit at the boundary power.
    Epsilon,
    /// Transmit antennas at source and relay.
    #[value(name = "n_t")]
    NT,
    /// Receive antennas at relay and destination.
    #[value(name = "n_r")]
    NR,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::P => "p",
            SweepVar::PS => "p_s",
            SweepVar::PR => "p_r",
            SweepVar::Rho => "rho",
            SweepVar::SigmaN2Dbm => "sigma_n2_dbm",
            SweepVar::T => "t",
            SweepVar::Epsilon => "epsilon",
            SweepVar::NT => "n_t",
            SweepVar::NR => "n_r",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, SweepVar::NT | SweepVar::NR)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepScale {
    #[default]
    Linear,
    Log,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Variable to sweep.
    #[arg(long = "var", value_enum)]
    pub variable: SweepVar,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = SweepScale::Linear)]
    pub scale: SweepScale,
    #[command(flatten)]
    pub power: PowerArgs,
    #[command(flatten)]
    pub antennas: AntennaArgs,
    /// Target rate in bit/s/Hz.
    #[arg(long)]
    pub t: Option<f64>,
}

/// A validated sweep axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub scale: SweepScale,
}

impl SweepSpec {
    pub fn new(variable: SweepVar, from: f64, to: f64, steps: usize, scale: SweepScale) -> Result<Self, Error> {
        if !(from.is_finite() && to.is_finite() && from < to) {
            return Err(Error::Domain(format!("--from must be below --to, got {from} and {to}")));
        }
        if steps < 2 {
            return Err(Error::Domain(format!("--steps must be at least 2, got {steps}")));
        }
        if scale == SweepScale::Log && from <= 0.0 {
            return Err(Error::Domain(format!("--scale log needs --from > 0, got {from}")));
        }
        if variable.is_integer() && (from < 1.0 || from.fract() != 0.0 || to.fract() != 0.0) {
            return Err(Error::Domain(format!(
                "--var {} needs integer bounds >= 1, got {from} and {to}",
                variable.name()
            )));
        }
        Ok(Self {
            variable,
            from,
            to,
            steps,
            scale,
        })
    }

    /// Axis values; integer variables are rounded and deduplicated.
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        let mut v: Vec<f64> = (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                match self.scale {
                    SweepScale::Linear => self.from + (self.to - self.from) * f,
                    SweepScale::Log => (self.from.ln() + (self.to.ln() - self.from.ln()) * f).exp(),
                }
            })
            .collect();
        if self.variable.is_integer() {
            v.iter_mut().for_each(|x| *x = x.round());
            v.dedup();
        }
        v
    }
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::Domain(_)) => EXIT_INVALID,
            CliError::Lib(Error::Infeasible(_)) => EXIT_INFEASIBLE,
            CliError::Lib(Error::Numeric(_)) => EXIT_NUMERIC,
            CliError::Io(_) => EXIT_INVALID,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Flag values merged with the config file and defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub seed: u64,
    pub workers: u32,
    pub sigma_n_dbm: f64,
    pub rho: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub p_max: f64,
    file: KeyValues,
}

impl Resolved {
    pub fn new(global: &GlobalArgs) -> CliResult<Self> {
        let file = match &global.config {
            Some(path) => {
                let text =
                    fs::read_to_string(path).map_err(|e| CliError::Io(format!("--config {}: {e}", path.display())))?;
                let kv = KeyValues::parse(&text)?;
                if let Some(bad) = kv.keys().find(|k| !CONFIG_KEYS.contains(k)) {
                    return Err(Error::Domain(format!("--config {}: unknown key `{bad}`", path.display())).into());
                }
                kv
            }
            None => KeyValues::default(),
        };
        let rho = match (global.rho, global.rho_db) {
            (Some(r), _) => r,
            (None, Some(db)) => rho_from_db(db)?,
            (None, None) => match (file.get_f64("rho")?, file.get_f64("rho_db")?) {
                (Some(_), Some(_)) => {
                    return Err(Error::Domain("config sets both `rho` and `rho_db`".into()).into());
                }
                (Some(r), None) => r,
                (None, Some(db)) => rho_from_db(db)?,
                (None, None) => defaults::RHO,
            },
        };
        let workers = match global.workers {
            Some(w) => w,
            None => match file.get_u64("workers")? {
                Some(w) => u32::try_from(w).map_err(|_| Error::Domain(format!("--workers {w} is too large")))?,
                None => default_workers(),
            },
        };
        if workers == 0 {
            return Err(Error::Domain("--workers must be at least 1".into()).into());
        }
        let r = Self {
            seed: pick_u64(global.seed, &file, "seed")?.unwrap_or(defaults::SEED),
            workers,
            sigma_n_dbm: pick(global.sigma_n_dbm, &file, "sigma_n_dbm")?.unwrap_or(defaults::SIGMA_N_DBM),
            rho,
            epsilon: pick(global.epsilon, &file, "epsilon")?.unwrap_or(defaults::EPSILON),
            delta: pick(global.delta, &file, "delta")?.unwrap_or(defaults::DELTA),
            p_max: pick(global.p_max, &file, "p_max")?.unwrap_or(defaults::P_MAX),
            file,
        };
        Ok(r)
    }

    pub fn f64(&self, flag: Option<f64>, key: &str, default: f64) -> CliResult<f64> {
        Ok(pick(flag, &self.file, key)?.unwrap_or(default))
    }

    pub fn opt_f64(&self, flag: Option<f64>, key: &str) -> CliResult<Option<f64>> {
        pick(flag, &self.file, key)
    }

    pub fn u64(&self, flag: Option<u64>, key: &str, default: u64) -> CliResult<u64> {
        Ok(pick_u64(flag, &self.file, key)?.unwrap_or(default))
    }

    pub fn u32(&self, flag: Option<u32>, key: &str, default: u32) -> CliResult<u32> {
        let v = self.u64(flag.map(u64::from), key, u64::from(default))?;
        u32::try_from(v).map_err(|_| Error::Domain(format!("--{} {v} is too large", key.replace('_', "-"))).into())
    }

    pub fn text(&self, flag: Option<&str>, key: &str) -> Option<String> {
        flag.map(str::to_owned)
            .or_else(|| self.file.get(key).map(str::to_owned))
    }

    pub fn constraints(&self) -> CliResult<ConstraintSet> {
        Ok(ConstraintSet::new(self.epsilon, self.delta, self.p_max)?)
    }

    pub fn params(&self, p_s: f64, p_r: f64, antennas: AntennaConfig) -> CliResult<SystemParams> {
        Ok(SystemParams::from_dbm(p_s, p_r, self.sigma_n_dbm, self.rho, antennas)?)
    }

    pub fn antennas(&self, a: &AntennaArgs) -> CliResult<AntennaConfig> {
        let n_t = self.u32(a.n_t, "n_t", 1)?;
        let n_r = self.u32(a.n_r, "n_r", 1)?;
        Ok(AntennaConfig::new(
            self.u32(a.n_s, "n_s", n_t)?,
            self.u32(a.n_rr, "n_rr", n_r)?,
            self.u32(a.n_rt, "n_rt", n_t)?,
            self.u32(a.n_d, "n_d", n_r)?,
        )?)
    }

    pub fn powers(&self, p: &PowerArgs) -> CliResult<(f64, f64)> {
        Ok((
            self.f64(p.ps, "ps", DEFAULT_POWER)?,
            self.f64(p.pr, "pr", DEFAULT_POWER)?,
        ))
    }

    fn stamp(&self, t: &mut Table) {
        t.param("seed", self.seed)
            .param("workers", self.workers)
            .param("sigma_n_dbm", self.sigma_n_dbm)
            .param("rho", self.rho)
            .param("epsilon", self.epsilon)
            .param("delta", self.delta)
            .param("p_max", self.p_max);
    }
}

/// Power used when neither a flag nor the config sets one.
pub const DEFAULT_POWER: f64 = 3.0;
/// Rate used when neither a flag nor the config sets one.
pub const DEFAULT_RATE: f64 = 1.5;

fn pick(flag: Option<f64>, file: &KeyValues, key: &str) -> CliResult<Option<f64>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => Ok(file.get_f64(key)?),
    }
}

fn pick_u64(flag: Option<u64>, file: &KeyValues, key: &str) -> CliResult<Option<u64>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => Ok(file.get_u64(key)?),
    }
}

fn scenario_of(antennas: AntennaConfig) -> Scenario {
    if antennas.is_single() {
        Scenario::Single
    } else {
        Scenario::Multi
    }
}

fn antenna_cells(a: AntennaConfig) -> Vec<Cell> {
    vec![a.n_s().into(), a.n_rr().into(), a.n_rt().into(), a.n_d().into()]
}

fn emit(table: &Table, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| CliError::Io(format!("--out {}: {e}", path.display())))?;
            table
                .write(io::BufWriter::new(file))
                .map_err(|e| CliError::Io(format!("--out {}: {e}", path.display())))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table
                .write(&mut lock)
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let r = Resolved::new(&cli.global)?;
    info!(
        "resolved configuration: seed={} workers={} sigma_n_dbm={} rho={} epsilon={} delta={} p_max={} config={:?} out={:?}",
        r.seed, r.workers, r.sigma_n_dbm, r.rho, r.epsilon, r.delta, r.p_max, cli.global.config, cli.global.out
    );
    let out = cli.global.out.as_deref();
    match &cli.command {
        Command::Dep { power, tau } => emit(&cmd_dep(&r, power, *tau)?, out),
        Command::Sweep(args) => emit(&cmd_sweep(&r, args)?, out),
        Command::Throughput {
            power,
            antennas,
            t,
            samples,
        } => emit(&cmd_throughput(&r, power, antennas, *t, *samples)?, out),
        Command::OptimizeSingle => emit(&cmd_optimize_single(&r)?, out),
        Command::OptimizeMulti {
            antennas,
            h1,
            h2,
            h3,
            phi,
            v_max,
        } => emit(&cmd_optimize_multi(&r, antennas, [*h1, *h2, *h3, *phi], *v_max)?, out),
        Command::Validate { samples, report_dir } => cmd_validate(&r, *samples, report_dir, out),
        Command::Figures { which, outdir } => cmd_figures(&r, which.as_deref(), outdir),
    }
}

fn cmd_dep(r: &Resolved, power: &PowerArgs, tau: Option<f64>) -> CliResult<Table> {
    let (p_s, p_r) = r.powers(power)?;
    let sp = r.params(p_s, p_r, AntennaConfig::single())?;
    let tau = r.opt_f64(tau, "tau")?;
    info!("dep: p_s={p_s} p_r={p_r} tau={tau:?}");
    let d = match tau {
        Some(tau) => detection_at(tau, &sp)?,
        None => min_detection(&sp)?,
    };
    let mut t = Table::new(["p_s", "p_r", "tau", "pe1", "pe2", "xi"]);
    r.stamp(&mut t);
    t.push(vec![
        p_s.into(),
        p_r.into(),
        d.tau.into(),
        d.pe1.into(),
        d.pe2.into(),
        d.xi.into(),
    ])?;
    Ok(t)
}

fn cmd_sweep(r: &Resolved, args: &SweepArgs) -> CliResult<Table> {
    let spec = SweepSpec::new(args.variable, args.from, args.to, args.steps, args.scale)?;
    let (p_s0, p_r0) = r.powers(&args.power)?;
    let t0 = r.f64(args.t, "t", DEFAULT_RATE)?;
    let ant0 = r.antennas(&args.antennas)?;
    info!("sweep: {spec:?} p_s={p_s0} p_r={p_r0} t={t0} antennas={ant0:?}");

    let mut table = Table::new([
        spec.variable.name(),
        "p_s",
        "p_r",
        "t",
        "sigma_n_dbm",
        "rho",
        "n_s",
        "n_rr",
        "n_rt",
        "n_d",
        "tau",
        "xi",
        "p_out",
        "eta",
    ]);
    r.stamp(&mut table);
    table
        .param("var", spec.variable.name())
        .param("from", spec.from)
        .param("to", spec.to)
        .param("steps", spec.steps)
        .param("scale", format!("{:?}", spec.scale).to_lowercase());

    for x in spec.values() {
        let (mut p_s, mut p_r, mut t) = (p_s0, p_r0, t0);
        let (mut sigma, mut rho) = (r.sigma_n_dbm, r.rho);
        let mut ant = ant0;
        match spec.variable {
            SweepVar::P => (p_s, p_r) = (x, x),
            SweepVar::PS => p_s = x,
            SweepVar::PR => p_r = x,
            SweepVar::Rho => rho = x,
            SweepVar::SigmaN2Dbm => sigma = x,
            SweepVar::T => t = x,
            SweepVar::Epsilon => {
                let c = ConstraintSet::new(x, r.delta, r.p_max)?;
                let sp = SystemParams::from_dbm(1.0, 1.0, sigma, rho, ant)?;
                let p = symmetric_covert_power(&c, &sp, r.p_max)?.unwrap_or(r.p_max);
                (p_s, p_r) = (p, p);
            }
            SweepVar::NT => ant = AntennaConfig::new(x as u32, ant.n_rr(), x as u32, ant.n_d())?,
            SweepVar::NR => ant = AntennaConfig::new(ant.n_s(), x as u32, ant.n_rt(), x as u32)?,
        }
        let sp = SystemParams::from_dbm(p_s, p_r, sigma, rho, ant)?;
        let det = min_detection(&sp)?;
        let out = throughput(&sp, RateParams::new(t)?, scenario_of(ant))?;
        let mut row: Vec<Cell> = vec![x.into(), p_s.into(), p_r.into(), t.into(), sigma.into(), rho.into()];
        row.extend(antenna_cells(ant));
        row.extend([det.tau.into(), det.xi.into(), out.p_out.into(), out.eta.into()]);
        table.push(row)?;
    }
    Ok(table)
}

fn cmd_throughput(
    r: &Resolved,
    power: &PowerArgs,
    antennas: &AntennaArgs,
    t: Option<f64>,
    samples: Option<u64>,
) -> CliResult<Table> {
    let (p_s, p_r) = r.powers(power)?;
    let ant = r.antennas(antennas)?;
    let t = r.f64(t, "t", DEFAULT_RATE)?;
    let samples = match samples {
        Some(n) => Some(n),
        None => r.file.get_u64("samples")?,
    };
    let sp = r.params(p_s, p_r, ant)?;
    let rate = RateParams::new(t)?;
    let scenario = scenario_of(ant);
    info!("throughput: p_s={p_s} p_r={p_r} t={t} antennas={ant:?} scenario={scenario:?} samples={samples:?}");
    let out = throughput(&sp, rate, scenario)?;

    let mut cols = vec![
        "p_s",
        "p_r",
        "t",
        "n_s",
        "n_rr",
        "n_rt",
        "n_d",
        "p_out_hop1",
        "p_out_hop2",
        "p_out",
        "eta",
    ];
    let mut row: Vec<Cell> = vec![p_s.into(), p_r.into(), t.into()];
    row.extend(antenna_cells(ant));
    row.extend([
        out.p_out_hop1.into(),
        out.p_out_hop2.into(),
        out.p_out.into(),
        out.eta.into(),
    ]);
    if let Some(n) = samples {
        let mc = mc_throughput(
            &sp,
            rate,
            scenario,
            n,
            crate::channel::RngSpec::new(r.seed, 0),
            r.workers,
        )?;
        cols.extend(["eta_mc", "eta_mc_stderr", "mc_samples"]);
        row.extend([mc.mean.into(), mc.stderr.into(), Cell::Int(n as i64)]);
    }
    let mut table = Table::new(cols);
    r.stamp(&mut table);
    table.push(row)?;
    Ok(table)
}

fn optimum_table(r: &Resolved, o: &Optimum, extra: &[(&str, Cell)]) -> CliResult<Table> {
    let mut cols = vec![
        "p_s",
        "p_r",
        "t",
        "eta",
        "method",
        "active_constraints",
        "k1",
        "k2",
        "k3",
        "k4",
        "kkt_residual",
    ];
    cols.extend(extra.iter().map(|(k, _)| *k));
    let mut table = Table::new(cols);
    r.stamp(&mut table);
    let active: Vec<&str> = o.active_constraints.iter().map(|c| c.name()).collect();
    let mut row: Vec<Cell> = vec![
        o.p_s.into(),
        o.p_r.into(),
        o.t.into(),
        o.eta.into(),
        o.method.name().into(),
        active.join("|").into(),
    ];
    match &o.kkt {
        Some(k) => row.extend([
            k.k1.into(),
            k.k2.into(),
            k.k3.into(),
            k.k4.into(),
            k.residual_norm.into(),
        ]),
        None => row.extend((0..5).map(|_| Cell::from(""))),
    }
    row.extend(extra.iter().map(|(_, v)| v.clone()));
    table.push(row)?;
    Ok(table)
}

fn cmd_optimize_single(r: &Resolved) -> CliResult<Table> {
    let c = r.constraints()?;
    let sp = r.params(1.0, 1.0, AntennaConfig::single())?;
    info!("optimize-single: {c:?}");
    let o = optimize_single(&c, &sp)?;
    optimum_table(r, &o, &[])
}

fn cmd_optimize_multi(
    r: &Resolved,
    antennas: &AntennaArgs,
    steps: [Option<f64>; 4],
    v_max: Option<u64>,
) -> CliResult<Table> {
    let c = r.constraints()?;
    let mut ant_args = *antennas;
    if ant_args.n_t.is_none() && r.file.get("n_t").is_none() {
        ant_args.n_t = Some(2);
    }
    if ant_args.n_r.is_none() && r.file.get("n_r").is_none() {
        ant_args.n_r = Some(8);
    }
    let ant = r.antennas(&ant_args)?;
    let sp = r.params(1.0, 1.0, ant)?;
    let mut search = MultiSearch::default_for(&c, &sp)?;
    let [h1, h2, h3, phi] = steps;
    // explicit power steps scan the whole range up to P_max
    if h1.is_some() || h2.is_some() || r.file.get("h1").is_some() || r.file.get("h2").is_some() {
        search.p_s_upper = c.p_max();
        search.p_r_upper = c.p_max();
    }
    search.h1 = r.f64(h1, "h1", search.h1)?;
    search.h2 = r.f64(h2, "h2", search.h2)?;
    search.h3 = r.f64(h3, "h3", search.h3)?;
    search.phi = r.f64(phi, "phi", search.phi)?;
    search.v_max = r.u64(v_max, "v_max", search.v_max)?;
    search.validate(&c)?;
    info!("optimize-multi: {c:?} antennas={ant:?} search={search:?}");
    let outcome = optimize_multi_traced(&c, &sp, &search)?;
    optimum_table(
        r,
        &outcome.optimum,
        &[
            ("evaluations", Cell::Int(outcome.evaluations as i64)),
            ("h1", search.h1.into()),
            ("h2", search.h2.into()),
            ("h3", search.h3.into()),
        ],
    )
}

fn cmd_validate(r: &Resolved, samples: Option<u64>, report_dir: &Path, out: Option<&Path>) -> CliResult<()> {
    let campaign = Campaign {
        samples: r.u64(samples, "samples", 1_000_000)?,
        seed: r.seed,
        workers: r.workers,
        sigma_n_dbm: r.sigma_n_dbm,
        rho: r.rho,
    };
    info!("validate: {campaign:?} report_dir={}", report_dir.display());
    let checks = run_campaign(&campaign)?;
    emit(&checks_table(&campaign, &checks)?, out)?;

    fs::create_dir_all(report_dir).map_err(|e| CliError::Io(format!("--report-dir {}: {e}", report_dir.display())))?;
    let report_path = report_dir.join("discrepancies.csv");
    let report = build_report()?;
    emit(&report.to_table()?, Some(&report_path))?;
    info!(
        "wrote {} discrepancy rows to {}",
        report.records().len(),
        report_path.display()
    );

    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| format!("{} [{}]", c.name, c.params))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Numeric(format!(
            "{} of {} Monte-Carlo checks outside 3 standard errors: {}",
            failed.len(),
            checks.len(),
            failed.join(", ")
        ))
        .into())
    }
}

fn cmd_figures(r: &Resolved, which: Option<&str>, outdir: &Path) -> CliResult<()> {
    let which = r.text(which, "which").unwrap_or_else(|| "all".to_owned());
    let list: Vec<u8> = if which == "all" {
        FIGURES.to_vec()
    } else {
        let n: u8 = which
            .parse()
            .map_err(|_| Error::Domain(format!("--which expects 3-8 or `all`, got `{which}`")))?;
        vec![n]
    };
    let cfg = FigureConfig {
        sigma_n_dbm: r.sigma_n_dbm,
        rho: r.rho,
        epsilon: r.epsilon,
        delta: r.delta,
        p_max: r.p_max,
        ..FigureConfig::default()
    };
    fs::create_dir_all(outdir).map_err(|e| CliError::Io(format!("--outdir {}: {e}", outdir.display())))?;
    for n in list {
        let table = figure(n, &cfg)?;
        let path = outdir.join(format!("fig{n}.csv"));
        emit(&table, Some(&path))?;
        info!("wrote {}", path.display());
    }
    Ok(())
}
