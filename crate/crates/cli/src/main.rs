mod plot;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use qteleport_core::protocols::{self, TeleportMode};
use qteleport_core::simulator::{run_analytic, run_shots};
use qteleport_core::{dsl, Circuit, NoiseModel, RunConfig};
use thiserror::Error;

use report::{AnalyticOutcomes, ConfigEcho, OutputReport, Results, SCHEMA_VERSION};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qteleport_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "qteleport", version, about = "Statevector simulator for teleportation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Execute a .qc circuit file.
    Run {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Teleport the prepared state and report Bob's statistics per outcome.
    Teleport {
        #[arg(long, value_enum, default_value_t = ModeArg::Postselect)]
        mode: ModeArg,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run one of the built-in circuits.
    Protocol {
        #[arg(value_enum)]
        name: ProtocolName,
        /// Print the circuit listing instead of running it.
        #[arg(long)]
        emit_circuit: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Render a JSON report as an SVG bar chart.
    Plot { report: PathBuf, out: PathBuf },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    #[arg(long, default_value_t = 8192)]
    shots: u64,
    #[arg(long, env = "QTELEPORT_SEED", default_value_t = 0)]
    seed: u64,
    /// Exact branch enumeration instead of sampling.
    #[arg(long)]
    analytic: bool,
    /// Depolarizing probability per gate and touched qubit.
    #[arg(long)]
    noise_depol: Option<f64>,
    /// Probability that a recorded bit is flipped.
    #[arg(long)]
    noise_readout: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Size of the shot thread pool (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Postselect,
    Feedforward,
}

impl From<ModeArg> for TeleportMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Postselect => TeleportMode::Postselect,
            ModeArg::Feedforward => TeleportMode::Feedforward,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProtocolName {
    Prep,
    Bell,
    Ghz3,
    Ghz4,
    Ghz5,
}

impl ProtocolName {
    fn name(self) -> &'static str {
        match self {
            ProtocolName::Prep => "prep",
            ProtocolName::Bell => "bell",
            ProtocolName::Ghz3 => "ghz3",
            ProtocolName::Ghz4 => "ghz4",
            ProtocolName::Ghz5 => "ghz5",
        }
    }

    fn circuit(self) -> CliResult<Circuit> {
        Ok(match self {
            ProtocolName::Prep => protocols::prep_circuit(),
            ProtocolName::Bell => protocols::bell_circuit(),
            ProtocolName::Ghz3 => protocols::ghz_circuit(3)?,
            ProtocolName::Ghz4 => protocols::ghz_circuit(4)?,
            ProtocolName::Ghz5 => protocols::ghz_circuit(5)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl RunArgs {
    fn config(&self) -> CliResult<RunConfig> {
        let mut cfg = RunConfig::new(self.shots, self.seed);
        if self.noise_depol.is_some() || self.noise_readout.is_some() {
            if self.analytic {
                return Err(CliError::Usage(
                    "--analytic is exact and noiseless; drop the --noise-* flags".into(),
                ));
            }
            cfg = cfg.with_noise(NoiseModel::new(
                self.noise_depol.unwrap_or(0.0),
                self.noise_readout.unwrap_or(0.0),
            )?);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn echo(&self, cfg: &RunConfig) -> ConfigEcho {
        ConfigEcho {
            shots: cfg.shots,
            seed: cfg.seed,
            analytic: self.analytic,
            noise: cfg.noise,
            mode: None,
            protocol: None,
            circuit: None,
        }
    }

    fn pool(&self) -> CliResult<rayon::ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.workers {
            if n == 0 {
                return Err(CliError::Usage("--workers must be at least 1".into()));
            }
            builder = builder.num_threads(n);
        }
        builder
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
    }
}

/// Circuits without measurements are read out on every qubit.
fn measured(circuit: &Circuit) -> Circuit {
    if circuit.has_measurement() {
        circuit.clone()
    } else {
        protocols::with_measurements(circuit)
    }
}

fn execute(circuit: &Circuit, args: &RunArgs, cfg: &RunConfig) -> CliResult<Results> {
    let circuit = measured(circuit);
    if args.analytic {
        let exact = run_analytic(&circuit)?;
        Ok(Results::Analytic(AnalyticOutcomes {
            n_bits: exact.n_classical_bits,
            outcomes: exact.bitstrings(),
            probabilities: exact.distribution(),
        }))
    } else {
        Ok(Results::Histogram(run_shots(&circuit, cfg)?))
    }
}

fn emit(report: &OutputReport, args: &RunArgs) -> CliResult<()> {
    let body = match args.format {
        Format::Json => report.to_json().into_bytes(),
        Format::Csv => {
            let mut buf = Vec::new();
            match report::write_csv(&report.results, &mut buf) {
                Some(Ok(())) => buf,
                Some(Err(e)) => return Err(CliError::Usage(format!("csv: {e}"))),
                None => {
                    return Err(CliError::Usage(
                        "--format csv only supports flat histograms; use json".into(),
                    ))
                }
            }
        }
    };
    write_out(args.output.as_deref(), &body)
}

fn write_out(path: Option<&Path>, body: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn finish(command: &str, config: ConfigEcho, results: Results, started: Instant) -> OutputReport {
    OutputReport {
        schema_version: SCHEMA_VERSION.to_string(),
        command: command.to_string(),
        config,
        results,
        timing_ms: started.elapsed().as_secs_f64() * 1e3,
    }
}

fn cmd_run(file: &Path, args: &RunArgs) -> CliResult<()> {
    let started = Instant::now();
    let cfg = args.config()?;
    let bytes = std::fs::read(file).map_err(|e| CliError::io(file, e))?;
    let circuit = dsl::parse_bytes(&bytes)
        .map_err(|e| CliError::Usage(format!("{}: {e}", file.display())))?;
    if let Ok(warnings) = circuit.validate() {
        for w in warnings {
            eprintln!("warning: {}: {}", file.display(), w.message);
        }
    }
    let results = args.pool()?.install(|| execute(&circuit, args, &cfg))?;
    let mut echo = args.echo(&cfg);
    echo.circuit = Some(file.display().to_string());
    emit(&finish("run", echo, results, started), args)
}

fn cmd_teleport(mode: TeleportMode, args: &RunArgs) -> CliResult<()> {
    let started = Instant::now();
    let cfg = args.config()?;
    let report = if args.analytic {
        protocols::analytic_teleport_report(mode)?
    } else {
        args.pool()?
            .install(|| protocols::run_teleport_experiment(mode, &cfg))?
    };
    let mut echo = args.echo(&cfg);
    echo.mode = Some(mode);
    emit(
        &finish("teleport", echo, Results::Teleport(report), started),
        args,
    )
}

fn cmd_protocol(name: ProtocolName, emit_circuit: bool, args: &RunArgs) -> CliResult<()> {
    let started = Instant::now();
    let circuit = name.circuit()?;
    if emit_circuit {
        let listing = dsl::serialize(&measured(&circuit));
        return write_out(args.output.as_deref(), listing.as_bytes());
    }
    let cfg = args.config()?;
    let results = match (name, args.analytic) {
        (ProtocolName::Prep, true) => Results::Prep(protocols::analytic_prep_report()?),
        (ProtocolName::Prep, false) => Results::Prep(
            args.pool()?
                .install(|| protocols::run_prep_experiment(&cfg))?,
        ),
        _ => args.pool()?.install(|| execute(&circuit, args, &cfg))?,
    };
    let mut echo = args.echo(&cfg);
    echo.protocol = Some(name.name().to_string());
    emit(&finish("protocol", echo, results, started), args)
}

fn cmd_plot(report_path: &Path, out: &Path) -> CliResult<()> {
    let text = std::fs::read_to_string(report_path).map_err(|e| CliError::io(report_path, e))?;
    let report: OutputReport = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: not a report: {e}", report_path.display())))?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(CliError::Usage(format!(
            "{}: unsupported schema_version {:?}",
            report_path.display(),
            report.schema_version
        )));
    }
    std::fs::write(out, plot::render_svg(&report)).map_err(|e| CliError::io(out, e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { file, run } => cmd_run(file, run),
        Command::Teleport { mode, run } => cmd_teleport((*mode).into(), run),
        Command::Protocol {
            name,
            emit_circuit,
            run,
        } => cmd_protocol(*name, *emit_circuit, run),
        Command::Plot { report, out } => cmd_plot(report, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
