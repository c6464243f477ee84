use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use oscquant::dynamics::{
    bateman_system, generalized_system, integrate, lee_system, LinearSystem, TrajectoryState, DEFAULT_DT,
    DEFAULT_HORIZON,
};
use oscquant::fixtures::{default_dir, load_case, read_fixture, Fixture, FixtureCase};
use oscquant::model::{classify_grid, write_region_csv, Axis};
use oscquant::output::write_json;
use oscquant::pipeline::{run_quantize, verify_suite, RunReport};
use oscquant::spectral::{spectrum_table, tensor_state};
use oscquant::{Error, Execution, ModelParams};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BLOW_UP: u8 = 3;

#[derive(Parser)]
#[command(name = "oscquant", version, about = "Quantization workbench for coupled oscillators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep (gamma, lambda) and write the region map as CSV.
    #[command(allow_negative_numbers = true)]
    Classify(ClassifyArgs),
    /// Run the quantization pipeline and print a JSON report.
    #[command(allow_negative_numbers = true)]
    Quantize(QuantizeArgs),
    /// Print a table of energy levels (or one eigenstate) as JSON.
    #[command(allow_negative_numbers = true)]
    Spectrum(SpectrumArgs),
    /// Integrate a classical system and write the trajectory as CSV.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Run the fixture check suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Gamma range as lo:hi.
    #[arg(long, default_value = "-2:2", allow_hyphen_values = true)]
    gamma: String,
    /// Lambda range as lo:hi.
    #[arg(long, default_value = "-2:2", allow_hyphen_values = true)]
    lambda: String,
    /// Grid points per axis (at least 2).
    #[arg(long, default_value_t = 41)]
    steps: usize,
    /// Sweep on one thread.
    #[arg(long)]
    sequential: bool,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    /// Coupling gamma. Defaults to the fixture's value, else 0.
    #[arg(long)]
    gamma: Option<f64>,
    /// Coupling lambda. Defaults to the fixture's value, else 0.
    #[arg(long)]
    lambda: Option<f64>,
    /// Use a stored eigenbasis: `case1`, `case2`, or a path to a fixture file.
    #[arg(long)]
    fixture: Option<String>,
    /// Directory holding case1.txt and case2.txt.
    #[arg(long, default_value_os_t = default_dir())]
    fixtures: PathBuf,
}

#[derive(Args)]
struct QuantizeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Levels n = 0..n-max-1.
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    /// Levels m = 0..m-max-1.
    #[arg(long, default_value_t = 4)]
    m_max: usize,
    /// Dump the eigenstate phi_{n,m} as N,M instead of the level table.
    #[arg(long, value_parser = parse_pair)]
    state: Option<(usize, usize)>,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemKind {
    Lee,
    Bateman,
    Generalized,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = SystemKind::Lee)]
    system: SystemKind,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Also used for the p_lambda column of every system.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// A of the generalized system.
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    /// B of the generalized system.
    #[arg(long, default_value_t = 0.0)]
    b: f64,
    #[arg(long, default_value_t = 1.0)]
    x0: f64,
    #[arg(long, default_value_t = 0.0)]
    y0: f64,
    #[arg(long, default_value_t = 0.0)]
    vx0: f64,
    #[arg(long, default_value_t = 1.0)]
    vy0: f64,
    /// Time step (shrunk so that the last sample lands on T).
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    /// Horizon.
    #[arg(long = "T", default_value_t = DEFAULT_HORIZON)]
    horizon: f64,
    /// Write every stride-th sample.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Directory holding case1.txt and case2.txt.
    #[arg(long, default_value_os_t = default_dir())]
    fixtures: PathBuf,
    /// Print the check list as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected N,M, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn json_out<T: serde::Serialize>(out: &Option<PathBuf>, value: &T) -> oscquant::Result<()> {
    let mut w = sink(out)?;
    write_json(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn load_fixture(name: &str, dir: &Path) -> oscquant::Result<Fixture> {
    match FixtureCase::parse(name) {
        Some(case) => load_case(dir, case),
        None => read_fixture(Path::new(name)),
    }
}

fn report_for(model: &ModelArgs) -> oscquant::Result<RunReport> {
    let fixture = model
        .fixture
        .as_deref()
        .map(|f| load_fixture(f, &model.fixtures))
        .transpose()?;
    let base = fixture.as_ref().map(|f| f.params);
    let gamma = model.gamma.or(base.map(|p| p.gamma)).unwrap_or(0.0);
    let lambda = model.lambda.or(base.map(|p| p.lambda)).unwrap_or(0.0);
    let params = ModelParams::new(gamma, lambda)?;
    Ok(run_quantize(&params, fixture.map(|f| f.s)))
}

fn classify(args: &ClassifyArgs) -> oscquant::Result<ExitCode> {
    let gamma = Axis::parse(&args.gamma, args.steps)?;
    let lambda = Axis::parse(&args.lambda, args.steps)?;
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let rows = classify_grid(&gamma, &lambda, exec);
    let mut w = sink(&args.out)?;
    write_region_csv(&rows, &mut w)?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn quantize(args: &QuantizeArgs) -> oscquant::Result<ExitCode> {
    json_out(&args.out, &report_for(&args.model)?)?;
    Ok(ExitCode::SUCCESS)
}

fn spectrum(args: &SpectrumArgs) -> oscquant::Result<ExitCode> {
    let report = report_for(&args.model)?;
    let Some(decoupled) = report.decoupled else {
        eprintln!(
            "error: no decoupled Hamiltonian for these parameters ({})",
            report.note.as_deref().unwrap_or("unsupported branch")
        );
        return Ok(ExitCode::from(EXIT_CHECK_FAILED));
    };
    match args.state {
        Some((n, m)) => json_out(&args.out, &tensor_state(&decoupled, n, m)?)?,
        None => json_out(&args.out, &spectrum_table(&decoupled, args.n_max, args.m_max)?)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn simulate(args: &SimulateArgs) -> oscquant::Result<ExitCode> {
    let sys: LinearSystem = match args.system {
        SystemKind::Lee => lee_system(&ModelParams::new(args.gamma, args.lambda)?),
        SystemKind::Bateman => bateman_system(args.gamma),
        SystemKind::Generalized => generalized_system(args.gamma, args.a, args.b)?,
    };
    let s0 = TrajectoryState::new(0.0, [args.x0, args.y0], [args.vx0, args.vy0]);
    let traj = integrate(&sys, &s0, args.dt, args.horizon)?;
    let w = sink(&args.out)?;
    traj.write_csv(args.lambda, args.stride.max(1), w)?;
    Ok(ExitCode::SUCCESS)
}

fn verify(args: &VerifyArgs) -> oscquant::Result<ExitCode> {
    let report = verify_suite(&args.fixtures)?;
    if args.json {
        json_out(&None, &report)?;
    } else {
        print!("{}", report.table());
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        println!("{} checks, {} failed", report.checks.len(), failed);
    }
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify(a) => classify(a),
        Command::Quantize(a) => quantize(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BlowUp { .. } => ExitCode::from(EXIT_BLOW_UP),
                _ => ExitCode::from(EXIT_USAGE),
            }
        }
    }
}
