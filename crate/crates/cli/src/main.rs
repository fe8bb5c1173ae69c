use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use llhuncc::experiment::{
    self, compare, parse_axis, parse_seeds, read_csv, run_experiment, ExperimentError, ExperimentSpec, Scenario,
    Tolerances,
};
use llhuncc::huncc::Security;
use llhuncc::metrics::FrameSpec;
use llhuncc::reliability::Reliability;
use llhuncc::simnet::Assignment;

const EXIT_COMPARE_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "llhuncc", version, about = "Secure multipath erasure-network experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep schemes over an erasure grid and write results.csv + results.json.
    Run(RunArgs),
    /// Compare a candidate CSV against a baseline; exit 1 when a tolerance is exceeded.
    Compare {
        baseline: PathBuf,
        candidate: PathBuf,
        #[arg(long)]
        tol_file: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// `all` or a comma list of none, mceliece-all, huncc.
    #[arg(long, default_value = "all")]
    security: String,
    /// `all` or a comma list of srarq, sp-acrlnc, mp-acrlnc.
    #[arg(long, default_value = "all")]
    reliability: String,
    #[arg(long, default_value = "packets")]
    scenario: String,
    /// Both axes: `default`, `log:N`, or a comma list.
    #[arg(long, default_value = "default")]
    grid: String,
    /// Satellite axis, overriding --grid.
    #[arg(long)]
    grid_sat: Option<String>,
    /// 5G axis, overriding --grid.
    #[arg(long)]
    grid_5g: Option<String>,
    /// A count N (seeds 0..N) or a range a..b.
    #[arg(long, default_value = "30")]
    seeds: String,
    #[arg(long, default_value_t = 20)]
    rtt: u64,
    #[arg(long, default_value_t = 1024)]
    packet_bits: usize,
    /// Information packets per run (frames scenario: 10 frames by default).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 100)]
    frame_size: usize,
    #[arg(long, default_value_t = 3)]
    links_5g: usize,
    /// Encrypted links under HUNCC.
    #[arg(long, default_value_t = 1)]
    huncc_c: usize,
    /// Keep HUNCC substream i on link i for single-path schemes.
    #[arg(long)]
    pinned: bool,
    /// Keep encrypted units off untrusted links (rejects multipath HUNCC with c > 0).
    #[arg(long)]
    trusted_only: bool,
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
    /// Skip payload coding and the end-to-end stream check.
    #[arg(long)]
    no_verify: bool,
    #[arg(long)]
    out: PathBuf,
}

fn list<T>(s: &str, all: &[T], parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, ExperimentError>
where
    T: Copy,
{
    if s.trim() == "all" {
        return Ok(all.to_vec());
    }
    s.split(',').map(|x| parse(x.trim()).map_err(ExperimentError::Usage)).collect()
}

fn spec_from(a: &RunArgs) -> Result<ExperimentSpec, ExperimentError> {
    let scenario: Scenario = a.scenario.parse()?;
    let mut spec = ExperimentSpec {
        scenario,
        securities: list(&a.security, &Security::ALL, |x| x.parse::<Security>())?,
        reliabilities: list(&a.reliability, &Reliability::ALL, |x| x.parse::<Reliability>())?,
        eps_sat: parse_axis(a.grid_sat.as_deref().unwrap_or(&a.grid))?,
        eps_5g: parse_axis(a.grid_5g.as_deref().unwrap_or(&a.grid))?,
        n_5g: a.links_5g,
        rtt: a.rtt,
        packet_bits: a.packet_bits,
        frame: FrameSpec { k: a.frame_size },
        seeds: parse_seeds(&a.seeds)?,
        ..ExperimentSpec::default()
    };
    spec.run.packets = a.n.unwrap_or(match scenario {
        Scenario::Frames => 10 * a.frame_size,
        Scenario::Packets | Scenario::Files => 1000,
    });
    spec.run.huncc_c = a.huncc_c;
    spec.run.assignment = if a.pinned { Assignment::Pinned } else { Assignment::RoundRobin };
    spec.run.allow_encrypted_on_untrusted = !a.trusted_only;
    spec.run.acrlnc.threshold = a.threshold;
    spec.run.verify_payloads = !a.no_verify;
    Ok(spec)
}

fn run(a: &RunArgs) -> Result<ExitCode, ExperimentError> {
    let spec = spec_from(a)?;
    let workers = experiment::workers_from_env()?;
    let rows = run_experiment(&spec, workers)?;
    let (csv, json) = experiment::write_outputs(&spec, &rows, &a.out)?;
    eprintln!("{} rows -> {} (+ {})", rows.len(), csv.display(), json.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(a) => run(a),
        Command::Compare {
            baseline,
            candidate,
            tol_file,
        } => (|| {
            let tol = Tolerances::load(tol_file)?;
            let report = compare(&read_csv(baseline)?, &read_csv(candidate)?, &tol);
            println!("{report}");
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_COMPARE_FAILED)
            })
        })(),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_USAGE)
    })
}
