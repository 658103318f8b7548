//! Thin CLI over the experiment harness: run sweeps, launch attack
//! suites, audit code families, and replay stored transcripts.
//!
//! Exit status: 0 when every checked invariant holds, 1 when one fails
//! (a below-threshold failure, a short code distance, a replay
//! mismatch), 2 on config or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use termcode::harness::{
    replay_report, run_attacks, run_sweep, verify_codes, verify_summary, write_reports,
    ExperimentConfig, HarnessError, SweepReport,
};

#[derive(Parser)]
#[command(name = "termcode", version, about = "Two-party exchange protocol simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config file (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Replace the adversary seed list and the input-sampling seed.
    #[arg(long, value_name = "K")]
    seed: Option<u64>,
    /// Output directory (overrides the config's [output] dir).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for the run pool.
    #[arg(long, value_name = "J")]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the configured experiment; write CSV and JSON reports.
    Run(#[command(flatten)] Common),
    /// Like run, but insists on a budget grid to sweep over.
    Sweep(#[command(flatten)] Common),
    /// Run the configured attack (or the whole applicable suite).
    Attack(#[command(flatten)] Common),
    /// Audit the configured code family's prefix and slice distances.
    VerifyCodes(#[command(flatten)] Common),
    /// Re-execute the sweep row whose transcript hash starts with HASH.
    Replay {
        #[command(flatten)]
        common: Common,
        /// Transcript-hash prefix from the JSON report.
        hash: String,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = ExperimentConfig::from_path(&common.config)?;
    if let Some(dir) = &common.out {
        cfg.output.dir = Some(dir.display().to_string());
    }
    if let Some(seed) = common.seed {
        cfg.inputs.seed = Some(seed);
        if cfg.adversary.kind == "random_budgeted" {
            cfg.adversary.seeds = vec![seed];
        }
    }
    cfg.check()?;
    Ok(cfg)
}

fn finish_sweep(cfg: &ExperimentConfig, report: &SweepReport) -> Result<bool, HarnessError> {
    let dir = PathBuf::from(cfg.output.dir());
    let (csv, json) = write_reports(report, &dir, cfg.output.csv_name(), cfg.output.json_name())?;
    let agg = &report.aggregate;
    println!(
        "{}: {} runs, {} failures under {} accounting",
        report.protocol, agg.runs, agg.failures, report.model
    );
    if let Some(rate) = &agg.min_succeeding_attack_rate {
        println!("cheapest successful attack rate: {rate}");
    }
    match (&agg.max_failing_rate_below_threshold, report.claimed_threshold) {
        (Some(rate), Some(th)) => {
            println!("FAIL: a run failed at rate {rate}, below the claimed threshold {th:.6}")
        }
        (None, Some(th)) => println!("ok: no failure below the claimed threshold {th:.6}"),
        _ => println!("ok: scheme claims no threshold"),
    }
    println!("wrote {}", csv.display());
    println!("wrote {}", json.display());
    Ok(report.guarantee_holds())
}

fn cmd_run(common: &Common, require_grid: bool) -> Result<bool, HarnessError> {
    let cfg = load(common)?;
    if require_grid && cfg.adversary.budgets.is_empty() {
        return Err(HarnessError::Config(
            "sweep needs an adversary.budgets grid; use `run` for a single-point experiment"
                .into(),
        ));
    }
    let report = run_sweep(&cfg, common.jobs)?;
    finish_sweep(&cfg, &report)
}

fn cmd_attack(common: &Common) -> Result<bool, HarnessError> {
    let cfg = load(common)?;
    let model = cfg.resolved_model()?;
    let attacks = run_attacks(&cfg)?;
    let mut below_threshold_success = false;
    for attack in &attacks {
        let rate = attack
            .report
            .rate(model)
            .map(|a| format!("{}/{}", a.corruptions, a.denominator.max(1)))
            .unwrap_or_else(|| "-".into());
        let verdict = if attack.report.success { "flipped" } else { "held" };
        println!(
            "{} x={} y={} budget={} rate={rate} {verdict}",
            attack.name, attack.x, attack.y, attack.budget
        );
        if attack.report.success {
            if let (Some(th), Some(acct)) = (attack.claimed_threshold, attack.report.rate(model)) {
                let as_f64 = acct.corruptions as f64 / acct.denominator.max(1) as f64;
                if as_f64 < th {
                    below_threshold_success = true;
                    println!("  FAIL: succeeded at {as_f64:.6}, below claimed threshold {th:.6}");
                }
            }
        }
    }
    let dir = PathBuf::from(cfg.output.dir());
    std::fs::create_dir_all(&dir)?;
    let path = dir.join(cfg.output.json.as_deref().unwrap_or("attacks.json"));
    let mut text = serde_json::to_string_pretty(&attacks)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    println!("wrote {}", path.display());
    Ok(!below_threshold_success)
}

fn cmd_verify_codes(common: &Common) -> Result<bool, HarnessError> {
    let cfg = load(common)?;
    let codes = cfg
        .codes
        .as_ref()
        .ok_or_else(|| HarnessError::Config("config has no [codes] section".into()))?;
    let report = verify_codes(codes)?;
    print!("{}", verify_summary(&report));
    let dir = PathBuf::from(cfg.output.dir());
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("codes.json");
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    println!("wrote {}", path.display());
    Ok(report.all_ok)
}

fn cmd_replay(common: &Common, hash: &str) -> Result<bool, HarnessError> {
    let cfg = load(common)?;
    let path = PathBuf::from(cfg.output.dir()).join(cfg.output.json_name());
    let text = std::fs::read_to_string(&path)?;
    let report: SweepReport = serde_json::from_str(&text)?;
    let outcome = replay_report(&report, hash)?;
    println!(
        "{} x={} y={} seed={} budget={}",
        outcome.row.adversary, outcome.row.x, outcome.row.y, outcome.row.seed, outcome.row.budget
    );
    if outcome.matches {
        println!("replay matches {}", outcome.row.transcript_hash);
    } else {
        println!(
            "REPLAY MISMATCH: stored {} recomputed {}",
            outcome.row.transcript_hash, outcome.actual_hash
        );
    }
    println!(
        "recomputed corruptions={} denominator={}",
        outcome.corruptions, outcome.denominator
    );
    Ok(outcome.matches)
}

fn dispatch(cli: &Cli) -> Result<bool, HarnessError> {
    match &cli.command {
        Command::Run(common) => cmd_run(common, false),
        Command::Sweep(common) => cmd_run(common, true),
        Command::Attack(common) => cmd_attack(common),
        Command::VerifyCodes(common) => cmd_verify_codes(common),
        Command::Replay { common, hash } => cmd_replay(common, hash),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
