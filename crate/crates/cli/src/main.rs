use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use follow_core::config::{load_suite, ConfigFile};
use follow_core::harness::{
    check_trends, compute_metrics, register_participant, render_table, run_suite_with, run_trial_with, write_summary_csv,
    write_trials_csv, SimConfig, TickLog, Trial, TrialMetrics, TrialOptions, VariantConfig,
};
use follow_core::reid::{cosine_similarity, FeatureBank};
use follow_core::sensing::Embedding;
use sha2::{Digest, Sha256};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_INVALID: u8 = 1;
const EXIT_TREND: u8 = 2;

#[derive(Parser)]
#[command(name = "follow", version, about = "Simulated person following: registration, trials and ablation suites")]
struct Cli {
    /// More output (-v per-trial lines, -vv also timing).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario / suite file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Register the participant of a seed and write its feature bank.
    Register {
        #[command(flatten)]
        common: Common,
    },
    /// Run one trial and print its metrics.
    Trial {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "ours")]
        variant: String,
        /// Feature bank from `follow register`; registers on the fly when absent.
        #[arg(long)]
        bank: Option<PathBuf>,
        /// Write the JSON-lines tick log.
        #[arg(long)]
        dump_ticks: bool,
        /// Write a CSV of agent and person poses per tick.
        #[arg(long)]
        trajectory: bool,
    },
    /// Run every variant over every seed and print the summary table.
    Suite {
        #[command(flatten)]
        common: Common,
        /// Exit with status 2 unless all trend checks hold.
        #[arg(long)]
        check: bool,
        /// Write one JSON-lines tick log per trial.
        #[arg(long)]
        dump_ticks: bool,
    },
    /// Recompute metrics from a saved tick log.
    Replay {
        log: PathBuf,
    },
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

struct Loaded {
    file: ConfigFile,
    config: SimConfig,
    hash: String,
}

fn load(path: &Path) -> Result<Loaded> {
    let bytes = fs::read(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let text = String::from_utf8(bytes).context("config is not UTF-8")?;
    let file = ConfigFile::from_toml_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
    let config = file.sim_config().with_context(|| format!("invalid config {}", path.display()))?;
    Ok(Loaded { file, config, hash: sha256_hex(text.as_bytes()) })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn mean_self_similarity(bank: &[Embedding], mean: &Embedding) -> Result<f64> {
    let mut sum = 0.0;
    for e in bank {
        sum += cosine_similarity(e, mean)?;
    }
    Ok(sum / bank.len() as f64)
}

fn register(common: &Common) -> Result<()> {
    let l = load(&common.config)?;
    let seed = common.seed.unwrap_or(l.file.seed);
    let participant = l.config.scenario.participants.index_for(seed);
    let bank = register_participant(&l.config, seed).context("registration failed")?;
    println!("# follow register seed={seed} config_sha256={}", l.hash);
    println!("participant {participant}, mode {}, dim {}", bank.mode().as_str(), bank.dim());
    println!(
        "torso embeddings {}, mean self-similarity {:.4}",
        bank.torso_bank().len(),
        mean_self_similarity(bank.torso_bank(), bank.torso_mean())?
    );
    match bank.face_mean() {
        Some(mean) => println!(
            "face embeddings {}, mean self-similarity {:.4}",
            bank.face_bank().len(),
            mean_self_similarity(bank.face_bank(), mean)?
        ),
        None => println!("face embeddings 0"),
    }
    let path = common.out.join(format!("bank_seed{seed}.fbnk"));
    fs::create_dir_all(&common.out)?;
    bank.save(&path).with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn print_metrics(m: &TrialMetrics) -> Result<()> {
    println!("avg_speed {:.3} m/s", m.avg_speed);
    println!("avg_follow_distance {:.3} m", m.avg_follow_distance);
    println!("avg_obstacle_distance {:.3} m", m.avg_obstacle_distance);
    println!("lost_target {}", m.lost_target);
    println!("wrong_person_events {}", m.wrong_person_events);
    println!("metrics {}", serde_json::to_string(m)?);
    Ok(())
}

fn write_log(dir: &Path, name: &str, log: &TickLog) -> Result<()> {
    let mut w = create(dir, name)?;
    log.write_jsonl(&mut w)?;
    w.flush()?;
    Ok(())
}

fn trial(common: &Common, variant: &str, bank: Option<&Path>, dump_ticks: bool, trajectory: bool) -> Result<()> {
    let l = load(&common.config)?;
    let seed = common.seed.unwrap_or(l.file.seed);
    let variant = VariantConfig::preset(variant)?;
    let bank = bank.map(|p| FeatureBank::load(p).with_context(|| format!("cannot load bank {}", p.display()))).transpose()?;
    let options = TrialOptions { bank, record_trajectory: trajectory };
    let t = run_trial_with(&l.config, &variant, seed, options)?;
    println!("# follow trial seed={seed} variant={} config_sha256={}", variant.name, l.hash);
    println!("participant {}, duration {:.1} s, reid calls {}", t.result.participant, t.result.metrics.duration, t.result.metrics.reid_calls);
    print_metrics(&t.result.metrics)?;

    let stem = format!("{}_seed{seed}", variant.name);
    let mut w = create(&common.out, &format!("trial_{stem}.json"))?;
    serde_json::to_writer_pretty(&mut w, &t.result)?;
    writeln!(w)?;
    if dump_ticks {
        write_log(&common.out, &format!("ticks_{stem}.jsonl"), &t.log)?;
    }
    if let Some(rec) = &t.trajectory {
        let mut w = create(&common.out, &format!("trajectory_{stem}.csv"))?;
        rec.write_csv(&mut w)?;
    }
    Ok(())
}

fn suite(common: &Common, check: bool, dump_ticks: bool, verbose: u8) -> Result<bool> {
    let l = load(&common.config)?;
    let mut plan = load_suite(&common.config)?;
    if let Some(seed) = common.seed {
        let n = plan.seeds.len() as u64;
        plan.seeds = (seed..seed + n).collect();
    }
    let ticks_dir = common.out.join("ticks");
    let on_trial = |t: &Trial| {
        if verbose > 0 {
            let m = &t.result.metrics;
            eprintln!(
                "{} {} seed {}: speed {:.2} lost {} wrong {}",
                t.result.scenario, t.result.variant, t.result.seed, m.avg_speed, m.lost_target, m.wrong_person_events
            );
        }
        if dump_ticks {
            let name = format!("{}_{}_seed{}.jsonl", t.result.scenario, t.result.variant, t.result.seed);
            if let Err(e) = write_log(&ticks_dir, &name, &t.log) {
                eprintln!("warning: {e:#}");
            }
        }
    };
    let started = std::time::Instant::now();
    let outcome = run_suite_with(&plan.scenarios, &plan.variants, &plan.seeds, &on_trial);
    if verbose > 1 {
        eprintln!("{} trials in {:.1} s", outcome.results.len(), started.elapsed().as_secs_f64());
    }

    let seeds = match (plan.seeds.first(), plan.seeds.last()) {
        (Some(a), Some(b)) => format!("{a}..={b}"),
        _ => "none".into(),
    };
    let provenance = vec![format!("follow suite seeds={seeds} n={} config_sha256={}", plan.seeds.len(), l.hash)];
    println!("# {}", provenance[0]);
    print!("{}", render_table(&outcome.summary));
    for f in &outcome.failures {
        eprintln!("trial failed: {} {} seed {}: {}", f.scenario, f.variant, f.seed, f.error);
    }
    write_summary_csv(&outcome.summary, &provenance, create(&common.out, "summary.csv")?)?;
    write_trials_csv(&outcome.results, create(&common.out, "trials.csv")?)?;

    if !outcome.failures.is_empty() {
        bail!("{} trial(s) failed", outcome.failures.len());
    }
    if !check {
        return Ok(true);
    }
    let checks = check_trends(&outcome.summary);
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(checks.iter().all(|c| c.passed))
}

fn replay(path: &Path) -> Result<()> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let log = TickLog::read_jsonl(BufReader::new(file)).with_context(|| format!("invalid tick log {}", path.display()))?;
    let m = compute_metrics(&log)?;
    println!("# follow replay seed={} variant={} ticks={}", log.header.seed, log.header.variant, log.ticks.len());
    print_metrics(&m)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Register { common } => register(common).map(|_| true),
        Command::Trial { common, variant, bank, dump_ticks, trajectory } => {
            trial(common, variant, bank.as_deref(), *dump_ticks, *trajectory).map(|_| true)
        }
        Command::Suite { common, check, dump_ticks } => suite(common, *check, *dump_ticks, cli.verbose),
        Command::Replay { log } => replay(log).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_TREND),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
