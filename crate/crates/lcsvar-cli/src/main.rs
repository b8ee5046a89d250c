//! Experiment runner for the lcsvar library.
//!
//! Subcommands: `simulate` (Monte Carlo estimators), `bounds` (constants
//! ledger), `oracle` (exact enumeration), `chain` (insertion-chain
//! inspector) and `verify` (invariant suite).
//!
//! Exit codes: 0 success, 1 invariant violation, 2 usage/config error,
//! 3 enumeration budget exceeded.

mod config;

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use config::{hash_json, load_config_file, PartialConfig, ResolvedConfig, RunManifest};
use lcsvar::chain::{build_chain, lcs_profile};
use lcsvar::constants::build_ledger;
use lcsvar::experiments::run_experiment;
use lcsvar::oracle::{exact_lc_distribution, exact_variance_table};
use lcsvar::report;
use lcsvar::verification;
use lcsvar::words::{sample_y_word, ModelParams, SeedSpec};

#[derive(Parser)]
#[command(
    name = "lcsvar",
    version,
    about = "Exact and Monte Carlo study of LCS variance for biased random words",
    after_help = "Environment:\n  LCSVAR_SEED  default master seed when --seed is not given"
)]
struct Cli {
    /// Worker threads for replicate-level parallelism (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one Monte Carlo estimator; writes manifest, CSV and JSON.
    Simulate(SimulateArgs),
    /// Print the constants ledger as JSON and an aligned table.
    Bounds(BoundsArgs),
    /// Exact enumeration oracle: LC_n law or variance table at tiny sizes.
    Oracle(OracleArgs),
    /// Build an insertion chain; dump its randomness, words and profile.
    Chain(ChainArgs),
    /// Run the verification suite (oracle equivalence, distribution
    /// identity, ledger inequalities); fails on any violation.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[command(after_help = "\
CSV columns (results.csv):
  experiment            estimator name
  estimate              point estimate (sample variance, probability or mean)
  std_error             jackknife SE for variance targets, else normal/plug-in SE
  ci95_lo, ci95_hi      estimate +- 1.96 * std_error
  replicates            replicate count
  master_seed           master seed of the run
  <extras>              estimator-specific columns, sorted by name (n, k,
                        efron_stein_upper, p_in_i, pairs_checked, ...)
The file starts with '# producer=... seed=... config_hash=...'.")]
struct SimulateArgs {
    /// variance|eventE|drift|slope|matches|condvarN
    #[arg(long)]
    experiment: Option<String>,
    /// Alphabet size m (shared letters).
    #[arg(long)]
    m: Option<usize>,
    /// Extra-letter probability, decimal (e.g. 0.5, 1e-6).
    #[arg(long)]
    p: Option<String>,
    /// Word length n.
    #[arg(long)]
    n: Option<usize>,
    /// Replicate count.
    #[arg(long)]
    reps: Option<u64>,
    /// Master seed (default: LCSVAR_SEED or 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Chain length for drift/matches.
    #[arg(long)]
    k: Option<usize>,
    /// Slope constant override for the slope experiment.
    #[arg(long = "K")]
    slope_k: Option<f64>,
    /// Window length override for the slope experiment.
    #[arg(long)]
    h: Option<f64>,
    /// All-matched fraction override (default: ledger nu = 1/2m).
    #[arg(long)]
    nu: Option<f64>,
    /// Unmatched-proportion override feeding lambda (matches experiment).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Compartment threshold override feeding lambda (matches experiment).
    #[arg(long = "D")]
    d: Option<u64>,
    /// JSON config file (flag values override file values); also accepts a
    /// previously written manifest.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Which format to print on stdout.
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    out: String,
    /// Output directory (default: runs/simulate-<config-hash>).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value = "0.5")]
    p: String,
    /// Partial C10 (min Var LC_n / n over a small-n range) to fold into
    /// the lower-bound constant C = min(C9, C10).
    #[arg(long)]
    c10: Option<f64>,
    /// Print only the JSON ledger (default prints JSON then the table).
    #[arg(long)]
    json_only: bool,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value = "0.5")]
    p: String,
    /// Single length: print the exact LC_n law.
    #[arg(long)]
    n: Option<usize>,
    /// Tabulate exact Var LC_n for n = 1..=n_max.
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    out: String,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value = "0.5")]
    p: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Stream index of the chain randomness.
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Also materialize and print the length-k word.
    #[arg(long)]
    k: Option<usize>,
    /// Also compute the LCS profile against a sampled Y-word
    /// (stream + 1) and print it as CSV.
    #[arg(long)]
    profile: bool,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Tiny grid, runs in well under a minute (default).
    #[arg(long)]
    quick: bool,
    /// Monte Carlo-scale grid on top of the quick tier.
    #[arg(long, conflicts_with = "quick")]
    full: bool,
    #[arg(long)]
    seed: Option<u64>,
}

fn default_seed() -> u64 {
    std::env::var("LCSVAR_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn exit_code_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<lcsvar::Error>() {
        Some(lcsvar::Error::BudgetExceeded(_)) => 3,
        Some(
            lcsvar::Error::InvalidParams(_)
            | lcsvar::Error::OutOfRange(_)
            | lcsvar::Error::ConfigParse(_)
            | lcsvar::Error::EmptySlopeWindow(_),
        ) => 2,
        Some(_) => 1,
        None => 1,
    }
}

fn write_output(dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    std::fs::write(dir.join(name), contents)
        .with_context(|| format!("writing {}", dir.join(name).display()))?;
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let file_part = match &args.config {
        Some(path) => load_config_file(path)?,
        None => PartialConfig::default(),
    };
    let flag_part = PartialConfig {
        experiment: args.experiment,
        m: args.m,
        p: args.p.map(serde_json::Value::String),
        n: args.n,
        reps: args.reps,
        seed: args.seed,
        k: args.k,
        slope_k: args.slope_k,
        h: args.h,
        nu: args.nu,
        epsilon: args.epsilon,
        d: args.d,
    };
    let resolved = ResolvedConfig::from_partial(file_part.overlay(flag_part), default_seed())?;
    let kind = resolved.kind()?;
    let cfg = resolved.experiment_config()?;
    let hash = resolved.hash();
    let out_dir = args
        .out_dir
        .unwrap_or_else(|| PathBuf::from(format!("runs/simulate-{hash}")));

    // Manifest goes out before any result.
    let manifest = RunManifest::new(
        "simulate",
        resolved,
        vec!["results.csv".into(), "results.json".into()],
    );
    write_output(
        &out_dir,
        "manifest.json",
        &format!("{}\n", serde_json::to_string_pretty(&manifest)?),
    )?;

    let summary = run_experiment(kind, &cfg)?;
    eprintln!(
        "{}: estimate = {}, se = {}, {} replicates in {:.2}s",
        summary.experiment,
        summary.estimate,
        summary.std_error,
        summary.replicates,
        summary.wall_time_s
    );
    if let Some(note) = &summary.note {
        eprintln!("note: {note}");
    }

    let violations = summary.invariant_violations();
    let header = report::provenance_header("simulate", cfg.master_seed, &hash);
    let csv = format!(
        "{header}{}",
        report::summaries_to_csv(std::slice::from_ref(&summary))
    );
    let json = report::summaries_to_json("simulate", cfg.master_seed, &hash, &[summary]);
    write_output(&out_dir, "results.csv", &csv)?;
    write_output(&out_dir, "results.json", &format!("{json}\n"))?;
    match args.out.as_str() {
        "json" => println!("{json}"),
        _ => print!("{csv}"),
    }
    eprintln!("wrote {}", out_dir.display());
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("invariant violation: {v}");
        }
        anyhow::bail!(lcsvar::Error::LedgerInvariant(format!(
            "{} embedded invariant check(s) failed",
            violations.len()
        )));
    }
    Ok(())
}

fn run_bounds(args: BoundsArgs) -> anyhow::Result<()> {
    let params = ModelParams::from_decimal(args.m, &args.p)?;
    let mut ledger = build_ledger(&params)?;
    ledger.c10_partial = args.c10;
    let hash = hash_json(&serde_json::json!({
        "m": args.m, "p": args.p, "c10": args.c10,
    }));
    let mut body = serde_json::to_value(&ledger)?;
    body["schema_version"] = serde_json::json!(1);
    body["producer"] = serde_json::json!("bounds");
    body["config_hash"] = serde_json::json!(hash);
    if let Some(c10) = args.c10 {
        let c = ledger.lower_bound_constant(c10)?;
        body["C"] = serde_json::json!(c);
    }
    let json = serde_json::to_string_pretty(&body)?;
    println!("{json}");
    if !args.json_only {
        println!("\n{}", ledger.to_table());
    }
    if let Some(dir) = args.out_dir {
        write_output(&dir, "bounds.json", &format!("{json}\n"))?;
        write_output(
            &dir,
            "bounds.txt",
            &format!(
                "{}{}\n",
                report::provenance_header("bounds", 0, &hash),
                ledger.to_table()
            ),
        )?;
    }
    Ok(())
}

fn run_oracle(args: OracleArgs) -> anyhow::Result<()> {
    let params = ModelParams::from_decimal(args.m, &args.p)?;
    if args.n.is_none() && args.n_max.is_none() {
        anyhow::bail!(lcsvar::Error::InvalidParams(
            "oracle needs --n or --n-max".into()
        ));
    }
    let hash = hash_json(&serde_json::json!({
        "m": args.m, "p": args.p, "n": args.n, "n_max": args.n_max,
    }));
    let header = report::provenance_header("oracle", 0, &hash);
    if let Some(n) = args.n {
        let dist = exact_lc_distribution(&params, n)?;
        eprintln!(
            "LC_{n} at m = {}, p = {}: mean = {}, variance = {}",
            args.m,
            args.p,
            dist.mean_f64(),
            dist.variance_f64()
        );
        let csv = report::distribution_to_csv(n, &dist);
        let mut json_value: serde_json::Value =
            serde_json::from_str(&report::distribution_to_json(n, &dist))?;
        json_value["producer"] = serde_json::json!("oracle");
        json_value["config_hash"] = serde_json::json!(hash);
        let json = serde_json::to_string_pretty(&json_value)?;
        match args.out.as_str() {
            "json" => println!("{json}"),
            _ => print!("{csv}"),
        }
        if let Some(dir) = &args.out_dir {
            write_output(
                dir,
                &format!("lc_distribution_n{n}.csv"),
                &format!("{header}{csv}"),
            )?;
            write_output(
                dir,
                &format!("lc_distribution_n{n}.json"),
                &format!("{json}\n"),
            )?;
        }
    }
    if let Some(n_max) = args.n_max {
        let table = exact_variance_table(&params, n_max)?;
        let csv = report::variance_table_to_csv(&table);
        match args.out.as_str() {
            "json" => println!("{}", serde_json::to_string_pretty(&table)?),
            _ => print!("{csv}"),
        }
        if let Some(dir) = &args.out_dir {
            write_output(dir, "variance_table.csv", &format!("{header}{csv}"))?;
        }
    }
    Ok(())
}

fn run_chain(args: ChainArgs) -> anyhow::Result<()> {
    let params = ModelParams::from_decimal(args.m, &args.p)?;
    let seed = args.seed.unwrap_or_else(default_seed);
    let hash = hash_json(&serde_json::json!({
        "m": args.m, "p": args.p, "n": args.n, "seed": seed, "stream": args.stream,
    }));
    let chain = build_chain(&params, args.n, SeedSpec::new(seed, args.stream))?;
    let chain_json = serde_json::to_string_pretty(&chain)?;
    println!("{chain_json}");
    if let Some(k) = args.k {
        let z = chain.materialize(k)?;
        println!("{}", serde_json::json!({ "k": k, "Z": z }));
        eprintln!("Z^({k}) text: {}", z.to_text_line()?);
    }
    let mut profile_csv = None;
    if args.profile {
        let y = sample_y_word(&params, args.n, SeedSpec::new(seed, args.stream + 1));
        let profile = lcs_profile(&chain, &y);
        let csv = report::profile_to_csv(&profile);
        print!("{csv}");
        profile_csv = Some(csv);
    }
    if let Some(dir) = args.out_dir {
        let wrapped = serde_json::json!({
            "schema_version": 1,
            "producer": "chain",
            "master_seed": seed,
            "config_hash": hash,
            "chain": chain,
        });
        write_output(
            &dir,
            "chain.json",
            &format!("{}\n", serde_json::to_string_pretty(&wrapped)?),
        )?;
        if let Some(csv) = profile_csv {
            let header = report::provenance_header("chain", seed, &hash);
            write_output(&dir, "profile.csv", &format!("{header}{csv}"))?;
        }
    }
    Ok(())
}

fn run_verify(args: VerifyArgs) -> anyhow::Result<i32> {
    let seed = args.seed.unwrap_or_else(default_seed);
    let outcomes = if args.full {
        verification::full_suite(seed)
    } else {
        verification::quick_suite(seed)
    };
    let mut failures = 0;
    for outcome in &outcomes {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} {} - {}", outcome.name, outcome.detail);
        if !outcome.passed {
            failures += 1;
        }
    }
    if failures > 0 {
        eprintln!("{failures} of {} checks failed", outcomes.len());
        Ok(1)
    } else {
        eprintln!("all {} checks passed", outcomes.len());
        Ok(0)
    }
}

fn main() {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: could not configure {} threads: {e}", cli.threads);
            std::process::exit(1);
        }
    }
    let result: anyhow::Result<i32> = match cli.command {
        Command::Simulate(args) => run_simulate(args).map(|_| 0),
        Command::Bounds(args) => run_bounds(args).map(|_| 0),
        Command::Oracle(args) => run_oracle(args).map(|_| 0),
        Command::Chain(args) => run_chain(args).map(|_| 0),
        Command::Verify(args) => run_verify(args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(exit_code_for(&err));
        }
    }
}
