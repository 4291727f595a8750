//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input or config, 2 runtime failure,
//! 3 audit violations.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use susco::auction::audit::{run_audit, AuditCheck, AuditOptions, AuditReport};
use susco::baselines::SchemeChoice;
use susco::constellation::Preset;
use susco::sim::{output, run_scenario, ScenarioConfig, Simulation, SWEEPABLE};
use susco::Error;

const OUT_DIR_ENV: &str = "SUSCO_OUT_DIR";

#[derive(Parser)]
#[command(name = "susco", version, about = "Satellite-to-dish offloading auctions and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write metrics, transcript and summary.
    Run(RunArgs),
    /// Run a scenario over a grid of parameter values and seeds.
    Sweep(SweepArgs),
    /// Check the mechanism's economic properties on random instances.
    Audit(AuditArgs),
    /// List the constellation presets.
    Presets,
    /// Parse and validate a config without running it.
    ValidateConfig { config: PathBuf },
}

#[derive(Args)]
struct OutDir {
    /// Output directory [env: SUSCO_OUT_DIR, default: susco-out]
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl OutDir {
    fn resolve(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("susco-out"))
    }
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    intervals: Option<u32>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct SweepArgs {
    config: PathBuf,
    /// One of: budget, unreliable_failure_rate, unreliable_fraction, scheme, seed, num_intervals
    #[arg(long)]
    param: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    values: Vec<String>,
    /// Comma-separated seeds; defaults to the config's seed.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long, default_value_t = 10_000)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated subset of: individual-rationality, budget,
    /// constraints, monotonicity, truthfulness, critical-value
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    /// Where a failing instance is written.
    #[command(flatten)]
    out: OutDir,
    /// Subtract this amount from every dish payment (fault injection).
    #[arg(long, hide = true, default_value_t = 0.0)]
    underpay: f64,
}

enum Failure {
    Input(String),
    Runtime(String),
    Violations,
}

impl Failure {
    fn setup(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::Io { .. } | Error::Catalog { .. } => Failure::Input(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn load_config(path: &Path) -> Result<ScenarioConfig, Failure> {
    ScenarioConfig::from_file(path).map_err(Failure::setup)
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let mut cfg = load_config(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(s) = &args.scheme {
        cfg.scheme = s.parse::<SchemeChoice>().map_err(Failure::setup)?;
    }
    if let Some(n) = args.intervals {
        cfg.num_intervals = n;
    }
    let mut sim = Simulation::new(cfg.clone()).map_err(Failure::setup)?;
    sim.run().map_err(|e| Failure::Runtime(e.to_string()))?;
    let result = sim.into_result();
    let dir = args.out.resolve();
    output::write_outputs(&dir, &result, Some(&cfg)).map_err(|e| Failure::Runtime(e.to_string()))?;
    print!("{}", result.summary.to_text());
    println!("outputs written to {}", dir.display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let base = load_config(&args.config)?;
    if !SWEEPABLE.contains(&args.param.as_str()) {
        return Err(Failure::Input(format!(
            "unknown sweep parameter `{}` (expected one of {})",
            args.param,
            SWEEPABLE.join(", ")
        )));
    }
    let values: Vec<&str> = args.values.iter().map(|v| v.trim()).filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        return Err(Failure::Input("--values needs at least one value".into()));
    }
    let seeds = if args.seeds.is_empty() { vec![base.seed] } else { args.seeds.clone() };
    let mut cells = Vec::new();
    for v in &values {
        for s in &seeds {
            let mut cfg = base.clone();
            cfg.set_param(&args.param, v).map_err(Failure::setup)?;
            cfg.seed = *s;
            cells.push((v.to_string(), *s, cfg));
        }
    }
    // catch a bad catalog before any output is written
    Simulation::new(base.clone()).map_err(Failure::setup)?;

    let out = args.out.resolve();
    std::fs::create_dir_all(&out).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
    let join_path = out.join("sweep.csv");
    let mut join = csv::Writer::from_path(&join_path).map_err(|e| Failure::Runtime(e.to_string()))?;
    join.write_record([
        "param",
        "value",
        "seed",
        "tasks_total",
        "tasks_offloaded",
        "tasks_failed",
        "failed_percentage",
        "mean_reduced_energy",
        "mean_reduced_life_consumption",
        "mean_reduced_latency",
        "mean_utility_cost_ratio",
        "total_payment",
        "out_dir",
    ])
    .map_err(|e| Failure::Runtime(e.to_string()))?;
    for (value, seed, cfg) in cells {
        let dir = out.join(format!("{}={}", args.param, value)).join(format!("seed={seed}"));
        let result = run_scenario(&cfg).map_err(|e| Failure::Runtime(e.to_string()))?;
        output::write_outputs(&dir, &result, Some(&cfg)).map_err(|e| Failure::Runtime(e.to_string()))?;
        let s = &result.summary;
        join.write_record([
            args.param.clone(),
            value.clone(),
            seed.to_string(),
            s.tasks_total.to_string(),
            s.tasks_offloaded.to_string(),
            s.tasks_failed.to_string(),
            s.failed_percentage.to_string(),
            s.reduced_energy.mean.to_string(),
            s.reduced_life_consumption.mean.to_string(),
            s.reduced_latency.mean.to_string(),
            s.utility_cost_ratio.mean.to_string(),
            s.total_payment.to_string(),
            dir.strip_prefix(&out).unwrap_or(&dir).display().to_string(),
        ])
        .map_err(|e| Failure::Runtime(e.to_string()))?;
        println!("{}={value} seed={seed}: failed {:.2}%", args.param, s.failed_percentage);
    }
    join.flush().map_err(|e| Failure::Runtime(e.to_string()))?;
    println!("joined results in {}", join_path.display());
    Ok(())
}

fn print_report(report: &AuditReport) {
    println!("instances: {}  awards: {}", report.instances, report.awards);
    for (check, r) in &report.results {
        let status = if r.violations == 0 { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<24} checks={:<8} violations={:<8} worst={:.3e}",
            check.name(),
            r.checks,
            r.violations,
            r.worst
        );
        if r.violations > 0 {
            if let Some(d) = &r.worst_detail {
                println!("     {d}");
            }
        }
    }
    for (c, n) in &report.constraint_counts {
        println!("     constraint {c}: {n} violation(s)");
    }
}

fn cmd_audit(args: AuditArgs) -> Result<(), Failure> {
    if args.instances == 0 {
        return Err(Failure::Input("--instances must be at least 1".into()));
    }
    let checks = if args.checks.is_empty() {
        AuditCheck::ALL.to_vec()
    } else {
        args.checks
            .iter()
            .map(|c| AuditCheck::from_name(c.trim()).ok_or_else(|| Failure::Input(format!("unknown check `{c}`"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    let report = run_audit(&AuditOptions {
        instances: args.instances,
        seed: args.seed,
        checks,
        underpay: args.underpay,
    });
    print_report(&report);
    if report.passed() {
        return Ok(());
    }
    let dir = args.out.resolve();
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    for check in report.failed_checks() {
        if let Some(inst) = &report.results[&check].smallest_failure {
            let path = dir.join(format!("audit-failure-{}.json", check.name()));
            let json = serde_json::to_string_pretty(inst).expect("instance serialises");
            std::fs::write(&path, json).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
            println!("minimal failing instance for {}: {}", check.name(), path.display());
        }
    }
    Err(Failure::Violations)
}

fn cmd_presets() {
    println!("{:<12} {:>6} {:>6} {:>8} {:>8} {:>8} {:>8}", "name", "orbits", "sats", "alt_km", "incl", "phase", "min_el");
    for p in Preset::ALL {
        let c = p.config();
        println!(
            "{:<12} {:>6} {:>6} {:>8} {:>8} {:>8} {:>8}",
            p.name(),
            c.num_orbits,
            c.sats_per_orbit,
            c.altitude,
            c.inclination,
            c.phasing_offset,
            c.min_elevation
        );
    }
}

fn cmd_validate(path: &Path) -> Result<(), Failure> {
    let cfg = load_config(path)?;
    Simulation::new(cfg.clone()).map_err(Failure::setup)?;
    let c = cfg.constellation_config();
    println!(
        "ok: {} satellites, scheme {}, {} intervals, catalog {}",
        c.len(),
        cfg.scheme,
        cfg.num_intervals,
        cfg.catalog_path().display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Audit(a) => cmd_audit(a),
        Command::Presets => {
            cmd_presets();
            Ok(())
        }
        Command::ValidateConfig { config } => cmd_validate(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Violations) => {
            eprintln!("audit found violations");
            ExitCode::from(3)
        }
    }
}
