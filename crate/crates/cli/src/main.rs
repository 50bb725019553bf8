//! Command-line front end: signal analysis, almost-period scans, system
//! solves, and the experiment registry.
//!
//! Exit codes: 0 success, 1 failed experiment verdicts, 2 configuration
//! errors (parse failures, unknown keys or names), 3 numeric guard
//! violations (non-positive steps, tolerances or empty ranges), 4 hypothesis
//! violations (non-hyperbolic spectrum, unbounded forcing).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use recurlab::lab::{self, Cell, LabConfig, LabError, Report, Table};
use recurlab::neutral::{bounded_solution_on, ivp_solve, DichotomyOptions, Trajectory};
use recurlab::scan::{
    self, almost_period_set, recurrence_ladder, scan_profile, GapPolicy, ScanOptions,
};
use recurlab::{ProbeWindow, ScanError, Signal, SignalSpec, SolveError, SystemSpec, C64};

const OUT_ENV: &str = "RECURLAB_OUT";

#[derive(Parser)]
#[command(name = "recurlab", version, about = "Recurrence laboratory: almost-period scans, recurrence ladders, and bounded solutions of difference-differential systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (default: $RECURLAB_OUT or ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for scans and solves.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output format for tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Override the τ/window grid step.
    #[arg(long, global = true, allow_negative_numbers = true)]
    step: Option<f64>,
    /// Override the scan range end.
    #[arg(long, global = true, allow_negative_numbers = true)]
    range: Option<f64>,
    /// Override the recurrence-ladder depth.
    #[arg(long = "ladder-depth", global = true)]
    ladder_depth: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a signal: ladder, uniform-continuity modulus, range net,
    /// ergodic mean. INPUT is a config path, inline JSON, or a builtin name.
    Analyze {
        input: Option<String>,
        /// Config document path (alternative to the positional input).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Almost-period scan; writes per-shift rows and the member list.
    Scan {
        input: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Solve a system: bounded solution on the line or initial-value march.
    Solve {
        input: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run named experiments from the registry ("all" for every one).
    Verify {
        names: Vec<String>,
        /// Experiment configuration overrides (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print the verdicts of a stored report and re-emit its tables.
    Report { input: PathBuf },
}

/// Merges the positional input with the `--config` flag.
fn resolve_input(input: &Option<String>, config: &Option<PathBuf>) -> Result<String, CliError> {
    match (input, config) {
        (Some(_), Some(_)) => Err(CliError::Config(
            "give either a positional input or --config, not both".into(),
        )),
        (Some(i), None) => Ok(i.clone()),
        (None, Some(path)) => Ok(path.to_string_lossy().into_owned()),
        (None, None) => Err(CliError::Config("missing input: pass a document or --config PATH".into())),
    }
}

enum CliError {
    Config(String),
    Numeric(String),
    Hypothesis(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Hypothesis(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Hypothesis(m) => m,
        }
    }
}

fn classify_scan(err: ScanError) -> CliError {
    match err {
        ScanError::BadStep(_) | ScanError::BadEps(_) | ScanError::EmptyRange(..) => {
            CliError::Numeric(err.to_string())
        }
        other => CliError::Config(other.to_string()),
    }
}

fn classify_solve(err: SolveError) -> CliError {
    match err {
        SolveError::NonHyperbolic { .. } | SolveError::UnboundedForcing(_) => {
            CliError::Hypothesis(err.to_string())
        }
        SolveError::BadStep(_) => CliError::Numeric(err.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn classify_lab(err: LabError) -> CliError {
    match err {
        LabError::Scan(e) => classify_scan(e),
        LabError::Solve(e) => classify_solve(e),
        other => CliError::Config(other.to_string()),
    }
}

/// Signal reference: a builtin name or a full descriptor.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum SignalRef {
    Named(String),
    Spec(SignalSpec),
}

impl SignalRef {
    fn build(&self) -> Result<Signal, CliError> {
        match self {
            SignalRef::Named(name) => SignalSpec::named(name)
                .ok_or_else(|| CliError::Config(format!("unknown builtin signal '{name}'")))?
                .build()
                .map_err(|e| CliError::Config(e.to_string())),
            SignalRef::Spec(spec) => spec.build().map_err(|e| CliError::Config(e.to_string())),
        }
    }

    fn label(&self) -> String {
        match self {
            SignalRef::Named(name) => name.clone(),
            SignalRef::Spec(_) => "signal".to_string(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanDoc {
    eps: f64,
    window: ProbeWindow,
    range: (f64, f64),
    #[serde(default)]
    tau_step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalyzeDoc {
    signal: SignalRef,
    #[serde(default)]
    scan: Option<ScanDoc>,
    #[serde(default)]
    ladder_depth: Option<usize>,
    #[serde(default)]
    uc_window: Option<f64>,
    #[serde(default)]
    uc_deltas: Option<Vec<f64>>,
    #[serde(default)]
    net_eps: Option<f64>,
    #[serde(default)]
    ergodic_ladder: Option<Vec<f64>>,
    #[serde(default)]
    ergodic_probes: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum SolveMode {
    #[default]
    Green,
    Ivp,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveDoc {
    system: SystemSpec,
    forcing: SignalRef,
    #[serde(default)]
    mode: SolveMode,
    #[serde(default)]
    horizon: Option<f64>,
    #[serde(default)]
    interval: Option<(f64, f64)>,
    #[serde(default)]
    step: Option<f64>,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    init: Option<Vec<Vec<[f64; 2]>>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if workers == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(3);
        }
        // Build errors only occur if a pool already exists; harmless here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    if let Some(step) = cli.step {
        if !(step > 0.0) {
            eprintln!("error: --step must be positive");
            return ExitCode::from(3);
        }
    }
    if let Some(range) = cli.range {
        if !(range > 0.0) {
            eprintln!("error: --range must be positive");
            return ExitCode::from(3);
        }
    }
    if let Some(depth) = cli.ladder_depth {
        if depth == 0 {
            eprintln!("error: --ladder-depth must be positive");
            return ExitCode::from(3);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let out_dir = cli
        .out
        .clone()
        .or_else(|| std::env::var(OUT_ENV).ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Config(format!("cannot create output directory: {e}")))?;

    match &cli.command {
        Command::Analyze { input, config } => {
            cmd_analyze(cli, &resolve_input(input, config)?, &out_dir)
        }
        Command::Scan { input, config } => cmd_scan(cli, &resolve_input(input, config)?, &out_dir),
        Command::Solve { input, config } => {
            cmd_solve(cli, &resolve_input(input, config)?, &out_dir)
        }
        Command::Verify { names, config } => cmd_verify(cli, names, config.as_deref(), &out_dir),
        Command::Report { input } => cmd_report(cli, input, &out_dir),
    }
}

/// Reads a document from a path, inline JSON (starting with `{`), or, when
/// `allow_named`, a builtin signal name.
fn load_doc<T: serde::de::DeserializeOwned>(input: &str) -> Result<T, CliError> {
    let text = if input.trim_start().starts_with('{') {
        input.to_string()
    } else {
        fs::read_to_string(input)
            .map_err(|e| CliError::Config(format!("cannot read '{input}': {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config parse error: {e}")))
}

fn analyze_doc(input: &str) -> Result<AnalyzeDoc, CliError> {
    if !input.trim_start().starts_with('{') && !Path::new(input).exists() {
        // Builtin name shorthand.
        if SignalSpec::named(input).is_some() {
            return Ok(AnalyzeDoc {
                signal: SignalRef::Named(input.to_string()),
                scan: None,
                ladder_depth: None,
                uc_window: None,
                uc_deltas: None,
                net_eps: None,
                ergodic_ladder: None,
                ergodic_probes: None,
            });
        }
        return Err(CliError::Config(format!(
            "'{input}' is neither a file, inline JSON, nor a builtin signal name"
        )));
    }
    load_doc(input)
}

fn scan_options(cli: &Cli, doc_step: Option<f64>) -> Result<ScanOptions, CliError> {
    let mut opts = ScanOptions::default();
    if let Some(step) = doc_step.or(cli.step) {
        if !(step > 0.0) {
            return Err(CliError::Numeric(format!("scan step must be positive, got {step}")));
        }
        opts.tau_step = step;
    }
    Ok(opts)
}

fn write_report(report: &Report, out_dir: &Path, format: Format) -> Result<PathBuf, CliError> {
    let path = out_dir.join(format!("{}.report.json", report.experiment));
    fs::write(&path, report.to_json())
        .map_err(|e| CliError::Config(format!("cannot write report: {e}")))?;
    if format == Format::Csv {
        for (name, table) in &report.tables {
            let csv_path = out_dir.join(format!("{}_{}.csv", report.experiment, name));
            fs::write(&csv_path, table.to_csv())
                .map_err(|e| CliError::Config(format!("cannot write table: {e}")))?;
        }
    }
    Ok(path)
}

fn cmd_analyze(cli: &Cli, input: &str, out_dir: &Path) -> Result<ExitCode, CliError> {
    let doc = analyze_doc(input)?;
    let signal = doc.signal.build()?;
    let opts = scan_options(cli, doc.scan.as_ref().and_then(|s| s.tau_step))?;
    let depth = cli.ladder_depth.or(doc.ladder_depth).unwrap_or(2);
    if depth == 0 {
        return Err(CliError::Numeric("ladder depth must be positive".into()));
    }
    let policy = GapPolicy::default();

    let mut report = Report::new(&format!("analyze_{}", doc.signal.label()));
    report.provenance("tau_step", opts.tau_step);
    report.provenance("ladder_depth", depth);

    let ladder = recurrence_ladder(&signal, depth, &policy, &opts).map_err(classify_scan)?;
    let mut ladder_table = Table::new(&["rung", "eps", "window", "range", "members", "max_gap", "gap_bound", "passed"]);
    for (i, r) in ladder.rungs.iter().enumerate() {
        ladder_table.push(vec![
            Cell::int(i as i64 + 1),
            Cell::num(r.eps),
            Cell::text(&r.window),
            Cell::num(r.range_end),
            Cell::int(r.member_count as i64),
            Cell::num(r.max_gap),
            Cell::num(r.gap_bound),
            Cell::flag(r.passed),
        ]);
    }
    let rows: Vec<usize> = (0..ladder_table.rows.len()).collect();
    report.insert_table("ladder", ladder_table);
    report.verdict(&ladder.summary, ladder.passed(), "ladder", rows);

    let uc_window = ProbeWindow::symmetric(doc.uc_window.unwrap_or(5.0));
    let deltas = doc.uc_deltas.unwrap_or_else(|| vec![0.01, 0.05, 0.2]);
    let modulus = scan::uc_modulus(&signal, &uc_window, &deltas).map_err(classify_scan)?;
    let mut uc_table = Table::new(&["delta", "modulus"]);
    for (d, m) in &modulus {
        uc_table.push(vec![Cell::num(*d), Cell::num(*m)]);
    }
    report.insert_table("uc_modulus", uc_table);

    let net_eps = doc.net_eps.unwrap_or(0.1);
    let net = scan::range_net(&signal, &uc_window, net_eps).map_err(classify_scan)?;
    let mut net_table = Table::new(&["eps", "net_size"]);
    net_table.push(vec![Cell::num(net_eps), Cell::int(net as i64)]);
    report.insert_table("range_net", net_table);

    let t_ladder = doc.ergodic_ladder.unwrap_or_else(|| vec![10.0, 40.0, 160.0]);
    let probes = doc.ergodic_probes.unwrap_or_else(|| vec![0.0, 1.0, -2.5]);
    let ergodic = scan::ergodic_mean(&signal, &t_ladder, &probes, 0.05).map_err(classify_scan)?;
    let mut erg_table = Table::new(&["t_half", "sup_deviation"]);
    for (t, dev) in &ergodic.deviations {
        erg_table.push(vec![Cell::num(*t), Cell::num(*dev)]);
    }
    report.insert_table("ergodic_mean", erg_table);
    report.param("ergodic_mean_norm", recurlab::sup_norm(&ergodic.mean));
    report.param("empirically_ergodic", ergodic.empirically_ergodic);

    let path = write_report(&report, out_dir, cli.format)?;
    println!("{}", ladder.summary);
    println!("report written to {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_scan(cli: &Cli, input: &str, out_dir: &Path) -> Result<ExitCode, CliError> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Doc {
        signal: SignalRef,
        scan: ScanDoc,
    }
    let doc: Doc = load_doc(input)?;
    let signal = doc.signal.build()?;
    let opts = scan_options(cli, doc.scan.tau_step)?;
    let mut range = doc.scan.range;
    if let Some(end) = cli.range {
        range.1 = end;
    }

    let set = almost_period_set(&signal, doc.scan.eps, &doc.scan.window, range, &opts)
        .map_err(classify_scan)?;
    let profile = scan_profile(&signal, doc.scan.eps, &doc.scan.window, range, opts.tau_step)
        .map_err(classify_scan)?;

    let profile_path = out_dir.join("scan.csv");
    let mut csv = String::from("tau,sup_dist,accepted\n");
    for (tau, sup, accepted) in &profile {
        csv.push_str(&format!("{tau},{sup},{accepted}\n"));
    }
    fs::write(&profile_path, csv).map_err(|e| CliError::Config(format!("cannot write csv: {e}")))?;

    let members_path = out_dir.join("members.csv");
    let mut csv = String::from("tau\n");
    for tau in &set.members {
        csv.push_str(&format!("{tau}\n"));
    }
    fs::write(&members_path, csv)
        .map_err(|e| CliError::Config(format!("cannot write csv: {e}")))?;

    println!(
        "eps {}: {} member(s), max gap {}, refined {}",
        set.eps,
        set.members.len(),
        if set.max_gap.is_finite() { set.max_gap.to_string() } else { "+inf".into() },
        set.refined,
    );
    println!("profile written to {}", profile_path.display());
    println!("members written to {}", members_path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(_cli: &Cli, input: &str, out_dir: &Path) -> Result<ExitCode, CliError> {
    let doc: SolveDoc = load_doc(input)?;
    let forcing = doc.forcing.build()?;
    let ode = doc.system.build_ode().map_err(classify_solve)?;
    let traj: Trajectory = match doc.mode {
        SolveMode::Green => {
            let interval = doc
                .interval
                .or_else(|| doc.horizon.map(|h| (-h, h)))
                .unwrap_or((-100.0, 100.0));
            bounded_solution_on(&ode, &forcing, interval, &DichotomyOptions::default())
                .map_err(classify_solve)?
        }
        SolveMode::Ivp => {
            let init: Vec<Vec<C64>> = doc
                .init
                .as_ref()
                .ok_or_else(|| CliError::Config("ivp mode requires initial data".into()))?
                .iter()
                .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
                .collect();
            let alpha = doc.alpha.unwrap_or(0.0);
            let horizon = doc.horizon.unwrap_or(100.0);
            let step = doc.step.unwrap_or(recurlab::defaults::MARCH_STEP);
            ivp_solve(&ode, &forcing, &init, alpha, horizon, step).map_err(classify_solve)?
        }
    };

    let csv_path = out_dir.join("trajectory.csv");
    fs::write(&csv_path, traj.to_csv())
        .map_err(|e| CliError::Config(format!("cannot write trajectory: {e}")))?;
    println!(
        "solver {}: sup |y| = {:.6e}, residual (integrated) = {:.3e}, residual (pointwise) = {:.3e}",
        traj.meta.solver, traj.meta.sup_value, traj.meta.residual_mild, traj.meta.residual_strong,
    );
    println!("trajectory written to {}", csv_path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    cli: &Cli,
    names: &[String],
    config: Option<&Path>,
    out_dir: &Path,
) -> Result<ExitCode, CliError> {
    let cfg: LabConfig = match config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config: {e}")))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("config parse error: {e}")))?
        }
        None => LabConfig::default(),
    };
    if names.is_empty() {
        return Err(CliError::Config(
            "no experiment names given; use 'all' or names from the registry".into(),
        ));
    }
    let selected: Vec<&str> = if names.len() == 1 && names[0] == "all" {
        lab::EXPERIMENT_NAMES.to_vec()
    } else {
        let mut list = Vec::new();
        for name in names {
            if !lab::EXPERIMENT_NAMES.contains(&name.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown experiment '{}' (known: {})",
                    name,
                    lab::EXPERIMENT_NAMES.join(", ")
                )));
            }
            list.push(name.as_str());
        }
        list
    };

    let mut all_passed = true;
    for name in selected {
        let report = lab::run_experiment(name, &cfg).map_err(classify_lab)?;
        let path = write_report(&report, out_dir, cli.format)?;
        for v in &report.verdicts {
            println!("[{}] {}: {}", if v.passed { "pass" } else { "FAIL" }, name, v.claim);
        }
        println!("{name}: report written to {}", path.display());
        all_passed &= report.passed();
    }
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_report(cli: &Cli, input: &Path, out_dir: &Path) -> Result<ExitCode, CliError> {
    let text = fs::read_to_string(input)
        .map_err(|e| CliError::Config(format!("cannot read report: {e}")))?;
    let report: Report = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("report parse error: {e}")))?;
    for v in &report.verdicts {
        println!("[{}] {}", if v.passed { "pass" } else { "FAIL" }, v.claim);
    }
    if cli.format == Format::Csv {
        for (name, table) in &report.tables {
            let csv_path = out_dir.join(format!("{}_{}.csv", report.experiment, name));
            fs::write(&csv_path, table.to_csv())
                .map_err(|e| CliError::Config(format!("cannot write table: {e}")))?;
            println!("table written to {}", csv_path.display());
        }
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
