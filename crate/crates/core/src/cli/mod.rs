//! Command-line front end.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches, Command};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::fixed_point::{iterate_to_fixed_point, purification_regime};
use crate::model::GraphDiagonalState;
use crate::noise::NoiseModel;
use crate::oracle::{run_oracle_check, AnalyticMaps, Reference};
use crate::protocols::{
    blind_overhead, optimize_strategy_with, run_blind_topped, run_innsbruck, run_standard, LevelReport,
    OptimizerOptions, ProtocolKind,
};

use config::{RunConfig, Settings, KEYS};
use output::{Cell, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] crate::Error),
    #[error("oracle mismatch:\n{0}")]
    OracleMismatch(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::OracleMismatch(_) => 3,
        }
    }

    pub(crate) fn io(e: impl std::fmt::Display) -> Self {
        CliError::Io(e.to_string())
    }
}

const SUBCOMMANDS: [(&str, &str); 5] = [
    ("regime", "purification regime per level"),
    ("standard", "level-by-level run of the configured protocol"),
    ("pump-sweep", "maximal pumping level over an error-rate sweep"),
    ("blind", "blind-mode overhead table"),
    ("oracle-check", "compare the analytic maps with the dense simulation"),
];

pub fn command() -> Command {
    let mut cmd = Command::new("qrepeater")
        .about("Noisy nested quantum repeater simulation")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .global(true)
                .help("key = value configuration file"),
        )
        .arg(
            Arg::new("output")
                .long("output")
                .value_name("PATH")
                .global(true)
                .help("write the table here instead of stdout"),
        )
        .arg(
            Arg::new("format")
                .long("format")
                .value_parser(["csv", "json"])
                .global(true)
                .help("output format"),
        )
        .arg(Arg::new("seed").long("seed").value_name("INT").global(true).help("random seed"));
    for k in KEYS {
        if matches!(k.name, "seed" | "output.path" | "output.format") {
            continue;
        }
        let help = if k.default.is_empty() {
            k.help.to_string()
        } else {
            format!("{} [default: {}]", k.help, k.default)
        };
        cmd = cmd.arg(
            Arg::new(k.name)
                .long(k.name)
                .value_name("VALUE")
                .global(true)
                .action(ArgAction::Set)
                .help(help),
        );
    }
    for (name, about) in SUBCOMMANDS {
        cmd = cmd.subcommand(Command::new(name).about(about));
    }
    cmd
}

fn settings_from(matches: &ArgMatches) -> Result<Settings, CliError> {
    let mut settings = Settings::new();
    if let Some(path) = matches.get_one::<String>("config") {
        settings.merge_file(&PathBuf::from(path))?;
    }
    for k in KEYS {
        let flag = match k.name {
            "output.path" => "output",
            "output.format" => "format",
            other => other,
        };
        if let Some(v) = matches.get_one::<String>(flag) {
            settings.set(k.name, v)?;
        }
    }
    Ok(settings)
}

/// Parses `args`, runs the subcommand and returns the process exit code.
/// Tables go to `--output` or `stdout`, diagnostics to `stderr`.
pub fn execute<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    execute_with_maps(args, &Reference, stdout, stderr)
}

/// [`execute`] with the process arguments and standard streams.
pub fn main_exit_code() -> i32 {
    execute(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

fn dispatch(matches: &ArgMatches, maps: &dyn AnalyticMaps, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (name, _) = matches.subcommand().expect("subcommand required");
    let config = RunConfig::from_settings(settings_from(matches)?)?;
    let table = run_subcommand(name, &config, maps)?;
    emit(&table, &config, stdout)
}

/// Runs one subcommand on a resolved configuration. `maps` is only used by
/// `oracle-check`.
pub fn run_subcommand(name: &str, config: &RunConfig, maps: &dyn AnalyticMaps) -> Result<Table, CliError> {
    let mut table = match name {
        "regime" => cmd_regime(config)?,
        "standard" => cmd_standard(config)?,
        "pump-sweep" => cmd_pump_sweep(config)?,
        "blind" => cmd_blind(config)?,
        "oracle-check" => cmd_oracle_check(config, maps)?,
        other => return Err(CliError::Config(format!("unknown subcommand `{other}`"))),
    };
    let mut params: Map<String, Value> = config
        .settings
        .values()
        .iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    params.insert("command".into(), json!(name));
    params.append(&mut table.params);
    table.params = params;
    Ok(table)
}

fn emit(table: &Table, config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &config.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            table.write(config.format, &mut w)?;
            w.flush().map_err(CliError::io)
        }
        None => table.write(config.format, stdout),
    }
}

pub fn cmd_regime(config: &RunConfig) -> Result<Table, CliError> {
    let reports = (1..=config.regime_levels)
        .into_par_iter()
        .map(|l| purification_regime(l, &config.time, &config.noise, Some(config.pump_f)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&["level", "min_fidelity", "max_fidelity", "max_fidelity_pumping"]);
    for r in reports {
        t.push(vec![
            r.level.into(),
            Cell::opt(r.min_fidelity),
            Cell::opt(r.max_fidelity),
            Cell::opt(r.max_fidelity_pumping),
        ]);
    }
    Ok(t)
}

pub fn cmd_standard(config: &RunConfig) -> Result<Table, CliError> {
    let spec = &config.protocol;
    let mut t = Table::new(&["level", "resources", "fidelity", "elapsed"]);
    let reports: Vec<LevelReport> = match spec.kind {
        ProtocolKind::Standard => run_standard(spec, &config.time, &config.noise)?,
        ProtocolKind::Innsbruck => run_innsbruck(spec, &config.time, &config.noise)?,
        ProtocolKind::BlindTopped => {
            let run = run_blind_topped(spec, &config.time, &config.noise)?;
            t.params.insert("blind_p_suc".into(), json!(run.p_suc));
            t.params.insert("blind_overhead".into(), json!(run.overhead.overhead));
            run.reports
        }
    };
    for r in reports {
        let fidelity = if r.within_regime() { Cell::Num(r.fidelity) } else { Cell::Empty };
        t.push(vec![r.level.into(), r.resources.into(), fidelity, r.elapsed.into()]);
    }
    Ok(t)
}

/// Level-1 pumping limit with the given noise: the best fidelity pumping
/// with these elementary pairs can deliver.
fn pumping_bound(config: &RunConfig, model: &NoiseModel) -> Result<f64, CliError> {
    let elem = GraphDiagonalState::werner(config.protocol.initial.fidelity())?;
    let wait = config.time.signal_time(1) + config.time.gate_time;
    Ok(iterate_to_fixed_point(&elem, Some(&elem), wait, model)?.fidelity())
}

pub fn cmd_pump_sweep(config: &RunConfig) -> Result<Table, CliError> {
    let grid: Vec<(f64, f64)> = config
        .sweep
        .coherence_times
        .iter()
        .flat_map(|&t| config.sweep.error_rates.iter().map(move |&e| (t, e)))
        .collect();
    let opts = OptimizerOptions {
        level_cap: config.level_cap,
        max_steps: config.max_steps,
        branching: config.protocol.branching,
        min_fidelity: config.min_fidelity,
    };
    let rows = grid
        .par_iter()
        .map(|&(coherence, error)| -> Result<Vec<Cell>, CliError> {
            let model = NoiseModel::new(1.0 - error, 1.0 - error, 1.0 / coherence)?.with_memory(config.noise.memory);
            let s = optimize_strategy_with(&config.time, &model, config.protocol.initial, &opts)?;
            let strategy = s.steps.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("-");
            let fidelity = if s.max_level == 0 { Cell::Empty } else { Cell::Num(s.fidelity) };
            Ok(vec![
                coherence.into(),
                error.into(),
                s.max_level.into(),
                fidelity,
                Cell::Text(strategy),
                pumping_bound(config, &model)?.into(),
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&[
        "coherence_time_s",
        "error_rate",
        "max_level",
        "fidelity",
        "strategy",
        "fixed_point_fidelity",
    ]);
    for row in rows {
        t.push(row);
    }
    Ok(t)
}

pub fn cmd_blind(config: &RunConfig) -> Result<Table, CliError> {
    let b = &config.blind;
    let mut t = Table::new(&["steps", "branching", "blind_levels", "p_suc", "overhead", "distance_gain"]);
    for &p in &b.p_suc {
        for &m in &b.levels {
            let o = blind_overhead(b.steps, b.branching, m, p).map_err(|e| CliError::Config(e.to_string()))?;
            t.push(vec![
                b.steps.into(),
                b.branching.into(),
                m.into(),
                p.into(),
                o.overhead.into(),
                o.distance_gain.into(),
            ]);
        }
    }
    Ok(t)
}

pub fn cmd_oracle_check(config: &RunConfig, maps: &dyn AnalyticMaps) -> Result<Table, CliError> {
    let report = run_oracle_check(maps, config.oracle_samples, config.seed)?;
    if !report.passed() {
        return Err(CliError::OracleMismatch(report.to_string()));
    }
    let mut t = Table::new(&["quantity", "max_deviation"]);
    for (name, d) in report.deviations() {
        t.push(vec![Cell::Text(name.into()), d.into()]);
    }
    t.params.insert("cases".into(), json!(report.cases));
    Ok(t)
}

/// [`execute`] with a replacement for the analytic maps, for negative
/// controls of `oracle-check`.
pub fn execute_with_maps<I, T>(args: I, maps: &dyn AnalyticMaps, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&matches, maps, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
