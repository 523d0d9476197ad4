//! The `seqbh` command-line front end.
//!
//! `ladder` prints Wald critical values, `bh` applies fixed-sample BH to
//! p-values, `simulate` runs Monte Carlo scenarios from a JSON file, and `run`
//! applies the procedure to tab-separated observations.

pub mod config;
pub mod engine;
pub mod table;

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::simulation::{fixed_sample_bh, Experiment, Variant, THREADS_ENV};
use crate::statistics::{
    rejective_wald_ladder_with, sbh_wald_ladder_with, sbh_wald_rows, Overshoot, WaldConfig,
};

pub use config::{RunConfig, SimulationConfig, StreamStatistic};
pub use engine::{format_observations, run_stream, Event, RunEngine};
pub use table::{report_table, Format, Table};

/// Exit status when the input ends before every stream has a verdict.
pub const EXIT_INCOMPLETE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "seqbh", version, about = "Sequential Benjamini-Hochberg multiple testing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Wald critical-value ladder.
    Ladder(LadderArgs),
    /// Apply fixed-sample BH to p-values from the arguments or stdin.
    Bh(BhArgs),
    /// Run the Monte Carlo scenarios of a JSON config.
    Simulate(SimulateArgs),
    /// Apply the procedure to `t<TAB>k<TAB>value` observations.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Full,
    Rejective,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Full => Variant::Full,
            VariantArg::Rejective => Variant::Rejective,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OvershootArg {
    Outward,
    Inward,
}

impl From<OvershootArg> for Overshoot {
    fn from(o: OvershootArg) -> Self {
        match o {
            OvershootArg::Outward => Overshoot::Outward,
            OvershootArg::Inward => Overshoot::Inward,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long = "out", value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Align Markdown columns or indent JSON.
    #[arg(long)]
    pub pretty: bool,
}

#[derive(Debug, Clone, Args)]
pub struct LadderArgs {
    /// Number of streams.
    #[arg(short, long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    #[arg(long, value_enum, default_value_t = OvershootArg::Outward)]
    pub overshoot: OvershootArg,
    #[arg(long, value_enum, default_value_t = VariantArg::Full)]
    pub variant: VariantArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BhArgs {
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// P-values; read from stdin (whitespace or comma separated) when absent.
    pub p_values: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Scenario file (JSON).
    pub config: PathBuf,
    /// Override the number of replications of every scenario.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Override every scenario's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the overshoot correction.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Truncation point for the rejective variant.
    #[arg(long)]
    pub truncation: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Hypotheses and ladders (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Observation file; stdin when absent or `-`.
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    #[arg(long)]
    pub truncation: Option<u64>,
}

fn read_config(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::config(path.display().to_string(), format!("cannot read: {e}")))
}

fn write_table(table: &Table, output: &OutputArgs, out: &mut dyn Write) -> Result<()> {
    match output.format {
        Format::Csv => table.write_csv(out),
        Format::Md => table.write_markdown(out, output.pretty),
        Format::Json => {
            let rows: Vec<serde_json::Map<String, serde_json::Value>> = table
                .rows
                .iter()
                .map(|r| {
                    table
                        .headers
                        .iter()
                        .cloned()
                        .zip(r.iter().cloned().map(serde_json::Value::String))
                        .collect()
                })
                .collect();
            table::write_json(&rows, out, output.pretty)
        }
    }
}

/// Runs one parsed command, returning the process exit status.
pub fn execute(cli: Cli, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Ladder(a) => ladder(&a, out).map(|_| 0),
        Command::Bh(a) => bh(&a, stdin, out).map(|_| 0),
        Command::Simulate(a) => simulate(&a, out).map(|_| 0),
        Command::Run(a) => run(&a, stdin, out),
    }
}

fn ladder(a: &LadderArgs, out: &mut dyn Write) -> Result<()> {
    let fmt = |x: f64| x.to_string();
    match a.variant {
        VariantArg::Full => {
            let cfg = WaldConfig::new(a.alpha, a.beta, a.k, a.rho)?;
            let rows = sbh_wald_rows(&cfg)?;
            let ladder = sbh_wald_ladder_with(&cfg, a.overshoot.into())?;
            if a.output.format == Format::Json {
                let json: Vec<_> = rows
                    .iter()
                    .map(|r| {
                        serde_json::json!({
                            "s": r.s, "a": ladder.a(r.s), "b": ladder.b(r.s),
                            "alpha_s": r.alpha_s, "beta_s": r.beta_s,
                        })
                    })
                    .collect();
                return table::write_json(&json, out, a.output.pretty);
            }
            let mut t = Table::new(["s", "A_s", "B_s", "alpha_s", "beta_s"]);
            for r in &rows {
                t.push(vec![
                    r.s.to_string(),
                    fmt(ladder.a(r.s)),
                    fmt(ladder.b(r.s)),
                    fmt(r.alpha_s),
                    fmt(r.beta_s),
                ]);
            }
            write_table(&t, &a.output, out)
        }
        VariantArg::Rejective => {
            let ladder = rejective_wald_ladder_with(a.alpha, a.k, a.rho, a.overshoot.into())?;
            if a.output.format == Format::Json {
                let json: Vec<_> = (1..=a.k)
                    .map(|s| {
                        serde_json::json!({
                            "s": s, "b": ladder.b(s), "level": s as f64 * a.alpha / a.k as f64,
                        })
                    })
                    .collect();
                return table::write_json(&json, out, a.output.pretty);
            }
            let mut t = Table::new(["s", "B_s", "level"]);
            for s in 1..=a.k {
                t.push(vec![
                    s.to_string(),
                    fmt(ladder.b(s)),
                    fmt(s as f64 * a.alpha / a.k as f64),
                ]);
            }
            write_table(&t, &a.output, out)
        }
    }
}

fn parse_p_values(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Usage(format!("invalid p-value {s:?}")))
        })
        .collect()
}

fn bh(a: &BhArgs, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<()> {
    let p = if a.p_values.is_empty() {
        let mut text = String::new();
        stdin.read_to_string(&mut text)?;
        parse_p_values(&text)?
    } else {
        a.p_values.clone()
    };
    let rejected = fixed_sample_bh(&p, a.alpha)?;
    let mut t = Table::new(["stream", "p_value", "rejected"]);
    for (k, pk) in p.iter().enumerate() {
        t.push(vec![
            k.to_string(),
            pk.to_string(),
            rejected.binary_search(&k).is_ok().to_string(),
        ]);
    }
    write_table(&t, &a.output, out)
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let source = a.config.display().to_string();
    let mut cfg = SimulationConfig::parse(&source, &read_config(&a.config)?)?;
    for s in &mut cfg.scenarios {
        if let Some(r) = a.reps {
            s.replications = r;
        }
        if let Some(seed) = a.seed {
            s.seed = seed;
        }
        if a.rho.is_some() {
            s.rho = a.rho;
        }
        if let Some(v) = a.variant {
            s.variant = v.into();
        }
        if a.truncation.is_some() {
            s.truncation = a.truncation;
        }
    }
    cfg.validate()?;
    let threads = a.threads.filter(|&t| t > 0);
    let reports = cfg
        .scenarios
        .iter()
        .map(|s| Experiment::new(s)?.run(threads))
        .collect::<Result<Vec<_>>>()?;
    match a.output.format {
        Format::Json => table::write_json(&reports, out, a.output.pretty),
        _ => write_table(&report_table(&reports), &a.output, out),
    }
}

fn run(a: &RunArgs, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<i32> {
    let source = a.config.display().to_string();
    let mut cfg: RunConfig = RunConfig::parse(&source, &read_config(&a.config)?)?;
    if a.rho.is_some() {
        cfg.rho = a.rho;
    }
    if let Some(v) = a.variant {
        cfg.variant = v.into();
    }
    if a.truncation.is_some() {
        cfg.truncation = a.truncation;
    }
    let complete = match &a.input {
        Some(path) if path.as_os_str() != "-" => {
            let file = fs::File::open(path).map_err(|e| {
                Error::Usage(format!("cannot open {}: {e}", path.display()))
            })?;
            run_stream(&cfg, &mut BufReader::new(file), out)?
        }
        _ => run_stream(&cfg, stdin, out)?,
    };
    Ok(if complete { 0 } else { EXIT_INCOMPLETE })
}
