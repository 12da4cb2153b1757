use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use csra::channel::PowerPolicy;
use csra::harness::output::{write_csv, write_json};
use csra::harness::{presets, run_campaign, ConfigError, HarnessError, SimConfig, SweepPoint};
use csra::receiver::{FootprintMode, Scheme};

/// Monte Carlo packet loss rate simulator for coded spatial random access.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// One (K, R) point with the configured scheme and SIC setting.
    Single,
    /// Sweep the number of active users at fixed R.
    SweepK {
        #[arg(long, value_delimiter = ',', default_values_t = [20, 25, 30, 35, 40, 45, 50])]
        values: Vec<usize>,
    },
    /// Sweep the number of replicas at fixed K.
    SweepR {
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4, 5, 6, 7])]
        values: Vec<usize>,
    },
    /// PLR vs K for R = 2..5, with and without SIC.
    Figure2,
    /// PLR vs R for K = 25 and 45, with and without SIC.
    Figure3,
    /// CSRA against the single-element baseline vs K for R = 4 and 5.
    Figure4,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// JSON or `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    r: Option<usize>,
    #[arg(long, global = true)]
    sic: Option<bool>,
    #[arg(long, global = true, value_parser = parse_scheme)]
    scheme: Option<Scheme>,
    #[arg(long, global = true)]
    threshold_scale: Option<f64>,
    #[arg(long, global = true, value_parser = parse_power)]
    power_policy: Option<PowerPolicy>,
    #[arg(long, global = true, value_parser = parse_footprint)]
    footprint: Option<FootprintMode>,
}

fn kebab<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    kebab(s)
}

fn parse_power(s: &str) -> Result<PowerPolicy, String> {
    kebab(s)
}

fn parse_footprint(s: &str) -> Result<FootprintMode, String> {
    kebab(s)
}

fn build_config(c: &Common) -> Result<SimConfig, ConfigError> {
    let mut cfg = match &c.config {
        Some(p) => SimConfig::load(p)?,
        None => SimConfig::default(),
    };
    macro_rules! apply {
        ($($f:ident),*) => { $(if let Some(v) = c.$f { cfg.$f = v; })* };
    }
    apply!(trials, seed, workers, k, r, sic, scheme, threshold_scale, power_policy, footprint);
    cfg.validate()?;
    Ok(cfg)
}

fn sweep(cmd: &Command, cfg: &SimConfig) -> Vec<SweepPoint> {
    let point = |k, r| SweepPoint { k, r, scheme: cfg.scheme, sic: cfg.sic };
    match cmd {
        Command::Single => vec![point(cfg.k, cfg.r)],
        Command::SweepK { values } => values.iter().map(|&k| point(k, cfg.r)).collect(),
        Command::SweepR { values } => values.iter().map(|&r| point(cfg.k, r)).collect(),
        Command::Figure2 => presets::figure2(),
        Command::Figure3 => presets::figure3(),
        Command::Figure4 => presets::figure4(),
    }
}

fn run(cli: &Cli) -> Result<(), HarnessError> {
    let cfg = build_config(&cli.common)?;
    let points = sweep(&cli.command, &cfg);
    if points.iter().any(|p| p.r == 0) {
        return Err(ConfigError::Invalid("r must be at least 1".into()).into());
    }
    // open the destination first so a bad path fails before the campaign runs
    let out: Box<dyn Write> = match &cli.common.out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| HarnessError::Output(e.to_string()))?)),
        None => Box::new(io::stdout().lock()),
    };
    let results = run_campaign(&cfg, &points)?;
    match cli.common.format {
        Format::Csv => write_csv(out, &results),
        Format::Json => write_json(out, &results),
    }
    .map_err(|e| HarnessError::Output(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                HarnessError::Config(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
