//! The `qbayes` command-line tool.
//!
//! Every run resolves a [`RunConfig`] from command-line flags, falling back
//! to an optional TOML file given with `--config`, and echoes it on stderr.
//! Exit codes: 0 success, 1 usage or input error, 2 impossible conditioning
//! event, 3 verification failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::io::{
    format_float, write_bloch_density_csv, write_count_distribution_csv, write_json, write_phase_posterior_csv,
    Format,
};
use crate::laser::{
    phase_posterior, phase_posterior_on_grid, BeamParams, DetectionHistory, Detector, PhasePredictor,
};
use crate::montecarlo::{sample_phase, simulate_detections, simulate_spin_record, BlochSampler, SeededStream};
use crate::numerics::PeriodicGrid;
use crate::spin::{conditional_record, posterior_bloch_density, BlochPrior, PosteriorResolution, PriorSpec, SpinRecord};
use crate::verify::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_IMPOSSIBLE: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_REPLICAS: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "qbayes", version, about = "Bayesian predictions for repeated qubit and laser-beam measurements")]
pub struct Cli {
    /// TOML file with defaults for the flags below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probabilities of future spin records given a past record.
    SpinPredict(SpinPredictArgs),
    /// Posterior density of the phase difference after a detection history.
    LaserPosterior(LaserPosteriorArgs),
    /// Predicted photon counts after a detection history.
    LaserPredict(LaserPredictArgs),
    /// Draw hidden states and measurement records.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Run the oracle and Monte Carlo verification suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SpinPredictArgs {
    /// Past record (JSON).
    #[arg(long)]
    pub record: PathBuf,
    /// Future record or array of records (JSON).
    #[arg(long)]
    pub query: PathBuf,
    /// Prior (JSON); uniform sphere when absent.
    #[arg(long)]
    pub prior: Option<PathBuf>,
    /// Also write the posterior Bloch density to this file.
    #[arg(long)]
    pub posterior: Option<PathBuf>,
    /// Posterior grid as `n_cos,n_azimuth,n_radius`.
    #[arg(long, value_parser = parse_resolution)]
    pub resolution: Option<PosteriorResolution>,
}

#[derive(Debug, Clone, Args)]
pub struct BeamArgs {
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta_omega: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LaserPosteriorArgs {
    /// Detection history (JSON, or CSV when the name ends in `.csv`).
    #[arg(long)]
    pub history: PathBuf,
    #[command(flatten)]
    pub beam: BeamArgs,
    /// Fixed grid size; refined automatically when absent.
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LaserPredictArgs {
    /// Detection history; no data when absent.
    #[arg(long)]
    pub history: Option<PathBuf>,
    #[command(flatten)]
    pub beam: BeamArgs,
    #[arg(long, default_value = "c")]
    pub detector: Detector,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub time: f64,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Joint probability of `n_c,n_d` instead of a count distribution.
    #[arg(long, value_parser = parse_pair)]
    pub joint: Option<(u64, u64)>,
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// Bloch vectors from the prior and a record for each.
    Spin(SimulateSpinArgs),
    /// One detection history at a given (or sampled) phase.
    Laser(SimulateLaserArgs),
}

#[derive(Debug, Args)]
pub struct SimulateSpinArgs {
    /// Measurements per axis as `x,y,z`.
    #[arg(long, value_parser = parse_plan)]
    pub plan: [u64; 3],
    #[arg(long)]
    pub prior: Option<PathBuf>,
    /// Number of records.
    #[arg(long, default_value_t = 1)]
    pub count: u64,
}

#[derive(Debug, Args)]
pub struct SimulateLaserArgs {
    #[command(flatten)]
    pub beam: BeamArgs,
    /// Phase difference; drawn uniformly when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Event times as a comma-separated list.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub times: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long)]
    pub replicas: Option<u64>,
}

fn parse_list<const N: usize, T: std::str::FromStr>(s: &str) -> std::result::Result<[T; N], String> {
    let parts: Vec<T> = s
        .split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| format!("cannot parse {p:?}")))
        .collect::<std::result::Result<_, _>>()?;
    parts.try_into().map_err(|_| format!("expected {N} comma-separated values, got {s:?}"))
}

fn parse_plan(s: &str) -> std::result::Result<[u64; 3], String> {
    parse_list::<3, u64>(s)
}

fn parse_pair(s: &str) -> std::result::Result<(u64, u64), String> {
    parse_list::<2, u64>(s).map(|[a, b]| (a, b))
}

fn parse_resolution(s: &str) -> std::result::Result<PosteriorResolution, String> {
    parse_list::<3, usize>(s).map(|[n_cos, n_azimuth, n_radius]| PosteriorResolution { n_cos, n_azimuth, n_radius })
}

/// Contents of a `--config` file. Every key is optional.
///
/// ```toml
/// format = "csv"
/// out = "result.csv"
/// seed = 7
/// replicas = 1000000
/// prior = "prior.json"
/// nodes = 4096
///
/// [beam]
/// a = 1.0
/// b = 1.0
/// eta = 0.1
/// delta_omega = 0.0
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub replicas: Option<u64>,
    pub prior: Option<PathBuf>,
    pub nodes: Option<usize>,
    pub beam: Option<BeamConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub eta: Option<f64>,
    pub delta_omega: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
    }
}

/// The fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beam: Option<BeamParams>,
    /// Command-specific inputs, as given.
    pub inputs: BTreeMap<String, serde_json::Value>,
}

impl RunConfig {
    fn new(cli: &Cli, file: &ConfigFile, command: &str) -> Self {
        Self {
            command: command.into(),
            format: cli.format.or(file.format).unwrap_or_default(),
            out: cli.out.clone().or_else(|| file.out.clone()),
            seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            beam: None,
            inputs: BTreeMap::new(),
        }
    }

    fn input(&mut self, key: &str, value: impl Serialize) {
        self.inputs.insert(key.into(), serde_json::to_value(value).expect("inputs serialize"));
    }
}

fn resolve_beam(args: &BeamArgs, file: &ConfigFile) -> Result<BeamParams> {
    let cfg = file.beam.clone().unwrap_or_default();
    let need = |flag: Option<f64>, cfg: Option<f64>, name: &str| {
        flag.or(cfg).ok_or_else(|| Error::Input(format!("missing --{name} (flag or [beam] {name} in the config)")))
    };
    BeamParams::new(
        need(args.a, cfg.a, "a")?,
        need(args.b, cfg.b, "b")?,
        need(args.eta, cfg.eta, "eta")?,
        args.delta_omega.or(cfg.delta_omega).unwrap_or(0.0),
    )
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn read_prior(path: Option<&Path>) -> Result<BlochPrior> {
    match path {
        None => Ok(BlochPrior::UniformSphere),
        Some(p) => read_json::<PriorSpec>(p)?.try_into(),
    }
}

/// Reads a history as CSV when the file name ends in `.csv`, else as JSON.
pub fn read_history(path: &Path) -> Result<DetectionHistory> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let parsed = if is_csv {
        DetectionHistory::from_csv_reader(open(path)?)
    } else {
        DetectionHistory::from_json_reader(open(path)?)
    };
    parsed.map_err(|e| match e {
        Error::Input(m) => Error::Input(format!("{}: {m}", path.display())),
        other => Error::Input(format!("{}: {other}", path.display())),
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(SpinRecord),
    Many(Vec<SpinRecord>),
}

fn output(config: &RunConfig) -> Result<Box<dyn Write>> {
    Ok(match &config.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn echo(config: &RunConfig) {
    eprintln!("config: {}", serde_json::to_string(config).expect("config serializes"));
}

fn spin_predict(cli: &Cli, file: &ConfigFile, args: &SpinPredictArgs) -> Result<i32> {
    let mut config = RunConfig::new(cli, file, "spin-predict");
    let prior_path = args.prior.clone().or_else(|| file.prior.clone());
    config.input("record", &args.record);
    config.input("query", &args.query);
    config.input("prior", &prior_path);
    config.input("posterior", &args.posterior);
    echo(&config);

    let past: SpinRecord = read_json(&args.record)?;
    let futures = match read_json::<OneOrMany>(&args.query)? {
        OneOrMany::One(r) => vec![r],
        OneOrMany::Many(v) => v,
    };
    let prior = read_prior(prior_path.as_deref())?;
    let probabilities =
        futures.iter().map(|f| conditional_record(f, &past, &prior)).collect::<Result<Vec<_>>>()?;

    let mut out = output(&config)?;
    match config.format {
        Format::Json => {
            let predictions: Vec<_> = futures
                .iter()
                .zip(&probabilities)
                .map(|(f, p)| json!({"future": f, "probability": p}))
                .collect();
            write_json(&mut out, &json!({"config": config, "past": past, "predictions": predictions}))?;
        }
        Format::Csv => {
            writeln!(out, "x_plus,x_minus,y_plus,y_minus,z_plus,z_minus,probability")?;
            for (f, p) in futures.iter().zip(&probabilities) {
                let c = serde_json::to_value(f)?;
                let axis = |k: &str, i: usize| c[k][i].as_u64().unwrap_or(0);
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    axis("x", 0),
                    axis("x", 1),
                    axis("y", 0),
                    axis("y", 1),
                    axis("z", 0),
                    axis("z", 1),
                    format_float(*p)
                )?;
            }
        }
    }
    out.flush()?;

    if let Some(path) = &args.posterior {
        let density = posterior_bloch_density(&past, &prior, args.resolution.unwrap_or_default())?;
        let mut w = BufWriter::new(File::create(path)?);
        match config.format {
            Format::Json => write_json(&mut w, &density)?,
            Format::Csv => write_bloch_density_csv(&mut w, &density)?,
        }
        w.flush()?;
    }
    Ok(EXIT_OK)
}

fn laser_posterior(cli: &Cli, file: &ConfigFile, args: &LaserPosteriorArgs) -> Result<i32> {
    let mut config = RunConfig::new(cli, file, "laser-posterior");
    let params = resolve_beam(&args.beam, file)?;
    config.beam = Some(params);
    let nodes = args.nodes.or(file.nodes);
    config.input("history", &args.history);
    config.input("nodes", nodes);
    echo(&config);

    let history = read_history(&args.history)?;
    let posterior = match nodes {
        Some(n) => phase_posterior_on_grid(&history, &params, PeriodicGrid::new(n)?)?,
        None => phase_posterior(&history, &params)?,
    };
    let mut out = output(&config)?;
    match config.format {
        Format::Json => write_json(&mut out, &json!({"config": config, "posterior": posterior}))?,
        Format::Csv => write_phase_posterior_csv(&mut out, &posterior)?,
    }
    out.flush()?;
    Ok(EXIT_OK)
}

fn laser_predict(cli: &Cli, file: &ConfigFile, args: &LaserPredictArgs) -> Result<i32> {
    let mut config = RunConfig::new(cli, file, "laser-predict");
    let params = resolve_beam(&args.beam, file)?;
    config.beam = Some(params);
    config.input("history", &args.history);
    config.input("detector", args.detector);
    config.input("time", args.time);
    config.input("n_max", args.n_max);
    config.input("joint", args.joint);
    echo(&config);

    let history = match &args.history {
        Some(p) => read_history(p)?,
        None => DetectionHistory::empty(),
    };
    let predictor = PhasePredictor::new(history, params)?;
    let mut out = output(&config)?;
    if let Some((n_c, n_d)) = args.joint {
        let p = predictor.joint(n_c, n_d, args.time)?;
        match config.format {
            Format::Json => write_json(
                &mut out,
                &json!({"config": config, "time": args.time, "n_c": n_c, "n_d": n_d, "probability": p}),
            )?,
            Format::Csv => {
                writeln!(out, "n_c,n_d,probability")?;
                writeln!(out, "{n_c},{n_d},{}", format_float(p))?;
            }
        }
    } else {
        let dist = predictor.counts(args.detector, args.time, args.n_max)?;
        match config.format {
            Format::Json => write_json(
                &mut out,
                &json!({
                    "config": config,
                    "detector": args.detector,
                    "time": args.time,
                    "probabilities": dist.probabilities,
                    "tail_bound": dist.tail_bound,
                }),
            )?,
            Format::Csv => write_count_distribution_csv(&mut out, &dist)?,
        }
    }
    out.flush()?;
    Ok(EXIT_OK)
}

fn simulate_spin(cli: &Cli, file: &ConfigFile, args: &SimulateSpinArgs) -> Result<i32> {
    let mut config = RunConfig::new(cli, file, "simulate spin");
    let prior_path = args.prior.clone().or_else(|| file.prior.clone());
    config.input("plan", args.plan);
    config.input("prior", &prior_path);
    config.input("count", args.count);
    echo(&config);

    let sampler = BlochSampler::new(&read_prior(prior_path.as_deref())?);
    let mut rng = SeededStream::new(config.seed, 0).rng();
    let draws: Vec<_> = (0..args.count)
        .map(|_| {
            let v = sampler.sample(&mut rng);
            (v, simulate_spin_record(&v, args.plan, &mut rng))
        })
        .collect();
    let mut out = output(&config)?;
    match config.format {
        Format::Json => {
            let rows: Vec<_> = draws.iter().map(|(v, r)| json!({"bloch": v, "record": r})).collect();
            write_json(&mut out, &rows)?;
        }
        Format::Csv => {
            writeln!(out, "bloch_x,bloch_y,bloch_z,x_plus,x_minus,y_plus,y_minus,z_plus,z_minus")?;
            for (v, r) in &draws {
                use crate::bloch::{Axis, Sign};
                let counts: Vec<String> = Axis::ALL
                    .iter()
                    .flat_map(|&a| Sign::BOTH.map(|s| r.count(a, s).to_string()))
                    .collect();
                writeln!(
                    out,
                    "{},{},{},{}",
                    format_float(v.x),
                    format_float(v.y),
                    format_float(v.z),
                    counts.join(",")
                )?;
            }
        }
    }
    out.flush()?;
    Ok(EXIT_OK)
}

fn simulate_laser(cli: &Cli, file: &ConfigFile, args: &SimulateLaserArgs) -> Result<i32> {
    let mut config = RunConfig::new(cli, file, "simulate laser");
    let params = resolve_beam(&args.beam, file)?;
    config.beam = Some(params);
    let mut rng = SeededStream::new(config.seed, 0).rng();
    let phi = args.phi.unwrap_or_else(|| sample_phase(&mut rng));
    config.input("phi", phi);
    config.input("times", &args.times);
    echo(&config);

    let history = simulate_detections(phi, &params, &args.times, &mut rng).map_err(|e| match e {
        Error::Input(m) => Error::Input(format!("--times: {m}")),
        other => other,
    })?;
    let mut out = output(&config)?;
    match config.format {
        Format::Json => write_json(&mut out, &history)?,
        Format::Csv => history.write_csv(&mut out)?,
    }
    out.flush()?;
    Ok(EXIT_OK)
}

fn verify(cli: &Cli, file: &ConfigFile, args: &VerifyArgs) -> Result<i32> {
    let mut config = RunConfig::new(cli, file, "verify");
    let replicas = args.replicas.or(file.replicas).unwrap_or(DEFAULT_REPLICAS);
    config.input("suite", args.suite);
    config.input("replicas", replicas);
    echo(&config);

    let rows = run_suite(args.suite, replicas, config.seed)?;
    let mut out = output(&config)?;
    match config.format {
        Format::Json => write_json(&mut out, &rows)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["case", "analytic", "empirical", "stderr", "pass"])?;
            for r in &rows {
                w.write_record([
                    r.case.clone(),
                    format_float(r.analytic),
                    format_float(r.empirical),
                    format_float(r.stderr),
                    r.pass.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!("FAIL {}: analytic {} empirical {} stderr {}", r.case, r.analytic, r.empirical, r.stderr);
    }
    eprintln!("{} of {} cases passed", rows.len() - failed.len(), rows.len());
    Ok(if failed.is_empty() { EXIT_OK } else { EXIT_VERIFICATION })
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ImpossibleConditioning(_) => EXIT_IMPOSSIBLE,
        _ => EXIT_INPUT,
    }
}

/// Executes a parsed command line.
pub fn execute(cli: &Cli) -> Result<i32> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::SpinPredict(a) => spin_predict(cli, &file, a),
        Command::LaserPosterior(a) => laser_posterior(cli, &file, a),
        Command::LaserPredict(a) => laser_predict(cli, &file, a),
        Command::Simulate(SimulateCommand::Spin(a)) => simulate_spin(cli, &file, a),
        Command::Simulate(SimulateCommand::Laser(a)) => simulate_laser(cli, &file, a),
        Command::Verify(a) => verify(cli, &file, a),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsers() {
        assert_eq!(parse_plan("3, 0,2").unwrap(), [3, 0, 2]);
        assert!(parse_plan("3,0").is_err());
        assert_eq!(parse_pair("1,0").unwrap(), (1, 0));
        assert!(parse_resolution("8,16").is_err());
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        assert!(toml::from_str::<ConfigFile>("seed = 3\n[beam]\na = 1.0\n").is_ok());
        assert!(toml::from_str::<ConfigFile>("sed = 3\n").is_err());
        assert!(toml::from_str::<ConfigFile>("[beam]\nc = 1.0\n").is_err());
    }

    #[test]
    fn flags_override_the_config_file() {
        let cli = Cli::try_parse_from(["qbayes", "--seed", "9", "laser-posterior", "--history", "h.json", "--b", "2"])
            .unwrap();
        let file: ConfigFile =
            toml::from_str("seed = 3\nformat = \"csv\"\n[beam]\na = 1.0\nb = 1.0\neta = 0.5\n").unwrap();
        let config = RunConfig::new(&cli, &file, "laser-posterior");
        assert_eq!(config.seed, 9);
        assert_eq!(config.format, Format::Csv);
        let Command::LaserPosterior(args) = &cli.command else { unreachable!() };
        let beam = resolve_beam(&args.beam, &file).unwrap();
        assert_eq!((beam.a(), beam.b(), beam.eta()), (1.0, 2.0, 0.5));
        assert!(resolve_beam(&args.beam, &ConfigFile::default()).is_err());
    }
}
