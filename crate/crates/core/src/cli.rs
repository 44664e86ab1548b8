//! Command-line front end.
//!
//! Errors are printed to stderr as `ERROR <code>: <message>`. Exit status is 0 on
//! success, 1 for invalid input and 2 for file-system failures.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::cmat::{format_g17, parse_complex_list, read_cmat, write_cmat};
use crate::coherence::{coherence_report, stoc_estimate, StocEstimate, ZStrategy};
use crate::detectors::{zd_groth, zd_ost, DetectionResult};
use crate::error::Error;
use crate::experiments::config::{parse_key_values, parse_list, parse_value};
use crate::experiments::{emit_plotdata, Experiment, ExperimentConfig, FigureId};
use crate::matrices::{bernoulli_meta, build_bernoulli, build_kerdock, KerdockSpec};
use crate::matrix::{normalize_columns, GroupPartition, MeasurementMatrix};
use crate::rng::RngSpec;
use crate::theory::{self, NoiseConvention, TheoremParams};

#[derive(Debug, Parser)]
#[command(name = "zerodetect", about = "Zero-support detection from compressive measurements")]
pub struct Cli {
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Human-readable summary on stderr.
    #[arg(long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a Kerdock or Bernoulli measurement matrix.
    GenMatrix(GenMatrixArgs),
    /// Coherence statistics of a matrix.
    Coherence(CoherenceArgs),
    /// Run ZD-OST or ZD-GroTh on one measurement vector.
    Detect(DetectArgs),
    /// Evaluate the performance guarantees for a signal and a coherence report.
    Bounds(BoundsArgs),
    /// Monte-Carlo batch from an experiment config.
    Simulate(SimulateArgs),
    /// Empirical StOC violation rate.
    Stoc(StocArgs),
}

#[derive(Debug, Args)]
pub struct GenMatrixArgs {
    #[arg(long, value_parser = ["kerdock", "bernoulli"])]
    pub family: String,
    /// Odd Kerdock parameter; the matrix is 2^(m+1) x 4^(m+1).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Recorded in the header and checked to divide the column count.
    #[arg(long)]
    pub group_size: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MatrixInput {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Rescale columns to unit norm instead of rejecting the file.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct CoherenceArgs {
    #[command(flatten)]
    pub input: MatrixInput,
    #[arg(long)]
    pub group_size: Option<usize>,
    /// `k,epsilon,trials,z` with z one of e1, flat, gaussian-seeded.
    #[arg(long)]
    pub stoc: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("measurements").required(true).args(["y", "yinline"])))]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: MatrixInput,
    /// File of complex entries, separated by commas or whitespace.
    #[arg(long)]
    pub y: Option<PathBuf>,
    /// Comma-separated complex entries.
    #[arg(long, allow_hyphen_values = true)]
    pub yinline: Option<String>,
    #[arg(long, value_parser = positive)]
    pub theta: usize,
    /// Detect zero groups (ZD-GroTh) instead of zero entries.
    #[arg(long)]
    pub group: bool,
    /// Overrides the group size stored in the matrix header.
    #[arg(long)]
    pub group_size: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// CSV written by `coherence`.
    #[arg(long)]
    pub coherence: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_parser = ["1", "2", "3", "4a", "4b"])]
    pub figure: Option<String>,
    /// Overrides `master_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct StocArgs {
    #[command(flatten)]
    pub input: MatrixInput,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value = "e1")]
    pub z: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    UnknownSubcommand(String),
    MissingFlag(String),
    BadValue(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::UnknownSubcommand(_) => "UnknownSubcommand",
            Self::MissingFlag(_) => "MissingFlag",
            Self::BadValue(_) => "BadValue",
            Self::Io(_) => "IoError",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 2,
            _ => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::UnknownSubcommand(m) | Self::MissingFlag(m) | Self::BadValue(m) | Self::Io(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_io() {
            Self::Io(e.to_string())
        } else {
            Self::BadValue(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Error::from(e).into()
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// The clap message without the usage trailer, folded onto one line.
fn one_line(e: &clap::Error) -> String {
    let text = e.to_string();
    text.lines()
        .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
        .trim_start_matches("error: ")
        .to_string()
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be >= 1".into()),
        Ok(v) => Ok(v),
        Err(_) => Err(format!("`{s}` is not a nonnegative integer")),
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit status.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let err = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return 0;
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand | ErrorKind::MissingSubcommand => {
                    eprint!("{e}");
                    return 1;
                }
                ErrorKind::InvalidSubcommand => CliError::UnknownSubcommand(one_line(&e)),
                ErrorKind::MissingRequiredArgument => CliError::MissingFlag(one_line(&e)),
                _ => CliError::BadValue(one_line(&e)),
            };
            eprintln!("ERROR {}: {}", err.code(), err.message());
            return err.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("ERROR {}: {}", err.code(), err.message());
            err.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::BadValue(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::GenMatrix(a) => gen_matrix(a, cli.verbose),
        Command::Coherence(a) => coherence(a, cli.verbose),
        Command::Detect(a) => detect(a, cli.verbose),
        Command::Bounds(a) => bounds(a, cli.verbose),
        Command::Simulate(a) => simulate(a, cli.verbose),
        Command::Stoc(a) => stoc(a, cli.verbose),
    })
}

fn open_out(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn missing(flag: &str, why: &str) -> CliError {
    CliError::MissingFlag(format!("--{flag} is required {why}"))
}

fn gen_matrix(a: &GenMatrixArgs, verbose: bool) -> CliResult<()> {
    let (m, mut meta): (MeasurementMatrix<f64>, _) = match a.family.as_str() {
        "kerdock" => {
            let spec = KerdockSpec::new(a.m.ok_or_else(|| missing("m", "for the kerdock family"))?)?;
            (build_kerdock(&spec)?, spec.meta())
        }
        _ => {
            let rows = a.rows.ok_or_else(|| missing("rows", "for the bernoulli family"))?;
            let cols = a.cols.ok_or_else(|| missing("cols", "for the bernoulli family"))?;
            let rng = RngSpec::new(a.seed, 0);
            (build_bernoulli(rows, cols, &rng)?, bernoulli_meta(rows, cols, &rng))
        }
    };
    if let Some(r) = a.group_size {
        GroupPartition::new(m.cols(), r)?;
        meta.push(("group_size".into(), r.to_string()));
    }
    let mut out = BufWriter::new(File::create(&a.out)?);
    write_cmat(&mut out, m.matrix(), &meta)?;
    out.flush()?;
    if verbose {
        eprintln!("wrote {} x {} {} matrix to {}", m.rows(), m.cols(), a.family, a.out.display());
    }
    Ok(())
}

/// Reads a CMAT file; returns the matrix and the group size recorded in its header.
fn load_matrix(input: &MatrixInput) -> CliResult<(MeasurementMatrix<f64>, Option<usize>)> {
    let file = read_cmat::<f64, _>(BufReader::new(File::open(&input.matrix)?))?;
    let group_size = file
        .meta_value("group_size")
        .map(|v| parse_value::<usize>("group_size", v))
        .transpose()?;
    let m = if input.normalize {
        normalize_columns(&file.matrix)?
    } else {
        MeasurementMatrix::new(file.matrix)?
    };
    Ok((m, group_size))
}

fn parse_stoc_spec(s: &str) -> CliResult<(usize, f64, usize, ZStrategy)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::BadValue(format!("--stoc expects k,epsilon,trials,z; got `{s}`"));
    if parts.len() != 4 {
        return Err(bad());
    }
    Ok((
        parts[0].parse().map_err(|_| bad())?,
        parts[1].parse().map_err(|_| bad())?,
        parts[2].parse().map_err(|_| bad())?,
        ZStrategy::parse(parts[3])?,
    ))
}

fn run_stoc(m: &MeasurementMatrix<f64>, k: usize, eps: f64, trials: usize, z: ZStrategy, seed: u64) -> CliResult<StocEstimate> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(CliError::BadValue(format!("epsilon must be finite and >= 0, got {eps}")));
    }
    let rng = RngSpec::new(seed, 0);
    let zv = z.make::<f64>(k, &rng);
    Ok(stoc_estimate(m, k, eps, &zv, trials, z.name(), &rng)?)
}

fn stoc_rows(s: &StocEstimate) -> Vec<(String, String)> {
    vec![
        ("stoc_k".into(), s.k.to_string()),
        ("stoc_epsilon".into(), format_g17(s.epsilon)),
        ("stoc_trials".into(), s.trials.to_string()),
        ("stoc_violations".into(), s.violations.to_string()),
        ("stoc_delta_hat".into(), format_g17(s.delta_hat)),
        ("stoc_z".into(), s.z_strategy.clone()),
    ]
}

fn coherence(a: &CoherenceArgs, verbose: bool) -> CliResult<()> {
    let (m, stored) = load_matrix(&a.input)?;
    let m = match a.group_size.or(stored) {
        Some(r) => m.with_groups(r)?,
        None => m,
    };
    let report = coherence_report(&m)?;
    let mut w = csv::Writer::from_writer(open_out(&a.out)?);
    w.write_record(["stat", "value", "arg_i", "arg_j"])?;
    let none = String::new;
    w.write_record(["rows".into(), m.rows().to_string(), none(), none()])?;
    w.write_record(["cols".into(), m.cols().to_string(), none(), none()])?;
    let (i, j) = report.mu.pair;
    w.write_record(["mu".into(), format_g17(report.mu.value), i.to_string(), j.to_string()])?;
    w.write_record(["nu".into(), format_g17(report.nu), none(), none()])?;
    if let (Some(g), Some(part)) = (&report.group, m.groups()) {
        let (i, j) = g.mu_g.pair;
        w.write_record(["group_size".into(), part.group_size().to_string(), none(), none()])?;
        w.write_record(["mu_g".into(), format_g17(g.mu_g.value), i.to_string(), j.to_string()])?;
        w.write_record(["nu_g".into(), format_g17(g.nu_g), none(), none()])?;
    }
    if let Some(spec) = &a.stoc {
        let (k, eps, trials, z) = parse_stoc_spec(spec)?;
        for (stat, value) in stoc_rows(&run_stoc(&m, k, eps, trials, z, a.seed)?) {
            w.write_record([stat, value, none(), none()])?;
        }
    }
    w.flush()?;
    if verbose {
        eprintln!("mu = {}, nu = {}", report.mu.value, report.nu);
    }
    Ok(())
}

fn detect(a: &DetectArgs, verbose: bool) -> CliResult<()> {
    let (m, stored) = load_matrix(&a.input)?;
    let y: Vec<Complex64> = match (&a.y, &a.yinline) {
        (Some(path), _) => parse_complex_list(&fs::read_to_string(path)?)?,
        (None, Some(text)) => parse_complex_list(text)?,
        (None, None) => return Err(missing("y", "or --yinline")),
    };
    let theta = a.theta;
    let result: DetectionResult<f64> = if a.group {
        let r = a.group_size.or(stored).ok_or_else(|| missing("group-size", "with --group"))?;
        zd_groth(&y, &m.with_groups(r)?, theta)?
    } else {
        zd_ost(&y, &m, theta)?
    };
    let mut w = csv::Writer::from_writer(open_out(&a.out)?);
    w.write_record(["rank", "index", "score"])?;
    for (rank, &idx) in result.ranked.iter().enumerate() {
        w.write_record([(rank + 1).to_string(), idx.to_string(), format_g17(result.scores[idx])])?;
    }
    w.flush()?;
    if verbose {
        eprintln!("declared {} of {} indices zero", result.estimate.len(), result.scores.len());
    }
    Ok(())
}

const BOUNDS_KEYS: &[&str] = &[
    "a",
    "t",
    "mu0",
    "sigma",
    "c1",
    "c2",
    "c_mu",
    "c_nu",
    "theta",
    "group_size",
    "magnitudes",
    "group_norms",
    "signal_file",
    "noise_convention",
    "t_grid",
];

fn read_coherence_csv(path: &Path) -> CliResult<BTreeMap<String, f64>> {
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let mut out = BTreeMap::new();
    for rec in r.records() {
        let rec = rec?;
        let (Some(stat), Some(value)) = (rec.get(0), rec.get(1)) else {
            continue;
        };
        if let Ok(v) = value.parse::<f64>() {
            out.insert(stat.to_string(), v);
        }
    }
    Ok(out)
}

fn bounds(a: &BoundsArgs, verbose: bool) -> CliResult<()> {
    let kv = parse_key_values(&fs::read_to_string(&a.config)?)?;
    if let Some(bad) = kv.keys().find(|k| !BOUNDS_KEYS.contains(&k.as_str())) {
        return Err(CliError::BadValue(format!("unknown key `{bad}`")));
    }
    let coh = read_coherence_csv(&a.coherence)?;
    let stat = |name: &str| coh.get(name).copied().ok_or_else(|| CliError::BadValue(format!("coherence report lacks `{name}`")));
    let (n, p, mu, nu) = (stat("rows")? as usize, stat("cols")? as usize, stat("mu")?, stat("nu")?);

    let num = |key: &str, default: Option<f64>| -> CliResult<f64> {
        match kv.get(key) {
            Some(v) => Ok(parse_value(key, v)?),
            None => default.ok_or_else(|| CliError::BadValue(format!("config needs `{key}`"))),
        }
    };
    let params = TheoremParams {
        a: num("a", Some(2.0))?,
        t: num("t", Some(0.5))?,
        mu0: num("mu0", Some(mu * (p as f64).ln().sqrt()))?,
        sigma: num("sigma", None)?,
        c1: num("c1", Some(2.0))?,
        c2: num("c2", Some(0.5))?,
        c_mu: num("c_mu", Some(1.0))?,
        c_nu: num("c_nu", Some(1.0))?,
    };
    params.validate()?;
    let theta = num("theta", Some(1.0))? as usize;
    if theta == 0 {
        return Err(CliError::BadValue("theta must be >= 1".into()));
    }
    let convention = kv.get("noise_convention").map(|v| NoiseConvention::parse(v)).transpose()?.unwrap_or_default();
    let group_size = match kv.get("group_size") {
        Some(v) => Some(parse_value::<usize>("group_size", v)?),
        None => coh.get("group_size").map(|&v| v as usize),
    };

    let signal: Option<Vec<Complex64>> = kv.get("signal_file").map(|f| -> CliResult<_> { Ok(parse_complex_list(&fs::read_to_string(f)?)?) }).transpose()?;
    let magnitudes: Vec<f64> = match (&signal, kv.get("magnitudes")) {
        (Some(x), _) => x.iter().map(|z| z.norm()).filter(|&v| v != 0.0).collect(),
        (None, Some(v)) => parse_list("magnitudes", v)?,
        (None, None) => return Err(CliError::BadValue("config needs `magnitudes` or `signal_file`".into())),
    };
    let stats = theory::stats_from_magnitudes(magnitudes, params.sigma, n, convention)?;
    let k = stats.lar.len();

    let mut rows: Vec<(String, f64, bool)> = Vec::new();
    let mut push = |q: &str, v: f64, ok: bool| rows.push((q.to_string(), v, ok));
    push("k", k as f64, true);
    push("snr", stats.snr, true);
    push("snr_min", stats.snr_min, true);
    push("lar_sum", stats.lar.iter().sum(), true);
    push("stoc_constant", theory::stoc_constant(params.a), true);
    let eps0 = theory::epsilon0(stats.snr_min, stats.snr, p);
    push("epsilon0", eps0.value, eps0.valid);
    let kb = theory::theorem1_k_bound(&params, eps0.value, nu, p);
    push("k_bound", kb.value, kb.valid);
    push("k_within_bound", f64::from(u8::from(kb.valid && k as f64 <= kb.value)), kb.valid);
    let alpha = theory::theorem1_alpha(eps0.value, k, nu, params.mu0, params.a, p);
    push("alpha", alpha.alpha, alpha.valid);
    push("pe_bound", alpha.pe_bound, alpha.valid && eps0.valid);
    push("pe_bound_with_log_factor", alpha.pe_bound_with_log_factor, alpha.valid && eps0.valid);
    let fdp = theory::theorem1_fdp_bound(&stats, &params, mu, k, n, p, theta);
    push("fdp_threshold", fdp.threshold, true);
    push("fdp_m", fdp.m as f64, true);
    push("fdp_bound", fdp.bound, true);
    if let Some(v) = kv.get("t_grid") {
        let grid: Vec<f64> = parse_list("t_grid", v)?;
        if let Some((t, b)) = theory::grid_search_t(&stats, &params, mu, k, n, p, theta, &grid) {
            push("best_t", t, true);
            push("best_t_fdp_bound", b.bound, true);
        }
    }
    let (tau, _) = theory::noise_thresholds(params.sigma, p, 1, 1);
    push("tau", tau, true);
    push("noise_event_floor", theory::element_noise_event_floor(p), true);

    if let Some(r) = group_size {
        let part = GroupPartition::new(p, r)?;
        let q = part.group_count();
        let mu_g = stat("mu_g")?;
        let norms: Vec<f64> = match (&signal, kv.get("group_norms")) {
            (Some(x), _) if x.len() == p => {
                let mut v: Vec<f64> = (0..q)
                    .map(|g| part.columns_of(g).map(|i| x[i].norm_sqr()).sum::<f64>().sqrt())
                    .filter(|&v| v != 0.0)
                    .collect();
                v.sort_by(|a, b| b.total_cmp(a));
                v
            }
            (_, Some(v)) => {
                let mut v: Vec<f64> = parse_list("group_norms", v)?;
                v.sort_by(|a, b| b.total_cmp(a));
                v
            }
            _ => Vec::new(),
        };
        let c3 = theory::theorem2_constants(&params);
        push("c3", c3, true);
        let (_, tau_g) = theory::noise_thresholds(params.sigma, p, q, r);
        push("tau_g", tau_g, true);
        let tail = theory::chi2_tail_bound(tau_g, params.sigma, r);
        push("chi2_tail_bound", tail.value, !tail.clamped);
        let fail = theory::group_noise_failure_bound(tau_g, params.sigma, r, q);
        push("group_noise_failure_bound", fail.value, !fail.clamped);
        if !norms.is_empty() {
            let kg = norms.len();
            let gates = theory::theorem2_gates(&params, c3, r, kg, n);
            push("gate_rank", f64::from(u8::from(gates.rank)), gates.rank);
            push("gate_worst_case", f64::from(u8::from(gates.worst_case)), gates.worst_case);
            push("gate_average", f64::from(u8::from(gates.average)), gates.average);
            let b = theory::theorem2_m_and_fdp(&norms, params.sigma, mu_g, q, r, c3, theta);
            push("group_fdp_threshold", b.threshold, gates.all());
            push("group_fdp_m", b.m as f64, gates.all());
            push("group_fdp_bound", b.bound, gates.all());
            push("group_success_floor", b.success_floor, gates.all());
            push("group_success_floor_product", b.success_floor_product, gates.all());
        }
    }

    let mut w = csv::Writer::from_writer(open_out(&a.out)?);
    w.write_record(["quantity", "value", "valid"])?;
    for (q, v, ok) in &rows {
        w.write_record([q.clone(), format_g17(*v), ok.to_string()])?;
    }
    w.flush()?;
    if verbose {
        let invalid = rows.iter().filter(|r| !r.2).count();
        eprintln!("{} quantities, {invalid} outside their guarantee", rows.len());
    }
    Ok(())
}

fn simulate(a: &SimulateArgs, verbose: bool) -> CliResult<()> {
    let text = fs::read_to_string(&a.config)?;
    let mut config = ExperimentConfig::parse(&text)?;
    if let Some(seed) = a.seed {
        config.master_seed = seed;
    }
    if let crate::experiments::MatrixSource::File(p) = &config.matrix {
        if p.is_relative() {
            let base = a.config.parent().unwrap_or(Path::new("."));
            config.matrix = crate::experiments::MatrixSource::File(base.join(p));
        }
    }
    let figure = a.figure.as_deref().map(FigureId::parse).transpose()?;
    let exp = Experiment::new(config)?;
    let report = exp.run_batch()?;
    fs::create_dir_all(&a.out_dir)?;
    let mut s = BufWriter::new(File::create(a.out_dir.join("summary.csv"))?);
    report.write_summary_csv(&mut s)?;
    s.flush()?;
    let mut t = BufWriter::new(File::create(a.out_dir.join("trials.csv"))?);
    report.write_trials_csv(&mut t)?;
    t.flush()?;
    if let Some(f) = figure {
        emit_plotdata(&report, f, &a.out_dir)?;
    }
    if verbose {
        for c in report.summaries() {
            eprintln!(
                "k={:<4} {:<22} theta={:<4} fdp={:.4} pe={:.4}",
                c.key.k,
                c.key.detector.name(),
                c.effective_theta,
                c.fdp_curve_point().0,
                c.pe
            );
        }
    }
    Ok(())
}

fn stoc(a: &StocArgs, verbose: bool) -> CliResult<()> {
    let (m, _) = load_matrix(&a.input)?;
    let est = run_stoc(&m, a.k, a.epsilon, a.trials, ZStrategy::parse(&a.z)?, a.seed)?;
    let mut w = csv::Writer::from_writer(open_out(&a.out)?);
    w.write_record(["stat", "value"])?;
    for (stat, value) in stoc_rows(&est) {
        w.write_record([stat, value])?;
    }
    w.flush()?;
    if verbose {
        eprintln!("{} of {} permutations violate", est.violations, est.trials);
    }
    Ok(())
}
