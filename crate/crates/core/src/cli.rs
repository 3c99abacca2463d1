//! The `mordell` command line: `solve`, `range`, `verify`, `stats`.
//!
//! Exit codes: 0 success, 1 internal error or failed verification, 2 invalid usage.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::oracle::{brute_force_k, OracleConfig};
use crate::pipeline::{solve_k, solve_range_chunked, SolutionSet, DEFAULT_CHUNK};
use crate::report::{
    self, detect_format, hall_measures, histogram, json_line, large_solutions, parse_records, verify_record, Filter,
    Format,
};
use crate::thue::{BoundPolicy, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "mordell", about = "Integral points on Y^2 = X^3 + k via binary cubic forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a single k.
    Solve(SolveArgs),
    /// Solve every nonzero k in a range, chunked and resumable.
    Range(RangeArgs),
    /// Re-check stored records.
    Verify(VerifyArgs),
    /// Histogram, Hall-measure and large-solution tables over stored records.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Search |y| up to this bound for every form, instead of the Hall-derived range.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub thue_bound: Option<u64>,
    /// Coefficient C in X_max = (C |k|)^2 for the Hall-derived range.
    #[arg(long, default_value_t = 50.0)]
    pub hall_coeff: f64,
    /// Floor of the heuristic y-range used when the Hessian is indefinite.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub y_floor: u64,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let cfg = match self.thue_bound {
            Some(b) => SolverConfig { y_bound: b, hall_coeff: self.hall_coeff, bound_policy: BoundPolicy::Explicit },
            None => SolverConfig { y_bound: self.y_floor, hall_coeff: self.hall_coeff, bound_policy: BoundPolicy::HallDerived },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, default_value = "json-lines")]
    pub format: Format,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub k: BigInt,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Also run the brute-force scan up to this X and fail on disagreement.
    #[arg(long)]
    pub oracle_max: Option<BigInt>,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub from: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: i64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Discriminant span of one work chunk.
    #[arg(long, default_value_t = DEFAULT_CHUNK, value_parser = clap::value_parser!(u64).range(108..))]
    pub chunk: u64,
    /// Continue an interrupted run recorded in the manifest next to --out.
    #[arg(long, requires = "out")]
    pub resume: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub input: PathBuf,
    /// Restrict the histogram to 6th-power-free k.
    #[arg(long)]
    pub sixth_power_free: bool,
    /// List Hall measures sqrt(X)/|k| above this threshold.
    #[arg(long)]
    pub hall: Option<f64>,
    /// List solutions with X above this threshold.
    #[arg(long)]
    pub large: Option<BigInt>,
    /// Build the histogram even when some records are bound-limited.
    #[arg(long)]
    pub allow_incomplete: bool,
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ZeroK | Error::InvalidRange { .. } | Error::InvalidWindow { .. } => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

type CliResult = std::result::Result<(), CliError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Failed(Error::Io { path: path.to_path_buf(), source }.to_string())
}

fn with_workers<T: Send>(workers: Option<u64>, f: impl FnOnce() -> T + Send) -> std::result::Result<T, CliError> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n as usize)
                .build()
                .map_err(|e| CliError::Failed(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn open_output(out: &Option<PathBuf>) -> std::result::Result<Box<dyn Write>, CliError> {
    match out {
        Some(path) => Ok(Box::new(BufWriter::new(File::create(path).map_err(io_err(path))?))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

pub fn cmd_solve(args: &SolveArgs) -> CliResult {
    let cfg = args.solver.config()?;
    let set = with_workers(args.output.workers, || solve_k(&args.k, &cfg))??;
    if let Some(x_max) = &args.oracle_max {
        let oracle = brute_force_k(&args.k, &OracleConfig::new(x_max.clone()).map_err(|e| CliError::Usage(e.to_string()))?)?;
        let within: Vec<_> = set.coordinates().into_iter().filter(|(x, _)| x <= x_max).collect();
        if within != oracle.coordinates() {
            return Err(CliError::Failed(format!("k = {}: solver and brute-force scan disagree below X = {x_max}", args.k)));
        }
        eprintln!("k = {}: agrees with brute-force scan up to X = {x_max}", args.k);
    }
    let mut out = open_output(&args.output.out)?;
    let path = args.output.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    report::serialize(std::slice::from_ref(&set), args.output.format, &mut out).map_err(io_err(&path))?;
    Ok(())
}

/// Contiguous same-sign k-subranges covering `[lo, hi]` without 0, ascending.
pub fn range_chunks(lo: i64, hi: i64, chunk: u64) -> Vec<(i64, i64)> {
    let per = (chunk / 108).max(1) as i64;
    let mut out = Vec::new();
    let mut segments = Vec::new();
    if lo <= -1 {
        segments.push((lo, hi.min(-1)));
    }
    if hi >= 1 {
        segments.push((lo.max(1), hi));
    }
    for (a, b) in segments {
        let mut s = a;
        while s <= b {
            let e = s.saturating_add(per - 1).min(b);
            out.push((s, e));
            if e == i64::MAX {
                break;
            }
            s = e + 1;
        }
    }
    out
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest");
    out.with_file_name(name)
}

fn manifest_header(args: &RangeArgs, cfg: &SolverConfig) -> String {
    let format = match args.output.format {
        Format::JsonLines => "json-lines",
        Format::Csv => "csv",
    };
    let policy = match cfg.bound_policy {
        BoundPolicy::Explicit => "explicit",
        BoundPolicy::HallDerived => "hall",
    };
    format!(
        "mordell-range 1\nparams from={} to={} chunk={} format={format} policy={policy} y_bound={} hall_coeff={}\n",
        args.from, args.to, args.chunk, cfg.y_bound, cfg.hall_coeff
    )
}

/// Completed chunks `(lo, hi, bytes)` of a manifest written with `header`, and whether it finished.
fn read_manifest(path: &Path, header: &str) -> std::result::Result<(Vec<(i64, i64, u64)>, bool), CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let Some(body) = text.strip_prefix(header) else {
        return Err(CliError::Usage(format!("{} was written with different parameters", path.display())));
    };
    let mut done = Vec::new();
    let mut finished = false;
    for line in body.lines() {
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["done", lo, hi, bytes] => {
                let parse = |s: &str| s.parse::<i64>().map_err(|_| CliError::Failed(format!("corrupt manifest line {line:?}")));
                let bytes = bytes.parse::<u64>().map_err(|_| CliError::Failed(format!("corrupt manifest line {line:?}")))?;
                done.push((parse(lo)?, parse(hi)?, bytes));
            }
            ["complete", "true"] => finished = true,
            ["complete", "false"] | [] => {}
            // A torn final line from an interrupted write is ignored.
            _ => break,
        }
    }
    Ok((done, finished))
}

fn render(sets: &[SolutionSet], format: Format) -> String {
    match format {
        Format::JsonLines => sets.iter().map(|s| json_line(s) + "\n").collect(),
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
            for s in sets {
                report::write_csv_rows(&mut w, s).expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
        }
    }
}

fn csv_header() -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    report::write_csv_header(&mut w).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
}

pub fn cmd_range(args: &RangeArgs) -> CliResult {
    let cfg = args.solver.config()?;
    if args.from > args.to || (args.from == 0 && args.to == 0) {
        return Err(Error::InvalidRange { lo: args.from, hi: args.to }.into());
    }
    let chunks = range_chunks(args.from, args.to, args.chunk);
    let format = args.output.format;
    let Some(out_path) = &args.output.out else {
        let mut out = io::stdout().lock();
        if format == Format::Csv {
            out.write_all(csv_header().as_bytes()).map_err(io_err(Path::new("<stdout>")))?;
        }
        for (lo, hi) in chunks {
            let sets = solve_chunk(lo, hi, &cfg, args)?;
            out.write_all(render(&sets, format).as_bytes()).map_err(io_err(Path::new("<stdout>")))?;
        }
        return Ok(());
    };

    let manifest = manifest_path(out_path);
    let header = manifest_header(args, &cfg);
    let mut start = 0;
    let mut kept_bytes = 0u64;
    let mut manifest_body = String::new();
    if args.resume && manifest.exists() {
        let (done, finished) = read_manifest(&manifest, &header)?;
        if finished {
            eprintln!("{} is already complete", out_path.display());
            return Ok(());
        }
        for (i, (lo, hi, bytes)) in done.iter().enumerate() {
            if chunks.get(i) != Some(&(*lo, *hi)) {
                return Err(CliError::Failed(format!("{} does not match the chunk plan", manifest.display())));
            }
            start = i + 1;
            kept_bytes = *bytes;
            manifest_body.push_str(&format!("done {lo} {hi} {bytes}\n"));
        }
        eprintln!("resuming after {start} of {} chunks", chunks.len());
    }

    let file = OpenOptions::new().create(true).write(true).truncate(false).open(out_path).map_err(io_err(out_path))?;
    file.set_len(kept_bytes).map_err(io_err(out_path))?;
    let mut file = OpenOptions::new().append(true).open(out_path).map_err(io_err(out_path))?;
    let write_manifest = |body: &str, finished: bool| -> CliResult {
        let tmp = manifest.with_extension("manifest.tmp");
        fs::write(&tmp, format!("{header}{body}complete {finished}\n")).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &manifest).map_err(io_err(&manifest))
    };
    if start == 0 && format == Format::Csv {
        file.write_all(csv_header().as_bytes()).map_err(io_err(out_path))?;
    }
    write_manifest(&manifest_body, false)?;
    for &(lo, hi) in &chunks[start..] {
        let sets = solve_chunk(lo, hi, &cfg, args)?;
        file.write_all(render(&sets, format).as_bytes()).map_err(io_err(out_path))?;
        file.sync_data().map_err(io_err(out_path))?;
        let bytes = file.metadata().map_err(io_err(out_path))?.len();
        manifest_body.push_str(&format!("done {lo} {hi} {bytes}\n"));
        write_manifest(&manifest_body, false)?;
    }
    write_manifest(&manifest_body, true)?;
    Ok(())
}

fn solve_chunk(lo: i64, hi: i64, cfg: &SolverConfig, args: &RangeArgs) -> std::result::Result<Vec<SolutionSet>, CliError> {
    let map = with_workers(args.output.workers, || solve_range_chunked(lo, hi, cfg, args.chunk))??;
    Ok(map.into_values().collect())
}

fn read_input(path: &Path) -> std::result::Result<(String, Format), CliError> {
    let mut text = String::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_string(&mut text))
        .map_err(io_err(path))?;
    let format = detect_format(&text);
    Ok((text, format))
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult {
    let (text, format) = read_input(&args.input)?;
    let records = parse_records(text.as_bytes(), format)?;
    let mut failures = 0;
    for rec in &records {
        for problem in verify_record(rec) {
            failures += 1;
            eprintln!("{}: record {} (k = {}): {problem}", args.input.display(), rec.line, rec.set.k);
        }
    }
    if failures > 0 {
        return Err(CliError::Failed(format!("{failures} problem(s) in {} record(s)", records.len())));
    }
    println!("{}: {} record(s) verified", args.input.display(), records.len());
    Ok(())
}

pub fn cmd_stats(args: &StatsArgs) -> CliResult {
    if let Some(t) = args.hall {
        if !t.is_finite() {
            return Err(CliError::Usage(format!("--hall threshold must be finite, got {t}")));
        }
    }
    let (text, format) = read_input(&args.input)?;
    let sets: Vec<SolutionSet> = parse_records(text.as_bytes(), format)?.into_iter().map(|r| r.set).collect();
    let filter = if args.sixth_power_free { Filter::SixthPowerFree } else { Filter::All };
    let mut out = io::stdout().lock();
    let stdout = Path::new("<stdout>");
    match histogram(&sets, filter, args.allow_incomplete) {
        Ok(h) => {
            let range = h.range.as_ref().map(|(a, b)| format!("k in [{a}, {b}]")).unwrap_or_else(|| "no records".into());
            writeln!(out, "histogram ({}, {range}, {} curves)", filter.name(), h.total()).map_err(io_err(stdout))?;
            if h.incomplete > 0 {
                writeln!(out, "note: {} bound-limited record(s) included", h.incomplete).map_err(io_err(stdout))?;
            }
            writeln!(out, "N_k\tcurves").map_err(io_err(stdout))?;
            for (n, c) in &h.counts {
                writeln!(out, "{n}\t{c}").map_err(io_err(stdout))?;
            }
        }
        Err(Error::IncompleteResults(n)) => {
            writeln!(out, "histogram withheld: {n} bound-limited record(s); pass --allow-incomplete to include them")
                .map_err(io_err(stdout))?;
        }
        Err(e) => return Err(e.into()),
    }
    if let Some(t) = args.hall {
        writeln!(out, "\nhall measures > {t}\nk\tX\tmeasure").map_err(io_err(stdout))?;
        for r in hall_measures(&sets, t)? {
            writeln!(out, "{}\t{}\t{}", r.k, r.x, r.measure()).map_err(io_err(stdout))?;
        }
    }
    if let Some(t) = &args.large {
        writeln!(out, "\nsolutions with X > {t}\nk\tX\tY").map_err(io_err(stdout))?;
        for p in large_solutions(&sets, t) {
            writeln!(out, "{}\t{}\t{}", p.k, p.x, p.y).map_err(io_err(stdout))?;
        }
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Range(a) => cmd_range(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Stats(a) => cmd_stats(a),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            code
        }
    }
}
