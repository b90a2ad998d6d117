//! The `wham` command line.
//!
//! ```text
//! wham binarize --input base.fvecs --bits 32 --output base.whc
//! wham weights  --bits 32 --scheme uniform-asym --output w.whw
//! wham build    --codes base.whc --m auto --output base.whi
//! wham query    --index base.whi --weights w.whw --queries q.whc -k 10
//! wham verify   --bits 12 --n 2000 --trials 50
//! wham bench    --config bench.toml
//! ```
//!
//! Exit status: 0 on success, 1 for usage errors, 2 for I/O and format errors, 3
//! when a verification fails.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::baseline::{linear_scan_context, mih_weighted_topk};
use crate::code::{CodeSet, QueryContext, WeightTable};
use crate::error::{Error, Result};
use crate::eval::{
    run_benchmark, BenchConfig, Method, OutputPaths, TableCount, BUNDLED_CONFIG, SEED_ENV,
};
use crate::fixtures::{binarize_lsh, bit_balance, synth_weights, WeightScheme};
use crate::heap::Neighbor;
use crate::io;
use crate::multi::MultiIndex;
use crate::single::SingleIndexTable;
use crate::verify::{run_verify, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "wham",
    version,
    about = "Exact K-NN search over weighted Hamming codes"
)]
pub struct Cli {
    /// Worker threads for query batches (0 = one per core).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hash .fvecs/.bvecs vectors to binary codes with random hyperplanes.
    Binarize(BinarizeArgs),
    /// Write a synthetic weight table.
    Weights(WeightsArgs),
    /// Build a multi-index over a code file.
    Build(BuildArgs),
    /// Answer K-NN queries, one output line per query.
    Query(QueryArgs),
    /// Run the enumeration and exactness self-checks.
    Verify(VerifyArgs),
    /// Run a benchmark described by a TOML config.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct BinarizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub bits: usize,
    /// Defaults to $WHAM_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Read at most this many vectors.
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[arg(long)]
    pub bits: usize,
    #[arg(long, default_value = "uniform-asym")]
    pub scheme: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub codes: PathBuf,
    /// Substring tables, or "auto".
    #[arg(long, default_value = "auto")]
    pub m: String,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub weights: PathBuf,
    /// Query codes in the code file format.
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(short = 'k', long = "k")]
    pub k: usize,
    /// miwq, linear, mih or single.
    #[arg(long, default_value = "miwq")]
    pub method: String,
    /// Write results here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 12)]
    pub bits: usize,
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Negative control: corrupt the flip-cost ranking so the checks must fail.
    #[arg(long)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, required_unless_present = "bundled", conflicts_with = "bundled")]
    pub config: Option<PathBuf>,
    /// Use the desk-scale config shipped with the crate.
    #[arg(long)]
    pub bundled: bool,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Format { .. } | Error::Dimension { .. } => EXIT_IO,
        Error::UnsupportedLength { .. }
        | Error::InvalidWeight { .. }
        | Error::Argument(_)
        | Error::Config(_) => EXIT_USAGE,
    }
}

/// Parses `args` (program name first) and runs the command, writing results to `out`
/// and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Binarize(a) => binarize(a, out),
        Command::Weights(a) => weights(a, out),
        Command::Build(a) => build(a, out, err),
        Command::Query(a) => query(a, cli.threads, out, err),
        Command::Verify(a) => verify(a, out, err),
        Command::Bench(a) => bench(a, out, err),
    }
}

fn resolve_seed(arg: Option<u64>) -> Result<u64> {
    if let Some(seed) = arg {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::argument(format!("{SEED_ENV}={v:?} is not a u64"))),
        Err(_) => Ok(0),
    }
}

fn need_file(path: &Path) -> Result<()> {
    if !path.is_file() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{}: no such file", path.display()),
        )));
    }
    Ok(())
}

fn need_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{}: output directory does not exist", dir.display()),
            )))
        }
        _ => Ok(()),
    }
}

fn binarize(a: &BinarizeArgs, out: &mut dyn Write) -> Result<i32> {
    need_file(&a.input)?;
    need_parent(&a.output)?;
    if a.bits == 0 || a.bits > crate::MAX_BITS {
        return Err(Error::argument(format!(
            "--bits must be in 1..={}, got {}",
            crate::MAX_BITS,
            a.bits
        )));
    }
    let seed = resolve_seed(a.seed)?;
    let vectors = io::read_vectors(&a.input, a.limit)?;
    let codes = binarize_lsh(&vectors, a.bits, seed)?;
    io::save_codes(&a.output, &codes)?;
    let balance = bit_balance(&codes);
    let (lo, hi) = balance
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        });
    let mean = balance.iter().sum::<f64>() / balance.len() as f64;
    writeln!(out, "n={} b={} seed={seed}", codes.len(), a.bits)?;
    if codes.is_empty() {
        writeln!(out, "bit balance: n/a (no vectors)")?;
    } else {
        writeln!(out, "bit balance: min={lo:.3} mean={mean:.3} max={hi:.3}")?;
    }
    Ok(EXIT_OK)
}

fn weights(a: &WeightsArgs, out: &mut dyn Write) -> Result<i32> {
    need_parent(&a.output)?;
    let scheme: WeightScheme = a.scheme.parse()?;
    let seed = resolve_seed(a.seed)?;
    let table = synth_weights(a.bits, seed, scheme)?;
    io::save_weights(&a.output, &table)?;
    writeln!(out, "b={} scheme={scheme} seed={seed}", a.bits)?;
    Ok(EXIT_OK)
}

fn build(a: &BuildArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    need_file(&a.codes)?;
    need_parent(&a.output)?;
    let requested: TableCount = a.m.parse()?;
    let codes = io::load_codes(&a.codes)?;
    let m = requested.resolve(codes.bits(), codes.len());
    if m > codes.bits() {
        return Err(Error::argument(format!(
            "m = {m} exceeds code length {}",
            codes.bits()
        )));
    }
    if codes.is_empty() {
        writeln!(err, "warning: no codes, building an empty index")?;
    }
    let ix = MultiIndex::build(codes, m)?;
    io::save_index(&a.output, &ix)?;
    let spans: Vec<String> = ix.spans().iter().map(|s| s.len.to_string()).collect();
    let buckets: Vec<String> = ix
        .tables()
        .iter()
        .map(|t| t.bucket_count().to_string())
        .collect();
    writeln!(out, "n={} b={} m={}", ix.len(), ix.bits(), ix.m())?;
    writeln!(out, "span lengths: {}", spans.join(" "))?;
    writeln!(out, "buckets per table: {}", buckets.join(" "))?;
    Ok(EXIT_OK)
}

/// `ordinal (id:distance) ...` with six decimals.
pub fn format_result_line(ordinal: usize, neighbors: &[Neighbor]) -> String {
    let mut line = ordinal.to_string();
    for n in neighbors {
        let _ = write!(line, " ({}:{:.6})", n.id, n.distance);
    }
    line
}

enum Searcher {
    Miwq(MultiIndex),
    Mih(MultiIndex),
    Linear(CodeSet),
    Single(SingleIndexTable),
}

impl Searcher {
    fn search(&self, q: &crate::BinaryCode, w: &WeightTable, k: usize) -> Result<Vec<Neighbor>> {
        match self {
            Searcher::Miwq(ix) => ix.query(q, w, k),
            Searcher::Mih(ix) => mih_weighted_topk(ix, q, w, k),
            Searcher::Linear(codes) => linear_scan_context(codes, &QueryContext::new(q, w)?, k),
            Searcher::Single(t) => t.query(q, w, k),
        }
    }
}

fn query(a: &QueryArgs, threads: usize, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    need_file(&a.index)?;
    need_file(&a.weights)?;
    need_file(&a.queries)?;
    if let Some(path) = &a.output {
        need_parent(path)?;
    }
    let method: Method = a.method.parse()?;
    if a.k == 0 {
        return Err(Error::argument("K must be at least 1"));
    }
    let ix = io::load_index(&a.index)?;
    let w = io::load_weights(&a.weights)?;
    let queries = io::load_codes(&a.queries)?;
    if w.len() != ix.bits() {
        return Err(Error::dimension(ix.bits(), w.len()));
    }
    if queries.bits() != ix.bits() {
        return Err(Error::dimension(ix.bits(), queries.bits()));
    }
    if ix.is_empty() {
        writeln!(
            err,
            "warning: the index is empty, every result line will be blank"
        )?;
    }
    let searcher = match method {
        Method::Miwq => Searcher::Miwq(ix),
        Method::Mih => Searcher::Mih(ix),
        Method::Linear => Searcher::Linear(ix.codes().clone()),
        Method::Single => Searcher::Single(SingleIndexTable::build(ix.codes())?),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::argument(format!("cannot start {threads} threads: {e}")))?;
    let lines: Vec<String> = pool.install(|| {
        (0..queries.len())
            .into_par_iter()
            .map(|i| {
                let found = searcher.search(&queries.get(i), &w, a.k)?;
                Ok(format_result_line(i, &found))
            })
            .collect::<Result<_>>()
    })?;
    let mut text = lines.join("\n");
    if !lines.is_empty() {
        text.push('\n');
    }
    match &a.output {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let config = VerifyConfig {
        bits: a.bits,
        n: a.n,
        trials: a.trials,
        seed: resolve_seed(a.seed)?,
        inject_fault: a.inject_fault,
    };
    let report = run_verify(&config)?;
    for w in &report.warnings {
        writeln!(err, "warning: {w}")?;
    }
    let body = report.to_string();
    for line in body.lines().filter(|l| !l.starts_with("warning: ")) {
        writeln!(out, "{line}")?;
    }
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY
    })
}

fn bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let mut config = match &a.config {
        Some(path) => {
            if !path.is_file() {
                return Err(Error::argument(format!(
                    "{}: config file not found",
                    path.display()
                )));
            }
            BenchConfig::load(path)?
        }
        None => {
            let mut c = BenchConfig::from_toml_str(BUNDLED_CONFIG)?;
            c.apply_seed_override(std::env::var(SEED_ENV).ok().as_deref())?;
            c
        }
    };
    if a.csv.is_some() || a.json.is_some() {
        config.output = Some(OutputPaths {
            csv: a.csv.clone(),
            json: a.json.clone(),
        });
    }
    if let Some(o) = &config.output {
        for p in o.csv.iter().chain(&o.json) {
            need_parent(p)?;
        }
    }
    writeln!(err, "seed: {}", config.seed)?;
    let report = run_benchmark(&config)?;
    report.write_csv(&mut *out)?;
    report.write_outputs()?;
    Ok(EXIT_OK)
}
