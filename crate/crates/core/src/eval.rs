//! Precision, speed-up, ground truth and the benchmark runner.
//!
//! A benchmark is described by a TOML file:
//!
//! ```toml
//! seed = 42
//! methods = ["linear", "mih", "miwq"]
//! bits = [32]
//! k = [1, 10, 100]
//! m = "auto"            # or a table count
//! weights = "uniform-asym"
//! warmup = 10
//! repetitions = 1
//!
//! [data]
//! kind = "random-codes" # planted | gaussian | fvecs | bvecs
//! n = 100000
//! queries = 1000
//!
//! [truth]
//! kind = "linear"       # euclidean | labels | none
//! ```
//!
//! Timings are wall-clock per query on the calling thread, measured after the warm-up
//! queries and excluding index construction and ground truth.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{linear_scan_context, mih_weighted_with_stats};
use crate::code::{BinaryCode, CodeSet, QueryContext, WeightTable};
use crate::error::{Error, Result};
use crate::fixtures::{
    binarize_lsh, gaussian_vectors, planted_instance, random_code, random_codes, synth_weights,
    WeightScheme,
};
use crate::io::{read_labels, read_vectors, VectorSet};
use crate::multi::{choose_m, MultiIndex};
use crate::single::{SingleIndexTable, SINGLE_MAX_BITS};
use crate::CodeId;

/// Environment variable that replaces the configured seed.
pub const SEED_ENV: &str = "WHAM_SEED";

/// Fraction of the first `k` retrieved ids that appear in `truth`.
///
/// The denominator is always `k`, so a result list shorter than `k` cannot score 1.
pub fn precision_at_k(retrieved: &[CodeId], truth: &[CodeId], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::argument("K must be at least 1"));
    }
    let truth: HashSet<CodeId> = truth.iter().copied().collect();
    let hits = retrieved
        .iter()
        .take(k)
        .filter(|id| truth.contains(id))
        .count();
    Ok(hits as f64 / k as f64)
}

/// Fraction of the first `k` retrieved ids whose label equals `query_label`.
pub fn label_precision_at_k(
    retrieved: &[CodeId],
    base_labels: &[u32],
    query_label: u32,
    k: usize,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::argument("K must be at least 1"));
    }
    let mut hits = 0;
    for &id in retrieved.iter().take(k) {
        let label = base_labels.get(id as usize).ok_or_else(|| {
            Error::argument(format!(
                "no label for id {id} ({} labels)",
                base_labels.len()
            ))
        })?;
        hits += (*label == query_label) as usize;
    }
    Ok(hits as f64 / k as f64)
}

pub fn speedup_factor(t_linear_ms: f64, t_method_ms: f64) -> Result<f64> {
    if t_method_ms.is_nan() || t_linear_ms.is_nan() || t_method_ms <= 0.0 || t_linear_ms <= 0.0 {
        return Err(Error::argument(format!(
            "query times must be positive, got {t_linear_ms} and {t_method_ms}"
        )));
    }
    Ok(t_linear_ms / t_method_ms)
}

/// Per query, the `t` base ids nearest in squared Euclidean distance, ties by id.
pub fn euclidean_groundtruth(
    base: &VectorSet,
    queries: &VectorSet,
    t: usize,
) -> Result<Vec<Vec<CodeId>>> {
    if queries.n > 0 && base.n > 0 && base.d != queries.d {
        return Err(Error::dimension(base.d, queries.d));
    }
    if base.n > CodeId::MAX as usize {
        return Err(Error::argument(
            "too many base vectors for 32-bit identifiers",
        ));
    }
    let t = t.min(base.n);
    Ok((0..queries.n)
        .into_par_iter()
        .map(|qi| {
            let q = queries.row(qi);
            let mut scored: Vec<(f64, CodeId)> = base
                .rows()
                .enumerate()
                .map(|(id, x)| {
                    let d: f64 = x
                        .iter()
                        .zip(q)
                        .map(|(&a, &b)| {
                            let diff = a as f64 - b as f64;
                            diff * diff
                        })
                        .sum();
                    (d, id as CodeId)
                })
                .collect();
            let cmp =
                |a: &(f64, CodeId), b: &(f64, CodeId)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if t > 0 && t < scored.len() {
                scored.select_nth_unstable_by(t - 1, cmp);
                scored.truncate(t);
            }
            scored.sort_unstable_by(cmp);
            scored.into_iter().take(t).map(|(_, id)| id).collect()
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Look-up-table linear scan.
    Linear,
    /// Hamming-first multi-index search re-ranked by weight.
    Mih,
    /// Weighted multi-index search.
    Miwq,
    /// One table over the whole code (at most 32 bits).
    Single,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Linear, Method::Mih, Method::Miwq, Method::Single];

    pub fn name(self) -> &'static str {
        match self {
            Method::Linear => "linear",
            Method::Mih => "mih",
            Method::Miwq => "miwq",
            Method::Single => "single",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::argument(format!(
                    "unknown method {s:?} (expected linear, mih, miwq or single)"
                ))
            })
    }
}

/// Number of substring tables: fixed, or derived from `b` and `n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MRepr", into = "MRepr")]
pub enum TableCount {
    #[default]
    Auto,
    Fixed(usize),
}

impl TableCount {
    pub fn resolve(self, bits: usize, n: usize) -> usize {
        match self {
            TableCount::Auto => choose_m(bits, n),
            TableCount::Fixed(m) => m,
        }
    }
}

impl FromStr for TableCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(TableCount::Auto);
        }
        match s.parse::<usize>() {
            Ok(m) if m > 0 => Ok(TableCount::Fixed(m)),
            _ => Err(Error::argument(format!(
                "table count must be \"auto\" or a positive integer, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for TableCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableCount::Auto => f.write_str("auto"),
            TableCount::Fixed(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum MRepr {
    Count(usize),
    Name(String),
}

impl TryFrom<MRepr> for TableCount {
    type Error = Error;

    fn try_from(r: MRepr) -> Result<Self> {
        match r {
            MRepr::Count(m) => format!("{m}").parse(),
            MRepr::Name(s) => s.parse(),
        }
    }
}

impl From<TableCount> for MRepr {
    fn from(m: TableCount) -> Self {
        match m {
            TableCount::Auto => MRepr::Name("auto".into()),
            TableCount::Fixed(m) => MRepr::Count(m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataSource {
    /// Uniform database codes and uniform queries.
    RandomCodes { n: usize, queries: usize },
    /// Uniform background plus a cluster of perturbed copies around every query.
    Planted {
        n: usize,
        queries: usize,
        cluster: usize,
        #[serde(default)]
        flip: Option<f64>,
    },
    /// Standard-normal vectors binarized by random hyperplanes.
    Gaussian { n: usize, queries: usize, d: usize },
    Fvecs {
        base: PathBuf,
        queries: PathBuf,
        #[serde(default)]
        limit: Option<usize>,
        #[serde(default)]
        query_limit: Option<usize>,
    },
    Bvecs {
        base: PathBuf,
        queries: PathBuf,
        #[serde(default)]
        limit: Option<usize>,
        #[serde(default)]
        query_limit: Option<usize>,
    },
}

impl DataSource {
    fn has_vectors(&self) -> bool {
        matches!(
            self,
            DataSource::Gaussian { .. } | DataSource::Fvecs { .. } | DataSource::Bvecs { .. }
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TruthSource {
    /// Exact weighted K-NN by linear scan, so exact methods score 1.
    #[default]
    Linear,
    /// Top-`depth` ids by Euclidean distance in the original vector space.
    Euclidean {
        depth: usize,
    },
    /// One integer label per line; a retrieved id is correct when labels match.
    Labels {
        base: PathBuf,
        queries: PathBuf,
    },
    None,
}

fn default_warmup() -> usize {
    10
}

fn default_repetitions() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub json: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub seed: u64,
    pub methods: Vec<Method>,
    pub bits: Vec<usize>,
    pub k: Vec<usize>,
    #[serde(default)]
    pub m: TableCount,
    pub weights: WeightScheme,
    #[serde(default = "default_warmup")]
    pub warmup: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    pub data: DataSource,
    #[serde(default)]
    pub truth: TruthSource,
    #[serde(default)]
    pub output: Option<OutputPaths>,
}

impl BenchConfig {
    /// Parses and validates a TOML config. Relative paths stay relative.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: BenchConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file, resolves its relative paths against the file's directory
    /// and applies the seed override from the environment.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut config = BenchConfig::from_toml_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            config.resolve_paths(dir);
        }
        config.apply_seed_override(std::env::var(SEED_ENV).ok().as_deref())?;
        Ok(config)
    }

    pub fn apply_seed_override(&mut self, value: Option<&str>) -> Result<()> {
        if let Some(v) = value {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not a u64")))?;
        }
        Ok(())
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        match &mut self.data {
            DataSource::Fvecs { base, queries, .. } | DataSource::Bvecs { base, queries, .. } => {
                fix(base);
                fix(queries);
            }
            _ => {}
        }
        if let TruthSource::Labels { base, queries } = &mut self.truth {
            fix(base);
            fix(queries);
        }
        if let Some(out) = &mut self.output {
            out.csv.iter_mut().for_each(fix);
            out.json.iter_mut().for_each(fix);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.methods.is_empty() {
            return bad("methods must not be empty".into());
        }
        if self.bits.is_empty() || self.k.is_empty() {
            return bad("bits and k must not be empty".into());
        }
        for &b in &self.bits {
            if b == 0 || b > crate::MAX_BITS {
                return bad(format!("code length {b} outside 1..={}", crate::MAX_BITS));
            }
            if self.methods.contains(&Method::Single) && b > SINGLE_MAX_BITS {
                return bad(format!(
                    "method single supports at most {SINGLE_MAX_BITS} bits, got {b}"
                ));
            }
            if let TableCount::Fixed(m) = self.m {
                if m > b {
                    return bad(format!("m = {m} exceeds code length {b}"));
                }
            }
        }
        if self.k.contains(&0) {
            return bad("K must be at least 1".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if let DataSource::Planted { flip: Some(f), .. } = self.data {
            if !(0.0..=1.0).contains(&f) {
                return bad(format!("flip probability {f} outside [0, 1]"));
            }
        }
        if let DataSource::Gaussian { d: 0, .. } = self.data {
            return bad("dimension d must be positive".into());
        }
        if let TruthSource::Euclidean { depth } = self.truth {
            if !self.data.has_vectors() {
                return bad("euclidean truth needs a vector data source".into());
            }
            if depth == 0 {
                return bad("euclidean depth must be positive".into());
            }
        }
        Ok(())
    }
}

/// One row of the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: Method,
    pub b: usize,
    /// Table count used by index methods; empty for the linear scan.
    pub m: Option<usize>,
    #[serde(rename = "K")]
    pub k: usize,
    pub mean_ms: f64,
    pub speedup: f64,
    /// Empty when the config asks for no ground truth.
    pub precision: Option<f64>,
    pub mean_candidates: f64,
    pub mean_buckets: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub seed: u64,
    pub config: BenchConfig,
    pub records: Vec<BenchRecord>,
}

impl BenchReport {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.records {
            out.serialize(r).map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.into()))
    }

    /// Writes the files named in the config's `[output]` table, if any.
    pub fn write_outputs(&self) -> Result<()> {
        let Some(out) = &self.config.output else {
            return Ok(());
        };
        if let Some(path) = &out.csv {
            std::fs::write(path, self.to_csv_string()?)?;
        }
        if let Some(path) = &out.json {
            std::fs::write(path, self.to_json_string()?)?;
        }
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::argument(format!("{other:?}")),
    }
}

enum Truth {
    Linear,
    Ids(Vec<Vec<CodeId>>),
    Labels { base: Vec<u32>, queries: Vec<u32> },
    None,
}

struct Workload {
    codes: CodeSet,
    queries: Vec<BinaryCode>,
    weights: WeightTable,
}

/// Loads or generates everything that does not depend on `b`.
struct Prepared {
    vectors: Option<(VectorSet, VectorSet)>,
    truth: Truth,
}

fn mix(seed: u64, salt: u64) -> u64 {
    seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn prepare(config: &BenchConfig) -> Result<Prepared> {
    let vectors = match &config.data {
        DataSource::Gaussian { n, queries, d } => Some((
            gaussian_vectors(*n, *d, mix(config.seed, 1)),
            gaussian_vectors(*queries, *d, mix(config.seed, 2)),
        )),
        DataSource::Fvecs {
            base,
            queries,
            limit,
            query_limit,
        }
        | DataSource::Bvecs {
            base,
            queries,
            limit,
            query_limit,
        } => Some((
            read_vectors(base, *limit)?,
            read_vectors(queries, *query_limit)?,
        )),
        _ => None,
    };
    let truth = match &config.truth {
        TruthSource::Linear => Truth::Linear,
        TruthSource::None => Truth::None,
        TruthSource::Euclidean { depth } => {
            let (base, queries) = vectors.as_ref().expect("validated");
            Truth::Ids(euclidean_groundtruth(base, queries, *depth)?)
        }
        TruthSource::Labels { base, queries } => Truth::Labels {
            base: read_labels(base)?,
            queries: read_labels(queries)?,
        },
    };
    Ok(Prepared { vectors, truth })
}

fn workload(config: &BenchConfig, prepared: &Prepared, bits: usize) -> Result<Workload> {
    let seed = mix(config.seed, 100 + bits as u64);
    let weights = synth_weights(bits, mix(seed, 3), config.weights)?;
    let (codes, queries) = match (&config.data, &prepared.vectors) {
        (_, Some((base, queries))) => {
            let lsh = mix(seed, 4);
            let codes = binarize_lsh(base, bits, lsh)?;
            let queries = binarize_lsh(queries, bits, lsh)?.iter().collect();
            (codes, queries)
        }
        (DataSource::RandomCodes { n, queries }, None) => {
            let codes = random_codes(*n, bits, mix(seed, 5))?;
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 6));
            let queries = (0..*queries).map(|_| random_code(&mut rng, bits)).collect();
            (codes, queries)
        }
        (
            DataSource::Planted {
                n,
                queries,
                cluster,
                flip,
            },
            None,
        ) => {
            let flip = flip.unwrap_or(0.5 / bits as f64);
            let inst = planted_instance(*n, bits, *queries, *cluster, flip, mix(seed, 7))?;
            (inst.codes, inst.queries)
        }
        _ => unreachable!("vector sources are prepared"),
    };
    if let Truth::Labels { base, queries: q } = &prepared.truth {
        if base.len() != codes.len() || q.len() != queries.len() {
            return Err(Error::argument(format!(
                "label files cover {} base and {} query items, data has {} and {}",
                base.len(),
                q.len(),
                codes.len(),
                queries.len()
            )));
        }
    }
    Ok(Workload {
        codes,
        queries,
        weights,
    })
}

enum Engine<'a> {
    Linear(&'a CodeSet),
    Mih(&'a MultiIndex),
    Miwq(&'a MultiIndex),
    Single(&'a SingleIndexTable),
}

struct Measured {
    mean_ms: f64,
    results: Vec<Vec<CodeId>>,
    mean_candidates: f64,
    mean_buckets: f64,
}

impl Engine<'_> {
    /// Returns ids, candidate count and bucket count.
    fn run(&self, q: &BinaryCode, w: &WeightTable, k: usize) -> Result<(Vec<CodeId>, u64, u64)> {
        let ids = |v: Vec<crate::Neighbor>| v.into_iter().map(|n| n.id).collect();
        Ok(match self {
            Engine::Linear(codes) => {
                let ctx = QueryContext::new(q, w)?;
                (
                    ids(linear_scan_context(codes, &ctx, k)?),
                    codes.len() as u64,
                    0,
                )
            }
            Engine::Mih(ix) => {
                let out = mih_weighted_with_stats(ix, q, w, k)?;
                (
                    ids(out.neighbors),
                    out.stats.candidates,
                    out.stats.buckets_probed,
                )
            }
            Engine::Miwq(ix) => {
                let out = ix.query_with_stats(q, w, k)?;
                (
                    ids(out.neighbors),
                    out.stats.candidates,
                    out.stats.buckets_probed,
                )
            }
            Engine::Single(t) => {
                let out = t.query_with_stats(q, w, k)?;
                (
                    ids(out.neighbors),
                    out.stats.candidates,
                    out.stats.buckets_probed,
                )
            }
        })
    }

    fn measure(&self, work: &Workload, k: usize, warmup: usize, reps: usize) -> Result<Measured> {
        let nq = work.queries.len();
        if nq > 0 {
            for i in 0..warmup {
                self.run(&work.queries[i % nq], &work.weights, k)?;
            }
        }
        let mut total = 0.0;
        let mut results = Vec::with_capacity(nq);
        let (mut candidates, mut buckets) = (0u64, 0u64);
        for rep in 0..reps {
            for q in &work.queries {
                let start = Instant::now();
                let (ids, c, b) = self.run(q, &work.weights, k)?;
                total += start.elapsed().as_secs_f64() * 1e3;
                if rep == 0 {
                    candidates += c;
                    buckets += b;
                    results.push(ids);
                }
            }
        }
        let per = |x: f64, count: usize| if count == 0 { 0.0 } else { x / count as f64 };
        Ok(Measured {
            mean_ms: per(total, nq * reps),
            results,
            mean_candidates: per(candidates as f64, nq),
            mean_buckets: per(buckets as f64, nq),
        })
    }
}

fn mean_precision(
    truth: &Truth,
    results: &[Vec<CodeId>],
    exact: &[Vec<CodeId>],
    k: usize,
) -> Result<Option<f64>> {
    if results.is_empty() {
        return Ok(match truth {
            Truth::None => None,
            _ => Some(0.0),
        });
    }
    let mut sum = 0.0;
    for (i, got) in results.iter().enumerate() {
        sum += match truth {
            Truth::None => return Ok(None),
            Truth::Linear => precision_at_k(got, &exact[i], k)?,
            Truth::Ids(lists) => precision_at_k(got, &lists[i], k)?,
            Truth::Labels { base, queries } => label_precision_at_k(got, base, queries[i], k)?,
        };
    }
    Ok(Some(sum / results.len() as f64))
}

/// Runs every (b, K, method) combination of the config.
///
/// The linear scan is always timed because it is the speed-up reference; its rows
/// appear only when `linear` is among the methods. Rows come out grouped by `b`,
/// then `K`, in the configured method order.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let prepared = prepare(config)?;
    let mut records = Vec::new();
    for &bits in &config.bits {
        let work = workload(config, &prepared, bits)?;
        let n = work.codes.len();
        let m = config.m.resolve(bits, n);
        let needs_multi = config
            .methods
            .iter()
            .any(|x| matches!(x, Method::Mih | Method::Miwq));
        let multi = needs_multi
            .then(|| MultiIndex::build(work.codes.clone(), m))
            .transpose()?;
        let single = config
            .methods
            .contains(&Method::Single)
            .then(|| SingleIndexTable::build(&work.codes))
            .transpose()?;

        for &k in &config.k {
            let linear =
                Engine::Linear(&work.codes).measure(&work, k, config.warmup, config.repetitions)?;
            for &method in &config.methods {
                let (measured, table_count) = match method {
                    Method::Linear => (None, None),
                    Method::Mih => (Some(Engine::Mih(multi.as_ref().unwrap())), Some(m)),
                    Method::Miwq => (Some(Engine::Miwq(multi.as_ref().unwrap())), Some(m)),
                    Method::Single => (Some(Engine::Single(single.as_ref().unwrap())), Some(1)),
                };
                let own;
                let measured = match measured {
                    None => &linear,
                    Some(engine) => {
                        own = engine.measure(&work, k, config.warmup, config.repetitions)?;
                        &own
                    }
                };
                let speedup = if method == Method::Linear {
                    1.0
                } else {
                    speedup_factor(linear.mean_ms, measured.mean_ms).unwrap_or(f64::NAN)
                };
                records.push(BenchRecord {
                    method,
                    b: bits,
                    m: table_count,
                    k,
                    mean_ms: measured.mean_ms,
                    speedup,
                    precision: mean_precision(
                        &prepared.truth,
                        &measured.results,
                        &linear.results,
                        k,
                    )?,
                    mean_candidates: measured.mean_candidates,
                    mean_buckets: measured.mean_buckets,
                });
            }
        }
    }
    Ok(BenchReport {
        seed: config.seed,
        config: config.clone(),
        records,
    })
}

/// Desk-scale configuration shipped with the crate (`wham bench --bundled`).
pub const BUNDLED_CONFIG: &str = include_str!("../configs/desk.toml");
