//! Runnable self-checks: bucket enumeration against exhaustive sorting, and
//! multi-index search against the linear scan, on seeded random instances.

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baseline::linear_scan_context;
use crate::code::{BinaryCode, CodeSet, QueryContext, WeightTable};
use crate::enumerate::BucketEnumerator;
use crate::error::{Error, Result};
use crate::fixtures::random_code;
use crate::multi::{choose_m, rounding_slack, MultiIndex};

/// Longest code for which every bucket is enumerated.
pub const EXHAUSTIVE_MAX_BITS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub bits: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Corrupts one flip cost after ranking, so the suite must report a failure.
    pub inject_fault: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            bits: 12,
            n: 2000,
            trials: 50,
            seed: 0,
            inject_fault: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub trials: usize,
    pub violations: usize,
    pub first_failure: Option<String>,
}

impl CheckResult {
    fn new(name: &'static str) -> Self {
        CheckResult {
            name,
            ..CheckResult::default()
        }
    }

    fn record(&mut self, outcome: std::result::Result<(), String>) {
        self.trials += 1;
        if let Err(msg) = outcome {
            self.violations += 1;
            self.first_failure.get_or_insert(msg);
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            write!(
                f,
                "{status} {}: {} trials, {} violations",
                c.name, c.trials, c.violations
            )?;
            if let Some(msg) = &c.first_failure {
                write!(f, " (first: {msg})")?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "{}",
            if self.passed() {
                "verify: pass"
            } else {
                "verify: FAIL"
            }
        )
    }
}

/// Random per-bit weights; every other trial snaps them to a coarse grid so that
/// equal distances are common.
pub fn random_weights(rng: &mut impl Rng, bits: usize, coarse: bool) -> WeightTable {
    let mut draw = || {
        let x: f64 = rng.random_range(0.0..1.0);
        if coarse {
            (x * 4.0).floor() / 4.0
        } else {
            x
        }
    };
    WeightTable::new((0..bits).map(|_| [draw(), draw()]).collect()).expect("finite, non-negative")
}

/// Exhausts the enumerator of `ctx` and compares it with all `2^b` codes sorted by
/// distance.
pub fn check_enumeration(ctx: &QueryContext) -> std::result::Result<(), String> {
    let bits = ctx.bits();
    if bits > EXHAUSTIVE_MAX_BITS {
        return Err(format!("{bits} bits is too many to enumerate exhaustively"));
    }
    let total = 1usize << bits;
    let slack = rounding_slack(ctx);
    let mut enumerator = BucketEnumerator::new(ctx).map_err(|e| e.to_string())?;
    let mut seen = vec![false; total];
    let mut emitted = Vec::with_capacity(total);
    let mut previous = f64::NEG_INFINITY;
    while let Some(bucket) = enumerator.next_bucket() {
        let key = bucket.key as usize;
        if key >= total || std::mem::replace(&mut seen[key], true) {
            return Err(format!("bucket {key:#x} emitted twice or out of range"));
        }
        if bucket.weight < previous {
            return Err(format!(
                "weight decreased from {previous} to {} at emission {}",
                bucket.weight,
                emitted.len()
            ));
        }
        previous = bucket.weight;
        let exact = ctx.key_weight(bucket.key);
        if (bucket.weight - exact).abs() > slack {
            return Err(format!(
                "bucket {key:#x} reported weight {} but its distance is {exact}",
                bucket.weight
            ));
        }
        emitted.push(bucket.weight);
    }
    if emitted.len() != total {
        return Err(format!("{} of {total} buckets emitted", emitted.len()));
    }
    let mut oracle: Vec<f64> = (0..total as u64).map(|k| ctx.key_weight(k)).collect();
    oracle.sort_by(f64::total_cmp);
    for (i, (&got, &want)) in emitted.iter().zip(&oracle).enumerate() {
        if (got - want).abs() > slack {
            return Err(format!(
                "emission {i} has weight {got}, sorted oracle has {want}"
            ));
        }
    }
    Ok(())
}

/// Compares the multi-index answer with the linear scan for one query.
pub fn check_query(
    ix: &MultiIndex,
    q: &BinaryCode,
    w: &WeightTable,
    k: usize,
) -> std::result::Result<(), String> {
    let ctx = QueryContext::new(q, w).map_err(|e| e.to_string())?;
    let got = ix.query_context(&ctx, k).map_err(|e| e.to_string())?;
    let want = linear_scan_context(ix.codes(), &ctx, k).map_err(|e| e.to_string())?;
    if got.neighbors != want {
        let at = got
            .neighbors
            .iter()
            .zip(&want)
            .position(|(a, b)| a != b)
            .unwrap_or(got.neighbors.len().min(want.len()));
        return Err(format!(
            "m={} K={k}: rank {at} differs ({:?} vs linear {:?})",
            ix.m(),
            got.neighbors.get(at),
            want.get(at)
        ));
    }
    if let Some(worst) = got.neighbors.iter().find(|n| n.distance > got.stats.bound) {
        return Err(format!(
            "returned distance {} exceeds the final bound {}",
            worst.distance, got.stats.bound
        ));
    }
    Ok(())
}

pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    let bits = config.bits;
    if bits == 0 || bits > crate::MAX_BITS {
        return Err(Error::UnsupportedLength {
            bits,
            max: crate::MAX_BITS,
        });
    }
    let mut report = VerifyReport::default();
    if config.trials == 0 {
        report
            .warnings
            .push("trials = 0: nothing was checked, passing vacuously".into());
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut enumeration = CheckResult::new("enumerator completeness and order");
    let enum_bits = bits.min(EXHAUSTIVE_MAX_BITS);
    if enum_bits < bits {
        report.warnings.push(format!(
            "enumeration checks use {enum_bits}-bit contexts ({bits} bits cannot be exhausted)"
        ));
    }
    for trial in 0..config.trials {
        let q = random_code(&mut rng, enum_bits);
        let w = random_weights(&mut rng, enum_bits, trial % 2 == 1);
        let mut ctx = QueryContext::new(&q, &w)?;
        if config.inject_fault {
            ctx.inject_fault();
        }
        enumeration.record(check_enumeration(&ctx));
    }
    report.checks.push(enumeration);

    let mut search = CheckResult::new("multi-index search equals linear scan");
    // Spans wider than this make sparse uniform instances needlessly slow.
    const SPAN_LIMIT: usize = 20;
    let auto = choose_m(bits, config.n);
    let mut distinct_m: Vec<usize> = vec![1, 2, 4, auto];
    distinct_m.retain(|&m| {
        m <= bits
            && (m == auto || bits.div_ceil(m) <= SPAN_LIMIT)
            && bits.div_ceil(m) <= crate::enumerate::MAX_ENUM_BITS
    });
    let distinct_m: Vec<usize> = {
        let mut seen = HashSet::new();
        distinct_m.into_iter().filter(|m| seen.insert(*m)).collect()
    };
    for trial in 0..config.trials {
        // Half the instances draw codes near a few centers so that buckets collide.
        let centers: Vec<BinaryCode> = (0..8).map(|_| random_code(&mut rng, bits)).collect();
        let clustered = trial % 2 == 0;
        let mut codes = CodeSet::with_capacity(bits, config.n)?;
        for _ in 0..config.n {
            let c = if clustered {
                let mut c = centers[rng.random_range(0..centers.len())];
                for i in 0..bits {
                    if rng.random_bool(0.1) {
                        c.flip(i);
                    }
                }
                c
            } else {
                random_code(&mut rng, bits)
            };
            codes.push(&c)?;
        }
        let m = distinct_m[trial % distinct_m.len()];
        let ix = MultiIndex::build(codes, m)?;
        let w = random_weights(&mut rng, bits, trial % 4 >= 2);
        let q = if clustered {
            centers[0]
        } else {
            random_code(&mut rng, bits)
        };
        let k = rng.random_range(1..=100);
        search.record(check_query(&ix, &q, &w, k));
    }
    report.checks.push(search);
    Ok(report)
}
