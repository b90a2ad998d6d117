//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wham::baseline::linear_scan_context;
use wham::eval::{run_benchmark, BenchConfig, Method};
use wham::fixtures::{
    mih_adversarial, planted_instance, random_code, random_codes, synth_weights, WeightScheme,
};
use wham::io::{read_codes, read_index, read_weights, write_codes, write_index, write_weights};
use wham::verify::{check_enumeration, random_weights};
use wham::{
    choose_m, hamming_distance, mih_weighted_topk, BucketEnumerator, ChunkLut, MultiIndex,
    QueryContext, WeightTable,
};

type Verdict = Result<String, String>;

/// Exactness and bound safety share their instances.
struct ExactnessRun {
    mismatches: Vec<String>,
    bound_violations: Vec<String>,
    queries: usize,
    instances: usize,
    seconds: f64,
}

fn exactness_run() -> ExactnessRun {
    let start = Instant::now();
    let bit_choices = [16, 32, 64];
    let m_choices = [None, Some(1), Some(2), Some(4)];
    let k_choices = [1, 10, 100];
    let n = 100_000;
    let mut run = ExactnessRun {
        mismatches: Vec::new(),
        bound_violations: Vec::new(),
        queries: 0,
        instances: 0,
        seconds: 0.0,
    };
    for i in 0..100usize {
        let bits = bit_choices[i % 3];
        let m = m_choices[(i / 3) % 4].unwrap_or_else(|| choose_m(bits, n));
        let k = k_choices[(i / 12) % 3];
        let seed = 1000 + i as u64;
        let inst = planted_instance(n, bits, 4, 100, 0.5 / bits as f64, seed).unwrap();
        let w = synth_weights(bits, seed, WeightScheme::UniformAsym).unwrap();
        let ix = MultiIndex::build(inst.codes, m).unwrap();
        let mut queries = inst.queries;
        if bits == 16 {
            queries.push(random_code(&mut ChaCha8Rng::seed_from_u64(seed), bits));
        }
        for q in &queries {
            let ctx = QueryContext::new(q, &w).unwrap();
            let got = ix.query_context(&ctx, k).unwrap();
            let want = linear_scan_context(ix.codes(), &ctx, k).unwrap();
            if got.neighbors != want {
                run.mismatches
                    .push(format!("instance {i} (b={bits} m={m} K={k})"));
            }
            if let Some(nb) = got
                .neighbors
                .iter()
                .find(|nb| nb.distance > got.stats.bound)
            {
                run.bound_violations.push(format!(
                    "instance {i}: distance {} > bound {}",
                    nb.distance, got.stats.bound
                ));
            }
            run.queries += 1;
        }
        run.instances += 1;
    }
    run.seconds = start.elapsed().as_secs_f64();
    run
}

fn criterion_1(run: &ExactnessRun) -> Verdict {
    let detail = format!(
        "{} instances, {} queries, {} mismatches, {:.1}s",
        run.instances,
        run.queries,
        run.mismatches.len(),
        run.seconds
    );
    if run.mismatches.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; first: {}", run.mismatches[0]))
    }
}

fn criterion_3(run: &ExactnessRun) -> Verdict {
    let detail = format!(
        "{} queries, {} bound violations",
        run.queries,
        run.bound_violations.len()
    );
    if run.bound_violations.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; first: {}", run.bound_violations[0]))
    }
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = Vec::new();
    let mut contexts = 0;
    for bits in [8, 12, 16] {
        for trial in 0..100 {
            // Odd trials use weights on a quarter grid: every sum is exact, so the
            // emitted sequence must equal the sorted oracle bit for bit.
            let dyadic = trial % 2 == 1;
            let q = random_code(&mut rng, bits);
            let w = random_weights(&mut rng, bits, dyadic);
            let ctx = QueryContext::new(&q, &w).unwrap();
            contexts += 1;
            if let Err(e) = check_enumeration(&ctx) {
                violations.push(format!("b={bits} trial {trial}: {e}"));
                continue;
            }
            if dyadic {
                let emitted: Vec<f64> = BucketEnumerator::new(&ctx)
                    .unwrap()
                    .map(|b| b.weight)
                    .collect();
                let mut oracle: Vec<f64> = (0..1u64 << bits).map(|k| ctx.key_weight(k)).collect();
                oracle.sort_by(f64::total_cmp);
                if emitted != oracle {
                    violations.push(format!("b={bits} trial {trial}: dyadic sequence differs"));
                }
            }
        }
    }
    let detail = format!(
        "{contexts} contexts over b in {{8,12,16}}, {} violations, {:.1}s",
        violations.len(),
        start.elapsed().as_secs_f64()
    );
    if violations.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; first: {}", violations[0]))
    }
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let config = BenchConfig::from_toml_str(
        r#"
        seed = 4
        methods = ["linear", "miwq"]
        bits = [32]
        k = [100]
        m = "auto"
        weights = "uniform-asym"
        warmup = 10
        [data]
        kind = "random-codes"
        n = 1000000
        queries = 1000
        [truth]
        kind = "linear"
        "#,
    )
    .unwrap();
    let report = run_benchmark(&config).unwrap();
    let linear = report
        .records
        .iter()
        .find(|r| r.method == Method::Linear)
        .unwrap();
    let miwq = report
        .records
        .iter()
        .find(|r| r.method == Method::Miwq)
        .unwrap();
    let detail = format!(
        "linear {:.3} ms, miwq {:.3} ms (m={}), speed-up {:.1}x, precision {:?}, {:.0}s",
        linear.mean_ms,
        miwq.mean_ms,
        miwq.m.unwrap(),
        miwq.speedup,
        miwq.precision.unwrap(),
        start.elapsed().as_secs_f64()
    );
    if miwq.speedup >= 5.0 && miwq.precision == Some(1.0) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_5() -> Verdict {
    let mut cases = 0;
    for bits in [16, 32] {
        for fillers in [1, 10, 100] {
            let (codes, q, w) = mih_adversarial(bits, fillers).unwrap();
            let ix = MultiIndex::build(codes, 2).unwrap();
            let mih = mih_weighted_topk(&ix, &q, &w, 1).unwrap();
            let exact = ix.query(&q, &w, 1).unwrap();
            if exact[0].id != 0 {
                return Err(format!(
                    "b={bits} fillers={fillers}: exact search returned {}",
                    exact[0].id
                ));
            }
            if mih[0].id == 0 {
                return Err(format!(
                    "b={bits} fillers={fillers}: Hamming-first search found the light code"
                ));
            }
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} instances, Hamming-first misses the weighted 1-NN every time"
    ))
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let bits = rng.random_range(1..=256);
        let q = random_code(&mut rng, bits);
        let g = random_code(&mut rng, bits);
        let w = WeightTable::new(
            (0..bits)
                .map(|_| [rng.random_range(0.0..3.0), rng.random_range(0.0..3.0)])
                .collect(),
        )
        .unwrap();
        let ctx = QueryContext::new(&q, &w).unwrap();
        let lut = ChunkLut::new(&ctx).distance(g.as_bytes());
        if lut.to_bits() != ctx.distance(&g).unwrap().to_bits() {
            mismatches += 1;
        }
    }
    let detail = format!("10000 triples, {mismatches} bit mismatches");
    if mismatches == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_7() -> Verdict {
    let (bits, n, k) = (32, 10_000, 10);
    let unit = WeightTable::unit(bits).unwrap();
    let mut failures = 0;
    for i in 0..50u64 {
        let codes = random_codes(n, bits, 700 + i).unwrap();
        let q = random_code(&mut ChaCha8Rng::seed_from_u64(900 + i), bits);
        let mut oracle: Vec<f64> = codes
            .iter()
            .map(|g| hamming_distance(&q, &g).unwrap() as f64)
            .collect();
        oracle.sort_by(f64::total_cmp);
        oracle.truncate(k);
        let ix = MultiIndex::build(codes, choose_m(bits, n)).unwrap();
        let got: Vec<f64> = ix
            .query(&q, &unit, k)
            .unwrap()
            .iter()
            .map(|nb| nb.distance)
            .collect();
        if got != oracle {
            failures += 1;
        }
    }
    let detail = format!("50 instances, {failures} multiset mismatches");
    if failures == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    for trial in 0..60 {
        let bits = match trial % 4 {
            0 => rng.random_range(1..=256),
            1 => 8 * rng.random_range(1..=32),
            2 => [1, 3, 7, 9, 15, 17, 31, 33, 63, 65, 127, 255][trial % 12],
            _ => rng.random_range(1..=64),
        };
        let n = rng.random_range(0..1500);
        let codes = random_codes(n, bits, trial as u64).unwrap();
        let w = synth_weights(bits, trial as u64, WeightScheme::UniformAsym).unwrap();
        let m = rng.random_range(bits.div_ceil(64)..=bits.min(6));
        let ix = MultiIndex::build(codes.clone(), m).unwrap();

        let mut a = Vec::new();
        write_codes(&mut a, &codes).unwrap();
        let mut b = Vec::new();
        write_codes(&mut b, &read_codes(a.as_slice()).unwrap()).unwrap();
        if a != b {
            return Err(format!("codes b={bits}: bytes differ after reload"));
        }

        let mut a = Vec::new();
        write_weights(&mut a, &w).unwrap();
        let mut b = Vec::new();
        write_weights(&mut b, &read_weights(a.as_slice()).unwrap()).unwrap();
        if a != b {
            return Err(format!("weights b={bits}: bytes differ after reload"));
        }

        let mut a = Vec::new();
        write_index(&mut a, &ix).unwrap();
        let back = read_index(a.as_slice()).unwrap();
        let mut b = Vec::new();
        write_index(&mut b, &back).unwrap();
        if a != b || back != ix {
            return Err(format!("index b={bits} m={m}: bytes differ after reload"));
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} randomized code/weight/index triples byte-identical"
    ))
}

fn report(number: usize, name: &str, verdict: impl FnOnce() -> Verdict) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(verdict)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    match &outcome {
        Ok(detail) => println!("criterion {number} [{name}]: PASS ({detail})"),
        Err(detail) => println!("criterion {number} [{name}]: FAIL ({detail})"),
    }
    outcome.is_ok()
}

fn main() -> ExitCode {
    let exactness = catch_unwind(exactness_run).map_err(|_| "run panicked".to_string());
    let from_run = |f: fn(&ExactnessRun) -> Verdict| match &exactness {
        Ok(run) => f(run),
        Err(e) => Err(e.clone()),
    };
    let results = [
        report(1, "exactness vs linear scan", || from_run(criterion_1)),
        report(2, "enumerator completeness and order", criterion_2),
        report(3, "stopping bound safety", || from_run(criterion_3)),
        report(4, "speed-up over LUT linear scan", criterion_4),
        report(5, "Hamming-first gap", criterion_5),
        report(6, "LUT equivalence", criterion_6),
        report(7, "unit-weight reduction", criterion_7),
        report(8, "format round trips", criterion_8),
    ];
    if results.iter().all(|&ok| ok) {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
