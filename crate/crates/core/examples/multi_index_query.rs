//! Exact weighted K-NN with substring tables, checked against a linear scan.
//!
//!     cargo run --release --example multi_index_query

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wham::fixtures::{random_code, random_codes, synth_weights, WeightScheme};
use wham::{choose_m, linear_scan_topk, MultiIndex};

fn main() -> wham::Result<()> {
    let (bits, n, k) = (32, 200_000, 10);
    let codes = random_codes(n, bits, 7)?;
    let m = choose_m(bits, n);
    let start = Instant::now();
    let index = MultiIndex::build(codes, m)?;
    println!("built m={m} tables over {n} codes in {:?}", start.elapsed());

    let w = synth_weights(bits, 8, WeightScheme::UniformAsym)?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..3 {
        let q = random_code(&mut rng, bits);
        let t = Instant::now();
        let out = index.query_with_stats(&q, &w, k)?;
        let fast = t.elapsed();
        let t = Instant::now();
        let exact = linear_scan_topk(index.codes(), &q, &w, k)?;
        let slow = t.elapsed();
        assert_eq!(out.neighbors, exact);
        println!(
            "query {q}: {} buckets, {} candidates, bound {:.3}, {fast:?} vs scan {slow:?}",
            out.stats.buckets_probed, out.stats.candidates, out.stats.bound
        );
        let ids: Vec<_> = out.neighbors.iter().map(|n| n.id).collect();
        println!("  top {k}: {ids:?}");
    }
    Ok(())
}
