//! One hash table over whole codes: fine for short codes, hopeless for long ones.
//!
//!     cargo run --example single_table

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wham::fixtures::{random_code, random_codes, synth_weights, WeightScheme};
use wham::{linear_scan_topk, SingleIndexTable};

fn main() -> wham::Result<()> {
    let bits = 16;
    let codes = random_codes(50_000, bits, 1)?;
    let table = SingleIndexTable::build(&codes)?;
    let w = synth_weights(bits, 2, WeightScheme::UniformAsym)?;
    let q = random_code(&mut ChaCha8Rng::seed_from_u64(3), bits);

    let out = table.query_with_stats(&q, &w, 5)?;
    println!(
        "{} distinct codes among {}",
        table.table().bucket_count(),
        table.len()
    );
    println!("probed {} buckets", out.stats.buckets_probed);
    for n in &out.neighbors {
        println!("  id {:>5}  distance {:.4}", n.id, n.distance);
    }
    assert_eq!(out.neighbors, linear_scan_topk(&codes, &q, &w, 5)?);
    Ok(())
}
