//! Weighted Hamming distance and the per-query folded view of the weights.
//!
//!     cargo run --example weighted_distance

use wham::{hamming_distance, weighted_distance, BinaryCode, QueryContext, WeightTable};

fn main() -> wham::Result<()> {
    // Mismatching bit i costs the listed amount; matching is free.
    let w = WeightTable::from_mismatch_costs(&[0.4, 0.1, 0.3, 0.2])?;
    let q: BinaryCode = "0110".parse()?;

    for g in ["0110", "0010", "1001", "0111"] {
        let g: BinaryCode = g.parse()?;
        println!(
            "{q} vs {g}: hamming {} weighted {:.2}",
            hamming_distance(&q, &g)?,
            weighted_distance(&q, &g, &w)?
        );
    }

    let ctx = QueryContext::new(&q, &w)?;
    println!(
        "minimal code {} at distance {}",
        ctx.minimal(),
        ctx.base_weight()
    );
    println!(
        "flip costs {:?}, cheapest first: bits {:?}",
        ctx.deltas(),
        ctx.order()
    );

    Ok(())
}
