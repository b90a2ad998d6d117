//! Hamming-first search misses a neighbor that is far in bits but cheap in weight.
//!
//!     cargo run --example mih_gap

use wham::fixtures::mih_adversarial;
use wham::{mih_weighted_topk, MultiIndex};

fn main() -> wham::Result<()> {
    let (codes, q, w) = mih_adversarial(16, 20)?;
    let index = MultiIndex::build(codes, 2)?;

    let mih = mih_weighted_topk(&index, &q, &w, 1)?;
    let exact = index.query(&q, &w, 1)?;
    println!(
        "Hamming-first 1-NN: id {} at {:.2}",
        mih[0].id, mih[0].distance
    );
    println!(
        "weighted 1-NN:      id {} at {:.2}",
        exact[0].id, exact[0].distance
    );
    assert_ne!(mih[0].id, exact[0].id);
    Ok(())
}
