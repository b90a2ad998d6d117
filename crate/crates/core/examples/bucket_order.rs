//! Walks every bucket of a 4-bit table in non-decreasing distance from the query.
//!
//!     cargo run --example bucket_order

use wham::{BinaryCode, BucketEnumerator, QueryContext, WeightTable};

fn main() -> wham::Result<()> {
    let w = WeightTable::from_mismatch_costs(&[0.4, 0.1, 0.3, 0.2])?;
    let q: BinaryCode = "0110".parse()?;
    let ctx = QueryContext::new(&q, &w)?;

    let mut buckets = BucketEnumerator::new(&ctx)?;
    while let Some(b) = buckets.next_bucket() {
        println!(
            "{:>2}. {}  weight {:.2}  (queue holds {})",
            buckets.emitted(),
            b.code(4),
            b.weight,
            buckets.queue_len()
        );
    }
    Ok(())
}
