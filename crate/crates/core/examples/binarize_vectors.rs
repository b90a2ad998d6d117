//! Real vectors to binary codes: write an .fvecs file, read it back, hash it.
//!
//!     cargo run --example binarize_vectors

use wham::fixtures::{binarize_lsh, bit_balance, gaussian_vectors};
use wham::io::{read_fvecs, write_fvecs};

fn main() -> wham::Result<()> {
    let dir = std::env::temp_dir().join("wham-binarize-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("gauss.fvecs");

    write_fvecs(&path, &gaussian_vectors(2_000, 64, 1))?;
    let vectors = read_fvecs(&path)?;
    println!(
        "read n={} d={} from {}",
        vectors.n,
        vectors.d,
        path.display()
    );

    let codes = binarize_lsh(&vectors, 48, 42)?;
    let balance = bit_balance(&codes);
    let worst = balance.iter().map(|p| (p - 0.5).abs()).fold(0.0, f64::max);
    println!(
        "{} codes of {} bits, worst bit imbalance {worst:.3}",
        codes.len(),
        codes.bits()
    );
    println!("first code {}", codes.get(0));

    // Same seed, same hyperplanes.
    assert_eq!(codes, binarize_lsh(&vectors, 48, 42)?);
    Ok(())
}
