//! Saving and loading codes, weights and a built index.
//!
//!     cargo run --example persistence

use wham::fixtures::{random_codes, synth_weights, WeightScheme};
use wham::io::{load_codes, load_index, load_weights, save_codes, save_index, save_weights};
use wham::MultiIndex;

fn main() -> wham::Result<()> {
    let dir = std::env::temp_dir().join("wham-persistence-example");
    std::fs::create_dir_all(&dir)?;

    let codes = random_codes(10_000, 27, 5)?;
    let weights = synth_weights(27, 6, WeightScheme::UniformAsym)?;
    let index = MultiIndex::build(codes.clone(), 3)?;

    save_codes(dir.join("codes.whc"), &codes)?;
    save_weights(dir.join("weights.whw"), &weights)?;
    save_index(dir.join("index.whi"), &index)?;
    for name in ["codes.whc", "weights.whw", "index.whi"] {
        let len = std::fs::metadata(dir.join(name))?.len();
        println!("{name:<12} {len:>8} bytes");
    }

    assert_eq!(load_codes(dir.join("codes.whc"))?, codes);
    assert_eq!(load_weights(dir.join("weights.whw"))?, weights);
    let back = load_index(dir.join("index.whi"))?;
    assert_eq!(back, index);
    let q = codes.get(17);
    assert_eq!(back.query(&q, &weights, 3)?, index.query(&q, &weights, 3)?);
    println!("round trip ok");
    Ok(())
}
