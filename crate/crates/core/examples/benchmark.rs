//! A small benchmark run, printed as CSV.
//!
//!     cargo run --release --example benchmark

use wham::eval::{run_benchmark, BenchConfig};

const CONFIG: &str = r#"
seed = 1
methods = ["linear", "mih", "miwq"]
bits = [32]
k = [1, 10, 100]
weights = "uniform-asym"

[data]
kind = "random-codes"
n = 200000
queries = 200
"#;

fn main() -> wham::Result<()> {
    let report = run_benchmark(&BenchConfig::from_toml_str(CONFIG)?)?;
    print!("{}", report.to_csv_string()?);
    Ok(())
}
