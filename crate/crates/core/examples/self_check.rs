//! The verification suite, once clean and once with a planted fault.
//!
//!     cargo run --example self_check

use wham::verify::{run_verify, VerifyConfig};

fn main() -> wham::Result<()> {
    let clean = run_verify(&VerifyConfig::default())?;
    println!("{clean}\n");
    let broken = run_verify(&VerifyConfig {
        inject_fault: true,
        trials: 10,
        ..VerifyConfig::default()
    })?;
    println!("{broken}");
    assert!(clean.passed() && !broken.passed());
    Ok(())
}
