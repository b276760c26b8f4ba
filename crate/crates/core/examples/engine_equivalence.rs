//! Feeds random mapping events to the hardware model and the software
//! reference and counts disagreements.

use heftrt::report::{verify, VerifyOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(200);
    let report = verify(&VerifyOptions {
        trials,
        ..Default::default()
    })?;
    report.write(std::io::stdout().lock())?;
    if !report.passed() {
        std::process::exit(1);
    }
    Ok(())
}
