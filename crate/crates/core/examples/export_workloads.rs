//! Writes the built-in workloads as TOML files and reads them back.
//!
//! ```text
//! cargo run --example export_workloads -- fixtures
//! ```

use std::path::PathBuf;

use heftrt::workload::{high_workload, load_spec, low_workload, save_spec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;
    for spec in [low_workload(), high_workload()] {
        let path = dir.join(format!("{}.toml", spec.name));
        save_spec(&spec, &path)?;
        assert_eq!(load_spec(&path)?, spec);
        println!("{} ({} instances)", path.display(), spec.total_instances());
    }
    Ok(())
}
