//! Run a bundled scenario in-process and print its artifact digest.
//! Usage: `cargo run --example run_scenario -- [name]`

use energy_exchange::constants::ConstantsTable;
use energy_exchange::scenario::{execute, find_bundled, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "energy_audit_semiclassical".into());
    let bundled = find_bundled(&name).ok_or_else(|| format!("no bundled scenario {name}"))?;
    let cfg = ScenarioConfig::parse(bundled.text)?;
    let artifacts = execute(&cfg, bundled.text, &ConstantsTable::codata_2018())?;
    for (file, bytes) in &artifacts.files {
        println!("{file:<24} {:>8} bytes", bytes.len());
    }
    if let Some(d) = &artifacts.report.deficit {
        println!("deficit {} e_diff {}", d.deficit, d.e_diff);
    }
    Ok(())
}
