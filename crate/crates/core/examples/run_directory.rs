//! Parses a scenario file, runs it and writes a reproducible run directory.

use std::path::PathBuf;

use emlangevin::integrators::run_ensemble;
use emlangevin::io::{parse_scenario, unix_now, write_outputs, RunManifest};

fn main() -> emlangevin::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/harmonic_consistent.json")));
    let s = parse_scenario(&path, true)?;
    let dir = std::env::temp_dir().join("emlangevin-example-run");
    let outs = run_ensemble(&s)?;
    let m = write_outputs(&outs, &s, &dir, unix_now())?;
    println!("wrote {} files to {}", m.files.len(), dir.display());
    println!("scenario digest {}", m.scenario_digest);
    println!("digest verifies: {}", RunManifest::read(&dir)?.verify(&dir)?);
    Ok(())
}
