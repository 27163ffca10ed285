//! Regenerate the bundled fixture corpus.
//!
//! Usage: `gen-corpus [DIR]` (default `corpus`). Writes one canonical map
//! file per fixture, a manifest describing every fixture, and a `bad/`
//! subdirectory of deliberately malformed files for exercising the parse
//! error path. Output is deterministic; rerunning changes nothing.

use keller_cli::mapfile;
use keller_core::corpus;
use serde::Serialize;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Serialize)]
struct ManifestEntry {
    name: String,
    family: &'static str,
    expected_keller: bool,
    n: usize,
    d: usize,
}

const BAD_FILES: &[(&str, &str)] = &[
    (
        "exps_length.json",
        "{\n  \"n\": 2,\n  \"d\": 2,\n  \"components\": [[{\"coeff\": \"1\", \"exps\": [2]}], []]\n}\n",
    ),
    (
        "coeff_syntax.json",
        "{\n  \"n\": 1,\n  \"d\": 2,\n  \"components\": [[{\"coeff\": \"one\", \"exps\": [2]}]]\n}\n",
    ),
    (
        "field_order.json",
        "{\n  \"d\": 2,\n  \"n\": 2,\n  \"components\": [[], []]\n}\n",
    ),
];

fn main() -> ExitCode {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("corpus"));
    if let Err(message) = generate(&dir) {
        eprintln!("error: {message}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn generate(dir: &PathBuf) -> Result<(), String> {
    let bad_dir = dir.join("bad");
    fs::create_dir_all(&bad_dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let fixtures = corpus::corpus();
    let mut manifest = Vec::with_capacity(fixtures.len());
    for fixture in &fixtures {
        let path = dir.join(format!("{}.json", fixture.name));
        mapfile::write_map(&path, &fixture.map)?;
        manifest.push(ManifestEntry {
            name: fixture.name.clone(),
            family: fixture.family,
            expected_keller: fixture.expected_keller,
            n: fixture.map.n(),
            d: fixture.map.degree(),
        });
    }
    let manifest_path = dir.join("manifest.json");
    let mut body = serde_json::to_string_pretty(&manifest)
        .expect("manifest serialization cannot fail");
    body.push('\n');
    fs::write(&manifest_path, body)
        .map_err(|e| format!("cannot write {}: {e}", manifest_path.display()))?;
    for (name, body) in BAD_FILES {
        let path = bad_dir.join(name);
        fs::write(&path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    println!(
        "wrote {} fixtures, {} malformed samples, and a manifest to {}",
        fixtures.len(),
        BAD_FILES.len(),
        dir.display()
    );
    Ok(())
}
