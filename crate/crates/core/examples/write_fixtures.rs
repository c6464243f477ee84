//! Regenerates `fixtures/case{1,2}.txt` from the closed-form radicals.
//!
//! cargo run -p oscquant-core --example write_fixtures [-- <dir>]

use std::path::PathBuf;

use oscquant::fixtures::{default_dir, write_fixture, Fixture, FixtureCase};

fn main() -> oscquant::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(default_dir);
    std::fs::create_dir_all(&dir)?;
    for case in FixtureCase::ALL {
        let p = case.params();
        let comment = format!(
            "Eigenvector rows for gamma = {}, lambda = {}, ordered by descending eigenvalue.\n\
             Format: params line, then four rows of S (row-major, 17 significant digits).",
            p.gamma, p.lambda
        );
        let path = dir.join(case.file_name());
        write_fixture(&path, &Fixture::reference(case), &comment)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
