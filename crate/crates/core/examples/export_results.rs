//! Writes every finite scenario as JSON and CSV under a directory
//! (default: a fresh folder in the system temp dir).

use std::path::PathBuf;

use qlang::scenarios::{emit, run_named, Format};

pub fn run(dir: PathBuf) -> qlang::Result<()> {
    std::fs::create_dir_all(&dir)?;
    for name in ["eraser", "wheeler", "hardy", "three-boxes"] {
        let result = run_named(name)?;
        emit(&result, Format::Json, &dir.join(format!("{name}.json")))?;
        emit(&result, Format::Csv, &dir.join(name))?;
        println!("{name}: {} pmfs, {} checks", result.pmfs.len(), result.identities.len());
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn main() {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("qlang-export"));
    if let Err(e) = run(dir) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
