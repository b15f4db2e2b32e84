//! Writes every bundled fixture as `<name>.off`, plus `<name>.lengths.json` when the
//! fixture carries an explicit metric.
//!
//! Usage: `cargo run -p capcurv --example write_fixtures -- <dir>`

use std::path::PathBuf;

use capcurv::fixtures;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;
    for name in fixtures::NAMES.iter().chain(["torus_hole"].iter()) {
        let fx = fixtures::by_name(name).expect("known fixture");
        std::fs::write(dir.join(format!("{name}.off")), fx.off_text())?;
        if let Some(side) = fx.sidecar_text() {
            std::fs::write(dir.join(format!("{name}.lengths.json")), side)?;
        }
    }
    Ok(())
}
