//! The committed fixture files match the fixtures built in code.

use std::path::PathBuf;

use capcurv::fixtures;
use capcurv::io::load_off;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn committed_files_match_generated() {
    for name in fixtures::NAMES.iter().chain(["torus_hole"].iter()) {
        let fx = fixtures::by_name(name).unwrap();
        let off = std::fs::read_to_string(dir().join(format!("{name}.off"))).unwrap();
        assert_eq!(
            off,
            fx.off_text(),
            "{name}.off is stale; rerun the write_fixtures example"
        );
        let side_path = dir().join(format!("{name}.lengths.json"));
        let side = std::fs::read_to_string(&side_path).ok();
        assert_eq!(side, fx.sidecar_text(), "{name}.lengths.json is stale");

        let (_, mesh, lengths) = load_off(&off, side.as_deref()).unwrap();
        let (m0, l0) = fx.load();
        assert_eq!(mesh.faces(), m0.faces());
        for (a, b) in lengths.as_slice().iter().zip(l0.as_slice()) {
            assert!((a - b).abs() < 1e-15, "{name}: length {a} vs {b}");
        }
    }
}
