//! Every shipped configuration parses, validates and survives a JSON round trip.

use std::path::PathBuf;

use noma_core::sweep::Config;

#[test]
fn shipped_configs_round_trip() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let cfg = Config::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let back = Config::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, back, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 7, "only {seen} configs found");
}
