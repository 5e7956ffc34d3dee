//! Regenerates `data/envelope_constants.txt`.
//!
//! cargo run --release --example calibrate_envelopes

use conelab::specfun::envelope::{calibrate, CalibrationGrid};

fn main() {
    let grid = CalibrationGrid::default();
    let table = calibrate(&grid);
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/envelope_constants.txt");
    std::fs::write(&path, table.to_text()).expect("write envelope table");
    println!("wrote {} (grid {}, C = {:.6})", path.display(), table.grid_hash, table.absolute);
}
