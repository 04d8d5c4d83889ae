//! Designated calibration run: records the residual of every check in the
//! verification suite at the standard configuration (N = 256, box = 40,
//! seed 42, radial points 2000, Coulomb M = 1, k = 0.2 and oscillator
//! M = 1, omega = 0.1) and writes the threshold fixture. Thresholds are
//! 3x the recorded residuals; the fixture is committed with the crate and
//! guards against regressions.

use dirac2d::verifier::{self, CheckContext};
use dirac2d::PhysicalParams;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let out_path = args
        .get(1)
        .cloned()
        .unwrap_or_else(|| "crates/dirac2d/fixtures/calibration.json".to_string());
    let date = args.get(2).cloned().unwrap_or_else(|| "unspecified".to_string());

    let grid_n = 256;
    let box_len = 40.0;
    let seed = 42;
    let radial_points = 2000;

    let mut residuals = Vec::new();
    for params in [
        PhysicalParams::coulomb(1.0, 0.2).expect("valid parameters"),
        PhysicalParams::oscillator(1.0, 0.1).expect("valid parameters"),
    ] {
        eprintln!("calibrating {} suite ...", params.potential.name());
        let ctx = CheckContext::build(&params, grid_n, box_len, seed, radial_points)
            .expect("context construction");
        let catalog = verifier::full_residual_catalog(&ctx).expect("residual catalog");
        eprintln!("  {} checks", catalog.len());
        residuals.extend(catalog);
    }
    residuals.sort_by_key(|a| a.key());

    let json = verifier::fixture_json(&residuals, grid_n, box_len, seed, radial_points, &date);
    std::fs::write(&out_path, json).expect("write fixture file");
    eprintln!("wrote {} thresholds to {}", residuals.len(), out_path);
}
