//! Shared setup for the benchmark targets.

use dirac2d::gridops;
use dirac2d::{Grid2D, PhysicalParams, SpinorField};

pub fn coulomb_params() -> PhysicalParams {
    PhysicalParams::coulomb(1.0, 0.2).expect("valid parameters")
}

pub fn oscillator_params() -> PhysicalParams {
    PhysicalParams::oscillator(1.0, 0.1).expect("valid parameters")
}

pub fn grid(n: usize) -> Grid2D {
    Grid2D::new(n, 40.0).expect("valid grid")
}

/// A ring spinor state of unit norm on the standard box.
pub fn ring_state(n: usize) -> SpinorField {
    gridops::standard_spinor_family(grid(n), 42).remove(1).1
}
