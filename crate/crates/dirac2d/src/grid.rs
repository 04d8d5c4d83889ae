//! Periodic 2D Fourier grid and the complex fields living on it.
//!
//! Samples are placed with a half-cell offset, x_q = -L/2 + (q + 1/2) L/N,
//! so no sample sits at the origin and 1/r, x_i/r^2 stay finite everywhere.
//! Wavenumbers per axis are p = (2 pi / L) {-N/2, ..., N/2 - 1}.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Square periodic grid: N samples per axis (power of two), physical side
/// length `box_len`, half-cell offset flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub n: usize,
    pub box_len: f64,
    pub offset: bool,
}

impl Grid2D {
    pub fn new(n: usize, box_len: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size must be a power of two >= 2, got {n}"
            )));
        }
        if !(box_len > 0.0 && box_len.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "box length must be > 0, got {box_len}"
            )));
        }
        Ok(Grid2D { n, box_len, offset: true })
    }

    /// Variant without the half-cell shift (samples include the origin);
    /// only useful for tests of the offset geometry itself.
    pub fn without_offset(n: usize, box_len: f64) -> Result<Self> {
        Ok(Grid2D { offset: false, ..Self::new(n, box_len)? })
    }

    pub fn spacing(&self) -> f64 {
        self.box_len / self.n as f64
    }

    /// Physical coordinate of sample index q along either axis.
    pub fn coord(&self, q: usize) -> f64 {
        let shift = if self.offset { 0.5 } else { 0.0 };
        -0.5 * self.box_len + (q as f64 + shift) * self.spacing()
    }

    /// Physical wavenumber of Fourier bin index q along either axis.
    pub fn wavenumber(&self, q: usize) -> f64 {
        let half = self.n / 2;
        let signed = if q < half { q as f64 } else { q as f64 - self.n as f64 };
        2.0 * std::f64::consts::PI / self.box_len * signed
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of sample (q1, q2); axis 1 is the slow index.
    pub fn idx(&self, q1: usize, q2: usize) -> usize {
        q1 * self.n + q2
    }
}

// One planner per process; rustfft caches plans per length internally.
fn plan_pair(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let mut planner = PLANNER
        .get_or_init(|| Mutex::new(FftPlanner::new()))
        .lock()
        .expect("FFT planner lock poisoned");
    (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Complex scalar field sampled on a [`Grid2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid2D,
    pub data: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid2D) -> Self {
        ScalarField { grid, data: vec![Complex64::ZERO; grid.len()] }
    }

    /// Build a field by evaluating `f(x1, x2)` at every sample.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let n = grid.n;
        let mut data = Vec::with_capacity(grid.len());
        for q1 in 0..n {
            let x1 = grid.coord(q1);
            for q2 in 0..n {
                data.push(f(x1, grid.coord(q2)));
            }
        }
        ScalarField { grid, data }
    }

    /// Grid-exact plane wave e^{i q . x} for Fourier bin (k1, k2).
    pub fn plane_wave(grid: Grid2D, k1: usize, k2: usize) -> Self {
        let p1 = grid.wavenumber(k1);
        let p2 = grid.wavenumber(k2);
        Self::from_fn(grid, |x1, x2| Complex64::new(0.0, p1 * x1 + p2 * x2).exp())
    }

    /// Forward DFT in place (unnormalized).
    pub fn fft_forward(&mut self) {
        let (fwd, _) = plan_pair(self.grid.n);
        let mut scratch = vec![Complex64::ZERO; fwd.get_inplace_scratch_len()];
        fwd.process_with_scratch(&mut self.data, &mut scratch);
        transpose_square(&mut self.data, self.grid.n);
        fwd.process_with_scratch(&mut self.data, &mut scratch);
        transpose_square(&mut self.data, self.grid.n);
    }

    /// Inverse DFT in place, normalized so that forward . inverse = identity.
    pub fn fft_inverse(&mut self) {
        let (_, inv) = plan_pair(self.grid.n);
        let mut scratch = vec![Complex64::ZERO; inv.get_inplace_scratch_len()];
        inv.process_with_scratch(&mut self.data, &mut scratch);
        transpose_square(&mut self.data, self.grid.n);
        inv.process_with_scratch(&mut self.data, &mut scratch);
        transpose_square(&mut self.data, self.grid.n);
        let scale = 1.0 / self.grid.len() as f64;
        for v in &mut self.data {
            *v *= scale;
        }
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.grid, other.grid);
        let cell = self.grid.spacing() * self.grid.spacing();
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * cell
    }

    pub fn norm(&self) -> f64 {
        let cell = self.grid.spacing() * self.grid.spacing();
        (self.data.iter().map(|a| a.norm_sqr()).sum::<f64>() * cell).sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        ScalarField {
            grid: self.grid,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        ScalarField {
            grid: self.grid,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        ScalarField {
            grid: self.grid,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Two-component spinor field: upper and lower [`ScalarField`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub upper: ScalarField,
    pub lower: ScalarField,
}

impl SpinorField {
    pub fn new(upper: ScalarField, lower: ScalarField) -> Self {
        debug_assert_eq!(upper.grid, lower.grid);
        SpinorField { upper, lower }
    }

    pub fn zeros(grid: Grid2D) -> Self {
        SpinorField { upper: ScalarField::zeros(grid), lower: ScalarField::zeros(grid) }
    }

    pub fn grid(&self) -> Grid2D {
        self.upper.grid
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.upper.inner(&other.upper) + self.lower.inner(&other.lower)
    }

    pub fn norm(&self) -> f64 {
        let u = self.upper.norm();
        let l = self.lower.norm();
        (u * u + l * l).sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        SpinorField { upper: self.upper.scaled(c), lower: self.lower.scaled(c) }
    }

    pub fn add(&self, other: &Self) -> Self {
        SpinorField { upper: self.upper.add(&other.upper), lower: self.lower.add(&other.lower) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        SpinorField { upper: self.upper.sub(&other.upper), lower: self.lower.sub(&other.lower) }
    }
}
