//! Independent spectrum computation through the radial reduction.
//!
//! With the spinor ansatz psi = (F(r) e^{i m theta}, G(r) e^{i (m+1) theta})
//! and G = -i (F' - m F / r) / (E + M), the 2D Dirac eigenproblem reduces
//! per angular sector to
//!
//! ```text
//! -F'' - F'/r + m^2 F / r^2 + (E + M) V(r) F = (E^2 - M^2) F
//! ```
//!
//! The left side is discretized in finite-volume flux form on half-offset
//! nodes (regular at r = 0, Dirichlet at r = R, symmetric after the sqrt(r)
//! similarity scaling, O(h^2) accurate). The energy dependence of the
//! potential term is handled by an outer scalar root-find on
//! phi(E) = eps_{n_r}(E) - (E^2 - M^2), with the inner eigenvalue taken
//! from a Sturm-sequence bisection eigensolver. Neither the bracket nor
//! the iteration references the closed-form spectra being verified.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid2D, ScalarField, SpinorField};
use crate::params::{PhysicalParams, Potential};
use crate::spectra::{self, QuantumNumbers};

/// Uniform radial mesh with nodes r_j = (j + 1/2) h, h = R / N_r; no node
/// at r = 0, Dirichlet truncation at r = R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub n_r: usize,
    pub r_max: f64,
}

impl RadialGrid {
    pub fn new(n_r: usize, r_max: f64) -> Result<Self> {
        if n_r < 8 {
            return Err(Error::InvalidParameter(format!("need at least 8 radial cells, got {n_r}")));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("outer radius must be > 0, got {r_max}")));
        }
        Ok(RadialGrid { n_r, r_max })
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.n_r as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.spacing()
    }

    /// Same outer radius, twice the resolution.
    pub fn refined(&self) -> RadialGrid {
        RadialGrid { n_r: 2 * self.n_r, r_max: self.r_max }
    }
}

pub const DEFAULT_RADIAL_POINTS: usize = 2000;

/// Default outer radius covering the classical region with wide margin:
/// Coulomb R = 40 n^2 / (2 M k); oscillator
/// R = 12 sqrt((n + 1) / (M omega sqrt(1 + (n + 1) omega / M))).
pub fn default_r_max(params: &PhysicalParams, n: u32) -> f64 {
    match params.potential {
        Potential::Coulomb { k } => 40.0 * f64::from(n * n) / (2.0 * params.mass * k),
        Potential::Oscillator { omega } => {
            let np1 = f64::from(n) + 1.0;
            12.0 * (np1 / (params.mass * omega * (1.0 + np1 * omega / params.mass).sqrt())).sqrt()
        }
    }
}

pub fn default_grid(params: &PhysicalParams, n: u32) -> RadialGrid {
    RadialGrid { n_r: DEFAULT_RADIAL_POINTS, r_max: default_r_max(params, n) }
}

/// Symmetric tridiagonal matrix (diagonal + one off-diagonal).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin interval containing every eigenvalue.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    fn pivmin(&self) -> f64 {
        let emax2 = self.off.iter().fold(0.0f64, |acc, e| acc.max(e * e));
        f64::MIN_POSITIVE * emax2.max(1.0)
    }
}

/// Number of eigenvalues strictly below `lambda`, via the signs of the
/// LDL^T pivots (Sturm sequence).
pub fn sturm_count(t: &TridiagonalMatrix, lambda: f64) -> usize {
    let n = t.dim();
    if n == 0 {
        return 0;
    }
    let pivmin = t.pivmin();
    let mut count = 0usize;
    let mut q = t.diag[0] - lambda;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let q_safe = if q.abs() < pivmin {
            if q < 0.0 {
                -pivmin
            } else {
                pivmin
            }
        } else {
            q
        };
        q = (t.diag[i] - lambda) - t.off[i - 1] * t.off[i - 1] / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The (index + 1)-th smallest eigenvalue, bracketed by bisection to
/// relative width 1e-12 starting from the Gershgorin bounds.
pub fn eigenvalue_at(t: &TridiagonalMatrix, index: usize) -> Result<f64> {
    if index >= t.dim() {
        return Err(Error::CountExceedsDimension { count: index + 1, dim: t.dim() });
    }
    let (mut lo, mut hi) = t.gershgorin();
    let span = (hi - lo).abs().max(1.0);
    lo -= 1e-12 * span;
    hi += 1e-12 * span;
    for _ in 0..220 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // no representable point strictly inside
        }
        if sturm_count(t, mid) <= index {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * lo.abs().max(hi.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The `count` smallest eigenvalues in ascending order.
pub fn lowest_eigenvalues(t: &TridiagonalMatrix, count: usize) -> Result<Vec<f64>> {
    if count > t.dim() {
        return Err(Error::CountExceedsDimension { count, dim: t.dim() });
    }
    (0..count).map(|k| eigenvalue_at(t, k)).collect()
}

/// Eigenvector for an isolated eigenvalue by inverse iteration, using a
/// partially pivoted LU factorization of the shifted tridiagonal matrix.
pub fn eigenvector_at(t: &TridiagonalMatrix, lambda: f64) -> Result<Vec<f64>> {
    let n = t.dim();
    let (glo, ghi) = t.gershgorin();
    let scale = glo.abs().max(ghi.abs()).max(1.0);
    let shift = lambda + 1e-13 * scale;

    // factor (T - shift I) = P L U; U has two superdiagonals
    let mut sub: Vec<f64> = t.off.clone();
    let mut diag: Vec<f64> = t.diag.iter().map(|d| d - shift).collect();
    let mut sup: Vec<f64> = t.off.clone();
    let mut sup2 = vec![0.0f64; n.saturating_sub(2)];
    let mut swapped = vec![false; n.saturating_sub(1)];
    for i in 0..n - 1 {
        if diag[i].abs() >= sub[i].abs() {
            let m = if diag[i] != 0.0 { sub[i] / diag[i] } else { 0.0 };
            sub[i] = m;
            diag[i + 1] -= m * sup[i];
        } else {
            swapped[i] = true;
            let m = diag[i] / sub[i];
            diag[i] = sub[i];
            sub[i] = m;
            let tmp = sup[i];
            sup[i] = diag[i + 1];
            diag[i + 1] = tmp - m * diag[i + 1];
            if i + 2 < n {
                sup2[i] = sup[i + 1];
                sup[i + 1] *= -m;
            }
        }
    }

    // deterministic pseudo-random start vector
    let mut x: Vec<f64> = (0..n)
        .map(|j| {
            let s = (j as u64)
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) + 0.5
        })
        .collect();

    let tnorm = t
        .diag
        .iter()
        .map(|d| d.abs())
        .chain(t.off.iter().map(|e| 2.0 * e.abs()))
        .fold(0.0f64, f64::max);
    for _ in 0..8 {
        // solve (T - shift) y = x in place
        for i in 0..n - 1 {
            if swapped[i] {
                x.swap(i, i + 1);
            }
            let m = sub[i];
            x[i + 1] -= m * x[i];
        }
        for i in (0..n).rev() {
            let mut v = x[i];
            if i + 1 < n {
                v -= sup[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= sup2[i] * x[i + 2];
            }
            x[i] = if diag[i] != 0.0 { v / diag[i] } else { v / t.pivmin() };
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::ConvergenceFailure(
                "inverse iteration produced a degenerate vector".into(),
            ));
        }
        for v in &mut x {
            *v /= norm;
        }
        // residual ||T x - lambda x||
        let mut res = 0.0f64;
        for i in 0..n {
            let mut v = (t.diag[i] - lambda) * x[i];
            if i > 0 {
                v += t.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += t.off[i] * x[i + 1];
            }
            res += v * v;
        }
        if res.sqrt() <= 1e-10 * tnorm.max(lambda.abs()) {
            return Ok(x);
        }
    }
    Err(Error::ConvergenceFailure("inverse iteration did not reach the residual target".into()))
}

/// Count strict sign changes of a sampled profile, ignoring entries below
/// a relative floor.
pub fn count_nodes(values: &[f64]) -> usize {
    let max = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if max == 0.0 {
        return 0;
    }
    let floor = 1e-9 * max;
    let mut nodes = 0;
    let mut prev = 0.0f64;
    for &v in values {
        if v.abs() < floor {
            continue;
        }
        if prev != 0.0 && v.signum() != prev.signum() {
            nodes += 1;
        }
        prev = v;
    }
    nodes
}

/// Finite-volume discretization of -(1/r) d/dr (r d/dr) + m^2/r^2 + w(r)
/// on the half-offset mesh, symmetrized by the sqrt(r) scaling: zero-flux
/// closure at r = 0 (the r = 0 face carries no area), mirror-ghost
/// Dirichlet at r = R.
pub fn radial_operator_matrix(
    m: i32,
    w: impl Fn(f64) -> f64,
    grid: &RadialGrid,
) -> TridiagonalMatrix {
    let n = grid.n_r;
    let h = grid.spacing();
    let h2 = h * h;
    let m2 = f64::from(m) * f64::from(m);
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n - 1);
    for j in 0..n {
        let r = grid.node(j);
        let face_in = j as f64 * h;
        let face_out = (j + 1) as f64 * h;
        let outer = if j + 1 == n { 2.0 * face_out } else { face_out };
        diag.push((face_in + outer) / (h2 * r) + m2 / (r * r) + w(r));
        if j + 1 < n {
            off.push(-face_out / (h2 * (r * grid.node(j + 1)).sqrt()));
        }
    }
    TridiagonalMatrix { diag, off }
}

/// Radial matrix for the reduced Dirac problem at trial energy E:
/// w(r) = (E + M) V(r), eigenvalue target eps = E^2 - M^2.
pub fn build_radial_matrix(
    params: &PhysicalParams,
    m: i32,
    energy: f64,
    grid: &RadialGrid,
) -> Result<TridiagonalMatrix> {
    if energy <= -params.mass {
        return Err(Error::EnergyOutOfRange {
            label: "radial reduction".into(),
            energy,
            constraint: "E > -M required to eliminate the lower component".into(),
        });
    }
    let p = *params;
    let factor = energy + p.mass;
    Ok(radial_operator_matrix(m, move |r| factor * p.potential_value(r), grid))
}

/// One radial eigenpair: the reduced eigenvalue eps, the F profile
/// (normalized in the weighted norm sum |F|^2 r h = 1, first significant
/// sample positive), and its sector labels.
#[derive(Debug, Clone)]
pub struct RadialEigenpair {
    pub epsilon: f64,
    pub f: Vec<f64>,
    pub m: i32,
    pub n_r: u32,
    pub grid: RadialGrid,
}

/// Converged sector solve: the bound energy and the eigenpair at it.
#[derive(Debug, Clone)]
pub struct SectorSolution {
    pub quantum_numbers: QuantumNumbers,
    pub energy: f64,
    pub eigenpair: RadialEigenpair,
    pub objective_residual: f64,
    pub evaluations: usize,
}

fn energy_domain(params: &PhysicalParams) -> (f64, f64) {
    let m = params.mass;
    match params.potential {
        Potential::Coulomb { .. } => (-m * (1.0 - 1e-12), m),
        Potential::Oscillator { .. } => (m * (1.0 + 1e-12), f64::INFINITY),
    }
}

/// Solve phi(E) = eps_{n_r}(E) - (E^2 - M^2) = 0 by bracketed
/// bisection + secant. The initial bracket is centered on the
/// non-relativistic estimate and widened geometrically (clamped to the
/// physical energy domain) until a sign change appears; a stalling secant
/// falls back to pure bisection. Convergence requires |phi| <= tol M^2.
pub fn solve_sector(
    params: &PhysicalParams,
    m: i32,
    n_r: u32,
    grid: &RadialGrid,
    tol: f64,
) -> Result<SectorSolution> {
    let qn = QuantumNumbers::for_potential(&params.potential, m, n_r);
    let mass = params.mass;
    let index = n_r as usize;
    let mut evaluations = 0usize;

    let mut phi = |e: f64| -> Result<f64> {
        let t = build_radial_matrix(params, m, e, grid)?;
        evaluations += 1;
        Ok(eigenvalue_at(&t, index)? - (e * e - mass * mass))
    };

    let (dom_lo, dom_hi) = energy_domain(params);
    let guess = spectra::nr_energy(params, qn.n)?
        .clamp(dom_lo + 0.05 * mass, if dom_hi.is_finite() { dom_hi } else { f64::MAX });

    // widen around the NR estimate until the objective changes sign
    let mut delta = 1e-3 * mass;
    let mut bracket = None;
    for _ in 0..80 {
        let lo = (guess - delta).max(dom_lo);
        let hi = if dom_hi.is_finite() { (guess + delta).min(dom_hi) } else { guess + delta };
        let phi_lo = phi(lo)?;
        let phi_hi = phi(hi)?;
        if phi_lo * phi_hi <= 0.0 {
            bracket = Some((lo, phi_lo, hi, phi_hi));
            break;
        }
        let saturated = lo == dom_lo && dom_hi.is_finite() && hi == dom_hi;
        delta *= 2.0;
        if saturated {
            break; // whole domain scanned without a sign change
        }
    }
    let (mut lo, mut phi_lo, mut hi, phi_hi) = bracket.ok_or_else(|| {
        Error::BracketNotFound(format!(
            "sector (m={m}, n_r={n_r}): no sign change of the objective around E_nr = {guess}; \
             the radial box or resolution is likely too small"
        ))
    })?;

    let target = tol * mass * mass;
    // start from the better endpoint (also catches an exact endpoint root)
    let (mut e, mut phi_e, mut prev) = if phi_lo.abs() <= phi_hi.abs() {
        (lo, phi_lo, (hi, phi_hi))
    } else {
        (hi, phi_hi, (lo, phi_lo))
    };
    let mut stall = 0u32;
    let mut secant_ok = true;
    for _ in 0..200 {
        if phi_e.abs() <= target {
            break;
        }
        // maintain the bracket
        if phi_lo * phi_e < 0.0 {
            hi = e;
        } else {
            lo = e;
            phi_lo = phi_e;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break; // bracket exhausted at f64 resolution
        }
        let mut next = f64::NAN;
        if secant_ok && (phi_e - prev.1) != 0.0 {
            let s = e - phi_e * (e - prev.0) / (phi_e - prev.1);
            if s.is_finite() && s > lo && s < hi {
                next = s;
            }
        }
        if !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let last_abs = phi_e.abs();
        prev = (e, phi_e);
        e = next;
        phi_e = phi(e)?;
        if phi_e.abs() > 0.5 * last_abs {
            stall += 1;
            if stall >= 4 {
                secant_ok = false; // degenerate-root guard: pure bisection from here
            }
        } else {
            stall = 0;
        }
    }
    if phi_e.abs() > target {
        let mid = 0.5 * (lo + hi);
        let phi_mid = phi(mid)?;
        if phi_mid.abs() <= phi_e.abs() {
            e = mid;
            phi_e = phi_mid;
        }
        if phi_e.abs() > target {
            return Err(Error::ConvergenceFailure(format!(
                "sector (m={m}, n_r={n_r}): |phi| = {:.3e} above target {:.3e}",
                phi_e.abs(),
                target
            )));
        }
    }

    // branch consistency: the converged root must belong to the n_r-th
    // eigenvalue branch, not a neighbor crossed inside the bracket
    let t = build_radial_matrix(params, m, e, grid)?;
    let eps_target = e * e - mass * mass;
    if n_r > 0 {
        let below = eigenvalue_at(&t, index - 1)?;
        if below >= eps_target {
            return Err(Error::NonMonotoneObjective(format!(
                "sector (m={m}, n_r={n_r}): bracket straddled the n_r - 1 branch"
            )));
        }
    }
    if index + 1 < t.dim() {
        let above = eigenvalue_at(&t, index + 1)?;
        if above <= eps_target {
            return Err(Error::NonMonotoneObjective(format!(
                "sector (m={m}, n_r={n_r}): bracket straddled the n_r + 1 branch"
            )));
        }
    }

    let eps = eigenvalue_at(&t, index)?;
    let scaled = eigenvector_at(&t, eps)?;
    // undo the sqrt(r) similarity scaling and normalize sum F^2 r h = 1
    let h = grid.spacing();
    let mut f: Vec<f64> = scaled
        .iter()
        .enumerate()
        .map(|(j, v)| v / grid.node(j).sqrt())
        .collect();
    let norm = (f.iter().enumerate().map(|(j, v)| v * v * grid.node(j)).sum::<f64>() * h).sqrt();
    let lead = f.iter().find(|v| v.abs() > 1e-8).copied().unwrap_or(1.0);
    let sign = if lead < 0.0 { -1.0 } else { 1.0 };
    for v in &mut f {
        *v *= sign / norm;
    }

    Ok(SectorSolution {
        quantum_numbers: qn,
        energy: e,
        eigenpair: RadialEigenpair { epsilon: eps, f, m, n_r, grid: *grid },
        objective_residual: phi_e.abs(),
        evaluations,
    })
}

/// (2^order f_{h/2} - f_h) / (2^order - 1): cancels the leading error term
/// of an order-`order` scheme evaluated at spacings h and h/2.
pub fn richardson(value_h: f64, value_h2: f64, order: u32) -> f64 {
    let w = (2.0f64).powi(order as i32);
    (w * value_h2 - value_h) / (w - 1.0)
}

/// A sector solved at two resolutions with the Richardson-extrapolated
/// energy; the finite-volume scheme is second order.
#[derive(Debug, Clone)]
pub struct RefinedSector {
    pub quantum_numbers: QuantumNumbers,
    pub energy_coarse: f64,
    pub energy_fine: f64,
    pub energy: f64,
    pub fine: SectorSolution,
}

pub fn solve_sector_refined(
    params: &PhysicalParams,
    m: i32,
    n_r: u32,
    grid: &RadialGrid,
    tol: f64,
) -> Result<RefinedSector> {
    let coarse = solve_sector(params, m, n_r, grid, tol)?;
    let fine = solve_sector(params, m, n_r, &grid.refined(), tol)?;
    let energy = richardson(coarse.energy, fine.energy, 2);
    Ok(RefinedSector {
        quantum_numbers: coarse.quantum_numbers,
        energy_coarse: coarse.energy,
        energy_fine: fine.energy,
        energy,
        fine,
    })
}

// --- cubic spline ------------------------------------------------------------

struct CubicSpline {
    x0: f64,
    h: f64,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
}

impl CubicSpline {
    /// Natural cubic spline over uniformly spaced samples.
    fn new(x0: f64, h: f64, y: &[f64]) -> Self {
        let n = y.len();
        // second derivatives by the Thomas algorithm (natural ends)
        let mut m2 = vec![0.0f64; n];
        if n > 2 {
            let dim = n - 2;
            let mut c_prime = vec![0.0f64; dim];
            let mut d_prime = vec![0.0f64; dim];
            for i in 0..dim {
                let rhs = 6.0 * (y[i + 2] - 2.0 * y[i + 1] + y[i]) / (h * h);
                if i == 0 {
                    c_prime[0] = 0.25;
                    d_prime[0] = rhs / 4.0;
                } else {
                    let denom = 4.0 - c_prime[i - 1];
                    c_prime[i] = 1.0 / denom;
                    d_prime[i] = (rhs - d_prime[i - 1]) / denom;
                }
            }
            m2[dim] = d_prime[dim - 1];
            for i in (0..dim - 1).rev() {
                m2[i + 1] = d_prime[i] - c_prime[i] * m2[i + 2];
            }
        }
        let segments = n - 1;
        let mut a = Vec::with_capacity(segments);
        let mut b = Vec::with_capacity(segments);
        let mut c = Vec::with_capacity(segments);
        let mut d = Vec::with_capacity(segments);
        for i in 0..segments {
            a.push(y[i]);
            b.push((y[i + 1] - y[i]) / h - h * (2.0 * m2[i] + m2[i + 1]) / 6.0);
            c.push(m2[i] / 2.0);
            d.push((m2[i + 1] - m2[i]) / (6.0 * h));
        }
        CubicSpline { x0, h, a, b, c, d }
    }

    fn segment(&self, x: f64) -> (usize, f64) {
        let t = ((x - self.x0) / self.h).floor() as isize;
        let i = t.clamp(0, self.a.len() as isize - 1) as usize;
        (i, x - (self.x0 + i as f64 * self.h))
    }

    fn eval(&self, x: f64) -> f64 {
        let (i, dx) = self.segment(x);
        self.a[i] + dx * (self.b[i] + dx * (self.c[i] + dx * self.d[i]))
    }

    fn derivative(&self, x: f64) -> f64 {
        let (i, dx) = self.segment(x);
        self.b[i] + dx * (2.0 * self.c[i] + 3.0 * dx * self.d[i])
    }
}

/// Result of lifting a radial eigenpair onto the 2D grid.
#[derive(Debug, Clone)]
pub struct LiftedState {
    pub field: SpinorField,
    /// Set when the radial profile still carries weight beyond the half
    /// box size, i.e. the 2D window truncates the eigenfunction.
    pub truncated: bool,
}

/// Reconstruct the 2D spinor (F(r) e^{i m theta}, G(r) e^{i (m+1) theta})
/// with G = -i (F' - m F / r)/(E + M); F is interpolated by a natural
/// cubic spline from the radial samples and the result is normalized on
/// the 2D grid.
pub fn lift_to_grid(
    pair: &RadialEigenpair,
    energy: f64,
    mass: f64,
    grid2d: Grid2D,
) -> Result<LiftedState> {
    if energy <= -mass {
        return Err(Error::EnergyOutOfRange {
            label: "lift".into(),
            energy,
            constraint: "E > -M".into(),
        });
    }
    let rg = &pair.grid;
    let spline = CubicSpline::new(rg.node(0), rg.spacing(), &pair.f);
    let inv_ep_m = 1.0 / (energy + mass);
    let m = f64::from(pair.m);
    let half_box = 0.5 * grid2d.box_len;

    // warn when the profile amplitude at the 2D window edge exceeds
    // 1e-3 of the peak (its norm-weight contribution is then ~1e-6)
    let fmax = pair.f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let cutoff = half_box.min(rg.r_max);
    let truncated = pair
        .f
        .iter()
        .enumerate()
        .any(|(j, v)| rg.node(j) > cutoff && v.abs() > 1e-3 * fmax);

    let n = grid2d.n;
    let mut upper = ScalarField::zeros(grid2d);
    let mut lower = ScalarField::zeros(grid2d);
    let minus_i = Complex64::new(0.0, -1.0);
    for q1 in 0..n {
        let x1 = grid2d.coord(q1);
        for q2 in 0..n {
            let x2 = grid2d.coord(q2);
            let r = (x1 * x1 + x2 * x2).sqrt();
            if r > rg.r_max {
                continue;
            }
            let theta = x2.atan2(x1);
            let f = spline.eval(r);
            let g = (spline.derivative(r) - m * f / r) * inv_ep_m;
            let idx = grid2d.idx(q1, q2);
            upper.data[idx] = Complex64::new(f, 0.0) * Complex64::from_polar(1.0, m * theta);
            lower.data[idx] =
                minus_i * Complex64::new(g, 0.0) * Complex64::from_polar(1.0, (m + 1.0) * theta);
        }
    }
    let field = SpinorField::new(upper, lower);
    let norm = field.norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(LiftedState { field: field.scaled(Complex64::new(1.0 / norm, 0.0)), truncated })
}

/// ||G|| / ||F|| in the weighted radial norm; the lower-component scale of
/// the reduction, vanishing in the non-relativistic regime.
pub fn spinor_component_ratio(pair: &RadialEigenpair, energy: f64, mass: f64) -> f64 {
    let rg = &pair.grid;
    let spline = CubicSpline::new(rg.node(0), rg.spacing(), &pair.f);
    let m = f64::from(pair.m);
    let inv_ep_m = 1.0 / (energy + mass);
    let h = rg.spacing();
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (j, &f) in pair.f.iter().enumerate() {
        let r = rg.node(j);
        let g = (spline.derivative(r) - m * f / r) * inv_ep_m;
        num += g * g * r * h;
        den += f * f * r * h;
    }
    (num / den).sqrt()
}


#[cfg(test)]
mod refinement_tests {
    use super::*;
    use crate::spectra::{self, Branch};

    /// The objective phi(E) evaluated at the closed-form energy (plugged
    /// in, not solved) tends to zero as the radial grid refines.
    #[test]
    fn objective_at_analytic_energy_vanishes_with_refinement() {
        let params = PhysicalParams::coulomb(1.0, 0.2).unwrap();
        let exact = spectra::coulomb_energy(1, 0.2, 1.0, Branch::Plus).unwrap();
        let mut previous = f64::INFINITY;
        for n_r in [250usize, 500, 1000, 2000] {
            let grid = RadialGrid::new(n_r, 100.0).unwrap();
            let t = build_radial_matrix(&params, 0, exact, &grid).unwrap();
            let eps = eigenvalue_at(&t, 0).unwrap();
            let phi = (eps - (exact * exact - 1.0)).abs();
            assert!(phi < previous, "phi = {phi:e} at N_r = {n_r}");
            previous = phi;
        }
        assert!(previous < 2e-5, "finest |phi| = {previous:e}");
    }

    /// Node-count law: the (q+1)-th eigenvector of a radial sector matrix
    /// has exactly q interior sign changes.
    #[test]
    fn eigenvector_node_counts_follow_the_index() {
        let params = PhysicalParams::coulomb(1.0, 0.2).unwrap();
        let grid = RadialGrid::new(800, 150.0).unwrap();
        let t = build_radial_matrix(&params, 0, 0.95, &grid).unwrap();
        for q in 0..4 {
            let lambda = eigenvalue_at(&t, q).unwrap();
            let v = eigenvector_at(&t, lambda).unwrap();
            assert_eq!(count_nodes(&v), q, "eigenvector {q}");
        }
    }
}
