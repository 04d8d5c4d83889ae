//! Matrix-free realization of every conserved operator on the periodic
//! Fourier grid.
//!
//! Pure-momentum operators (p_i, p^2, B = p_1 - i p_2, B^dag, `[pp]_i`) are
//! Fourier multipliers; radial functions (V, x_i/r, k x_i/r^2, `[rr]_i`) are
//! pointwise position multipliers; everything else is composed from those
//! two kinds. The nonlocal 1/p^2 only ever appears in the composition
//! (...) o p^{-2} o B, realized as a single fused multiplier whose symbol
//! vanishes at p = 0, so the zero mode never meets 1/p^2 with nonzero
//! input. A standalone inverse Laplacian zeroes the p = 0 mode and raises
//! a diagnostic.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Grid2D, ScalarField, SpinorField};
use crate::params::{PhysicalParams, Potential};

/// Warnings raised while applying an operator (currently only zero-mode
/// annihilation by a standalone inverse Laplacian).
#[derive(Debug, Default, Clone)]
pub struct Diagnostics {
    pub warnings: Vec<String>,
}

impl Diagnostics {
    pub fn zero_mode_annihilated(&self) -> bool {
        self.warnings.iter().any(|w| w.contains("zero-mode annihilated"))
    }
}

/// Fields an [`Operator`] can act on.
pub trait Field: Clone + Send + Sync + 'static {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scaled(&self, c: Complex64) -> Self;
    fn inner(&self, other: &Self) -> Complex64;
    fn norm(&self) -> f64;
}

impl Field for ScalarField {
    fn add(&self, other: &Self) -> Self {
        ScalarField::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        ScalarField::sub(self, other)
    }
    fn scaled(&self, c: Complex64) -> Self {
        ScalarField::scaled(self, c)
    }
    fn inner(&self, other: &Self) -> Complex64 {
        ScalarField::inner(self, other)
    }
    fn norm(&self) -> f64 {
        ScalarField::norm(self)
    }
}

impl Field for SpinorField {
    fn add(&self, other: &Self) -> Self {
        SpinorField::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        SpinorField::sub(self, other)
    }
    fn scaled(&self, c: Complex64) -> Self {
        SpinorField::scaled(self, c)
    }
    fn inner(&self, other: &Self) -> Complex64 {
        SpinorField::inner(self, other)
    }
    fn norm(&self) -> f64 {
        SpinorField::norm(self)
    }
}

type Action<F> = Arc<dyn Fn(&F, &mut Diagnostics) -> F + Send + Sync>;

/// A composable linear map on fields, defined by its action rather than by
/// stored matrix entries.
#[derive(Clone)]
pub struct Operator<F> {
    label: String,
    action: Action<F>,
}

pub type ScalarOperator = Operator<ScalarField>;
pub type SpinorOperator = Operator<SpinorField>;

impl<F: Field> Operator<F> {
    pub fn from_action(
        label: impl Into<String>,
        action: impl Fn(&F, &mut Diagnostics) -> F + Send + Sync + 'static,
    ) -> Self {
        Operator { label: label.into(), action: Arc::new(action) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, field: &F) -> F {
        let mut diag = Diagnostics::default();
        (self.action)(field, &mut diag)
    }

    pub fn apply_diag(&self, field: &F, diag: &mut Diagnostics) -> F {
        (self.action)(field, diag)
    }

    /// self o other (other acts first).
    pub fn compose(&self, other: &Self) -> Self {
        let a = self.clone();
        let b = other.clone();
        Operator::from_action(format!("{}*{}", self.label, other.label), move |f, d| {
            a.apply_diag(&b.apply_diag(f, d), d)
        })
    }

    pub fn add_op(&self, other: &Self) -> Self {
        let a = self.clone();
        let b = other.clone();
        Operator::from_action(format!("({}+{})", self.label, other.label), move |f, d| {
            a.apply_diag(f, d).add(&b.apply_diag(f, d))
        })
    }

    pub fn sub_op(&self, other: &Self) -> Self {
        let a = self.clone();
        let b = other.clone();
        Operator::from_action(format!("({}-{})", self.label, other.label), move |f, d| {
            a.apply_diag(f, d).sub(&b.apply_diag(f, d))
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let a = self.clone();
        Operator::from_action(format!("{c}*{}", self.label), move |f, d| {
            a.apply_diag(f, d).scaled(c)
        })
    }

    pub fn square(&self) -> Self {
        self.compose(self)
    }

    /// [A, B] psi = A(B psi) - B(A psi).
    pub fn commutator(a: &Self, b: &Self) -> Self {
        let a1 = a.clone();
        let b1 = b.clone();
        Operator::from_action(format!("[{},{}]", a.label, b.label), move |f, d| {
            let ab = a1.apply_diag(&b1.apply_diag(f, d), d);
            let ba = b1.apply_diag(&a1.apply_diag(f, d), d);
            ab.sub(&ba)
        })
    }
}

impl ScalarOperator {
    pub fn identity(_grid: Grid2D) -> Self {
        Operator::from_action("1", |f: &ScalarField, _| f.clone())
    }

    /// Diagonal operator in Fourier space: forward transform, multiply by
    /// the symbol evaluated on the grid wavenumbers, inverse transform.
    pub fn fourier(grid: Grid2D, label: impl Into<String>, symbol: impl Fn(f64, f64) -> Complex64) -> Self {
        let n = grid.n;
        let mut values = Vec::with_capacity(grid.len());
        for k1 in 0..n {
            let p1 = grid.wavenumber(k1);
            for k2 in 0..n {
                values.push(symbol(p1, grid.wavenumber(k2)));
            }
        }
        let values = Arc::new(values);
        Operator::from_action(label, move |f: &ScalarField, _| {
            let mut out = f.clone();
            out.fft_forward();
            for (v, s) in out.data.iter_mut().zip(values.iter()) {
                *v *= s;
            }
            out.fft_inverse();
            out
        })
    }

    /// Pointwise multiplication by fn(x1, x2); rejects non-finite samples.
    pub fn position(
        grid: Grid2D,
        label: impl Into<String>,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let label = label.into();
        let n = grid.n;
        let mut values = Vec::with_capacity(grid.len());
        for q1 in 0..n {
            let x1 = grid.coord(q1);
            for q2 in 0..n {
                let x2 = grid.coord(q2);
                let v = f(x1, x2);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFiniteSample { label, x1, x2 });
                }
                values.push(v);
            }
        }
        let values = Arc::new(values);
        Ok(Operator::from_action(label, move |f: &ScalarField, _| {
            let data = f.data.iter().zip(values.iter()).map(|(a, b)| a * b).collect();
            ScalarField { grid: f.grid, data }
        }))
    }
}

/// Momentum component multiplier p_i (axis = 1 or 2).
pub fn momentum(grid: Grid2D, axis: u8) -> ScalarOperator {
    match axis {
        1 => ScalarOperator::fourier(grid, "p1", |p1, _| Complex64::new(p1, 0.0)),
        2 => ScalarOperator::fourier(grid, "p2", |_, p2| Complex64::new(p2, 0.0)),
        _ => panic!("axis must be 1 or 2"),
    }
}

/// p^2 = p_1^2 + p_2^2.
pub fn p_squared(grid: Grid2D) -> ScalarOperator {
    ScalarOperator::fourier(grid, "p2sq", |p1, p2| Complex64::new(p1 * p1 + p2 * p2, 0.0))
}

/// B = p_1 - i p_2 (couples lower -> upper).
pub fn ladder_b(grid: Grid2D) -> ScalarOperator {
    ScalarOperator::fourier(grid, "B", |p1, p2| Complex64::new(p1, -p2))
}

/// B^dag = p_1 + i p_2.
pub fn ladder_bdag(grid: Grid2D) -> ScalarOperator {
    ScalarOperator::fourier(grid, "Bdag", Complex64::new)
}

/// Standalone 1/p^2: the p = 0 output mode is set to zero; when the input
/// carries a nonzero mean, a "zero-mode annihilated" diagnostic is raised.
pub fn inverse_laplacian(grid: Grid2D) -> ScalarOperator {
    let n = grid.n;
    let mut values = Vec::with_capacity(grid.len());
    for k1 in 0..n {
        let p1 = grid.wavenumber(k1);
        for k2 in 0..n {
            let p2 = grid.wavenumber(k2);
            let s = p1 * p1 + p2 * p2;
            values.push(if s == 0.0 { Complex64::ZERO } else { Complex64::new(1.0 / s, 0.0) });
        }
    }
    let values = Arc::new(values);
    Operator::from_action("invp2", move |f: &ScalarField, diag: &mut Diagnostics| {
        let mut out = f.clone();
        out.fft_forward();
        let total: f64 = out.data.iter().map(|v| v.norm_sqr()).sum();
        let zero_mode = out.data[0].norm_sqr();
        if total > 0.0 && zero_mode > 1e-24 * total {
            diag.warnings.push(format!(
                "zero-mode annihilated: standalone 1/p^2 met nonzero mean input (|c0|^2/|c|^2 = {:.3e})",
                zero_mode / total
            ));
        }
        for (v, s) in out.data.iter_mut().zip(values.iter()) {
            *v *= s;
        }
        out.fft_inverse();
        out
    })
}

/// Fused p^{-2} o B: symbol (p_1 - i p_2)/p^2 with the p = 0 mode exactly
/// zero (B annihilates it first), so no diagnostic can arise.
pub fn invp2_after_b(grid: Grid2D) -> ScalarOperator {
    ScalarOperator::fourier(grid, "invp2*B", |p1, p2| {
        let s = p1 * p1 + p2 * p2;
        if s == 0.0 {
            Complex64::ZERO
        } else {
            Complex64::new(p1 / s, -p2 / s)
        }
    })
}

/// Orbital angular momentum l = x_1 p_2 - x_2 p_1: momentum parts as
/// Fourier multipliers, coordinates pointwise.
pub fn orbital_l(grid: Grid2D) -> ScalarOperator {
    let p1 = momentum(grid, 1);
    let p2 = momentum(grid, 2);
    Operator::from_action("l", move |f: &ScalarField, d: &mut Diagnostics| {
        let d1 = p1.apply_diag(f, d);
        let d2 = p2.apply_diag(f, d);
        let g = f.grid;
        let n = g.n;
        let mut data = Vec::with_capacity(g.len());
        for q1 in 0..n {
            let x1 = g.coord(q1);
            for q2 in 0..n {
                let x2 = g.coord(q2);
                let i = g.idx(q1, q2);
                data.push(x1 * d2.data[i] - x2 * d1.data[i]);
            }
        }
        ScalarField { grid: g, data }
    })
}

/// f_1 = 2 p_2 l - i p_1, f_2 = -2 p_1 l - i p_2.
pub fn ladder_f(grid: Grid2D, i: u8) -> ScalarOperator {
    let l = orbital_l(grid);
    let (outer, inner_axis, sign) = match i {
        1 => ("f1", 2u8, 2.0),
        2 => ("f2", 1u8, -2.0),
        _ => panic!("f_i index must be 1 or 2"),
    };
    let p_outer = momentum(grid, inner_axis);
    let p_lin = momentum(grid, if i == 1 { 1 } else { 2 });
    let composed = p_outer
        .compose(&l)
        .scale(Complex64::new(sign, 0.0))
        .add_op(&p_lin.scale(Complex64::new(0.0, -1.0)));
    Operator { label: outer.into(), action: composed.action }
}

/// Runge-Lenz component R_i = f_i/(2 M k) - x_i/r.
pub fn runge_lenz(grid: Grid2D, params: &PhysicalParams, i: u8) -> Result<ScalarOperator> {
    let k = params.coulomb_k()?;
    let f = ladder_f(grid, i).scale(Complex64::new(1.0 / (2.0 * params.mass * k), 0.0));
    let xr = unit_radial_component(grid, i)?;
    let op = f.sub_op(&xr);
    Ok(Operator { label: format!("R{i}"), action: op.action })
}

/// x_i / r.
pub fn unit_radial_component(grid: Grid2D, i: u8) -> Result<ScalarOperator> {
    ScalarOperator::position(grid, format!("x{i}/r"), move |x1, x2| {
        let r = (x1 * x1 + x2 * x2).sqrt();
        let x = if i == 1 { x1 } else { x2 };
        Complex64::new(x / r, 0.0)
    })
}

/// k x_i / r^2.
pub fn coulomb_gradient_term(grid: Grid2D, params: &PhysicalParams, i: u8) -> Result<ScalarOperator> {
    let k = params.coulomb_k()?;
    ScalarOperator::position(grid, format!("k*x{i}/r^2"), move |x1, x2| {
        let r2 = x1 * x1 + x2 * x2;
        let x = if i == 1 { x1 } else { x2 };
        Complex64::new(k * x / r2, 0.0)
    })
}

/// Second-order position tensor `[rr]_1` = x_1 x_2, `[rr]_3` = (x_1^2 - x_2^2)/2.
pub fn tensor_rr(grid: Grid2D, i: u8) -> Result<ScalarOperator> {
    match i {
        1 => ScalarOperator::position(grid, "rr1", |x1, x2| Complex64::new(x1 * x2, 0.0)),
        3 => ScalarOperator::position(grid, "rr3", |x1, x2| {
            Complex64::new(0.5 * (x1 * x1 - x2 * x2), 0.0)
        }),
        _ => Err(Error::InvalidParameter(format!("[rr] index must be 1 or 3, got {i}"))),
    }
}

/// Second-order momentum tensor `[pp]_1` = p_1 p_2, `[pp]_3` = (p_1^2 - p_2^2)/2.
pub fn tensor_pp(grid: Grid2D, i: u8) -> Result<ScalarOperator> {
    match i {
        1 => Ok(ScalarOperator::fourier(grid, "pp1", |p1, p2| Complex64::new(p1 * p2, 0.0))),
        3 => Ok(ScalarOperator::fourier(grid, "pp3", |p1, p2| {
            Complex64::new(0.5 * (p1 * p1 - p2 * p2), 0.0)
        })),
        _ => Err(Error::InvalidParameter(format!("[pp] index must be 1 or 3, got {i}"))),
    }
}

/// Oscillator tensor J_i = ((1/(M omega)) `[pp]_i` + M omega `[rr]_i`) / 2.
pub fn oscillator_tensor(grid: Grid2D, params: &PhysicalParams, i: u8) -> Result<ScalarOperator> {
    let omega = params.oscillator_omega()?;
    let mw = params.mass * omega;
    let pp = tensor_pp(grid, i)?.scale(Complex64::new(0.5 / mw, 0.0));
    let rr = tensor_rr(grid, i)?.scale(Complex64::new(0.5 * mw, 0.0));
    let op = pp.add_op(&rr);
    Ok(Operator { label: format!("J{i}"), action: op.action })
}

/// Potential multiplier V(r) for the given parameters.
pub fn potential_multiplier(grid: Grid2D, params: &PhysicalParams) -> Result<ScalarOperator> {
    let p = *params;
    let label = match p.potential {
        Potential::Coulomb { .. } => "Vh",
        Potential::Oscillator { .. } => "Vo",
    };
    ScalarOperator::position(grid, label, move |x1, x2| {
        Complex64::new(p.potential_value((x1 * x1 + x2 * x2).sqrt()), 0.0)
    })
}

/// Assemble a spinor operator from 2x2 scalar blocks acting as
/// (upper, lower) -> (b11 u + b12 l, b21 u + b22 l); `None` is a zero block.
pub fn block_spinor(
    label: impl Into<String>,
    b11: Option<ScalarOperator>,
    b12: Option<ScalarOperator>,
    b21: Option<ScalarOperator>,
    b22: Option<ScalarOperator>,
) -> SpinorOperator {
    Operator::from_action(label, move |f: &SpinorField, d: &mut Diagnostics| {
        let grid = f.grid();
        let mut upper = ScalarField::zeros(grid);
        let mut lower = ScalarField::zeros(grid);
        if let Some(op) = &b11 {
            upper = upper.add(&op.apply_diag(&f.upper, d));
        }
        if let Some(op) = &b12 {
            upper = upper.add(&op.apply_diag(&f.lower, d));
        }
        if let Some(op) = &b21 {
            lower = lower.add(&op.apply_diag(&f.upper, d));
        }
        if let Some(op) = &b22 {
            lower = lower.add(&op.apply_diag(&f.lower, d));
        }
        SpinorField::new(upper, lower)
    })
}

/// Dirac Hamiltonian [[M + V, B], [B^dag, -M]].
pub fn hamiltonian(grid: Grid2D, params: &PhysicalParams) -> Result<SpinorOperator> {
    let p = *params;
    let mass = p.mass;
    let diag_upper = ScalarOperator::position(grid, "M+V", move |x1, x2| {
        Complex64::new(mass + p.potential_value((x1 * x1 + x2 * x2).sqrt()), 0.0)
    })?;
    let diag_lower = ScalarOperator::identity(grid).scale(Complex64::new(-mass, 0.0));
    let label = match p.potential {
        Potential::Coulomb { .. } => "Hh",
        Potential::Oscillator { .. } => "Ho",
    };
    Ok(block_spinor(
        label,
        Some(diag_upper),
        Some(ladder_b(grid)),
        Some(ladder_bdag(grid)),
        Some(diag_lower),
    ))
}

/// Deformed orbital angular momentum L = diag(l, B^dag l p^{-2} B).
/// The lower block applies B first (killing the zero mode), then the fused
/// p^{-2}, then l, then B^dag; the ordering is immaterial analytically
/// because [l, p^2] = 0.
pub fn deformed_l(grid: Grid2D) -> SpinorOperator {
    let lower = ladder_bdag(grid).compose(&orbital_l(grid)).compose(&invp2_after_b(grid));
    block_spinor("L", Some(orbital_l(grid)), None, None, Some(lower))
}

/// Coulomb conserved quantity Q^h_i with blocks
/// [[2 M R_i + k x_i/r^2, (-x_i/r) B], [B^dag (-x_i/r), B^dag (f_i/k) p^{-2} B]].
pub fn coulomb_q(grid: Grid2D, params: &PhysicalParams, i: u8) -> Result<SpinorOperator> {
    let k = params.coulomb_k()?;
    let two_m = Complex64::new(2.0 * params.mass, 0.0);
    let q11 = runge_lenz(grid, params, i)?
        .scale(two_m)
        .add_op(&coulomb_gradient_term(grid, params, i)?);
    let minus_xr = unit_radial_component(grid, i)?.scale(Complex64::new(-1.0, 0.0));
    let q12 = minus_xr.compose(&ladder_b(grid));
    let q21 = ladder_bdag(grid).compose(&minus_xr);
    let q22 = ladder_bdag(grid)
        .compose(&ladder_f(grid, i).scale(Complex64::new(1.0 / k, 0.0)))
        .compose(&invp2_after_b(grid));
    Ok(block_spinor(format!("Qh{i}"), Some(q11), Some(q12), Some(q21), Some(q22)))
}

/// Oscillator conserved quantity Q^o_i with blocks
/// [[4 J_i/omega + `[rr]_i` V, `[rr]_i` B], [B^dag `[rr]_i`, (2/(M omega^2)) B^dag `[pp]_i` p^{-2} B]].
pub fn oscillator_q(grid: Grid2D, params: &PhysicalParams, i: u8) -> Result<SpinorOperator> {
    let omega = params.oscillator_omega()?;
    let mass = params.mass;
    let q11 = oscillator_tensor(grid, params, i)?
        .scale(Complex64::new(4.0 / omega, 0.0))
        .add_op(&rr_times_potential(grid, params, i)?);
    let rr = tensor_rr(grid, i)?;
    let q12 = rr.compose(&ladder_b(grid));
    let q21 = ladder_bdag(grid).compose(&rr);
    let q22 = ladder_bdag(grid)
        .compose(
            &tensor_pp(grid, i)?
                .scale(Complex64::new(2.0 / (mass * omega * omega), 0.0)),
        )
        .compose(&invp2_after_b(grid));
    Ok(block_spinor(format!("Qo{i}"), Some(q11), Some(q12), Some(q21), Some(q22)))
}

/// `[rr]_i` V(r) as a single pointwise multiplier (the two factors are
/// both diagonal in position).
fn rr_times_potential(grid: Grid2D, params: &PhysicalParams, i: u8) -> Result<ScalarOperator> {
    let p = *params;
    ScalarOperator::position(grid, format!("rr{i}*Vo"), move |x1, x2| {
        let rr = match i {
            1 => x1 * x2,
            _ => 0.5 * (x1 * x1 - x2 * x2),
        };
        Complex64::new(rr * p.potential_value((x1 * x1 + x2 * x2).sqrt()), 0.0)
    })
}

/// Scalar value of the normalization (-4 (E^2 - M^2)/k^2)^{-1/2} on a bound
/// eigenspace at energy E.
pub fn so3_normalization(params: &PhysicalParams, energy: f64) -> Result<f64> {
    let k = params.coulomb_k()?;
    let m2 = params.mass * params.mass;
    if energy * energy >= m2 {
        return Err(Error::EnergyOutOfRange {
            label: "A_i".into(),
            energy,
            constraint: "|E| < M required for the SO(3) normalization".into(),
        });
    }
    Ok(k / (2.0 * (m2 - energy * energy).sqrt()))
}

/// Normalized SO(3) generator A_i on the eigenspace at E:
/// A_1,2 = s(E) Q^h_1,2 with s(E) = (-4(E^2 - M^2)/k^2)^{-1/2}; A_3 = L.
pub fn normalized_a(grid: Grid2D, params: &PhysicalParams, i: u8, energy: f64) -> Result<SpinorOperator> {
    match i {
        1 | 2 => {
            let s = so3_normalization(params, energy)?;
            let op = coulomb_q(grid, params, i)?.scale(Complex64::new(s, 0.0));
            Ok(Operator { label: format!("A{i}"), action: op.action })
        }
        3 => Ok(Operator { label: "A3".into(), action: deformed_l(grid).action }),
        _ => Err(Error::InvalidParameter(format!("A index must be 1, 2 or 3, got {i}"))),
    }
}

/// SO(3) Casimir A_1^2 + A_2^2 + A_3^2 on the eigenspace at E.
pub fn casimir_so3(grid: Grid2D, params: &PhysicalParams, energy: f64) -> Result<SpinorOperator> {
    let a1 = normalized_a(grid, params, 1, energy)?;
    let a2 = normalized_a(grid, params, 2, energy)?;
    let a3 = normalized_a(grid, params, 3, energy)?;
    let op = a1.square().add_op(&a2.square()).add_op(&a3.square());
    Ok(Operator { label: "Cso3".into(), action: op.action })
}

/// SU(2) Casimir (M omega^2 / (8 (E + M))) ((Q^o_1)^2 + (Q^o_3)^2) + L^2/4
/// with the 1/(H + M) factor replaced by its scalar value on the
/// eigenspace at E.
pub fn casimir_su2(grid: Grid2D, params: &PhysicalParams, energy: f64) -> Result<SpinorOperator> {
    let omega = params.oscillator_omega()?;
    if energy <= -params.mass {
        return Err(Error::EnergyOutOfRange {
            label: "Csu2".into(),
            energy,
            constraint: "E > -M required for the SU(2) Casimir".into(),
        });
    }
    let q1 = oscillator_q(grid, params, 1)?;
    let q3 = oscillator_q(grid, params, 3)?;
    let prefactor = params.mass * omega * omega / (8.0 * (energy + params.mass));
    let l2 = deformed_l(grid).square().scale(Complex64::new(0.25, 0.0));
    let op = q1
        .square()
        .add_op(&q3.square())
        .scale(Complex64::new(prefactor, 0.0))
        .add_op(&l2);
    Ok(Operator { label: "Csu2".into(), action: op.action })
}

/// Catalog of operators [`build_operator`] can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    H,
    L,
    Qh1,
    Qh2,
    Qo1,
    Qo3,
    A1,
    A2,
    A3,
    CasimirSo3,
    CasimirSu2,
    // scalar building blocks
    R1,
    R2,
    F1,
    F2,
    J1,
    J3,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 17] = [
        OperatorKind::H,
        OperatorKind::L,
        OperatorKind::Qh1,
        OperatorKind::Qh2,
        OperatorKind::Qo1,
        OperatorKind::Qo3,
        OperatorKind::A1,
        OperatorKind::A2,
        OperatorKind::A3,
        OperatorKind::CasimirSo3,
        OperatorKind::CasimirSu2,
        OperatorKind::R1,
        OperatorKind::R2,
        OperatorKind::F1,
        OperatorKind::F2,
        OperatorKind::J1,
        OperatorKind::J3,
    ];
}

/// A built operator is either a scalar-field or a spinor-field map.
pub enum BuiltOperator {
    Scalar(ScalarOperator),
    Spinor(SpinorOperator),
}

impl BuiltOperator {
    pub fn expect_scalar(self) -> ScalarOperator {
        match self {
            BuiltOperator::Scalar(op) => op,
            BuiltOperator::Spinor(op) => panic!("operator `{}` acts on spinors", op.label()),
        }
    }

    pub fn expect_spinor(self) -> SpinorOperator {
        match self {
            BuiltOperator::Spinor(op) => op,
            BuiltOperator::Scalar(op) => panic!("operator `{}` acts on scalars", op.label()),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            BuiltOperator::Scalar(op) => op.label(),
            BuiltOperator::Spinor(op) => op.label(),
        }
    }
}

/// Construct any operator of the catalog. `energy` is required (and range
/// checked) whenever the printed definition contains a function of H,
/// which is replaced by its scalar value on the targeted eigenspace.
pub fn build_operator(
    kind: OperatorKind,
    grid: Grid2D,
    params: &PhysicalParams,
    energy: Option<f64>,
) -> Result<BuiltOperator> {
    use OperatorKind::*;
    let need_energy = |label: &str| energy.ok_or_else(|| Error::MissingEnergy(label.into()));
    Ok(match kind {
        H => BuiltOperator::Spinor(hamiltonian(grid, params)?),
        L => BuiltOperator::Spinor(deformed_l(grid)),
        Qh1 => BuiltOperator::Spinor(coulomb_q(grid, params, 1)?),
        Qh2 => BuiltOperator::Spinor(coulomb_q(grid, params, 2)?),
        Qo1 => BuiltOperator::Spinor(oscillator_q(grid, params, 1)?),
        Qo3 => BuiltOperator::Spinor(oscillator_q(grid, params, 3)?),
        A1 => BuiltOperator::Spinor(normalized_a(grid, params, 1, need_energy("A1")?)?),
        A2 => BuiltOperator::Spinor(normalized_a(grid, params, 2, need_energy("A2")?)?),
        A3 => BuiltOperator::Spinor(normalized_a(grid, params, 3, 0.0)?),
        CasimirSo3 => BuiltOperator::Spinor(casimir_so3(grid, params, need_energy("Cso3")?)?),
        CasimirSu2 => BuiltOperator::Spinor(casimir_su2(grid, params, need_energy("Csu2")?)?),
        R1 => BuiltOperator::Scalar(runge_lenz(grid, params, 1)?),
        R2 => BuiltOperator::Scalar(runge_lenz(grid, params, 2)?),
        F1 => BuiltOperator::Scalar(ladder_f(grid, 1)),
        F2 => BuiltOperator::Scalar(ladder_f(grid, 2)),
        J1 => BuiltOperator::Scalar(oscillator_tensor(grid, params, 1)?),
        J3 => BuiltOperator::Scalar(oscillator_tensor(grid, params, 3)?),
    })
}

/// Free-function form: forward transform, multiply by the symbol, inverse.
pub fn apply_fourier_multiplier(
    field: &ScalarField,
    symbol: impl Fn(f64, f64) -> Complex64,
) -> ScalarField {
    ScalarOperator::fourier(field.grid, "symbol", symbol).apply(field)
}

/// Free-function form of the pointwise product.
pub fn apply_position_multiplier(
    field: &ScalarField,
    f: impl Fn(f64, f64) -> Complex64,
) -> Result<ScalarField> {
    Ok(ScalarOperator::position(field.grid, "fn", f)?.apply(field))
}

/// Free-function form of l = x_1 p_2 - x_2 p_1.
pub fn apply_orbital_l(field: &ScalarField) -> ScalarField {
    orbital_l(field.grid).apply(field)
}

/// Standalone inverse Laplacian; the bool reports whether the zero mode of
/// the input was annihilated.
pub fn apply_inverse_laplacian(field: &ScalarField) -> (ScalarField, bool) {
    let mut diag = Diagnostics::default();
    let out = inverse_laplacian(field.grid).apply_diag(field, &mut diag);
    (out, diag.zero_mode_annihilated())
}

/// |<phi, Op psi> - <Op phi, psi>| / (|Op phi||psi| + |phi||Op psi|).
pub fn hermiticity_residual<F: Field>(op: &Operator<F>, phi: &F, psi: &F) -> Result<f64> {
    if phi.norm() == 0.0 || psi.norm() == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let op_psi = op.apply(psi);
    let op_phi = op.apply(phi);
    let lhs = phi.inner(&op_psi);
    let rhs = op_phi.inner(psi);
    let denom = op_phi.norm() * psi.norm() + phi.norm() * op_psi.norm();
    Ok((lhs - rhs).norm() / denom)
}

// ---------------------------------------------------------------------------
// Standard test-state family: Gaussian rings exp(-(r - r0)^2 / 2 sigma^2)
// e^{i m theta} with r0 = box/8, sigma = box/32, m in {0, 1, 2}, plus five
// seeded random band-limited states (band = N/4) under the same ring
// envelope. All states are localized away from both the origin and the
// periodic boundary.
// ---------------------------------------------------------------------------

pub fn gaussian_ring(grid: Grid2D, m: i32) -> ScalarField {
    let r0 = grid.box_len / 8.0;
    let sigma = grid.box_len / 32.0;
    let f = ScalarField::from_fn(grid, |x1, x2| {
        let r = (x1 * x1 + x2 * x2).sqrt();
        let mag = (-(r - r0) * (r - r0) / (2.0 * sigma * sigma)).exp();
        Complex64::from_polar(mag, f64::from(m) * x2.atan2(x1))
    });
    let n = f.norm();
    f.scaled(Complex64::new(1.0 / n, 0.0))
}

pub fn random_band_limited(grid: Grid2D, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = (grid.n / 4) as i64;
    let n = grid.n as i64;
    let mut f = ScalarField::zeros(grid);
    for k1 in 0..grid.n {
        let s1 = if (k1 as i64) < n / 2 { k1 as i64 } else { k1 as i64 - n };
        for k2 in 0..grid.n {
            let s2 = if (k2 as i64) < n / 2 { k2 as i64 } else { k2 as i64 - n };
            if s1.abs() <= band && s2.abs() <= band {
                f.data[grid.idx(k1, k2)] =
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
    }
    f.fft_inverse();
    // Ring envelope with the same r0, sigma as the ring states, symmetrized
    // in r so it is an even analytic function of r (no conical kink at the
    // origin): keeps the state smooth and away from both the coordinate
    // singularity and the wrap seam.
    let r0 = grid.box_len / 8.0;
    let sigma = grid.box_len / 32.0;
    for q1 in 0..grid.n {
        let x1 = grid.coord(q1);
        for q2 in 0..grid.n {
            let x2 = grid.coord(q2);
            let r = (x1 * x1 + x2 * x2).sqrt();
            let env = (-(r - r0) * (r - r0) / (2.0 * sigma * sigma)).exp()
                + (-(r + r0) * (r + r0) / (2.0 * sigma * sigma)).exp();
            f.data[grid.idx(q1, q2)] *= env;
        }
    }
    let norm = f.norm();
    f.scaled(Complex64::new(1.0 / norm, 0.0))
}

pub fn standard_scalar_family(grid: Grid2D, seed: u64) -> Vec<(String, ScalarField)> {
    let mut states = Vec::new();
    for m in 0..=2 {
        states.push((format!("ring_m{m}"), gaussian_ring(grid, m)));
    }
    for j in 0..5 {
        states.push((format!("rand_{j}"), random_band_limited(grid, seed.wrapping_add(j))));
    }
    states
}

pub fn standard_spinor_family(grid: Grid2D, seed: u64) -> Vec<(String, SpinorField)> {
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut states = Vec::new();
    for m in 0..=2 {
        let ring = gaussian_ring(grid, m);
        states.push((
            format!("ring_m{m}"),
            SpinorField::new(ring.scaled(inv_sqrt2), ring.scaled(inv_sqrt2)),
        ));
    }
    for j in 0..5 {
        let upper = random_band_limited(grid, seed.wrapping_add(j));
        let lower = random_band_limited(grid, seed.wrapping_add(j).wrapping_add(1000));
        let s = SpinorField::new(upper, lower);
        let norm = s.norm();
        states.push((format!("rand_{j}"), s.scaled(Complex64::new(1.0 / norm, 0.0))));
    }
    states
}
