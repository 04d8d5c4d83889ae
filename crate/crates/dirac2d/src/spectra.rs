//! Closed-form spectra and quantum-number bookkeeping.
//!
//! The Coulomb system carries an SO(3) dynamical symmetry with levels
//! E = M (n^2 - k^2) / (n^2 + k^2), n odd; the oscillator carries an SU(2)
//! symmetry whose positive-branch level is the real root above M of
//! (E + M)(E - M)^2 = 2 M omega^2 (n + 1)^2. Everything here is analytic
//! and serves as the ground truth the grid and radial solvers are checked
//! against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{PhysicalParams, Potential};

/// Sign of the energy branch in the Coulomb formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Sector labels (m, n_r) plus the derived principal label n and the
/// group-theoretic label j (Coulomb, n = 2j + 1) or s (oscillator, n = 2s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub m: i32,
    pub n_r: u32,
    pub n: u32,
    pub j_or_s: f64,
    pub degeneracy: u32,
}

impl QuantumNumbers {
    /// Coulomb sector: n = 2 n_r + 2|m| + 1 (odd), j = (n - 1)/2, level
    /// degeneracy n.
    pub fn coulomb(m: i32, n_r: u32) -> Self {
        let n = 2 * n_r + 2 * m.unsigned_abs() + 1;
        QuantumNumbers {
            m,
            n_r,
            n,
            j_or_s: f64::from(n - 1) / 2.0,
            degeneracy: n,
        }
    }

    /// Oscillator sector: n = 2 n_r + |m|, s = n/2, level degeneracy n + 1.
    pub fn oscillator(m: i32, n_r: u32) -> Self {
        let n = 2 * n_r + m.unsigned_abs();
        QuantumNumbers {
            m,
            n_r,
            n,
            j_or_s: f64::from(n) / 2.0,
            degeneracy: n + 1,
        }
    }

    pub fn for_potential(potential: &Potential, m: i32, n_r: u32) -> Self {
        match potential {
            Potential::Coulomb { .. } => Self::coulomb(m, n_r),
            Potential::Oscillator { .. } => Self::oscillator(m, n_r),
        }
    }
}

/// One bound level: labels, analytic energy, and (when a solver ran)
/// the numeric energy with its relative error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub quantum_numbers: QuantumNumbers,
    pub energy_analytic: f64,
    pub energy_numeric: Option<f64>,
    pub rel_error: Option<f64>,
}

fn validate_coulomb_n(n: u32) -> Result<()> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "Coulomb principal label n must be odd and >= 1, got {n}"
        )));
    }
    Ok(())
}

/// Coulomb level E = M (±n^2 - k^2) / (n^2 + k^2) for odd n.
pub fn coulomb_energy(n: u32, k: f64, mass: f64, branch: Branch) -> Result<f64> {
    validate_coulomb_n(n)?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("k must be > 0, got {k}")));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidParameter(format!("mass must be > 0, got {mass}")));
    }
    let n2 = f64::from(n) * f64::from(n);
    let k2 = k * k;
    let signed = match branch {
        Branch::Plus => n2,
        Branch::Minus => -n2,
    };
    Ok(mass * (signed - k2) / (n2 + k2))
}

/// Cubic whose positive-branch oscillator level is the unique root above M:
/// g(E) = (E + M)(E - M)^2 - 2 M omega^2 (n + 1)^2.
fn oscillator_cubic(e: f64, mass: f64, rhs: f64) -> f64 {
    (e + mass) * (e - mass) * (e - mass) - rhs
}

/// Scale 2 M omega^2 (n + 1)^2 of the oscillator cubic; residuals are
/// reported relative to it.
pub fn oscillator_cubic_scale(n: u32, omega: f64, mass: f64) -> f64 {
    let np1 = f64::from(n) + 1.0;
    2.0 * mass * omega * omega * np1 * np1
}

/// Oscillator level: the unique real root E > M of the cubic, found by
/// bracketed bisection refined with Newton steps. g is increasing on
/// (M, inf) with g(M) < 0, so the root exists and is unique there; it is
/// the branch that connects continuously to the non-relativistic limit
/// E = M + (n + 1) omega at fixed stiffness.
pub fn oscillator_energy(n: u32, omega: f64, mass: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega must be > 0, got {omega}")));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidParameter(format!("mass must be > 0, got {mass}")));
    }
    let rhs = oscillator_cubic_scale(n, omega, mass);
    let np1 = f64::from(n) + 1.0;
    let mut lo = mass;
    let mut hi = mass + 2.0 * np1 * omega + rhs / mass;
    debug_assert!(oscillator_cubic(hi, mass, rhs) > 0.0);

    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if oscillator_cubic(mid, mass, rhs) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 * hi.abs() {
            break;
        }
    }
    // Newton polish inside the bracket; g'(E) = (E - M)(3E + M) > 0 on (M, inf).
    let mut e = 0.5 * (lo + hi);
    for _ in 0..8 {
        let g = oscillator_cubic(e, mass, rhs);
        if g.abs() <= 0.25e-12 * rhs {
            break;
        }
        let dg = (e - mass) * (3.0 * e + mass);
        if dg <= 0.0 {
            break;
        }
        let step = g / dg;
        let next = e - step;
        if next <= lo || next >= hi {
            // fall back to bisection inside the current bracket
            if g > 0.0 {
                hi = e;
            } else {
                lo = e;
            }
            e = 0.5 * (lo + hi);
        } else {
            if g > 0.0 {
                hi = e;
            } else {
                lo = e;
            }
            e = next;
        }
    }
    Ok(e)
}

/// Non-relativistic limit of the level: Coulomb M - 2 k^2 M / n^2,
/// oscillator M + (n + 1) omega.
pub fn nr_energy(params: &PhysicalParams, n: u32) -> Result<f64> {
    match params.potential {
        Potential::Coulomb { k } => {
            validate_coulomb_n(n)?;
            let n2 = f64::from(n) * f64::from(n);
            Ok(params.mass - 2.0 * k * k * params.mass / n2)
        }
        Potential::Oscillator { omega } => Ok(params.mass + (f64::from(n) + 1.0) * omega),
    }
}

/// Analytic level for a sector, on the positive branch.
pub fn sector_energy(params: &PhysicalParams, qn: &QuantumNumbers) -> Result<f64> {
    match params.potential {
        Potential::Coulomb { k } => coulomb_energy(qn.n, k, params.mass, Branch::Plus),
        Potential::Oscillator { omega } => oscillator_energy(qn.n, omega, params.mass),
    }
}

/// All (m, n_r) sectors with principal label n <= n_max, sorted by
/// (n, m, n_r), each with its analytic energy.
pub fn enumerate_levels(params: &PhysicalParams, n_max: u32) -> Result<Vec<SpectrumEntry>> {
    let min_n = match params.potential {
        Potential::Coulomb { .. } => 1,
        Potential::Oscillator { .. } => 0,
    };
    if n_max < min_n {
        return Err(Error::InvalidParameter(format!(
            "n_max = {n_max} below the smallest legal level {min_n}"
        )));
    }
    let mut entries = Vec::new();
    let m_bound = n_max as i32;
    for m in -m_bound..=m_bound {
        let mut n_r = 0u32;
        loop {
            let qn = QuantumNumbers::for_potential(&params.potential, m, n_r);
            if qn.n > n_max {
                break;
            }
            let energy = sector_energy(params, &qn)?;
            entries.push(SpectrumEntry {
                quantum_numbers: qn,
                energy_analytic: energy,
                energy_numeric: None,
                rel_error: None,
            });
            n_r += 1;
        }
    }
    entries.sort_by(|a, b| {
        let qa = &a.quantum_numbers;
        let qb = &b.quantum_numbers;
        (qa.n, qa.m, qa.n_r).cmp(&(qb.n, qb.m, qb.n_r))
    });
    Ok(entries)
}

/// One point of a non-relativistic-limit sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviationRow {
    /// Swept parameter value (k for Coulomb, M for the oscillator).
    pub parameter: f64,
    pub energy_exact: f64,
    pub energy_nr: f64,
    pub deviation: f64,
}

/// E_exact - E_nr along the prescribed sweep: Coulomb sweeps k downward at
/// fixed M; the oscillator sweeps M upward at fixed stiffness K = M omega^2
/// (the frequency of `params` fixes K together with its mass).
///
/// The Coulomb deviation equals 2 k^4 M / (n^2 (n^2 + k^2)) identically.
pub fn nr_deviation_sweep(
    params: &PhysicalParams,
    n: u32,
    sweep: &[f64],
) -> Result<Vec<DeviationRow>> {
    if sweep.len() < 2 {
        return Err(Error::InvalidSweep("need at least two sweep points".into()));
    }
    match params.potential {
        Potential::Coulomb { .. } => {
            if !sweep.windows(2).all(|w| w[1] < w[0]) || sweep.iter().any(|&k| k <= 0.0) {
                return Err(Error::InvalidSweep(
                    "Coulomb sweep must be strictly decreasing positive k values".into(),
                ));
            }
            sweep
                .iter()
                .map(|&k| {
                    let p = PhysicalParams::coulomb(params.mass, k)?;
                    let exact = coulomb_energy(n, k, p.mass, Branch::Plus)?;
                    let nr = nr_energy(&p, n)?;
                    Ok(DeviationRow {
                        parameter: k,
                        energy_exact: exact,
                        energy_nr: nr,
                        deviation: exact - nr,
                    })
                })
                .collect()
        }
        Potential::Oscillator { omega } => {
            if !sweep.windows(2).all(|w| w[1] > w[0]) || sweep.iter().any(|&m| m <= 0.0) {
                return Err(Error::InvalidSweep(
                    "oscillator sweep must be strictly increasing positive masses".into(),
                ));
            }
            let stiffness = params.mass * omega * omega;
            sweep
                .iter()
                .map(|&mass| {
                    let w = (stiffness / mass).sqrt();
                    let p = PhysicalParams::oscillator(mass, w)?;
                    let exact = oscillator_energy(n, w, mass)?;
                    let nr = nr_energy(&p, n)?;
                    Ok(DeviationRow {
                        parameter: mass,
                        energy_exact: exact,
                        energy_nr: nr,
                        deviation: exact - nr,
                    })
                })
                .collect()
        }
    }
}

/// Closed form of the Coulomb deviation E+ - E_nr = 2 k^4 M / (n^2 (n^2 + k^2)).
pub fn coulomb_nr_deviation(n: u32, k: f64, mass: f64) -> f64 {
    let n2 = f64::from(n) * f64::from(n);
    2.0 * k.powi(4) * mass / (n2 * (n2 + k * k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent root oracle: plain bisection of the cubic on a bracket,
    /// no Newton, no shared code path with `oscillator_energy`.
    fn cubic_root_bisection_oracle(n: u32, omega: f64, mass: f64) -> f64 {
        let np1 = f64::from(n) + 1.0;
        let rhs = 2.0 * mass * omega * omega * np1 * np1;
        let g = |e: f64| (e + mass) * (e - mass) * (e - mass) - rhs;
        let mut lo = mass;
        let mut hi = mass + 2.0 * np1 * omega + rhs / mass + 1.0;
        assert!(g(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Cardano-style closed form for the largest real root of the depressed
    /// cubic, used as a second independent route.
    fn cardano_largest_root(n: u32, omega: f64, mass: f64) -> f64 {
        let np1 = f64::from(n) + 1.0;
        let c = 2.0 * mass * omega * omega * np1 * np1;
        // (E + M)(E - M)^2 = c  =>  E^3 - M E^2 - M^2 E + M^3 - c = 0.
        // Substitute E = t + M/3: t^3 + p t + q = 0.
        let a2 = -mass;
        let a1 = -mass * mass;
        let a0 = mass.powi(3) - c;
        let p = a1 - a2 * a2 / 3.0;
        let q = 2.0 * a2.powi(3) / 27.0 - a2 * a1 / 3.0 + a0;
        let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
        let t = if disc >= 0.0 {
            let s = disc.sqrt();
            let u = (-q / 2.0 + s).cbrt();
            let v = (-q / 2.0 - s).cbrt();
            u + v
        } else {
            // three real roots: trigonometric form, largest root
            let rho = (-p / 3.0).sqrt();
            let theta = (3.0 * q / (2.0 * p * rho)).clamp(-1.0, 1.0).acos();
            2.0 * rho * (theta / 3.0).cos()
        };
        t - a2 / 3.0
    }

    #[test]
    fn coulomb_energy_examples() {
        // degenerate point: E(1, 1, 1, +) = 0
        assert_eq!(coulomb_energy(1, 1.0, 1.0, Branch::Plus).unwrap(), 0.0);
        // free-particle rest energy as k -> 0+
        let e = coulomb_energy(1, 1e-12, 1.0, Branch::Plus).unwrap();
        assert!((e - 1.0).abs() < 1e-20);
        // direct arithmetic: (9 - 0.25)/(9 + 0.25)
        let e = coulomb_energy(3, 0.5, 1.0, Branch::Plus).unwrap();
        assert!((e - 8.75 / 9.25).abs() < 1e-15);
        // negative branch
        assert_eq!(coulomb_energy(1, 1.0, 1.0, Branch::Minus).unwrap(), -1.0);
    }

    #[test]
    fn coulomb_energy_rejects_bad_inputs() {
        assert!(coulomb_energy(0, 0.2, 1.0, Branch::Plus).is_err());
        assert!(coulomb_energy(2, 0.2, 1.0, Branch::Plus).is_err());
        assert!(coulomb_energy(1, 0.0, 1.0, Branch::Plus).is_err());
        assert!(coulomb_energy(1, -0.2, 1.0, Branch::Plus).is_err());
        assert!(coulomb_energy(1, 0.2, 0.0, Branch::Plus).is_err());
    }

    #[test]
    fn oscillator_energy_small_omega_limit() {
        let e = oscillator_energy(3, 1e-8, 1.0).unwrap();
        assert!((e - 1.0).abs() < 1e-6, "E = {e}");
        assert!(e > 1.0);
    }

    #[test]
    fn oscillator_energy_against_bisection_oracle() {
        // frozen from the oracle: n=0, omega=0.1, M=1
        let oracle = cubic_root_bisection_oracle(0, 0.1, 1.0);
        let e = oscillator_energy(0, 0.1, 1.0).unwrap();
        assert!((e - oracle).abs() <= 1e-12 * oracle);
        assert!((e - 1.0977).abs() < 1e-4, "E = {e}");
        // n=1, omega=1, M=1
        let oracle = cubic_root_bisection_oracle(1, 1.0, 1.0);
        let e = oscillator_energy(1, 1.0, 1.0).unwrap();
        assert!((e - oracle).abs() <= 1e-12 * oracle);
        assert!((e - 2.510).abs() < 1e-3, "E = {e}");
    }

    #[test]
    fn oscillator_cubic_residual_bound() {
        for &(n, omega, mass) in &[(0u32, 0.1, 1.0), (1, 1.0, 1.0), (7, 0.003, 0.5), (10, 1.0, 10.0)] {
            let e = oscillator_energy(n, omega, mass).unwrap();
            let rhs = oscillator_cubic_scale(n, omega, mass);
            let res = ((e + mass) * (e - mass) * (e - mass) - rhs).abs();
            assert!(res <= 1e-12 * rhs, "residual {res:e} vs scale {rhs:e}");
            assert!(e > mass);
        }
    }

    #[test]
    fn nr_energy_examples() {
        let c = PhysicalParams::coulomb(1.0, 0.2).unwrap();
        assert!((nr_energy(&c, 1).unwrap() - 0.92).abs() < 1e-15);
        let o = PhysicalParams::oscillator(1.0, 0.1).unwrap();
        assert!((nr_energy(&o, 0).unwrap() - 1.1).abs() < 1e-15);
        let c_small = PhysicalParams::coulomb(1.0, 1e-12).unwrap();
        assert!((nr_energy(&c_small, 1).unwrap() - 1.0).abs() < 1e-20);
    }

    /// Brute-force sector enumeration used as the oracle for
    /// `enumerate_levels`.
    fn brute_force_sectors(potential: &Potential, n_max: u32) -> Vec<(i32, u32, u32)> {
        let mut v = Vec::new();
        for m in -(n_max as i32)..=(n_max as i32) {
            for n_r in 0..=n_max {
                let n = match potential {
                    Potential::Coulomb { .. } => 2 * n_r + 2 * m.unsigned_abs() + 1,
                    Potential::Oscillator { .. } => 2 * n_r + m.unsigned_abs(),
                };
                if n <= n_max {
                    v.push((m, n_r, n));
                }
            }
        }
        v.sort();
        v
    }

    #[test]
    fn enumerate_levels_matches_brute_force() {
        let c = PhysicalParams::coulomb(1.0, 0.2).unwrap();
        let entries = enumerate_levels(&c, 3).unwrap();
        let got: Vec<_> = entries
            .iter()
            .map(|e| (e.quantum_numbers.m, e.quantum_numbers.n_r, e.quantum_numbers.n))
            .collect();
        let mut want = brute_force_sectors(&c.potential, 3);
        want.sort_by_key(|&(m, n_r, n)| (n, m, n_r));
        assert_eq!(got, want);
        // levels n in {1,3} with multiplicities {1,3}
        assert_eq!(entries.iter().filter(|e| e.quantum_numbers.n == 1).count(), 1);
        assert_eq!(entries.iter().filter(|e| e.quantum_numbers.n == 3).count(), 3);

        let o = PhysicalParams::oscillator(1.0, 0.1).unwrap();
        let entries = enumerate_levels(&o, 2).unwrap();
        for (n, mult) in [(0u32, 1usize), (1, 2), (2, 3)] {
            assert_eq!(
                entries.iter().filter(|e| e.quantum_numbers.n == n).count(),
                mult
            );
        }

        let single = enumerate_levels(&c, 1).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].quantum_numbers.m, 0);
        assert_eq!(single[0].quantum_numbers.n_r, 0);
    }

    #[test]
    fn degeneracy_counts() {
        for n in (1u32..=15).step_by(2) {
            let count = brute_force_sectors(&Potential::Coulomb { k: 0.2 }, n)
                .iter()
                .filter(|&&(_, _, nn)| nn == n)
                .count();
            assert_eq!(count as u32, n);
        }
        for n in 0u32..=12 {
            let count = brute_force_sectors(&Potential::Oscillator { omega: 0.1 }, n)
                .iter()
                .filter(|&&(_, _, nn)| nn == n)
                .count();
            assert_eq!(count as u32, n + 1);
        }
    }

    #[test]
    fn coulomb_deviation_sweep() {
        let c = PhysicalParams::coulomb(1.0, 0.4).unwrap();
        let rows = nr_deviation_sweep(&c, 1, &[0.4, 0.2, 0.1]).unwrap();
        // frozen from direct subtraction of the two closed forms
        assert!((rows[1].deviation - 0.003077).abs() < 1e-6);
        assert!((rows[2].deviation - 0.000198).abs() < 1e-6);
        // O(k^4) scaling between k = 0.2 and k = 0.1
        let ratio = rows[1].deviation / rows[2].deviation;
        assert!((ratio - 15.5).abs() < 0.1, "ratio {ratio}");
        assert!(rows.windows(2).all(|w| w[1].deviation < w[0].deviation));
        // wrong direction rejected
        assert!(nr_deviation_sweep(&c, 1, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn oscillator_deviation_sweep() {
        // fixed stiffness K = M omega^2 = 0.01
        let base = PhysicalParams::oscillator(1.0, 0.1).unwrap();
        let rows = nr_deviation_sweep(&base, 0, &[10.0, 100.0, 1000.0]).unwrap();
        assert!(rows
            .windows(2)
            .all(|w| w[1].deviation.abs() < w[0].deviation.abs()));
        assert!(nr_deviation_sweep(&base, 0, &[100.0, 10.0]).is_err());
    }

    #[test]
    fn cardano_cross_check() {
        let mut failures = 0;
        for &(n, omega, mass) in &[
            (0u32, 0.1, 1.0),
            (1, 1.0, 1.0),
            (2, 0.5, 2.0),
            (5, 0.01, 0.3),
            (9, 0.9, 7.0),
        ] {
            let e = oscillator_energy(n, omega, mass).unwrap();
            let cardano = cardano_largest_root(n, omega, mass);
            if (e - cardano).abs() > 1e-9 * e.abs() {
                failures += 1;
            }
        }
        assert_eq!(failures, 0);
    }

    proptest! {
        #[test]
        fn coulomb_positive_branch_bounds_and_monotonicity(
            j in 0u32..8,
            k in 0.01f64..5.0,
            mass in 0.1f64..10.0,
        ) {
            let n = 2 * j + 1;
            let e = coulomb_energy(n, k, mass, Branch::Plus).unwrap();
            prop_assert!(e > -mass && e < mass);
            let e_next = coulomb_energy(n + 2, k, mass, Branch::Plus).unwrap();
            prop_assert!(e_next > e);
        }

        #[test]
        fn oscillator_root_bounds_and_monotonicity(
            n in 0u32..10,
            omega in 1e-3f64..1.0,
            mass in 0.1f64..10.0,
        ) {
            let e = oscillator_energy(n, omega, mass).unwrap();
            prop_assert!(e > mass);
            let e_next = oscillator_energy(n + 1, omega, mass).unwrap();
            prop_assert!(e_next > e);
            let oracle = cubic_root_bisection_oracle(n, omega, mass);
            prop_assert!((e - oracle).abs() <= 1e-11 * oracle);
        }

        #[test]
        fn coulomb_nr_deviation_identity(
            j in 0u32..4,
            k in 0.2f64..2.0,
            mass in 0.1f64..10.0,
        ) {
            let n = 2 * j + 1;
            let exact = coulomb_energy(n, k, mass, Branch::Plus).unwrap();
            let p = PhysicalParams::coulomb(mass, k).unwrap();
            let nr = nr_energy(&p, n).unwrap();
            let formula = coulomb_nr_deviation(n, k, mass);
            // plain subtraction agrees with the closed form up to the
            // cancellation allowance of f64
            prop_assert!(((exact - nr) - formula).abs() <= 64.0 * f64::EPSILON * mass);
        }
    }
}
