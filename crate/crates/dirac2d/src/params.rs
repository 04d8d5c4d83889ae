//! Physical parameters of the two Dirac systems.
//!
//! Relativistic units hbar = c = 1 throughout: the mass M, the Coulomb
//! strength k, and the oscillator frequency omega all carry energy units
//! (k is dimensionless).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The radial potential entering the upper-left block of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Potential {
    /// V(r) = -k/r
    Coulomb { k: f64 },
    /// V(r) = (1/2) M omega^2 r^2
    Oscillator { omega: f64 },
}

impl Potential {
    pub fn name(&self) -> &'static str {
        match self {
            Potential::Coulomb { .. } => "coulomb",
            Potential::Oscillator { .. } => "oscillator",
        }
    }
}

/// Mass plus potential; exactly one coupling (k or omega) is meaningful,
/// enforced by the enum payload.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub mass: f64,
    pub potential: Potential,
}

impl PhysicalParams {
    pub fn coulomb(mass: f64, k: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass must be > 0, got {mass}")));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("Coulomb strength k must be > 0, got {k}")));
        }
        Ok(Self { mass, potential: Potential::Coulomb { k } })
    }

    pub fn oscillator(mass: f64, omega: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass must be > 0, got {mass}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("frequency omega must be > 0, got {omega}")));
        }
        Ok(Self { mass, potential: Potential::Oscillator { omega } })
    }

    /// Coulomb strength, or an error when the potential is not Coulomb.
    pub fn coulomb_k(&self) -> Result<f64> {
        match self.potential {
            Potential::Coulomb { k } => Ok(k),
            Potential::Oscillator { .. } => Err(Error::InvalidParameter(
                "operation requires a Coulomb potential".into(),
            )),
        }
    }

    /// Oscillator frequency, or an error when the potential is not an oscillator.
    pub fn oscillator_omega(&self) -> Result<f64> {
        match self.potential {
            Potential::Oscillator { omega } => Ok(omega),
            Potential::Coulomb { .. } => Err(Error::InvalidParameter(
                "operation requires an oscillator potential".into(),
            )),
        }
    }

    /// Potential value at radius r (finite for every r > 0).
    pub fn potential_value(&self, r: f64) -> f64 {
        match self.potential {
            Potential::Coulomb { k } => -k / r,
            Potential::Oscillator { omega } => 0.5 * self.mass * omega * omega * r * r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_validate() {
        assert!(PhysicalParams::coulomb(1.0, 0.2).is_ok());
        assert!(PhysicalParams::coulomb(0.0, 0.2).is_err());
        assert!(PhysicalParams::coulomb(1.0, 0.0).is_err());
        assert!(PhysicalParams::coulomb(1.0, -0.2).is_err());
        assert!(PhysicalParams::oscillator(1.0, 0.1).is_ok());
        assert!(PhysicalParams::oscillator(1.0, 0.0).is_err());
        assert!(PhysicalParams::oscillator(-1.0, 0.1).is_err());
    }

    #[test]
    fn accessors_gate_on_kind() {
        let c = PhysicalParams::coulomb(1.0, 0.2).unwrap();
        assert_eq!(c.coulomb_k().unwrap(), 0.2);
        assert!(c.oscillator_omega().is_err());
        let o = PhysicalParams::oscillator(1.0, 0.1).unwrap();
        assert_eq!(o.oscillator_omega().unwrap(), 0.1);
        assert!(o.coulomb_k().is_err());
    }

    #[test]
    fn potential_values() {
        let c = PhysicalParams::coulomb(1.0, 0.2).unwrap();
        assert_eq!(c.potential_value(2.0), -0.1);
        let o = PhysicalParams::oscillator(2.0, 0.5).unwrap();
        assert_eq!(o.potential_value(2.0), 0.5 * 2.0 * 0.25 * 4.0);
    }
}
