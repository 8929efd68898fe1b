//! Physical constants for the constrained-particle problem.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, particle mass and sphere radius.
///
/// Natural units `hbar = mass = radius = 1` are the default; every constant
/// can be overridden to exercise dimensional-scaling invariants. The external
/// potential is identically zero throughout the crate, so it carries no field
/// here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    pub radius: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            radius: 1.0,
        }
    }
}

impl PhysicalParams {
    pub fn new(hbar: f64, mass: f64, radius: f64) -> Result<Self> {
        let p = Self { hbar, mass, radius };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("radius", self.radius),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// The natural energy unit of the sphere problem, `hbar^2 / (2 m r^2)`.
    pub fn energy_unit(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass * self.radius * self.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_natural_units() {
        let p = PhysicalParams::default();
        assert_eq!((p.hbar, p.mass, p.radius), (1.0, 1.0, 1.0));
        assert_eq!(p.energy_unit(), 0.5);
    }

    #[test]
    fn rejects_nonpositive_constants() {
        assert!(PhysicalParams::new(0.0, 1.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, -2.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, f64::NAN).is_err());
    }
}
