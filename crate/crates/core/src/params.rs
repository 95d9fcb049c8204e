use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Physical parameters of one reservoir and the atoms it contains.
///
/// The two upper levels are degenerate and resonant with the reservoir
/// centre, so a single decay rate `gamma0` describes both channels and
/// `theta` sets the cross (interference) rate `gamma0 * theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub gamma0: f64,
    pub lambda: f64,
    pub omega0: f64,
    pub theta: f64,
    pub n_atoms: u32,
}

impl SystemParams {
    pub fn new(gamma0: f64, lambda: f64, theta: f64, n_atoms: u32) -> Result<Self> {
        Self {
            gamma0,
            lambda,
            omega0: 1.0,
            theta,
            n_atoms,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.gamma0.is_finite() && self.gamma0 >= 0.0) {
            return bad(format!(
                "gamma0 must be finite and >= 0, got {}",
                self.gamma0
            ));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad(format!(
                "lambda must be finite and > 0, got {}",
                self.lambda
            ));
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return bad(format!(
                "omega0 must be finite and > 0, got {}",
                self.omega0
            ));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return bad(format!("theta must lie in [0, 1], got {}", self.theta));
        }
        if self.n_atoms == 0 {
            return bad("n_atoms must be >= 1".into());
        }
        Ok(self)
    }

    pub fn with_gamma0(self, gamma0: f64) -> Result<Self> {
        Self { gamma0, ..self }.validated()
    }

    pub fn with_theta(self, theta: f64) -> Result<Self> {
        Self { theta, ..self }.validated()
    }

    pub fn with_n_atoms(self, n_atoms: u32) -> Result<Self> {
        Self { n_atoms, ..self }.validated()
    }

    pub fn n(&self) -> f64 {
        f64::from(self.n_atoms)
    }
}

impl Default for SystemParams {
    /// The two-qutrit dynamics setting: `γ₀ = 1`, `λ = 0.8`, `θ = 1`, one atom.
    fn default() -> Self {
        Self {
            gamma0: 1.0,
            lambda: 0.8,
            omega0: 1.0,
            theta: 1.0,
            n_atoms: 1,
        }
    }
}
