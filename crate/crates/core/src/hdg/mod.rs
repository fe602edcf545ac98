//! Hybrid divergence-free discretisation: element operators, loads and the
//! discrete state.

pub mod forms;
pub mod state;

pub use forms::{Assembler, LocalIndex, LocalSystem, Loads};
pub use state::{DivergenceReport, FlowState};

use crate::error::{Error, Result};
use crate::mesh::Subdomain;

/// Piecewise-constant material data (index 0 outer, 1 inner) and the
/// penalty constant.
#[derive(Clone, Copy, Debug)]
pub struct Physics {
    pub rho: [f64; 2],
    pub mu: [f64; 2],
    pub alpha: f64,
}

pub const DEFAULT_ALPHA: f64 = 4.0;

impl Physics {
    pub fn uniform(rho: f64, mu: f64) -> Self {
        Physics {
            rho: [rho, rho],
            mu: [mu, mu],
            alpha: DEFAULT_ALPHA,
        }
    }

    pub fn two_phase(rho: [f64; 2], mu: [f64; 2]) -> Self {
        Physics {
            rho,
            mu,
            alpha: DEFAULT_ALPHA,
        }
    }

    pub fn rho(&self, s: Subdomain) -> f64 {
        self.rho[s.index()]
    }

    pub fn mu(&self, s: Subdomain) -> f64 {
        self.mu[s.index()]
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Parameter(format!("densities must be positive, got {:?}", self.rho)));
        }
        if self.mu.iter().any(|m| !(*m >= 0.0)) {
            return Err(Error::Parameter(format!("viscosities must be non-negative, got {:?}", self.mu)));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::Parameter(format!("penalty constant must be positive, got {}", self.alpha)));
        }
        Ok(())
    }
}
