//! Direct numerical solvers for the discretized operator.

pub mod banded;
pub mod bound;
pub mod ode;
pub mod operator;
pub mod scaling;
pub mod shooting;

use num_complex::Complex64;
use thiserror::Error;

pub use bound::{bound_states, BoundStates};
pub use operator::{discretize, DiscretizedOperator};
pub use scaling::{resonances_complex_scaling, ScalingOptions};
pub use shooting::{shooting_resonance, ShootingOptions};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum DirectError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("scaling angle {0} outside the allowed range")]
    ThetaOutOfRange(f64),
    #[error("operator is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("block factorization broke down repeatedly near shift {0}")]
    FactorizationBreakdown(f64),
    #[error("no convergence from seed {seed} after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        seed: f64,
        residual: f64,
        iterations: usize,
    },
    #[error("negative width beyond the floor at E = {energy}")]
    NegativeWidth { energy: Complex64 },
    #[error("integrator step underflow at x = {x}")]
    StepUnderflow { x: f64 },
    #[error("Newton iteration from seed {seed} diverged (last iterate {last})")]
    NewtonDiverged { seed: f64, last: Complex64 },
    #[error("seed {0} is not inside the gap")]
    SeedOutsideGap(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResonanceMethod {
    ComplexScaling,
    Shooting,
}

impl ResonanceMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ResonanceMethod::ComplexScaling => "complex_scaling",
            ResonanceMethod::Shooting => "shooting",
        }
    }
}

/// Complex energy `E - i Gamma/2` continued from a real seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Resonance {
    pub seed: f64,
    pub energy_complex: Complex64,
    pub gamma: f64,
    pub method: ResonanceMethod,
    pub theta_used: Option<f64>,
    /// Displacement under a change of scaling angle, or the Newton residual.
    pub stability: f64,
    pub residual: f64,
    /// Converged farther than the local level spacing from the seed.
    pub escaped: bool,
}
