//! Junction profiles: the gap function, chemical potential and phase field of
//! a gated SNS junction, treated as fixed effective potentials.
//!
//! The gap vanishes on the normal lead `|x| <= x1`, reaches the bulk value
//! `delta0` for `|x| >= x2`, and ramps monotonically in between. The
//! chemical potential is the constant `mu0`, and the phase takes the two
//! values `±phi` on either side of the junction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Shape of the gap ramp on `[x1, x2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RampShape {
    /// `6t^5 - 15t^4 + 10t^3`, C² at both ends of the ramp.
    QuinticSmoothstep,
    /// Constant slope `delta0 / (x2 - x1)`.
    Linear,
    /// Abrupt jump at `|x| = L` (`x1 = x2 = L`).
    HardWall,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ProfileError {
    #[error("gap amplitude must be positive, got delta0 = {0}")]
    NonPositiveGap(f64),
    #[error("gap exceeds chemical potential: delta0 = {delta0} >= mu0 = {mu0}")]
    GapExceedsChemicalPotential { delta0: f64, mu0: f64 },
    #[error("geometry must satisfy 0 < x1 < L < x2, got x1 = {x1}, L = {l}, x2 = {x2}")]
    UnorderedGeometry { x1: f64, l: f64, x2: f64 },
    #[error("hard-wall profile needs L > 0, got {0}")]
    NonPositiveLength(f64),
    #[error("non-finite parameter `{0}`")]
    NonFinite(&'static str),
}

/// Pointwise coefficients of the 2×2 Bogoliubov-de Gennes operator.
///
/// Implemented by [`JunctionProfile`]; the direct solver only needs this
/// view, which also lets tests discretize degenerate coefficient sets.
pub trait BdgCoefficients {
    fn gap(&self, x: f64) -> f64;
    fn chemical_potential(&self, x: f64) -> f64;
    fn phase(&self, x: f64) -> f64;
    /// Bulk gap reached on the plateaus.
    fn bulk_gap(&self) -> f64;
    /// Bulk chemical potential on the plateaus.
    fn bulk_chemical_potential(&self) -> f64;
    /// Phase on the right bank; the left bank carries its negative.
    fn bulk_phase(&self) -> f64;
    /// All coefficients are constant for `|x| >= plateau_start()`.
    fn plateau_start(&self) -> f64;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JunctionProfile {
    delta0: f64,
    mu0: f64,
    phi: f64,
    x1: f64,
    x2: f64,
    lead_half_length: f64,
    ramp_shape: RampShape,
}

fn smoothstep5(t: f64) -> f64 {
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

impl JunctionProfile {
    /// Builds a profile with a smooth or linear ramp on `[x1, x2]`.
    ///
    /// For [`RampShape::HardWall`] the ramp bounds are ignored and the jump is
    /// placed at `lead_half_length`.
    pub fn new(
        delta0: f64,
        mu0: f64,
        phi: f64,
        x1: f64,
        x2: f64,
        lead_half_length: f64,
        ramp_shape: RampShape,
    ) -> Result<Self, ProfileError> {
        if ramp_shape == RampShape::HardWall {
            return Self::hard_wall(delta0, mu0, phi, lead_half_length);
        }
        for (name, v) in [
            ("delta0", delta0),
            ("mu0", mu0),
            ("phi", phi),
            ("x1", x1),
            ("x2", x2),
            ("lead_half_length", lead_half_length),
        ] {
            if !v.is_finite() {
                return Err(ProfileError::NonFinite(name));
            }
        }
        Self::check_energies(delta0, mu0)?;
        if !(0.0 < x1 && x1 < lead_half_length && lead_half_length < x2) {
            return Err(ProfileError::UnorderedGeometry {
                x1,
                l: lead_half_length,
                x2,
            });
        }
        Ok(Self {
            delta0,
            mu0,
            phi,
            x1,
            x2,
            lead_half_length,
            ramp_shape,
        })
    }

    /// Gap jumping from 0 to `delta0` at `|x| = l`.
    pub fn hard_wall(delta0: f64, mu0: f64, phi: f64, l: f64) -> Result<Self, ProfileError> {
        for (name, v) in [("delta0", delta0), ("mu0", mu0), ("phi", phi), ("lead_half_length", l)] {
            if !v.is_finite() {
                return Err(ProfileError::NonFinite(name));
            }
        }
        Self::check_energies(delta0, mu0)?;
        if l <= 0.0 {
            return Err(ProfileError::NonPositiveLength(l));
        }
        Ok(Self {
            delta0,
            mu0,
            phi,
            x1: l,
            x2: l,
            lead_half_length: l,
            ramp_shape: RampShape::HardWall,
        })
    }

    fn check_energies(delta0: f64, mu0: f64) -> Result<(), ProfileError> {
        if delta0 <= 0.0 {
            return Err(ProfileError::NonPositiveGap(delta0));
        }
        if delta0 >= mu0 {
            return Err(ProfileError::GapExceedsChemicalPotential { delta0, mu0 });
        }
        Ok(())
    }

    /// Same junction with a different phase difference.
    pub fn with_phi(&self, phi: f64) -> Self {
        Self { phi, ..self.clone() }
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }
    pub fn mu0(&self) -> f64 {
        self.mu0
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }
    pub fn x1(&self) -> f64 {
        self.x1
    }
    pub fn x2(&self) -> f64 {
        self.x2
    }
    pub fn lead_half_length(&self) -> f64 {
        self.lead_half_length
    }
    pub fn ramp_shape(&self) -> RampShape {
        self.ramp_shape
    }

    /// Gap function Δ(x).
    pub fn eval_delta(&self, x: f64) -> f64 {
        let r = x.abs();
        match self.ramp_shape {
            RampShape::HardWall => {
                if r < self.lead_half_length {
                    0.0
                } else {
                    self.delta0
                }
            }
            RampShape::Linear | RampShape::QuinticSmoothstep => {
                if r <= self.x1 {
                    0.0
                } else if r >= self.x2 {
                    self.delta0
                } else {
                    let t = (r - self.x1) / (self.x2 - self.x1);
                    let s = match self.ramp_shape {
                        RampShape::Linear => t,
                        _ => smoothstep5(t),
                    };
                    self.delta0 * s
                }
            }
        }
    }

    /// Chemical potential μ(x), constant in this model.
    pub fn eval_mu(&self, _x: f64) -> f64 {
        self.mu0
    }

    /// Phase field `sgn(x)·phi`.
    pub fn eval_phase(&self, x: f64) -> f64 {
        if x > 0.0 {
            self.phi
        } else if x < 0.0 {
            -self.phi
        } else {
            0.0
        }
    }
}

impl BdgCoefficients for JunctionProfile {
    fn gap(&self, x: f64) -> f64 {
        self.eval_delta(x)
    }
    fn chemical_potential(&self, x: f64) -> f64 {
        self.eval_mu(x)
    }
    fn phase(&self, x: f64) -> f64 {
        self.eval_phase(x)
    }
    fn bulk_gap(&self) -> f64 {
        self.delta0
    }
    fn bulk_chemical_potential(&self) -> f64 {
        self.mu0
    }
    fn bulk_phase(&self) -> f64 {
        self.phi
    }
    fn plateau_start(&self) -> f64 {
        self.x2
    }
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ParamsError {
    #[error("Planck parameter must be positive, got h = {0}")]
    NonPositiveH(f64),
    #[error("energy window [{lo}, {hi}] must lie inside (0, {delta0}]")]
    BadWindow { lo: f64, hi: f64, delta0: f64 },
    #[error("tolerance `{0}` must be positive")]
    NonPositiveTolerance(&'static str),
}

/// Semiclassical run parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiclassicalParams {
    pub h: f64,
    pub energy_window: (f64, f64),
    pub tol_root: f64,
    pub tol_quad: f64,
}

impl SemiclassicalParams {
    pub const DEFAULT_TOL_ROOT: f64 = 1e-10;
    pub const DEFAULT_TOL_QUAD: f64 = 1e-12;

    pub fn new(profile: &JunctionProfile, h: f64, energy_window: (f64, f64)) -> Result<Self, ParamsError> {
        Self::with_tolerances(
            profile,
            h,
            energy_window,
            Self::DEFAULT_TOL_ROOT,
            Self::DEFAULT_TOL_QUAD,
        )
    }

    pub fn with_tolerances(
        profile: &JunctionProfile,
        h: f64,
        energy_window: (f64, f64),
        tol_root: f64,
        tol_quad: f64,
    ) -> Result<Self, ParamsError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(ParamsError::NonPositiveH(h));
        }
        let (lo, hi) = energy_window;
        let delta0 = profile.delta0();
        if !(lo >= 0.0 && lo < hi && hi <= delta0) {
            return Err(ParamsError::BadWindow { lo, hi, delta0 });
        }
        if !(tol_root > 0.0) {
            return Err(ParamsError::NonPositiveTolerance("tol_root"));
        }
        if !(tol_quad > 0.0) {
            return Err(ParamsError::NonPositiveTolerance("tol_quad"));
        }
        Ok(Self {
            h,
            energy_window,
            tol_root,
            tol_quad,
        })
    }

    /// Rescaled Planck parameter `alpha·h` for a local gap slope `alpha`.
    pub fn h_prime(&self, alpha: f64) -> f64 {
        alpha * self.h
    }
}
