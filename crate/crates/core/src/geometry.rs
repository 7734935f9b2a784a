//! Classical data of the Bogoliubov-de Gennes symbol at a fixed energy.
//!
//! At energy `0 < E < delta0` the characteristic set `xi^2 = K±(x)` has two
//! real branches over `[-x0, x0]`, where `delta(x0) = E`, and complex
//! branches beyond the turning point. This module evaluates the branches,
//! the turning point, the real actions `S±` over the lead, and the
//! imaginary action accumulated in the gapped region.

use num_complex::Complex64;
use thiserror::Error;

use crate::profile::{JunctionProfile, RampShape};
use crate::quadrature::{integrate, QuadratureError};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GeometryError {
    #[error("no turning point: energy {energy} outside (0, {delta0})")]
    NoTurningPoint { energy: f64, delta0: f64 },
    #[error("degenerate gap slope {alpha} at turning point x0 = {x0}")]
    DegenerateSlope { x0: f64, alpha: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Turning point, slopes, actions and barrier data at one energy.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalGeometry {
    pub energy: f64,
    pub x0: f64,
    pub xi0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub action_plus: f64,
    pub action_minus: f64,
    /// Imaginary action over `[x0, x2]`.
    pub barrier_exponent: f64,
    /// Constant rate `Im sqrt(K+)` on the plateau `|x| >= x2`.
    pub tail_rate: f64,
}

impl ClassicalGeometry {
    pub fn compute(profile: &JunctionProfile, energy: f64, tol_quad: f64) -> Result<Self, GeometryError> {
        let x0 = turning_point(profile, energy)?;
        let slope = local_slope(profile, energy)?;
        let (action_plus, action_minus) = action_integrals(profile, energy, tol_quad)?;
        let barrier = barrier_exponent(profile, energy, profile.x2(), tol_quad)?;
        Ok(Self {
            energy,
            x0,
            xi0: slope.xi0,
            alpha: slope.alpha,
            beta: slope.beta,
            action_plus,
            action_minus,
            barrier_exponent: barrier.finite,
            tail_rate: barrier.tail_rate,
        })
    }
}

/// Imaginary action in the gapped region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Barrier {
    /// `∫ Im sqrt(K+) dx` over `[x0, x2]`.
    pub finite: f64,
    /// `Im sqrt(mu0 + i sqrt(delta0² - E²))`.
    pub tail_rate: f64,
    pub x_end: f64,
}

impl Barrier {
    /// `∫ Im sqrt(K+) dx` over `[x0, x_end]`.
    pub fn total(&self, plateau_start: f64) -> f64 {
        self.finite + self.tail_rate * (self.x_end - plateau_start).max(0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalSlope {
    pub alpha: f64,
    pub beta: f64,
    pub xi0: f64,
}

/// `Im sqrt(a + i b)` for `b >= 0`, principal branch, without cancellation.
fn im_sqrt(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        return if a >= 0.0 { 0.0 } else { (-a).sqrt() };
    }
    let modulus = a.hypot(b);
    if a >= 0.0 {
        b / (2.0 * (0.5 * (modulus + a)).sqrt())
    } else {
        (0.5 * (modulus - a)).sqrt()
    }
}

/// `K±(x) = mu(x) ± sqrt(E² - delta(x)²)`, continued as
/// `mu(x) ± i sqrt(delta(x)² - E²)` where the gap exceeds the energy.
pub fn kinetic_branches(profile: &JunctionProfile, energy: f64, x: f64) -> (Complex64, Complex64) {
    let mu = profile.eval_mu(x);
    let d = profile.eval_delta(x);
    let disc = energy * energy - d * d;
    if disc >= 0.0 {
        let s = disc.sqrt();
        (Complex64::new(mu + s, 0.0), Complex64::new(mu - s, 0.0))
    } else {
        let s = (-disc).sqrt();
        (Complex64::new(mu, s), Complex64::new(mu, -s))
    }
}

/// Solves `delta(x0) = E` on the ramp by bisection.
pub fn turning_point(profile: &JunctionProfile, energy: f64) -> Result<f64, GeometryError> {
    let delta0 = profile.delta0();
    if !(energy > 0.0 && energy < delta0) {
        return Err(GeometryError::NoTurningPoint { energy, delta0 });
    }
    if profile.ramp_shape() == RampShape::HardWall {
        return Ok(profile.lead_half_length());
    }
    let (mut lo, mut hi) = (profile.x1(), profile.x2());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if profile.eval_delta(mid) < energy {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let dlo = (profile.eval_delta(lo) - energy).abs();
    let dhi = (profile.eval_delta(hi) - energy).abs();
    Ok(if dlo <= dhi { lo } else { hi })
}

/// Real actions `S± = ∫ sqrt(K±) dx` over `[-x0, x0]`.
pub fn action_integrals(profile: &JunctionProfile, energy: f64, tol_quad: f64) -> Result<(f64, f64), GeometryError> {
    let x0 = turning_point(profile, energy)?;
    let branch = |sign: f64| {
        move |x: f64| {
            let d = profile.eval_delta(x);
            let s = (energy * energy - d * d).max(0.0).sqrt();
            (profile.eval_mu(x) + sign * s).sqrt()
        }
    };
    let scale = x0 * profile.mu0().sqrt();
    let plus = half_lead_integral(profile, x0, branch(1.0), tol_quad, scale)?;
    let minus = half_lead_integral(profile, x0, branch(-1.0), tol_quad, scale)?;
    Ok((2.0 * plus, 2.0 * minus))
}

/// `S+ - S-`, integrated directly as
/// `2 sqrt(E² - delta²) / (sqrt(K+) + sqrt(K-))`.
pub fn action_difference(profile: &JunctionProfile, energy: f64, tol_quad: f64) -> Result<f64, GeometryError> {
    let x0 = turning_point(profile, energy)?;
    let integrand = |x: f64| {
        let d = profile.eval_delta(x);
        let s = (energy * energy - d * d).max(0.0).sqrt();
        let mu = profile.eval_mu(x);
        2.0 * s / ((mu + s).sqrt() + (mu - s).sqrt())
    };
    let scale = x0 * profile.delta0() / profile.mu0().sqrt();
    Ok(2.0 * half_lead_integral(profile, x0, integrand, tol_quad, scale)?)
}

/// `∫_0^{x0} f`, splitting at `x1` and removing the square-root endpoint
/// behaviour at `x0` with `x = x0 - u²`. The absolute tolerance is
/// `tol_quad·scale`.
fn half_lead_integral<F: Fn(f64) -> f64>(
    profile: &JunctionProfile,
    x0: f64,
    f: F,
    tol_quad: f64,
    scale: f64,
) -> Result<f64, GeometryError> {
    let abs_tol = tol_quad * scale;
    let x1 = profile.x1().min(x0);
    let inner = integrate(&f, 0.0, x1, abs_tol, tol_quad)?.value;
    if x0 <= x1 {
        return Ok(inner);
    }
    let umax = (x0 - x1).sqrt();
    let outer = integrate(|u| 2.0 * u * f(x0 - u * u), 0.0, umax, abs_tol, tol_quad)?.value;
    Ok(inner + outer)
}

/// Imaginary action `∫ Im sqrt(K+) dx` from the turning point to `x_end`,
/// returned as the finite ramp part plus the constant plateau rate.
pub fn barrier_exponent(
    profile: &JunctionProfile,
    energy: f64,
    x_end: f64,
    tol_quad: f64,
) -> Result<Barrier, GeometryError> {
    let delta0 = profile.delta0();
    let x_end = x_end.max(profile.x2());
    if energy >= delta0 {
        return Ok(Barrier {
            finite: 0.0,
            tail_rate: 0.0,
            x_end,
        });
    }
    let x0 = turning_point(profile, energy)?;
    let tail_rate = im_sqrt(profile.mu0(), (delta0 * delta0 - energy * energy).sqrt());
    let x2 = profile.x2();
    let finite = if x2 > x0 {
        let f = |x: f64| {
            let d = profile.eval_delta(x);
            let w = (d * d - energy * energy).max(0.0).sqrt();
            im_sqrt(profile.eval_mu(x), w)
        };
        let umax = (x2 - x0).sqrt();
        let abs_tol = tol_quad * (x2 - profile.x1()) * delta0 / profile.mu0().sqrt();
        integrate(|u| 2.0 * u * f(x0 + u * u), 0.0, umax, abs_tol, tol_quad)?.value
    } else {
        0.0
    };
    Ok(Barrier {
        finite,
        tail_rate,
        x_end,
    })
}

/// Gap slope `alpha = delta'(x0)`, `xi0 = sqrt(mu(x0))` and the scaling
/// parameter `beta = sqrt(alpha)·(2 xi0)^(-3/2)`.
pub fn local_slope(profile: &JunctionProfile, energy: f64) -> Result<LocalSlope, GeometryError> {
    let x0 = turning_point(profile, energy)?;
    if profile.ramp_shape() == RampShape::HardWall {
        return Err(GeometryError::DegenerateSlope {
            x0,
            alpha: f64::INFINITY,
        });
    }
    let (x1, x2) = (profile.x1(), profile.x2());
    let step = (x2 - x1) * f64::EPSILON.cbrt();
    let lo = (x0 - step).max(x1);
    let hi = (x0 + step).min(x2);
    let alpha = (profile.eval_delta(hi) - profile.eval_delta(lo)) / (hi - lo);
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(GeometryError::DegenerateSlope { x0, alpha });
    }
    let xi0 = profile.eval_mu(x0).sqrt();
    let beta = alpha.sqrt() * (2.0 * xi0).powf(-1.5);
    Ok(LocalSlope { alpha, beta, xi0 })
}
