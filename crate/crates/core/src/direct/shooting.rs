//! Shooting with decaying plateau modes and a 4×4 matching determinant.
//!
//! On each plateau the constant-coefficient solutions are
//! `(a, b) e^{i k x / h}` with `k² = mu0 ± i w`, `w = sqrt(delta0² - E²)`.
//! The two modes decaying away from the junction are integrated inward to
//! `x = 0`, and `E` is tuned until the four solutions become dependent.

use num_complex::Complex64;

use super::ode::{integrate, OdeTolerances};
use super::{DirectError, Resonance, ResonanceMethod};
use crate::profile::BdgCoefficients;

pub type Column = [Complex64; 4];

#[derive(Clone, Copy, Debug)]
pub struct ShootingOptions {
    /// Start points are `±(plateau_start + margin)`.
    pub margin: f64,
    pub ode: OdeTolerances,
    pub max_newton: usize,
    /// Convergence when `|det| <= det_tol · prod |column|`.
    pub det_tol: f64,
    /// Finite-difference step for `d det / dE`, relative to `delta0`.
    pub fd_step: f64,
    /// Largest Newton step, relative to `delta0`.
    pub max_step: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            margin: 0.5,
            ode: OdeTolerances::default(),
            max_newton: 60,
            det_tol: 1e-10,
            fd_step: 1e-6,
            max_step: 0.02,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MatchingDeterminant {
    /// Right-side solutions then left-side solutions, evaluated at `x = 0`.
    pub columns: [Column; 4],
    pub det: Complex64,
}

impl MatchingDeterminant {
    pub fn from_columns(columns: [Column; 4]) -> Self {
        Self {
            det: det4(&columns),
            columns,
        }
    }

    /// Product of column norms.
    pub fn scale(&self) -> f64 {
        self.columns
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .product()
    }

    /// Determinant divided by the column norms; invariant under rescaling
    /// any basis solution by a constant of unit modulus and bounded by one.
    pub fn normalized(&self) -> Complex64 {
        self.det / self.scale()
    }
}

/// Determinant of the 4×4 matrix with the given columns (Gaussian
/// elimination with partial pivoting).
pub fn det4(columns: &[Column; 4]) -> Complex64 {
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (j, col) in columns.iter().enumerate() {
        for i in 0..4 {
            m[i][j] = col[i];
        }
    }
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..4 {
        let p = (k..4)
            .max_by(|&a, &b| m[a][k].norm().total_cmp(&m[b][k].norm()))
            .unwrap();
        if m[p][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..4 {
            let f = m[i][k] / m[k][k];
            for j in k..4 {
                let t = m[k][j];
                m[i][j] -= f * t;
            }
        }
    }
    det
}

/// Plateau wavenumbers `k` of the two modes decaying towards `side·∞`.
pub fn decaying_wavenumbers(delta0: f64, mu0: f64, energy: Complex64, side: f64) -> [Complex64; 2] {
    let w = (Complex64::new(delta0 * delta0, 0.0) - energy * energy).sqrt();
    let i = Complex64::i();
    let k_a = (mu0 + i * w).sqrt();
    let k_b = -(mu0 - i * w).sqrt();
    [k_a * side, k_b * side]
}

fn plateau_mode(delta0: f64, mu0: f64, phase: f64, h: f64, energy: Complex64, k: Complex64) -> Column {
    let a = Complex64::from_polar(delta0, 0.5 * phase);
    let b = mu0 + energy - k * k;
    let ik = Complex64::i() * k / h;
    [a, ik * a, b, ik * b]
}

fn rhs<P: BdgCoefficients>(profile: &P, h: f64, energy: Complex64, side: f64, x: f64, y: &Column) -> Column {
    // stay on one bank at x = 0 where the phase jumps
    let xe = if side > 0.0 {
        x.max(f64::MIN_POSITIVE)
    } else {
        x.min(-f64::MIN_POSITIVE)
    };
    let mu = profile.chemical_potential(xe);
    let pair = Complex64::from_polar(profile.gap(xe), 0.5 * profile.phase(xe));
    let inv = 1.0 / (h * h);
    [
        y[1],
        ((-mu - energy) * y[0] + pair * y[2]) * inv,
        y[3],
        ((energy - mu) * y[2] - pair.conj() * y[0]) * inv,
    ]
}

/// Matching determinant at complex energy `E`.
pub fn matching_determinant<P: BdgCoefficients>(
    profile: &P,
    h: f64,
    energy: Complex64,
    opts: &ShootingOptions,
) -> Result<MatchingDeterminant, DirectError> {
    let delta0 = profile.bulk_gap();
    let mu0 = profile.bulk_chemical_potential();
    let xm = profile.plateau_start() + opts.margin;
    let mut columns = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (s, side) in [1.0f64, -1.0].into_iter().enumerate() {
        let phase = profile.phase(side * xm);
        for (m, k) in decaying_wavenumbers(delta0, mu0, energy, side).into_iter().enumerate() {
            let y0 = plateau_mode(delta0, mu0, phase, h, energy, k);
            let (y, _) = integrate(|x, y| rhs(profile, h, energy, side, x, y), side * xm, y0, 0.0, opts.ode)?;
            columns[2 * s + m] = y;
        }
    }
    Ok(MatchingDeterminant::from_columns(columns))
}

/// Newton iteration on the matching determinant from a complex seed.
pub fn shooting_resonance<P: BdgCoefficients>(
    profile: &P,
    h: f64,
    seed: Complex64,
    opts: &ShootingOptions,
) -> Result<Resonance, DirectError> {
    let delta0 = profile.bulk_gap();
    if !(seed.re.abs() < delta0) {
        return Err(DirectError::SeedOutsideGap(seed.re));
    }
    let step = Complex64::new(opts.fd_step * delta0, 0.0);
    let mut e = seed;
    let mut md = matching_determinant(profile, h, e, opts)?;
    for _ in 0..opts.max_newton {
        let residual = md.det.norm() / md.scale();
        if residual <= opts.det_tol {
            let gamma = -2.0 * e.im;
            return Ok(Resonance {
                seed: seed.re,
                energy_complex: e,
                gamma,
                method: ResonanceMethod::Shooting,
                theta_used: None,
                stability: residual,
                residual,
                escaped: false,
            });
        }
        let dp = matching_determinant(profile, h, e + step, opts)?.det;
        let dm = matching_determinant(profile, h, e - step, opts)?.det;
        let slope = (dp - dm) / (step * 2.0);
        if slope.norm() == 0.0 || !slope.is_finite() {
            return Err(DirectError::NewtonDiverged { seed: seed.re, last: e });
        }
        let mut dx = -md.det / slope;
        if dx.norm() > opts.max_step * delta0 {
            dx *= opts.max_step * delta0 / dx.norm();
        }
        let next = e + dx;
        if !next.is_finite() || (next - seed).norm() > 0.5 * delta0 || next.re.abs() >= delta0 {
            return Err(DirectError::NewtonDiverged {
                seed: seed.re,
                last: next,
            });
        }
        let moved = (next - e).norm();
        e = next;
        md = matching_determinant(profile, h, e, opts)?;
        if moved < 4.0 * f64::EPSILON * delta0 && md.det.norm() / md.scale() > opts.det_tol {
            return Err(DirectError::NotConverged {
                seed: seed.re,
                residual: md.det.norm() / md.scale(),
                iterations: opts.max_newton,
            });
        }
    }
    Err(DirectError::NotConverged {
        seed: seed.re,
        residual: md.det.norm() / md.scale(),
        iterations: opts.max_newton,
    })
}
