//! Resonances of the exterior-complex-scaled operator by shift-invert
//! iteration from real seeds.

use num_complex::Complex64;

use super::operator::{discretize, DiscretizedOperator, MAX_THETA};
use super::{DirectError, Resonance, ResonanceMethod};
use crate::profile::BdgCoefficients;

pub const RESIDUAL_TOL: f64 = 1e-10;
pub const GAMMA_FLOOR: f64 = 1e-12;
/// Angle increment used for the stability re-solve.
pub const STABILITY_DTHETA: f64 = 0.05;

#[derive(Clone, Copy, Debug)]
pub struct ScalingOptions {
    pub half_width: f64,
    pub n: usize,
    /// Defaults to the midpoint of the plateau start and `X`.
    pub x_scale_start: Option<f64>,
    pub max_iterations: usize,
}

impl ScalingOptions {
    pub fn new(half_width: f64, n: usize) -> Self {
        Self {
            half_width,
            n,
            x_scale_start: None,
            max_iterations: 60,
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenpair of `op` closest to `seed` in the sense of shift-invert
/// iteration: a few fixed-shift steps, then Rayleigh-quotient shifts.
/// Returns the eigenvalue and `|Mv - lambda v|` for unit `v`.
pub fn eigenvalue_near(
    op: &DiscretizedOperator,
    seed: Complex64,
    max_iterations: usize,
) -> Result<(Complex64, f64), DirectError> {
    let dim = op.dimension();
    let mut v: Vec<Complex64> = (0..dim)
        .map(|i| Complex64::new(1.0 + 0.5 * (0.7 * i as f64).sin(), 0.3 * (1.3 * i as f64).cos()))
        .collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|z| *z /= nv);
    let mut shift = seed;
    let mut lu = op.band(shift).lu();
    let mut lambda;
    let mut residual = f64::INFINITY;
    for it in 0..max_iterations {
        let mut w = v.clone();
        lu.solve(&mut w);
        // least-squares eigenvalue estimate from (M - shift) w = v
        let ww: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        let wv: Complex64 = w.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        lambda = shift + wv / ww;
        let nw = ww.sqrt();
        v = w.into_iter().map(|z| z / nw).collect();
        let mv = op.apply(&v);
        residual = mv
            .iter()
            .zip(&v)
            .map(|(m, x)| (m - x * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual <= RESIDUAL_TOL {
            return Ok((lambda, residual));
        }
        if it >= 2 && it % 2 == 0 {
            shift = lambda;
            lu = op.band(shift).lu();
        }
    }
    Err(DirectError::NotConverged {
        seed: seed.re,
        residual,
        iterations: max_iterations,
    })
}

/// One resonance per seed. `stability` is the displacement of the
/// eigenvalue when the scaling angle grows by `STABILITY_DTHETA` (or
/// shrinks, if that would leave the allowed range).
pub fn resonances_complex_scaling<P: BdgCoefficients>(
    profile: &P,
    h: f64,
    seeds: &[f64],
    theta: f64,
    opts: &ScalingOptions,
) -> Result<Vec<Resonance>, DirectError> {
    if !(0.05..=MAX_THETA).contains(&theta) {
        return Err(DirectError::ThetaOutOfRange(theta));
    }
    let op = discretize(profile, h, opts.half_width, opts.n, theta, opts.x_scale_start)?;
    let theta2 = if theta + STABILITY_DTHETA <= MAX_THETA {
        theta + STABILITY_DTHETA
    } else {
        theta - STABILITY_DTHETA
    };
    let op2 = discretize(profile, h, opts.half_width, opts.n, theta2, opts.x_scale_start)?;
    let delta0 = profile.bulk_gap();

    let mut sorted: Vec<f64> = seeds.to_vec();
    sorted.sort_by(f64::total_cmp);
    let spacing = |s: f64| {
        sorted
            .iter()
            .filter(|&&t| t != s)
            .map(|t| (t - s).abs())
            .fold(delta0, f64::min)
    };

    let mut out = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let (lambda, residual) = eigenvalue_near(&op, Complex64::new(seed, 0.0), opts.max_iterations)?;
        let (lambda2, _) = eigenvalue_near(&op2, lambda, opts.max_iterations)?;
        let gamma = -2.0 * lambda.im;
        if gamma < -GAMMA_FLOOR {
            return Err(DirectError::NegativeWidth { energy: lambda });
        }
        out.push(Resonance {
            seed,
            energy_complex: lambda,
            gamma,
            method: ResonanceMethod::ComplexScaling,
            theta_used: Some(theta),
            stability: (lambda2 - lambda).norm(),
            residual,
            escaped: (lambda.re - seed).abs() > spacing(seed),
        });
    }
    Ok(out)
}
