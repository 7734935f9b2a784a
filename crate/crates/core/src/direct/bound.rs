//! Hermitian bound states by inertia bisection and inverse iteration.

use num_complex::Complex64;

use super::banded::block_inertia;
use super::operator::DiscretizedOperator;
use super::DirectError;
use crate::semiclassical::{Level, Method, SpectrumResult};

pub const RESIDUAL_TOL: f64 = 1e-10;
/// Boundary amplitude above which a state is considered box-limited.
pub const DECAY_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct BoundStates {
    pub spectrum: SpectrumResult,
    /// `max(|psi(-X+dx)|, |psi(X-dx)|) / max|psi|` per level.
    pub boundary_ratio: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl BoundStates {
    /// Levels whose eigenvectors have decayed by `DECAY_TOL` at the box ends.
    pub fn decayed(&self) -> Vec<Level> {
        self.spectrum
            .levels
            .iter()
            .zip(&self.boundary_ratio)
            .filter(|(_, &r)| r < DECAY_TOL)
            .map(|(l, _)| *l)
            .collect()
    }

    pub fn all_decayed(&self) -> bool {
        self.boundary_ratio.iter().all(|&r| r < DECAY_TOL)
    }
}

/// Number of eigenvalues below `sigma`, nudging the shift off exact
/// eigenvalues.
pub fn eigen_count(op: &DiscretizedOperator, sigma: f64) -> Result<usize, DirectError> {
    let upper = op.upper_blocks();
    let mut s = sigma;
    for _ in 0..16 {
        if let Some(c) = block_inertia(op.diagonal_blocks(), &upper, s) {
            return Ok(c);
        }
        s += 1e-12 * op.delta0;
    }
    Err(DirectError::FactorizationBreakdown(sigma))
}

/// All eigenvalues of a Hermitian operator inside the open window.
pub fn bound_states(op: &DiscretizedOperator, window: (f64, f64)) -> Result<BoundStates, DirectError> {
    if op.theta != 0.0 || !op.is_hermitian() {
        return Err(DirectError::NotHermitian(op.hermitian_defect()));
    }
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(DirectError::InvalidGrid(format!("empty window [{lo}, {hi}]")));
    }
    let upper = op.upper_blocks();
    let n_lo = eigen_count(op, lo)?;
    let n_hi = eigen_count(op, hi)?;

    let mut energies = Vec::with_capacity(n_hi.saturating_sub(n_lo));
    let mut a_prev = lo;
    for m in n_lo..n_hi {
        let (mut a, mut b) = (a_prev, hi);
        loop {
            let mid = 0.5 * (a + b);
            if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(op.delta0) || mid <= a || mid >= b {
                break;
            }
            let c = match block_inertia(op.diagonal_blocks(), &upper, mid) {
                Some(c) => c,
                None => eigen_count(op, mid)?,
            };
            if c > m {
                b = mid;
            } else {
                a = mid;
            }
        }
        a_prev = a;
        energies.push(0.5 * (a + b));
    }

    let mut levels = Vec::with_capacity(energies.len());
    let mut ratios = Vec::with_capacity(energies.len());
    let mut vectors = Vec::with_capacity(energies.len());
    let (mut n_pos, mut n_neg) = (0i64, 0i64);
    let negatives = energies.iter().filter(|&&e| e < 0.0).count() as i64;
    for &e in &energies {
        let (vec, rq, residual) = refine(op, e)?;
        let energy = if (rq - e).abs() <= 1e-8 * op.delta0 { rq } else { e };
        let k = if energy < 0.0 {
            n_neg += 1;
            -(negatives - n_neg + 1)
        } else {
            n_pos += 1;
            n_pos
        };
        let peak = vec.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let dim = vec.len();
        let ends = vec[0]
            .norm()
            .max(vec[1].norm())
            .max(vec[dim - 2].norm())
            .max(vec[dim - 1].norm());
        ratios.push(ends / peak);
        levels.push(Level {
            k,
            energy,
            branch: 0,
            residual,
        });
        vectors.push(vec);
    }
    Ok(BoundStates {
        spectrum: SpectrumResult {
            levels,
            method: Method::Direct,
            h: op.h,
            phi: op.phi,
        },
        boundary_ratio: ratios,
        vectors,
    })
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
}

fn rayleigh(op: &DiscretizedOperator, v: &[Complex64]) -> (f64, f64) {
    let mv = op.apply(v);
    let rq: Complex64 = v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum();
    let rq = rq.re;
    let res = mv
        .iter()
        .zip(v)
        .map(|(m, x)| (m - x * rq).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (rq, res)
}

/// Inverse iteration at the bisected eigenvalue, then Rayleigh quotient
/// iteration if the residual is still above tolerance.
fn refine(op: &DiscretizedOperator, e: f64) -> Result<(Vec<Complex64>, f64, f64), DirectError> {
    let dim = op.dimension();
    let mut v: Vec<Complex64> = (0..dim)
        .map(|i| Complex64::new(1.0 + 0.5 * (0.7 * i as f64).sin(), 0.0))
        .collect();
    normalize(&mut v);
    let lu = op.band(Complex64::new(e, 0.0)).lu();
    for _ in 0..3 {
        lu.solve(&mut v);
        normalize(&mut v);
    }
    let (mut rq, mut res) = rayleigh(op, &v);
    let mut shift = rq;
    for _ in 0..4 {
        if res <= RESIDUAL_TOL {
            break;
        }
        op.band(Complex64::new(shift, 0.0)).lu().solve(&mut v);
        normalize(&mut v);
        (rq, res) = rayleigh(op, &v);
        if (rq - e).abs() > 1e-6 * op.delta0 {
            // drifted to a neighbour; keep the bisection value
            break;
        }
        shift = rq;
    }
    Ok((v, rq, res))
}
