//! Dormand-Prince 5(4) integrator for complex first-order systems.

use num_complex::Complex64;

use super::DirectError;

#[derive(Clone, Copy, Debug)]
pub struct OdeTolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeTolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth minus fourth order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction).
pub fn integrate<const D: usize, F>(
    f: F,
    x0: f64,
    y0: [Complex64; D],
    x1: f64,
    tol: OdeTolerances,
) -> Result<([Complex64; D], OdeStats), DirectError>
where
    F: Fn(f64, &[Complex64; D]) -> [Complex64; D],
{
    let span = x1 - x0;
    let mut stats = OdeStats {
        accepted: 0,
        rejected: 0,
    };
    if span == 0.0 {
        return Ok((y0, stats));
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut k = [[Complex64::new(0.0, 0.0); D]; 7];
    k[0] = f(x, &y);
    let mut step = initial_step(&y, &k[0], span.abs(), tol);
    let min_step = 1e-14 * span.abs().max(x0.abs()).max(x1.abs());

    while (x1 - x) * dir > 0.0 {
        if stats.accepted + stats.rejected >= tol.max_steps {
            return Err(DirectError::StepUnderflow { x });
        }
        let last = step >= (x1 - x).abs();
        let hs = if last { x1 - x } else { dir * step };
        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..s {
                    acc += k[r][i] * A[s][r];
                }
                *yi += acc * hs;
            }
            k[s] = f(x + C[s] * hs, &ys);
        }
        let mut y_new = y;
        let mut err = 0.0;
        for i in 0..D {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut e = Complex64::new(0.0, 0.0);
            for r in 0..6 {
                acc += k[r][i] * A[6][r];
            }
            for r in 0..7 {
                e += k[r][i] * E[r];
            }
            y_new[i] += acc * hs;
            let sc = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
            err += (e * hs).norm_sqr() / (sc * sc);
        }
        let err = (err / D as f64).sqrt();
        if !err.is_finite() {
            return Err(DirectError::StepUnderflow { x });
        }
        if err <= 1.0 {
            x = if last { x1 } else { x + hs };
            y = y_new;
            k[0] = k[6];
            stats.accepted += 1;
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            step = hs.abs() * grow;
        } else {
            stats.rejected += 1;
            step = hs.abs() * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if step < min_step {
                return Err(DirectError::StepUnderflow { x });
            }
        }
    }
    Ok((y, stats))
}

fn initial_step<const D: usize>(y: &[Complex64; D], dy: &[Complex64; D], span: f64, tol: OdeTolerances) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..D {
        let sc = tol.atol + tol.rtol * y[i].norm();
        d0 += (y[i].norm() / sc).powi(2);
        d1 += (dy[i].norm() / sc).powi(2);
    }
    let (d0, d1) = ((d0 / D as f64).sqrt(), (d1 / D as f64).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_exponential() {
        let lambda = c(-0.3, 2.0);
        let (y, stats) = integrate(
            |_, y: &[Complex64; 1]| [lambda * y[0]],
            0.0,
            [c(1.0, 0.0)],
            3.0,
            OdeTolerances::default(),
        )
        .unwrap();
        let exact = (lambda * 3.0).exp();
        assert!((y[0] - exact).norm() < 1e-10);
        assert!(stats.accepted > 10);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let w = 7.0;
        let f = |_: f64, y: &[Complex64; 2]| [y[1], -y[0] * (w * w)];
        let (y, _) = integrate(f, 2.0, [c(1.0, 0.0), c(0.0, 0.0)], 0.0, OdeTolerances::default()).unwrap();
        // y(x) = cos(w (x - 2))
        assert!((y[0] - c((w * 2.0).cos(), 0.0)).norm() < 1e-10);
        assert!((y[1] - c(w * (w * 2.0).sin(), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn tolerance_controls_error() {
        let f = |x: f64, y: &[Complex64; 1]| [y[0] * x.cos()];
        let exact = c((2.0f64).sin().exp(), 0.0);
        let loose = OdeTolerances {
            rtol: 1e-6,
            atol: 1e-9,
            ..Default::default()
        };
        let (a, sa) = integrate(f, 0.0, [c(1.0, 0.0)], 2.0, loose).unwrap();
        let (b, sb) = integrate(f, 0.0, [c(1.0, 0.0)], 2.0, OdeTolerances::default()).unwrap();
        assert!((b[0] - exact).norm() < (a[0] - exact).norm().max(1e-12));
        assert!(sb.accepted > sa.accepted);
    }

    #[test]
    fn step_budget_is_enforced() {
        let tight = OdeTolerances {
            max_steps: 5,
            ..Default::default()
        };
        let r = integrate(
            |_, y: &[Complex64; 1]| [y[0] * c(0.0, 50.0)],
            0.0,
            [c(1.0, 0.0)],
            10.0,
            tight,
        );
        assert!(matches!(r, Err(DirectError::StepUnderflow { .. })));
    }
}
