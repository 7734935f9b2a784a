//! Finite-difference Bogoliubov-de Gennes matrix on a uniform grid, with
//! optional sharp exterior complex scaling.
//!
//! Unknowns are interleaved as `(u_1, v_1, u_2, v_2, ...)` so the matrix has
//! two sub- and two super-diagonals. Rows of block `j` read
//!
//! ```text
//! -h² u''_j - mu_j u_j + delta_j e^{+i phi_j/2} v_j
//!  h² v''_j + mu_j v_j + delta_j e^{-i phi_j/2} u_j
//! ```
//!
//! with `u''` the three-point second derivative in the (possibly complex)
//! coordinate `z(x)`.

use num_complex::Complex64;

use super::banded::BandMatrix;
use super::DirectError;
use crate::profile::BdgCoefficients;

pub type Block = [[Complex64; 2]; 2];

pub const MIN_POINTS: usize = 500;
pub const MAX_THETA: f64 = 0.3;

#[derive(Clone, Debug)]
pub struct DiscretizedOperator {
    pub h: f64,
    pub half_width: f64,
    pub n: usize,
    pub dx: f64,
    pub theta: f64,
    pub x_scale_start: f64,
    pub delta0: f64,
    pub phi: f64,
    diag: Vec<Block>,
    /// `upper[j]` couples row block `j` to column block `j + 1`.
    upper: Vec<[Complex64; 2]>,
    /// `lower[j]` couples row block `j + 1` to column block `j`.
    lower: Vec<[Complex64; 2]>,
}

/// Complex length of the grid segment `[x, x + dx]` under the sharp
/// exterior scaling `|x| > xs`.
fn segment(x: f64, dx: f64, xs: f64, rot: Complex64) -> Complex64 {
    let end = x + dx;
    if x >= -xs && end <= xs {
        Complex64::new(dx, 0.0)
    } else if x >= xs || end <= -xs {
        rot * dx
    } else {
        let inside = (end.min(xs) - x.max(-xs)).clamp(0.0, dx);
        Complex64::new(inside, 0.0) + rot * (dx - inside)
    }
}

/// Discretizes the operator on `N` interior points of `[-X, X]` with
/// Dirichlet ends. `x_scale_start` defaults to the midpoint between the
/// plateau start and `X`; it is ignored when `theta = 0`.
pub fn discretize<P: BdgCoefficients>(
    profile: &P,
    h: f64,
    half_width: f64,
    n: usize,
    theta: f64,
    x_scale_start: Option<f64>,
) -> Result<DiscretizedOperator, DirectError> {
    let x2 = profile.plateau_start();
    if !(h > 0.0 && h.is_finite()) {
        return Err(DirectError::InvalidGrid(format!("h must be positive, got {h}")));
    }
    if n < MIN_POINTS {
        return Err(DirectError::InvalidGrid(format!("need N >= {MIN_POINTS}, got {n}")));
    }
    if !(half_width > x2) {
        return Err(DirectError::InvalidGrid(format!(
            "box half-width X = {half_width} must exceed the plateau start {x2}"
        )));
    }
    if !(0.0..=MAX_THETA).contains(&theta) {
        return Err(DirectError::ThetaOutOfRange(theta));
    }
    let xs = x_scale_start.unwrap_or(0.5 * (x2 + half_width));
    if theta > 0.0 && !(xs >= x2 && xs < half_width) {
        return Err(DirectError::InvalidGrid(format!(
            "scaling start {xs} must lie in [{x2}, {half_width})"
        )));
    }

    let dx = 2.0 * half_width / (n as f64 + 1.0);
    let rot = Complex64::from_polar(1.0, theta);
    let xs_eff = if theta > 0.0 { xs } else { f64::INFINITY };
    let steps: Vec<Complex64> = (0..=n)
        .map(|j| segment(-half_width + j as f64 * dx, dx, xs_eff, rot))
        .collect();
    let h2 = h * h;
    let mut diag = Vec::with_capacity(n);
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for j in 1..=n {
        let dm = steps[j - 1];
        let dp = steps[j];
        let cp = 2.0 / (dp * (dm + dp));
        let cm = 2.0 / (dm * (dm + dp));
        let c0 = -2.0 / (dm * dp);
        let x = -half_width + j as f64 * dx;
        let mu = profile.chemical_potential(x);
        let pair = Complex64::from_polar(profile.gap(x), 0.5 * profile.phase(x));
        diag.push([[-h2 * c0 - mu, pair], [pair.conj(), h2 * c0 + mu]]);
        plus.push(cp);
        minus.push(cm);
    }
    let upper = (0..n - 1).map(|j| [-h2 * plus[j], h2 * plus[j]]).collect();
    let lower = (0..n - 1).map(|j| [-h2 * minus[j + 1], h2 * minus[j + 1]]).collect();
    Ok(DiscretizedOperator {
        h,
        half_width,
        n,
        dx,
        theta,
        x_scale_start: xs,
        delta0: profile.bulk_gap(),
        phi: profile.bulk_phase(),
        diag,
        upper,
        lower,
    })
}

impl DiscretizedOperator {
    pub fn dimension(&self) -> usize {
        2 * self.n
    }

    /// Grid coordinate of block `j` (0-based).
    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + (j + 1) as f64 * self.dx
    }

    pub fn diagonal_block(&self, j: usize) -> Block {
        self.diag[j]
    }

    pub fn diagonal_blocks(&self) -> &[Block] {
        &self.diag
    }

    /// Upper coupling blocks as full 2×2 matrices.
    pub fn upper_blocks(&self) -> Vec<Block> {
        let zero = Complex64::new(0.0, 0.0);
        self.upper.iter().map(|d| [[d[0], zero], [zero, d[1]]]).collect()
    }

    /// Entry of the `2N × 2N` matrix.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        let (bi, ci) = (row / 2, row % 2);
        let (bj, cj) = (col / 2, col % 2);
        let zero = Complex64::new(0.0, 0.0);
        if bi == bj {
            self.diag[bi][ci][cj]
        } else if ci != cj {
            zero
        } else if bj == bi + 1 {
            self.upper[bi][ci]
        } else if bi == bj + 1 {
            self.lower[bj][ci]
        } else {
            zero
        }
    }

    /// `M - shift` in band storage.
    pub fn band(&self, shift: Complex64) -> BandMatrix {
        let dim = self.dimension();
        let mut m = BandMatrix::zeros(dim, 2, 2);
        for row in 0..dim {
            for col in row.saturating_sub(2)..(row + 3).min(dim) {
                let v = self.entry(row, col);
                if v != Complex64::new(0.0, 0.0) {
                    m.set(row, col, v);
                }
            }
        }
        m.add_diagonal(-shift);
        m
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
        for j in 0..n {
            let a = &self.diag[j];
            let (u, w) = (v[2 * j], v[2 * j + 1]);
            out[2 * j] += a[0][0] * u + a[0][1] * w;
            out[2 * j + 1] += a[1][0] * u + a[1][1] * w;
            if j + 1 < n {
                out[2 * j] += self.upper[j][0] * v[2 * j + 2];
                out[2 * j + 1] += self.upper[j][1] * v[2 * j + 3];
                out[2 * j + 2] += self.lower[j][0] * u;
                out[2 * j + 3] += self.lower[j][1] * w;
            }
        }
        out
    }

    /// `max |M - M^H|` over the band.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.n {
            let a = &self.diag[j];
            worst = worst
                .max((a[0][1] - a[1][0].conj()).norm())
                .max(a[0][0].im.abs())
                .max(a[1][1].im.abs());
        }
        for (u, l) in self.upper.iter().zip(&self.lower) {
            worst = worst.max((u[0] - l[0].conj()).norm()).max((u[1] - l[1].conj()).norm());
        }
        worst
    }

    /// Largest absolute entry, a cheap norm scale.
    pub fn max_entry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for a in &self.diag {
            for r in a {
                for z in r {
                    m = m.max(z.norm());
                }
            }
        }
        for u in self.upper.iter().chain(&self.lower) {
            m = m.max(u[0].norm()).max(u[1].norm());
        }
        m
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= 4.0 * f64::EPSILON * self.max_entry()
    }
}
