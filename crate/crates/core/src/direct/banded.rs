//! Complex band storage, band LU with partial pivoting, and inertia counts
//! for Hermitian 2×2-block tridiagonal matrices.

use num_complex::Complex64;

/// Square band matrix in LAPACK general-band layout with `kl` extra rows
/// reserved for LU fill-in: element `(i, j)` lives at
/// `data[(kl + ku + i - j) + j * ld]`, `ld = 2 kl + ku + 1`.
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ld = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ld,
            data: vec![Complex64::new(0.0, 0.0); ld * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i + self.ku >= j && j + self.kl >= i
    }

    fn index(&self, i: usize, j: usize) -> usize {
        self.kl + self.ku + i - j + j * self.ld
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if self.in_band(i, j) {
            self.data[self.index(i, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Panics outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.index(i, j);
        self.data[k] = value;
    }

    pub fn add_diagonal(&mut self, shift: Complex64) {
        for i in 0..self.n {
            let k = self.index(i, i);
            self.data[k] += shift;
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl + 1).min(self.n);
            for (i, yi) in y.iter_mut().enumerate().take(hi).skip(lo) {
                *yi += self.data[self.index(i, j)] * x[j];
            }
        }
        y
    }

    /// LU factorization with partial pivoting. Exactly zero pivots are
    /// replaced by `eps·max|a_ij|` and counted in `BandLu::perturbed`.
    pub fn lu(mut self) -> BandLu {
        let n = self.n;
        let (kl, ku, ld) = (self.kl, self.ku, self.ld);
        let kv = kl + ku;
        let scale = self
            .data
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let at = |i: usize, j: usize| kv + i - j + j * ld;
        let mut pivots = vec![0usize; n];
        let mut perturbed = 0;
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0;
            let mut best = -1.0;
            for p in 0..=km {
                let v = self.data[at(j + p, j)].norm();
                if v > best {
                    best = v;
                    jp = p;
                }
            }
            pivots[j] = j + jp;
            if best == 0.0 {
                self.data[at(j, j)] = Complex64::new(f64::EPSILON * scale, 0.0);
                perturbed += 1;
                jp = 0;
                pivots[j] = j;
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    self.data.swap(at(j, c), at(j + jp, c));
                }
            }
            if km > 0 {
                let inv = 1.0 / self.data[at(j, j)];
                for p in 1..=km {
                    self.data[at(j + p, j)] *= inv;
                }
                for c in j + 1..=ju {
                    let u = self.data[at(j, c)];
                    if u != Complex64::new(0.0, 0.0) {
                        for p in 1..=km {
                            let l = self.data[at(j + p, j)];
                            self.data[at(j + p, c)] -= l * u;
                        }
                    }
                }
            }
        }
        BandLu {
            band: self,
            pivots,
            perturbed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BandLu {
    band: BandMatrix,
    pivots: Vec<usize>,
    pub perturbed: usize,
}

impl BandLu {
    pub fn solve(&self, b: &mut [Complex64]) {
        let m = &self.band;
        let n = m.n;
        let kv = m.kl + m.ku;
        let at = |i: usize, j: usize| kv + i - j + j * m.ld;
        for j in 0..n {
            let l = self.pivots[j];
            if l != j {
                b.swap(l, j);
            }
            let km = m.kl.min(n - 1 - j);
            let bj = b[j];
            for p in 1..=km {
                b[j + p] -= m.data[at(j + p, j)] * bj;
            }
        }
        for j in (0..n).rev() {
            b[j] /= m.data[at(j, j)];
            let bj = b[j];
            for i in j.saturating_sub(kv)..j {
                b[i] -= m.data[at(i, j)] * bj;
            }
        }
    }
}

type Block = [[Complex64; 2]; 2];

/// Number of eigenvalues below `sigma` of the Hermitian block tridiagonal
/// matrix with diagonal blocks `diag` and upper blocks `upper[j]` coupling
/// block `j` to `j + 1`, by Sylvester's law on the block LDL^H pivots.
///
/// Returns `None` if a pivot block is singular.
pub fn block_inertia(diag: &[Block], upper: &[Block], sigma: f64) -> Option<usize> {
    let mut count = 0;
    let mut s = shifted(&diag[0], sigma);
    for j in 0..diag.len() {
        if j > 0 {
            let b = &upper[j - 1];
            let inv = inverse_hermitian(&s)?;
            // S_j = A_j - sigma - B^H S^{-1} B
            let t = mul(&inv, b);
            let c = mul(&adjoint(b), &t);
            let a = shifted(&diag[j], sigma);
            s = [
                [a[0][0] - c[0][0], a[0][1] - c[0][1]],
                [a[1][0] - c[1][0], a[1][1] - c[1][1]],
            ];
        }
        // keep the pivot exactly Hermitian
        let p = s[0][0].re;
        let q = s[1][1].re;
        let off = 0.5 * (s[0][1] + s[1][0].conj());
        s = [[Complex64::new(p, 0.0), off], [off.conj(), Complex64::new(q, 0.0)]];
        let det = p * q - off.norm_sqr();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        count += if det < 0.0 {
            1
        } else if p + q < 0.0 {
            2
        } else {
            0
        };
    }
    Some(count)
}

fn shifted(a: &Block, sigma: f64) -> Block {
    [[a[0][0] - sigma, a[0][1]], [a[1][0], a[1][1] - sigma]]
}

fn inverse_hermitian(s: &Block) -> Option<Block> {
    let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    if det.norm() == 0.0 {
        return None;
    }
    let r = 1.0 / det;
    Some([[s[1][1] * r, -s[0][1] * r], [-s[1][0] * r, s[0][0] * r]])
}

fn mul(a: &Block, b: &Block) -> Block {
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn adjoint(a: &Block) -> Block {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}
