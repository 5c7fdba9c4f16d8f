//! Banded LU with partial pivoting (LAPACK `gbtf2` layout).

/// Square band matrix with `kl` sub- and `ku` super-diagonals. Storage
/// reserves `kl` extra super-diagonals for pivoting fill-in.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    ab: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ld = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, ld, ab: vec![0.0; ld * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.n && c < self.n);
        debug_assert!(c <= r + self.ku && r <= c + self.kl, "({r},{c}) outside band");
        (self.kl + self.ku + r - c) + c * self.ld
    }

    pub fn in_band(&self, r: usize, c: usize) -> bool {
        r < self.n && c < self.n && c <= r + self.ku && r <= c + self.kl
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        if self.in_band(r, c) {
            self.ab[self.idx(r, c)]
        } else {
            0.0
        }
    }

    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        let i = self.idx(r, c);
        self.ab[i] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (c, &xc) in x.iter().enumerate() {
            let lo = c.saturating_sub(self.ku);
            let hi = (c + self.kl).min(self.n - 1);
            for (r, yr) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yr += self.ab[self.idx(r, c)] * xc;
            }
        }
        y
    }

    /// In-place factorization. Fails on an exactly zero or non-finite pivot.
    pub fn factor(mut self) -> Result<BandLu, usize> {
        let (n, kl, ld) = (self.n, self.kl, self.ld);
        let kv = self.kl + self.ku;
        let mut ipiv = vec![0usize; n];
        let mut swaps = 0usize;
        let mut ju = 0usize;
        let ab = &mut self.ab;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ld;
            let mut jp = 0;
            let mut best = ab[col + kv].abs();
            for i in 1..=km {
                let v = ab[col + kv + i].abs();
                if v > best {
                    best = v;
                    jp = i;
                }
            }
            ipiv[j] = j + jp;
            if best == 0.0 || !best.is_finite() {
                return Err(j);
            }
            ju = ju.max((j + self.ku + jp).min(n - 1));
            if jp != 0 {
                swaps += 1;
                for c in j..=ju {
                    let base = c * ld + kv;
                    ab.swap(base + j - c, base + j + jp - c);
                }
            }
            let piv = ab[col + kv];
            for i in 1..=km {
                ab[col + kv + i] /= piv;
            }
            for c in j + 1..=ju {
                let base = c * ld + kv;
                let t = ab[base + j - c];
                if t != 0.0 {
                    for i in 1..=km {
                        ab[base + j + i - c] -= ab[col + kv + i] * t;
                    }
                }
            }
        }
        Ok(BandLu { m: self, ipiv, swaps })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    ipiv: Vec<usize>,
    swaps: usize,
}

impl BandLu {
    pub fn solve(&self, b: &mut [f64]) {
        let (n, kl, ld) = (self.m.n, self.m.kl, self.m.ld);
        let kv = self.m.kl + self.m.ku;
        let ab = &self.m.ab;
        for j in 0..n {
            let l = self.ipiv[j];
            if l != j {
                b.swap(l, j);
            }
            let km = kl.min(n - 1 - j);
            let bj = b[j];
            if bj != 0.0 {
                for i in 1..=km {
                    b[j + i] -= ab[j * ld + kv + i] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= ab[j * ld + kv];
            let bj = b[j];
            let lo = j.saturating_sub(kv);
            for r in lo..j {
                b[r] -= ab[j * ld + kv + r - j] * bj;
            }
        }
    }

    /// Sign of the determinant, and `log|det|`.
    pub fn det_sign_log(&self) -> (f64, f64) {
        let kv = self.m.kl + self.m.ku;
        let mut sign = if self.swaps % 2 == 0 { 1.0 } else { -1.0 };
        let mut log = 0.0;
        for j in 0..self.m.n {
            let d = self.m.ab[j * self.m.ld + kv];
            if d < 0.0 {
                sign = -sign;
            }
            log += d.abs().ln();
        }
        (sign, log)
    }

    /// Smallest `|U_jj| / max |U_jj|`, a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        let kv = self.m.kl + self.m.ku;
        let d: Vec<f64> = (0..self.m.n).map(|j| self.m.ab[j * self.m.ld + kv].abs()).collect();
        let max = d.iter().cloned().fold(0.0, f64::max);
        d.iter().cloned().fold(f64::INFINITY, f64::min) / max
    }
}
