//! Banded matrices with LU factorization (partial pivoting).
//!
//! The discrete radial operators are narrow-band: half-bandwidth 3 for the
//! 7-point difference stencils, roughly double after composing the Laplacian
//! with itself. LAPACK-style band storage keeps the preconditioner solves at
//! O(n b^2) so they can sit inside the ascent loop.

use crate::error::{Error, Result};

/// Row-major band storage: entry (i, j) lives at `data[i][j - i + kl_ku]`
/// whenever |i - j| is within the band.
#[derive(Debug, Clone)]
pub struct Banded {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    data: Vec<f64>,
    width: usize,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = kl + ku + 1;
        Banded {
            n,
            kl,
            ku,
            data: vec![0.0; n * width],
            width,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = (i as isize, j as isize);
        let off = j - i + self.kl as isize;
        if off < 0 || off >= self.width as isize || j < 0 || j >= self.n as isize {
            0.0
        } else {
            self.data[i as usize * self.width + off as usize]
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let off = j as isize - i as isize + self.kl as isize;
        assert!(
            off >= 0 && (off as usize) < self.width,
            "entry ({i},{j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        self.data[i * self.width + off as usize] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let off = j as isize - i as isize + self.kl as isize;
        assert!(off >= 0 && (off as usize) < self.width);
        self.data[i * self.width + off as usize] += v;
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.kl);
            let j1 = (i + self.ku).min(self.n - 1);
            let mut acc = 0.0;
            for j in j0..=j1 {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// C = A B (bands add).
    pub fn matmul(&self, other: &Banded) -> Banded {
        assert_eq!(self.n, other.n);
        let kl = (self.kl + other.kl).min(self.n - 1);
        let ku = (self.ku + other.ku).min(self.n - 1);
        let mut c = Banded::zeros(self.n, kl, ku);
        for i in 0..self.n {
            let k0 = i.saturating_sub(self.kl);
            let k1 = (i + self.ku).min(self.n - 1);
            for k in k0..=k1 {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                let j0 = k.saturating_sub(other.kl);
                let j1 = (k + other.ku).min(self.n - 1);
                for j in j0..=j1 {
                    let b = other.get(k, j);
                    if b != 0.0 {
                        c.add(i, j, aik * b);
                    }
                }
            }
        }
        c
    }

    pub fn add_identity(&mut self, scale: f64) {
        for i in 0..self.n {
            self.add(i, i, scale);
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    /// LU factorization with partial pivoting (destroys self into factors).
    pub fn lu(self) -> Result<BandedLu> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        // factored storage needs ku + kl superdiagonals for fill-in
        let kuf = (ku + kl).min(n - 1);
        let width = kl + kuf + 1;
        let mut a = vec![0.0; n * width];
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                a[i * width + (j + kl - i)] = self.get(i, j);
            }
        }
        let mut piv = vec![0usize; n];
        for k in 0..n {
            // pivot search in column k among rows k..k+kl
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut pmax = 0.0f64;
            for i in k..=last {
                let off = k as isize - i as isize + kl as isize;
                if off < 0 {
                    continue;
                }
                let v = a[i * width + off as usize].abs();
                if v > pmax {
                    pmax = v;
                    p = i;
                }
            }
            if pmax == 0.0 {
                return Err(Error::SingularSystem("zero pivot in banded LU"));
            }
            piv[k] = p;
            if p != k {
                // swap rows k and p over their shared column range
                for j in k..=(k + kuf).min(n - 1) {
                    let ok = j + kl - k;
                    let op = j as isize + kl as isize - p as isize;
                    let vp = if op >= 0 && (op as usize) < width {
                        a[p * width + op as usize]
                    } else {
                        0.0
                    };
                    let vk = a[k * width + ok];
                    a[k * width + ok] = vp;
                    if op >= 0 && (op as usize) < width {
                        a[p * width + op as usize] = vk;
                    }
                }
            }
            let pivot = a[k * width + kl];
            for i in (k + 1)..=last {
                let off = (k + kl) as isize - i as isize;
                if off < 0 {
                    continue;
                }
                let m = a[i * width + off as usize] / pivot;
                a[i * width + off as usize] = m;
                if m != 0.0 {
                    for j in (k + 1)..=(k + kuf).min(n - 1) {
                        let oi = j as isize + kl as isize - i as isize;
                        if oi >= 0 && (oi as usize) < width {
                            a[i * width + oi as usize] -= m * a[k * width + (j + kl - k)];
                        }
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            kuf,
            width,
            a,
            piv,
        })
    }
}

/// Factored form of a banded matrix.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    kuf: usize,
    width: usize,
    a: Vec<f64>,
    piv: Vec<usize>,
}

impl BandedLu {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.n);
        let mut x = rhs.to_vec();
        // forward
        for k in 0..self.n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            let last = (k + self.kl).min(self.n - 1);
            for i in (k + 1)..=last {
                let off = (k + self.kl) as isize - i as isize;
                if off >= 0 {
                    let m = self.a[i * self.width + off as usize];
                    if m != 0.0 {
                        x[i] -= m * x[k];
                    }
                }
            }
        }
        // back substitution
        for k in (0..self.n).rev() {
            let hi = (k + self.kuf).min(self.n - 1);
            let mut acc = x[k];
            for j in (k + 1)..=hi {
                acc -= self.a[k * self.width + (j + self.kl - k)] * x[j];
            }
            x[k] = acc / self.a[k * self.width + self.kl];
        }
        x
    }
}
