//! Shared generators and independent determinant oracles for the
//! integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64;
use octosep::sampling::stream_rng;
use octosep::{OctoMatrix, Octonion};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, 0xACCE)
}

/// Octonion with the first `dim` components standard normal, rest zero.
pub fn sub_octonion<R: Rng>(rng: &mut R, dim: usize) -> Octonion {
    let mut c = [0.0; 8];
    for x in c.iter_mut().take(dim) {
        *x = rng.sample(StandardNormal);
    }
    Octonion(c)
}

/// Random Hermitian 4x4 matrix with entries in the first `dim` components.
pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> OctoMatrix {
    let mut m = OctoMatrix::zeros(4).unwrap();
    for i in 0..4 {
        m.set(i, i, Octonion::real(rng.sample::<f64, _>(StandardNormal) * 2.0));
        for j in i + 1..4 {
            let x = sub_octonion(rng, dim);
            m.set(i, j, x);
            m.set(j, i, x.conj());
        }
    }
    m
}

/// Positive-definite `T†T` with upper-triangular `T` in the subalgebra.
pub fn random_wishart<R: Rng>(rng: &mut R, dim: usize) -> OctoMatrix {
    let mut t = OctoMatrix::zeros(4).unwrap();
    for i in 0..4 {
        t.set(i, i, Octonion::real(1.0 + rng.random::<f64>()));
        for j in i + 1..4 {
            t.set(i, j, sub_octonion(rng, dim));
        }
    }
    t.ctranspose().mmult(&t).unwrap()
}

/// Determinant of a complex matrix by partial-pivot LU.
pub fn complex_det(m: &OctoMatrix) -> f64 {
    let n = m.dim();
    let mut a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| Complex64::new(m.get(i, j)[0], m.get(i, j)[1])).collect())
        .collect();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| a[x][k].norm().total_cmp(&a[y][k].norm())).unwrap();
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let piv = a[k][k];
        det *= piv;
        for i in k + 1..n {
            let f = a[i][k] / piv;
            for j in k..n {
                let v = a[k][j];
                a[i][j] -= f * v;
            }
        }
    }
    det.re
}

/// Hamilton quaternion `[w, x, y, z]` with `ij = k`.
#[derive(Clone, Copy, Debug)]
pub struct Quat(pub [f64; 4]);

impl Quat {
    pub fn mul(self, o: Quat) -> Quat {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = o.0;
        Quat([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }
    pub fn conj(self) -> Quat {
        Quat([self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
    pub fn scale(self, s: f64) -> Quat {
        Quat(self.0.map(|x| x * s))
    }
    pub fn sub(self, o: Quat) -> Quat {
        Quat([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2], self.0[3] - o.0[3]])
    }
}

/// Moore determinant of a quaternionic Hermitian matrix as the product of
/// the real pivots of the Hermitian elimination `A = L D L†`.
pub fn moore_det(m: &OctoMatrix) -> f64 {
    let n = m.dim();
    let mut a: Vec<Vec<Quat>> = (0..n)
        .map(|i| (0..n).map(|j| {
            let e = m.get(i, j);
            Quat([e[0], e[1], e[2], e[3]])
        }).collect())
        .collect();
    let mut det = 1.0;
    for k in 0..n {
        let d = a[k][k].0[0];
        det *= d;
        for i in k + 1..n {
            for j in k + 1..n {
                let upd = a[i][k].mul(a[k][j]).scale(1.0 / d);
                a[i][j] = a[i][j].sub(upd);
            }
        }
    }
    det
}

pub fn max_abs(x: &Octonion) -> f64 {
    x.0.iter().fold(0.0, |m, v| m.max(v.abs()))
}
