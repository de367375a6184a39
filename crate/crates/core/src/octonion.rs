//! Octonion arithmetic over `f64`.
//!
//! An octonion is stored as eight real coefficients over the basis
//! `e0..e7`, with `e0` the identity. The product is fixed by Cayley–Dickson
//! doubling applied three times, always with the same rule
//!
//! ```text
//! (p, q)(r, s) = (p r − conj(s) q,  s p + q conj(r))
//! ```
//!
//! reals → complex numbers → quaternions → octonions. Coefficients
//! `c0..c3` form the first quaternion half and `c4..c7` the second, and each
//! quaternion is in turn a pair of complex numbers `(c0 + c1 i, c2 + c3 i)`.
//! Under this convention `e1 e2 = e3`, `e1 e4 = e5`, `e2 e4 = e6` and
//! `e3 e4 = e7`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Octonion(pub [f64; 8]);

type Cpx = [f64; 2];
type Quat = [f64; 4];

#[inline(always)]
fn cmul(x: Cpx, y: Cpx) -> Cpx {
    [x[0] * y[0] - y[1] * x[1], y[1] * x[0] + x[1] * y[0]]
}

#[inline(always)]
fn cconj(x: Cpx) -> Cpx {
    [x[0], -x[1]]
}

#[inline(always)]
fn qmul(x: Quat, y: Quat) -> Quat {
    let (p, q) = ([x[0], x[1]], [x[2], x[3]]);
    let (r, s) = ([y[0], y[1]], [y[2], y[3]]);
    let pr = cmul(p, r);
    let sq = cmul(cconj(s), q);
    let sp = cmul(s, p);
    let qr = cmul(q, cconj(r));
    [pr[0] - sq[0], pr[1] - sq[1], sp[0] + qr[0], sp[1] + qr[1]]
}

#[inline(always)]
fn qconj(x: Quat) -> Quat {
    [x[0], -x[1], -x[2], -x[3]]
}

impl Octonion {
    pub const ZERO: Octonion = Octonion([0.0; 8]);
    pub const ONE: Octonion = Octonion([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

    pub const fn new(c: [f64; 8]) -> Self {
        Octonion(c)
    }

    /// Basis unit `e_i`, `i < 8`.
    pub fn basis(i: usize) -> Self {
        assert!(i < 8, "octonion basis index out of range: {i}");
        let mut c = [0.0; 8];
        c[i] = 1.0;
        Octonion(c)
    }

    pub fn real(x: f64) -> Self {
        let mut c = [0.0; 8];
        c[0] = x;
        Octonion(c)
    }

    /// Eight independent standard normal coefficients.
    pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut c = [0.0; 8];
        for v in c.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        Octonion(c)
    }

    #[inline]
    pub fn re(&self) -> f64 {
        self.0[0]
    }

    #[inline]
    pub fn conj(&self) -> Self {
        let c = &self.0;
        Octonion([c[0], -c[1], -c[2], -c[3], -c[4], -c[5], -c[6], -c[7]])
    }

    #[inline]
    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }

    /// Euclidean norm of the imaginary part `c1..c7`.
    pub fn imag_norm(&self) -> f64 {
        self.0[1..].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_real(&self) -> bool {
        self.0[1..].iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut c = self.0;
        for v in c.iter_mut() {
            *v *= s;
        }
        Octonion(c)
    }

    #[inline]
    pub fn mul(&self, other: &Octonion) -> Octonion {
        let x = &self.0;
        let y = &other.0;
        let (p, q) = ([x[0], x[1], x[2], x[3]], [x[4], x[5], x[6], x[7]]);
        let (r, s) = ([y[0], y[1], y[2], y[3]], [y[4], y[5], y[6], y[7]]);
        let pr = qmul(p, r);
        let sq = qmul(qconj(s), q);
        let sp = qmul(s, p);
        let qr = qmul(q, qconj(r));
        Octonion([
            pr[0] - sq[0],
            pr[1] - sq[1],
            pr[2] - sq[2],
            pr[3] - sq[3],
            sp[0] + qr[0],
            sp[1] + qr[1],
            sp[2] + qr[2],
            sp[3] + qr[3],
        ])
    }

    /// Real part of `self * other` without forming the full product.
    #[inline]
    pub fn re_mul(&self, other: &Octonion) -> f64 {
        let x = &self.0;
        let y = &other.0;
        x[0] * y[0] - (1..8).map(|i| x[i] * y[i]).sum::<f64>()
    }

    /// `(xy)z − x(yz)`.
    pub fn associator(x: &Octonion, y: &Octonion, z: &Octonion) -> Octonion {
        x.mul(y).mul(z) - x.mul(&y.mul(z))
    }

    pub fn max_abs_diff(&self, other: &Octonion) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Free-function forms of the algebra operations.
pub fn omul(x: &Octonion, y: &Octonion) -> Octonion {
    x.mul(y)
}

pub fn oconj(x: &Octonion) -> Octonion {
    x.conj()
}

pub fn onorm2(x: &Octonion) -> f64 {
    x.norm2()
}

pub fn oreal(x: &Octonion) -> f64 {
    x.re()
}

impl Index<usize> for Octonion {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Octonion {
    type Output = Octonion;
    #[inline]
    fn add(self, rhs: Octonion) -> Octonion {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(rhs.0.iter()) {
            *a += b;
        }
        Octonion(c)
    }
}

impl AddAssign for Octonion {
    #[inline]
    fn add_assign(&mut self, rhs: Octonion) {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a += b;
        }
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    #[inline]
    fn sub(self, rhs: Octonion) -> Octonion {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(rhs.0.iter()) {
            *a -= b;
        }
        Octonion(c)
    }
}

impl SubAssign for Octonion {
    #[inline]
    fn sub_assign(&mut self, rhs: Octonion) {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a -= b;
        }
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        self.scale(-1.0)
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    #[inline]
    fn mul(self, rhs: Octonion) -> Octonion {
        Octonion::mul(&self, &rhs)
    }
}

impl Mul<&Octonion> for Octonion {
    type Output = Octonion;
    #[inline]
    fn mul(self, rhs: &Octonion) -> Octonion {
        Octonion::mul(&self, rhs)
    }
}

impl Mul<f64> for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: f64) -> Octonion {
        self.scale(rhs)
    }
}

impl fmt::Display for Octonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0[0])?;
        for i in 1..8 {
            let v = self.0[i];
            if v != 0.0 {
                let sign = if v < 0.0 { '-' } else { '+' };
                write!(f, " {sign} {}e{i}", v.abs())?;
            }
        }
        Ok(())
    }
}
