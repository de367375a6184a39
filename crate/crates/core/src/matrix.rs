//! Small dense octonionic matrices (n = 2, 3, 4) and the determinant
//! machinery used by the separability test.

use thiserror::Error;

use crate::octonion::Octonion;

pub const MAX_DIM: usize = 4;

/// Relative tolerance of the Hermitian predicate.
pub const HERMITIAN_RTOL: f64 = 1e-10;

/// Relative bound on the imaginary part of a Laplace sum, measured as
/// `residual / (1 + |real part|)`.
pub const IMAG_RESIDUAL_RTOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operation requires a {expected}x{expected} matrix, got {got}x{got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("unsupported matrix dimension {0} (expected 2, 3 or 4)")]
    UnsupportedDimension(usize),
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("imaginary residual {residual:.3e} exceeds tolerance (real part {value:.6e})")]
    ImaginaryResidualExceeded { residual: f64, value: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OctoMatrix {
    n: usize,
    entries: [[Octonion; MAX_DIM]; MAX_DIM],
}

impl OctoMatrix {
    pub fn zeros(n: usize) -> Result<Self, MatrixError> {
        if !(2..=MAX_DIM).contains(&n) {
            return Err(MatrixError::UnsupportedDimension(n));
        }
        Ok(OctoMatrix {
            n,
            entries: [[Octonion::ZERO; MAX_DIM]; MAX_DIM],
        })
    }

    pub fn identity(n: usize) -> Result<Self, MatrixError> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.entries[i][i] = Octonion::ONE;
        }
        Ok(m)
    }

    pub fn from_fn<F>(n: usize, mut f: F) -> Result<Self, MatrixError>
    where
        F: FnMut(usize, usize) -> Octonion,
    {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            for j in 0..n {
                m.entries[i][j] = f(i, j);
            }
        }
        Ok(m)
    }

    /// Real matrix embedded along `e0`.
    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        Self::from_fn(n, |i, j| Octonion::real(rows[i][j]))
    }

    pub fn diag(d: &[f64]) -> Result<Self, MatrixError> {
        let mut m = Self::zeros(d.len())?;
        for (i, &v) in d.iter().enumerate() {
            m.entries[i][i] = Octonion::real(v);
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Octonion {
        debug_assert!(i < self.n && j < self.n);
        &self.entries[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Octonion) {
        debug_assert!(i < self.n && j < self.n);
        self.entries[i][j] = v;
    }

    pub fn scale(&self, s: f64) -> OctoMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.entries[i][j] = self.entries[i][j].scale(s);
            }
        }
        out
    }

    /// `C[i][j] = Σ_k A[i][k] B[k][j]`; each summand is a single binary
    /// product so no association choice is involved.
    pub fn mmult(&self, other: &OctoMatrix) -> Result<OctoMatrix, MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        let mut out = OctoMatrix::zeros(n)?;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Octonion::ZERO;
                for k in 0..n {
                    acc += self.entries[i][k].mul(&other.entries[k][j]);
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    pub fn ctranspose(&self) -> OctoMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.entries[i][j] = self.entries[j][i].conj();
            }
        }
        out
    }

    pub fn max_abs_entry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                for c in self.entries[i][j].0 {
                    m = m.max(c.abs());
                }
            }
        }
        m
    }

    /// Largest componentwise deviation `|A[j][i] − conj(A[i][j])|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                dev = dev.max(self.entries[j][i].max_abs_diff(&self.entries[i][j].conj()));
            }
        }
        dev
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_RTOL * self.max_abs_entry().max(f64::MIN_POSITIVE)
    }

    fn require_hermitian(&self) -> Result<(), MatrixError> {
        if self.is_hermitian() {
            Ok(())
        } else {
            Err(MatrixError::NotHermitian {
                deviation: self.hermitian_deviation(),
            })
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.entries[i][i].re()).sum()
    }

    /// Transpose on the second tensor factor of a 2⊗2 matrix. Row index
    /// `(i, j)` maps to `2i + j`; the output entry at `((i,l),(k,j))` is the
    /// input entry at `((i,j),(k,l))`. Entries are moved, never conjugated.
    pub fn partial_transpose(&self) -> Result<OctoMatrix, MatrixError> {
        if self.n != 4 {
            return Err(MatrixError::WrongDimension {
                expected: 4,
                got: self.n,
            });
        }
        let mut out = self.clone();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.entries[2 * i + l][2 * k + j] = self.entries[2 * i + j][2 * k + l];
                    }
                }
            }
        }
        Ok(out)
    }

    /// 2x2 submatrix on the given rows and columns.
    pub fn minor2(&self, rows: [usize; 2], cols: [usize; 2]) -> OctoMatrix {
        let mut m = OctoMatrix {
            n: 2,
            entries: [[Octonion::ZERO; MAX_DIM]; MAX_DIM],
        };
        for (a, &r) in rows.iter().enumerate() {
            for (b, &c) in cols.iter().enumerate() {
                m.entries[a][b] = self.entries[r][c];
            }
        }
        m
    }
}

/// Symmetrized determinant of `[[p, q], [r, s]]`:
/// `(ps + sp − qr − rq) / 2`. Reduces to `ad − bc` for real entries and to
/// `ad − |b|²` for Hermitian ones.
#[inline]
pub fn odet2_entries(p: &Octonion, q: &Octonion, r: &Octonion, s: &Octonion) -> Octonion {
    (p.mul(s) + s.mul(p) - q.mul(r) - r.mul(q)).scale(0.5)
}

/// Real part of [`odet2_entries`], i.e. `Re(ps) − Re(qr)`.
#[inline]
pub fn odet2_real_entries(p: &Octonion, q: &Octonion, r: &Octonion, s: &Octonion) -> f64 {
    p.re_mul(s) - q.re_mul(r)
}

pub fn odet2(m: &OctoMatrix) -> Result<Octonion, MatrixError> {
    if m.n != 2 {
        return Err(MatrixError::WrongDimension {
            expected: 2,
            got: m.n,
        });
    }
    Ok(odet2_entries(m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)))
}

/// How each 2x2 complementary minor enters the 4x4 Laplace sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinorRule {
    /// Octonion-valued symmetrized minors multiplied as octonions; the
    /// real part of the sum is returned. Exact on commutative subalgebras.
    Symmetrized,
    /// Each minor is projected to its real part before the product, so
    /// the sum is real by construction. This is the rule the separability
    /// estimator uses.
    #[default]
    RealPart,
}

impl std::str::FromStr for MinorRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symmetrized" => Ok(MinorRule::Symmetrized),
            "real-part" => Ok(MinorRule::RealPart),
            other => Err(format!(
                "unknown minor rule '{other}' (expected symmetrized or real-part)"
            )),
        }
    }
}

impl std::fmt::Display for MinorRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MinorRule::Symmetrized => "symmetrized",
            MinorRule::RealPart => "real-part",
        })
    }
}

/// Result of a Laplace expansion: the real value and the norm of the
/// imaginary part of the octonion-valued sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaplaceDet {
    pub value: f64,
    pub residual: f64,
}

/// The six 2-element column subsets of {0,1,2,3}, each with its complement.
const COLUMN_SPLITS: [([usize; 2], [usize; 2]); 6] = [
    ([0, 1], [2, 3]),
    ([0, 2], [1, 3]),
    ([0, 3], [1, 2]),
    ([1, 2], [0, 3]),
    ([1, 3], [0, 2]),
    ([2, 3], [0, 1]),
];

/// Laplace expansion of a 4x4 matrix by complementary 2x2 minors along
/// `rows` (0-based, ascending), product order (minor on `rows`)·(minor on
/// the complementary rows). No residual check is applied.
pub fn laplace_expand4(
    m: &OctoMatrix,
    rows: [usize; 2],
    rule: MinorRule,
) -> Result<LaplaceDet, MatrixError> {
    if m.n != 4 {
        return Err(MatrixError::WrongDimension {
            expected: 4,
            got: m.n,
        });
    }
    let other: Vec<usize> = (0..4).filter(|r| !rows.contains(r)).collect();
    let other = [other[0], other[1]];
    let row_sum = rows[0] + rows[1] + 2;
    let e = &m.entries;
    match rule {
        MinorRule::Symmetrized => {
            let mut acc = Octonion::ZERO;
            for (s, sc) in COLUMN_SPLITS {
                let top = odet2_entries(
                    &e[rows[0]][s[0]],
                    &e[rows[0]][s[1]],
                    &e[rows[1]][s[0]],
                    &e[rows[1]][s[1]],
                );
                let bottom = odet2_entries(
                    &e[other[0]][sc[0]],
                    &e[other[0]][sc[1]],
                    &e[other[1]][sc[0]],
                    &e[other[1]][sc[1]],
                );
                let term = top.mul(&bottom);
                if (row_sum + s[0] + s[1] + 2).is_multiple_of(2) {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            Ok(LaplaceDet {
                value: acc.re(),
                residual: acc.imag_norm(),
            })
        }
        MinorRule::RealPart => {
            let mut acc = 0.0;
            for (s, sc) in COLUMN_SPLITS {
                let top = odet2_real_entries(
                    &e[rows[0]][s[0]],
                    &e[rows[0]][s[1]],
                    &e[rows[1]][s[0]],
                    &e[rows[1]][s[1]],
                );
                let bottom = odet2_real_entries(
                    &e[other[0]][sc[0]],
                    &e[other[0]][sc[1]],
                    &e[other[1]][sc[0]],
                    &e[other[1]][sc[1]],
                );
                if (row_sum + s[0] + s[1] + 2).is_multiple_of(2) {
                    acc += top * bottom;
                } else {
                    acc -= top * bottom;
                }
            }
            Ok(LaplaceDet {
                value: acc,
                residual: 0.0,
            })
        }
    }
}

/// Laplace determinant along rows {1,2} with the residual check applied.
pub fn laplace_det4_with(m: &OctoMatrix, rule: MinorRule) -> Result<LaplaceDet, MatrixError> {
    let d = laplace_expand4(m, [0, 1], rule)?;
    if d.residual > IMAG_RESIDUAL_RTOL * (1.0 + d.value.abs()) {
        return Err(MatrixError::ImaginaryResidualExceeded {
            residual: d.residual,
            value: d.value,
        });
    }
    Ok(d)
}

/// Laplace determinant with octonion-valued symmetrized minors.
pub fn laplace_det4(m: &OctoMatrix) -> Result<LaplaceDet, MatrixError> {
    laplace_det4_with(m, MinorRule::Symmetrized)
}

/// Diagnostic: expansions along row pairs {1,2}, {1,3} and {1,4}.
#[derive(Clone, Debug, PartialEq)]
pub struct RowPairSpread {
    pub values: [f64; 3],
    pub residuals: [f64; 3],
    pub spread: f64,
}

pub fn laplace_row_pair_spread(
    m: &OctoMatrix,
    rule: MinorRule,
) -> Result<RowPairSpread, MatrixError> {
    let mut values = [0.0; 3];
    let mut residuals = [0.0; 3];
    for (idx, second) in (1..4).enumerate() {
        let d = laplace_expand4(m, [0, second], rule)?;
        values[idx] = d.value;
        residuals[idx] = d.residual;
    }
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(RowPairSpread {
        values,
        residuals,
        spread: max - min,
    })
}

/// Determinant of a 3x3 Hermitian octonionic matrix with diagonal (a,b,c)
/// and off-diagonals z = M12, y = M13, x = M23:
/// `abc − a|x|² − b|y|² − c|z|² + 2 Re((ȳ z) x)`.
pub fn det3_hermitian(m: &OctoMatrix) -> Result<f64, MatrixError> {
    if m.n != 3 {
        return Err(MatrixError::WrongDimension {
            expected: 3,
            got: m.n,
        });
    }
    m.require_hermitian()?;
    let (a, b, c) = (m.get(0, 0).re(), m.get(1, 1).re(), m.get(2, 2).re());
    let z = m.get(0, 1);
    let y = m.get(0, 2);
    let x = m.get(1, 2);
    let triple = y.conj().mul(z).mul(x).re();
    Ok(a * b * c - a * x.norm2() - b * y.norm2() - c * z.norm2() + 2.0 * triple)
}

/// Ascending eigenvalue pair of a 2x2 Hermitian octonionic matrix, the
/// roots of `λ² − tr λ + det`.
pub fn eig2_hermitian(m: &OctoMatrix) -> Result<(f64, f64), MatrixError> {
    if m.n != 2 {
        return Err(MatrixError::WrongDimension {
            expected: 2,
            got: m.n,
        });
    }
    m.require_hermitian()?;
    let a = m.get(0, 0).re();
    let d = m.get(1, 1).re();
    let b2 = m.get(0, 1).norm2();
    let half_tr = 0.5 * (a + d);
    let half_gap = 0.5 * ((a - d) * (a - d) + 4.0 * b2).sqrt();
    let hi = half_tr + half_gap;
    // lo via the product to avoid cancellation when hi ≫ lo
    let det = a * d - b2;
    let lo = if hi > 0.0 { det / hi } else { half_tr - half_gap };
    Ok((lo.min(hi), lo.max(hi)))
}
