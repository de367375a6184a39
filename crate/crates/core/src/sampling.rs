//! Seedable octonionic Cholesky factors and Wishart matrices.
//!
//! Every sample owns an independent ChaCha8 stream keyed by
//! `(seed, stream index)`, so a sample depends only on its index and never
//! on how samples are distributed over workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{MinorRule, OctoMatrix};
use crate::octonion::Octonion;

/// Gamma scale of the squared Cholesky diagonal.
pub const GAMMA_SCALE: f64 = 2.0;

/// Shape spacing between consecutive diagonal entries (half the
/// octonionic Dyson index).
pub const SHAPE_STEP: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaVariant {
    /// Shapes `a + 4(i−1)`.
    Plain,
    /// Shapes `a + 1 + 4(i−1)`.
    Shifted,
}

impl GammaVariant {
    pub fn offset(self) -> f64 {
        match self {
            GammaVariant::Plain => 0.0,
            GammaVariant::Shifted => 1.0,
        }
    }
}

impl std::str::FromStr for GammaVariant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "plain" => Ok(GammaVariant::Plain),
            "shifted" => Ok(GammaVariant::Shifted),
            other => Err(format!(
                "unknown gamma variant '{other}' (expected plain or shifted)"
            )),
        }
    }
}

impl std::fmt::Display for GammaVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GammaVariant::Plain => "plain",
            GammaVariant::Shifted => "shifted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub a: f64,
    pub gamma_variant: GammaVariant,
    pub dim: usize,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    #[serde(default)]
    pub minor_rule: MinorRule,
}

impl SimulationConfig {
    pub fn new(a: f64, gamma_variant: GammaVariant, samples: u64, seed: u64) -> Self {
        SimulationConfig {
            a,
            gamma_variant,
            dim: 4,
            samples,
            seed,
            workers: 1,
            minor_rule: MinorRule::default(),
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    /// Gamma shape of the squared diagonal entry `i` (0-based).
    pub fn shape(&self, i: usize) -> f64 {
        self.a + self.gamma_variant.offset() + SHAPE_STEP * i as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.dim) {
            return Err(Error::InvalidConfig(format!(
                "dim must be 2, 3 or 4 (got {})",
                self.dim
            )));
        }
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be positive".into()));
        }
        if !self.a.is_finite() {
            return Err(Error::InvalidConfig(format!("a must be finite (got {})", self.a)));
        }
        for i in 0..self.dim {
            let shape = self.shape(i);
            if shape <= 0.0 {
                return Err(Error::InvalidShape { index: i, shape });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WishartSample {
    pub w: OctoMatrix,
    pub seed: u64,
    pub stream: u64,
}

/// The RNG for one sample.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Upper-triangular factor with Gaussian octonions above the diagonal and
/// `sqrt(Gamma(shape_i, 2))` on it. Draw order is row by row, diagonal
/// first.
pub fn sample_cholesky(cfg: &SimulationConfig, stream: u64) -> Result<OctoMatrix> {
    cfg.validate()?;
    let gammas = diagonal_distributions(cfg)?;
    let mut rng = stream_rng(cfg.seed, stream);
    Ok(fill_cholesky(cfg.dim, &gammas, &mut rng))
}

pub(crate) fn diagonal_distributions(cfg: &SimulationConfig) -> Result<Vec<Gamma<f64>>> {
    (0..cfg.dim)
        .map(|i| {
            let shape = cfg.shape(i);
            Gamma::new(shape, GAMMA_SCALE).map_err(|_| Error::InvalidShape { index: i, shape })
        })
        .collect()
}

pub(crate) fn fill_cholesky(dim: usize, gammas: &[Gamma<f64>], rng: &mut ChaCha8Rng) -> OctoMatrix {
    let mut t = OctoMatrix::zeros(dim).expect("validated dimension");
    for i in 0..dim {
        let g: f64 = gammas[i].sample(rng);
        t.set(i, i, Octonion::real(g.sqrt()));
        for j in i + 1..dim {
            t.set(i, j, Octonion::gaussian(rng));
        }
    }
    t
}

/// `W = T†T`.
pub fn sample_wishart(cfg: &SimulationConfig, stream: u64) -> Result<WishartSample> {
    let t = sample_cholesky(cfg, stream)?;
    let w = t.ctranspose().mmult(&t)?;
    Ok(WishartSample {
        w,
        seed: cfg.seed,
        stream,
    })
}

/// Wishart-from-triangular without re-validating; used in hot loops.
pub(crate) fn wishart_from_factor(t: &OctoMatrix) -> OctoMatrix {
    t.ctranspose().mmult(t).expect("square factor")
}

/// `W = X†X` for an `n × 2` matrix `X` of standard Gaussian octonions.
pub fn sample_gaussian_wishart_2(n: usize, seed: u64, stream: u64) -> Result<WishartSample> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    let mut rng = stream_rng(seed, stream);
    let rows: Vec<[Octonion; 2]> = (0..n)
        .map(|_| {
            let a = Octonion::gaussian(&mut rng);
            let b = Octonion::gaussian(&mut rng);
            [a, b]
        })
        .collect();
    let w = OctoMatrix::from_fn(2, |i, j| {
        rows.iter()
            .fold(Octonion::ZERO, |acc, r| acc + r[i].conj().mul(&r[j]))
    })?;
    Ok(WishartSample { w, seed, stream })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{eig2_hermitian, odet2};

    fn cfg(a: f64) -> SimulationConfig {
        SimulationConfig::new(a, GammaVariant::Plain, 10, 42)
    }

    #[test]
    fn shape_validation() {
        assert!(cfg(1.0).validate().is_ok());
        assert!(matches!(
            cfg(0.0).validate(),
            Err(Error::InvalidShape { index: 0, .. })
        ));
        let mut s = cfg(-0.5);
        s.gamma_variant = GammaVariant::Shifted;
        assert!(s.validate().is_ok());
        s.a = -1.0;
        assert!(matches!(s.validate(), Err(Error::InvalidShape { .. })));
        let mut z = cfg(1.0);
        z.samples = 0;
        assert!(matches!(z.validate(), Err(Error::InvalidConfig(_))));
        assert!(matches!(cfg(1.0).with_dim(5).validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn shapes_follow_variant() {
        let c = cfg(0.25);
        assert_eq!((0..4).map(|i| c.shape(i)).collect::<Vec<_>>(), vec![0.25, 4.25, 8.25, 12.25]);
        let mut s = c.clone();
        s.gamma_variant = GammaVariant::Shifted;
        assert_eq!(s.shape(0), 1.25);
        assert_eq!(s.shape(3), 13.25);
    }

    #[test]
    fn cholesky_structure_and_determinism() {
        let c = cfg(1.0);
        let t = sample_cholesky(&c, 3).unwrap();
        for i in 0..4 {
            assert!(t.get(i, i).is_real() && t.get(i, i).re() > 0.0);
            for j in 0..i {
                assert_eq!(*t.get(i, j), Octonion::ZERO);
            }
        }
        assert_eq!(t, sample_cholesky(&c, 3).unwrap());
        assert_ne!(t, sample_cholesky(&c, 4).unwrap());
    }

    #[test]
    fn wishart_is_hermitian_with_nonnegative_diagonal() {
        let c = cfg(1.0);
        for s in 0..200 {
            let w = sample_wishart(&c, s).unwrap().w;
            assert!(w.is_hermitian());
            for i in 0..4 {
                assert!(w.get(i, i).re() >= 0.0);
            }
        }
    }

    #[test]
    fn gaussian_wishart_2_properties() {
        for n in 1..5 {
            for s in 0..50 {
                let w = sample_gaussian_wishart_2(n, 9, s).unwrap().w;
                assert!(w.is_hermitian());
                assert!(w.get(0, 0).re() >= 0.0 && w.get(1, 1).re() >= 0.0);
                let det = odet2(&w).unwrap().re();
                let scale = w.trace() * w.trace();
                // Cauchy–Schwarz: |Σ conj(x_k) y_k|² ≤ Σ|x_k|² Σ|y_k|²
                assert!(det >= -1e-12 * scale);
                let (lo, _) = eig2_hermitian(&w).unwrap();
                assert!(lo >= -1e-10 * w.trace());
            }
        }
        assert_eq!(
            sample_gaussian_wishart_2(2, 1, 1).unwrap(),
            sample_gaussian_wishart_2(2, 1, 1).unwrap()
        );
        assert!(sample_gaussian_wishart_2(0, 1, 1).is_err());
    }
}
