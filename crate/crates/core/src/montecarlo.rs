//! Separability Monte Carlo: draw `W = T†T`, keep draws with a positive
//! Laplace determinant, and count those whose partial transpose also has a
//! positive determinant (the two-qubit Peres–Horodecki test).

use std::thread;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::{forrester_pdf, forrester_pdf_norm_f64};
use crate::matrix::{det3_hermitian, eig2_hermitian, laplace_det4_with, MinorRule, OctoMatrix};
use crate::sampling::{
    diagonal_distributions, fill_cholesky, sample_gaussian_wishart_2, stream_rng,
    wishart_from_factor, GammaVariant, SimulationConfig,
};

/// `|det| < NEAR_ZERO_RTOL · tr(W)^4` is reported as a near-zero determinant.
pub const NEAR_ZERO_RTOL: f64 = 1e-12;

/// Grid resolution of the eigenvalue CDF comparison.
pub const EIGEN_GRID: usize = 50;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub generated: u64,
    pub pos_det: u64,
    pub ppt: u64,
    pub ordering_count: u64,
    pub near_zero_dets: u64,
}

impl Counts {
    pub fn merge(self, o: Counts) -> Counts {
        Counts {
            generated: self.generated + o.generated,
            pos_det: self.pos_det + o.pos_det,
            ppt: self.ppt + o.ppt,
            ordering_count: self.ordering_count + o.ordering_count,
            near_zero_dets: self.near_zero_dets + o.near_zero_dets,
        }
    }
}

/// Aggregated separability estimate.
///
/// `sep_prob = ppt / pos_det`. `ordering_prob` is the fraction of PPT
/// draws with `det(W) > det(W^PT)`, i.e. `ordering_count / ppt`; this is
/// the conditional probability that compares with `(P − Q) / P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub generated: u64,
    pub pos_det: u64,
    pub ppt: u64,
    pub ordering_count: u64,
    pub sep_prob: f64,
    pub sep_stderr: f64,
    pub ordering_prob: f64,
    pub ordering_stderr: f64,
    pub near_zero_dets: u64,
    pub config: SimulationConfig,
    pub per_worker_samples: Vec<u64>,
}

pub(crate) fn binomial(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 0.0);
    }
    let p = successes as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

impl EstimateResult {
    fn from_counts(c: Counts, config: SimulationConfig, per_worker_samples: Vec<u64>) -> Self {
        let (sep_prob, sep_stderr) = binomial(c.ppt, c.pos_det);
        let (ordering_prob, ordering_stderr) = binomial(c.ordering_count, c.ppt);
        EstimateResult {
            generated: c.generated,
            pos_det: c.pos_det,
            ppt: c.ppt,
            ordering_count: c.ordering_count,
            sep_prob,
            sep_stderr,
            ordering_prob,
            ordering_stderr,
            near_zero_dets: c.near_zero_dets,
            config,
            per_worker_samples,
        }
    }

    pub fn counts(&self) -> Counts {
        Counts {
            generated: self.generated,
            pos_det: self.pos_det,
            ppt: self.ppt,
            ordering_count: self.ordering_count,
            near_zero_dets: self.near_zero_dets,
        }
    }
}

/// Contiguous index ranges, one per worker.
pub fn partition(samples: u64, workers: usize) -> Vec<(u64, u64)> {
    let w = workers as u64;
    let base = samples / w;
    let extra = samples % w;
    let mut start = 0;
    (0..w)
        .map(|i| {
            let len = base + u64::from(i < extra);
            let r = (start, start + len);
            start += len;
            r
        })
        .collect()
}

/// Runs `per_sample` over `[0, samples)` split across `workers` threads.
/// Each worker stops at its first error; the error with the smallest
/// stream index wins, so the outcome does not depend on scheduling.
fn run_parallel<T, F, M>(samples: u64, workers: usize, init: T, per_chunk: F, merge: M) -> Result<(T, Vec<u64>)>
where
    T: Send + Clone,
    F: Fn(u64, u64) -> std::result::Result<T, (u64, Error)> + Sync,
    M: Fn(T, T) -> T,
{
    let ranges = partition(samples, workers);
    let results: Vec<std::result::Result<T, (u64, Error)>> = thread::scope(|s| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(lo, hi)| {
                let f = &per_chunk;
                s.spawn(move || f(lo, hi))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut acc = init;
    let mut first_err: Option<(u64, Error)> = None;
    for r in results {
        match r {
            Ok(v) => acc = merge(acc, v),
            Err((idx, e)) => {
                if first_err.as_ref().is_none_or(|(i, _)| idx < *i) {
                    first_err = Some((idx, e));
                }
            }
        }
    }
    if let Some((_, e)) = first_err {
        return Err(e);
    }
    Ok((acc, ranges.iter().map(|(lo, hi)| hi - lo).collect()))
}

fn sample_error(cfg: &SimulationConfig, stream: u64, e: Error) -> (u64, Error) {
    match e {
        Error::Matrix(source) => (
            stream,
            Error::Sample {
                seed: cfg.seed,
                stream,
                source,
            },
        ),
        other => (stream, other),
    }
}

/// Classifies one Wishart draw.
fn classify(w: &OctoMatrix, rule: MinorRule) -> std::result::Result<Counts, Error> {
    let mut c = Counts {
        generated: 1,
        ..Counts::default()
    };
    let d = laplace_det4_with(w, rule)?.value;
    let scale = w.trace().powi(4);
    if d.abs() < NEAR_ZERO_RTOL * scale {
        c.near_zero_dets = 1;
    }
    if d > 0.0 {
        c.pos_det = 1;
        let dpt = laplace_det4_with(&w.partial_transpose()?, rule)?.value;
        if dpt > 0.0 {
            c.ppt = 1;
            if d > dpt {
                c.ordering_count = 1;
            }
        }
    }
    Ok(c)
}

/// Estimates the separability probability for `cfg` (dim 4).
pub fn estimate_separability(cfg: &SimulationConfig) -> Result<EstimateResult> {
    estimate_separability_rescaled(cfg, 1.0)
}

/// Same as [`estimate_separability`] with every Cholesky factor multiplied
/// by `factor > 0` before forming `W`. Counts must not change.
pub fn estimate_separability_rescaled(cfg: &SimulationConfig, factor: f64) -> Result<EstimateResult> {
    cfg.validate()?;
    if cfg.dim != 4 {
        return Err(Error::InvalidConfig(format!(
            "separability estimation needs dim 4 (got {})",
            cfg.dim
        )));
    }
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::InvalidConfig(format!("rescale factor must be positive, got {factor}")));
    }
    let gammas = diagonal_distributions(cfg)?;
    let (counts, per_worker) = run_parallel(
        cfg.samples,
        cfg.workers,
        Counts::default(),
        |lo, hi| {
            let mut acc = Counts::default();
            for stream in lo..hi {
                let mut rng = stream_rng(cfg.seed, stream);
                let mut t = fill_cholesky(4, &gammas, &mut rng);
                if factor != 1.0 {
                    t = t.scale(factor);
                }
                let w = wishart_from_factor(&t);
                let c = classify(&w, cfg.minor_rule).map_err(|e| sample_error(cfg, stream, e))?;
                acc = acc.merge(c);
            }
            Ok(acc)
        },
        Counts::merge,
    )?;
    Ok(EstimateResult::from_counts(counts, cfg.clone(), per_worker))
}

/// Largest imaginary residual of the symmetrized 2x2 minors entering the
/// Laplace expansions of `W` and `W^PT`, relative to `tr(W)^2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MinorResidualReport {
    pub samples: u64,
    pub max_relative_residual: f64,
    pub max_hermitian_block_residual: f64,
}

pub fn minor_residual_scan(cfg: &SimulationConfig) -> Result<MinorResidualReport> {
    use crate::matrix::odet2_entries;
    cfg.validate()?;
    let gammas = diagonal_distributions(cfg)?;
    let merge = |a: MinorResidualReport, b: MinorResidualReport| MinorResidualReport {
        samples: a.samples + b.samples,
        max_relative_residual: a.max_relative_residual.max(b.max_relative_residual),
        max_hermitian_block_residual: a
            .max_hermitian_block_residual
            .max(b.max_hermitian_block_residual),
    };
    let (rep, _) = run_parallel(
        cfg.samples,
        cfg.workers,
        MinorResidualReport::default(),
        |lo, hi| {
            let mut acc = MinorResidualReport::default();
            for stream in lo..hi {
                let mut rng = stream_rng(cfg.seed, stream);
                let t = fill_cholesky(4, &gammas, &mut rng);
                let w = wishart_from_factor(&t);
                let pt = w.partial_transpose().map_err(|e| sample_error(cfg, stream, e.into()))?;
                let scale = w.trace().powi(2).max(f64::MIN_POSITIVE);
                for m in [&w, &pt] {
                    for rows in [[0usize, 1usize], [2, 3]] {
                        for c0 in 0..4 {
                            for c1 in c0 + 1..4 {
                                let e = |r: usize, c: usize| *m.get(r, c);
                                let d = odet2_entries(
                                    &e(rows[0], c0),
                                    &e(rows[0], c1),
                                    &e(rows[1], c0),
                                    &e(rows[1], c1),
                                );
                                let rel = d.imag_norm() / scale;
                                acc.max_relative_residual = acc.max_relative_residual.max(rel);
                                if [c0, c1] == rows {
                                    acc.max_hermitian_block_residual =
                                        acc.max_hermitian_block_residual.max(rel);
                                }
                            }
                        }
                    }
                }
                acc.samples += 1;
            }
            Ok(acc)
        },
        merge,
    )?;
    Ok(rep)
}

/// Fraction of 3x3 octonionic Wisharts with a negative Hermitian
/// determinant. Exploratory only.
pub fn forrester_3x3_mode(
    a: f64,
    variant: GammaVariant,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<f64> {
    let mut cfg = SimulationConfig::new(a, variant, samples, seed).with_dim(3);
    cfg.workers = workers;
    cfg.validate()?;
    let gammas = diagonal_distributions(&cfg)?;
    let (neg, _) = run_parallel(
        samples,
        workers,
        0u64,
        |lo, hi| {
            let mut neg = 0u64;
            for stream in lo..hi {
                let mut rng = stream_rng(seed, stream);
                let t = fill_cholesky(3, &gammas, &mut rng);
                let w = wishart_from_factor(&t);
                let d = det3_hermitian(&w).map_err(|e| sample_error(&cfg, stream, e.into()))?;
                if d < 0.0 {
                    neg += 1;
                }
            }
            Ok(neg)
        },
        |x, y| x + y,
    )?;
    Ok(neg as f64 / samples as f64)
}

// ---------------------------------------------------------------------------
// Eigenvalue density check for 2x2 Gaussian octonionic Wisharts
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPdfReport {
    pub n: usize,
    pub a_implied: f64,
    pub c: f64,
    pub samples: u64,
    pub lambda_max: f64,
    pub bins: usize,
    pub histogram_lambda1: Vec<u64>,
    pub histogram_lambda2: Vec<u64>,
    pub discrepancy: f64,
    /// Same statistic for draws from a rejection sampler of the model
    /// density itself.
    pub oracle_discrepancy: f64,
}

/// Upper edge of the CDF grid: mean plus six standard deviations of
/// `λ1 + λ2 ~ Gamma(2a + 10, rate c)`.
pub fn eigen_grid_extent(a: f64, c: f64) -> f64 {
    let k = 2.0 * a + 10.0;
    (k + 6.0 * k.sqrt()) / c
}

/// Model CDF `F(x_i, y_j) = P(λ1 ≤ x_i, λ2 ≤ y_j)` for ordered pairs on an
/// `m × m` grid with spacing `extent / m` (index `i` ↔ `x = (i+1)·h`).
pub fn model_grid_cdf(a: f64, c: f64, extent: f64, m: usize) -> Vec<Vec<f64>> {
    let norm = forrester_pdf_norm_f64(a, c);
    let h = extent / m as f64;
    let (nodes, weights) = gauss_legendre(24);
    // inner(x, y) = ∫_0^{min(x,y)} p(l1, y) dl1, split into panels of width ≤ h
    let inner = |upper: f64, y: f64| -> f64 {
        if upper <= 0.0 {
            return 0.0;
        }
        let panels = (upper / h).ceil().max(1.0) as usize;
        let w = upper / panels as f64;
        let mut s = 0.0;
        for p in 0..panels {
            let lo = p as f64 * w;
            for (t, wt) in nodes.iter().zip(&weights) {
                let l1 = lo + 0.5 * w * (t + 1.0);
                s += 0.5 * w * wt * forrester_pdf(l1, y, a, c);
            }
        }
        s
    };
    let mut cdf = vec![vec![0.0; m]; m];
    for (i, row) in cdf.iter_mut().enumerate() {
        let x = (i + 1) as f64 * h;
        let mut acc = 0.0;
        for (j, cell) in row.iter_mut().enumerate() {
            let lo = j as f64 * h;
            for (t, wt) in nodes.iter().zip(&weights) {
                let y = lo + 0.5 * h * (t + 1.0);
                acc += 0.5 * h * wt * inner(x.min(y), y);
            }
            *cell = acc / norm;
        }
    }
    cdf
}

/// Empirical CDF on the same grid as [`model_grid_cdf`].
pub fn empirical_grid_cdf(pairs: &[(f64, f64)], extent: f64, m: usize) -> Vec<Vec<f64>> {
    let h = extent / m as f64;
    let mut counts = vec![vec![0u64; m]; m];
    for &(l1, l2) in pairs {
        // smallest grid index whose edge is ≥ the value
        let idx = |v: f64| -> Option<usize> {
            let k = (v / h).ceil() as i64 - 1;
            let k = k.max(0) as usize;
            (k < m).then_some(k)
        };
        if let (Some(i), Some(j)) = (idx(l1), idx(l2)) {
            counts[i][j] += 1;
        }
    }
    let total = pairs.len().max(1) as f64;
    let mut cdf = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            let mut v = counts[i][j] as f64;
            if i > 0 {
                v += cdf[i - 1][j] * total;
            }
            if j > 0 {
                v += cdf[i][j - 1] * total;
            }
            if i > 0 && j > 0 {
                v -= cdf[i - 1][j - 1] * total;
            }
            cdf[i][j] = v / total;
        }
    }
    cdf
}

pub fn sup_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Exact draws from the ordered-pair density
/// `(λ1λ2)^a e^{−c(λ1+λ2)} (λ2−λ1)^8` by rejection from the Gamma-pair
/// mixture `(xy)^a e^{−c(x+y)} (x^8 + y^8)`, acceptance `(x−y)^8/(x^8+y^8)`.
pub fn rejection_sample_model<R: Rng + ?Sized>(a: f64, c: f64, count: usize, rng: &mut R) -> Vec<(f64, f64)> {
    let big = Gamma::new(a + 9.0, 1.0 / c).expect("a > -1");
    let small = Gamma::new(a + 1.0, 1.0 / c).expect("a > -1");
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (mut x, mut y): (f64, f64) = (big.sample(rng), small.sample(rng));
        if rng.random::<bool>() {
            std::mem::swap(&mut x, &mut y);
        }
        let accept = (x - y).powi(8) / (x.powi(8) + y.powi(8));
        if rng.random::<f64>() < accept {
            out.push((x.min(y), x.max(y)));
        }
    }
    out
}

/// Compares eigenvalue pairs of `X†X` (`X` an `n × 2` Gaussian octonion
/// matrix) with the model density at `a = 4n − 5`, `c = 1/2`.
pub fn eigen_pdf_check(n: usize, samples: u64, seed: u64, bins: usize) -> Result<EigenPdfReport> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "eigen check needs n >= 2 so that a = 4n - 5 > -1 (got {n})"
        )));
    }
    if samples == 0 || bins == 0 {
        return Err(Error::InvalidConfig("samples and bins must be positive".into()));
    }
    let a = 4.0 * n as f64 - 5.0;
    let c = 0.5;
    let extent = eigen_grid_extent(a, c);
    let mut pairs = Vec::with_capacity(samples as usize);
    for stream in 0..samples {
        let w = sample_gaussian_wishart_2(n, seed, stream)?.w;
        pairs.push(eig2_hermitian(&w)?);
    }
    let model = model_grid_cdf(a, c, extent, EIGEN_GRID);
    let discrepancy = sup_distance(&empirical_grid_cdf(&pairs, extent, EIGEN_GRID), &model);

    let mut orng = stream_rng(seed ^ 0x6f72_6163_6c65, u64::MAX);
    let oracle = rejection_sample_model(a, c, samples as usize, &mut orng);
    let oracle_discrepancy = sup_distance(&empirical_grid_cdf(&oracle, extent, EIGEN_GRID), &model);

    let bw = extent / bins as f64;
    let mut h1 = vec![0u64; bins];
    let mut h2 = vec![0u64; bins];
    for &(l1, l2) in &pairs {
        let b1 = (l1 / bw) as usize;
        let b2 = (l2 / bw) as usize;
        if b1 < bins {
            h1[b1] += 1;
        }
        if b2 < bins {
            h2[b2] += 1;
        }
    }
    Ok(EigenPdfReport {
        n,
        a_implied: a,
        c,
        samples,
        lambda_max: extent,
        bins,
        histogram_lambda1: h1,
        histogram_lambda2: h2,
        discrepancy,
        oracle_discrepancy,
    })
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
