//! Ordinary kriging with a product squared-exponential correlation.
//!
//! The constant mean and process variance are profiled out of the
//! likelihood in closed form; lengthscales are fitted by multi-start
//! Nelder–Mead in log space. A nugget is added to the diagonal only, so the
//! predictor still interpolates at the training inputs.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::optim::nelder_mead;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpConfig {
    pub starts: usize,
    /// Relative nugget added to the correlation diagonal.
    pub nugget: f64,
    pub lengthscale_bounds: (f64, f64),
    pub max_evals: usize,
    pub seed: u64,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig { starts: 10, nugget: 1e-8, lengthscale_bounds: (1e-2, 1e2), max_evals: 300, seed: 0 }
    }
}

impl GpConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// How leave-one-out folds treat the hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LooMode {
    /// Refit lengthscales on every fold.
    Refit,
    /// Reuse the full-data lengthscales.
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone)]
pub struct GpModel {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    lengthscales: Vec<f64>,
    sigma2: f64,
    mean: f64,
    nugget: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    kinv_one: DVector<f64>,
    one_kinv_one: f64,
    neg_log_likelihood: f64,
}

pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of leave-one-out fold `i`.
pub fn fold_seed(seed: u64, i: usize) -> u64 {
    splitmix(seed ^ splitmix(i as u64 + 1))
}

fn correlation(a: &[f64], b: &[f64], lengthscales: &[f64]) -> f64 {
    let s: f64 = a
        .iter()
        .zip(b)
        .zip(lengthscales)
        .map(|((u, v), t)| {
            let d = (u - v) / t;
            d * d
        })
        .sum();
    (-0.5 * s).exp()
}

fn correlation_matrix(x: &[Vec<f64>], lengthscales: &[f64], nugget: f64) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 + nugget } else { correlation(&x[i], &x[j], lengthscales) })
}

struct Profile {
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    kinv_one: DVector<f64>,
    one_kinv_one: f64,
    mean: f64,
    sigma2: f64,
    nll: f64,
}

fn profile(x: &[Vec<f64>], y: &[f64], lengthscales: &[f64], nugget: f64) -> Option<Profile> {
    let n = x.len();
    let k = correlation_matrix(x, lengthscales, nugget);
    let chol = Cholesky::new(k)?;
    let yv = DVector::from_column_slice(y);
    let ones = DVector::from_element(n, 1.0);
    let kinv_one = chol.solve(&ones);
    let kinv_y = chol.solve(&yv);
    let one_kinv_one = kinv_one.sum();
    let flat = y.iter().all(|&v| v == y[0]);
    let mean = if flat { y[0] } else { kinv_y.sum() / one_kinv_one };
    let alpha = if flat { DVector::zeros(n) } else { &kinv_y - &kinv_one * mean };
    let resid = &yv - &ones * mean;
    let sigma2 = (resid.dot(&alpha) / n as f64).max(0.0);
    let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
    let nll = 0.5 * n as f64 * sigma2.max(1e-300).ln() + 0.5 * log_det;
    Some(Profile { chol, alpha, kinv_one, one_kinv_one, mean, sigma2, nll })
}

/// Concentrated negative log-likelihood (up to constants) at `lengthscales`.
pub fn neg_log_likelihood(x: &[Vec<f64>], y: &[f64], lengthscales: &[f64], nugget: f64) -> f64 {
    profile(x, y, lengthscales, nugget).map_or(f64::INFINITY, |p| p.nll)
}

/// Multi-start points in lengthscale units, log-uniform over the bounds.
pub fn start_points(config: &GpConfig, p: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (lo, hi) = (config.lengthscale_bounds.0.ln(), config.lengthscale_bounds.1.ln());
    // first start at a moderate lengthscale, then random ones
    let mut out = vec![vec![(0.3f64).clamp(config.lengthscale_bounds.0, config.lengthscale_bounds.1); p]];
    while out.len() < config.starts.max(1) {
        out.push((0..p).map(|_| rng.gen_range(lo..hi).exp()).collect());
    }
    out
}

fn validate(x: &[Vec<f64>], y: &[f64], min_n: usize) -> Result<usize> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::Data(format!("{n} inputs but {} outputs", y.len())));
    }
    if n < min_n {
        return Err(Error::TooFewPoints { needed: min_n, got: n });
    }
    let p = x[0].len();
    if let Some(bad) = x.iter().find(|r| r.len() != p) {
        return Err(Error::DimensionMismatch { expected: p, actual: bad.len() });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite output".into()));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if x[i] == x[j] {
                return Err(Error::Fit(format!("duplicate input rows {i} and {j}")));
            }
        }
    }
    Ok(p)
}

impl GpModel {
    /// Fits lengthscales by maximum likelihood and conditions on the data.
    pub fn fit(x: &[Vec<f64>], y: &[f64], config: &GpConfig) -> Result<Self> {
        let p = validate(x, y, 3)?;
        let (ymin, ymax) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if ymax == ymin {
            let mid = (config.lengthscale_bounds.0 * config.lengthscale_bounds.1).sqrt();
            return Self::with_lengthscales(x, y, &vec![mid; p], config.nugget);
        }

        let lower = vec![config.lengthscale_bounds.0.ln(); p];
        let upper = vec![config.lengthscale_bounds.1.ln(); p];
        let objective = |logs: &[f64]| {
            let ls: Vec<f64> = logs.iter().map(|v| v.exp()).collect();
            neg_log_likelihood(x, y, &ls, config.nugget)
        };
        let results: Vec<(Vec<f64>, f64)> = start_points(config, p)
            .par_iter()
            .map(|s| {
                let logs: Vec<f64> = s.iter().map(|v| v.ln()).collect();
                nelder_mead(objective, &logs, 0.5, &lower, &upper, config.max_evals, 1e-9)
            })
            .collect();
        let mut best = 0;
        for (i, r) in results.iter().enumerate() {
            if r.1 < results[best].1 {
                best = i;
            }
        }
        if !results[best].1.is_finite() {
            return Err(Error::Fit("correlation matrix is not positive definite".into()));
        }
        let ls: Vec<f64> = results[best].0.iter().map(|v| v.exp()).collect();
        Self::with_lengthscales(x, y, &ls, config.nugget)
    }

    /// Conditions on the data with fixed lengthscales.
    pub fn with_lengthscales(x: &[Vec<f64>], y: &[f64], lengthscales: &[f64], nugget: f64) -> Result<Self> {
        validate(x, y, 2)?;
        let pr = profile(x, y, lengthscales, nugget)
            .ok_or_else(|| Error::Fit("correlation matrix is not positive definite".into()))?;
        Ok(GpModel {
            x: x.to_vec(),
            y: y.to_vec(),
            lengthscales: lengthscales.to_vec(),
            sigma2: pr.sigma2,
            mean: pr.mean,
            nugget,
            chol: pr.chol,
            alpha: pr.alpha,
            kinv_one: pr.kinv_one,
            one_kinv_one: pr.one_kinv_one,
            neg_log_likelihood: pr.nll,
        })
    }

    pub fn lengthscales(&self) -> &[f64] {
        &self.lengthscales
    }

    pub fn process_variance(&self) -> f64 {
        self.sigma2
    }

    pub fn trend(&self) -> f64 {
        self.mean
    }

    pub fn neg_log_likelihood(&self) -> f64 {
        self.neg_log_likelihood
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn outputs(&self) -> &[f64] {
        &self.y
    }

    fn cross(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.x.len(),
            self.x.iter().map(|xi| {
                if xi.as_slice() == x {
                    1.0 + self.nugget
                } else {
                    correlation(xi, x, &self.lengthscales)
                }
            }),
        )
    }

    pub fn predict_mean(&self, x: &[f64]) -> f64 {
        self.mean + self.cross(x).dot(&self.alpha)
    }

    pub fn predict(&self, x: &[f64]) -> Prediction {
        let r = self.cross(x);
        let mean = self.mean + r.dot(&self.alpha);
        if self.x.iter().any(|xi| xi.as_slice() == x) {
            return Prediction { mean, sd: 0.0 };
        }
        let v = self.chol.l_dirty().solve_lower_triangular(&r).unwrap_or_else(|| DVector::zeros(r.len()));
        let u = 1.0 - self.kinv_one.dot(&r);
        let var = self.sigma2 * (1.0 + self.nugget - v.norm_squared() + u * u / self.one_kinv_one);
        Prediction { mean, sd: var.max(0.0).sqrt() }
    }

    pub fn expected_improvement(&self, x: &[f64], f_min: f64) -> f64 {
        let pr = self.predict(x);
        expected_improvement(pr.mean, pr.sd, f_min)
    }
}

pub fn normal_cdf(u: f64) -> f64 {
    0.5 * erfc(-u / std::f64::consts::SQRT_2)
}

pub fn normal_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `E[(f_min − Y)^+]` for `Y ~ N(mean, sd²)`.
pub fn expected_improvement(mean: f64, sd: f64, f_min: f64) -> f64 {
    let gap = f_min - mean;
    if sd <= 0.0 {
        return gap.max(0.0);
    }
    let u = gap / sd;
    (gap * normal_cdf(u) + sd * normal_pdf(u)).max(0.0)
}

/// The `n` models fitted with one run left out each.
pub fn loo_models(x: &[Vec<f64>], y: &[f64], config: &GpConfig, mode: LooMode) -> Result<Vec<GpModel>> {
    validate(x, y, 4)?;
    let frozen = match mode {
        LooMode::Frozen => Some(GpModel::fit(x, y, config)?.lengthscales.clone()),
        LooMode::Refit => None,
    };
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let xs: Vec<Vec<f64>> = x.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r.clone()).collect();
            let ys: Vec<f64> = y.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
            match &frozen {
                Some(ls) => GpModel::with_lengthscales(&xs, &ys, ls, config.nugget),
                None => GpModel::fit(&xs, &ys, &config.clone().with_seed(fold_seed(config.seed, i))),
            }
        })
        .collect()
}

/// `f̂_{−i}(x)` for every fold `i` (outer) and every point of `at` (inner).
pub fn loo_predictions(
    x: &[Vec<f64>],
    y: &[f64],
    config: &GpConfig,
    mode: LooMode,
    at: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    let models = loo_models(x, y, config, mode)?;
    Ok(models.iter().map(|m| at.iter().map(|z| m.predict_mean(z)).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> =
            vec![vec![0.1, 0.2], vec![0.8, 0.3], vec![0.4, 0.9], vec![0.6, 0.6], vec![0.2, 0.7], vec![0.9, 0.95]];
        let y = x.iter().map(|v| (3.0 * v[0]).sin() + v[1] * v[1]).collect();
        (x, y)
    }

    #[test]
    fn interpolates() {
        let (x, y) = toy();
        let m = GpModel::fit(&x, &y, &GpConfig::default()).unwrap();
        let range = 2.0;
        for (xi, yi) in x.iter().zip(&y) {
            let pr = m.predict(xi);
            assert!((pr.mean - yi).abs() < 1e-6 * range);
            assert!(pr.sd < 1e-6 * m.process_variance().sqrt().max(1e-12) + 1e-9);
        }
    }

    #[test]
    fn linear_function_interpolated() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 / 4.0, (i * 3 % 5) as f64 / 4.0]).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v[0] - v[1] + 1.0).collect();
        let m = GpModel::fit(&x, &y, &GpConfig::default()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((m.predict_mean(xi) - yi).abs() < 1e-6);
        }
    }

    #[test]
    fn constant_outputs() {
        let (x, _) = toy();
        let y = vec![4.5; x.len()];
        let m = GpModel::fit(&x, &y, &GpConfig::default()).unwrap();
        assert_eq!(m.process_variance(), 0.0);
        for z in [[0.3, 0.3], [0.0, 1.0], [0.77, 0.12]] {
            let pr = m.predict(&z);
            assert!((pr.mean - 4.5).abs() < 1e-9);
            assert_eq!(pr.sd, 0.0);
        }
        let loo = loo_predictions(&x, &y, &GpConfig::default(), LooMode::Refit, &[vec![0.5, 0.5]]).unwrap();
        assert!(loo.iter().all(|r| (r[0] - 4.5).abs() < 1e-9));
    }

    #[test]
    fn deterministic_fit() {
        let (x, y) = toy();
        let a = GpModel::fit(&x, &y, &GpConfig::default().with_seed(3)).unwrap();
        let b = GpModel::fit(&x, &y, &GpConfig::default().with_seed(3)).unwrap();
        assert_eq!(a.lengthscales(), b.lengthscales());
    }

    #[test]
    fn far_point_reverts_to_prior() {
        let (x, y) = toy();
        let m = GpModel::fit(&x, &y, &GpConfig::default()).unwrap();
        let pr = m.predict(&[1e4, -1e4]);
        assert!((pr.mean - m.trend()).abs() < 1e-9);
        assert!(pr.sd >= m.process_variance().sqrt() * (1.0 - 1e-6));
    }

    #[test]
    fn likelihood_beats_starts() {
        let (x, y) = toy();
        let cfg = GpConfig::default().with_seed(8);
        let m = GpModel::fit(&x, &y, &cfg).unwrap();
        for s in start_points(&cfg, 2) {
            assert!(m.neg_log_likelihood() <= neg_log_likelihood(&x, &y, &s, cfg.nugget) + 1e-12);
        }
    }

    #[test]
    fn input_errors() {
        let (mut x, mut y) = toy();
        x[1] = x[0].clone();
        assert!(matches!(GpModel::fit(&x, &y, &GpConfig::default()), Err(Error::Fit(_))));
        let (x, _) = toy();
        y = vec![1.0; x.len()];
        y[2] = f64::NAN;
        assert!(matches!(GpModel::fit(&x, &y, &GpConfig::default()), Err(Error::Data(_))));
    }

    #[test]
    fn ei_closed_form() {
        assert!((expected_improvement(0.0, 1.0, 0.0) - 0.398_942_280_401_432_7).abs() < 1e-12);
        assert_eq!(expected_improvement(2.0, 0.0, 1.0), 0.0);
        assert_eq!(expected_improvement(0.5, 0.0, 1.0), 0.5);
        let mut prev = 0.0;
        for k in 1..50 {
            let v = expected_improvement(0.2, k as f64 * 0.1, 0.0);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn ei_zero_at_training_point() {
        let (x, y) = toy();
        let m = GpModel::fit(&x, &y, &GpConfig::default()).unwrap();
        let f_min = y.iter().copied().fold(f64::INFINITY, f64::min);
        for xi in &x {
            assert!(m.expected_improvement(xi, f_min) < 1e-9);
        }
    }
}
