//! Follow-up run criteria.

use crate::error::{Error, Result};
use crate::gp::{loo_models, GpConfig, GpModel, LooMode};
use crate::metrics::dist2;

/// Full-data model plus its leave-one-out models.
#[derive(Debug, Clone)]
pub struct CvEmulator {
    pub full: GpModel,
    pub loo: Vec<GpModel>,
}

impl CvEmulator {
    pub fn fit(x: &[Vec<f64>], y: &[f64], config: &GpConfig, mode: LooMode) -> Result<Self> {
        if x.len() < 4 {
            return Err(Error::TooFewPoints { needed: 4, got: x.len() });
        }
        let full = GpModel::fit(x, y, config)?;
        let loo = match mode {
            LooMode::Frozen => x
                .iter()
                .enumerate()
                .map(|(i, _)| {
                    let (xs, ys) = drop_row(x, y, i);
                    GpModel::with_lengthscales(&xs, &ys, full.lengthscales(), config.nugget)
                })
                .collect::<Result<Vec<_>>>()?,
            LooMode::Refit => loo_models(x, y, config, mode)?,
        };
        Ok(CvEmulator { full, loo })
    }

    /// RMS deviation of the leave-one-out predictions from the full-data
    /// prediction at `x`.
    pub fn error(&self, x: &[f64]) -> f64 {
        let center = self.full.predict_mean(x);
        let ss: f64 = self
            .loo
            .iter()
            .map(|m| {
                let d = m.predict_mean(x) - center;
                d * d
            })
            .sum();
        (ss / self.loo.len() as f64).sqrt()
    }

    /// `e(x)` times the distance from `x` to the nearest completed run.
    pub fn g(&self, x: &[f64]) -> f64 {
        self.error(x) * nearest_distance(self.full.inputs(), x)
    }
}

fn drop_row(x: &[Vec<f64>], y: &[f64], i: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let xs = x.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r.clone()).collect();
    let ys = y.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
    (xs, ys)
}

pub fn nearest_distance(points: &[Vec<f64>], x: &[f64]) -> f64 {
    points.iter().map(|q| dist2(q, x)).fold(f64::INFINITY, f64::min).sqrt()
}

/// Leave-one-out error `e(x)` of the runs `(x, y)`.
pub fn cv_error(x: &[Vec<f64>], y: &[f64], at: &[f64], config: &GpConfig, mode: LooMode) -> Result<f64> {
    Ok(CvEmulator::fit(x, y, config, mode)?.error(at))
}

/// `g(x) = e(x) · min_i ‖x − x_i‖`.
pub fn cv_distance_criterion(x: &[Vec<f64>], y: &[f64], at: &[f64], config: &GpConfig, mode: LooMode) -> Result<f64> {
    Ok(CvEmulator::fit(x, y, config, mode)?.g(at))
}

/// Baby value of the simplified criterion: the mean over in-cube parents, or
/// `current_max` when no parent lies in the cube.
pub fn simplified_cv(parent_values: &[f64], current_max: f64) -> f64 {
    if parent_values.is_empty() {
        current_max
    } else {
        parent_values.iter().sum::<f64>() / parent_values.len() as f64
    }
}

/// Average output of a baby's in-cube parents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParentAverage {
    /// No parent lies in the cube; the baby is run first.
    Priority,
    Value(f64),
}

impl ParentAverage {
    pub fn is_priority(self) -> bool {
        matches!(self, ParentAverage::Priority)
    }

    /// Sort key: priority babies first, then ascending average.
    pub fn key(self) -> f64 {
        match self {
            ParentAverage::Priority => f64::NEG_INFINITY,
            ParentAverage::Value(v) => v,
        }
    }
}

pub fn average_parent_output(parent_outputs: &[f64]) -> ParentAverage {
    if parent_outputs.is_empty() {
        ParentAverage::Priority
    } else {
        ParentAverage::Value(parent_outputs.iter().sum::<f64>() / parent_outputs.len() as f64)
    }
}

/// `d(x) = f̂_max − f̂(x)`, clamped below at `floor`.
pub fn density_criterion(prediction: f64, f_max_hat: f64, floor: f64) -> f64 {
    (f_max_hat - prediction).max(floor)
}

/// `f̂_max` over the given evaluation set and the clamping floor
/// `rel · max d` over the same set. A flat surface gives floor 1.
pub fn density_scale(predictions: &[f64], rel: f64) -> (f64, f64) {
    let hi = predictions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = predictions.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = hi - lo;
    let floor = if spread > 0.0 { rel * spread } else { 1.0 };
    (hi, floor)
}

/// `r(x) = Σ_i d(x_i)^{−2} d(x)^{−2} ‖x_i − x‖^{−4p}`.
pub fn energy_criterion(completed: &[Vec<f64>], d_values: &[f64], x: &[f64], d_x: f64) -> Result<f64> {
    if d_x <= 0.0 || d_values.iter().any(|&d| d <= 0.0) {
        return Err(Error::SingularDensity);
    }
    let p = x.len() as i32;
    Ok(completed.iter().zip(d_values).map(|(xi, di)| (di * di * d_x * d_x).recip() * dist2(xi, x).powi(-2 * p)).sum())
}

/// `ln r(x)`, evaluated without overflow.
pub fn log_energy(completed: &[Vec<f64>], d_values: &[f64], x: &[f64], d_x: f64) -> Result<f64> {
    if d_x <= 0.0 || d_values.iter().any(|&d| d <= 0.0) {
        return Err(Error::SingularDensity);
    }
    let p = x.len() as f64;
    let terms: Vec<f64> = completed
        .iter()
        .zip(d_values)
        .map(|(xi, di)| -2.0 * di.ln() - 2.0 * d_x.ln() - 2.0 * p * dist2(xi, x).ln())
        .collect();
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return Ok(m);
    }
    Ok(m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln())
}
