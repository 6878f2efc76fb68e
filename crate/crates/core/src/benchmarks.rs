//! Benchmark objectives, evaluated on the unit cube and mapped affinely to
//! their native domains.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Raw text of the constant tables.
pub const CONSTANTS_JSON: &str = include_str!("../data/benchmark_constants.json");
/// SHA-256 of [`CONSTANTS_JSON`].
pub const CONSTANTS_SHA256: &str = "31ec15937df155712cf30f0ae84496da5ee2e4dc61f249e9469e8193343dee36";

#[derive(Debug, Deserialize)]
struct BraninConstants {
    a: f64,
    b_numerator: f64,
    c_numerator: f64,
    r: f64,
    s: f64,
    t_denominator: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    minimum: f64,
    minimizer: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct BoxConstants {
    lower: Vec<f64>,
    upper: Vec<f64>,
    minimum: f64,
    minimizer: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct HartmannConstants {
    alpha: Vec<f64>,
    a: Vec<Vec<f64>>,
    p: Vec<Vec<f64>>,
    p_scale: f64,
    minimum: f64,
    minimizer: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct Constants {
    branin: BraninConstants,
    goldstein_price: BoxConstants,
    hartmann3: HartmannConstants,
    hartmann6: HartmannConstants,
}

fn constants() -> &'static Constants {
    static CELL: OnceLock<Constants> = OnceLock::new();
    CELL.get_or_init(|| serde_json::from_str(CONSTANTS_JSON).expect("benchmark constants are valid JSON"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    Franke,
    Branin,
    GoldsteinPrice,
    Hartmann3,
    Hartmann6,
}

impl Benchmark {
    pub const ALL: [Benchmark; 5] =
        [Benchmark::Franke, Benchmark::Branin, Benchmark::GoldsteinPrice, Benchmark::Hartmann3, Benchmark::Hartmann6];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Franke => "franke",
            Benchmark::Branin => "branin",
            Benchmark::GoldsteinPrice => "goldstein-price",
            Benchmark::Hartmann3 => "hartmann3",
            Benchmark::Hartmann6 => "hartmann6",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Benchmark::Franke | Benchmark::Branin | Benchmark::GoldsteinPrice => 2,
            Benchmark::Hartmann3 => 3,
            Benchmark::Hartmann6 => 6,
        }
    }

    /// Native domain `(lower, upper)`.
    pub fn domain(self) -> (Vec<f64>, Vec<f64>) {
        let c = constants();
        match self {
            Benchmark::Branin => (c.branin.lower.clone(), c.branin.upper.clone()),
            Benchmark::GoldsteinPrice => (c.goldstein_price.lower.clone(), c.goldstein_price.upper.clone()),
            _ => (vec![0.0; self.dim()], vec![1.0; self.dim()]),
        }
    }

    /// Published global minimum value and a minimizer in native coordinates.
    pub fn known_minimum(self) -> Option<(f64, Vec<f64>)> {
        let c = constants();
        match self {
            Benchmark::Franke => None,
            Benchmark::Branin => Some((c.branin.minimum, c.branin.minimizer.clone())),
            Benchmark::GoldsteinPrice => Some((c.goldstein_price.minimum, c.goldstein_price.minimizer.clone())),
            Benchmark::Hartmann3 => Some((c.hartmann3.minimum, c.hartmann3.minimizer.clone())),
            Benchmark::Hartmann6 => Some((c.hartmann6.minimum, c.hartmann6.minimizer.clone())),
        }
    }

    pub fn to_native(self, u: &[f64]) -> Vec<f64> {
        let (lo, hi) = self.domain();
        u.iter().zip(lo.iter().zip(&hi)).map(|(v, (a, b))| a + v * (b - a)).collect()
    }

    pub fn to_unit(self, x: &[f64]) -> Vec<f64> {
        let (lo, hi) = self.domain();
        x.iter().zip(lo.iter().zip(&hi)).map(|(v, (a, b))| (v - a) / (b - a)).collect()
    }

    /// Value at `u ∈ [0,1]^p`.
    pub fn evaluate(self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: u.len() });
        }
        Ok(self.evaluate_native(&self.to_native(u)))
    }

    pub fn evaluate_native(self, x: &[f64]) -> f64 {
        let c = constants();
        match self {
            Benchmark::Franke => franke(x[0], x[1]),
            Benchmark::Branin => {
                let k = &c.branin;
                let b = k.b_numerator / (4.0 * PI * PI);
                let cc = k.c_numerator / PI;
                let t = 1.0 / (k.t_denominator * PI);
                let inner = x[1] - b * x[0] * x[0] + cc * x[0] - k.r;
                k.a * inner * inner + k.s * (1.0 - t) * x[0].cos() + k.s
            }
            Benchmark::GoldsteinPrice => goldstein_price(x[0], x[1]),
            Benchmark::Hartmann3 => hartmann(&c.hartmann3, x),
            Benchmark::Hartmann6 => hartmann(&c.hartmann6, x),
        }
    }
}

impl std::str::FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['_', ' '], "-");
        Benchmark::ALL
            .into_iter()
            .find(|b| b.name() == key || (key == "goldstein" && *b == Benchmark::GoldsteinPrice))
            .ok_or_else(|| Error::Domain(format!("unknown objective '{s}'")))
    }
}

fn franke(x: f64, y: f64) -> f64 {
    let t1 = 0.75 * (-(9.0 * x - 2.0).powi(2) / 4.0 - (9.0 * y - 2.0).powi(2) / 4.0).exp();
    let t2 = 0.75 * (-(9.0 * x + 1.0).powi(2) / 49.0 - (9.0 * y + 1.0) / 10.0).exp();
    let t3 = 0.5 * (-(9.0 * x - 7.0).powi(2) / 4.0 - (9.0 * y - 3.0).powi(2) / 4.0).exp();
    let t4 = -0.2 * (-(9.0 * x - 4.0).powi(2) - (9.0 * y - 7.0).powi(2)).exp();
    t1 + t2 + t3 + t4
}

fn goldstein_price(x: f64, y: f64) -> f64 {
    let a = 1.0 + (x + y + 1.0).powi(2) * (19.0 - 14.0 * x + 3.0 * x * x - 14.0 * y + 6.0 * x * y + 3.0 * y * y);
    let b =
        30.0 + (2.0 * x - 3.0 * y).powi(2) * (18.0 - 32.0 * x + 12.0 * x * x + 48.0 * y - 36.0 * x * y + 27.0 * y * y);
    a * b
}

fn hartmann(c: &HartmannConstants, x: &[f64]) -> f64 {
    -c.alpha
        .iter()
        .zip(c.a.iter().zip(&c.p))
        .map(|(alpha, (a, p))| {
            let s: f64 = x.iter().zip(a.iter().zip(p)).map(|(xj, (aj, pj))| aj * (xj - pj * c.p_scale).powi(2)).sum();
            alpha * (-s).exp()
        })
        .sum::<f64>()
}
