//! Space-filling criteria for designs in `[0,1]^p`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// Minimum pairwise Euclidean distance.
pub fn separation_distance(points: &[Vec<f64>]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: points.len() });
    }
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.min(dist2(a, b));
        }
    }
    Ok(best.sqrt())
}

/// Minimum distance between two points carrying the same label.
///
/// Returns `None` when no label occurs twice.
pub fn within_group_separation(points: &[Vec<f64>], labels: &[usize]) -> Option<f64> {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if labels[i] == labels[j] {
                best = best.min(dist2(&points[i], &points[j]));
            }
        }
    }
    best.is_finite().then(|| best.sqrt())
}

/// Monte Carlo lower bound on the fill distance: the largest distance from
/// `samples` uniform points of the unit cube to their nearest design point.
pub fn fill_distance_estimate<R: Rng + ?Sized>(points: &[Vec<f64>], samples: usize, rng: &mut R) -> f64 {
    let Some(first) = points.first() else {
        return f64::INFINITY;
    };
    let p = first.len();
    let mut z = vec![0.0; p];
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        z.iter_mut().for_each(|v| *v = rng.gen());
        let nearest = points.iter().map(|x| dist2(x, &z)).fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    worst.sqrt()
}

/// Maximum projection criterion
/// `ψ(D) = { [n(n−1)]^{-1} Σ_{i<j} 1/Π_k (x_ik − x_jk)² }^{1/p}`.
///
/// Smaller values mean better projections. A pair sharing a coordinate makes
/// the criterion infinite and is reported as [`Error::InfiniteCriterion`].
#[allow(clippy::needless_range_loop)]
pub fn maxpro(points: &[Vec<f64>]) -> Result<f64> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let p = points[0].len();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut prod = 1.0;
            for k in 0..p {
                let d = points[i][k] - points[j][k];
                if d == 0.0 {
                    return Err(Error::InfiniteCriterion(i, j, k));
                }
                prod *= d * d;
            }
            sum += 1.0 / prod;
        }
    }
    Ok((sum / (n as f64 * (n as f64 - 1.0))).powf(1.0 / p as f64))
}

/// [`maxpro`] with the infinite case mapped to `f64::INFINITY`.
pub fn maxpro_or_inf(points: &[Vec<f64>]) -> f64 {
    maxpro(points).unwrap_or(f64::INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeparationKind {
    /// All points of an `A_p*` design with `n` points.
    Full,
    /// Points within one slice, `n` being the full design size.
    Slice,
    /// Adults plus babies of an enlarged design with `n` adults.
    Enlarged,
}

/// Closed-form separation distances of sliced rotated sphere packing designs.
pub fn theoretical_separation(p: usize, n: usize, kind: SeparationKind) -> f64 {
    let pf = p as f64;
    let nf = (n as f64).powf(-1.0 / pf);
    match kind {
        SeparationKind::Full => pf.sqrt() * (pf + 1.0).powf((1.0 - pf) / (2.0 * pf)) * nf,
        SeparationKind::Slice => 2f64.sqrt() * (pf + 1.0).powf(1.0 / (2.0 * pf)) * nf,
        SeparationKind::Enlarged => pf.sqrt() * (pf + 1.0).powf((-1.0 - pf) / (2.0 * pf)) * nf,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub separation: f64,
    pub fill_estimate: f64,
    pub fill_samples: usize,
    /// `None` when two points share a coordinate.
    pub psi: Option<f64>,
    pub theoretical_separation: Option<f64>,
}

pub fn criterion_report<R: Rng + ?Sized>(
    points: &[Vec<f64>],
    fill_samples: usize,
    theoretical: Option<f64>,
    rng: &mut R,
) -> Result<CriterionReport> {
    Ok(CriterionReport {
        separation: separation_distance(points)?,
        fill_estimate: fill_distance_estimate(points, fill_samples, rng),
        fill_samples,
        psi: maxpro(points).ok(),
        theoretical_separation: theoretical,
    })
}
