//! Rotated sphere packing designs.
//!
//! A design is obtained by rotating a lattice, rescaling it so that the
//! unit cube holds `n` points on average, translating it by a perturbation
//! `δ` from the Voronoi cell of the origin that makes the count exactly `n`,
//! and keeping the points that land in `[0,1)^p`. Several `(R, δ)`
//! candidates are drawn and the one with the best MaxPro value is kept.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, row_times, unit_ball_volume, LatticeSpec, Quantizer};
use crate::metrics::maxpro_or_inf;
use crate::slicing::Coord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationPolicy {
    Identity,
    RandomGivens,
}

/// Which end of the MaxPro scale wins candidate selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsiDirection {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RspdConfig {
    /// Number of `(R, δ)` candidates.
    pub candidates: usize,
    pub rotation: RotationPolicy,
    /// δ draws per rotation before a fresh rotation is tried.
    pub max_delta_attempts: usize,
    pub max_restarts: usize,
    pub psi_direction: PsiDirection,
}

impl RspdConfig {
    /// Identity rotation with a single candidate for `p = 2`, otherwise 100
    /// random rotations.
    pub fn recommended(p: usize) -> Self {
        if p == 2 {
            RspdConfig::new(1, RotationPolicy::Identity)
        } else {
            RspdConfig::new(100, RotationPolicy::RandomGivens)
        }
    }

    pub fn new(candidates: usize, rotation: RotationPolicy) -> Self {
        RspdConfig {
            candidates,
            rotation,
            max_delta_attempts: 20_000,
            max_restarts: 20,
            psi_direction: PsiDirection::Minimize,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    /// Integer coordinates with respect to `generator`.
    pub coords: Vec<Coord>,
    pub generator: DMatrix<f64>,
    pub rotation: DMatrix<f64>,
    pub delta: Vec<f64>,
    /// The rescaling factor `l`.
    pub scale: f64,
    pub psi: f64,
}

impl Design {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(aᵀGR + δᵀ)/l + 1/2`.
    pub fn reconstruct(&self, a: &[i64]) -> Vec<f64> {
        let basis = &self.generator * &self.rotation;
        map_to_cube(&row_times(a.iter().map(|&v| v as f64), &basis), &self.delta, self.scale)
    }
}

pub(crate) fn map_to_cube(e: &[f64], delta: &[f64], l: f64) -> Vec<f64> {
    e.iter().zip(delta).map(|(x, d)| (x + d) / l + 0.5).collect()
}

/// `l = (n Ω_p / Θ)^{1/p} ρ_c`.
pub fn compute_l(n: usize, spec: &LatticeSpec) -> f64 {
    let p = spec.dim as f64;
    (n as f64 * unit_ball_volume(spec.dim) / spec.thickness()).powf(1.0 / p) * spec.covering_radius
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowPoint {
    pub coord: Coord,
    pub position: Vec<f64>,
}

/// Every lattice point `aᵀB` inside the cube `[−h, h]^p`.
///
/// Coordinate bounds come from `a_j = Σ_k y_k (B⁻¹)_{kj}` with `|y_k| ≤ h`.
pub fn enumerate_window(basis: &DMatrix<f64>, half_width: f64) -> Vec<WindowPoint> {
    let p = basis.nrows();
    let inv = basis.clone().try_inverse().expect("lattice basis must be nonsingular");
    let bounds: Vec<i64> = (0..p)
        .map(|j| {
            let col: f64 = inv.column(j).iter().map(|v| v.abs()).sum();
            (half_width * col).floor() as i64
        })
        .collect();
    let mut out = Vec::new();
    let mut a: Coord = bounds.iter().map(|b| -b).collect();
    let mut partial = vec![0.0; p];
    'outer: loop {
        // Solve the box constraints for the first coordinate given the rest.
        partial.iter_mut().for_each(|v| *v = 0.0);
        for (i, &ai) in a.iter().enumerate().skip(1) {
            for (j, v) in partial.iter_mut().enumerate() {
                *v += ai as f64 * basis[(i, j)];
            }
        }
        let (mut lo, mut hi) = (-bounds[0] as f64, bounds[0] as f64);
        for (j, &s) in partial.iter().enumerate() {
            let b = basis[(0, j)];
            if b.abs() < 1e-12 {
                if s.abs() > half_width + 1e-9 {
                    hi = lo - 1.0;
                }
                continue;
            }
            let (u, v) = ((-half_width - s) / b, (half_width - s) / b);
            lo = lo.max(u.min(v) - 1e-9);
            hi = hi.min(u.max(v) + 1e-9);
        }
        if lo <= hi {
            for a0 in lo.ceil() as i64..=hi.floor() as i64 {
                a[0] = a0;
                let e = row_times(a.iter().map(|&v| v as f64), basis);
                if e.iter().all(|v| v.abs() <= half_width) {
                    out.push(WindowPoint { coord: a.clone(), position: e });
                }
            }
        }
        a[0] = -bounds[0];
        for k in 1..p {
            a[k] += 1;
            if a[k] > bounds[k] {
                a[k] = -bounds[k];
            } else {
                continue 'outer;
            }
        }
        break;
    }
    out
}

/// Half-open membership test `−l/2 ≤ e_k + δ_k < l/2`.
pub(crate) fn in_box(e: &[f64], delta: &[f64], l: f64) -> bool {
    let h = l / 2.0;
    e.iter().zip(delta).all(|(x, d)| {
        let v = x + d;
        v >= -h && v < h
    })
}

pub fn count_in_box(window: &[WindowPoint], delta: &[f64], l: f64) -> usize {
    window.iter().filter(|w| in_box(&w.position, delta, l)).count()
}

/// Uniform draw from the Voronoi cell of the origin: a uniform point of the
/// fundamental parallelotope reduced modulo the lattice.
pub fn sample_voronoi<R: Rng + ?Sized>(quantizer: &Quantizer, rng: &mut R) -> Vec<f64> {
    let p = quantizer.dim();
    let u: Vec<f64> = (0..p).map(|_| rng.gen()).collect();
    let z = row_times(u, quantizer.basis());
    let a = quantizer.nearest(&z);
    let lp = quantizer.embed(&a);
    z.iter().zip(&lp).map(|(x, y)| x - y).collect()
}

/// Draws `δ ∈ Vor(0)` until exactly `n` window points fall in the shifted box.
pub fn find_delta<R: Rng + ?Sized>(
    window: &[WindowPoint],
    l: f64,
    n: usize,
    quantizer: &Quantizer,
    rng: &mut R,
    max_attempts: usize,
) -> Result<Vec<f64>> {
    let zero = vec![0i64; quantizer.dim()];
    for _ in 0..max_attempts {
        let delta = sample_voronoi(quantizer, rng);
        if quantizer.nearest(&delta) != zero {
            continue;
        }
        if count_in_box(window, &delta, l) == n {
            return Ok(delta);
        }
    }
    Err(Error::MaxAttemptsExceeded { attempts: max_attempts })
}

/// One `(R, δ)` candidate for `spec` with exactly `n` points.
pub fn build_candidate<R: Rng + ?Sized>(
    spec: &LatticeSpec,
    n: usize,
    config: &RspdConfig,
    rng: &mut R,
) -> Result<Design> {
    let p = spec.dim;
    let l = compute_l(n, spec);
    let mut last = Error::MaxAttemptsExceeded { attempts: 0 };
    for _ in 0..=config.max_restarts {
        let rotation = match config.rotation {
            RotationPolicy::Identity => DMatrix::identity(p, p),
            RotationPolicy::RandomGivens => lattice::random_rotation(p, rng)?,
        };
        let basis = &spec.generator * &rotation;
        let window = enumerate_window(&basis, l / 2.0 + spec.covering_radius + 1e-9);
        let quantizer = Quantizer::new(basis);
        match find_delta(&window, l, n, &quantizer, rng, config.max_delta_attempts) {
            Ok(delta) => {
                let (coords, points): (Vec<_>, Vec<_>) = window
                    .into_iter()
                    .filter(|w| in_box(&w.position, &delta, l))
                    .map(|w| {
                        let x = map_to_cube(&w.position, &delta, l);
                        (w.coord, x)
                    })
                    .unzip();
                let psi = maxpro_or_inf(&points);
                return Ok(Design {
                    dim: p,
                    points,
                    coords,
                    generator: spec.generator.clone(),
                    rotation,
                    delta,
                    scale: l,
                    psi,
                });
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Draws one child seed per candidate from the master generator.
pub(crate) fn child_seeds<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<u64> {
    (0..count).map(|_| rng.gen()).collect()
}

/// Index of the preferred value; ties go to the lowest index.
pub(crate) fn select_by_psi(psis: &[f64], direction: PsiDirection) -> usize {
    let mut best = 0;
    for (i, &v) in psis.iter().enumerate().skip(1) {
        let better = match direction {
            PsiDirection::Minimize => v < psis[best],
            PsiDirection::Maximize => v > psis[best] || (psis[best].is_infinite() && v.is_finite()),
        };
        if better {
            best = i;
        }
    }
    best
}

/// Builds `config.candidates` independent candidates and keeps the best by ψ.
///
/// Each candidate runs on its own seed drawn from `rng`, so the result does
/// not depend on thread scheduling.
pub fn construct_rspd<R: Rng + ?Sized>(
    spec: &LatticeSpec,
    n: usize,
    config: &RspdConfig,
    rng: &mut R,
) -> Result<Design> {
    if spec.dim < 2 {
        return Err(Error::Dimension(spec.dim));
    }
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    if config.candidates == 0 {
        return Err(Error::EmptyCandidates);
    }
    let mut designs = candidate_designs(spec, n, config, rng)?;
    let psis: Vec<f64> = designs.iter().map(|d| d.psi).collect();
    let best = select_by_psi(&psis, config.psi_direction);
    Ok(designs.swap_remove(best))
}

/// All `config.candidates` designs, in seed order.
pub fn candidate_designs<R: Rng + ?Sized>(
    spec: &LatticeSpec,
    n: usize,
    config: &RspdConfig,
    rng: &mut R,
) -> Result<Vec<Design>> {
    child_seeds(rng, config.candidates)
        .into_par_iter()
        .map(|seed| build_candidate(spec, n, config, &mut ChaCha8Rng::seed_from_u64(seed)))
        .collect()
}
