//! Generator matrices and geometric constants for the root lattice `A_p`,
//! its dual `A_p*` and the integer lattice `Z^p`.
//!
//! Generators are stored row-major: each row is a basis vector, and a
//! lattice point is `aᵀG` for an integer coordinate vector `a`. The `A_p`
//! and `A_p*` generators below have unit-norm rows, so both lattices have
//! minimum distance 1 and packing radius 1/2 at their canonical scale.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LatticeFamily {
    Ap,
    ApStar,
    Zp,
}

impl LatticeFamily {
    pub fn name(self) -> &'static str {
        match self {
            LatticeFamily::Ap => "Ap",
            LatticeFamily::ApStar => "ApStar",
            LatticeFamily::Zp => "Zp",
        }
    }
}

impl std::str::FromStr for LatticeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Ap" | "ap" | "A" => Ok(LatticeFamily::Ap),
            "ApStar" | "apstar" | "A*" => Ok(LatticeFamily::ApStar),
            "Zp" | "zp" | "Z" => Ok(LatticeFamily::Zp),
            other => Err(Error::Domain(format!("unknown lattice family '{other}'"))),
        }
    }
}

/// A lattice together with the geometry needed to build designs from it.
///
/// `scale` multiplies the canonical generator; radii and determinant are
/// scaled accordingly so that density and thickness are scale-free.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    pub family: LatticeFamily,
    pub dim: usize,
    pub scale: f64,
    pub generator: DMatrix<f64>,
    pub det: f64,
    pub covering_radius: f64,
    pub packing_radius: f64,
}

impl LatticeSpec {
    pub fn new(family: LatticeFamily, dim: usize) -> Result<Self> {
        let generator = generator_matrix(family, dim)?;
        let det = generator.determinant().abs();
        Ok(LatticeSpec {
            family,
            dim,
            scale: 1.0,
            generator,
            det,
            covering_radius: canonical_covering_radius(family, dim),
            packing_radius: 0.5,
        })
    }

    /// The same lattice with every point multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        LatticeSpec {
            family: self.family,
            dim: self.dim,
            scale: self.scale * factor,
            generator: &self.generator * factor,
            det: self.det * factor.powi(self.dim as i32),
            covering_radius: self.covering_radius * factor,
            packing_radius: self.packing_radius * factor,
        }
    }

    pub fn min_distance(&self) -> f64 {
        2.0 * self.packing_radius
    }

    pub fn density(&self) -> f64 {
        unit_ball_volume(self.dim) * self.packing_radius.powi(self.dim as i32) / self.det
    }

    pub fn thickness(&self) -> f64 {
        unit_ball_volume(self.dim) * self.covering_radius.powi(self.dim as i32) / self.det
    }

    pub fn quantizer(&self) -> Quantizer {
        Quantizer::new(self.generator.clone())
    }
}

fn check_dim(p: usize) -> Result<()> {
    if p < 2 {
        Err(Error::Dimension(p))
    } else {
        Ok(())
    }
}

/// Canonical generator for `family` in dimension `p`.
///
/// `A_p`: `(√2/2) I − ((√(p+1)+1)/(√2 p)) J`.
/// `A_p*`: `(√(p+1)/√p) I − 1/(√p (√(p+1)−1)) J`.
pub fn generator_matrix(family: LatticeFamily, p: usize) -> Result<DMatrix<f64>> {
    check_dim(p)?;
    let pf = p as f64;
    let s = (pf + 1.0).sqrt();
    let (diag, off) = match family {
        LatticeFamily::Ap => (std::f64::consts::FRAC_1_SQRT_2, -(s + 1.0) / (std::f64::consts::SQRT_2 * pf)),
        LatticeFamily::ApStar => (s / pf.sqrt(), -1.0 / (pf.sqrt() * (s - 1.0))),
        LatticeFamily::Zp => (1.0, 0.0),
    };
    Ok(DMatrix::from_fn(p, p, |i, j| if i == j { diag + off } else { off }))
}

/// Covering radius of the canonical (unit-norm-row) generators.
fn canonical_covering_radius(family: LatticeFamily, p: usize) -> f64 {
    let pf = p as f64;
    match family {
        LatticeFamily::Zp => pf.sqrt() / 2.0,
        // deep holes of A_p sit at the glue vector [a], a = ⌊(p+1)/2⌋
        LatticeFamily::Ap => {
            let a = p.div_ceil(2) as f64;
            (a * (pf + 1.0 - a) / (2.0 * (pf + 1.0))).sqrt()
        }
        LatticeFamily::ApStar => ((pf + 2.0) / 12.0).sqrt(),
    }
}

pub fn covering_radius(spec: &LatticeSpec) -> f64 {
    spec.covering_radius
}

pub fn density(spec: &LatticeSpec) -> f64 {
    spec.density()
}

pub fn thickness(spec: &LatticeSpec) -> f64 {
    spec.thickness()
}

/// Volume of the unit ball in `p` dimensions, `π^{p/2} / Γ(p/2 + 1)`.
pub fn unit_ball_volume(p: usize) -> f64 {
    let half = p as f64 / 2.0;
    (half * PI.ln() - ln_gamma(half + 1.0)).exp()
}

/// Coarse generator of the `(A_p*, A_p)` sliced lattice: `(I + J) M_p*`.
///
/// This equals `√(2(p+1)/p) M_p` and generates an index-`(p+1)` sublattice
/// of the lattice generated by `M_p*`.
pub fn coarse_generator(p: usize) -> Result<DMatrix<f64>> {
    let fine = generator_matrix(LatticeFamily::ApStar, p)?;
    Ok(i_plus_j(p) * fine)
}

fn i_plus_j(p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |i, j| if i == j { 2.0 } else { 1.0 })
}

/// Residuals of the two identities linking `M_p` and `M_p*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramReport {
    pub p: usize,
    /// Scalar applied to `M_p*` so that `(I+J) M_p*` lands on `√(2(p+1)) M_p`.
    pub dual_normalization: f64,
    /// max |√(2(p+1)) M_p − (I+J) M*|
    pub forward_residual: f64,
    /// max |M* − (I − J/(p+1)) √(2(p+1)) M_p|
    pub inverse_residual: f64,
}

impl GramReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.forward_residual < tol && self.inverse_residual < tol
    }
}

/// Checks `√(2(p+1)) M_p = (I+J) M*` and `M* = (I − J/(p+1)) √(2(p+1)) M_p`
/// entrywise.
///
/// The identities hold for the dual generator at norm `√p` per row, i.e.
/// `M* = √p · generator_matrix(ApStar, p)`; the canonical unit-row `M_p*`
/// satisfies them up to that scalar.
pub fn gram_identities(p: usize) -> Result<GramReport> {
    let mp = generator_matrix(LatticeFamily::Ap, p)?;
    let normalization = (p as f64).sqrt();
    let dual = generator_matrix(LatticeFamily::ApStar, p)? * normalization;
    let pf = p as f64;
    let coarse = mp * (2.0 * (pf + 1.0)).sqrt();

    let forward = &coarse - i_plus_j(p) * &dual;
    let i_minus = DMatrix::from_fn(p, p, |i, j| {
        let jv = 1.0 / (pf + 1.0);
        if i == j {
            1.0 - jv
        } else {
            -jv
        }
    });
    let inverse = &dual - i_minus * &coarse;
    Ok(GramReport {
        p,
        dual_normalization: normalization,
        forward_residual: forward.amax(),
        inverse_residual: inverse.amax(),
    })
}

/// Givens rotation `R_p(i, j, α)` with zero-based indices `i < j < p`.
pub fn givens_rotation(p: usize, i: usize, j: usize, alpha: f64) -> Result<DMatrix<f64>> {
    if i >= j || j >= p {
        return Err(Error::Index { p, i, j });
    }
    let mut r = DMatrix::identity(p, p);
    let (s, c) = alpha.sin_cos();
    r[(i, i)] = c;
    r[(i, j)] = -s;
    r[(j, i)] = s;
    r[(j, j)] = c;
    Ok(r)
}

/// Product of the `p(p−1)/2` Givens rotations over pairs `(i, j)`, `i < j`,
/// in lexicographic order, each angle uniform on `[0, 2π)`.
pub fn random_rotation<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    check_dim(p)?;
    let mut out = DMatrix::identity(p, p);
    for i in 0..p {
        for j in (i + 1)..p {
            let alpha = rng.gen::<f64>() * 2.0 * PI;
            out *= givens_rotation(p, i, j, alpha)?;
        }
    }
    Ok(out)
}

/// Nearest-lattice-point search for an arbitrary basis.
///
/// Rounds the basis coordinates of the target, then searches the integer
/// offsets in `{-window..window}^p` around that guess.
#[derive(Debug, Clone)]
pub struct Quantizer {
    basis: DMatrix<f64>,
    inverse: DMatrix<f64>,
    window: i64,
}

impl Quantizer {
    pub fn new(basis: DMatrix<f64>) -> Self {
        let inverse = basis.clone().try_inverse().expect("lattice basis must be nonsingular");
        Quantizer { basis, inverse, window: 1 }
    }

    pub fn with_window(mut self, window: i64) -> Self {
        self.window = window;
        self
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Embeds integer coordinates: returns `aᵀB`.
    pub fn embed(&self, a: &[i64]) -> Vec<f64> {
        row_times(a.iter().map(|&v| v as f64), &self.basis)
    }

    /// Integer coordinates of a nearest lattice point to `z`.
    pub fn nearest(&self, z: &[f64]) -> Vec<i64> {
        let p = self.dim();
        let guess: Vec<i64> =
            row_times(z.iter().copied(), &self.inverse).into_iter().map(|v| v.round() as i64).collect();
        let base = self.embed(&guess);
        let resid: Vec<f64> = z.iter().zip(&base).map(|(a, b)| a - b).collect();

        let span = (2 * self.window + 1) as usize;
        let total = span.pow(p as u32);
        let mut best = f64::INFINITY;
        let mut best_offset = vec![0i64; p];
        let mut offset = vec![-self.window; p];
        let mut shift = vec![0.0; p];
        for _ in 0..total {
            shift.iter_mut().for_each(|v| *v = 0.0);
            for (k, &o) in offset.iter().enumerate() {
                if o != 0 {
                    let row = self.basis.row(k);
                    for (s, b) in shift.iter_mut().zip(row.iter()) {
                        *s += o as f64 * b;
                    }
                }
            }
            let d2: f64 = resid.iter().zip(&shift).map(|(r, s)| (r - s) * (r - s)).sum();
            if d2 < best - 1e-14 || (d2 <= best + 1e-14 && offset.iter().all(|&o| o == 0)) {
                best = d2.min(best);
                best_offset.copy_from_slice(&offset);
            }
            for o in offset.iter_mut() {
                *o += 1;
                if *o > self.window {
                    *o = -self.window;
                } else {
                    break;
                }
            }
        }
        guess.iter().zip(&best_offset).map(|(g, o)| g + o).collect()
    }
}

/// Nearest point of `spec`'s lattice to `z`, as integer coordinates.
pub fn voronoi_quantize(spec: &LatticeSpec, z: &[f64]) -> Vec<i64> {
    spec.quantizer().nearest(z)
}

/// Row vector times matrix: `vᵀM`.
pub(crate) fn row_times(v: impl IntoIterator<Item = f64>, m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = vec![0.0; m.ncols()];
    for (k, vk) in v.into_iter().enumerate() {
        if vk == 0.0 {
            continue;
        }
        for (o, mk) in out.iter_mut().zip(m.row(k).iter()) {
            *o += vk * mk;
        }
    }
    out
}
