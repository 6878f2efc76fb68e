//! Coset algebra of the sliced lattice `(A_p*, A_p, B)`.
//!
//! Everything here works on integer coordinate vectors with respect to the
//! `A_p*` generator. A vector `a` lies in coset `Σ a_i mod (p+1)`; coset 0 is
//! the coarse sublattice ("adult" points), the other cosets hold the "baby"
//! points.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::{self, LatticeFamily, LatticeSpec};

pub type Coord = Vec<i64>;

/// The sliced lattice `(A_p*, A_p, B)` with `p + 1` slices.
#[derive(Debug, Clone)]
pub struct SlicedLatticeSpec {
    pub dim: usize,
    pub fine: LatticeSpec,
    /// `(I + J) M_p*`, an index-`(p+1)` sublattice of `fine`.
    pub coarse: LatticeSpec,
    /// Coset representatives `u_0, ..., u_p`.
    pub representatives: Vec<Coord>,
}

impl SlicedLatticeSpec {
    pub fn new(p: usize) -> Result<Self> {
        let fine = LatticeSpec::new(LatticeFamily::ApStar, p)?;
        let factor = (2.0 * (p as f64 + 1.0) / p as f64).sqrt();
        let coarse = LatticeSpec::new(LatticeFamily::Ap, p)?.scaled(factor);
        let representatives = (0..=p).map(|j| (0..p).map(|k| i64::from(k < j)).collect()).collect();
        Ok(SlicedLatticeSpec { dim: p, fine, coarse, representatives })
    }

    pub fn slice_count(&self) -> usize {
        self.dim + 1
    }

    /// Fine-lattice coordinates of the coarse point with coarse coordinates `c`.
    pub fn coarse_to_fine(&self, c: &[i64]) -> Coord {
        coarse_to_fine(c)
    }
}

/// `(I + J) c`: since `H = (I+J) G`, `cᵀH = ((I+J)c)ᵀ G`.
pub fn coarse_to_fine(c: &[i64]) -> Coord {
    let total: i64 = c.iter().sum();
    c.iter().map(|v| v + total).collect()
}

/// The generic sliced lattice `(L, zL, {0..z−1}^p)`.
#[derive(Debug, Clone)]
pub struct GenericSlicedSpec {
    pub generator: DMatrix<f64>,
    pub multiplier: u32,
}

impl GenericSlicedSpec {
    pub fn new(generator: DMatrix<f64>, multiplier: u32) -> Result<Self> {
        if multiplier < 2 {
            return Err(Error::Domain("multiplier must be at least 2".into()));
        }
        Ok(GenericSlicedSpec { generator, multiplier })
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    pub fn slice_count(&self) -> usize {
        (self.multiplier as usize).pow(self.dim() as u32)
    }

    /// Representative in `{0..z−1}^p` of the coset containing `a`.
    pub fn representative(&self, a: &[i64]) -> Coord {
        let z = i64::from(self.multiplier);
        a.iter().map(|v| v.rem_euclid(z)).collect()
    }

    /// Mixed-radix index of the coset containing `a`, in `0..z^p`.
    pub fn coset_index(&self, a: &[i64]) -> usize {
        let z = self.multiplier as usize;
        self.representative(a).iter().rev().fold(0usize, |acc, &r| acc * z + r as usize)
    }
}

/// `(Σ a_i) mod (p+1)`.
pub fn coset_index(a: &[i64], p: usize) -> usize {
    let s: i64 = a.iter().sum();
    s.rem_euclid(p as i64 + 1) as usize
}

pub fn is_adult(a: &[i64], p: usize) -> bool {
    coset_index(a, p) == 0
}

/// Vectors in `{0, sign}^p` with exactly `ones` nonzero entries, in
/// lexicographic order of the support.
fn binary_patterns(p: usize, ones: usize, sign: i64) -> Vec<Coord> {
    let mut out = Vec::new();
    let mut current = vec![0i64; p];
    fn rec(pos: usize, left: usize, sign: i64, cur: &mut Vec<i64>, out: &mut Vec<Coord>) {
        let p = cur.len();
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if p - pos < left {
            return;
        }
        cur[pos] = sign;
        rec(pos + 1, left - 1, sign, cur, out);
        cur[pos] = 0;
        rec(pos + 1, left, sign, cur, out);
    }
    rec(0, ones, sign, &mut current, &mut out);
    out
}

/// The adults nearest to baby `b`.
///
/// These are `b − c` for `c ∈ {0,1}^p` with `Σc = z` and for `c ∈ {0,−1}^p`
/// with `Σc = z − (p+1)`, where `z` is the coset index of `b`. The result has
/// `C(p, z) + C(p, p+1−z)` entries.
pub fn parents(b: &[i64], p: usize) -> Result<Vec<Coord>> {
    let z = coset_index(b, p);
    if z == 0 {
        return Err(Error::Domain("parents requested for an adult point".into()));
    }
    let minus = |c: &Coord| -> Coord { b.iter().zip(c).map(|(x, y)| x - y).collect() };
    let mut out: Vec<Coord> = binary_patterns(p, z, 1).iter().map(minus).collect();
    out.extend(binary_patterns(p, p + 1 - z, -1).iter().map(minus));
    Ok(out)
}

/// The `2^{p+1} − 2` babies whose parents include adult `a`.
pub fn children(a: &[i64], p: usize) -> Result<Vec<Coord>> {
    if !is_adult(a, p) {
        return Err(Error::Domain("children requested for a baby point".into()));
    }
    let mut out = Vec::with_capacity((1 << (p + 1)) - 2);
    for sign in [1i64, -1] {
        for mask in 1u32..(1 << p) {
            let c: Coord = (0..p).map(|k| if mask >> k & 1 == 1 { sign } else { 0 }).collect();
            out.push(a.iter().zip(&c).map(|(x, y)| x - y).collect());
        }
    }
    Ok(out)
}

/// Classifies every vector of `{−m..m}^p` by coset.
pub fn partition_window(p: usize, m: i64) -> BTreeMap<usize, Vec<Coord>> {
    let mut out: BTreeMap<usize, Vec<Coord>> = (0..=p).map(|z| (z, Vec::new())).collect();
    let span = (2 * m + 1) as usize;
    let mut a = vec![-m; p];
    for _ in 0..span.pow(p as u32) {
        out.get_mut(&coset_index(&a, p)).unwrap().push(a.clone());
        for v in a.iter_mut() {
            *v += 1;
            if *v > m {
                *v = -m;
            } else {
                break;
            }
        }
    }
    out
}

/// Squared distance between `aᵀM_p*` and `bᵀM_p*`.
pub fn embedded_distance2(a: &[i64], b: &[i64], fine: &LatticeSpec) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) as f64).collect();
    lattice::row_times(diff, &fine.generator).iter().map(|v| v * v).sum()
}
