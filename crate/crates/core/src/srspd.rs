//! Sliced rotated sphere packing designs built on `(A_p*, A_p, B)`.
//!
//! Two constructions are provided. [`partition_srspd`] builds an ordinary
//! `A_p*` design and labels each point by its coset. [`enlarge_srspd`]
//! starts from a design on the coarse lattice (the adults) and adds the
//! fine-lattice points that fall in the cube under the same `(R, δ, l)`
//! (the babies).

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{row_times, LatticeSpec};
use crate::metrics::maxpro_or_inf;
use crate::rspd::{self, construct_rspd, enumerate_window, in_box, map_to_cube, Design, RspdConfig};
use crate::slicing::{self, coarse_to_fine, coset_index, Coord, SlicedLatticeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceMode {
    Partition,
    Enlarge,
}

impl SliceMode {
    pub fn name(self) -> &'static str {
        match self {
            SliceMode::Partition => "partition",
            SliceMode::Enlarge => "enlarge",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlicedDesign {
    /// Full design; coordinates are with respect to `M_p*`.
    pub design: Design,
    /// Slice label in `1..=p+1` for every point; 1 marks adults.
    pub slice_of: Vec<usize>,
    pub slice_sizes: Vec<usize>,
    pub phi: f64,
    pub mode: SliceMode,
}

impl SlicedDesign {
    /// Labels every point of `design` by the coset of its fine coordinates.
    pub fn from_design(design: Design, mode: SliceMode) -> Self {
        let p = design.dim;
        let slice_of: Vec<usize> = design.coords.iter().map(|a| coset_index(a, p) + 1).collect();
        let mut slice_sizes = vec![0; p + 1];
        for &s in &slice_of {
            slice_sizes[s - 1] += 1;
        }
        let phi = balance(&slice_sizes, design.len()).expect("sizes sum to n");
        SlicedDesign { design, slice_of, slice_sizes, phi, mode }
    }

    pub fn dim(&self) -> usize {
        self.design.dim
    }

    pub fn len(&self) -> usize {
        self.design.len()
    }

    pub fn is_empty(&self) -> bool {
        self.design.is_empty()
    }

    pub fn slice_count(&self) -> usize {
        self.slice_sizes.len()
    }

    /// Points of slice `k` (1-based).
    pub fn slice_points(&self, k: usize) -> Vec<Vec<f64>> {
        self.design.points.iter().zip(&self.slice_of).filter(|(_, &s)| s == k).map(|(x, _)| x.clone()).collect()
    }

    pub fn adult_indices(&self) -> Vec<usize> {
        self.indices_where(|s| s == 1)
    }

    pub fn baby_indices(&self) -> Vec<usize> {
        self.indices_where(|s| s != 1)
    }

    fn indices_where(&self, f: impl Fn(usize) -> bool) -> Vec<usize> {
        (0..self.len()).filter(|&i| f(self.slice_of[i])).collect()
    }

    /// Lookup from fine coordinates to point index.
    pub fn coord_index(&self) -> HashMap<Coord, usize> {
        self.design.coords.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect()
    }

    /// Indices of the in-cube parents of baby `i`.
    pub fn parent_indices(&self, i: usize, lookup: &HashMap<Coord, usize>) -> Result<Vec<usize>> {
        let parents = slicing::parents(&self.design.coords[i], self.dim())?;
        Ok(parents.iter().filter_map(|a| lookup.get(a).copied()).collect())
    }
}

/// Partition construction: an `A_p*` design with `n` points, sliced by coset.
pub fn partition_srspd<R: Rng + ?Sized>(p: usize, n: usize, config: &RspdConfig, rng: &mut R) -> Result<SlicedDesign> {
    if n < p + 1 {
        return Err(Error::TooFewPoints { needed: p + 1, got: n });
    }
    let lattice = SlicedLatticeSpec::new(p)?;
    let design = construct_rspd(&lattice.fine, n, config, rng)?;
    Ok(SlicedDesign::from_design(design, SliceMode::Partition))
}

/// Enlarge construction: a coarse-lattice design with `n1` adults, enlarged by every
/// baby of the fine lattice inside the cube.
///
/// Adults keep the exact coordinates of the coarse design and come first.
pub fn enlarge_srspd<R: Rng + ?Sized>(p: usize, n1: usize, config: &RspdConfig, rng: &mut R) -> Result<SlicedDesign> {
    let lattice = SlicedLatticeSpec::new(p)?;
    let adults = construct_rspd(&lattice.coarse, n1, config, rng)?;
    Ok(enlarge_from(&lattice, &adults))
}

/// Adds the fine-lattice babies to an existing coarse design.
pub fn enlarge_from(lattice: &SlicedLatticeSpec, adults: &Design) -> SlicedDesign {
    let fine: &LatticeSpec = &lattice.fine;
    let l = adults.scale;
    let basis = &fine.generator * &adults.rotation;
    let margin = lattice.coarse.covering_radius.max(fine.covering_radius);
    let window = enumerate_window(&basis, l / 2.0 + margin + 1e-9);

    let mut coords: Vec<Coord> = adults.coords.iter().map(|c| coarse_to_fine(c)).collect();
    let mut points = adults.points.clone();
    for w in window {
        if coset_index(&w.coord, lattice.dim) != 0 && in_box(&w.position, &adults.delta, l) {
            points.push(map_to_cube(&w.position, &adults.delta, l));
            coords.push(w.coord);
        }
    }
    let psi = maxpro_or_inf(&points);
    let design = Design {
        dim: lattice.dim,
        points,
        coords,
        generator: fine.generator.clone(),
        rotation: adults.rotation.clone(),
        delta: adults.delta.clone(),
        scale: l,
        psi,
    };
    SlicedDesign::from_design(design, SliceMode::Enlarge)
}

/// `φ = Σ_j (n_j − n/s)²`.
pub fn balance(sizes: &[usize], n: usize) -> Result<f64> {
    let sum: usize = sizes.iter().sum();
    if sum != n {
        return Err(Error::SizeMismatch { sum, n });
    }
    let mean = n as f64 / sizes.len() as f64;
    Ok(sizes.iter().map(|&k| (k as f64 - mean).powi(2)).sum())
}

/// Index of the candidate with minimum φ, then minimum ψ, then lowest index.
pub fn select_balanced_index(scores: &[(f64, f64)]) -> Result<usize> {
    if scores.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        let b = scores[best];
        if s.0 < b.0 || (s.0 == b.0 && s.1 < b.1) {
            best = i;
        }
    }
    Ok(best)
}

pub fn select_balanced(mut candidates: Vec<SlicedDesign>) -> Result<SlicedDesign> {
    let scores: Vec<(f64, f64)> = candidates.iter().map(|c| (c.phi, c.design.psi)).collect();
    let i = select_balanced_index(&scores)?;
    Ok(candidates.swap_remove(i))
}

/// One row of a (φ, ψ) scan.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceScore {
    pub phi: f64,
    pub psi: f64,
    pub sizes: Vec<usize>,
}

/// `candidates` independent single-`(R, δ)` partition designs.
pub fn balance_candidates<R: Rng + ?Sized>(
    p: usize,
    n: usize,
    candidates: usize,
    config: &RspdConfig,
    rng: &mut R,
) -> Result<Vec<SlicedDesign>> {
    let lattice = SlicedLatticeSpec::new(p)?;
    let single = RspdConfig { candidates: 1, ..config.clone() };
    rspd::child_seeds(rng, candidates)
        .into_par_iter()
        .map(|seed| {
            let d = rspd::build_candidate(&lattice.fine, n, &single, &mut ChaCha8Rng::seed_from_u64(seed))?;
            Ok(SlicedDesign::from_design(d, SliceMode::Partition))
        })
        .collect()
}

/// (φ, ψ) of `candidates` random partition designs.
pub fn balance_scan<R: Rng + ?Sized>(
    p: usize,
    n: usize,
    candidates: usize,
    config: &RspdConfig,
    rng: &mut R,
) -> Result<Vec<BalanceScore>> {
    Ok(balance_candidates(p, n, candidates, config, rng)?
        .into_iter()
        .map(|c| BalanceScore { phi: c.phi, psi: c.design.psi, sizes: c.slice_sizes })
        .collect())
}

/// Embedded position of fine coordinates `a` under the design's `(R, δ, l)`.
pub fn position_of(design: &Design, a: &[i64]) -> Vec<f64> {
    let basis = &design.generator * &design.rotation;
    map_to_cube(&row_times(a.iter().map(|&v| v as f64), &basis), &design.delta, design.scale)
}
