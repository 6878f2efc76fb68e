//! Approximate maximin Latin hypercube designs: the best of `k` random
//! Latin hypercubes under the separation distance.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::metrics::separation_distance;

/// A random Latin hypercube with cell midpoints `(π_k(i) + 1/2) / n`.
#[allow(clippy::needless_range_loop)]
pub fn random_lhd<R: Rng + ?Sized>(n: usize, p: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; p]; n];
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..p {
        perm.shuffle(rng);
        for (i, &c) in perm.iter().enumerate() {
            points[i][k] = (c as f64 + 0.5) / n as f64;
        }
    }
    points
}

/// Best of `k` random Latin hypercubes by separation distance; ties keep the
/// earliest draw.
pub fn maximin_lhd<R: Rng + ?Sized>(n: usize, p: usize, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut best = random_lhd(n, p, rng);
    if n < 2 {
        return best;
    }
    let mut best_sep = separation_distance(&best).unwrap_or(0.0);
    for _ in 1..k {
        let cand = random_lhd(n, p, rng);
        let sep = separation_distance(&cand).unwrap_or(0.0);
        if sep > best_sep {
            best = cand;
            best_sep = sep;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn latin_property() {
        let d = maximin_lhd(13, 3, 50, &mut ChaCha8Rng::seed_from_u64(1));
        for k in 0..3 {
            let mut cells: Vec<usize> = d.iter().map(|x| (x[k] * 13.0) as usize).collect();
            cells.sort_unstable();
            assert_eq!(cells, (0..13).collect::<Vec<_>>());
        }
    }

    #[test]
    fn more_draws_never_worse() {
        let a = maximin_lhd(10, 2, 1, &mut ChaCha8Rng::seed_from_u64(4));
        let b = maximin_lhd(10, 2, 200, &mut ChaCha8Rng::seed_from_u64(4));
        assert!(separation_distance(&b).unwrap() >= separation_distance(&a).unwrap());
    }
}
