//! Small derivative-free search routines used by the GP fit and the
//! continuous acquisition steps.

use rand::Rng;
use rayon::prelude::*;

/// Bounded Nelder–Mead minimization. Trial points are clamped to the box.
///
/// The returned value is never worse than `f(x0)`.
pub fn nelder_mead<F>(
    f: F,
    x0: &[f64],
    step: f64,
    lower: &[f64],
    upper: &[f64],
    max_evals: usize,
    ftol: f64,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let clamp = |x: &mut Vec<f64>| {
        for k in 0..n {
            x[k] = x[k].clamp(lower[k], upper[k]);
        }
    };
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut start = x0.to_vec();
    clamp(&mut start);
    let f0 = eval(&start);
    simplex.push((start.clone(), f0));
    for k in 0..n {
        let mut v = start.clone();
        v[k] += step;
        if v[k] > upper[k] {
            v[k] = start[k] - step;
        }
        clamp(&mut v);
        let fv = eval(&v);
        simplex.push((v, fv));
    }
    let mut evals = n + 1;

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if (worst - best).abs() <= ftol * (best.abs() + ftol) {
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|k| simplex[..n].iter().map(|s| s.0[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            let mut v: Vec<f64> = (0..n).map(|k| centroid[k] + t * (simplex[n].0[k] - centroid[k])).collect();
            clamp(&mut v);
            v
        };
        let xr = along(-1.0);
        let fr = eval(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe);
            evals += 1;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let x = along(-0.5);
                let v = eval(&x);
                (x, v)
            } else {
                let x = along(0.5);
                let v = eval(&x);
                (x, v)
            };
            evals += 1;
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    let mut v: Vec<f64> = s.0.iter().zip(&x_best).map(|(a, b)| b + 0.5 * (a - b)).collect();
                    clamp(&mut v);
                    s.1 = eval(&v);
                    s.0 = v;
                }
                evals += n;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    if v <= f0 {
        (x, v)
    } else {
        (start, f0)
    }
}

/// Result of a probe-and-polish search over the unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeOptimum {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Maximizes `f` over `[0,1]^p`: evaluate `probes` uniform points, then
/// polish the best `polish` of them with Nelder–Mead.
///
/// `admissible` rejects points (e.g. existing runs); rejected points never
/// win. Ties keep the earliest probe.
pub fn maximize_in_cube<F, A, R>(
    f: F,
    admissible: A,
    p: usize,
    probes: usize,
    polish: usize,
    rng: &mut R,
) -> Option<CubeOptimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
    A: Fn(&[f64]) -> bool + Sync,
    R: Rng + ?Sized,
{
    let points: Vec<Vec<f64>> = (0..probes).map(|_| (0..p).map(|_| rng.gen::<f64>()).collect()).collect();
    let values: Vec<f64> = points.par_iter().map(|x| if admissible(x) { f(x) } else { f64::NEG_INFINITY }).collect();
    let mut order: Vec<usize> = (0..probes).filter(|&i| values[i] > f64::NEG_INFINITY && !values[i].is_nan()).collect();
    if order.is_empty() {
        return None;
    }
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let lower = vec![0.0; p];
    let upper = vec![1.0; p];
    let neg = |x: &[f64]| if admissible(x) { -f(x) } else { f64::INFINITY };
    let polished: Vec<CubeOptimum> = order
        .iter()
        .take(polish)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&i| {
            let (x, v) = nelder_mead(neg, &points[i], 0.02, &lower, &upper, 60 * (p + 1), 1e-10);
            CubeOptimum { x, value: -v }
        })
        .collect();

    let mut best = CubeOptimum { x: points[order[0]].clone(), value: values[order[0]] };
    for c in polished {
        if c.value > best.value {
            best = c;
        }
    }
    Some(best)
}
