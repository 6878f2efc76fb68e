//! One PASS/FAIL line per acceptance criterion, each with its pinned
//! tolerance and runtime limit. Run with `cargo test --test acceptance`.

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srspd_core::adaptive::{run_session, SessionConfig, Strategy};
use srspd_core::experiment::{self, rep_seed, EmulationSettings};
use srspd_core::gp::{expected_improvement, fold_seed, loo_predictions, GpConfig, GpModel, LooMode};
use srspd_core::lattice::{gram_identities, LatticeFamily, LatticeSpec};
use srspd_core::metrics::{separation_distance, theoretical_separation, within_group_separation, SeparationKind};
use srspd_core::slicing::{children, coarse_to_fine, coset_index, embedded_distance2, is_adult, parents, Coord};
use srspd_core::srspd::{balance_scan, partition_srspd};
use srspd_core::{Benchmark, RotationPolicy, RspdConfig};

const SEED: u64 = 20_260_101;

type Outcome = Result<String, String>;

fn line(text: &str) {
    // Written past the test harness capture so the summary is always shown.
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
    let _ = out.flush();
}

fn criterion(id: usize, title: &str, limit: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let (ok, detail) = match outcome {
        Ok(d) if in_time => (true, d),
        Ok(d) => (false, format!("{d}; over the time limit")),
        Err(d) => (false, d),
    };
    let verdict = if ok { "PASS" } else { "FAIL" };
    line(&format!(
        "criterion {id:>2} {verdict} {title} | {detail} | {:.2}s of {}s",
        elapsed.as_secs_f64(),
        limit.as_secs()
    ));
    ok
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lattice_tables() -> Outcome {
    let density = [
        (LatticeFamily::Ap, [0.907, 0.740, 0.552, 0.380, 0.244, 0.148, 0.085, 0.046, 0.024]),
        (LatticeFamily::ApStar, [0.907, 0.680, 0.441, 0.255, 0.135, 0.065, 0.030, 0.013, 0.005]),
        (LatticeFamily::Zp, [0.785, 0.524, 0.308, 0.164, 0.081, 0.037, 0.016, 0.006, 0.002]),
    ];
    let thickness = [
        (LatticeFamily::Ap, [1.21, 2.09, 3.18, 5.92, 9.84, 18.9, 33.0, 64.4, 116.0]),
        (LatticeFamily::ApStar, [1.21, 1.46, 1.77, 2.12, 2.55, 3.06, 3.67, 4.39, 5.25]),
        (LatticeFamily::Zp, [1.57, 2.72, 4.93, 9.20, 17.4, 33.5, 64.9, 126.8, 249.0]),
    ];
    let mut worst_abs: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    for ((family, dens), (_, thick)) in density.iter().zip(&thickness) {
        for p in 2..=10 {
            let s = LatticeSpec::new(*family, p).map_err(|e| e.to_string())?;
            let da = (s.density() - dens[p - 2]).abs();
            let tr = (s.thickness() - thick[p - 2]).abs() / thick[p - 2];
            ensure(da <= 0.005, || format!("{} p={p} density {:.4} vs {}", family.name(), s.density(), dens[p - 2]))?;
            ensure(tr <= 0.005, || {
                format!("{} p={p} thickness {:.4} vs {}", family.name(), s.thickness(), thick[p - 2])
            })?;
            worst_abs = worst_abs.max(da);
            worst_rel = worst_rel.max(tr);
        }
    }
    Ok(format!(
        "max density error {worst_abs:.4} (tol 0.005), max thickness error {:.3}% (tol 0.5%)",
        100.0 * worst_rel
    ))
}

fn generator_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in 2..=10 {
        let g = gram_identities(p).map_err(|e| e.to_string())?;
        worst = worst.max(g.forward_residual).max(g.inverse_residual);
        ensure(g.holds(1e-10), || format!("p={p}: residuals {:e}, {:e}", g.forward_residual, g.inverse_residual))?;
    }
    Ok(format!("max entrywise residual {worst:.2e} (tol 1e-10), dual rows at norm sqrt(p)"))
}

fn random_coord<R: Rng>(p: usize, r: i64, rng: &mut R) -> Coord {
    (0..p).map(|_| rng.gen_range(-r..=r)).collect()
}

fn coset_partition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for p in 2..=6 {
        let mut seen = BTreeSet::new();
        for _ in 0..10_000 {
            let a = random_coord(p, 50, &mut rng);
            let k = coset_index(&a, p);
            ensure(k <= p, || format!("p={p}: label {k} out of range"))?;
            let exactly_one =
                (0..=p).filter(|&j| (a.iter().sum::<i64>() - j as i64).rem_euclid(p as i64 + 1) == 0).count() == 1;
            ensure(exactly_one, || format!("p={p}: {a:?} not in exactly one class"))?;
            seen.insert(k);
            let c = random_coord(p, 10, &mut rng);
            let shifted: Coord = a.iter().zip(coarse_to_fine(&c)).map(|(x, y)| x + y).collect();
            ensure(coset_index(&shifted, p) == k, || format!("p={p}: shift by {c:?} moved {a:?}"))?;
        }
        ensure(seen.len() == p + 1, || format!("p={p}: only {} classes seen", seen.len()))?;
    }
    Ok("10^4 vectors per p=2..6, every class hit, shift invariant".into())
}

fn brute_parents(b: &[i64], fine: &LatticeSpec) -> BTreeSet<Coord> {
    let p = b.len();
    let mut best = f64::INFINITY;
    let mut set = BTreeSet::new();
    let mut off = vec![-3i64; p];
    loop {
        let a: Coord = b.iter().zip(&off).map(|(x, o)| x + o).collect();
        if is_adult(&a, p) {
            let d = embedded_distance2(&a, b, fine);
            if d < best - 1e-9 {
                best = d;
                set.clear();
            }
            if (d - best).abs() <= 1e-9 {
                set.insert(a);
            }
        }
        let mut k = 0;
        loop {
            if k == p {
                return set;
            }
            off[k] += 1;
            if off[k] > 3 {
                off[k] = -3;
                k += 1;
            } else {
                break;
            }
        }
    }
}

fn parents_and_children() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    for p in 2..=4 {
        let fine = LatticeSpec::new(LatticeFamily::ApStar, p).map_err(|e| e.to_string())?;
        let want_kids = (1usize << (p + 1)) - 2;
        for _ in 0..1000 {
            let b = loop {
                let b = random_coord(p, 8, &mut rng);
                if !is_adult(&b, p) {
                    break b;
                }
            };
            let got: BTreeSet<Coord> = parents(&b, p).map_err(|e| e.to_string())?.into_iter().collect();
            let brute = brute_parents(&b, &fine);
            ensure(got == brute, || format!("p={p} b={b:?}: {got:?} vs {brute:?}"))?;
            for a in &got {
                let kids = children(a, p).map_err(|e| e.to_string())?;
                let distinct: BTreeSet<&Coord> = kids.iter().collect();
                ensure(kids.len() == want_kids && distinct.len() == want_kids, || {
                    format!("p={p} a={a:?}: {} children", kids.len())
                })?;
                ensure(kids.contains(&b), || format!("p={p}: {b:?} missing from children of {a:?}"))?;
                for kid in &kids {
                    let back = parents(kid, p).map_err(|e| e.to_string())?;
                    ensure(back.contains(a), || format!("p={p}: {a:?} is not a parent of its child {kid:?}"))?;
                }
            }
        }
    }
    Ok("10^3 babies per p=2..4 match a radius-3 search, children sizes {6, 14, 30}, duality holds".into())
}

fn separation_distances() -> Outcome {
    let mut summary = vec![];
    for p in 2..=6 {
        let n = 10 * (p + 1);
        let full = theoretical_separation(p, n, SeparationKind::Full);
        let slice = theoretical_separation(p, n, SeparationKind::Slice);
        let config = RspdConfig::recommended(p);
        let (mut eq_full, mut eq_slice) = (0, 0);
        for seed in 0..20u64 {
            let d = partition_srspd(p, n, &config, &mut ChaCha8Rng::seed_from_u64(rep_seed(SEED, seed as usize)))
                .map_err(|e| e.to_string())?;
            let s = separation_distance(&d.design.points).map_err(|e| e.to_string())?;
            ensure(s >= full - 1e-9, || format!("p={p} seed {seed}: separation {s} below {full}"))?;
            eq_full += usize::from((s - full).abs() <= 1e-6);
            let w = within_group_separation(&d.design.points, &d.slice_of).ok_or("no slice with two points")?;
            ensure(w >= slice - 1e-9, || format!("p={p} seed {seed}: slice separation {w} below {slice}"))?;
            eq_slice += usize::from((w - slice).abs() <= 1e-6);
        }
        ensure(eq_full >= 18 && eq_slice >= 18, || format!("p={p}: equality in {eq_full}/20 and {eq_slice}/20 seeds"))?;
        summary.push(format!("p={p} {eq_full}/{eq_slice}"));
    }
    Ok(format!("bounds hold (tol 1e-9); equality within 1e-6 of 20 seeds (need 18): {}", summary.join(", ")))
}

fn balance_scan_split() -> Outcome {
    let config = RspdConfig::new(100, RotationPolicy::RandomGivens);
    let mut hits = vec![];
    for master in 1..=10u64 {
        let scores =
            balance_scan(4, 50, 100, &config, &mut ChaCha8Rng::seed_from_u64(master)).map_err(|e| e.to_string())?;
        let count = scores
            .iter()
            .filter(|s| {
                let mut sizes = s.sizes.clone();
                sizes.sort_unstable();
                (s.phi - 2.0).abs() < 1e-12 && sizes == [9, 10, 10, 10, 11]
            })
            .count();
        hits.push(count);
    }
    let seeds = hits.iter().filter(|&&c| c > 0).count();
    ensure(seeds >= 1, || format!("no phi = 2 split in 10 master seeds: {hits:?}"))?;
    Ok(format!("phi = 2 with sizes {{9,10,10,10,11}} in {seeds}/10 master seeds (need 1); per-seed counts {hits:?}"))
}

fn toy(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let y = x.iter().map(|v| (5.0 * v[0]).sin() * (3.0 * v[1]).cos() + v[0]).collect();
    (x, y)
}

fn corr(u: &[f64], v: &[f64], theta: &[f64]) -> f64 {
    let s: f64 = u.iter().zip(v).zip(theta).map(|((a, b), t)| ((a - b) / t).powi(2)).sum();
    (-0.5 * s).exp()
}

/// Kriging mean from an explicit Gauss–Jordan inverse.
fn kriging_mean(x: &[Vec<f64>], y: &[f64], theta: &[f64], nugget: f64, at: &[f64]) -> f64 {
    let n = x.len();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 + nugget } else { corr(&x[i], &x[j], theta) }).collect())
        .collect();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, piv);
        inv.swap(c, piv);
        let d = a[c][c];
        for j in 0..n {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for i in (0..n).filter(|&i| i != c) {
            let f = a[i][c];
            for j in 0..n {
                a[i][j] -= f * a[c][j];
                inv[i][j] -= f * inv[c][j];
            }
        }
    }
    let ones: Vec<f64> = inv.iter().map(|r| r.iter().sum()).collect();
    let mu = ones.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / ones.iter().sum::<f64>();
    let w: Vec<f64> = inv.iter().map(|r| r.iter().zip(y).map(|(a, b)| a * (b - mu)).sum()).collect();
    mu + x.iter().zip(&w).map(|(xi, wi)| corr(xi, at, theta) * wi).sum::<f64>()
}

fn drop_fold(x: &[Vec<f64>], y: &[f64], i: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let keep = |j: &usize| *j != i;
    ((0..x.len()).filter(keep).map(|j| x[j].clone()).collect(), (0..y.len()).filter(keep).map(|j| y[j]).collect())
}

fn gp_suite() -> Outcome {
    let err = |e: srspd_core::Error| e.to_string();
    let mut worst_interp: f64 = 0.0;
    for seed in 0..5 {
        let (x, y) = toy(10, SEED + seed);
        let m = GpModel::fit(&x, &y, &GpConfig::default()).map_err(err)?;
        let range =
            y.iter().copied().fold(f64::NEG_INFINITY, f64::max) - y.iter().copied().fold(f64::INFINITY, f64::min);
        for (xi, yi) in x.iter().zip(&y) {
            let rel = (m.predict_mean(xi) - yi).abs() / range;
            worst_interp = worst_interp.max(rel);
        }
    }
    ensure(worst_interp < 1e-6, || format!("interpolation error {worst_interp:e} of range"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let draws = 200_000;
    let mut worst_z: f64 = 0.0;
    for case in 0..50 {
        let mean = rng.gen_range(-2.0..2.0);
        let sd = rng.gen_range(0.05..2.0);
        let f_min = mean + sd * rng.gen_range(-3.0..3.0);
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..draws / 2 {
            let (u1, u2): (f64, f64) = (rng.gen::<f64>().max(1e-300), rng.gen());
            let r = (-2.0 * u1.ln()).sqrt();
            for z in [r * (std::f64::consts::TAU * u2).cos(), r * (std::f64::consts::TAU * u2).sin()] {
                let v = (f_min - (mean + sd * z)).max(0.0);
                sum += v;
                sum2 += v * v;
            }
        }
        let nf = draws as f64;
        let mc = sum / nf;
        let se = ((sum2 / nf - mc * mc) / nf).sqrt();
        let ei = expected_improvement(mean, sd, f_min);
        ensure((ei - mc).abs() <= 3.0 * se + 1e-12, || format!("EI case {case}: {ei} vs {mc} ± {se}"))?;
        worst_z = worst_z.max((ei - mc).abs() / se.max(1e-300));
    }

    let mut worst_loo: f64 = 0.0;
    let at = vec![vec![0.31, 0.72], vec![0.05, 0.5], vec![0.9, 0.15]];
    for n in [5, 8, 10] {
        let (x, y) = toy(n, SEED + 100 + n as u64);
        let config = GpConfig::default().with_seed(SEED);
        let theta = GpModel::fit(&x, &y, &config).map_err(err)?.lengthscales().to_vec();
        let frozen = loo_predictions(&x, &y, &config, LooMode::Frozen, &at).map_err(err)?;
        let refit = loo_predictions(&x, &y, &config, LooMode::Refit, &at).map_err(err)?;
        for i in 0..n {
            let (xs, ys) = drop_fold(&x, &y, i);
            let fold = GpModel::fit(&xs, &ys, &config.clone().with_seed(fold_seed(SEED, i))).map_err(err)?;
            for (k, z) in at.iter().enumerate() {
                let a = (frozen[i][k] - kriging_mean(&xs, &ys, &theta, config.nugget, z)).abs();
                let b = (refit[i][k] - kriging_mean(&xs, &ys, fold.lengthscales(), config.nugget, z)).abs();
                worst_loo = worst_loo.max(a).max(b);
            }
        }
    }
    ensure(worst_loo < 1e-8, || format!("LOO deviates from the per-fold oracle by {worst_loo:e}"))?;
    Ok(format!(
        "interpolation {worst_interp:.1e} of range (tol 1e-6); EI within {worst_z:.2} MC standard errors (tol 3); LOO {worst_loo:.1e} (tol 1e-8)"
    ))
}

fn emulation_session() -> Outcome {
    let err = |e: srspd_core::Error| e.to_string();
    let reps = 25;
    let bound = theoretical_separation(2, 13, SeparationKind::Enlarged);
    let configure = |s: Strategy, p: usize| {
        let mut c = SessionConfig::new(s, p);
        c.n1 = 13;
        c.total = 20;
        c
    };
    let mut worst_gap = f64::INFINITY;
    for rep in 0..reps {
        let config = configure(Strategy::SrspdCv2, 2);
        let s = run_session(&mut Benchmark::Franke, &config, &mut ChaCha8Rng::seed_from_u64(rep_seed(SEED, rep)))
            .map_err(err)?;
        ensure(s.trace.len() == 20, || format!("rep {rep}: {} runs", s.trace.len()))?;
        let sep = separation_distance(&s.trace.inputs()).map_err(err)?;
        ensure(sep >= bound - 1e-9, || format!("rep {rep}: separation {sep} below {bound}"))?;
        worst_gap = worst_gap.min(sep - bound);
    }
    let settings = EmulationSettings {
        n1: 13,
        totals: vec![20],
        strategies: vec![Strategy::MmLh, Strategy::SrspdCv2],
        reps,
        seed: SEED,
        test_points: 10_000,
        gp: GpConfig::default(),
    };
    let table = experiment::emulation_experiment(Benchmark::Franke, &settings, configure).map_err(err)?;
    let mean = |name: &str| {
        let v: Vec<f64> = table.mae.iter().filter(|r| r.strategy == name).map(|r| r.value).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let (baseline, adaptive) = (mean("mmlh"), mean("srspd-cv2"));
    ensure(adaptive < baseline, || format!("MAE {adaptive:.5} not below baseline {baseline:.5}"))?;
    Ok(format!(
        "separation >= bound - 1e-9 in 25/25 reps (min slack {worst_gap:.2e}); mean MAE {adaptive:.5} < baseline {baseline:.5}"
    ))
}

fn optimization_session() -> Outcome {
    let err = |e: srspd_core::Error| e.to_string();
    let (minimum, _) = Benchmark::Branin.known_minimum().ok_or("no known minimum")?;
    let rows =
        experiment::optimization_experiment(&[Benchmark::Branin], &[Strategy::SrspdEi], 20, SEED, SessionConfig::new)
            .map_err(err)?;
    let mut hits = 0;
    let mut monotone = 0;
    let mut finals = vec![];
    for rep in 0..20 {
        let trace: Vec<f64> = rows.iter().filter(|r| r.rep == rep).map(|r| r.value).collect();
        ensure(trace.len() == 60, || format!("rep {rep}: {} runs", trace.len()))?;
        monotone += usize::from(trace.windows(2).all(|w| w[1] <= w[0]));
        let best = *trace.last().unwrap();
        hits += usize::from(best <= minimum + 0.5);
        finals.push(best);
    }
    ensure(monotone == 20, || format!("{monotone}/20 monotone traces"))?;
    ensure(hits >= 16, || format!("{hits}/20 seeds within 0.5 of the minimum"))?;
    let worst = finals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(format!("{hits}/20 seeds within min + 0.5 (need 16), worst best {worst:.4}; 20/20 traces monotone"))
}

fn run_cli(args: &[&str], dir: &Path) -> (Vec<u8>, Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_srspd"))
        .args(args)
        .current_dir(dir)
        .env_remove("SRSPD_SEED")
        .output()
        .expect("binary runs");
    (out.stdout, out.stderr, out.status.code())
}

fn determinism() -> Outcome {
    let invocations: &[&[&str]] = &[
        &["generate", "--p", "3", "--n", "40", "--mode", "partition", "--seed", "5", "--out", "design.txt"],
        &["generate", "--p", "2", "--n1", "13", "--mode", "enlarge", "--seed", "5"],
        &["generate", "--p", "4", "--n", "50", "--mode", "partition", "--balance", "--w", "20", "--seed", "5"],
        &["metrics", "design.txt", "--seed", "5"],
        &["scan", "--p", "4", "--n", "50", "--candidates", "30", "--seed", "5"],
        &["tables"],
        &["adapt", "--objective", "franke", "--strategy", "srspd-cv2", "--seed", "5", "--out", "cv2.tsv"],
        &["adapt", "--objective", "franke", "--strategy", "mmlh-cv", "--total", "16", "--probes", "500", "--seed", "5"],
        &["adapt", "--objective", "branin", "--strategy", "srspd-ei", "--total", "24", "--seed", "5"],
        &["adapt", "--objective", "hartmann3", "--strategy", "smed-ei", "--total", "36", "--seed", "5"],
        &["emulate", "--totals", "13,16", "--reps", "3", "--test-points", "1000", "--seed", "5", "--out", "em.tsv"],
        &["optimize", "--objectives", "branin", "--reps", "2", "--total", "24", "--seed", "5"],
        &["plot-script", "--kind", "design"],
    ];
    let files = ["design.txt", "cv2.tsv", "em.tsv", "em.tsv.rmse"];
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    for args in invocations {
        let first = run_cli(args, a.path());
        let second = run_cli(args, b.path());
        ensure(first.2 == Some(0), || {
            format!("`{}` exited {:?}: {}", args.join(" "), first.2, String::from_utf8_lossy(&first.1))
        })?;
        ensure(first == second, || format!("`{}` differs between runs", args.join(" ")))?;
    }
    for f in files {
        let x = std::fs::read(a.path().join(f)).map_err(|e| format!("{f}: {e}"))?;
        let y = std::fs::read(b.path().join(f)).map_err(|e| format!("{f}: {e}"))?;
        ensure(x == y, || format!("{f} differs between runs"))?;
    }
    let env_run = |dir: &Path| {
        Command::new(env!("CARGO_BIN_EXE_srspd"))
            .args(["generate", "--p", "2", "--n", "20", "--mode", "partition"])
            .current_dir(dir)
            .env("SRSPD_SEED", "11")
            .output()
            .map(|o| o.stdout)
    };
    ensure(env_run(a.path()).ok() == env_run(b.path()).ok(), || "SRSPD_SEED run differs".into())?;
    Ok(format!("{} invocations and {} output files byte-identical across two runs", invocations.len() + 1, files.len()))
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let results = [
        criterion(1, "lattice tables", secs(1), lattice_tables),
        criterion(2, "generator identities", secs(1), generator_identities),
        criterion(3, "coset partition", secs(10), coset_partition),
        criterion(4, "parents and children", secs(30), parents_and_children),
        criterion(5, "separation distances", secs(120), separation_distances),
        criterion(6, "balance scan", secs(300), balance_scan_split),
        criterion(7, "GP and EI suite", secs(120), gp_suite),
        criterion(8, "emulation session", secs(900), emulation_session),
        criterion(9, "optimization session", secs(1200), optimization_session),
        criterion(10, "determinism", secs(600), determinism),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    line(&format!("acceptance: {passed}/{} criteria passed", results.len()));
    assert_eq!(passed, results.len());
}
