//! Replicated comparisons of adaptive strategies.
//!
//! Every replicate derives its seed from the master seed and its index only,
//! so all strategies of a replicate share their random stream, and the output
//! does not depend on thread scheduling.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptive::{run_session, SessionConfig, SessionTrace, Strategy};
use crate::benchmarks::Benchmark;
use crate::error::{Error, Result};
use crate::gp::{fold_seed, splitmix, GpConfig, GpModel};

const TEST_STREAM: u64 = 0x7E57_7E57;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub objective: String,
    pub strategy: String,
    pub rep: usize,
    pub run_index: usize,
    pub value: f64,
}

/// Seed of replicate `rep`.
pub fn rep_seed(master: u64, rep: usize) -> u64 {
    fold_seed(master, rep)
}

/// Mean absolute and root-mean-square prediction errors of `model` against
/// `objective` over `test`.
pub fn prediction_errors(model: &GpModel, objective: Benchmark, test: &[Vec<f64>]) -> Result<(f64, f64)> {
    let diffs: Vec<f64> =
        test.par_iter().map(|x| Ok(model.predict_mean(x) - objective.evaluate(x)?)).collect::<Result<_>>()?;
    let n = diffs.len() as f64;
    let mae = diffs.iter().map(|d| d.abs()).sum::<f64>() / n;
    let rmse = (diffs.iter().map(|d| d * d).sum::<f64>() / n).sqrt();
    Ok((mae, rmse))
}

pub fn uniform_points<R: Rng + ?Sized>(count: usize, p: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..p).map(|_| rng.gen::<f64>()).collect()).collect()
}

#[derive(Debug, Clone)]
pub struct EmulationSettings {
    pub n1: usize,
    /// Run counts at which the emulator is scored; each must be at least `n1`.
    pub totals: Vec<usize>,
    pub strategies: Vec<Strategy>,
    pub reps: usize,
    pub seed: u64,
    pub test_points: usize,
    pub gp: GpConfig,
}

/// Prediction errors per strategy, replicate and run count.
#[derive(Debug, Clone, Default)]
pub struct EmulationTable {
    pub mae: Vec<ExperimentRow>,
    pub rmse: Vec<ExperimentRow>,
}

/// Scores each strategy's emulator after every run count in `totals`.
///
/// Adaptive strategies run once to the largest total and are scored on
/// prefixes of the trace. The non-adaptive baseline draws a fresh design of
/// each size from the replicate seed.
pub fn emulation_experiment<F>(
    objective: Benchmark,
    settings: &EmulationSettings,
    configure: F,
) -> Result<EmulationTable>
where
    F: Fn(Strategy, usize) -> SessionConfig + Sync,
{
    let p = objective.dim();
    let max_total = *settings.totals.iter().max().ok_or(Error::EmptyCandidates)?;
    if let Some(&t) = settings.totals.iter().find(|&&t| t < settings.n1) {
        return Err(Error::Domain(format!("run count {t} is below n1 {}", settings.n1)));
    }
    if let Some(s) = settings.strategies.iter().find(|s| !s.is_emulation()) {
        return Err(Error::Domain(format!("'{}' is not an emulation strategy", s.name())));
    }
    let jobs: Vec<(Strategy, usize)> =
        settings.strategies.iter().flat_map(|&s| (0..settings.reps).map(move |r| (s, r))).collect();
    let results: Vec<Vec<(usize, f64, f64)>> = jobs
        .par_iter()
        .map(|&(strategy, rep)| {
            let seed = rep_seed(settings.seed, rep);
            let test =
                uniform_points(settings.test_points, p, &mut ChaCha8Rng::seed_from_u64(splitmix(seed ^ TEST_STREAM)));
            let mut config = configure(strategy, p);
            config.n1 = settings.n1;
            let score = |trace: &SessionTrace, t: usize| -> Result<(usize, f64, f64)> {
                let x = &trace.inputs()[..t];
                let y = &trace.outputs()[..t];
                let model = GpModel::fit(x, y, &settings.gp.clone().with_seed(fold_seed(seed, t)))?;
                let (mae, rmse) = prediction_errors(&model, objective, &test)?;
                Ok((t, mae, rmse))
            };
            if strategy == Strategy::MmLh {
                settings
                    .totals
                    .iter()
                    .map(|&t| {
                        config.total = t;
                        let s = run_session(&mut { objective }, &config, &mut ChaCha8Rng::seed_from_u64(seed))?;
                        score(&s.trace, t)
                    })
                    .collect()
            } else {
                config.total = max_total;
                let s = run_session(&mut { objective }, &config, &mut ChaCha8Rng::seed_from_u64(seed))?;
                settings.totals.iter().map(|&t| score(&s.trace, t.min(s.trace.len()))).collect()
            }
        })
        .collect::<Result<_>>()?;

    let mut table = EmulationTable::default();
    for ((strategy, rep), scores) in jobs.iter().zip(results) {
        for (t, mae, rmse) in scores {
            let row = |value| ExperimentRow {
                objective: objective.name().to_string(),
                strategy: strategy.name().to_string(),
                rep: *rep,
                run_index: t,
                value,
            };
            table.mae.push(row(mae));
            table.rmse.push(row(rmse));
        }
    }
    Ok(table)
}

/// Best-so-far value after every run, per objective, strategy and replicate.
pub fn optimization_experiment<F>(
    objectives: &[Benchmark],
    strategies: &[Strategy],
    reps: usize,
    seed: u64,
    configure: F,
) -> Result<Vec<ExperimentRow>>
where
    F: Fn(Strategy, usize) -> SessionConfig + Sync,
{
    if let Some(s) = strategies.iter().find(|s| s.is_emulation()) {
        return Err(Error::Domain(format!("'{}' is not a minimization strategy", s.name())));
    }
    let jobs: Vec<(Benchmark, Strategy, usize)> = objectives
        .iter()
        .flat_map(|&o| strategies.iter().flat_map(move |&s| (0..reps).map(move |r| (o, s, r))))
        .collect();
    let traces: Vec<SessionTrace> = jobs
        .par_iter()
        .map(|&(objective, strategy, rep)| {
            let config = configure(strategy, objective.dim());
            let mut rng = ChaCha8Rng::seed_from_u64(rep_seed(seed, rep));
            run_session(&mut { objective }, &config, &mut rng).map(|s| s.trace)
        })
        .collect::<Result<_>>()?;
    Ok(jobs
        .iter()
        .zip(traces)
        .flat_map(|(&(objective, strategy, rep), trace)| {
            trace.records.into_iter().map(move |r| ExperimentRow {
                objective: objective.name().to_string(),
                strategy: strategy.name().to_string(),
                rep,
                run_index: r.step,
                value: r.best,
            })
        })
        .collect())
}

/// Mean value per `(objective, strategy, run_index)`.
pub fn mean_by_run(rows: &[ExperimentRow]) -> Vec<(String, String, usize, f64)> {
    let mut acc: BTreeMap<(String, String, usize), (f64, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry((r.objective.clone(), r.strategy.clone(), r.run_index)).or_insert((0.0, 0));
        e.0 += r.value;
        e.1 += 1;
    }
    acc.into_iter().map(|((o, s, k), (sum, n))| (o, s, k, sum / n as f64)).collect()
}

pub const ROW_HEADER: &str = "objective\tstrategy\trep\trun_index\tvalue";

pub fn rows_to_tsv(rows: &[ExperimentRow]) -> String {
    let mut out = String::new();
    writeln!(out, "{ROW_HEADER}").unwrap();
    for r in rows {
        writeln!(out, "{}\t{}\t{}\t{}\t{:.16e}", r.objective, r.strategy, r.rep, r.run_index, r.value).unwrap();
    }
    out
}
