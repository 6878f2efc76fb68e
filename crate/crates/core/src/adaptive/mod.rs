//! Adaptive sequential designs for emulation and minimization.
//!
//! Sliced strategies run the adults of an enlarged sliced design first and
//! draw follow-up runs from its babies. The continuous strategies search the
//! cube directly.

mod criteria;
mod trace;

pub use criteria::{
    average_parent_output, cv_distance_criterion, cv_error, density_criterion, density_scale, energy_criterion,
    log_energy, nearest_distance, simplified_cv, CvEmulator, ParentAverage,
};
pub use trace::{Phase, RunRecord, SessionTrace};

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::Benchmark;
use crate::error::{Error, Result};
use crate::gp::{GpConfig, GpModel, LooMode};
use crate::lhd::maximin_lhd;
use crate::optim::maximize_in_cube;
use crate::rspd::{RotationPolicy, RspdConfig};
use crate::srspd::{enlarge_srspd, SlicedDesign};

/// A black-box function on `[0,1]^p`.
pub trait Objective {
    fn dim(&self) -> usize;
    fn evaluate(&mut self, x: &[f64]) -> Result<f64>;
}

impl Objective for Benchmark {
    fn dim(&self) -> usize {
        Benchmark::dim(*self)
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        Benchmark::evaluate(*self, x)
    }
}

/// Wraps a closure as an [`Objective`].
pub struct FnObjective<F> {
    dim: usize,
    f: F,
}

impl<F: FnMut(&[f64]) -> f64> FnObjective<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnObjective { dim, f }
    }
}

impl<F: FnMut(&[f64]) -> f64> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        Ok((self.f)(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    /// Non-adaptive maximin Latin hypercube.
    MmLh,
    /// Maximin Latin hypercube, then `g` over random probes.
    MmLhCv,
    /// Sliced design, then `g` over the baby pool.
    SrspdCv,
    /// Sliced design, then the parent-averaged simplified error.
    SrspdCv2,
    /// Maximin Latin hypercube of `n2` runs, then expected improvement.
    EiOnly,
    /// Maximin Latin hypercube, energy minimization up to `n2`, then EI.
    SmedEi,
    /// Sliced design, average parent output up to `n2`, then EI.
    SrspdEi,
}

impl Strategy {
    pub const EMULATION: [Strategy; 4] = [Strategy::MmLh, Strategy::MmLhCv, Strategy::SrspdCv, Strategy::SrspdCv2];
    pub const OPTIMIZATION: [Strategy; 3] = [Strategy::EiOnly, Strategy::SmedEi, Strategy::SrspdEi];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::MmLh => "mmlh",
            Strategy::MmLhCv => "mmlh-cv",
            Strategy::SrspdCv => "srspd-cv",
            Strategy::SrspdCv2 => "srspd-cv2",
            Strategy::EiOnly => "ei-only",
            Strategy::SmedEi => "smed-ei",
            Strategy::SrspdEi => "srspd-ei",
        }
    }

    pub fn is_emulation(self) -> bool {
        Strategy::EMULATION.contains(&self)
    }

    pub fn uses_sliced_design(self) -> bool {
        matches!(self, Strategy::SrspdCv | Strategy::SrspdCv2 | Strategy::SrspdEi)
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Strategy::EMULATION
            .into_iter()
            .chain(Strategy::OPTIMIZATION)
            .find(|st| st.name() == key)
            .ok_or_else(|| Error::Domain(format!("unknown strategy '{s}'")))
    }
}

/// Default initial size: 13 for `p = 2`, `5p` otherwise.
pub fn default_n1(p: usize) -> usize {
    if p == 2 {
        13
    } else {
        5 * p
    }
}

/// Default size of the pre-EI design: `10p`.
pub fn default_n2(p: usize) -> usize {
    10 * p
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub strategy: Strategy,
    pub n1: usize,
    /// Runs before the EI phase; used by minimization strategies.
    pub n2: usize,
    pub total: usize,
    pub gp: GpConfig,
    pub loo_mode: LooMode,
    /// Refit lengthscales after every added run. When false they stay at
    /// their initial-run values.
    pub refit: bool,
    pub rspd: RspdConfig,
    /// Uniform probes per continuous maximization.
    pub probes: usize,
    /// Best probes polished by Nelder–Mead.
    pub polish: usize,
    /// Probes per dimension for estimating `f̂_max`.
    pub fmax_probes_per_dim: usize,
    /// Floor of `d` relative to its maximum.
    pub density_floor: f64,
    /// Random Latin hypercubes drawn for the maximin baseline.
    pub lhd_draws: usize,
    /// Stop early once the selecting criterion (`g`, `ẽ` or EI) drops below
    /// this value.
    pub threshold: Option<f64>,
}

impl SessionConfig {
    /// Defaults for `strategy` in dimension `p`. Emulation runs to `10p`
    /// points; minimization to `30p`.
    pub fn new(strategy: Strategy, p: usize) -> Self {
        let n1 = default_n1(p);
        let n2 = default_n2(p);
        SessionConfig {
            strategy,
            n1,
            n2,
            total: if strategy.is_emulation() { n2 } else { 3 * n2 },
            gp: GpConfig::default(),
            loo_mode: LooMode::Refit,
            refit: true,
            rspd: RspdConfig::new(100, RotationPolicy::RandomGivens),
            probes: 5000,
            polish: 5,
            fmax_probes_per_dim: 1000,
            density_floor: 1e-6,
            lhd_draws: 1000,
            threshold: None,
        }
    }

    fn validate(&self, p: usize) -> Result<()> {
        if p < 2 {
            return Err(Error::Dimension(p));
        }
        if self.total < self.n1 {
            return Err(Error::Domain(format!("total {} is below n1 {}", self.total, self.n1)));
        }
        let cv = matches!(self.strategy, Strategy::MmLhCv | Strategy::SrspdCv | Strategy::SrspdCv2);
        if cv && self.n1 < 4 {
            return Err(Error::TooFewPoints { needed: 4, got: self.n1 });
        }
        if !self.strategy.is_emulation() {
            if self.n2 < self.n1 || self.total < self.n2 {
                return Err(Error::Domain(format!(
                    "need n1 <= n2 <= total, got {} / {} / {}",
                    self.n1, self.n2, self.total
                )));
            }
            if self.n1 < 3 {
                return Err(Error::TooFewPoints { needed: 3, got: self.n1 });
            }
        }
        if self.probes == 0 {
            return Err(Error::EmptyCandidates);
        }
        Ok(())
    }
}

/// A finished session: the run trace and, for sliced strategies, the design
/// the runs were drawn from.
#[derive(Debug, Clone)]
pub struct Session {
    pub trace: SessionTrace,
    pub design: Option<SlicedDesign>,
    /// True when a threshold ended the session before `total` runs.
    pub stopped_early: bool,
}

struct Runner<'a, O: Objective + ?Sized> {
    objective: &'a mut O,
    trace: SessionTrace,
    design: Option<SlicedDesign>,
    stopped_early: bool,
}

impl<O: Objective + ?Sized> Runner<'_, O> {
    fn run(
        &mut self,
        phase: Phase,
        slice: Option<usize>,
        index: Option<usize>,
        criterion: Option<f64>,
        x: Vec<f64>,
    ) -> Result<()> {
        let y = self.objective.evaluate(&x)?;
        if !y.is_finite() {
            return Err(Error::Evaluator(format!("non-finite output {y}")));
        }
        self.trace.push(phase, slice, index, criterion, x, y);
        Ok(())
    }

    fn run_design_point(&mut self, phase: Phase, i: usize, criterion: Option<f64>) -> Result<()> {
        let design = self.design.as_ref().expect("sliced strategy has a design");
        let (x, slice) = (design.design.points[i].clone(), design.slice_of[i]);
        self.run(phase, Some(slice), Some(i), criterion, x)
    }

    fn len(&self) -> usize {
        self.trace.len()
    }

    fn data(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        (self.trace.inputs(), self.trace.outputs())
    }

    fn below_threshold(&mut self, value: f64, threshold: Option<f64>) -> bool {
        let stop = threshold.is_some_and(|t| value < t);
        self.stopped_early |= stop;
        stop
    }
}

/// Runs an emulation strategy against `objective`.
pub fn run_emulation_session<O, R>(objective: &mut O, config: &SessionConfig, rng: &mut R) -> Result<Session>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    if !config.strategy.is_emulation() {
        return Err(Error::Domain(format!("'{}' is not an emulation strategy", config.strategy.name())));
    }
    run_session(objective, config, rng)
}

/// Runs a minimization strategy against `objective`.
pub fn run_optimization_session<O, R>(objective: &mut O, config: &SessionConfig, rng: &mut R) -> Result<Session>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    if config.strategy.is_emulation() {
        return Err(Error::Domain(format!("'{}' is not a minimization strategy", config.strategy.name())));
    }
    run_session(objective, config, rng)
}

/// Runs any strategy. Failures after the first evaluation carry the partial
/// trace.
pub fn run_session<O, R>(objective: &mut O, config: &SessionConfig, rng: &mut R) -> Result<Session>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let p = objective.dim();
    config.validate(p)?;
    let mut runner =
        Runner { objective, trace: SessionTrace::new(config.strategy.name(), p), design: None, stopped_early: false };
    match drive(&mut runner, config, rng) {
        Ok(()) => Ok(Session { trace: runner.trace, design: runner.design, stopped_early: runner.stopped_early }),
        Err(e @ Error::PoolExhausted { .. }) => Err(e),
        Err(e) => {
            Err(Error::Aborted { completed: runner.trace.len(), source: Box::new(e), partial: Box::new(runner.trace) })
        }
    }
}

fn drive<O, R>(runner: &mut Runner<'_, O>, config: &SessionConfig, rng: &mut R) -> Result<()>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let p = runner.trace.dim;
    let initial = match config.strategy {
        Strategy::MmLh => config.total,
        Strategy::EiOnly => config.n2,
        _ => config.n1,
    };
    if config.strategy.uses_sliced_design() {
        let design = enlarge_srspd(p, config.n1, &config.rspd, rng)?;
        let adults = design.adult_indices();
        runner.design = Some(design);
        for i in adults {
            runner.run_design_point(Phase::Initial, i, None)?;
        }
    } else {
        for x in maximin_lhd(initial, p, config.lhd_draws, rng) {
            runner.run(Phase::Initial, None, None, None, x)?;
        }
    }

    match config.strategy {
        Strategy::MmLh => Ok(()),
        Strategy::MmLhCv => mmlh_cv(runner, config, rng),
        Strategy::SrspdCv => srspd_cv(runner, config, rng),
        Strategy::SrspdCv2 => srspd_cv2(runner, config, rng),
        Strategy::EiOnly => ei_phase(runner, config, rng),
        Strategy::SmedEi => {
            energy_phase(runner, config, rng)?;
            ei_phase(runner, config, rng)
        }
        Strategy::SrspdEi => {
            parent_output_phase(runner, config)?;
            ei_phase(runner, config, rng)
        }
    }
}

/// Leave-one-out emulator on the completed runs, honoring `config.refit`.
fn emulator<R: Rng + ?Sized>(
    x: &[Vec<f64>],
    y: &[f64],
    config: &SessionConfig,
    frozen: &mut Option<Vec<f64>>,
    rng: &mut R,
) -> Result<CvEmulator> {
    let gp = config.gp.clone().with_seed(rng.gen());
    match (config.refit, frozen.as_ref()) {
        (false, Some(ls)) => {
            let full = GpModel::with_lengthscales(x, y, ls, gp.nugget)?;
            let loo = (0..x.len())
                .map(|i| {
                    let xs: Vec<Vec<f64>> =
                        x.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r.clone()).collect();
                    let ys: Vec<f64> = y.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
                    GpModel::with_lengthscales(&xs, &ys, ls, gp.nugget)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CvEmulator { full, loo })
        }
        _ => {
            let cv = CvEmulator::fit(x, y, &gp, config.loo_mode)?;
            if !config.refit {
                *frozen = Some(cv.full.lengthscales().to_vec());
            }
            Ok(cv)
        }
    }
}

fn pool_exhausted<O: Objective + ?Sized>(runner: &Runner<'_, O>) -> Error {
    Error::PoolExhausted { completed: runner.len(), partial: Box::new(runner.trace.clone()) }
}

/// Index (into `values`) of the largest value; ties keep the lowest index.
fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

fn mmlh_cv<O, R>(runner: &mut Runner<'_, O>, config: &SessionConfig, rng: &mut R) -> Result<()>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let p = runner.trace.dim;
    let mut frozen = None;
    while runner.len() < config.total {
        let (x, y) = runner.data();
        let cv = emulator(&x, &y, config, &mut frozen, rng)?;
        let best = maximize_in_cube(|z| cv.g(z), |_| true, p, config.probes, config.polish, rng)
            .ok_or(Error::EmptyCandidates)?;
        if runner.below_threshold(best.value, config.threshold) {
            break;
        }
        runner.run(Phase::Search, None, None, Some(best.value), best.x)?;
    }
    Ok(())
}

fn srspd_cv<O, R>(runner: &mut Runner<'_, O>, config: &SessionConfig, rng: &mut R) -> Result<()>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let design = runner.design.clone().expect("sliced strategy has a design");
    let mut pool = design.baby_indices();
    let mut frozen = None;
    while runner.len() < config.total {
        if pool.is_empty() {
            return Err(pool_exhausted(runner));
        }
        let (x, y) = runner.data();
        let cv = emulator(&x, &y, config, &mut frozen, rng)?;
        let values: Vec<f64> = pool.par_iter().map(|&i| cv.g(&design.design.points[i])).collect();
        let k = argmax(&values).ok_or(Error::EmptyCandidates)?;
        if runner.below_threshold(values[k], config.threshold) {
            break;
        }
        let i = pool.remove(k);
        runner.run_design_point(Phase::Candidate, i, Some(values[k]))?;
    }
    Ok(())
}

/// Simplified error of every baby, from models of the initial runs only.
///
/// Returns `(design index, value)` pairs in baby-index order.
pub fn simplified_cv_table(design: &SlicedDesign, adult_values: &HashMap<usize, f64>) -> Result<Vec<(usize, f64)>> {
    let current_max = adult_values.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let lookup = design.coord_index();
    design
        .baby_indices()
        .into_iter()
        .map(|i| {
            let parents: Vec<f64> =
                design.parent_indices(i, &lookup)?.iter().filter_map(|j| adult_values.get(j).copied()).collect();
            Ok((i, simplified_cv(&parents, current_max)))
        })
        .collect()
}

/// Babies ordered by decreasing value; ties keep the lower design index.
fn descending(mut table: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    table.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    table
}

fn srspd_cv2<O, R>(runner: &mut Runner<'_, O>, config: &SessionConfig, rng: &mut R) -> Result<()>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let design = runner.design.clone().expect("sliced strategy has a design");
    let (x, y) = runner.data();
    let gp = config.gp.clone().with_seed(rng.gen());
    let cv = CvEmulator::fit(&x, &y, &gp, config.loo_mode)?;
    let adult_values: HashMap<usize, f64> =
        runner.trace.records.iter().filter_map(|r| r.index.map(|i| (i, cv.error(&r.x)))).collect();
    let order = descending(simplified_cv_table(&design, &adult_values)?);
    let mut queue = order.into_iter();
    while runner.len() < config.total {
        let Some((i, value)) = queue.next() else {
            return Err(pool_exhausted(runner));
        };
        if runner.below_threshold(value, config.threshold) {
            break;
        }
        runner.run_design_point(Phase::Candidate, i, Some(value))?;
    }
    Ok(())
}

/// Average parent output of every baby, priority babies first, then by
/// increasing average; ties keep the lower design index.
pub fn parent_output_order(
    design: &SlicedDesign,
    outputs: &HashMap<usize, f64>,
) -> Result<Vec<(usize, ParentAverage)>> {
    let lookup = design.coord_index();
    let mut table = design
        .baby_indices()
        .into_iter()
        .map(|i| {
            let ys: Vec<f64> =
                design.parent_indices(i, &lookup)?.iter().filter_map(|j| outputs.get(j).copied()).collect();
            Ok((i, average_parent_output(&ys)))
        })
        .collect::<Result<Vec<_>>>()?;
    table.sort_by(|a, b| a.1.key().total_cmp(&b.1.key()).then(a.0.cmp(&b.0)));
    Ok(table)
}

fn parent_output_phase<O: Objective + ?Sized>(runner: &mut Runner<'_, O>, config: &SessionConfig) -> Result<()> {
    let design = runner.design.clone().expect("sliced strategy has a design");
    let outputs: HashMap<usize, f64> = runner.trace.records.iter().filter_map(|r| r.index.map(|i| (i, r.y))).collect();
    let mut queue = parent_output_order(&design, &outputs)?.into_iter();
    while runner.len() < config.n2 {
        let Some((i, avg)) = queue.next() else {
            return Err(pool_exhausted(runner));
        };
        let criterion = match avg {
            ParentAverage::Priority => None,
            ParentAverage::Value(v) => Some(v),
        };
        runner.run_design_point(Phase::Candidate, i, criterion)?;
    }
    Ok(())
}

fn is_completed(completed: &[Vec<f64>], x: &[f64]) -> bool {
    completed.iter().any(|c| c.as_slice() == x)
}

fn energy_phase<O, R>(runner: &mut Runner<'_, O>, config: &SessionConfig, rng: &mut R) -> Result<()>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let p = runner.trace.dim;
    while runner.len() < config.n2 {
        let (x, y) = runner.data();
        let model = GpModel::fit(&x, &y, &config.gp.clone().with_seed(rng.gen()))?;
        let probes: Vec<Vec<f64>> =
            (0..config.fmax_probes_per_dim * p).map(|_| (0..p).map(|_| rng.gen::<f64>()).collect()).collect();
        let mut evaluation: Vec<f64> = x.iter().map(|xi| model.predict_mean(xi)).collect();
        evaluation.extend(probes.par_iter().map(|z| model.predict_mean(z)).collect::<Vec<_>>());
        let (f_max, floor) = density_scale(&evaluation, config.density_floor);
        let d_runs: Vec<f64> = evaluation[..x.len()].iter().map(|&f| density_criterion(f, f_max, floor)).collect();
        let neg_log_r = |z: &[f64]| {
            let dz = density_criterion(model.predict_mean(z), f_max, floor);
            log_energy(&x, &d_runs, z, dz).map_or(f64::NEG_INFINITY, |v| -v)
        };
        let best = maximize_in_cube(neg_log_r, |z| !is_completed(&x, z), p, config.probes, config.polish, rng)
            .ok_or(Error::EmptyCandidates)?;
        runner.run(Phase::Search, None, None, Some((-best.value).exp()), best.x)?;
    }
    Ok(())
}

fn ei_phase<O, R>(runner: &mut Runner<'_, O>, config: &SessionConfig, rng: &mut R) -> Result<()>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let p = runner.trace.dim;
    while runner.len() < config.total {
        let (x, y) = runner.data();
        let model = GpModel::fit(&x, &y, &config.gp.clone().with_seed(rng.gen()))?;
        let f_min = y.iter().copied().fold(f64::INFINITY, f64::min);
        let best = maximize_in_cube(
            |z| model.expected_improvement(z, f_min),
            |z| !is_completed(&x, z),
            p,
            config.probes,
            config.polish,
            rng,
        )
        .ok_or(Error::EmptyCandidates)?;
        if runner.below_threshold(best.value, config.threshold) {
            break;
        }
        runner.run(Phase::Ei, None, None, Some(best.value), best.x)?;
    }
    Ok(())
}
