//! Session records and their tab-delimited text form.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    /// Initial design runs.
    Initial,
    /// Additions restricted to the baby pool.
    Candidate,
    /// Continuous additions by `g` or energy.
    Search,
    /// Expected-improvement additions.
    Ei,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Initial => "initial",
            Phase::Candidate => "candidate",
            Phase::Search => "search",
            Phase::Ei => "ei",
        }
    }
}

impl std::str::FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Phase::Initial, Phase::Candidate, Phase::Search, Phase::Ei]
            .into_iter()
            .find(|ph| ph.name() == s)
            .ok_or_else(|| Error::Data(format!("unknown phase '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// 1-based run number.
    pub step: usize,
    pub phase: Phase,
    /// Slice label when the run is a design point.
    pub slice: Option<usize>,
    /// Index into the sliced design when the run is a design point.
    pub index: Option<usize>,
    /// Criterion value that selected the run.
    pub criterion: Option<f64>,
    pub x: Vec<f64>,
    pub y: f64,
    /// Running minimum of `y`.
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionTrace {
    pub strategy: String,
    pub dim: usize,
    pub records: Vec<RunRecord>,
}

fn opt_usize(v: Option<usize>) -> String {
    v.map_or_else(|| "NA".into(), |v| v.to_string())
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

impl SessionTrace {
    pub fn new(strategy: &str, dim: usize) -> Self {
        SessionTrace { strategy: strategy.to_string(), dim, records: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn inputs(&self) -> Vec<Vec<f64>> {
        self.records.iter().map(|r| r.x.clone()).collect()
    }

    pub fn outputs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.y).collect()
    }

    pub fn best(&self) -> Option<f64> {
        self.records.last().map(|r| r.best)
    }

    pub fn push(
        &mut self,
        phase: Phase,
        slice: Option<usize>,
        index: Option<usize>,
        criterion: Option<f64>,
        x: Vec<f64>,
        y: f64,
    ) {
        let best = self.best().map_or(y, |b| b.min(y));
        self.records.push(RunRecord { step: self.records.len() + 1, phase, slice, index, criterion, x, y, best });
    }

    pub fn header(&self) -> String {
        let mut cols = vec!["step", "phase", "slice", "index", "criterion", "y", "best"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>();
        cols.extend((1..=self.dim).map(|k| format!("x{k}")));
        cols.join("\t")
    }

    /// One `#strategy` line, a column header, then one line per run.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "#strategy\t{}\tdim\t{}", self.strategy, self.dim).unwrap();
        writeln!(out, "{}", self.header()).unwrap();
        for r in &self.records {
            let mut fields = vec![
                r.step.to_string(),
                r.phase.name().to_string(),
                opt_usize(r.slice),
                opt_usize(r.index),
                r.criterion.map_or_else(|| "NA".into(), num),
                num(r.y),
                num(r.best),
            ];
            fields.extend(r.x.iter().map(|v| num(*v)));
            writeln!(out, "{}", fields.join("\t")).unwrap();
        }
        out
    }

    /// Parses [`SessionTrace::to_tsv`] output. Leading `#` comment lines
    /// other than the `#strategy` line are skipped.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().peekable();
        let bad = |line: usize, msg: &str| Error::Data(format!("line {}: {msg}", line + 1));
        while lines.next_if(|(_, l)| l.starts_with('#') && !l.starts_with("#strategy")).is_some() {}
        let (i0, first) = lines.next().ok_or_else(|| Error::Data("empty trace".into()))?;
        let meta: Vec<&str> = first.split('\t').collect();
        if meta.len() != 4 || meta[0] != "#strategy" || meta[2] != "dim" {
            return Err(bad(i0, "expected '#strategy' line"));
        }
        let dim: usize = meta[3].parse().map_err(|_| bad(i0, "bad dimension"))?;
        let mut trace = SessionTrace::new(meta[1], dim);
        let (i1, header) = lines.next().ok_or_else(|| Error::Data("missing header".into()))?;
        if header != trace.header() {
            return Err(bad(i1, "unexpected column header"));
        }
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 7 + dim {
                return Err(bad(i, &format!("expected {} fields, found {}", 7 + dim, f.len())));
            }
            let float = |s: &str| s.parse::<f64>().map_err(|_| bad(i, &format!("bad number '{s}'")));
            let opt = |s: &str| -> Result<Option<usize>> {
                if s == "NA" {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| bad(i, &format!("bad integer '{s}'")))
                }
            };
            trace.records.push(RunRecord {
                step: f[0].parse().map_err(|_| bad(i, "bad step"))?,
                phase: f[1].parse().map_err(|_| bad(i, "bad phase"))?,
                slice: opt(f[2])?,
                index: opt(f[3])?,
                criterion: if f[4] == "NA" { None } else { Some(float(f[4])?) },
                y: float(f[5])?,
                best: float(f[6])?,
                x: f[7..].iter().map(|s| float(s)).collect::<Result<_>>()?,
            });
        }
        Ok(trace)
    }
}
