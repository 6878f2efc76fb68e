//! Tab-delimited design files.
//!
//! ```text
//! #srspd-design
//! p       2
//! n       30
//! s       3
//! family  ApStar
//! mode    partition
//! seed    7
//! l       ...
//! R       r11 r12 r21 r22
//! delta   d1 d2
//! slice   a1 a2 x1 x2
//! 1       0  0  ...
//! ```
//!
//! Reals are written with 17 significant digits so that reading a file back
//! reproduces every value exactly.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use srspd_core::lattice::generator_matrix;
use srspd_core::metrics::maxpro_or_inf;
use srspd_core::srspd::{SliceMode, SlicedDesign};
use srspd_core::{Design, LatticeFamily};

pub const MAGIC: &str = "#srspd-design";

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignFile {
    pub family: LatticeFamily,
    pub seed: Option<u64>,
    pub sliced: SlicedDesign,
}

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn join(values: impl IntoIterator<Item = String>) -> String {
    values.into_iter().collect::<Vec<_>>().join("\t")
}

pub fn write_design(file: &DesignFile) -> String {
    let d = &file.sliced.design;
    let p = d.dim;
    let mut out = String::new();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "p\t{p}").unwrap();
    writeln!(out, "n\t{}", d.len()).unwrap();
    writeln!(out, "s\t{}", file.sliced.slice_count()).unwrap();
    writeln!(out, "family\t{}", file.family.name()).unwrap();
    writeln!(out, "mode\t{}", file.sliced.mode.name()).unwrap();
    if let Some(seed) = file.seed {
        writeln!(out, "seed\t{seed}").unwrap();
    }
    writeln!(out, "l\t{}", num(d.scale)).unwrap();
    let rot = (0..p).flat_map(|i| (0..p).map(move |j| (i, j))).map(|(i, j)| num(d.rotation[(i, j)]));
    writeln!(out, "R\t{}", join(rot)).unwrap();
    writeln!(out, "delta\t{}", join(d.delta.iter().map(|v| num(*v)))).unwrap();
    let mut cols = vec!["slice".to_string()];
    cols.extend((1..=p).map(|k| format!("a{k}")));
    cols.extend((1..=p).map(|k| format!("x{k}")));
    writeln!(out, "{}", cols.join("\t")).unwrap();
    for i in 0..d.len() {
        let mut f = vec![file.sliced.slice_of[i].to_string()];
        f.extend(d.coords[i].iter().map(|v| v.to_string()));
        f.extend(d.points[i].iter().map(|v| num(*v)));
        writeln!(out, "{}", f.join("\t")).unwrap();
    }
    out
}

fn parse_floats(fields: &[&str], line: usize) -> Result<Vec<f64>, ParseError> {
    fields.iter().map(|s| s.parse::<f64>().map_err(|_| err(line, format!("bad number '{s}'")))).collect()
}

pub fn read_design(text: &str) -> Result<DesignFile, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, MAGIC)) => {}
        Some((i, _)) => return Err(err(i, format!("expected '{MAGIC}'"))),
        None => return Err(err(1, "empty file")),
    }
    let mut p = None;
    let mut n = None;
    let mut s = None;
    let mut family = None;
    let mut mode = None;
    let mut seed = None;
    let mut l = None;
    let mut rot = None;
    let mut delta = None;
    let mut header_line = 0;
    for (i, line) in lines.by_ref() {
        let f: Vec<&str> = line.split('\t').collect();
        let one = || -> Result<&str, ParseError> {
            if f.len() == 2 {
                Ok(f[1])
            } else {
                Err(err(i, format!("'{}' takes one value", f[0])))
            }
        };
        let int = |v: &str| v.parse::<usize>().map_err(|_| err(i, format!("bad integer '{v}'")));
        match f[0] {
            "p" => p = Some(int(one()?)?),
            "n" => n = Some(int(one()?)?),
            "s" => s = Some(int(one()?)?),
            "family" => family = Some(one()?.parse::<LatticeFamily>().map_err(|e| err(i, e.to_string()))?),
            "mode" => {
                mode = Some(match one()? {
                    "partition" => SliceMode::Partition,
                    "enlarge" => SliceMode::Enlarge,
                    other => return Err(err(i, format!("unknown mode '{other}'"))),
                })
            }
            "seed" => seed = Some(one()?.parse::<u64>().map_err(|_| err(i, "bad seed"))?),
            "l" => l = Some(parse_floats(&[one()?], i)?[0]),
            "R" => rot = Some((i, parse_floats(&f[1..], i)?)),
            "delta" => delta = Some((i, parse_floats(&f[1..], i)?)),
            "slice" => {
                header_line = i;
                break;
            }
            "" => continue,
            other => return Err(err(i, format!("unknown header field '{other}'"))),
        }
    }
    if header_line == 0 {
        return Err(err(text.lines().count().max(1), "missing column header"));
    }
    let missing = |name: &str| err(header_line, format!("header field '{name}' missing"));
    let p = p.ok_or_else(|| missing("p"))?;
    let n = n.ok_or_else(|| missing("n"))?;
    let family = family.ok_or_else(|| missing("family"))?;
    let mode = mode.ok_or_else(|| missing("mode"))?;
    let l = l.ok_or_else(|| missing("l"))?;
    let (ri, rot) = rot.ok_or_else(|| missing("R"))?;
    let (di, delta) = delta.ok_or_else(|| missing("delta"))?;
    if rot.len() != p * p {
        return Err(err(ri, format!("R needs {} values, found {}", p * p, rot.len())));
    }
    if delta.len() != p {
        return Err(err(di, format!("delta needs {p} values, found {}", delta.len())));
    }
    let generator = generator_matrix(family, p).map_err(|e| err(header_line, e.to_string()))?;

    let mut coords = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 1 + 2 * p {
            return Err(err(i, format!("expected {} fields, found {}", 1 + 2 * p, f.len())));
        }
        labels.push((i, f[0].parse::<usize>().map_err(|_| err(i, format!("bad slice '{}'", f[0])))?));
        let a = f[1..=p]
            .iter()
            .map(|v| v.parse::<i64>().map_err(|_| err(i, format!("bad coordinate '{v}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        coords.push((i, a));
        points.push(parse_floats(&f[p + 1..], i)?);
    }
    if points.len() != n {
        return Err(err(header_line, format!("header says n = {n} but {} records follow", points.len())));
    }
    let design = Design {
        dim: p,
        psi: maxpro_or_inf(&points),
        points,
        coords: coords.iter().map(|(_, a)| a.clone()).collect(),
        generator,
        rotation: DMatrix::from_row_slice(p, p, &rot),
        delta,
        scale: l,
    };
    for (k, (i, a)) in coords.iter().enumerate() {
        let x = design.reconstruct(a);
        if x.iter().zip(&design.points[k]).any(|(u, v)| (u - v).abs() > 1e-9) {
            return Err(err(*i, "point does not match its lattice coordinates"));
        }
    }
    let sliced = SlicedDesign::from_design(design, mode);
    for (k, (i, label)) in labels.iter().enumerate() {
        if sliced.slice_of[k] != *label {
            return Err(err(*i, format!("slice {label} disagrees with coset label {}", sliced.slice_of[k])));
        }
    }
    if let Some(s) = s {
        if s != sliced.slice_count() {
            return Err(err(header_line, format!("header says s = {s}, lattice gives {}", sliced.slice_count())));
        }
    }
    Ok(DesignFile { family, seed, sliced })
}

/// Bare point list: one point per line, whitespace separated; `#` starts a
/// comment.
pub fn read_points(text: &str) -> Result<Vec<Vec<f64>>, ParseError> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let f: Vec<&str> = body.split_whitespace().collect();
        let x = parse_floats(&f, i + 1)?;
        if let Some(first) = out.first() {
            if first.len() != x.len() {
                return Err(err(i + 1, format!("expected {} values, found {}", first.len(), x.len())));
            }
        }
        out.push(x);
    }
    Ok(out)
}
