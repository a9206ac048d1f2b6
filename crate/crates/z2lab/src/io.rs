//! Text and JSON file formats.
//!
//! * Sets: one integer (or `m,n` lattice point) per line, `#` comment lines, blank lines ignored.
//! * Matrices: `{"rows": r, "cols": c, "re": [[…]], "im": [[…]]}`.
//! * Tuples and polynomials: `{"n": …, "d": …, "mats": [matrix…], "frequencies": […]}`.
//! * Families: `{"n": …, "d": …, "ops": [matrix…]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use z2lab_core::fock::IsometryFamily;
use z2lab_core::fourier::TrigMatrixPoly;
use z2lab_core::intsets::{FiniteSet, IntegerSet, LatticeSet};
use z2lab_core::rcnorms::MatrixTuple;
use z2lab_core::{CMat, C64};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] z2lab_core::Error),
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

enum Entry {
    Int(i64),
    Pair(i64, i64),
}

fn parse_entry(s: &str) -> Option<Entry> {
    match s.split_once(',') {
        Some((a, b)) => Some(Entry::Pair(a.trim().parse().ok()?, b.trim().parse().ok()?)),
        None => s.parse().ok().map(Entry::Int),
    }
}

/// Parses the set file format; integer and lattice lines may not be mixed.
pub fn parse_set(text: &str) -> Result<FiniteSet, IoError> {
    let mut ints = Vec::new();
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| IoError::Parse {
            line: i + 1,
            message,
        };
        match parse_entry(line).ok_or_else(|| err(format!("cannot parse {line:?}")))? {
            Entry::Int(x) => ints.push(x),
            Entry::Pair(a, b) => pairs.push((a, b)),
        }
        if !ints.is_empty() && !pairs.is_empty() {
            return Err(err("mixes integers and lattice points".into()));
        }
    }
    Ok(if pairs.is_empty() {
        IntegerSet::try_from_distinct(ints)?.into()
    } else {
        LatticeSet::try_from_distinct(pairs)?.into()
    })
}

pub fn read_set(path: &Path) -> Result<FiniteSet, IoError> {
    parse_set(&read_text(path)?)
}

/// Integer sets only.
pub fn read_integer_set(path: &Path) -> Result<IntegerSet, IoError> {
    match read_set(path)? {
        FiniteSet::Integers(v) => Ok(v),
        FiniteSet::Lattice(_) => Err(IoError::Format(
            "this command needs an integer set, not lattice points".into(),
        )),
    }
}

pub fn format_set(set: &FiniteSet) -> String {
    let mut out = String::new();
    match set {
        FiniteSet::Integers(v) => v
            .elements()
            .iter()
            .for_each(|x| out.push_str(&format!("{x}\n"))),
        FiniteSet::Lattice(v) => v
            .points()
            .iter()
            .for_each(|(a, b)| out.push_str(&format!("{a},{b}\n"))),
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMat> for MatrixJson {
    fn from(m: &CMat) -> Self {
        let grid = |f: fn(C64) -> f64| {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| f(m[(i, j)])).collect())
                .collect()
        };
        Self {
            rows: m.rows(),
            cols: m.cols(),
            re: grid(|z| z.re),
            im: grid(|z| z.im),
        }
    }
}

impl TryFrom<&MatrixJson> for CMat {
    type Error = IoError;

    fn try_from(j: &MatrixJson) -> Result<Self, IoError> {
        let ok = |g: &Vec<Vec<f64>>| g.len() == j.rows && g.iter().all(|r| r.len() == j.cols);
        if !ok(&j.re) || !ok(&j.im) {
            return Err(IoError::Format(format!(
                "matrix entries do not match {}x{}",
                j.rows, j.cols
            )));
        }
        let data =
            j.re.iter()
                .flatten()
                .zip(j.im.iter().flatten())
                .map(|(&a, &b)| C64::new(a, b))
                .collect();
        Ok(CMat::from_vec(j.rows, j.cols, data)?)
    }
}

pub fn mats_json(mats: &[CMat]) -> Vec<MatrixJson> {
    mats.iter().map(MatrixJson::from).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleJson {
    pub n: usize,
    pub d: usize,
    pub mats: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<Vec<i64>>,
}

impl From<&MatrixTuple> for TupleJson {
    fn from(t: &MatrixTuple) -> Self {
        Self {
            n: t.n(),
            d: t.len(),
            mats: mats_json(t.mats()),
            frequencies: t.frequencies().map(<[i64]>::to_vec),
        }
    }
}

impl From<&TrigMatrixPoly> for TupleJson {
    fn from(p: &TrigMatrixPoly) -> Self {
        Self::from(p.tuple())
    }
}

impl TupleJson {
    pub fn to_tuple(&self) -> Result<MatrixTuple, IoError> {
        if self.mats.len() != self.d {
            return Err(IoError::Format(format!(
                "\"d\" is {} but {} matrices were given",
                self.d,
                self.mats.len()
            )));
        }
        if let Some(m) = self
            .mats
            .iter()
            .find(|m| m.rows != self.n || m.cols != self.n)
        {
            return Err(IoError::Format(format!(
                "\"n\" is {} but a matrix is {}x{}",
                self.n, m.rows, m.cols
            )));
        }
        let mats = self
            .mats
            .iter()
            .map(CMat::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(match &self.frequencies {
            Some(f) => MatrixTuple::with_frequencies(mats, f.clone())?,
            None => MatrixTuple::new(mats)?,
        })
    }

    pub fn to_poly(&self) -> Result<TrigMatrixPoly, IoError> {
        if self.frequencies.is_none() {
            return Err(IoError::Format(
                "polynomial file needs \"frequencies\"".into(),
            ));
        }
        Ok(TrigMatrixPoly::from_tuple(self.to_tuple()?)?)
    }
}

pub fn read_tuple(path: &Path) -> Result<MatrixTuple, IoError> {
    serde_json::from_str::<TupleJson>(&read_text(path)?)?.to_tuple()
}

pub fn read_poly(path: &Path) -> Result<TrigMatrixPoly, IoError> {
    serde_json::from_str::<TupleJson>(&read_text(path)?)?.to_poly()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub n: usize,
    pub d: usize,
    pub ops: Vec<MatrixJson>,
}

impl From<&IsometryFamily> for FamilyJson {
    fn from(f: &IsometryFamily) -> Self {
        Self {
            n: f.n,
            d: f.d,
            ops: mats_json(&f.ops),
        }
    }
}
