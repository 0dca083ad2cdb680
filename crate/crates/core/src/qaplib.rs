//! QAPLIB instance files and the QAP objective.
//!
//! A `.dat` file holds `n` followed by the `n × n` flow matrix and the
//! `n × n` distance matrix, all whitespace separated. A `.sln` file holds
//! `n`, the optimal cost and a 1-based optimal permutation.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;

use crate::error::{check_dim, Error, Result};
use crate::matrix::{AdjacencyMatrix, Permutation};
use crate::solver::MatchProblem;

/// Names of the benchmark suite, one per line; `#` starts a comment.
pub const BUNDLED_MANIFEST: &str = include_str!("../data/qaplib/manifest.txt");

/// Directory holding the instance files shipped with this crate.
pub fn bundled_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("qaplib")
}

#[derive(Debug, Clone, PartialEq)]
pub struct QapInstance {
    pub name: String,
    pub flow: Array2<f64>,
    pub distance: Array2<f64>,
}

impl QapInstance {
    pub fn new(name: impl Into<String>, flow: Array2<f64>, distance: Array2<f64>) -> Result<Self> {
        for m in [&flow, &distance] {
            let (rows, cols) = m.dim();
            if rows != cols {
                return Err(Error::NotSquare { rows, cols });
            }
            if m.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Domain(
                    "QAP matrices must be finite and nonnegative".into(),
                ));
            }
        }
        check_dim(flow.nrows(), distance.nrows())?;
        Ok(Self {
            name: name.into(),
            flow,
            distance,
        })
    }

    pub fn n(&self) -> usize {
        self.flow.nrows()
    }

    /// Graph-matching form whose minimizers are the QAP minimizers:
    /// `A = flow`, `B = −distance`, so that `‖A − PBP^T‖² = ‖A‖² + ‖B‖² + 2 qap_cost`.
    pub fn to_match_problem(&self) -> Result<MatchProblem> {
        let directed = !is_symmetric(&self.flow) || !is_symmetric(&self.distance);
        let a = AdjacencyMatrix::new(self.flow.clone(), directed)?;
        let b = AdjacencyMatrix::new(self.distance.mapv(|v| -v), directed)?;
        MatchProblem::new(a, b)
    }
}

fn is_symmetric(m: &Array2<f64>) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..i).all(|j| m[[i, j]] == m[[j, i]]))
}

fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
}

fn number(position: usize, token: &str) -> Result<f64> {
    token
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            position,
            token: token.to_string(),
        })
}

fn order(token: Option<&str>) -> Result<usize> {
    let token = token.ok_or(Error::Malformed {
        expected: 1,
        found: 0,
    })?;
    token.parse::<usize>().map_err(|_| Error::Parse {
        position: 0,
        token: token.to_string(),
    })
}

/// Parses the `.dat` format. The instance name is left empty.
pub fn parse_qaplib(text: &str) -> Result<QapInstance> {
    parse_named("", text)
}

fn parse_named(name: &str, text: &str) -> Result<QapInstance> {
    let toks: Vec<&str> = tokens(text).collect();
    let n = order(toks.first().copied())?;
    let expected = 1 + 2 * n * n;
    if toks.len() != expected {
        return Err(Error::Malformed {
            expected,
            found: toks.len(),
        });
    }
    let values = toks[1..]
        .iter()
        .enumerate()
        .map(|(k, t)| number(k + 1, t))
        .collect::<Result<Vec<f64>>>()?;
    let (f, d) = values.split_at(n * n);
    let flow = Array2::from_shape_vec((n, n), f.to_vec()).expect("length checked");
    let distance = Array2::from_shape_vec((n, n), d.to_vec()).expect("length checked");
    QapInstance::new(name, flow, distance)
}

/// Writes the `.dat` format; integral entries are written without a
/// fractional part.
pub fn to_qaplib_string(instance: &QapInstance) -> String {
    let mut out = format!("{}\n", instance.n());
    for m in [&instance.flow, &instance.distance] {
        out.push('\n');
        for row in m.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Contents of a `.sln` file.
#[derive(Debug, Clone, PartialEq)]
pub struct QapSolution {
    pub cost: f64,
    pub permutation: Permutation,
}

pub fn parse_solution(text: &str) -> Result<QapSolution> {
    let toks: Vec<&str> = tokens(text).collect();
    let n = order(toks.first().copied())?;
    let expected = 2 + n;
    if toks.len() != expected {
        return Err(Error::Malformed {
            expected,
            found: toks.len(),
        });
    }
    let cost = number(1, toks[1])?;
    let map = toks[2..]
        .iter()
        .enumerate()
        .map(|(k, t)| match t.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(Error::Parse {
                position: k + 2,
                token: t.to_string(),
            }),
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(QapSolution {
        cost,
        permutation: Permutation::new(map)?,
    })
}

/// `Σ_{i,j} flow[i, j] · distance[P(i), P(j)]`.
pub fn qap_cost(instance: &QapInstance, p: &Permutation) -> Result<f64> {
    check_dim(instance.n(), p.len())?;
    let map = p.as_slice();
    let (f, d) = (&instance.flow, &instance.distance);
    let mut acc = 0.0;
    for (i, &pi) in map.iter().enumerate() {
        for (j, &pj) in map.iter().enumerate() {
            acc += f[[i, j]] * d[[pi, pj]];
        }
    }
    Ok(acc)
}

/// `‖AP − PB‖²_F` with `A = flow` and `B = distance`, which equals
/// `‖A‖² + ‖B‖² − 2 qap_cost`.
pub fn frobenius_form(instance: &QapInstance, p: &Permutation) -> Result<f64> {
    check_dim(instance.n(), p.len())?;
    let map = p.as_slice();
    let (f, d) = (&instance.flow, &instance.distance);
    let mut acc = 0.0;
    for (i, &pi) in map.iter().enumerate() {
        for (j, &pj) in map.iter().enumerate() {
            let r = f[[i, j]] - d[[pi, pj]];
            acc += r * r;
        }
    }
    Ok(acc)
}

/// A file [`load_suite`] could not use.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub reason: Error,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Suite {
    /// Sorted by name.
    pub instances: Vec<QapInstance>,
    pub skipped: Vec<SkippedFile>,
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Reads one `.dat` file; the instance is named after the file stem.
pub fn load_instance(path: &Path) -> Result<QapInstance> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_named(&name, &text)
}

/// Parses every `.dat` file in `dir`.
pub fn load_suite(dir: &Path) -> Result<Suite> {
    let entries = fs::read_dir(dir).map_err(|e| io_error(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| io_error(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "dat") {
            paths.push(path);
        }
    }
    paths.sort();
    let mut suite = Suite::default();
    for path in paths {
        match load_instance(&path) {
            Ok(inst) => suite.instances.push(inst),
            Err(reason) => suite.skipped.push(SkippedFile { path, reason }),
        }
    }
    suite.instances.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(suite)
}

/// Instance names listed in a manifest.
pub fn parse_manifest(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

/// Loads the manifest instances found in `dir`, in manifest order. Names
/// without a readable `<name>.dat` are returned as skipped.
pub fn load_manifest_suite(dir: &Path, names: &[String]) -> Result<Suite> {
    if !dir.is_dir() {
        return Err(Error::Io {
            path: dir.display().to_string(),
            message: "not a directory".into(),
        });
    }
    let mut suite = Suite::default();
    for name in names {
        let path = dir.join(format!("{name}.dat"));
        match load_instance(&path) {
            Ok(inst) => suite.instances.push(inst),
            Err(reason) => suite.skipped.push(SkippedFile { path, reason }),
        }
    }
    Ok(suite)
}

/// Reads `<name>.sln` from `dir` if present.
pub fn load_solution(dir: &Path, name: &str) -> Result<Option<QapSolution>> {
    let path = dir.join(format!("{name}.sln"));
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(|e| io_error(&path, e))?;
    parse_solution(&text).map(Some)
}
