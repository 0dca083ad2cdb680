//! CSV rows, one per (method, parameter point, replicate).

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{io_err, Result};

/// Column order of the CSV output. `wall_time_ms` is always last so that
/// runs can be compared with it stripped.
pub const COLUMNS: &[&str] = &[
    "experiment",
    "model",
    "instance",
    "method",
    "n",
    "rho",
    "flip_p",
    "seeds",
    "noise_var",
    "lambda",
    "replicate",
    "stream",
    "success",
    "n_correct",
    "pre_proj_energy",
    "post_proj_energy",
    "obj_frob_sq",
    "obj_neg_inner",
    "relaxed_obj",
    "pstar_frob_sq",
    "pstar_neg_inner",
    "fw_gap",
    "iterations",
    "converged",
    "dist_dstar_pstar",
    "dist_dstar_pc",
    "dist_dstar_random",
    "kkt_violated",
    "min_kkt_margin",
    "oracle_opt",
    "qap_cost",
    "wall_time_ms",
];

/// One experiment row. Empty cells mean "not applicable".
///
/// Energies are `‖A'X − XB‖²`: `pre_proj_energy` at the convex optimum
/// `D*`, `post_proj_energy` at the returned permutation. Objectives
/// `obj_*` are evaluated at the returned permutation, `relaxed_obj` at the
/// final (pre-projection) iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub experiment: String,
    pub model: String,
    pub instance: Option<String>,
    pub method: String,
    pub n: usize,
    pub rho: Option<f64>,
    pub flip_p: Option<f64>,
    pub seeds: usize,
    pub noise_var: Option<f64>,
    pub lambda: f64,
    pub replicate: usize,
    pub stream: u64,
    pub success: Option<u8>,
    pub n_correct: Option<usize>,
    pub pre_proj_energy: Option<f64>,
    pub post_proj_energy: f64,
    pub obj_frob_sq: f64,
    pub obj_neg_inner: f64,
    pub relaxed_obj: f64,
    pub pstar_frob_sq: Option<f64>,
    pub pstar_neg_inner: Option<f64>,
    pub fw_gap: f64,
    pub iterations: usize,
    pub converged: u8,
    pub dist_dstar_pstar: Option<f64>,
    pub dist_dstar_pc: Option<f64>,
    pub dist_dstar_random: Option<f64>,
    pub kkt_violated: Option<u8>,
    pub min_kkt_margin: Option<f64>,
    pub oracle_opt: Option<f64>,
    pub qap_cost: Option<f64>,
    pub wall_time_ms: f64,
}

impl Record {
    pub fn succeeded(&self) -> bool {
        self.success == Some(1)
    }
}

/// Writes a header row and every record, LF line endings.
pub fn write_csv<W: Write>(records: &[Record], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_csv_file(records: &[Record], path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let file = File::create(path).map_err(io_err(path))?;
    write_csv(records, io::BufWriter::new(file))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<Record>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

pub fn read_csv_file(path: &Path) -> Result<Vec<Record>> {
    let file = File::open(path).map_err(io_err(path))?;
    read_csv(io::BufReader::new(file))
}

/// The CSV text with the trailing `wall_time_ms` column removed from every
/// line, for run-to-run comparison.
pub fn strip_wall_time(csv_text: &str) -> String {
    csv_text
        .lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}
