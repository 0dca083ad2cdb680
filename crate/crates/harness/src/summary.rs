//! Per (method, parameter point) aggregates.

use std::io::Write;

use crate::error::{HarnessError, Result};
use crate::records::Record;

/// Grouping key: everything that identifies a parameter point and method.
#[derive(Debug, Clone, PartialEq)]
pub struct PointKey {
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
}

impl PointKey {
    fn of(r: &Record) -> Self {
        Self {
            experiment: r.experiment.clone(),
            model: r.model.clone(),
            instance: r.instance.clone(),
            method: r.method.clone(),
            n: r.n,
            rho: r.rho,
            flip_p: r.flip_p,
            seeds: r.seeds,
            noise_var: r.noise_var,
            lambda: r.lambda,
        }
    }
}

/// Mean and sample standard deviation over the rows where a value exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl Stat {
    fn of(values: impl Iterator<Item = f64>) -> Option<Self> {
        let v: Vec<f64> = values.collect();
        if v.is_empty() {
            return None;
        }
        let count = v.len();
        let mean = v.iter().sum::<f64>() / count as f64;
        let std = if count > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std, count })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub key: PointKey,
    pub replicates: usize,
    /// Fraction of rows with `success = 1`, over rows that report success.
    pub success_rate: Option<f64>,
    pub n_correct: Option<Stat>,
    pub obj_frob_sq: Stat,
    pub obj_neg_inner: Stat,
    pub relaxed_obj: Stat,
    pub pre_proj_energy: Option<Stat>,
    pub post_proj_energy: Stat,
    pub pstar_frob_sq: Option<Stat>,
    pub pstar_neg_inner: Option<Stat>,
    pub dist_dstar_pstar: Option<Stat>,
    pub dist_dstar_pc: Option<Stat>,
    pub dist_dstar_random: Option<Stat>,
    pub kkt_violation_rate: Option<f64>,
    pub qap_cost: Option<Stat>,
    pub iterations: Stat,
    pub wall_time_ms: Stat,
}

fn stat(rows: &[&Record], f: impl Fn(&Record) -> f64) -> Stat {
    Stat::of(rows.iter().map(|r| f(r))).expect("groups are nonempty")
}

fn opt_stat(rows: &[&Record], f: impl Fn(&Record) -> Option<f64>) -> Option<Stat> {
    Stat::of(rows.iter().filter_map(|r| f(r)))
}

/// Groups records by parameter point and method, in first-appearance
/// order.
pub fn aggregate(records: &[Record]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(HarnessError::Empty("no records to aggregate".into()));
    }
    let mut groups: Vec<(PointKey, Vec<&Record>)> = Vec::new();
    for r in records {
        let key = PointKey::of(r);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, rows)) => rows.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(key, rows)| SummaryRow {
            key,
            replicates: rows.len(),
            success_rate: opt_stat(&rows, |r| r.success.map(f64::from)).map(|s| s.mean),
            n_correct: opt_stat(&rows, |r| r.n_correct.map(|c| c as f64)),
            obj_frob_sq: stat(&rows, |r| r.obj_frob_sq),
            obj_neg_inner: stat(&rows, |r| r.obj_neg_inner),
            relaxed_obj: stat(&rows, |r| r.relaxed_obj),
            pre_proj_energy: opt_stat(&rows, |r| r.pre_proj_energy),
            post_proj_energy: stat(&rows, |r| r.post_proj_energy),
            pstar_frob_sq: opt_stat(&rows, |r| r.pstar_frob_sq),
            pstar_neg_inner: opt_stat(&rows, |r| r.pstar_neg_inner),
            dist_dstar_pstar: opt_stat(&rows, |r| r.dist_dstar_pstar),
            dist_dstar_pc: opt_stat(&rows, |r| r.dist_dstar_pc),
            dist_dstar_random: opt_stat(&rows, |r| r.dist_dstar_random),
            kkt_violation_rate: opt_stat(&rows, |r| r.kkt_violated.map(f64::from)).map(|s| s.mean),
            qap_cost: opt_stat(&rows, |r| r.qap_cost),
            iterations: stat(&rows, |r| r.iterations as f64),
            wall_time_ms: stat(&rows, |r| r.wall_time_ms),
        })
        .collect())
}

/// Success rate of `method` at every point matching `filter`, in order.
pub fn success_series<'a>(
    summary: &'a [SummaryRow],
    method: &'a str,
    filter: impl Fn(&PointKey) -> bool + 'a,
) -> impl Iterator<Item = (&'a PointKey, f64)> + 'a {
    summary
        .iter()
        .filter(move |s| s.key.method == method && filter(&s.key))
        .filter_map(|s| s.success_rate.map(|r| (&s.key, r)))
}

const SUMMARY_COLUMNS: &[&str] = &[
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
    "replicates",
    "success_rate",
    "mean_n_correct",
    "mean_obj_frob_sq",
    "std_obj_frob_sq",
    "mean_obj_neg_inner",
    "std_obj_neg_inner",
    "mean_relaxed_obj",
    "mean_pre_proj_energy",
    "mean_post_proj_energy",
    "mean_pstar_frob_sq",
    "mean_pstar_neg_inner",
    "mean_dist_dstar_pstar",
    "mean_dist_dstar_pc",
    "mean_dist_dstar_random",
    "kkt_violation_rate",
    "mean_qap_cost",
    "mean_iterations",
    "mean_wall_time_ms",
];

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the summary as CSV.
pub fn write_summary<W: Write>(summary: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for s in summary {
        let k = &s.key;
        let mean = |x: Option<Stat>| cell(x.map(|s| s.mean));
        w.write_record([
            k.experiment.clone(),
            k.model.clone(),
            k.instance.clone().unwrap_or_default(),
            k.method.clone(),
            k.n.to_string(),
            cell(k.rho),
            cell(k.flip_p),
            k.seeds.to_string(),
            cell(k.noise_var),
            k.lambda.to_string(),
            s.replicates.to_string(),
            cell(s.success_rate),
            mean(s.n_correct),
            s.obj_frob_sq.mean.to_string(),
            s.obj_frob_sq.std.to_string(),
            s.obj_neg_inner.mean.to_string(),
            s.obj_neg_inner.std.to_string(),
            s.relaxed_obj.mean.to_string(),
            mean(s.pre_proj_energy),
            s.post_proj_energy.mean.to_string(),
            mean(s.pstar_frob_sq),
            mean(s.pstar_neg_inner),
            mean(s.dist_dstar_pstar),
            mean(s.dist_dstar_pc),
            mean(s.dist_dstar_random),
            cell(s.kkt_violation_rate),
            mean(s.qap_cost),
            s.iterations.mean.to_string(),
            s.wall_time_ms.mean.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::tests::sample;

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(aggregate(&[]), Err(HarnessError::Empty(_))));
    }

    #[test]
    fn single_and_pair() {
        let one = aggregate(&[sample("faq-J", 1)]).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].success_rate, Some(1.0));
        let two = aggregate(&[sample("faq-J", 0), sample("faq-J", 1)]).unwrap();
        assert_eq!(two[0].success_rate, Some(0.5));
        assert_eq!(two[0].n_correct.unwrap().mean, 3.0);
    }

    #[test]
    fn methods_and_points_are_separate_groups() {
        let mut other_rho = sample("faq-J", 1);
        other_rho.rho = Some(0.9);
        let rows = [
            sample("faq-J", 0),
            sample("faq-Dstar", 1),
            other_rho,
            sample("faq-J", 0),
        ];
        let s = aggregate(&rows).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].replicates, 2);
        assert_eq!(s[0].success_rate, Some(0.0));
        assert_eq!(s[2].key.rho, Some(0.9));
    }

    #[test]
    fn summary_csv_has_one_row_per_group() {
        let s = aggregate(&[sample("faq-J", 1), sample("faq-Dstar", 0)]).unwrap();
        let mut buf = Vec::new();
        write_summary(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("success,bernoulli,,faq-J,4,0.5"));
    }
}
