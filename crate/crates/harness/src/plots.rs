//! Plain-text series plus a generated matplotlib script.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{io_err, HarnessError, Result};
use crate::spec::ExperimentKind;
use crate::summary::{Stat, SummaryRow};

/// A labelled polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotArtifacts {
    pub script: PathBuf,
    pub data_files: Vec<PathBuf>,
    pub series: Vec<Series>,
    /// Vertical reference line, when the x axis is ρ.
    pub threshold: Option<f64>,
}

/// `1 − 1/(2(1 − α))`.
pub fn rho_threshold(alpha: f64) -> f64 {
    1.0 - 1.0 / (2.0 * (1.0 - alpha))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Axis {
    Rho,
    Flip,
    Seeds,
    Noise,
    Instance,
}

impl Axis {
    fn label(self) -> &'static str {
        match self {
            Axis::Rho => "correlation rho",
            Axis::Flip => "bit-flip probability p",
            Axis::Seeds => "number of seeds",
            Axis::Noise => "feature noise variance",
            Axis::Instance => "instance",
        }
    }
}

fn axis(kind: ExperimentKind, summary: &[SummaryRow]) -> Axis {
    match kind {
        ExperimentKind::Seeds => Axis::Seeds,
        ExperimentKind::Features => Axis::Noise,
        ExperimentKind::Qaplib => Axis::Instance,
        _ if summary.iter().all(|s| s.key.rho.is_none()) => Axis::Flip,
        _ => Axis::Rho,
    }
}

fn y_label(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Energy => "||A'X - XB||_F^2",
        ExperimentKind::Distance => "Frobenius distance from D*",
        ExperimentKind::ObjectiveTrace => "-<A'D, DB>",
        ExperimentKind::KktCheck => "fraction with a violated KKT pair",
        ExperimentKind::Qaplib => "QAP cost",
        _ => "success rate",
    }
}

fn push(series: &mut Vec<Series>, label: String, x: f64, y: Option<f64>) {
    let Some(y) = y else { return };
    match series.iter_mut().find(|s| s.label == label) {
        Some(s) => s.points.push((x, y)),
        None => series.push(Series {
            label,
            points: vec![(x, y)],
        }),
    }
}

fn mean(s: Option<Stat>) -> Option<f64> {
    s.map(|s| s.mean)
}

/// Builds the polylines that `emit_plots` writes.
pub fn build_series(summary: &[SummaryRow], kind: ExperimentKind) -> Result<Vec<Series>> {
    if summary.is_empty() {
        return Err(HarnessError::Empty("summary has no methods to plot".into()));
    }
    let ax = axis(kind, summary);
    let mut series = Vec::new();
    let mut instances: Vec<String> = Vec::new();
    for s in summary {
        let k = &s.key;
        let m = &k.method;
        let x = match ax {
            Axis::Rho => k.rho.unwrap_or(f64::NAN),
            Axis::Flip => k.flip_p.unwrap_or(f64::NAN),
            Axis::Seeds => k.seeds as f64,
            Axis::Noise => match k.noise_var {
                Some(v) => v,
                // Featureless baseline, placed on the axis below.
                None => continue,
            },
            Axis::Instance => {
                let name = k.instance.clone().unwrap_or_default();
                let idx = instances.iter().position(|i| *i == name).unwrap_or_else(|| {
                    instances.push(name);
                    instances.len() - 1
                });
                idx as f64
            }
        };
        let rho_tag = k.rho.map(|r| format!(" rho={r}")).unwrap_or_default();
        match kind {
            ExperimentKind::Energy => {
                push(&mut series, "D*".into(), x, mean(s.pre_proj_energy));
                push(&mut series, format!("P ({m})"), x, Some(s.post_proj_energy.mean));
                push(&mut series, "P*".into(), x, mean(s.pstar_frob_sq));
            }
            ExperimentKind::Distance => {
                push(&mut series, "D* to P_c".into(), x, mean(s.dist_dstar_pc));
                push(&mut series, "D* to P*".into(), x, mean(s.dist_dstar_pstar));
                push(&mut series, "D* to random".into(), x, mean(s.dist_dstar_random));
            }
            ExperimentKind::ObjectiveTrace => {
                push(
                    &mut series,
                    format!("{m} (pre-projection)"),
                    x,
                    Some(s.relaxed_obj.mean),
                );
                push(&mut series, "P*".into(), x, mean(s.pstar_neg_inner));
            }
            ExperimentKind::KktCheck => push(&mut series, m.clone(), x, s.kkt_violation_rate),
            ExperimentKind::Qaplib => push(&mut series, m.clone(), x, mean(s.qap_cost)),
            ExperimentKind::Seeds => push(&mut series, format!("{m}{rho_tag}"), x, s.success_rate),
            ExperimentKind::Features => {
                push(&mut series, format!("{m}{rho_tag} features"), x, s.success_rate);
                let baseline = summary.iter().find(|b| {
                    b.key.noise_var.is_none()
                        && b.key.method == k.method
                        && b.key.rho == k.rho
                        && b.key.flip_p == k.flip_p
                });
                if let Some(b) = baseline {
                    push(
                        &mut series,
                        format!("{m}{rho_tag} no features"),
                        x,
                        b.success_rate,
                    );
                }
            }
            _ => push(&mut series, m.clone(), x, s.success_rate),
        }
    }
    if series.is_empty() {
        return Err(HarnessError::Empty(format!("nothing to plot for {kind}")));
    }
    Ok(series)
}

fn file_stem(label: &str) -> String {
    let mut out = String::new();
    for c in label.chars() {
        match c {
            c if c.is_ascii_alphanumeric() => out.push(c.to_ascii_lowercase()),
            '*' => out.push_str("star"),
            '.' => out.push('p'),
            _ if !out.ends_with('_') => out.push('_'),
            _ => {}
        }
    }
    out.trim_matches('_').to_string()
}

/// Writes one `x y` data file per series and `plot_<kind>.py` into `dir`.
/// `alpha` enables the threshold line when the x axis is ρ.
pub fn emit_plots(
    summary: &[SummaryRow],
    kind: ExperimentKind,
    alpha: Option<f64>,
    dir: &Path,
) -> Result<PlotArtifacts> {
    let series = build_series(summary, kind)?;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let ax = axis(kind, summary);
    let threshold = alpha.filter(|_| ax == Axis::Rho).map(rho_threshold);

    let mut data_files = Vec::new();
    for (i, s) in series.iter().enumerate() {
        let path = dir.join(format!("{}_{i:02}_{}.dat", kind.name(), file_stem(&s.label)));
        let mut text = format!("# {}\n# x y\n", s.label);
        for (x, y) in &s.points {
            writeln!(text, "{x} {y}").expect("writing to a String");
        }
        fs::write(&path, text).map_err(io_err(&path))?;
        data_files.push(path);
    }

    let mut py = String::new();
    py.push_str("import numpy as np\nimport matplotlib.pyplot as plt\n\n");
    py.push_str("fig, ax = plt.subplots(figsize=(6, 4))\n");
    for (s, path) in series.iter().zip(&data_files) {
        let name = path.file_name().expect("file path").to_string_lossy();
        writeln!(
            py,
            "d = np.atleast_2d(np.loadtxt(\"{name}\"))\nax.plot(d[:, 0], d[:, 1], marker=\"o\", label={:?})",
            s.label
        )
        .expect("writing to a String");
    }
    if let Some(t) = threshold {
        writeln!(
            py,
            "ax.axvline({t}, color=\"red\", linestyle=\"--\", label=\"threshold\")"
        )
        .expect("writing to a String");
    }
    writeln!(
        py,
        "ax.set_xlabel({:?})\nax.set_ylabel({:?})\nax.set_title({:?})\nax.legend(fontsize=\"small\")\nfig.tight_layout()\nfig.savefig(\"{}.pdf\")",
        ax.label(),
        y_label(kind),
        kind.name(),
        kind.name()
    )
    .expect("writing to a String");
    let script = dir.join(format!("plot_{}.py", kind.name()));
    fs::write(&script, py).map_err(io_err(&script))?;

    Ok(PlotArtifacts {
        script,
        data_files,
        series,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_values() {
        assert!((rho_threshold(0.1) - 0.4444).abs() < 1e-4);
        assert_eq!(rho_threshold(0.5), 0.0);
    }

    #[test]
    fn stems_are_filesystem_safe() {
        assert_eq!(
            file_stem("faq-Dstar rho=0.4 features"),
            "faq_dstar_rho_0p4_features"
        );
        assert_eq!(file_stem("D* to P*"), "dstar_to_pstar");
    }

    #[test]
    fn empty_summary_is_rejected() {
        assert!(build_series(&[], ExperimentKind::Success).is_err());
    }
}
