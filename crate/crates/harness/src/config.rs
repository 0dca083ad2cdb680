//! Plain-text `key = value` run configuration.
//!
//! ```text
//! # defaults shared by every experiment
//! threads = 4
//! qaplib_dir = /data/qaplib
//! convex_max_iters = 2000
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use gmatch::SolverConfig;

use crate::error::{io_err, HarnessError, Result};

/// Environment variable naming the config file used when none is given.
pub const CONFIG_ENV: &str = "GMATCH_CONFIG";

/// Environment variable naming the QAPLIB instance directory.
pub const QAPLIB_ENV: &str = "GMATCH_QAPLIB_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Worker threads; `None` uses every available core.
    pub threads: Option<usize>,
    pub qaplib_dir: Option<PathBuf>,
    /// Instance list for the QAPLIB experiment; the bundled manifest if unset.
    pub qaplib_manifest: Option<PathBuf>,
    pub convex: SolverConfig,
    pub indefinite: SolverConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            threads: None,
            qaplib_dir: None,
            qaplib_manifest: None,
            convex: SolverConfig::convex(),
            indefinite: SolverConfig::indefinite(),
        }
    }
}

const KEYS: &[&str] = &[
    "threads",
    "qaplib_dir",
    "qaplib_manifest",
    "convex_max_iters",
    "indefinite_max_iters",
    "fw_gap_tol",
    "relative_gap",
    "feasibility_tol",
];

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or(HarnessError::BadLine { line })?;
            if !KEYS.contains(&key) {
                return Err(HarnessError::UnknownKey {
                    key: key.to_string(),
                    line,
                });
            }
            let bad = || HarnessError::BadValue {
                key: key.to_string(),
                value: value.to_string(),
                line,
            };
            match key {
                "threads" => {
                    let t: usize = value.parse().map_err(|_| bad())?;
                    cfg.threads = (t > 0).then_some(t);
                }
                "qaplib_dir" => cfg.qaplib_dir = Some(PathBuf::from(value)),
                "qaplib_manifest" => cfg.qaplib_manifest = Some(PathBuf::from(value)),
                "convex_max_iters" => cfg.convex.max_iters = value.parse().map_err(|_| bad())?,
                "indefinite_max_iters" => cfg.indefinite.max_iters = value.parse().map_err(|_| bad())?,
                "fw_gap_tol" => {
                    let v: f64 = value.parse().map_err(|_| bad())?;
                    cfg.convex.fw_gap_tol = v;
                    cfg.indefinite.fw_gap_tol = v;
                }
                "relative_gap" => {
                    let v: bool = value.parse().map_err(|_| bad())?;
                    cfg.convex.relative_gap = v;
                    cfg.indefinite.relative_gap = v;
                }
                "feasibility_tol" => {
                    let v: f64 = value.parse().map_err(|_| bad())?;
                    cfg.convex.feasibility_tol = v;
                    cfg.indefinite.feasibility_tol = v;
                }
                _ => unreachable!("key list checked above"),
            }
        }
        cfg.convex.validate()?;
        cfg.indefinite.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text)
    }

    /// Reads `explicit` if given, else the file named by [`CONFIG_ENV`],
    /// else the defaults. [`QAPLIB_ENV`] fills in a missing `qaplib_dir`.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self> {
        let from_env = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
        let mut cfg = match explicit.map(Path::to_path_buf).or(from_env) {
            Some(p) => Self::load(&p)?,
            None => Self::default(),
        };
        if cfg.qaplib_dir.is_none() {
            cfg.qaplib_dir = std::env::var_os(QAPLIB_ENV).map(PathBuf::from);
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let cfg = RunConfig::parse(
            "# comment\n threads = 3\nqaplib_dir=/tmp/q  # trailing\n\nconvex_max_iters = 50\nfw_gap_tol = 1e-4\n",
        )
        .unwrap();
        assert_eq!(cfg.threads, Some(3));
        assert_eq!(cfg.qaplib_dir, Some(PathBuf::from("/tmp/q")));
        assert_eq!(cfg.convex.max_iters, 50);
        assert_eq!(cfg.indefinite.max_iters, 200);
        assert_eq!(cfg.indefinite.fw_gap_tol, 1e-4);
    }

    #[test]
    fn unknown_key_is_named() {
        match RunConfig::parse("threads = 2\nthreds = 4\n") {
            Err(HarnessError::UnknownKey { key, line }) => {
                assert_eq!(key, "threds");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_values_and_lines() {
        assert!(matches!(
            RunConfig::parse("threads = many"),
            Err(HarnessError::BadValue { .. })
        ));
        assert!(matches!(
            RunConfig::parse("threads"),
            Err(HarnessError::BadLine { line: 1 })
        ));
        assert!(RunConfig::parse("convex_max_iters = 0").is_err());
    }
}
