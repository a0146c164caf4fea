//! Run configuration: a flat, line-oriented `key = value` file with
//! `[section]` headers. Parsing is hand-rolled so diagnostics carry the line
//! and field that failed.
//!
//! ```text
//! [profile]
//! kind = step            # zero | step | gaussian | aharonov_bohm | table
//! b0 = 1.0
//! r_support = 1.0
//!
//! [run]
//! mass = 0.0
//! t_min = 1.0
//! t_max = 100.0
//! points = 8
//! spacing = log          # log | linear
//! eval_points = 1 0 1 0 ; 2 0 2 0
//!
//! [solver]
//! r_max = 20.0
//! n = 800
//! mode_cutoff = 12
//!
//! [quad]
//! abs_tol = 1e-12
//! rel_tol = 1e-10
//! max_subdivisions = 60
//! transform = double_exponential
//!
//! [outputs]
//! csv = out.csv
//! json = report.json
//! ```

use crate::field::FieldProfile;
use crate::quad::{QuadratureSpec, Transform};
use crate::solver::SolverConfig;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub msg: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}, field `{}`: {}", self.field, self.msg),
            None => write!(f, "config field `{}`: {}", self.field, self.msg),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError { line, field: field.to_string(), msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| {
                let f = k as f64 / (n as f64 - 1.0);
                match self.spacing {
                    Spacing::Log => self.t_min * (self.t_max / self.t_min).powf(f),
                    Spacing::Linear => self.t_min + (self.t_max - self.t_min) * f,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub profile: FieldProfile,
    pub mass: f64,
    pub time_grid: TimeGrid,
    pub eval_points: Vec<([f64; 2], [f64; 2])>,
    pub solver: Option<SolverConfig>,
    pub quad: QuadratureSpec,
    pub outputs: Outputs,
}

impl RunConfig {
    pub fn parse_file(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(None, "config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parse from text; `base_dir` anchors relative table-CSV paths.
    pub fn parse(text: &str, base_dir: &Path) -> Result<RunConfig, ConfigError> {
        let mut section = String::new();
        let mut entries: Vec<(usize, String, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = i + 1;
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(Some(lineno), line, "expected `key = value`"))?;
            if section.is_empty() {
                return Err(err(Some(lineno), key.trim(), "entry before any [section]"));
            }
            entries.push((lineno, section.clone(), key.trim().to_string(), value.trim().to_string()));
        }

        let mut b = Builder::default();
        for (lineno, section, key, value) in &entries {
            b.set(*lineno, section, key, value, base_dir)?;
        }
        b.finish()
    }

    pub fn times(&self) -> Vec<f64> {
        self.time_grid.times()
    }
}

#[derive(Default)]
struct Builder {
    profile_kind: Option<(usize, String)>,
    b0: Option<f64>,
    sigma: Option<f64>,
    r_support: Option<f64>,
    alpha: Option<f64>,
    table_csv: Option<(usize, PathBuf)>,
    mass: Option<f64>,
    t_min: Option<f64>,
    t_max: Option<f64>,
    points: Option<usize>,
    spacing: Option<Spacing>,
    eval_points: Option<(usize, Vec<([f64; 2], [f64; 2])>)>,
    r_max: Option<f64>,
    n: Option<usize>,
    mode_cutoff: Option<i64>,
    quad: QuadratureSpec,
    csv_out: Option<PathBuf>,
    json_out: Option<PathBuf>,
}

impl Builder {
    fn set(&mut self, lineno: usize, section: &str, key: &str, value: &str, base: &Path) -> Result<(), ConfigError> {
        let fnum = |v: &str, field: &str| -> Result<f64, ConfigError> {
            v.parse::<f64>().map_err(|e| err(Some(lineno), field, format!("bad number `{v}`: {e}")))
        };
        let unum = |v: &str, field: &str| -> Result<usize, ConfigError> {
            v.parse::<usize>().map_err(|e| err(Some(lineno), field, format!("bad integer `{v}`: {e}")))
        };
        match (section, key) {
            ("profile", "kind") => self.profile_kind = Some((lineno, value.to_string())),
            ("profile", "b0") => self.b0 = Some(fnum(value, "b0")?),
            ("profile", "sigma") => self.sigma = Some(fnum(value, "sigma")?),
            ("profile", "r_support") => self.r_support = Some(fnum(value, "r_support")?),
            ("profile", "alpha") => self.alpha = Some(fnum(value, "alpha")?),
            ("profile", "csv") => self.table_csv = Some((lineno, base.join(value))),
            ("run", "mass") => self.mass = Some(fnum(value, "mass")?),
            ("run", "t_min") => self.t_min = Some(fnum(value, "t_min")?),
            ("run", "t_max") => self.t_max = Some(fnum(value, "t_max")?),
            ("run", "points") => self.points = Some(unum(value, "points")?),
            ("run", "spacing") => {
                self.spacing = Some(match value {
                    "log" => Spacing::Log,
                    "linear" => Spacing::Linear,
                    other => return Err(err(Some(lineno), "spacing", format!("expected log|linear, got `{other}`"))),
                })
            }
            ("run", "eval_points") => {
                let mut pts = Vec::new();
                for group in value.split(';') {
                    let nums: Result<Vec<f64>, _> = group.split_whitespace().map(|s| s.parse::<f64>()).collect();
                    let nums = nums.map_err(|e| err(Some(lineno), "eval_points", format!("bad number: {e}")))?;
                    if nums.len() != 4 {
                        return Err(err(
                            Some(lineno),
                            "eval_points",
                            format!("each group needs 4 numbers x1 x2 y1 y2, got {}", nums.len()),
                        ));
                    }
                    pts.push(([nums[0], nums[1]], [nums[2], nums[3]]));
                }
                self.eval_points = Some((lineno, pts));
            }
            ("solver", "r_max") => self.r_max = Some(fnum(value, "r_max")?),
            ("solver", "n") => self.n = Some(unum(value, "n")?),
            ("solver", "mode_cutoff") => {
                self.mode_cutoff =
                    Some(value.parse::<i64>().map_err(|e| err(Some(lineno), "mode_cutoff", format!("{e}")))?)
            }
            ("quad", "abs_tol") => self.quad.abs_tol = fnum(value, "abs_tol")?,
            ("quad", "rel_tol") => self.quad.rel_tol = fnum(value, "rel_tol")?,
            ("quad", "max_subdivisions") => self.quad.max_subdivisions = unum(value, "max_subdivisions")?,
            ("quad", "transform") => {
                self.quad.transform = match value {
                    "exp_substitution" => Transform::ExpSubstitution,
                    "double_exponential" => Transform::DoubleExponential,
                    "none" => Transform::None,
                    other => {
                        return Err(err(
                            Some(lineno),
                            "transform",
                            format!("expected exp_substitution|double_exponential|none, got `{other}`"),
                        ))
                    }
                }
            }
            ("outputs", "csv") => self.csv_out = Some(base.join(value)),
            ("outputs", "json") => self.json_out = Some(base.join(value)),
            _ => return Err(err(Some(lineno), key, format!("unknown key in section [{section}]"))),
        }
        Ok(())
    }

    fn finish(self) -> Result<RunConfig, ConfigError> {
        let (kind_line, kind) = self.profile_kind.ok_or_else(|| err(None, "profile.kind", "missing"))?;
        let profile = match kind.as_str() {
            "zero" => FieldProfile::Zero,
            "step" => FieldProfile::Step {
                b0: self.b0.ok_or_else(|| err(Some(kind_line), "b0", "required for step"))?,
                r_support: self.r_support.ok_or_else(|| err(Some(kind_line), "r_support", "required for step"))?,
            },
            "gaussian" => FieldProfile::GaussianTruncated {
                b0: self.b0.ok_or_else(|| err(Some(kind_line), "b0", "required for gaussian"))?,
                sigma: self.sigma.ok_or_else(|| err(Some(kind_line), "sigma", "required for gaussian"))?,
                r_support: self
                    .r_support
                    .ok_or_else(|| err(Some(kind_line), "r_support", "required for gaussian"))?,
            },
            "aharonov_bohm" => FieldProfile::AharonovBohm {
                alpha: self.alpha.ok_or_else(|| err(Some(kind_line), "alpha", "required for aharonov_bohm"))?,
            },
            "table" => {
                let (line, path) = self
                    .table_csv
                    .ok_or_else(|| err(Some(kind_line), "csv", "required for table"))?;
                FieldProfile::Table { nodes: load_table(&path).map_err(|m| err(Some(line), "csv", m))? }
            }
            other => return Err(err(Some(kind_line), "kind", format!("unknown profile kind `{other}`"))),
        };
        let profile = profile
            .validated()
            .map_err(|e| err(Some(kind_line), "profile", e.to_string()))?;

        let mass = self.mass.unwrap_or(0.0);
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(err(None, "mass", format!("must be >= 0, got {mass}")));
        }
        if mass > 0.0 && matches!(profile, FieldProfile::AharonovBohm { .. }) {
            return Err(err(None, "mass", "massive Aharonov-Bohm kernels are not supported"));
        }

        let t_min = self.t_min.ok_or_else(|| err(None, "t_min", "missing"))?;
        let t_max = self.t_max.unwrap_or(t_min);
        if !(t_min > 0.0) {
            return Err(err(None, "t_min", format!("must be > 0, got {t_min}")));
        }
        if t_max < t_min {
            return Err(err(None, "t_max", format!("must be >= t_min, got {t_max} < {t_min}")));
        }
        let points = self.points.unwrap_or(2);
        if points < 2 {
            return Err(err(None, "points", format!("must be >= 2, got {points}")));
        }
        let time_grid = TimeGrid { t_min, t_max, points, spacing: self.spacing.unwrap_or(Spacing::Log) };

        let (line_pts, eval_points) = self.eval_points.ok_or_else(|| err(None, "eval_points", "missing"))?;
        if eval_points.is_empty() {
            return Err(err(Some(line_pts), "eval_points", "need at least one (x, y) pair"));
        }

        let solver = match (self.r_max, self.n) {
            (Some(r_max), Some(n)) => {
                if n < 16 {
                    return Err(err(None, "n", format!("must be >= 16, got {n}")));
                }
                if !(r_max > 0.0) {
                    return Err(err(None, "r_max", format!("must be > 0, got {r_max}")));
                }
                Some(SolverConfig { r_max, n, mode_cutoff: self.mode_cutoff.unwrap_or(16) })
            }
            (None, None) => None,
            _ => return Err(err(None, "solver", "r_max and n must be given together")),
        };
        let mode_cutoff = self.mode_cutoff.unwrap_or(16);
        if mode_cutoff < 1 {
            return Err(err(None, "mode_cutoff", format!("must be >= 1, got {mode_cutoff}")));
        }

        self.quad.validate().map_err(|e| err(None, "quad", e.to_string()))?;

        Ok(RunConfig {
            profile,
            mass,
            time_grid,
            eval_points,
            solver: solver.map(|mut s| {
                s.mode_cutoff = mode_cutoff;
                s
            }),
            quad: self.quad,
            outputs: Outputs { csv: self.csv_out, json: self.json_out },
        })
    }
}

/// Two-column CSV `(r, B)`; `#` comments and an optional `r,B` header.
fn load_table(path: &Path) -> Result<Vec<(f64, f64)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut nodes = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || (i == 0 && line.eq_ignore_ascii_case("r,b")) {
            continue;
        }
        let (r, b) = line
            .split_once(',')
            .ok_or_else(|| format!("{} row {}: expected `r,B`", path.display(), i + 1))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("{} row {}: {e}", path.display(), i + 1));
        nodes.push((parse(r)?, parse(b)?));
    }
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[profile]
kind = step
b0 = 1.0
r_support = 1.0

[run]
mass = 0.0
t_min = 1.0
t_max = 100.0
points = 8
spacing = log
eval_points = 1 0 1 0 ; 2 0 2 0

[solver]
r_max = 20.0
n = 800
mode_cutoff = 12
"#;

    #[test]
    fn parses_a_full_config() {
        let cfg = RunConfig::parse(BASE, Path::new(".")).unwrap();
        assert!(matches!(cfg.profile, FieldProfile::Step { .. }));
        assert_eq!(cfg.eval_points.len(), 2);
        let times = cfg.times();
        assert_eq!(times.len(), 8);
        assert!((times[0] - 1.0).abs() < 1e-12 && (times[7] - 100.0).abs() < 1e-9);
        let s = cfg.solver.unwrap();
        assert_eq!(s.n, 800);
        assert_eq!(s.mode_cutoff, 12);
    }

    #[test]
    fn rejects_zero_t_min_naming_the_field() {
        let text = BASE.replace("t_min = 1.0", "t_min = 0");
        let e = RunConfig::parse(&text, Path::new(".")).unwrap_err();
        assert_eq!(e.field, "t_min");
    }

    #[test]
    fn rejects_unknown_keys_with_line_numbers() {
        let text = format!("{BASE}\n[run]\nbogus = 1\n");
        let e = RunConfig::parse(&text, Path::new(".")).unwrap_err();
        assert_eq!(e.field, "bogus");
        assert!(e.line.is_some());
    }

    #[test]
    fn rejects_massive_ab() {
        let text = r#"
[profile]
kind = aharonov_bohm
alpha = 0.5
[run]
mass = 1.0
t_min = 1.0
eval_points = 1 0 1 0
"#;
        let e = RunConfig::parse(text, Path::new(".")).unwrap_err();
        assert_eq!(e.field, "mass");
    }

    #[test]
    fn table_profile_loads_csv() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("b.csv"), "r,B\n0,1.0\n1,0.5\n2,0\n").unwrap();
        let text = r#"
[profile]
kind = table
csv = b.csv
[run]
t_min = 1.0
eval_points = 1 0 1 0
"#;
        let cfg = RunConfig::parse(text, dir.path()).unwrap();
        match cfg.profile {
            FieldProfile::Table { nodes } => assert_eq!(nodes.len(), 3),
            other => panic!("unexpected profile {other:?}"),
        }
    }
}
