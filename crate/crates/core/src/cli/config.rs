//! Run configuration: defaults per experiment, an optional flat key/value
//! file, and command-line overrides (flags win over file over defaults).

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::sweep::linspace;
use crate::{Error, Result, SystemParams};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "VQUTRIT_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    NegativityDynamics,
    BoundSpectrum,
    NegativityMap,
    Validate,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::NegativityDynamics => "negativity-dynamics",
            Experiment::BoundSpectrum => "bound-spectrum",
            Experiment::NegativityMap => "negativity-map",
            Experiment::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidInput(format!("unknown format '{other}'"))),
        }
    }
}

/// Discretized-bath settings used by `validate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub modes: usize,
    /// Half bandwidth `W` in units of `ω₀`.
    pub bandwidth: f64,
    pub dt: f64,
    pub cutoff_at_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub gamma0: f64,
    pub lambda: f64,
    pub gamma0_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    pub n_list: Vec<u32>,
    pub t_grid: Vec<f64>,
    /// Evaluation time of `negativity-map`.
    pub t_eval: f64,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub format: Format,
    pub oracle: OracleConfig,
    #[serde(skip)]
    pub from: Option<PathBuf>,
}

/// Default `dt` for the oracle: `0.1 / W` divided by this factor.
pub const ORACLE_DT_DIVISOR: f64 = 1.0;

impl RunConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let lambda = 0.8;
        let bandwidth = 40.0 * lambda;
        let mut cfg = Self {
            experiment,
            gamma0: 1.0,
            lambda,
            gamma0_grid: vec![1.0],
            theta_grid: vec![0.5, 1.0],
            n_list: vec![1, 3, 6, 9],
            t_grid: linspace(0.0, 50.0, 501),
            t_eval: 10.0,
            output: None,
            format: Format::Csv,
            oracle: OracleConfig {
                modes: 4000,
                bandwidth,
                dt: 0.1 / bandwidth / ORACLE_DT_DIVISOR,
                cutoff_at_zero: false,
            },
            from: None,
        };
        match experiment {
            Experiment::NegativityDynamics | Experiment::Validate => {}
            Experiment::BoundSpectrum => {
                cfg.gamma0_grid = linspace(0.01, 1.0, 100);
                cfg.n_list = (1..=10).collect();
            }
            Experiment::NegativityMap => {
                cfg.gamma0_grid = linspace(0.0, 1.0, 21);
                cfg.theta_grid = linspace(0.0, 1.0, 21);
            }
        }
        cfg
    }

    /// Parameters at one grid point.
    pub fn params(&self, gamma0: f64, theta: f64, n_atoms: u32) -> Result<SystemParams> {
        SystemParams::new(gamma0, self.lambda, theta, n_atoms)
    }

    pub fn validated(self) -> Result<Self> {
        let empty = |what: &str| Err(Error::InvalidInput(format!("{what} grid is empty")));
        if self.theta_grid.is_empty() {
            return empty("theta");
        }
        if self.n_list.is_empty() {
            return empty("atom-number");
        }
        if self.t_grid.is_empty() {
            return empty("time");
        }
        if self.gamma0_grid.is_empty() {
            return empty("gamma0");
        }
        if let Some(t) = self
            .t_grid
            .iter()
            .chain([&self.t_eval])
            .find(|t| !(**t >= 0.0) || !t.is_finite())
        {
            return Err(Error::InvalidInput(format!("times must be >= 0, got {t}")));
        }
        for &g in self.gamma0_grid.iter().chain([&self.gamma0]) {
            for &theta in &self.theta_grid {
                for &n in &self.n_list {
                    self.params(g, theta, n)?;
                }
            }
        }
        if self.oracle.modes < 2 || !(self.oracle.bandwidth > 0.0) || !(self.oracle.dt > 0.0) {
            return Err(Error::InvalidInput(format!(
                "invalid oracle settings: {:?}",
                self.oracle
            )));
        }
        Ok(self)
    }

    /// Explicit `--output`, else `$VQUTRIT_OUTPUT_DIR/<experiment>.<ext>`,
    /// else standard output (`None`).
    pub fn output_path(&self) -> Option<PathBuf> {
        self.output.clone().or_else(|| {
            std::env::var_os(OUTPUT_DIR_ENV).map(|dir| {
                Path::new(&dir).join(format!(
                    "{}.{}",
                    self.experiment.name(),
                    self.format.extension()
                ))
            })
        })
    }
}

/// Optional settings from one source (flags or file), keyed by flag name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub gamma0: Option<f64>,
    pub gamma0_grid: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    pub theta: Option<f64>,
    pub theta_grid: Option<Vec<f64>>,
    pub n_atoms: Option<u32>,
    pub n_list: Option<Vec<u32>>,
    pub t: Option<f64>,
    pub t_grid: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub modes: Option<usize>,
    pub bandwidth: Option<f64>,
    pub dt: Option<f64>,
    pub cutoff_at_zero: Option<bool>,
    pub from: Option<PathBuf>,
}

macro_rules! prefer {
    ($self:ident, $other:ident; $($field:ident),*) => {
        Overrides { $($field: $self.$field.or($other.$field)),* }
    };
}

impl Overrides {
    /// Field-wise `self`, falling back to `other`. A scalar and its grid
    /// (`theta` / `theta-grid`, ...) count as one setting: if `self` sets
    /// either, `other` contributes neither.
    pub fn or(self, mut other: Overrides) -> Overrides {
        if self.gamma0.is_some() || self.gamma0_grid.is_some() {
            (other.gamma0, other.gamma0_grid) = (None, None);
        }
        if self.theta.is_some() || self.theta_grid.is_some() {
            (other.theta, other.theta_grid) = (None, None);
        }
        if self.n_atoms.is_some() || self.n_list.is_some() {
            (other.n_atoms, other.n_list) = (None, None);
        }
        if self.t.is_some() || self.t_grid.is_some() {
            (other.t, other.t_grid) = (None, None);
        }
        prefer!(self, other; gamma0, gamma0_grid, lambda, theta, theta_grid, n_atoms,
            n_list, t, t_grid, output, format, modes, bandwidth, dt, cutoff_at_zero, from)
    }

    /// Parses `key = value` lines; `#` starts a comment. Keys are flag names
    /// without the leading dashes.
    pub fn parse_file(text: &str) -> Result<Overrides> {
        let mut out = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(char::is_whitespace))
                .ok_or_else(|| {
                    Error::InvalidInput(format!("config line {}: expected key = value", lineno + 1))
                })?;
            out.set(key.trim().trim_start_matches('-'), value.trim())
                .map_err(|e| Error::InvalidInput(format!("config line {}: {e}", lineno + 1)))?;
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Overrides> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::InvalidInput(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse_file(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "gamma0" => self.gamma0 = Some(parse_num(value)?),
            "gamma0-grid" => self.gamma0_grid = Some(parse_range(value)?),
            "lambda" => self.lambda = Some(parse_num(value)?),
            "theta" => self.theta = Some(parse_num(value)?),
            "theta-grid" => self.theta_grid = Some(parse_range(value)?),
            "n-atoms" => self.n_atoms = Some(parse_num(value)?),
            "n-list" => self.n_list = Some(parse_list(value)?),
            "t" => self.t = Some(parse_num(value)?),
            "t-grid" => self.t_grid = Some(parse_range(value)?),
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse()?),
            "modes" => self.modes = Some(parse_num(value)?),
            "bandwidth" => self.bandwidth = Some(parse_num(value)?),
            "dt" => self.dt = Some(parse_num(value)?),
            "cutoff-at-zero" => self.cutoff_at_zero = Some(parse_bool(value)?),
            "from" => self.from = Some(PathBuf::from(value)),
            other => return Err(Error::InvalidInput(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies the overrides on top of the experiment defaults.
    pub fn apply(self, mut cfg: RunConfig) -> Result<RunConfig> {
        if let Some(l) = self.lambda {
            cfg.lambda = l;
            if self.bandwidth.is_none() {
                cfg.oracle.bandwidth = 40.0 * l;
            }
        }
        if let Some(g) = self.gamma0 {
            cfg.gamma0 = g;
            cfg.gamma0_grid = vec![g];
        }
        if let Some(grid) = self.gamma0_grid {
            cfg.gamma0_grid = grid;
        }
        if let Some(theta) = self.theta {
            cfg.theta_grid = vec![theta];
        }
        if let Some(grid) = self.theta_grid {
            cfg.theta_grid = grid;
        }
        if let Some(n) = self.n_atoms {
            cfg.n_list = vec![n];
        }
        if let Some(list) = self.n_list {
            cfg.n_list = list;
        }
        if let Some(t) = self.t {
            cfg.t_grid = vec![t];
            cfg.t_eval = t;
        }
        if let Some(grid) = self.t_grid {
            cfg.t_grid = grid;
        }
        cfg.output = self.output.or(cfg.output);
        cfg.format = self.format.unwrap_or(cfg.format);
        cfg.from = self.from.or(cfg.from);
        if let Some(m) = self.modes {
            cfg.oracle.modes = m;
        }
        if let Some(w) = self.bandwidth {
            cfg.oracle.bandwidth = w;
        }
        cfg.oracle.dt = match self.dt {
            Some(dt) => dt,
            None => 0.1 / cfg.oracle.bandwidth.max(cfg.lambda) / ORACLE_DT_DIVISOR,
        };
        if let Some(c) = self.cutoff_at_zero {
            cfg.oracle.cutoff_at_zero = c;
        }
        cfg.validated()
    }
}

fn parse_num<T: FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("cannot parse number '{s}'")))
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(Error::InvalidInput(format!(
            "cannot parse boolean '{other}'"
        ))),
    }
}

/// `a:b:n` (inclusive, `n` points) or a comma-separated list.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let n: usize = parse_num(n)?;
            if n == 0 {
                return Err(Error::InvalidInput(format!("range '{s}' has zero points")));
            }
            Ok(linspace(parse_num(a)?, parse_num(b)?, n))
        }
        [_] => parse_list(s),
        _ => Err(Error::InvalidInput(format!(
            "expected a:b:n or a list, got '{s}'"
        ))),
    }
}

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_num)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range("0.5,1").unwrap(), vec![0.5, 1.0]);
        assert_eq!(parse_list::<u32>("1,3,6,9").unwrap(), vec![1, 3, 6, 9]);
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_list::<u32>("1,x").is_err());
    }

    #[test]
    fn file_then_flags_precedence() {
        let file = Overrides::parse_file(
            "# comment\ngamma0 = 0.5\ntheta-grid = 0:1:3\nformat = json\nn-list=1,2\n",
        )
        .unwrap();
        let flags = Overrides {
            gamma0: Some(0.25),
            ..Overrides::default()
        };
        let cfg = flags
            .or(file)
            .apply(RunConfig::defaults(Experiment::NegativityDynamics))
            .unwrap();
        assert_eq!(cfg.gamma0, 0.25);
        assert_eq!(cfg.theta_grid, vec![0.0, 0.5, 1.0]);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.n_list, vec![1, 2]);
        assert_eq!(cfg.lambda, 0.8);
    }

    #[test]
    fn scalar_flag_beats_grid_from_file() {
        let file = Overrides::parse_file("n-list = 3\ntheta-grid = 0:1:5\n").unwrap();
        let flags = Overrides {
            n_atoms: Some(6),
            theta: Some(0.5),
            ..Overrides::default()
        };
        let cfg = flags
            .or(file)
            .apply(RunConfig::defaults(Experiment::NegativityMap))
            .unwrap();
        assert_eq!(cfg.n_list, vec![6]);
        assert_eq!(cfg.theta_grid, vec![0.5]);
    }

    #[test]
    fn rejects_bad_files_and_values() {
        assert!(Overrides::parse_file("nonsense-key = 3").is_err());
        assert!(Overrides::parse_file("gamma0").is_err());
        let bad = Overrides {
            theta: Some(1.5),
            ..Overrides::default()
        };
        assert!(bad
            .apply(RunConfig::defaults(Experiment::NegativityMap))
            .is_err());
        let empty = Overrides {
            n_list: Some(vec![]),
            ..Overrides::default()
        };
        assert!(empty
            .apply(RunConfig::defaults(Experiment::NegativityMap))
            .is_err());
    }

    #[test]
    fn experiment_defaults() {
        let map = RunConfig::defaults(Experiment::NegativityMap);
        assert_eq!(map.gamma0_grid.len(), 21);
        assert_eq!(map.theta_grid.len(), 21);
        assert_eq!(map.t_eval, 10.0);
        let scan = RunConfig::defaults(Experiment::BoundSpectrum);
        assert_eq!(scan.n_list, (1..=10).collect::<Vec<_>>());
        assert_eq!(scan.gamma0_grid[0], 0.01);
    }
}
