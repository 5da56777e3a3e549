//! Run configuration: defaults, key = value config file, flag overrides,
//! and aggregated validation.

use std::fs;
use std::path::{Path, PathBuf};

use resbratu_core::continuation::ContinuationConfig;
use resbratu_core::forcing::{ForcingFamily, ForcingSpec};
use resbratu_core::grid::RadialGrid;

/// Which forcing family a run asks for; `FromFile` is resolved to a nodal
/// profile when the grid is known.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyChoice {
    Eigenfunction,
    GaussianBump,
    Polynomial,
    FromFile,
}

impl FamilyChoice {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "eigenfunction" => Ok(Self::Eigenfunction),
            "gaussian-bump" => Ok(Self::GaussianBump),
            "polynomial" => Ok(Self::Polynomial),
            "from-file" => Ok(Self::FromFile),
            other => Err(format!(
                "unknown forcing family '{other}' (expected eigenfunction, gaussian-bump, \
                 polynomial or from-file)"
            )),
        }
    }
}

/// Forcing knobs; the family decides which ones matter.
#[derive(Debug, Clone)]
pub struct ForcingConfig {
    pub family: FamilyChoice,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub coeffs: Vec<f64>,
    pub file: Option<PathBuf>,
    pub target_mass: Option<f64>,
}

impl Default for ForcingConfig {
    fn default() -> Self {
        Self {
            family: FamilyChoice::Eigenfunction,
            amplitude: 4.0,
            center: 0.0,
            width: 0.5,
            coeffs: vec![-1.0],
            file: None,
            target_mass: None,
        }
    }
}

/// Full configuration of a run, before grid-dependent resolution.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub epsilon_g: f64,
    pub seed: u64,
    pub probe_starts: usize,
    pub forcing: ForcingConfig,
    pub continuation: ContinuationConfig,
    pub scan_masses: Vec<f64>,
    pub scan_margin: f64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 512,
            epsilon_g: 1.0,
            seed: 42,
            probe_starts: 20,
            forcing: ForcingConfig::default(),
            continuation: ContinuationConfig::default(),
            scan_masses: vec![1.0, 4.0, 8.0, 12.0],
            scan_margin: 0.5,
            out_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    /// Merge `key = value` lines into the config. Unknown keys and parse
    /// failures are collected, not thrown, so one pass reports everything.
    pub fn apply_file(&mut self, path: &Path, issues: &mut Vec<String>) {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                issues.push(format!("cannot read config file {}: {e}", path.display()));
                return;
            }
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                issues.push(format!(
                    "{}:{}: expected 'key = value', got '{line}'",
                    path.display(),
                    lineno + 1
                ));
                continue;
            };
            if let Err(msg) = self.set(key.trim(), value.trim()) {
                issues.push(format!("{}:{}: {msg}", path.display(), lineno + 1));
            }
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("cannot parse '{value}' for key '{key}'"))
        }
        fn list(key: &str, value: &str) -> Result<Vec<f64>, String> {
            value
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("cannot parse '{}' in list for key '{key}'", s.trim()))
                })
                .collect()
        }
        match key {
            "n" => self.n = num(key, value)?,
            "epsilon_g" => self.epsilon_g = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "probe_starts" => self.probe_starts = num(key, value)?,
            "forcing.family" => self.forcing.family = FamilyChoice::parse(value)?,
            "forcing.amplitude" => self.forcing.amplitude = num(key, value)?,
            "forcing.center" => self.forcing.center = num(key, value)?,
            "forcing.width" => self.forcing.width = num(key, value)?,
            "forcing.coeffs" => self.forcing.coeffs = list(key, value)?,
            "forcing.file" => self.forcing.file = Some(PathBuf::from(value)),
            "forcing.target_mass" => self.forcing.target_mass = Some(num(key, value)?),
            "continuation.initial_step" => self.continuation.initial_step = num(key, value)?,
            "continuation.min_step" => self.continuation.min_step = num(key, value)?,
            "continuation.max_step" => self.continuation.max_step = num(key, value)?,
            "continuation.newton_tol" => self.continuation.newton_tol = num(key, value)?,
            "continuation.blowup_cap" => self.continuation.blowup_cap = num(key, value)?,
            "continuation.growth" => self.continuation.growth = num(key, value)?,
            "continuation.shrink" => self.continuation.shrink = num(key, value)?,
            "scan.masses" => self.scan_masses = list(key, value)?,
            "scan.margin" => self.scan_margin = num(key, value)?,
            "out" => self.out_dir = PathBuf::from(value),
            other => return Err(format!("unknown config key '{other}'")),
        }
        Ok(())
    }

    /// Validate everything that does not need a computation; every problem
    /// lands in `issues`.
    pub fn validate(&self, issues: &mut Vec<String>) {
        if self.n < 8 {
            issues.push(format!("n must be at least 8, got {}", self.n));
        }
        if !(self.epsilon_g > 0.0) {
            issues.push(format!(
                "epsilon_g must be positive, got {}",
                self.epsilon_g
            ));
        }
        if self.probe_starts == 0 {
            issues.push("probe_starts must be at least 1".into());
        }
        if let Err(e) = self.continuation.validate() {
            issues.push(e.to_string());
        }
        match self.forcing.family {
            FamilyChoice::GaussianBump => {
                if !(self.forcing.width > 0.0) {
                    issues.push(format!(
                        "forcing.width must be positive, got {}",
                        self.forcing.width
                    ));
                }
            }
            FamilyChoice::Polynomial => {
                if self.forcing.coeffs.is_empty() {
                    issues.push("forcing.coeffs must not be empty".into());
                }
            }
            FamilyChoice::FromFile => {
                if self.forcing.file.is_none() {
                    issues.push("forcing.family = from-file needs forcing.file".into());
                }
            }
            FamilyChoice::Eigenfunction => {}
        }
        if !(self.scan_margin >= 0.0) {
            issues.push(format!(
                "scan.margin must be >= 0, got {}",
                self.scan_margin
            ));
        }
    }

    /// Extra checks for the scan subcommand.
    pub fn validate_scan(&self, issues: &mut Vec<String>) {
        if self.scan_masses.is_empty() {
            issues.push("scan needs a non-empty mass list".into());
            return;
        }
        if self.scan_masses.iter().any(|&m| !(m > 0.0)) {
            issues.push("scan masses must all be positive".into());
        }
        if self.scan_masses.windows(2).any(|w| w[1] < w[0]) {
            issues.push("scan masses must be sorted ascending".into());
        }
    }

    /// Resolve the forcing configuration into a core spec; `from-file`
    /// profiles are read and checked against the grid here.
    pub fn forcing_spec(&self, grid: &RadialGrid) -> Result<ForcingSpec, String> {
        let family = match self.forcing.family {
            FamilyChoice::Eigenfunction => ForcingFamily::Eigenfunction,
            FamilyChoice::GaussianBump => ForcingFamily::GaussianBump {
                center: self.forcing.center,
                width: self.forcing.width,
            },
            FamilyChoice::Polynomial => ForcingFamily::Polynomial {
                coeffs: self.forcing.coeffs.clone(),
            },
            FamilyChoice::FromFile => {
                let path =
                    self.forcing.file.as_ref().ok_or_else(|| {
                        "forcing.family = from-file needs forcing.file".to_string()
                    })?;
                let values = crate::csvio::read_profile(path, grid)?;
                ForcingFamily::Profile { values }
            }
        };
        Ok(ForcingSpec {
            family,
            amplitude: self.forcing.amplitude,
            target_mass: self.forcing.target_mass,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn file_overrides_and_unknown_keys() {
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            tmp,
            "# comment\nn = 256\nforcing.family = gaussian-bump\nforcing.width = 0.25\nbogus = 1\nscan.masses = 1, 2.5, 7"
        )
        .unwrap();
        let mut cfg = RunConfig::default();
        let mut issues = Vec::new();
        cfg.apply_file(tmp.path(), &mut issues);
        assert_eq!(cfg.n, 256);
        assert_eq!(cfg.forcing.family, FamilyChoice::GaussianBump);
        assert_eq!(cfg.forcing.width, 0.25);
        assert_eq!(cfg.scan_masses, vec![1.0, 2.5, 7.0]);
        assert_eq!(issues.len(), 1);
        assert!(issues[0].contains("unknown config key 'bogus'"));
    }

    #[test]
    fn validation_aggregates_all_problems() {
        let mut cfg = RunConfig::default();
        cfg.n = 4;
        cfg.epsilon_g = -1.0;
        cfg.continuation.min_step = 0.5;
        let mut issues = Vec::new();
        cfg.validate(&mut issues);
        assert!(issues.len() >= 3, "issues: {issues:?}");
    }

    #[test]
    fn scan_validation() {
        let mut cfg = RunConfig::default();
        cfg.scan_masses = vec![];
        let mut issues = Vec::new();
        cfg.validate_scan(&mut issues);
        assert_eq!(issues.len(), 1);

        cfg.scan_masses = vec![4.0, 1.0];
        issues.clear();
        cfg.validate_scan(&mut issues);
        assert!(issues[0].contains("sorted"));
    }
}
