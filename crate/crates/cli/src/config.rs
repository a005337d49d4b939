//! Flag parsing helpers, run manifests, and the usage/numerical error split
//! behind the exit codes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use spectral_atlas::contour::Box2;
use spectral_atlas::frequency;
use spectral_atlas::potential::{Potential, PotentialSpec};

/// Exit 1: the command line or input files were unusable.
/// Exit 2: the computation ran but missed its accuracy contract.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical-quality failure: {msg}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

pub fn usage<E: fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn numerical<E: fmt::Display>(e: E) -> CliError {
    CliError::Numerical(e.to_string())
}

/// "x,y" → complex point.
pub fn parse_point(s: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!(
            "point '{s}' must be 'x,y'"
        )));
    }
    let x: f64 = parts[0].trim().parse().map_err(usage)?;
    let y: f64 = parts[1].trim().parse().map_err(usage)?;
    Ok(Complex64::new(x, y))
}

/// "x0,y0,x1,y1" → box with positive area.
pub fn parse_box(s: &str) -> Result<Box2, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::Usage(format!(
            "box '{s}' must be 'x0,y0,x1,y1'"
        )));
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(usage))
        .collect::<Result<_, _>>()?;
    let bbox = Box2::new(v[0], v[1], v[2], v[3]);
    if bbox.width() <= 0.0 || bbox.height() <= 0.0 {
        return Err(CliError::Usage(format!("box '{s}' has no area")));
    }
    Ok(bbox)
}

/// Frequency grammar: a float literal, `golden`, `silver`,
/// `liouville:<gamma>:<depth>`, or a rational `p/q`.
#[derive(Debug, Clone, Copy)]
pub enum FrequencySpec {
    Irrational(f64),
    Rational(i64, i64),
}

pub fn parse_frequency(s: &str) -> Result<FrequencySpec, CliError> {
    match s {
        "golden" => return Ok(FrequencySpec::Irrational(frequency::golden_mean())),
        "silver" => return Ok(FrequencySpec::Irrational(frequency::silver_mean())),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("liouville:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 2 {
            return Err(CliError::Usage(format!(
                "liouville frequency '{s}' must be liouville:<gamma>:<depth>"
            )));
        }
        let gamma: f64 = parts[0].parse().map_err(usage)?;
        let depth: usize = parts[1].parse().map_err(usage)?;
        let (alpha, _cf) = frequency::liouville_construct(gamma, depth).map_err(usage)?;
        return Ok(FrequencySpec::Irrational(alpha));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(usage)?;
        let q: i64 = q.trim().parse().map_err(usage)?;
        if q < 1 {
            return Err(CliError::Usage(format!("rational '{s}' needs q >= 1")));
        }
        return Ok(FrequencySpec::Rational(p, q));
    }
    let x: f64 = s.parse().map_err(usage)?;
    if !(0.0 < x && x < 1.0) {
        return Err(CliError::Usage(format!(
            "frequency {x} must lie strictly inside (0, 1)"
        )));
    }
    Ok(FrequencySpec::Irrational(x))
}

impl FrequencySpec {
    pub fn value(&self) -> f64 {
        match self {
            FrequencySpec::Irrational(x) => *x,
            FrequencySpec::Rational(p, q) => *p as f64 / *q as f64,
        }
    }
}

/// "a:b" → half-open index range.
pub fn parse_index_range(s: &str) -> Result<(i64, usize), CliError> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("range '{s}' must be 'start:end'")))?;
    let start: i64 = a.trim().parse().map_err(usage)?;
    let end: i64 = b.trim().parse().map_err(usage)?;
    if end <= start {
        return Err(CliError::Usage(format!("range '{s}' is empty")));
    }
    Ok((start, (end - start) as usize))
}

pub fn load_potential(path: &Path) -> Result<Potential, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let spec: PotentialSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Potential::from_spec(&spec).map_err(usage)
}

/// Collects artifacts and writes `manifest.json` with their checksums next
/// to them. Re-running a command with the same config must reproduce the
/// same checksums byte for byte.
pub struct Manifest {
    command: String,
    config: BTreeMap<String, serde_json::Value>,
    artifacts: BTreeMap<String, String>,
    dir: PathBuf,
    pub failed: bool,
}

#[derive(Serialize)]
struct ManifestDoc<'a> {
    schema: &'static str,
    command: &'a str,
    config: &'a BTreeMap<String, serde_json::Value>,
    artifacts: &'a BTreeMap<String, String>,
    failed: bool,
}

impl Manifest {
    pub fn new(command: &str, dir: &Path) -> Self {
        Manifest {
            command: command.to_string(),
            config: BTreeMap::new(),
            artifacts: BTreeMap::new(),
            dir: dir.to_path_buf(),
            failed: false,
        }
    }

    pub fn config<V: Into<serde_json::Value>>(&mut self, key: &str, value: V) {
        self.config.insert(key.to_string(), value.into());
    }

    /// Write a file under the manifest directory and record its checksum.
    pub fn write_artifact(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", self.dir.display())))?;
        let path = self.dir.join(name);
        std::fs::write(&path, bytes)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        self.artifacts
            .insert(name.to_string(), format!("{:x}", hasher.finalize()));
        Ok(())
    }

    pub fn finish(&self) -> Result<(), CliError> {
        let doc = ManifestDoc {
            schema: "v1",
            command: &self.command,
            config: &self.config,
            artifacts: &self.artifacts,
            failed: self.failed,
        };
        let text = serde_json::to_string_pretty(&doc).map_err(usage)?;
        std::fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", self.dir.display())))?;
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
    }
}
