//! File helpers shared by the subcommands: key=value config defaults,
//! provenance headers for output CSVs, and numeric CSV ingestion.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use saferisk_core::{Result, RiskError};
use sha2::{Digest, Sha256};

/// Defaults loaded from a `key=value` config file; command-line flags win.
#[derive(Debug, Default)]
pub struct ConfigDefaults {
    values: HashMap<String, String>,
}

impl ConfigDefaults {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| RiskError::io(path, e))?;
        let mut values = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(RiskError::parse(
                    path,
                    lineno + 1,
                    format!("expected key=value, got '{line}'"),
                ));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigDefaults { values })
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                RiskError::Validation(format!("config key '{key}': bad value '{raw}'"))
            }),
        }
    }

    /// Flag value if given, else config value, else the built-in default.
    pub fn resolve<T: std::str::FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }
}

/// Provenance header written at the top of every output CSV: the effective
/// configuration and a digest of each input file, enough to re-run the
/// producing command. Contains no clock or environment state, so reruns
/// are byte-identical.
pub struct Provenance {
    command: String,
    settings: Vec<(String, String)>,
    inputs: Vec<(String, PathBuf, String)>,
}

impl Provenance {
    pub fn new(command: &str) -> Self {
        Provenance {
            command: command.to_string(),
            settings: Vec::new(),
            inputs: Vec::new(),
        }
    }

    pub fn setting(mut self, key: &str, value: impl ToString) -> Self {
        self.settings.push((key.to_string(), value.to_string()));
        self
    }

    pub fn input(mut self, label: &str, path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| RiskError::io(path, e))?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().take(8).fold(String::new(), |mut acc, b| {
            let _ = write!(acc, "{b:02x}");
            acc
        });
        self.inputs.push((label.to_string(), path.to_path_buf(), hex));
        Ok(self)
    }

    pub fn header(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# saferisk {}", self.command);
        if !self.settings.is_empty() {
            let joined: Vec<String> = self
                .settings
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            let _ = writeln!(out, "# config: {}", joined.join(" "));
        }
        for (label, path, digest) in &self.inputs {
            let _ = writeln!(out, "# input: {}={} sha256={}", label, path.display(), digest);
        }
        out
    }
}

pub fn write_output(path: &Path, provenance: &Provenance, body: &str) -> Result<()> {
    let content = format!("{}{}", provenance.header(), body);
    fs::write(path, content).map_err(|e| RiskError::io(path, e))
}

/// Print to stdout, treating a closed pipe as a no-op so that piping into
/// `head` and friends does not turn into an error.
pub fn print_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(RiskError::io("<stdout>", e)),
    }
}

/// A numeric CSV: comment lines, a header row, then float rows.
pub struct NumericCsv {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl NumericCsv {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| RiskError::io(path, e))?;
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            match &columns {
                None => columns = Some(cells.iter().map(|s| s.to_string()).collect()),
                Some(cols) => {
                    if cells.len() != cols.len() {
                        return Err(RiskError::parse(
                            path,
                            lineno + 1,
                            format!("expected {} cells, got {}", cols.len(), cells.len()),
                        ));
                    }
                    let parsed: Vec<f64> = cells
                        .iter()
                        .map(|c| {
                            c.parse().map_err(|_| {
                                RiskError::parse(path, lineno + 1, format!("bad number '{c}'"))
                            })
                        })
                        .collect::<Result<_>>()?;
                    rows.push(parsed);
                }
            }
        }
        let columns = columns.ok_or_else(|| RiskError::Validation("empty data file".into()))?;
        if rows.is_empty() {
            return Err(RiskError::Validation(format!(
                "no data rows in {}",
                path.display()
            )));
        }
        Ok(NumericCsv { columns, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| RiskError::Validation(format!("missing column '{name}'")))?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// The value column of a file: an explicitly named one, the first
    /// present fallback name, or the only column.
    pub fn pick_column(&self, explicit: Option<&str>, fallbacks: &[&str]) -> Result<Vec<f64>> {
        if let Some(name) = explicit {
            return self.column(name);
        }
        for candidate in fallbacks {
            if self.columns.iter().any(|c| c == candidate) {
                return self.column(candidate);
            }
        }
        if self.columns.len() == 1 {
            return Ok(self.rows.iter().map(|r| r[0]).collect());
        }
        Err(RiskError::Validation(format!(
            "cannot pick a value column among {:?}; name one with --column",
            self.columns
        )))
    }
}
