//! Domain types, CSV ingestion, and validation for attribute catalogs and
//! report matrices.
//!
//! The catalog CSV schema is
//! `name,report_count,exposure_pct,real_s1..real_s5,worst_s1..worst_s5`
//! (UTF-8, `.` decimal separator). Lines starting with `#` before the header
//! are treated as comments; a `# severity_scale: s1,s2,s3,s4,s5` pragma
//! overrides the severity scale passed by the caller, which lets a catalog
//! file carry its own calibration. The matrix CSV is a header row of
//! attribute names followed by rows of `0`/`1` cells.

use std::collections::HashSet;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, RiskError};

/// Number of injury severity levels (Pain, First Aid, Medical Case/Lost
/// Work Time, Permanent Disablement, Fatality).
pub const SEVERITY_LEVELS: usize = 5;

/// Default impact scores for the five severity levels.
pub const DEFAULT_SEVERITY_SCORES: [f64; SEVERITY_LEVELS] = [12.0, 48.0, 192.0, 1024.0, 26214.0];

/// Unitless impact ratings for the five severity levels, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SeverityScale {
    scores: [f64; SEVERITY_LEVELS],
}

impl SeverityScale {
    pub fn new(scores: [f64; SEVERITY_LEVELS]) -> Result<Self> {
        for (i, &s) in scores.iter().enumerate() {
            if !s.is_finite() || s <= 0.0 {
                return Err(RiskError::Validation(format!(
                    "severity score s{} must be positive and finite, got {s}",
                    i + 1
                )));
            }
        }
        if !scores.windows(2).all(|w| w[0] < w[1]) {
            return Err(RiskError::Validation(
                "severity scores must be strictly increasing".into(),
            ));
        }
        Ok(SeverityScale { scores })
    }

    pub fn scores(&self) -> &[f64; SEVERITY_LEVELS] {
        &self.scores
    }

    /// Multiply every score by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        SeverityScale::new(self.scores.map(|s| s * factor))
    }
}

impl Default for SeverityScale {
    fn default() -> Self {
        SeverityScale {
            scores: DEFAULT_SEVERITY_SCORES,
        }
    }
}

/// One precursor: its exposure probability and severity counts for real and
/// worst possible outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeRecord {
    pub name: String,
    /// Probability of encountering the attribute onsite, in (0, 1].
    pub exposure: f64,
    pub severity_counts_real: [u32; SEVERITY_LEVELS],
    pub severity_counts_worst: [u32; SEVERITY_LEVELS],
    pub report_count: u32,
}

impl AttributeRecord {
    pub fn new(
        name: impl Into<String>,
        exposure: f64,
        severity_counts_real: [u32; SEVERITY_LEVELS],
        severity_counts_worst: [u32; SEVERITY_LEVELS],
        report_count: u32,
    ) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(RiskError::Validation("attribute name is empty".into()));
        }
        if name.contains(',') || name.starts_with('#') {
            return Err(RiskError::Validation(format!(
                "attribute name '{name}' cannot contain ',' or start with '#'"
            )));
        }
        if !(exposure > 0.0 && exposure <= 1.0) {
            return Err(RiskError::Validation(format!(
                "attribute '{name}': exposure must lie in (0, 1], got {exposure}"
            )));
        }
        let sum_real: u32 = severity_counts_real.iter().sum();
        let sum_worst: u32 = severity_counts_worst.iter().sum();
        if sum_real != report_count || sum_worst != report_count {
            return Err(RiskError::Validation(format!(
                "attribute '{name}': severity counts must sum to report_count \
                 ({report_count}), got real={sum_real} worst={sum_worst}"
            )));
        }
        Ok(AttributeRecord {
            name,
            exposure,
            severity_counts_real,
            severity_counts_worst,
            report_count,
        })
    }
}

/// An ordered, name-unique set of attribute records plus the severity scale
/// their counts are scored with.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeCatalog {
    records: Vec<AttributeRecord>,
    severity_scale: SeverityScale,
}

impl AttributeCatalog {
    pub fn new(records: Vec<AttributeRecord>, severity_scale: SeverityScale) -> Result<Self> {
        if records.is_empty() {
            return Err(RiskError::Validation("empty catalog".into()));
        }
        let mut seen = HashSet::new();
        for r in &records {
            if !seen.insert(r.name.as_str()) {
                return Err(RiskError::Validation(format!(
                    "duplicate attribute name '{}'",
                    r.name
                )));
            }
        }
        Ok(AttributeCatalog {
            records,
            severity_scale,
        })
    }

    pub fn records(&self) -> &[AttributeRecord] {
        &self.records
    }

    pub fn severity_scale(&self) -> &SeverityScale {
        &self.severity_scale
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.records.iter().position(|r| r.name == name)
    }
}

/// R×P binary presence matrix aligned with an attribute catalog by column
/// name. Every row has at least one nonzero cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportMatrix {
    column_names: Vec<String>,
    rows: Vec<Vec<u8>>,
}

impl ReportMatrix {
    pub fn new(column_names: Vec<String>, rows: Vec<Vec<u8>>) -> Result<Self> {
        if column_names.is_empty() {
            return Err(RiskError::Validation("matrix has no columns".into()));
        }
        let mut seen = HashSet::new();
        for c in &column_names {
            if !seen.insert(c.as_str()) {
                return Err(RiskError::Validation(format!(
                    "duplicate matrix column '{c}'"
                )));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != column_names.len() {
                return Err(RiskError::Validation(format!(
                    "matrix row {} has {} cells, expected {}",
                    i + 1,
                    row.len(),
                    column_names.len()
                )));
            }
            if row.iter().any(|&c| c > 1) {
                return Err(RiskError::Validation(format!(
                    "matrix row {} contains a non-binary cell",
                    i + 1
                )));
            }
            if row.iter().all(|&c| c == 0) {
                return Err(RiskError::Validation(format!(
                    "matrix row {} is a report with no attributes",
                    i + 1
                )));
            }
        }
        Ok(ReportMatrix { column_names, rows })
    }

    pub fn n_reports(&self) -> usize {
        self.rows.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.column_names.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }
}

/// How `parse_report_matrix` treats reports with no attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroRowPolicy {
    /// Any all-zero row is an error.
    Strict,
    /// All-zero rows are dropped; the drop count is reported to the caller.
    Drop,
}

const CATALOG_HEADER: [&str; 13] = [
    "name",
    "report_count",
    "exposure_pct",
    "real_s1",
    "real_s2",
    "real_s3",
    "real_s4",
    "real_s5",
    "worst_s1",
    "worst_s2",
    "worst_s3",
    "worst_s4",
    "worst_s5",
];

const SCALE_PRAGMA: &str = "# severity_scale:";

/// Exact percent -> fraction conversion by shifting the decimal point in
/// the textual representation; `pct * 0.01` in floats would not round-trip.
fn pct_string_to_fraction(s: &str) -> Option<f64> {
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit() || c == '.') {
        return None;
    }
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int_part.contains('.') || frac_part.contains('.') {
        return None;
    }
    let padded = format!("{int_part:0>3}");
    let split = padded.len() - 2;
    let shifted = format!("{}.{}{}", &padded[..split], &padded[split..], frac_part);
    shifted.parse().ok()
}

/// Exact fraction -> percent string, inverse of [`pct_string_to_fraction`].
fn fraction_to_pct_string(fraction: f64) -> String {
    let s = format!("{fraction}");
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i.to_string(), f.to_string()),
        None => (s, String::new()),
    };
    let padded = format!("{frac_part:0<2}");
    let (head, tail) = padded.split_at(2);
    let int_out = format!("{int_part}{head}");
    let int_out = int_out.trim_start_matches('0');
    let int_out = if int_out.is_empty() { "0" } else { int_out };
    let tail = tail.trim_end_matches('0');
    if tail.is_empty() {
        int_out.to_string()
    } else {
        format!("{int_out}.{tail}")
    }
}

/// Parse an attribute catalog CSV.
///
/// `scale` is used unless the file carries a `# severity_scale:` pragma.
/// Exposure is read from the percent column and divided by 100.
pub fn parse_catalog(path: impl AsRef<Path>, scale: &SeverityScale) -> Result<AttributeCatalog> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| RiskError::io(path, e))?;

    let mut scale = scale.clone();
    let mut lines = text.lines().enumerate().peekable();

    // leading comment block; may carry the scale pragma
    while let Some((_, line)) = lines.peek() {
        if !line.starts_with('#') {
            break;
        }
        if let Some(rest) = line.strip_prefix(SCALE_PRAGMA) {
            let (lineno, _) = *lines.peek().expect("peeked");
            scale = parse_scale_pragma(path, lineno + 1, rest)?;
        }
        lines.next();
    }

    let (header_lineno, header) = lines
        .next()
        .ok_or_else(|| RiskError::Validation("empty catalog".into()))?;
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    if fields != CATALOG_HEADER {
        return Err(RiskError::parse(
            path,
            header_lineno + 1,
            format!("unexpected catalog header '{header}'"),
        ));
    }

    let mut records = Vec::new();
    for (lineno, line) in lines {
        let lineno = lineno + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != CATALOG_HEADER.len() {
            return Err(RiskError::parse(
                path,
                lineno,
                format!("expected {} fields, got {}", CATALOG_HEADER.len(), cells.len()),
            ));
        }
        let name = cells[0].to_string();
        let report_count: u32 = cells[1]
            .parse()
            .map_err(|_| RiskError::parse(path, lineno, format!("bad report_count '{}'", cells[1])))?;
        let exposure = pct_string_to_fraction(cells[2]).ok_or_else(|| {
            RiskError::parse(path, lineno, format!("bad exposure_pct '{}'", cells[2]))
        })?;
        if !(exposure > 0.0 && exposure <= 1.0) {
            return Err(RiskError::parse(
                path,
                lineno,
                format!("exposure_pct must lie in (0, 100], got {}", cells[2]),
            ));
        }
        let mut counts = [[0u32; SEVERITY_LEVELS]; 2];
        for (k, cell) in cells[3..13].iter().enumerate() {
            counts[k / SEVERITY_LEVELS][k % SEVERITY_LEVELS] = cell.parse().map_err(|_| {
                RiskError::parse(path, lineno, format!("bad severity count '{cell}'"))
            })?;
        }
        let record = AttributeRecord::new(name, exposure, counts[0], counts[1], report_count)
            .map_err(|e| RiskError::parse(path, lineno, e.to_string()))?;
        records.push(record);
    }
    if records.is_empty() {
        return Err(RiskError::Validation("empty catalog".into()));
    }
    AttributeCatalog::new(records, scale)
}

fn parse_scale_pragma(path: &Path, lineno: usize, rest: &str) -> Result<SeverityScale> {
    let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
    if parts.len() != SEVERITY_LEVELS {
        return Err(RiskError::parse(
            path,
            lineno,
            format!("severity_scale pragma needs {SEVERITY_LEVELS} scores"),
        ));
    }
    let mut scores = [0.0; SEVERITY_LEVELS];
    for (i, p) in parts.iter().enumerate() {
        scores[i] = p
            .parse()
            .map_err(|_| RiskError::parse(path, lineno, format!("bad severity score '{p}'")))?;
    }
    SeverityScale::new(scores)
}

/// Serialize a catalog in the documented CSV schema, including the scale
/// pragma, so that re-parsing reproduces it field for field.
pub fn catalog_to_csv(catalog: &AttributeCatalog) -> String {
    let mut out = String::new();
    let s = catalog.severity_scale().scores();
    out.push_str(&format!(
        "{SCALE_PRAGMA} {},{},{},{},{}\n",
        s[0], s[1], s[2], s[3], s[4]
    ));
    out.push_str(&CATALOG_HEADER.join(","));
    out.push('\n');
    for r in catalog.records() {
        let real = r.severity_counts_real.map(|c| c.to_string()).join(",");
        let worst = r.severity_counts_worst.map(|c| c.to_string()).join(",");
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.name,
            r.report_count,
            fraction_to_pct_string(r.exposure),
            real,
            worst
        ));
    }
    out
}

pub fn write_catalog(path: impl AsRef<Path>, catalog: &AttributeCatalog) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(|e| RiskError::io(path, e))?;
    f.write_all(catalog_to_csv(catalog).as_bytes())
        .map_err(|e| RiskError::io(path, e))
}

/// Parse a binary report/attribute matrix CSV and validate it against the
/// catalog. Returns the matrix and the number of dropped all-zero rows
/// (always 0 under [`ZeroRowPolicy::Strict`]).
pub fn parse_report_matrix(
    path: impl AsRef<Path>,
    catalog: &AttributeCatalog,
    policy: ZeroRowPolicy,
) -> Result<(ReportMatrix, usize)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| RiskError::io(path, e))?;

    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());

    let (header_lineno, header) = lines
        .next()
        .ok_or_else(|| RiskError::Validation("empty matrix".into()))?;
    let column_names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    for c in &column_names {
        if catalog.index_of(c).is_none() {
            return Err(RiskError::parse(
                path,
                header_lineno + 1,
                format!("unknown attribute column '{c}'"),
            ));
        }
    }

    let mut rows = Vec::new();
    let mut dropped = 0usize;
    for (lineno, line) in lines {
        let lineno = lineno + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != column_names.len() {
            return Err(RiskError::parse(
                path,
                lineno,
                format!("expected {} cells, got {}", column_names.len(), cells.len()),
            ));
        }
        let mut row = Vec::with_capacity(cells.len());
        for cell in cells {
            match cell {
                "0" => row.push(0u8),
                "1" => row.push(1u8),
                other => {
                    return Err(RiskError::parse(
                        path,
                        lineno,
                        format!("non-binary cell '{other}'"),
                    ))
                }
            }
        }
        if row.iter().all(|&c| c == 0) {
            match policy {
                ZeroRowPolicy::Strict => {
                    return Err(RiskError::parse(
                        path,
                        lineno,
                        "report with no attributes".to_string(),
                    ))
                }
                ZeroRowPolicy::Drop => {
                    dropped += 1;
                    continue;
                }
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(RiskError::Validation(
            "matrix has no reports with attributes".into(),
        ));
    }
    let matrix = ReportMatrix::new(column_names, rows)?;
    Ok((matrix, dropped))
}

pub fn matrix_to_csv(matrix: &ReportMatrix) -> String {
    let mut out = String::new();
    out.push_str(&matrix.column_names().join(","));
    out.push('\n');
    for row in matrix.rows() {
        let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Generate a synthetic report matrix: each report carries 1–5 distinct
/// attributes drawn with probability proportional to the catalog's
/// report counts. Deterministic for a fixed seed.
pub fn generate_demo_matrix(
    catalog: &AttributeCatalog,
    n_reports: usize,
    seed: u64,
) -> Result<ReportMatrix> {
    if n_reports == 0 {
        return Err(RiskError::Domain("n_reports must be at least 1".into()));
    }
    let p = catalog.len();
    let weights: Vec<u32> = catalog.records().iter().map(|r| r.report_count).collect();
    // zero-count attributes are never drawn, so they cap the row size
    let drawable = weights.iter().filter(|&&w| w > 0).count();
    if drawable == 0 {
        return Err(RiskError::Domain(
            "catalog has no attributes with a positive report count".into(),
        ));
    }
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| RiskError::Domain(format!("bad sampling weights: {e}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n_reports);
    for _ in 0..n_reports {
        let k = rng.random_range(1..=5usize.min(drawable));
        let mut row = vec![0u8; p];
        let mut placed = 0;
        while placed < k {
            let idx = dist.sample(&mut rng);
            if row[idx] == 0 {
                row[idx] = 1;
                placed += 1;
            }
        }
        rows.push(row);
    }
    let names = catalog.records().iter().map(|r| r.name.clone()).collect();
    ReportMatrix::new(names, rows)
}
