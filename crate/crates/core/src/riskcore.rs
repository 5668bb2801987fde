//! Attribute-level and report-level risk computation, and the
//! worst-versus-real escalation-delta ranking.
//!
//! All arithmetic is carried out on unrounded values; rounding (ceiling to
//! the nearest integer) is applied only when values are displayed or
//! serialized, so rounding error never compounds through sums or the delta
//! ranking.

use crate::datamodel::{AttributeCatalog, ReportMatrix, SeverityScale, SEVERITY_LEVELS};
use crate::error::{Result, RiskError};

/// Which outcome assessment a risk value is based on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Real,
    Worst,
}

impl std::fmt::Display for Basis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Basis::Real => write!(f, "real"),
            Basis::Worst => write!(f, "worst"),
        }
    }
}

/// Per-attribute relative risk values aligned with catalog order.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeRiskVector {
    names: Vec<String>,
    values: Vec<f64>,
    basis: Basis,
}

impl RelativeRiskVector {
    pub fn new(names: Vec<String>, values: Vec<f64>, basis: Basis) -> Result<Self> {
        if names.len() != values.len() {
            return Err(RiskError::Validation(format!(
                "{} names for {} risk values",
                names.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(RiskError::Validation(format!(
                "relative risk must be finite and non-negative, got {v}"
            )));
        }
        Ok(RelativeRiskVector {
            names,
            values,
            basis,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }

    /// Display-rounded values (ceiling to the nearest integer).
    pub fn display_values(&self) -> Vec<u64> {
        self.values.iter().map(|&v| display_round(v)).collect()
    }
}

/// Ceiling display rounding used for serialized relative risks.
pub fn display_round(value: f64) -> u64 {
    value.ceil() as u64
}

/// One risk value per report.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskSample {
    values: Vec<f64>,
    basis: Basis,
}

impl RiskSample {
    pub fn new(values: Vec<f64>, basis: Basis) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(RiskError::Validation(format!(
                "report risk must be finite and non-negative, got {v}"
            )));
        }
        Ok(RiskSample { values, basis })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Total risk of one attribute: severity counts weighted by impact scores.
pub fn attribute_total_risk(counts: &[u32; SEVERITY_LEVELS], scale: &SeverityScale) -> f64 {
    counts
        .iter()
        .zip(scale.scores())
        .map(|(&n, &s)| f64::from(n) * s)
        .sum()
}

/// Relative risk: total risk weighted by the inverse exposure probability.
pub fn attribute_relative_risk(total_risk: f64, exposure: f64) -> Result<f64> {
    if !(exposure > 0.0 && exposure <= 1.0) {
        return Err(RiskError::Domain(format!(
            "exposure must lie in (0, 1], got {exposure}"
        )));
    }
    Ok(total_risk / exposure)
}

/// Relative risk of every attribute in the catalog, unrounded.
pub fn catalog_relative_risks(catalog: &AttributeCatalog, basis: Basis) -> RelativeRiskVector {
    let scale = catalog.severity_scale();
    let mut names = Vec::with_capacity(catalog.len());
    let mut values = Vec::with_capacity(catalog.len());
    for r in catalog.records() {
        let counts = match basis {
            Basis::Real => &r.severity_counts_real,
            Basis::Worst => &r.severity_counts_worst,
        };
        let total = attribute_total_risk(counts, scale);
        let rr = attribute_relative_risk(total, r.exposure)
            .expect("catalog exposure already validated");
        names.push(r.name.clone());
        values.push(rr);
    }
    RelativeRiskVector::new(names, values, basis).expect("values are non-negative")
}

/// Report-level risk: for each report, the sum of the relative risks of the
/// attributes present in it.
pub fn report_risks(matrix: &ReportMatrix, rr: &RelativeRiskVector) -> Result<RiskSample> {
    let col_risk: Vec<f64> = matrix
        .column_names()
        .iter()
        .map(|c| {
            rr.get(c).ok_or_else(|| {
                RiskError::Validation(format!(
                    "matrix column '{c}' is missing from the relative risk vector"
                ))
            })
        })
        .collect::<Result<_>>()?;

    let values = matrix
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .zip(&col_risk)
                .filter(|(&cell, _)| cell == 1)
                .map(|(_, &v)| v)
                .sum()
        })
        .collect();
    RiskSample::new(values, rr.basis())
}

/// Escalation potential of every attribute: worst-basis relative risk minus
/// real-basis relative risk, computed on unrounded values and sorted
/// descending. Ties break by name, ascending.
pub fn escalation_deltas(catalog: &AttributeCatalog) -> Vec<(String, f64)> {
    let real = catalog_relative_risks(catalog, Basis::Real);
    let worst = catalog_relative_risks(catalog, Basis::Worst);
    let mut deltas: Vec<(String, f64)> = real
        .names()
        .iter()
        .zip(real.values().iter().zip(worst.values()))
        .map(|(name, (&r, &w))| (name.clone(), w - r))
        .collect();
    deltas.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    deltas
}
