//! Quantile and return-period estimation, labeled risk ranges, and the
//! conditional-quantile risk-escalation query.

use crate::error::{Result, RiskError};
use crate::riskcore::Basis;

/// Quantile levels the labeled risk ranges are cut at.
pub const RANGE_QUANTILES: [f64; 6] = [0.0, 0.25, 0.50, 0.75, 0.99, 1.0];

/// Empirical quantile: order statistics with linear interpolation at
/// position `(n - 1) * p + 1` (1-based), the convention the reference
/// tables were produced with. `Q(0)` is the minimum, `Q(1)` the maximum.
pub fn empirical_quantile(sample: &[f64], p: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(RiskError::Domain("quantile of an empty sample".into()));
    }
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(RiskError::Domain(format!(
            "quantile level must lie in [0, 1], got {p}"
        )));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, p))
}

/// Same interpolation rule on data the caller has already sorted.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let pos = (n - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 < n && frac > 0.0 {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

/// The value observed on average once per `T` observations: `Q(1 - 1/T)`.
pub fn return_period_quantile(sample: &[f64], t: f64) -> Result<f64> {
    if t.is_nan() || t <= 1.0 {
        return Err(RiskError::Domain(format!(
            "return period must exceed 1, got {t}"
        )));
    }
    empirical_quantile(sample, 1.0 - 1.0 / t)
}

/// Labels for the five risk ranges, in increasing order of severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RangeLabel {
    Low,
    Medium,
    High,
    VeryHigh,
    Extreme,
}

impl RangeLabel {
    pub const ALL: [RangeLabel; 5] = [
        RangeLabel::Low,
        RangeLabel::Medium,
        RangeLabel::High,
        RangeLabel::VeryHigh,
        RangeLabel::Extreme,
    ];
}

impl std::fmt::Display for RangeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RangeLabel::Low => "low",
            RangeLabel::Medium => "medium",
            RangeLabel::High => "high",
            RangeLabel::VeryHigh => "very high",
            RangeLabel::Extreme => "extreme",
        };
        write!(f, "{s}")
    }
}

/// Risk-range breakpoints at the [`RANGE_QUANTILES`] levels of a (usually
/// large, simulated) risk sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskRanges {
    breakpoints: [f64; 6],
    basis: Basis,
}

impl RiskRanges {
    pub fn from_breakpoints(breakpoints: [f64; 6], basis: Basis) -> Result<Self> {
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(RiskError::Validation("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] > w[1]) {
            return Err(RiskError::Validation(
                "breakpoints must be non-decreasing".into(),
            ));
        }
        Ok(RiskRanges { breakpoints, basis })
    }

    pub fn breakpoints(&self) -> &[f64; 6] {
        &self.breakpoints
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }
}

/// Cut a sample at the fixed range quantiles.
pub fn build_ranges(sample: &[f64], basis: Basis) -> Result<RiskRanges> {
    if sample.is_empty() {
        return Err(RiskError::Domain("cannot build ranges from no data".into()));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut breakpoints = [0.0; 6];
    for (slot, &p) in breakpoints.iter_mut().zip(RANGE_QUANTILES.iter()) {
        *slot = quantile_sorted(&sorted, p);
    }
    RiskRanges::from_breakpoints(breakpoints, basis)
}

/// Classify a risk value into its range. Intervals are left-closed and
/// right-open; values at or above the last breakpoint are extreme, and
/// values below the first breakpoint fall into the lowest range.
pub fn classify(value: f64, ranges: &RiskRanges) -> RangeLabel {
    let bp = ranges.breakpoints();
    for (k, label) in RangeLabel::ALL.iter().enumerate().take(4) {
        if value < bp[k + 1] {
            return *label;
        }
    }
    RangeLabel::Extreme
}

/// Parameters of a risk-escalation query: the observed real-outcome risk,
/// the conditioning window around it, and the quantile threshold.
#[derive(Debug, Clone, Copy)]
pub struct EscalationQuery {
    pub x0: f64,
    /// Window half-width below `x0` (the conditioning interval is open).
    pub window_lo: f64,
    /// Window half-width above `x0`.
    pub window_hi: f64,
    /// Quantile level of the conditional worst-outcome distribution.
    pub threshold: f64,
    /// Minimum number of supporting pairs for the estimate to be reported.
    pub min_support: usize,
}

impl EscalationQuery {
    /// Query with the documented defaults: window 5 on each side, 80%
    /// threshold, 30 supporting pairs minimum.
    pub fn new(x0: f64) -> Self {
        EscalationQuery {
            x0,
            window_lo: 5.0,
            window_hi: 5.0,
            threshold: 0.8,
            min_support: 30,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.x0.is_finite() {
            return Err(RiskError::Domain("x0 must be finite".into()));
        }
        if !(self.window_lo >= 0.0 && self.window_hi >= 0.0) {
            return Err(RiskError::Domain("window widths must be non-negative".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(RiskError::Domain(format!(
                "threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        if self.min_support == 0 {
            return Err(RiskError::Domain("min_support must be at least 1".into()));
        }
        Ok(())
    }
}

/// Result of a risk-escalation query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscalationEstimate {
    /// Conditional quantile of worst-outcome risk given the window.
    pub value: f64,
    pub label: RangeLabel,
    /// Number of simulated pairs inside the conditioning window.
    pub support: usize,
}

/// Conditional quantile of worst-outcome risk given that the real-outcome
/// risk falls in the open window `(x0 - window_lo, x0 + window_hi)`.
pub fn escalation_estimate(
    pairs: &crate::simgen::RiskPairSample,
    query: &EscalationQuery,
    worst_ranges: &RiskRanges,
) -> Result<EscalationEstimate> {
    query.validate()?;
    let lo = query.x0 - query.window_lo;
    let hi = query.x0 + query.window_hi;
    let ys: Vec<f64> = pairs
        .pairs()
        .iter()
        .filter(|(x, _)| lo < *x && *x < hi)
        .map(|&(_, y)| y)
        .collect();
    if ys.len() < query.min_support {
        return Err(RiskError::InsufficientSupport {
            found: ys.len(),
            required: query.min_support,
        });
    }
    let value = empirical_quantile(&ys, query.threshold)?;
    Ok(EscalationEstimate {
        value,
        label: classify(value, worst_ranges),
        support: ys.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::RiskPairSample;

    #[test]
    fn quantiles_of_one_to_five() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(empirical_quantile(&s, 0.5).unwrap(), 3.0);
        assert_eq!(empirical_quantile(&s, 0.0).unwrap(), 1.0);
        assert_eq!(empirical_quantile(&s, 1.0).unwrap(), 5.0);
        assert_eq!(empirical_quantile(&s, 0.25).unwrap(), 2.0);
        // interpolated position: (5-1)*0.1 = 0.4 -> 1 + 0.4*(2-1)
        assert_eq!(empirical_quantile(&s, 0.1).unwrap(), 1.4);
        assert!(empirical_quantile(&s, 1.5).is_err());
        assert!(empirical_quantile(&[], 0.5).is_err());
    }

    #[test]
    fn return_periods_map_to_quantile_levels() {
        let s: Vec<f64> = (1..=1000).map(f64::from).collect();
        for (t, p) in [(2.0, 0.5), (100.0, 0.99), (500.0, 0.998)] {
            assert_eq!(
                return_period_quantile(&s, t).unwrap(),
                empirical_quantile(&s, p).unwrap()
            );
        }
        assert!(return_period_quantile(&s, 1.0).is_err());
    }

    /// A 101-point sample whose range quantiles land exactly on the given
    /// breakpoints: positions 0/25/50/75/99/100 hit the levels
    /// 0/0.25/0.5/0.75/0.99/1 without interpolation.
    fn engineered_sample(breakpoints: [f64; 6]) -> Vec<f64> {
        let idx = [0usize, 25, 50, 75, 99, 100];
        let mut s = vec![0.0; 101];
        for w in idx.iter().zip(breakpoints).collect::<Vec<_>>().windows(2) {
            let (&i0, v0) = w[0];
            let (&i1, v1) = w[1];
            for (k, slot) in s.iter_mut().enumerate().take(i1 + 1).skip(i0) {
                *slot = v0 + (v1 - v0) * (k - i0) as f64 / (i1 - i0) as f64;
            }
        }
        s
    }

    #[test]
    fn build_ranges_hits_engineered_breakpoints() {
        let real = [0.0, 29.0, 61.0, 105.0, 647.0, 740.0];
        let ranges = build_ranges(&engineered_sample(real), Basis::Real).unwrap();
        assert_eq!(ranges.breakpoints(), &real);

        let worst = [0.0, 183.0, 395.0, 837.0, 7092.0, 10126.0];
        let ranges = build_ranges(&engineered_sample(worst), Basis::Worst).unwrap();
        assert_eq!(ranges.breakpoints(), &worst);
    }

    #[test]
    fn constant_sample_collapses_breakpoints() {
        let ranges = build_ranges(&[7.0; 12], Basis::Worst).unwrap();
        assert_eq!(ranges.breakpoints(), &[7.0; 6]);
    }

    fn reference_real_ranges() -> RiskRanges {
        RiskRanges::from_breakpoints([0.0, 29.0, 61.0, 105.0, 647.0, 740.0], Basis::Real).unwrap()
    }

    #[test]
    fn classify_reference_scenarios() {
        let ranges = reference_real_ranges();
        assert_eq!(classify(705.0, &ranges), RangeLabel::Extreme);
        assert_eq!(classify(58.0, &ranges), RangeLabel::Medium);
        assert_eq!(classify(7.0, &ranges), RangeLabel::Low);
        // breakpoints themselves start the next interval
        assert_eq!(classify(29.0, &ranges), RangeLabel::Medium);
        assert_eq!(classify(740.0, &ranges), RangeLabel::Extreme);
        assert_eq!(classify(10_000.0, &ranges), RangeLabel::Extreme);

        // conditional-quantile estimates classified under worst-basis ranges
        let worst = RiskRanges::from_breakpoints(
            [0.0, 183.0, 395.0, 837.0, 7092.0, 10126.0],
            Basis::Worst,
        )
        .unwrap();
        assert_eq!(classify(7266.0, &worst), RangeLabel::Extreme);
        assert_eq!(classify(676.0, &worst), RangeLabel::High);
        assert_eq!(classify(145.0, &worst), RangeLabel::Low);
    }

    #[test]
    fn escalation_tracks_a_deterministic_relationship() {
        // y = 10x exactly; conditioning near x0 = 50 pins y near 500
        let pairs: Vec<(f64, f64)> = (0..5000)
            .map(|i| {
                let x = i as f64 * 0.02;
                (x, 10.0 * x)
            })
            .collect();
        let sample = RiskPairSample::new(pairs).unwrap();
        let worst =
            RiskRanges::from_breakpoints([0.0, 100.0, 250.0, 480.0, 900.0, 1000.0], Basis::Worst)
                .unwrap();
        let est = escalation_estimate(&sample, &EscalationQuery::new(50.0), &worst).unwrap();
        assert!(est.value > 450.0 && est.value < 550.0, "value {}", est.value);
        assert_eq!(est.label, RangeLabel::VeryHigh);
        assert!(est.support > 100);
    }

    #[test]
    fn empty_window_reports_insufficient_support() {
        let pairs: Vec<(f64, f64)> = (0..100).map(|i| (i as f64, i as f64)).collect();
        let sample = RiskPairSample::new(pairs).unwrap();
        let ranges = reference_real_ranges();
        let query = EscalationQuery::new(1.0e6);
        match escalation_estimate(&sample, &query, &ranges) {
            Err(RiskError::InsufficientSupport { found, required }) => {
                assert_eq!((found, required), (0, 30));
            }
            other => panic!("expected insufficient support, got {other:?}"),
        }
    }

    #[test]
    fn bad_query_parameters_are_rejected() {
        let pairs = RiskPairSample::new((0..100).map(|i| (i as f64, i as f64)).collect()).unwrap();
        let ranges = reference_real_ranges();
        let mut q = EscalationQuery::new(10.0);
        q.threshold = 1.2;
        assert!(escalation_estimate(&pairs, &q, &ranges).is_err());
        let mut q = EscalationQuery::new(10.0);
        q.window_lo = -1.0;
        assert!(escalation_estimate(&pairs, &q, &ranges).is_err());
    }

    #[test]
    fn escalation_matches_brute_force_filter_then_quantile() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(40);
        let pairs: Vec<(f64, f64)> = (0..4000)
            .map(|_| {
                let x: f64 = rng.random::<f64>() * 100.0;
                (x, x * (1.0 + rng.random::<f64>()))
            })
            .collect();
        let sample = RiskPairSample::new(pairs.clone()).unwrap();
        let ranges = reference_real_ranges();
        for _ in 0..50 {
            let mut q = EscalationQuery::new(rng.random::<f64>() * 100.0);
            q.min_support = 1;
            q.threshold = rng.random::<f64>() * 0.98 + 0.01;
            let mine = escalation_estimate(&sample, &q, &ranges);

            let mut ys: Vec<f64> = pairs
                .iter()
                .filter(|(x, _)| q.x0 - q.window_lo < *x && *x < q.x0 + q.window_hi)
                .map(|&(_, y)| y)
                .collect();
            ys.sort_by(f64::total_cmp);
            if ys.is_empty() {
                assert!(mine.is_err());
                continue;
            }
            let pos = (ys.len() - 1) as f64 * q.threshold;
            let lo = pos.floor() as usize;
            let frac = pos - lo as f64;
            let brute = if lo + 1 < ys.len() && frac > 0.0 {
                ys[lo] + frac * (ys[lo + 1] - ys[lo])
            } else {
                ys[lo]
            };
            assert_eq!(mine.unwrap().value, brute);
        }
    }
}
