//! Univariate and bivariate smoothed-bootstrap risk generators with
//! variance correction, plus the rank transform to pseudo-observation
//! space.
//!
//! Each simulated value resamples an observation uniformly with
//! replacement, perturbs it with kernel-scale normal noise, and rescales
//! the deviation from the sample mean by `1/sqrt(1 + h^2/var)` so the
//! synthetic sample preserves the source mean and variance. The bivariate
//! generator draws ONE index per iteration and perturbs both coordinates of
//! that pair with independent noise, which is what preserves the dependence
//! structure.
//!
//! Negative draws violate the definition of risk; in [`NegativePolicy::Reject`]
//! mode they are discarded and redrawn until the requested count exists,
//! which is distributionally identical to deleting them afterwards but
//! yields exactly `n_sim` values. [`NegativePolicy::Keep`] exists so
//! moment-preservation checks can run untruncated.
//!
//! Determinism: the output is a pure function of (input, seed, streams,
//! negatives). Draws are partitioned across `streams` ChaCha substreams of
//! the same 64-bit seed (substream `k` handles the `k`-th chunk of the
//! output), so a result is reproducible for a fixed (seed, streams) but not
//! identical across different stream counts.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::density::silverman_bandwidth;
use crate::error::{Result, RiskError};
use crate::normal;

const MAX_CONSECUTIVE_REJECTS: u64 = 1_000_000;

/// How the generators treat negative simulated values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativePolicy {
    /// Redraw until non-negative; output is all non-negative.
    Reject,
    /// Keep negative draws; used by moment-preservation diagnostics.
    Keep,
}

#[derive(Debug, Clone, Copy)]
pub struct GeneratorConfig {
    pub n_sim: usize,
    pub seed: u64,
    pub negatives: NegativePolicy,
    pub streams: usize,
}

impl GeneratorConfig {
    pub fn new(n_sim: usize, seed: u64) -> Self {
        GeneratorConfig {
            n_sim,
            seed,
            negatives: NegativePolicy::Reject,
            streams: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_sim == 0 {
            return Err(RiskError::Domain("n_sim must be at least 1".into()));
        }
        if self.streams == 0 {
            return Err(RiskError::Domain("streams must be at least 1".into()));
        }
        Ok(())
    }

    /// Chunk sizes per substream; they sum to `n_sim`.
    fn chunks(&self) -> Vec<usize> {
        let per = self.n_sim / self.streams;
        let extra = self.n_sim % self.streams;
        (0..self.streams)
            .map(|s| per + usize::from(s < extra))
            .collect()
    }

    fn stream_rng(&self, stream: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream as u64);
        rng
    }
}

struct Margin {
    mean: f64,
    bandwidth: f64,
    /// 1/sqrt(1 + h^2/var), the variance-correction factor.
    shrink: f64,
}

impl Margin {
    fn fit(sample: &[f64]) -> Result<Self> {
        let n = sample.len() as f64;
        let mean = sample.iter().sum::<f64>() / n;
        let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let bandwidth = silverman_bandwidth(sample)?;
        Ok(Margin {
            mean,
            bandwidth,
            shrink: 1.0 / (1.0 + bandwidth * bandwidth / var).sqrt(),
        })
    }

    fn perturb(&self, value: f64, eps: f64) -> f64 {
        self.mean + (value - self.mean + self.bandwidth * eps) * self.shrink
    }
}

/// Univariate smoothed bootstrap with variance correction.
pub fn smoothed_bootstrap_uni(sample: &[f64], cfg: &GeneratorConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let margin = Margin::fit(sample)?;
    let n = sample.len();

    let mut out = Vec::with_capacity(cfg.n_sim);
    for (stream, chunk) in cfg.chunks().into_iter().enumerate() {
        let mut rng = cfg.stream_rng(stream);
        let mut rejects = 0u64;
        let mut produced = 0usize;
        while produced < chunk {
            let i = rng.random_range(0..n);
            let eps: f64 = rng.sample(StandardNormal);
            let x = margin.perturb(sample[i], eps);
            if cfg.negatives == NegativePolicy::Reject && x < 0.0 {
                rejects += 1;
                if rejects > MAX_CONSECUTIVE_REJECTS {
                    return Err(RiskError::Domain(format!(
                        "rejected {MAX_CONSECUTIVE_REJECTS} consecutive negative draws; \
                         the sample is incompatible with non-negative simulation"
                    )));
                }
                continue;
            }
            rejects = 0;
            out.push(x);
            produced += 1;
        }
    }
    Ok(out)
}

/// Paired observations of real-outcome and worst-outcome report risk.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskPairSample {
    pairs: Vec<(f64, f64)>,
}

impl RiskPairSample {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(RiskError::Validation("pair values must be finite".into()));
        }
        Ok(RiskPairSample { pairs })
    }

    pub fn from_margins(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(RiskError::Validation(format!(
                "margin lengths differ: {} vs {}",
                xs.len(),
                ys.len()
            )));
        }
        Self::new(xs.iter().copied().zip(ys.iter().copied()).collect())
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    /// Rank-based pseudo pairs: each margin mapped through rank/(n+1).
    /// Always strictly inside the unit square.
    pub fn pseudo_rank(&self) -> Vec<(f64, f64)> {
        let u = rank_transform(&self.xs());
        let v = rank_transform(&self.ys());
        u.into_iter().zip(v).collect()
    }

    /// Pseudo pairs through the standard normal CDF applied to the raw
    /// values, clamped into the open unit square. Uniform margins are only
    /// to be expected when the margins are approximately standard normal;
    /// the rank route is the statistically standard one.
    pub fn pseudo_normal(&self) -> Vec<(f64, f64)> {
        let clamp = |p: f64| p.clamp(f64::MIN_POSITIVE, 1.0f64.next_down());
        self.pairs
            .iter()
            .map(|&(x, y)| (clamp(normal::cdf(x)), clamp(normal::cdf(y))))
            .collect()
    }
}

/// Bivariate smoothed bootstrap: one resampled pair per iteration,
/// independent kernel noise per coordinate, per-margin variance correction.
pub fn smoothed_bootstrap_biv(pairs: &RiskPairSample, cfg: &GeneratorConfig) -> Result<RiskPairSample> {
    cfg.validate()?;
    let xs = pairs.xs();
    let ys = pairs.ys();
    let mx = Margin::fit(&xs)?;
    let my = Margin::fit(&ys)?;
    let n = pairs.len();

    let mut out = Vec::with_capacity(cfg.n_sim);
    for (stream, chunk) in cfg.chunks().into_iter().enumerate() {
        let mut rng = cfg.stream_rng(stream);
        let mut rejects = 0u64;
        let mut produced = 0usize;
        while produced < chunk {
            let i = rng.random_range(0..n);
            let ex: f64 = rng.sample(StandardNormal);
            let ey: f64 = rng.sample(StandardNormal);
            let x = mx.perturb(xs[i], ex);
            let y = my.perturb(ys[i], ey);
            if cfg.negatives == NegativePolicy::Reject && (x < 0.0 || y < 0.0) {
                rejects += 1;
                if rejects > MAX_CONSECUTIVE_REJECTS {
                    return Err(RiskError::Domain(format!(
                        "rejected {MAX_CONSECUTIVE_REJECTS} consecutive draws with a \
                         negative coordinate"
                    )));
                }
                continue;
            }
            rejects = 0;
            out.push((x, y));
            produced += 1;
        }
    }
    RiskPairSample::new(out)
}

/// Rank transform to pseudo-observations: `rank / (n + 1)`, ties receiving
/// the average of their ranks. Output lies strictly inside (0, 1).
pub fn rank_transform(sample: &[f64]) -> Vec<f64> {
    let n = sample.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sample[a].total_cmp(&sample[b]));

    let mut out = vec![0.0; n];
    let denom = (n + 1) as f64;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sample[order[j + 1]] == sample[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j+1 share the average rank
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg_rank / denom;
        }
        i = j + 1;
    }
    out
}
