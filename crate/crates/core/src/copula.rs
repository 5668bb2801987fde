//! Empirical copula density estimation on the unit square and dependence
//! diagnostics.
//!
//! The copula density is estimated from rank-based pseudo-observations:
//! both margins are rank-transformed, sent to the real line with the
//! inverse normal CDF, smoothed there with a product of univariate normal
//! kernels (per-coordinate Silverman bandwidths), and mapped back by
//! dividing out the normal density at the transformed coordinates. Working
//! in the unbounded space sidesteps the severe corner bias a plain kernel
//! estimate suffers on the unit square.

use crate::density::silverman_bandwidth;
use crate::error::{Result, RiskError};
use crate::normal;
use crate::simgen::{rank_transform, RiskPairSample};

/// Default evaluation grid size per coordinate.
pub const DEFAULT_COPULA_GRID: usize = 101;

/// An m-by-m copula density evaluation on cell-center coordinates
/// `(k + 0.5) / m`, which avoids the exact corners where the
/// back-transform Jacobian diverges.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaGrid {
    coords: Vec<f64>,
    /// Row-major: `values[i * m + j] = c(coords[i], coords[j])`.
    values: Vec<f64>,
}

impl CopulaGrid {
    fn new(coords: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != coords.len() * coords.len() {
            return Err(RiskError::Validation("grid shape mismatch".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(RiskError::Validation(
                "copula density must be finite and non-negative".into(),
            ));
        }
        Ok(CopulaGrid { coords, values })
    }

    pub fn size(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.coords.len() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Double trapezoidal integral over the grid span.
    pub fn integral(&self) -> f64 {
        let m = self.coords.len();
        let mut total = 0.0;
        for i in 0..m - 1 {
            let du = self.coords[i + 1] - self.coords[i];
            for j in 0..m - 1 {
                let dv = self.coords[j + 1] - self.coords[j];
                let cell = self.value(i, j)
                    + self.value(i + 1, j)
                    + self.value(i, j + 1)
                    + self.value(i + 1, j + 1);
                total += 0.25 * cell * du * dv;
            }
        }
        total
    }

    /// Long-format CSV export: one `u,v,density` row per grid node.
    pub fn to_long_csv(&self) -> String {
        let mut out = String::from("u,v,density\n");
        let m = self.coords.len();
        for i in 0..m {
            for j in 0..m {
                out.push_str(&format!(
                    "{},{},{}\n",
                    self.coords[i],
                    self.coords[j],
                    self.value(i, j)
                ));
            }
        }
        out
    }

    /// The grid with the two coordinates exchanged.
    pub fn transposed(&self) -> CopulaGrid {
        let m = self.coords.len();
        let mut values = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                values[j * m + i] = self.value(i, j);
            }
        }
        CopulaGrid {
            coords: self.coords.clone(),
            values,
        }
    }
}

/// Estimate the copula density of `pairs` on an `m`-by-`m` grid.
///
/// Consumes ranks only, so the result is invariant under strictly
/// increasing transformations of either margin.
pub fn empirical_copula_density(pairs: &RiskPairSample, m: usize) -> Result<CopulaGrid> {
    if m < 2 {
        return Err(RiskError::Domain(format!(
            "copula grid needs m >= 2, got {m}"
        )));
    }
    let n = pairs.len();
    if n < 10 {
        return Err(RiskError::Domain(format!(
            "copula estimation needs at least 10 pairs, got {n}"
        )));
    }
    let s: Vec<f64> = rank_transform(&pairs.xs())
        .into_iter()
        .map(normal::inv_cdf)
        .collect();
    let t: Vec<f64> = rank_transform(&pairs.ys())
        .into_iter()
        .map(normal::inv_cdf)
        .collect();
    let hs = silverman_bandwidth(&s)
        .map_err(|e| RiskError::Domain(format!("degenerate x margin: {e}")))?;
    let ht = silverman_bandwidth(&t)
        .map_err(|e| RiskError::Domain(format!("degenerate y margin: {e}")))?;

    let coords: Vec<f64> = (0..m).map(|k| (k as f64 + 0.5) / m as f64).collect();
    let z: Vec<f64> = coords.iter().map(|&u| normal::inv_cdf(u)).collect();

    // Kernel weight of observation i at grid coordinate j, per margin.
    // Contributions beyond z^2 > 80 (kernel mass < 5e-18) are dropped.
    let weights = |centers: &[f64], h: f64| -> Vec<f64> {
        let mut w = vec![0.0; n * m];
        for (i, &c) in centers.iter().enumerate() {
            for (j, &g) in z.iter().enumerate() {
                let d = (c - g) / h;
                let q = d * d;
                if q < 80.0 {
                    w[i * m + j] = (-0.5 * q).exp();
                }
            }
        }
        w
    };
    let ws = weights(&s, hs);
    let wt = weights(&t, ht);

    let mut joint = vec![0.0; m * m];
    for i in 0..n {
        let row_s = &ws[i * m..(i + 1) * m];
        let row_t = &wt[i * m..(i + 1) * m];
        for (a, &sa) in row_s.iter().enumerate() {
            if sa == 0.0 {
                continue;
            }
            let out = &mut joint[a * m..(a + 1) * m];
            for (b, &tb) in row_t.iter().enumerate() {
                out[b] += sa * tb;
            }
        }
    }

    // grouping keeps the value exactly symmetric in the two margins, so
    // coordinate swaps transpose the grid bit for bit
    let norm_kernel = (hs * ht) * (n as f64 * 2.0 * std::f64::consts::PI);
    let phi: Vec<f64> = z.iter().map(|&g| normal::pdf(g)).collect();
    let mut values = vec![0.0; m * m];
    for a in 0..m {
        for b in 0..m {
            values[a * m + b] = joint[a * m + b] / (norm_kernel * (phi[a] * phi[b]));
        }
    }
    CopulaGrid::new(coords, values)
}

/// Kendall's tau: (concordant - discordant) / (n choose 2), pairs tied in
/// either coordinate counting as neither. Computed in O(n log n) by
/// merge-sort inversion counting.
pub fn kendall_tau(pairs: &RiskPairSample) -> Result<f64> {
    let n = pairs.len();
    if n < 2 {
        return Err(RiskError::Domain(format!(
            "Kendall's tau needs at least 2 pairs, got {n}"
        )));
    }
    let data = pairs.pairs();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        data[a]
            .0
            .total_cmp(&data[b].0)
            .then(data[a].1.total_cmp(&data[b].1))
    });

    fn run_pairs(run: u64) -> u64 {
        run * (run - 1) / 2
    }
    fn tie_pairs<T: PartialEq>(sorted: &[T]) -> u64 {
        let mut total = 0u64;
        let mut run = 1u64;
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                total += run_pairs(run);
                run = 1;
            }
        }
        total + run_pairs(run)
    }

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    let mut xs = pairs.xs();
    xs.sort_by(f64::total_cmp);
    let ties_x = tie_pairs(&xs);
    let mut ys_sorted = pairs.ys();
    ys_sorted.sort_by(f64::total_cmp);
    let ties_y = tie_pairs(&ys_sorted);
    let mut both = data.to_vec();
    both.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let ties_xy = tie_pairs(&both);

    let mut ys: Vec<f64> = order.iter().map(|&i| data[i].1).collect();
    let mut buf = vec![0.0; n];
    let discordant = count_inversions(&mut ys, &mut buf);

    let numerator = n0 as i128 - ties_x as i128 - ties_y as i128 + ties_xy as i128
        - 2 * discordant as i128;
    Ok(numerator as f64 / n0 as f64)
}

/// Strict inversions (left > right) via bottom-up merge sort.
fn count_inversions(values: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = values.len();
    let mut inversions = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo + width < n {
            let mid = lo + width;
            let hi = (mid + width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if values[j] < values[i] {
                    inversions += (mid - i) as u64;
                    buf[k] = values[j];
                    j += 1;
                } else {
                    buf[k] = values[i];
                    i += 1;
                }
                k += 1;
            }
            buf[k..k + (mid - i)].copy_from_slice(&values[i..mid]);
            let k2 = k + (mid - i);
            buf[k2..k2 + (hi - j)].copy_from_slice(&values[j..hi]);
            values[lo..hi].copy_from_slice(&buf[lo..hi]);
            lo = hi;
        }
        width *= 2;
    }
    inversions
}

/// Empirical upper tail dependence diagnostic: P(V > q | U > q) on the
/// rank-based pseudo pairs.
pub fn tail_dependence_summary(pairs: &RiskPairSample, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(RiskError::Domain(format!("q must lie in (0, 1), got {q}")));
    }
    let n = pairs.len() as f64;
    if n * (1.0 - q) < 5.0 {
        return Err(RiskError::Domain(format!(
            "tail diagnostic needs n*(1-q) >= 5, got {}",
            n * (1.0 - q)
        )));
    }
    let pseudo = pairs.pseudo_rank();
    let above_u = pseudo.iter().filter(|(u, _)| *u > q).count();
    if above_u == 0 {
        return Err(RiskError::Domain("no pseudo-observations above q".into()));
    }
    let joint = pseudo.iter().filter(|(u, v)| *u > q && *v > q).count();
    Ok(joint as f64 / above_u as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair_sample(pairs: Vec<(f64, f64)>) -> RiskPairSample {
        RiskPairSample::new(pairs).unwrap()
    }

    /// O(n^2) reference implementation, ties as neither.
    pub(crate) fn kendall_tau_brute(pairs: &RiskPairSample) -> f64 {
        fn sign(a: f64, b: f64) -> i64 {
            match a.total_cmp(&b) {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
            }
        }
        let data = pairs.pairs();
        let n = data.len();
        let mut num = 0i64;
        for i in 0..n {
            for j in i + 1..n {
                num += sign(data[i].0, data[j].0) * sign(data[i].1, data[j].1);
            }
        }
        num as f64 / (n as f64 * (n as f64 - 1.0) / 2.0)
    }

    #[test]
    fn tau_on_worked_examples() {
        let perfect = pair_sample(vec![(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]);
        assert_eq!(kendall_tau(&perfect).unwrap(), 1.0);

        let reversed = pair_sample(vec![(1.0, 3.0), (2.0, 2.0), (3.0, 1.0)]);
        assert_eq!(kendall_tau(&reversed).unwrap(), -1.0);

        let mixed = pair_sample(vec![(1.0, 1.0), (2.0, 3.0), (3.0, 2.0), (4.0, 4.0)]);
        let tau = kendall_tau(&mixed).unwrap();
        assert!((tau - 4.0 / 6.0).abs() < 1e-12, "tau {tau}");
        assert_eq!(tau, kendall_tau_brute(&mixed));
    }

    #[test]
    fn tau_matches_brute_force_with_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let pairs: Vec<(f64, f64)> = (0..120)
                .map(|_| {
                    (
                        f64::from(rng.random_range(0..12)),
                        f64::from(rng.random_range(0..12)),
                    )
                })
                .collect();
            let sample = pair_sample(pairs);
            let fast = kendall_tau(&sample).unwrap();
            let brute = kendall_tau_brute(&sample);
            assert!((fast - brute).abs() < 1e-12, "{fast} vs {brute}");
        }
    }

    #[test]
    fn tau_flips_sign_when_one_margin_is_negated() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let pairs: Vec<(f64, f64)> = (0..300)
            .map(|_| {
                let x: f64 = rng.random();
                (x, x * 0.5 + rng.random::<f64>())
            })
            .collect();
        let sample = pair_sample(pairs.clone());
        let negated = pair_sample(pairs.into_iter().map(|(x, y)| (x, -y)).collect());
        let a = kendall_tau(&sample).unwrap();
        let b = kendall_tau(&negated).unwrap();
        assert!((a + b).abs() < 1e-12);
    }

    fn independent_pairs(n: usize, seed: u64) -> RiskPairSample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pair_sample((0..n).map(|_| (rng.random(), rng.random())).collect())
    }

    #[test]
    fn independence_copula_is_flat_near_one() {
        let pairs = independent_pairs(2_000, 21);
        let grid = empirical_copula_density(&pairs, 51).unwrap();
        let m = grid.size();
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..m {
            for j in 0..m {
                let (u, v) = (grid.coords()[i], grid.coords()[j]);
                if (0.1..=0.9).contains(&u) && (0.1..=0.9).contains(&v) {
                    let c = grid.value(i, j);
                    assert!((0.5..=1.5).contains(&c), "c({u},{v}) = {c}");
                    sum += c;
                    count += 1;
                }
            }
        }
        let mean = sum / count as f64;
        assert!((mean - 1.0).abs() < 0.05, "central mean {mean}");
    }

    #[test]
    fn comonotone_copula_concentrates_on_the_diagonal() {
        let n = 2_000;
        let pairs = pair_sample((0..n).map(|i| (i as f64, i as f64 * 3.0)).collect());
        let grid = empirical_copula_density(&pairs, 51).unwrap();
        let m = grid.size();
        let (mut on, mut on_n, mut off, mut off_n) = (0.0, 0usize, 0.0, 0usize);
        for i in 0..m {
            for j in 0..m {
                let (u, v) = (grid.coords()[i], grid.coords()[j]);
                if (u - v).abs() < 0.05 {
                    on += grid.value(i, j);
                    on_n += 1;
                } else {
                    off += grid.value(i, j);
                    off_n += 1;
                }
            }
        }
        let ratio = (on / on_n as f64) / (off / off_n as f64).max(f64::MIN_POSITIVE);
        assert!(ratio > 5.0, "diagonal concentration {ratio}");
    }

    #[test]
    fn copula_grid_integrates_to_one() {
        let pairs = independent_pairs(2_000, 22);
        let grid = empirical_copula_density(&pairs, 101).unwrap();
        let integral = grid.integral();
        assert!((0.97..=1.03).contains(&integral), "integral {integral}");
    }

    #[test]
    fn copula_ignores_monotone_margin_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let base: Vec<(f64, f64)> = (0..500)
            .map(|_| {
                let x: f64 = rng.random();
                (x, (x + rng.random::<f64>()) / 2.0)
            })
            .collect();
        let transformed: Vec<(f64, f64)> = base
            .iter()
            .map(|&(x, y)| ((x * 4.0).exp(), y.powi(3) * 100.0 - 5.0))
            .collect();
        let a = empirical_copula_density(&pair_sample(base), 31).unwrap();
        let b = empirical_copula_density(&pair_sample(transformed), 31).unwrap();
        assert_eq!(a, b, "rank-based estimate must be margin-free");
    }

    #[test]
    fn swapping_coordinates_transposes_the_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let base: Vec<(f64, f64)> = (0..400)
            .map(|_| {
                let x: f64 = rng.random();
                (x, (x * rng.random::<f64>()).sqrt())
            })
            .collect();
        let swapped: Vec<(f64, f64)> = base.iter().map(|&(x, y)| (y, x)).collect();
        let a = empirical_copula_density(&pair_sample(base), 21).unwrap();
        let b = empirical_copula_density(&pair_sample(swapped), 21).unwrap();
        assert_eq!(a.transposed(), b);
    }

    #[test]
    fn long_csv_has_one_row_per_node() {
        let pairs = independent_pairs(60, 29);
        let grid = empirical_copula_density(&pairs, 5).unwrap();
        let csv = grid.to_long_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "u,v,density");
        assert_eq!(lines.len(), 1 + 25);
        let first: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(first[0], 0.1);
        assert_eq!(first[1], 0.1);
        assert_eq!(first[2], grid.value(0, 0));
    }

    #[test]
    fn grid_size_and_input_size_are_validated() {
        let pairs = independent_pairs(50, 25);
        assert!(empirical_copula_density(&pairs, 1).is_err());
        let tiny = independent_pairs(5, 26);
        assert!(empirical_copula_density(&tiny, 11).is_err());
    }

    #[test]
    fn tail_dependence_examples() {
        let n = 5_000;
        let comonotone = pair_sample((0..n).map(|i| (i as f64, i as f64)).collect());
        assert_eq!(tail_dependence_summary(&comonotone, 0.9).unwrap(), 1.0);

        let antithetic = pair_sample((0..n).map(|i| (i as f64, -(i as f64))).collect());
        assert_eq!(tail_dependence_summary(&antithetic, 0.9).unwrap(), 0.0);

        let indep = independent_pairs(20_000, 27);
        let lambda = tail_dependence_summary(&indep, 0.9).unwrap();
        assert!((lambda - 0.1).abs() < 0.02, "lambda {lambda}");

        assert!(tail_dependence_summary(&comonotone, 1.5).is_err());
        let few = independent_pairs(20, 28);
        assert!(tail_dependence_summary(&few, 0.9).is_err());
    }
}
