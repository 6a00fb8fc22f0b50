//! Empirical error of a coreset over a collection of center sets.

use rand::Rng as _;
use rayon::prelude::*;

use crate::distance::{cost, cost_weighted};
use crate::error::{input, Result};
use crate::family::binomial;
use crate::point::{CenterSet, Dataset, WeightedCoreset};
use crate::rng::{self, streams};

/// `count` center sets of `k` points drawn uniformly from the bounding box of
/// the observed values. A column with no observed value is fixed at 0.
pub fn random_centers(data: &Dataset, k: usize, count: usize, seed: u64) -> Result<Vec<CenterSet>> {
    if k == 0 {
        return input("k must be at least 1");
    }
    let ranges = data.column_ranges();
    let mut r = rng::substream(seed, streams::CENTERS);
    (0..count)
        .map(|_| {
            CenterSet::new(
                (0..k)
                    .map(|_| {
                        ranges
                            .iter()
                            .map(|range| match *range {
                                Some((lo, hi)) if hi > lo => r.random_range(lo..=hi),
                                Some((lo, _)) => lo,
                                None => 0.0,
                            })
                            .collect()
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Center sets paired with the full-data cost, ready for repeated
/// evaluation of coresets of one dataset.
#[derive(Debug, Clone)]
pub struct ErrorReference {
    centers: Vec<CenterSet>,
    full_costs: Vec<f64>,
    z: f64,
    skipped: usize,
}

impl ErrorReference {
    /// Computes full costs, dropping center sets of zero cost with a warning.
    pub fn new(data: &Dataset, centers: Vec<CenterSet>, z: f64) -> Result<Self> {
        let costs = centers
            .par_iter()
            .map(|c| cost(data, c, z))
            .collect::<Result<Vec<f64>>>()?;
        let total = centers.len();
        let mut kept = Vec::with_capacity(total);
        let mut full_costs = Vec::with_capacity(total);
        for (c, v) in centers.into_iter().zip(costs) {
            if v > 0.0 {
                kept.push(c);
                full_costs.push(v);
            }
        }
        let skipped = total - kept.len();
        if skipped > 0 {
            log::warn!("dropped {skipped} center sets with zero cost on the full data");
        }
        if kept.is_empty() {
            return input("no center set has positive cost on the data");
        }
        Ok(Self {
            centers: kept,
            full_costs,
            z,
            skipped,
        })
    }

    pub fn centers(&self) -> &[CenterSet] {
        &self.centers
    }

    pub fn full_costs(&self) -> &[f64] {
        &self.full_costs
    }

    pub fn skipped(&self) -> usize {
        self.skipped
    }

    /// Relative deviation of the coreset cost for each center set.
    pub fn deviations(&self, data: &Dataset, coreset: &WeightedCoreset) -> Result<Vec<f64>> {
        self.centers
            .par_iter()
            .zip(&self.full_costs)
            .map(|(c, &full)| Ok((cost_weighted(data, coreset, c, self.z)? - full).abs() / full))
            .collect()
    }

    /// The largest relative deviation.
    pub fn error(&self, data: &Dataset, coreset: &WeightedCoreset) -> Result<f64> {
        Ok(self
            .deviations(data, coreset)?
            .into_iter()
            .fold(0.0, f64::max))
    }
}

/// max over `centers` of |cost(coreset, C) - cost(data, C)| / cost(data, C).
pub fn empirical_error(
    data: &Dataset,
    coreset: &WeightedCoreset,
    centers: &[CenterSet],
    z: f64,
) -> Result<f64> {
    ErrorReference::new(data, centers.to_vec(), z)?.error(data, coreset)
}

/// Probability that `draws` uniform draws with replacement from `m` items
/// see every item, by inclusion-exclusion.
pub fn coupon_probability(m: usize, draws: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut total = 0.0;
    for i in 0..=m {
        let term = binomial(m, i) as f64 * (1.0 - i as f64 / m as f64).powi(draws as i32);
        if i % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total.clamp(0.0, 1.0)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &p in &idx[i..=j] {
            out[p] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{adversarial_collection, gen_lower_bound};
    use crate::point::CoresetEntry;

    fn sample() -> Dataset {
        Dataset::from_rows(vec![
            vec![Some(0.0), None, Some(2.0)],
            vec![Some(4.0), Some(-1.0), None],
            vec![None, Some(3.0), Some(5.0)],
        ])
        .unwrap()
    }

    #[test]
    fn random_centers_stay_in_the_box() {
        let ds = sample();
        assert!(random_centers(&ds, 2, 0, 1).unwrap().is_empty());
        let cs = random_centers(&ds, 3, 50, 7).unwrap();
        assert_eq!(cs, random_centers(&ds, 3, 50, 7).unwrap());
        for c in &cs {
            for v in c.centers() {
                assert!((0.0..=4.0).contains(&v[0]));
                assert!((-1.0..=3.0).contains(&v[1]));
                assert!((2.0..=5.0).contains(&v[2]));
            }
        }
    }

    #[test]
    fn full_data_has_zero_error_and_doubling_has_one() {
        let ds = sample();
        let cs = random_centers(&ds, 2, 20, 3).unwrap();
        let unit = WeightedCoreset::unit(&ds);
        assert_eq!(empirical_error(&ds, &unit, &cs, 2.0).unwrap(), 0.0);
        let doubled = unit.scaled(2.0);
        assert!((empirical_error(&ds, &doubled, &cs, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_a_lower_bound_point_costs_everything() {
        let ds = gen_lower_bound(2).unwrap();
        let centers = adversarial_collection(&ds).unwrap();
        let entries = (1..ds.n()).map(|id| CoresetEntry { id, weight: 1.5 }).collect();
        let partial = WeightedCoreset::new(entries, &ds).unwrap();
        assert_eq!(empirical_error(&ds, &partial, &centers, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn zero_cost_center_sets_are_dropped() {
        let ds = Dataset::from_complete(&[vec![1.0, 1.0]]).unwrap();
        let on_point = CenterSet::new(vec![vec![1.0, 1.0]]).unwrap();
        let off = CenterSet::new(vec![vec![0.0, 1.0]]).unwrap();
        let r = ErrorReference::new(&ds, vec![on_point.clone(), off], 2.0).unwrap();
        assert_eq!(r.skipped(), 1);
        assert_eq!(r.full_costs(), &[1.0]);
        assert!(ErrorReference::new(&ds, vec![on_point], 2.0).is_err());
    }

    #[test]
    fn coupon_probability_against_small_cases() {
        assert_eq!(coupon_probability(1, 1), 1.0);
        assert_eq!(coupon_probability(2, 1), 0.0);
        // two items, n draws: 1 - 2 * 2^-n
        assert!((coupon_probability(2, 3) - 0.75).abs() < 1e-12);
        // three items, three draws: 3! / 27
        assert!((coupon_probability(3, 3) - 6.0 / 27.0).abs() < 1e-12);
        assert!(coupon_probability(20, 19).abs() < 1e-9);
    }

    #[test]
    fn spearman_signs() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &[10.0, 20.0, 25.0, 40.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[1.0, 1.0, 2.0, 2.0]) - 0.894_427_190_999_915_9).abs() < 1e-12);
    }
}
