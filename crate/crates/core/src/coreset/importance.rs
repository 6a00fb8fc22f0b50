use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::error::{input, Result};
use crate::point::{ClusteringParams, CoresetEntry, Dataset, WeightedCoreset};
use crate::rng::{self, streams};
use crate::sensitivity::{estimate_sensitivities, SensitivityScores};

use super::{check_samples, CoresetMethod, CoresetOptions, Sampler};

/// Sample count suggested by the worst-case analysis (up to polylog factors):
/// z^z (j+k)^(j+k+1) / (j^j k^(k-z-2)) (d ln n)^((z+2)/2) / eps^2.
/// Reported for reference only.
pub fn theoretical_sample_size(params: &ClusteringParams, d: usize, j: usize, n: usize) -> f64 {
    let (k, z) = (params.k as f64, params.z);
    let jf = j as f64;
    let s = jf + k;
    let jj = if j == 0 { 1.0 } else { jf.powf(jf) };
    z.powf(z) * s.powf(s + 1.0) / (jj * k.powf(k - z - 2.0))
        * (d as f64 * (n.max(2) as f64).ln()).powf((z + 2.0) / 2.0)
        / (params.epsilon * params.epsilon)
}

/// Samples ids with probability proportional to their scores and weights
/// each draw by 1 / (p N).
pub struct ImportanceSampler {
    n: usize,
    scores: SensitivityScores,
    dist: WeightedIndex<f64>,
    merge: bool,
}

impl ImportanceSampler {
    pub fn new(scores: SensitivityScores, merge: bool) -> Result<Self> {
        let dist = WeightedIndex::new(&scores.sigma)
            .map_err(|e| crate::error::Error::Input(format!("invalid scores: {e}")))?;
        Ok(Self {
            n: scores.sigma.len(),
            scores,
            dist,
            merge,
        })
    }
}

impl Sampler for ImportanceSampler {
    fn scores(&self) -> Option<&SensitivityScores> {
        Some(&self.scores)
    }

    fn sample(&self, n_samples: usize, seed: u64) -> Result<WeightedCoreset> {
        check_samples(n_samples)?;
        let mut r = rng::indexed_substream(seed, streams::SAMPLING, n_samples as u64);
        let total = self.scores.sum_sigma;
        let entries: Vec<CoresetEntry> = (0..n_samples)
            .map(|_| {
                let id = self.dist.sample(&mut r);
                CoresetEntry {
                    id,
                    weight: total / (self.scores.sigma[id] * n_samples as f64),
                }
            })
            .collect();
        let s = WeightedCoreset::from_valid(entries, self.n);
        Ok(if self.merge { s.merged() } else { s })
    }
}

pub struct ImportanceSampling {
    options: CoresetOptions,
}

impl ImportanceSampling {
    pub fn new(options: CoresetOptions) -> Self {
        Self { options }
    }

    pub fn sampler(
        &self,
        data: &Dataset,
        params: &ClusteringParams,
        seed: u64,
    ) -> Result<ImportanceSampler> {
        let scores = estimate_sensitivities(data, params, &self.options.sensitivity, seed)?;
        log::debug!(
            "scores: {} rounds, sum {:.3}, family of {}, reference sample size {:.3e}",
            scores.peel_rounds,
            scores.sum_sigma,
            scores.family_len,
            theoretical_sample_size(params, data.d(), data.j(), data.n())
        );
        ImportanceSampler::new(scores, self.options.merge_duplicates)
    }
}

impl CoresetMethod for ImportanceSampling {
    fn name(&self) -> &'static str {
        "ours"
    }

    fn prepare(
        &self,
        data: &Dataset,
        params: &ClusteringParams,
        seed: u64,
    ) -> Result<Box<dyn Sampler>> {
        Ok(Box::new(self.sampler(data, params, seed)?))
    }
}

/// Importance-sampling coreset with `n_samples` draws.
pub fn build_coreset(
    data: &Dataset,
    params: &ClusteringParams,
    n_samples: usize,
    options: &CoresetOptions,
    seed: u64,
) -> Result<WeightedCoreset> {
    if n_samples == 0 {
        return input("number of samples must be at least 1");
    }
    ImportanceSampling::new(options.clone()).build(data, params, n_samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{cost, cost_weighted};
    use crate::point::CenterSet;

    fn opts(merge: bool) -> CoresetOptions {
        CoresetOptions {
            merge_duplicates: merge,
            ..Default::default()
        }
    }

    #[test]
    fn copies_of_one_point_keep_total_weight() {
        // three copies fit in one peel round for k = 2, so the scores are equal
        let ds = Dataset::from_complete(&vec![vec![1.0, 2.0]; 3]).unwrap();
        let p = ClusteringParams::kmeans(2).unwrap();
        let s = build_coreset(&ds, &p, 7, &opts(false), 3).unwrap();
        assert_eq!(s.len(), 7);
        assert!((s.total_weight() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn equal_scores_give_weight_n_over_n_samples() {
        let ds = Dataset::from_complete(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let p = ClusteringParams::kmeans(2).unwrap();
        let s = build_coreset(&ds, &p, 5, &opts(false), 8).unwrap();
        assert!(s.entries().iter().all(|e| (e.weight - 3.0 / 5.0).abs() < 1e-12));
    }

    #[test]
    fn deterministic_under_seed_and_errors_on_zero() {
        let rows: Vec<Vec<Option<f64>>> = (0..80)
            .map(|i| vec![Some(i as f64), if i % 5 == 0 { None } else { Some((i * 7 % 11) as f64) }])
            .collect();
        let ds = Dataset::from_rows(rows).unwrap();
        let p = ClusteringParams::kmeans(2).unwrap();
        let a = build_coreset(&ds, &p, 25, &opts(true), 42).unwrap();
        let b = build_coreset(&ds, &p, 25, &opts(true), 42).unwrap();
        assert_eq!(a, b);
        assert!(build_coreset(&ds, &p, 0, &opts(true), 42).is_err());
        let c = CenterSet::new(vec![vec![10.0, 3.0], vec![60.0, 8.0]]).unwrap();
        let est = cost_weighted(&ds, &a, &c, 2.0).unwrap();
        let truth = cost(&ds, &c, 2.0).unwrap();
        assert!((est - truth).abs() / truth < 1.0);
    }

    #[test]
    fn reference_sample_size_grows_with_precision() {
        let coarse = ClusteringParams::new(3, 2.0, 0.4).unwrap();
        let fine = ClusteringParams::new(3, 2.0, 0.1).unwrap();
        let a = theoretical_sample_size(&coarse, 3, 2, 1000);
        let b = theoretical_sample_size(&fine, 3, 2, 1000);
        assert!((b / a - 16.0).abs() < 1e-9);
    }
}
