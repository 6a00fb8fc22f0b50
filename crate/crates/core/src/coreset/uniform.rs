use rand::Rng as _;

use crate::error::Result;
use crate::point::{ClusteringParams, CoresetEntry, Dataset, WeightedCoreset};
use crate::rng::{self, streams};

use super::{check_samples, CoresetMethod, Sampler};

pub struct UniformSampler {
    n: usize,
    merge: bool,
}

impl Sampler for UniformSampler {
    fn sample(&self, n_samples: usize, seed: u64) -> Result<WeightedCoreset> {
        check_samples(n_samples)?;
        let n = self.n;
        let mut r = rng::indexed_substream(seed, streams::SAMPLING, n_samples as u64);
        let w = n as f64 / n_samples as f64;
        let entries = (0..n_samples)
            .map(|_| CoresetEntry {
                id: r.random_range(0..n),
                weight: w,
            })
            .collect();
        let s = WeightedCoreset::from_valid(entries, n);
        Ok(if self.merge { s.merged() } else { s })
    }
}

pub struct Uniform {
    merge: bool,
}

impl Uniform {
    pub fn new(merge: bool) -> Self {
        Self { merge }
    }
}

impl CoresetMethod for Uniform {
    fn name(&self) -> &'static str {
        "uniform"
    }

    fn prepare(
        &self,
        data: &Dataset,
        _params: &ClusteringParams,
        _seed: u64,
    ) -> Result<Box<dyn Sampler>> {
        Ok(Box::new(UniformSampler {
            n: data.n(),
            merge: self.merge,
        }))
    }
}

/// `n_samples` uniform draws with replacement, each of weight n / N.
pub fn uniform_coreset(data: &Dataset, n_samples: usize, seed: u64) -> Result<WeightedCoreset> {
    check_samples(n_samples)?;
    UniformSampler {
        n: data.n(),
        merge: true,
    }
    .sample(n_samples, seed)
}
