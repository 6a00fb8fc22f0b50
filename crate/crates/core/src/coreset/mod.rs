//! Coreset constructions, selectable by name.
//!
//! | name         | construction                                              |
//! |--------------|-----------------------------------------------------------|
//! | `ours`       | importance sampling with peeled k-center scores           |
//! | `uniform`    | uniform sampling with replacement, weight n / N           |
//! | `imputation` | random imputation, then importance sampling on full data  |
//!
//! Each method splits into an expensive `prepare` step (scoring) and a cheap
//! `sample` step, so experiments can draw several sizes from one scoring.

mod importance;
mod imputation;
mod uniform;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::point::{ClusteringParams, Dataset, WeightedCoreset};
use crate::registry::Registry;
use crate::sensitivity::{SensitivityConfig, SensitivityScores};

pub use importance::{build_coreset, theoretical_sample_size, ImportanceSampler, ImportanceSampling};
pub use imputation::{impute_uniform, imputation_coreset, Imputation};
pub use uniform::{uniform_coreset, Uniform, UniformSampler};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoresetOptions {
    pub sensitivity: SensitivityConfig,
    /// Sum the weights of repeated draws into one entry per id.
    pub merge_duplicates: bool,
}

impl Default for CoresetOptions {
    fn default() -> Self {
        Self {
            sensitivity: SensitivityConfig::default(),
            merge_duplicates: true,
        }
    }
}

/// Draws weighted samples from a prepared dataset.
pub trait Sampler: Send + Sync {
    fn sample(&self, n_samples: usize, seed: u64) -> Result<WeightedCoreset>;

    /// Importance scores behind the sampling distribution, if any.
    fn scores(&self) -> Option<&SensitivityScores> {
        None
    }
}

pub trait CoresetMethod: Send + Sync {
    fn name(&self) -> &'static str;

    /// Does the per-dataset work (scores, imputation) once.
    fn prepare(
        &self,
        data: &Dataset,
        params: &ClusteringParams,
        seed: u64,
    ) -> Result<Box<dyn Sampler>>;

    fn build(
        &self,
        data: &Dataset,
        params: &ClusteringParams,
        n_samples: usize,
        seed: u64,
    ) -> Result<WeightedCoreset> {
        check_samples(n_samples)?;
        self.prepare(data, params, seed)?.sample(n_samples, seed)
    }
}

pub(crate) fn check_samples(n_samples: usize) -> Result<()> {
    if n_samples == 0 {
        return input("number of samples must be at least 1");
    }
    Ok(())
}

pub fn default_registry(options: &CoresetOptions) -> Registry<dyn CoresetMethod> {
    let mut r: Registry<dyn CoresetMethod> = Registry::new("coreset method");
    r.register("ours", Arc::new(ImportanceSampling::new(options.clone())));
    r.register("uniform", Arc::new(Uniform::new(options.merge_duplicates)));
    r.register("imputation", Arc::new(Imputation::new(options.clone())));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_resolves_all_methods() {
        let r = default_registry(&CoresetOptions::default());
        assert_eq!(r.names(), vec!["imputation", "ours", "uniform"]);
        let ds = Dataset::from_complete(&[vec![0.0], vec![1.0], vec![5.0]]).unwrap();
        let p = ClusteringParams::kmeans(1).unwrap();
        for name in r.names() {
            let m = r.get(name).unwrap();
            assert_eq!(m.name(), name);
            let s = m.build(&ds, &p, 4, 1).unwrap();
            assert!(s.total_weight() > 0.0);
            if name == "uniform" {
                assert!((s.total_weight() - 3.0).abs() < 1e-9);
            }
            assert!(m.build(&ds, &p, 0, 1).is_err());
        }
    }
}
