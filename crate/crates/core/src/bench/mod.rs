//! Experiment harness: instance generators, empirical error, size sweeps and
//! the Lloyd speedup measurement.

mod evaluate;
mod generate;
mod sweep;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::coreset::CoresetOptions;
use crate::error::{input, Result};
use crate::io::{read_dataset_file, CsvOptions};
use crate::point::{ClusteringParams, Dataset};
use crate::sensitivity::SensitivityConfig;

/// Coordinate family size used by experiments unless configured otherwise.
pub const EXPERIMENT_FAMILY_SIZE: usize = 20;

pub use evaluate::{coupon_probability, empirical_error, random_centers, spearman, ErrorReference};
pub use generate::{adversarial_centers, adversarial_collection, gen_lower_bound, gen_synthetic, FarLayout, SyntheticSpec};
pub use sweep::{
    run_lloyd_speedup, run_size_error_sweep, summarize, write_speedup_csv, write_sweep_csv, SpeedupResult,
    SpeedupRow, SweepResult, SweepRow, SweepSummary,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DatasetSource {
    File {
        path: PathBuf,
        #[serde(default)]
        csv: CsvOptions,
    },
    Synthetic(SyntheticSpec),
    LowerBound {
        j: usize,
    },
}

impl DatasetSource {
    /// Reads or generates the dataset. Generators draw from `seed`.
    pub fn load(&self, seed: u64) -> Result<Dataset> {
        match self {
            Self::File { path, csv } => read_dataset_file(path, csv),
            Self::Synthetic(spec) => gen_synthetic(spec, seed),
            Self::LowerBound { j } => gen_lower_bound(*j),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterSource {
    /// `n_centers` sets drawn from the data's bounding box.
    #[default]
    Random,
    /// One adversarial set per point; see [`adversarial_centers`].
    Adversarial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub k: usize,
    pub z: f64,
    pub epsilon: f64,
    /// Coreset sizes, strictly increasing.
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub centers: CenterSource,
    pub n_centers: usize,
    pub methods: Vec<String>,
    pub coreset: CoresetOptions,
    pub lloyd_iters: usize,
    pub lloyd_tol: f64,
    /// Seeded Lloyd starts per run in the speedup experiment.
    pub lloyd_restarts: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetSource::Synthetic(SyntheticSpec::default()),
            k: 3,
            z: 2.0,
            epsilon: 0.2,
            sizes: vec![200, 700, 1200, 2000],
            trials: 10,
            centers: CenterSource::Random,
            n_centers: 100,
            methods: vec!["ours".into(), "uniform".into(), "imputation".into()],
            coreset: CoresetOptions {
                sensitivity: SensitivityConfig {
                    family_size: Some(EXPERIMENT_FAMILY_SIZE),
                    ..SensitivityConfig::default()
                },
                ..CoresetOptions::default()
            },
            lloyd_iters: 500,
            lloyd_tol: 1e-7,
            lloyd_restarts: 10,
            seed: 0,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return input("trials must be at least 1");
        }
        if self.sizes.is_empty() {
            return input("at least one coreset size is required");
        }
        if self.sizes[0] == 0 {
            return input("coreset sizes must be positive");
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return input("coreset sizes must be strictly increasing");
        }
        if self.methods.is_empty() {
            return input("at least one method is required");
        }
        if self.lloyd_iters == 0 {
            return input("lloyd_iters must be at least 1");
        }
        if self.lloyd_restarts == 0 {
            return input("lloyd_restarts must be at least 1");
        }
        self.params().map(|_| ())
    }

    pub fn params(&self) -> Result<ClusteringParams> {
        ClusteringParams::new(self.k, self.z, self.epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let bad = [
            ExperimentConfig {
                trials: 0,
                ..Default::default()
            },
            ExperimentConfig {
                sizes: vec![5, 5],
                ..Default::default()
            },
            ExperimentConfig {
                sizes: vec![],
                ..Default::default()
            },
            ExperimentConfig {
                k: 0,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = ExperimentConfig {
            dataset: DatasetSource::LowerBound { j: 3 },
            centers: CenterSource::Adversarial,
            ..Default::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), cfg);
        let partial: ExperimentConfig =
            serde_json::from_str(r#"{"dataset": {"kind": "synthetic", "n": 500}, "trials": 2}"#).unwrap();
        assert_eq!(partial.trials, 2);
        assert_eq!(partial.dataset, DatasetSource::Synthetic(SyntheticSpec::new(500)));
    }
}
