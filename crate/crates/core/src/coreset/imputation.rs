use rand::Rng as _;

use crate::error::Result;
use crate::point::{ClusteringParams, Dataset, WeightedCoreset};
use crate::rng::{self, streams};

use super::importance::ImportanceSampling;
use super::{CoresetMethod, CoresetOptions, Sampler};

/// Fills every missing coordinate uniformly from its column's observed
/// [min, max]. A column with no observed value is filled with 0.
pub fn impute_uniform(data: &Dataset, seed: u64) -> Result<Dataset> {
    let ranges = data.column_ranges();
    for (i, r) in ranges.iter().enumerate() {
        if r.is_none() {
            log::warn!("column {i} has no observed values; imputing 0");
        }
    }
    let mut r = rng::substream(seed, streams::IMPUTE);
    let rows = data
        .points()
        .iter()
        .map(|p| {
            p.coords
                .iter()
                .zip(&ranges)
                .map(|(c, range)| {
                    Some(match (c, range) {
                        (Some(v), _) => *v,
                        (None, Some((lo, hi))) if hi > lo => r.random_range(*lo..=*hi),
                        (None, Some((lo, _))) => *lo,
                        (None, None) => 0.0,
                    })
                })
                .collect()
        })
        .collect();
    Dataset::from_rows(rows)
}

pub struct Imputation {
    scoring: ImportanceSampling,
}

impl Imputation {
    pub fn new(options: CoresetOptions) -> Self {
        Self {
            scoring: ImportanceSampling::new(options),
        }
    }
}

impl CoresetMethod for Imputation {
    fn name(&self) -> &'static str {
        "imputation"
    }

    /// Scores the imputed data; ids, and so the sampled coreset, refer to
    /// the original points.
    fn prepare(
        &self,
        data: &Dataset,
        params: &ClusteringParams,
        seed: u64,
    ) -> Result<Box<dyn Sampler>> {
        let completed = impute_uniform(data, seed)?;
        Ok(Box::new(self.scoring.sampler(&completed, params, seed)?))
    }
}

pub fn imputation_coreset(
    data: &Dataset,
    params: &ClusteringParams,
    n_samples: usize,
    options: &CoresetOptions,
    seed: u64,
) -> Result<WeightedCoreset> {
    Imputation::new(options.clone()).build(data, params, n_samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coreset::build_coreset;

    #[test]
    fn complete_data_matches_plain_importance_sampling() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i % 7) as f64]).collect();
        let ds = Dataset::from_complete(&rows).unwrap();
        let p = ClusteringParams::kmeans(2).unwrap();
        let o = CoresetOptions::default();
        assert_eq!(
            imputation_coreset(&ds, &p, 15, &o, 6).unwrap(),
            build_coreset(&ds, &p, 15, &o, 6).unwrap()
        );
    }

    #[test]
    fn fills_within_observed_ranges() {
        let ds = Dataset::from_rows(vec![
            vec![Some(1.0), None, None],
            vec![Some(3.0), Some(5.0), None],
            vec![None, Some(7.0), None],
        ])
        .unwrap();
        let filled = impute_uniform(&ds, 2).unwrap();
        assert_eq!(filled.j(), 0);
        let v = filled.point(2).coords[0].unwrap();
        assert!((1.0..=3.0).contains(&v));
        assert!((5.0..=7.0).contains(&filled.point(0).coords[1].unwrap()));
        assert!(filled.points().iter().all(|p| p.coords[2] == Some(0.0)));
    }
}
