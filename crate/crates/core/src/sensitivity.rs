//! Importance scores by peeling k-center coresets.
//!
//! Every point enters the dynamic k-center structure once. Round i takes the
//! current coreset, gives each of its points the score c_sigma * alpha^z / i,
//! and deletes them; rounds continue until nothing is left.

use std::collections::BTreeSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::distance::{dist_sq_unchecked, pow_z};
use crate::dyngonz::{DynKCenterCoreset, KCenterConfig};
use crate::error::Result;
use crate::family::DEFAULT_SIZE_CAP;
use crate::point::{ClusteringParams, Dataset, MissingPoint};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensitivityConfig {
    pub c_alpha: f64,
    pub c_sigma: f64,
    /// Random subsets drawn for the coordinate family; `None` uses the
    /// theoretical size.
    pub family_size: Option<usize>,
    pub family_cap: usize,
    pub c_l: f64,
    pub backend: String,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        Self {
            c_alpha: 1.0,
            c_sigma: 1.0,
            family_size: None,
            family_cap: DEFAULT_SIZE_CAP,
            c_l: 2.0,
            backend: "projection".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityScores {
    /// Score per point id.
    pub sigma: Vec<f64>,
    /// Peel round (1-based) in which each point was removed.
    pub round: Vec<usize>,
    pub alpha: f64,
    pub peel_rounds: usize,
    pub sum_sigma: f64,
    /// Largest number of points removed in one round.
    pub max_round_size: usize,
    /// Points not covered by any restriction.
    pub orphans: usize,
    pub family_len: usize,
}

/// alpha = c_alpha * k * sqrt(d * ln(n + 2)).
pub fn alpha(k: usize, d: usize, n: usize, c_alpha: f64) -> f64 {
    c_alpha * k as f64 * (d as f64 * (n as f64 + 2.0).ln()).sqrt()
}

/// Upper bound on the score total: c_sigma * alpha^z * T * (1 + ln(n/T + 1)).
pub fn sum_bound(scores: &SensitivityScores, z: f64, c_sigma: f64) -> f64 {
    let t = scores.max_round_size as f64;
    let n = scores.sigma.len() as f64;
    c_sigma * scores.alpha.powf(z) * t * (1.0 + (n / t + 1.0).ln())
}

pub fn estimate_sensitivities(
    data: &Dataset,
    params: &ClusteringParams,
    cfg: &SensitivityConfig,
    seed: u64,
) -> Result<SensitivityScores> {
    let n = data.n();
    let kcfg = KCenterConfig {
        k: params.k,
        family_size: cfg.family_size,
        family_cap: cfg.family_cap,
        c_l: cfg.c_l,
        delta: None,
        backend: cfg.backend.clone(),
        seed,
    };
    let mut structure = DynKCenterCoreset::init(data.d(), data.j(), 2 * n, &kcfg)?;

    let (covered, uncovered): (Vec<&MissingPoint>, Vec<&MissingPoint>) =
        data.points().iter().partition(|p| structure.is_covered(p));
    let mut orphans: BTreeSet<usize> = uncovered.iter().map(|p| p.id).collect();
    if !orphans.is_empty() {
        log::warn!(
            "{} points lie in no restriction of the {}-member family; peeling them {} at a time",
            orphans.len(),
            structure.family().len(),
            params.k + 1
        );
    }
    structure.insert_batch(&covered)?;

    let a = alpha(params.k, data.d(), n, cfg.c_alpha);
    let top = cfg.c_sigma * a.powf(params.z);
    let mut sigma = vec![0.0; n];
    let mut round = vec![0; n];
    let mut remaining = n;
    let mut i = 0;
    let mut max_round_size = 0;
    while remaining > 0 {
        i += 1;
        let mut peeled = structure.get_coreset();
        if peeled.is_empty() && !structure.is_empty() {
            // cannot happen with a non-empty restriction; keeps the loop finite
            let lowest = (0..n).find(|&id| structure.contains(id)).expect("non-empty");
            peeled.push(lowest);
        }
        structure.delete_batch(&peeled)?;
        let from_orphans: Vec<usize> = orphans.iter().take(params.k + 1).copied().collect();
        for id in &from_orphans {
            orphans.remove(id);
        }
        peeled.extend(from_orphans);

        let score = top / i as f64;
        for &id in &peeled {
            sigma[id] = score;
            round[id] = i;
        }
        remaining -= peeled.len();
        max_round_size = max_round_size.max(peeled.len());
    }
    let sum_sigma = crate::distance::compensated_sum(sigma.iter().copied());
    Ok(SensitivityScores {
        sigma,
        round,
        alpha: a,
        peel_rounds: i,
        sum_sigma,
        max_round_size,
        orphans: uncovered.len(),
        family_len: structure.family().len(),
    })
}

/// Lower bounds on the true sensitivity of every point: the largest share
/// dist^z(x, C) / cost_z(X, C) seen over `trials` random center sets.
///
/// Even trials draw centers uniformly from the bounding box; odd trials use
/// random data points, with missing coordinates filled from the box. A
/// degenerate column is widened to unit half-width.
pub fn true_sensitivity_lower_bounds(
    data: &Dataset,
    params: &ClusteringParams,
    trials: usize,
    seed: u64,
) -> Vec<f64> {
    let d = data.d();
    let ranges: Vec<(f64, f64)> = data
        .column_ranges()
        .into_iter()
        .map(|r| match r {
            Some((lo, hi)) if hi > lo => (lo, hi),
            Some((lo, _)) => (lo - 1.0, lo + 1.0),
            None => (-1.0, 1.0),
        })
        .collect();
    let mut r = rng::substream(seed, rng::streams::CENTERS);
    let mut best = vec![0.0; data.n()];
    let mut share = vec![0.0; data.n()];
    for t in 0..trials {
        let centers: Vec<Vec<f64>> = (0..params.k)
            .map(|_| {
                let anchor = (t % 2 == 1).then(|| data.point(r.random_range(0..data.n())));
                (0..d)
                    .map(|i| match anchor.and_then(|p| p.coords[i]) {
                        Some(v) => v,
                        None => {
                            let (lo, hi) = ranges[i];
                            lo + (hi - lo) * r.random::<f64>()
                        }
                    })
                    .collect()
            })
            .collect();
        let mut total = 0.0;
        for (s, p) in share.iter_mut().zip(data.points()) {
            let dsq = centers
                .iter()
                .map(|c| dist_sq_unchecked(&p.coords, c))
                .fold(f64::INFINITY, f64::min);
            *s = pow_z(dsq, params.z);
            total += *s;
        }
        if total > 0.0 {
            for (b, s) in best.iter_mut().zip(&share) {
                *b = f64::max(*b, s / total);
            }
        }
    }
    best
}

/// Lower bound on the true sensitivity of point `id`.
pub fn true_sensitivity_lower_bound(
    data: &Dataset,
    id: usize,
    params: &ClusteringParams,
    trials: usize,
    seed: u64,
) -> f64 {
    true_sensitivity_lower_bounds(data, params, trials, seed)[id]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: usize, z: f64) -> ClusteringParams {
        ClusteringParams::new(k, z, 0.2).unwrap()
    }

    #[test]
    fn small_dataset_is_peeled_in_one_round() {
        let ds = Dataset::from_complete(&[vec![0.0, 0.0], vec![1.0, 5.0], vec![3.0, 1.0]]).unwrap();
        let s = estimate_sensitivities(&ds, &params(2, 2.0), &SensitivityConfig::default(), 1).unwrap();
        assert_eq!(s.peel_rounds, 1);
        let top = s.alpha.powi(2);
        assert!(s.sigma.iter().all(|&v| v == top));
    }

    #[test]
    fn identical_points_share_the_first_round() {
        let ds = Dataset::from_complete(&[vec![2.0], vec![2.0]]).unwrap();
        let s = estimate_sensitivities(&ds, &params(1, 2.0), &SensitivityConfig::default(), 3).unwrap();
        assert_eq!(s.sigma[0], s.sigma[1]);
    }

    #[test]
    fn line_instance_respects_the_sum_bound() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![(i * i) as f64 * 0.1]).collect();
        let ds = Dataset::from_complete(&rows).unwrap();
        let cfg = SensitivityConfig::default();
        let p = params(2, 2.0);
        let s = estimate_sensitivities(&ds, &p, &cfg, 5).unwrap();
        // direct summation of T * H_ceil(n/T) with T = largest round
        let t = s.max_round_size;
        let h: f64 = (1..=50usize.div_ceil(t)).map(|i| 1.0 / i as f64).sum();
        let direct = cfg.c_sigma * s.alpha.powi(2) * t as f64 * h;
        assert!(s.sum_sigma <= direct * (1.0 + 1e-12), "{} > {direct}", s.sum_sigma);
        assert!(s.sum_sigma <= sum_bound(&s, 2.0, cfg.c_sigma));
        assert!(s.round.iter().all(|&r| r >= 1));
        // scores fall with the round index
        for a in 0..50 {
            for b in 0..50 {
                if s.round[a] < s.round[b] {
                    assert!(s.sigma[a] > s.sigma[b]);
                }
            }
        }
    }

    #[test]
    fn orphans_are_still_scored() {
        let rows = vec![
            vec![Some(1.0), None],
            vec![None, Some(2.0)],
            vec![Some(3.0), None],
            vec![None, Some(0.0)],
            vec![Some(5.0), None],
        ];
        let ds = Dataset::from_rows(rows).unwrap();
        let cfg = SensitivityConfig {
            family_size: Some(1),
            ..Default::default()
        };
        let s = estimate_sensitivities(&ds, &params(1, 1.0), &cfg, 0).unwrap();
        assert!(s.sigma.iter().all(|&v| v > 0.0));
        assert!(s.orphans > 0);
    }

    #[test]
    fn lower_bound_examples() {
        let one = Dataset::from_complete(&[vec![3.0, 4.0]]).unwrap();
        let b = true_sensitivity_lower_bound(&one, 0, &params(1, 2.0), 50, 0);
        assert!((b - 1.0).abs() < 1e-12);

        let mirror = Dataset::from_complete(&[vec![-1.0], vec![1.0]]).unwrap();
        let bounds = true_sensitivity_lower_bounds(&mirror, &params(1, 2.0), 400, 2);
        assert!((bounds[0] - bounds[1]).abs() < 1e-9);
        assert!(bounds.iter().all(|&v| v <= 1.0));

        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![(i as f64).sin(), (i as f64 * 0.3).cos()]).collect();
        let ds = Dataset::from_complete(&rows).unwrap();
        assert!(true_sensitivity_lower_bounds(&ds, &params(2, 1.0), 200, 1)
            .iter()
            .all(|&v| v <= 1.0));
    }
}
