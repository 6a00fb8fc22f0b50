//! Lloyd's heuristic for k-means with missing values.
//!
//! Assignment uses the missing-aware distance. The update sets each center
//! coordinate to the weighted mean of that coordinate over the cluster
//! members where it is available, which is the exact 1-mean; a coordinate
//! that no member observes keeps its previous value. An empty cluster is
//! re-seeded at the point furthest from its assigned center.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{compensated_sum, nearest_sq};
use crate::error::{input, Result};
use crate::point::{CenterSet, Dataset, MissingPoint, WeightedCoreset};
use crate::rng::{self, streams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LloydInit {
    /// k distinct input points drawn uniformly.
    Seed(u64),
    /// Dataset ids of the initial centers.
    Ids(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LloydConfig {
    pub k: usize,
    pub iters: usize,
    pub tol: f64,
    pub init: LloydInit,
    /// Independent seeded starts; the lowest-cost run is kept. Must be 1
    /// with explicit initial ids.
    pub restarts: usize,
}

impl LloydConfig {
    pub fn new(k: usize, iters: usize, seed: u64) -> Self {
        Self {
            k,
            iters,
            tol: 1e-7,
            init: LloydInit::Seed(seed),
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LloydResult {
    pub centers: CenterSet,
    /// Cluster index per input entry.
    pub assignment: Vec<usize>,
    /// Weighted k-means cost of the input at the returned centers.
    pub cost: f64,
    /// Cost after the initial assignment and after each update.
    pub history: Vec<f64>,
    pub iterations: usize,
}

pub fn lloyd(data: &Dataset, cfg: &LloydConfig) -> Result<LloydResult> {
    let pts: Vec<&MissingPoint> = data.points().iter().collect();
    run(&pts, &vec![1.0; pts.len()], data.d(), cfg)
}

pub fn lloyd_weighted(
    data: &Dataset,
    coreset: &WeightedCoreset,
    cfg: &LloydConfig,
) -> Result<LloydResult> {
    if coreset.source_n() != data.n() {
        return input("coreset does not belong to this dataset");
    }
    let pts: Vec<&MissingPoint> = coreset.entries().iter().map(|e| data.point(e.id)).collect();
    let w: Vec<f64> = coreset.entries().iter().map(|e| e.weight).collect();
    run(&pts, &w, data.d(), cfg)
}

fn assign(pts: &[&MissingPoint], centers: &[Vec<f64>]) -> Vec<(usize, f64)> {
    pts.par_iter().map(|p| nearest_sq(&p.coords, centers)).collect()
}

fn weighted_cost(assigned: &[(usize, f64)], w: &[f64]) -> f64 {
    compensated_sum(assigned.iter().zip(w).map(|((_, d), w)| w * d))
}

fn run(pts: &[&MissingPoint], w: &[f64], d: usize, cfg: &LloydConfig) -> Result<LloydResult> {
    if cfg.restarts == 0 {
        return input("restarts must be at least 1");
    }
    let seed = match cfg.init {
        LloydInit::Seed(seed) => seed,
        LloydInit::Ids(_) if cfg.restarts == 1 => return run_once(pts, w, d, cfg),
        LloydInit::Ids(_) => return input("restarts need a seeded initialization"),
    };
    let mut best: Option<LloydResult> = None;
    for r in 0..cfg.restarts {
        let start = if r == 0 {
            seed
        } else {
            rng::derive_indexed(seed, streams::LLOYD, r as u64)
        };
        let one = LloydConfig {
            init: LloydInit::Seed(start),
            ..cfg.clone()
        };
        let res = run_once(pts, w, d, &one)?;
        if best.as_ref().is_none_or(|b| res.cost < b.cost) {
            best = Some(res);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn run_once(pts: &[&MissingPoint], w: &[f64], d: usize, cfg: &LloydConfig) -> Result<LloydResult> {
    let k = cfg.k;
    if k == 0 {
        return input("k must be at least 1");
    }
    if cfg.iters == 0 {
        return input("iters must be at least 1");
    }
    if pts.is_empty() {
        return input("no points to cluster");
    }

    // weighted column means fill the missing coordinates of seed points
    let mut col_sum = vec![0.0; d];
    let mut col_w = vec![0.0; d];
    for (p, &wi) in pts.iter().zip(w) {
        for (i, c) in p.coords.iter().enumerate() {
            if let Some(v) = c {
                col_sum[i] += wi * v;
                col_w[i] += wi;
            }
        }
    }
    let fill: Vec<f64> = col_sum
        .iter()
        .zip(&col_w)
        .map(|(s, cw)| if *cw > 0.0 { s / cw } else { 0.0 })
        .collect();
    let seed_center = |p: &MissingPoint, fallback: &[f64]| -> Vec<f64> {
        p.coords
            .iter()
            .zip(fallback)
            .map(|(c, f)| c.unwrap_or(*f))
            .collect()
    };

    let init_points: Vec<&MissingPoint> = match &cfg.init {
        LloydInit::Seed(seed) => {
            if k > pts.len() {
                return input(format!("k = {k} exceeds the {} input points", pts.len()));
            }
            let mut r = rng::substream(*seed, streams::LLOYD);
            let mut idx = sample(&mut r, pts.len(), k).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| pts[i]).collect()
        }
        LloydInit::Ids(ids) => {
            if ids.len() != k {
                return input(format!("expected {k} initial ids, got {}", ids.len()));
            }
            ids.iter()
                .map(|&id| {
                    pts.iter()
                        .copied()
                        .find(|p| p.id == id)
                        .ok_or_else(|| crate::error::Error::Input(format!("initial id {id} not in input")))
                })
                .collect::<Result<_>>()?
        }
    };
    let mut centers: Vec<Vec<f64>> = init_points.iter().map(|p| seed_center(p, &fill)).collect();

    let mut assigned = assign(pts, &centers);
    reseed_empty(pts, &mut centers, &mut assigned);
    let mut cost = weighted_cost(&assigned, w);
    let mut history = vec![cost];
    let mut iterations = 0;

    for _ in 0..cfg.iters {
        iterations += 1;
        let mut sums = vec![vec![0.0; d]; k];
        let mut weights = vec![vec![0.0; d]; k];
        for ((p, &(c, _)), &wi) in pts.iter().zip(&assigned).zip(w) {
            for (i, v) in p.coords.iter().enumerate() {
                if let Some(v) = v {
                    sums[c][i] += wi * v;
                    weights[c][i] += wi;
                }
            }
        }
        for c in 0..k {
            for i in 0..d {
                if weights[c][i] > 0.0 {
                    centers[c][i] = sums[c][i] / weights[c][i];
                }
            }
        }
        assigned = assign(pts, &centers);
        reseed_empty(pts, &mut centers, &mut assigned);
        let next = weighted_cost(&assigned, w);
        history.push(next);
        let improvement = cost - next;
        cost = next;
        if improvement < cfg.tol * history[history.len() - 2] {
            break;
        }
    }

    Ok(LloydResult {
        centers: CenterSet::new(centers)?,
        assignment: assigned.into_iter().map(|(c, _)| c).collect(),
        cost,
        history,
        iterations,
    })
}

/// Moves each empty center onto the point furthest from its own center.
fn reseed_empty(pts: &[&MissingPoint], centers: &mut [Vec<f64>], assigned: &mut Vec<(usize, f64)>) {
    loop {
        let mut counts = vec![0usize; centers.len()];
        for &(c, _) in assigned.iter() {
            counts[c] += 1;
        }
        let Some(empty) = counts.iter().position(|&n| n == 0) else {
            return;
        };
        let (far, dist) = assigned
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, &(_, d))| if d > best.1 { (i, d) } else { best });
        if dist <= 0.0 {
            // every point sits on a center; nothing to gain
            return;
        }
        for (i, c) in pts[far].coords.iter().enumerate() {
            if let Some(v) = c {
                centers[empty][i] = *v;
            }
        }
        *assigned = assign(pts, centers);
    }
}
