//! Size-versus-error sweeps and the Lloyd speedup measurement.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{adversarial_collection, random_centers, CenterSource, ErrorReference, ExperimentConfig};
use crate::coreset::{default_registry, CoresetMethod};
use crate::distance::cost;
use crate::error::Result;
use crate::lloyd::{lloyd, lloyd_weighted, LloydConfig, LloydInit};
use crate::point::Dataset;
use crate::rng::{derive_indexed, derive_seed, streams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: String,
    pub size: usize,
    pub trial: usize,
    /// Distinct points in the coreset.
    pub points: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub method: String,
    pub size: usize,
    pub trials: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SweepSummary>,
    /// Center sets dropped for having zero cost, summed over trials.
    pub skipped_center_sets: usize,
}

impl SweepResult {
    pub fn summary_for(&self, method: &str, size: usize) -> Option<&SweepSummary> {
        self.summary.iter().find(|s| s.method == method && s.size == size)
    }
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    derive_indexed(seed, streams::TRIALS, trial as u64)
}

fn resolve_methods(cfg: &ExperimentConfig) -> Result<Vec<std::sync::Arc<dyn CoresetMethod>>> {
    let registry = default_registry(&cfg.coreset);
    cfg.methods.iter().map(|m| registry.get(m)).collect()
}

/// For every method, trial and size: the empirical error of one coreset.
///
/// Each trial draws its own random center sets (adversarial sets are the
/// same for every trial). Each method scores the data once per trial and
/// draws every size from that scoring. Trials run in parallel on independent
/// seeds; rows come out ordered by method, size, then trial.
pub fn run_size_error_sweep(data: &Dataset, cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let params = cfg.params()?;
    let methods = resolve_methods(cfg)?;
    let fixed = match cfg.centers {
        CenterSource::Random => None,
        CenterSource::Adversarial => Some(ErrorReference::new(data, adversarial_collection(data)?, cfg.z)?),
    };

    let per_trial: Vec<(Vec<SweepRow>, usize)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(cfg.seed, trial);
            let drawn;
            let reference = match &fixed {
                Some(r) => r,
                None => {
                    let centers = random_centers(data, cfg.k, cfg.n_centers, seed)?;
                    drawn = ErrorReference::new(data, centers, cfg.z)?;
                    &drawn
                }
            };
            let mut rows = Vec::new();
            for m in &methods {
                let sampler = m.prepare(data, &params, seed)?;
                for &size in &cfg.sizes {
                    let cs = sampler.sample(size, seed)?;
                    rows.push(SweepRow {
                        method: m.name().to_string(),
                        size,
                        trial,
                        points: cs.len(),
                        error: reference.error(data, &cs)?,
                    });
                }
            }
            Ok((rows, reference.skipped()))
        })
        .collect::<Result<_>>()?;

    let skipped_center_sets = per_trial.iter().map(|(_, s)| s).sum();
    let mut rows: Vec<SweepRow> = per_trial.into_iter().flat_map(|(r, _)| r).collect();
    let method_pos = |name: &str| cfg.methods.iter().position(|m| m == name);
    rows.sort_by_key(|r| (method_pos(&r.method), r.size, r.trial));
    let summary = summarize(&rows);
    Ok(SweepResult {
        rows,
        summary,
        skipped_center_sets,
    })
}

/// Mean and sample standard deviation per (method, size), in row order.
pub fn summarize(rows: &[SweepRow]) -> Vec<SweepSummary> {
    let mut out: Vec<SweepSummary> = Vec::new();
    let mut groups: Vec<(String, usize, Vec<f64>)> = Vec::new();
    for r in rows {
        match groups.iter_mut().find(|(m, s, _)| *m == r.method && *s == r.size) {
            Some(g) => g.2.push(r.error),
            None => groups.push((r.method.clone(), r.size, vec![r.error])),
        }
    }
    for (method, size, errs) in groups {
        let n = errs.len() as f64;
        let mean = errs.iter().sum::<f64>() / n;
        let std = if errs.len() > 1 {
            (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        out.push(SweepSummary {
            method,
            size,
            trials: errs.len(),
            mean,
            std,
        });
    }
    out
}

pub fn write_sweep_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupRow {
    pub method: String,
    pub size: usize,
    pub trial: usize,
    pub points: usize,
    /// k-means cost on the full data of the centers found on the coreset.
    pub cost: f64,
    /// |cost - reference cost| / reference cost.
    pub rel_error: f64,
    pub lloyd_iterations: usize,
    pub construction_secs: f64,
    pub lloyd_secs: f64,
    /// Reference time over construction plus Lloyd time.
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupResult {
    pub reference_cost: f64,
    pub reference_iterations: usize,
    pub reference_secs: f64,
    pub rows: Vec<SpeedupRow>,
}

/// Lloyd on the full data against coreset construction plus Lloyd on the
/// coreset. Runs sequentially so the timings are not shared with other work.
pub fn run_lloyd_speedup(data: &Dataset, cfg: &ExperimentConfig) -> Result<SpeedupResult> {
    cfg.validate()?;
    let params = cfg.params()?;
    let methods = resolve_methods(cfg)?;
    let lloyd_cfg = |seed: u64| LloydConfig {
        k: cfg.k,
        iters: cfg.lloyd_iters,
        tol: cfg.lloyd_tol,
        init: LloydInit::Seed(seed),
        restarts: cfg.lloyd_restarts,
    };

    let start = Instant::now();
    let reference = lloyd(data, &lloyd_cfg(derive_seed(cfg.seed, streams::LLOYD)))?;
    let reference_secs = start.elapsed().as_secs_f64();
    log::info!(
        "reference Lloyd: cost {} after {} iterations in {:.3}s",
        reference.cost,
        reference.iterations,
        reference_secs
    );

    let mut rows = Vec::new();
    for trial in 0..cfg.trials {
        let seed = trial_seed(cfg.seed, trial);
        for m in &methods {
            let start = Instant::now();
            let sampler = m.prepare(data, &params, seed)?;
            let prepare_secs = start.elapsed().as_secs_f64();
            for &size in &cfg.sizes {
                let start = Instant::now();
                let cs = sampler.sample(size, seed)?;
                let construction_secs = prepare_secs + start.elapsed().as_secs_f64();
                let start = Instant::now();
                let fit = lloyd_weighted(data, &cs, &lloyd_cfg(seed))?;
                let lloyd_secs = start.elapsed().as_secs_f64();
                let v = cost(data, &fit.centers, 2.0)?;
                rows.push(SpeedupRow {
                    method: m.name().to_string(),
                    size,
                    trial,
                    points: cs.len(),
                    cost: v,
                    rel_error: (v - reference.cost).abs() / reference.cost,
                    lloyd_iterations: fit.iterations,
                    construction_secs,
                    lloyd_secs,
                    speedup: reference_secs / (construction_secs + lloyd_secs),
                });
            }
        }
    }
    Ok(SpeedupResult {
        reference_cost: reference.cost,
        reference_iterations: reference.iterations,
        reference_secs,
        rows,
    })
}

/// Writes speedup rows; without `timings` the output depends only on the seed.
pub fn write_speedup_csv<W: Write>(w: W, rows: &[SpeedupRow], timings: bool) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["method", "size", "trial", "points", "cost", "rel_error", "lloyd_iterations"];
    if timings {
        header.extend(["construction_secs", "lloyd_secs", "speedup"]);
    }
    wtr.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.method.clone(),
            r.size.to_string(),
            r.trial.to_string(),
            r.points.to_string(),
            format!("{}", r.cost),
            format!("{}", r.rel_error),
            r.lloyd_iterations.to_string(),
        ];
        if timings {
            rec.extend([
                format!("{}", r.construction_secs),
                format!("{}", r.lloyd_secs),
                format!("{}", r.speedup),
            ]);
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{gen_synthetic, DatasetSource, SyntheticSpec};

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            dataset: DatasetSource::Synthetic(SyntheticSpec::new(300)),
            sizes: vec![20, 60],
            trials: 3,
            n_centers: 10,
            lloyd_iters: 50,
            ..Default::default()
        }
    }

    #[test]
    fn sweep_row_count_and_order() {
        let cfg = small_cfg();
        let data = cfg.dataset.load(1).unwrap();
        let res = run_size_error_sweep(&data, &cfg).unwrap();
        assert_eq!(res.rows.len(), 3 * 2 * 3);
        assert_eq!(res.summary.len(), 3 * 2);
        assert_eq!(res.rows[0].method, "ours");
        assert_eq!((res.rows[0].size, res.rows[0].trial), (20, 0));
        assert_eq!((res.rows[3].size, res.rows[3].trial), (60, 0));
        assert!(res.rows.iter().all(|r| r.error.is_finite() && r.error >= 0.0));
        assert_eq!(res, run_size_error_sweep(&data, &cfg).unwrap());
    }

    #[test]
    fn summary_statistics() {
        let rows: Vec<SweepRow> = [1.0, 2.0, 3.0]
            .iter()
            .enumerate()
            .map(|(trial, &error)| SweepRow {
                method: "m".into(),
                size: 5,
                trial,
                points: 5,
                error,
            })
            .collect();
        let s = summarize(&rows);
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].mean, s[0].std), (2.0, 1.0));
    }

    #[test]
    fn uniform_misses_lower_bound_points() {
        let cfg = ExperimentConfig {
            dataset: DatasetSource::LowerBound { j: 3 },
            k: 3,
            sizes: vec![10],
            trials: 5,
            centers: CenterSource::Adversarial,
            methods: vec!["uniform".into()],
            ..Default::default()
        };
        let data = cfg.dataset.load(0).unwrap();
        let res = run_size_error_sweep(&data, &cfg).unwrap();
        assert!(res.rows.iter().all(|r| r.error >= 1.0 - 1e-9));
    }

    #[test]
    fn speedup_rows() {
        let cfg = ExperimentConfig {
            trials: 1,
            methods: vec!["ours".into(), "uniform".into()],
            ..small_cfg()
        };
        let data = gen_synthetic(&SyntheticSpec::new(300), 2).unwrap();
        let res = run_lloyd_speedup(&data, &cfg).unwrap();
        assert_eq!(res.rows.len(), 4);
        assert!(res.reference_cost > 0.0);
        assert!(res.rows.iter().all(|r| r.rel_error.is_finite()));
        let mut a = Vec::new();
        write_speedup_csv(&mut a, &res.rows, false).unwrap();
        let again = run_lloyd_speedup(&data, &cfg).unwrap();
        let mut b = Vec::new();
        write_speedup_csv(&mut b, &again.rows, false).unwrap();
        assert_eq!(a, b);
    }
}
