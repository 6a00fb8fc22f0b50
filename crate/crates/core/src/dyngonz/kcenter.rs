use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::family::{build_family_capped, CoordinateFamily, DEFAULT_SIZE_CAP};
use crate::point::MissingPoint;
use crate::rng::{self, streams};

use super::index::default_index_registry;
use super::restriction::DynGonzalezRestriction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KCenterConfig {
    pub k: usize,
    /// Number of random subsets to draw; `None` uses the theoretical size.
    pub family_size: Option<usize>,
    pub family_cap: usize,
    /// Constant in l = ceil(c_l * (k ln(q + 2) + ln(1/delta))).
    pub c_l: f64,
    /// Per-restriction failure budget; `None` means 1 / (4 |family|).
    pub delta: Option<f64>,
    /// Name of the furthest-point backend (`projection` or `exact`).
    pub backend: String,
    pub seed: u64,
}

impl Default for KCenterConfig {
    fn default() -> Self {
        Self {
            k: 1,
            family_size: None,
            family_cap: DEFAULT_SIZE_CAP,
            c_l: 2.0,
            delta: None,
            backend: "projection".into(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Update {
    Insert,
    Delete,
}

/// Number of projection vectors per restriction.
pub fn projection_count(k: usize, q_hint: usize, delta: f64, c_l: f64) -> usize {
    let raw = c_l * (k as f64 * (q_hint as f64 + 2.0).ln() + (1.0 / delta).ln());
    (raw.ceil() as usize).max(1)
}

/// k-center coreset for points with missing values: one dynamic Gonzalez
/// structure per member of a coordinate family, unioned on query.
#[derive(Debug)]
pub struct DynKCenterCoreset {
    family: CoordinateFamily,
    restrictions: Vec<DynGonzalezRestriction>,
    k: usize,
    d: usize,
    l: usize,
    delta: f64,
    live: HashSet<usize>,
}

impl DynKCenterCoreset {
    /// Draws a (j, k, d)-family and sets up an empty structure sized for
    /// `q_hint` updates.
    pub fn init(d: usize, j: usize, q_hint: usize, cfg: &KCenterConfig) -> Result<Self> {
        let family = build_family_capped(d, j, cfg.k, cfg.family_size, cfg.seed, cfg.family_cap)?;
        Self::with_family(family, q_hint, cfg)
    }

    pub fn with_family(
        family: CoordinateFamily,
        q_hint: usize,
        cfg: &KCenterConfig,
    ) -> Result<Self> {
        if cfg.k == 0 {
            return input("k must be at least 1");
        }
        let delta = cfg
            .delta
            .unwrap_or(1.0 / (4.0 * family.len().max(1) as f64));
        if !(delta > 0.0 && delta < 1.0) {
            return input(format!("delta must lie in (0, 1), got {delta}"));
        }
        let l = projection_count(cfg.k, q_hint, delta, cfg.c_l);
        let factory = default_index_registry().get(&cfg.backend)?;
        let d = family.d();
        let restrictions = family
            .subsets()
            .iter()
            .enumerate()
            .map(|(r, subset)| {
                let seed = rng::derive_indexed(cfg.seed, streams::PROJECTIONS, r as u64);
                DynGonzalezRestriction::new(subset.clone(), d, factory.create(subset.len(), l, seed))
            })
            .collect();
        Ok(Self {
            family,
            restrictions,
            k: cfg.k,
            d,
            l,
            delta,
            live: HashSet::new(),
        })
    }

    pub fn family(&self) -> &CoordinateFamily {
        &self.family
    }

    pub fn restrictions(&self) -> &[DynGonzalezRestriction] {
        &self.restrictions
    }

    pub fn projections_per_restriction(&self) -> usize {
        self.l
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.live.contains(&id)
    }

    /// True when some restriction accepts `x`.
    pub fn is_covered(&self, x: &MissingPoint) -> bool {
        self.restrictions.iter().any(|r| r.accepts(x))
    }

    pub fn update(&mut self, op: Update, x: &MissingPoint) -> Result<()> {
        match op {
            Update::Insert => self.insert(x),
            Update::Delete => self.delete(x.id),
        }
    }

    pub fn insert(&mut self, x: &MissingPoint) -> Result<()> {
        self.insert_batch(&[x])
    }

    pub fn delete(&mut self, id: usize) -> Result<()> {
        self.delete_batch(&[id])
    }

    /// Inserts several points, fanning out over restrictions in parallel.
    pub fn insert_batch(&mut self, points: &[&MissingPoint]) -> Result<()> {
        let mut batch = HashSet::with_capacity(points.len());
        for x in points {
            if x.dim() != self.d {
                return Err(crate::error::Error::Dimension {
                    expected: self.d,
                    got: x.dim(),
                });
            }
            if self.live.contains(&x.id) || !batch.insert(x.id) {
                return input(format!("point {} is already present", x.id));
            }
        }
        self.restrictions
            .par_iter_mut()
            .try_for_each(|r| r.insert_batch(points).map(|_| ()))?;
        self.live.extend(points.iter().map(|x| x.id));
        Ok(())
    }

    pub fn delete_batch(&mut self, ids: &[usize]) -> Result<()> {
        if let Some(id) = ids.iter().find(|id| !self.live.contains(id)) {
            return input(format!("cannot delete unknown point {id}"));
        }
        self.restrictions
            .par_iter_mut()
            .try_for_each(|r| ids.iter().try_for_each(|&id| r.remove(id).map(|_| ())))?;
        for id in ids {
            self.live.remove(id);
        }
        Ok(())
    }

    /// Union of the per-restriction coresets, as sorted ids.
    pub fn get_coreset(&self) -> Vec<usize> {
        let per: Vec<Vec<usize>> = self
            .restrictions
            .par_iter()
            .filter(|r| !r.is_empty())
            .map(|r| r.get_coreset(self.k))
            .collect();
        let mut ids: Vec<usize> = per.into_iter().flatten().collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}
