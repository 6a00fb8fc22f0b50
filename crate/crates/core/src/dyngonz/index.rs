//! Furthest-point search backends for the dynamic Gonzalez simulation.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};

use crate::distance::euclidean;
use crate::error::Result;
use crate::ordered1d::Ordered1D;
use crate::registry::Registry;
use crate::rng;

/// Restricted coordinates of the live members, keyed by point id.
pub type Members = BTreeMap<usize, Vec<f64>>;

/// Maintains a dynamic point set in R^m and proposes candidates for the
/// point furthest from a selection.
pub trait FurthestIndex: Send + Sync + Debug {
    fn name(&self) -> &'static str;

    fn insert(&mut self, id: usize, point: &[f64]) -> Result<()>;

    fn remove(&mut self, id: usize, point: &[f64]) -> Result<()>;

    fn insert_batch(&mut self, items: &[(usize, &[f64])]) -> Result<()> {
        items.iter().try_for_each(|(id, p)| self.insert(*id, p))
    }

    /// Candidate ids for the next pick. With no picks, a single start point.
    /// `members` holds exactly the points inserted so far.
    fn candidates(&self, picks: &[&[f64]], members: &Members) -> Vec<usize>;
}

/// Builds a [`FurthestIndex`] for one restriction.
pub trait IndexFactory: Send + Sync {
    /// `dim` is the restriction's dimension, `l` the number of projection
    /// vectors to draw when the backend uses them.
    fn create(&self, dim: usize, l: usize, seed: u64) -> Box<dyn FurthestIndex>;
}

/// `l` random vectors with i.i.d. standard normal entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSet {
    vectors: Vec<Vec<f64>>,
    seed: u64,
}

impl ProjectionSet {
    pub fn draw(dim: usize, l: usize, seed: u64) -> Self {
        let mut r = rng::substream(seed, rng::streams::PROJECTIONS);
        let vectors = (0..l.max(1))
            .map(|_| (0..dim).map(|_| StandardNormal.sample(&mut r)).collect())
            .collect();
        Self { vectors, seed }
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One ordered tree of projections per random vector.
#[derive(Debug, Clone)]
pub struct ProjectionIndex {
    projections: ProjectionSet,
    trees: Vec<Ordered1D>,
}

impl ProjectionIndex {
    pub fn new(projections: ProjectionSet) -> Self {
        let trees = vec![Ordered1D::new(); projections.len()];
        Self { projections, trees }
    }

    pub fn trees(&self) -> &[Ordered1D] {
        &self.trees
    }

    pub fn projections(&self) -> &ProjectionSet {
        &self.projections
    }
}

impl FurthestIndex for ProjectionIndex {
    fn name(&self) -> &'static str {
        "projection"
    }

    fn insert(&mut self, id: usize, point: &[f64]) -> Result<()> {
        for (v, t) in self.projections.vectors.iter().zip(&mut self.trees) {
            t.add(dot(v, point), id)?;
        }
        Ok(())
    }

    fn remove(&mut self, id: usize, point: &[f64]) -> Result<()> {
        for (v, t) in self.projections.vectors.iter().zip(&mut self.trees) {
            t.remove(dot(v, point), id)?;
        }
        Ok(())
    }

    fn insert_batch(&mut self, items: &[(usize, &[f64])]) -> Result<()> {
        for (v, t) in self.projections.vectors.iter().zip(&mut self.trees) {
            t.extend(items.iter().map(|(id, p)| (dot(v, p), *id)))?;
        }
        Ok(())
    }

    fn candidates(&self, picks: &[&[f64]], _members: &Members) -> Vec<usize> {
        if picks.is_empty() {
            return self.trees[0].furthest(&[]).map(|f| f.id).into_iter().collect();
        }
        let mut out: Vec<usize> = self
            .projections
            .vectors
            .iter()
            .zip(&self.trees)
            .filter_map(|(v, t)| {
                let projected: Vec<f64> = picks.iter().map(|p| dot(v, p)).collect();
                t.furthest(&projected).map(|f| f.id)
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Brute-force search over the members; exact furthest point.
#[derive(Debug, Clone, Default)]
pub struct ExactIndex;

impl FurthestIndex for ExactIndex {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn insert(&mut self, _id: usize, _point: &[f64]) -> Result<()> {
        Ok(())
    }

    fn remove(&mut self, _id: usize, _point: &[f64]) -> Result<()> {
        Ok(())
    }

    fn candidates(&self, picks: &[&[f64]], members: &Members) -> Vec<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (&id, p) in members {
            let d = picks
                .iter()
                .map(|q| euclidean(p, q))
                .fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((id, d));
            }
        }
        best.map(|(id, _)| id).into_iter().collect()
    }
}

struct ProjectionFactory;

impl IndexFactory for ProjectionFactory {
    fn create(&self, dim: usize, l: usize, seed: u64) -> Box<dyn FurthestIndex> {
        Box::new(ProjectionIndex::new(ProjectionSet::draw(dim, l, seed)))
    }
}

struct ExactFactory;

impl IndexFactory for ExactFactory {
    fn create(&self, _dim: usize, _l: usize, _seed: u64) -> Box<dyn FurthestIndex> {
        Box::new(ExactIndex)
    }
}

/// `projection` (random 1-D projections, the default) and `exact`
/// (brute force, for testing).
pub fn default_index_registry() -> Registry<dyn IndexFactory> {
    let mut r: Registry<dyn IndexFactory> = Registry::new("furthest-point backend");
    r.register("projection", Arc::new(ProjectionFactory));
    r.register("exact", Arc::new(ExactFactory));
    r
}
