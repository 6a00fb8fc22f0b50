use std::fmt;

use crate::distance::euclidean;
use crate::error::{input, Error, Result};
use crate::point::MissingPoint;

use super::index::{FurthestIndex, Members};

/// Gonzalez coreset of the points whose available coordinates include
/// `subset`, maintained under insertions and deletions.
pub struct DynGonzalezRestriction {
    subset: Vec<usize>,
    d: usize,
    index: Box<dyn FurthestIndex>,
    members: Members,
}

impl fmt::Debug for DynGonzalezRestriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynGonzalezRestriction")
            .field("subset", &self.subset)
            .field("index", &self.index.name())
            .field("members", &self.members.len())
            .finish()
    }
}

impl DynGonzalezRestriction {
    pub fn new(subset: Vec<usize>, d: usize, index: Box<dyn FurthestIndex>) -> Self {
        Self {
            subset,
            d,
            index,
            members: Members::new(),
        }
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn members(&self) -> &Members {
        &self.members
    }

    pub fn index(&self) -> &dyn FurthestIndex {
        self.index.as_ref()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_member(&self, id: usize) -> bool {
        self.members.contains_key(&id)
    }

    /// True when `x` belongs to this restriction (its available coordinates
    /// include the subset).
    pub fn accepts(&self, x: &MissingPoint) -> bool {
        x.covers(&self.subset)
    }

    /// Inserts `x` restricted to the subset. Returns `Ok(false)` without
    /// changes when `x` lacks one of the subset's coordinates.
    pub fn insert(&mut self, x: &MissingPoint) -> Result<bool> {
        if x.dim() != self.d {
            return Err(Error::Dimension {
                expected: self.d,
                got: x.dim(),
            });
        }
        let Some(restricted) = x.restrict(&self.subset) else {
            return Ok(false);
        };
        if self.members.contains_key(&x.id) {
            return input(format!("point {} is already a member", x.id));
        }
        self.index.insert(x.id, &restricted)?;
        self.members.insert(x.id, restricted);
        Ok(true)
    }

    /// Inserts every point of `points` that belongs to the restriction and
    /// returns how many did.
    pub fn insert_batch(&mut self, points: &[&MissingPoint]) -> Result<usize> {
        let mut accepted: Vec<(usize, Vec<f64>)> = Vec::new();
        for x in points {
            if x.dim() != self.d {
                return Err(Error::Dimension {
                    expected: self.d,
                    got: x.dim(),
                });
            }
            if let Some(restricted) = x.restrict(&self.subset) {
                accepted.push((x.id, restricted));
            }
        }
        let mut seen = std::collections::HashSet::with_capacity(accepted.len());
        if let Some((id, _)) = accepted
            .iter()
            .find(|(id, _)| self.members.contains_key(id) || !seen.insert(*id))
        {
            return input(format!("point {id} is already a member"));
        }
        let items: Vec<(usize, &[f64])> = accepted.iter().map(|(id, p)| (*id, p.as_slice())).collect();
        self.index.insert_batch(&items)?;
        let count = accepted.len();
        self.members.extend(accepted);
        Ok(count)
    }

    /// Removes `id`; `Ok(false)` when it was not a member.
    pub fn remove(&mut self, id: usize) -> Result<bool> {
        let Some(restricted) = self.members.remove(&id) else {
            return Ok(false);
        };
        self.index.remove(id, &restricted)?;
        Ok(true)
    }

    /// Simulates Gonzalez on the members: at most k + 1 ids.
    ///
    /// Each step asks the index for candidates and keeps the one whose true
    /// distance to the selection (in the restricted space) is largest, ties
    /// to the smaller id. When every candidate is already picked, the smallest
    /// unpicked member is taken. Stops at k + 1 picks or when all members
    /// are picked.
    pub fn get_coreset(&self, k: usize) -> Vec<usize> {
        let Some(first) = self.index.candidates(&[], &self.members).first().copied() else {
            return Vec::new();
        };
        let mut picks = vec![first];
        while picks.len() < k + 1 && picks.len() < self.members.len() {
            let pts: Vec<&[f64]> = picks.iter().map(|id| self.members[id].as_slice()).collect();
            let mut best: Option<(usize, f64)> = None;
            for id in self.index.candidates(&pts, &self.members) {
                let p = &self.members[&id];
                let d = pts.iter().map(|q| euclidean(p, q)).fold(f64::INFINITY, f64::min);
                if best.is_none_or(|(bid, bd)| d > bd || (d == bd && id < bid)) {
                    best = Some((id, d));
                }
            }
            match best {
                Some((id, d)) if d > 0.0 || !picks.contains(&id) => picks.push(id),
                // every candidate is already picked: all members sit on Q
                _ => {
                    let id = self.members.keys().find(|id| !picks.contains(id)).copied();
                    picks.extend(id);
                }
            }
        }
        picks
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyngonz::index::{ExactIndex, ProjectionIndex, ProjectionSet};

    fn line(values: &[f64]) -> Vec<MissingPoint> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| MissingPoint::complete(i, &[v]))
            .collect()
    }

    fn projected(m: usize, l: usize) -> Box<dyn FurthestIndex> {
        Box::new(ProjectionIndex::new(ProjectionSet::draw(m, l, 3)))
    }

    #[test]
    fn non_covering_points_are_skipped() {
        let mut r = DynGonzalezRestriction::new(vec![1], 2, Box::new(ExactIndex));
        let x = MissingPoint::new(0, vec![Some(1.0), None]);
        assert!(!r.insert(&x).unwrap());
        assert!(r.is_empty());
        let y = MissingPoint::new(1, vec![None, Some(2.0)]);
        assert!(r.insert(&y).unwrap());
        assert!(r.insert(&y).is_err());
        assert!(r.insert(&MissingPoint::complete(2, &[1.0])).is_err());
    }

    #[test]
    fn insert_then_delete_restores_trees() {
        let mut r = DynGonzalezRestriction::new(vec![0], 1, projected(1, 8));
        let pts = line(&[0.0, 1.0, 10.0]);
        r.insert(&pts[0]).unwrap();
        r.insert(&pts[1]).unwrap();
        let before = format!("{:?}", r.index());
        r.insert(&pts[2]).unwrap();
        assert!(r.remove(2).unwrap());
        assert!(!r.remove(2).unwrap());
        assert_eq!(before, format!("{:?}", r.index()));
    }

    #[test]
    fn coreset_examples() {
        let mut r = DynGonzalezRestriction::new(vec![0], 1, projected(1, 16));
        assert!(r.get_coreset(2).is_empty());
        let pts = line(&[0.0, 1.0, 10.0]);
        r.insert(&pts[1]).unwrap();
        assert_eq!(r.get_coreset(2), vec![1]);
        r.insert(&pts[0]).unwrap();
        r.insert(&pts[2]).unwrap();
        let mut q = r.get_coreset(1);
        q.sort_unstable();
        assert_eq!(q, vec![0, 2]);
        let mut all = r.get_coreset(5);
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2]);
    }

    #[test]
    fn exact_backend_matches_static_gonzalez() {
        let mut r = DynGonzalezRestriction::new(vec![0, 1], 2, Box::new(ExactIndex));
        let raw = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5], [3.0, 0.2]];
        for (i, p) in raw.iter().enumerate() {
            r.insert(&MissingPoint::complete(i, p)).unwrap();
        }
        let pts: Vec<Vec<f64>> = raw.iter().map(|p| p.to_vec()).collect();
        let expected =
            crate::dyngonz::static_gonzalez(&pts, 3, &crate::dyngonz::ExactOracle, 1.0).unwrap();
        assert_eq!(r.get_coreset(3), expected);
    }
}
