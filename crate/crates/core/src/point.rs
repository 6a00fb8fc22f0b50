//! Domain types: points with missing coordinates, datasets, center sets and
//! weighted coresets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// One coordinate of a data point. `None` is the missing marker.
pub type Coord = Option<f64>;

/// A point in R^d where some coordinates may be missing.
#[derive(Debug, Clone, PartialEq)]
pub struct MissingPoint {
    pub id: usize,
    pub coords: Vec<Coord>,
}

impl MissingPoint {
    pub fn new(id: usize, coords: Vec<Coord>) -> Self {
        Self { id, coords }
    }

    /// Convenience constructor for complete points.
    pub fn complete(id: usize, coords: &[f64]) -> Self {
        Self::new(id, coords.iter().copied().map(Some).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_available(&self, i: usize) -> bool {
        self.coords[i].is_some()
    }

    /// Indices of the non-missing coordinates (I_x).
    pub fn available(&self) -> impl Iterator<Item = usize> + '_ {
        self.coords
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|_| i))
    }

    pub fn missing_count(&self) -> usize {
        self.coords.iter().filter(|c| c.is_none()).count()
    }

    /// True when every index of `subset` is available.
    pub fn covers(&self, subset: &[usize]) -> bool {
        subset.iter().all(|&i| self.coords[i].is_some())
    }

    /// Coordinates on `subset`, or `None` when one of them is missing.
    pub fn restrict(&self, subset: &[usize]) -> Option<Vec<f64>> {
        subset.iter().map(|&i| self.coords[i]).collect()
    }
}

/// A collection of points sharing one dimension. Point ids equal positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<MissingPoint>,
    d: usize,
    j: usize,
}

impl Dataset {
    /// Builds a dataset from rows; ids are assigned by row position.
    ///
    /// Rejects ragged rows, non-finite values and rows with every coordinate
    /// missing. `j` is computed from the rows.
    pub fn from_rows(rows: Vec<Vec<Coord>>) -> Result<Self> {
        let d = match rows.first() {
            Some(r) => r.len(),
            None => return input("dataset has no rows"),
        };
        if d == 0 {
            return input("dataset has zero columns");
        }
        let mut points = Vec::with_capacity(rows.len());
        let mut j = 0;
        for (row, coords) in rows.into_iter().enumerate() {
            if coords.len() != d {
                return Err(Error::Parse {
                    row,
                    column: coords.len(),
                    message: format!("expected {d} columns, found {}", coords.len()),
                });
            }
            if let Some(col) = coords.iter().position(|c| matches!(c, Some(v) if !v.is_finite())) {
                return Err(Error::Parse {
                    row,
                    column: col,
                    message: "non-finite value".into(),
                });
            }
            let p = MissingPoint::new(row, coords);
            let missing = p.missing_count();
            if missing == d {
                return Err(Error::Parse {
                    row,
                    column: 0,
                    message: "all coordinates are missing".into(),
                });
            }
            j = j.max(missing);
            points.push(p);
        }
        Ok(Self { points, d, j })
    }

    pub fn from_complete(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().copied().map(Some).collect())
                .collect(),
        )
    }

    pub fn points(&self) -> &[MissingPoint] {
        &self.points
    }

    pub fn point(&self, id: usize) -> &MissingPoint {
        &self.points[id]
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Maximum number of missing coordinates in any point.
    pub fn j(&self) -> usize {
        self.j
    }

    /// Fraction of coordinates that are missing.
    pub fn missing_fraction(&self) -> f64 {
        let missing: usize = self.points.iter().map(MissingPoint::missing_count).sum();
        missing as f64 / (self.n() * self.d) as f64
    }

    /// Per-column (min, max) over observed values; `None` for a column with
    /// no observed value.
    pub fn column_ranges(&self) -> Vec<Option<(f64, f64)>> {
        let mut ranges: Vec<Option<(f64, f64)>> = vec![None; self.d];
        for p in &self.points {
            for (i, c) in p.coords.iter().enumerate() {
                if let Some(v) = *c {
                    ranges[i] = Some(match ranges[i] {
                        Some((lo, hi)) => (lo.min(v), hi.max(v)),
                        None => (v, v),
                    });
                }
            }
        }
        ranges
    }
}

/// A set of complete centers in R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterSet {
    centers: Vec<Vec<f64>>,
}

impl CenterSet {
    pub fn new(centers: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = centers.first() else {
            return input("center set is empty");
        };
        let d = first.len();
        for c in &centers {
            if c.len() != d {
                return Err(Error::Dimension {
                    expected: d,
                    got: c.len(),
                });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return input("center coordinates must be finite");
            }
        }
        Ok(Self { centers })
    }

    /// Builds centers from possibly-missing rows, rejecting any missing value.
    pub fn from_rows(rows: Vec<Vec<Coord>>) -> Result<Self> {
        let mut centers = Vec::with_capacity(rows.len());
        for (row, r) in rows.into_iter().enumerate() {
            let c: Option<Vec<f64>> = r.iter().copied().collect();
            match c {
                Some(c) => centers.push(c),
                None => {
                    return Err(Error::Parse {
                        row,
                        column: r.iter().position(Option::is_none).unwrap_or(0),
                        message: "centers may not contain missing values".into(),
                    })
                }
            }
        }
        Self::new(centers)
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn k(&self) -> usize {
        self.centers.len()
    }

    pub fn d(&self) -> usize {
        self.centers[0].len()
    }
}

/// (k, z) together with the informational accuracy target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusteringParams {
    pub k: usize,
    pub z: f64,
    pub epsilon: f64,
}

impl ClusteringParams {
    pub fn new(k: usize, z: f64, epsilon: f64) -> Result<Self> {
        if k == 0 {
            return input("k must be at least 1");
        }
        if !(z >= 1.0 && z.is_finite()) {
            return input(format!("z must be >= 1, got {z}"));
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return input(format!("epsilon must lie in (0, 1/2), got {epsilon}"));
        }
        Ok(Self { k, z, epsilon })
    }

    /// k-means with the default accuracy target.
    pub fn kmeans(k: usize) -> Result<Self> {
        Self::new(k, 2.0, 0.2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoresetEntry {
    pub id: usize,
    pub weight: f64,
}

/// A weighted multiset of dataset point ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedCoreset {
    entries: Vec<CoresetEntry>,
    source_n: usize,
}

impl WeightedCoreset {
    pub fn new(entries: Vec<CoresetEntry>, source: &Dataset) -> Result<Self> {
        for e in &entries {
            if e.id >= source.n() {
                return input(format!(
                    "coreset id {} out of range for a dataset of {} points",
                    e.id,
                    source.n()
                ));
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return input(format!("coreset weight for id {} must be positive", e.id));
            }
        }
        Ok(Self {
            entries,
            source_n: source.n(),
        })
    }

    /// Entries already known to be valid for a source of `source_n` points.
    pub(crate) fn from_valid(entries: Vec<CoresetEntry>, source_n: usize) -> Self {
        debug_assert!(entries.iter().all(|e| e.id < source_n && e.weight > 0.0));
        Self { entries, source_n }
    }

    /// Every point of `source` with weight one.
    pub fn unit(source: &Dataset) -> Self {
        Self {
            entries: (0..source.n())
                .map(|id| CoresetEntry { id, weight: 1.0 })
                .collect(),
            source_n: source.n(),
        }
    }

    pub fn entries(&self) -> &[CoresetEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn source_n(&self) -> usize {
        self.source_n
    }

    pub fn total_weight(&self) -> f64 {
        crate::distance::compensated_sum(self.entries.iter().map(|e| e.weight))
    }

    /// Sums the weights of repeated ids; output is sorted by id.
    pub fn merged(&self) -> Self {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for e in &self.entries {
            *acc.entry(e.id).or_insert(0.0) += e.weight;
        }
        Self {
            entries: acc
                .into_iter()
                .map(|(id, weight)| CoresetEntry { id, weight })
                .collect(),
            source_n: self.source_n,
        }
    }

    pub fn contains(&self, id: usize) -> bool {
        self.entries.iter().any(|e| e.id == id)
    }

    /// Multiplies every weight by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| CoresetEntry {
                    id: e.id,
                    weight: e.weight * factor,
                })
                .collect(),
            source_n: self.source_n,
        }
    }
}
