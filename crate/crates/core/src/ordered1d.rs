//! Ordered multiset of (value, id) pairs with predecessor/successor queries
//! and a furthest-from-centers query built on them.
//!
//! Backed by `BTreeSet`, so every primitive is O(log n); `furthest` issues
//! at most 2|C| + 1 primitive queries.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use crate::error::{input, Result};

#[derive(Debug, Clone, Copy)]
struct Key(f64, usize);

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Answer of a `furthest` query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Furthest {
    pub value: f64,
    pub id: usize,
    /// min over centers of |value - c|; infinite when no centers were given.
    pub distance: f64,
}

#[derive(Default)]
pub struct Ordered1D {
    entries: BTreeSet<Key>,
    ops: AtomicU64,
}

impl Clone for Ordered1D {
    fn clone(&self) -> Self {
        Self {
            entries: self.entries.clone(),
            ops: AtomicU64::new(0),
        }
    }
}

impl fmt::Debug for Ordered1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.entries.iter().map(|k| (k.0, k.1))).finish()
    }
}

impl PartialEq for Ordered1D {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Ordered1D {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of primitive operations issued so far.
    pub fn primitive_ops(&self) -> u64 {
        self.ops.load(AtomicOrdering::Relaxed)
    }

    fn tick(&self) {
        self.ops.fetch_add(1, AtomicOrdering::Relaxed);
    }

    pub fn add(&mut self, value: f64, id: usize) -> Result<()> {
        self.tick();
        if value.is_nan() {
            return input("cannot store NaN");
        }
        if !self.entries.insert(Key(value, id)) {
            return input(format!("entry ({value}, {id}) already present"));
        }
        Ok(())
    }

    /// Adds many entries. Into an empty structure the entries are sorted and
    /// bulk-loaded, which is much faster than repeated [`add`](Self::add).
    pub fn extend(&mut self, items: impl IntoIterator<Item = (f64, usize)>) -> Result<()> {
        if !self.entries.is_empty() {
            return items.into_iter().try_for_each(|(v, id)| self.add(v, id));
        }
        let mut keys: Vec<Key> = items.into_iter().map(|(v, id)| Key(v, id)).collect();
        self.ops.fetch_add(keys.len() as u64, AtomicOrdering::Relaxed);
        if keys.iter().any(|k| k.0.is_nan()) {
            return input("cannot store NaN");
        }
        keys.sort_unstable();
        if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
            return input(format!("entry ({}, {}) already present", w[0].0, w[0].1));
        }
        self.entries = keys.into_iter().collect();
        Ok(())
    }

    pub fn remove(&mut self, value: f64, id: usize) -> Result<()> {
        self.tick();
        if !self.entries.remove(&Key(value, id)) {
            return input(format!("entry ({value}, {id}) not present"));
        }
        Ok(())
    }

    pub fn contains(&self, value: f64, id: usize) -> bool {
        self.entries.contains(&Key(value, id))
    }

    /// Largest entry with value <= x.
    pub fn upper_bound(&self, x: f64) -> Option<(f64, usize)> {
        self.tick();
        self.entries
            .range(..=Key(x, usize::MAX))
            .next_back()
            .map(|k| (k.0, k.1))
    }

    /// Smallest entry with value >= x.
    pub fn lower_bound(&self, x: f64) -> Option<(f64, usize)> {
        self.tick();
        self.entries.range(Key(x, 0)..).next().map(|k| (k.0, k.1))
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.entries.iter().map(|k| (k.0, k.1))
    }

    /// Entry maximizing the distance to the nearest of `centers`.
    ///
    /// The centers split the line into cells at consecutive midpoints; within
    /// a cell the distance is maximized at the cell's extreme entries, so the
    /// candidates are the global minimum and maximum plus the entries on
    /// either side of each midpoint. Ties go to the smaller (value, id).
    /// With no centers the minimum entry is returned.
    pub fn furthest(&self, centers: &[f64]) -> Option<Furthest> {
        let first = self.lower_bound(f64::NEG_INFINITY)?;
        if centers.is_empty() {
            return Some(Furthest {
                value: first.0,
                id: first.1,
                distance: f64::INFINITY,
            });
        }
        let mut sorted = centers.to_vec();
        sorted.sort_by(f64::total_cmp);

        let dist_to = |v: f64| {
            let i = sorted.partition_point(|&c| c < v);
            let mut best = f64::INFINITY;
            if i < sorted.len() {
                best = best.min((sorted[i] - v).abs());
            }
            if i > 0 {
                best = best.min((v - sorted[i - 1]).abs());
            }
            best
        };

        let mut best_value = first.0;
        let mut best_dist = dist_to(first.0);
        let mut consider = |v: f64| {
            let d = dist_to(v);
            if d > best_dist || (d == best_dist && v < best_value) {
                best_value = v;
                best_dist = d;
            }
        };
        for w in sorted.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if let Some((v, _)) = self.upper_bound(mid) {
                consider(v);
            }
            if let Some((v, _)) = self.lower_bound(mid) {
                consider(v);
            }
        }
        if let Some((v, _)) = self.upper_bound(f64::INFINITY) {
            consider(v);
        }
        // smallest id among entries sharing the winning value
        let (value, id) = self
            .lower_bound(best_value)
            .expect("winning value is present");
        Some(Furthest {
            value,
            id,
            distance: best_dist,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tree(values: &[f64]) -> Ordered1D {
        let mut t = Ordered1D::new();
        for (id, &v) in values.iter().enumerate() {
            t.add(v, id).unwrap();
        }
        t
    }

    // Linear scan over every entry: the oracle for `furthest`.
    fn brute(t: &Ordered1D, centers: &[f64]) -> Option<(f64, usize, f64)> {
        let mut best: Option<(f64, usize, f64)> = None;
        for (v, id) in t.iter() {
            let d = centers.iter().map(|c| (v - c).abs()).fold(f64::INFINITY, f64::min);
            match best {
                Some((_, _, bd)) if d <= bd => {}
                _ => best = Some((v, id, d)),
            }
        }
        best
    }

    #[test]
    fn add_remove_semantics() {
        let mut t = Ordered1D::new();
        t.add(1.0, 7).unwrap();
        assert_eq!(t.len(), 1);
        t.add(1.0, 8).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.add(1.0, 7).is_err());
        t.remove(1.0, 7).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.remove(1.0, 7).is_err());
        assert!(Ordered1D::new().remove(0.0, 0).is_err());
        assert!(t.add(f64::NAN, 1).is_err());
    }

    #[test]
    fn bounds() {
        let t = tree(&[1.0, 4.0, 9.0]);
        assert_eq!(t.upper_bound(5.0).unwrap().0, 4.0);
        assert_eq!(t.upper_bound(0.5), None);
        assert_eq!(t.upper_bound(9.0).unwrap().0, 9.0);
        assert_eq!(t.lower_bound(5.0).unwrap().0, 9.0);
        assert_eq!(t.lower_bound(10.0), None);
        assert_eq!(t.lower_bound(1.0).unwrap().0, 1.0);
    }

    #[test]
    fn furthest_examples() {
        let t = tree(&[1.0, 4.0, 9.0]);
        let f = t.furthest(&[5.0]).unwrap();
        assert_eq!((f.value, f.distance), (1.0, 4.0));
        let f = t.furthest(&[0.0, 10.0]).unwrap();
        assert_eq!((f.value, f.distance), (4.0, 4.0));
        let f = tree(&[3.0]).furthest(&[]).unwrap();
        assert_eq!(f.value, 3.0);
        assert!(Ordered1D::new().furthest(&[1.0]).is_none());
    }

    #[test]
    fn furthest_prefers_smallest_id_on_equal_values() {
        let mut t = Ordered1D::new();
        t.add(0.0, 5).unwrap();
        t.add(0.0, 2).unwrap();
        t.add(3.0, 1).unwrap();
        let f = t.furthest(&[3.0]).unwrap();
        assert_eq!((f.value, f.id), (0.0, 2));
    }

    #[test]
    fn furthest_issues_linear_number_of_queries() {
        let t = tree(&(0..1000).map(|i| i as f64 * 0.37).collect::<Vec<_>>());
        for m in 1..9 {
            let centers: Vec<f64> = (0..m).map(|i| i as f64 * 40.0).collect();
            let before = t.primitive_ops();
            t.furthest(&centers).unwrap();
            assert!(t.primitive_ops() - before <= 2 * m as u64 + 1);
        }
    }

    proptest! {
        #[test]
        fn furthest_matches_linear_scan(
            values in prop::collection::vec(-50i32..50, 1..60),
            centers in prop::collection::vec(-60i32..60, 0..8),
        ) {
            // small integer grid to force ties
            let t = tree(&values.iter().map(|&v| v as f64 * 0.5).collect::<Vec<_>>());
            let c: Vec<f64> = centers.iter().map(|&v| v as f64 * 0.5).collect();
            let f = t.furthest(&c).unwrap();
            let (bv, bid, bd) = brute(&t, &c).unwrap();
            prop_assert_eq!(f.distance, bd);
            prop_assert_eq!((f.value, f.id), (bv, bid));
        }

        #[test]
        fn add_remove_round_trip(
            values in prop::collection::vec(-100.0..100.0f64, 1..40),
            extra in -100.0..100.0f64,
            q in -120.0..120.0f64,
        ) {
            let mut t = tree(&values);
            let before = (t.upper_bound(q), t.lower_bound(q), t.furthest(&[q]));
            t.add(extra, 10_000).unwrap();
            t.remove(extra, 10_000).unwrap();
            prop_assert_eq!(before, (t.upper_bound(q), t.lower_bound(q), t.furthest(&[q])));
        }
    }
}
