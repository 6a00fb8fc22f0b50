//! Instance generators.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::family::combinations;
use crate::point::{CenterSet, Coord, Dataset, MissingPoint};
use crate::rng::{self, streams};

/// How the far-away points are placed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FarLayout {
    /// Each far point in a random direction from the cube's center, at a
    /// radius uniform in [far_offset, 2 * far_offset].
    #[default]
    Scattered,
    /// All far points in the unit cube with corner (far_offset, ..).
    Blob,
}

/// A dense cluster in the unit cube plus a small share of far-away points,
/// with attributes deleted at random.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub n: usize,
    pub d: usize,
    /// Share of points placed in the far group.
    pub frac_far: f64,
    /// Probability that each attribute is deleted.
    pub delete_frac: f64,
    /// Distance scale of the far points, in cube side lengths.
    pub far_offset: f64,
    pub far_layout: FarLayout,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n: 20_000,
            d: 3,
            frac_far: 0.03,
            delete_frac: 0.25,
            far_offset: 10.0,
            far_layout: FarLayout::Scattered,
        }
    }
}

impl SyntheticSpec {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }
}

pub fn gen_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Dataset> {
    if spec.n == 0 {
        return input("n must be at least 1");
    }
    if spec.d == 0 {
        return input("d must be at least 1");
    }
    if !(0.0..=1.0).contains(&spec.frac_far) {
        return input("frac_far must lie in [0, 1]");
    }
    if !(0.0..1.0).contains(&spec.delete_frac) {
        return input("delete_frac must lie in [0, 1)");
    }
    if !spec.far_offset.is_finite() {
        return input("far_offset must be finite");
    }
    let mut r = rng::substream(seed, streams::GENERATOR);
    let n_far = (spec.frac_far * spec.n as f64).round() as usize;
    let mut rows: Vec<Vec<f64>> = (0..spec.n)
        .map(|i| {
            if i >= n_far {
                return (0..spec.d).map(|_| r.random::<f64>()).collect();
            }
            match spec.far_layout {
                FarLayout::Blob => (0..spec.d).map(|_| spec.far_offset + r.random::<f64>()).collect(),
                FarLayout::Scattered => {
                    let dir: Vec<f64> = (0..spec.d).map(|_| r.sample(StandardNormal)).collect();
                    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                    let radius = spec.far_offset * (1.0 + r.random::<f64>());
                    dir.iter().map(|v| 0.5 + radius * v / norm).collect()
                }
            }
        })
        .collect();
    rows.shuffle(&mut r);

    let rows: Vec<Vec<Coord>> = rows
        .into_iter()
        .map(|row| loop {
            let masked: Vec<Coord> = row
                .iter()
                .map(|&v| (!r.random_bool(spec.delete_frac)).then_some(v))
                .collect();
            if masked.iter().any(Option::is_some) {
                break masked;
            }
        })
        .collect();
    Dataset::from_rows(rows)
}

/// Every point with exactly `j` of `2j` coordinates present, each equal to 1.
pub fn gen_lower_bound(j: usize) -> Result<Dataset> {
    if j == 0 {
        return input("j must be at least 1");
    }
    if j > 12 {
        return input("j above 12 gives more than 2.7 million points");
    }
    let d = 2 * j;
    let pool: Vec<usize> = (0..d).collect();
    let rows = combinations(&pool, j)
        .into_iter()
        .map(|subset| {
            let mut row = vec![None; d];
            for i in subset {
                row[i] = Some(1.0);
            }
            row
        })
        .collect();
    Dataset::from_rows(rows)
}

/// For each available coordinate i of `p`, a center that is 0 in coordinate i
/// and 1 elsewhere.
///
/// On a point set where every coordinate value is 1, these centers are at
/// distance 1 from `p` and at distance 0 from every point whose available
/// coordinates are not a superset of `p`'s.
pub fn adversarial_centers(p: &MissingPoint) -> Result<CenterSet> {
    let d = p.dim();
    CenterSet::new(
        p.available()
            .map(|i| {
                let mut c = vec![1.0; d];
                c[i] = 0.0;
                c
            })
            .collect(),
    )
}

/// One adversarial center set per point of `data`.
pub fn adversarial_collection(data: &Dataset) -> Result<Vec<CenterSet>> {
    data.points().iter().map(adversarial_centers).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::cost;

    #[test]
    fn synthetic_shape() {
        let ds = gen_synthetic(&SyntheticSpec::new(10_000), 4).unwrap();
        assert_eq!((ds.n(), ds.d()), (10_000, 3));
        let f = ds.missing_fraction();
        assert!((f - 0.25).abs() < 0.02, "{f}");
        assert!(ds.j() <= 2);
        let far = ds
            .points()
            .iter()
            .filter(|p| p.coords.iter().flatten().any(|&v| !(0.0..=1.0).contains(&v)))
            .count();
        assert!(far <= 300 && far > 250, "{far}");
        let blob = gen_synthetic(
            &SyntheticSpec {
                far_layout: FarLayout::Blob,
                ..SyntheticSpec::new(1000)
            },
            4,
        )
        .unwrap();
        let far = blob
            .points()
            .iter()
            .filter(|p| p.coords.iter().flatten().any(|&v| v >= 10.0))
            .count();
        assert_eq!(far, 30);
    }

    #[test]
    fn synthetic_edge_cases() {
        let complete = gen_synthetic(
            &SyntheticSpec {
                delete_frac: 0.0,
                ..SyntheticSpec::new(50)
            },
            1,
        )
        .unwrap();
        assert_eq!(complete.j(), 0);
        let one = gen_synthetic(
            &SyntheticSpec {
                delete_frac: 0.9,
                ..SyntheticSpec::new(1)
            },
            2,
        )
        .unwrap();
        assert_eq!(one.n(), 1);
        assert!(gen_synthetic(&SyntheticSpec::new(0), 0).is_err());
        assert_eq!(
            gen_synthetic(&SyntheticSpec::new(40), 9).unwrap(),
            gen_synthetic(&SyntheticSpec::new(40), 9).unwrap()
        );
    }

    #[test]
    fn lower_bound_points() {
        let one = gen_lower_bound(1).unwrap();
        assert_eq!(one.d(), 2);
        assert_eq!(one.point(0).coords, vec![Some(1.0), None]);
        assert_eq!(one.point(1).coords, vec![None, Some(1.0)]);

        let two = gen_lower_bound(2).unwrap();
        assert_eq!(two.n(), 6);
        assert!(two
            .points()
            .iter()
            .any(|p| p.coords == vec![Some(1.0), None, Some(1.0), None]));
        assert_eq!(gen_lower_bound(3).unwrap().n(), 20);
        assert!(gen_lower_bound(0).is_err());
    }

    #[test]
    fn adversarial_centers_isolate_one_point() {
        let ds = gen_lower_bound(2).unwrap();
        for p in ds.points() {
            let c = adversarial_centers(p).unwrap();
            assert_eq!(c.k(), 2);
            assert_eq!(cost(&ds, &c, 2.0).unwrap(), 1.0);
            for q in ds.points() {
                let d = crate::distance::dist_to_centers(q, &c).unwrap();
                assert_eq!(d, if q.id == p.id { 1.0 } else { 0.0 });
            }
        }
    }
}
