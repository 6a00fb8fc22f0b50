//! Distances evaluated on available coordinates, and clustering costs.
//!
//! Note that `dist` between points with different availability patterns does
//! not satisfy the triangle inequality.

use rayon::prelude::*;

use crate::error::{input, Error, Result};
use crate::point::{CenterSet, Coord, Dataset, MissingPoint, WeightedCoreset};

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}

/// Squared distance over the available coordinates of `x`. No dimension check.
#[inline]
pub fn dist_sq_unchecked(x: &[Coord], c: &[f64]) -> f64 {
    let mut s = 0.0;
    for (xi, ci) in x.iter().zip(c) {
        if let Some(v) = xi {
            let t = v - ci;
            s += t * t;
        }
    }
    s
}

/// Plain Euclidean distance between complete vectors of equal length.
#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Distance from `x` to a complete point `c`, ignoring the missing
/// coordinates of `x`.
pub fn dist(x: &MissingPoint, c: &[f64]) -> Result<f64> {
    check_dim(x.dim(), c.len())?;
    Ok(dist_sq_unchecked(&x.coords, c).sqrt())
}

/// Distance between two points with missing values, over the coordinates
/// available in both.
pub fn dist_points(x: &MissingPoint, y: &MissingPoint) -> Result<f64> {
    check_dim(x.dim(), y.dim())?;
    let s: f64 = x
        .coords
        .iter()
        .zip(&y.coords)
        .filter_map(|(a, b)| Some((a.as_ref()? - b.as_ref()?).powi(2)))
        .sum();
    Ok(s.sqrt())
}

/// The I-induced distance: Euclidean distance on the coordinates in `subset`.
/// Every index in `subset` must be available in `x`.
pub fn dist_restricted(x: &MissingPoint, c: &[f64], subset: &[usize]) -> Result<f64> {
    check_dim(x.dim(), c.len())?;
    let mut s = 0.0;
    for &i in subset {
        if i >= x.dim() {
            return input(format!("coordinate {i} out of range for dimension {}", x.dim()));
        }
        match x.coords[i] {
            Some(v) => s += (v - c[i]) * (v - c[i]),
            None => return input(format!("coordinate {i} is missing in point {}", x.id)),
        }
    }
    Ok(s.sqrt())
}

/// Index of the nearest center (lowest index on ties) and the squared distance.
#[inline]
pub fn nearest_sq(x: &[Coord], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centers.iter().enumerate() {
        let d = dist_sq_unchecked(x, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// dist(x, C)^z from a squared distance.
#[inline]
pub fn pow_z(dist_sq: f64, z: f64) -> f64 {
    if z == 2.0 {
        dist_sq
    } else if z == 1.0 {
        dist_sq.sqrt()
    } else {
        dist_sq.powf(z / 2.0)
    }
}

/// dist(x, C) for a center set.
pub fn dist_to_centers(x: &MissingPoint, centers: &CenterSet) -> Result<f64> {
    check_dim(x.dim(), centers.d())?;
    Ok(nearest_sq(&x.coords, centers.centers()).1.sqrt())
}

/// cost_z(X, C) = sum over x of dist(x, C)^z.
pub fn cost(data: &Dataset, centers: &CenterSet, z: f64) -> Result<f64> {
    check_dim(data.d(), centers.d())?;
    let terms: Vec<f64> = data
        .points()
        .par_iter()
        .map(|p| pow_z(nearest_sq(&p.coords, centers.centers()).1, z))
        .collect();
    Ok(compensated_sum(terms))
}

/// Weighted cost of a coreset: sum over entries of w * dist(x, C)^z.
pub fn cost_weighted(
    data: &Dataset,
    coreset: &WeightedCoreset,
    centers: &CenterSet,
    z: f64,
) -> Result<f64> {
    check_dim(data.d(), centers.d())?;
    if coreset.source_n() != data.n() {
        return input("coreset does not belong to this dataset");
    }
    let terms: Vec<f64> = coreset
        .entries()
        .par_iter()
        .map(|e| {
            e.weight * pow_z(nearest_sq(&data.point(e.id).coords, centers.centers()).1, z)
        })
        .collect();
    Ok(compensated_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mp(coords: &[Option<f64>]) -> MissingPoint {
        MissingPoint::new(0, coords.to_vec())
    }

    #[test]
    fn dist_skips_missing_coordinates() {
        assert_eq!(dist(&mp(&[Some(1.0), None, Some(3.0)]), &[0.0, 5.0, 3.0]).unwrap(), 1.0);
        assert_eq!(dist(&mp(&[None, None, Some(2.0)]), &[9.0, 9.0, 2.0]).unwrap(), 0.0);
        let x = mp(&[Some(1.0), Some(2.0), None]);
        let y = mp(&[None, Some(5.0), Some(7.0)]);
        assert_eq!(dist_points(&x, &y).unwrap(), 3.0);
        assert!(dist(&x, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn restricted_distance_examples() {
        let x = MissingPoint::complete(0, &[1.0, 2.0, 3.0]);
        let c = [1.0, 0.0, 0.0];
        assert_eq!(dist_restricted(&x, &c, &[0]).unwrap(), 0.0);
        assert_eq!(dist_restricted(&x, &c, &[1, 2]).unwrap(), 13f64.sqrt());
        let y = mp(&[Some(1.0), None, Some(3.0)]);
        assert_eq!(dist_restricted(&y, &[0.0, 0.0, 0.0], &[0, 2]).unwrap(), 10f64.sqrt());
        assert!(dist_restricted(&y, &[0.0, 0.0, 0.0], &[1]).is_err());
    }

    #[test]
    fn cost_examples() {
        let x = Dataset::from_complete(&[vec![0.0], vec![2.0]]).unwrap();
        let c0 = CenterSet::new(vec![vec![0.0]]).unwrap();
        let c02 = CenterSet::new(vec![vec![0.0], vec![2.0]]).unwrap();
        assert_eq!(cost(&x, &c0, 2.0).unwrap(), 4.0);
        assert_eq!(cost(&x, &c02, 2.0).unwrap(), 0.0);

        let s = WeightedCoreset::new(
            vec![crate::point::CoresetEntry { id: 1, weight: 3.0 }],
            &x,
        )
        .unwrap();
        assert_eq!(cost_weighted(&x, &s, &c0, 1.0).unwrap(), 6.0);
    }

    #[test]
    fn compensated_sum_beats_naive_on_cancellation() {
        let v = [1e16, 1.0, -1e16];
        assert_eq!(compensated_sum(v), 1.0);
    }

    fn coord() -> impl Strategy<Value = Option<f64>> {
        prop_oneof![1 => Just(None), 3 => (-10.0..10.0f64).prop_map(Some)]
    }

    proptest! {
        #[test]
        fn point_distance_is_symmetric(
            a in prop::collection::vec(coord(), 4),
            b in prop::collection::vec(coord(), 4),
        ) {
            let x = mp(&a);
            let y = mp(&b);
            prop_assert_eq!(dist_points(&x, &y).unwrap(), dist_points(&y, &x).unwrap());
            prop_assert_eq!(dist_points(&x, &x).unwrap(), 0.0);
        }

        #[test]
        fn restricting_never_increases_distance(
            a in prop::collection::vec(coord(), 5),
            c in prop::collection::vec(-10.0..10.0f64, 5),
            mask in prop::collection::vec(any::<bool>(), 5),
        ) {
            let x = mp(&a);
            let subset: Vec<usize> = x.available().filter(|&i| mask[i]).collect();
            prop_assert!(dist_restricted(&x, &c, &subset).unwrap() <= dist(&x, &c).unwrap() + 1e-12);
        }

        #[test]
        fn unit_coreset_cost_equals_dataset_cost_and_more_centers_help(
            rows in prop::collection::vec(prop::collection::vec(coord(), 3), 1..20),
            centers in prop::collection::vec(prop::collection::vec(-10.0..10.0f64, 3), 1..4),
            extra in prop::collection::vec(-10.0..10.0f64, 3),
            z in prop_oneof![Just(1.0), Just(2.0), Just(3.0)],
        ) {
            let rows: Vec<Vec<Option<f64>>> = rows
                .into_iter()
                .map(|mut r| { if r.iter().all(Option::is_none) { r[0] = Some(0.0); } r })
                .collect();
            let ds = Dataset::from_rows(rows).unwrap();
            let c = CenterSet::new(centers.clone()).unwrap();
            let full = cost(&ds, &c, z).unwrap();
            let unit = cost_weighted(&ds, &WeightedCoreset::unit(&ds), &c, z).unwrap();
            prop_assert_eq!(full, unit);
            let mut more = centers;
            more.push(extra);
            let c2 = CenterSet::new(more).unwrap();
            prop_assert!(cost(&ds, &c2, z).unwrap() <= full);
        }
    }
}
