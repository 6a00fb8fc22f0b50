use crate::distance::euclidean;
use crate::error::{input, Result};

/// Picks the next Gonzalez point given each point's distance to the current
/// selection.
pub trait FurthestOracle {
    fn pick(&self, points: &[Vec<f64>], dist_to_selected: &[f64]) -> usize;
}

/// Exact argmax; ties go to the lowest index.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactOracle;

impl FurthestOracle for ExactOracle {
    fn pick(&self, _points: &[Vec<f64>], dist_to_selected: &[f64]) -> usize {
        let mut best = 0;
        for (i, &d) in dist_to_selected.iter().enumerate() {
            if d > dist_to_selected[best] {
                best = i;
            }
        }
        best
    }
}

/// Farthest-first traversal truncated at k + 1 points, starting from index 0.
///
/// Each pick must be a `c`-approximate furthest point; a pick that violates
/// this is reported as an error. Once every point is at distance zero from
/// the selection, the lowest unselected index is taken.
pub fn static_gonzalez(
    points: &[Vec<f64>],
    k: usize,
    oracle: &dyn FurthestOracle,
    c: f64,
) -> Result<Vec<usize>> {
    if points.is_empty() {
        return input("static Gonzalez needs at least one point");
    }
    if points.len() <= k + 1 {
        return Ok((0..points.len()).collect());
    }
    let mut selected = vec![0];
    let mut dist: Vec<f64> = points.iter().map(|p| euclidean(p, &points[0])).collect();
    while selected.len() < k + 1 {
        let max = dist.iter().copied().fold(0.0, f64::max);
        if max == 0.0 {
            let b = (0..points.len()).find(|i| !selected.contains(i)).expect("more points than picks");
            selected.push(b);
            continue;
        }
        let b = oracle.pick(points, &dist);
        if c * dist[b] < max {
            return input(format!(
                "oracle pick {b} at distance {} is not a {c}-approximation of {max}",
                dist[b]
            ));
        }
        selected.push(b);
        for (d, p) in dist.iter_mut().zip(points) {
            *d = d.min(euclidean(p, &points[b]));
        }
    }
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Worst;
    impl FurthestOracle for Worst {
        fn pick(&self, _: &[Vec<f64>], d: &[f64]) -> usize {
            (0..d.len())
                .filter(|&i| d[i] > 0.0)
                .min_by(|&a, &b| d[a].total_cmp(&d[b]))
                .unwrap()
        }
    }

    #[test]
    fn line_example() {
        let a = vec![vec![0.0], vec![1.0], vec![10.0]];
        assert_eq!(static_gonzalez(&a, 1, &ExactOracle, 1.0).unwrap(), vec![0, 2]);
    }

    #[test]
    fn small_inputs_are_returned_whole() {
        assert_eq!(static_gonzalez(&[vec![3.0, 4.0]], 5, &ExactOracle, 1.0).unwrap(), vec![0]);
        let square = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        assert_eq!(static_gonzalez(&square, 3, &ExactOracle, 1.0).unwrap().len(), 4);
        assert!(static_gonzalez(&[], 1, &ExactOracle, 1.0).is_err());
    }

    #[test]
    fn diagonal_comes_first_on_the_square() {
        let square = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![0.5, 0.5]];
        assert_eq!(static_gonzalez(&square, 3, &ExactOracle, 1.0).unwrap(), vec![0, 3, 1, 2]);
    }

    #[test]
    fn bad_oracle_is_caught() {
        let a = vec![vec![0.0], vec![1.0], vec![10.0], vec![11.0]];
        assert!(static_gonzalez(&a, 1, &Worst, 2.0).is_err());
        assert!(static_gonzalez(&a, 1, &Worst, 11.0).is_ok());
    }

    #[test]
    fn duplicates_fill_by_index() {
        let a = vec![vec![1.0]; 6];
        assert_eq!(static_gonzalez(&a, 2, &ExactOracle, 1.0).unwrap(), vec![0, 1, 2]);
    }
}
