//! Randomized (j, k, d)-families of coordinate subsets.
//!
//! A family covers every disjoint pair (J, K) with |J| = j, |K| = k when some
//! member contains K and avoids J. Each member is drawn by keeping every
//! coordinate independently with probability k / (j + k).

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::rng::{self, streams};

pub const DEFAULT_SIZE_CAP: usize = 512;
pub const DEFAULT_PAIR_BUDGET: u128 = 10_000_000;

/// Bitmask over coordinates 0..d.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoordMask(Vec<u64>);

impl CoordMask {
    pub fn empty(d: usize) -> Self {
        Self(vec![0; d.div_ceil(64).max(1)])
    }

    pub fn from_indices(d: usize, indices: &[usize]) -> Self {
        let mut m = Self::empty(d);
        for &i in indices {
            m.insert(i);
        }
        m
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == 0)
    }

    pub fn is_superset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

/// A collection of coordinate subsets built for parameters (d, j, k).
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateFamily {
    d: usize,
    j: usize,
    k: usize,
    subsets: Vec<Vec<usize>>,
    masks: Vec<CoordMask>,
    verified: bool,
}

/// Outcome of a verification run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub valid: bool,
    /// First uncovered (J, K) found, in enumeration order.
    pub counterexample: Option<(Vec<usize>, Vec<usize>)>,
    pub pairs_checked: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive { budget: u128 },
    Sampled { trials: usize, seed: u64 },
}

impl VerifyMode {
    pub fn exhaustive() -> Self {
        Self::Exhaustive {
            budget: DEFAULT_PAIR_BUDGET,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyFile {
    d: usize,
    j: usize,
    k: usize,
    subsets: Vec<Vec<usize>>,
}

/// Size of the randomized construction:
/// ceil((j+k)^(j+k+1) / (j^j k^k) * 2 ln d), at least 1.
pub fn theoretical_size(d: usize, j: usize, k: usize) -> usize {
    let xlnx = |x: usize| if x == 0 { 0.0 } else { x as f64 * (x as f64).ln() };
    let s = j + k;
    let log_ratio = (s + 1) as f64 * (s as f64).ln() - xlnx(j) - xlnx(k);
    let t = log_ratio.exp() * 2.0 * (d as f64).ln();
    (t.ceil() as usize).max(1)
}

/// Builds a family with the default size cap.
pub fn build_family(
    d: usize,
    j: usize,
    k: usize,
    size_override: Option<usize>,
    seed: u64,
) -> Result<CoordinateFamily> {
    build_family_capped(d, j, k, size_override, seed, DEFAULT_SIZE_CAP)
}

/// Draws `t` random subsets (t = `size_override`, else the theoretical size
/// capped at `cap`). Duplicates and empty subsets are dropped, so the result
/// may hold fewer than `t` members.
pub fn build_family_capped(
    d: usize,
    j: usize,
    k: usize,
    size_override: Option<usize>,
    seed: u64,
    cap: usize,
) -> Result<CoordinateFamily> {
    if d == 0 {
        return input("family dimension d must be positive");
    }
    if k == 0 {
        return input("family parameter k must be positive");
    }
    if size_override == Some(0) {
        return input("family size must be positive");
    }
    let t = size_override.unwrap_or_else(|| theoretical_size(d, j, k).min(cap.max(1)));
    let p = k as f64 / (j + k) as f64;
    let mut rng = rng::substream(seed, streams::FAMILY);
    let mut subsets = Vec::with_capacity(t);
    for _ in 0..t {
        let s: Vec<usize> = (0..d).filter(|_| rng.random_bool(p)).collect();
        subsets.push(s);
    }
    CoordinateFamily::from_subsets(d, j, k, subsets)
}

impl CoordinateFamily {
    /// Wraps explicit subsets, sorting each, discarding empties and
    /// duplicates (first occurrence kept).
    pub fn from_subsets(d: usize, j: usize, k: usize, subsets: Vec<Vec<usize>>) -> Result<Self> {
        let mut fam = Self {
            d,
            j,
            k,
            subsets: Vec::new(),
            masks: Vec::new(),
            verified: false,
        };
        for s in subsets {
            fam.add_subset(s)?;
        }
        Ok(fam)
    }

    /// Adds a subset; returns false when it was empty or already present.
    pub fn add_subset(&mut self, mut subset: Vec<usize>) -> Result<bool> {
        subset.sort_unstable();
        subset.dedup();
        if let Some(&bad) = subset.iter().find(|&&i| i >= self.d) {
            return input(format!("coordinate {bad} out of range for d = {}", self.d));
        }
        if subset.is_empty() || self.subsets.contains(&subset) {
            return Ok(false);
        }
        self.masks.push(CoordMask::from_indices(self.d, &subset));
        self.subsets.push(subset);
        Ok(true)
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn verified(&self) -> bool {
        self.verified
    }

    /// Runs `verify_family` and records a positive outcome.
    pub fn verify(&mut self, mode: VerifyMode) -> Result<Verification> {
        let v = verify_family(self, mode)?;
        self.verified = v.valid;
        Ok(v)
    }

    fn covers(&self, j_mask: &CoordMask, k_mask: &CoordMask) -> bool {
        self.masks
            .iter()
            .any(|m| m.is_disjoint(j_mask) && m.is_superset(k_mask))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&FamilyFile {
            d: self.d,
            j: self.j,
            k: self.k,
            subsets: self.subsets.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: FamilyFile = serde_json::from_str(text)?;
        Self::from_subsets(f.d, f.j, f.k, f.subsets)
    }
}

pub(crate) fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All r-subsets of `pool` in lexicographic order.
pub(crate) fn combinations(pool: &[usize], r: usize) -> Vec<Vec<usize>> {
    let n = pool.len();
    if r > n {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut out = Vec::new();
    loop {
        out.push(idx.iter().map(|&i| pool[i]).collect());
        let mut pos = r;
        while pos > 0 && idx[pos - 1] == pos - 1 + n - r {
            pos -= 1;
        }
        if pos == 0 {
            return out;
        }
        idx[pos - 1] += 1;
        for q in pos..r {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Checks the covering property of `family` for its own (d, j, k).
///
/// Pairs that cannot exist (j + k > d) are vacuously covered.
pub fn verify_family(family: &CoordinateFamily, mode: VerifyMode) -> Result<Verification> {
    let (d, j, k) = (family.d, family.j, family.k);
    if j + k > d {
        return Ok(Verification {
            valid: true,
            counterexample: None,
            pairs_checked: 0,
        });
    }
    match mode {
        VerifyMode::Exhaustive { budget } => {
            let pairs = binomial(d, j) * binomial(d - j, k);
            if pairs > budget {
                return Err(Error::BudgetExceeded { pairs, budget });
            }
            let all: Vec<usize> = (0..d).collect();
            let js = combinations(&all, j);
            let found = js.par_iter().find_map_first(|jset| {
                let j_mask = CoordMask::from_indices(d, jset);
                let rest: Vec<usize> = all.iter().copied().filter(|i| !jset.contains(i)).collect();
                combinations(&rest, k).into_iter().find_map(|kset| {
                    let k_mask = CoordMask::from_indices(d, &kset);
                    (!family.covers(&j_mask, &k_mask)).then(|| (jset.clone(), kset))
                })
            });
            Ok(Verification {
                valid: found.is_none(),
                counterexample: found,
                pairs_checked: pairs,
            })
        }
        VerifyMode::Sampled { trials, seed } => {
            let mut rng = rng::substream(seed, "verify");
            let mut perm: Vec<usize> = (0..d).collect();
            for t in 0..trials {
                // partial Fisher-Yates for the first j + k slots
                for i in 0..j + k {
                    let r = rng.random_range(i..d);
                    perm.swap(i, r);
                }
                let mut jset = perm[..j].to_vec();
                let mut kset = perm[j..j + k].to_vec();
                jset.sort_unstable();
                kset.sort_unstable();
                let j_mask = CoordMask::from_indices(d, &jset);
                let k_mask = CoordMask::from_indices(d, &kset);
                if !family.covers(&j_mask, &k_mask) {
                    return Ok(Verification {
                        valid: false,
                        counterexample: Some((jset, kset)),
                        pairs_checked: t as u128 + 1,
                    });
                }
            }
            Ok(Verification {
                valid: true,
                counterexample: None,
                pairs_checked: trials as u128,
            })
        }
    }
}
