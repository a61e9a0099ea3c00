//! Multi-dimensional monotone sequences: longest τ-monotone chains, height-class
//! antichains, the product bound check and the extremal point-set construction.

use std::collections::{BTreeMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pattern::{Sign, SignFunction};

/// Points in `Z^s` whose `|Z| * s` coordinates are pairwise distinct.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(transparent)]
pub struct PointSet {
    #[serde(skip)]
    dim: usize,
    points: Vec<Vec<i64>>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPointSet("dimension must be positive".into()));
        }
        let mut seen = HashSet::with_capacity(dim * points.len());
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            for &c in p {
                if !seen.insert(c) {
                    return Err(Error::InvalidPointSet(format!("coordinate {c} repeats")));
                }
            }
        }
        Ok(PointSet { dim, points })
    }

    /// Parses a JSON array of integer arrays.
    pub fn from_json(text: &str) -> Result<Self> {
        let points: Vec<Vec<i64>> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let dim = points.first().map_or(1, Vec::len);
        PointSet::new(dim, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn subset(&self, indices: &[usize]) -> PointSet {
        PointSet {
            dim: self.dim,
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }
}

/// `p ≺_τ q`: every coordinate moves strictly in the direction of `τ`.
pub fn precedes(p: &[i64], q: &[i64], tau: &SignFunction) -> bool {
    p.iter().zip(q).zip(tau.signs()).all(|((&a, &b), &s)| match s {
        Sign::Plus => a < b,
        Sign::Minus => a > b,
    })
}

fn check_dim(z: &PointSet, tau: &SignFunction) -> Result<()> {
    if tau.len() != z.dim() {
        return Err(Error::DimensionMismatch {
            expected: z.dim(),
            found: tau.len(),
        });
    }
    Ok(())
}

/// Heights (longest `≺_τ`-chain ending at each point) and chain predecessors.
fn heights(z: &PointSet, tau: &SignFunction) -> (Vec<usize>, Vec<Option<usize>>) {
    let mut order: Vec<usize> = (0..z.len()).collect();
    // predecessors always have a smaller first coordinate since τ(1) = +
    order.sort_by_key(|&i| z.points[i][0]);
    let mut height = vec![1; z.len()];
    let mut prev = vec![None; z.len()];
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[..k] {
            if height[j] + 1 > height[i] && precedes(&z.points[j], &z.points[i], tau) {
                height[i] = height[j] + 1;
                prev[i] = Some(j);
            }
        }
    }
    (height, prev)
}

/// Longest τ-monotone sequence, as point indices in sequence order.
pub fn longest_monotone(z: &PointSet, tau: &SignFunction) -> Result<Vec<usize>> {
    check_dim(z, tau)?;
    if z.is_empty() {
        return Ok(Vec::new());
    }
    let (height, prev) = heights(z, tau);
    let mut end = 0;
    for i in 1..z.len() {
        if height[i] > height[end] {
            end = i;
        }
    }
    let mut seq = vec![end];
    while let Some(p) = prev[*seq.last().unwrap()] {
        seq.push(p);
    }
    seq.reverse();
    Ok(seq)
}

/// Largest height class of `≺_τ` (lowest height on ties); an antichain of size
/// at least `⌈|Z| / m⌉` where `m` is the longest chain length.
pub fn antichain_extract(z: &PointSet, tau: &SignFunction) -> Result<Vec<usize>> {
    Ok(height_classes(z, tau)?
        .into_iter()
        .fold(Vec::new(), |best, class| if class.len() > best.len() { class } else { best }))
}

/// Points grouped by height; there are exactly as many classes as the longest chain.
pub fn height_classes(z: &PointSet, tau: &SignFunction) -> Result<Vec<Vec<usize>>> {
    check_dim(z, tau)?;
    let (height, _) = heights(z, tau);
    let max = height.iter().copied().max().unwrap_or(0);
    let mut classes = vec![Vec::new(); max];
    for (i, &h) in height.iter().enumerate() {
        classes[h - 1].push(i);
    }
    Ok(classes)
}

#[derive(Clone, Debug, Serialize)]
pub struct EsCheck {
    pub holds: bool,
    pub size: usize,
    /// Longest monotone length per sign function.
    pub longest: BTreeMap<SignFunction, usize>,
    pub product: String,
}

/// Verifies `|Z| <= Π_τ m_τ` with `m_τ` the exact longest monotone lengths.
pub fn es_upper_check(z: &PointSet) -> EsCheck {
    let longest: BTreeMap<SignFunction, usize> = SignFunction::all(z.dim())
        .into_iter()
        .map(|tau| {
            let m = longest_monotone(z, &tau).expect("dimension matches").len();
            (tau, m)
        })
        .collect();
    let product: BigUint = longest.values().map(|&m| BigUint::from(m)).product();
    EsCheck {
        holds: BigUint::from(z.len()) <= product,
        size: z.len(),
        longest,
        product: product.to_string(),
    }
}

/// Exact coordinates `z(a)_j = Σ_i N^i τ_i(j) a_i` over all index tuples `a`.
///
/// `N` is the smallest integer at least `3 max m_τ`. Tuples are enumerated with
/// the first sign function's index varying slowest.
pub(crate) fn construct_coordinates(s: usize, caps: &BTreeMap<SignFunction, u64>) -> Result<Vec<Vec<BigInt>>> {
    let taus = SignFunction::all(s);
    let ms = taus
        .iter()
        .map(|t| caps.get(t).copied().ok_or_else(|| Error::MissingSignFunction(t.to_string())))
        .collect::<Result<Vec<u64>>>()?;
    if ms.contains(&0) {
        return Err(Error::InvalidPointSet("caps must be positive".into()));
    }
    let scale = BigInt::from(3 * ms.iter().copied().max().unwrap_or(1));
    let powers: Vec<BigInt> = (1..=taus.len()).map(|i| scale.pow(i as u32)).collect();

    let mut out = Vec::new();
    let mut a = vec![1u64; taus.len()];
    loop {
        let point = (0..s)
            .map(|j| {
                taus.iter()
                    .zip(&powers)
                    .zip(&a)
                    .map(|((t, pw), &ai)| pw * BigInt::from(t.get(j).value()) * BigInt::from(ai))
                    .sum()
            })
            .collect();
        out.push(point);
        // odometer with the last index fastest
        let mut k = taus.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if a[k] < ms[k] {
                a[k] += 1;
                break;
            }
            a[k] = 1;
        }
    }
}

/// The extremal point set with longest τ-monotone length exactly `caps[τ]`.
///
/// Coordinates are exact; an error is returned if any does not fit in `i64`.
pub fn construct_point_set(s: usize, caps: &BTreeMap<SignFunction, u64>) -> Result<PointSet> {
    let coords = construct_coordinates(s, caps)?;
    let points = coords
        .into_iter()
        .map(|p| p.into_iter().map(|c| c.to_i64().ok_or(Error::Overflow)).collect())
        .collect::<Result<Vec<Vec<i64>>>>()?;
    PointSet::new(s, points)
}

/// Product of caps, in arbitrary precision.
pub fn cap_product(caps: &BTreeMap<SignFunction, u64>) -> BigUint {
    caps.values().fold(BigUint::one(), |acc, &m| acc * m)
}

/// Random point set: a shuffled permutation of `1..=n*s` dealt into coordinates.
pub fn random_point_set(n: usize, s: usize, seed: u64) -> Result<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vals: Vec<i64> = (1..=(n * s) as i64).collect();
    vals.shuffle(&mut rng);
    PointSet::new(s, vals.chunks(s).map(|c| c.to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau(s: &str) -> SignFunction {
        s.parse().unwrap()
    }

    fn caps(entries: &[(&str, u64)]) -> BTreeMap<SignFunction, u64> {
        entries.iter().map(|&(t, m)| (tau(t), m)).collect()
    }

    /// Exhaustive longest chain over all subsets, for tiny inputs.
    fn brute_longest(z: &PointSet, t: &SignFunction) -> usize {
        let n = z.len();
        let mut best = 0;
        for mask in 1u32..1 << n {
            let mut idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            idx.sort_by_key(|&i| z.points()[i][0]);
            if idx.windows(2).all(|w| precedes(&z.points()[w[0]], &z.points()[w[1]], t)) {
                best = best.max(idx.len());
            }
        }
        best
    }

    #[test]
    fn classical_lis() {
        let z = PointSet::new(1, vec![vec![3], vec![1], vec![2]]).unwrap();
        assert_eq!(longest_monotone(&z, &tau("+")).unwrap(), vec![1, 2, 0]);
        let z = PointSet::new(2, vec![vec![1, 30], vec![2, 10], vec![3, 20]]).unwrap();
        assert_eq!(longest_monotone(&z, &tau("++")).unwrap(), vec![1, 2]);
    }

    #[test]
    fn monotone_matches_brute_force() {
        for seed in 0..60 {
            let s = 1 + (seed as usize % 3);
            let z = random_point_set(9, s, seed).unwrap();
            for t in SignFunction::all(s) {
                let seq = longest_monotone(&z, &t).unwrap();
                assert_eq!(seq.len(), brute_longest(&z, &t));
                assert!(seq.windows(2).all(|w| precedes(&z.points()[w[0]], &z.points()[w[1]], &t)));
            }
        }
    }

    #[test]
    fn reversed_sequence_is_negated_monotone() {
        for seed in 0..20 {
            let z = random_point_set(30, 3, seed).unwrap();
            for t in SignFunction::all(3) {
                let seq = longest_monotone(&z, &t).unwrap();
                let neg: Vec<Sign> = t.signs().iter().map(|s| s.flip()).collect();
                let rev: Vec<usize> = seq.iter().rev().copied().collect();
                assert!(rev.windows(2).all(|w| z.points()[w[0]]
                    .iter()
                    .zip(&z.points()[w[1]])
                    .zip(&neg)
                    .all(|((&a, &b), &s)| if s == Sign::Plus { a < b } else { a > b })));
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let z = random_point_set(4, 2, 0).unwrap();
        assert!(matches!(longest_monotone(&z, &tau("+++")), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn point_set_validation() {
        assert!(PointSet::new(2, vec![vec![1, 2], vec![2, 3]]).is_err());
        assert!(PointSet::new(2, vec![vec![1]]).is_err());
        assert_eq!(PointSet::from_json("[[1,5],[2,4]]").unwrap().len(), 2);
    }

    #[test]
    fn construction_examples() {
        let z = construct_point_set(1, &caps(&[("+", 5)])).unwrap();
        assert_eq!(z.len(), 5);
        assert_eq!(longest_monotone(&z, &tau("+")).unwrap().len(), 5);

        let c = caps(&[("++", 2), ("+-", 3)]);
        let z = construct_point_set(2, &c).unwrap();
        assert_eq!(z.len(), 6);
        assert_eq!(longest_monotone(&z, &tau("++")).unwrap().len(), 2);
        assert_eq!(longest_monotone(&z, &tau("+-")).unwrap().len(), 3);

        let c: BTreeMap<_, _> = SignFunction::all(3).into_iter().map(|t| (t, 2)).collect();
        assert_eq!(construct_point_set(3, &c).unwrap().len(), 16);
    }

    #[test]
    fn construction_missing_cap() {
        assert_eq!(
            construct_point_set(2, &caps(&[("++", 2)])),
            Err(Error::MissingSignFunction("+-".into()))
        );
    }

    #[test]
    fn construction_overflow_is_an_error() {
        let c: BTreeMap<_, _> = SignFunction::all(7).into_iter().map(|t| (t, 1)).collect();
        // 3^64 exceeds i64
        assert!(matches!(construct_point_set(7, &c), Err(Error::Overflow)));
        assert_eq!(construct_coordinates(7, &c).unwrap().len(), 1);
    }

    #[test]
    fn antichain_examples() {
        let chain = PointSet::new(2, (1..=6).map(|k| vec![k, 100 + k]).collect()).unwrap();
        assert_eq!(antichain_extract(&chain, &tau("++")).unwrap().len(), 1);

        let k = 6i64;
        let grid: Vec<Vec<i64>> = (0..k)
            .flat_map(|i| (0..k).map(move |j| vec![(i * k + j) * 2, (j * k + i) * 2 + 1]))
            .collect();
        let z = PointSet::new(2, grid).unwrap();
        let anti = antichain_extract(&z, &tau("++")).unwrap();
        assert!(anti.len() >= k as usize);
    }

    #[test]
    fn antichains_are_incomparable_and_large() {
        for seed in 0..40 {
            let s = 1 + seed as usize % 3;
            let n = 20 + (seed as usize * 37) % 180;
            let z = random_point_set(n, s, seed).unwrap();
            for t in SignFunction::all(s) {
                let anti = antichain_extract(&z, &t).unwrap();
                let m = longest_monotone(&z, &t).unwrap().len();
                assert!(anti.len() >= n.div_ceil(m));
                for &a in &anti {
                    for &b in &anti {
                        assert!(!precedes(&z.points()[a], &z.points()[b], &t));
                    }
                }
                assert_eq!(height_classes(&z, &t).unwrap().len(), m);
            }
        }
    }

    #[test]
    fn exactly_one_order_relates_each_pair() {
        for seed in 0..20 {
            let s = 1 + seed as usize % 4;
            let z = random_point_set(25, s, seed).unwrap();
            let taus = SignFunction::all(s);
            for i in 0..z.len() {
                for j in i + 1..z.len() {
                    let (p, q) = (&z.points()[i], &z.points()[j]);
                    let related = taus
                        .iter()
                        .filter(|t| precedes(p, q, t) || precedes(q, p, t))
                        .count();
                    assert_eq!(related, 1);
                }
            }
        }
    }

    #[test]
    fn upper_check_examples() {
        let single = PointSet::new(2, vec![vec![1, 2]]).unwrap();
        assert!(es_upper_check(&single).holds);
        let c = caps(&[("++", 2), ("+-", 3)]);
        let z = construct_point_set(2, &c).unwrap();
        let check = es_upper_check(&z);
        assert!(check.holds);
        assert_eq!(check.product, "6");
    }
}
