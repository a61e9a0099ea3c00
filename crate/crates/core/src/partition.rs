//! Compositions of `r`, the interval-refinement order, maximal chains and the
//! clique-budget bound formulas evaluated over them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pattern::{patterns_of, Pattern};

/// An ordered partition (composition) of `r` into positive parts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OrderedPartition(Vec<usize>);

impl OrderedPartition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        Ok(OrderedPartition(parts))
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<usize>) -> Self {
        debug_assert!(!parts.is_empty() && !parts.contains(&0));
        OrderedPartition(parts)
    }

    /// `(r)`, the single-part partition.
    pub fn whole(r: usize) -> Self {
        OrderedPartition(vec![r])
    }

    /// `(1, ..., 1)`.
    pub fn singletons(r: usize) -> Self {
        OrderedPartition(vec![1; r])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Number of parts `s`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    fn cut_points(&self) -> BTreeSet<usize> {
        self.0
            .iter()
            .scan(0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    /// Every `λ'` obtained by splitting one part into two, as `(part index, j, λ')`.
    ///
    /// Part `i` (0-based) with size `λ_i` yields `λ_i - 1` splits `(j, λ_i - j)`,
    /// listed for increasing `j`.
    pub fn one_split_refinements(&self) -> Vec<(usize, usize, OrderedPartition)> {
        let mut out = Vec::new();
        for (i, &p) in self.0.iter().enumerate() {
            for j in 1..p {
                let mut parts = Vec::with_capacity(self.0.len() + 1);
                parts.extend_from_slice(&self.0[..i]);
                parts.push(j);
                parts.push(p - j);
                parts.extend_from_slice(&self.0[i + 1..]);
                out.push((i, j, OrderedPartition(parts)));
            }
        }
        out
    }

    /// Drops ground element `pos` (1-based) from the interval partition of `{1..r}`.
    pub(crate) fn remove_element(&self, pos: usize) -> Option<OrderedPartition> {
        let mut acc = 0;
        let mut parts = self.0.clone();
        for p in parts.iter_mut() {
            if pos <= acc + *p {
                *p -= 1;
                break;
            }
            acc += *p;
        }
        parts.retain(|&p| p > 0);
        if parts.is_empty() {
            None
        } else {
            Some(OrderedPartition(parts))
        }
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        f.write_str(&s.join(","))
    }
}

impl FromStr for OrderedPartition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad partition {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        OrderedPartition::new(parts)
    }
}

impl Serialize for OrderedPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// All `2^(r-1)` compositions of `r`, lexicographically.
pub fn compositions(r: usize) -> Vec<OrderedPartition> {
    if r == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(1 << (r - 1));
    for cuts in 0u64..1 << (r - 1) {
        let mut parts = Vec::new();
        let mut run = 1;
        for k in 0..r - 1 {
            if cuts >> k & 1 == 1 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        out.push(OrderedPartition(parts));
    }
    out.sort();
    out
}

/// `λ ≻ λ'`: `λ'` splits summands of `λ` in place. Reflexive.
pub fn refines(coarse: &OrderedPartition, fine: &OrderedPartition) -> Result<bool> {
    if coarse.total() != fine.total() {
        return Err(Error::SumMismatch(coarse.total(), fine.total()));
    }
    Ok(coarse.cut_points().is_subset(&fine.cut_points()))
}

/// A sequence `λ^(s) ≻ ... ≻ λ^(r)` where level `t` has `t` parts.
///
/// A full chain starts at `s = 1`; partial chains (starting deeper) appear in
/// the inductive budgets of the extractor.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PartitionChain(Vec<OrderedPartition>);

impl PartitionChain {
    pub fn new(levels: Vec<OrderedPartition>) -> Result<Self> {
        let first = levels
            .first()
            .ok_or_else(|| Error::InvalidChain("empty chain".into()))?;
        let r = first.total();
        if first.len() != 1 {
            return Err(Error::InvalidChain(format!("first level {first} must have one part")));
        }
        validate_tail(&levels, r)?;
        Ok(PartitionChain(levels))
    }

    pub fn levels(&self) -> &[OrderedPartition] {
        &self.0
    }

    pub fn uniformity(&self) -> usize {
        self.0[0].total()
    }

    /// `𝒫(λ^(1)) ∪ ... ∪ 𝒫(λ^(r))`, which has exactly `2^r - 1` members.
    pub fn pattern_set(&self) -> BTreeSet<Pattern> {
        chain_pattern_set(&self.0)
    }
}

fn validate_tail(levels: &[OrderedPartition], r: usize) -> Result<()> {
    let s0 = levels[0].len();
    if levels.len() != r + 1 - s0 {
        return Err(Error::InvalidChain(format!(
            "expected {} levels, found {}",
            r + 1 - s0,
            levels.len()
        )));
    }
    for (offset, lvl) in levels.iter().enumerate() {
        if lvl.total() != r {
            return Err(Error::InvalidChain(format!("{lvl} does not sum to {r}")));
        }
        if lvl.len() != s0 + offset {
            return Err(Error::InvalidChain(format!(
                "level {lvl} should have {} parts",
                s0 + offset
            )));
        }
    }
    for w in levels.windows(2) {
        if !refines(&w[0], &w[1])? {
            return Err(Error::InvalidChain(format!("{} does not refine to {}", w[0], w[1])));
        }
    }
    Ok(())
}

impl fmt::Display for PartitionChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        f.write_str(&s.join(">"))
    }
}

impl FromStr for PartitionChain {
    type Err = Error;
    /// Parses `"3>1,2>1,1,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let levels = s
            .split('>')
            .map(str::parse)
            .collect::<Result<Vec<OrderedPartition>>>()?;
        PartitionChain::new(levels)
    }
}

impl Serialize for PartitionChain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// All sequences starting at `start` and descending by single splits to `(1, ..., 1)`.
pub fn chains_from(start: &OrderedPartition) -> Vec<Vec<OrderedPartition>> {
    if start.len() == start.total() {
        return vec![vec![start.clone()]];
    }
    let mut out = Vec::new();
    for (_, _, next) in start.one_split_refinements() {
        for mut tail in chains_from(&next) {
            tail.insert(0, start.clone());
            out.push(tail);
        }
    }
    out.sort();
    out
}

/// All `(r-1)!` maximal chains, lexicographically by levels.
pub fn chains(r: usize) -> Vec<PartitionChain> {
    if r == 0 {
        return Vec::new();
    }
    chains_from(&OrderedPartition::whole(r))
        .into_iter()
        .map(PartitionChain)
        .collect()
}

pub fn chain_pattern_set(levels: &[OrderedPartition]) -> BTreeSet<Pattern> {
    levels.iter().flat_map(patterns_of).collect()
}

/// Per-pattern clique caps `m_P` over collectable patterns of one uniformity.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(transparent)]
pub struct BudgetTable {
    #[serde(skip)]
    r: usize,
    caps: BTreeMap<Pattern, u64>,
}

impl BudgetTable {
    pub fn new(r: usize, caps: BTreeMap<Pattern, u64>) -> Result<Self> {
        for (p, &m) in &caps {
            if p.uniformity() != r {
                return Err(Error::InvalidBudget(format!("{p} is not a {r}-pattern")));
            }
            if !p.is_collectable() {
                return Err(Error::InvalidBudget(format!("{p} is not collectable")));
            }
            if m == 0 {
                return Err(Error::InvalidBudget(format!("cap for {p} must be positive")));
            }
        }
        Ok(BudgetTable { r, caps })
    }

    /// Cap `m` on every collectable r-pattern.
    pub fn uniform(r: usize, m: u64) -> Result<Self> {
        let caps = crate::pattern::collectable_patterns(r)
            .into_iter()
            .map(|p| (p, m))
            .collect();
        BudgetTable::new(r, caps)
    }

    /// Parses the JSON object form `{"AABB": 2, ...}`.
    pub fn from_json(r: usize, text: &str) -> Result<Self> {
        let raw: BTreeMap<Pattern, u64> =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        BudgetTable::new(r, raw)
    }

    pub fn uniformity(&self) -> usize {
        self.r
    }

    pub fn caps(&self) -> &BTreeMap<Pattern, u64> {
        &self.caps
    }

    pub fn get(&self, p: &Pattern) -> Result<u64> {
        self.caps
            .get(p)
            .copied()
            .ok_or_else(|| Error::MissingPattern(p.to_string()))
    }

    pub fn insert(&mut self, p: Pattern, m: u64) -> Result<()> {
        if p.uniformity() != self.r || !p.is_collectable() || m == 0 {
            return Err(Error::InvalidBudget(format!("{p}={m}")));
        }
        self.caps.insert(p, m);
        Ok(())
    }

    /// `Π m_P` over the given patterns.
    pub fn product<'a>(&self, patterns: impl IntoIterator<Item = &'a Pattern>) -> Result<BigUint> {
        let mut acc = BigUint::one();
        for p in patterns {
            acc *= self.get(p)?;
        }
        Ok(acc)
    }

    pub fn restrict(&self, patterns: &BTreeSet<Pattern>) -> Result<BudgetTable> {
        let caps = patterns
            .iter()
            .map(|p| Ok((p.clone(), self.get(p)?)))
            .collect::<Result<_>>()?;
        Ok(BudgetTable { r: self.r, caps })
    }
}

fn check_uniformity(r: usize, budgets: &BudgetTable) -> Result<()> {
    if budgets.uniformity() != r {
        return Err(Error::UniformityMismatch {
            expected: r,
            found: budgets.uniformity(),
        });
    }
    Ok(())
}

/// `Σ` over partial chains from `start` of `Π m_P` over the chain's patterns.
pub fn chain_sum_from(start: &OrderedPartition, budgets: &BudgetTable) -> Result<BigUint> {
    let mut total = BigUint::default();
    for levels in chains_from(start) {
        total += budgets.product(&chain_pattern_set(&levels))?;
    }
    Ok(total)
}

/// `2^(r-1) Σ_chains Π_{P in chain set} m_P`.
pub fn upper_bound(r: usize, budgets: &BudgetTable) -> Result<BigUint> {
    check_uniformity(r, budgets)?;
    let sum = chain_sum_from(&OrderedPartition::whole(r), budgets)?;
    Ok(sum << (r - 1))
}

/// `max_chains Π m_P` with the first maximizing chain in lexicographic order.
pub fn lower_bound_value(r: usize, budgets: &BudgetTable) -> Result<(BigUint, PartitionChain)> {
    check_uniformity(r, budgets)?;
    let mut best: Option<(BigUint, PartitionChain)> = None;
    for chain in chains(r) {
        let value = budgets.product(&chain.pattern_set())?;
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, chain));
        }
    }
    best.ok_or_else(|| Error::InvalidChain("no chains for r = 0".into()))
}

/// `C_r = 2^(r-1) (r-1)!`.
pub fn c_r(r: usize) -> BigUint {
    let fact: BigUint = (1..r).map(BigUint::from).product();
    fact << (r - 1)
}

/// `C_r^(-1/(2^r - 1))`, evaluated through logarithms.
pub fn sharpness_constant(r: usize) -> f64 {
    assert!(r >= 1, "r must be positive");
    let ln_c = (r - 1) as f64 * std::f64::consts::LN_2
        + (1..r).map(|k| (k as f64).ln()).sum::<f64>();
    let exponent = (2f64).powi(r as i32) - 1.0;
    (-ln_c / exponent).exp()
}
