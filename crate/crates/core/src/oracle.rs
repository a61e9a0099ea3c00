//! Exhaustive ground truth for small instances: enumeration of all matchings,
//! the exact Ramsey function `L_r(n)`, and bulk checks of the size bounds.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::clique::full_report;
use crate::error::{Error, Result};
use crate::extremal::build_extremal;
use crate::matching::{random_matching, Matching};
use crate::partition::{lower_bound_value, upper_bound, BudgetTable};
use crate::pattern::{collectable_patterns, pair_code};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Builds above this many edges are skipped by the sweep.
pub const BUILD_LIMIT: u64 = 1_000_000;

fn factorial(k: usize) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// `(rn)! / ((r!)^n n!)`.
pub fn matching_count(n: usize, r: usize) -> BigUint {
    factorial(r * n) / (factorial(r).pow(n as u32) * factorial(n))
}

fn check_budget(n: usize, r: usize, budget: u64) -> Result<()> {
    let count = matching_count(n, r);
    if count > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            count: count.to_string(),
            budget,
        });
    }
    Ok(())
}

/// Every matching of `n` r-sets on `1..=rn`, each exactly once.
///
/// Order: the smallest unused vertex is matched with each (r-1)-subset of the
/// larger unused vertices in lexicographic order, recursively.
pub fn enumerate_matchings(n: usize, r: usize, budget: u64) -> Result<MatchingIter> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidMatching("n and r must be positive".into()));
    }
    check_budget(n, r, budget)?;
    Ok(MatchingIter {
        n,
        r,
        levels: Vec::new(),
        started: false,
    })
}

struct Level {
    first: i64,
    avail: Vec<i64>,
    comb: Vec<usize>,
}

impl Level {
    fn edge(&self) -> Vec<i64> {
        std::iter::once(self.first)
            .chain(self.comb.iter().map(|&c| self.avail[c]))
            .collect()
    }

    /// Next combination in lexicographic order.
    fn advance(&mut self) -> bool {
        let k = self.comb.len();
        let len = self.avail.len();
        for i in (0..k).rev() {
            if self.comb[i] < len - k + i {
                self.comb[i] += 1;
                for t in i + 1..k {
                    self.comb[t] = self.comb[t - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

pub struct MatchingIter {
    n: usize,
    r: usize,
    levels: Vec<Level>,
    started: bool,
}

impl MatchingIter {
    fn descend(&mut self) {
        while self.levels.len() < self.n {
            let mut used = vec![false; self.r * self.n + 1];
            for l in &self.levels {
                for v in l.edge() {
                    used[v as usize] = true;
                }
            }
            let mut free = (1..=(self.r * self.n) as i64).filter(|&v| !used[v as usize]);
            let first = free.next().expect("vertices remain");
            let avail: Vec<i64> = free.collect();
            self.levels.push(Level {
                first,
                avail,
                comb: (0..self.r - 1).collect(),
            });
        }
    }

    fn current(&self) -> Matching {
        Matching::new(self.r, self.levels.iter().map(Level::edge).collect()).expect("valid by construction")
    }
}

impl Iterator for MatchingIter {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if !self.started {
            self.started = true;
            self.descend();
            return Some(self.current());
        }
        loop {
            let mut top = self.levels.pop()?;
            if top.advance() {
                self.levels.push(top);
                self.descend();
                return Some(self.current());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamseyResult {
    pub n: usize,
    pub r: usize,
    pub value: usize,
    pub witness: Matching,
    /// Number of matchings in the enumeration, `(rn)! / ((r!)^n n!)`.
    pub count: String,
}

/// Depth-first search over canonical partial matchings keeping pairwise codes,
/// with `L` maintained incrementally.
struct Dfs {
    r: usize,
    n: usize,
    used: Vec<bool>,
    edges: Vec<Vec<i64>>,
    /// `codes[k][i]` for `i < k`
    codes: Vec<Vec<u64>>,
}

impl Dfs {
    fn new(n: usize, r: usize) -> Self {
        Dfs {
            r,
            n,
            used: vec![false; r * n + 1],
            edges: Vec::new(),
            codes: Vec::new(),
        }
    }

    /// Largest clique through the newest edge.
    fn clique_through_last(&self) -> usize {
        let k = self.edges.len() - 1;
        let row = &self.codes[k];
        let mut best = 1;
        let mut done: Vec<u64> = Vec::new();
        for &c in row {
            if done.contains(&c) {
                continue;
            }
            done.push(c);
            let cand: u64 = (0..k).filter(|&i| row[i] == c).fold(0, |acc, i| acc | 1 << i);
            best = best.max(1 + self.max_clique(c, cand));
        }
        best
    }

    fn max_clique(&self, code: u64, cand: u64) -> usize {
        if cand == 0 {
            return 0;
        }
        let mut best = 0;
        let mut rest = cand;
        while rest != 0 {
            if (rest.count_ones() as usize) <= best {
                break;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let nbrs = (0..self.edges.len())
                .filter(|&t| rest >> t & 1 == 1)
                .filter(|&t| self.codes[t.max(i)][t.min(i)] == code)
                .fold(0u64, |acc, t| acc | 1 << t);
            best = best.max(1 + self.max_clique(code, nbrs));
        }
        best
    }

    fn push(&mut self, edge: Vec<i64>) {
        for &v in &edge {
            self.used[v as usize] = true;
        }
        let row = self.edges.iter().map(|f| pair_code(f, &edge)).collect();
        self.codes.push(row);
        self.edges.push(edge);
    }

    fn pop(&mut self) {
        let edge = self.edges.pop().expect("nonempty");
        self.codes.pop();
        for v in edge {
            self.used[v as usize] = false;
        }
    }

    /// Candidate next edges in canonical order.
    fn choices(&self) -> Vec<Vec<i64>> {
        let mut free = (1..=(self.r * self.n) as i64).filter(|&v| !self.used[v as usize]);
        let first = free.next().expect("vertices remain");
        let avail: Vec<i64> = free.collect();
        let mut out = Vec::new();
        let mut level = Level {
            first,
            avail,
            comb: (0..self.r - 1).collect(),
        };
        loop {
            out.push(level.edge());
            if !level.advance() {
                return out;
            }
        }
    }

    /// Minimum of `L` over completions with `L < bound`, updating `bound`.
    fn minimize(&mut self, current: usize, bound: &AtomicUsize) {
        if self.edges.len() == self.n {
            bound.fetch_min(current, Ordering::Relaxed);
            return;
        }
        for edge in self.choices() {
            self.push(edge);
            let l = current.max(self.clique_through_last());
            if l < bound.load(Ordering::Relaxed) {
                self.minimize(l, bound);
            }
            self.pop();
        }
    }

    /// First completion in canonical order with `L <= value`.
    fn find(&mut self, current: usize, value: usize) -> bool {
        if self.edges.len() == self.n {
            return true;
        }
        for edge in self.choices() {
            self.push(edge);
            let l = current.max(self.clique_through_last());
            if l <= value && self.find(l, value) {
                return true;
            }
            self.pop();
        }
        false
    }
}

/// `L_r(n)`: the minimum over all n-edge matchings of the largest clique, with
/// the first minimizing matching in enumeration order.
///
/// Prefixes of two edges are searched in parallel, sharing the running
/// minimum; the witness is then located sequentially so it does not depend on
/// scheduling.
pub fn exact_ramsey(n: usize, r: usize, budget: u64) -> Result<RamseyResult> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidMatching("n and r must be positive".into()));
    }
    check_budget(n, r, budget)?;
    let bound = AtomicUsize::new(n + 1);
    let root = Dfs::new(n, r);
    let firsts = root.choices();
    let prefixes: Vec<Vec<Vec<i64>>> = firsts
        .into_iter()
        .flat_map(|e| {
            let mut d = Dfs::new(n, r);
            d.push(e.clone());
            if n == 1 {
                return vec![vec![e]];
            }
            d.choices().into_iter().map(|f| vec![e.clone(), f]).collect::<Vec<_>>()
        })
        .collect();
    prefixes.par_iter().for_each(|prefix| {
        let mut d = Dfs::new(n, r);
        let mut l = 0;
        for e in prefix {
            d.push(e.clone());
            l = l.max(d.clique_through_last());
        }
        if l < bound.load(Ordering::Relaxed) {
            d.minimize(l, &bound);
        }
    });
    let value = bound.load(Ordering::Relaxed);
    let mut d = Dfs::new(n, r);
    assert!(d.find(0, value), "minimum is attained");
    Ok(RamseyResult {
        n,
        r,
        value,
        witness: Matching::new(r, d.edges).expect("valid by construction"),
        count: matching_count(n, r).to_string(),
    })
}

/// Smallest `q` with `q^k >= n`.
pub fn ceil_root(n: u64, k: u32) -> u64 {
    let mut q = (n as f64).powf(1.0 / k as f64).round() as u64;
    while q > 0 && (q - 1).checked_pow(k).is_some_and(|p| p >= n) {
        q -= 1;
    }
    while q.checked_pow(k).is_some_and(|p| p < n) {
        q += 1;
    }
    q
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub instance: usize,
    pub n: usize,
    /// Exact `L(M)`.
    pub largest: usize,
    /// Upper bound at the exact `L_P` budgets.
    pub upper: String,
    /// Best single-chain product at the same budgets.
    pub lower: String,
    pub chain: String,
    /// Size of the extremal build on the maximizing chain, if attempted.
    pub built: Option<usize>,
    pub upper_ok: bool,
    pub lower_ok: bool,
}

impl SweepRow {
    pub fn pass(&self) -> bool {
        self.upper_ok && self.lower_ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub r: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|row| !row.pass()).count()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("instance\tn\tL\tupper\tlower\tchain\tbuilt\tstatus\n");
        for row in &self.rows {
            let built = row.built.map_or("skipped".to_string(), |b| b.to_string());
            let status = if row.pass() { "pass" } else { "fail" };
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                row.instance, row.n, row.largest, row.upper, row.lower, row.chain, built, status
            )
            .expect("string write");
        }
        out
    }
}

/// Checks `|M| <= upper_bound` at the exact `L_P(M)` budgets and that the
/// extremal build on the maximizing chain has exactly the lower-bound size.
pub fn check_instance(index: usize, m: &Matching) -> Result<SweepRow> {
    let r = m.uniformity();
    let report = full_report(m)?;
    let caps = collectable_patterns(r)
        .into_iter()
        .map(|p| {
            let size = report.size_of(&p) as u64;
            (p, size)
        })
        .collect();
    let budgets = BudgetTable::new(r, caps)?;
    let upper = upper_bound(r, &budgets)?;
    let (lower, chain) = lower_bound_value(r, &budgets)?;
    let built = match lower.to_u64() {
        Some(size) if size <= BUILD_LIMIT => Some(build_extremal(&chain, &budgets)?.len()),
        _ => None,
    };
    Ok(SweepRow {
        instance: index,
        n: m.len(),
        largest: report.overall.size,
        upper_ok: BigUint::from(m.len()) <= upper,
        lower_ok: built.is_none_or(|b| BigUint::from(b) == lower),
        upper: upper.to_string(),
        lower: lower.to_string(),
        chain: chain.to_string(),
        built,
    })
}

pub fn theorem_sweep(r: usize, instances: &[Matching]) -> Result<SweepReport> {
    if let Some(bad) = instances.iter().find(|m| m.uniformity() != r) {
        return Err(Error::UniformityMismatch {
            expected: r,
            found: bad.uniformity(),
        });
    }
    let rows = instances
        .par_iter()
        .enumerate()
        .map(|(i, m)| check_instance(i, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { r, rows })
}

/// `count` uniform random matchings; instance `i` uses seed `seed + i`.
pub fn random_instances(r: usize, n: usize, count: usize, seed: u64) -> Result<Vec<Matching>> {
    (0..count)
        .map(|i| random_matching(n, r, seed.wrapping_add(i as u64)))
        .collect()
}
