//! Polynomial-time extraction of a large P-clique: repeated dichotomy between
//! an interval-wise sub-matching and a finer partite one, then an
//! Erdős–Szekeres search on the projected point set.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::clique::is_clique;
use crate::error::{Error, Result};
use crate::es::{longest_monotone, PointSet};
use crate::matching::{find_partite_witness, is_interval_wise, Matching, PartiteWitness};
use crate::partition::{c_r, chain_sum_from, BudgetTable, OrderedPartition};
use crate::pattern::{Pattern, SignFunction};

/// Thresholds `M_λ'` for every one-split refinement `λ'` of `λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionBudgets {
    partition: OrderedPartition,
    values: BTreeMap<OrderedPartition, BigUint>,
}

impl PartitionBudgets {
    pub fn new(partition: OrderedPartition, values: BTreeMap<OrderedPartition, BigUint>) -> Result<Self> {
        let keys: Vec<OrderedPartition> = partition.one_split_refinements().into_iter().map(|(_, _, p)| p).collect();
        if keys.len() != values.len() || keys.iter().any(|k| !values.contains_key(k)) {
            return Err(Error::InvalidBudget(format!(
                "keys must be the one-split refinements of {partition}"
            )));
        }
        if values.values().any(|v| *v == BigUint::default()) {
            return Err(Error::InvalidBudget("budgets must be positive".into()));
        }
        Ok(PartitionBudgets { partition, values })
    }

    /// The same value for every refinement.
    pub fn constant(partition: OrderedPartition, value: u64) -> Result<Self> {
        let values = partition
            .one_split_refinements()
            .into_iter()
            .map(|(_, _, p)| (p, BigUint::from(value)))
            .collect();
        PartitionBudgets::new(partition, values)
    }

    /// `M_λ' = 2^(r-s-1) Σ_{chains from λ'} Π m_P`, the largest size a
    /// λ'-partite matching respecting `caps` can have.
    pub fn inductive(partition: OrderedPartition, caps: &BudgetTable) -> Result<Self> {
        let r = caps.uniformity();
        if partition.total() != r {
            return Err(Error::SumMismatch(partition.total(), r));
        }
        let s = partition.len();
        let mut values = BTreeMap::new();
        for (_, _, p) in partition.one_split_refinements() {
            let v = chain_sum_from(&p, caps)? << (r - s - 1);
            values.insert(p, v);
        }
        PartitionBudgets::new(partition, values)
    }

    pub fn partition(&self) -> &OrderedPartition {
        &self.partition
    }

    pub fn values(&self) -> &BTreeMap<OrderedPartition, BigUint> {
        &self.values
    }

    pub fn get(&self, p: &OrderedPartition) -> Option<&BigUint> {
        self.values.get(p)
    }

    /// `M = Σ M_λ'`.
    pub fn total(&self) -> BigUint {
        self.values.values().sum()
    }
}

/// Outcome of one dichotomy step. Indices are positions in the input matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dichotomy {
    IntervalWise {
        indices: Vec<usize>,
        matching: Matching,
        witness: PartiteWitness,
    },
    Refined {
        refinement: OrderedPartition,
        /// 0-based part that was split, into `(j, λ_i - j)`.
        part: usize,
        j: usize,
        /// New cut `v`, i.e. threshold `v + 1/2`.
        threshold: i64,
        indices: Vec<usize>,
        matching: Matching,
        witness: PartiteWitness,
    },
}

fn saturating_usize(v: &BigUint) -> usize {
    v.to_usize().unwrap_or(usize::MAX)
}

/// Looks for a split threshold inside some part that separates more than
/// `M_μ` edges the same way; otherwise returns a greedy independent set of the
/// hull-conflict graph, which is interval-wise.
pub fn dichotomy(m: &Matching, w: &PartiteWitness, budgets: &PartitionBudgets) -> Result<Dichotomy> {
    let r = m.uniformity();
    if w.partition.len() >= r {
        return Err(Error::InvalidPartition(format!(
            "{} has {} parts; fewer than {r} required",
            w.partition,
            w.partition.len()
        )));
    }
    if budgets.partition() != &w.partition {
        return Err(Error::InvalidBudget(format!(
            "budgets are for {}, witness is for {}",
            budgets.partition(),
            w.partition
        )));
    }
    w.check(m)?;
    if let Some(out) = sweep(m, w, budgets)? {
        return Ok(out);
    }
    let indices = independent_set(m, w);
    let matching = m.select(&indices)?;
    let total = saturating_usize(&budgets.total());
    let need = m.len().div_ceil(total.saturating_mul(2));
    if indices.len() < need || !is_interval_wise(&matching, w)? {
        return Err(Error::Contract(format!(
            "independent set of size {} below {need} or not interval-wise",
            indices.len()
        )));
    }
    Ok(Dichotomy::IntervalWise {
        indices,
        matching,
        witness: w.clone(),
    })
}

fn sweep(m: &Matching, w: &PartiteWitness, budgets: &PartitionBudgets) -> Result<Option<Dichotomy>> {
    let refinements = w.partition.one_split_refinements();
    for (i, &size) in w.partition.parts().iter().enumerate() {
        if size < 2 {
            continue;
        }
        let caps: Vec<usize> = (0..size)
            .map(|j| {
                refinements
                    .iter()
                    .find(|(pi, pj, _)| *pi == i && *pj == j)
                    .map_or(usize::MAX, |(_, _, p)| saturating_usize(&budgets.values[p]))
            })
            .collect();
        let mut events: Vec<(i64, usize)> = m
            .edges()
            .iter()
            .enumerate()
            .flat_map(|(k, e)| w.block(e, i).iter().map(move |&v| (v, k)))
            .collect();
        events.sort_unstable();
        let mut seen = vec![0usize; m.len()];
        let mut count = vec![0usize; size + 1];
        count[0] = m.len();
        for &(v, k) in &events {
            count[seen[k]] -= 1;
            seen[k] += 1;
            count[seen[k]] += 1;
            if let Some(j) = (1..size).find(|&j| count[j] > caps[j]) {
                let refinement = refinements
                    .iter()
                    .find(|(pi, pj, _)| *pi == i && *pj == j)
                    .map(|(_, _, p)| p.clone())
                    .expect("refinement exists");
                let indices: Vec<usize> = (0..m.len()).filter(|&k| seen[k] == j).collect();
                let matching = m.select(&indices)?;
                let mut cuts = w.cuts.clone();
                cuts.insert(i + 1, v);
                let witness = PartiteWitness {
                    partition: refinement.clone(),
                    cuts,
                };
                witness
                    .check(&matching)
                    .map_err(|e| Error::Contract(format!("refined witness rejected: {e}")))?;
                if BigUint::from(matching.len()) <= budgets.values[&refinement] {
                    return Err(Error::Contract("refined sub-matching too small".into()));
                }
                return Ok(Some(Dichotomy::Refined {
                    refinement,
                    part: i,
                    j,
                    threshold: v,
                    indices,
                    matching,
                    witness,
                }));
            }
        }
    }
    Ok(None)
}

/// Greedy minimum-degree independent set in the graph joining edges whose
/// part hulls intersect; ties go to the lowest index.
fn independent_set(m: &Matching, w: &PartiteWitness) -> Vec<usize> {
    let n = m.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..w.parts() {
        let mut hulls: Vec<(i64, i64, usize)> = m
            .edges()
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let b = w.block(e, i);
                (b[0], b[b.len() - 1], k)
            })
            .collect();
        hulls.sort_unstable();
        for a in 0..n {
            for b in a + 1..n {
                if hulls[b].0 > hulls[a].1 {
                    break;
                }
                adj[hulls[a].2].push(hulls[b].2);
                adj[hulls[b].2].push(hulls[a].2);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut chosen = Vec::new();
    loop {
        let pick = (0..n).filter(|&k| alive[k]).min_by_key(|&k| (degree[k], k));
        let Some(v) = pick else { break };
        chosen.push(v);
        let mut removed = vec![v];
        removed.extend(adj[v].iter().copied().filter(|&u| alive[u]));
        for &u in &removed {
            alive[u] = false;
        }
        for &u in &removed {
            for &x in &adj[u] {
                if alive[x] {
                    degree[x] -= 1;
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// One point per edge: coordinate `i` is the minimum of the edge's part-`i` block.
pub fn project_to_points(m: &Matching, w: &PartiteWitness) -> Result<PointSet> {
    if !is_interval_wise(m, w)? {
        return Err(Error::NotIntervalWise);
    }
    let points = m
        .edges()
        .iter()
        .map(|e| (0..w.parts()).map(|i| w.block(e, i)[0]).collect())
        .collect();
    PointSet::new(w.parts(), points)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
pub enum TraceStep {
    /// Branch (b): recurse into a refinement.
    Refine {
        partition: OrderedPartition,
        size: usize,
        into: OrderedPartition,
        part: usize,
        j: usize,
        threshold: i64,
        kept: usize,
        budget: String,
    },
    /// Branch (a): interval-wise sub-matching found, then the monotone search.
    IntervalWise {
        partition: OrderedPartition,
        size: usize,
        kept: usize,
        budget: String,
    },
    /// All parts are singletons, so the matching is interval-wise already.
    Partite { partition: OrderedPartition, size: usize },
    Monotone {
        signs: SignFunction,
        pattern: Pattern,
        length: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtractionResult {
    pub pattern: Pattern,
    pub size: usize,
    /// Indices into the input matching, ascending.
    pub clique: Vec<usize>,
    pub target_m: u64,
    pub target_reached: bool,
    pub trace: Vec<TraceStep>,
}

impl ExtractionResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Runs the extraction with uniform caps `m_P = target_m`. The result is a
/// verified clique; `target_reached` says whether it has more than
/// `target_m` edges, which is certain when `|M| > C_r target_m^(2^r - 1)`.
pub fn extract_clique(m: &Matching, target_m: u64) -> Result<ExtractionResult> {
    let caps = BudgetTable::uniform(m.uniformity(), target_m.max(1))?;
    extract_clique_with(m, &caps, target_m)
}

/// Extraction thresholds derived from arbitrary caps.
pub fn extract_clique_with(m: &Matching, caps: &BudgetTable, target_m: u64) -> Result<ExtractionResult> {
    let r = m.uniformity();
    if caps.uniformity() != r {
        return Err(Error::UniformityMismatch {
            expected: r,
            found: caps.uniformity(),
        });
    }
    let mut indices: Vec<usize> = (0..m.len()).collect();
    let mut current = m.clone();
    let mut witness = find_partite_witness(m, &OrderedPartition::whole(r))
        .ok_or_else(|| Error::Contract("no single-part witness".into()))?;
    let mut trace = Vec::new();
    while witness.parts() < r {
        let budgets = PartitionBudgets::inductive(witness.partition.clone(), caps)?;
        match dichotomy(&current, &witness, &budgets)? {
            Dichotomy::Refined {
                refinement,
                part,
                j,
                threshold,
                indices: local,
                matching,
                witness: next,
            } => {
                trace.push(TraceStep::Refine {
                    partition: witness.partition.clone(),
                    size: current.len(),
                    into: refinement.clone(),
                    part,
                    j,
                    threshold,
                    kept: local.len(),
                    budget: budgets.values()[&refinement].to_string(),
                });
                indices = local.iter().map(|&k| indices[k]).collect();
                current = matching;
                witness = next;
            }
            Dichotomy::IntervalWise {
                indices: local,
                matching,
                ..
            } => {
                trace.push(TraceStep::IntervalWise {
                    partition: witness.partition.clone(),
                    size: current.len(),
                    kept: local.len(),
                    budget: budgets.total().to_string(),
                });
                indices = local.iter().map(|&k| indices[k]).collect();
                current = matching;
                break;
            }
        }
    }
    if witness.parts() == r {
        trace.push(TraceStep::Partite {
            partition: witness.partition.clone(),
            size: current.len(),
        });
    }

    let points = project_to_points(&current, &witness)?;
    let candidates = SignFunction::all(witness.parts())
        .into_par_iter()
        .map(|tau| longest_monotone(&points, &tau).map(|seq| (tau, seq)))
        .collect::<Result<Vec<_>>>()?;
    // first maximum in sign-function order
    let (tau, seq) = candidates
        .into_iter()
        .reduce(|best, c| if c.1.len() > best.1.len() { c } else { best })
        .expect("at least one sign function");
    let pattern = Pattern::from_blocks(&witness.partition, &tau)?;
    trace.push(TraceStep::Monotone {
        signs: tau,
        pattern: pattern.clone(),
        length: seq.len(),
    });
    let mut clique: Vec<usize> = seq.iter().map(|&k| indices[k]).collect();
    clique.sort_unstable();
    if !is_clique(m, &pattern, &clique) {
        return Err(Error::Contract(format!("monotone sequence is not a {pattern}-clique")));
    }
    Ok(ExtractionResult {
        size: clique.len(),
        target_reached: clique.len() as u64 > target_m,
        pattern,
        clique,
        target_m,
        trace,
    })
}

/// Largest `m + 1` with `n > C_r m^(2^r - 1)`.
pub fn guaranteed_size(r: usize, n: u64) -> u64 {
    assert!(r >= 1, "uniformity must be positive");
    let c = c_r(r);
    let n_big = BigUint::from(n);
    let exceeds = |m: u64| -> bool {
        if m == 0 {
            return true;
        }
        if m == 1 {
            return c < n_big;
        }
        // 2^(2^r - 1) exceeds every u64 once r >= 7
        if r >= 7 {
            return false;
        }
        c.clone() * BigUint::from(m).pow((1u32 << r) - 1) < n_big
    };
    // largest m with exceeds(m), by bisection on [0, n]
    let (mut lo, mut hi) = (0u64, n);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if exceeds(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo + 1
}
