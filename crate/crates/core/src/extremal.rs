//! Matchings with prescribed clique caps: r-partite bases from extremal point
//! sets, element doubling, and blow-ups along a partition chain.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::es::construct_coordinates;
use crate::matching::{blow_up, Matching};
use crate::partition::{chains, chain_pattern_set, BudgetTable, OrderedPartition, PartitionChain};
use crate::pattern::patterns_of;

/// r-partite matching whose `P((1,…,1), τ)`-cliques have at most `m_τ` edges.
///
/// Each point `z` of the extremal point set becomes the edge whose `j`-th
/// vertex is the rank of `z_j` placed in the `j`-th vertex block; ranking keeps
/// every coordinate order, so the result is the normalized
/// `{N + z_1, 2N + z_2, …}`.
pub fn build_r_partite(r: usize, caps: &BudgetTable) -> Result<Matching> {
    if caps.uniformity() != r {
        return Err(Error::UniformityMismatch {
            expected: r,
            found: caps.uniformity(),
        });
    }
    let mut by_sign = BTreeMap::new();
    for p in patterns_of(&OrderedPartition::singletons(r)) {
        let m = caps.get(&p)?;
        by_sign.insert(p.sign_function().expect("collectable"), m);
    }
    let coords = construct_coordinates(r, &by_sign)?;
    let n = coords.len();
    let mut edges = vec![vec![0i64; r]; n];
    for j in 0..r {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| coords[a][j].cmp(&coords[b][j]));
        for (rank, &k) in order.iter().enumerate() {
            edges[k][j] = (j * n + rank + 1) as i64;
        }
    }
    Matching::new(r, edges)
}

/// Inserts a new vertex immediately before the `j`-th (1-based) vertex of every edge.
pub fn double_element(m: &Matching, j: usize) -> Result<Matching> {
    let r = m.uniformity();
    if j == 0 || j > r {
        return Err(Error::IndexOutOfRange { index: j, max: r });
    }
    let edges = m
        .edges()
        .iter()
        .map(|e| {
            let mut out: Vec<i64> = e.iter().map(|&v| 2 * v).collect();
            out.insert(j - 1, 2 * e[j - 1] - 1);
            out
        })
        .collect();
    Ok(Matching::new(r + 1, edges)?.normalize())
}

/// Matching of size `Π m_P` over the chain's pattern set whose pairs only form
/// chain patterns, each `P`-clique having at most `m_P` edges.
pub fn build_extremal(chain: &PartitionChain, budgets: &BudgetTable) -> Result<Matching> {
    let r = chain.uniformity();
    if budgets.uniformity() != r {
        return Err(Error::UniformityMismatch {
            expected: r,
            found: budgets.uniformity(),
        });
    }
    let budgets = budgets.restrict(&chain.pattern_set())?;
    let base = build_r_partite(r, &budgets)?;
    if r == 1 {
        return Ok(base);
    }
    let levels = chain.levels();
    let j = levels[r - 2]
        .parts()
        .iter()
        .position(|&p| p == 2)
        .expect("level r-1 has one part of size 2")
        + 1;
    let reduced: Vec<OrderedPartition> = levels[..r - 1]
        .iter()
        .map(|l| l.remove_element(j).expect("part of size at least 2"))
        .collect();
    let mut caps = BTreeMap::new();
    for p in chain_pattern_set(&reduced) {
        let m = budgets.get(&p.double_letters(j)?)?;
        caps.insert(p, m);
    }
    let inner = build_extremal(&PartitionChain::new(reduced)?, &BudgetTable::new(r - 1, caps)?)?;
    blow_up(&double_element(&inner, j)?, &base)
}

/// `m^(2^r - 1)` edges with every clique of size at most `m`.
pub fn build_uniform(r: usize, m: u64) -> Result<Matching> {
    let chain = chains(r).into_iter().next().expect("r >= 1");
    build_extremal(&chain, &BudgetTable::uniform(r, m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clique::full_report;
    use crate::matching::is_r_partite;
    use crate::pattern::{collectable_patterns, Pattern};
    use std::collections::BTreeSet;

    fn p(s: &str) -> Pattern {
        Pattern::new(s).unwrap()
    }

    fn table(r: usize, caps: &[(&str, u64)]) -> BudgetTable {
        BudgetTable::new(r, caps.iter().map(|&(s, m)| (p(s), m)).collect()).unwrap()
    }

    fn all_caps(r: usize, patterns: &BTreeSet<Pattern>, values: &[u64]) -> BudgetTable {
        BudgetTable::new(r, patterns.iter().cloned().zip(values.iter().copied()).collect()).unwrap()
    }

    #[test]
    fn r_partite_examples() {
        let m = build_r_partite(2, &table(2, &[("ABAB", 1), ("ABBA", 1)])).unwrap();
        assert_eq!(m.len(), 1);
        let m = build_r_partite(2, &table(2, &[("ABAB", 2), ("ABBA", 3)])).unwrap();
        assert_eq!(m.len(), 6);
        assert!(is_r_partite(&m) && m.is_normalized());
        let rep = full_report(&m).unwrap();
        assert_eq!(rep.size_of(&p("ABAB")), 2);
        assert_eq!(rep.size_of(&p("ABBA")), 3);
        assert_eq!(rep.size_of(&p("AABB")), 1);
        let m = build_r_partite(3, &BudgetTable::uniform(3, 2).unwrap()).unwrap();
        assert_eq!(m.len(), 16);
        let rep = full_report(&m).unwrap();
        for q in patterns_of(&OrderedPartition::singletons(3)) {
            assert!(rep.size_of(&q) <= 2);
        }
    }

    #[test]
    fn r_partite_missing_cap() {
        assert_eq!(
            build_r_partite(2, &table(2, &[("ABAB", 1)])),
            Err(Error::MissingPattern("ABBA".into()))
        );
    }

    #[test]
    fn doubling_inserts_before_jth() {
        let m = Matching::new(2, vec![vec![1, 3], vec![2, 4]]).unwrap();
        let d = double_element(&m, 2).unwrap();
        assert_eq!(d.edges(), &[vec![1, 3, 4], vec![2, 5, 6]]);
        let d = double_element(&m, 1).unwrap();
        assert_eq!(d.edges(), &[vec![1, 2, 5], vec![3, 4, 6]]);
    }

    #[test]
    fn doubling_maps_patterns() {
        let m = crate::matching::random_matching(8, 3, 5).unwrap();
        for j in 1..=3 {
            let d = double_element(&m, j).unwrap();
            for a in 0..8 {
                for b in a + 1..8 {
                    let before = Pattern::of_pair(m.edge(a), m.edge(b)).unwrap();
                    let after = Pattern::of_pair(d.edge(a), d.edge(b)).unwrap();
                    assert_eq!(after, before.double_letters(j).unwrap());
                }
            }
        }
    }

    #[test]
    fn base_case_is_separated_singletons() {
        let chain = chains(1).remove(0);
        let m = build_extremal(&chain, &table(1, &[("AB", 4)])).unwrap();
        assert_eq!(m.edges(), &[vec![1], vec![2], vec![3], vec![4]]);
    }

    #[test]
    fn r2_multi_parameter_example() {
        let chain: PartitionChain = "2>1,1".parse().unwrap();
        let m = build_extremal(&chain, &table(2, &[("AABB", 2), ("ABAB", 3), ("ABBA", 1)])).unwrap();
        assert_eq!(m.len(), 6);
        let rep = full_report(&m).unwrap();
        assert!(rep.size_of(&p("AABB")) <= 2);
        assert!(rep.size_of(&p("ABAB")) <= 3);
        assert!(rep.size_of(&p("ABBA")) <= 1);
    }

    #[test]
    fn uniform_builds() {
        let m = build_uniform(2, 2).unwrap();
        assert_eq!(m.len(), 8);
        assert_eq!(full_report(&m).unwrap().overall.size, 2);
        for r in 1..=4 {
            assert_eq!(build_uniform(r, 1).unwrap().len(), 1);
        }
    }

    #[test]
    fn size_caps_and_closure_for_small_chains() {
        let mut checked = 0;
        for r in 1..=3 {
            for chain in chains(r) {
                let set = chain.pattern_set();
                let k = set.len();
                // a spread of cap vectors with values in 1..=3
                for code in (0..3u64.pow(k as u32)).step_by(if r == 3 { 97 } else { 1 }) {
                    let values: Vec<u64> = (0..k).map(|i| code / 3u64.pow(i as u32) % 3 + 1).collect();
                    let caps = all_caps(r, &set, &values);
                    let m = build_extremal(&chain, &caps).unwrap();
                    assert_eq!(m.len() as u64, values.iter().product::<u64>());
                    let rep = full_report(&m).unwrap();
                    for q in crate::pattern::Pattern::all(r) {
                        let cap = caps.caps().get(&q).copied().unwrap_or(1);
                        assert!(rep.size_of(&q) as u64 <= cap, "{chain} {q}");
                    }
                    for a in 0..m.len() {
                        for b in a + 1..m.len() {
                            assert!(set.contains(&Pattern::of_pair(m.edge(a), m.edge(b)).unwrap()));
                        }
                    }
                    checked += 1;
                }
            }
        }
        assert!(checked > 30);
    }

    #[test]
    fn non_collectable_patterns_absent() {
        let m = build_uniform(3, 2).unwrap();
        let collectable: BTreeSet<Pattern> = collectable_patterns(3).into_iter().collect();
        let rep = full_report(&m).unwrap();
        for (q, c) in &rep.cliques {
            if !collectable.contains(q) {
                assert_eq!(c.size, 1);
            }
        }
    }
}
