//! Exact largest P-cliques through branch-and-bound maximum clique search on
//! the per-pattern compatibility graph.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::pattern::{code_of, pair_code, pattern_from_code, Pattern};

/// Instances above this many edges need `force`.
pub const DEFAULT_EDGE_LIMIT: usize = 10_000;

/// Dense undirected graph over `0..n` with bitset rows.
#[derive(Clone, Debug)]
pub struct BitGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BitGraph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitGraph {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.rows[a * self.words + b / 64] |= 1 << (b % 64);
        self.rows[b * self.words + a / 64] |= 1 << (a % 64);
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.rows[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    fn row(&self, a: usize) -> &[u64] {
        &self.rows[a * self.words..(a + 1) * self.words]
    }

    pub fn degree(&self, a: usize) -> usize {
        self.row(a).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// A maximum clique, by branch and bound with a greedy-colouring bound.
    ///
    /// Candidates are coloured sequentially; the vertex of highest colour is
    /// branched on first, and a branch is cut once the clique size plus its
    /// colour cannot beat the incumbent.
    pub fn max_clique(&self) -> Vec<usize> {
        if self.n == 0 {
            return Vec::new();
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.degree(v)), v));
        let mut search = Search {
            g: self,
            best: vec![order[0]],
            current: Vec::new(),
        };
        search.expand(order);
        let mut best = search.best;
        best.sort_unstable();
        best
    }
}

struct Search<'a> {
    g: &'a BitGraph,
    best: Vec<usize>,
    current: Vec<usize>,
}

impl Search<'_> {
    fn colour(&self, candidates: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in candidates {
            let slot = classes
                .iter()
                .position(|class| class.iter().all(|&u| !self.g.has_edge(u, v)));
            match slot {
                Some(k) => classes[k].push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut order = Vec::with_capacity(candidates.len());
        let mut bound = Vec::with_capacity(candidates.len());
        for (k, class) in classes.into_iter().enumerate() {
            for v in class {
                order.push(v);
                bound.push(k + 1);
            }
        }
        (order, bound)
    }

    fn expand(&mut self, candidates: Vec<usize>) {
        let (order, bound) = self.colour(&candidates);
        let mut remaining = order.clone();
        for k in (0..order.len()).rev() {
            if self.current.len() + bound[k] <= self.best.len() {
                return;
            }
            let v = order[k];
            remaining.pop();
            self.current.push(v);
            let next: Vec<usize> = remaining.iter().copied().filter(|&u| self.g.has_edge(u, v)).collect();
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
        }
    }
}

fn guard(m: &Matching, force: bool) -> Result<()> {
    if !force && m.len() > DEFAULT_EDGE_LIMIT {
        return Err(Error::TooLarge {
            edges: m.len(),
            limit: DEFAULT_EDGE_LIMIT,
        });
    }
    Ok(())
}

/// Compatibility graph `G_P` on the edges of `m`.
pub fn compatibility_graph(m: &Matching, p: &Pattern) -> BitGraph {
    let code = code_of(p);
    let mut g = BitGraph::new(m.len());
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if pair_code(m.edge(i), m.edge(j)) == code {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// A largest clique and its edge indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clique {
    pub size: usize,
    pub witness: Vec<usize>,
}

impl Clique {
    fn from_witness(witness: Vec<usize>) -> Self {
        Clique {
            size: witness.len(),
            witness,
        }
    }
}

fn check_uniformity(m: &Matching, p: &Pattern) -> Result<()> {
    if p.uniformity() != m.uniformity() {
        return Err(Error::UniformityMismatch {
            expected: m.uniformity(),
            found: p.uniformity(),
        });
    }
    Ok(())
}

/// Exact `L_P(M)` with a witness.
pub fn largest_clique(m: &Matching, p: &Pattern) -> Result<Clique> {
    largest_clique_with(m, p, false)
}

pub fn largest_clique_with(m: &Matching, p: &Pattern, force: bool) -> Result<Clique> {
    check_uniformity(m, p)?;
    guard(m, force)?;
    Ok(Clique::from_witness(compatibility_graph(m, p).max_clique()))
}

/// Whether every pair of the listed edges forms `p`.
pub fn is_clique(m: &Matching, p: &Pattern, witness: &[usize]) -> bool {
    let code = code_of(p);
    witness.iter().enumerate().all(|(k, &i)| {
        witness[k + 1..]
            .iter()
            .all(|&j| i != j && pair_code(m.edge(i), m.edge(j)) == code)
    })
}

/// Longest chain `e_1 → e_2 → ...` of edges ordered by minimum with
/// consecutive pairs forming `p`, accepted only if pairwise verified.
///
/// When the path is not a clique the exact search answers instead.
pub fn chain_fast_path(m: &Matching, p: &Pattern) -> Result<Clique> {
    check_uniformity(m, p)?;
    if !p.is_collectable() {
        return Err(Error::NotCollectable(p.to_string()));
    }
    let code = code_of(p);
    let n = m.len();
    // edges are sorted by minimum
    let mut len = vec![1usize; n];
    let mut prev = vec![None; n];
    for j in 0..n {
        for i in 0..j {
            if len[i] + 1 > len[j] && pair_code(m.edge(i), m.edge(j)) == code {
                len[j] = len[i] + 1;
                prev[j] = Some(i);
            }
        }
    }
    let mut end = 0;
    for j in 1..n {
        if len[j] > len[end] {
            end = j;
        }
    }
    let mut path = vec![end];
    while let Some(i) = prev[*path.last().unwrap()] {
        path.push(i);
    }
    path.reverse();
    if is_clique(m, p, &path) {
        Ok(Clique::from_witness(path))
    } else {
        largest_clique(m, p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overall {
    pub pattern: Pattern,
    pub size: usize,
}

/// Exact `L_P` for every r-pattern plus the overall maximum `L(M)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueReport {
    pub n: usize,
    pub r: usize,
    pub overall: Overall,
    pub cliques: BTreeMap<Pattern, Clique>,
}

impl CliqueReport {
    pub fn size_of(&self, p: &Pattern) -> usize {
        self.cliques.get(p).map_or(1, |c| c.size)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn full_report(m: &Matching) -> Result<CliqueReport> {
    full_report_with(m, false)
}

/// Every pattern realised by some pair gets an exact search, the rest report
/// size 1 with witness `[0]`. Patterns are searched in parallel.
pub fn full_report_with(m: &Matching, force: bool) -> Result<CliqueReport> {
    guard(m, force)?;
    let r = m.uniformity();
    let n = m.len();
    let mut graphs: HashMap<u64, BitGraph> = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let code = pair_code(m.edge(i), m.edge(j));
            graphs.entry(code).or_insert_with(|| BitGraph::new(n)).add_edge(i, j);
        }
    }
    let found: Vec<(u64, Clique)> = graphs
        .into_par_iter()
        .map(|(code, g)| (code, Clique::from_witness(g.max_clique())))
        .collect();
    let mut cliques: BTreeMap<Pattern, Clique> = Pattern::all(r)
        .into_iter()
        .map(|p| (p, Clique::from_witness(vec![0])))
        .collect();
    for (code, c) in found {
        cliques.insert(pattern_from_code(code, r), c);
    }
    let overall = cliques
        .iter()
        .fold(None::<(&Pattern, usize)>, |best, (p, c)| match best {
            Some((_, s)) if s >= c.size => best,
            _ => Some((p, c.size)),
        })
        .map(|(p, size)| Overall {
            pattern: p.clone(),
            size,
        })
        .expect("at least one pattern");
    Ok(CliqueReport {
        n,
        r,
        overall,
        cliques,
    })
}

/// Re-checks a claimed report against a matching: shape, every witness, and the
/// overall entry. Returns the list of problems found.
pub fn verify_report(m: &Matching, report: &CliqueReport) -> Vec<String> {
    let mut problems = Vec::new();
    if report.n != m.len() || report.r != m.uniformity() {
        problems.push(format!(
            "report is for n={}, r={} but matching has n={}, r={}",
            report.n,
            report.r,
            m.len(),
            m.uniformity()
        ));
        return problems;
    }
    for (p, c) in &report.cliques {
        if p.uniformity() != m.uniformity() {
            problems.push(format!("{p} has the wrong uniformity"));
            continue;
        }
        if c.size != c.witness.len() {
            problems.push(format!("{p}: size {} but {} witness edges", c.size, c.witness.len()));
        }
        if c.witness.is_empty() {
            problems.push(format!("{p}: empty witness"));
        }
        if let Some(&bad) = c.witness.iter().find(|&&i| i >= m.len()) {
            problems.push(format!("{p}: witness index {bad} out of range"));
            continue;
        }
        if !is_clique(m, p, &c.witness) {
            problems.push(format!("{p}: witness {:?} is not a clique", c.witness));
        }
    }
    let max = report.cliques.values().map(|c| c.size).max().unwrap_or(0);
    if report.overall.size != max {
        problems.push(format!("overall size {} but maximum entry is {max}", report.overall.size));
    }
    match report.cliques.get(&report.overall.pattern) {
        Some(c) if c.size == report.overall.size => {}
        _ => problems.push(format!("overall pattern {} does not match its entry", report.overall.pattern)),
    }
    problems
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::random_matching;

    fn mat(r: usize, edges: &[&[i64]]) -> Matching {
        Matching::new(r, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    fn p(s: &str) -> Pattern {
        Pattern::new(s).unwrap()
    }

    /// Exhaustive subset scan.
    fn brute_clique(m: &Matching, pat: &Pattern) -> usize {
        let n = m.len();
        let mut best = 1;
        for mask in 1u32..1 << n {
            let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if idx.len() > best && is_clique(m, pat, &idx) {
                best = idx.len();
            }
        }
        best
    }

    #[test]
    fn separated_edges() {
        let m = mat(2, &[&[1, 2], &[3, 4], &[5, 6]]);
        assert_eq!(largest_clique(&m, &p("AABB")).unwrap().size, 3);
        assert_eq!(largest_clique(&m, &p("ABAB")).unwrap().size, 1);
    }

    #[test]
    fn interval_wise_example() {
        let m = mat(3, &[&[1, 6, 7], &[2, 4, 5], &[3, 8, 9]]);
        let c = largest_clique(&m, &p("ABAABB")).unwrap();
        assert_eq!(c.size, 2);
        assert!(c.witness == vec![0, 2] || c.witness == vec![1, 2]);
    }

    #[test]
    fn uniformity_checked() {
        let m = mat(2, &[&[1, 2]]);
        assert!(matches!(largest_clique(&m, &p("AB")), Err(Error::UniformityMismatch { .. })));
    }

    #[test]
    fn matches_brute_force() {
        for seed in 0..60 {
            let r = 2 + seed as usize % 2;
            let m = random_matching(12, r, seed).unwrap();
            for pat in Pattern::all(r) {
                let c = largest_clique(&m, &pat).unwrap();
                assert_eq!(c.size, brute_clique(&m, &pat), "seed {seed} {pat}");
                assert!(is_clique(&m, &pat, &c.witness));
            }
        }
    }

    #[test]
    fn max_clique_on_dense_random_graphs() {
        use rand::{Rng, SeedableRng};
        for seed in 0..30 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 16;
            let mut g = BitGraph::new(n);
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(0.7) {
                        g.add_edge(a, b);
                    }
                }
            }
            let c = g.max_clique();
            let mut best = 0;
            for mask in 1u32..1 << n {
                let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                if idx.len() > best && idx.iter().enumerate().all(|(k, &a)| idx[k + 1..].iter().all(|&b| g.has_edge(a, b))) {
                    best = idx.len();
                }
            }
            assert_eq!(c.len(), best);
        }
    }

    #[test]
    fn single_edge_report() {
        let m = mat(3, &[&[1, 2, 3]]);
        let rep = full_report(&m).unwrap();
        assert_eq!(rep.cliques.len(), 10);
        assert!(rep.cliques.values().all(|c| c.size == 1 && c.witness == vec![0]));
        assert_eq!(rep.overall.size, 1);
        assert_eq!(rep.overall.pattern, p("AAABBB"));
    }

    #[test]
    fn report_tie_break_is_lexicographic() {
        // {1,2},{3,4} forms AABB; {5,8},{6,7} forms ABBA; both size 2
        let m = mat(2, &[&[1, 2], &[3, 4]]);
        let rep = full_report(&m).unwrap();
        assert_eq!(rep.overall, Overall { pattern: p("AABB"), size: 2 });
        let m = mat(2, &[&[1, 4], &[2, 3]]);
        let rep = full_report(&m).unwrap();
        assert_eq!(rep.overall, Overall { pattern: p("ABBA"), size: 2 });
    }

    #[test]
    fn report_json_shape() {
        let m = mat(2, &[&[1, 2], &[3, 4], &[5, 6]]);
        let rep = full_report(&m).unwrap();
        let json = rep.to_json();
        assert_eq!(
            json,
            r#"{"n":3,"r":2,"overall":{"pattern":"AABB","size":3},"cliques":{"AABB":{"size":3,"witness":[0,1,2]},"ABAB":{"size":1,"witness":[0]},"ABBA":{"size":1,"witness":[0]}}}"#
        );
        assert_eq!(CliqueReport::from_json(&json).unwrap(), rep);
        assert!(verify_report(&m, &rep).is_empty());
    }

    #[test]
    fn verify_catches_forged_reports() {
        let m = mat(2, &[&[1, 2], &[3, 4], &[5, 6]]);
        let mut rep = full_report(&m).unwrap();
        rep.cliques.insert(p("ABAB"), Clique { size: 2, witness: vec![0, 1] });
        assert!(!verify_report(&m, &rep).is_empty());
        let mut rep = full_report(&m).unwrap();
        rep.overall.size = 2;
        assert!(!verify_report(&m, &rep).is_empty());
        let mut rep = full_report(&m).unwrap();
        rep.cliques.insert(p("AABB"), Clique { size: 3, witness: vec![0, 1, 7] });
        assert!(!verify_report(&m, &rep).is_empty());
    }

    #[test]
    fn fast_path_agrees_with_exact() {
        for seed in 0..200 {
            let m = random_matching(12, 3, seed).unwrap();
            for pat in crate::pattern::collectable_patterns(3) {
                let fast = chain_fast_path(&m, &pat).unwrap();
                let exact = largest_clique(&m, &pat).unwrap();
                assert_eq!(fast.size, exact.size, "seed {seed} {pat}");
                assert!(is_clique(&m, &pat, &fast.witness));
            }
        }
    }

    #[test]
    fn fast_path_examples() {
        let m = Matching::new(2, (0..7).map(|k| vec![2 * k + 1, 2 * k + 2]).collect()).unwrap();
        assert_eq!(chain_fast_path(&m, &p("AABB")).unwrap().size, 7);
        let single = mat(3, &[&[4, 5, 9]]);
        assert_eq!(chain_fast_path(&single, &p("AAABBB")).unwrap().size, 1);
        assert!(matches!(
            chain_fast_path(&mat(5, &[&[1, 2, 3, 4, 5]]), &p("AABABBABBA")),
            Err(Error::NotCollectable(_))
        ));
    }

    #[test]
    fn fast_path_recovers_from_non_transitive_chains() {
        // {1,3}->{2,5}->{4,6}: consecutive pairs are ABAB, but {1,3},{4,6} is AABB
        let m = mat(2, &[&[1, 3], &[2, 5], &[4, 6]]);
        let c = chain_fast_path(&m, &p("ABAB")).unwrap();
        assert_eq!(c.size, 2);
        assert!(is_clique(&m, &p("ABAB"), &c.witness));
    }

    #[test]
    fn size_guard() {
        let m = Matching::new(1, (1..=10_001).map(|v| vec![v]).collect()).unwrap();
        assert!(matches!(largest_clique(&m, &p("AB")), Err(Error::TooLarge { .. })));
        assert!(matches!(full_report(&m), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn sub_matching_monotonicity() {
        use rand::{seq::SliceRandom, SeedableRng};
        for seed in 0..30 {
            let m = random_matching(14, 3, seed).unwrap();
            let full = full_report(&m).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut idx: Vec<usize> = (0..14).collect();
            idx.shuffle(&mut rng);
            let sub = m.select(&idx[..8]).unwrap();
            let part = full_report(&sub).unwrap();
            for (pat, c) in &part.cliques {
                assert!(c.size <= full.size_of(pat));
            }
        }
    }
}
