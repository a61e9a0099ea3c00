//! Ordered r-uniform matchings on positive integers, partiteness witnesses,
//! blow-ups, random generation and the text/JSON file formats.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::OrderedPartition;

/// A finite collection of pairwise disjoint r-sets of positive integers.
///
/// Edges are kept internally sorted and the edge list is sorted by first
/// element, so edge indices are canonical.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Matching {
    r: usize,
    edges: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
struct MatchingJson {
    r: usize,
    edges: Vec<Vec<i64>>,
}

impl Matching {
    pub fn new(r: usize, mut edges: Vec<Vec<i64>>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidMatching("uniformity must be positive".into()));
        }
        if edges.is_empty() {
            return Err(Error::InvalidMatching("at least one edge is required".into()));
        }
        let mut seen = HashSet::with_capacity(r * edges.len());
        for e in edges.iter_mut() {
            if e.len() != r {
                return Err(Error::Arity(r, e.len()));
            }
            e.sort_unstable();
            for &v in e.iter() {
                if v < 1 {
                    return Err(Error::InvalidMatching(format!("vertex {v} is not positive")));
                }
                if !seen.insert(v) {
                    return Err(Error::Overlap(v));
                }
            }
        }
        edges.sort_unstable_by_key(|e| e[0]);
        Ok(Matching { r, edges })
    }

    pub fn uniformity(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[Vec<i64>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &[i64] {
        &self.edges[i]
    }

    /// The sub-matching on the given edge indices.
    pub fn select(&self, indices: &[usize]) -> Result<Matching> {
        Matching::new(self.r, indices.iter().map(|&i| self.edges[i].clone()).collect())
    }

    fn sorted_vertices(&self) -> Vec<i64> {
        let mut vs: Vec<i64> = self.edges.iter().flatten().copied().collect();
        vs.sort_unstable();
        vs
    }

    /// Relabels vertices to `1..=r*n` preserving order.
    pub fn normalize(&self) -> Matching {
        let vs = self.sorted_vertices();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                e.iter()
                    .map(|v| vs.binary_search(v).expect("vertex present") as i64 + 1)
                    .collect()
            })
            .collect();
        Matching { r: self.r, edges }
    }

    pub fn is_normalized(&self) -> bool {
        let vs = self.sorted_vertices();
        vs.iter().enumerate().all(|(i, &v)| v == i as i64 + 1)
    }

    /// Text format: `"r n"` header then one ascending edge per line, sorted by
    /// first element, LF-terminated.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.r, self.edges.len()).unwrap();
        for e in &self.edges {
            let line: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad header {header:?}"))))
            .collect::<Result<_>>()?;
        let [r, n] = nums[..] else {
            return Err(Error::Parse(format!("header must be \"r n\", got {header:?}")));
        };
        let mut edges = Vec::with_capacity(n);
        for line in lines {
            let e: Vec<i64> = line
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad edge line {line:?}"))))
                .collect::<Result<_>>()?;
            if e.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse(format!("edge {line:?} is not strictly ascending")));
            }
            edges.push(e);
        }
        if edges.len() != n {
            return Err(Error::Parse(format!("header says {n} edges, found {}", edges.len())));
        }
        Matching::new(r, edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MatchingJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Matching::new(raw.r, raw.edges)
    }

    /// Accepts either the text format or the JSON object form.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Matching::from_json(text)
        } else {
            Matching::from_text(text)
        }
    }
}

/// Cut thresholds `c_0 < ... < c_s` witnessing λ-partiteness; integer `c`
/// stands for the real threshold `c + 1/2`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PartiteWitness {
    pub partition: OrderedPartition,
    pub cuts: Vec<i64>,
}

impl PartiteWitness {
    pub fn parts(&self) -> usize {
        self.partition.len()
    }

    /// Elements of `edge` strictly between thresholds `i` and `i + 1`.
    pub fn block<'a>(&self, edge: &'a [i64], i: usize) -> &'a [i64] {
        let lo = edge.partition_point(|&v| v <= self.cuts[i]);
        let hi = edge.partition_point(|&v| v <= self.cuts[i + 1]);
        &edge[lo..hi]
    }

    /// Checks the defining condition `|e ∩ (x_{i-1}, x_i)| = λ_i` for every edge.
    pub fn check(&self, m: &Matching) -> Result<()> {
        let s = self.partition.len();
        if self.cuts.len() != s + 1 {
            return Err(Error::InvalidWitness(format!(
                "{} cuts for {} parts",
                self.cuts.len(),
                s
            )));
        }
        if self.cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidWitness("cuts must increase".into()));
        }
        if self.partition.total() != m.uniformity() {
            return Err(Error::InvalidWitness(format!(
                "partition {} is not of {}",
                self.partition,
                m.uniformity()
            )));
        }
        for e in m.edges() {
            for (i, &want) in self.partition.parts().iter().enumerate() {
                if self.block(e, i).len() != want {
                    return Err(Error::InvalidWitness(format!(
                        "edge {e:?} has {} elements in part {}",
                        self.block(e, i).len(),
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Finds cut positions making `m` λ-partite, if any.
///
/// Every vertex lies in some edge, so the `i`-th cut must sit right after the
/// `n (λ_1 + ... + λ_i)`-th smallest vertex; the candidate is unique up to
/// sliding inside vertex gaps.
pub fn find_partite_witness(m: &Matching, partition: &OrderedPartition) -> Option<PartiteWitness> {
    if partition.total() != m.uniformity() {
        return None;
    }
    let vs = m.sorted_vertices();
    let n = m.len();
    let mut cuts = vec![vs[0] - 1];
    let mut rank = 0;
    for &p in partition.parts() {
        rank += p * n;
        cuts.push(vs[rank - 1]);
    }
    let w = PartiteWitness {
        partition: partition.clone(),
        cuts,
    };
    w.check(m).ok().map(|_| w)
}

/// Whether the per-part hulls `conv(e ∩ (x_{i-1}, x_i))` are pairwise disjoint.
pub fn is_interval_wise(m: &Matching, w: &PartiteWitness) -> Result<bool> {
    w.check(m)?;
    for i in 0..w.parts() {
        let mut hulls: Vec<(i64, i64)> = m
            .edges()
            .iter()
            .map(|e| {
                let b = w.block(e, i);
                (b[0], b[b.len() - 1])
            })
            .collect();
        hulls.sort_unstable();
        if hulls.windows(2).any(|h| h[0].1 > h[1].0) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_r_partite(m: &Matching) -> bool {
    find_partite_witness(m, &OrderedPartition::singletons(m.uniformity())).is_some()
}

/// `H[H_r]`: a copy of the r-partite `H_r` placed inside every edge of `H`.
///
/// Uses the smallest power of ten strictly above every gap of the `H_r`
/// witness as scale, then normalizes.
pub fn blow_up(h: &Matching, hr: &Matching) -> Result<Matching> {
    let w = r_partite_witness(h, hr)?;
    let gap = w.cuts.windows(2).map(|c| c[1] - c[0]).max().unwrap_or(1);
    let mut scale = 1i64;
    while scale <= gap {
        scale = scale.checked_mul(10).ok_or(Error::Overflow)?;
    }
    blow_up_with_scale(h, hr, scale)
}

/// Blow-up with an explicit scale `N`, which must exceed every witness gap.
///
/// Each vertex `y` of `H_r` in part `i` is offset to `y - c_{i-1}`, so the
/// copies of vertex `x` of `H` occupy `N x + (1..=gap)`.
pub fn blow_up_with_scale(h: &Matching, hr: &Matching, scale: i64) -> Result<Matching> {
    let w = r_partite_witness(h, hr)?;
    let gap = w.cuts.windows(2).map(|c| c[1] - c[0]).max().unwrap_or(1);
    if scale <= gap {
        return Err(Error::InvalidWitness(format!("scale {scale} does not exceed gap {gap}")));
    }
    let mut edges = Vec::with_capacity(h.len() * hr.len());
    for e in h.edges() {
        for f in hr.edges() {
            let edge = e
                .iter()
                .zip(f)
                .enumerate()
                .map(|(i, (&x, &y))| {
                    x.checked_mul(scale)
                        .and_then(|v| v.checked_add(y - w.cuts[i]))
                        .ok_or(Error::Overflow)
                })
                .collect::<Result<Vec<_>>>()?;
            edges.push(edge);
        }
    }
    Ok(Matching::new(h.uniformity(), edges)?.normalize())
}

fn r_partite_witness(h: &Matching, hr: &Matching) -> Result<PartiteWitness> {
    if h.uniformity() != hr.uniformity() {
        return Err(Error::UniformityMismatch {
            expected: h.uniformity(),
            found: hr.uniformity(),
        });
    }
    find_partite_witness(hr, &OrderedPartition::singletons(hr.uniformity())).ok_or(Error::NotRPartite)
}

/// Uniformly random partition of `1..=r*n` into `n` r-sets, fixed by `seed`.
///
/// Shuffles the vertices with ChaCha8 and cuts the permutation into consecutive
/// blocks of `r`; every set partition arises from `n! (r!)^n` permutations.
pub fn random_matching(n: usize, r: usize, seed: u64) -> Result<Matching> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vs: Vec<i64> = (1..=(r * n) as i64).collect();
    vs.shuffle(&mut rng);
    Matching::new(r, vs.chunks(r.max(1)).map(|c| c.to_vec()).collect())
}

/// Random r-partite matching: the `i`-th vertices of all edges fill block
/// `(i-1)n+1 ..= in`, matched by independent random permutations.
pub fn random_r_partite(n: usize, r: usize, seed: u64) -> Result<Matching> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = vec![Vec::with_capacity(r); n];
    for i in 0..r {
        let mut block: Vec<i64> = (1..=n as i64).map(|v| v + (i * n) as i64).collect();
        block.shuffle(&mut rng);
        for (e, v) in edges.iter_mut().zip(block) {
            e.push(v);
        }
    }
    Matching::new(r, edges)
}
