//! Pairs of partitions of `{0..m-1}` that can split a metric, enumerated
//! through edge-labelled trees on `m + 1` vertices.
//!
//! For a tree whose edges carry the labels `0..m-1`, 2-colour the vertices;
//! the labels around each white vertex form the parts of `P1`, those around
//! each black vertex the parts of `P2`. Stars are excluded (one colour class
//! would be a single vertex).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Partition = Vec<Vec<usize>>;

/// Two partitions with `|P1| + |P2| = m + 1`, both with at least two parts,
/// such that no proper union of `P1`-parts equals a union of `P2`-parts and
/// any two parts from different partitions share at most one element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PartitionPair {
    pub p1: Partition,
    pub p2: Partition,
}

/// Sort every part and order the parts by their smallest element.
pub fn canonical_partition(mut p: Partition) -> Partition {
    for part in p.iter_mut() {
        part.sort_unstable();
    }
    p.retain(|part| !part.is_empty());
    p.sort();
    p
}

impl PartitionPair {
    /// Canonicalises both partitions and orders the pair by number of parts,
    /// then lexicographically.
    pub fn new(p1: Partition, p2: Partition) -> Self {
        let (a, b) = (canonical_partition(p1), canonical_partition(p2));
        if (a.len(), &a) <= (b.len(), &b) {
            Self { p1: a, p2: b }
        } else {
            Self { p1: b, p2: a }
        }
    }

    pub fn m(&self) -> usize {
        self.p1.iter().map(Vec::len).sum()
    }

    /// The tree certificate: one edge per element `i`, joining the `P1`-part
    /// and the `P2`-part that contain `i`. Entries are `(p1 part, p2 part, i)`.
    pub fn tree_edges(&self) -> Vec<(usize, usize, usize)> {
        let m = self.m();
        let a = part_index(&self.p1, m);
        let b = part_index(&self.p2, m);
        (0..m).map(|i| (a[i], b[i], i)).collect()
    }

    /// Checks the defining conditions directly.
    pub fn satisfies_conditions(&self) -> bool {
        let m = self.m();
        let (m1, m2) = (self.p1.len(), self.p2.len());
        if m1 < 2 || m2 < 2 || m1 + m2 != m + 1 {
            return false;
        }
        for a in &self.p1 {
            for b in &self.p2 {
                if a.iter().filter(|x| b.contains(x)).count() > 1 {
                    return false;
                }
            }
        }
        // the bipartite part graph with one edge per element must be connected,
        // which is the same as the union condition
        let idx1 = part_index(&self.p1, m);
        let idx2 = part_index(&self.p2, m);
        let mut seen1 = vec![false; m1];
        let mut seen2 = vec![false; m2];
        let mut stack = vec![(true, 0)];
        seen1[0] = true;
        while let Some((white, v)) = stack.pop() {
            for i in 0..m {
                if white && idx1[i] == v && !seen2[idx2[i]] {
                    seen2[idx2[i]] = true;
                    stack.push((false, idx2[i]));
                } else if !white && idx2[i] == v && !seen1[idx1[i]] {
                    seen1[idx1[i]] = true;
                    stack.push((true, idx1[i]));
                }
            }
        }
        seen1.iter().all(|&s| s) && seen2.iter().all(|&s| s)
    }
}

pub(crate) fn part_index(p: &Partition, m: usize) -> Vec<usize> {
    let mut idx = vec![usize::MAX; m];
    for (k, part) in p.iter().enumerate() {
        for &i in part {
            idx[i] = k;
        }
    }
    idx
}

/// One-based display, e.g. `123|467|5`; elements above 9 are comma separated.
pub fn format_partition(p: &Partition) -> String {
    let wide = p.iter().flatten().any(|&i| i >= 9);
    p.iter()
        .map(|part| {
            let items: Vec<String> = part.iter().map(|i| (i + 1).to_string()).collect();
            items.join(if wide { "," } else { "" })
        })
        .collect::<Vec<_>>()
        .join("|")
}

impl fmt::Display for PartitionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", format_partition(&self.p1), format_partition(&self.p2))
    }
}

/// Edges of the labelled tree on `0..n` with the given Prüfer sequence.
pub fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf, s));
        degree[leaf] = 0;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// The pair read off a vertex-labelled tree on `0..=m`, rooting at `m` and
/// giving the edge from `v` to its parent the label `v`.
pub fn pair_from_tree(edges: &[(usize, usize)], m: usize) -> PartitionPair {
    let n = m + 1;
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut parent = vec![usize::MAX; n];
    let mut colour = vec![false; n];
    let mut order = vec![m];
    parent[m] = m;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &w in &adj[v] {
            if parent[w] == usize::MAX {
                parent[w] = v;
                colour[w] = !colour[v];
                order.push(w);
            }
        }
    }
    let mut white = Vec::new();
    let mut black = Vec::new();
    for v in 0..n {
        let mut labels: Vec<usize> = adj[v]
            .iter()
            .map(|&w| if parent[w] == v { w } else { v })
            .collect();
        labels.sort_unstable();
        if colour[v] {
            black.push(labels);
        } else {
            white.push(labels);
        }
    }
    PartitionPair::new(white, black)
}

fn enumerate_uncached(m: usize) -> Vec<PartitionPair> {
    let n = m + 1;
    let len = m - 1;
    let total = n.pow(len as u32);
    let found: BTreeSet<PartitionPair> = (0..total)
        .into_par_iter()
        .fold(BTreeSet::new, |mut acc, code| {
            let mut seq = Vec::with_capacity(len);
            let mut c = code;
            for _ in 0..len {
                seq.push(c % n);
                c /= n;
            }
            if seq.iter().any(|&s| s != seq[0]) {
                acc.insert(pair_from_tree(&prufer_decode(&seq, n), m));
            }
            acc
        })
        .reduce(BTreeSet::new, |mut a, mut b| {
            a.append(&mut b);
            a
        });
    found.into_iter().collect()
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<Vec<PartitionPair>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<PartitionPair>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All partition pairs for `m`, in canonical order. Results are cached per `m`.
pub fn enumerate_partition_pairs(m: usize) -> Result<Arc<Vec<PartitionPair>>> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("partition pairs need m >= 2, got {m}")));
    }
    if m == 2 {
        return Ok(Arc::new(Vec::new()));
    }
    if let Some(hit) = cache().lock().expect("cache lock").get(&m) {
        return Ok(Arc::clone(hit));
    }
    let pairs = Arc::new(enumerate_uncached(m));
    cache()
        .lock()
        .expect("cache lock")
        .insert(m, Arc::clone(&pairs));
    Ok(pairs)
}
