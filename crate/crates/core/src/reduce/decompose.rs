//! Irreducible product decomposition by recursive binary splitting.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::classify::natred::{classify_natred, NatRedResult};
use crate::error::Result;
use crate::metric::MetricT;
use crate::reduce::partition::{enumerate_partition_pairs, Partition, PartitionPair};
use crate::reduce::split::{check_split, factor_metric, Split};

/// An irreducible factor `F^k/diag(F)`. Coordinate `i` of `t` stands for the
/// sum of the original copies listed in `labels[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub t: MetricT,
    pub labels: Partition,
}

impl Factor {
    pub fn m(&self) -> usize {
        self.t.m()
    }

    /// Reorders coordinates by their smallest original index.
    pub fn canonical(&self) -> Factor {
        let mut order: Vec<usize> = (0..self.labels.len()).collect();
        order.sort_by_key(|&i| self.labels[i].iter().min().copied());
        let k = order.len();
        let t = DMatrix::from_fn(k, k, |i, j| self.t.t()[(order[i], order[j])]);
        Factor {
            t: MetricT::new(t).expect("permuted metric stays valid"),
            labels: order.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }
}

/// One binary split performed during the decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct SplitRecord {
    /// Coordinates of the metric that was split, as sets of original indices.
    pub labels: Partition,
    pub pair: PartitionPair,
    /// Tree certificate `(P1 part, P2 part, element)`.
    pub tree: Vec<(usize, usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub m: usize,
    /// Sorted by size, then by labels.
    pub factors: Vec<Factor>,
    pub splits: Vec<SplitRecord>,
}

impl Decomposition {
    /// `Σ m_i`: the connected isometry group is `F^k`.
    pub fn isometry_group_k(&self) -> usize {
        self.factors.iter().map(Factor::m).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.factors.iter().map(Factor::m).collect()
    }
}

/// First pair in canonical order (or reverse canonical order) along which
/// `t` splits.
pub fn find_split(t: &MetricT, split_tol: f64, reverse: bool) -> Result<Option<(PartitionPair, Split)>> {
    let pairs = enumerate_partition_pairs(t.m())?;
    let hit = |pair: &PartitionPair| check_split(t, pair, split_tol).ok().map(|s| (pair.clone(), s));
    Ok(if reverse {
        pairs.iter().rev().find_map(hit)
    } else {
        pairs.iter().find_map(hit)
    })
}

pub fn decompose(t: &MetricT, split_tol: f64) -> Result<Decomposition> {
    decompose_with_order(t, split_tol, false)
}

/// As [`decompose`], trying pairs in reverse canonical order when `reverse`.
pub fn decompose_with_order(t: &MetricT, split_tol: f64, reverse: bool) -> Result<Decomposition> {
    let labels: Partition = (0..t.m()).map(|i| vec![i]).collect();
    let mut factors = Vec::new();
    let mut splits = Vec::new();
    let mut stack = vec![Factor { t: t.clone(), labels }];
    while let Some(current) = stack.pop() {
        match find_split(&current.t, split_tol, reverse)? {
            None => factors.push(current.canonical()),
            Some((pair, _)) => {
                for side in [&pair.p1, &pair.p2] {
                    let sub = factor_metric(&current.t, side)?;
                    let sub_labels = side
                        .iter()
                        .map(|part| {
                            let mut l: Vec<usize> =
                                part.iter().flat_map(|&c| current.labels[c].iter().copied()).collect();
                            l.sort_unstable();
                            l
                        })
                        .collect();
                    stack.push(Factor {
                        t: sub,
                        labels: sub_labels,
                    });
                }
                splits.push(SplitRecord {
                    labels: current.labels.clone(),
                    tree: pair.tree_edges(),
                    pair,
                });
            }
        }
    }
    factors.sort_by(|a, b| (a.m(), &a.labels).cmp(&(b.m(), &b.labels)));
    Ok(Decomposition {
        m: t.m(),
        factors,
        splits,
    })
}

/// `k` with connected isometry group `F^k`, `k = m + s - 1` for `s` factors.
pub fn isometry_group(t: &MetricT, split_tol: f64) -> Result<usize> {
    Ok(decompose(t, split_tol)?.isometry_group_k())
}

/// Natural reductivity of each factor of a decomposition.
pub fn factor_natred(dec: &Decomposition, tol: f64) -> Vec<NatRedResult> {
    dec.factors
        .iter()
        .map(|f| classify_natred(&f.t.to_form(), tol))
        .collect()
}

/// Geodesic orbit manifold iff every irreducible factor is naturally reductive.
pub fn go_manifold(t: &MetricT, split_tol: f64, tol: f64) -> Result<bool> {
    let dec = decompose(t, split_tol)?;
    Ok(factor_natred(&dec, tol).iter().all(NatRedResult::is_nr))
}
