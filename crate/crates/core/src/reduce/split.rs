//! Splitting `T = T^(1) + T^(2)` along a partition pair and the metrics
//! induced on the two factors.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::metric::MetricT;
use crate::reduce::partition::{part_index, Partition, PartitionPair};

#[derive(Debug, Clone)]
pub struct Split {
    /// Agrees with `P1`.
    pub t1: DMatrix<f64>,
    /// Agrees with `P2`.
    pub t2: DMatrix<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitFailure {
    /// A non-zero entry `T_ij` with `i, j` in different parts of both partitions.
    Pattern { i: usize, j: usize, value: f64 },
    /// `T - T^(1) - T^(2)` is not small, i.e. `T 1` is not close enough to zero.
    Reassembly(f64),
}

/// `T` splits along the pair iff every off-diagonal entry of size at least
/// `split_tol * max|T|` joins two indices in a common part of `P1` or of `P2`.
pub fn check_split(t: &MetricT, pair: &PartitionPair, split_tol: f64) -> std::result::Result<Split, SplitFailure> {
    let m = t.m();
    let tm = t.t();
    let scale = tm.amax();
    let zero = split_tol * scale;
    let a = part_index(&pair.p1, m);
    let b = part_index(&pair.p2, m);
    let mut t1 = DMatrix::zeros(m, m);
    let mut t2 = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let v = tm[(i, j)];
            if a[i] == a[j] {
                t1[(i, j)] = v;
            } else if b[i] == b[j] {
                t2[(i, j)] = v;
            } else if v.abs() >= zero {
                return Err(SplitFailure::Pattern { i: i.min(j), j: i.max(j), value: v });
            }
        }
    }
    for part in [&mut t1, &mut t2] {
        for i in 0..m {
            let off: f64 = (0..m).filter(|&j| j != i).map(|j| part[(i, j)]).sum();
            part[(i, i)] = -off;
        }
    }
    let residual = (tm - &t1 - &t2).amax();
    let allowed = (1e-8_f64).max(m as f64 * split_tol) * scale;
    if residual > allowed {
        return Err(SplitFailure::Reassembly(residual));
    }
    Ok(Split { t1, t2, residual })
}

/// Indicator vectors of the parts as the columns of an `m x k` matrix.
pub fn indicator_matrix(parts: &Partition, m: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(m, parts.len());
    for (k, part) in parts.iter().enumerate() {
        for &i in part {
            x[(i, k)] = 1.0;
        }
    }
    x
}

/// Metric on the factor `span{χ_i} ⊗ f ≅ k f`, in its own Killing form:
/// `T' = X^T T X` for the indicator matrix `X`.
pub fn factor_metric(t: &MetricT, parts: &Partition) -> Result<MetricT> {
    let m = t.m();
    let mut seen = vec![false; m];
    for &i in parts.iter().flatten() {
        if i >= m || seen[i] {
            return Err(Error::InvalidParameter(format!("not a partition of 0..{m}")));
        }
        seen[i] = true;
    }
    if seen.iter().any(|s| !s) || parts.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need a partition of 0..{m} into at least two parts"
        )));
    }
    let x = indicator_matrix(parts, m);
    let reduced = x.transpose() * t.t() * &x;
    let k = parts.len();
    MetricT::new(reduced).map_err(|_| Error::DegenerateFactor {
        rank: crate::linalg::rank(&(x.transpose() * t.t() * &x), t.t().amax()),
        expected: k - 1,
    })
}

/// Product of `F^{ma}/diag` with metric `a` and `F^{mb}/diag` with metric `b`,
/// realised on `F^{ma + mb - 1}/diag`: `b` sits on the indices `0..mb` and `a`
/// on `{0} ∪ {mb, ..., ma + mb - 2}`. The pair
/// `{ {0..mb} | singletons , {0, mb..} | singletons }` splits it, with factors
/// isometric to `a` and `b`.
pub fn product_metric(a: &MetricT, b: &MetricT) -> MetricT {
    let (ma, mb) = (a.m(), b.m());
    let m = ma + mb - 1;
    let mut t = DMatrix::zeros(m, m);
    t.view_mut((0, 0), (mb, mb)).copy_from(b.t());
    let place = |i: usize| if i == 0 { 0 } else { mb + i - 1 };
    for i in 0..ma {
        for j in 0..ma {
            t[(place(i), place(j))] += a.t()[(i, j)];
        }
    }
    MetricT::new(t).expect("sum of metrics on complementary factors is a metric")
}

/// The pair that splits [`product_metric`]`(a, b)`.
pub fn product_pair(ma: usize, mb: usize) -> PartitionPair {
    let m = ma + mb - 1;
    let mut pa: Partition = vec![(0..mb).collect()];
    pa.extend((mb..m).map(|i| vec![i]));
    let mut pb: Partition = vec![std::iter::once(0).chain(mb..m).collect()];
    pb.extend((1..mb).map(|i| vec![i]));
    PartitionPair::new(pa, pb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.split('|')
            .map(|part| part.chars().map(|c| c.to_digit(10).unwrap() as usize - 1).collect())
            .collect()
    }

    fn path3() -> MetricT {
        MetricT::from_rows(&[
            vec![2.0, -2.0, 0.0],
            vec![-2.0, 3.0, -1.0],
            vec![0.0, -1.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn path_metric_splits() {
        let pair = PartitionPair::new(p("1|23"), p("12|3"));
        let s = check_split(&path3(), &pair, 1e-9).unwrap();
        // the pair is stored as ({1|23}, {12|3}) after canonical ordering
        let (with_23, with_12) = if pair.p1 == p("1|23") { (&s.t1, &s.t2) } else { (&s.t2, &s.t1) };
        assert_eq!(with_23[(1, 2)], -1.0);
        assert_eq!(with_23[(0, 1)], 0.0);
        assert_eq!(with_12[(0, 1)], -2.0);
        assert_eq!(with_12[(1, 2)], 0.0);
        assert!(s.residual < 1e-15);
    }

    #[test]
    fn standard_metric_never_splits() {
        for m in 3..=5 {
            let t = MetricT::standard(m);
            for pair in crate::reduce::enumerate_partition_pairs(m).unwrap().iter() {
                assert!(check_split(&t, pair, 1e-9).is_err());
            }
        }
    }

    #[test]
    fn factor_metric_examples() {
        let t = path3();
        let singletons = vec![vec![0], vec![1], vec![2]];
        assert_eq!(factor_metric(&t, &singletons).unwrap().t(), t.t());

        let m = 6;
        let parts = p("124|35|6");
        let f = factor_metric(&MetricT::standard(m), &parts).unwrap();
        let s = [3.0, 2.0, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { s[i] } else { 0.0 } - s[i] * s[j] / m as f64;
                assert!((f.t()[(i, j)] - want).abs() < 1e-14);
            }
        }
        assert!(factor_metric(&t, &vec![vec![0, 1, 2]]).is_err());
        assert!(factor_metric(&t, &vec![vec![0, 1], vec![1, 2]]).is_err());
    }

    #[test]
    fn product_metric_splits_into_its_factors() {
        let a = path3();
        let b = MetricT::standard(4);
        let t = product_metric(&a, &b);
        let pair = product_pair(3, 4);
        assert!(pair.satisfies_conditions());
        check_split(&t, &pair, 1e-9).unwrap();
        let for_a: Partition = vec![vec![0, 1, 2, 3], vec![4], vec![5]];
        assert!((factor_metric(&t, &for_a).unwrap().t() - a.t()).amax() < 1e-14);
        let for_b: Partition = vec![vec![0, 4, 5], vec![1], vec![2], vec![3]];
        assert!((factor_metric(&t, &for_b).unwrap().t() - b.t()).amax() < 1e-14);
    }
}
