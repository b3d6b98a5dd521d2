//! The three representations of an invariant metric and conversions between them.
//!
//! A metric is determined by the symmetric operator `T` on `R^m` with
//! `C(a X) = (T a) X`, where `C` is the metric endomorphism of `m`. `T` has
//! kernel `1` and is positive on `1^⊥`. The quadratic-form representation
//! `a_ij` lives on the complement `g_m = {last component zero}` and is the
//! one the natural-reductivity criteria are phrased in.

use nalgebra::{DMatrix, DVector};

use crate::coeff::{self, AdaptedSystem, CoeffVector};
use crate::error::{Error, Result};
use crate::linalg::{canonical_sign, zero_sum_basis};

const SYMMETRY_TOL: f64 = 1e-10;
const KERNEL_TOL: f64 = 1e-9;
const DEFINITE_TOL: f64 = 1e-12;
const SATURATION_TOL: f64 = 1e-8;

fn check_symmetric(mat: &DMatrix<f64>, what: &str) -> Result<()> {
    if !mat.is_square() {
        return Err(Error::InvalidMetric(format!("{what} is not square")));
    }
    if mat.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidMetric(format!("{what} has non-finite entries")));
    }
    let scale = mat.amax().max(f64::MIN_POSITIVE);
    let asym = (mat - mat.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::InvalidMetric(format!(
            "{what} is not symmetric (asymmetry {asym:e})"
        )));
    }
    Ok(())
}

fn symmetrize(mat: &DMatrix<f64>) -> DMatrix<f64> {
    (mat + mat.transpose()) * 0.5
}

/// `f(x) = Σ a_ij x_i x_j` on `g_m`, an `(m-1) x (m-1)` positive definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricForm {
    m: usize,
    a: DMatrix<f64>,
}

impl MetricForm {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&a, "form")?;
        let m = a.nrows() + 1;
        if m < 2 {
            return Err(Error::InvalidMetric("need m >= 2".into()));
        }
        let a = symmetrize(&a);
        let eig = a.clone().symmetric_eigen().eigenvalues;
        let (lo, hi) = (eig.min(), eig.max());
        if !(lo > 0.0 && lo > DEFINITE_TOL * hi) {
            return Err(Error::InvalidMetric(format!(
                "form is not positive definite (smallest eigenvalue {lo:e})"
            )));
        }
        Ok(Self { m, a })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    /// The Killing metric: `a_ij = δ_ij - 1/m`.
    pub fn standard(m: usize) -> Self {
        MetricT::standard(m).to_form()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn to_t(&self) -> MetricT {
        form_to_t(self)
    }
}

/// The operator `T` on `R^m`: symmetric, `T 1 = 0`, positive on `1^⊥`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricT {
    m: usize,
    t: DMatrix<f64>,
}

impl MetricT {
    pub fn new(t: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&t, "T")?;
        let m = t.nrows();
        if m < 2 {
            return Err(Error::InvalidMetric("need m >= 2".into()));
        }
        let t = symmetrize(&t);
        let scale = t.amax();
        if scale == 0.0 {
            return Err(Error::InvalidMetric("T is zero".into()));
        }
        let row_sum = (&t * coeff::ones(m)).amax();
        if row_sum > KERNEL_TOL * scale {
            return Err(Error::InvalidMetric(format!(
                "T does not annihilate the constant vector (row sum {row_sum:e})"
            )));
        }
        let q = zero_sum_basis(m);
        let eig = (q.transpose() * &t * &q).symmetric_eigen().eigenvalues;
        let (lo, hi) = (eig.min(), eig.max());
        if !(lo > 0.0 && lo > DEFINITE_TOL * hi) {
            return Err(Error::InvalidMetric(format!(
                "T is not positive definite on the zero-sum hyperplane (smallest eigenvalue {lo:e})"
            )));
        }
        Ok(Self { m, t })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    /// `I - J/m`, the operator of the Killing metric.
    pub fn standard(m: usize) -> Self {
        let t = DMatrix::identity(m, m) - DMatrix::from_element(m, m, 1.0 / m as f64);
        Self { m, t }
    }

    /// `Σ γ_i b^i (b^i)^T` for an adapted system.
    pub fn from_system(sys: &AdaptedSystem) -> Result<Self> {
        if !coeff::is_adapted(sys, 1e-8) {
            return Err(Error::InvalidMetric("system is not adapted".into()));
        }
        if let Some((i, g)) = sys.gammas.iter().enumerate().find(|(_, g)| !(**g > 0.0)) {
            return Err(Error::InvalidMetric(format!("eigenvalue {i} is not positive ({g})")));
        }
        Self::new(sys.metric_matrix())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t(&self) -> &DMatrix<f64> {
        &self.t
    }

    pub fn to_form(&self) -> MetricForm {
        t_to_form(self)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(&self.t * c)
    }
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::Dimension {
            expected: n,
            got: bad.len(),
        });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// The unique `T` with `T 1 = 0` and `(p^i)^T T p^j = a_ij`, where
/// `p^i = e_i - 1/m` is the `m`-projection of the `i`-th direction of `g_m`.
///
/// Since `T 1 = 0`, `(p^i)^T T p^j = T_ij`, so `T` borders `a` with
/// entries making every row sum vanish.
pub fn form_to_t(f: &MetricForm) -> MetricT {
    let m = f.m;
    let n = m - 1;
    let mut t = DMatrix::zeros(m, m);
    t.view_mut((0, 0), (n, n)).copy_from(&f.a);
    let mut total = 0.0;
    for i in 0..n {
        let s: f64 = f.a.row(i).sum();
        t[(i, n)] = -s;
        t[(n, i)] = -s;
        total += s;
    }
    t[(n, n)] = total;
    MetricT { m, t }
}

/// Inverse of [`form_to_t`]: `a_ij = (p^i)^T T p^j = T_ij` for `i, j < m`.
pub fn t_to_form(t: &MetricT) -> MetricForm {
    let n = t.m - 1;
    MetricForm {
        m: t.m,
        a: t.t.view((0, 0), (n, n)).into_owned(),
    }
}

/// Orthonormal eigenbasis of `T` on `1^⊥`, grouped into eigenvalue clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenData {
    /// Vectors ordered by increasing eigenvalue; within a self-saturated
    /// cluster they are the canonical self-saturated basis.
    pub system: AdaptedSystem,
    /// Index sets into `system`, one per cluster, in increasing eigenvalue order.
    pub clusters: Vec<Vec<usize>>,
    /// Whether each cluster's eigenspace is self-saturated.
    pub saturated: Vec<bool>,
}

impl EigenData {
    /// Cluster id of each vector of the system.
    pub fn cluster_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.system.len()];
        for (c, members) in self.clusters.iter().enumerate() {
            for &i in members {
                out[i] = c;
            }
        }
        out
    }

    pub fn all_saturated(&self) -> bool {
        self.saturated.iter().all(|&s| s)
    }
}

pub fn eigendecompose(t: &MetricT, cluster_tol: f64) -> EigenData {
    eigendecompose_with_tol(t, cluster_tol, SATURATION_TOL)
}

/// As [`eigendecompose`], with `tol` governing the self-saturation test.
pub fn eigendecompose_with_tol(t: &MetricT, cluster_tol: f64, tol: f64) -> EigenData {
    let m = t.m;
    let q = zero_sum_basis(m);
    let eig = (q.transpose() * &t.t * &q).symmetric_eigen();
    let mut order: Vec<usize> = (0..m - 1).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let raw_vecs: Vec<CoeffVector> = order
        .iter()
        .map(|&i| &q * eig.eigenvectors.column(i))
        .collect();
    let raw_gammas: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let ids = coeff::cluster_ids(&raw_gammas, cluster_tol);
    let n_clusters = ids.iter().copied().max().map_or(0, |x| x + 1);
    let mut vectors = Vec::with_capacity(m - 1);
    let mut gammas = Vec::with_capacity(m - 1);
    let mut clusters = Vec::with_capacity(n_clusters);
    let mut saturated = Vec::with_capacity(n_clusters);
    for c in 0..n_clusters {
        let mut members: Vec<CoeffVector> = (0..raw_vecs.len())
            .filter(|&i| ids[i] == c)
            .map(|i| raw_vecs[i].clone())
            .collect();
        let ok = if members.len() == 1 {
            canonical_sign(&mut members[0]);
            true
        } else {
            match coeff::self_saturated_basis(&members, tol) {
                Ok(basis) if basis.len() == members.len() => {
                    members = basis;
                    true
                }
                _ => false,
            }
        };
        let start = vectors.len();
        for b in members {
            gammas.push(rayleigh(&t.t, &b));
            vectors.push(b);
        }
        clusters.push((start..vectors.len()).collect());
        saturated.push(ok);
    }
    EigenData {
        system: AdaptedSystem { vectors, gammas },
        clusters,
        saturated,
    }
}

fn rayleigh(t: &DMatrix<f64>, b: &DVector<f64>) -> f64 {
    (t * b).dot(b) / b.norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b1() -> CoeffVector {
        DVector::from_vec(vec![1.0, -1.0, 0.0]) / 2f64.sqrt()
    }
    fn b2() -> CoeffVector {
        DVector::from_vec(vec![1.0, 1.0, -2.0]) / 6f64.sqrt()
    }

    #[test]
    fn form_to_t_examples() {
        let f = MetricForm::from_rows(&[vec![0.5]]).unwrap();
        let t = form_to_t(&f);
        let expected = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]);
        assert!((t.t() - &expected).amax() < 1e-15);
        assert!((t.t() - MetricT::standard(2).t()).amax() < 1e-15);

        let c = 3.7;
        let t = form_to_t(&MetricForm::from_rows(&[vec![c]]).unwrap());
        assert!((t.t() - expected * (2.0 * c)).amax() < 1e-14);

        for m in 2..=7 {
            let a = DMatrix::from_fn(m - 1, m - 1, |i, j| f64::from(u8::from(i == j)) - 1.0 / m as f64);
            let t = form_to_t(&MetricForm::new(a).unwrap());
            assert!((t.t() - MetricT::standard(m).t()).amax() < 1e-14);
        }
    }

    #[test]
    fn t_to_form_examples() {
        let f = MetricT::standard(4).to_form();
        for i in 0..3 {
            for j in 0..3 {
                let want = f64::from(u8::from(i == j)) - 0.25;
                assert!((f.a()[(i, j)] - want).abs() < 1e-15);
            }
        }
        let t = MetricT::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert!((t.to_form().a()[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn t_to_form_matches_projection_definition() {
        let t = MetricT::from_rows(&[
            vec![2.0, -2.0, 0.0],
            vec![-2.0, 3.0, -1.0],
            vec![0.0, -1.0, 1.0],
        ])
        .unwrap();
        let m = 3;
        let p = |i: usize| {
            let mut v = DVector::from_element(m, -1.0 / m as f64);
            v[i] += 1.0;
            v
        };
        let f = t.to_form();
        for i in 0..2 {
            for j in 0..2 {
                let direct = p(i).dot(&(t.t() * p(j)));
                assert!((f.a()[(i, j)] - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn invalid_metrics_rejected() {
        assert!(MetricT::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).is_err());
        assert!(MetricT::from_rows(&[vec![1.0, -1.0], vec![-1.0, 2.0]]).is_err());
        // rank deficient on 1^⊥
        let b = b1();
        assert!(MetricT::new(&b * b.transpose()).is_err());
        assert!(MetricForm::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        assert!(MetricForm::from_rows(&[vec![1.0, 0.0], vec![0.5, 1.0]]).is_err());
        assert!(MetricForm::from_rows(&[vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn eigendecompose_standard_is_single_cluster() {
        for m in 2..=6 {
            let e = eigendecompose(&MetricT::standard(m), 1e-8);
            assert_eq!(e.clusters.len(), 1);
            assert_eq!(e.clusters[0].len(), m - 1);
            assert!(e.all_saturated());
            assert!(e.system.gammas.iter().all(|g| (g - 1.0).abs() < 1e-12));
            assert!(coeff::is_adapted(&e.system, 1e-10));
        }
    }

    #[test]
    fn eigendecompose_rank_one_construction() {
        let t = MetricT::new(b1() * b1().transpose() + 2.0 * b2() * b2().transpose()).unwrap();
        let e = eigendecompose(&t, 1e-8);
        assert_eq!(e.clusters, vec![vec![0], vec![1]]);
        assert!((e.system.gammas[0] - 1.0).abs() < 1e-12);
        assert!((e.system.gammas[1] - 2.0).abs() < 1e-12);
        assert!((e.system.vectors[0].dot(&b1()).abs() - 1.0).abs() < 1e-12);
        assert!((e.system.vectors[1].dot(&b2()).abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigendecompose_path_metric() {
        let t = MetricT::from_rows(&[
            vec![2.0, -2.0, 0.0],
            vec![-2.0, 3.0, -1.0],
            vec![0.0, -1.0, 1.0],
        ])
        .unwrap();
        let e = eigendecompose(&t, 1e-8);
        let g = &e.system.gammas;
        assert!((g[0] + g[1] - 6.0).abs() < 1e-12);
        // characteristic polynomial on 1^⊥: γ^2 - 6γ + 6
        assert!((g[0] - (3.0 - 3f64.sqrt())).abs() < 1e-12);
        assert!((g[1] - (3.0 + 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn non_saturated_cluster_is_flagged() {
        // eigenspace span{(1,-1,0,0), (0,0,1,-1)} is not self-saturated
        let u = DVector::from_vec(vec![1.0, -1.0, 0.0, 0.0]) / 2f64.sqrt();
        let v = DVector::from_vec(vec![0.0, 0.0, 1.0, -1.0]) / 2f64.sqrt();
        let w = DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0]) / 2.0;
        let t = MetricT::new(&u * u.transpose() + &v * v.transpose() + 3.0 * &w * w.transpose()).unwrap();
        let e = eigendecompose(&t, 1e-8);
        assert_eq!(e.clusters.len(), 2);
        assert_eq!(e.saturated, vec![false, true]);
    }

    fn random_system(m: usize, seed: &[f64], gam: &[f64]) -> AdaptedSystem {
        let q = zero_sum_basis(m);
        let raw = DMatrix::from_fn(m - 1, m - 1, |i, j| seed[i * (m - 1) + j]);
        let qr = (raw + DMatrix::identity(m - 1, m - 1) * 3.0).qr().q();
        let basis = &q * qr;
        AdaptedSystem {
            vectors: (0..m - 1).map(|i| basis.column(i).into_owned()).collect(),
            gammas: gam[..m - 1].to_vec(),
        }
    }

    proptest! {
        #[test]
        fn round_trips_and_reconstruction(
            m in 2usize..7,
            seed in proptest::collection::vec(-1.0f64..1.0, 36),
            gam in proptest::collection::vec(0.1f64..5.0, 6),
        ) {
            let sys = random_system(m, &seed, &gam);
            let t = MetricT::from_system(&sys).unwrap();
            let f = t.to_form();
            prop_assert!(MetricForm::new(f.a().clone()).is_ok());
            let back = f.to_t();
            prop_assert!((back.t() - t.t()).amax() < 1e-10);
            prop_assert!((back.to_form().a() - f.a()).amax() < 1e-10);

            let e = eigendecompose(&t, 1e-8);
            for (b, g) in e.system.vectors.iter().zip(&e.system.gammas) {
                prop_assert!((t.t() * b - b * *g).norm() < 1e-8);
                prop_assert!(*g > 0.0);
            }
            prop_assert!((e.system.metric_matrix() - t.t()).amax() < 1e-8);
        }

        #[test]
        fn positive_definite_form_iff_valid_t(
            m in 2usize..6,
            entries in proptest::collection::vec(-2.0f64..2.0, 25),
        ) {
            let n = m - 1;
            let raw = DMatrix::from_fn(n, n, |i, j| entries[i * 5 + j]);
            let a = &raw + raw.transpose();
            let form_ok = MetricForm::new(a.clone()).is_ok();
            let mut t = DMatrix::zeros(m, m);
            t.view_mut((0, 0), (n, n)).copy_from(&a);
            for i in 0..n {
                let s: f64 = a.row(i).sum();
                t[(i, n)] = -s;
                t[(n, i)] = -s;
            }
            t[(n, n)] = a.sum();
            prop_assert_eq!(form_ok, MetricT::new(t).is_ok());
        }
    }
}
