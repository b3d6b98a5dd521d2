//! The geodesic orbit property through super-adapted systems.
//!
//! A metric `Σ γ_i ⟨,⟩|_{p_i}` with `p_i = b^i ⊗ f` is geodesic orbit iff
//! `{b^i}` can be chosen super-adapted with
//! `(1 - γ_i/γ_j) a^i_j = C_i` for all `j != i`, where
//! `b^i ⋄ b^j = a^j_i b^i + a^i_j b^j`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::coeff::{self, AdaptedSystem};
use crate::metric::{eigendecompose_with_tol, EigenData, MetricT};
use crate::Tolerances;

#[derive(Debug, Clone)]
pub struct GoCertificate {
    pub system: AdaptedSystem,
    /// `coef[(i, j)]` is the coefficient of `b^j` in `b^i ⋄ b^j`.
    pub coef: DMatrix<f64>,
    pub c: Vec<f64>,
    pub clusters: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub enum GoResult {
    Yes(GoCertificate),
    No(String),
    /// The canonical self-saturated bases do not fit together; the verdict
    /// has to come from elsewhere.
    IndeterminateSymbolic(String),
}

impl GoResult {
    pub fn is_yes(&self) -> bool {
        matches!(self, GoResult::Yes(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            GoResult::Yes(_) => "yes",
            GoResult::No(_) => "no",
            GoResult::IndeterminateSymbolic(_) => "indeterminate",
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            GoResult::Yes(_) => None,
            GoResult::No(r) | GoResult::IndeterminateSymbolic(r) => Some(r),
        }
    }

    pub fn certificate(&self) -> Option<&GoCertificate> {
        match self {
            GoResult::Yes(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Serialize)]
struct CertificateJson<'a> {
    basis: Vec<Vec<f64>>,
    gammas: &'a [f64],
    coef: Vec<Vec<f64>>,
    c: &'a [f64],
    clusters: &'a [Vec<usize>],
}

impl GoCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        let n = self.coef.nrows();
        serde_json::to_value(CertificateJson {
            basis: self.system.vectors.iter().map(|v| v.iter().copied().collect()).collect(),
            gammas: &self.system.gammas,
            coef: (0..n).map(|i| (0..n).map(|j| self.coef[(i, j)]).collect()).collect(),
            c: &self.c,
            clusters: &self.clusters,
        })
        .expect("certificate serializes")
    }
}

/// Runs the pipeline: eigenspaces, canonical self-saturated bases,
/// super-adaptedness across clusters, constancy of `C_i`.
pub fn classify_go(t: &MetricT, tol: &Tolerances) -> GoResult {
    let eig = eigendecompose_with_tol(t, tol.cluster_tol, tol.tol);
    classify_go_eigen(&eig, tol.tol)
}

pub fn classify_go_eigen(eig: &EigenData, tol: f64) -> GoResult {
    if let Some(c) = eig.saturated.iter().position(|&s| !s) {
        return GoResult::No(format!(
            "eigenspace of eigenvalue {:.6e} (multiplicity {}) is not self-saturated",
            eig.system.gammas[eig.clusters[c][0]],
            eig.clusters[c].len()
        ));
    }
    let sys = &eig.system;
    let ids = eig.cluster_of();
    let check = coeff::super_adapted_check(&sys.vectors, &ids, tol);
    if let Some((i, j)) = check.violation {
        let msg = format!(
            "b^{} ⋄ b^{} leaves span(b^{}, b^{}) (residual {:.3e})",
            i + 1,
            j + 1,
            i + 1,
            j + 1,
            check.max_residual
        );
        return if eig.clusters.iter().any(|c| c.len() > 1) {
            GoResult::IndeterminateSymbolic(msg)
        } else {
            GoResult::No(msg)
        };
    }
    let n = sys.len();
    let g = &sys.gammas;
    let mut cs = Vec::with_capacity(n);
    for i in 0..n {
        let vals: Vec<f64> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                if ids[i] == ids[j] {
                    0.0
                } else {
                    (1.0 - g[i] / g[j]) * check.coef_on_bj(i, j)
                }
            })
            .collect();
        if vals.is_empty() {
            cs.push(0.0);
            continue;
        }
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let size = vals.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        if hi - lo >= tol * size {
            return GoResult::No(format!(
                "C_{} is not constant: values range over [{lo:.6e}, {hi:.6e}]",
                i + 1
            ));
        }
        cs.push(vals.iter().sum::<f64>() / vals.len() as f64);
    }
    let mut coef = check.proj.clone();
    for i in 0..n {
        coef[(i, i)] = 0.0;
    }
    GoResult::Yes(GoCertificate {
        system: sys.clone(),
        coef,
        c: cs,
        clusters: eig.clusters.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn standard_metric_is_go_with_zero_constants() {
        for m in 2..=6 {
            let r = classify_go(&MetricT::standard(m), &Tolerances::default());
            let cert = r.certificate().expect("standard metric is GO");
            assert!(cert.c.iter().all(|c| c.abs() < 1e-12));
            assert_eq!(cert.clusters.len(), 1);
        }
    }

    #[test]
    fn rank_one_construction_constants() {
        let b1 = DVector::from_vec(vec![1.0, -1.0, 0.0]) / 2f64.sqrt();
        let b2 = DVector::from_vec(vec![1.0, 1.0, -2.0]) / 6f64.sqrt();
        let t = MetricT::new(&b1 * b1.transpose() + 2.0 * &b2 * b2.transpose()).unwrap();
        let cert = classify_go(&t, &Tolerances::default()).certificate().cloned().unwrap();
        // signs of the computed basis are fixed by the canonical sign rule
        let s1 = cert.system.vectors[0].dot(&b1).signum();
        let s2 = cert.system.vectors[1].dot(&b2).signum();
        assert!(cert.coef[(0, 1)].abs() < 1e-12);
        assert!(cert.c[0].abs() < 1e-12);
        assert!((s1 * s1 * s2 * cert.coef[(1, 0)] - 1.0 / 6f64.sqrt()).abs() < 1e-12);
        assert!((s2 * cert.c[1] + 1.0 / 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn non_saturated_eigenspace_is_not_go() {
        let u = DVector::from_vec(vec![1.0, -1.0, 0.0, 0.0]) / 2f64.sqrt();
        let v = DVector::from_vec(vec![0.0, 0.0, 1.0, -1.0]) / 2f64.sqrt();
        let w = DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0]) / 2.0;
        let t = MetricT::new(&u * u.transpose() + &v * v.transpose() + 3.0 * &w * w.transpose()).unwrap();
        assert!(matches!(classify_go(&t, &Tolerances::default()), GoResult::No(_)));
    }

    #[test]
    fn generic_m4_is_not_go() {
        let t = MetricT::from_rows(&[
            vec![3.0, 0.4, -0.2, -3.2],
            vec![0.4, 2.0, 0.3, -2.7],
            vec![-0.2, 0.3, 1.5, -1.6],
            vec![-3.2, -2.7, -1.6, 7.5],
        ])
        .unwrap();
        assert!(matches!(classify_go(&t, &Tolerances::default()), GoResult::No(_)));
    }
}
