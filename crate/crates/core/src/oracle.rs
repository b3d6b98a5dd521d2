//! Brute-force numeric checks over a concrete Lie algebra `f`.
//!
//! Elements of `m` are sampled per copy from a standard normal distribution,
//! projected to `m` and normalised in minus the Killing form. Sample `s` of a
//! run with seed `seed` uses `ChaCha8Rng::seed_from_u64(seed + s)`, so every
//! residual can be replayed from its seed.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::go::GoCertificate;
use crate::classify::natred::{NatRedResult, NatRedVerdict};
use crate::coeff::AdaptedSystem;
use crate::error::{Error, Result};
use crate::lie::{m_component, ProductElement, StructureConstants};
use crate::metric::{eigendecompose, MetricForm, MetricT};

/// Residuals below this confirm a property.
pub const CONFIRM_TOL: f64 = 1e-8;
/// Residuals above this refute it.
pub const REFUTE_TOL: f64 = 1e-4;
const RIDGE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleStatus {
    Confirmed,
    Refuted,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_residual: f64,
    /// `max_residual < tol`.
    pub verdict: bool,
    pub status: OracleStatus,
    /// Seeds of the samples with residual at least `tol`.
    pub failures: Vec<u64>,
    pub summary: ResidualSummary,
}

impl OracleReport {
    fn from_residuals(seed: u64, tol: f64, residuals: &[(u64, f64)]) -> Self {
        let mut sorted: Vec<f64> = residuals.iter().map(|r| r.1).collect();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let summary = if n == 0 {
            ResidualSummary {
                min: 0.0,
                median: 0.0,
                max: 0.0,
            }
        } else {
            let median = if n % 2 == 1 {
                sorted[n / 2]
            } else {
                0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
            };
            ResidualSummary {
                min: sorted[0],
                median,
                max: sorted[n - 1],
            }
        };
        let max_residual = summary.max;
        let status = if max_residual < tol {
            OracleStatus::Confirmed
        } else if max_residual > REFUTE_TOL.max(tol) {
            OracleStatus::Refuted
        } else {
            OracleStatus::Marginal
        };
        OracleReport {
            samples: n,
            seed,
            tol,
            max_residual,
            verdict: max_residual < tol,
            status,
            failures: residuals.iter().filter(|r| !(r.1 < tol)).map(|r| r.0).collect(),
            summary,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn run<F>(samples: usize, seed: u64, tol: f64, f: F) -> OracleReport
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let residuals: Vec<(u64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let sd = seed.wrapping_add(s);
            let mut rng = ChaCha8Rng::seed_from_u64(sd);
            let r = f(&mut rng);
            (sd, if r.is_nan() { f64::MAX } else { r })
        })
        .collect();
    OracleReport::from_residuals(seed, tol, &residuals)
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Unit random element of `m`.
pub fn random_m_element(rng: &mut ChaCha8Rng, m: usize, sc: &StructureConstants) -> ProductElement {
    let x = m_component(&ProductElement(gaussian(rng, m, sc.dim())));
    let n = sc.norm(&x);
    ProductElement(x.0 / n)
}

/// Unit random element of `span{b^i : i in idx} ⊗ f`.
fn random_in_span(rng: &mut ChaCha8Rng, sys: &AdaptedSystem, idx: &[usize], sc: &StructureConstants) -> ProductElement {
    let coeffs = gaussian(rng, idx.len(), sc.dim());
    let mut u = ProductElement::zeros(sys.m(), sc.dim());
    for (row, &i) in idx.iter().enumerate() {
        u.0 += &sys.vectors[i] * coeffs.row(row);
    }
    let n = sc.norm(&u);
    ProductElement(u.0 / n)
}

fn apply(t: &DMatrix<f64>, u: &ProductElement) -> ProductElement {
    ProductElement(t * &u.0)
}

fn add_scaled(u: &mut ProductElement, c: f64, v: &ProductElement) {
    u.0 += &v.0 * c;
}

/// `min_Z |a + Σ z_p M_p|` over `z ∈ R^k` in minus the Killing form, via ridge
/// regularised normal equations. Returns `(z, residual)`.
fn least_squares(sc: &StructureConstants, a: &ProductElement, cols: &[ProductElement]) -> (DVector<f64>, f64) {
    let k = cols.len();
    let mut n = DMatrix::from_fn(k, k, |p, q| sc.inner(&cols[p], &cols[q]));
    let rhs = DVector::from_fn(k, |p, _| -sc.inner(&cols[p], a));
    let ridge = RIDGE * (1.0 + n.trace());
    for p in 0..k {
        n[(p, p)] += ridge;
    }
    let solve = |b: &DVector<f64>| {
        n.clone()
            .cholesky()
            .map(|c| c.solve(b))
            .or_else(|| n.clone().lu().solve(b))
            .unwrap_or_else(|| DVector::zeros(k))
    };
    let residual = |z: &DVector<f64>| {
        let mut r = a.clone();
        for (p, col) in cols.iter().enumerate() {
            add_scaled(&mut r, z[p], col);
        }
        r
    };
    let mut z = solve(&rhs);
    // one step of iterative refinement against the squared conditioning
    let r = residual(&z);
    z += solve(&DVector::from_fn(k, |p, _| -sc.inner(&cols[p], &r)));
    let r = residual(&z);
    (z, sc.norm(&r))
}

fn h_basis(m: usize, dim: usize) -> Vec<ProductElement> {
    (0..dim)
        .map(|p| {
            let mut e = vec![0.0; dim];
            e[p] = 1.0;
            ProductElement::diagonal(m, &e)
        })
        .collect()
}

/// Smallest `|[X + Z, AX]_m|` over `Z ∈ h`.
pub fn go_residual(t: &MetricT, sc: &StructureConstants, x: &ProductElement) -> Result<f64> {
    let ax = apply(t.t(), x);
    let base = m_component(&sc.product_bracket(x, &ax)?);
    let cols = h_basis(t.m(), sc.dim())
        .iter()
        .map(|z| sc.product_bracket(z, &ax))
        .collect::<Result<Vec<_>>>()?;
    Ok(least_squares(sc, &base, &cols).1)
}

/// `|[X + 1 ⊗ Z_0, AX]_m|` for `Z_0 = -Σ C_k Z_k`, `X = Σ b^k ⊗ Z_k`.
pub fn go_residual_explicit(t: &MetricT, cert: &GoCertificate, sc: &StructureConstants, x: &ProductElement) -> Result<f64> {
    let dim = sc.dim();
    let mut z0 = vec![0.0; dim];
    for (b, c) in cert.system.vectors.iter().zip(&cert.c) {
        for l in 0..dim {
            let zk: f64 = (0..t.m()).map(|r| b[r] * x.0[(r, l)]).sum();
            z0[l] -= c * zk;
        }
    }
    let ax = apply(t.t(), x);
    let shifted = ProductElement(&x.0 + ProductElement::diagonal(t.m(), &z0).0);
    Ok(sc.norm(&m_component(&sc.product_bracket(&shifted, &ax)?)))
}

fn go_run(t: &MetricT, sc: &StructureConstants, samples: usize, seed: u64, tol: f64) -> OracleReport {
    run(samples, seed, tol, |rng| {
        let x = random_m_element(rng, t.m(), sc);
        go_residual(t, sc, &x).unwrap_or(f64::MAX)
    })
}

/// GO criterion `∃ Z ∈ h: [X + Z, AX] ∈ h` on random `X`. A marginal first
/// batch is followed by one fresh batch with seeds after the first.
pub fn go_oracle(t: &MetricT, sc: &StructureConstants, samples: usize, seed: u64, tol: f64) -> OracleReport {
    let first = go_run(t, sc, samples, seed, tol);
    if first.status != OracleStatus::Marginal {
        return first;
    }
    let second = go_run(t, sc, samples, seed.wrapping_add(samples as u64), tol);
    merge(&first, &second)
}

fn merge(a: &OracleReport, b: &OracleReport) -> OracleReport {
    let mut failures = a.failures.clone();
    failures.extend(&b.failures);
    let max_residual = a.max_residual.max(b.max_residual);
    let status = if max_residual < a.tol {
        OracleStatus::Confirmed
    } else if max_residual > REFUTE_TOL.max(a.tol) {
        OracleStatus::Refuted
    } else {
        OracleStatus::Marginal
    };
    OracleReport {
        samples: a.samples + b.samples,
        seed: a.seed,
        tol: a.tol,
        max_residual,
        verdict: max_residual < a.tol,
        status,
        failures,
        summary: ResidualSummary {
            min: a.summary.min.min(b.summary.min),
            // the median of the union is not recoverable; the larger of the two bounds it
            median: a.summary.median.max(b.summary.median),
            max: max_residual,
        },
    }
}

/// The proof's choice `Z_0 = -Σ C_k Z_k` on random `X`.
pub fn go_oracle_explicit(
    t: &MetricT,
    cert: &GoCertificate,
    sc: &StructureConstants,
    samples: usize,
    seed: u64,
    tol: f64,
) -> OracleReport {
    run(samples, seed, tol, |rng| {
        let x = random_m_element(rng, t.m(), sc);
        go_residual_explicit(t, cert, sc, &x).unwrap_or(f64::MAX)
    })
}

/// A certified naturally reductive pair `(p, (,))`: `p = {U : Σ ℓ_r U_r = 0}`
/// and `(U, V) = Σ q_r ⟨U_r, V_r⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct NrPair {
    pub ell: DVector<f64>,
    pub q: DVector<f64>,
}

impl NrPair {
    /// Ideal complement `⊕_{r != k} f_r` (cases (a), (b)) or the
    /// `Q`-orthogonal complement of `h` for `Q = Σ α_r ⟨,⟩_r` (case (c)).
    pub fn from_verdict(m: usize, v: &NatRedVerdict) -> Option<Self> {
        match v {
            NatRedVerdict::NotNR => None,
            NatRedVerdict::CaseA { beta } => {
                let mut q = DVector::zeros(m);
                q.rows_mut(0, m - 1).copy_from_slice(beta);
                let mut ell = DVector::zeros(m);
                ell[m - 1] = 1.0;
                Some(NrPair { ell, q })
            }
            NatRedVerdict::CaseB { k, beta } => {
                let mut ell = DVector::zeros(m);
                ell[*k] = 1.0;
                Some(NrPair {
                    ell,
                    q: DVector::from_row_slice(beta),
                })
            }
            NatRedVerdict::CaseC { alpha, .. } => Some(NrPair {
                ell: DVector::from_row_slice(alpha),
                q: DVector::from_row_slice(alpha),
            }),
        }
    }

    fn project(&self, u: &ProductElement) -> ProductElement {
        let s = self.ell.sum();
        let w = (self.ell.transpose() * &u.0) / s;
        ProductElement(DMatrix::from_fn(u.m(), u.dim(), |r, l| u.0[(r, l)] - w[l]))
    }

    fn inner(&self, sc: &StructureConstants, u: &ProductElement, v: &ProductElement) -> f64 {
        let qu = ProductElement(DMatrix::from_diagonal(&self.q) * &u.0);
        sc.inner(&qu, v)
    }

    /// Whether `(,)` is positive definite on `p` in coefficient space.
    pub fn positive_definite(&self) -> bool {
        let m = self.q.len();
        let s = self.ell.sum();
        // basis of ell^perp via projection along 1
        let basis = DMatrix::from_fn(m, m - 1, |r, c| {
            let e = if r == c { 1.0 } else { 0.0 };
            e - self.ell[c] / s
        });
        let g = basis.transpose() * DMatrix::from_diagonal(&self.q) * &basis;
        let eig = g.symmetric_eigen().eigenvalues;
        let scale = self.q.amax().max(1.0);
        eig.iter().all(|&e| e > 1e-12 * scale)
    }
}

/// Replays a natural-reductivity certificate: for random `X, Y ∈ p` checks
/// `([X, Y]_p, X) = 0` and that `(,)` on `p` is the metric given by `f` under
/// `p ≅ m`. The residual of a sample is the larger of the two defects.
pub fn natred_certificate_check(
    f: &MetricForm,
    r: &NatRedResult,
    sc: &StructureConstants,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<OracleReport> {
    let m = f.m();
    let pair = NrPair::from_verdict(m, &r.verdict)
        .ok_or_else(|| Error::InvalidParameter("no certificate for a metric that is not naturally reductive".into()))?;
    if pair.ell.len() != m || pair.q.len() != m || pair.ell.sum().abs() < 1e-300 {
        return Err(Error::InvalidParameter("certificate has the wrong shape".into()));
    }
    let t = f.to_t();
    Ok(run(samples, seed, tol, |rng| {
        let xm = random_m_element(rng, m, sc);
        let ym = random_m_element(rng, m, sc);
        let x = pair.project(&xm);
        let y = pair.project(&ym);
        let Ok(br) = sc.product_bracket(&x, &y) else {
            return f64::MAX;
        };
        let nr = pair.inner(sc, &pair.project(&br), &x).abs();
        let txx = sc.inner(&apply(t.t(), &xm), &xm);
        let txy = sc.inner(&apply(t.t(), &xm), &ym);
        let matched = (pair.inner(sc, &x, &x) - txx).abs().max((pair.inner(sc, &x, &y) - txy).abs());
        nr.max(matched)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketsReport {
    /// `[X, Y] = α/(β-α) [Z, X] + β/(β-α) [Z, Y]` for some `Z ∈ h`;
    /// `None` when there is a single eigenvalue.
    pub alpha_beta: Option<OracleReport>,
    /// `[X, Y]_m ∈ m_α` for `X, Y ∈ m_α` with `[h, X] ⊥ Y`.
    pub two_in_one: OracleReport,
}

impl BracketsReport {
    pub fn verdict(&self) -> bool {
        self.two_in_one.verdict && self.alpha_beta.as_ref().is_none_or(|r| r.verdict)
    }
}

/// Orthonormalises in minus the Killing form and removes the components of `y`.
fn remove_span(sc: &StructureConstants, span: &[ProductElement], y: &ProductElement) -> ProductElement {
    let mut basis: Vec<ProductElement> = Vec::new();
    for v in span {
        let mut w = v.clone();
        for b in &basis {
            let c = sc.inner(&w, b);
            add_scaled(&mut w, -c, b);
        }
        let n = sc.norm(&w);
        if n > 1e-10 {
            basis.push(ProductElement(w.0 / n));
        }
    }
    let mut out = y.clone();
    for b in &basis {
        let c = sc.inner(&out, b);
        add_scaled(&mut out, -c, b);
    }
    out
}

/// Necessary conditions for GO on the eigenspaces of `A`.
pub fn brackets_property_check(
    t: &MetricT,
    sc: &StructureConstants,
    samples: usize,
    seed: u64,
    tol: f64,
    cluster_tol: f64,
) -> BracketsReport {
    use rand::Rng;
    let eig = eigendecompose(t, cluster_tol);
    let sys = &eig.system;
    let clusters = &eig.clusters;
    let m = t.m();
    let hb = h_basis(m, sc.dim());

    let alpha_beta = (clusters.len() > 1).then(|| {
        run(samples, seed, tol, |rng| {
            let a = rng.random_range(0..clusters.len());
            let mut b = rng.random_range(0..clusters.len() - 1);
            if b >= a {
                b += 1;
            }
            let (ga, gb) = (sys.gammas[clusters[a][0]], sys.gammas[clusters[b][0]]);
            let x = random_in_span(rng, sys, &clusters[a], sc);
            let y = random_in_span(rng, sys, &clusters[b], sc);
            let eval = || -> Result<f64> {
                let lhs = sc.product_bracket(&x, &y)?;
                let mut cols = Vec::with_capacity(hb.len());
                for z in &hb {
                    let mut c = ProductElement(sc.product_bracket(z, &x)?.0 * (ga / (gb - ga)));
                    add_scaled(&mut c, gb / (gb - ga), &sc.product_bracket(z, &y)?);
                    cols.push(ProductElement(-c.0));
                }
                Ok(least_squares(sc, &lhs, &cols).1)
            };
            eval().unwrap_or(f64::MAX)
        })
    });

    let two_in_one = run(samples, seed, tol, |rng| {
        let a = rng.random_range(0..clusters.len());
        let x = random_in_span(rng, sys, &clusters[a], sc);
        let y0 = random_in_span(rng, sys, &clusters[a], sc);
        let eval = || -> Result<f64> {
            let hx = hb.iter().map(|z| sc.product_bracket(z, &x)).collect::<Result<Vec<_>>>()?;
            let y = remove_span(sc, &hx, &y0);
            let n = sc.norm(&y);
            if n < 1e-10 {
                return Ok(0.0);
            }
            let br = m_component(&sc.product_bracket(&x, &ProductElement(y.0 / n))?);
            // component of br outside b^i ⊗ f, i in the cluster
            let mut inside = ProductElement::zeros(m, sc.dim());
            for &i in &clusters[a] {
                let b = &sys.vectors[i];
                let coords = b.transpose() * &br.0;
                inside.0 += b * coords;
            }
            Ok(sc.norm(&ProductElement(br.0 - inside.0)))
        };
        eval().unwrap_or(f64::MAX)
    });

    BracketsReport { alpha_beta, two_in_one }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_go, classify_natred, go_family};
    use crate::Tolerances;

    fn so3() -> StructureConstants {
        StructureConstants::so3()
    }

    #[test]
    fn standard_metric_has_zero_residual() {
        for m in 2..=5 {
            let r = go_oracle(&MetricT::standard(m), &so3(), 50, 1, 1e-8);
            assert!(r.verdict);
            assert!(r.max_residual < 1e-14);
        }
    }

    #[test]
    fn report_is_reproducible() {
        let t = MetricForm::from_rows(&[vec![2.0, 0.3, 0.1], vec![0.3, 1.0, -0.2], vec![0.1, -0.2, 1.5]])
            .unwrap()
            .to_t();
        let a = go_oracle(&t, &so3(), 20, 9, 1e-8);
        let b = go_oracle(&t, &so3(), 20, 9, 1e-8);
        assert_eq!(a, b);
        assert_eq!(a.status, OracleStatus::Refuted);
        assert!(!a.failures.is_empty());
    }

    #[test]
    fn explicit_solver_matches_least_squares() {
        let t = go_family(&[1.0, 2.0, 3.0, 4.0], 1.0, 0.0).unwrap();
        let cert = classify_go(&t, &Tolerances::default()).certificate().unwrap().clone();
        let ls = go_oracle(&t, &so3(), 50, 3, 1e-8);
        let ex = go_oracle_explicit(&t, &cert, &so3(), 50, 3, 1e-9);
        assert!(ls.verdict, "{}", ls.max_residual);
        assert!(ex.verdict, "{}", ex.max_residual);
    }

    #[test]
    fn certificates_replay() {
        let forms = [
            MetricForm::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap(),
            MetricForm::standard(4),
            MetricForm::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 0.5]]).unwrap(),
            MetricT::from_rows(&[
                vec![3.5, -1.0, -2.0, -0.5],
                vec![-1.0, 1.0, 0.0, 0.0],
                vec![-2.0, 0.0, 2.0, 0.0],
                vec![-0.5, 0.0, 0.0, 0.5],
            ])
            .unwrap()
            .to_form(),
        ];
        for f in &forms {
            let r = classify_natred(f, 1e-8);
            assert!(r.is_nr(), "{:?}", r);
            let rep = natred_certificate_check(f, &r, &so3(), 100, 5, 1e-10).unwrap();
            assert!(rep.verdict, "{:?} {}", r.verdict, rep.max_residual);
        }
    }

    #[test]
    fn corrupted_certificate_is_rejected() {
        let f = MetricForm::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let mut r = classify_natred(&f, 1e-8);
        if let NatRedVerdict::CaseC { alpha, .. } = &mut r.verdict {
            alpha[1] *= 1.1;
        }
        let rep = natred_certificate_check(&f, &r, &so3(), 50, 5, 1e-8).unwrap();
        assert!(!rep.verdict);
        assert_eq!(rep.status, OracleStatus::Refuted);
    }

    #[test]
    fn bracket_properties_on_go_and_non_go() {
        let t = go_family(&[1.0, 2.0, 3.0], 1.0, 0.0).unwrap();
        let rep = brackets_property_check(&t, &so3(), 50, 2, 1e-8, 1e-8);
        assert!(rep.verdict(), "{:?}", rep);

        let std = brackets_property_check(&MetricT::standard(4), &so3(), 20, 2, 1e-8, 1e-8);
        assert!(std.alpha_beta.is_none());
        assert!(std.two_in_one.verdict);

        let dense = MetricForm::from_rows(&[
            vec![2.0, 0.3, 0.1],
            vec![0.3, 1.0, -0.2],
            vec![0.1, -0.2, 1.5],
        ])
        .unwrap()
        .to_t();
        let bad = brackets_property_check(&dense, &so3(), 50, 2, 1e-8, 1e-8);
        assert!(!bad.alpha_beta.unwrap().verdict);
    }
}
