//! Natural reductivity read off the quadratic form `a_ij` on `g_m`.
//!
//! A metric is naturally reductive iff it is one of
//! (a) diagonal: the complement `g_m` is an ideal with a product metric;
//! (b) the ideal omitting copy `k`, transported to `g_m`;
//! (c) `a_ij = δ_ij α_i - α_i α_j / S`, the restriction of the bi-invariant
//!     form `Σ α_i ⟨,⟩_i`, `S = Σ α_i`, with all `α_i > 0` or exactly one
//!     negative and `S < 0`.

use serde::{Deserialize, Serialize};

use crate::metric::MetricForm;

/// Relative size below which an entry of `a` counts as a structural zero in
/// the exact sparsity patterns (a) and (b).
pub const PATTERN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum NatRedVerdict {
    NotNR,
    /// `f(x) = Σ β_i x_i^2`.
    CaseA { beta: Vec<f64> },
    /// Ideal `{P : P_k = 0}` with metric `Σ_{i != k} β_i ⟨,⟩_i`; `beta` is
    /// indexed by copy, with `beta[k] = 0`.
    CaseB { k: usize, beta: Vec<f64> },
    /// Restriction of `Σ α_i ⟨,⟩_i` to `{P : Σ α_i P_i = 0}`.
    CaseC { alpha: Vec<f64>, s: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NatRedResult {
    pub verdict: NatRedVerdict,
    pub normal: bool,
}

impl NatRedResult {
    pub fn is_nr(&self) -> bool {
        self.verdict != NatRedVerdict::NotNR
    }
}

/// Why a form is not of type (c).
#[derive(Debug, Clone, PartialEq)]
pub enum CaseCFailure {
    ZeroOffDiagonal(usize, usize),
    Degenerate,
    Reconstruction(f64),
    Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseCSolution {
    pub alpha: Vec<f64>,
    pub s: f64,
}

fn pattern_a(f: &MetricForm, zero: f64) -> Option<Vec<f64>> {
    let a = f.a();
    let n = a.nrows();
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)].abs() >= zero {
                return None;
            }
        }
    }
    let beta: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    beta.iter().all(|&b| b > 0.0).then_some(beta)
}

fn pattern_b(f: &MetricForm, k: usize, zero: f64) -> Option<Vec<f64>> {
    let a = f.a();
    let n = a.nrows();
    let mut beta = vec![0.0; n + 1];
    let mut others = 0.0;
    for i in (0..n).filter(|&i| i != k) {
        if !(a[(i, i)] > zero) || (a[(i, k)] + a[(i, i)]).abs() >= zero {
            return None;
        }
        for j in (0..n).filter(|&j| j != k && j != i) {
            if a[(i, j)].abs() >= zero {
                return None;
            }
        }
        beta[i] = a[(i, i)];
        others += a[(i, i)];
    }
    let last = a[(k, k)] - others;
    if !(last > zero) {
        return None;
    }
    beta[n] = last;
    Some(beta)
}

/// Sign condition of case (c): all positive, or exactly one negative and `S < 0`.
pub fn case_c_signs_ok(alpha: &[f64], s: f64) -> bool {
    if alpha.iter().any(|&x| x == 0.0 || !x.is_finite()) {
        return false;
    }
    let negatives = alpha.iter().filter(|&&x| x < 0.0).count();
    negatives == 0 || (negatives == 1 && s < 0.0)
}

/// `δ_ij α_i - α_i α_j / S` for `i, j < m - 1`.
pub fn case_c_form(alpha: &[f64], s: f64) -> nalgebra::DMatrix<f64> {
    let n = alpha.len() - 1;
    nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { alpha[i] } else { 0.0 };
        d - alpha[i] * alpha[j] / s
    })
}

/// Recovers `(α, S)` of case (c), always confirming by full reconstruction.
///
/// `m = 2` is underdetermined; the symmetric solution `α = (2a, 2a)` is
/// returned. For `m = 3` the closed form `D = a11 a22 - a12^2`,
/// `α = (D/(a22+a12), D/(a11+a12), -D/a12)` is used: with `u_i = α_i/S`,
/// `a11 + a12 = S u_1 u_3`, `a22 + a12 = S u_2 u_3`, `a12 = -S u_1 u_2` and
/// `D = S^2 u_1 u_2 u_3`. For larger `m`,
/// `α_i = a_ii - a_ij a_ik / a_jk` with the pair `j, k` of largest `|a_jk|`,
/// then `S = -α_i α_j / a_ij` and `α_m = S - Σ_{i<m} α_i`. Reconstruction
/// within `tol` implies every other choice of `j, k` agrees.
pub fn solve_case_c(f: &MetricForm, tol: f64) -> Result<CaseCSolution, CaseCFailure> {
    let a = f.a();
    let n = a.nrows();
    let scale = a.amax();
    if n == 1 {
        let x = 2.0 * a[(0, 0)];
        return Ok(CaseCSolution {
            alpha: vec![x, x],
            s: 2.0 * x,
        });
    }
    for i in 0..n {
        for j in i + 1..n {
            if a[(i, j)].abs() < PATTERN_TOL * scale {
                return Err(CaseCFailure::ZeroOffDiagonal(i, j));
            }
        }
    }
    let (alpha, s) = if n == 2 {
        let (a11, a12, a22) = (a[(0, 0)], a[(0, 1)], a[(1, 1)]);
        let d = a11 * a22 - a12 * a12;
        let denom = a12 * (a11 + a12) * (a22 + a12);
        if denom == 0.0 {
            return Err(CaseCFailure::Degenerate);
        }
        (
            vec![d / (a22 + a12), d / (a11 + a12), -d / a12],
            -d * d / denom,
        )
    } else {
        let mut head = Vec::with_capacity(n);
        for i in 0..n {
            let mut best = (usize::MAX, usize::MAX, 0.0_f64);
            for j in (0..n).filter(|&j| j != i) {
                for k in (j + 1..n).filter(|&k| k != i) {
                    if a[(j, k)].abs() > best.2.abs() {
                        best = (j, k, a[(j, k)]);
                    }
                }
            }
            let (j, k, ajk) = best;
            head.push(a[(i, i)] - a[(i, j)] * a[(i, k)] / ajk);
        }
        let (mut bi, mut bj) = (0, 1);
        for i in 0..n {
            for j in i + 1..n {
                if a[(i, j)].abs() > a[(bi, bj)].abs() {
                    (bi, bj) = (i, j);
                }
            }
        }
        let s = -head[bi] * head[bj] / a[(bi, bj)];
        let last = s - head.iter().sum::<f64>();
        head.push(last);
        (head, s)
    };
    if !s.is_finite() || s == 0.0 || alpha.iter().any(|x| !x.is_finite()) {
        return Err(CaseCFailure::Degenerate);
    }
    let residual = (case_c_form(&alpha, s) - a).amax();
    if !(residual < tol * scale) {
        return Err(CaseCFailure::Reconstruction(residual / scale));
    }
    if !case_c_signs_ok(&alpha, s) {
        return Err(CaseCFailure::Sign);
    }
    Ok(CaseCSolution { alpha, s })
}

/// Tests (a), then (b) for every `k`, then (c).
pub fn classify_natred(f: &MetricForm, tol: f64) -> NatRedResult {
    let n = f.a().nrows();
    if n == 1 {
        let sol = solve_case_c(f, tol).expect("one-dimensional forms are always of type (c)");
        return NatRedResult {
            verdict: NatRedVerdict::CaseC {
                alpha: sol.alpha,
                s: sol.s,
            },
            normal: true,
        };
    }
    let zero = PATTERN_TOL * f.a().amax();
    if let Some(beta) = pattern_a(f, zero) {
        return NatRedResult {
            verdict: NatRedVerdict::CaseA { beta },
            normal: true,
        };
    }
    for k in 0..n {
        if let Some(beta) = pattern_b(f, k, zero) {
            return NatRedResult {
                verdict: NatRedVerdict::CaseB { k, beta },
                normal: true,
            };
        }
    }
    match solve_case_c(f, tol) {
        Ok(sol) => {
            let normal = sol.alpha.iter().all(|&x| x > 0.0);
            NatRedResult {
                verdict: NatRedVerdict::CaseC {
                    alpha: sol.alpha,
                    s: sol.s,
                },
                normal,
            }
        }
        Err(_) => NatRedResult {
            verdict: NatRedVerdict::NotNR,
            normal: false,
        },
    }
}
