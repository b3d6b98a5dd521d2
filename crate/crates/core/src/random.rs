//! Seeded random metrics of the kinds that appear in the classification.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::classify::family::go_family;
use crate::classify::natred::case_c_form;
use crate::coeff::{AdaptedSystem, CoeffVector};
use crate::error::Result;
use crate::linalg;
use crate::metric::{MetricForm, MetricT};

fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Dense positive definite form `B^T B / n + δ I`, generically not naturally reductive for `m >= 4`.
pub fn dense_form<R: Rng + ?Sized>(rng: &mut R, m: usize) -> MetricForm {
    let n = m - 1;
    let b = gaussian(rng, n, n);
    let a = b.transpose() * &b / n as f64 + DMatrix::identity(n, n) * rng.random_range(0.2..1.0);
    MetricForm::new(a).expect("shifted Gram matrix is positive definite")
}

/// Orthonormal basis of `1^⊥` drawn from the Haar measure.
pub fn orthonormal_basis<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<CoeffVector> {
    let q = linalg::zero_sum_basis(m);
    let g = &q * gaussian(rng, m - 1, m - 1);
    let basis = linalg::orth(&g);
    linalg::columns(&basis)
}

/// `Σ γ_i b^i b^iᵀ` for a random orthonormal basis and `γ_i ∈ [0.5, 3)`.
pub fn adapted_metric<R: Rng + ?Sized>(rng: &mut R, m: usize) -> MetricT {
    let vectors = orthonormal_basis(rng, m);
    let gammas = (0..m - 1).map(|_| rng.random_range(0.5..3.0)).collect();
    MetricT::from_system(&AdaptedSystem { vectors, gammas }).expect("positive gammas")
}

/// Strictly increasing positive `z` of length `m`.
pub fn increasing_z<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    let mut z = Vec::with_capacity(m);
    let mut acc = rng.random_range(0.1..1.0);
    for _ in 0..m {
        z.push(acc);
        acc += rng.random_range(0.2..2.0);
    }
    z
}

/// A member of the `z, ρ, λ` family with `ρ ∈ [0.5, 2)` and `λ ∈ [0, 0.5)`.
pub fn go_family_metric<R: Rng + ?Sized>(rng: &mut R, m: usize) -> MetricT {
    loop {
        let z = increasing_z(rng, m);
        let rho = rng.random_range(0.5..2.0);
        let lambda = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..0.5) };
        if let Ok(t) = go_family(&z, rho, lambda) {
            return t;
        }
    }
}

/// Restriction of `Σ α_i ⟨,⟩_i`: all `α_i > 0`, or with probability 1/2
/// exactly one negative and `S < 0`.
pub fn case_c_metric<R: Rng + ?Sized>(rng: &mut R, m: usize) -> MetricForm {
    let mut alpha: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..3.0)).collect();
    if m > 2 && rng.random_bool(0.5) {
        let j = rng.random_range(0..m);
        let rest: f64 = alpha.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, a)| a).sum();
        alpha[j] = -rest * rng.random_range(1.2..3.0);
    }
    let s: f64 = alpha.iter().sum();
    MetricForm::new(case_c_form(&alpha, s)).expect("case (c) with admissible signs is positive definite")
}

/// `Σ_{i != k} β_i ‖X_i - X_k‖^2`-type metric of the ideal omitting copy `k`.
pub fn ideal_metric<R: Rng + ?Sized>(rng: &mut R, m: usize) -> MetricT {
    let k = rng.random_range(0..m);
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        if i == k {
            continue;
        }
        let b = rng.random_range(0.5..3.0);
        t[(i, i)] += b;
        t[(k, k)] += b;
        t[(i, k)] -= b;
        t[(k, i)] -= b;
    }
    MetricT::new(t).expect("weighted star Laplacian")
}

/// `P^T T P` for a uniformly random permutation of the copies.
pub fn permuted<R: Rng + ?Sized>(rng: &mut R, t: &MetricT) -> MetricT {
    use rand::seq::SliceRandom;
    let m = t.m();
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(rng);
    let p = DMatrix::from_fn(m, m, |i, j| t.t()[(perm[i], perm[j])]);
    MetricT::new(p).expect("permutation preserves validity")
}

/// `T + ε max|T| N` for a random symmetric `N` with `N 1 = 0` and unit max entry.
pub fn perturbed<R: Rng + ?Sized>(rng: &mut R, t: &MetricT, eps: f64) -> Result<MetricT> {
    let m = t.m();
    let g = gaussian(rng, m, m);
    let sym = (&g + g.transpose()) * 0.5;
    let p = DMatrix::identity(m, m) - DMatrix::from_element(m, m, 1.0 / m as f64);
    let mut n = &p * sym * &p;
    n /= n.amax();
    MetricT::new(t.t() + n * eps * t.t().amax())
}
