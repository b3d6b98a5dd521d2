//! Coefficient-space calculus on R^m.
//!
//! Every Ad(H)-irreducible submodule of `g = m f` has the form `a ⊗ f` for a
//! coefficient vector `a ∈ R^m`, and brackets of pure tensors satisfy
//! `[a ⊗ X, b ⊗ Y] = (a ⋄ b) ⊗ [X, Y]`. All the combinatorial structure of the
//! classification therefore lives in R^m with the entrywise product `⋄`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, canonical_sign, is_zero_entry, lex_cmp, orth};

pub type CoeffVector = DVector<f64>;

/// Default relative gap below which two eigenvalues are treated as equal.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

pub fn ones(m: usize) -> CoeffVector {
    DVector::from_element(m, 1.0)
}

/// Entrywise product `a ⋄ b`.
pub fn diamond(a: &CoeffVector, b: &CoeffVector) -> Result<CoeffVector> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.component_mul(b))
}

/// Projection onto the zero-sum hyperplane `1^⊥`, i.e. onto the coefficient
/// space of the Killing-orthogonal complement of `diag(f)`.
pub fn m_project(a: &CoeffVector) -> CoeffVector {
    if a.is_empty() {
        return a.clone();
    }
    let mean = a.mean();
    a.map(|x| x - mean)
}

/// Orthonormal vectors `b^1..b^{m-1}` of `1^⊥` with attached metric eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedSystem {
    pub vectors: Vec<CoeffVector>,
    pub gammas: Vec<f64>,
}

impl AdaptedSystem {
    pub fn new(vectors: Vec<CoeffVector>, gammas: Vec<f64>) -> Result<Self> {
        if vectors.len() != gammas.len() {
            return Err(Error::Dimension {
                expected: vectors.len(),
                got: gammas.len(),
            });
        }
        if let Some(first) = vectors.first() {
            let m = first.len();
            if let Some(bad) = vectors.iter().find(|v| v.len() != m) {
                return Err(Error::Dimension {
                    expected: m,
                    got: bad.len(),
                });
            }
        }
        Ok(Self { vectors, gammas })
    }

    /// Ambient dimension `m`.
    pub fn m(&self) -> usize {
        self.vectors.first().map_or(self.vectors.len() + 1, |v| v.len())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// The vectors as the columns of an `m x (m-1)` matrix.
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        linalg::from_columns(self.m(), &self.vectors)
    }

    /// `Σ γ_i b^i (b^i)^T`.
    pub fn metric_matrix(&self) -> DMatrix<f64> {
        let m = self.m();
        let mut t = DMatrix::zeros(m, m);
        for (b, &g) in self.vectors.iter().zip(&self.gammas) {
            t += g * b * b.transpose();
        }
        t
    }
}

/// Zero sums, unit norms and pairwise orthogonality, each within `tol`.
pub fn is_adapted(sys: &AdaptedSystem, tol: f64) -> bool {
    let m = sys.m();
    if sys.len() + 1 != m || sys.vectors.iter().any(|v| v.len() != m) {
        return false;
    }
    for (i, b) in sys.vectors.iter().enumerate() {
        if b.sum().abs() >= tol || (b.norm_squared() - 1.0).abs() >= tol {
            return false;
        }
        for c in &sys.vectors[i + 1..] {
            if b.dot(c).abs() >= tol {
                return false;
            }
        }
    }
    true
}

/// Groups eigenvalues that are linked by gaps of at most `cluster_tol * max|γ|`.
///
/// Returns one cluster id per input value; ids are numbered in increasing
/// order of the eigenvalues.
pub fn cluster_ids(gammas: &[f64], cluster_tol: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..gammas.len()).collect();
    order.sort_by(|&a, &b| gammas[a].total_cmp(&gammas[b]));
    let scale = gammas.iter().fold(0.0_f64, |acc, g| acc.max(g.abs()));
    let mut ids = vec![0; gammas.len()];
    let mut current = 0;
    for w in 0..order.len() {
        if w > 0 && gammas[order[w]] - gammas[order[w - 1]] > cluster_tol * scale {
            current += 1;
        }
        ids[order[w]] = current;
    }
    ids
}

/// Outcome of the super-adaptedness test, with the projection coefficients of
/// every pairwise diamond product.
#[derive(Debug, Clone)]
pub struct SuperAdaptedCheck {
    pub passed: bool,
    /// `proj[(i, j)] = (b^i ⋄ b^j) · b^j`.
    pub proj: DMatrix<f64>,
    /// Largest out-of-span residual over the constrained pairs.
    pub max_residual: f64,
    pub violation: Option<(usize, usize)>,
}

impl SuperAdaptedCheck {
    /// Coefficient of `b^i` in `b^i ⋄ b^j`.
    pub fn coef_on_bi(&self, i: usize, j: usize) -> f64 {
        self.proj[(j, i)]
    }

    /// Coefficient of `b^j` in `b^i ⋄ b^j`.
    pub fn coef_on_bj(&self, i: usize, j: usize) -> f64 {
        self.proj[(i, j)]
    }
}

/// Super-adaptedness with eigenvalue equality judged by [`DEFAULT_CLUSTER_TOL`].
pub fn is_super_adapted(sys: &AdaptedSystem, tol: f64) -> SuperAdaptedCheck {
    let ids = cluster_ids(&sys.gammas, DEFAULT_CLUSTER_TOL);
    super_adapted_check(&sys.vectors, &ids, tol)
}

/// `b^i ⋄ b^j ∈ span(b^i, b^j)` for every pair in different clusters.
///
/// The vectors are assumed orthonormal so projections are dot products.
pub fn super_adapted_check(
    vectors: &[CoeffVector],
    cluster: &[usize],
    tol: f64,
) -> SuperAdaptedCheck {
    let n = vectors.len();
    let mut proj = DMatrix::zeros(n, n);
    let mut max_residual: f64 = 0.0;
    let mut violation = None;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = vectors[i].component_mul(&vectors[j]);
            let on_i = d.dot(&vectors[i]);
            let on_j = d.dot(&vectors[j]);
            proj[(i, j)] = on_j;
            if i < j && cluster[i] != cluster[j] {
                let residual = (&d - on_i * &vectors[i] - on_j * &vectors[j]).norm();
                if residual > max_residual {
                    max_residual = residual;
                }
                if residual >= tol && violation.is_none() {
                    violation = Some((i, j));
                }
            }
        }
    }
    SuperAdaptedCheck {
        passed: violation.is_none(),
        proj,
        max_residual,
        violation,
    }
}

/// Unit vector of the column span of `q` (orthonormal columns) with the
/// maximal number of zero coordinates.
///
/// Supports are scanned by increasing size and, within a size, in
/// lexicographic order, so zeros are pushed towards the trailing coordinates.
pub(crate) fn sparsest_unit_vector(q: &DMatrix<f64>) -> CoeffVector {
    let n = q.nrows();
    for size in 1..=n {
        for support in linalg::combinations(n, size) {
            let zeros: Vec<usize> = (0..n).filter(|i| !support.contains(i)).collect();
            let sub = q.select_rows(zeros.iter());
            let kernel = linalg::null_space(&sub, 1.0);
            if kernel.ncols() == 0 {
                continue;
            }
            let mut v = q * kernel.column(0);
            let norm = v.norm();
            if norm <= linalg::RANK_CUTOFF {
                continue;
            }
            v /= norm;
            for &z in &zeros {
                v[z] = 0.0;
            }
            return v.normalize();
        }
    }
    unreachable!("a non-empty span always has a unit vector")
}

fn span_matrix(spanning: &[CoeffVector]) -> Result<DMatrix<f64>> {
    let n = spanning.first().map_or(0, |v| v.len());
    if let Some(bad) = spanning.iter().find(|v| v.len() != n) {
        return Err(Error::Dimension {
            expected: n,
            got: bad.len(),
        });
    }
    Ok(orth(&linalg::from_columns(n, spanning)))
}

fn outside_span(q: &DMatrix<f64>, v: &CoeffVector) -> f64 {
    (v - q * (q.transpose() * v)).norm()
}

/// Orthonormal basis `{u_i}` of a self-saturated `V ⊆ 1^⊥` with
/// `u_i ⋄ u_j ∈ R u_i ∪ R u_j`.
///
/// `V` is given by any spanning set. Self-saturation is verified on an
/// orthonormal basis `{e_i}` of `V`: the map `(a, b) ↦ a ⋄ b mod V` vanishes
/// on all orthogonal pairs iff it vanishes on `(e_i, e_j)` for `i ≠ j` and
/// takes the same value on every `(e_i, e_i)`. The basis is then built by
/// peeling off a sparsest unit vector and recursing on its orthogonal
/// complement in `V`. Output vectors have their first non-zero entry
/// positive and are sorted in decreasing lexicographic order.
pub fn self_saturated_basis(spanning: &[CoeffVector], tol: f64) -> Result<Vec<CoeffVector>> {
    let q = span_matrix(spanning)?;
    let d = q.ncols();
    if d == 0 {
        return Ok(Vec::new());
    }
    for c in 0..d {
        if q.column(c).sum().abs() / (q.nrows() as f64).sqrt() >= tol {
            return Err(Error::NotZeroSum);
        }
    }
    let cols = linalg::columns(&q);
    let first_square = cols[0].component_mul(&cols[0]);
    for i in 0..d {
        for j in i..d {
            let w = if i == j {
                cols[i].component_mul(&cols[i]) - &first_square
            } else {
                cols[i].component_mul(&cols[j])
            };
            if outside_span(&q, &w) >= tol {
                return Err(Error::NotSelfSaturated(i, j));
            }
        }
    }
    let mut basis = Vec::with_capacity(d);
    let mut rest = q;
    while rest.ncols() > 1 {
        let v = sparsest_unit_vector(&rest);
        let reduced = &rest - &v * (v.transpose() * &rest);
        rest = orth(&reduced);
        basis.push(v);
    }
    if rest.ncols() == 1 {
        basis.push(rest.column(0).into_owned());
    }
    for v in basis.iter_mut() {
        canonical_sign(v);
    }
    basis.sort_by(|a, b| lex_cmp(b, a));
    Ok(basis)
}

/// Partition `{S_i}` of `0..n` whose indicator vectors span `U`, for a
/// diamond-closed subspace `U ∋ 1`.
///
/// Follows the peeling argument: a sparsest non-zero vector of `U` is
/// constant on its support, so the support is a part; the vectors of `U`
/// vanishing on it form a smaller closed subspace containing the remaining
/// indicator. Parts are returned sorted, ordered by their smallest element.
pub fn subalgebra_partition(spanning: &[CoeffVector], tol: f64) -> Result<Vec<Vec<usize>>> {
    let q = span_matrix(spanning)?;
    let n = q.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if outside_span(&q, &(ones(n) / (n as f64).sqrt())) >= tol {
        return Err(Error::MissingConstant);
    }
    let cols = linalg::columns(&q);
    for i in 0..cols.len() {
        for j in i..cols.len() {
            if outside_span(&q, &cols[i].component_mul(&cols[j])) >= tol {
                return Err(Error::NotDiamondClosed(i, j));
            }
        }
    }

    let mut parts = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut basis = q;
    loop {
        let v = sparsest_unit_vector(&basis);
        let local: Vec<usize> = (0..v.len()).filter(|&k| !is_zero_entry(v[k], 1.0)).collect();
        parts.push(local.iter().map(|&k| remaining[k]).collect::<Vec<_>>());
        if local.len() == remaining.len() {
            break;
        }
        let others: Vec<usize> = (0..remaining.len()).filter(|k| !local.contains(k)).collect();
        let on_support = basis.select_rows(local.iter());
        let kernel = linalg::null_space(&on_support, 1.0);
        let vanishing = &basis * kernel;
        basis = orth(&vanishing.select_rows(others.iter()));
        remaining = others.iter().map(|&k| remaining[k]).collect();
        if basis.ncols() == 0 {
            // numerically lost the constant vector; the rest is one part
            parts.push(remaining.clone());
            break;
        }
    }
    for p in parts.iter_mut() {
        p.sort_unstable();
    }
    parts.sort();
    Ok(parts)
}
