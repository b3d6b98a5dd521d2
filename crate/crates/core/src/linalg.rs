//! Small dense helpers shared by the coefficient-space routines.

use nalgebra::{DMatrix, DVector};

/// Singular values at or below `RANK_CUTOFF * scale` count as zero.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Entry `x` of `v` is zero when `|x| < ZERO_ENTRY * |v|`.
pub const ZERO_ENTRY: f64 = 1e-9;

/// Column-pivoted QR of `mat`, returning `Q` and the numerical rank at
/// cutoff `|R_ii| > cut`. The SVD of the linear algebra backend is not used:
/// it returns inaccurate factors on some rank-deficient inputs.
fn piv_qr(mat: &DMatrix<f64>, cut: impl Fn(f64) -> f64) -> (DMatrix<f64>, usize) {
    let qr = mat.clone().col_piv_qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..r.nrows().min(r.ncols())).map(|i| r[(i, i)].abs()).collect();
    let threshold = cut(diag.first().copied().unwrap_or(0.0));
    let rank = diag.iter().take_while(|&&d| d > threshold && d > 0.0).count();
    (qr.q(), rank)
}

/// Orthonormal basis (as columns) of the column span of `mat`.
pub fn orth(mat: &DMatrix<f64>) -> DMatrix<f64> {
    let (rows, cols) = mat.shape();
    if cols == 0 || rows == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let (q, rank) = piv_qr(mat, |top| RANK_CUTOFF * top);
    q.columns(0, rank).into_owned()
}

/// Orthonormal basis of the right null space of `mat`, cutoff `RANK_CUTOFF * scale`.
pub fn null_space(mat: &DMatrix<f64>, scale: f64) -> DMatrix<f64> {
    let (rows, cols) = mat.shape();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    // kernel = orthogonal complement of the row space; pad so Q is square
    let mut padded = DMatrix::zeros(cols, rows.max(cols));
    padded.view_mut((0, 0), (cols, rows)).copy_from(&mat.transpose());
    let (q, rank) = piv_qr(&padded, |_| RANK_CUTOFF * scale);
    q.columns(rank, cols - rank).into_owned()
}

pub fn rank(mat: &DMatrix<f64>, scale: f64) -> usize {
    if mat.nrows() == 0 || mat.ncols() == 0 {
        return 0;
    }
    piv_qr(mat, |_| RANK_CUTOFF * scale).1
}

pub fn columns(mat: &DMatrix<f64>) -> Vec<DVector<f64>> {
    (0..mat.ncols()).map(|c| mat.column(c).into_owned()).collect()
}

pub fn from_columns(rows: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

pub fn is_zero_entry(x: f64, norm: f64) -> bool {
    x.abs() < ZERO_ENTRY * norm
}

/// Flip `v` so its first non-zero entry is positive.
pub fn canonical_sign(v: &mut DVector<f64>) {
    let n = v.norm();
    if let Some(x) = v.iter().copied().find(|&x| !is_zero_entry(x, n)) {
        if x < 0.0 {
            v.neg_mut();
        }
    }
}

/// Lexicographic comparison with entries closer than `ZERO_ENTRY` treated as equal.
pub fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    let scale = a.norm().max(b.norm()).max(f64::MIN_POSITIVE);
    for (x, y) in a.iter().zip(b.iter()) {
        if (x - y).abs() >= ZERO_ENTRY * scale {
            return x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal);
        }
    }
    std::cmp::Ordering::Equal
}

/// Orthonormal basis of the zero-sum hyperplane in R^m (columns, m x (m-1)).
pub fn zero_sum_basis(m: usize) -> DMatrix<f64> {
    let ones = DMatrix::from_element(m, 1, 1.0);
    let mut proj = DMatrix::identity(m, m) - &ones * ones.transpose() / m as f64;
    // drop the last column; the remaining m-1 columns of the projector span 1^perp
    proj = proj.columns(0, m - 1).into_owned();
    orth(&proj)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
