//! Compact simple Lie algebras given by structure constants, and the product
//! algebra `g = m f` acted on by the diagonal `h = diag(f)`.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::coeff::CoeffVector;
use crate::error::{Error, Result};

const CONSTANT_TOL: f64 = 1e-12;

/// `[E_i, E_j] = Σ_k c_{ij}^k E_k` together with the Gram matrix of minus the
/// Killing form. Immutable once validated.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    name: String,
    dim: usize,
    c: Vec<f64>,
    nonzero: Vec<(usize, usize, usize, f64)>,
    gram: DMatrix<f64>,
}

/// On-disk form: `{"dim": d, "c": [[i, j, k, value], ...], "name": "..."}` with
/// zero-based indices. Omitted entries are zero, except that an entry whose
/// antisymmetric partner `[j, i, k]` is omitted implies it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureConstantsFile {
    pub dim: usize,
    pub c: Vec<(usize, usize, usize, f64)>,
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<f64>>>,
}

fn idx(dim: usize, i: usize, j: usize, k: usize) -> usize {
    (i * dim + j) * dim + k
}

/// `-tr(ad E_i ∘ ad E_j)` for a raw table `c[(i*dim + j)*dim + k]`.
pub fn killing_form(dim: usize, c: &[f64]) -> DMatrix<f64> {
    // (ad E_i)_{k l} = c_{i l}^k
    let mut gram = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut tr = 0.0;
            for k in 0..dim {
                for l in 0..dim {
                    tr += c[idx(dim, i, l, k)] * c[idx(dim, j, k, l)];
                }
            }
            gram[(i, j)] = -tr;
        }
    }
    gram
}

impl StructureConstants {
    /// Validates antisymmetry, the Jacobi identity and positive definiteness of
    /// minus the Killing form.
    pub fn new(name: impl Into<String>, dim: usize, c: Vec<f64>) -> Result<Self> {
        let bad = |msg: String| Error::InvalidStructureConstants(msg);
        if dim == 0 {
            return Err(bad("dimension must be positive".into()));
        }
        if c.len() != dim * dim * dim {
            return Err(Error::Dimension {
                expected: dim * dim * dim,
                got: c.len(),
            });
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(bad("non-finite structure constant".into()));
        }
        let scale = c.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if (c[idx(dim, i, j, k)] + c[idx(dim, j, i, k)]).abs() > CONSTANT_TOL * scale {
                        return Err(bad(format!("c[{i}][{j}][{k}] is not antisymmetric")));
                    }
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for n in 0..dim {
                        let mut jac = 0.0;
                        for l in 0..dim {
                            jac += c[idx(dim, j, k, l)] * c[idx(dim, i, l, n)]
                                + c[idx(dim, k, i, l)] * c[idx(dim, j, l, n)]
                                + c[idx(dim, i, j, l)] * c[idx(dim, k, l, n)];
                        }
                        if jac.abs() > CONSTANT_TOL * scale * scale {
                            return Err(bad(format!(
                                "Jacobi identity fails on ({i}, {j}, {k}) by {jac:e}"
                            )));
                        }
                    }
                }
            }
        }
        let gram = killing_form(dim, &c);
        if gram.clone().cholesky().is_none() {
            return Err(bad(
                "minus the Killing form is not positive definite (algebra not compact semisimple)"
                    .into(),
            ));
        }
        let mut nonzero = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let v = c[idx(dim, i, j, k)];
                    if v != 0.0 {
                        nonzero.push((i, j, k, v));
                    }
                }
            }
        }
        Ok(Self {
            name: name.into(),
            dim,
            c,
            nonzero,
            gram,
        })
    }

    /// so(3) = su(2) with `[E1,E2]=E3`, `[E2,E3]=E1`, `[E3,E1]=E2`.
    pub fn so3() -> Self {
        let mut c = vec![0.0; 27];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[idx(3, i, j, k)] = 1.0;
            c[idx(3, j, i, k)] = -1.0;
        }
        Self::new("so(3)", 3, c).expect("so(3) table is valid")
    }

    /// su(3) in the real basis `E_a = -i λ_a / 2` built from the Gell-Mann matrices.
    pub fn su3() -> Self {
        let h = 0.5;
        let r = 3f64.sqrt() / 2.0;
        let f = [
            (0, 1, 2, 1.0),
            (0, 3, 6, h),
            (0, 4, 5, -h),
            (1, 3, 5, h),
            (1, 4, 6, h),
            (2, 3, 4, h),
            (2, 5, 6, -h),
            (3, 4, 7, r),
            (5, 6, 7, r),
        ];
        let mut c = vec![0.0; 512];
        for &(a, b, e, v) in &f {
            // totally antisymmetric
            for (x, y, z, s) in [
                (a, b, e, v),
                (b, e, a, v),
                (e, a, b, v),
                (b, a, e, -v),
                (a, e, b, -v),
                (e, b, a, -v),
            ] {
                c[idx(8, x, y, z)] = s;
            }
        }
        Self::new("su(3)", 8, c).expect("su(3) table is valid")
    }

    pub fn from_file_repr(file: &StructureConstantsFile) -> Result<Self> {
        let dim = file.dim;
        let mut c = vec![0.0; dim * dim * dim];
        let mut given = vec![false; dim * dim * dim];
        for &(i, j, k, v) in &file.c {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidStructureConstants(format!(
                    "index ({i}, {j}, {k}) out of range for dim {dim}"
                )));
            }
            c[idx(dim, i, j, k)] = v;
            given[idx(dim, i, j, k)] = true;
        }
        for &(i, j, k, v) in &file.c {
            if !given[idx(dim, j, i, k)] {
                c[idx(dim, j, i, k)] = -v;
            }
        }
        let sc = Self::new(file.name.clone(), dim, c)?;
        if let Some(stored) = &file.gram {
            if stored.len() != dim || stored.iter().any(|r| r.len() != dim) {
                return Err(Error::InvalidStructureConstants("gram has wrong shape".into()));
            }
            for i in 0..dim {
                for j in 0..dim {
                    if (stored[i][j] - sc.gram[(i, j)]).abs() > CONSTANT_TOL * sc.gram.amax() {
                        return Err(Error::InvalidStructureConstants(format!(
                            "stored gram[{i}][{j}] disagrees with -tr(ad ad)"
                        )));
                    }
                }
            }
        }
        Ok(sc)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_file_repr(&serde_json::from_str(s)?)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_file_repr(&self) -> StructureConstantsFile {
        StructureConstantsFile {
            dim: self.dim,
            c: self.nonzero.clone(),
            name: self.name.clone(),
            gram: Some(
                (0..self.dim)
                    .map(|i| (0..self.dim).map(|j| self.gram[(i, j)]).collect())
                    .collect(),
            ),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[idx(self.dim, i, j, k)]
    }

    /// Gram matrix of minus the Killing form in the basis `E_i`.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Bracket of two elements of `f` in coordinates.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim);
        for &(i, j, k, v) in &self.nonzero {
            out[k] += v * x[i] * y[j];
        }
        out
    }

    /// Matrix of `ad_x` on `f`.
    pub fn ad(&self, x: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for &(i, j, k, v) in &self.nonzero {
            out[(k, j)] += v * x[i];
        }
        out
    }

    /// Minus the Killing form on `f`.
    pub fn inner_f(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += x[i] * self.gram[(i, j)] * y[j];
            }
        }
        s
    }

    fn check_shape(&self, u: &ProductElement) -> Result<()> {
        if u.0.ncols() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: u.0.ncols(),
            });
        }
        Ok(())
    }

    /// Componentwise bracket on `g = m f`.
    pub fn product_bracket(&self, u: &ProductElement, v: &ProductElement) -> Result<ProductElement> {
        self.check_shape(u)?;
        self.check_shape(v)?;
        if u.m() != v.m() {
            return Err(Error::Dimension {
                expected: u.m(),
                got: v.m(),
            });
        }
        let mut out = DMatrix::zeros(u.m(), self.dim);
        for r in 0..u.m() {
            for &(i, j, k, c) in &self.nonzero {
                out[(r, k)] += c * u.0[(r, i)] * v.0[(r, j)];
            }
        }
        Ok(ProductElement(out))
    }

    /// Minus the Killing form on `g = m f` (sum over the copies).
    pub fn inner(&self, u: &ProductElement, v: &ProductElement) -> f64 {
        let mut s = 0.0;
        for r in 0..u.m() {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    s += u.0[(r, i)] * self.gram[(i, j)] * v.0[(r, j)];
                }
            }
        }
        s
    }

    pub fn norm(&self, u: &ProductElement) -> f64 {
        self.inner(u, u).max(0.0).sqrt()
    }
}

/// Minus the Killing form of a validated table.
pub fn killing_gram(sc: &StructureConstants) -> DMatrix<f64> {
    sc.gram().clone()
}

/// Element of `g = m f`: row `r` holds the component in the `r`-th copy of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductElement(pub DMatrix<f64>);

impl ProductElement {
    pub fn zeros(m: usize, dim: usize) -> Self {
        Self(DMatrix::zeros(m, dim))
    }

    /// `a ⊗ X = (a_1 X, ..., a_m X)`.
    pub fn pure(a: &CoeffVector, x: &[f64]) -> Self {
        Self(DMatrix::from_fn(a.len(), x.len(), |r, k| a[r] * x[k]))
    }

    /// `1 ⊗ X`, an element of `h = diag(f)`.
    pub fn diagonal(m: usize, x: &[f64]) -> Self {
        Self(DMatrix::from_fn(m, x.len(), |_, k| x[k]))
    }

    pub fn m(&self) -> usize {
        self.0.nrows()
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn row(&self, r: usize) -> Vec<f64> {
        self.0.row(r).iter().copied().collect()
    }
}

/// Splits `u = 1 ⊗ h_part + m_part` with `m_part` Killing-orthogonal to `h`.
pub fn h_m_split(u: &ProductElement) -> (DVector<f64>, ProductElement) {
    let m = u.m();
    let mean = DVector::from_fn(u.dim(), |k, _| u.0.column(k).sum() / m as f64);
    let m_part = DMatrix::from_fn(m, u.dim(), |r, k| u.0[(r, k)] - mean[k]);
    (mean, ProductElement(m_part))
}

/// `m`-component of `u`.
pub fn m_component(u: &ProductElement) -> ProductElement {
    h_m_split(u).1
}
