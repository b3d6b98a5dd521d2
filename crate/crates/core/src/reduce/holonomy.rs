//! Generators `Γ_Z = D_Z + C⁻¹ D_Z C - C⁻¹ D_{CZ}` of the linear holonomy
//! algebra, as matrices on `m` in the basis `b^i ⊗ E_l` of an eigenbasis.
//!
//! Coordinate `i * dim + l` belongs to `b^i ⊗ E_l`.

use nalgebra::DMatrix;

use crate::coeff::{diamond, ones, AdaptedSystem};
use crate::error::{Error, Result};
use crate::lie::{m_component, ProductElement, StructureConstants};
use crate::linalg;
use crate::metric::{eigendecompose, MetricT};
use crate::reduce::partition::Partition;
use crate::reduce::split::indicator_matrix;
use crate::coeff::DEFAULT_CLUSTER_TOL;

/// Where `Z` lives: `1 ⊗ E_p` spans `h`, `b^k ⊗ E_p` spans `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorIndex {
    H { p: usize },
    M { k: usize, p: usize },
}

#[derive(Debug, Clone)]
pub struct HolonomyGenerators {
    pub system: AdaptedSystem,
    pub dim: usize,
    pub index: Vec<GeneratorIndex>,
    pub matrices: Vec<DMatrix<f64>>,
}

impl HolonomyGenerators {
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// `max_Z |(I - P) Γ_Z P|` for the projector `P` onto a subspace.
    pub fn invariance_residual(&self, proj: &DMatrix<f64>) -> f64 {
        let n = proj.nrows();
        let comp = DMatrix::identity(n, n) - proj;
        self.matrices
            .iter()
            .map(|g| (&comp * g * proj).amax())
            .fold(0.0, f64::max)
    }

    /// Projector onto `(span{χ_a} ∩ 1^⊥) ⊗ f` in these coordinates.
    pub fn factor_projector(&self, parts: &Partition) -> DMatrix<f64> {
        factor_projector(&self.system, parts, self.dim)
    }
}

fn generator_list(sys: &AdaptedSystem, dim: usize) -> Vec<GeneratorIndex> {
    let mut out: Vec<GeneratorIndex> = (0..dim).map(|p| GeneratorIndex::H { p }).collect();
    for k in 0..sys.len() {
        out.extend((0..dim).map(|p| GeneratorIndex::M { k, p }));
    }
    out
}

/// Generators for `Z` running over the basis `{1 ⊗ E_p} ∪ {b^k ⊗ E_p}` of `g`,
/// from the eigenvalue formula: the `b^j ⊗ E_n` coordinate of `Γ_Z (b^i ⊗ E_l)`
/// for `Z = b^k ⊗ E_p` is `(γ_i + γ_j - γ_k)/γ_j (b^k ⋄ b^i)·b^j c_{pl}^n`,
/// and `Γ_Z = 2 D_Z` on `h`.
pub fn holonomy_generators(t: &MetricT, sc: &StructureConstants) -> HolonomyGenerators {
    let sys = eigendecompose(t, DEFAULT_CLUSTER_TOL).system;
    holonomy_generators_in(&sys, sc)
}

/// As [`holonomy_generators`] for a given eigenbasis.
pub fn holonomy_generators_in(sys: &AdaptedSystem, sc: &StructureConstants) -> HolonomyGenerators {
    let dim = sc.dim();
    let n = sys.len();
    let g = &sys.gammas;
    let b = &sys.vectors;
    let index = generator_list(sys, dim);
    let matrices = index
        .iter()
        .map(|&z| {
            let mut out = DMatrix::zeros(n * dim, n * dim);
            let (p, weight) = match z {
                GeneratorIndex::H { p } => (p, None),
                GeneratorIndex::M { k, p } => (p, Some(k)),
            };
            for i in 0..n {
                for j in 0..n {
                    let coef = match weight {
                        None => {
                            if i == j {
                                2.0
                            } else {
                                0.0
                            }
                        }
                        Some(k) => {
                            let prod = diamond(&b[k], &b[i]).expect("same length").dot(&b[j]);
                            (g[i] + g[j] - g[k]) / g[j] * prod
                        }
                    };
                    if coef == 0.0 {
                        continue;
                    }
                    for l in 0..dim {
                        for nn in 0..dim {
                            out[(j * dim + nn, i * dim + l)] += coef * sc.c(p, l, nn);
                        }
                    }
                }
            }
            out
        })
        .collect();
    HolonomyGenerators {
        system: sys.clone(),
        dim,
        index,
        matrices,
    }
}

fn to_element(sys: &AdaptedSystem, dim: usize, x: &[f64]) -> ProductElement {
    let mut u = ProductElement::zeros(sys.m(), dim);
    for (i, bi) in sys.vectors.iter().enumerate() {
        for l in 0..dim {
            let c = x[i * dim + l];
            if c != 0.0 {
                for r in 0..sys.m() {
                    u.0[(r, l)] += c * bi[r];
                }
            }
        }
    }
    u
}

fn coordinates(sys: &AdaptedSystem, u: &ProductElement) -> Vec<f64> {
    let dim = u.dim();
    let mut out = vec![0.0; sys.len() * dim];
    for (i, bi) in sys.vectors.iter().enumerate() {
        for l in 0..dim {
            out[i * dim + l] = (0..sys.m()).map(|r| bi[r] * u.0[(r, l)]).sum();
        }
    }
    out
}

fn row_action(a: &DMatrix<f64>, u: &ProductElement) -> ProductElement {
    ProductElement(a * &u.0)
}

/// Same generators evaluated from `D_Z + C⁻¹ D_Z C - C⁻¹ D_{CZ}` with brackets
/// in `g`, where `C` multiplies each `f`-column by `T` and `C⁻¹` by `T⁺`.
pub fn holonomy_generators_direct(t: &MetricT, sys: &AdaptedSystem, sc: &StructureConstants) -> Result<HolonomyGenerators> {
    let m = t.m();
    if sys.m() != m {
        return Err(Error::Dimension {
            expected: m,
            got: sys.m(),
        });
    }
    let dim = sc.dim();
    let n = sys.len();
    let c = t.t().clone();
    let c_inv = sys
        .vectors
        .iter()
        .zip(&sys.gammas)
        .fold(DMatrix::zeros(m, m), |acc, (b, g)| acc + b * b.transpose() / *g);
    let d = |z: &ProductElement, y: &ProductElement| -> Result<ProductElement> {
        Ok(m_component(&sc.product_bracket(z, y)?))
    };
    let index = generator_list(sys, dim);
    let mut matrices = Vec::with_capacity(index.len());
    for &zi in &index {
        let mut e = vec![0.0; dim];
        let z = match zi {
            GeneratorIndex::H { p } => {
                e[p] = 1.0;
                ProductElement::pure(&ones(m), &e)
            }
            GeneratorIndex::M { k, p } => {
                e[p] = 1.0;
                ProductElement::pure(&sys.vectors[k], &e)
            }
        };
        let cz = row_action(&c, &z);
        let mut out = DMatrix::zeros(n * dim, n * dim);
        for col in 0..n * dim {
            let mut x = vec![0.0; n * dim];
            x[col] = 1.0;
            let xe = to_element(sys, dim, &x);
            let first = d(&z, &xe)?;
            let second = row_action(&c_inv, &d(&z, &row_action(&c, &xe))?);
            let third = row_action(&c_inv, &d(&cz, &xe)?);
            let img = ProductElement(first.0 + second.0 - third.0);
            for (r, v) in coordinates(sys, &img).into_iter().enumerate() {
                out[(r, col)] = v;
            }
        }
        matrices.push(out);
    }
    Ok(HolonomyGenerators {
        system: sys.clone(),
        dim,
        index,
        matrices,
    })
}

/// Projector onto `(span{χ_a} ∩ 1^⊥) ⊗ f` in the coordinates of `sys`.
pub fn factor_projector(sys: &AdaptedSystem, parts: &Partition, dim: usize) -> DMatrix<f64> {
    let m = sys.m();
    let chi = indicator_matrix(parts, m);
    let centred = DMatrix::from_fn(m, chi.ncols(), |r, c| chi[(r, c)] - chi.column(c).sum() / m as f64);
    let basis = linalg::orth(&centred);
    let pv = &basis * basis.transpose();
    let bm = sys.basis_matrix();
    let q = bm.transpose() * pv * &bm;
    q.kronecker(&DMatrix::<f64>::identity(dim, dim))
}
