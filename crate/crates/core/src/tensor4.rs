//! Rank-four tensors indexed by `I1 x I2 x I2 x I1` and the normed algebra
//! they form under the doubly contracted product.
//!
//! An entry `A[i, k, l, j]` is stored at
//! `((i * |I2| + k) * |I2| + l) * |I1| + j`, so `i` varies slowest and `j`
//! fastest. [`flatten`] maps a tensor to the matrix over `(I1 x I2)^2` with
//! `M[(i, k), (j, l)] = A[i, k, l, j]`; under this map the contracted product
//! becomes the matrix product and the adjoint the conjugate transpose.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebras::{algebra_norm, spectral_norm, AlgMatrix, AlgebraSpec};
use crate::error::{Error, Result};
use crate::lattice::IndexSet;

/// Hard cap on `|I1| * |I2|`.
pub const MAX_FLAT_SIZE: usize = 512;

/// Condition-number cutoff for [`inverse_in_algebra`].
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    outer: IndexSet,
    inner: IndexSet,
    data: Vec<Complex64>,
}

/// Pair of scalar algebras: `spec1` acts over `I1^2`, `spec2` over `I2^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorAlgebraSpec {
    pub spec1: AlgebraSpec,
    pub spec2: AlgebraSpec,
}

impl TensorAlgebraSpec {
    pub fn new(spec1: AlgebraSpec, spec2: AlgebraSpec) -> Result<Self> {
        spec1.validate()?;
        spec2.validate()?;
        Ok(TensorAlgebraSpec { spec1, spec2 })
    }
}

impl std::fmt::Display for TensorAlgebraSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} / {}", self.spec1, self.spec2)
    }
}

fn check_capacity(outer: &IndexSet, inner: &IndexSet) -> Result<()> {
    let size = outer.len() * inner.len();
    if size > MAX_FLAT_SIZE {
        return Err(Error::Capacity {
            what: "rank-four tensor (|I1|*|I2|)",
            size,
            limit: MAX_FLAT_SIZE,
        });
    }
    Ok(())
}

impl Tensor4 {
    /// Wraps entries given in canonical `(i, k, l, j)` order.
    pub fn new(outer: IndexSet, inner: IndexSet, data: Vec<Complex64>) -> Result<Self> {
        check_capacity(&outer, &inner)?;
        let (n1, n2) = (outer.len(), inner.len());
        let expected = n1 * n1 * n2 * n2;
        if data.len() != expected {
            return Err(Error::invalid(format!(
                "expected {expected} entries, got {}",
                data.len()
            )));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid("tensor entries must be finite"));
        }
        Ok(Tensor4 { outer, inner, data })
    }

    /// Tensor with entries `f(i, k, l, j)` (positions in the index sets).
    pub fn from_fn(
        outer: IndexSet,
        inner: IndexSet,
        mut f: impl FnMut(usize, usize, usize, usize) -> Complex64,
    ) -> Result<Self> {
        check_capacity(&outer, &inner)?;
        let (n1, n2) = (outer.len(), inner.len());
        let mut data = Vec::with_capacity(n1 * n1 * n2 * n2);
        for i in 0..n1 {
            for k in 0..n2 {
                for l in 0..n2 {
                    for j in 0..n1 {
                        data.push(f(i, k, l, j));
                    }
                }
            }
        }
        Tensor4::new(outer, inner, data)
    }

    pub fn zeros(outer: &IndexSet, inner: &IndexSet) -> Result<Self> {
        Tensor4::from_fn(outer.clone(), inner.clone(), |_, _, _, _| Complex64::new(0.0, 0.0))
    }

    /// `Id[i, k, l, j] = delta_ij delta_kl`.
    pub fn identity(outer: &IndexSet, inner: &IndexSet) -> Result<Self> {
        Tensor4::from_fn(outer.clone(), inner.clone(), |i, k, l, j| {
            if i == j && k == l {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn outer(&self) -> &IndexSet {
        &self.outer
    }

    pub fn inner(&self) -> &IndexSet {
        &self.inner
    }

    /// Entries in canonical order.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    fn offset(&self, i: usize, k: usize, l: usize, j: usize) -> usize {
        let (n1, n2) = (self.outer.len(), self.inner.len());
        ((i * n2 + k) * n2 + l) * n1 + j
    }

    /// Entry at positions `(i, k, l, j)`.
    #[inline]
    pub fn get(&self, i: usize, k: usize, l: usize, j: usize) -> Complex64 {
        self.data[self.offset(i, k, l, j)]
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Tensor4 {
            outer: self.outer.clone(),
            inner: self.inner.clone(),
            data: self.data.iter().map(|z| z * alpha).collect(),
        }
    }

    pub fn add(&self, other: &Tensor4) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Tensor4 {
            outer: self.outer.clone(),
            inner: self.inner.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Tensor4) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Entrywise modulus.
    pub fn modulus(&self) -> Self {
        Tensor4 {
            outer: self.outer.clone(),
            inner: self.inner.clone(),
            data: self.data.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Tensor4) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn check_compatible(&self, other: &Tensor4) -> Result<()> {
        if self.outer != other.outer || self.inner != other.inner {
            return Err(Error::invalid("tensors are indexed by different index sets"));
        }
        Ok(())
    }

    fn inner_slice_dense(&self, i: usize, j: usize) -> DMatrix<Complex64> {
        let n2 = self.inner.len();
        DMatrix::from_fn(n2, n2, |k, l| self.get(i, k, l, j))
    }

    fn outer_slice_dense(&self, k: usize, l: usize) -> DMatrix<Complex64> {
        let n1 = self.outer.len();
        DMatrix::from_fn(n1, n1, |i, j| self.get(i, k, l, j))
    }

    /// Matrix over `I1^2` of operator norms of the inner slices.
    pub fn inner_envelope(&self) -> AlgMatrix {
        let n1 = self.outer.len();
        let entries = DMatrix::from_fn(n1, n1, |i, j| {
            Complex64::new(spectral_norm(&self.inner_slice_dense(i, j)), 0.0)
        });
        AlgMatrix::square(self.outer.clone(), entries).expect("envelope shape matches")
    }

    /// Matrix over `I2^2` of operator norms of the outer slices.
    pub fn outer_envelope(&self) -> AlgMatrix {
        let n2 = self.inner.len();
        let entries = DMatrix::from_fn(n2, n2, |k, l| {
            Complex64::new(spectral_norm(&self.outer_slice_dense(k, l)), 0.0)
        });
        AlgMatrix::square(self.inner.clone(), entries).expect("envelope shape matches")
    }
}

/// Doubly contracted product
/// `(A : B)[i, k, l, j] = sum_{n in I2} sum_{m in I1} A[i, k, n, m] B[m, n, l, j]`,
/// evaluated as a matrix product of the flattenings.
pub fn contract(a: &Tensor4, b: &Tensor4) -> Result<Tensor4> {
    a.check_compatible(b)?;
    let product = flatten(a).into_entries() * flatten(b).into_entries();
    unflatten_dense(&product, &a.outer, &a.inner)
}

/// `(A*)[i, k, l, j] = conj(A[j, l, k, i])`.
pub fn adjoint(a: &Tensor4) -> Tensor4 {
    let (n1, n2) = (a.outer.len(), a.inner.len());
    let mut data = Vec::with_capacity(a.data.len());
    for i in 0..n1 {
        for k in 0..n2 {
            for l in 0..n2 {
                for j in 0..n1 {
                    data.push(a.get(j, l, k, i).conj());
                }
            }
        }
    }
    Tensor4 {
        outer: a.outer.clone(),
        inner: a.inner.clone(),
        data,
    }
}

/// `(A[i, k, l, j])_{(k, l)}` for fixed outer points `i`, `j`.
pub fn slice_inner(a: &Tensor4, i: &[i64], j: &[i64]) -> Result<AlgMatrix> {
    let ip = a.outer.require_position(i)?;
    let jp = a.outer.require_position(j)?;
    AlgMatrix::square(a.inner.clone(), a.inner_slice_dense(ip, jp))
}

/// `(A[i, k, l, j])_{(i, j)}` for fixed inner points `k`, `l`.
pub fn slice_outer(a: &Tensor4, k: &[i64], l: &[i64]) -> Result<AlgMatrix> {
    let kp = a.inner.require_position(k)?;
    let lp = a.inner.require_position(l)?;
    AlgMatrix::square(a.outer.clone(), a.outer_slice_dense(kp, lp))
}

fn check_spec_dim(index: &IndexSet, spec: &AlgebraSpec) -> Result<()> {
    if let AlgebraSpec::Sjostrand { weight } = spec {
        if let Some(d) = weight.dim() {
            if d != index.dim() {
                return Err(Error::invalid(format!(
                    "weight has dimension {d} but the index set has dimension {}",
                    index.dim()
                )));
            }
        }
    }
    Ok(())
}

/// `spec1`-norm of the `I1^2` matrix of inner-slice operator norms.
pub fn norm_a1_tilde(a: &Tensor4, spec1: &AlgebraSpec) -> Result<f64> {
    check_spec_dim(&a.outer, spec1)?;
    algebra_norm(&a.inner_envelope(), spec1)
}

/// `spec2`-norm of the `I2^2` matrix of outer-slice operator norms.
pub fn norm_a2_tilde(a: &Tensor4, spec2: &AlgebraSpec) -> Result<f64> {
    check_spec_dim(&a.inner, spec2)?;
    algebra_norm(&a.outer_envelope(), spec2)
}

/// `max(norm_a1_tilde, norm_a2_tilde)`.
pub fn norm_a(a: &Tensor4, spec: &TensorAlgebraSpec) -> Result<f64> {
    Ok(norm_a1_tilde(a, &spec.spec1)?.max(norm_a2_tilde(a, &spec.spec2)?))
}

/// `M[(i, k), (j, l)] = A[i, k, l, j]` over the product index `I1 x I2`.
pub fn flatten(a: &Tensor4) -> AlgMatrix {
    let (n1, n2) = (a.outer.len(), a.inner.len());
    let n = n1 * n2;
    let entries = DMatrix::from_fn(n, n, |row, col| {
        let (i, k) = (row / n2, row % n2);
        let (j, l) = (col / n2, col % n2);
        a.get(i, k, l, j)
    });
    let product = IndexSet::product(&a.outer, &a.inner).expect("product within tensor cap");
    AlgMatrix::square(product, entries).expect("flattened shape matches")
}

/// Inverse of [`flatten`].
pub fn unflatten(m: &AlgMatrix, outer: &IndexSet, inner: &IndexSet) -> Result<Tensor4> {
    if !m.is_square() {
        return Err(Error::invalid("only square matrices can be unflattened"));
    }
    unflatten_dense(m.entries(), outer, inner)
}

fn unflatten_dense(m: &DMatrix<Complex64>, outer: &IndexSet, inner: &IndexSet) -> Result<Tensor4> {
    let (n1, n2) = (outer.len(), inner.len());
    let n = n1 * n2;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::invalid(format!(
            "matrix is {}x{}, expected {n}x{n} for |I1|={n1}, |I2|={n2}",
            m.nrows(),
            m.ncols()
        )));
    }
    Tensor4::from_fn(outer.clone(), inner.clone(), |i, k, l, j| {
        m[(i * n2 + k, j * n2 + l)]
    })
}

/// `T[i, k, l, j] = G1[i, j] G2[k, l]`.
pub fn kronecker(g1: &AlgMatrix, g2: &AlgMatrix) -> Result<Tensor4> {
    if !g1.is_square() || !g2.is_square() {
        return Err(Error::invalid("Kronecker factors must be square"));
    }
    Tensor4::from_fn(g1.rows().clone(), g2.rows().clone(), |i, k, l, j| {
        g1.get(i, j) * g2.get(k, l)
    })
}

/// Diagnostics produced alongside an inverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseReport {
    pub norm_a: f64,
    pub norm_a_inverse: f64,
    pub operator_norm: f64,
    pub operator_norm_inverse: f64,
    pub condition: f64,
    pub residual: f64,
}

/// Condition number `sigma_max / sigma_min` of a square matrix.
pub fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverts `A` through its flattening and reports algebra and operator norms
/// of both `A` and the inverse together with the inversion residual.
pub fn inverse_in_algebra(a: &Tensor4, spec: &TensorAlgebraSpec) -> Result<(Tensor4, InverseReport)> {
    let m = flatten(a).into_entries();
    let condition = condition_number(&m);
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::Singular { condition });
    }
    let inv = m
        .clone()
        .try_inverse()
        .ok_or(Error::Singular { condition })?;
    let n = m.nrows();
    let residual = spectral_norm(&(&m * &inv - DMatrix::<Complex64>::identity(n, n)));
    let inverse = unflatten_dense(&inv, &a.outer, &a.inner)?;
    let report = InverseReport {
        norm_a: norm_a(a, spec)?,
        norm_a_inverse: norm_a(&inverse, spec)?,
        operator_norm: spectral_norm(&m),
        operator_norm_inverse: spectral_norm(&inv),
        condition,
        residual,
    };
    Ok((inverse, report))
}
