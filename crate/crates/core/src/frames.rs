//! Frames in `C^N` and frames of Hilbert–Schmidt operators.
//!
//! Inner products are linear in the first argument:
//! `<x, y> = sum_t x_t conj(y_t)`. The elementary tensor `f1 (x) f2` is the
//! rank-one operator `f -> <f, f1> f2`, i.e. the `N2 x N1` matrix
//! `f2 f1^H`, and the Hilbert–Schmidt inner product is
//! `<O, O'> = trace(O'^H O)`. With these conventions
//! `<f1 (x) f2, g1 (x) g2> = conj(<f1, g1>) <f2, g2>`, so the Gram tensor of
//! a tensor product frame is `kronecker(conj(G1), G2)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebras::{algebra_norm, decay_profile, AlgMatrix, AlgebraSpec};
use crate::error::{Error, Result};
use crate::lattice::IndexSet;
use crate::tensor4::Tensor4;

/// Relative threshold `A > FRAME_THRESHOLD * B` separating frames from
/// rank-deficient families.
pub const FRAME_THRESHOLD: f64 = 1e-10;

/// `<x, y> = sum_t x_t conj(y_t)`.
pub fn inner_product(x: &DVector<Complex64>, y: &DVector<Complex64>) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// `<O, O'>_HS = trace(O'^H O) = sum_ab O_ab conj(O'_ab)`.
pub fn hs_inner_product(o: &DMatrix<Complex64>, o2: &DMatrix<Complex64>) -> Complex64 {
    o.iter().zip(o2.iter()).map(|(a, b)| a * b.conj()).sum()
}

fn is_finite(z: &Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Finite family of vectors in `C^N` indexed by an [`IndexSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    space_dim: usize,
    index: IndexSet,
    vectors: Vec<DVector<Complex64>>,
}

impl Frame {
    pub fn new(space_dim: usize, index: IndexSet, vectors: Vec<DVector<Complex64>>) -> Result<Self> {
        if space_dim == 0 {
            return Err(Error::invalid("space dimension must be positive"));
        }
        if vectors.len() != index.len() {
            return Err(Error::invalid(format!(
                "{} vectors for an index set of {} points",
                vectors.len(),
                index.len()
            )));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != space_dim) {
            return Err(Error::invalid(format!(
                "vector of length {} in a space of dimension {space_dim}",
                v.len()
            )));
        }
        if vectors.iter().any(|v| !v.iter().all(is_finite)) {
            return Err(Error::invalid("frame vectors must be finite"));
        }
        if !vectors.iter().any(|v| v.iter().any(|z| z.norm() > 0.0)) {
            return Err(Error::invalid("a frame needs at least one nonzero vector"));
        }
        Ok(Frame {
            space_dim,
            index,
            vectors,
        })
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn index(&self) -> &IndexSet {
        &self.index
    }

    pub fn vectors(&self) -> &[DVector<Complex64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Frame vectors as the columns of an `N x |I|` matrix (the synthesis
    /// matrix).
    pub fn synthesis_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_columns(&self.vectors)
    }
}

/// `G[a, b] = <psi_a, psi_b>`.
pub fn gram_matrix(f: &Frame) -> AlgMatrix {
    let n = f.len();
    let entries = DMatrix::from_fn(n, n, |a, b| inner_product(&f.vectors[a], &f.vectors[b]));
    AlgMatrix::square(f.index.clone(), entries).expect("gram shape matches index")
}

/// `S = sum_i psi_i psi_i^H`.
pub fn frame_operator(f: &Frame) -> DMatrix<Complex64> {
    let n = f.space_dim;
    let mut s = DMatrix::<Complex64>::zeros(n, n);
    for v in &f.vectors {
        s += v * v.adjoint();
    }
    s
}

/// Optimal frame bounds: extreme eigenvalues of the frame operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    /// Whether the family is numerically a frame (`A > 1e-10 B`).
    pub fn is_frame(&self) -> bool {
        self.upper > 0.0 && self.lower > FRAME_THRESHOLD * self.upper
    }

    pub fn condition(&self) -> f64 {
        self.upper / self.lower
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn frame_bounds(f: &Frame) -> FrameBounds {
    let ev = hermitian_eigenvalues(&frame_operator(f));
    FrameBounds {
        lower: ev.first().copied().unwrap_or(0.0).max(0.0),
        upper: ev.last().copied().unwrap_or(0.0).max(0.0),
    }
}

/// `c_i = <f, psi_i>`.
pub fn analysis(frame: &Frame, f: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    if f.len() != frame.space_dim {
        return Err(Error::invalid(format!(
            "vector of length {} in a space of dimension {}",
            f.len(),
            frame.space_dim
        )));
    }
    Ok(DVector::from_iterator(
        frame.len(),
        frame.vectors.iter().map(|psi| inner_product(f, psi)),
    ))
}

/// `sum_i c_i psi_i`.
pub fn synthesis(frame: &Frame, c: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    if c.len() != frame.len() {
        return Err(Error::invalid(format!(
            "{} coefficients for a frame of {} elements",
            c.len(),
            frame.len()
        )));
    }
    let mut out = DVector::<Complex64>::zeros(frame.space_dim);
    for (coef, psi) in c.iter().zip(&frame.vectors) {
        out.axpy(*coef, psi, Complex64::new(1.0, 0.0));
    }
    Ok(out)
}

/// Canonical dual frame `S^{-1} psi_i`.
///
/// With the synthesis matrix `T = U Sigma V^H`, the dual synthesis matrix is
/// `U Sigma^{-1} V^H`; working from `T` instead of `S = T T^H` keeps the
/// error proportional to `sqrt(B / A)` rather than `B / A`.
pub fn canonical_dual(f: &Frame) -> Result<Frame> {
    let bounds = frame_bounds(f);
    if !bounds.is_frame() {
        return Err(Error::NotAFrame {
            lower: bounds.lower,
            upper: bounds.upper,
        });
    }
    let svd = f.synthesis_matrix().svd(true, true);
    let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested V^H"));
    let inv_sigma = DMatrix::from_diagonal(&svd.singular_values.map(|s| Complex64::new(1.0 / s, 0.0)));
    let dual = u * inv_sigma * v_t;
    let vectors = dual.column_iter().map(|c| c.into_owned()).collect();
    Frame::new(f.space_dim, f.index.clone(), vectors)
}

/// `f1 (x) f2 = f2 f1^H`, an `N2 x N1` matrix.
pub fn elementary_tensor(f1: &DVector<Complex64>, f2: &DVector<Complex64>) -> DMatrix<Complex64> {
    f2 * f1.adjoint()
}

/// Family of `N2 x N1` matrices with the Hilbert–Schmidt inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct HsFrame {
    dims: (usize, usize),
    index: IndexSet,
    product: Option<(IndexSet, IndexSet)>,
    operators: Vec<DMatrix<Complex64>>,
}

impl HsFrame {
    /// Family indexed by a flat index set, without product structure.
    pub fn new(
        dims: (usize, usize),
        index: IndexSet,
        operators: Vec<DMatrix<Complex64>>,
    ) -> Result<Self> {
        let (n1, n2) = dims;
        if n1 == 0 || n2 == 0 {
            return Err(Error::invalid("operator dimensions must be positive"));
        }
        if operators.len() != index.len() {
            return Err(Error::invalid(format!(
                "{} operators for an index set of {} points",
                operators.len(),
                index.len()
            )));
        }
        if let Some(o) = operators.iter().find(|o| o.shape() != (n2, n1)) {
            return Err(Error::invalid(format!(
                "operator of shape {:?}, expected {n2}x{n1}",
                o.shape()
            )));
        }
        if operators.iter().any(|o| !o.iter().all(is_finite)) {
            return Err(Error::invalid("operators must be finite"));
        }
        Ok(HsFrame {
            dims,
            index,
            product: None,
            operators,
        })
    }

    /// Family indexed by `outer x inner`; operators in lexicographic order
    /// of `(i, k)`, `i` slowest.
    pub fn with_product(
        dims: (usize, usize),
        outer: IndexSet,
        inner: IndexSet,
        operators: Vec<DMatrix<Complex64>>,
    ) -> Result<Self> {
        let index = IndexSet::product(&outer, &inner)?;
        let mut frame = HsFrame::new(dims, index, operators)?;
        frame.product = Some((outer, inner));
        Ok(frame)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn index(&self) -> &IndexSet {
        &self.index
    }

    pub fn product(&self) -> Option<(&IndexSet, &IndexSet)> {
        self.product.as_ref().map(|(a, b)| (a, b))
    }

    pub fn operators(&self) -> &[DMatrix<Complex64>] {
        &self.operators
    }

    /// The same family as vectors in `C^(N1 N2)`; the HS inner product
    /// becomes the standard one.
    pub fn to_vector_frame(&self) -> Result<Frame> {
        let (n1, n2) = self.dims;
        let vectors = self
            .operators
            .iter()
            .map(|o| DVector::from_column_slice(o.as_slice()))
            .collect();
        Frame::new(n1 * n2, self.index.clone(), vectors)
    }

    fn rebuild_from_vectors(&self, f: &Frame) -> HsFrame {
        let (n1, n2) = self.dims;
        HsFrame {
            dims: self.dims,
            index: self.index.clone(),
            product: self.product.clone(),
            operators: f
                .vectors()
                .iter()
                .map(|v| DMatrix::from_column_slice(n2, n1, v.as_slice()))
                .collect(),
        }
    }
}

/// `{psi_{1,i} (x) psi_{2,k}}` over `I1 x I2`.
pub fn tensor_product_frame(f1: &Frame, f2: &Frame) -> Result<HsFrame> {
    let mut operators = Vec::with_capacity(f1.len() * f2.len());
    for a in &f1.vectors {
        for b in &f2.vectors {
            operators.push(elementary_tensor(a, b));
        }
    }
    HsFrame::with_product(
        (f1.space_dim, f2.space_dim),
        f1.index.clone(),
        f2.index.clone(),
        operators,
    )
}

/// Frame bounds of an HS family.
pub fn hs_frame_bounds(f: &HsFrame) -> Result<FrameBounds> {
    Ok(frame_bounds(&f.to_vector_frame()?))
}

/// Canonical dual of an HS family (through its vectorisation).
pub fn hs_canonical_dual(f: &HsFrame) -> Result<HsFrame> {
    let dual = canonical_dual(&f.to_vector_frame()?)?;
    Ok(f.rebuild_from_vectors(&dual))
}

/// Gram matrix of the flat family, `G[a, b] = <Omega_a, Omega_b>_HS`.
pub fn hs_gram_matrix(f: &HsFrame) -> AlgMatrix {
    let n = f.operators.len();
    let entries = DMatrix::from_fn(n, n, |a, b| {
        hs_inner_product(&f.operators[a], &f.operators[b])
    });
    AlgMatrix::square(f.index.clone(), entries).expect("gram shape matches index")
}

/// `G[i, k, l, j] = <Omega_{i,k}, Omega_{j,l}>_HS`.
pub fn gram_tensor4(f: &HsFrame) -> Result<Tensor4> {
    let (outer, inner) = f
        .product()
        .ok_or_else(|| Error::invalid("Gram tensor needs an HS family with product index"))?;
    let n2 = inner.len();
    let op = |i: usize, k: usize| &f.operators[i * n2 + k];
    Tensor4::from_fn(outer.clone(), inner.clone(), |i, k, l, j| {
        hs_inner_product(op(i, k), op(j, l))
    })
}

/// Algebra norm of a frame's Gram matrix and its off-diagonal decay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalisationReport {
    pub spec: AlgebraSpec,
    pub norm: f64,
    /// `(r, max_{|i-j| = r} |G_ij|)` for every realised distance `r`.
    pub profile: Vec<(f64, f64)>,
}

pub fn localisation_report(f: &Frame, spec: &AlgebraSpec) -> Result<LocalisationReport> {
    let gram = gram_matrix(f);
    Ok(LocalisationReport {
        spec: spec.clone(),
        norm: algebra_norm(&gram, spec)?,
        profile: decay_profile(&gram)?,
    })
}

/// Standard basis of `C^n`, indexed by `{0, ..., n-1}`.
pub fn orthonormal_basis(n: usize) -> Result<Frame> {
    let vectors = (0..n)
        .map(|a| {
            DVector::from_fn(n, |t, _| {
                Complex64::new(if t == a { 1.0 } else { 0.0 }, 0.0)
            })
        })
        .collect();
    Frame::new(n, IndexSet::range(n)?, vectors)
}

/// Standard basis followed by the unitary Fourier basis, `2n` vectors
/// indexed by `{0, ..., 2n-1}`. A tight frame with bound 2.
pub fn union_of_bases(n: usize) -> Result<Frame> {
    let mut vectors = orthonormal_basis(n)?.vectors;
    let scale = 1.0 / (n as f64).sqrt();
    for w in 0..n {
        vectors.push(DVector::from_fn(n, |t, _| {
            Complex64::from_polar(scale, 2.0 * PI * (w * t) as f64 / n as f64)
        }));
    }
    Frame::new(n, IndexSet::range(2 * n)?, vectors)
}

/// Periodic Gaussian window `g_t = exp(-pi (d(t, 0) / width)^2)` on `Z_n`,
/// with `d` the cyclic distance.
pub fn gaussian_window(n: usize, width: f64) -> Result<DVector<Complex64>> {
    if n == 0 {
        return Err(Error::invalid("window length must be positive"));
    }
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::invalid(format!("window width must be positive, got {width}")));
    }
    Ok(DVector::from_fn(n, |t, _| {
        let d = t.min(n - t) as f64;
        Complex64::new((-PI * (d / width).powi(2)).exp(), 0.0)
    }))
}

/// All `n` cyclic shifts `g(t - a)` of a window on `Z_n`, indexed by
/// `{0, ..., n-1}`. The Gram matrix is circulant.
pub fn shift_invariant_frame(window: &DVector<Complex64>) -> Result<Frame> {
    let n = window.len();
    let vectors = (0..n)
        .map(|a| DVector::from_fn(n, |t, _| window[(t + n - a) % n]))
        .collect();
    Frame::new(n, IndexSet::range(n)?, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn vec_of(values: &[(f64, f64)]) -> DVector<Complex64> {
        DVector::from_iterator(values.len(), values.iter().map(|&(a, b)| c(a, b)))
    }

    fn e(n: usize, a: usize) -> DVector<Complex64> {
        DVector::from_fn(n, |t, _| c(if t == a { 1.0 } else { 0.0 }, 0.0))
    }

    fn redundant() -> Frame {
        Frame::new(2, IndexSet::range(3).unwrap(), vec![e(2, 0), e(2, 0), e(2, 1)]).unwrap()
    }

    #[test]
    fn inner_product_is_linear_in_first_argument() {
        let x = vec_of(&[(1.0, 2.0), (0.0, -1.0)]);
        let y = vec_of(&[(0.5, 0.0), (2.0, 1.0)]);
        let alpha = c(0.0, 1.0);
        assert_eq!(inner_product(&(&x * alpha), &y), alpha * inner_product(&x, &y));
        assert_eq!(inner_product(&x, &(&y * alpha)), alpha.conj() * inner_product(&x, &y));
    }

    #[test]
    fn frame_validation() {
        let idx = IndexSet::range(2).unwrap();
        assert!(Frame::new(2, idx.clone(), vec![e(2, 0)]).is_err());
        assert!(Frame::new(2, idx.clone(), vec![e(2, 0), e(3, 0)]).is_err());
        let zero = DVector::<Complex64>::zeros(2);
        assert!(Frame::new(2, idx, vec![zero.clone(), zero]).is_err());
    }

    #[test]
    fn gram_examples() {
        let onb = orthonormal_basis(2).unwrap();
        assert_eq!(gram_matrix(&onb), AlgMatrix::identity(onb.index()));
        let g = gram_matrix(&redundant());
        let expected = [[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(g.get(a, b), c(expected[a][b], 0.0));
            }
        }
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(
            frame_bounds(&orthonormal_basis(2).unwrap()),
            FrameBounds {
                lower: 1.0,
                upper: 1.0
            }
        );
        let b = frame_bounds(&redundant());
        assert!((b.lower - 1.0).abs() < 1e-15 && (b.upper - 2.0).abs() < 1e-15);
        let deficient = Frame::new(2, IndexSet::range(1).unwrap(), vec![e(2, 0)]).unwrap();
        let b = frame_bounds(&deficient);
        assert_eq!(b.lower, 0.0);
        assert!((b.upper - 1.0).abs() < 1e-15);
        assert!(!b.is_frame());
        assert!(matches!(canonical_dual(&deficient), Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn frame_operator_of_redundant_family() {
        let s = frame_operator(&redundant());
        assert_eq!(s, DMatrix::from_diagonal(&vec_of(&[(2.0, 0.0), (1.0, 0.0)])));
        let u = union_of_bases(4).unwrap();
        let s = frame_operator(&u);
        assert!((s - DMatrix::<Complex64>::identity(4, 4) * c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn analysis_and_synthesis_basics() {
        let onb = orthonormal_basis(3).unwrap();
        assert_eq!(analysis(&onb, &e(3, 0)).unwrap(), e(3, 0));
        assert_eq!(
            analysis(&onb, &DVector::zeros(3)).unwrap(),
            DVector::<Complex64>::zeros(3)
        );
        assert_eq!(
            synthesis(&onb, &DVector::zeros(3)).unwrap(),
            DVector::<Complex64>::zeros(3)
        );
        let coords = vec_of(&[(1.0, -1.0), (0.0, 2.0), (3.0, 0.0)]);
        assert_eq!(synthesis(&onb, &coords).unwrap(), coords);
        assert!(analysis(&onb, &e(2, 0)).is_err());
        assert!(synthesis(&onb, &e(2, 0)).is_err());
    }

    #[test]
    fn canonical_dual_examples() {
        let close = |got: &Frame, want: &[DVector<Complex64>]| {
            got.vectors().iter().zip(want).all(|(a, b)| (a - b).norm() < 1e-15)
        };
        let dual = canonical_dual(&redundant()).unwrap();
        let half = e(2, 0) * c(0.5, 0.0);
        assert!(close(&dual, &[half.clone(), half, e(2, 1)]));
        let onb = orthonormal_basis(3).unwrap();
        assert!(close(&canonical_dual(&onb).unwrap(), onb.vectors()));
    }

    #[test]
    fn elementary_tensor_examples() {
        let m = elementary_tensor(&e(2, 0), &e(2, 0));
        let mut unit = DMatrix::<Complex64>::zeros(2, 2);
        unit[(0, 0)] = c(1.0, 0.0);
        assert_eq!(m, unit);

        let f1 = vec_of(&[(1.0, 2.0), (0.0, -1.0)]);
        let f2 = vec_of(&[(0.5, 0.0), (2.0, 1.0), (0.0, 3.0)]);
        let alpha = c(0.3, -1.2);
        let lhs = elementary_tensor(&f1, &f2) * alpha;
        let via_first = elementary_tensor(&(&f1 * alpha.conj()), &f2);
        let via_second = elementary_tensor(&f1, &(&f2 * alpha));
        assert!((&lhs - via_first).norm() < 1e-14);
        assert!((&lhs - via_second).norm() < 1e-14);

        // the operator maps f to <f, f1> f2
        let f = vec_of(&[(0.25, 1.0), (-2.0, 0.5)]);
        let applied = elementary_tensor(&f1, &f2) * &f;
        let expected = &f2 * inner_product(&f, &f1);
        assert!((applied - expected).norm() < 1e-14);
    }

    #[test]
    fn hs_family_validation_and_structure() {
        let op = DMatrix::<Complex64>::zeros(3, 2);
        assert!(HsFrame::new((2, 3), IndexSet::range(1).unwrap(), vec![op.clone()]).is_ok());
        assert!(HsFrame::new((3, 2), IndexSet::range(1).unwrap(), vec![op.clone()]).is_err());
        let flat = HsFrame::new((2, 3), IndexSet::range(1).unwrap(), vec![op]).unwrap();
        assert!(matches!(gram_tensor4(&flat), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn orthonormal_product_has_identity_gram_tensor() {
        let f1 = orthonormal_basis(2).unwrap();
        let f2 = orthonormal_basis(3).unwrap();
        let hs = tensor_product_frame(&f1, &f2).unwrap();
        let g = gram_tensor4(&hs).unwrap();
        assert_eq!(g, Tensor4::identity(f1.index(), f2.index()).unwrap());
        let b = hs_frame_bounds(&hs).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-15 && (b.upper - 1.0).abs() < 1e-15);
    }

    #[test]
    fn localisation_of_orthonormal_basis() {
        let onb = orthonormal_basis(4).unwrap();
        let report = localisation_report(&onb, &AlgebraSpec::jaffard(3.0).unwrap()).unwrap();
        assert_eq!(report.norm, 1.0);
        assert_eq!(report.profile[0], (0.0, 1.0));
        assert!(report.profile[1..].iter().all(|&(_, v)| v == 0.0));
    }

    #[test]
    fn constant_gram_jaffard_norm_grows_with_diameter() {
        // all vectors equal: every Gram entry is |g|^2 = 1
        let v = e(2, 1);
        let f = Frame::new(2, IndexSet::range(5).unwrap(), vec![v; 5]).unwrap();
        for s in [0.0, 1.0, 2.5] {
            let r = localisation_report(&f, &AlgebraSpec::jaffard(s).unwrap()).unwrap();
            assert!((r.norm - 5f64.powf(s)).abs() < 1e-12 * 5f64.powf(s));
        }
    }

    #[test]
    fn shift_invariant_gram_is_circulant() {
        let g = gaussian_window(8, 2.0).unwrap();
        let f = shift_invariant_frame(&g).unwrap();
        let gram = gram_matrix(&f);
        for a in 0..8 {
            for b in 0..8 {
                let diff = (gram.get(a, b) - gram.get((a + 1) % 8, (b + 1) % 8)).norm();
                assert!(diff < 1e-15);
            }
        }
        assert!(gaussian_window(0, 1.0).is_err());
        assert!(gaussian_window(4, 0.0).is_err());
    }
}
