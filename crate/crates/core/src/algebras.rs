//! Spectral matrix-algebra norms on finite index sets.
//!
//! The three families are the Jaffard class (polynomial off-diagonal decay),
//! the weighted Schur-type algebras (weighted row and column `l^p` norms) and
//! the Sjöstrand algebra (weighted sum over diagonals of entrywise maxima).
//! All suprema over infinite index sets become maxima over the finite set.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{difference, weight_eval, IndexSet, Point, Weight};

/// Smallest side above which [`operator_norm`] switches to power iteration.
pub const DENSE_SVD_LIMIT: usize = 512;
const POWER_ITERATIONS: usize = 10_000;
const POWER_TOLERANCE: f64 = 1e-12;

/// Complex matrix indexed by a pair of index sets.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgMatrix {
    rows: IndexSet,
    cols: IndexSet,
    entries: DMatrix<Complex64>,
}

impl AlgMatrix {
    pub fn new(rows: IndexSet, cols: IndexSet, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != rows.len() || entries.ncols() != cols.len() {
            return Err(Error::invalid(format!(
                "entries are {}x{} but index sets have sizes {}x{}",
                entries.nrows(),
                entries.ncols(),
                rows.len(),
                cols.len()
            )));
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(AlgMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Square matrix over `index` with the given entries.
    pub fn square(index: IndexSet, entries: DMatrix<Complex64>) -> Result<Self> {
        AlgMatrix::new(index.clone(), index, entries)
    }

    pub fn from_fn(
        rows: IndexSet,
        cols: IndexSet,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        let entries = DMatrix::from_fn(rows.len(), cols.len(), &mut f);
        AlgMatrix::new(rows, cols, entries)
    }

    pub fn identity(index: &IndexSet) -> Self {
        let n = index.len();
        AlgMatrix {
            rows: index.clone(),
            cols: index.clone(),
            entries: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(rows: &IndexSet, cols: &IndexSet) -> Self {
        AlgMatrix {
            rows: rows.clone(),
            cols: cols.clone(),
            entries: DMatrix::zeros(rows.len(), cols.len()),
        }
    }

    pub fn rows(&self) -> &IndexSet {
        &self.rows
    }

    pub fn cols(&self) -> &IndexSet {
        &self.cols
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Conjugate transpose, with row and column index sets swapped.
    pub fn adjoint(&self) -> Self {
        AlgMatrix {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            entries: self.entries.adjoint(),
        }
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        AlgMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: &self.entries * alpha,
        }
    }

    /// Entrywise modulus as a real (complex-typed) matrix.
    pub fn modulus(&self) -> Self {
        AlgMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: self.entries.map(|z| Complex64::new(z.norm(), 0.0)),
        }
    }

    pub fn add(&self, other: &AlgMatrix) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::invalid("cannot add matrices over different index sets"));
        }
        Ok(AlgMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: &self.entries + &other.entries,
        })
    }

    pub fn matmul(&self, other: &AlgMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::invalid("inner index sets of the product differ"));
        }
        Ok(AlgMatrix {
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            entries: &self.entries * &other.entries,
        })
    }

    fn check_same_dim(&self) -> Result<()> {
        if self.rows.dim() != self.cols.dim() {
            return Err(Error::invalid(format!(
                "row index dimension {} differs from column index dimension {}",
                self.rows.dim(),
                self.cols.dim()
            )));
        }
        Ok(())
    }

    /// Lattice difference `row point - col point` for each entry.
    fn offset(&self, row: usize, col: usize) -> Point {
        difference(self.rows.point(row), self.cols.point(col))
    }
}

/// Exponent `p` of a Schur-type norm, `1 <= p <= infinity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurExponent(f64);

impl SchurExponent {
    pub const ONE: SchurExponent = SchurExponent(1.0);
    pub const INFINITY: SchurExponent = SchurExponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::invalid(format!("Schur exponent must lie in [1, inf], got {p}")));
        }
        Ok(SchurExponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl Serialize for SchurExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for SchurExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        let p = match Raw::deserialize(deserializer)? {
            Raw::Number(p) => p,
            Raw::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" => f64::INFINITY,
                other => other.parse::<f64>().map_err(serde::de::Error::custom)?,
            },
        };
        SchurExponent::new(p).map_err(serde::de::Error::custom)
    }
}

/// Choice of scalar matrix algebra and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum AlgebraSpec {
    Jaffard { s: f64 },
    Schur { p: SchurExponent, delta: f64 },
    Sjostrand { weight: Weight },
}

impl AlgebraSpec {
    pub fn jaffard(s: f64) -> Result<Self> {
        let spec = AlgebraSpec::Jaffard { s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn schur(p: f64, delta: f64) -> Result<Self> {
        let spec = AlgebraSpec::Schur {
            p: SchurExponent::new(p)?,
            delta,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn sjostrand(weight: Weight) -> Self {
        AlgebraSpec::Sjostrand { weight }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AlgebraSpec::Jaffard { s } if !(s.is_finite() && *s >= 0.0) => {
                Err(Error::invalid(format!("Jaffard parameter s must be >= 0, got {s}")))
            }
            AlgebraSpec::Schur { delta, .. } if !(delta.is_finite() && *delta >= 0.0) => Err(
                Error::invalid(format!("Schur parameter delta must be >= 0, got {delta}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            AlgebraSpec::Jaffard { .. } => "jaffard",
            AlgebraSpec::Schur { .. } => "schur",
            AlgebraSpec::Sjostrand { .. } => "sjostrand",
        }
    }
}

impl std::fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlgebraSpec::Jaffard { s } => write!(f, "jaffard(s={s})"),
            AlgebraSpec::Schur { p, delta } => write!(f, "schur(p={}, delta={delta})", p.0),
            AlgebraSpec::Sjostrand { weight } => write!(f, "sjostrand({weight:?})"),
        }
    }
}

/// `max_{i,j} |A_ij| (1 + |i - j|)^s`.
pub fn jaffard_norm(a: &AlgMatrix, s: f64) -> Result<f64> {
    a.check_same_dim()?;
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::invalid(format!("Jaffard parameter s must be >= 0, got {s}")));
    }
    let weight = Weight::Polynomial { s };
    let mut best: f64 = 0.0;
    for col in 0..a.cols.len() {
        for row in 0..a.rows.len() {
            let modulus = a.get(row, col).norm();
            if modulus == 0.0 {
                continue;
            }
            best = best.max(modulus * weight_eval(&weight, &a.offset(row, col))?);
        }
    }
    Ok(best)
}

/// Weighted Schur-type norm: the larger of the maximal weighted row `l^p`
/// norm and the maximal weighted column `l^p` norm, with weight
/// `(1 + |i - j|)^delta`. For `p = inf` this is the weighted entrywise sup.
pub fn schur_norm(a: &AlgMatrix, p: f64, delta: f64) -> Result<f64> {
    a.check_same_dim()?;
    let p = SchurExponent::new(p)?;
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::invalid(format!("Schur parameter delta must be >= 0, got {delta}")));
    }
    if p.is_infinite() {
        return jaffard_norm(a, delta);
    }
    let p = p.value();
    let weight = Weight::Polynomial { s: delta };
    let (n_rows, n_cols) = (a.rows.len(), a.cols.len());
    let mut weighted = DMatrix::<f64>::zeros(n_rows, n_cols);
    for col in 0..n_cols {
        for row in 0..n_rows {
            let modulus = a.get(row, col).norm();
            if modulus != 0.0 {
                weighted[(row, col)] = modulus * weight_eval(&weight, &a.offset(row, col))?;
            }
        }
    }
    let lp = |values: &mut dyn Iterator<Item = f64>| -> f64 {
        if p == 1.0 {
            values.sum()
        } else {
            values.map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
        }
    };
    let row_max = (0..n_rows)
        .map(|row| lp(&mut weighted.row(row).iter().copied()))
        .fold(0.0, f64::max);
    let col_max = (0..n_cols)
        .map(|col| lp(&mut weighted.column(col).iter().copied()))
        .fold(0.0, f64::max);
    Ok(row_max.max(col_max))
}

/// `sum_d max_{j} |A_{j, j-d}| theta(d)` over the difference vectors `d`
/// realised inside the (square) index set; no cyclic wrap-around.
pub fn sjostrand_norm(a: &AlgMatrix, theta: &Weight) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::invalid(
            "the Sjöstrand norm needs identical row and column index sets",
        ));
    }
    let mut diagonals: BTreeMap<Point, f64> = BTreeMap::new();
    for col in 0..a.cols.len() {
        for row in 0..a.rows.len() {
            let entry = diagonals.entry(a.offset(row, col)).or_insert(0.0);
            *entry = entry.max(a.get(row, col).norm());
        }
    }
    let mut total = 0.0;
    for (offset, sup) in &diagonals {
        if *sup != 0.0 {
            total += sup * weight_eval(theta, offset)?;
        }
    }
    Ok(total)
}

/// Largest singular value of a dense complex matrix.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows().min(m.ncols()) <= DENSE_SVD_LIMIT {
        m.singular_values().iter().copied().fold(0.0, f64::max)
    } else {
        power_iteration_norm(m)
    }
}

/// Power iteration on `M^H M` from the normalised all-ones vector.
pub fn power_iteration_norm(m: &DMatrix<Complex64>) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return 0.0;
    }
    let mut v = DVector::from_element(n, Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let mv = m * &v;
        let w = m.adjoint() * &mv;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = mv.norm_squared().sqrt();
        v = w / Complex64::new(norm, 0.0);
        let converged = (next - estimate).abs() <= POWER_TOLERANCE * next;
        estimate = next;
        if converged {
            break;
        }
    }
    estimate
}

/// The `l^2` operator norm (largest singular value).
pub fn operator_norm(a: &AlgMatrix) -> f64 {
    spectral_norm(&a.entries)
}

/// Dispatches to the norm of the chosen family.
pub fn algebra_norm(a: &AlgMatrix, spec: &AlgebraSpec) -> Result<f64> {
    spec.validate()?;
    match spec {
        AlgebraSpec::Jaffard { s } => jaffard_norm(a, *s),
        AlgebraSpec::Schur { p, delta } => schur_norm(a, p.value(), *delta),
        AlgebraSpec::Sjostrand { weight } => sjostrand_norm(a, weight),
    }
}

/// Checks `||B|| <= ||A||` (up to `1e-12` relative) for a pair with
/// `|B_ij| <= |A_ij|`. A pair that is not dominated is a precondition error.
pub fn check_solidity(spec: &AlgebraSpec, a: &AlgMatrix, b: &AlgMatrix) -> Result<bool> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::invalid("solidity check needs matrices over the same index sets"));
    }
    for (pos, (x, y)) in a.entries.iter().zip(b.entries.iter()).enumerate() {
        let (ma, mb) = (x.norm(), y.norm());
        if mb > ma * (1.0 + 4.0 * f64::EPSILON) {
            let (row, col) = (pos % a.rows.len(), pos / a.rows.len());
            return Err(Error::Precondition(format!(
                "|B| exceeds |A| at entry ({row}, {col}): {mb} > {ma}"
            )));
        }
    }
    let na = algebra_norm(a, spec)?;
    let nb = algebra_norm(b, spec)?;
    Ok(nb <= na + 1e-12 * na)
}

/// Block matrix whose blocks are operators on a common inner index set.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    outer: IndexSet,
    /// Row-major over `outer x outer`.
    blocks: Vec<AlgMatrix>,
}

impl BlockMatrix {
    pub fn new(outer: IndexSet, blocks: Vec<AlgMatrix>) -> Result<Self> {
        let n = outer.len();
        if blocks.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} blocks for an outer index of size {n}, got {}",
                n * n,
                blocks.len()
            )));
        }
        if let Some(first) = blocks.first() {
            if blocks
                .iter()
                .any(|b| b.rows != first.rows || b.cols != first.cols)
            {
                return Err(Error::invalid("blocks do not share inner index sets"));
            }
        }
        Ok(BlockMatrix { outer, blocks })
    }

    pub fn outer(&self) -> &IndexSet {
        &self.outer
    }

    pub fn block(&self, row: usize, col: usize) -> &AlgMatrix {
        &self.blocks[row * self.outer.len() + col]
    }

    /// Scalar matrix of block operator norms.
    pub fn norm_envelope(&self) -> AlgMatrix {
        let n = self.outer.len();
        let entries = DMatrix::from_fn(n, n, |row, col| {
            Complex64::new(operator_norm(self.block(row, col)), 0.0)
        });
        AlgMatrix {
            rows: self.outer.clone(),
            cols: self.outer.clone(),
            entries,
        }
    }
}

/// Algebra norm of the matrix of block operator norms.
pub fn opvalued_norm(blocks: &BlockMatrix, spec: &AlgebraSpec) -> Result<f64> {
    algebra_norm(&blocks.norm_envelope(), spec)
}

/// Endpoint exponents supported by [`weighted_lp_induced_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpEndpoint {
    One,
    Infinity,
}

/// Exact induced norm of `D_w A D_w^{-1}` on `l^p`, `p in {1, inf}`.
pub fn weighted_lp_induced_norm(a: &AlgMatrix, p: LpEndpoint, w: &[f64]) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::invalid("weighted induced norm needs a square matrix"));
    }
    if w.len() != a.rows.len() {
        return Err(Error::invalid(format!(
            "weight vector has length {}, index set has {} points",
            w.len(),
            a.rows.len()
        )));
    }
    if let Some(v) = w.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::invalid(format!("weight value {v} is not positive")));
    }
    let n = w.len();
    let term = |row: usize, col: usize| a.get(row, col).norm() * w[row] / w[col];
    let best = match p {
        LpEndpoint::One => (0..n)
            .map(|col| (0..n).map(|row| term(row, col)).sum::<f64>())
            .fold(0.0, f64::max),
        LpEndpoint::Infinity => (0..n)
            .map(|row| (0..n).map(|col| term(row, col)).sum::<f64>())
            .fold(0.0, f64::max),
    };
    Ok(best)
}

/// Samples a weight on an index set, e.g. to feed [`weighted_lp_induced_norm`].
pub fn sample_weight(w: &Weight, index: &IndexSet) -> Result<Vec<f64>> {
    index.points().iter().map(|p| weight_eval(w, p)).collect()
}

/// Per-distance maximum modulus: for every realised Euclidean distance
/// `r = |i - j|`, the largest `|A_ij|`. Sorted by distance.
pub fn decay_profile(a: &AlgMatrix) -> Result<Vec<(f64, f64)>> {
    a.check_same_dim()?;
    let mut bins: BTreeMap<i64, f64> = BTreeMap::new();
    for col in 0..a.cols.len() {
        for row in 0..a.rows.len() {
            let d = a.offset(row, col);
            let key: i64 = d.iter().map(|c| c * c).sum();
            let entry = bins.entry(key).or_insert(0.0);
            *entry = entry.max(a.get(row, col).norm());
        }
    }
    Ok(bins
        .into_iter()
        .map(|(sq, v)| ((sq as f64).sqrt(), v))
        .collect())
}
