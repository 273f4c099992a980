//! File formats.
//!
//! * Complex numbers in JSON are `[re, im]` pairs.
//! * Frames: `{"space_dim": N, "index": IndexSet, "vectors": [[[re, im], ...], ...]}`.
//! * HS families: `{"dims": [N1, N2], "outer": IndexSet, "inner": IndexSet,
//!   "operators": [...]}` where each operator is a row-major `N2 x N1` nested
//!   array; a family without product structure carries `"index"` instead of
//!   `"outer"`/`"inner"`.
//! * Matrices: JSON `{"rows": IndexSet, "cols": IndexSet, "entries": [[[re, im], ...], ...]}`
//!   or CSV, row-major, one row per line, cells written `re+imj`.
//! * Rank-four tensors: a first line holding the JSON header
//!   `{"outer": IndexSet, "inner": IndexSet}`, followed by one `re+imj` cell
//!   per line in canonical order (`i` slowest, then `k`, then `l`, `j` fastest).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebras::AlgMatrix;
use crate::error::{Error, Result};
use crate::frames::{Frame, HsFrame};
use crate::lattice::IndexSet;
use crate::tensor4::Tensor4;

/// Formats a complex number as `re+imj` using the shortest round-trip
/// decimal representation of each component.
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}j", z.re, -z.im)
    } else {
        format!("{}+{}j", z.re, z.im)
    }
}

/// Parses `re+imj`, `re-imj`, a bare real, or a bare imaginary `imj`.
pub fn parse_complex(cell: &str) -> Result<Complex64> {
    let s = cell.trim();
    let bad = || Error::Parse(format!("cannot parse complex number {cell:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('j').or_else(|| s.strip_suffix('i')) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    match split {
        Some(p) => {
            let re = body[..p].parse::<f64>().map_err(|_| bad())?;
            let im = body[p..].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                other => other.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FrameRepr {
    space_dim: usize,
    index: IndexSet,
    vectors: Vec<Vec<Complex64>>,
}

impl Serialize for Frame {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FrameRepr {
            space_dim: self.space_dim(),
            index: self.index().clone(),
            vectors: self.vectors().iter().map(|v| v.iter().copied().collect()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Frame {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FrameRepr::deserialize(deserializer)?;
        let vectors = repr.vectors.into_iter().map(DVector::from_vec).collect();
        Frame::new(repr.space_dim, repr.index, vectors).map_err(serde::de::Error::custom)
    }
}

fn to_rows(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: Vec<Vec<Complex64>>, nrows: usize, ncols: usize) -> Result<DMatrix<Complex64>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse(format!("expected a {nrows}x{ncols} nested array")));
    }
    Ok(DMatrix::from_row_iterator(nrows, ncols, rows.into_iter().flatten()))
}

#[derive(Serialize, Deserialize)]
struct HsFrameRepr {
    dims: (usize, usize),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outer: Option<IndexSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inner: Option<IndexSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<IndexSet>,
    operators: Vec<Vec<Vec<Complex64>>>,
}

impl Serialize for HsFrame {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (outer, inner, index) = match self.product() {
            Some((a, b)) => (Some(a.clone()), Some(b.clone()), None),
            None => (None, None, Some(self.index().clone())),
        };
        HsFrameRepr {
            dims: self.dims(),
            outer,
            inner,
            index,
            operators: self.operators().iter().map(to_rows).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HsFrame {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = HsFrameRepr::deserialize(deserializer)?;
        let (n1, n2) = repr.dims;
        let operators = repr
            .operators
            .into_iter()
            .map(|rows| from_rows(rows, n2, n1))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        match (repr.outer, repr.inner, repr.index) {
            (Some(outer), Some(inner), _) => {
                HsFrame::with_product(repr.dims, outer, inner, operators).map_err(D::Error::custom)
            }
            (None, None, Some(index)) => {
                HsFrame::new(repr.dims, index, operators).map_err(D::Error::custom)
            }
            _ => Err(D::Error::custom(
                "HS family needs either \"outer\" and \"inner\" or \"index\"",
            )),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: IndexSet,
    cols: IndexSet,
    entries: Vec<Vec<Complex64>>,
}

impl Serialize for AlgMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows().clone(),
            cols: self.cols().clone(),
            entries: to_rows(self.entries()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AlgMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MatrixRepr::deserialize(deserializer)?;
        let entries =
            from_rows(repr.entries, repr.rows.len(), repr.cols.len()).map_err(D::Error::custom)?;
        AlgMatrix::new(repr.rows, repr.cols, entries).map_err(D::Error::custom)
    }
}

/// Row-major CSV of `re+imj` cells.
pub fn matrix_to_csv(m: &DMatrix<Complex64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|z| format_complex(*z)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses a row-major CSV of complex cells.
pub fn matrix_from_csv(text: &str) -> Result<DMatrix<Complex64>> {
    let rows: Vec<Vec<Complex64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(parse_complex).collect())
        .collect::<Result<_>>()?;
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    from_rows(rows, nrows, ncols)
}

#[derive(Serialize, Deserialize)]
struct TensorHeader {
    outer: IndexSet,
    inner: IndexSet,
}

/// Header line plus one cell per line in canonical order.
pub fn write_tensor(t: &Tensor4) -> String {
    let header = TensorHeader {
        outer: t.outer().clone(),
        inner: t.inner().clone(),
    };
    let mut out = serde_json::to_string(&header).expect("header serialises");
    out.push('\n');
    for z in t.data() {
        out.push_str(&format_complex(*z));
        out.push('\n');
    }
    out
}

pub fn read_tensor(text: &str) -> Result<Tensor4> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: TensorHeader = serde_json::from_str(
        lines
            .next()
            .ok_or_else(|| Error::Parse("empty tensor file".into()))?,
    )
    .map_err(|e| Error::Parse(format!("tensor header: {e}")))?;
    let data = lines.map(parse_complex).collect::<Result<Vec<_>>>()?;
    Tensor4::new(header.outer, header.inner, data)
}
