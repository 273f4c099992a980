//! Finite index sets in `Z^d` and weights on lattice differences.
//!
//! Every matrix and tensor in this crate is indexed by an [`IndexSet`]. The
//! points are kept in strict lexicographic order, which fixes the linear
//! position of each point and therefore the storage layout of everything
//! built on top of it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on the number of points in an index set.
pub const DEFAULT_MAX_INDEX_SET_SIZE: usize = 4096;

/// Environment variable overriding [`DEFAULT_MAX_INDEX_SET_SIZE`].
pub const MAX_SIZE_ENV: &str = "FRAMETENSOR_MAX_SIZE";

/// The configured index-set size cap.
pub fn max_index_set_size() -> usize {
    std::env::var(MAX_SIZE_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_INDEX_SET_SIZE)
}

/// A lattice point.
pub type Point = Vec<i64>;

/// Euclidean length of an integer vector.
pub fn euclidean_norm(z: &[i64]) -> f64 {
    z.iter()
        .map(|&c| {
            let c = c as f64;
            c * c
        })
        .sum::<f64>()
        .sqrt()
}

/// Componentwise difference `a - b`.
pub fn difference(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// A finite set of distinct points of `Z^d` in strict lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IndexSetRepr", into = "IndexSetRepr")]
pub struct IndexSet {
    dim: usize,
    points: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct IndexSetRepr {
    dim: usize,
    points: Vec<Point>,
}

impl TryFrom<IndexSetRepr> for IndexSet {
    type Error = Error;

    fn try_from(repr: IndexSetRepr) -> Result<Self> {
        IndexSet::from_points(repr.dim, repr.points)
    }
}

impl From<IndexSet> for IndexSetRepr {
    fn from(set: IndexSet) -> Self {
        IndexSetRepr {
            dim: set.dim,
            points: set.points,
        }
    }
}

impl IndexSet {
    /// Builds an index set from arbitrary distinct points; they are sorted
    /// into canonical order.
    pub fn from_points(dim: usize, mut points: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("lattice dimension must be positive"));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::invalid(format!(
                "point {p:?} does not have dimension {dim}"
            )));
        }
        let limit = max_index_set_size();
        if points.len() > limit {
            return Err(Error::Capacity {
                what: "index set",
                size: points.len(),
                limit,
            });
        }
        points.sort();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("duplicate point {:?}", w[0])));
        }
        Ok(IndexSet { dim, points })
    }

    /// The one-dimensional set `{0, 1, ..., n-1}`.
    pub fn range(n: usize) -> Result<Self> {
        if n == 0 {
            return IndexSet::from_points(1, Vec::new());
        }
        make_box_index_set(1, &[(0, n as i64 - 1)])
    }

    /// Cartesian product; the points of `outer` vary slowest.
    pub fn product(outer: &IndexSet, inner: &IndexSet) -> Result<Self> {
        let size = outer.len() * inner.len();
        let limit = max_index_set_size();
        if size > limit {
            return Err(Error::Capacity {
                what: "product index set",
                size,
                limit,
            });
        }
        let points = outer
            .points
            .iter()
            .flat_map(|p| {
                inner.points.iter().map(move |q| {
                    let mut r = p.clone();
                    r.extend_from_slice(q);
                    r
                })
            })
            .collect();
        Ok(IndexSet {
            dim: outer.dim + inner.dim,
            points,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, position: usize) -> &[i64] {
        &self.points[position]
    }

    /// Linear position of a point, if present.
    pub fn position(&self, point: &[i64]) -> Option<usize> {
        if point.len() != self.dim {
            return None;
        }
        self.points
            .binary_search_by(|p| p.as_slice().cmp(point))
            .ok()
    }

    /// Like [`IndexSet::position`] but reports a missing point as an error.
    pub fn require_position(&self, point: &[i64]) -> Result<usize> {
        self.position(point)
            .ok_or_else(|| Error::invalid(format!("point {point:?} is not in the index set")))
    }

    /// Minimum pairwise sup-norm distance, `None` for fewer than two points.
    pub fn separation(&self) -> Option<i64> {
        let mut best: Option<i64> = None;
        for (a, p) in self.points.iter().enumerate() {
            for q in &self.points[a + 1..] {
                let d = p.iter().zip(q).map(|(x, y)| (x - y).abs()).max().unwrap_or(0);
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        best
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexSet(dim={}, |I|={})", self.dim, self.points.len())
    }
}

/// Full integer box `extents[0] x ... x extents[d-1]`, each extent an
/// inclusive `(lo, hi)` pair, in lexicographic order.
pub fn make_box_index_set(dim: usize, extents: &[(i64, i64)]) -> Result<IndexSet> {
    if dim == 0 {
        return Err(Error::invalid("lattice dimension must be positive"));
    }
    if extents.len() != dim {
        return Err(Error::invalid(format!(
            "expected {dim} extents, got {}",
            extents.len()
        )));
    }
    let mut size: usize = 1;
    for &(lo, hi) in extents {
        if hi < lo {
            return Err(Error::invalid(format!("empty range {lo}..={hi}")));
        }
        let len = usize::try_from(hi - lo + 1)
            .map_err(|_| Error::invalid(format!("range {lo}..={hi} too large")))?;
        size = size.saturating_mul(len);
    }
    let limit = max_index_set_size();
    if size > limit {
        return Err(Error::Capacity {
            what: "index set",
            size,
            limit,
        });
    }
    let mut points: Vec<Point> = vec![Vec::with_capacity(dim)];
    for &(lo, hi) in extents {
        points = points
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    Ok(IndexSet { dim, points })
}

/// Symmetric positive weight on lattice differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightRepr", into = "WeightRepr")]
pub enum Weight {
    /// `(1 + |z|)^s`.
    Polynomial { s: f64 },
    /// `exp(b |z|^gamma)` with `0 < gamma < 1`.
    ExponentialSub { b: f64, gamma: f64 },
    /// Explicit values on the box `[-radius, radius]`.
    Table(WeightTable),
}

/// Tabulated weight on a symmetric box, values in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    radius: Vec<i64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum WeightRepr {
    Polynomial { s: f64 },
    ExponentialSub { b: f64, gamma: f64 },
    Table { radius: Vec<i64>, values: Vec<f64> },
}

impl TryFrom<WeightRepr> for Weight {
    type Error = Error;

    fn try_from(repr: WeightRepr) -> Result<Self> {
        match repr {
            WeightRepr::Polynomial { s } => Weight::polynomial(s),
            WeightRepr::ExponentialSub { b, gamma } => Weight::exponential_sub(b, gamma),
            WeightRepr::Table { radius, values } => Weight::table(radius, values),
        }
    }
}

impl From<Weight> for WeightRepr {
    fn from(w: Weight) -> Self {
        match w {
            Weight::Polynomial { s } => WeightRepr::Polynomial { s },
            Weight::ExponentialSub { b, gamma } => WeightRepr::ExponentialSub { b, gamma },
            Weight::Table(t) => WeightRepr::Table {
                radius: t.radius,
                values: t.values,
            },
        }
    }
}

impl WeightTable {
    fn offset(&self, z: &[i64]) -> Option<usize> {
        if z.len() != self.radius.len() {
            return None;
        }
        let mut pos = 0usize;
        for (&c, &r) in z.iter().zip(&self.radius) {
            if c.abs() > r {
                return None;
            }
            pos = pos * (2 * r as usize + 1) + (c + r) as usize;
        }
        Some(pos)
    }

    pub fn radius(&self) -> &[i64] {
        &self.radius
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Weight {
    pub fn polynomial(s: f64) -> Result<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::invalid(format!("polynomial weight needs s >= 0, got {s}")));
        }
        Ok(Weight::Polynomial { s })
    }

    pub fn exponential_sub(b: f64, gamma: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::invalid(format!("exponential weight needs b > 0, got {b}")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::invalid(format!(
                "exponential weight needs 0 < gamma < 1, got {gamma}"
            )));
        }
        Ok(Weight::ExponentialSub { b, gamma })
    }

    /// Tabulated weight on `[-radius, radius]`; values must be positive,
    /// finite and symmetric under `z -> -z`.
    pub fn table(radius: Vec<i64>, values: Vec<f64>) -> Result<Self> {
        if radius.is_empty() {
            return Err(Error::invalid("table weight needs at least one axis"));
        }
        if radius.iter().any(|&r| r < 0) {
            return Err(Error::invalid("table radius must be nonnegative"));
        }
        let expected: usize = radius.iter().map(|&r| 2 * r as usize + 1).product();
        if values.len() != expected {
            return Err(Error::invalid(format!(
                "table weight expects {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::invalid(format!("table weight value {v} is not positive")));
        }
        // Lexicographic order on a symmetric box maps z to -z by reversal.
        let n = values.len();
        if (0..n).any(|a| values[a] != values[n - 1 - a]) {
            return Err(Error::invalid("table weight is not symmetric"));
        }
        Ok(Weight::Table(WeightTable { radius, values }))
    }

    /// Lattice dimension the weight is restricted to, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Weight::Table(t) => Some(t.radius.len()),
            _ => None,
        }
    }

    pub fn eval(&self, z: &[i64]) -> Result<f64> {
        weight_eval(self, z)
    }
}

/// Evaluates the weight at an integer difference vector.
pub fn weight_eval(w: &Weight, z: &[i64]) -> Result<f64> {
    match w {
        Weight::Polynomial { s } => {
            if *s == 0.0 {
                return Ok(1.0);
            }
            Ok((1.0 + euclidean_norm(z)).powf(*s))
        }
        Weight::ExponentialSub { b, gamma } => {
            let r = euclidean_norm(z);
            if r == 0.0 {
                return Ok(1.0);
            }
            Ok((b * r.powf(*gamma)).exp())
        }
        Weight::Table(t) => t
            .offset(z)
            .map(|pos| t.values[pos])
            .ok_or_else(|| Error::OutOfDomain(format!("{z:?} lies outside the weight table"))),
    }
}

/// Samples `w(n z)^(1/n)` for `n = 1..=n_max`.
pub fn check_grs_condition(w: &Weight, z: &[i64], n_max: usize) -> Result<Vec<f64>> {
    if n_max < 2 {
        return Err(Error::invalid(format!("n_max must be at least 2, got {n_max}")));
    }
    (1..=n_max)
        .map(|n| {
            let scaled: Point = z.iter().map(|&c| c * n as i64).collect();
            Ok(weight_eval(w, &scaled)?.powf(1.0 / n as f64))
        })
        .collect()
}

/// Largest relative violation of symmetry and sub-multiplicativity of `w`
/// over all `x, y` in the box `[-radius, radius]^d` (with `x + y` in the box
/// for table weights). Zero means both properties hold on the sample.
pub fn weight_property_violation(w: &Weight, dim: usize, radius: i64) -> Result<f64> {
    let cube = make_box_index_set(dim, &vec![(-radius, radius); dim])?;
    let mut worst: f64 = 0.0;
    for x in cube.points() {
        let wx = weight_eval(w, x)?;
        let neg: Point = x.iter().map(|c| -c).collect();
        let wn = weight_eval(w, &neg)?;
        worst = worst.max((wx - wn).abs() / wx);
        if wx <= 0.0 {
            return Ok(f64::INFINITY);
        }
        for y in cube.points() {
            let sum: Point = x.iter().zip(y).map(|(a, b)| a + b).collect();
            let wsum = match weight_eval(w, &sum) {
                Ok(v) => v,
                Err(Error::OutOfDomain(_)) => continue,
                Err(e) => return Err(e),
            };
            let bound = wx * weight_eval(w, y)?;
            if wsum > bound {
                worst = worst.max((wsum - bound) / bound);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_one_dim() {
        let s = make_box_index_set(1, &[(0, 2)]).unwrap();
        assert_eq!(s.points(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn box_two_dim_is_lexicographic() {
        let s = make_box_index_set(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(
            s.points(),
            &[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
    }

    #[test]
    fn empty_range_rejected() {
        assert!(matches!(
            make_box_index_set(1, &[(5, 3)]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn size_cap() {
        assert!(matches!(
            make_box_index_set(2, &[(0, 99), (0, 99)]),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn from_points_sorts_and_rejects_duplicates() {
        let s = IndexSet::from_points(1, vec![vec![3], vec![-1], vec![0]]).unwrap();
        assert_eq!(s.points(), &[vec![-1], vec![0], vec![3]]);
        assert!(IndexSet::from_points(1, vec![vec![1], vec![1]]).is_err());
        assert!(IndexSet::from_points(2, vec![vec![1]]).is_err());
    }

    #[test]
    fn position_round_trip() {
        let s = make_box_index_set(2, &[(-2, 2), (0, 3)]).unwrap();
        for (pos, p) in s.points().iter().enumerate() {
            assert_eq!(s.position(p), Some(pos));
        }
        assert_eq!(s.position(&[9, 9]), None);
        assert_eq!(s.separation(), Some(1));
    }

    #[test]
    fn product_orders_outer_slowest() {
        let a = IndexSet::range(2).unwrap();
        let b = IndexSet::range(3).unwrap();
        let p = IndexSet::product(&a, &b).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.len(), 6);
        assert_eq!(p.point(4), &[1, 1]);
        for (pos, q) in p.points().iter().enumerate() {
            assert_eq!(pos, a.position(&q[..1]).unwrap() * 3 + b.position(&q[1..]).unwrap());
        }
    }

    #[test]
    fn weight_examples() {
        let w0 = Weight::polynomial(0.0).unwrap();
        assert_eq!(weight_eval(&w0, &[7]).unwrap(), 1.0);
        let w2 = Weight::polynomial(2.0).unwrap();
        assert_eq!(weight_eval(&w2, &[0]).unwrap(), 1.0);
        let w1 = Weight::polynomial(1.0).unwrap();
        assert_eq!(weight_eval(&w1, &[3, 4]).unwrap(), 6.0);
    }

    #[test]
    fn table_weight_domain() {
        let w = Weight::table(vec![1], vec![2.0, 1.0, 2.0]).unwrap();
        assert_eq!(weight_eval(&w, &[-1]).unwrap(), 2.0);
        assert!(matches!(weight_eval(&w, &[2]), Err(Error::OutOfDomain(_))));
        assert!(matches!(weight_eval(&w, &[0, 0]), Err(Error::OutOfDomain(_))));
        assert!(Weight::table(vec![1], vec![2.0, 1.0, 3.0]).is_err());
        assert!(Weight::table(vec![1], vec![2.0, 0.0, 2.0]).is_err());
    }

    #[test]
    fn invalid_weight_parameters() {
        assert!(Weight::polynomial(-1.0).is_err());
        assert!(Weight::exponential_sub(1.0, 1.0).is_err());
        assert!(Weight::exponential_sub(0.0, 0.5).is_err());
    }

    #[test]
    fn grs_samples() {
        let w1 = Weight::polynomial(1.0).unwrap();
        let seq = check_grs_condition(&w1, &[1], 4).unwrap();
        let expected = [2.0, 3f64.sqrt(), 4f64.powf(1.0 / 3.0), 5f64.powf(0.25)];
        for (a, b) in seq.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }

        let w0 = Weight::polynomial(0.0).unwrap();
        assert!(check_grs_condition(&w0, &[3, -2], 6)
            .unwrap()
            .iter()
            .all(|&v| v == 1.0));

        let we = Weight::exponential_sub(1.0, 0.5).unwrap();
        let seq = check_grs_condition(&we, &[1], 3).unwrap();
        let e = std::f64::consts::E;
        let expected = [e, e.powf(2f64.sqrt() / 2.0), e.powf(3f64.sqrt() / 3.0)];
        for (a, b) in seq.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }

        assert!(check_grs_condition(&w1, &[1], 1).is_err());
    }

    #[test]
    fn polynomial_weight_is_symmetric_and_submultiplicative() {
        for s in [0.0, 0.5, 1.0, 2.0, 3.5] {
            let w = Weight::polynomial(s).unwrap();
            assert_eq!(weight_property_violation(&w, 1, 10).unwrap(), 0.0, "s={s}");
        }
        let w = Weight::exponential_sub(0.7, 0.5).unwrap();
        assert_eq!(weight_property_violation(&w, 1, 10).unwrap(), 0.0);
        let w = Weight::polynomial(2.0).unwrap();
        assert_eq!(weight_property_violation(&w, 2, 3).unwrap(), 0.0);
    }

    #[test]
    fn json_forms() {
        let s: IndexSet = serde_json::from_str(r#"{"dim":1,"points":[[2],[0],[1]]}"#).unwrap();
        assert_eq!(s, IndexSet::range(3).unwrap());
        assert!(serde_json::from_str::<IndexSet>(r#"{"dim":1,"points":[[0],[0]]}"#).is_err());

        let w: Weight = serde_json::from_str(r#"{"kind":"polynomial","s":2.0}"#).unwrap();
        assert_eq!(w, Weight::Polynomial { s: 2.0 });
        let w: Weight =
            serde_json::from_str(r#"{"kind":"exponential-sub","b":1.0,"gamma":0.5}"#).unwrap();
        assert_eq!(w, Weight::ExponentialSub { b: 1.0, gamma: 0.5 });
        assert!(serde_json::from_str::<Weight>(r#"{"kind":"polynomial","s":-2.0}"#).is_err());
        let text = serde_json::to_string(&Weight::table(vec![0], vec![1.0]).unwrap()).unwrap();
        assert_eq!(text, r#"{"kind":"table","radius":[0],"values":[1.0]}"#);
    }
}
