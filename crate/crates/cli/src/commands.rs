use std::path::Path;

use frametensor_core::algebras::{algebra_norm, operator_norm};
use frametensor_core::frames::{
    frame_bounds, gaussian_window, gram_matrix, gram_tensor4, localisation_report,
    orthonormal_basis, shift_invariant_frame, tensor_product_frame, union_of_bases, FrameBounds,
};
use frametensor_core::io::{format_complex, matrix_to_csv};
use frametensor_core::tensor4::{
    inverse_in_algebra, norm_a, norm_a1_tilde, norm_a2_tilde, InverseReport,
};
use frametensor_core::{
    random, AlgMatrix, AlgebraSpec, Complex64, Error, Frame, IndexSet, Result, Tensor4,
    TensorAlgebraSpec, Weight,
};
use serde::Serialize;

use crate::suite::{localised_perturbation, relative_difference};

/// Parses an algebra spec from JSON or from the shorthand forms
/// `jaffard:S`, `schur:P:DELTA` (`P` may be `inf`) and `sjostrand:S`
/// (polynomial weight of order `S`).
pub fn parse_spec(text: &str) -> Result<AlgebraSpec> {
    let text = text.trim();
    if text.starts_with('{') {
        let spec: AlgebraSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("algebra spec: {e}")))?;
        spec.validate()?;
        return Ok(spec);
    }
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number {s:?} in spec {text:?}")))
    };
    match parts.as_slice() {
        ["jaffard", s] => AlgebraSpec::jaffard(num(s)?),
        ["schur", p, delta] => {
            let p = if p.eq_ignore_ascii_case("inf") { f64::INFINITY } else { num(p)? };
            AlgebraSpec::schur(p, num(delta)?)
        }
        ["sjostrand", s] => Ok(AlgebraSpec::sjostrand(Weight::polynomial(num(s)?)?)),
        _ => Err(Error::Parse(format!(
            "unrecognised spec {text:?}; expected JSON, jaffard:S, schur:P:DELTA or sjostrand:S"
        ))),
    }
}

pub fn read_frame(path: &Path) -> Result<Frame> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Serialize)]
pub struct GramReport {
    pub spec: AlgebraSpec,
    pub norm: f64,
    pub operator_norm: f64,
    pub frame_bounds: FrameBounds,
    /// `(distance, max |G_ij|)` pairs.
    pub profile: Vec<(f64, f64)>,
    pub gram: AlgMatrix,
}

pub fn gram(frame: &Frame, spec: &AlgebraSpec) -> Result<GramReport> {
    let local = localisation_report(frame, spec)?;
    let g = gram_matrix(frame);
    Ok(GramReport {
        spec: spec.clone(),
        norm: local.norm,
        operator_norm: operator_norm(&g),
        frame_bounds: frame_bounds(frame),
        profile: local.profile,
        gram: g,
    })
}

impl GramReport {
    /// The Gram matrix as CSV; the scalar diagnostics live in the JSON form.
    pub fn to_csv(&self) -> String {
        matrix_to_csv(self.gram.entries())
    }
}

/// One computed norm of the Gram tensor next to its factorised form.
#[derive(Debug, Clone, Serialize)]
pub struct NormComparison {
    pub quantity: String,
    pub computed: f64,
    pub factorised: f64,
    pub relative_difference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TensorReport {
    pub spec: TensorAlgebraSpec,
    pub dims: (usize, usize),
    pub outer_size: usize,
    pub inner_size: usize,
    pub frame_bounds: FrameBounds,
    pub norms: Vec<NormComparison>,
}

pub fn tensor(f1: &Frame, f2: &Frame, spec: &TensorAlgebraSpec) -> Result<TensorReport> {
    let product = tensor_product_frame(f1, f2)?;
    let g: Tensor4 = gram_tensor4(&product)?;
    let (g1, g2) = (gram_matrix(f1), gram_matrix(f2));
    let rhs1 = operator_norm(&g2) * algebra_norm(&g1, &spec.spec1)?;
    let rhs2 = operator_norm(&g1) * algebra_norm(&g2, &spec.spec2)?;
    let entry = |quantity: &str, computed: f64, factorised: f64| NormComparison {
        quantity: quantity.to_string(),
        computed,
        factorised,
        relative_difference: relative_difference(computed, factorised),
    };
    let norms = vec![
        entry("norm_a1_tilde", norm_a1_tilde(&g, &spec.spec1)?, rhs1),
        entry("norm_a2_tilde", norm_a2_tilde(&g, &spec.spec2)?, rhs2),
        entry("norm_a", norm_a(&g, spec)?, rhs1.max(rhs2)),
    ];
    // bounds of a product frame are products of the factor bounds
    let (b1, b2) = (frame_bounds(f1), frame_bounds(f2));
    Ok(TensorReport {
        spec: spec.clone(),
        dims: product.dims(),
        outer_size: f1.len(),
        inner_size: f2.len(),
        frame_bounds: FrameBounds {
            lower: b1.lower * b2.lower,
            upper: b1.upper * b2.upper,
        },
        norms,
    })
}

impl TensorReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,computed,factorised,relative_difference\n");
        for n in &self.norms {
            out.push_str(&format!(
                "{},{:e},{:e},{:e}\n",
                n.quantity, n.computed, n.factorised, n.relative_difference
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PerturbationKind {
    /// Random entries decaying away from both diagonals.
    Localised,
    /// `-r` times the identity, singular at `r = 1`.
    Scalar,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendRow {
    pub size: usize,
    pub norm_a_perturbation: f64,
    #[serde(flatten)]
    pub inverse: Option<InverseReport>,
    pub status: String,
}

pub fn inverse_trend(
    seed: u64,
    sizes: &[usize],
    spec: &TensorAlgebraSpec,
    r: f64,
    kind: PerturbationKind,
) -> Result<Vec<TrendRow>> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "perturbation size must be nonnegative, got {r}"
        )));
    }
    let mut rng = random::stream(seed, 0);
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        if n == 0 {
            return Err(Error::InvalidArgument("truncation sizes must be positive".into()));
        }
        let index = IndexSet::range(n)?;
        let id = Tensor4::identity(&index, &index)?;
        let pert = match kind {
            PerturbationKind::Scalar => id.scale(Complex64::new(-r, 0.0)),
            PerturbationKind::Localised if r == 0.0 => Tensor4::zeros(&index, &index)?,
            PerturbationKind::Localised => {
                localised_perturbation(&mut rng, &index, &index, spec, r)?
            }
        };
        let norm_pert = norm_a(&pert, spec)?;
        let row = match inverse_in_algebra(&id.add(&pert)?, spec) {
            Ok((_, report)) => TrendRow {
                size: n,
                norm_a_perturbation: norm_pert,
                inverse: Some(report),
                status: "ok".into(),
            },
            Err(e @ Error::Singular { .. }) => TrendRow {
                size: n,
                norm_a_perturbation: norm_pert,
                inverse: None,
                status: e.to_string(),
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    Ok(rows)
}

pub fn trend_csv(rows: &[TrendRow]) -> String {
    let mut out = String::from(
        "size,norm_a_perturbation,norm_a,norm_a_inverse,operator_norm,operator_norm_inverse,condition,residual,status\n",
    );
    for row in rows {
        let numbers = match &row.inverse {
            Some(r) => format!(
                "{:e},{:e},{:e},{:e},{:e},{:e}",
                r.norm_a,
                r.norm_a_inverse,
                r.operator_norm,
                r.operator_norm_inverse,
                r.condition,
                r.residual
            ),
            None => ",,,,,".to_string(),
        };
        // statuses may contain commas
        let status = row.status.replace('"', "'");
        out.push_str(&format!(
            "{},{:e},{},\"{}\"\n",
            row.size, row.norm_a_perturbation, numbers, status
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FrameKind {
    Orthonormal,
    Union,
    ShiftInvariant,
}

pub fn gen_frame(kind: FrameKind, n: usize, width: f64) -> Result<Frame> {
    match kind {
        FrameKind::Orthonormal => orthonormal_basis(n),
        FrameKind::Union => union_of_bases(n),
        FrameKind::ShiftInvariant => shift_invariant_frame(&gaussian_window(n, width)?),
    }
}

/// One frame vector per line.
pub fn frame_csv(f: &Frame) -> String {
    let mut out = String::new();
    for v in f.vectors() {
        let cells: Vec<String> = v.iter().map(|z| format_complex(*z)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn frame_json(f: &Frame) -> String {
    serde_json::to_string_pretty(f).expect("frames serialise")
}
