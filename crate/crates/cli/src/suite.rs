//! Seeded verification suite for the tensor algebra, the scalar algebras and
//! the frame constructions.

use std::collections::BTreeMap;

use frametensor_core::algebras::{algebra_norm, check_solidity, operator_norm};
use frametensor_core::frames::{
    analysis, canonical_dual, frame_bounds, gaussian_window, gram_matrix, gram_tensor4,
    shift_invariant_frame, synthesis, tensor_product_frame,
};
use frametensor_core::tensor4::{
    adjoint, contract, flatten, inverse_in_algebra, kronecker, norm_a, norm_a1_tilde,
    norm_a2_tilde,
};
use frametensor_core::{
    random, AlgMatrix, AlgebraSpec, Complex64, DMatrix, DVector, Error, Frame, IndexSet, Result,
    Tensor4, TensorAlgebraSpec, Weight,
};
use rand::Rng;

use crate::report::{CheckRecord, Environment, VerificationReport};

/// Check names with their default tolerance and default trial count.
pub const CHECKS: &[(&str, f64, usize)] = &[
    ("submultiplicativity", 1e-10, 500),
    ("involution_isometry", 1e-12, 500),
    ("anti_homomorphism", 1e-13, 500),
    ("flatten_homomorphism", 1e-13, 200),
    ("scalar_solidity", 1e-12, 500),
    ("non_solidity_witness", 0.0, 200),
    ("neumann_inverse_bound", 1e-8, 5),
    ("inversion_residual", 1e-10, 5),
    ("reconstruction", 1e-10, 50),
    ("dft_frame_bounds", 1e-10, 6),
    ("gram_factorisation", 1e-13, 50),
    ("norm_factorisation", 1e-10, 50),
];

/// Parameters of a verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub outer_size: usize,
    pub inner_size: usize,
    /// Overrides every per-check trial count when set.
    pub trials: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
    pub spec_pairs: Vec<TensorAlgebraSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            outer_size: 4,
            inner_size: 4,
            trials: None,
            tolerances: BTreeMap::new(),
            spec_pairs: default_spec_pairs(),
        }
    }
}

/// jaffard(2)/jaffard(3), schur(1, 0)/sjostrand(nu_0), jaffard(2)/schur(1, 1).
pub fn default_spec_pairs() -> Vec<TensorAlgebraSpec> {
    let pair = |a: AlgebraSpec, b: AlgebraSpec| TensorAlgebraSpec { spec1: a, spec2: b };
    vec![
        pair(AlgebraSpec::Jaffard { s: 2.0 }, AlgebraSpec::Jaffard { s: 3.0 }),
        pair(
            AlgebraSpec::schur(1.0, 0.0).expect("valid"),
            AlgebraSpec::sjostrand(Weight::Polynomial { s: 0.0 }),
        ),
        pair(
            AlgebraSpec::Jaffard { s: 2.0 },
            AlgebraSpec::schur(1.0, 1.0).expect("valid"),
        ),
    ]
}

/// Spec pairs whose scalar norms are exactly submultiplicative with unit
/// identity norm; the Neumann series bound holds for them without constants.
pub fn neumann_spec_pairs() -> Vec<TensorAlgebraSpec> {
    let pair = |a: AlgebraSpec, b: AlgebraSpec| TensorAlgebraSpec { spec1: a, spec2: b };
    vec![
        pair(
            AlgebraSpec::schur(1.0, 0.0).expect("valid"),
            AlgebraSpec::sjostrand(Weight::Polynomial { s: 0.0 }),
        ),
        pair(
            AlgebraSpec::schur(1.0, 1.0).expect("valid"),
            AlgebraSpec::schur(1.0, 1.0).expect("valid"),
        ),
        pair(
            AlgebraSpec::sjostrand(Weight::Polynomial { s: 1.0 }),
            AlgebraSpec::schur(1.0, 0.5).expect("valid"),
        ),
    ]
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.outer_size == 0 || self.inner_size == 0 {
            return Err(Error::InvalidArgument("index set sizes must be positive".into()));
        }
        if self.trials == Some(0) {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        for (name, tol) in &self.tolerances {
            if !CHECKS.iter().any(|(n, _, _)| n == name) {
                return Err(Error::InvalidArgument(format!("unknown check {name:?}")));
            }
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "tolerance for {name} must be a nonnegative number, got {tol}"
                )));
            }
        }
        if self.spec_pairs.is_empty() {
            return Err(Error::InvalidArgument("at least one spec pair is required".into()));
        }
        Ok(())
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or_else(|| default_entry(name).1)
    }

    pub fn trials_for(&self, name: &str) -> usize {
        self.trials.unwrap_or_else(|| default_entry(name).2)
    }

    fn record(&self, name: &str, trials: usize, violation: f64) -> CheckRecord {
        CheckRecord::new(name, trials, violation, self.tolerance(name))
    }

    fn index_sets(&self) -> Result<(IndexSet, IndexSet)> {
        Ok((IndexSet::range(self.outer_size)?, IndexSet::range(self.inner_size)?))
    }
}

fn default_entry(name: &str) -> (&'static str, f64, usize) {
    *CHECKS
        .iter()
        .find(|(n, _, _)| *n == name)
        .unwrap_or_else(|| panic!("unknown check {name}"))
}

fn stream_id(name: &str) -> u64 {
    CHECKS
        .iter()
        .position(|(n, _, _)| *n == name)
        .expect("registered check") as u64
        + 1
}

/// `(lhs - rhs) / |rhs|`, or the absolute difference when `rhs` vanishes.
pub fn relative_difference(lhs: f64, rhs: f64) -> f64 {
    let diff = (lhs - rhs).abs();
    if rhs == 0.0 {
        diff
    } else {
        diff / rhs.abs()
    }
}

/// Entrywise max difference relative to the larger entrywise max.
pub fn relative_tensor_difference(a: &Tensor4, b: &Tensor4) -> Result<f64> {
    let scale = a.max_abs().max(b.max_abs());
    let diff = a.max_abs_diff(b)?;
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

fn relative_matrix_difference(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let max = |m: &DMatrix<Complex64>| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = max(a).max(max(b));
    let diff = max(&(a - b));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Submultiplicativity, involution isometry and the anti-homomorphism
/// property, all evaluated on the same random pairs.
pub fn algebra_checks(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let (outer, inner) = cfg.index_sets()?;
    let trials = cfg.trials_for("submultiplicativity");
    let mut rng = random::stream(cfg.seed, stream_id("submultiplicativity"));
    let (mut submult, mut isometry, mut anti) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let a = random::tensor(&mut rng, &outer, &inner)?;
        let b = random::tensor(&mut rng, &outer, &inner)?;
        let ab = contract(&a, &b)?;
        let a_star = adjoint(&a);
        let lhs = adjoint(&ab);
        let rhs = contract(&adjoint(&b), &a_star)?;
        anti = anti.max(relative_tensor_difference(&lhs, &rhs)?);
        for spec in &cfg.spec_pairs {
            let (na, nb, nab) = (norm_a(&a, spec)?, norm_a(&b, spec)?, norm_a(&ab, spec)?);
            submult = submult.max(((nab - na * nb) / (na * nb)).max(0.0));
            isometry = isometry.max(relative_difference(norm_a(&a_star, spec)?, na));
        }
    }
    let total = trials * cfg.spec_pairs.len();
    Ok(vec![
        cfg.record("submultiplicativity", total, submult),
        cfg.record("involution_isometry", total, isometry),
        cfg.record("anti_homomorphism", trials, anti),
    ])
}

/// Contraction by the defining double sum, independent of the flattening.
pub fn contract_by_summation(a: &Tensor4, b: &Tensor4) -> Result<Tensor4> {
    a.check_compatible(b)?;
    let (n1, n2) = (a.outer().len(), a.inner().len());
    Tensor4::from_fn(a.outer().clone(), a.inner().clone(), |i, k, l, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..n2 {
            for m in 0..n1 {
                acc += a.get(i, k, n, m) * b.get(m, n, l, j);
            }
        }
        acc
    })
}

/// Pairs on which the fast contraction is compared with the double sum.
const BRUTE_FORCE_PAIRS: usize = 20;

pub fn flatten_check(cfg: &RunConfig) -> Result<CheckRecord> {
    let (outer, inner) = cfg.index_sets()?;
    let trials = cfg.trials_for("flatten_homomorphism");
    let mut rng = random::stream(cfg.seed, stream_id("flatten_homomorphism"));
    let mut worst = 0.0f64;
    for t in 0..trials {
        let a = random::tensor(&mut rng, &outer, &inner)?;
        let b = random::tensor(&mut rng, &outer, &inner)?;
        let ab = contract(&a, &b)?;
        if t < BRUTE_FORCE_PAIRS {
            worst = worst.max(relative_tensor_difference(&ab, &contract_by_summation(&a, &b)?)?);
        }
        let product = flatten(&a).entries() * flatten(&b).entries();
        worst = worst.max(relative_matrix_difference(flatten(&ab).entries(), &product));
        worst = worst.max(relative_matrix_difference(
            flatten(&adjoint(&a)).entries(),
            &flatten(&a).entries().adjoint(),
        ));
    }
    Ok(cfg.record("flatten_homomorphism", trials, worst))
}

/// Random `B` with `|B_ij| <= |A_ij|`: each entry of `A` scaled by a
/// complex factor of modulus at most one.
fn dominated(rng: &mut impl Rng, a: &AlgMatrix) -> AlgMatrix {
    let entries = a.entries().map(|z| {
        let factor = Complex64::from_polar(
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        z * factor
    });
    AlgMatrix::new(a.rows().clone(), a.cols().clone(), entries).expect("same shape")
}

pub fn solidity_check(cfg: &RunConfig) -> Result<CheckRecord> {
    let trials = cfg.trials_for("scalar_solidity");
    let mut rng = random::stream(cfg.seed, stream_id("scalar_solidity"));
    let index = IndexSet::range(cfg.outer_size.max(2) + 2)?;
    let families = [
        AlgebraSpec::Jaffard { s: 2.0 },
        AlgebraSpec::schur(1.0, 1.0)?,
        AlgebraSpec::schur(2.0, 0.5)?,
        AlgebraSpec::sjostrand(Weight::Polynomial { s: 1.0 }),
    ];
    let mut worst = 0.0f64;
    for spec in &families {
        for _ in 0..trials {
            let a = random::matrix(&mut rng, &index, &index);
            let b = dominated(&mut rng, &a);
            if !check_solidity(spec, &a, &b)? {
                let (na, nb) = (algebra_norm(&a, spec)?, algebra_norm(&b, spec)?);
                worst = worst.max((nb - na) / na);
            }
        }
    }
    Ok(cfg.record("scalar_solidity", trials * families.len(), worst))
}

/// Searches random sign patterns `A` with `B = |A|` for a pair with
/// `norm_a(B) > norm_a(A)`.
pub fn find_non_solidity_witness(
    rng: &mut impl Rng,
    outer: &IndexSet,
    inner: &IndexSet,
    spec: &TensorAlgebraSpec,
    attempts: usize,
) -> Result<Option<(Tensor4, Tensor4, f64, f64)>> {
    for _ in 0..attempts {
        let a = Tensor4::from_fn(outer.clone(), inner.clone(), |_, _, _, _| {
            Complex64::new(if rng.random_bool(0.5) { 1.0 } else { -1.0 }, 0.0)
        })?;
        let b = a.modulus();
        let (na, nb) = (norm_a(&a, spec)?, norm_a(&b, spec)?);
        if nb > na * (1.0 + 1e-9) {
            return Ok(Some((a, b, na, nb)));
        }
    }
    Ok(None)
}

pub fn witness_check(cfg: &RunConfig) -> Result<CheckRecord> {
    // an existence search: the attempt budget ignores the trial override,
    // and single-point index sets (scalars) cannot host a witness
    let attempts = default_entry("non_solidity_witness").2;
    let outer = IndexSet::range(cfg.outer_size.max(2))?;
    let inner = IndexSet::range(cfg.inner_size.max(2))?;
    let mut rng = random::stream(cfg.seed, stream_id("non_solidity_witness"));
    let found = find_non_solidity_witness(&mut rng, &outer, &inner, &cfg.spec_pairs[0], attempts)?;
    Ok(cfg.record(
        "non_solidity_witness",
        attempts,
        if found.is_some() { 0.0 } else { 1.0 },
    ))
}

/// Random perturbation with polynomial decay away from both diagonals,
/// rescaled to `norm_a = target`.
pub fn localised_perturbation(
    rng: &mut impl Rng,
    outer: &IndexSet,
    inner: &IndexSet,
    spec: &TensorAlgebraSpec,
    target: f64,
) -> Result<Tensor4> {
    let decay = |a: usize, b: usize| (1.0 + (a as f64 - b as f64).abs()).powi(-2);
    let raw = Tensor4::from_fn(outer.clone(), inner.clone(), |i, k, l, j| {
        random::complex(rng) * decay(i, j) * decay(k, l)
    })?;
    let norm = norm_a(&raw, spec)?;
    Ok(raw.scale(Complex64::new(target / norm, 0.0)))
}

pub fn neumann_checks(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let trials = cfg.trials_for("neumann_inverse_bound");
    let mut rng = random::stream(cfg.seed, stream_id("neumann_inverse_bound"));
    let r = 0.5;
    let bound = 1.0 / (1.0 - r);
    let (mut excess, mut residual, mut count) = (0.0f64, 0.0f64, 0);
    for n in [2usize, 3, 4] {
        let index = IndexSet::range(n)?;
        let id = Tensor4::identity(&index, &index)?;
        for spec in neumann_spec_pairs() {
            for _ in 0..trials {
                let pert = localised_perturbation(&mut rng, &index, &index, &spec, r)?;
                let (_, report) = inverse_in_algebra(&id.add(&pert)?, &spec)?;
                excess = excess.max((report.norm_a_inverse - bound).max(0.0));
                residual = residual.max(report.residual);
                count += 1;
            }
        }
    }
    Ok(vec![
        cfg.record("neumann_inverse_bound", count, excess),
        cfg.record("inversion_residual", count, residual),
    ])
}

/// Random frame in `C^n` with `m` vectors and `B/A <= 1e6`.
pub fn random_frame(rng: &mut impl Rng, n: usize, m: usize) -> Result<Frame> {
    loop {
        let f = random::frame(rng, n, m)?;
        let b = frame_bounds(&f);
        if b.is_frame() && b.condition() <= 1e6 {
            return Ok(f);
        }
    }
}

/// Largest relative reconstruction residual over both round trips.
pub fn reconstruction_residual(f: &Frame, samples: &[DVector<Complex64>]) -> Result<f64> {
    let dual = canonical_dual(f)?;
    let mut worst = 0.0f64;
    for x in samples {
        let norm = x.norm();
        let one = synthesis(&dual, &analysis(f, x)?)?;
        let two = synthesis(f, &analysis(&dual, x)?)?;
        worst = worst.max((one - x).norm() / norm).max((two - x).norm() / norm);
    }
    Ok(worst)
}

/// Frame bounds of all cyclic shifts of `window`, from the discrete Fourier
/// transform of its cyclic autocorrelation.
pub fn dft_frame_bounds(window: &DVector<Complex64>) -> (f64, f64) {
    let n = window.len();
    let autocorrelation: Vec<Complex64> = (0..n)
        .map(|d| (0..n).map(|s| window[(d + s) % n] * window[s].conj()).sum())
        .collect();
    let spectrum: Vec<f64> = (0..n)
        .map(|w| {
            autocorrelation
                .iter()
                .enumerate()
                .map(|(d, c)| {
                    c * Complex64::from_polar(
                        1.0,
                        -2.0 * std::f64::consts::PI * ((d * w) % n) as f64 / n as f64,
                    )
                })
                .sum::<Complex64>()
                .re
        })
        .collect();
    let lower = spectrum.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = spectrum.iter().copied().fold(0.0, f64::max);
    (lower, upper)
}

/// Windows used as shift-invariant fixtures: `(length, width)`.
pub const SHIFT_FIXTURES: &[(usize, f64)] =
    &[(8, 1.0), (8, 2.0), (12, 1.5), (16, 2.5), (16, 3.0), (24, 2.0)];

pub fn reconstruction_checks(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let trials = cfg.trials_for("reconstruction");
    let mut rng = random::stream(cfg.seed, stream_id("reconstruction"));
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.random_range(2..=6);
        let m = rng.random_range(n..=2 * n + 2);
        let f = random_frame(&mut rng, n, m)?;
        let samples: Vec<_> = (0..10).map(|_| random::vector(&mut rng, n)).collect();
        worst = worst.max(reconstruction_residual(&f, &samples)?);
    }

    let fixtures = SHIFT_FIXTURES.len().min(cfg.trials_for("dft_frame_bounds"));
    let mut bounds_gap = 0.0f64;
    for &(n, width) in &SHIFT_FIXTURES[..fixtures] {
        let g = gaussian_window(n, width)?;
        let f = shift_invariant_frame(&g)?;
        let b = frame_bounds(&f);
        let (lower, upper) = dft_frame_bounds(&g);
        let scale = upper.max(1.0);
        bounds_gap = bounds_gap
            .max((b.lower - lower).abs() / scale)
            .max((b.upper - upper).abs() / scale);
        let samples: Vec<_> = (0..10).map(|_| random::vector(&mut rng, n)).collect();
        worst = worst.max(reconstruction_residual(&f, &samples)?);
    }
    Ok(vec![
        cfg.record("reconstruction", trials + fixtures, worst),
        cfg.record("dft_frame_bounds", fixtures, bounds_gap),
    ])
}

/// `conj(G1)` as the outer factor: with inner products linear in the first
/// argument, `<psi_i (x) phi_k, psi_j (x) phi_l> = conj(G1[i, j]) G2[k, l]`.
pub fn factorised_gram_tensor(f1: &Frame, f2: &Frame) -> Result<Tensor4> {
    let g1 = gram_matrix(f1);
    let conj = AlgMatrix::new(
        g1.rows().clone(),
        g1.cols().clone(),
        g1.entries().map(|z| z.conj()),
    )?;
    kronecker(&conj, &gram_matrix(f2))
}

pub fn factorisation_checks(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let trials = cfg.trials_for("gram_factorisation");
    let mut rng = random::stream(cfg.seed, stream_id("gram_factorisation"));
    let (mut gram_gap, mut norm_gap) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let f1 = random_frame(&mut rng, 4, 6)?;
        let f2 = random_frame(&mut rng, 3, 5)?;
        let g = gram_tensor4(&tensor_product_frame(&f1, &f2)?)?;
        gram_gap = gram_gap.max(relative_tensor_difference(&g, &factorised_gram_tensor(&f1, &f2)?)?);
        let (g1, g2) = (gram_matrix(&f1), gram_matrix(&f2));
        for spec in &cfg.spec_pairs {
            let rhs1 = operator_norm(&g2) * algebra_norm(&g1, &spec.spec1)?;
            let rhs2 = operator_norm(&g1) * algebra_norm(&g2, &spec.spec2)?;
            let lhs1 = norm_a1_tilde(&g, &spec.spec1)?;
            let lhs2 = norm_a2_tilde(&g, &spec.spec2)?;
            let lhs = norm_a(&g, spec)?;
            norm_gap = norm_gap
                .max(relative_difference(lhs1, rhs1))
                .max(relative_difference(lhs2, rhs2))
                .max(relative_difference(lhs, rhs1.max(rhs2)));
            if !lhs.is_finite() {
                norm_gap = f64::INFINITY;
            }
        }
    }
    Ok(vec![
        cfg.record("gram_factorisation", trials, gram_gap),
        cfg.record("norm_factorisation", trials * cfg.spec_pairs.len(), norm_gap),
    ])
}

/// Runs every check in [`CHECKS`] order.
pub fn run_verification(cfg: &RunConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let mut checks = algebra_checks(cfg)?;
    checks.push(flatten_check(cfg)?);
    checks.push(solidity_check(cfg)?);
    checks.push(witness_check(cfg)?);
    checks.extend(neumann_checks(cfg)?);
    checks.extend(reconstruction_checks(cfg)?);
    checks.extend(factorisation_checks(cfg)?);
    let environment = Environment {
        seed: cfg.seed,
        outer_size: cfg.outer_size,
        inner_size: cfg.inner_size,
        trials: cfg.trials,
        spec_pairs: cfg.spec_pairs.iter().map(|p| p.to_string()).collect(),
    };
    Ok(VerificationReport::new(environment, checks))
}
