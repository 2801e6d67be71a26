//! Sampled estimates of quantitative transversality.
//!
//! A map `s : ℂⁿ → ℂᵐ` is η-transverse to 0 on a set when every point with
//! `|s(x)| < η` has a derivative with right inverse of norm `< η⁻¹`, i.e.
//! `σ_min(ds(x)) > η`. Everything here checks that condition on a
//! deterministic quasi-random sample, never on the continuum.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::foliation::{classify_point, verify_factorization, FoliationError, FoliationSpec};
use crate::forms::{lift, FormError};
use crate::geometry::{kernel_symplectic_check, split_covector, subspace_angles, AngleMode, GeometryError};
use crate::linalg::{singular_values, sigma_min};
use crate::polycore::SparsePoly;
use crate::sampling::{dist, sample_region, to_real, Region, SamplingError};
use crate::{Covector, PolyForm, SymplecticFrame};

type C64 = Complex<f64>;
type FloatPoly = SparsePoly<C64>;

/// Step for central finite differences.
pub const FD_STEP: f64 = 1e-5;

/// Radius of the model ball used by [`local_perturbation_search`].
pub const MODEL_BALL_RADIUS: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransversalityError {
    #[error("eta must be positive and finite, got {0}")]
    InvalidEta(f64),
    #[error("sample count must be positive")]
    NoSamples,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Foliation(#[from] FoliationError),
}

/// Anything that yields a covector at each point of `ℂⁿ`.
pub trait OneFormField: Sync {
    fn n(&self) -> usize;
    fn covector(&self, p: &[C64]) -> Covector;
}

/// Float copy of a polynomial 1-form for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct FloatOneForm {
    n: usize,
    a: Vec<FloatPoly>,
    b: Vec<FloatPoly>,
}

impl FloatOneForm {
    pub fn new(form: &PolyForm) -> Result<Self, FormError> {
        if form.degree() != 1 {
            return Err(FormError::NotOneForm(form.degree()));
        }
        let n = form.n();
        let a = (0..n).map(|i| form.coeff(&[i]).to_float()).collect();
        let b = (0..n).map(|i| form.coeff(&[n + i]).to_float()).collect();
        Ok(Self { n, a, b })
    }

    /// Coefficients of the `dz` part, as polynomials in `(z, z̄)`.
    pub fn holomorphic_coefficients(&self) -> &[FloatPoly] {
        &self.a
    }
}

fn with_conjugates(p: &[C64]) -> Vec<C64> {
    p.iter().copied().chain(p.iter().map(|z| z.conj())).collect()
}

impl OneFormField for FloatOneForm {
    fn n(&self) -> usize {
        self.n
    }

    fn covector(&self, p: &[C64]) -> Covector {
        let full = with_conjugates(p);
        Covector::new(
            self.a.iter().map(|c| c.evaluate(&full).expect("arity")).collect(),
            self.b.iter().map(|c| c.evaluate(&full).expect("arity")).collect(),
        )
    }
}

impl<F: Fn(&[C64]) -> Covector + Sync> OneFormField for (usize, F) {
    fn n(&self) -> usize {
        self.0
    }

    fn covector(&self, p: &[C64]) -> Covector {
        (self.1)(p)
    }
}

type MapFn = dyn Fn(&[C64]) -> Vec<C64> + Send + Sync;

enum MapKind {
    /// Components and their `∂/∂zₖ`, `∂/∂z̄ₖ` derivatives, all in `(z, z̄)`.
    Poly {
        comps: Vec<FloatPoly>,
        dz: Vec<Vec<FloatPoly>>,
        dzbar: Vec<Vec<FloatPoly>>,
    },
    Closure(Box<MapFn>),
}

/// A map `ℂⁿ → ℂᵐ` with a domain and a real Jacobian.
pub struct SampledMap {
    pub domain: Region,
    n: usize,
    m: usize,
    kind: MapKind,
}

impl std::fmt::Debug for SampledMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.kind {
            MapKind::Poly { .. } => "polynomial",
            MapKind::Closure(_) => "closure",
        };
        f.debug_struct("SampledMap")
            .field("domain", &self.domain)
            .field("n", &self.n)
            .field("m", &self.m)
            .field("kind", &kind)
            .finish()
    }
}

impl SampledMap {
    /// Polynomial map with analytic Jacobian. Each component is either a
    /// holomorphic polynomial in `n` variables or a polynomial in the `2n`
    /// formal variables `(z, z̄)`.
    pub fn from_polys<R: crate::scalar::Coefficient>(
        domain: Region,
        comps: &[SparsePoly<R>],
    ) -> Result<Self, TransversalityError> {
        let n = domain.n();
        let mut lifted = Vec::with_capacity(comps.len());
        for c in comps {
            let f = c.to_float::<f64>();
            let f = if f.n_vars() == n {
                lift(&f).map_err(FormError::from)?
            } else if f.n_vars() == 2 * n {
                f
            } else {
                return Err(TransversalityError::DimensionMismatch {
                    left: 2 * n,
                    right: f.n_vars(),
                });
            };
            lifted.push(f);
        }
        Self::from_float_polys(domain, lifted)
    }

    fn from_float_polys(domain: Region, comps: Vec<FloatPoly>) -> Result<Self, TransversalityError> {
        let n = domain.n();
        let deriv = |offset: usize| -> Result<Vec<Vec<FloatPoly>>, TransversalityError> {
            comps
                .iter()
                .map(|c| {
                    (0..n)
                        .map(|k| c.differentiate(offset + k).map_err(|e| FormError::from(e).into()))
                        .collect()
                })
                .collect()
        };
        let dz = deriv(0)?;
        let dzbar = deriv(n)?;
        Ok(Self {
            domain,
            n,
            m: comps.len(),
            kind: MapKind::Poly { comps, dz, dzbar },
        })
    }

    /// Map given by a closure; Jacobian by central differences.
    pub fn from_fn<F>(domain: Region, m: usize, f: F) -> Self
    where
        F: Fn(&[C64]) -> Vec<C64> + Send + Sync + 'static,
    {
        Self {
            n: domain.n(),
            domain,
            m,
            kind: MapKind::Closure(Box::new(f)),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn eval(&self, p: &[C64]) -> Vec<C64> {
        match &self.kind {
            MapKind::Poly { comps, .. } => {
                let full = with_conjugates(p);
                comps.iter().map(|c| c.evaluate(&full).expect("arity")).collect()
            }
            MapKind::Closure(f) => f(p),
        }
    }

    /// Real `2m × 2n` Jacobian; rows `(Re s, Im s)`, columns `(x, y)`.
    pub fn jacobian(&self, p: &[C64]) -> DMatrix<f64> {
        match &self.kind {
            MapKind::Poly { dz, dzbar, .. } => {
                let full = with_conjugates(p);
                let (n, m) = (self.n, self.m);
                let mut jac = DMatrix::zeros(2 * m, 2 * n);
                let i = C64::new(0.0, 1.0);
                for j in 0..m {
                    for k in 0..n {
                        let a = dz[j][k].evaluate(&full).expect("arity");
                        let b = dzbar[j][k].evaluate(&full).expect("arity");
                        let dx = a + b;
                        let dy = i * (a - b);
                        jac[(j, k)] = dx.re;
                        jac[(m + j, k)] = dx.im;
                        jac[(j, n + k)] = dy.re;
                        jac[(m + j, n + k)] = dy.im;
                    }
                }
                jac
            }
            MapKind::Closure(_) => self.jacobian_fd(p, FD_STEP),
        }
    }

    /// Central-difference Jacobian with step `h`.
    pub fn jacobian_fd(&self, p: &[C64], h: f64) -> DMatrix<f64> {
        let (n, m) = (self.n, self.m);
        let mut jac = DMatrix::zeros(2 * m, 2 * n);
        for col in 0..2 * n {
            let dir = if col < n { C64::new(h, 0.0) } else { C64::new(0.0, h) };
            let k = col % n;
            let mut plus = p.to_vec();
            let mut minus = p.to_vec();
            plus[k] += dir;
            minus[k] -= dir;
            let fp = self.eval(&plus);
            let fm = self.eval(&minus);
            for j in 0..m {
                let d = (fp[j] - fm[j]) / (2.0 * h);
                jac[(j, col)] = d.re;
                jac[(m + j, col)] = d.im;
            }
        }
        jac
    }

    /// Largest relative Frobenius discrepancy between [`jacobian`](Self::jacobian)
    /// and central differences over `points`.
    pub fn cross_check(&self, points: &[Vec<C64>]) -> f64 {
        points
            .iter()
            .map(|p| {
                let a = self.jacobian(p);
                let b = self.jacobian_fd(p, FD_STEP);
                (&a - &b).norm() / a.norm().max(1e-12)
            })
            .fold(0.0, f64::max)
    }

    /// `|s(p)|` and `σ_min(ds(p))`.
    pub fn probe(&self, p: &[C64]) -> (f64, f64) {
        let v = self.eval(p);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let sigma = sigma_min(&self.jacobian(p)).unwrap_or(0.0);
        (norm, sigma)
    }
}

/// One sampled point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub point: Vec<C64>,
    pub abs_s: f64,
    pub sigma_min: f64,
}

/// Probes `s` at the first `samples` points of its domain.
pub fn sample_map(s: &SampledMap, samples: usize, seed: u64) -> Result<Vec<SampleRow>, TransversalityError> {
    if samples == 0 {
        return Err(TransversalityError::NoSamples);
    }
    let pts = sample_region(&s.domain, samples, seed)?;
    Ok(pts
        .into_par_iter()
        .map(|p| {
            let (abs_s, sigma_min) = s.probe(&p);
            SampleRow {
                point: p,
                abs_s,
                sigma_min,
            }
        })
        .collect())
}

/// Writes rows as CSV: `x1..x2n,abs_s,sigma_min`, 17 significant digits.
pub fn rows_to_csv(rows: &[SampleRow]) -> String {
    let dim = rows.first().map_or(0, |r| 2 * r.point.len());
    let mut out = String::new();
    let header: Vec<String> = (1..=dim).map(|k| format!("x{k}")).collect();
    let _ = writeln!(out, "{},abs_s,sigma_min", header.join(","));
    for r in rows {
        let fields: Vec<String> = to_real(&r.point)
            .into_iter()
            .chain([r.abs_s, r.sigma_min])
            .map(format_17)
            .collect();
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

/// Decimal with 17 significant digits.
pub fn format_17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Result of [`transversality_estimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalityEstimate {
    /// Infimum of `σ_min` over sampled points with `|s| < η`;
    /// `f64::INFINITY` when no sample hits the sublevel set.
    pub value: f64,
    pub hits: usize,
    pub samples: usize,
    pub eta: f64,
    pub seed: u64,
}

impl TransversalityEstimate {
    pub fn sublevel_hit(&self) -> bool {
        self.hits > 0
    }
}

/// Infimum of `σ_min(ds)` over sampled points with `|s| < eta`.
pub fn transversality_estimate(
    s: &SampledMap,
    eta: f64,
    samples: usize,
    seed: u64,
) -> Result<TransversalityEstimate, TransversalityError> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(TransversalityError::InvalidEta(eta));
    }
    let rows = sample_map(s, samples, seed)?;
    Ok(estimate_from_rows(&rows, eta, seed))
}

pub fn estimate_from_rows(rows: &[SampleRow], eta: f64, seed: u64) -> TransversalityEstimate {
    let mut value = f64::INFINITY;
    let mut hits = 0;
    for r in rows.iter().filter(|r| r.abs_s < eta) {
        hits += 1;
        value = value.min(r.sigma_min);
    }
    TransversalityEstimate {
        value,
        hits,
        samples: rows.len(),
        eta,
        seed,
    }
}

/// Largest `ε` with `|s| < ε ⇒ σ_min > ε` on the sampled points:
/// `min_x max(|s(x)|, σ_min(x))`. Infinite for an empty sample.
pub fn transversality_constant(rows: &[SampleRow]) -> f64 {
    rows.iter()
        .map(|r| r.abs_s.max(r.sigma_min))
        .fold(f64::INFINITY, f64::min)
}

/// A sampled point where `|α₁,₀| ≤ |α₀,₁|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadPoint {
    pub point: Vec<C64>,
    pub norm_10: f64,
    pub norm_01: f64,
}

/// Sampled points of `region` where the kernel criterion fails.
pub fn bad_set_scan(
    field: &dyn OneFormField,
    frame: &SymplecticFrame,
    region: &Region,
    samples: usize,
    seed: u64,
) -> Result<Vec<BadPoint>, TransversalityError> {
    if samples == 0 {
        return Err(TransversalityError::NoSamples);
    }
    if field.n() != frame.n() || region.n() != frame.n() {
        return Err(TransversalityError::DimensionMismatch {
            left: field.n(),
            right: frame.n(),
        });
    }
    let pts = sample_region(region, samples, seed)?;
    let scored: Vec<Result<Option<BadPoint>, GeometryError>> = pts
        .into_par_iter()
        .map(|p| {
            let (c10, c01) = split_covector(&field.covector(&p), frame)?;
            let (norm_10, norm_01) = (c10.norm(), c01.norm());
            Ok((norm_10 <= norm_01).then_some(BadPoint {
                point: p,
                norm_10,
                norm_01,
            }))
        })
        .collect();
    let mut out = Vec::new();
    for r in scored {
        if let Some(b) = r? {
            out.push(b);
        }
    }
    Ok(out)
}

/// Finite-scale regularity evidence for a foliation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub gamma: f64,
    /// Sampled transversality constant of the `(1,0)`-part off the γ-tube.
    pub epsilon: f64,
    /// Smallest singular value of `dα` that certifies rank ≥ 2 over the
    /// supplied Kupka points (the second largest; 0 if none supplied).
    pub kupka_margin: f64,
    /// Largest `∠_M(ker α, J ker α)` sampled inside the γ-tube.
    pub leaf_angle_max: f64,
    pub bad_points: Vec<BadPoint>,
    pub notes: Vec<String>,
    pub samples: usize,
    pub seed: u64,
}

/// Parameters for [`regularity_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityParams {
    pub kupka_points: Vec<Vec<C64>>,
    pub gamma: f64,
    pub region: Region,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

/// Checks the regularity conditions at finite scale:
///
/// * (i) classification of each supplied Kupka point (notes, and
///   `kupka_margin`);
/// * (ii) `leaf_angle_max` over samples of the γ-balls around the Kupka
///   points (centres excluded);
/// * (iii) `epsilon`, the transversality constant of the `(1,0)`-part over
///   `region` minus the γ-tube;
/// * (iv) exact `α = h·df` check when provenance carries `(h, f)`.
pub fn regularity_report(
    spec: &FoliationSpec,
    frame: &SymplecticFrame,
    params: &RegularityParams,
) -> Result<RegularityReport, TransversalityError> {
    let n = spec.n();
    if !(params.gamma > 0.0 && params.gamma.is_finite()) {
        return Err(TransversalityError::InvalidParameter("gamma must be positive".into()));
    }
    if params.samples == 0 {
        return Err(TransversalityError::NoSamples);
    }
    if frame.n() != n || params.region.n() != n {
        return Err(TransversalityError::DimensionMismatch {
            left: n,
            right: frame.n(),
        });
    }
    let field = FloatOneForm::new(spec.alpha())?;
    let mut notes = Vec::new();

    // (i)
    let mut kupka_margin = f64::INFINITY;
    for (k, p) in params.kupka_points.iter().enumerate() {
        if p.len() != n {
            return Err(TransversalityError::DimensionMismatch { left: n, right: p.len() });
        }
        let r = classify_point(spec, p, params.tol)?;
        notes.push(format!(
            "(i) kupka point {k}: {} (dalpha rank {}, |alpha| {:.3e})",
            r.class, r.dalpha_rank, r.alpha_norm
        ));
        let dm = if spec.dalpha().is_zero() {
            DMatrix::from_element(2 * n, 2 * n, C64::new(0.0, 0.0))
        } else {
            spec.dalpha().eval_two_form(p)?
        };
        let mut sv = singular_values(&dm);
        sv.sort_by(|a, b| b.total_cmp(a));
        kupka_margin = kupka_margin.min(sv.get(1).copied().unwrap_or(0.0));
    }
    if params.kupka_points.is_empty() {
        kupka_margin = 0.0;
        notes.push("(i) no Kupka points supplied".into());
    }

    // (ii)
    let mut leaf_angle_max: f64 = 0.0;
    let mut tube_samples = 0usize;
    for p in &params.kupka_points {
        let tube = Region::shell(p.clone(), params.gamma * 1e-3, params.gamma);
        let pts = sample_region(&tube, params.samples, params.seed)?;
        let angles: Vec<Option<f64>> = pts
            .par_iter()
            .map(|x| leaf_angle(&field, frame, x))
            .collect::<Result<_, _>>()?;
        for a in angles.into_iter().flatten() {
            tube_samples += 1;
            leaf_angle_max = leaf_angle_max.max(a);
        }
    }
    notes.push(format!(
        "(ii) leaf angle sampled at {tube_samples} points within gamma of Kupka points"
    ));

    // (iii)
    let outside: Vec<Vec<C64>> = sample_region(&params.region, params.samples, params.seed)?
        .into_iter()
        .filter(|x| params.kupka_points.iter().all(|k| dist(x, k) > params.gamma))
        .collect();
    let map = holomorphic_part_map(spec, &field, frame, params.region.clone())?;
    let rows: Vec<SampleRow> = outside
        .into_par_iter()
        .map(|p| {
            let (abs_s, sigma_min) = map.probe(&p);
            SampleRow {
                point: p,
                abs_s,
                sigma_min,
            }
        })
        .collect();
    let epsilon = if rows.is_empty() {
        notes.push("(iii) no samples outside the gamma-tube; epsilon set to 0".into());
        0.0
    } else {
        notes.push(format!("(iii) epsilon from {} samples outside the gamma-tube", rows.len()));
        transversality_constant(&rows)
    };

    // (iv)
    notes.push(match verify_factorization(spec) {
        Some(true) => "(iv) alpha = h df verified exactly from provenance".into(),
        Some(false) => "(iv) provenance (h, f) does NOT reproduce alpha".into(),
        None => format!(
            "(iv) unverified: {} provenance carries no local factorization (h, f)",
            spec.provenance().kind()
        ),
    });

    let bad_points = bad_set_scan(&field, frame, &params.region, params.samples, params.seed)?;
    Ok(RegularityReport {
        gamma: params.gamma,
        epsilon,
        kupka_margin,
        leaf_angle_max,
        bad_points,
        notes,
        samples: params.samples,
        seed: params.seed,
    })
}

/// `∠_M(ker α(x), J ker α(x))`, or `None` where `α(x)` vanishes.
fn leaf_angle(field: &dyn OneFormField, frame: &SymplecticFrame, x: &[C64]) -> Result<Option<f64>, GeometryError> {
    let c = field.covector(x);
    if c.norm() < 1e-12 {
        return Ok(None);
    }
    let check = kernel_symplectic_check(&c, frame)?;
    let jk = check.kernel.map(frame.j());
    Ok(Some(subspace_angles(&check.kernel, &jk, AngleMode::Max)?))
}

/// The `(1,0)`-part `x ↦ α₁,₀(x)` as a map `ℂⁿ → ℂⁿ` (its `dz` components).
fn holomorphic_part_map(
    spec: &FoliationSpec,
    field: &FloatOneForm,
    frame: &SymplecticFrame,
    domain: Region,
) -> Result<SampledMap, TransversalityError> {
    if frame.is_standard() {
        let comps: Vec<FloatPoly> = field.holomorphic_coefficients().to_vec();
        return SampledMap::from_float_polys(domain, comps);
    }
    let field = FloatOneForm::new(spec.alpha())?;
    let frame = frame.clone();
    let n = spec.n();
    Ok(SampledMap::from_fn(domain, n, move |p| {
        let (c10, _) = split_covector(&field.covector(p), &frame).expect("dimensions checked");
        c10.a
    }))
}

/// Outcome of [`local_perturbation_search`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WSearchResult {
    pub w: Vec<C64>,
    /// Sampled transversality constant of `t − w` on the model ball.
    pub achieved: f64,
    pub evaluations: usize,
    /// Refinement stopped on budget rather than on step size.
    pub budget_exhausted: bool,
    pub samples: usize,
    pub seed: u64,
}

/// Precomputed samples of `t` on the model ball; `σ_min` does not depend on
/// the offset `w`.
#[derive(Debug, Clone)]
pub struct OffsetScorer {
    values: Vec<Vec<C64>>,
    sigmas: Vec<f64>,
}

impl OffsetScorer {
    pub fn new(t: &SampledMap, samples: usize, seed: u64) -> Result<Self, TransversalityError> {
        if samples == 0 {
            return Err(TransversalityError::NoSamples);
        }
        let ball = Region::centered_ball(t.n(), MODEL_BALL_RADIUS);
        let pts = sample_region(&ball, samples, seed)?;
        let probes: Vec<(Vec<C64>, f64)> = pts
            .par_iter()
            .map(|p| (t.eval(p), sigma_min(&t.jacobian(p)).unwrap_or(0.0)))
            .collect();
        let (values, sigmas) = probes.into_iter().unzip();
        Ok(Self { values, sigmas })
    }

    /// `min_x max(|t(x) − w|, σ_min(x))`.
    pub fn score(&self, w: &[C64]) -> f64 {
        self.values
            .iter()
            .zip(&self.sigmas)
            .map(|(v, s)| {
                let d = v.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                d.max(*s)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn project_to_ball(w: &mut [C64], delta: f64) {
    let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > delta {
        let s = delta / norm;
        for z in w.iter_mut() {
            *z *= s;
        }
    }
}

/// Searches `|w| ≤ delta` for the offset that makes `t − w` most transverse
/// to 0 on `B(0, 9/10)`: quasi-random candidates, then compass refinement of
/// the best few.
///
/// The model-ball reduction of the perturbation `(0, …, 0, −Σ wᵢzᵢ s_ref)`
/// with a trivialized reference section is exactly the offset `t ↦ t − w`.
pub fn local_perturbation_search(
    t: &SampledMap,
    delta: f64,
    candidates: usize,
    samples: usize,
    seed: u64,
) -> Result<WSearchResult, TransversalityError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(TransversalityError::InvalidParameter("delta must be positive".into()));
    }
    if candidates == 0 {
        return Err(TransversalityError::InvalidParameter("candidates must be positive".into()));
    }
    if t.m() != t.n() {
        return Err(TransversalityError::DimensionMismatch { left: t.n(), right: t.m() });
    }
    let n = t.n();
    let scorer = OffsetScorer::new(t, samples, seed)?;
    let zero = vec![C64::new(0.0, 0.0); n];
    let mut pool: Vec<Vec<C64>> = vec![zero];
    pool.extend(sample_region(
        &Region::centered_ball(n, delta),
        candidates.saturating_sub(1),
        seed ^ 0x9e37_79b9,
    )?);
    let mut scored: Vec<(f64, Vec<C64>)> = pool.into_par_iter().map(|w| (scorer.score(&w), w)).collect();
    let mut evaluations = scored.len();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));

    let budget = candidates.max(64) * 4;
    let mut used = 0usize;
    let mut budget_exhausted = false;
    let starts: Vec<(f64, Vec<C64>)> = scored.iter().take(4).cloned().collect();
    let (mut best_score, mut best_w) = scored[0].clone();
    'starts: for (mut score, mut w) in starts {
        let mut step = delta / 8.0;
        while step > delta * 1e-5 {
            let mut improved = false;
            for axis in 0..2 * n {
                for sign in [1.0, -1.0] {
                    if used >= budget {
                        budget_exhausted = true;
                        if score > best_score {
                            best_w = w.clone();
                        }
                        break 'starts;
                    }
                    let mut cand = w.clone();
                    let d = sign * step;
                    if axis < n {
                        cand[axis].re += d;
                    } else {
                        cand[axis - n].im += d;
                    }
                    project_to_ball(&mut cand, delta);
                    let s = scorer.score(&cand);
                    used += 1;
                    if s > score {
                        score = s;
                        w = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if score > best_score {
            best_score = score;
            best_w = w;
        }
    }
    evaluations += used;
    project_to_ball(&mut best_w, delta);
    Ok(WSearchResult {
        achieved: scorer.score(&best_w),
        w: best_w,
        evaluations,
        budget_exhausted,
        samples,
        seed,
    })
}
