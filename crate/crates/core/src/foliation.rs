//! Foliation 1-forms: construction, exact integrability, and pointwise
//! classification of singular points.
//!
//! Integrability (`α ∧ dα = 0`) is decided exactly over the complex
//! rationals. Classification at float points uses numerical ranks with an
//! explicit tolerance; [`classify_point_exact`] is the exact counterpart at
//! rational points.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{restrict_holomorphic, FormError};
use crate::linalg::numerical_rank;
use crate::polycore::{PolyError, SparsePoly};
use crate::scalar::{Coefficient, QComplex, Rational};
use crate::{Covector, Poly, PolyForm};

type C64 = Complex<f64>;

/// Default tolerance for numerical singularity and rank decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Upper bound on Newton seeds in [`find_singular_points`].
pub const MAX_SEEDS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FoliationError {
    #[error("input polynomial is zero")]
    ZeroPolynomial,
    #[error("1-form is identically zero")]
    ZeroForm,
    #[error("pencil coefficients must be positive")]
    NonPositiveCoefficient,
    #[error("logarithmic foliation needs at least 2 factors, got {0}")]
    TooFewFactors(usize),
    #[error("{0} residues for {1} factors")]
    ResidueCount(usize, usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected a 1-form, got degree {0}")]
    NotOneForm(usize),
    #[error("form has dz̄ terms or z̄-dependent coefficients")]
    Antiholomorphic,
    #[error("seed budget exceeded: {seeds} seeds > {max}")]
    BudgetExceeded { seeds: usize, max: usize },
    #[error("invalid search parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// How a foliation was constructed.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Raw,
    /// `α = a·f₁·df₂ − b·f₂·df₁`, first integral `f₁^a / f₂^b` (recorded,
    /// not evaluated).
    Pencil {
        a: Rational,
        b: Rational,
        f1: Poly,
        f2: Poly,
    },
    /// `α = f₁⋯f_p Σ λᵢ dfᵢ/fᵢ` with cleared denominators.
    Logarithmic { lambda: Vec<QComplex>, f: Vec<Poly> },
    /// `α = h·df`.
    Factored { h: Poly, f: Poly },
}

impl Provenance {
    pub fn kind(&self) -> &'static str {
        match self {
            Provenance::Raw => "raw",
            Provenance::Pencil { .. } => "pencil",
            Provenance::Logarithmic { .. } => "logarithmic",
            Provenance::Factored { .. } => "factored",
        }
    }
}

/// A foliation 1-form on `ℂⁿ` with metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct FoliationSpec {
    n: usize,
    alpha: PolyForm,
    dalpha: PolyForm,
    /// Degree `N` of the normal bundle when `α` is a well-defined twisted
    /// form on projective space.
    twist: Option<u32>,
    /// `Some(flag)` when all inputs were homogeneous and the Euler test was
    /// run; `None` otherwise.
    projectivizable: Option<bool>,
    provenance: Provenance,
    warnings: Vec<String>,
}

/// Twist degree `N` if `α` is holomorphic with homogeneous coefficients of a
/// common degree `N − 1` and zero radial contraction.
fn detect_twist(alpha: &PolyForm) -> Option<u32> {
    let rc = alpha.radial_contraction().ok()?;
    if !rc.is_zero() {
        return None;
    }
    let d = alpha.terms().find_map(|(_, c)| c.homogeneous_degree())?;
    Some(d + 1)
}

impl FoliationSpec {
    fn build(alpha: PolyForm, provenance: Provenance, projectivizable: Option<bool>) -> Result<Self, FoliationError> {
        if alpha.degree() != 1 {
            return Err(FoliationError::NotOneForm(alpha.degree()));
        }
        if alpha.is_zero() {
            return Err(FoliationError::ZeroForm);
        }
        let dalpha = alpha.exterior_derivative()?;
        let twist = match projectivizable {
            Some(false) => None,
            _ => detect_twist(&alpha),
        };
        Ok(Self {
            n: alpha.n(),
            alpha,
            dalpha,
            twist,
            projectivizable,
            provenance,
            warnings: Vec::new(),
        })
    }

    /// Wraps an arbitrary 1-form.
    pub fn raw(alpha: PolyForm) -> Result<Self, FoliationError> {
        let flag = alpha.radial_contraction().ok().map(|rc| rc.is_zero());
        Self::build(alpha, Provenance::Raw, flag)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> &PolyForm {
        &self.alpha
    }

    pub fn dalpha(&self) -> &PolyForm {
        &self.dalpha
    }

    pub fn twist(&self) -> Option<u32> {
        self.twist
    }

    pub fn projectivizable(&self) -> Option<bool> {
        self.projectivizable
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Same foliation with `α` replaced by `c·α`.
    pub fn scaled(&self, c: &QComplex) -> Result<Self, FoliationError> {
        let mut out = Self::build(self.alpha.scale(c), self.provenance.clone(), self.projectivizable)?;
        out.warnings = self.warnings.clone();
        Ok(out)
    }
}

fn df(f: &Poly) -> Result<PolyForm, FoliationError> {
    Ok(PolyForm::holomorphic_function(f)?.exterior_derivative()?)
}

fn lifted(f: &Poly) -> Result<Poly, FoliationError> {
    Ok(crate::forms::lift(f)?)
}

fn rational_c(r: &Rational) -> QComplex {
    Complex::new(r.clone(), Rational::zero())
}

/// `α = a·f₁·df₂ − b·f₂·df₁`.
///
/// When `f₁, f₂` are homogeneous the Euler contraction equals
/// `(a·deg f₂ − b·deg f₁)·f₁f₂`, and the form is projectivizable iff that
/// factor vanishes.
pub fn make_pencil(a: &Rational, b: &Rational, f1: &Poly, f2: &Poly) -> Result<FoliationSpec, FoliationError> {
    if f1.is_zero() || f2.is_zero() {
        return Err(FoliationError::ZeroPolynomial);
    }
    if f1.n_vars() != f2.n_vars() {
        return Err(FoliationError::DimensionMismatch {
            left: f1.n_vars(),
            right: f2.n_vars(),
        });
    }
    if *a <= Rational::zero() || *b <= Rational::zero() {
        return Err(FoliationError::NonPositiveCoefficient);
    }
    let left = df(f2)?.mul_function(&lifted(f1)?)?.scale(&rational_c(a));
    let right = df(f1)?.mul_function(&lifted(f2)?)?.scale(&rational_c(b));
    let alpha = left.checked_sub(&right)?;
    let flag = match (f1.homogeneous_degree(), f2.homogeneous_degree()) {
        (Some(d1), Some(d2)) => Some(a * Rational::from_integer(d2.into()) == b * Rational::from_integer(d1.into())),
        _ => None,
    };
    let provenance = Provenance::Pencil {
        a: a.clone(),
        b: b.clone(),
        f1: f1.clone(),
        f2: f2.clone(),
    };
    let mut spec = FoliationSpec::build(alpha, provenance, flag)?;
    if flag.is_none() {
        spec.warnings
            .push("pencil inputs are not homogeneous; projectivizability not assessed".into());
    }
    Ok(spec)
}

/// `α = Σᵢ λᵢ (∏_{j≠i} f_j) dfᵢ`.
///
/// With homogeneous factors of degrees `nᵢ` the Euler contraction is
/// `(Σ nᵢλᵢ)·∏ fᵢ`; the projectivizability flag is `Σ nᵢλᵢ = 0`.
pub fn make_logarithmic(lambda: &[QComplex], f: &[Poly]) -> Result<FoliationSpec, FoliationError> {
    if f.len() < 2 {
        return Err(FoliationError::TooFewFactors(f.len()));
    }
    if lambda.len() != f.len() {
        return Err(FoliationError::ResidueCount(lambda.len(), f.len()));
    }
    if f.iter().any(|p| p.is_zero()) {
        return Err(FoliationError::ZeroPolynomial);
    }
    let n = f[0].n_vars();
    if let Some(bad) = f.iter().find(|p| p.n_vars() != n) {
        return Err(FoliationError::DimensionMismatch {
            left: n,
            right: bad.n_vars(),
        });
    }
    let lifted_f: Vec<Poly> = f.iter().map(lifted).collect::<Result<_, _>>()?;
    let mut alpha = PolyForm::zero(n, 1);
    for (i, (li, fi)) in lambda.iter().zip(f).enumerate() {
        let mut others = Poly::one(2 * n);
        for (j, fj) in lifted_f.iter().enumerate() {
            if j != i {
                others = others.checked_mul(fj)?;
            }
        }
        let term = df(fi)?.mul_function(&others)?.scale(li);
        alpha = alpha.checked_add(&term)?;
    }
    let degrees: Option<Vec<u32>> = f.iter().map(|p| p.homogeneous_degree()).collect();
    let flag = degrees.map(|ds| {
        let s = residue_sum(lambda, &ds);
        s.is_zero()
    });
    let provenance = Provenance::Logarithmic {
        lambda: lambda.to_vec(),
        f: f.to_vec(),
    };
    let mut spec = FoliationSpec::build(alpha, provenance, flag)?;
    if f.len() < 3 {
        spec.warnings
            .push(format!("only {} factors; generic logarithmic foliations need p >= 3", f.len()));
    }
    spec.warnings.push(
        "genericity (irreducible factors, normal-crossing divisor, positive bundles) not verified".into(),
    );
    if flag.is_none() {
        spec.warnings
            .push("factors are not all homogeneous; projectivizability not assessed".into());
    }
    Ok(spec)
}

/// `Σ nᵢλᵢ` for degrees `nᵢ`.
pub fn residue_sum(lambda: &[QComplex], degrees: &[u32]) -> QComplex {
    lambda
        .iter()
        .zip(degrees)
        .fold(QComplex::zero(), |s, (l, &d)| s + l.clone() * QComplex::from_int(d as i64))
}

/// `α = h·df`.
pub fn make_factored(h: &Poly, f: &Poly) -> Result<FoliationSpec, FoliationError> {
    if h.is_zero() || f.is_zero() {
        return Err(FoliationError::ZeroPolynomial);
    }
    if h.n_vars() != f.n_vars() {
        return Err(FoliationError::DimensionMismatch {
            left: h.n_vars(),
            right: f.n_vars(),
        });
    }
    let alpha = df(f)?.mul_function(&lifted(h)?)?;
    let flag = alpha.radial_contraction().ok().map(|rc| rc.is_zero());
    FoliationSpec::build(
        alpha,
        Provenance::Factored {
            h: h.clone(),
            f: f.clone(),
        },
        flag,
    )
}

/// Outcome of [`check_integrability`].
#[derive(Debug, Clone, PartialEq)]
pub enum Integrability {
    Integrable,
    /// `α ∧ dα ≠ 0`; the witness is that 3-form.
    NotIntegrable { witness: PolyForm },
}

impl Integrability {
    pub fn is_integrable(&self) -> bool {
        matches!(self, Integrability::Integrable)
    }
}

/// Decides `α ∧ dα = 0` exactly.
pub fn check_integrability(spec: &FoliationSpec) -> Result<Integrability, FoliationError> {
    if 3 > 2 * spec.n {
        return Ok(Integrability::Integrable);
    }
    let w = spec.alpha.wedge(&spec.dalpha)?;
    if w.is_zero() {
        Ok(Integrability::Integrable)
    } else {
        Ok(Integrability::NotIntegrable { witness: w })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointClass {
    Regular,
    Kupka,
    DegenerateSingular,
}

impl std::fmt::Display for PointClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PointClass::Regular => "Regular",
            PointClass::Kupka => "Kupka",
            PointClass::DegenerateSingular => "DegenerateSingular",
        };
        f.write_str(s)
    }
}

/// Pointwise classification.
#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub point: Vec<C64>,
    pub class: PointClass,
    pub alpha_at: Covector,
    /// `|α(p)|`; doubles as the residual for located singular points.
    pub alpha_norm: f64,
    /// Rank of the antisymmetric `2n × 2n` coefficient matrix of `dα(p)`.
    pub dalpha_rank: usize,
    /// `2n − dalpha_rank`.
    pub radical_dim: usize,
}

/// Regular if `|α(p)| > tol`; otherwise Kupka if `dα(p)` has numerical
/// rank ≥ 2 (singular values above `tol`), else degenerate.
pub fn classify_point(spec: &FoliationSpec, p: &[C64], tol: f64) -> Result<PointReport, FoliationError> {
    if p.len() != spec.n {
        return Err(FoliationError::DimensionMismatch {
            left: spec.n,
            right: p.len(),
        });
    }
    let alpha_at = spec.alpha.eval_form(p)?;
    let alpha_norm = alpha_at.norm();
    let dm = if spec.dalpha.is_zero() {
        DMatrix::from_element(2 * spec.n, 2 * spec.n, C64::new(0.0, 0.0))
    } else {
        spec.dalpha.eval_two_form(p)?
    };
    let dalpha_rank = numerical_rank(&dm, tol);
    let class = if alpha_norm > tol {
        PointClass::Regular
    } else if dalpha_rank >= 2 {
        PointClass::Kupka
    } else {
        PointClass::DegenerateSingular
    };
    Ok(PointReport {
        point: p.to_vec(),
        class,
        alpha_at,
        alpha_norm,
        dalpha_rank,
        radical_dim: 2 * spec.n - dalpha_rank,
    })
}

/// Exact classification at a point with complex-rational coordinates.
pub fn classify_point_exact(spec: &FoliationSpec, p: &[QComplex]) -> Result<PointClass, FoliationError> {
    if p.len() != spec.n {
        return Err(FoliationError::DimensionMismatch {
            left: spec.n,
            right: p.len(),
        });
    }
    let full: Vec<QComplex> = p.iter().cloned().chain(p.iter().map(|z| z.conj())).collect();
    let vanishes = |form: &PolyForm| -> Result<bool, FoliationError> {
        for (_, c) in form.terms() {
            if !c.evaluate_exact(&full)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    };
    Ok(if !vanishes(&spec.alpha)? {
        PointClass::Regular
    } else if !vanishes(&spec.dalpha)? {
        // a nonzero antisymmetric matrix has rank >= 2
        PointClass::Kupka
    } else {
        PointClass::DegenerateSingular
    })
}

/// Parameters for [`find_singular_points`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSearch {
    /// Seed interval, applied to the real and imaginary part of every
    /// coordinate.
    pub lo: f64,
    pub hi: f64,
    /// Seeds per real axis (≥ 2); total seeds `grid^(2n)`.
    pub grid: usize,
    pub newton_iters: usize,
    pub tol: f64,
}

impl Default for SingularSearch {
    fn default() -> Self {
        Self {
            lo: -1.0,
            hi: 1.0,
            grid: 3,
            newton_iters: 60,
            tol: DEFAULT_TOL,
        }
    }
}

struct NewtonSystem {
    n: usize,
    f: Vec<SparsePoly<C64>>,
    jac: Vec<Vec<SparsePoly<C64>>>,
}

impl NewtonSystem {
    fn residual(&self, p: &[C64]) -> Vec<C64> {
        self.f.iter().map(|q| q.evaluate(p).expect("arity")).collect()
    }

    fn solve_from(&self, seed: Vec<C64>, iters: usize, tol: f64) -> Option<Vec<C64>> {
        let n = self.n;
        let mut p = seed;
        for _ in 0..iters {
            // stop on step size, not residual: at a multiple root the
            // residual is tiny long before the iterate is accurate
            let r = self.residual(&p);
            if r.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                break;
            }
            let j = DMatrix::from_fn(n, n, |i, k| self.jac[i][k].evaluate(&p).expect("arity"));
            let rhs = DVector::from_iterator(n, r.iter().map(|z| -z));
            let svd = j.svd(true, true);
            let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
            let step = svd.solve(&rhs, smax * 1e-13 + f64::MIN_POSITIVE).ok()?;
            let sn = step.norm();
            if !sn.is_finite() {
                return None;
            }
            for (x, d) in p.iter_mut().zip(step.iter()) {
                *x += d;
            }
            if p.iter().any(|z| z.norm() > 1e6) {
                return None;
            }
            let scale = 1.0 + p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if sn <= 1e-15 * scale {
                break;
            }
        }
        let rn = self.residual(&p).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (rn < tol).then_some(p)
    }
}

fn point_cmp(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o.is_ne() {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Locates zeros of a holomorphic 1-form by Newton iteration from a grid of
/// seeds, deduplicates them at distance `10·tol`, and classifies each.
///
/// Heuristic: not every zero is guaranteed to be found. Each report carries
/// its residual `|α(p)|` in `alpha_norm`.
pub fn find_singular_points(spec: &FoliationSpec, search: &SingularSearch) -> Result<Vec<PointReport>, FoliationError> {
    let n = spec.n;
    if search.grid < 2 {
        return Err(FoliationError::InvalidParameters("grid must be >= 2".into()));
    }
    if !(search.tol > 0.0) || !(search.hi > search.lo) {
        return Err(FoliationError::InvalidParameters("need tol > 0 and hi > lo".into()));
    }
    if spec.alpha.has_antiholomorphic_basis() || !spec.alpha.is_holomorphic() {
        return Err(FoliationError::Antiholomorphic);
    }
    let seeds = (search.grid as u128).pow(2 * n as u32);
    if seeds > MAX_SEEDS as u128 {
        return Err(FoliationError::BudgetExceeded {
            seeds: seeds.min(usize::MAX as u128) as usize,
            max: MAX_SEEDS,
        });
    }
    let seeds = seeds as usize;
    let mut f = Vec::with_capacity(n);
    for i in 0..n {
        let c = restrict_holomorphic(&spec.alpha.coeff(&[i])).ok_or(FoliationError::Antiholomorphic)?;
        f.push(c);
    }
    let jac = f
        .iter()
        .map(|c| (0..n).map(|k| c.differentiate(k).map(|d| d.to_float::<f64>())).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let system = NewtonSystem {
        n,
        f: f.iter().map(|c| c.to_float::<f64>()).collect(),
        jac,
    };
    let axis: Vec<f64> = (0..search.grid)
        .map(|k| search.lo + (search.hi - search.lo) * k as f64 / (search.grid - 1) as f64)
        .collect();
    let mut found: Vec<Vec<C64>> = (0..seeds)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut seed = Vec::with_capacity(n);
            for _ in 0..n {
                let re = axis[idx % search.grid];
                idx /= search.grid;
                let im = axis[idx % search.grid];
                idx /= search.grid;
                seed.push(C64::new(re, im));
            }
            system.solve_from(seed, search.newton_iters, search.tol)
        })
        .collect();
    found.sort_by(|a, b| point_cmp(a, b));
    let mut kept: Vec<Vec<C64>> = Vec::new();
    for p in found {
        if kept.iter().all(|q| distance(q, &p) > 10.0 * search.tol) {
            kept.push(p);
        }
    }
    kept.iter().map(|p| classify_point(spec, p, search.tol)).collect()
}

/// Exact check that `α = h·df` for the provenance-supplied factorization.
pub fn verify_factorization(spec: &FoliationSpec) -> Option<bool> {
    match &spec.provenance {
        Provenance::Factored { h, f } => {
            let rebuilt = df(f).ok()?.mul_function(&lifted(h).ok()?).ok()?;
            Some(rebuilt == spec.alpha)
        }
        _ => None,
    }
}
