//! Local replacement of a foliation near a nondegenerate critical point by
//! its quadratic model.
//!
//! Near the centre, `α = h·df` is blended into `dH` with `H` the holomorphic
//! Hessian quadratic, through a radial bump that is `1` on `B(c)` and `0`
//! outside `B(3c/2)`. A Takagi factorization of the Hessian then gives
//! coordinates in which the model reads `Σ wᵢ dwᵢ`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::lift;
use crate::geometry::{split_covector, GeometryError};
use crate::linalg::singular_values;
use crate::polycore::{PolyError, SparsePoly};
use crate::sampling::{dist, sample_region, Region, SamplingError};
use crate::scalar::{lit, Coefficient, Real};
use crate::{Covector, SymplecticFrame};

type C64 = Complex<f64>;
type FloatPoly = SparsePoly<C64>;

/// Default nondegeneracy threshold `ε'` for the Hessian.
pub const DEFAULT_EPS_PRIME: f64 = 1e-3;

/// Radius of the excluded ball at the centre, relative to `c`.
pub const CENTER_EXCLUSION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbError {
    #[error("invalid local data: {0}")]
    InvalidData(String),
    #[error("f({value:e}) does not vanish at the centre")]
    NotZeroAtCenter { value: f64 },
    #[error("centre is not a critical point: |∂f| = {0:e}")]
    NotCritical(f64),
    #[error("|h| must stay positive near the centre, sampled minimum {0:e}")]
    VanishingH(f64),
    #[error("Hessian is not symmetric (residual {0:e})")]
    Asymmetric(f64),
    #[error(
        "degenerate Hessian: sigma_min = {sigma:e} <= {eps_prime:e}; the model requires every \
         Takagi value of (a_ij) to exceed eps'"
    )]
    Degenerate { sigma: f64, eps_prime: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `f`, `h` and the scales of a local perturbation problem.
///
/// `f = f_hol + κ·f_noise` and `h` are polynomials in the `2n` formal
/// variables `(z, z̄)` of absolute coordinates.
#[derive(Debug, Clone)]
pub struct LocalData {
    center: Vec<C64>,
    c: f64,
    kappa: f64,
    f: FloatPoly,
    h: FloatPoly,
    df_dz: Vec<FloatPoly>,
    df_dzbar: Vec<FloatPoly>,
    h_min: f64,
    h_max: f64,
    notes: Vec<String>,
}

fn full_vars(p: &[C64]) -> Vec<C64> {
    p.iter().copied().chain(p.iter().map(|z| z.conj())).collect()
}

fn to_formal<R: Coefficient>(p: &SparsePoly<R>, n: usize, what: &str) -> Result<FloatPoly, PerturbError> {
    let f = p.to_float::<f64>();
    if f.n_vars() == n {
        Ok(lift(&f)?)
    } else if f.n_vars() == 2 * n {
        Ok(f)
    } else {
        Err(PerturbError::InvalidData(format!(
            "{what} has {} variables, expected {n} or {}",
            f.n_vars(),
            2 * n
        )))
    }
}

impl LocalData {
    /// Validates `f(center) = 0`, `∂f(center) = 0` and `|h| > 0` on the
    /// `2c`-ball (sampled). Polynomials may use `n` holomorphic variables or
    /// the `2n` formal variables.
    pub fn new<R: Coefficient>(
        center: Vec<C64>,
        c: f64,
        f_hol: &SparsePoly<R>,
        f_noise: &SparsePoly<R>,
        kappa: f64,
        h: &SparsePoly<R>,
    ) -> Result<Self, PerturbError> {
        let n = center.len();
        if n == 0 {
            return Err(PerturbError::InvalidData("empty centre".into()));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(PerturbError::InvalidData(format!("radius c must be positive, got {c}")));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(PerturbError::InvalidData(format!("kappa must be >= 0, got {kappa}")));
        }
        let hol = to_formal(f_hol, n, "f")?;
        let noise = to_formal(f_noise, n, "f noise")?;
        let f = hol.checked_add(&noise.scale(&C64::new(kappa, 0.0)))?;
        let h = to_formal(h, n, "h")?;
        let df_dz = (0..n).map(|k| f.differentiate(k)).collect::<Result<Vec<_>, _>>()?;
        let df_dzbar = (0..n).map(|k| f.differentiate(n + k)).collect::<Result<Vec<_>, _>>()?;

        let at = full_vars(&center);
        let value = f.evaluate(&at)?.norm();
        if value > 1e-12 {
            return Err(PerturbError::NotZeroAtCenter { value });
        }
        let grad = df_dz
            .iter()
            .map(|d| d.evaluate(&at).map(|v| v.norm_sqr()))
            .sum::<Result<f64, _>>()?
            .sqrt();
        if grad > 1e-9 {
            return Err(PerturbError::NotCritical(grad));
        }

        let mut notes = Vec::new();
        if (0..n).any(|k| f.depends_on(n + k)) {
            notes.push("f has a zbar-dependent part; it is excluded from the holomorphic Hessian".into());
        }
        let probe = sample_region(&Region::ball(center.clone(), 2.0 * c), 2000, 0)?;
        let (mut h_min, mut h_max) = (f64::INFINITY, 0.0f64);
        for p in probe.iter().chain(std::iter::once(&center)) {
            let v = h.evaluate(&full_vars(p))?.norm();
            h_min = h_min.min(v);
            h_max = h_max.max(v);
        }
        if !(h_min > 0.0) {
            return Err(PerturbError::VanishingH(h_min));
        }
        Ok(Self {
            center,
            c,
            kappa,
            f,
            h,
            df_dz,
            df_dzbar,
            h_min,
            h_max,
            notes,
        })
    }

    pub fn n(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[C64] {
        &self.center
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Sampled bounds of `|h|` on the `2c`-ball.
    pub fn h_bounds(&self) -> (f64, f64) {
        (self.h_min, self.h_max)
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn f(&self, z: &[C64]) -> C64 {
        self.f.evaluate(&full_vars(z)).expect("arity")
    }

    pub fn h(&self, z: &[C64]) -> C64 {
        self.h.evaluate(&full_vars(z)).expect("arity")
    }

    pub fn df(&self, z: &[C64]) -> Covector {
        let full = full_vars(z);
        Covector::new(
            self.df_dz.iter().map(|d| d.evaluate(&full).expect("arity")).collect(),
            self.df_dzbar.iter().map(|d| d.evaluate(&full).expect("arity")).collect(),
        )
    }

    /// The input form `h·df`.
    pub fn alpha(&self, z: &[C64]) -> Covector {
        self.df(z).scale(self.h(z))
    }
}

/// Holomorphic Hessian `Aᵢⱼ = ∂²f/∂zᵢ∂zⱼ(center)`; `H(z) = ½ uᵀAu` with
/// `u = z − center`.
pub fn hessian_model(data: &LocalData) -> Result<DMatrix<C64>, PerturbError> {
    let n = data.n();
    let at = full_vars(&data.center);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = data.df_dz[i].differentiate(j)?.evaluate(&at)?;
        }
    }
    let asym = (&a - a.transpose()).norm();
    if asym > 1e-6 * a.norm().max(1.0) {
        return Err(PerturbError::Asymmetric(asym));
    }
    Ok(a)
}

fn quadratic(a: &DMatrix<C64>, u: &[C64]) -> C64 {
    let n = u.len();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            s += u[i] * a[(i, j)] * u[j];
        }
    }
    s * 0.5
}

fn mat_vec(a: &DMatrix<C64>, u: &[C64]) -> Vec<C64> {
    (0..u.len())
        .map(|i| (0..u.len()).map(|j| a[(i, j)] * u[j]).sum())
        .collect()
}

fn e(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = e(t);
        a / (a + e(1.0 - t))
    }
}

fn smoothstep_derivative(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let (a, b) = (e(t), e(1.0 - t));
    let (da, db) = (a / (t * t), b / ((1.0 - t) * (1.0 - t)));
    (da * b + a * db) / ((a + b) * (a + b))
}

/// Radial bump: `1` on `[0, c]`, `0` on `[3c/2, ∞)`.
pub fn bump(c: f64, r: f64) -> f64 {
    smoothstep((1.5 * c - r) / (0.5 * c))
}

/// `dβ/dr`.
pub fn bump_derivative(c: f64, r: f64) -> f64 {
    -smoothstep_derivative((1.5 * c - r) / (0.5 * c)) * 2.0 / c
}

/// Takagi factorization `A = U Σ Uᵀ` of a complex symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Takagi<T: Real> {
    pub u: DMatrix<Complex<T>>,
    /// Non-increasing.
    pub sigma: Vec<T>,
}

impl<T: Real> Takagi<T> {
    pub fn reconstruct(&self) -> DMatrix<Complex<T>> {
        let n = self.sigma.len();
        let s = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(self.sigma[i], T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        });
        &self.u * s * self.u.transpose()
    }

    /// `w = Σ^{1/2} Uᵀ u`, so that `½ uᵀAu = ½ Σ wᵢ²`.
    pub fn coordinate_map(&self, u: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.sigma.len();
        (0..n)
            .map(|k| {
                let s = (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self.u[(i, k)] * u[i]);
                s * self.sigma[k].sqrt()
            })
            .collect()
    }
}

/// Takagi factorization through the real symmetric embedding
/// `[[X, Y], [Y, −X]]` of `A = X + iY`: an eigenvector `(x, y)` for
/// `σ ≥ 0` gives a column `x + iy` with `A·conj(u) = σu`.
pub fn takagi_reduce<T: Real>(a: &DMatrix<Complex<T>>) -> Result<Takagi<T>, PerturbError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(PerturbError::InvalidData("Takagi needs a square matrix".into()));
    }
    let scale = a.norm().max(T::one());
    let asym = (a - a.transpose()).norm();
    if asym > lit::<T>(1e-9) * scale {
        return Err(PerturbError::Asymmetric(nalgebra::try_convert(asym).unwrap_or(f64::NAN)));
    }
    let m = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let z = a[(i % n, j % n)];
        match (bi, bj) {
            (0, 0) => z.re,
            (1, 1) => -z.re,
            _ => z.im,
        }
    });
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let zero_tol = lit::<T>(1e-12) * scale;

    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    for &k in order.iter().take(n) {
        let s = eig.eigenvalues[k];
        if s <= zero_tol {
            break;
        }
        let v = eig.eigenvectors.column(k);
        let mut q: Vec<Complex<T>> = (0..n).map(|i| Complex::new(v[i], v[n + i])).collect();
        let norm = q.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
        q.iter_mut().for_each(|z| *z /= norm);
        cols.push(q);
        sigma.push(s);
    }
    // zero Takagi values: any orthonormal completion works
    let mut e = 0;
    while cols.len() < n {
        let mut q: Vec<Complex<T>> = (0..n)
            .map(|i| Complex::new(if i == e { T::one() } else { T::zero() }, T::zero()))
            .collect();
        e += 1;
        for _ in 0..2 {
            for c in &cols {
                let dot = c.iter().zip(&q).fold(Complex::new(T::zero(), T::zero()), |s, (x, y)| s + x.conj() * y);
                q.iter_mut().zip(c).for_each(|(y, x)| *y -= *x * dot);
            }
        }
        let norm = q.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
        if norm > lit(0.5) {
            q.iter_mut().for_each(|z| *z /= norm);
            cols.push(q);
            sigma.push(T::zero());
        }
    }
    let u = DMatrix::from_fn(n, n, |i, j| cols[j][i]);
    Ok(Takagi { u, sigma })
}

/// Blended form around a critical point.
#[derive(Debug, Clone)]
pub struct PerturbationResult {
    pub data: LocalData,
    pub hessian: DMatrix<C64>,
    pub takagi: Takagi<f64>,
    pub eps_prime: f64,
}

/// Builds the blend. Refuses when `σ_min(A) ≤ eps_prime`.
pub fn blend_perturbation(data: &LocalData, eps_prime: f64) -> Result<PerturbationResult, PerturbError> {
    let hessian = hessian_model(data)?;
    let sigma = singular_values(&hessian).into_iter().fold(f64::INFINITY, f64::min);
    if sigma <= eps_prime {
        return Err(PerturbError::Degenerate { sigma, eps_prime });
    }
    let takagi = takagi_reduce(&hessian)?;
    Ok(PerturbationResult {
        data: data.clone(),
        hessian,
        takagi,
        eps_prime,
    })
}

impl PerturbationResult {
    fn centered(&self, z: &[C64]) -> Vec<C64> {
        z.iter().zip(&self.data.center).map(|(a, b)| a - b).collect()
    }

    /// `H(z) = ½ uᵀAu`.
    pub fn model(&self, z: &[C64]) -> C64 {
        quadratic(&self.hessian, &self.centered(z))
    }

    /// `dH = (Au)·dz`.
    pub fn model_form(&self, z: &[C64]) -> Covector {
        let u = self.centered(z);
        Covector::new(mat_vec(&self.hessian, &u), vec![C64::new(0.0, 0.0); u.len()])
    }

    /// `α̂ = h̃·d((1−β)f + βH)` with `h̃ = β + (1−β)h`: the input `h·df`
    /// beyond `3c/2`, the model `dH` inside `c`.
    pub fn alpha_hat(&self, z: &[C64]) -> Covector {
        let c = self.data.c;
        let r = dist(z, &self.data.center);
        if r >= 1.5 * c {
            return self.data.alpha(z);
        }
        if r <= c {
            return self.model_form(z);
        }
        let u = self.centered(z);
        let beta = bump(c, r);
        let dbeta = bump_derivative(c, r);
        let h_tilde = self.data.h(z) * (1.0 - beta) + beta;
        let gap = self.model(z) - self.data.f(z);
        let dr = Covector::new(
            u.iter().map(|x| x.conj() / (2.0 * r)).collect(),
            u.iter().map(|x| x / (2.0 * r)).collect(),
        );
        self.data
            .df(z)
            .scale(C64::new(1.0 - beta, 0.0))
            .add(&self.model_form(z).scale(C64::new(beta, 0.0)))
            .add(&dr.scale(gap * dbeta))
            .scale(h_tilde)
    }

    /// Takagi coordinates `w` of `z`.
    pub fn normal_coordinates(&self, z: &[C64]) -> Vec<C64> {
        self.takagi.coordinate_map(&self.centered(z))
    }
}

/// Sampled check of `|α̂₁,₀| > |α̂₀,₁|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyInequalityStats {
    pub inner_pass_fraction: f64,
    pub annulus_pass_fraction: f64,
    /// Smallest `|α̂₁,₀| − |α̂₀,₁|` over all samples.
    pub min_margin: f64,
    /// Smallest margin divided by `|z − center|`.
    pub min_relative_margin: f64,
    pub samples: usize,
    pub seed: u64,
}

impl KeyInequalityStats {
    pub fn passed(&self) -> bool {
        self.inner_pass_fraction == 1.0 && self.annulus_pass_fraction == 1.0
    }
}

/// Samples `B(c)` minus `B(10⁻³c)` and the annulus `c ≤ r ≤ 2c`, `samples`
/// points each.
pub fn verify_key_inequality(
    result: &PerturbationResult,
    frame: &SymplecticFrame,
    samples: usize,
    seed: u64,
) -> Result<KeyInequalityStats, PerturbError> {
    if samples == 0 {
        return Err(PerturbError::InvalidData("samples must be positive".into()));
    }
    let center = result.data.center.clone();
    let c = result.data.c;
    let inner = Region::shell(center.clone(), CENTER_EXCLUSION * c, c);
    let annulus = Region::shell(center.clone(), c, 2.0 * c);
    let probe = |region: &Region| -> Result<(f64, f64, f64), PerturbError> {
        let pts = sample_region(region, samples, seed)?;
        let margins: Vec<(f64, f64)> = pts
            .par_iter()
            .map(|p| {
                let (c10, c01) = split_covector(&result.alpha_hat(p), frame)?;
                let m = c10.norm() - c01.norm();
                Ok((m, m / dist(p, &center)))
            })
            .collect::<Result<_, GeometryError>>()?;
        let pass = margins.iter().filter(|(m, _)| *m > 0.0).count() as f64 / margins.len() as f64;
        let min = margins.iter().map(|m| m.0).fold(f64::INFINITY, f64::min);
        let rel = margins.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
        Ok((pass, min, rel))
    };
    let (inner_pass, inner_min, inner_rel) = probe(&inner)?;
    let (ann_pass, ann_min, ann_rel) = probe(&annulus)?;
    Ok(KeyInequalityStats {
        inner_pass_fraction: inner_pass,
        annulus_pass_fraction: ann_pass,
        min_margin: inner_min.min(ann_min),
        min_relative_margin: inner_rel.min(ann_rel),
        samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qc, qc_ratio};
    use crate::Poly;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn z(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    fn one(n: usize) -> Poly {
        Poly::one(n)
    }

    fn local(f: &Poly, noise: &Poly, kappa: f64, cc: f64) -> LocalData {
        let n = f.n_vars();
        let n = if noise.n_vars() == 2 * n { n } else { n.min(noise.n_vars()) };
        LocalData::new(vec![c(0.0, 0.0); n], cc, f, noise, kappa, &one(n)).unwrap()
    }

    #[test]
    fn hessian_examples() {
        let f = &(&(&z(2, 0) * &z(2, 0)) + &(&z(2, 1) * &z(2, 1))) + &Poly::monomial(vec![3, 0], qc(1, 0));
        let a = hessian_model(&local(&f, &Poly::zero(2), 0.0, 0.1)).unwrap();
        assert_eq!(a, DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]));

        let f = &z(2, 0) * &z(2, 1);
        let a = hessian_model(&local(&f, &Poly::zero(2), 0.0, 0.1)).unwrap();
        assert_eq!(a[(0, 1)], c(1.0, 0.0));
        assert_eq!(a[(0, 0)], c(0.0, 0.0));

        // z1^2 + 0.01 zbar1^2 in formal variables (z1, zbar1)
        let hol = Poly::monomial(vec![2, 0], qc(1, 0));
        let noise = Poly::monomial(vec![0, 2], qc(1, 0));
        let data = LocalData::new(vec![c(0.0, 0.0)], 0.1, &hol, &noise, 0.01, &one(1)).unwrap();
        assert_eq!(hessian_model(&data).unwrap()[(0, 0)], c(2.0, 0.0));
        assert!(data.notes().iter().any(|n| n.contains("excluded")));
    }

    #[test]
    fn local_data_validation() {
        let f = &z(1, 0) + &Poly::monomial(vec![2], qc(1, 0));
        let err = LocalData::new(vec![c(0.0, 0.0)], 0.1, &f, &Poly::zero(1), 0.0, &one(1));
        assert!(matches!(err, Err(PerturbError::NotCritical(_))));
        let f = &Poly::monomial(vec![2], qc(1, 0)) + &one(1);
        let err = LocalData::new(vec![c(0.0, 0.0)], 0.1, &f, &Poly::zero(1), 0.0, &one(1));
        assert!(matches!(err, Err(PerturbError::NotZeroAtCenter { .. })));
        let sq = Poly::monomial(vec![2], qc(1, 0));
        assert!(LocalData::new(vec![c(0.0, 0.0)], 0.1, &sq, &Poly::zero(1), 0.0, &z(1, 0)).is_err());
        assert!(LocalData::new(vec![c(0.0, 0.0)], -1.0, &sq, &Poly::zero(1), 0.0, &one(1)).is_err());
    }

    #[test]
    fn bump_profile() {
        let cc = 0.1;
        assert_eq!(bump(cc, cc / 2.0), 1.0);
        assert_eq!(bump(cc, cc), 1.0);
        assert_eq!(bump(cc, 2.0 * cc), 0.0);
        assert!((bump(cc, 1.25 * cc) - 0.5).abs() < 1e-12);
        let mut prev = 1.0;
        let mut k: f64 = 0.0;
        for i in 1..1000 {
            let r = cc + 0.5 * cc * i as f64 / 1000.0;
            let b = bump(cc, r);
            assert!(b <= prev);
            if (50..950).contains(&i) {
                assert!(b < prev && b > 0.0);
            }
            prev = b;
            k = k.max(bump_derivative(cc, r).abs() * cc);
            let fd = (bump(cc, r + 1e-7) - bump(cc, r - 1e-7)) / 2e-7;
            assert!((fd - bump_derivative(cc, r)).abs() < 1e-4 * (1.0 + fd.abs()));
        }
        assert!(k <= 4.0 * (1.0 + 1e-9) && k > 3.99, "K = {k}");
    }

    #[test]
    fn blend_of_pure_quadratic_is_identity() {
        let f = &(&z(2, 0) * &z(2, 0)) + &(&z(2, 0) * &z(2, 1));
        let res = blend_perturbation(&local(&f, &Poly::zero(2), 0.0, 0.1), DEFAULT_EPS_PRIME).unwrap();
        let pts = sample_region(&Region::centered_ball(2, 0.3), 200, 4).unwrap();
        for p in pts {
            let a = res.alpha_hat(&p);
            let b = res.data.alpha(&p);
            assert!(a.sub(&b).norm() < 1e-14);
        }
    }

    #[test]
    fn blend_example_cubic() {
        let f = &Poly::monomial(vec![2], qc(1, 0)) + &Poly::monomial(vec![3], qc(1, 0));
        let res = blend_perturbation(&local(&f, &Poly::zero(1), 0.0, 0.1), DEFAULT_EPS_PRIME).unwrap();
        let inside = [c(0.05, 0.02)];
        assert_eq!(res.alpha_hat(&inside).a[0], inside[0] * 2.0);
        let outside = [c(0.0, -0.25)];
        let z0 = outside[0];
        assert!((res.alpha_hat(&outside).a[0] - (z0 * 2.0 + z0 * z0 * 3.0)).norm() < 1e-15);
        let pts = sample_region(&Region::shell(vec![c(0.0, 0.0)], 0.2, 5.0), 100, 9).unwrap();
        for p in pts {
            assert_eq!(res.alpha_hat(&p), res.data.alpha(&p));
        }
    }

    #[test]
    fn blend_is_the_differential_of_the_blended_function() {
        // h = 1 so alpha_hat = d((1-beta) f + beta H); compare with differences
        let f = &(&(&z(2, 0) * &z(2, 1)) + &Poly::monomial(vec![3, 0], qc(1, 0))) + &Poly::monomial(vec![0, 2], qc(2, 0));
        let res = blend_perturbation(&local(&f, &Poly::zero(2), 0.0, 0.1), DEFAULT_EPS_PRIME).unwrap();
        let g = |p: &[C64]| {
            let b = bump(0.1, dist(p, &[c(0.0, 0.0), c(0.0, 0.0)]));
            res.data.f(p) * (1.0 - b) + res.model(p) * b
        };
        let p = [c(0.08, 0.03), c(-0.06, 0.05)];
        let a = res.alpha_hat(&p);
        let h = 1e-6;
        for k in 0..2 {
            let mut px = p;
            let mut mx = p;
            px[k] += h;
            mx[k] -= h;
            let dx = (g(&px) - g(&mx)) / (2.0 * h);
            let mut py = p;
            let mut my = p;
            py[k] += c(0.0, h);
            my[k] -= c(0.0, h);
            let dy = (g(&py) - g(&my)) / (2.0 * h);
            let dz = (dx - c(0.0, 1.0) * dy) * 0.5;
            let dzbar = (dx + c(0.0, 1.0) * dy) * 0.5;
            assert!((dz - a.a[k]).norm() < 1e-7, "{dz} vs {}", a.a[k]);
            assert!((dzbar - a.b[k]).norm() < 1e-7);
        }
    }

    #[test]
    fn degenerate_hessian_refused() {
        let f = Poly::monomial(vec![3], qc(1, 0));
        let err = blend_perturbation(&local(&f, &Poly::zero(1), 0.0, 0.1), DEFAULT_EPS_PRIME);
        assert!(matches!(err, Err(PerturbError::Degenerate { .. })));
    }

    #[test]
    fn key_inequality_examples() {
        let frame = SymplecticFrame::standard(2);
        let half = qc_ratio((1, 2), (0, 1));
        let f = (&(&z(2, 0) * &z(2, 0)) + &(&z(2, 1) * &z(2, 1))).scale(&half);
        let res = blend_perturbation(&local(&f, &Poly::zero(2), 0.0, 0.1), DEFAULT_EPS_PRIME).unwrap();
        let s = verify_key_inequality(&res, &frame, 2000, 3).unwrap();
        assert!(s.passed());

        let noise = Poly::monomial(vec![0, 0, 2, 0], qc(1, 0));
        let f4 = lift(&f).unwrap();
        let data = LocalData::new(vec![c(0.0, 0.0); 2], 0.1, &f4, &noise, 0.01, &one(2)).unwrap();
        let res = blend_perturbation(&data, DEFAULT_EPS_PRIME).unwrap();
        let s = verify_key_inequality(&res, &frame, 2000, 3).unwrap();
        assert!(s.passed());
        assert!(s.min_relative_margin >= DEFAULT_EPS_PRIME / 2.0);

        // weak direction sigma_min = 1e-3 and strong noise
        let weak = &Poly::monomial(vec![2, 0], qc_ratio((1, 2), (0, 1))) + &Poly::monomial(vec![0, 2], qc_ratio((1, 2000), (0, 1)));
        let weak = lift(&weak).unwrap();
        let noise = Poly::monomial(vec![0, 0, 0, 2], qc(1, 0));
        let data = LocalData::new(vec![c(0.0, 0.0); 2], 0.1, &weak, &noise, 0.1, &one(2)).unwrap();
        let res = blend_perturbation(&data, 0.5e-3).unwrap();
        let s = verify_key_inequality(&res, &frame, 2000, 3).unwrap();
        assert!(s.annulus_pass_fraction < 1.0);
        assert!(!s.passed());
    }

    #[test]
    fn takagi_examples() {
        let a = DMatrix::from_element(1, 1, c(4.0, 0.0));
        let t = takagi_reduce(&a).unwrap();
        assert!((t.sigma[0] - 4.0).abs() < 1e-12);
        let w = t.coordinate_map(&[c(0.3, 0.1)]);
        assert!((w[0] * w[0] - c(0.3, 0.1) * c(0.3, 0.1) * 4.0).norm() < 1e-12);

        let swap = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let t = takagi_reduce(&swap).unwrap();
        assert!(t.sigma.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert!((t.reconstruct() - &swap).norm() < 1e-9);

        let zero_block = DMatrix::from_row_slice(2, 2, &[c(0.0, 2.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let t = takagi_reduce(&zero_block).unwrap();
        assert_eq!(t.sigma[1], 0.0);
        assert!((t.reconstruct() - &zero_block).norm() < 1e-12);
        let uu = t.u.adjoint() * &t.u;
        assert!((uu - DMatrix::identity(2, 2)).norm() < 1e-12);

        let asym = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(takagi_reduce(&asym).is_err());
    }

    #[test]
    fn takagi_generic_in_f32() {
        let a = DMatrix::from_row_slice(2, 2, &[
            Complex::new(1.0f32, 0.5),
            Complex::new(0.2, 0.0),
            Complex::new(0.2, 0.0),
            Complex::new(-0.3, 1.0),
        ]);
        let t = takagi_reduce(&a).unwrap();
        assert!((t.reconstruct() - &a).norm() < 1e-5);
    }
}
