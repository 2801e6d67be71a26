//! Exterior calculus on polynomial differential forms over `ℂⁿ`.
//!
//! A form of degree `r` is a sum of `coeff · e_{i₁} ∧ ⋯ ∧ e_{i_r}` with
//! strictly increasing basis indices. Basis symbol `i < n` is `dz_{i+1}`,
//! symbol `n + i` is `dz̄_{i+1}`, so the canonical order is
//! `dz₁ < ⋯ < dzₙ < dz̄₁ < ⋯ < dz̄ₙ`.
//!
//! Coefficients are polynomials in the `2n` formal variables
//! `(z₁, …, zₙ, z̄₁, …, z̄ₙ)`. Variable index `v` and basis symbol `v` line up,
//! which makes `d = ∂ + ∂̄` a single loop over variables.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex;
use thiserror::Error;

use crate::polycore::{PolyError, SparsePoly};
use crate::scalar::{cabs, Coefficient, Real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("degree {degree} exceeds 2n = {max}")]
    DegreeOverflow { degree: usize, max: usize },
    #[error("expected a 1-form, got degree {0}")]
    NotOneForm(usize),
    #[error("coefficients are not homogeneous of a common degree")]
    NonHomogeneous,
    #[error("form has dz̄ terms or z̄-dependent coefficients")]
    Antiholomorphic,
    #[error("map has {got} components, form lives on {expected} variables")]
    ArityMismatch { expected: usize, got: usize },
    #[error("invalid basis label {0:?}")]
    BadBasis(String),
    #[error("basis index sequence is not strictly increasing or out of range")]
    BadMultiIndex,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A polynomial differential form on `ℂⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Form<R> {
    n: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, SparsePoly<R>>,
}

/// Value of a 1-form at a point: `Σ aᵢ dzᵢ + bᵢ dz̄ᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector<T> {
    pub a: Vec<Complex<T>>,
    pub b: Vec<Complex<T>>,
}

impl<T: Real> Covector<T> {
    pub fn zero(n: usize) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self {
            a: vec![z; n],
            b: vec![z; n],
        }
    }

    pub fn new(a: Vec<Complex<T>>, b: Vec<Complex<T>>) -> Self {
        assert_eq!(a.len(), b.len(), "covector halves differ in length");
        Self { a, b }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Hermitian norm of the coefficient vector `(a, b)`.
    pub fn norm(&self) -> T {
        self.a
            .iter()
            .chain(&self.b)
            .map(|z| z.re * z.re + z.im * z.im)
            .fold(T::zero(), |s, x| s + x)
            .sqrt()
    }

    pub fn norm_a(&self) -> T {
        self.a.iter().map(|&z| cabs(z) * cabs(z)).fold(T::zero(), |s, x| s + x).sqrt()
    }

    pub fn norm_b(&self) -> T {
        self.b.iter().map(|&z| cabs(z) * cabs(z)).fold(T::zero(), |s, x| s + x).sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
            b: self.b.iter().zip(&other.b).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            a: self.a.iter().zip(&other.a).map(|(x, y)| x - y).collect(),
            b: self.b.iter().zip(&other.b).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            a: self.a.iter().map(|x| x * s).collect(),
            b: self.b.iter().map(|x| x * s).collect(),
        }
    }

    /// The covector as a real-linear map `ℝ²ⁿ → ℂ`, written as a complex row
    /// in real coordinates `(x₁, …, xₙ, y₁, …, yₙ)` with `zᵢ = xᵢ + i yᵢ`.
    pub fn to_real_row(&self) -> Vec<Complex<T>> {
        let n = self.dim();
        let i = Complex::new(T::zero(), T::one());
        let mut row = Vec::with_capacity(2 * n);
        for k in 0..n {
            row.push(self.a[k] + self.b[k]);
        }
        for k in 0..n {
            row.push((self.a[k] - self.b[k]) * i);
        }
        row
    }

    /// Inverse of [`to_real_row`](Self::to_real_row).
    pub fn from_real_row(row: &[Complex<T>]) -> Self {
        assert!(row.len().is_multiple_of(2), "real row must have even length");
        let n = row.len() / 2;
        let i = Complex::new(T::zero(), T::one());
        let half: T = nalgebra::convert(0.5);
        let a = (0..n).map(|k| (row[k] - row[n + k] * i) * half).collect();
        let b = (0..n).map(|k| (row[k] + row[n + k] * i) * half).collect();
        Self { a, b }
    }
}

/// Label of basis symbol `idx` for complex dimension `n`: `dz1`, `dzbar2`, ...
pub fn basis_label(n: usize, idx: usize) -> String {
    if idx < n {
        format!("dz{}", idx + 1)
    } else {
        format!("dzbar{}", idx - n + 1)
    }
}

/// Parses a basis label produced by [`basis_label`].
pub fn parse_basis_label(n: usize, s: &str) -> Result<usize, FormError> {
    let bad = || FormError::BadBasis(s.to_string());
    let (offset, digits) = if let Some(d) = s.strip_prefix("dzbar") {
        (n, d)
    } else if let Some(d) = s.strip_prefix("dz") {
        (0, d)
    } else {
        return Err(bad());
    };
    let k: usize = digits.parse().map_err(|_| bad())?;
    if k == 0 || k > n {
        return Err(bad());
    }
    Ok(offset + k - 1)
}

/// Sign of sorting the concatenation `i ++ k` of two sorted disjoint lists.
fn merge_sign(i: &[usize], k: &[usize]) -> i64 {
    let mut inversions = 0usize;
    for &x in i {
        inversions += k.iter().filter(|&&y| y < x).count();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl<R: Coefficient> Form<R> {
    pub fn zero(n: usize, degree: usize) -> Self {
        Self {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// 0-form from a coefficient polynomial in `2n` variables.
    pub fn function(n: usize, f: SparsePoly<R>) -> Result<Self, FormError> {
        let mut out = Self::zero(n, 0);
        out.add_term(vec![], f)?;
        Ok(out)
    }

    /// 0-form from a holomorphic polynomial in `n` variables.
    pub fn holomorphic_function(f: &SparsePoly<R>) -> Result<Self, FormError> {
        let n = f.n_vars();
        Self::function(n, lift(f)?)
    }

    /// The basis 1-form with symbol index `idx` (see module docs).
    pub fn basis(n: usize, idx: usize) -> Self {
        assert!(idx < 2 * n, "basis index out of range");
        let mut out = Self::zero(n, 1);
        out.terms.insert(vec![idx], SparsePoly::one(2 * n));
        out
    }

    pub fn dz(n: usize, i: usize) -> Self {
        Self::basis(n, i)
    }

    pub fn dzbar(n: usize, i: usize) -> Self {
        Self::basis(n, n + i)
    }

    /// Holomorphic 1-form `Σ coeffs[i] dzᵢ`, coefficients in `n` variables.
    pub fn holomorphic_one_form(coeffs: &[SparsePoly<R>]) -> Result<Self, FormError> {
        let n = coeffs.len();
        let mut out = Self::zero(n, 1);
        for (i, c) in coeffs.iter().enumerate() {
            if c.n_vars() != n {
                return Err(FormError::DimensionMismatch {
                    left: n,
                    right: c.n_vars(),
                });
            }
            out.add_term(vec![i], lift(c)?)?;
        }
        Ok(out)
    }

    /// Builds a form from `(multi-index, coefficient)` pairs; coefficients are
    /// polynomials in `2n` variables.
    pub fn from_terms<I>(n: usize, degree: usize, terms: I) -> Result<Self, FormError>
    where
        I: IntoIterator<Item = (Vec<usize>, SparsePoly<R>)>,
    {
        if degree > 2 * n {
            return Err(FormError::DegreeOverflow { degree, max: 2 * n });
        }
        let mut out = Self::zero(n, degree);
        for (idx, c) in terms {
            if idx.len() != degree
                || idx.windows(2).any(|w| w[0] >= w[1])
                || idx.iter().any(|&k| k >= 2 * n)
            {
                return Err(FormError::BadMultiIndex);
            }
            if c.n_vars() != 2 * n {
                return Err(FormError::DimensionMismatch {
                    left: 2 * n,
                    right: c.n_vars(),
                });
            }
            out.add_term(idx, c)?;
        }
        Ok(out)
    }

    fn add_term(&mut self, idx: Vec<usize>, c: SparsePoly<R>) -> Result<(), FormError> {
        if c.is_zero() {
            return Ok(());
        }
        let sum = match self.terms.remove(&idx) {
            Some(prev) => prev.checked_add(&c)?,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(idx, sum);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &SparsePoly<R>)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the basis element `idx` (zero if absent).
    pub fn coeff(&self, idx: &[usize]) -> SparsePoly<R> {
        self.terms
            .get(idx)
            .cloned()
            .unwrap_or_else(|| SparsePoly::zero(2 * self.n))
    }

    /// No `dz̄` symbols and no `z̄` dependence in any coefficient.
    pub fn is_holomorphic(&self) -> bool {
        let n = self.n;
        self.terms
            .iter()
            .all(|(idx, c)| idx.iter().all(|&k| k < n) && (n..2 * n).all(|v| !c.depends_on(v)))
    }

    pub fn has_antiholomorphic_basis(&self) -> bool {
        self.terms.keys().any(|idx| idx.iter().any(|&k| k >= self.n))
    }

    fn check_dims(&self, other: &Self) -> Result<(), FormError> {
        if self.n != other.n {
            return Err(FormError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FormError> {
        self.check_dims(other)?;
        if self.degree != other.degree {
            return Err(FormError::DimensionMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FormError> {
        self.checked_add(&other.scale(&-R::one()))
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut out = Self::zero(self.n, self.degree);
        for (idx, p) in &self.terms {
            let q = p.scale(c);
            if !q.is_zero() {
                out.terms.insert(idx.clone(), q);
            }
        }
        out
    }

    /// Multiplies every coefficient by a function (polynomial in `2n` vars).
    pub fn mul_function(&self, f: &SparsePoly<R>) -> Result<Self, FormError> {
        let mut out = Self::zero(self.n, self.degree);
        for (idx, p) in &self.terms {
            out.add_term(idx.clone(), p.checked_mul(f)?)?;
        }
        Ok(out)
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self, FormError> {
        self.check_dims(other)?;
        let degree = self.degree + other.degree;
        if degree > 2 * self.n {
            return Err(FormError::DegreeOverflow {
                degree,
                max: 2 * self.n,
            });
        }
        let mut out = Self::zero(self.n, degree);
        for (i, p) in &self.terms {
            for (k, q) in &other.terms {
                if i.iter().any(|x| k.contains(x)) {
                    continue;
                }
                let sign = merge_sign(i, k);
                let mut idx: Vec<usize> = i.iter().chain(k).copied().collect();
                idx.sort_unstable();
                let c = p.checked_mul(q)?.scale(&R::from_int(sign));
                out.add_term(idx, c)?;
            }
        }
        Ok(out)
    }

    /// Exterior derivative `d = ∂ + ∂̄`, differentiating in both `z` and `z̄`.
    pub fn exterior_derivative(&self) -> Result<Self, FormError> {
        let nv = 2 * self.n;
        if self.degree >= nv {
            return Ok(Self::zero(self.n, self.degree + 1));
        }
        let mut out = Self::zero(self.n, self.degree + 1);
        for (idx, p) in &self.terms {
            for v in 0..nv {
                if idx.contains(&v) || !p.depends_on(v) {
                    continue;
                }
                let dp = p.differentiate(v)?;
                let before = idx.iter().filter(|&&k| k < v).count();
                let sign = if before % 2 == 0 { 1 } else { -1 };
                let mut new_idx = idx.clone();
                new_idx.insert(before, v);
                out.add_term(new_idx, dp.scale(&R::from_int(sign)))?;
            }
        }
        Ok(out)
    }

    /// Pulls the form back along a holomorphic map `F : ℂᵐ → ℂⁿ` whose
    /// components are polynomials in `m` variables.
    pub fn pullback(&self, map: &[SparsePoly<R>]) -> Result<Self, FormError> {
        if map.len() != self.n {
            return Err(FormError::ArityMismatch {
                expected: self.n,
                got: map.len(),
            });
        }
        let m = map[0].n_vars();
        if let Some(bad) = map.iter().find(|f| f.n_vars() != m) {
            return Err(FormError::DimensionMismatch {
                left: m,
                right: bad.n_vars(),
            });
        }
        let lifted: Vec<SparsePoly<R>> = map.iter().map(lift).collect::<Result<_, _>>()?;
        let formal: Vec<SparsePoly<R>> = lifted.iter().map(|f| f.conjugate_formal()).collect();
        self.pullback_formal(m, &lifted, &formal)
    }

    /// Pullback along a general polynomial map in formal variables: `zs[j]`
    /// and `zbars[j]` are the images of `z_j` and `z̄_j`, each a polynomial in
    /// the `2m` source variables.
    pub fn pullback_formal(
        &self,
        m: usize,
        zs: &[SparsePoly<R>],
        zbars: &[SparsePoly<R>],
    ) -> Result<Self, FormError> {
        if zs.len() != self.n || zbars.len() != self.n {
            return Err(FormError::ArityMismatch {
                expected: self.n,
                got: zs.len().min(zbars.len()),
            });
        }
        let subs: Vec<SparsePoly<R>> = zs.iter().chain(zbars).cloned().collect();
        // pulled-back basis 1-forms, dz_j then dzbar_j
        let mut basis_images = Vec::with_capacity(2 * self.n);
        for s in &subs {
            basis_images.push(Form::function(m, s.clone())?.exterior_derivative()?);
        }
        let mut out = Self::zero(m, self.degree);
        for (idx, p) in &self.terms {
            let mut acc = Form::function(m, p.compose(&subs)?)?;
            for &k in idx {
                acc = acc.wedge(&basis_images[k])?;
            }
            out = out.checked_add(&acc)?;
        }
        Ok(out)
    }

    /// Value of a 1-form at `p` (z̄-variables evaluated at `p̄`).
    pub fn eval_form<T: Real>(&self, p: &[Complex<T>]) -> Result<Covector<T>, FormError> {
        if self.degree != 1 {
            return Err(FormError::NotOneForm(self.degree));
        }
        let full = self.point_with_conjugates(p)?;
        let mut cv = Covector::zero(self.n);
        for (idx, c) in &self.terms {
            let v = c.evaluate(&full)?;
            let k = idx[0];
            if k < self.n {
                cv.a[k] = v;
            } else {
                cv.b[k - self.n] = v;
            }
        }
        Ok(cv)
    }

    /// Value of a 2-form at `p` as the antisymmetric `2n × 2n` matrix of its
    /// coefficients in the `(dz, dz̄)` basis.
    pub fn eval_two_form<T: Real>(&self, p: &[Complex<T>]) -> Result<DMatrix<Complex<T>>, FormError> {
        if self.degree != 2 {
            return Err(FormError::DimensionMismatch {
                left: 2,
                right: self.degree,
            });
        }
        let full = self.point_with_conjugates(p)?;
        let nv = 2 * self.n;
        let mut m = DMatrix::from_element(nv, nv, Complex::new(T::zero(), T::zero()));
        for (idx, c) in &self.terms {
            let v = c.evaluate(&full)?;
            m[(idx[0], idx[1])] = v;
            m[(idx[1], idx[0])] = -v;
        }
        Ok(m)
    }

    fn point_with_conjugates<T: Real>(&self, p: &[Complex<T>]) -> Result<Vec<Complex<T>>, FormError> {
        if p.len() != self.n {
            return Err(FormError::DimensionMismatch {
                left: self.n,
                right: p.len(),
            });
        }
        Ok(p.iter().copied().chain(p.iter().map(|z| z.conj())).collect())
    }

    /// Euler contraction `Σ zᵢ Aᵢ` of a holomorphic 1-form `Σ Aᵢ dzᵢ` whose
    /// coefficients are homogeneous of one common degree. Returns a
    /// polynomial in the `n` holomorphic variables.
    pub fn radial_contraction(&self) -> Result<SparsePoly<R>, FormError> {
        if self.degree != 1 {
            return Err(FormError::NotOneForm(self.degree));
        }
        if !self.is_holomorphic() {
            return Err(FormError::Antiholomorphic);
        }
        let mut common = None;
        for c in self.terms.values() {
            let d = c.homogeneous_degree().ok_or(FormError::NonHomogeneous)?;
            if *common.get_or_insert(d) != d {
                return Err(FormError::NonHomogeneous);
            }
        }
        let n = self.n;
        let mut out = SparsePoly::zero(n);
        for (idx, c) in &self.terms {
            let a = restrict_holomorphic(c).ok_or(FormError::Antiholomorphic)?;
            out = out.checked_add(&SparsePoly::var(n, idx[0]).checked_mul(&a)?)?;
        }
        Ok(out)
    }
}

/// Lifts a polynomial in `n` variables to the `2n`-variable `(z, z̄)` ring.
pub fn lift<R: Coefficient>(f: &SparsePoly<R>) -> Result<SparsePoly<R>, PolyError> {
    f.embed(2 * f.n_vars(), 0)
}

/// Drops the `z̄` block of a `2n`-variable polynomial, if it does not depend
/// on it.
pub fn restrict_holomorphic<R: Coefficient>(f: &SparsePoly<R>) -> Option<SparsePoly<R>> {
    let nv = f.n_vars();
    if !nv.is_multiple_of(2) {
        return None;
    }
    let n = nv / 2;
    if (n..nv).any(|v| f.depends_on(v)) {
        return None;
    }
    let terms = f.terms().map(|(e, c)| (e[..n].to_vec(), c.clone()));
    SparsePoly::from_terms(n, terms).ok()
}
