//! Sparse multivariate polynomials.
//!
//! A [`SparsePoly`] maps exponent vectors to nonzero coefficients. Terms are
//! kept in a `BTreeMap`, so iteration order (and therefore serialization and
//! every derived float computation) is deterministic.
//!
//! Arithmetic is exact when the coefficient ring is exact. The `checked_*`
//! methods report variable-count mismatches and the total-degree cap; the
//! `std::ops` impls on references panic on those conditions instead.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{Coefficient, Real};

/// Default cap on total degree of any constructed polynomial.
pub const MAX_TOTAL_DEGREE: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable-count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for {n_vars} variables")]
    IndexOutOfRange { index: usize, n_vars: usize },
    #[error("point has {got} coordinates, polynomial has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exponent vector of length {got}, expected {expected}")]
    ExponentLength { expected: usize, got: usize },
    #[error("total degree {degree} exceeds cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("polynomial must have at least one variable")]
    NoVariables,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsePoly<R> {
    n_vars: usize,
    terms: BTreeMap<Vec<u32>, R>,
}

fn degree_of(exps: &[u32]) -> u32 {
    exps.iter().sum()
}

impl<R: Coefficient> SparsePoly<R> {
    pub fn zero(n_vars: usize) -> Self {
        Self {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n_vars: usize) -> Self {
        Self::constant(n_vars, R::one())
    }

    pub fn constant(n_vars: usize, c: R) -> Self {
        let mut p = Self::zero(n_vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; n_vars], c);
        }
        p
    }

    /// The coordinate function `z_var`.
    ///
    /// Panics if `var >= n_vars`.
    pub fn var(n_vars: usize, var: usize) -> Self {
        assert!(var < n_vars, "variable {var} out of range for {n_vars}");
        let mut e = vec![0; n_vars];
        e[var] = 1;
        Self::monomial(e, R::one())
    }

    /// Single term `c · z^exps`; the number of variables is `exps.len()`.
    pub fn monomial(exps: Vec<u32>, c: R) -> Self {
        let mut p = Self::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Builds a polynomial from raw terms, summing duplicates and dropping
    /// zeros. Fails on ragged exponent vectors or when the degree cap is
    /// exceeded.
    pub fn from_terms<I>(n_vars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, R)>,
    {
        if n_vars == 0 {
            return Err(PolyError::NoVariables);
        }
        let mut p = Self::zero(n_vars);
        for (e, c) in terms {
            if e.len() != n_vars {
                return Err(PolyError::ExponentLength {
                    expected: n_vars,
                    got: e.len(),
                });
            }
            let d = degree_of(&e);
            if d > MAX_TOTAL_DEGREE {
                return Err(PolyError::DegreeCap {
                    degree: d,
                    cap: MAX_TOTAL_DEGREE,
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &R)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `z^exps`, zero if absent.
    pub fn coeff(&self, exps: &[u32]) -> R {
        self.terms.get(exps).cloned().unwrap_or_else(R::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| degree_of(e)).max()
    }

    /// Common degree of all terms, if the polynomial is homogeneous and
    /// nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|e| degree_of(e));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// The zero polynomial counts as homogeneous.
    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// Whether any term has a positive exponent in `var`.
    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e.get(var).is_some_and(|&k| k > 0))
    }

    fn check_same(&self, other: &Self) -> Result<(), PolyError> {
        if self.n_vars != other.n_vars {
            return Err(PolyError::VarCountMismatch {
                left: self.n_vars,
                right: other.n_vars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same(other)?;
        if let (Some(a), Some(b)) = (self.total_degree(), other.total_degree()) {
            if a + b > MAX_TOTAL_DEGREE {
                return Err(PolyError::DegreeCap {
                    degree: a + b,
                    cap: MAX_TOTAL_DEGREE,
                });
            }
        }
        let mut out = Self::zero(self.n_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &R) -> Self {
        if c.is_zero() {
            return Self::zero(self.n_vars);
        }
        let mut out = Self::zero(self.n_vars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn checked_pow(&self, k: u32) -> Result<Self, PolyError> {
        let mut acc = Self::one(self.n_vars);
        for _ in 0..k {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn differentiate(&self, var: usize) -> Result<Self, PolyError> {
        if var >= self.n_vars {
            return Err(PolyError::IndexOutOfRange {
                index: var,
                n_vars: self.n_vars,
            });
        }
        let mut out = Self::zero(self.n_vars);
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c.clone() * R::from_int(k as i64));
        }
        Ok(out)
    }

    /// Floating evaluation at a complex point.
    pub fn evaluate<T: Real>(&self, p: &[Complex<T>]) -> Result<Complex<T>, PolyError> {
        if p.len() != self.n_vars {
            return Err(PolyError::DimensionMismatch {
                expected: self.n_vars,
                got: p.len(),
            });
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for (e, c) in &self.terms {
            let mut t: Complex<T> = c.to_complex();
            for (z, &k) in p.iter().zip(e) {
                if k > 0 {
                    t *= z.powu(k);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Exact evaluation in the coefficient ring.
    pub fn evaluate_exact(&self, p: &[R]) -> Result<R, PolyError> {
        if p.len() != self.n_vars {
            return Err(PolyError::DimensionMismatch {
                expected: self.n_vars,
                got: p.len(),
            });
        }
        let mut acc = R::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (z, &k) in p.iter().zip(e) {
                for _ in 0..k {
                    t = t * z.clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Converts coefficients into another ring.
    pub fn map_coefficients<S: Coefficient>(&self, f: impl Fn(&R) -> S) -> SparsePoly<S> {
        let mut out = SparsePoly::zero(self.n_vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Float copy of this polynomial, for fast repeated evaluation.
    pub fn to_float<T: Real>(&self) -> SparsePoly<Complex<T>>
    where
        Complex<T>: Coefficient,
    {
        self.map_coefficients(|c| c.to_complex())
    }

    /// Re-embeds into `new_n` variables, placing variable `i` at
    /// `offset + i`.
    pub fn embed(&self, new_n: usize, offset: usize) -> Result<Self, PolyError> {
        if offset + self.n_vars > new_n {
            return Err(PolyError::IndexOutOfRange {
                index: offset + self.n_vars - 1,
                n_vars: new_n,
            });
        }
        let mut out = Self::zero(new_n);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; new_n];
            e2[offset..offset + self.n_vars].copy_from_slice(e);
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Formal conjugate of a polynomial in `(z, z̄)` with `2n` variables:
    /// conjugates coefficients and swaps the `z` and `z̄` blocks.
    pub fn conjugate_formal(&self) -> Self {
        let n = self.n_vars / 2;
        let mut out = Self::zero(self.n_vars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            if self.n_vars == 2 * n {
                let (a, b) = e2.split_at_mut(n);
                a.swap_with_slice(b);
            }
            out.add_term(e2, c.conj());
        }
        out
    }

    /// Substitutes `subs[i]` for variable `i`. All substitutes must share a
    /// variable count, which becomes the result's.
    pub fn compose(&self, subs: &[Self]) -> Result<Self, PolyError> {
        if subs.len() != self.n_vars {
            return Err(PolyError::DimensionMismatch {
                expected: self.n_vars,
                got: subs.len(),
            });
        }
        let m = subs.first().map(|s| s.n_vars).ok_or(PolyError::NoVariables)?;
        for s in subs {
            if s.n_vars != m {
                return Err(PolyError::VarCountMismatch {
                    left: m,
                    right: s.n_vars,
                });
            }
        }
        // power cache per substituted variable
        let mut powers: Vec<Vec<Self>> = subs.iter().map(|s| vec![Self::one(m), s.clone()]).collect();
        let mut out = Self::zero(m);
        for (e, c) in &self.terms {
            let mut t = Self::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().checked_mul(&subs[i])?;
                    powers[i].push(next);
                }
                t = t.checked_mul(&powers[i][k as usize])?;
            }
            out = out.checked_add(&t)?;
        }
        Ok(out)
    }
}

impl<R: Coefficient> Add for &SparsePoly<R> {
    type Output = SparsePoly<R>;
    fn add(self, rhs: Self) -> SparsePoly<R> {
        self.checked_add(rhs).expect("polynomial add")
    }
}

impl<R: Coefficient> Sub for &SparsePoly<R> {
    type Output = SparsePoly<R>;
    fn sub(self, rhs: Self) -> SparsePoly<R> {
        self.checked_sub(rhs).expect("polynomial sub")
    }
}

impl<R: Coefficient> Mul for &SparsePoly<R> {
    type Output = SparsePoly<R>;
    fn mul(self, rhs: Self) -> SparsePoly<R> {
        self.checked_mul(rhs).expect("polynomial mul")
    }
}

impl<R: Coefficient> Neg for &SparsePoly<R> {
    type Output = SparsePoly<R>;
    fn neg(self) -> SparsePoly<R> {
        self.scale(&-R::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qc, QComplex};
    use crate::Poly;

    fn z(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    fn c(n: usize, v: i64) -> Poly {
        Poly::constant(n, qc(v, 0))
    }

    #[test]
    fn cancellation() {
        let a = &(&z(1, 0) * &z(1, 0)) + &c(1, 1);
        let r = &a + &c(1, -1);
        assert_eq!(r, &z(1, 0) * &z(1, 0));
        assert_eq!(r.n_terms(), 1);
    }

    #[test]
    fn difference_of_squares() {
        let a = &z(2, 0) + &z(2, 1);
        let b = &z(2, 0) - &z(2, 1);
        let expect = &(&z(2, 0) * &z(2, 0)) - &(&z(2, 1) * &z(2, 1));
        assert_eq!(&a * &b, expect);
    }

    #[test]
    fn scale_by_zero_annihilates() {
        let a = &(&z(2, 0) * &z(2, 1)) + &c(2, 7);
        assert!(a.scale(&qc(0, 0)).is_zero());
    }

    #[test]
    fn mismatched_vars_rejected() {
        assert_eq!(
            z(2, 0).checked_add(&z(3, 0)),
            Err(PolyError::VarCountMismatch { left: 2, right: 3 })
        );
        assert!(z(2, 0).checked_mul(&z(1, 0)).is_err());
    }

    #[test]
    fn power_rule() {
        let a = &(&z(2, 0) * &z(2, 0)) * &z(2, 1);
        let expect = (&z(2, 0) * &z(2, 1)).scale(&qc(2, 0));
        assert_eq!(a.differentiate(0).unwrap(), expect);
        assert!(c(2, 5).differentiate(0).unwrap().is_zero());
        let s = &(&z(2, 0) * &z(2, 0)) + &(&z(2, 1) * &z(2, 1));
        assert_eq!(s.differentiate(1).unwrap(), z(2, 1).scale(&qc(2, 0)));
        assert_eq!(
            s.differentiate(2),
            Err(PolyError::IndexOutOfRange { index: 2, n_vars: 2 })
        );
    }

    #[test]
    fn evaluation_examples() {
        let s = &(&z(2, 0) * &z(2, 0)) + &(&z(2, 1) * &z(2, 1));
        let v = s
            .evaluate(&[Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)])
            .unwrap();
        assert_eq!(v, Complex::new(0.0, 0.0));
        let v = z(1, 0).evaluate(&[Complex::new(3.0, 0.0)]).unwrap();
        assert_eq!(v, Complex::new(3.0, 0.0));
        let p = &z(2, 0) * &z(2, 1);
        assert_eq!(p.evaluate_exact(&[qc(2, 0), qc(5, 0)]).unwrap(), qc(10, 0));
        assert!(p.evaluate(&[Complex::new(1.0f64, 0.0)]).is_err());
    }

    #[test]
    fn degree_cap_enforced() {
        let big = Poly::monomial(vec![10], qc(1, 0));
        assert!(matches!(big.checked_mul(&big), Err(PolyError::DegreeCap { .. })));
        assert!(Poly::from_terms(1, [(vec![17], qc(1, 0))]).is_err());
        assert!(Poly::from_terms(2, [(vec![1], qc(1, 0))]).is_err());
    }

    #[test]
    fn homogeneity() {
        let h = &(&z(2, 0) * &z(2, 1)) + &(&z(2, 1) * &z(2, 1));
        assert_eq!(h.homogeneous_degree(), Some(2));
        let nh = &h + &z(2, 0);
        assert!(!nh.is_homogeneous());
        assert!(Poly::zero(2).is_homogeneous());
    }

    #[test]
    fn compose_and_conjugate() {
        // p(z1, z2) = z1 z2 with z1 -> u, z2 -> u^2
        let p = &z(2, 0) * &z(2, 1);
        let u = z(1, 0);
        let r = p.compose(&[u.clone(), &u * &u]).unwrap();
        assert_eq!(r, Poly::monomial(vec![3], qc(1, 0)));

        // conj(i z1 zbar2^2) in 2 complex dims = -i zbar1 z2^2
        let t: Poly = Poly::monomial(vec![1, 0, 0, 2], qc(0, 1));
        let expect: Poly = Poly::monomial(vec![0, 2, 1, 0], qc(0, -1));
        assert_eq!(t.conjugate_formal(), expect);
    }

    #[test]
    fn float_copy_matches_exact() {
        let p: Poly = Poly::from_terms(
            2,
            [(vec![2, 1], qc(3, -1)), (vec![0, 1], qc(0, 2)), (vec![0, 0], qc(-1, 0))],
        )
        .unwrap();
        let q = p.to_float::<f64>();
        let pt = [Complex::new(0.3, -0.2), Complex::new(1.1, 0.4)];
        let a = p.evaluate(&pt).unwrap();
        let b = q.evaluate(&pt).unwrap();
        assert!((a - b).norm() < 1e-14);
        let _: &SparsePoly<QComplex> = &p;
    }
}
