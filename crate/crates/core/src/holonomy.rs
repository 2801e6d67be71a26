//! SU(2) representations acting on `ℂP¹` and holonomy of twisted pencils.
//!
//! Words are lists of `(generator, ±1)`. A word `g₁g₂…gₖ` maps to
//! `ρ(g₁)ρ(g₂)…ρ(gₖ)`, so the last letter acts first on `λ`:
//! `H(w₁w₂)(λ) = H(w₁)(H(w₂)(λ))`.

use std::collections::BTreeMap;

use nalgebra::Matrix2;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{cabs, lit, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HolonomyError {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("image of {name:?} is not in SU(2) (residual {residual:e})")]
    NotSpecialUnitary { name: String, residual: f64 },
    #[error("relation {index} does not map to ±I (residual {residual:e})")]
    RelationViolated { index: usize, residual: f64 },
    #[error("point of CP1 needs a nonzero homogeneous pair")]
    ZeroPair,
    #[error("pencil undefined on the base locus z1 = z2 = 0")]
    BaseLocus,
    #[error("exponent must be +1 or -1, got {0}")]
    BadExponent(i32),
    #[error("word sample must be nonempty")]
    EmptySample,
}

/// A word in the generators, letters `(name, ±1)`.
pub type Word = Vec<(String, i32)>;

fn to_f64<T: Real>(x: T) -> f64 {
    nalgebra::try_convert(x).unwrap_or(f64::NAN)
}

/// `‖UU* − I‖` and `|det U − 1|`, the larger of the two.
pub fn su2_residual<T: Real>(m: &Matrix2<Complex<T>>) -> T {
    let unit = (m * m.adjoint() - Matrix2::identity()).norm();
    let det = cabs(m.determinant() - Complex::new(T::one(), T::zero()));
    unit.max(det)
}

/// `[[a, −b̄], [b, ā]]` with `|a|² + |b|² = 1`.
pub fn su2<T: Real>(a: Complex<T>, b: Complex<T>) -> Matrix2<Complex<T>> {
    Matrix2::new(a, -b.conj(), b, a.conj())
}

/// `diag(e^{iθ}, e^{−iθ})`.
pub fn su2_diagonal<T: Real>(theta: T) -> Matrix2<Complex<T>> {
    let e = Complex::new(theta.cos(), theta.sin());
    Matrix2::new(e, Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()), e.conj())
}

/// `ρ` on a finitely presented group.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation<T: Real> {
    images: BTreeMap<String, Matrix2<Complex<T>>>,
    relations: Vec<Word>,
}

impl<T: Real> Representation<T> {
    /// Checks each image is in SU(2) to `1e−12` and each relation maps to
    /// `±I` to `1e−9`.
    pub fn new(
        images: impl IntoIterator<Item = (String, Matrix2<Complex<T>>)>,
        relations: Vec<Word>,
    ) -> Result<Self, HolonomyError> {
        let images: BTreeMap<_, _> = images.into_iter().collect();
        for (name, m) in &images {
            let residual = su2_residual(m);
            if residual > lit(1e-12) {
                return Err(HolonomyError::NotSpecialUnitary {
                    name: name.clone(),
                    residual: to_f64(residual),
                });
            }
        }
        let rho = Self { images, relations };
        for (index, r) in rho.relations.iter().enumerate() {
            let residual = central_residual(&rho.word_matrix(r)?);
            if residual > lit(1e-9) {
                return Err(HolonomyError::RelationViolated {
                    index,
                    residual: to_f64(residual),
                });
            }
        }
        Ok(rho)
    }

    /// Every generator sent to the identity.
    pub fn trivial(generators: &[&str]) -> Self {
        Self {
            images: generators.iter().map(|g| (g.to_string(), Matrix2::identity())).collect(),
            relations: Vec::new(),
        }
    }

    pub fn generators(&self) -> impl Iterator<Item = &str> {
        self.images.keys().map(String::as_str)
    }

    pub fn image(&self, g: &str) -> Option<&Matrix2<Complex<T>>> {
        self.images.get(g)
    }

    pub fn relations(&self) -> &[Word] {
        &self.relations
    }

    /// `ρ(g₁)^{e₁} ⋯ ρ(gₖ)^{eₖ}`; inverses are adjoints.
    pub fn word_matrix(&self, word: &[(String, i32)]) -> Result<Matrix2<Complex<T>>, HolonomyError> {
        let mut m = Matrix2::identity();
        for (g, e) in word {
            let img = self
                .images
                .get(g)
                .ok_or_else(|| HolonomyError::UnknownGenerator(g.clone()))?;
            m *= match e {
                1 => *img,
                -1 => img.adjoint(),
                other => return Err(HolonomyError::BadExponent(*other)),
            };
        }
        Ok(m)
    }
}

/// Distance of an SU(2) matrix from the centre `{±I}`.
fn central_residual<T: Real>(m: &Matrix2<Complex<T>>) -> T {
    let id = Matrix2::<Complex<T>>::identity();
    (m - id).norm().min((m + id).norm())
}

/// Point of `ℂP¹` as a unit homogeneous pair `(z₁, z₂)`; affine chart
/// `λ = z₂/z₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PencilParameter<T: Real> {
    pub z1: Complex<T>,
    pub z2: Complex<T>,
}

impl<T: Real> PencilParameter<T> {
    pub fn new(z1: Complex<T>, z2: Complex<T>) -> Result<Self, HolonomyError> {
        let norm = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
        if !(norm > T::zero()) {
            return Err(HolonomyError::ZeroPair);
        }
        Ok(Self {
            z1: z1 / norm,
            z2: z2 / norm,
        })
    }

    /// `[1 : λ]`.
    pub fn affine(lambda: Complex<T>) -> Self {
        Self::new(Complex::new(T::one(), T::zero()), lambda).expect("nonzero")
    }

    pub fn infinity() -> Self {
        Self {
            z1: Complex::new(T::zero(), T::zero()),
            z2: Complex::new(T::one(), T::zero()),
        }
    }

    /// `z₂/z₁`, or `None` at `λ = ∞`.
    pub fn lambda(&self) -> Option<Complex<T>> {
        (self.z1.norm_sqr() > T::zero()).then(|| self.z2 / self.z1)
    }

    /// Möbius action of the projectivized matrix.
    pub fn act(&self, m: &Matrix2<Complex<T>>) -> Self {
        let z1 = m[(0, 0)] * self.z1 + m[(0, 1)] * self.z2;
        let z2 = m[(1, 0)] * self.z1 + m[(1, 1)] * self.z2;
        Self::new(z1, z2).expect("invertible action")
    }

    /// Chordal (Fubini–Study) distance `√(1 − |⟨u, v⟩|²)`, computed as
    /// `|u₁v₂ − u₂v₁|` to keep precision near 0.
    pub fn chordal_distance(&self, other: &Self) -> T {
        cabs(self.z1 * other.z2 - self.z2 * other.z1)
    }
}

/// `H(word)(λ)`.
pub fn holonomy_eval<T: Real>(
    rho: &Representation<T>,
    word: &[(String, i32)],
    lam: &PencilParameter<T>,
) -> Result<PencilParameter<T>, HolonomyError> {
    Ok(lam.act(&rho.word_matrix(word)?))
}

/// Outcome of [`pu2_triviality`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pu2Verdict {
    pub trivial_in_pu2: bool,
    pub witness: Option<Word>,
    pub max_residual: f64,
}

/// Whether every sampled word maps to `±I` (to `1e−9`).
pub fn pu2_triviality<T: Real>(rho: &Representation<T>, words: &[Word]) -> Result<Pu2Verdict, HolonomyError> {
    if words.is_empty() {
        return Err(HolonomyError::EmptySample);
    }
    let mut max_residual = 0.0f64;
    for w in words {
        let r = to_f64(central_residual(&rho.word_matrix(w)?));
        max_residual = max_residual.max(r);
        if r > 1e-9 {
            return Ok(Pu2Verdict {
                trivial_in_pu2: false,
                witness: Some(w.clone()),
                max_residual,
            });
        }
    }
    Ok(Pu2Verdict {
        trivial_in_pu2: true,
        witness: None,
        max_residual,
    })
}

/// Value at `p` of the pencil twisted by `ψ`: the class of `ψ(p)·(p₁, p₂)`.
pub fn twist_local_pencil<T: Real, F>(psi: F, p: &[Complex<T>]) -> Result<PencilParameter<T>, HolonomyError>
where
    F: Fn(&[Complex<T>]) -> Matrix2<Complex<T>>,
{
    if p.len() < 2 || (p[0].norm_sqr() + p[1].norm_sqr()) == T::zero() {
        return Err(HolonomyError::BaseLocus);
    }
    let m = psi(p);
    let residual = su2_residual(&m);
    if residual > lit(1e-9) {
        return Err(HolonomyError::NotSpecialUnitary {
            name: "psi(p)".into(),
            residual: to_f64(residual),
        });
    }
    Ok(PencilParameter::new(p[0], p[1])?.act(&m))
}

/// Inverse word.
pub fn invert_word(word: &[(String, i32)]) -> Word {
    word.iter().rev().map(|(g, e)| (g.clone(), -e)).collect()
}

/// Parses space-separated letters such as `"a b^-1 c"`.
pub fn parse_word(s: &str) -> Result<Word, HolonomyError> {
    s.split_whitespace()
        .map(|tok| match tok.split_once('^') {
            None => Ok((tok.to_string(), 1)),
            Some((g, e)) => match e {
                "1" | "+1" => Ok((g.to_string(), 1)),
                "-1" => Ok((g.to_string(), -1)),
                other => Err(HolonomyError::BadExponent(other.parse().unwrap_or(0))),
            },
        })
        .collect()
}

/// Smallest chordal distance between `λ` and `ρ(g)^k λ`, `1 ≤ k ≤ steps`.
pub fn orbit_return_distance<T: Real>(m: &Matrix2<Complex<T>>, lam: &PencilParameter<T>, steps: usize) -> T {
    let mut cur = *lam;
    let mut best = T::max_value().unwrap_or_else(T::one);
    for _ in 0..steps {
        cur = cur.act(m);
        best = best.min(lam.chordal_distance(&cur));
    }
    best
}
