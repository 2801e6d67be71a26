//! Pointwise symplectic and complex linear algebra on `ℝ²ⁿ = ℂⁿ`.
//!
//! Real coordinates are ordered `(x₁, …, xₙ, y₁, …, yₙ)` with `zᵢ = xᵢ + i yᵢ`.
//! In these coordinates `ω₀ = Σ dxᵢ ∧ dyᵢ` has matrix `[[0, I], [-I, 0]]` and
//! the standard complex structure `J₀` (sending `∂x` to `∂y`) has matrix
//! `[[0, -I], [I, 0]]`, so that `g = ω₀(·, J₀·)` is the Euclidean metric.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::Covector;
use crate::linalg::{column_span, null_space, numerical_rank, orthogonal_complement, singular_values};
use crate::scalar::{lit, Real};

/// Default numerical rank threshold.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("J is not a complex structure compatible with ω (residual {0:e})")]
    NotComplexStructure(f64),
    #[error("matrix is not symplectic (residual {0:e})")]
    NotSymplectic(f64),
    #[error("zero covector")]
    ZeroCovector,
    #[error("columns are not orthonormal (residual {0:e})")]
    NotOrthonormal(f64),
}

/// The constant symplectic form `ω₀` together with a compatible complex
/// structure `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticFrame<T: Real> {
    n: usize,
    omega: DMatrix<T>,
    j: DMatrix<T>,
}

fn standard_omega<T: Real>(n: usize) -> DMatrix<T> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = T::one();
        m[(n + i, i)] = -T::one();
    }
    m
}

fn standard_j<T: Real>(n: usize) -> DMatrix<T> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(n + i, i)] = T::one();
        m[(i, n + i)] = -T::one();
    }
    m
}

fn to_f64<T: Real>(x: T) -> f64 {
    nalgebra::try_convert(x).unwrap_or(f64::NAN)
}

impl<T: Real> SymplecticFrame<T> {
    /// `(ω₀, J₀)` on `ℂⁿ`.
    pub fn standard(n: usize) -> Self {
        Self {
            n,
            omega: standard_omega(n),
            j: standard_j(n),
        }
    }

    /// `(ω₀, J)` for a given `J`, checked for `J² = -I`, `ω₀(J·, J·) = ω₀` and
    /// positivity of `g = ω₀(·, J·)` to `1e-12` (relative).
    pub fn with_complex_structure(n: usize, j: DMatrix<T>) -> Result<Self, GeometryError> {
        if j.nrows() != 2 * n || j.ncols() != 2 * n {
            return Err(GeometryError::DimensionMismatch {
                left: 2 * n,
                right: j.nrows(),
            });
        }
        let omega = standard_omega::<T>(n);
        let id = DMatrix::<T>::identity(2 * n, 2 * n);
        let scale = T::one().max(j.norm() * j.norm());
        let sq = (&j * &j + &id).norm() / scale;
        let inv = (j.transpose() * &omega * &j - &omega).norm() / scale;
        let tol = lit::<T>(1e-12);
        if sq > tol || inv > tol {
            return Err(GeometryError::NotComplexStructure(to_f64(sq.max(inv))));
        }
        let frame = Self { n, omega, j };
        let g = frame.metric();
        let asym = (&g - g.transpose()).norm() / scale;
        let min_eig = g
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(T::max_value().unwrap(), |a, b| a.min(b));
        if asym > tol || min_eig <= T::zero() {
            return Err(GeometryError::NotComplexStructure(to_f64(asym)));
        }
        Ok(frame)
    }

    /// `(ω₀, A J₀ A⁻¹)` for a symplectic matrix `A`.
    pub fn conjugated(n: usize, a: &DMatrix<T>) -> Result<Self, GeometryError> {
        let omega = standard_omega::<T>(n);
        let resid = (a.transpose() * &omega * a - &omega).norm() / T::one().max(a.norm() * a.norm());
        if resid > lit(1e-12) {
            return Err(GeometryError::NotSymplectic(to_f64(resid)));
        }
        let inv = a.clone().try_inverse().ok_or(GeometryError::NotSymplectic(f64::INFINITY))?;
        let j = a * standard_j::<T>(n) * inv;
        Self::with_complex_structure(n, j)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> &DMatrix<T> {
        &self.omega
    }

    pub fn j(&self) -> &DMatrix<T> {
        &self.j
    }

    /// Matrix of `g(u, v) = ω(u, Jv)`.
    pub fn metric(&self) -> DMatrix<T> {
        &self.omega * &self.j
    }

    pub fn is_standard(&self) -> bool {
        self.j == standard_j(self.n)
    }
}

/// Real linear subspace of `ℝ^ambient` stored as orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T: Real> {
    basis: DMatrix<T>,
}

impl<T: Real> Subspace<T> {
    /// Span of the columns of `vectors` (numerically dependent directions
    /// dropped at `1e-9`).
    pub fn span(vectors: &DMatrix<T>) -> Self {
        Self {
            basis: column_span(vectors, lit(RANK_TOL)),
        }
    }

    pub fn from_orthonormal(basis: DMatrix<T>) -> Result<Self, GeometryError> {
        let k = basis.ncols();
        let resid = (basis.transpose() * &basis - DMatrix::identity(k, k)).norm();
        if resid > lit(1e-12) {
            return Err(GeometryError::NotOrthonormal(to_f64(resid)));
        }
        Ok(Self { basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    /// Image under a linear map.
    pub fn map(&self, m: &DMatrix<T>) -> Self {
        Self::span(&(m * &self.basis))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleMode {
    /// `∠_M`: largest principal angle of `U` against `V`.
    Max,
    /// `∠_m`: transversality angle of `U` against `V`.
    MinTransversal,
}

/// Splits a covector into its `J`-complex-linear and `J`-antilinear parts:
/// `c₁₀ = ½(c − i c∘J)`, `c₀₁ = ½(c + i c∘J)`.
pub fn split_covector<T: Real>(
    c: &Covector<T>,
    frame: &SymplecticFrame<T>,
) -> Result<(Covector<T>, Covector<T>), GeometryError> {
    if c.dim() != frame.n {
        return Err(GeometryError::DimensionMismatch {
            left: c.dim(),
            right: frame.n,
        });
    }
    if frame.is_standard() {
        let zero = Covector::zero(frame.n);
        return Ok((
            Covector::new(c.a.clone(), zero.b.clone()),
            Covector::new(zero.a, c.b.clone()),
        ));
    }
    Ok(split_general(c, &frame.j))
}

/// Real-row computation of the split for an arbitrary `J`.
fn split_general<T: Real>(c: &Covector<T>, j: &DMatrix<T>) -> (Covector<T>, Covector<T>) {
    let row = c.to_real_row();
    let dim = row.len();
    let i = Complex::new(T::zero(), T::one());
    let half = lit::<T>(0.5);
    let mut c10 = Vec::with_capacity(dim);
    let mut c01 = Vec::with_capacity(dim);
    for col in 0..dim {
        let rj = (0..dim).fold(Complex::new(T::zero(), T::zero()), |s, k| s + row[k] * j[(k, col)]);
        c10.push((row[col] - i * rj) * half);
        c01.push((row[col] + i * rj) * half);
    }
    (Covector::from_real_row(&c10), Covector::from_real_row(&c01))
}

/// Result of [`kernel_symplectic_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCheck<T: Real> {
    /// `|c₀₁| < |c₁₀|`.
    pub criterion: bool,
    pub kernel_dim: usize,
    /// Rank of `ω₀` restricted to the real kernel.
    pub omega_rank: usize,
    /// Kernel is codimension two and `ω₀` is nondegenerate on it.
    pub symplectic: bool,
    pub kernel: Subspace<T>,
}

/// Real kernel of `c : ℝ²ⁿ → ℂ = ℝ²`.
pub fn real_kernel<T: Real>(c: &Covector<T>, tol: T) -> Result<Subspace<T>, GeometryError> {
    let norm = c.norm();
    if norm <= T::zero() {
        return Err(GeometryError::ZeroCovector);
    }
    let row = c.to_real_row();
    let dim = row.len();
    let mut m = DMatrix::zeros(2, dim);
    for (k, v) in row.iter().enumerate() {
        m[(0, k)] = v.re / norm;
        m[(1, k)] = v.im / norm;
    }
    Ok(Subspace {
        basis: null_space(&m, tol),
    })
}

/// Checks the sufficient condition `|c₀₁| < |c₁₀|` against a direct rank
/// computation of `ω₀` on `ker c`.
pub fn kernel_symplectic_check<T: Real>(
    c: &Covector<T>,
    frame: &SymplecticFrame<T>,
) -> Result<KernelCheck<T>, GeometryError> {
    kernel_symplectic_check_with_tol(c, frame, lit(RANK_TOL))
}

pub fn kernel_symplectic_check_with_tol<T: Real>(
    c: &Covector<T>,
    frame: &SymplecticFrame<T>,
    tol: T,
) -> Result<KernelCheck<T>, GeometryError> {
    let (c10, c01) = split_covector(c, frame)?;
    let kernel = real_kernel(c, tol)?;
    let k = kernel.basis();
    let restricted = k.transpose() * &frame.omega * k;
    let omega_rank = numerical_rank(&restricted, tol);
    let kernel_dim = kernel.dim();
    Ok(KernelCheck {
        criterion: c01.norm() < c10.norm(),
        kernel_dim,
        omega_rank,
        symplectic: kernel_dim == 2 * frame.n - 2 && omega_rank == kernel_dim,
        kernel,
    })
}

/// Angle in `[0, π/2]` between subspaces of a common ambient space.
///
/// * [`AngleMode::Max`]: `arccos` of the smallest singular value of the
///   projection of `U` onto `V` (`π/2` if `dim U > dim V`).
/// * [`AngleMode::MinTransversal`]: `arcsin` of the smallest singular value
///   of `P_{V⊥}|_U : U → V⊥`, taken over the `dim V⊥` directions of the
///   target, so it is `0` exactly when `U + V` misses part of the ambient
///   space, and `π/2` when `V` is everything.
pub fn subspace_angles<T: Real>(u: &Subspace<T>, v: &Subspace<T>, mode: AngleMode) -> Result<T, GeometryError> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(GeometryError::DimensionMismatch {
            left: u.ambient_dim(),
            right: v.ambient_dim(),
        });
    }
    let one = T::one();
    let right = T::frac_pi_2();
    match mode {
        AngleMode::Max => {
            if u.dim() == 0 {
                return Ok(T::zero());
            }
            if u.dim() > v.dim() {
                return Ok(right);
            }
            // largest principal angle; atan2 of its sine and cosine stays
            // accurate near both 0 and π/2
            let proj = v.basis.transpose() * &u.basis;
            let resid = &u.basis - &v.basis * &proj;
            let cos = singular_values(&proj).into_iter().fold(one, |a, b| a.min(b));
            let sin = singular_values(&resid).into_iter().fold(T::zero(), |a, b| a.max(b));
            Ok(sin.atan2(cos))
        }
        AngleMode::MinTransversal => {
            let perp = orthogonal_complement(&v.basis);
            let d = perp.ncols();
            if d == 0 {
                return Ok(right);
            }
            if u.dim() < d {
                return Ok(T::zero());
            }
            let m = perp.transpose() * &u.basis;
            let s = singular_values(&m).into_iter().fold(one, |a, b| a.min(b));
            Ok(s.min(one).max(T::zero()).asin())
        }
    }
}
