//! Semi-inner-product spaces induced by a positive semidefinite weight.
//!
//! A [`SemiSpace`] caches the spectral factorization `A = V diag(lambda) V*`
//! of its weight restricted to the range of `A`. Everything that follows
//! rests on the compression map
//!
//! ```text
//! T  ->  M_T = diag(lambda)^{1/2} V* T V diag(lambda)^{-1/2}
//! ```
//!
//! For `x = V diag(lambda)^{-1/2} y + n` with `n` in `N(A)` one has
//! `<Tx, x>_A = y* M_T y` and `||x||_A = ||y||`, provided `T` leaves `N(A)`
//! invariant. That condition is exactly membership in `B_A`: in finite
//! dimension `R(T*A) ⊆ R(A)` holds iff `(I - P) T* A = 0` iff
//! `A T (I - P) = 0` iff `T(N(A)) ⊆ N(A)`.
//!
//! In finite dimension the seminorm `||T||_A` is finite for every `T` (the
//! supremum runs over the range of `A` only), so the larger class `B^A`
//! coincides with all matrices and is not modelled separately.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{
    self, c, ensure_finite, ensure_square, hermitian_part, identity, norm2, CMat, CVec,
    SpectralFactorization, RANK_TOL,
};

/// Relative tolerance for the membership and structural predicates.
pub const PREDICATE_TOL: f64 = 1e-9;

/// A positive semidefinite weight with its cached factorization.
#[derive(Debug, Clone)]
pub struct SemiSpace {
    dim: usize,
    a: CMat,
    /// Orthonormal basis of `R(A)`, `dim x rank`.
    v: CMat,
    /// Orthonormal basis of `N(A)`, `dim x (dim - rank)`.
    null_basis: CMat,
    lambda: Vec<f64>,
    a_half: CMat,
    a_pinv: CMat,
    proj: CMat,
    tol: f64,
    a_norm: f64,
}

impl SemiSpace {
    /// Factorizes a PSD weight. Eigenvalues at or below `tol * lambda_max`
    /// are treated as zero; a rank-zero weight is allowed.
    pub fn new(a: &CMat, tol: f64) -> Result<Self> {
        let n = ensure_square(a)?;
        ensure_finite(a)?;
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "rank tolerance must lie in (0, 1), got {tol}"
            )));
        }
        let fact = kernel::herm_eig(a)?;
        let a_norm = fact.eigvals.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
        if let Some(&lo) = fact.eigvals.first() {
            let floor = -RANK_TOL * a_norm;
            if lo < floor {
                return Err(Error::NotPsd {
                    eigenvalue: lo,
                    tolerance: floor,
                });
            }
        }
        let cut = tol * a_norm;
        let kept: Vec<usize> = (0..n)
            .filter(|&j| a_norm > 0.0 && fact.eigvals[j] > cut)
            .collect();
        let dropped: Vec<usize> = (0..n).filter(|j| !kept.contains(j)).collect();
        let v = select_columns(&fact.eigvecs, &kept);
        let null_basis = select_columns(&fact.eigvecs, &dropped);
        let lambda: Vec<f64> = kept.iter().map(|&j| fact.eigvals[j]).collect();
        Ok(Self::assemble(
            hermitian_part(a),
            v,
            null_basis,
            lambda,
            tol,
        ))
    }

    pub fn with_default_tol(a: &CMat) -> Result<Self> {
        Self::new(a, RANK_TOL)
    }

    pub(crate) fn assemble(a: CMat, v: CMat, null_basis: CMat, lambda: Vec<f64>, tol: f64) -> Self {
        let dim = a.nrows();
        let (a_half, a_pinv, proj) = if lambda.is_empty() {
            (
                CMat::zeros(dim, dim),
                CMat::zeros(dim, dim),
                CMat::zeros(dim, dim),
            )
        } else {
            (
                spectral_fn(&v, &lambda, f64::sqrt),
                spectral_fn(&v, &lambda, f64::recip),
                spectral_fn(&v, &lambda, |_| 1.0),
            )
        };
        let a_norm = lambda.iter().fold(0.0_f64, |m, &l| m.max(l));
        Self {
            dim,
            a,
            v,
            null_basis,
            lambda,
            a_half,
            a_pinv,
            proj,
            tol,
            a_norm,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.lambda.len()
    }

    pub fn weight(&self) -> &CMat {
        &self.a
    }

    pub fn range_basis(&self) -> &CMat {
        &self.v
    }

    pub fn null_basis(&self) -> &CMat {
        &self.null_basis
    }

    /// Nonzero eigenvalues of the weight, matching the columns of
    /// [`range_basis`](Self::range_basis).
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn sqrt_weight(&self) -> &CMat {
        &self.a_half
    }

    pub fn pinv_weight(&self) -> &CMat {
        &self.a_pinv
    }

    /// Orthogonal projector onto the range of the weight.
    pub fn range_projector(&self) -> &CMat {
        &self.proj
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Spectral norm of the weight.
    pub fn weight_norm(&self) -> f64 {
        self.a_norm
    }

    fn check_vec(&self, x: &CVec) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_op(&self, t: &CMat) -> Result<()> {
        if t.nrows() != self.dim || t.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: if t.nrows() != self.dim {
                    t.nrows()
                } else {
                    t.ncols()
                },
            });
        }
        ensure_finite(t)
    }

    /// `<x, y>_A = <Ax, y> = y* A x`.
    pub fn inner(&self, x: &CVec, y: &CVec) -> Result<Complex64> {
        self.check_vec(x)?;
        self.check_vec(y)?;
        Ok(y.dotc(&(&self.a * x)))
    }

    /// `||x||_A`, with negative round-off clipped at zero.
    pub fn norm(&self, x: &CVec) -> Result<f64> {
        Ok(self.inner(x, x)?.re.max(0.0).sqrt())
    }

    /// Relative tolerance `PREDICATE_TOL * max(1, ||A|| ||T||)`.
    fn op_tol(&self, t_norm: f64) -> f64 {
        PREDICATE_TOL * (self.a_norm * t_norm).max(1.0)
    }

    /// Whether `T` admits an `A`-adjoint, tested as
    /// `||A^{1/2} T (I - P)|| <= tol`.
    pub fn in_b_a(&self, t: &CMat) -> Result<bool> {
        self.check_op(t)?;
        if self.rank() == 0 || self.rank() == self.dim {
            return Ok(true);
        }
        let leak = &self.a_half * t * &self.null_basis;
        Ok(norm2(&leak) <= self.op_tol(norm2(t)))
    }

    fn require_member(&self, t: &CMat) -> Result<()> {
        if self.in_b_a(t)? {
            Ok(())
        } else {
            Err(Error::NotInBA)
        }
    }

    /// The distinguished `A`-adjoint `A^+ T* A`.
    pub fn sharp(&self, t: &CMat) -> Result<CMat> {
        self.require_member(t)?;
        Ok(self.sharp_unchecked(t))
    }

    pub(crate) fn sharp_unchecked(&self, t: &CMat) -> CMat {
        &self.a_pinv * t.adjoint() * &self.a
    }

    /// `diag(lambda)^{1/2} V* T V diag(lambda)^{-1/2}` for members.
    pub fn compress(&self, t: &CMat) -> Result<CMat> {
        if self.rank() == 0 {
            self.check_op(t)?;
            return Err(Error::RankZero);
        }
        self.require_member(t)?;
        Ok(self.compress_unchecked(t))
    }

    /// The compression formula without the membership test. For any `T`,
    /// `V * compress_unchecked(T) = A^{1/2} T V diag(lambda)^{-1/2}`, so its
    /// largest singular value is `||T||_A` even for non-members.
    pub(crate) fn compress_unchecked(&self, t: &CMat) -> CMat {
        let mut m = self.v.adjoint() * t * &self.v;
        let r = self.rank();
        for i in 0..r {
            for j in 0..r {
                m[(i, j)] *= (self.lambda[i] / self.lambda[j]).sqrt();
            }
        }
        m
    }

    /// Inverse of the compression: embeds an `r x r` matrix as an ambient
    /// operator that acts as zero on `N(A)`.
    pub fn expand(&self, m: &CMat) -> Result<CMat> {
        let r = self.rank();
        if m.nrows() != r || m.ncols() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: m.nrows(),
            });
        }
        let mut scaled = m.clone();
        for i in 0..r {
            for j in 0..r {
                scaled[(i, j)] *= (self.lambda[j] / self.lambda[i]).sqrt();
            }
        }
        Ok(&self.v * scaled * self.v.adjoint())
    }

    /// Maps a compressed coordinate vector `y` to `V diag(lambda)^{-1/2} y`,
    /// which has `||x||_A = ||y||`.
    pub fn lift_vector(&self, y: &CVec) -> CVec {
        let scaled = CVec::from_iterator(
            y.len(),
            y.iter().zip(&self.lambda).map(|(z, l)| z / l.sqrt()),
        );
        &self.v * scaled
    }

    pub fn re_a(&self, t: &CMat) -> Result<CMat> {
        let s = self.sharp(t)?;
        Ok((t + s).scale(0.5))
    }

    pub fn im_a(&self, t: &CMat) -> Result<CMat> {
        let s = self.sharp(t)?;
        Ok((t - s) * c(0.0, -0.5))
    }

    /// `AT = T*A` within tolerance.
    pub fn is_a_selfadjoint(&self, t: &CMat) -> Result<bool> {
        self.check_op(t)?;
        let at = &self.a * t;
        Ok(norm2(&(&at - at.adjoint())) <= self.op_tol(norm2(t)))
    }

    /// `AT` Hermitian and positive semidefinite within tolerance.
    pub fn is_a_positive(&self, t: &CMat) -> Result<bool> {
        if !self.is_a_selfadjoint(t)? {
            return Ok(false);
        }
        let at = hermitian_part(&(&self.a * t));
        let scale = norm2(&at);
        let lo = kernel::herm_eigenvalues(&at)
            .first()
            .copied()
            .unwrap_or(0.0);
        Ok(lo >= -PREDICATE_TOL * scale)
    }

    /// Member whose compression is unitary; vacuously true at rank zero.
    pub fn is_a_unitary(&self, u: &CMat) -> Result<bool> {
        if !self.in_b_a(u)? {
            return Ok(false);
        }
        if self.rank() == 0 {
            return Ok(true);
        }
        let m = self.compress_unchecked(u);
        let id = identity(self.rank());
        let err = norm2(&(m.adjoint() * &m - &id)).max(norm2(&(&m * m.adjoint() - &id)));
        Ok(err <= PREDICATE_TOL)
    }
}

/// `V diag(f(lambda)) V*`, symmetrized.
fn spectral_fn(v: &CMat, lambda: &[f64], f: impl Fn(f64) -> f64) -> CMat {
    let fact = SpectralFactorization {
        eigvals: lambda.iter().map(|&l| f(l)).collect(),
        eigvecs: v.clone(),
    };
    hermitian_part(&fact.reconstruct())
}

fn select_columns(m: &CMat, cols: &[usize]) -> CMat {
    let mut out = CMat::zeros(m.nrows(), cols.len());
    for (dst, &src) in cols.iter().enumerate() {
        out.set_column(dst, &m.column(src));
    }
    out
}

/// An operator bound to a space, with its membership verdict and compression
/// computed once.
#[derive(Debug, Clone)]
pub struct AOperator<'s> {
    space: &'s SemiSpace,
    t: CMat,
    member: bool,
    compressed: Option<CMat>,
}

impl<'s> AOperator<'s> {
    pub fn new(space: &'s SemiSpace, t: CMat) -> Result<Self> {
        let member = space.in_b_a(&t)?;
        let compressed = (member && space.rank() > 0).then(|| space.compress_unchecked(&t));
        Ok(Self {
            space,
            t,
            member,
            compressed,
        })
    }

    pub fn space(&self) -> &'s SemiSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMat {
        &self.t
    }

    pub fn is_member(&self) -> bool {
        self.member
    }

    /// Present iff the operator is a member and the weight has positive rank.
    pub fn compressed(&self) -> Option<&CMat> {
        self.compressed.as_ref()
    }
}
