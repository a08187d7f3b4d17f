//! Scalar functionals of operators on a semi-inner-product space.
//!
//! All of them reduce to classical quantities of the compression `M` of the
//! operator (see [`crate::space`]). With `H(theta) = (e^{i theta} M +
//! e^{-i theta} M*) / 2`:
//!
//! * `w_A(T)   = max_theta lambda_max(H(theta))`
//! * `c_A(T)   = max(0, max_theta lambda_min(H(theta)))`
//! * `m_A(T)   = min_theta sigma_min(H(theta))`
//!
//! `lambda_max(H(theta))` is the support function of the numerical range of
//! `M` in direction `-theta`, so the Crawford number formula is the distance
//! from the origin to a convex compact set written through its support
//! function.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{self, c, hermitian_part, norm2, pinv, skew_part, CMat, CVec, RANK_TOL};
use crate::space::SemiSpace;
use crate::sweep::{self, Margin, Period};

pub use crate::sweep::ThetaSweepConfig;

/// Value of the numerical radius together with the angle and an ambient
/// vector attaining it.
#[derive(Debug, Clone)]
pub struct RadiusResult {
    pub value: f64,
    /// Angle in `[0, 2 pi)` maximizing `lambda_max(H(theta))`.
    pub arg_theta: f64,
    /// `||x||_A = 1` and `|<Tx, x>_A| >= value` up to refinement error.
    /// The zero vector when the weight has rank zero.
    pub witness: CVec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub theta: f64,
    pub z: Complex64,
}

/// How `Re` is read inside the definition of `m_A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RealPartReading {
    /// `Re_A(X) = (X + X^#)/2`.
    #[default]
    ASharp,
    /// `(X + X*)/2` with the ordinary adjoint.
    ConjugateTranspose,
}

/// The rotated Hermitian pencil `H(theta) = cos(theta) H1 - sin(theta) H2`
/// with `M = H1 + i H2`.
pub(crate) struct Pencil {
    h1: CMat,
    h2: CMat,
    norm: f64,
}

impl Pencil {
    pub(crate) fn new(m: &CMat) -> Self {
        Self {
            h1: hermitian_part(m),
            h2: skew_part(m),
            norm: norm2(m),
        }
    }

    pub(crate) fn at(&self, theta: f64) -> CMat {
        self.h1.scale(theta.cos()) - self.h2.scale(theta.sin())
    }

    fn eigenvalues(&self, theta: f64) -> Vec<f64> {
        kernel::herm_eigenvalues(&self.at(theta))
    }

    fn top_eigenvector(&self, theta: f64) -> CVec {
        let f = kernel::herm_eig_unchecked(&self.at(theta));
        let last = f.eigvals.len() - 1;
        f.eigvecs.column(last).into_owned()
    }
}

/// Classical numerical radius of a square matrix, with the maximizing angle.
pub(crate) fn classical_radius(m: &CMat, cfg: &ThetaSweepConfig) -> (f64, f64) {
    if m.is_empty() {
        return (0.0, 0.0);
    }
    let pencil = Pencil::new(m);
    // H(theta + pi) = -H(theta): sweep [0, pi) on the spectral radius.
    let opt = sweep::maximize_with(
        |t| {
            let ev = pencil.eigenvalues(t);
            ev[ev.len() - 1].max(-ev[0])
        },
        Period::Half,
        Margin::Support,
        cfg,
    );
    let ev = pencil.eigenvalues(opt.theta);
    let theta = if ev[ev.len() - 1] >= -ev[0] {
        opt.theta
    } else {
        opt.theta + PI
    };
    (opt.value.max(0.0), theta)
}

fn classical_crawford(m: &CMat, cfg: &ThetaSweepConfig) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let pencil = Pencil::new(m);
    let opt = sweep::maximize(|t| pencil.eigenvalues(t)[0], Period::Full, pencil.norm, cfg);
    opt.value.max(0.0)
}

fn classical_min_abs_real_part(m: &CMat, cfg: &ThetaSweepConfig) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let pencil = Pencil::new(m);
    let opt = sweep::minimize(
        |t| {
            pencil
                .eigenvalues(t)
                .iter()
                .fold(f64::INFINITY, |acc, l| acc.min(l.abs()))
        },
        Period::Half,
        pencil.norm,
        cfg,
    );
    opt.value.max(0.0)
}

/// Compression of a member, or the appropriate error. `Ok(None)` means the
/// weight has rank zero.
fn member_compression(space: &SemiSpace, t: &CMat) -> Result<Option<CMat>> {
    space.check_op(t)?;
    if space.rank() == 0 {
        return Ok(None);
    }
    if !space.in_b_a(t)? {
        return Err(Error::UnboundedNumericalRadius);
    }
    Ok(Some(space.compress_unchecked(t)))
}

/// `||T||_A`, the supremum of `||Tx||_A / ||x||_A` over `x` in the range of
/// the weight.
///
/// Defined for every operator; for members it equals the largest singular
/// value of the compression. Use [`SemiSpace::in_b_a`] to flag non-members.
pub fn op_seminorm(space: &SemiSpace, t: &CMat) -> Result<f64> {
    space.check_op(t)?;
    if space.rank() == 0 {
        return Ok(0.0);
    }
    Ok(norm2(&space.compress_unchecked(t)))
}

/// `w_A(T)`. Non-members have unbounded radius when the weight is singular.
pub fn numerical_radius(
    space: &SemiSpace,
    t: &CMat,
    cfg: &ThetaSweepConfig,
) -> Result<RadiusResult> {
    cfg.validate()?;
    let Some(m) = member_compression(space, t)? else {
        return Ok(RadiusResult {
            value: 0.0,
            arg_theta: 0.0,
            witness: CVec::zeros(space.dim()),
        });
    };
    let (value, arg_theta) = classical_radius(&m, cfg);
    let y = Pencil::new(&m).top_eigenvector(arg_theta);
    Ok(RadiusResult {
        value,
        arg_theta,
        witness: space.lift_vector(&y),
    })
}

/// `c_A(T)`, the distance from the origin to the A-numerical range.
pub fn crawford(space: &SemiSpace, t: &CMat, cfg: &ThetaSweepConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(match member_compression(space, t)? {
        Some(m) => classical_crawford(&m, cfg),
        None => 0.0,
    })
}

/// `m_A(S) = inf_theta inf_{||x||_A = 1} ||Re_A(e^{i theta} S) x||_A`.
pub fn m_a(space: &SemiSpace, s: &CMat, cfg: &ThetaSweepConfig) -> Result<f64> {
    m_a_with(space, s, cfg, RealPartReading::ASharp)
}

/// [`m_a`] with an explicit reading of the real part.
///
/// Under [`RealPartReading::ConjugateTranspose`] the rotated real part need
/// not leave `N(A)` invariant, so the infimum also ranges over the null-space
/// component of `x`: with `F = A^{1/2} B V diag(lambda)^{-1/2}` and
/// `G = A^{1/2} B N`, the inner infimum is the smallest singular value of
/// `(I - G G^+) F`.
pub fn m_a_with(
    space: &SemiSpace,
    s: &CMat,
    cfg: &ThetaSweepConfig,
    reading: RealPartReading,
) -> Result<f64> {
    cfg.validate()?;
    let Some(m) = member_compression(space, s)? else {
        return Ok(0.0);
    };
    match reading {
        RealPartReading::ASharp => Ok(classical_min_abs_real_part(&m, cfg)),
        RealPartReading::ConjugateTranspose => {
            let re = hermitian_part(s);
            let im = skew_part(s);
            let n = space.dim();
            let mut lift = space.range_basis().clone();
            for (j, &l) in space.lambda().iter().enumerate() {
                lift.column_mut(j).scale_mut(1.0 / l.sqrt());
            }
            let eval = |theta: f64| -> f64 {
                let b = re.scale(theta.cos()) - im.scale(theta.sin());
                let ab = space.sqrt_weight() * &b;
                let f = &ab * &lift;
                if space.rank() == n {
                    return kernel::sigma_min(&f);
                }
                let g = &ab * space.null_basis();
                let proj = &g * pinv(&g, RANK_TOL).expect("finite operands");
                let resid = (CMat::identity(n, n) - proj) * f;
                kernel::sigma_min(&resid)
            };
            let lip = norm2(&(space.sqrt_weight() * s * &lift));
            Ok(sweep::minimize(eval, Period::Half, lip, cfg).value.max(0.0))
        }
    }
}

/// `sup_theta ||e^{i theta} X + e^{-i theta} Y||_A` for members `X`, `Y`.
pub fn max_phase_seminorm(
    space: &SemiSpace,
    x: &CMat,
    y: &CMat,
    cfg: &ThetaSweepConfig,
) -> Result<f64> {
    cfg.validate()?;
    let (Some(mx), Some(my)) = (member_compression(space, x)?, member_compression(space, y)?)
    else {
        return Ok(0.0);
    };
    let lip = norm2(&mx) + norm2(&my);
    let opt = sweep::maximize(
        |t| {
            let z = c(t.cos(), t.sin());
            norm2(&(mx.map(|v| v * z) + my.map(|v| v * z.conj())))
        },
        Period::Half,
        lip,
        cfg,
    );
    Ok(opt.value)
}

/// Points of the boundary of the A-numerical range, one per direction
/// `theta_j = 2 pi j / npoints`: the top eigenvector `y` of `H(theta_j)`
/// yields the point `y* M y`. Empty when the weight has rank zero.
pub fn range_boundary(space: &SemiSpace, t: &CMat, npoints: usize) -> Result<Vec<BoundaryPoint>> {
    if npoints < 3 {
        return Err(Error::InvalidConfig(format!(
            "at least 3 boundary points required, got {npoints}"
        )));
    }
    let Some(m) = member_compression(space, t)? else {
        return Ok(Vec::new());
    };
    let pencil = Pencil::new(&m);
    Ok((0..npoints)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / npoints as f64;
            let y = pencil.top_eigenvector(theta);
            BoundaryPoint {
                theta,
                z: y.dotc(&(&m * &y)),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{diag_real, identity, real_mat};

    fn space(a: &CMat) -> SemiSpace {
        SemiSpace::with_default_tol(a).unwrap()
    }

    fn cfg() -> ThetaSweepConfig {
        ThetaSweepConfig::default()
    }

    #[test]
    fn seminorm_examples() {
        let s = space(&identity(2));
        let t = real_mat(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!((op_seminorm(&s, &t).unwrap() - norm2(&t)).abs() < 1e-14);

        // Over span(e1): ||T e1||_A / ||e1||_A = |2|.
        let s = space(&diag_real(&[1.0, 0.0]));
        let t = real_mat(2, 2, &[2.0, 0.0, 3.0, 4.0]);
        assert!((op_seminorm(&s, &t).unwrap() - 2.0).abs() < 1e-14);

        let s = space(&CMat::zeros(2, 2));
        assert_eq!(op_seminorm(&s, &t).unwrap(), 0.0);
    }

    #[test]
    fn seminorm_of_non_member_matches_restricted_supremum() {
        // T e1 = e1 + e2 has A-norm 1 under A = diag(1, 0).
        let s = space(&diag_real(&[1.0, 0.0]));
        let t = real_mat(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(!s.in_b_a(&t).unwrap());
        assert!((op_seminorm(&s, &t).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn radius_examples() {
        // Re(e^{i theta} N) has eigenvalues +-1/2 for every theta.
        let s = space(&identity(2));
        let n = real_mat(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let r = numerical_radius(&s, &n, &cfg()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);

        let s = space(&diag_real(&[1.0, 0.0]));
        let t = real_mat(2, 2, &[2.0, 0.0, 3.0, 4.0]);
        let r = numerical_radius(&s, &t, &cfg()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        let x = &r.witness;
        assert!((s.norm(x).unwrap() - 1.0).abs() < 1e-12);
        assert!(s.inner(&(&t * x), x).unwrap().norm() >= r.value - 1e-9);
    }

    #[test]
    fn radius_of_non_member_is_unbounded() {
        let s = space(&diag_real(&[1.0, 0.0]));
        let t = real_mat(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert_eq!(
            numerical_radius(&s, &t, &cfg()).unwrap_err(),
            Error::UnboundedNumericalRadius
        );
        assert_eq!(
            crawford(&s, &t, &cfg()).unwrap_err(),
            Error::UnboundedNumericalRadius
        );
    }

    #[test]
    fn rank_zero_gives_zero() {
        let s = space(&CMat::zeros(3, 3));
        let t = CMat::from_fn(3, 3, |i, j| c(i as f64, j as f64));
        let r = numerical_radius(&s, &t, &cfg()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.witness.len(), 3);
        assert_eq!(crawford(&s, &t, &cfg()).unwrap(), 0.0);
        assert_eq!(m_a(&s, &t, &cfg()).unwrap(), 0.0);
        assert!(range_boundary(&s, &t, 8).unwrap().is_empty());
    }

    #[test]
    fn crawford_examples() {
        let s = space(&identity(2));
        assert!((crawford(&s, &identity(2), &cfg()).unwrap() - 1.0).abs() < 1e-12);
        assert!((crawford(&s, &diag_real(&[1.0, 2.0]), &cfg()).unwrap() - 1.0).abs() < 1e-12);
        let n = real_mat(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(crawford(&s, &n, &cfg()).unwrap(), 0.0);
        // Numerical range of diag(1 + i, 2 + 2i) is a segment on the ray at
        // 45 degrees starting at distance sqrt(2).
        let d = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 1.0), c(2.0, 2.0)]));
        assert!((crawford(&s, &d, &cfg()).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn m_a_examples() {
        let s = space(&identity(2));
        assert_eq!(m_a(&s, &CMat::zeros(2, 2), &cfg()).unwrap(), 0.0);
        assert!(m_a(&s, &identity(2), &cfg()).unwrap() < 1e-9);
        let d = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]));
        assert!(m_a(&s, &d, &cfg()).unwrap() < 1e-9);
        // Both readings agree for A = I.
        let t = CMat::from_fn(2, 2, |i, j| c(1.0 + i as f64, j as f64 - 0.3));
        let a = m_a(&s, &t, &cfg()).unwrap();
        let b = m_a_with(&s, &t, &cfg(), RealPartReading::ConjugateTranspose).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn phase_seminorm_of_scalar_pair() {
        // |e^{it} 2 + e^{-it} 3| peaks at 5.
        let s = space(&identity(1));
        let v = max_phase_seminorm(&s, &diag_real(&[2.0]), &diag_real(&[3.0]), &cfg()).unwrap();
        assert!((v - 5.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_examples() {
        let s = space(&identity(2));
        for p in range_boundary(&s, &identity(2), 16).unwrap() {
            assert!((p.z - c(1.0, 0.0)).norm() < 1e-12);
        }
        let d = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]));
        let pts = range_boundary(&s, &d, 64).unwrap();
        for p in &pts {
            // On the segment from 1 to i: re + im = 1, both in [0, 1].
            assert!((p.z.re + p.z.im - 1.0).abs() < 1e-12);
            assert!(p.z.re > -1e-12 && p.z.im > -1e-12);
        }
        assert!(pts.iter().any(|p| (p.z - c(1.0, 0.0)).norm() < 1e-9));
        assert!(pts.iter().any(|p| (p.z - c(0.0, 1.0)).norm() < 1e-9));
        assert!(range_boundary(&s, &d, 2).is_err());
    }
}
