//! Dense complex matrix primitives.
//!
//! Everything above this module works with [`CMat`], a heap-allocated
//! `nalgebra` matrix of `Complex64`. Rank decisions use a relative threshold:
//! a singular value (or eigenvalue) `s` is retained iff `s > tol * s_max`.
//!
//! Eigenvalues and singular values come from nalgebra. Eigenvectors and
//! singular vectors come from the cyclic Jacobi methods below: nalgebra's
//! QR-based decompositions return accurate values but, on some inputs with
//! clustered or zero eigenvalues, vectors that are plainly wrong.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Default relative rank threshold.
pub const RANK_TOL: f64 = 1e-10;

/// Relative asymmetry accepted by [`herm_eig`] before symmetrizing.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Eigendecomposition `H = Q diag(eigvals) Q*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralFactorization {
    /// Ascending.
    pub eigvals: Vec<f64>,
    /// Orthonormal columns, matching `eigvals`.
    pub eigvecs: CMat,
}

impl SpectralFactorization {
    pub fn reconstruct(&self) -> CMat {
        let mut scaled = self.eigvecs.clone();
        for (j, &l) in self.eigvals.iter().enumerate() {
            scaled.column_mut(j).scale_mut(l);
        }
        &scaled * self.eigvecs.adjoint()
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a matrix from real row-major entries.
pub fn real_mat(rows: usize, cols: usize, entries: &[f64]) -> CMat {
    CMat::from_row_iterator(rows, cols, entries.iter().map(|&x| c(x, 0.0)))
}

pub fn diag_real(values: &[f64]) -> CMat {
    let n = values.len();
    let mut m = CMat::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = c(v, 0.0);
    }
    m
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite(m: &CMat) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(m: &CMat) -> Result<usize> {
    if m.nrows() == m.ncols() {
        Ok(m.nrows())
    } else {
        Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

/// Spectral norm (largest singular value). Zero for empty matrices.
pub fn norm2(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Smallest singular value of a matrix with at least as many rows as columns.
pub fn sigma_min(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().min()
}

/// `(M + M*) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// `(M - M*) / 2i`.
pub fn skew_part(m: &CMat) -> CMat {
    (m - m.adjoint()) * c(0.0, -0.5)
}

/// Eigenvalues of a Hermitian matrix without any validation, ascending.
pub fn herm_eigenvalues(h: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(H + H*)/2` before decomposition so that
/// downstream projectors are exactly Hermitian.
pub fn herm_eig(h: &CMat) -> Result<SpectralFactorization> {
    let n = ensure_square(h)?;
    ensure_finite(h)?;
    if n == 0 {
        return Ok(SpectralFactorization {
            eigvals: Vec::new(),
            eigvecs: CMat::zeros(0, 0),
        });
    }
    let asymmetry = norm2(&(h - h.adjoint()));
    let tolerance = HERMITIAN_TOL * norm2(h).max(1.0);
    if asymmetry > tolerance {
        return Err(Error::NotHermitian {
            asymmetry,
            tolerance,
        });
    }
    Ok(herm_eig_unchecked(&hermitian_part(h)))
}

pub(crate) fn herm_eig_unchecked(h: &CMat) -> SpectralFactorization {
    let n = h.nrows();
    let mut a = h.clone();
    let mut v = identity(n);
    let scale = a.norm();
    if scale > 0.0 {
        for _ in 0..MAX_JACOBI_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let g = a[(p, q)];
                    if g.norm() <= JACOBI_EPS * scale {
                        continue;
                    }
                    rotated = true;
                    let rot = Rotation::new(a[(p, p)].re, a[(q, q)].re, g);
                    rot.apply_right(&mut a, p, q);
                    rot.apply_left(&mut a, p, q);
                    rot.apply_right(&mut v, p, q);
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                }
            }
            if !rotated {
                break;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let mut eigvecs = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigvecs.set_column(dst, &v.column(src));
    }
    SpectralFactorization {
        eigvals: order.iter().map(|&k| a[(k, k)].re).collect(),
        eigvecs,
    }
}

const MAX_JACOBI_SWEEPS: usize = 60;
const JACOBI_EPS: f64 = 1e-17;

/// Unitary acting on coordinates `(p, q)` that annihilates the off-diagonal
/// entry `g` of the Hermitian block `[[a, g], [conj(g), d]]`:
/// `J = [[c, s], [-s conj(e), c conj(e)]]` with `e = g / |g|`.
struct Rotation {
    c: f64,
    s: f64,
    e: Complex64,
}

impl Rotation {
    fn new(a: f64, d: f64, g: Complex64) -> Self {
        let b = g.norm();
        let zeta = (d - a) / (2.0 * b);
        let t = if zeta == 0.0 {
            1.0
        } else {
            zeta.signum() / (zeta.abs() + (zeta * zeta + 1.0).sqrt())
        };
        let c = 1.0 / (t * t + 1.0).sqrt();
        Self {
            c,
            s: t * c,
            e: g / b,
        }
    }

    /// `M <- M J` on columns `p`, `q`.
    fn apply_right(&self, m: &mut CMat, p: usize, q: usize) {
        let ec = self.e.conj();
        for k in 0..m.nrows() {
            let (x, y) = (m[(k, p)], m[(k, q)]);
            m[(k, p)] = x * self.c - y * ec * self.s;
            m[(k, q)] = x * self.s + y * ec * self.c;
        }
    }

    /// `M <- J* M` on rows `p`, `q`.
    fn apply_left(&self, m: &mut CMat, p: usize, q: usize) {
        for k in 0..m.ncols() {
            let (x, y) = (m[(p, k)], m[(q, k)]);
            m[(p, k)] = x * self.c - y * self.e * self.s;
            m[(q, k)] = x * self.s + y * self.e * self.c;
        }
    }
}

/// Thin SVD `M = U diag(sigma) V*` of a matrix with at least as many rows as
/// columns, by one-sided Jacobi on the columns.
fn jacobi_svd_tall(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    let k = m.ncols();
    let mut g = m.clone();
    let mut v = identity(k);
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = g.column(p).norm_squared();
                let beta = g.column(q).norm_squared();
                let gamma = g.column(p).dotc(&g.column(q));
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let rot = Rotation::new(alpha, beta, gamma);
                rot.apply_right(&mut g, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Vec<f64> = (0..k).map(|j| g.column(j).norm()).collect();
    for (j, &s) in sigma.iter().enumerate() {
        if s > 0.0 {
            g.column_mut(j).unscale_mut(s);
        }
    }
    (g, sigma, v)
}

/// Moore–Penrose pseudoinverse; singular values `<= tol * sigma_max` are
/// treated as zero.
pub fn pinv(m: &CMat, tol: f64) -> Result<CMat> {
    ensure_finite(m)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "rank tolerance must lie in (0, 1), got {tol}"
        )));
    }
    let (rows, cols) = m.shape();
    if m.is_empty() {
        return Ok(CMat::zeros(cols, rows));
    }
    if rows < cols {
        return Ok(pinv(&m.adjoint(), tol)?.adjoint());
    }
    let (u, sigma, v) = jacobi_svd_tall(m);
    let smax = sigma.iter().fold(0.0_f64, |acc, &s| acc.max(s));
    let mut x = CMat::zeros(cols, rows);
    if smax == 0.0 {
        return Ok(x);
    }
    for (j, &s) in sigma.iter().enumerate() {
        if s > tol * smax {
            // x += v_j (1/s) u_j*
            x += (v.column(j) * u.column(j).adjoint()).scale(1.0 / s);
        }
    }
    Ok(x)
}

/// Hermitian positive semidefinite square root.
pub fn psd_sqrt(a: &CMat) -> Result<CMat> {
    let fact = herm_eig(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    let scale = fact.eigvals.iter().fold(0.0_f64, |acc, l| acc.max(l.abs()));
    let floor = -1e-10 * scale;
    if let Some(&lo) = fact.eigvals.first() {
        if lo < floor {
            return Err(Error::NotPsd {
                eigenvalue: lo,
                tolerance: floor,
            });
        }
    }
    // Eigenvalues under the rank threshold are noise; their roots would not be.
    let roots: Vec<f64> = fact
        .eigvals
        .iter()
        .map(|&l| if l > RANK_TOL * scale { l.sqrt() } else { 0.0 })
        .collect();
    let s = SpectralFactorization {
        eigvals: roots,
        eigvecs: fact.eigvecs,
    }
    .reconstruct();
    Ok(hermitian_part(&s))
}

/// Orthogonal projector onto the range of `a`, computed as `A A^+`.
pub fn orth_proj_range(a: &CMat, tol: f64) -> Result<CMat> {
    ensure_square(a)?;
    let p = a * pinv(a, tol)?;
    Ok(hermitian_part(&p))
}

/// Block-diagonal matrix with the given (square or rectangular) blocks.
pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let (mut r, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r, c0), b.shape()).copy_from(*b);
        r += b.nrows();
        c0 += b.ncols();
    }
    out
}

/// Relative scale `max(1, x)` used in tolerance checks.
pub fn scale1(x: f64) -> f64 {
    x.max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        norm2(&(a - b)) <= tol
    }

    fn random_herm(n: usize, seed: u64) -> CMat {
        let mut s = seed;
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let g = CMat::from_fn(n, n, |_, _| c(next(), next()));
        hermitian_part(&g)
    }

    #[test]
    fn herm_eig_diagonal_and_pauli() {
        let f = herm_eig(&diag_real(&[3.0, 1.0])).unwrap();
        assert_eq!(f.eigvals, vec![1.0, 3.0]);
        assert!((f.eigvecs[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((f.eigvecs[(0, 1)].norm() - 1.0).abs() < 1e-15);

        let x = real_mat(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let f = herm_eig(&x).unwrap();
        assert!((f.eigvals[0] + 1.0).abs() < 1e-14);
        assert!((f.eigvals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn herm_eig_reconstruction_and_orthonormality() {
        let h = random_herm(4, 11);
        let f = herm_eig(&h).unwrap();
        let scale = norm2(&h).max(1.0);
        assert!(norm2(&(&h - f.reconstruct())) <= 1e-12 * scale);
        assert!(close(
            &(f.eigvecs.adjoint() * &f.eigvecs),
            &identity(4),
            1e-12
        ));
        assert!(f.eigvals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn herm_eig_rejects_bad_input() {
        let r = herm_eig(&CMat::zeros(2, 3));
        assert!(matches!(r, Err(Error::NonSquare { rows: 2, cols: 3 })));
        let r = herm_eig(&real_mat(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        assert!(matches!(r, Err(Error::NotHermitian { .. })));
        let mut bad = identity(2);
        bad[(0, 0)] = c(f64::NAN, 0.0);
        assert_eq!(herm_eig(&bad).unwrap_err(), Error::NonFinite);
    }

    #[test]
    fn herm_eig_matches_characteristic_polynomial_2x2() {
        // [[a, b], [conj b, d]]: roots of l^2 - (a+d) l + (ad - |b|^2).
        for seed in 0..20 {
            let h = random_herm(2, 100 + seed);
            let (a, d, b) = (h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)]);
            let tr = a + d;
            let disc = ((a - d) * (a - d) + 4.0 * b.norm_sqr()).sqrt();
            let f = herm_eig(&h).unwrap();
            assert!((f.eigvals[0] - (tr - disc) / 2.0).abs() < 1e-10);
            assert!((f.eigvals[1] - (tr + disc) / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn pinv_examples() {
        let x = pinv(&diag_real(&[2.0, 0.0]), RANK_TOL).unwrap();
        assert!(close(&x, &diag_real(&[0.5, 0.0]), 1e-15));

        let j = real_mat(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let x = pinv(&j, RANK_TOL).unwrap();
        assert!(close(&x, &j.scale(0.25), 1e-14));
        // Penrose identities by direct multiplication.
        assert!(close(&(&j * &x * &j), &j, 1e-13));
        assert!(close(&(&x * &j * &x), &x, 1e-13));
        let xm = &x * &j;
        let mx = &j * &x;
        assert!(close(&xm.adjoint(), &xm, 1e-13));
        assert!(close(&mx.adjoint(), &mx, 1e-13));

        let m = real_mat(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let inv = m.clone().try_inverse().unwrap();
        assert!(norm2(&(pinv(&m, RANK_TOL).unwrap() - &inv)) <= 1e-10 * norm2(&inv));
    }

    #[test]
    fn pinv_of_zero_and_rectangular() {
        assert_eq!(
            pinv(&CMat::zeros(2, 3), RANK_TOL).unwrap(),
            CMat::zeros(3, 2)
        );
        let m = real_mat(2, 3, &[1.0, 0.0, 2.0, 0.0, 1.0, 0.0]);
        let x = pinv(&m, RANK_TOL).unwrap();
        assert_eq!(x.shape(), (3, 2));
        assert!(close(&(&m * &x * &m), &m, 1e-12));
        assert!(pinv(&m, 0.0).is_err());
    }

    #[test]
    fn psd_sqrt_examples() {
        let s = psd_sqrt(&diag_real(&[4.0, 9.0])).unwrap();
        assert!(close(&s, &diag_real(&[2.0, 3.0]), 1e-14));
        assert!(close(&psd_sqrt(&identity(3)).unwrap(), &identity(3), 1e-14));
        assert_eq!(psd_sqrt(&CMat::zeros(2, 2)).unwrap(), CMat::zeros(2, 2));
        assert!(matches!(
            psd_sqrt(&diag_real(&[1.0, -1.0])),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn orth_proj_range_examples() {
        let p = orth_proj_range(&diag_real(&[1.0, 0.0]), RANK_TOL).unwrap();
        assert!(close(&p, &diag_real(&[1.0, 0.0]), 1e-15));
        let a = real_mat(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        assert!(close(
            &orth_proj_range(&a, RANK_TOL).unwrap(),
            &identity(2),
            1e-12
        ));
        let v = CVec::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.3), c(0.0, 1.0)]);
        let vv = &v * v.adjoint();
        let expected = vv.scale(1.0 / v.norm_squared());
        assert!(close(
            &orth_proj_range(&vv, RANK_TOL).unwrap(),
            &expected,
            1e-12
        ));
        assert_eq!(
            orth_proj_range(&CMat::zeros(3, 3), RANK_TOL).unwrap(),
            CMat::zeros(3, 3)
        );
    }

    #[test]
    fn block_diag_places_blocks() {
        let a = identity(2);
        let b = diag_real(&[5.0]);
        let d = block_diag(&[&a, &b]);
        assert_eq!(d.shape(), (3, 3));
        assert_eq!(d[(2, 2)], c(5.0, 0.0));
        assert_eq!(d[(0, 2)], ZERO);
    }
}
