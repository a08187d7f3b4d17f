//! Seeded instance generators.
//!
//! All randomness comes from ChaCha20 (`rand_chacha` 0.3) seeded with
//! `seed_from_u64`, so an instance is reproduced exactly by its
//! `(profile, seed)` pair. Complex Gaussians have independent real and
//! imaginary parts of variance 1/2.

use nalgebra::QR;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::kernel::{c, identity, CMat, CVec, RANK_TOL, ZERO};
use crate::space::SemiSpace;

pub type Prng = ChaCha20Rng;

/// Weight eigenvalues are drawn log-uniformly from this interval.
pub const LAMBDA_RANGE: (f64, f64) = (1e-2, 1e2);

pub fn rng_from_seed(seed: u64) -> Prng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    // Filled row by row so the stream order does not depend on storage.
    let mut m = CMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian(rng);
        }
    }
    m
}

fn gaussian_vector(n: usize, rng: &mut impl Rng) -> CVec {
    CVec::from_iterator(n, (0..n).map(|_| gaussian(rng)))
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> CMat {
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let qr = QR::new(gaussian_matrix(n, n, rng));
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn log_uniform(rng: &mut impl Rng) -> f64 {
    let (lo, hi) = LAMBDA_RANGE;
    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
}

pub fn gen_psd_with(n: usize, r: usize, rng: &mut impl Rng) -> Result<CMat> {
    if r > n {
        return Err(Error::BadRank { dim: n, rank: r });
    }
    let u = haar_unitary(n, rng);
    let mut a = CMat::zeros(n, n);
    for j in 0..r {
        let l = log_uniform(rng);
        let v = u.column(j);
        a += (v * v.adjoint()).scale(l);
    }
    Ok((&a + a.adjoint()).scale(0.5))
}

/// Random PSD weight of rank exactly `r`.
pub fn gen_psd(n: usize, r: usize, seed: u64) -> Result<CMat> {
    gen_psd_with(n, r, &mut rng_from_seed(seed))
}

/// Adapted unitary basis `[V | N]` of the space.
fn adapted_basis(space: &SemiSpace) -> CMat {
    let (n, r) = (space.dim(), space.rank());
    let mut w = CMat::zeros(n, n);
    w.columns_mut(0, r).copy_from(space.range_basis());
    w.columns_mut(r, n - r).copy_from(space.null_basis());
    w
}

fn from_adapted(space: &SemiSpace, b: &CMat) -> CMat {
    let w = adapted_basis(space);
    &w * b * w.adjoint()
}

/// `(I - P) W (I - P)` with Gaussian `W`: lives on the null space.
fn null_junk(space: &SemiSpace, rng: &mut impl Rng) -> CMat {
    let n = space.dim();
    let q = identity(n) - space.range_projector();
    &q * gaussian_matrix(n, n, rng) * &q
}

pub fn gen_member_with(space: &SemiSpace, rng: &mut impl Rng) -> CMat {
    let (n, r) = (space.dim(), space.rank());
    let mut b = gaussian_matrix(n, n, rng);
    b.view_mut((0, r), (r, n - r)).fill(ZERO);
    from_adapted(space, &b)
}

/// General member: block lower triangular `[[X, 0], [Y, Z]]` in the adapted
/// basis.
pub fn gen_member(space: &SemiSpace, seed: u64) -> CMat {
    gen_member_with(space, &mut rng_from_seed(seed))
}

pub fn gen_a_selfadjoint_with(space: &SemiSpace, rng: &mut impl Rng) -> CMat {
    let n = space.dim();
    let g = gaussian_matrix(n, n, rng);
    let h = (&g + g.adjoint()).scale(0.5);
    let p = space.range_projector();
    space.pinv_weight() * p * h * p + null_junk(space, rng)
}

/// `A^+ (P H P) + (I - P) W (I - P)`, so that `AT = PHP` is Hermitian.
pub fn gen_a_selfadjoint(space: &SemiSpace, seed: u64) -> CMat {
    gen_a_selfadjoint_with(space, &mut rng_from_seed(seed))
}

pub fn gen_square_zero_with(space: &SemiSpace, rng: &mut impl Rng) -> CMat {
    let (n, r) = (space.dim(), space.rank());
    if r == 0 {
        return CMat::zeros(n, n);
    }
    let mut b = CMat::zeros(n, n);
    let z = gaussian_vector(n - r, rng);
    if r == 1 {
        // The compression is 1x1 and nilpotent, hence zero; only the map
        // from the range into the null space survives.
        b.view_mut((1, 0), (n - 1, 1)).copy_from(&z);
        return from_adapted(space, &b);
    }
    let x = gaussian_vector(r, rng);
    let mut y = gaussian_vector(r, rng);
    let proj = x.dotc(&y) / x.dotc(&x);
    y -= &x * proj;
    b.view_mut((0, 0), (r, r)).copy_from(&(&x * y.adjoint()));
    b.view_mut((r, 0), (n - r, r))
        .copy_from(&(&z * y.adjoint()));
    from_adapted(space, &b)
}

/// Square-zero member `[[x y*, 0], [z y*, 0]]` with `y* x = 0` in the
/// adapted basis.
pub fn gen_square_zero(space: &SemiSpace, seed: u64) -> CMat {
    gen_square_zero_with(space, &mut rng_from_seed(seed))
}

pub fn gen_a_unitary_with(space: &SemiSpace, rng: &mut impl Rng) -> CMat {
    let r = space.rank();
    let q = haar_unitary(r, rng);
    let v = space.range_basis();
    let lam = space.lambda();
    let mut left = v.clone();
    let mut right = v.adjoint();
    for (j, l) in lam.iter().enumerate() {
        left.column_mut(j).scale_mut(l.sqrt().recip());
        right.row_mut(j).scale_mut(l.sqrt());
    }
    left * q * right + null_junk(space, rng)
}

/// `V L^{-1/2} Q L^{1/2} V* + (I - P) W (I - P)` with Haar `Q`; its
/// compression is `Q`.
pub fn gen_a_unitary(space: &SemiSpace, seed: u64) -> CMat {
    gen_a_unitary_with(space, &mut rng_from_seed(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankPolicy {
    Full,
    Deficient,
    Zero,
    /// By `seed % 10`: 0-3 full, 4-8 deficient, 9 zero.
    Mixed,
}

/// Which operators an instance carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Roster {
    /// T1..T4, T, S, X, Y, Q, N0, H, U, the block grid and scalars.
    Full,
    /// T1..T4.
    Quad,
    /// A single `T` of the given structure.
    SquareZero,
    ASelfadjoint,
    AUnitary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub name: String,
    pub dims: (usize, usize),
    pub rank: RankPolicy,
    /// Block grid size; `None` draws from 2..=3.
    pub block_shape: Option<usize>,
    pub roster: Roster,
}

pub const PROFILE_NAMES: [&str; 9] = [
    "default",
    "2x2-general",
    "rank-deficient",
    "full-rank",
    "rank-zero",
    "square-zero",
    "a-selfadjoint",
    "a-unitary",
    "block3",
];

impl Profile {
    pub fn named(name: &str) -> Result<Self> {
        let base = |rank, roster| Profile {
            name: name.to_string(),
            dims: (2, 6),
            rank,
            block_shape: None,
            roster,
        };
        Ok(match name {
            "default" => base(RankPolicy::Mixed, Roster::Full),
            "2x2-general" => base(RankPolicy::Mixed, Roster::Quad),
            "rank-deficient" => base(RankPolicy::Deficient, Roster::Full),
            "full-rank" => base(RankPolicy::Full, Roster::Full),
            "rank-zero" => base(RankPolicy::Zero, Roster::Full),
            "square-zero" => base(RankPolicy::Mixed, Roster::SquareZero),
            "a-selfadjoint" => base(RankPolicy::Mixed, Roster::ASelfadjoint),
            "a-unitary" => base(RankPolicy::Mixed, Roster::AUnitary),
            "block3" => Profile {
                block_shape: Some(3),
                ..base(RankPolicy::Mixed, Roster::Full)
            },
            _ => return Err(Error::BadProfile(name.to_string())),
        })
    }

    pub fn with_dims(mut self, lo: usize, hi: usize) -> Self {
        self.dims = (lo, hi);
        self
    }
}

/// Draws the instance of `profile` for `seed`. `dim` overrides the sampled
/// dimension while keeping the rest of the stream, which is how witnesses
/// shrink.
pub fn gen_instance_sized(profile: &Profile, seed: u64, dim: Option<usize>) -> Result<Instance> {
    let (lo, hi) = profile.dims;
    if lo < 1 || lo > hi {
        return Err(Error::BadProfile(format!(
            "{}: bad dimension range {lo}..={hi}",
            profile.name
        )));
    }
    let mut rng = rng_from_seed(seed);
    let sampled = rng.gen_range(lo..=hi);
    let n = dim.unwrap_or(sampled);
    if n == 0 {
        return Err(Error::BadProfile(format!(
            "{}: dimension must be positive",
            profile.name
        )));
    }
    let deficient_rank = |rng: &mut Prng| if n >= 2 { rng.gen_range(1..n) } else { 0 };
    let policy = match profile.rank {
        RankPolicy::Mixed => match seed % 10 {
            0..=3 => RankPolicy::Full,
            4..=8 => RankPolicy::Deficient,
            _ => RankPolicy::Zero,
        },
        p => p,
    };
    let r = match policy {
        RankPolicy::Full => n,
        RankPolicy::Deficient => deficient_rank(&mut rng),
        _ => 0,
    };
    let a = gen_psd_with(n, r, &mut rng)?;
    let space = SemiSpace::new(&a, RANK_TOL)?;
    let mut inst = Instance::new(space);
    inst.seed = Some(seed);
    inst.profile = Some(profile.name.clone());

    let k = profile.block_shape.unwrap_or_else(|| rng.gen_range(2..=3));
    match profile.roster {
        Roster::Quad => {
            for name in ["T1", "T2", "T3", "T4"] {
                let t = gen_member_with(&inst.space, &mut rng);
                inst.insert(name, t, "member");
            }
        }
        Roster::SquareZero => {
            let t = gen_square_zero_with(&inst.space, &mut rng);
            inst.insert("T", t, "square_zero");
        }
        Roster::ASelfadjoint => {
            let t = gen_a_selfadjoint_with(&inst.space, &mut rng);
            inst.insert("T", t, "a_selfadjoint");
        }
        Roster::AUnitary => {
            let t = gen_a_unitary_with(&inst.space, &mut rng);
            inst.insert("T", t, "a_unitary");
        }
        Roster::Full => {
            for name in ["T1", "T2", "T3", "T4", "T", "S", "X", "Y", "Q"] {
                let t = gen_member_with(&inst.space, &mut rng);
                inst.insert(name, t, "member");
            }
            let t = gen_square_zero_with(&inst.space, &mut rng);
            inst.insert("N0", t, "square_zero");
            let t = gen_a_selfadjoint_with(&inst.space, &mut rng);
            inst.insert("H", t, "a_selfadjoint");
            let t = gen_a_unitary_with(&inst.space, &mut rng);
            inst.insert("U", t, "a_unitary");
            inst.block_shape = Some(k);
            for i in 1..=k {
                for j in 1..=k {
                    let t = gen_member_with(&inst.space, &mut rng);
                    inst.insert(&format!("B{i}{j}"), t, "member");
                }
            }
            for name in ["z1", "z2"] {
                let z = disc_point(&mut rng) * 10.0;
                inst.scalars.insert(name.to_string(), z);
            }
        }
    }
    Ok(inst)
}

pub fn gen_instance(profile: &Profile, seed: u64) -> Result<Instance> {
    gen_instance_sized(profile, seed, None)
}

/// Uniform point in the closed unit disc.
fn disc_point(rng: &mut impl Rng) -> Complex64 {
    let radius = rng.gen::<f64>().sqrt();
    let angle = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(radius, angle)
}

/// Instances `seed, seed + 1, ...` of a profile.
pub fn gen_batch(profile: &Profile, seed: u64, count: usize) -> Result<Vec<Instance>> {
    (0..count as u64)
        .map(|i| gen_instance(profile, seed.wrapping_add(i)))
        .collect()
}
