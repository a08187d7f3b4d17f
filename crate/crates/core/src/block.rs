//! Operator matrices over the inflated weight `diag(A, ..., A)`.
//!
//! Blocks are indexed `(row, col)`, 0-based in code and 1-based in error
//! messages. Storage is block-row-major.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::kernel::{block_diag, c, identity, norm2, CMat};
use crate::space::SemiSpace;

/// `k` copies of the weight on the `k`-fold direct sum, lifted blockwise from
/// the base factorization.
pub fn inflate_space(space: &SemiSpace, k: usize) -> Result<SemiSpace> {
    if k == 0 {
        return Err(Error::InvalidConfig(
            "block count must be at least 1".into(),
        ));
    }
    if k == 1 {
        return Ok(space.clone());
    }
    let copies = |m: &CMat| block_diag(&vec![m; k]);
    let lambda: Vec<f64> = (0..k)
        .flat_map(|_| space.lambda().iter().copied())
        .collect();
    Ok(SemiSpace::assemble(
        copies(space.weight()),
        copies(space.range_basis()),
        copies(space.null_basis()),
        lambda,
        space.tol(),
    ))
}

/// Same inflated weight, refactorized from scratch. Used to cross-check the
/// blockwise lift.
pub fn inflate_space_refactorized(space: &SemiSpace, k: usize) -> Result<SemiSpace> {
    SemiSpace::new(&block_diag(&vec![space.weight(); k]), space.tol())
}

/// Assembles a `k x k` grid of `n x n` blocks, given row-major.
pub fn assemble(k: usize, n: usize, blocks: &[CMat]) -> Result<CMat> {
    if blocks.len() != k * k {
        return Err(Error::InvalidConfig(format!(
            "expected {} blocks for a {k}x{k} grid, got {}",
            k * k,
            blocks.len()
        )));
    }
    let mut out = CMat::zeros(k * n, k * n);
    for (idx, b) in blocks.iter().enumerate() {
        let (i, j) = (idx / k, idx % k);
        if b.nrows() != n || b.ncols() != n {
            return Err(Error::BlockShapeMismatch {
                row: i + 1,
                col: j + 1,
                rows: b.nrows(),
                cols: b.ncols(),
                expected: n,
            });
        }
        out.view_mut((i * n, j * n), (n, n)).copy_from(b);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BlockOperator {
    base: SemiSpace,
    inflated: SemiSpace,
    k: usize,
    blocks: Vec<CMat>,
    realized: CMat,
    member: bool,
}

impl BlockOperator {
    /// Builds a `k x k` operator matrix. Non-member blocks are accepted; the
    /// result is then typically flagged as a non-member.
    pub fn new(space: &SemiSpace, k: usize, blocks: Vec<CMat>) -> Result<Self> {
        let inflated = inflate_space(space, k)?;
        Self::with_inflated(space, inflated, k, blocks)
    }

    fn with_inflated(
        space: &SemiSpace,
        inflated: SemiSpace,
        k: usize,
        blocks: Vec<CMat>,
    ) -> Result<Self> {
        let realized = assemble(k, space.dim(), &blocks)?;
        let member = inflated.in_b_a(&realized)?;
        Ok(Self {
            base: space.clone(),
            inflated,
            k,
            blocks,
            realized,
            member,
        })
    }

    /// `[[a, b], [c, d]]`.
    pub fn two_by_two(space: &SemiSpace, a: &CMat, b: &CMat, cc: &CMat, d: &CMat) -> Result<Self> {
        Self::new(space, 2, vec![a.clone(), b.clone(), cc.clone(), d.clone()])
    }

    /// Block-diagonal operator matrix.
    pub fn diagonal(space: &SemiSpace, diag: &[CMat]) -> Result<Self> {
        let k = diag.len();
        let n = space.dim();
        let blocks = (0..k * k)
            .map(|idx| {
                if idx / k == idx % k {
                    diag[idx / k].clone()
                } else {
                    CMat::zeros(n, n)
                }
            })
            .collect();
        Self::new(space, k, blocks)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn base(&self) -> &SemiSpace {
        &self.base
    }

    pub fn inflated(&self) -> &SemiSpace {
        &self.inflated
    }

    pub fn block(&self, row: usize, col: usize) -> &CMat {
        &self.blocks[row * self.k + col]
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn realized(&self) -> &CMat {
        &self.realized
    }

    pub fn is_member(&self) -> bool {
        self.member
    }

    /// Residual between the inflated sharp of the realized matrix and the
    /// grid whose `(i, j)` block is `T_ji^#`.
    pub fn block_sharp_check(&self) -> Result<f64> {
        let mut transposed = Vec::with_capacity(self.k * self.k);
        for i in 0..self.k {
            for j in 0..self.k {
                transposed.push(self.base.sharp(self.block(j, i))?);
            }
        }
        let expected = assemble(self.k, self.base.dim(), &transposed)?;
        let direct = self.inflated.sharp(&self.realized)?;
        Ok(norm2(&(direct - expected)))
    }

    /// Zeroes the off-diagonal blocks.
    pub fn pinch_diag(&self) -> Self {
        let n = self.base.dim();
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(idx, b)| {
                if idx / self.k == idx % self.k {
                    b.clone()
                } else {
                    CMat::zeros(n, n)
                }
            })
            .collect();
        Self::with_inflated(&self.base, self.inflated.clone(), self.k, blocks)
            .expect("pinching preserves block shapes")
    }
}

/// The block unitaries used to move between operator-matrix arrangements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitaryKind {
    /// `[[O, I], [I, O]]`
    Swap,
    /// `[[O, I], [-I, O]]`
    Sympl,
    /// `[[I, O], [O, -I]]`
    Sign,
    /// `diag(I, zI, ..., z^{k-1} I)` with `z = e^{2 pi i / k}`.
    DftPhase,
}

impl fmt::Display for UnitaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            UnitaryKind::Swap => "swap",
            UnitaryKind::Sympl => "sympl",
            UnitaryKind::Sign => "sign",
            UnitaryKind::DftPhase => "dft_phase",
        };
        f.write_str(s)
    }
}

pub fn special_unitary(space: &SemiSpace, k: usize, kind: UnitaryKind) -> Result<BlockOperator> {
    let n = space.dim();
    let id = identity(n);
    let zero = CMat::zeros(n, n);
    let blocks = match kind {
        UnitaryKind::Swap | UnitaryKind::Sympl | UnitaryKind::Sign if k != 2 => {
            return Err(Error::BadKind {
                kind: kind.to_string(),
                k,
            })
        }
        UnitaryKind::Swap => vec![zero.clone(), id.clone(), id, zero],
        UnitaryKind::Sympl => vec![zero.clone(), id.clone(), -id, zero],
        UnitaryKind::Sign => vec![id.clone(), zero.clone(), zero, -id],
        UnitaryKind::DftPhase => {
            if k == 0 {
                return Err(Error::BadKind {
                    kind: kind.to_string(),
                    k,
                });
            }
            (0..k * k)
                .map(|idx| {
                    let (i, j) = (idx / k, idx % k);
                    if i == j {
                        let phase = 2.0 * PI * i as f64 / k as f64;
                        &id * c(phase.cos(), phase.sin())
                    } else {
                        zero.clone()
                    }
                })
                .collect()
        }
    };
    BlockOperator::new(space, k, blocks)
}
