//! One-dimensional angular optimization: a uniform grid followed by
//! golden-section refinement of every grid cell that can still hold the
//! global optimum.
//!
//! The objectives swept here (support functions of numerical ranges, norms
//! of rotated operator pencils) are Lipschitz in the angle with a constant
//! the caller supplies, so a grid spacing `h` bounds how far the true
//! optimum can exceed the best grid value. Cells whose grid value falls
//! short of the best by more than `lipschitz * h` are skipped.
//!
//! Support functions of convex sets admit a much tighter bound: between two
//! sampled directions `h` apart the support function cannot exceed the
//! larger sample by more than a factor `1 / cos(h / 2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const MAX_CANDIDATES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSweepConfig {
    /// Grid points covering a full turn `[0, 2 pi)`. Half-period objectives
    /// use half as many on `[0, pi)`, which samples the same angles.
    pub grid_points: usize,
    /// Absolute angle tolerance for refinement.
    pub refine_tol: f64,
    pub max_refine_iters: usize,
}

impl Default for ThetaSweepConfig {
    fn default() -> Self {
        Self {
            grid_points: 1024,
            refine_tol: 1e-10,
            max_refine_iters: 200,
        }
    }
}

impl ThetaSweepConfig {
    pub fn with_grid(grid_points: usize) -> Self {
        Self {
            grid_points,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 16 {
            return Err(Error::InvalidConfig(format!(
                "grid_points must be at least 16, got {}",
                self.grid_points
            )));
        }
        if self.refine_tol.is_nan() || self.refine_tol <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "refine_tol must be positive, got {}",
                self.refine_tol
            )));
        }
        Ok(())
    }
}

/// Angular period of the objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Period {
    Full,
    Half,
}

impl Period {
    fn length(self) -> f64 {
        match self {
            Period::Full => 2.0 * PI,
            Period::Half => PI,
        }
    }

    fn points(self, cfg: &ThetaSweepConfig) -> usize {
        match self {
            Period::Full => cfg.grid_points,
            Period::Half => cfg.grid_points / 2,
        }
    }
}

/// How far the true optimum may exceed the best grid value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Margin {
    Lipschitz(f64),
    /// The objective is the support function of a convex compact set,
    /// sampled in every direction of the grid (both `theta` and
    /// `theta + pi` for half-period sweeps).
    Support,
}

impl Margin {
    fn width(self, best: f64, h: f64) -> f64 {
        match self {
            Margin::Lipschitz(l) => l.abs() * h,
            // Twice the geometric bound, plus round-off headroom.
            Margin::Support => {
                2.0 * best.abs() * (1.0 / (0.5 * h).cos() - 1.0) + 1e-14 * best.abs()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Optimum {
    pub theta: f64,
    pub value: f64,
}

/// Maximizes a periodic objective. Ties resolve to the smallest angle, and
/// evaluation order is fixed, so results are bit-stable.
pub(crate) fn maximize(
    f: impl Fn(f64) -> f64,
    period: Period,
    lipschitz: f64,
    cfg: &ThetaSweepConfig,
) -> Optimum {
    maximize_with(f, period, Margin::Lipschitz(lipschitz), cfg)
}

pub(crate) fn maximize_with(
    f: impl Fn(f64) -> f64,
    period: Period,
    margin: Margin,
    cfg: &ThetaSweepConfig,
) -> Optimum {
    let len = period.length();
    let n = period.points(cfg);
    let h = len / n as f64;
    let values: Vec<f64> = (0..n).map(|j| f(j as f64 * h)).collect();

    let mut best = Optimum {
        theta: 0.0,
        value: values[0],
    };
    for (j, &v) in values.iter().enumerate() {
        if v > best.value {
            best = Optimum {
                theta: j as f64 * h,
                value: v,
            };
        }
    }

    let width = margin.width(best.value, h);
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&j| {
            let prev = values[(j + n - 1) % n];
            let next = values[(j + 1) % n];
            let local = values[j] > prev && values[j] >= next;
            local && values[j] >= best.value - width
        })
        .collect();
    let best_idx = (best.theta / h).round() as usize % n;
    if !candidates.contains(&best_idx) {
        candidates.push(best_idx);
    }
    candidates.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    candidates.truncate(MAX_CANDIDATES);

    for j in candidates {
        let center = j as f64 * h;
        let local = brent_max(&f, center - h, center + h, cfg);
        let theta = local.theta.rem_euclid(len);
        if local.value > best.value || (local.value == best.value && theta < best.theta) {
            best = Optimum {
                theta,
                value: local.value,
            };
        }
    }
    best
}

pub(crate) fn minimize(
    f: impl Fn(f64) -> f64,
    period: Period,
    lipschitz: f64,
    cfg: &ThetaSweepConfig,
) -> Optimum {
    let opt = maximize(|t| -f(t), period, lipschitz, cfg);
    Optimum {
        theta: opt.theta,
        value: -opt.value,
    }
}

/// Brent's method (golden section with parabolic steps) for a maximum on
/// `[lo, hi]`.
fn brent_max(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, cfg: &ThetaSweepConfig) -> Optimum {
    const CGOLD: f64 = 1.0 - GOLDEN;
    let g = |t: f64| -f(t);
    let (mut a, mut b) = (lo, hi);
    let mut x = 0.5 * (a + b);
    let (mut w, mut v) = (x, x);
    let mut fx = g(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..cfg.max_refine_iters {
        let xm = 0.5 * (a + b);
        let tol1 = 0.5 * cfg.refine_tol + f64::EPSILON * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = g(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Optimum {
        theta: x,
        value: -fx,
    }
}
