//! Scalar root finding, golden-section minimization and a two-parameter
//! Levenberg-Marquardt fit of the logistic sigmoid.
//!
//! Everything here is deterministic and allocation-light; the other modules
//! build on these three primitives.

use alloc::vec::Vec;
use thiserror::Error;

/// Default absolute tolerance for roots and minima on `z ∈ (0, 1)`.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Lower clamp for brackets on the open unit interval.
pub const UNIT_LO: f64 = 1e-12;
/// Upper clamp for brackets on the open unit interval.
pub const UNIT_HI: f64 = 1.0 - 1e-12;

const MAX_BISECT_STEPS: usize = 400;
const MAX_GOLDEN_STEPS: usize = 400;
const LM_MAX_ITER: u32 = 200;
const LM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid bracket [{lo}, {hi}] with tolerance {tol}")]
    InvalidBracket { lo: f64, hi: f64, tol: f64 },
    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("function returned a non-finite value at {at}")]
    NonFinite { at: f64 },
    #[error("need at least 3 points with distinct abscissae, got {0}")]
    InsufficientData(usize),
    #[error("all rates are equal; sigmoid location is unidentifiable")]
    Degenerate { fallback: SigmoidFit },
}

/// A closed search interval together with the absolute tolerance to reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub tol_abs: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64, tol_abs: f64) -> Result<Self, NumericsError> {
        if !(lo < hi) || !(tol_abs > 0.0) || !lo.is_finite() || !hi.is_finite() {
            return Err(NumericsError::InvalidBracket { lo, hi, tol: tol_abs });
        }
        Ok(Self { lo, hi, tol_abs })
    }

    /// Bracket on the open unit interval, clamped to `[1e-12, 1 - 1e-12]`.
    pub fn unit(lo: f64, hi: f64) -> Result<Self, NumericsError> {
        Self::new(lo.max(UNIT_LO), hi.min(UNIT_HI), DEFAULT_TOL)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

fn finite_at(v: f64, at: f64) -> Result<f64, NumericsError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NumericsError::NonFinite { at })
    }
}

/// Bisection on a sign-changing bracket.
///
/// Returns the midpoint of the final bracket once its width is at most
/// `tol_abs` (or once the bracket can no longer be split in `f64`). A zero at
/// either endpoint is returned as-is.
pub fn bisect_root<F>(func: F, bracket: Bracket) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let f_lo = finite_at(func(lo), lo)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = finite_at(func(hi), hi)?;
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(NumericsError::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let lo_negative = f_lo < 0.0;
    for _ in 0..MAX_BISECT_STEPS {
        if hi - lo <= bracket.tol_abs {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = finite_at(func(mid), mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

/// Golden-section search for the minimum of a unimodal function.
///
/// Returns `(argmin, min)`.
pub fn minimize_1d<F>(func: F, bracket: Bracket) -> Result<(f64, f64), NumericsError>
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = finite_at(func(x1), x1)?;
    let mut f2 = finite_at(func(x2), x2)?;
    for _ in 0..MAX_GOLDEN_STEPS {
        if hi - lo <= bracket.tol_abs {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = finite_at(func(x1), x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = finite_at(func(x2), x2)?;
        }
    }
    // the best of the interior probes and the final midpoint
    let mid = lo + 0.5 * (hi - lo);
    let f_mid = finite_at(func(mid), mid)?;
    let mut best = (mid, f_mid);
    if f1 < best.1 {
        best = (x1, f1);
    }
    if f2 < best.1 {
        best = (x2, f2);
    }
    Ok(best)
}

/// Result of a sigmoid least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmoidFit {
    /// Inflection point.
    pub x: f64,
    /// Width; always positive.
    pub y: f64,
    /// Sum of squared residuals over all input points.
    pub ss_res: f64,
    pub converged: bool,
    pub iterations: u32,
}

/// `σ(c; x, y) = 1 / (1 + exp(-(c - x) / y))`
pub fn sigmoid(c: f64, x: f64, y: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-(c - x) / y))
}

fn sum_sq(points: &[(f64, f64)], x: f64, y: f64) -> f64 {
    points
        .iter()
        .map(|&(c, rate)| {
            let r = sigmoid(c, x, y) - rate;
            r * r
        })
        .sum()
}

/// Fits `σ(c; x, y)` to `(c, rate)` points by Levenberg-Marquardt.
///
/// Damping starts at `1e-3`, grows ×10 on a rejected step and shrinks ×0.1 on
/// an accepted one. Converged when the relative parameter change or the
/// gradient norm drops below `1e-12` within 200 iterations.
pub fn fit_sigmoid(points: &[(f64, f64)], init_x: f64, init_y: f64) -> Result<SigmoidFit, NumericsError> {
    if points.len() < 3 {
        return Err(NumericsError::InsufficientData(points.len()));
    }
    let mut cs: Vec<f64> = points.iter().map(|p| p.0).collect();
    cs.sort_by(f64::total_cmp);
    if cs.windows(2).any(|w| w[0] == w[1]) {
        return Err(NumericsError::InsufficientData(points.len()));
    }
    let first = points[0].1;
    if points.iter().all(|p| p.1 == first) {
        return Err(NumericsError::Degenerate {
            fallback: SigmoidFit {
                x: init_x,
                y: init_y.abs(),
                ss_res: sum_sq(points, init_x, init_y.abs()),
                converged: false,
                iterations: 0,
            },
        });
    }

    let (mut x, mut y) = (init_x, init_y.abs().max(f64::MIN_POSITIVE));
    let mut cost = sum_sq(points, x, y);
    let mut damping = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < LM_MAX_ITER {
        iterations += 1;
        // J^T J and J^T r for r_i = σ_i - rate_i
        let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(c, rate) in points {
            let s = sigmoid(c, x, y);
            let ds = s * (1.0 - s);
            let dx = -ds / y;
            let dy = -ds * (c - x) / (y * y);
            let r = s - rate;
            a11 += dx * dx;
            a12 += dx * dy;
            a22 += dy * dy;
            g1 += dx * r;
            g2 += dy * r;
        }
        if libm::sqrt(g1 * g1 + g2 * g2) < LM_TOL {
            converged = true;
            break;
        }

        let mut stepped = false;
        while damping < 1e30 {
            let m11 = a11 * (1.0 + damping);
            let m22 = a22 * (1.0 + damping);
            let det = m11 * m22 - a12 * a12;
            if det.is_finite() && det != 0.0 {
                let step_x = -(m22 * g1 - a12 * g2) / det;
                let step_y = -(m11 * g2 - a12 * g1) / det;
                let (nx, ny) = (x + step_x, y + step_y);
                if ny > 0.0 {
                    let new_cost = sum_sq(points, nx, ny);
                    if new_cost.is_finite() && new_cost <= cost {
                        let rel =
                            libm::fmax(libm::fabs(step_x) / libm::fmax(libm::fabs(x), 1e-300), libm::fabs(step_y) / ny);
                        x = nx;
                        y = ny;
                        cost = new_cost;
                        damping = libm::fmax(damping * 0.1, 1e-300);
                        stepped = true;
                        if rel < LM_TOL {
                            converged = true;
                        }
                        break;
                    }
                }
            }
            damping *= 10.0;
        }
        if !stepped || converged {
            // no descent direction left at any damping: at a minimum up to rounding
            converged = converged || !stepped;
            break;
        }
    }

    Ok(SigmoidFit { x, y, ss_res: cost, converged, iterations })
}
