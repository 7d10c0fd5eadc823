//! Maximizing the 2-core threshold over the fraction of small edges.
//!
//! For two sizes `a < b` the optimum `max_α min_z T(z, a, b, α)` falls into
//! one of three regimes, decided by the sign of `min g` and the position of
//! `h(z')` relative to `1`, `h(z_2)` and `h(z_1)`:
//!
//! * `α* = 1` at `z_l` (the pure `a`-uniform graph is already optimal),
//! * the closed-form saddle point at `z' = (a/b)^(1/(b-a))`,
//! * two equal minima `z** < z*` with `1/α* = h(z*) = h(z**)`, located by
//!   bisection on `α` until `T(z*, α) = T(z**, α)`.

use alloc::vec::Vec;
use thiserror::Error;

use crate::numerics::{bisect_root, minimize_1d, Bracket, DEFAULT_TOL};
use crate::threshold::{
    aux_f, aux_h, f_inverse, special_points, threshold_t, threshold_t_general, EdgeMix, SpecialPoints, ThresholdError,
};

/// Default stopping criterion for the `α` bisection.
pub const DEFAULT_EPS: f64 = 1e-11;
/// Upper end of the `λ` search range for arbitrary mixtures.
pub const LAMBDA_MAX: f64 = 50.0;
/// Grid cells scanned before refining the minimum over `λ`.
pub const LAMBDA_GRID: usize = 1000;
/// Largest `b` accepted by [`optimize_pair`].
pub const MAX_EDGE_SIZE: u32 = 1000;

const TIE_TOL: f64 = 1e-9;
const POLE_GAP: f64 = 1e-12;
const MAX_HALVINGS: u32 = 200;
/// Scan limit for [`b_prime`].
const B_PRIME_SCAN_LIMIT: u32 = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("invalid edge sizes a = {a}, b = {b} (need 3 <= a <= b <= {max})", max = MAX_EDGE_SIZE)]
    InvalidSizes { a: u32, b: u32 },
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("alpha bisection for ({a}, {b}) stalled with |T(z*) - T(z**)| = {gap:e} after {steps} steps")]
    SearchStalled { a: u32, b: u32, gap: f64, steps: u32 },
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
}

impl From<crate::numerics::NumericsError> for OptimizeError {
    fn from(e: crate::numerics::NumericsError) -> Self {
        Self::Threshold(ThresholdError::Numerics(e))
    }
}

/// Which branch of the case analysis produced an [`Optimum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    DegenerateAlphaOne,
    SaddlePoint,
    BinarySearch,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::DegenerateAlphaOne => "degenerate_alpha_one",
            CaseLabel::SaddlePoint => "saddle_point",
            CaseLabel::BinarySearch => "binary_search",
        }
    }
}

impl core::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Solved optimum for a pair of edge sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub a: u32,
    pub b: u32,
    pub case_label: CaseLabel,
    pub z_star: f64,
    pub lambda_star: f64,
    pub alpha_star: f64,
    pub c_star: f64,
    pub avg_edge_size: f64,
    /// The left optimum `z**` when two minima coexist.
    pub z_star_second: Option<f64>,
    /// Halvings spent in the `α` bisection (zero for closed forms).
    pub search_steps: u32,
}

impl Optimum {
    fn new(a: u32, b: u32, case_label: CaseLabel, z_star: f64, alpha_star: f64, c_star: f64) -> Self {
        Self {
            a,
            b,
            case_label,
            z_star,
            lambda_star: -libm::log1p(-z_star),
            alpha_star,
            c_star,
            avg_edge_size: alpha_star * a as f64 + (1.0 - alpha_star) * b as f64,
            z_star_second: None,
            search_steps: 0,
        }
    }

    /// The optimal mixture `((a, b), (α*, 1 - α*))`.
    pub fn mix(&self) -> Result<EdgeMix, ThresholdError> {
        EdgeMix::pair(self.a, self.b, self.alpha_star)
    }
}

fn uniform_from_z_l(a: u32, b: u32, z_l: f64) -> Optimum {
    let c = -libm::log1p(-z_l) / (a as f64 * libm::pow(z_l, (a - 1) as f64));
    Optimum::new(a, b, CaseLabel::DegenerateAlphaOne, z_l, 1.0, c)
}

/// Threshold of the `k`-uniform hypergraph, `-ln(1 - z_l) / (k·z_l^(k-1))`.
pub fn uniform_threshold(k: u32) -> Result<Optimum, OptimizeError> {
    if !(3..=MAX_EDGE_SIZE).contains(&k) {
        return Err(OptimizeError::InvalidSizes { a: k, b: k });
    }
    let z_l = f_inverse(1.0 / (k - 1) as f64, 0.0)?;
    Ok(uniform_from_z_l(k, k, z_l))
}

fn saddle(a: u32, b: u32, z: f64) -> Result<Optimum, OptimizeError> {
    let (af, bf) = (a as f64, b as f64);
    let span = bf - af;
    let alpha = (bf - 1.0) / span - 1.0 / (aux_f(z)? * span);
    // -ln(1 - z')·(b^(a-1) / a^(b-1))^(1/(b-a)), in logs
    let scale = libm::exp(((af - 1.0) * libm::log(bf) - (bf - 1.0) * libm::log(af)) / span);
    let c = -libm::log1p(-z) * scale;
    Ok(Optimum::new(a, b, CaseLabel::SaddlePoint, z, alpha, c))
}

/// Optimal fraction of size-`a` edges and the resulting 2-core threshold.
///
/// `eps` bounds `|T(z*, α) - T(z**, α)|` in the two-minima regime.
pub fn optimize_pair(a: u32, b: u32, eps: f64) -> Result<Optimum, OptimizeError> {
    if a < 3 || b < a || b > MAX_EDGE_SIZE {
        return Err(OptimizeError::InvalidSizes { a, b });
    }
    if !(eps > 0.0) {
        return Err(OptimizeError::InvalidEpsilon(eps));
    }
    if a == b {
        return uniform_threshold(a);
    }
    let sp = special_points(a, b)?;
    solve_with_points(a, b, eps, &sp)
}

fn solve_with_points(a: u32, b: u32, eps: f64, sp: &SpecialPoints) -> Result<Optimum, OptimizeError> {
    let z_p = sp.z_prime;
    let h_p = aux_h(z_p, a, b)?;
    if h_p <= 1.0 {
        return Ok(uniform_from_z_l(a, b, sp.z_l));
    }
    let (z_1, z_2) = match (sp.z_1, sp.z_2) {
        (Some(z_1), Some(z_2)) => (z_1, z_2),
        _ => return saddle(a, b, z_p),
    };
    let h_1 = aux_h(z_1, a, b)?;
    let h_2 = aux_h(z_2, a, b)?;
    // closed endpoints belong to the saddle branch
    if h_p <= h_2 + TIE_TOL || h_p >= h_1 - TIE_TOL {
        return saddle(a, b, z_p);
    }
    search_two_minima(a, b, eps, sp, z_1, z_2)
}

fn search_two_minima(
    a: u32,
    b: u32,
    eps: f64,
    sp: &SpecialPoints,
    z_1: f64,
    z_2: f64,
) -> Result<Optimum, OptimizeError> {
    let z_p = sp.z_prime;
    let u = if z_p < z_1 { z_p } else { z_1 };
    let l = if z_p > z_2 { z_p } else { z_2 };
    let mut alpha_min = 1.0 / aux_h(u, a, b)?;
    let mut alpha_max = 1.0 / aux_h(l, a, b)?;

    let left = Bracket::new(sp.z_l + POLE_GAP, u, DEFAULT_TOL)?;
    let right = Bracket::new(l, sp.z_r - POLE_GAP, DEFAULT_TOL)?;
    let h = |z: f64| aux_h(z, a, b).unwrap_or(f64::NAN);

    let mut steps = 0;
    loop {
        steps += 1;
        let alpha = alpha_min + 0.5 * (alpha_max - alpha_min);
        let target = 1.0 / alpha;
        let z_left = bisect_root(|z| h(z) - target, left)?;
        let z_right = bisect_root(|z| h(z) - target, right)?;
        let t_left = threshold_t(z_left, a, b, alpha)?;
        let t_right = threshold_t(z_right, a, b, alpha)?;
        let gap = libm::fabs(t_right - t_left);
        let exhausted = alpha <= alpha_min || alpha >= alpha_max || steps >= MAX_HALVINGS;
        if gap < eps || exhausted {
            if gap >= eps && gap > TIE_TOL {
                return Err(OptimizeError::SearchStalled { a, b, gap, steps });
            }
            let mut opt = Optimum::new(a, b, CaseLabel::BinarySearch, z_right, alpha, t_right);
            opt.z_star_second = Some(z_left);
            opt.search_steps = steps;
            return Ok(opt);
        }
        // raising α lifts the right minimum and lowers the left one
        if t_right < t_left {
            alpha_min = alpha;
        } else {
            alpha_max = alpha;
        }
    }
}

/// `min_{λ ∈ (0, Λ]} t(λ, mix)` for an arbitrary mixture, returned as `(λ, c*)`.
///
/// A uniform grid locates the cell holding the global minimum, then
/// golden-section search refines inside the neighbouring cells.
pub fn general_threshold_at(mix: &EdgeMix) -> Result<(f64, f64), OptimizeError> {
    let step = LAMBDA_MAX / LAMBDA_GRID as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 1..=LAMBDA_GRID {
        let t = threshold_t_general(step * i as f64, mix)?;
        if t < best.1 {
            best = (i, t);
        }
    }
    let lo = if best.0 > 1 { step * (best.0 - 1) as f64 } else { step * 1e-3 };
    let hi = step * (best.0 + 1).min(LAMBDA_GRID) as f64;
    let (lambda, value) =
        minimize_1d(|l| threshold_t_general(l, mix).unwrap_or(f64::INFINITY), Bracket::new(lo, hi, DEFAULT_TOL)?)?;
    if value <= best.1 {
        Ok((lambda, value))
    } else {
        Ok((step * best.0 as f64, best.1))
    }
}

/// 2-core threshold `c*(k, α)` of an arbitrary mixture.
pub fn general_threshold(mix: &EdgeMix) -> Result<f64, OptimizeError> {
    general_threshold_at(mix).map(|(_, c)| c)
}

/// Smallest `b > a` for which `min_z g(z, a, b) < 0`.
pub fn b_prime(a: u32) -> Result<u32, OptimizeError> {
    if !(3..=64).contains(&a) {
        return Err(OptimizeError::InvalidSizes { a, b: a });
    }
    for b in (a + 1)..B_PRIME_SCAN_LIMIT {
        let (_, g_min) = crate::threshold::g_minimum(a, b)?;
        if g_min < crate::threshold::G_NEGATIVE_TOL {
            return Ok(b);
        }
    }
    Err(OptimizeError::InvalidSizes { a, b: B_PRIME_SCAN_LIMIT })
}

/// One [`Optimum`] per `b ∈ [a, b_max]`.
pub fn table_scan(a: u32, b_max: u32) -> Result<Vec<Optimum>, OptimizeError> {
    table_scan_eps(a, b_max, DEFAULT_EPS)
}

pub fn table_scan_eps(a: u32, b_max: u32, eps: f64) -> Result<Vec<Optimum>, OptimizeError> {
    if a < 3 || b_max < a || b_max > MAX_EDGE_SIZE {
        return Err(OptimizeError::InvalidSizes { a, b: b_max });
    }
    let mut rows = Vec::with_capacity((b_max - a + 1) as usize);
    rows.push(uniform_threshold(a)?);
    let mut past_b_prime = false;
    for b in (a + 1)..=b_max {
        let mut sp = special_points(a, b)?;
        if past_b_prime && sp.z_1.is_none() {
            // g stays negative once b reaches b'; only the roots are needed
            let g = |z: f64| crate::threshold::aux_g(z, a, b).unwrap_or(f64::NAN);
            sp.z_1 = Some(bisect_root(g, Bracket::unit(sp.z_l, sp.z_g)?)?);
            sp.z_2 = Some(bisect_root(g, Bracket::unit(sp.z_g, sp.z_r)?)?);
        }
        past_b_prime |= sp.z_1.is_some();
        rows.push(solve_with_points(a, b, eps, &sp)?);
    }
    Ok(rows)
}
