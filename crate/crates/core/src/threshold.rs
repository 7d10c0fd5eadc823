//! Threshold functions of mixed random hypergraphs and the auxiliary
//! functions `f`, `g`, `h` whose shape drives the two-size optimization.
//!
//! Notation: a mixture of two edge sizes `a < b` puts a fraction `alpha` of
//! the edges at size `a`. The threshold in the `z = 1 - exp(-λ)` coordinate is
//!
//! ```text
//! T(z, a, b, α) = -ln(1 - z) / (α·a·z^(a-1) + (1-α)·b·z^(b-1))
//! ```
//!
//! and the 2-core threshold of the mixture is its minimum over `z ∈ (0, 1)`.

use alloc::vec::Vec;
use thiserror::Error;

use crate::numerics::{bisect_root, Bracket, NumericsError};

/// Fraction sums must equal one within this tolerance.
pub const FRACTION_SUM_TOL: f64 = 1e-12;
/// `g_min` below this counts as negative; a zero minimum is treated as non-negative.
pub const G_NEGATIVE_TOL: f64 = -1e-12;
/// Bracket used when locating the minimizer of `g`.
const Z_G_LO: f64 = 1e-9;
const Z_G_HI: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThresholdError {
    #[error("argument {0} outside the domain (0, 1)")]
    Domain(f64),
    #[error("fraction alpha = {0} outside [0, 1]")]
    Fraction(f64),
    #[error("lambda = {0} must be positive and finite")]
    Lambda(f64),
    #[error("pole of h at z = {0}")]
    Pole(f64),
    #[error("edge sizes must satisfy 3 <= a < b, got a = {a}, b = {b}")]
    Sizes { a: u32, b: u32 },
    #[error("invalid edge mixture: {0}")]
    Mix(&'static str),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Edge sizes together with the fraction of edges of each size.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMix {
    sizes: Vec<u32>,
    fractions: Vec<f64>,
}

impl EdgeMix {
    /// Sizes must be strictly increasing and at least 3, fractions
    /// non-negative with a positive first entry and summing to one.
    pub fn new(sizes: Vec<u32>, fractions: Vec<f64>) -> Result<Self, ThresholdError> {
        if sizes.is_empty() || sizes.len() != fractions.len() {
            return Err(ThresholdError::Mix("sizes and fractions must be non-empty and of equal length"));
        }
        if sizes[0] < 3 {
            return Err(ThresholdError::Mix("edge sizes must be at least 3"));
        }
        if sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ThresholdError::Mix("edge sizes must be strictly increasing"));
        }
        if fractions.iter().any(|&f| !(0.0..=1.0).contains(&f)) || !(fractions[0] > 0.0) {
            return Err(ThresholdError::Mix("fractions must lie in [0, 1] with a positive first entry"));
        }
        let total: f64 = fractions.iter().sum();
        if libm::fabs(total - 1.0) > FRACTION_SUM_TOL {
            return Err(ThresholdError::Mix("fractions must sum to 1"));
        }
        Ok(Self { sizes, fractions })
    }

    pub fn uniform(k: u32) -> Result<Self, ThresholdError> {
        Self::new(alloc::vec![k], alloc::vec![1.0])
    }

    /// Two sizes `a < b` with fraction `alpha` at size `a`. `a == b` collapses
    /// to the uniform mixture.
    pub fn pair(a: u32, b: u32, alpha: f64) -> Result<Self, ThresholdError> {
        if a == b {
            return Self::uniform(a);
        }
        if alpha == 1.0 {
            // keep b so the mixture still describes the pair
            return Self::new(alloc::vec![a, b], alloc::vec![1.0, 0.0]);
        }
        Self::new(alloc::vec![a, b], alloc::vec![alpha, 1.0 - alpha])
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn max_size(&self) -> u32 {
        *self.sizes.last().expect("non-empty mixture")
    }

    /// Average edge size `Σ α_i·k_i`.
    pub fn avg_edge_size(&self) -> f64 {
        self.sizes.iter().zip(&self.fractions).map(|(&k, &a)| a * k as f64).sum()
    }
}

fn check_unit(z: f64) -> Result<(), ThresholdError> {
    if z > 0.0 && z < 1.0 {
        Ok(())
    } else {
        Err(ThresholdError::Domain(z))
    }
}

fn check_sizes(a: u32, b: u32) -> Result<(), ThresholdError> {
    if a >= 3 && b > a {
        Ok(())
    } else {
        Err(ThresholdError::Sizes { a, b })
    }
}

/// `ln(1 - z)` without cancellation for small `z`.
#[inline]
fn ln_one_minus(z: f64) -> f64 {
    libm::log1p(-z)
}

#[inline]
fn f_unchecked(z: f64) -> f64 {
    if z < 1e-8 {
        1.0 - 0.5 * z
    } else {
        -ln_one_minus(z) * (1.0 - z) / z
    }
}

/// `f(z) = -ln(1 - z)·(1 - z) / z`, strictly decreasing from 1 to 0 on `(0, 1)`.
pub fn aux_f(z: f64) -> Result<f64, ThresholdError> {
    check_unit(z)?;
    Ok(f_unchecked(z))
}

#[inline]
fn g_unchecked(z: f64, a: u32, b: u32) -> f64 {
    let p = ((b - 1) * (a - 1)) as f64;
    f_unchecked(z) * p + 1.0 / (1.0 - z) + 2.0 - b as f64 - a as f64
}

/// `g(z, a, b) = f(z)·(b-1)·(a-1) + 1/(1-z) + 2 - b - a`
pub fn aux_g(z: f64, a: u32, b: u32) -> Result<f64, ThresholdError> {
    check_unit(z)?;
    check_sizes(a, b)?;
    Ok(g_unchecked(z, a, b))
}

#[inline]
fn g_deriv_unchecked(z: f64, a: u32, b: u32) -> f64 {
    let p = ((b - 1) * (a - 1)) as f64;
    // ln(1-z)·p/z² + p/z, grouped to limit cancellation near 0
    let lead = if z < 1e-4 {
        // ln(1-z) + z = -z²/2 - z³/3 - z⁴/4 - ...
        -(0.5 + z / 3.0 + z * z / 4.0 + z * z * z / 5.0)
    } else {
        (ln_one_minus(z) + z) / (z * z)
    };
    p * lead + 1.0 / ((1.0 - z) * (1.0 - z))
}

/// `∂g/∂z = ln(1-z)·(b-1)(a-1)/z² + 1/(1-z)² + (b-1)(a-1)/z`
pub fn aux_g_deriv(z: f64, a: u32, b: u32) -> Result<f64, ThresholdError> {
    check_unit(z)?;
    check_sizes(a, b)?;
    Ok(g_deriv_unchecked(z, a, b))
}

fn h_unchecked(z: f64, a: u32, b: u32) -> Result<f64, ThresholdError> {
    let (af, bf) = (a as f64, b as f64);
    let f = f_unchecked(z);
    let zp = libm::pow(z, af - bf);
    let num = af * zp - bf - f * (af * (af - 1.0) * zp - bf * (bf - 1.0));
    let den = bf * ((bf - 1.0) * f - 1.0);
    if libm::fabs(den) < 1e-300 {
        return Err(ThresholdError::Pole(z));
    }
    Ok(num / den)
}

/// `h(z, a, b)`: the reciprocal of the fraction `α` at which `z` is a
/// critical point of `T(·, a, b, α)`. Has a pole at `z_r`.
pub fn aux_h(z: f64, a: u32, b: u32) -> Result<f64, ThresholdError> {
    check_unit(z)?;
    check_sizes(a, b)?;
    h_unchecked(z, a, b)
}

#[inline]
fn t_unchecked(z: f64, a: u32, b: u32, alpha: f64) -> f64 {
    let (af, bf) = (a as f64, b as f64);
    let small = alpha * af * libm::pow(z, af - 1.0);
    let large = if alpha < 1.0 { (1.0 - alpha) * bf * libm::pow(z, bf - 1.0) } else { 0.0 };
    -ln_one_minus(z) / (small + large)
}

/// Transformed threshold `T(z, a, b, α)`.
pub fn threshold_t(z: f64, a: u32, b: u32, alpha: f64) -> Result<f64, ThresholdError> {
    check_unit(z)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ThresholdError::Fraction(alpha));
    }
    if a < 3 || b < a {
        return Err(ThresholdError::Sizes { a, b });
    }
    Ok(t_unchecked(z, a, b, alpha))
}

/// `t(λ, k, α) = λ / Σ α_i·k_i·(1 - e^(-λ))^(k_i - 1)` for any mixture.
pub fn threshold_t_general(lambda: f64, mix: &EdgeMix) -> Result<f64, ThresholdError> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(ThresholdError::Lambda(lambda));
    }
    let p = -libm::expm1(-lambda);
    let denom: f64 = mix
        .sizes
        .iter()
        .zip(&mix.fractions)
        .filter(|(_, &alpha)| alpha > 0.0)
        .map(|(&k, &alpha)| alpha * k as f64 * libm::pow(p, k as f64 - 1.0))
        .sum();
    Ok(lambda / denom)
}

/// The points that partition `(0, 1)` for a given pair of sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialPoints {
    /// `(a/b)^(1/(b-a))`, the saddle candidate.
    pub z_prime: f64,
    /// `f⁻¹(1/(a-1))`
    pub z_l: f64,
    /// `f⁻¹(1/(b-1))`, the pole of `h`.
    pub z_r: f64,
    /// Minimizer of `g`.
    pub z_g: f64,
    pub g_min: f64,
    /// Smallest root of `g`, present iff `g_min < 0`.
    pub z_1: Option<f64>,
    /// Largest root of `g`, present iff `g_min < 0`.
    pub z_2: Option<f64>,
}

impl SpecialPoints {
    pub fn g_negative(&self) -> bool {
        self.z_1.is_some()
    }
}

/// `f⁻¹(target)` on `(lo, 1)`, bisected down to adjacent floats since h is
/// steep near z_l for large b.
pub fn f_inverse(target: f64, lo: f64) -> Result<f64, ThresholdError> {
    let b = Bracket::unit(lo, 1.0)?;
    Ok(bisect_root(|z| f_unchecked(z) - target, Bracket::new(b.lo, b.hi, 1e-17)?)?)
}

/// `(a/b)^(1/(b-a))`
pub fn z_prime(a: u32, b: u32) -> f64 {
    libm::exp((libm::log(a as f64) - libm::log(b as f64)) / (b - a) as f64)
}

/// Minimizer of `g(·, a, b)` and the minimum value.
pub fn g_minimum(a: u32, b: u32) -> Result<(f64, f64), ThresholdError> {
    check_sizes(a, b)?;
    let z_g = bisect_root(|z| g_deriv_unchecked(z, a, b), Bracket::new(Z_G_LO, Z_G_HI, crate::numerics::DEFAULT_TOL)?)?;
    Ok((z_g, g_unchecked(z_g, a, b)))
}

pub fn special_points(a: u32, b: u32) -> Result<SpecialPoints, ThresholdError> {
    check_sizes(a, b)?;
    let z_l = f_inverse(1.0 / (a - 1) as f64, 0.0)?;
    let z_r = f_inverse(1.0 / (b - 1) as f64, z_l)?;
    let (z_g, g_min) = g_minimum(a, b)?;
    let (z_1, z_2) = if g_min < G_NEGATIVE_TOL {
        let g = |z: f64| g_unchecked(z, a, b);
        let z_1 = bisect_root(g, Bracket::unit(z_l, z_g)?)?;
        let z_2 = bisect_root(g, Bracket::unit(z_g, z_r)?)?;
        (Some(z_1), Some(z_2))
    } else {
        (None, None)
    };
    Ok(SpecialPoints { z_prime: z_prime(a, b), z_l, z_r, z_g, g_min, z_1, z_2 })
}
