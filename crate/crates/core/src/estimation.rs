//! Deterministic kernel shared by the engine and the harness: amplitude and
//! angle conversions, Grover-amplified probabilities, the quadrant-aware
//! inversion `gamma`, Chernoff-Hoeffding half-widths and shot budgets.
//!
//! Everything here is a pure function of its arguments.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{IqaeError, Result};

/// Floating-point dust tolerated at the edges of `[0, 1]` before an
/// argument is rejected outright.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// `2 / (sin²(π/21) · sin²(8π/21))`, the prefactor of the per-round shot budget.
pub fn shot_budget_constant() -> f64 {
    let s1 = (PI / 21.0).sin();
    let s8 = (8.0 * PI / 21.0).sin();
    2.0 / (s1 * s1 * s8 * s8)
}

fn clamp_unit(name: &'static str, value: f64) -> Result<f64> {
    if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&value) {
        return Err(IqaeError::domain(name, value, "[0, 1]"));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Amplitude(f64);

impl Amplitude {
    pub const ZERO: Amplitude = Amplitude(0.0);
    pub const ONE: Amplitude = Amplitude(1.0);

    /// Values within [`DOMAIN_SLACK`] of the unit interval are clamped into it;
    /// anything further out (or NaN) is a domain error.
    pub fn new(value: f64) -> Result<Self> {
        clamp_unit("amplitude", value).map(Amplitude)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// An angle in `[0, π/2]` radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub fn new(value: f64) -> Result<Self> {
        if !(-DOMAIN_SLACK..=FRAC_PI_2 + DOMAIN_SLACK).contains(&value) {
            return Err(IqaeError::domain("angle", value, "[0, pi/2]"));
        }
        Ok(Angle(value.clamp(0.0, FRAC_PI_2)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalDomain {
    Amplitude,
    Angle,
}

/// Closed interval `[lo, hi]` over amplitudes or angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
    pub domain: IntervalDomain,
}

impl ConfidenceInterval {
    pub fn new(lo: f64, hi: f64, domain: IntervalDomain) -> Result<Self> {
        let upper = match domain {
            IntervalDomain::Amplitude => 1.0,
            IntervalDomain::Angle => FRAC_PI_2,
        };
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(IqaeError::domain("interval lower end", lo, "lo <= hi"));
        }
        if lo < -DOMAIN_SLACK || hi > upper + DOMAIN_SLACK {
            return Err(IqaeError::domain(
                "interval end",
                if lo < 0.0 { lo } else { hi },
                "inside the interval's domain",
            ));
        }
        Ok(ConfidenceInterval { lo, hi, domain })
    }

    /// Sorts the two ends; used where the caller knows both ends are in range.
    fn sorted(x: f64, y: f64, domain: IntervalDomain) -> Self {
        ConfidenceInterval {
            lo: x.min(y),
            hi: x.max(y),
            domain,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// `θ_a = arcsin(√a)`.
pub fn theta_of_amplitude(a: Amplitude) -> Angle {
    Angle(a.0.sqrt().asin())
}

/// `sin²θ`, the inverse of [`theta_of_amplitude`].
pub fn amplitude_of_theta(theta: Angle) -> Amplitude {
    let s = theta.0.sin();
    Amplitude((s * s).min(1.0))
}

/// Probability of measuring the good state after `k` Grover iterations:
/// `sin²((2k+1) θ_a)`.
pub fn grover_amplitude(a: Amplitude, k: u64) -> Amplitude {
    if k == 0 {
        return a;
    }
    let s = ((2 * k + 1) as f64 * theta_of_amplitude(a).0).sin();
    Amplitude((s * s).min(1.0))
}

#[inline]
fn gamma_raw(a_prime: f64, r: u64) -> f64 {
    let g = a_prime.sqrt().asin();
    if r.is_multiple_of(2) {
        g
    } else {
        FRAC_PI_2 - g
    }
}

/// Inverts a measured probability back to an angle inside quadrant `r`:
/// `arcsin(√a′)` for even `r`, `π/2 − arcsin(√a′)` for odd `r`.
pub fn gamma(a_prime: Amplitude, r: u64) -> Angle {
    Angle(gamma_raw(a_prime.0, r))
}

fn check_alpha_i(alpha_i: f64) -> Result<()> {
    if alpha_i > 0.0 && alpha_i < 2.0 {
        Ok(())
    } else {
        Err(IqaeError::domain("alpha_i", alpha_i, "(0, 2)"))
    }
}

/// Chernoff-Hoeffding half-width `√(ln(2/α_i) / 2n)`.
pub fn hoeffding_halfwidth(n: u64, alpha_i: f64) -> Result<f64> {
    if n == 0 {
        return Err(IqaeError::domain("n", 0.0, "n >= 1"));
    }
    check_alpha_i(alpha_i)?;
    Ok(((2.0 / alpha_i).ln() / (2.0 * n as f64)).sqrt())
}

/// Per-round shot budget `⌈C · ln(2/α_i)⌉`, see [`shot_budget_constant`].
pub fn max_shots(alpha_i: f64) -> Result<u64> {
    check_alpha_i(alpha_i)?;
    let budget = (shot_budget_constant() * (2.0 / alpha_i).ln()).ceil();
    Ok((budget as u64).max(1))
}

/// `K_max = π / 4ε`, kept real-valued.
pub fn k_max(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(IqaeError::domain("epsilon", epsilon, "(0, 1)"));
    }
    Ok(PI / (4.0 * epsilon))
}

/// Confidence budget of a round with `K = 2k+1`: `(2α/3)(K / K_max)`.
pub fn round_alpha(big_k: u64, k_max_value: f64, alpha: f64) -> Result<f64> {
    if big_k == 0 {
        return Err(IqaeError::domain("K", 0.0, "K >= 1"));
    }
    if k_max_value.is_nan() || k_max_value <= 0.0 {
        return Err(IqaeError::domain("K_max", k_max_value, "K_max > 0"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(IqaeError::domain("alpha", alpha, "(0, 1)"));
    }
    Ok((2.0 * alpha / 3.0) * (big_k as f64 / k_max_value))
}

/// Fixed parameters of one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundParams {
    k: u64,
    big_k: u64,
    alpha_i: f64,
    n_max: u64,
    quadrant: u64,
    log_term: f64,
}

impl RoundParams {
    pub fn new(k: u64, alpha_i: f64, quadrant: u64) -> Result<Self> {
        let big_k = 2 * k + 1;
        if quadrant > big_k {
            return Err(IqaeError::domain(
                "quadrant index",
                quadrant as f64,
                "R <= 2k + 1",
            ));
        }
        let n_max = max_shots(alpha_i)?;
        Ok(RoundParams {
            k,
            big_k,
            alpha_i,
            n_max,
            quadrant,
            log_term: (2.0 / alpha_i).ln(),
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// `K = 2k + 1`.
    pub fn big_k(&self) -> u64 {
        self.big_k
    }

    pub fn alpha_i(&self) -> f64 {
        self.alpha_i
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// Quadrant index `R`.
    pub fn quadrant(&self) -> u64 {
        self.quadrant
    }
}

/// Everything derived from the counts `(n1, n)` of one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundEstimate {
    /// MLE of the amplified probability, `n1 / n`.
    pub a_hat_k: f64,
    pub theta_hat: f64,
    pub a_hat: f64,
    pub ci_a_k: ConfidenceInterval,
    pub ci_theta: ConfidenceInterval,
    pub ci_a: ConfidenceInterval,
    /// Estimated accuracy `max(â − a_lo, a_hi − â)`.
    pub delta_a: f64,
}

/// Maps the counts of a round to point estimates and intervals for `a_k`,
/// `θ_a` and `a`.
///
/// The angle interval is returned sorted: for odd `R` the inversion `gamma`
/// is decreasing, so the image of the lower end of the `a_k` interval is the
/// upper end of the angle interval.
pub fn ci_from_counts(n1: u64, n: u64, params: &RoundParams) -> Result<RoundEstimate> {
    if n == 0 {
        return Err(IqaeError::domain("n", 0.0, "n >= 1"));
    }
    if n1 > n {
        return Err(IqaeError::domain("n1", n1 as f64, "n1 <= n"));
    }
    Ok(estimate_unchecked(n1, n, params))
}

#[inline]
pub(crate) fn estimate_unchecked(n1: u64, n: u64, params: &RoundParams) -> RoundEstimate {
    let nf = n as f64;
    let a_hat_k = n1 as f64 / nf;
    let half = (params.log_term / (2.0 * nf)).sqrt();
    let lo_k = (a_hat_k - half).max(0.0);
    let hi_k = (a_hat_k + half).min(1.0);

    let r = params.quadrant;
    let offset = r as f64 * FRAC_PI_2;
    let big_k = params.big_k as f64;
    let theta_hat = (offset + gamma_raw(a_hat_k, r)) / big_k;
    let theta_from_lo = (offset + gamma_raw(lo_k, r)) / big_k;
    let theta_from_hi = (offset + gamma_raw(hi_k, r)) / big_k;
    let ci_theta = ConfidenceInterval::sorted(theta_from_lo, theta_from_hi, IntervalDomain::Angle);

    let sin2 = |t: f64| {
        let s = t.sin();
        s * s
    };
    let a_hat = sin2(theta_hat);
    let ci_a = ConfidenceInterval::sorted(
        sin2(ci_theta.lo),
        sin2(ci_theta.hi),
        IntervalDomain::Amplitude,
    );
    let delta_a = (a_hat - ci_a.lo).max(ci_a.hi - a_hat);

    RoundEstimate {
        a_hat_k,
        theta_hat,
        a_hat,
        ci_a_k: ConfidenceInterval {
            lo: lo_k,
            hi: hi_k,
            domain: IntervalDomain::Amplitude,
        },
        ci_theta,
        ci_a,
        delta_a,
    }
}

/// Quadrant index `⌊K θ / (π/2)⌋` of an angle scaled by `K`.
pub fn quadrant_index(big_k: u64, theta: f64) -> u64 {
    let q = (big_k as f64 * theta / FRAC_PI_2).floor();
    if q <= 0.0 {
        0
    } else {
        q as u64
    }
}
