//! Closest resonant angle `lπ/(2m)` to `θ_a` with a bounded denominator.
//!
//! With `x = θ_a/(π/2)`, the closest fraction `l/m` with `m ≤ m_max` is one of
//! the two neighbours of `x` in the Farey sequence of order `m_max`. They are
//! found by descending the Stern-Brocot tree, taking whole runs of identical
//! moves at once (each run is one partial quotient of the continued fraction
//! of `x`, so the bracketing fractions are convergents or semiconvergents).

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{IqaeError, Result};
use crate::estimation::{theta_of_amplitude, Amplitude};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub l: u64,
    pub m: u64,
    /// Signed offset `θ_a − lπ/(2m)` in radians.
    pub delta: f64,
}

fn offset(theta: f64, l: u64, m: u64) -> f64 {
    theta - l as f64 * PI / (2.0 * m as f64)
}

/// Farey neighbours `(lo, hi)` of `x ∈ [0, 1]` of order `n`, as
/// `(numerator, denominator)` pairs. When `x` is itself a fraction of order
/// `n`, both neighbours are that fraction.
fn farey_neighbours(x: f64, n: u64) -> ((u64, u64), (u64, u64)) {
    let (mut lp, mut lq) = (0u64, 1u64);
    let (mut rp, mut rq) = (1u64, 1u64);
    if x <= 0.0 {
        return ((0, 1), (0, 1));
    }
    if x >= 1.0 {
        return ((1, 1), (1, 1));
    }
    loop {
        let (mp, mq) = (lp + rp, lq + rq);
        if mq > n {
            return ((lp, lq), (rp, rq));
        }
        let scaled = x * mq as f64;
        let mpf = mp as f64;
        if scaled == mpf {
            return ((mp, mq), (mp, mq));
        }
        if scaled > mpf {
            // left moves towards right: left + t·right while still below x
            let bound = (n - lq) / rq;
            let estimate = (x * lq as f64 - lp as f64) / (rp as f64 - x * rq as f64);
            let mut t = (estimate.floor().max(1.0) as u64).min(bound).max(1);
            while t > 1 && x * (lq + t * rq) as f64 <= (lp + t * rp) as f64 {
                t -= 1;
            }
            lp += t * rp;
            lq += t * rq;
        } else {
            // right moves towards left: right + t·left while still above x
            let bound = (n - rq) / lq;
            let estimate = (rp as f64 - x * rq as f64) / (x * lq as f64 - lp as f64);
            let mut t = (estimate.floor().max(1.0) as u64).min(bound).max(1);
            while t > 1 && x * (rq + t * lq) as f64 >= (rp + t * lp) as f64 {
                t -= 1;
            }
            rp += t * lp;
            rq += t * lq;
        }
    }
}

/// Resonance `θ_a ≈ lπ/(2m)` with coprime `0 < l < m ≤ m_max`, minimising
/// `|θ_a − lπ/(2m)|` (ties go to the smaller `m`).
pub fn detect_resonance(a: Amplitude, m_max: u64) -> Result<Resonance> {
    let av = a.value();
    if !(av > 0.0 && av < 1.0) {
        return Err(IqaeError::domain("a", av, "(0, 1)"));
    }
    if m_max < 2 {
        return Err(IqaeError::domain("m_max", m_max as f64, "m_max >= 2"));
    }
    let theta = theta_of_amplitude(a).value();
    let x = theta / FRAC_PI_2;
    let (lo, hi) = farey_neighbours(x, m_max);

    // 0/1 and 1/1 are not resonances; their inner neighbours are 1/m_max and
    // (m_max − 1)/m_max.
    let admissible = |(l, m): (u64, u64)| -> Option<(u64, u64)> {
        if l == 0 {
            Some((1, m_max))
        } else if l == m {
            Some((m_max - 1, m_max))
        } else {
            Some((l, m))
        }
    };
    let candidates = [admissible(lo), admissible(hi)];
    let mut best: Option<(u64, u64, f64)> = None;
    for (l, m) in candidates.into_iter().flatten() {
        let d = offset(theta, l, m);
        best = match best {
            None => Some((l, m, d)),
            Some((bl, bm, bd)) => {
                if d.abs() < bd.abs() || (d.abs() == bd.abs() && m < bm) {
                    Some((l, m, d))
                } else {
                    Some((bl, bm, bd))
                }
            }
        };
    }
    let (l, m, delta) = best.expect("two candidates");
    Ok(Resonance { l, m, delta })
}
