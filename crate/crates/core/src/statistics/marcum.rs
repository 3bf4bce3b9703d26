//! First-order Marcum Q-function.
//!
//! Evaluated as a Poisson mixture of Gamma tails,
//!
//! `Q₁(a, b) = Σ_k Pois(k; a²/2) · P{Gamma(k+1) > b²/2}`,
//!
//! summed outward from the Poisson mode so that large `a` neither
//! underflows nor needs many terms. Each Gamma tail follows from its
//! neighbour by a one-term recurrence.

use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{invalid, Result};

const TERM_TOL: f64 = 1e-17;

fn poisson_pmf(k: usize, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let k = k as f64;
    (-mean + k * mean.ln() - ln_gamma(k + 1.0)).exp()
}

/// `Q₁(a, b) = ∫_b^∞ t exp(−(t² + a²)/2) I₀(at) dt`.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(invalid("a", format!("must be finite and non-negative, got {a}")));
    }
    if !(b.is_finite() && b >= 0.0) {
        return Err(invalid("b", format!("must be finite and non-negative, got {b}")));
    }
    if b == 0.0 {
        return Ok(1.0);
    }
    let lambda = a * a / 2.0;
    let x = b * b / 2.0;
    if lambda == 0.0 {
        return Ok((-x).exp());
    }

    let mode = lambda.floor() as usize;
    // tail(k) = P{Gamma(k+1) > x} = P{Pois(x) ≤ k}
    let tail_mode = gamma_ur(mode as f64 + 1.0, x);
    let weight_mode = poisson_pmf(mode, lambda);

    let mut sum = weight_mode * tail_mode;

    let (mut w, mut tail, mut k) = (weight_mode, tail_mode, mode);
    loop {
        k += 1;
        w *= lambda / k as f64;
        tail = (tail + poisson_pmf(k, x)).min(1.0);
        sum += w * tail;
        if w < TERM_TOL && k as f64 > lambda {
            break;
        }
    }

    let (mut w, mut tail, mut k) = (weight_mode, tail_mode, mode);
    while k > 0 {
        tail = (tail - poisson_pmf(k, x)).max(0.0);
        w *= k as f64 / lambda;
        k -= 1;
        sum += w * tail;
        if w < TERM_TOL || tail == 0.0 {
            break;
        }
    }
    Ok(sum.clamp(0.0, 1.0))
}
