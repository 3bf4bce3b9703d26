//! Beampattern evaluation and its stochastic characterization.
//!
//! The pattern between two direction-range points depends only on the
//! normalized offsets `(q, p)`. Over the randomness of the frequency draw it
//! has mean `(1/N) e^{jα} D_N(q) Φ(p)`, variance `(1 − Φ²(p))/N`, and is
//! asymptotically jointly Gaussian in its real and imaginary parts. Here
//! `D_N` is the unnormalized Dirichlet kernel (see [`dirichlet`]).

mod ks;
mod marcum;
mod montecarlo;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array_model::{dirichlet, ArrayConfig, FrequencyDistribution, FrequencyDraw};
use crate::error::{invalid, Result, RfdaError};

pub use ks::{ks_normality_test, standard_normal_cdf, KsOutcome, KS_C_05};
pub use marcum::marcum_q1;
pub use montecarlo::{monte_carlo_stats, EmpiricalStats, MonteCarloOptions};

/// Normalized offset between two direction-range points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedOffset {
    /// `2 (sinθ₁ − sinθ₂) f_c d / c`
    pub q: f64,
    /// `2 (r₁ − r₂) Δf / c`
    pub p: f64,
    /// `Δf / f_c`
    pub delta: f64,
}

impl NormalizedOffset {
    pub fn new(q: f64, p: f64, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(invalid("delta", format!("must be positive, got {delta}")));
        }
        if !(q.is_finite() && p.is_finite()) {
            return Err(invalid("offset", "q and p must be finite"));
        }
        Ok(Self { q, p, delta })
    }

    /// Offset with the array's `δ`.
    pub fn for_array(cfg: &ArrayConfig, q: f64, p: f64) -> Self {
        Self { q, p, delta: cfg.delta() }
    }

    /// Offset of `(θ₁, r₁)` relative to `(θ₂, r₂)`.
    pub fn from_points(cfg: &ArrayConfig, first: (f64, f64), second: (f64, f64)) -> Self {
        Self {
            q: cfg.direction_offset(first.0, second.0),
            p: cfg.range_offset(first.1, second.1),
            delta: cfg.delta(),
        }
    }

    /// Phase `α = 2πp/δ` separating `β` from `ρ`.
    pub fn alpha(&self) -> f64 {
        2.0 * PI * self.p / self.delta
    }

    fn rotation(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.alpha())
    }
}

fn check_len(cfg: &ArrayConfig, draw: &FrequencyDraw) -> Result<()> {
    if draw.len() != cfg.n_elements() {
        return Err(RfdaError::DimensionMismatch(format!(
            "draw has {} offsets, array has {} elements",
            draw.len(),
            cfg.n_elements()
        )));
    }
    Ok(())
}

/// `ρ(q,p) = (1/N) Σ_n e^{j2π(n−(N−1)/2)q} e^{j2π m_n p}`, the pattern with
/// the common range phase removed.
pub fn rho_value(offsets: &[f64], q: f64, p: f64) -> Complex64 {
    let n = offsets.len();
    let half = (n as f64 - 1.0) / 2.0;
    let sum: Complex64 = offsets
        .iter()
        .enumerate()
        .map(|(k, &m)| Complex64::from_polar(1.0, 2.0 * PI * ((k as f64 - half) * q + m * p)))
        .sum();
    sum / n as f64
}

/// Beampattern `β(q,p)` of one frequency draw.
pub fn beampattern_value(cfg: &ArrayConfig, draw: &FrequencyDraw, offset: &NormalizedOffset) -> Result<Complex64> {
    check_len(cfg, draw)?;
    Ok(offset.rotation() * rho_value(draw.offsets(), offset.q, offset.p))
}

/// Pattern of the linear assignment `m_n = n − (N−1)/2`; its magnitude
/// depends on `p + q` only.
pub fn lfda_beampattern(cfg: &ArrayConfig, offset: &NormalizedOffset) -> Complex64 {
    let n = cfg.n_elements();
    let s = offset.p + offset.q;
    offset.rotation() * (dirichlet(n, s) / n as f64)
}

/// Mean pattern `(1/N) e^{jα} D_N(q) Φ(p)`.
pub fn mean_beampattern(dist: &FrequencyDistribution, cfg: &ArrayConfig, offset: &NormalizedOffset) -> Complex64 {
    offset.rotation() * mean_rho(dist, cfg, offset.q, offset.p)
}

/// `E{ρ} = (1/N) D_N(q) Φ(p)`, real.
pub fn mean_rho(dist: &FrequencyDistribution, cfg: &ArrayConfig, q: f64, p: f64) -> f64 {
    let n = cfg.n_elements();
    dirichlet(n, q) * dist.moment_generating(p) / n as f64
}

/// `V{β} = (1 − Φ²(p)) / N`; independent of `q`.
pub fn variance_beampattern(dist: &FrequencyDistribution, cfg: &ArrayConfig, p: f64) -> f64 {
    let phi = dist.moment_generating(p);
    (1.0 - phi * phi) / cfg.n_elements() as f64
}

/// Asymptotic Gaussian description of `[Re β, Im β]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeampatternMoments {
    pub mean: [f64; 2],
    pub covariance: [[f64; 2]; 2],
    /// Variance of `Re ρ`.
    pub sigma_r2: f64,
    /// Variance of `Im ρ`.
    pub sigma_i2: f64,
    /// Covariance of `Re ρ` and `Im ρ`; identically zero.
    pub sigma_ri: f64,
    /// `E{ρ}`.
    pub rho_mean: f64,
    /// `E{(ρ − ρ̄)²} = σ_r² − σ_i²`.
    pub square_centered: f64,
}

pub fn asymptotic_moments(
    dist: &FrequencyDistribution,
    cfg: &ArrayConfig,
    offset: &NormalizedOffset,
) -> BeampatternMoments {
    let n = cfg.n_elements();
    let nf = n as f64;
    let phi = dist.moment_generating(offset.p);
    let phi2 = dist.moment_generating(2.0 * offset.p);
    let d2 = dirichlet(n, 2.0 * offset.q);
    let spread = (d2 / nf) * (phi * phi - phi2);
    let base = 1.0 - phi * phi;
    let sigma_r2 = (base - spread) / (2.0 * nf);
    let sigma_i2 = (base + spread) / (2.0 * nf);
    let rho_mean = mean_rho(dist, cfg, offset.q, offset.p);
    let (s, c) = offset.alpha().sin_cos();
    let off_diag = (sigma_r2 - sigma_i2) * s * c;
    BeampatternMoments {
        mean: [rho_mean * c, rho_mean * s],
        covariance: [
            [sigma_r2 * c * c + sigma_i2 * s * s, off_diag],
            [off_diag, sigma_r2 * s * s + sigma_i2 * c * c],
        ],
        sigma_r2,
        sigma_i2,
        sigma_ri: 0.0,
        rho_mean,
        square_centered: d2 * (phi2 - phi * phi) / (nf * nf),
    }
}

/// `Pr{|β(q,p)| > r}` under the asymptotic Gaussian law (Rician magnitude).
///
/// The law is exact only asymptotically and is classically quoted at
/// `q = 1/(2N)`; general offsets are accepted. When `Φ²(p) = 1` the pattern
/// is deterministic and the result is the 0/1 indicator of `|β| > r`.
pub fn sidelobe_ccdf(
    dist: &FrequencyDistribution,
    cfg: &ArrayConfig,
    offset: &NormalizedOffset,
    r: f64,
) -> Result<f64> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(invalid("r", format!("threshold must be non-negative, got {r}")));
    }
    let nf = cfg.n_elements() as f64;
    let phi = dist.moment_generating(offset.p);
    let a = mean_rho(dist, cfg, offset.q, offset.p).abs();
    let tau2 = (1.0 - phi * phi) / (2.0 * nf);
    if tau2 <= 0.0 {
        return Ok(if a > r { 1.0 } else { 0.0 });
    }
    let tau = tau2.sqrt();
    marcum_q1(a / tau, r / tau)
}
