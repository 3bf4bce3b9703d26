use statrs::function::erf::erfc;

use crate::error::{invalid, Result};

/// Asymptotic Kolmogorov critical coefficient at the 5% level.
pub const KS_C_05: f64 = 1.3581;

const MIN_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `c(α) = sqrt(−ln(α/2) / 2)`; the tabulated 1.3581 at α = 0.05.
fn critical_coefficient(alpha: f64) -> f64 {
    if (alpha - 0.05).abs() < 1e-12 {
        KS_C_05
    } else {
        (-(alpha / 2.0).ln() / 2.0).sqrt()
    }
}

/// One-sample KS test of already standardized samples against N(0, 1).
pub fn ks_normality_test(samples: &[f64], alpha: f64) -> Result<KsOutcome> {
    if samples.len() < MIN_SAMPLES {
        return Err(invalid(
            "samples",
            format!("need at least {MIN_SAMPLES} samples, got {}", samples.len()),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(invalid("samples", "non-finite sample"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let statistic = xs.iter().enumerate().fold(0.0_f64, |acc, (i, &x)| {
        let f = standard_normal_cdf(x);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    });
    let threshold = critical_coefficient(alpha) / n.sqrt();
    Ok(KsOutcome {
        statistic,
        threshold,
        pass: statistic <= threshold,
    })
}
