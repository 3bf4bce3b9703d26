//! Monte Carlo estimates of beampattern moments over frequency draws.
//!
//! Trial `t` uses the frequency-draw stream `(seed, t)`. Trials are grouped
//! in fixed-size chunks evaluated in parallel and reduced in chunk order, so
//! the result does not depend on the thread count.
//!
//! Two passes are made: the first fixes the sample mean (shifted by the
//! first trial, so a deterministic pattern has an exactly zero spread), the
//! second accumulates centered moments.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{rho_value, NormalizedOffset};
use crate::array_model::{sample_frequencies, ArrayConfig, FrequencyDistribution};
use crate::error::{invalid, Result};
use crate::rng::{derive_seed, Stream};

const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloOptions {
    pub n_trials: usize,
    pub seed: u64,
    /// Retain per-trial `(Re ρ, Im ρ)` for distribution tests.
    pub keep_samples: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalStats {
    pub n_trials: usize,
    /// Sample mean of `β`.
    pub mean_est: Complex64,
    /// Sample mean of `ρ = e^{−jα} β`.
    pub rho_mean: Complex64,
    /// Sample variance `E|β − β̄|²`.
    pub var_est: f64,
    /// Standard error of `var_est`.
    pub var_se: f64,
    pub var_re: f64,
    pub var_im: f64,
    /// Sample covariance of `Re ρ` and `Im ρ`.
    pub cov_re_im: f64,
    /// Sample estimate of `E{(ρ − ρ̄)²}`.
    pub square_centered_est: Complex64,
    /// Standard error of `square_centered_est`.
    pub square_centered_se: f64,
    pub samples: Option<Vec<(f64, f64)>>,
}

impl EmpiricalStats {
    /// Standard error of the complex sample mean.
    pub fn mean_se(&self) -> f64 {
        (self.var_est / self.n_trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, Default)]
struct Centered {
    s1: Complex64,
    abs2: f64,
    sq: Complex64,
    abs4: f64,
    re2: f64,
    im2: f64,
    reim: f64,
}

fn trial_rhos(
    dist: &FrequencyDistribution,
    n: usize,
    seed: u64,
    trial: usize,
    offsets: &[NormalizedOffset],
) -> Result<Vec<Complex64>> {
    let draw = sample_frequencies(dist, n, derive_seed(seed, Stream::FrequencyDraw, trial as u64))?;
    Ok(offsets
        .iter()
        .map(|o| rho_value(draw.offsets(), o.q, o.p))
        .collect())
}

fn chunks(n_trials: usize) -> Vec<std::ops::Range<usize>> {
    (0..n_trials)
        .step_by(CHUNK)
        .map(|s| s..(s + CHUNK).min(n_trials))
        .collect()
}

pub fn monte_carlo_stats(
    dist: &FrequencyDistribution,
    cfg: &ArrayConfig,
    offsets: &[NormalizedOffset],
    opts: MonteCarloOptions,
) -> Result<Vec<EmpiricalStats>> {
    let n_trials = opts.n_trials;
    if n_trials < 2 {
        return Err(invalid("n_trials", format!("need at least 2 trials, got {n_trials}")));
    }
    let n = cfg.n_elements();
    let k = offsets.len();
    let ranges = chunks(n_trials);

    let shift = trial_rhos(dist, n, opts.seed, 0, offsets)?;
    let partial: Vec<Vec<Complex64>> = ranges
        .par_iter()
        .map(|range| -> Result<Vec<Complex64>> {
            let mut acc = vec![Complex64::new(0.0, 0.0); k];
            for t in range.clone() {
                let rhos = trial_rhos(dist, n, opts.seed, t, offsets)?;
                for ((a, r), s) in acc.iter_mut().zip(&rhos).zip(&shift) {
                    *a += r - s;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let nt = n_trials as f64;
    let mean: Vec<Complex64> = (0..k)
        .map(|i| shift[i] + partial.iter().map(|p| p[i]).sum::<Complex64>() / nt)
        .collect();

    type ChunkOut = (Vec<Centered>, Option<Vec<Vec<(f64, f64)>>>);
    let second: Vec<ChunkOut> = ranges
        .par_iter()
        .map(|range| -> Result<ChunkOut> {
            let mut acc = vec![Centered::default(); k];
            let mut kept = opts.keep_samples.then(|| vec![Vec::with_capacity(range.len()); k]);
            for t in range.clone() {
                let rhos = trial_rhos(dist, n, opts.seed, t, offsets)?;
                for (i, r) in rhos.iter().enumerate() {
                    let d = r - mean[i];
                    let a = &mut acc[i];
                    let abs2 = d.norm_sqr();
                    a.s1 += d;
                    a.abs2 += abs2;
                    a.sq += d * d;
                    a.abs4 += abs2 * abs2;
                    a.re2 += d.re * d.re;
                    a.im2 += d.im * d.im;
                    a.reim += d.re * d.im;
                    if let Some(kept) = kept.as_mut() {
                        kept[i].push((r.re, r.im));
                    }
                }
            }
            Ok((acc, kept))
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(k);
    for (i, offset) in offsets.iter().enumerate() {
        let mut c = Centered::default();
        for (acc, _) in &second {
            let a = &acc[i];
            c.s1 += a.s1;
            c.abs2 += a.abs2;
            c.sq += a.sq;
            c.abs4 += a.abs4;
            c.re2 += a.re2;
            c.im2 += a.im2;
            c.reim += a.reim;
        }
        let denom = nt - 1.0;
        let var_est = ((c.abs2 - c.s1.norm_sqr() / nt) / denom).max(0.0);
        let square_centered_est = (c.sq - c.s1 * c.s1 / nt) / denom;
        let var_re = ((c.re2 - c.s1.re * c.s1.re / nt) / denom).max(0.0);
        let var_im = ((c.im2 - c.s1.im * c.s1.im / nt) / denom).max(0.0);
        let cov_re_im = (c.reim - c.s1.re * c.s1.im / nt) / denom;
        let m4 = c.abs4 / nt;
        let var_se = ((m4 - (c.abs2 / nt).powi(2)).max(0.0) / nt).sqrt();
        let square_centered_se = ((m4 - (c.sq / nt).norm_sqr()).max(0.0) / nt).sqrt();
        let samples = opts.keep_samples.then(|| {
            second
                .iter()
                .flat_map(|(_, kept)| kept.as_ref().expect("samples requested")[i].iter().copied())
                .collect()
        });
        out.push(EmpiricalStats {
            n_trials,
            mean_est: Complex64::from_polar(1.0, offset.alpha()) * mean[i],
            rho_mean: mean[i],
            var_est,
            var_se,
            var_re,
            var_im,
            cov_re_im,
            square_centered_est,
            square_centered_se,
            samples,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_model::dirichlet;
    use crate::statistics::{asymptotic_moments, mean_beampattern, variance_beampattern};

    fn cfg(n: usize) -> ArrayConfig {
        ArrayConfig::s_band(n).unwrap()
    }

    #[test]
    fn rejects_too_few_trials() {
        let c = cfg(8);
        let d = FrequencyDistribution::discrete_uniform(4).unwrap();
        let o = [NormalizedOffset::for_array(&c, 0.1, 0.1)];
        let opts = MonteCarloOptions { n_trials: 1, seed: 0, keep_samples: false };
        assert!(monte_carlo_stats(&d, &c, &o, opts).is_err());
    }

    #[test]
    fn degenerate_draw_has_no_spread() {
        let c = cfg(16);
        let d = FrequencyDistribution::discrete_uniform(1).unwrap();
        let o = [NormalizedOffset::for_array(&c, 0.1, 0.3), NormalizedOffset::for_array(&c, -0.2, 0.05)];
        let opts = MonteCarloOptions { n_trials: 10, seed: 4, keep_samples: true };
        for s in monte_carlo_stats(&d, &c, &o, opts).unwrap() {
            assert_eq!(s.var_est, 0.0);
            assert_eq!(s.samples.as_ref().unwrap().len(), 10);
        }
    }

    #[test]
    fn zero_range_offset_mean_is_exact() {
        let c = cfg(32);
        let d = FrequencyDistribution::gaussian(5.0).unwrap();
        let qs = [0.0, 0.07, 0.25, -0.4];
        let o: Vec<_> = qs.iter().map(|&q| NormalizedOffset::for_array(&c, q, 0.0)).collect();
        let opts = MonteCarloOptions { n_trials: 100, seed: 9, keep_samples: false };
        for (s, q) in monte_carlo_stats(&d, &c, &o, opts).unwrap().iter().zip(qs) {
            assert!((s.mean_est - dirichlet(32, q) / 32.0).norm() < 1e-14);
            assert_eq!(s.var_est, 0.0);
        }
    }

    #[test]
    fn converges_to_analytic_moments() {
        let c = cfg(64);
        let d = FrequencyDistribution::discrete_uniform(32).unwrap();
        let o = [
            NormalizedOffset::for_array(&c, 0.2, 0.05),
            NormalizedOffset::for_array(&c, 0.3, 0.05),
        ];
        let opts = MonteCarloOptions { n_trials: 10_000, seed: 1, keep_samples: false };
        let stats = monte_carlo_stats(&d, &c, &o, opts).unwrap();
        for (s, off) in stats.iter().zip(&o) {
            let mean = mean_beampattern(&d, &c, off);
            assert!((s.mean_est - mean).norm() < 3.0 * s.mean_se());
            let var = variance_beampattern(&d, &c, off.p);
            assert!((s.var_est / var - 1.0).abs() < 0.1);
            let m = asymptotic_moments(&d, &c, off);
            assert!((s.square_centered_est - m.square_centered).norm() < 3.0 * s.square_centered_se);
            assert!(s.cov_re_im.abs() < 1e-2);
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let c = cfg(16);
        let d = FrequencyDistribution::continuous_uniform(8.0).unwrap();
        let o = [NormalizedOffset::for_array(&c, 0.13, 0.07)];
        let opts = MonteCarloOptions { n_trials: 300, seed: 2, keep_samples: true };
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| monte_carlo_stats(&d, &c, &o, opts).unwrap());
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| monte_carlo_stats(&d, &c, &o, opts).unwrap());
        assert_eq!(serial, parallel);
    }
}
