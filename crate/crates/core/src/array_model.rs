//! Physical and statistical model of a random frequency diverse array.
//!
//! A uniform linear array of `N` elements sits symmetrically about the
//! origin. Element `n` transmits a monotone carrier `f_c + m_n Δf` where the
//! offsets `m_n` are i.i.d. draws from an even law. Echoes are demodulated
//! per element with that element's own carrier, which yields a baseband
//! steering vector depending jointly on direction and range.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, RfdaError};
use crate::rng::seeded_rng;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Tolerance used when checking that an offset lies on the discrete support grid.
pub(crate) const GRID_TOL: f64 = 1e-9;

/// Physical description of the array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawArrayConfig", into = "RawArrayConfig")]
pub struct ArrayConfig {
    n_elements: usize,
    spacing: f64,
    center_freq: f64,
    freq_increment: f64,
    wave_speed: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArrayConfig {
    n_elements: usize,
    #[serde(default = "default_spacing")]
    spacing: f64,
    #[serde(default = "default_center_freq")]
    center_freq: f64,
    #[serde(default = "default_freq_increment")]
    freq_increment: f64,
    #[serde(default = "default_wave_speed")]
    wave_speed: f64,
}

fn default_wave_speed() -> f64 {
    SPEED_OF_LIGHT
}

fn default_spacing() -> f64 {
    0.025
}

fn default_center_freq() -> f64 {
    3e9
}

fn default_freq_increment() -> f64 {
    1e6
}

impl TryFrom<RawArrayConfig> for ArrayConfig {
    type Error = RfdaError;

    fn try_from(raw: RawArrayConfig) -> Result<Self> {
        ArrayConfig::with_wave_speed(
            raw.n_elements,
            raw.spacing,
            raw.center_freq,
            raw.freq_increment,
            raw.wave_speed,
        )
    }
}

impl From<ArrayConfig> for RawArrayConfig {
    fn from(cfg: ArrayConfig) -> Self {
        RawArrayConfig {
            n_elements: cfg.n_elements,
            spacing: cfg.spacing,
            center_freq: cfg.center_freq,
            freq_increment: cfg.freq_increment,
            wave_speed: cfg.wave_speed,
        }
    }
}

impl ArrayConfig {
    pub fn new(n_elements: usize, spacing: f64, center_freq: f64, freq_increment: f64) -> Result<Self> {
        Self::with_wave_speed(n_elements, spacing, center_freq, freq_increment, SPEED_OF_LIGHT)
    }

    pub fn with_wave_speed(
        n_elements: usize,
        spacing: f64,
        center_freq: f64,
        freq_increment: f64,
        wave_speed: f64,
    ) -> Result<Self> {
        if n_elements < 2 {
            return Err(invalid("n_elements", format!("need at least 2 elements, got {n_elements}")));
        }
        for (name, v) in [
            ("spacing", spacing),
            ("center_freq", center_freq),
            ("freq_increment", freq_increment),
            ("wave_speed", wave_speed),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be finite and positive, got {v}")));
            }
        }
        if freq_increment >= center_freq {
            return Err(invalid(
                "freq_increment",
                format!("must be below the center frequency ({freq_increment} >= {center_freq})"),
            ));
        }
        Ok(Self {
            n_elements,
            spacing,
            center_freq,
            freq_increment,
            wave_speed,
        })
    }

    /// 3 GHz carrier, 1 MHz increment, quarter-wavelength spacing of 2.5 cm.
    pub fn s_band(n_elements: usize) -> Result<Self> {
        Self::new(n_elements, 0.025, 3.0e9, 1.0e6)
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn center_freq(&self) -> f64 {
        self.center_freq
    }
    pub fn freq_increment(&self) -> f64 {
        self.freq_increment
    }
    pub fn wave_speed(&self) -> f64 {
        self.wave_speed
    }

    /// Relative frequency increment `Δf / f_c`.
    pub fn delta(&self) -> f64 {
        self.freq_increment / self.center_freq
    }

    pub fn wavelength(&self) -> f64 {
        self.wave_speed / self.center_freq
    }

    /// Centered element index `n - (N-1)/2`.
    pub fn centered_index(&self, n: usize) -> f64 {
        n as f64 - (self.n_elements as f64 - 1.0) / 2.0
    }

    /// Centered index vector `[-(N-1)/2, ..., (N-1)/2]`.
    pub fn centered_indices(&self) -> Vec<f64> {
        (0..self.n_elements).map(|n| self.centered_index(n)).collect()
    }

    /// Normalized direction offset `2 (sinθ₁ − sinθ₂) f_c d / c`.
    pub fn direction_offset(&self, theta1: f64, theta2: f64) -> f64 {
        2.0 * (theta1.sin() - theta2.sin()) * self.center_freq * self.spacing / self.wave_speed
    }

    /// Normalized range offset `2 (r₁ − r₂) Δf / c`.
    pub fn range_offset(&self, r1: f64, r2: f64) -> f64 {
        2.0 * (r1 - r2) * self.freq_increment / self.wave_speed
    }
}

/// Element coordinates along the array axis, symmetric about the origin.
pub fn element_positions(cfg: &ArrayConfig) -> Vec<f64> {
    (0..cfg.n_elements)
        .map(|n| cfg.centered_index(n) * cfg.spacing)
        .collect()
}

/// `sin(nπx) / sin(πx)`, the unnormalized Dirichlet kernel.
///
/// Peaks at `±n` on the integers, where the removable singularity takes its
/// limit `(−1)^{k(n−1)} n` for `x = k`.
pub fn dirichlet(n: usize, x: f64) -> f64 {
    let k = x.round();
    let u = x - k;
    let sign = if (k as i64).rem_euclid(2) == 1 && n.is_multiple_of(2) {
        -1.0
    } else {
        1.0
    };
    if u == 0.0 {
        return sign * n as f64;
    }
    sign * (n as f64 * PI * u).sin() / (PI * u).sin()
}

/// Law of the per-element frequency offsets `m_n`. Every variant is even.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub enum FrequencyDistribution {
    Gaussian { sigma: f64 },
    ContinuousUniform { m_span: f64 },
    DiscreteUniform { m_levels: usize },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawDistribution {
    Gaussian { sigma: f64 },
    ContinuousUniform { m_span: f64 },
    DiscreteUniform { m_levels: usize },
}

impl TryFrom<RawDistribution> for FrequencyDistribution {
    type Error = RfdaError;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        match raw {
            RawDistribution::Gaussian { sigma } => Self::gaussian(sigma),
            RawDistribution::ContinuousUniform { m_span } => Self::continuous_uniform(m_span),
            RawDistribution::DiscreteUniform { m_levels } => Self::discrete_uniform(m_levels),
        }
    }
}

impl From<FrequencyDistribution> for RawDistribution {
    fn from(d: FrequencyDistribution) -> Self {
        match d {
            FrequencyDistribution::Gaussian { sigma } => RawDistribution::Gaussian { sigma },
            FrequencyDistribution::ContinuousUniform { m_span } => {
                RawDistribution::ContinuousUniform { m_span }
            }
            FrequencyDistribution::DiscreteUniform { m_levels } => {
                RawDistribution::DiscreteUniform { m_levels }
            }
        }
    }
}

impl FrequencyDistribution {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid("sigma", format!("must be finite and positive, got {sigma}")));
        }
        Ok(Self::Gaussian { sigma })
    }

    pub fn continuous_uniform(m_span: f64) -> Result<Self> {
        if !(m_span.is_finite() && m_span > 0.0) {
            return Err(invalid("m_span", format!("must be finite and positive, got {m_span}")));
        }
        Ok(Self::ContinuousUniform { m_span })
    }

    pub fn discrete_uniform(m_levels: usize) -> Result<Self> {
        if m_levels == 0 {
            return Err(invalid("m_levels", "must be at least 1"));
        }
        Ok(Self::DiscreteUniform { m_levels })
    }

    /// Moment-generating function `Φ(x) = ∫ g(m) e^{j2πmx} dm`.
    ///
    /// Real because `g` is even; `Φ(0) = 1` and `|Φ| ≤ 1`.
    pub fn moment_generating(&self, x: f64) -> f64 {
        match *self {
            Self::Gaussian { sigma } => (-2.0 * PI * PI * sigma * sigma * x * x).exp(),
            Self::ContinuousUniform { m_span } => {
                let arg = m_span * PI * x;
                if arg == 0.0 {
                    1.0
                } else {
                    arg.sin() / arg
                }
            }
            Self::DiscreteUniform { m_levels } => dirichlet(m_levels, x) / m_levels as f64,
        }
    }

    /// Offset variance `E{m_n²}`.
    pub fn variance(&self) -> f64 {
        match *self {
            Self::Gaussian { sigma } => sigma * sigma,
            Self::ContinuousUniform { m_span } => m_span * m_span / 12.0,
            Self::DiscreteUniform { m_levels } => {
                let m = m_levels as f64;
                (m * m - 1.0) / 12.0
            }
        }
    }

    /// Support points of the discrete law, ascending.
    pub fn discrete_support(&self) -> Option<Vec<f64>> {
        match *self {
            Self::DiscreteUniform { m_levels } => {
                let half = (m_levels as f64 - 1.0) / 2.0;
                Some((0..m_levels).map(|k| k as f64 - half).collect())
            }
            _ => None,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Gaussian { sigma } => Normal::new(0.0, sigma)
                .expect("sigma validated at construction")
                .sample(rng),
            Self::ContinuousUniform { m_span } => Uniform::new_inclusive(-m_span / 2.0, m_span / 2.0)
                .expect("span validated at construction")
                .sample(rng),
            Self::DiscreteUniform { m_levels } => {
                let k = rng.random_range(0..m_levels);
                k as f64 - (m_levels as f64 - 1.0) / 2.0
            }
        }
    }
}

/// One realization of the frequency offsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyDraw {
    offsets: Vec<f64>,
    seed: Option<u64>,
}

impl FrequencyDraw {
    /// Offsets chosen by hand (e.g. the linear `m = n` assignment).
    pub fn from_offsets(offsets: Vec<f64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(invalid("offsets", "empty offset vector"));
        }
        if offsets.iter().any(|m| !m.is_finite()) {
            return Err(invalid("offsets", "non-finite offset"));
        }
        Ok(Self { offsets, seed: None })
    }

    /// Linear assignment `m_n = n − (N−1)/2` of a conventional FDA.
    pub fn linear(n: usize) -> Self {
        let half = (n as f64 - 1.0) / 2.0;
        Self {
            offsets: (0..n).map(|k| k as f64 - half).collect(),
            seed: None,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            offsets: vec![0.0; n],
            seed: None,
        }
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn max_abs(&self) -> f64 {
        self.offsets.iter().fold(0.0_f64, |a, m| a.max(m.abs()))
    }

    /// Row index `m_n + (M−1)/2` of every offset on the `M`-level grid.
    pub fn grid_rows(&self, m_levels: usize) -> Result<Vec<usize>> {
        let half = (m_levels as f64 - 1.0) / 2.0;
        self.offsets
            .iter()
            .map(|&m| {
                let row = m + half;
                let k = row.round();
                if (row - k).abs() > GRID_TOL || k < 0.0 || k >= m_levels as f64 {
                    Err(invalid(
                        "draw",
                        format!("offset {m} is not on the {m_levels}-level support grid"),
                    ))
                } else {
                    Ok(k as usize)
                }
            })
            .collect()
    }
}

/// Draw `n` i.i.d. offsets from `dist`, deterministically from `seed`.
pub fn sample_frequencies(dist: &FrequencyDistribution, n: usize, seed: u64) -> Result<FrequencyDraw> {
    if n == 0 {
        return Err(invalid("n", "need at least one element"));
    }
    let mut rng = seeded_rng(seed);
    let offsets = (0..n).map(|_| dist.sample(&mut rng)).collect();
    Ok(FrequencyDraw {
        offsets,
        seed: Some(seed),
    })
}

/// Which baseband model a steering vector follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasebandModel {
    /// Drops the `m_n Δf x_n sinθ` cross term (valid for `Δf ≪ f_c`).
    #[default]
    Approximate,
    /// Keeps the full two-way phase `(f_c + m_n Δf)(r + x_n sinθ)`.
    Exact,
}

fn check_draw(cfg: &ArrayConfig, draw: &FrequencyDraw) -> Result<()> {
    if draw.len() != cfg.n_elements {
        return Err(RfdaError::DimensionMismatch(format!(
            "draw has {} offsets but the array has {} elements",
            draw.len(),
            cfg.n_elements
        )));
    }
    Ok(())
}

/// Baseband steering vector for a point target at `(theta, r)`.
///
/// Every entry has unit modulus.
pub fn steering_vector(
    cfg: &ArrayConfig,
    draw: &FrequencyDraw,
    theta: f64,
    r: f64,
    model: BasebandModel,
) -> Result<DVector<Complex64>> {
    check_draw(cfg, draw)?;
    Ok(steering_vector_unchecked(cfg, draw.offsets(), theta, r, model))
}

pub(crate) fn steering_vector_unchecked(
    cfg: &ArrayConfig,
    offsets: &[f64],
    theta: f64,
    r: f64,
    model: BasebandModel,
) -> DVector<Complex64> {
    let k = 4.0 * PI / cfg.wave_speed;
    let s = theta.sin();
    let fc = cfg.center_freq;
    let df = cfg.freq_increment;
    DVector::from_iterator(
        offsets.len(),
        offsets.iter().enumerate().map(|(n, &m)| {
            let x = cfg.centered_index(n) * cfg.spacing;
            let phase = match model {
                BasebandModel::Approximate => -k * (fc * r + x * fc * s + m * df * r),
                BasebandModel::Exact => -k * (fc + m * df) * (r + x * s),
            };
            Complex64::from_polar(1.0, phase)
        }),
    )
}

/// One reflecting point target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    /// Direction in radians, strictly inside `(−π/2, π/2)`.
    pub direction: f64,
    /// Range in metres, non-negative.
    pub range: f64,
    /// Complex reflection amplitude per snapshot.
    pub amplitudes: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetScene {
    targets: Vec<Target>,
    n_snapshots: usize,
}

impl TargetScene {
    pub fn new(targets: Vec<Target>, n_snapshots: usize) -> Result<Self> {
        if n_snapshots == 0 {
            return Err(invalid("n_snapshots", "need at least one snapshot"));
        }
        for (i, t) in targets.iter().enumerate() {
            if !(t.direction.is_finite() && t.direction.abs() < PI / 2.0) {
                return Err(invalid(
                    "direction",
                    format!("target {i}: {} rad is outside (−π/2, π/2)", t.direction),
                ));
            }
            if !(t.range.is_finite() && t.range >= 0.0) {
                return Err(invalid("range", format!("target {i}: negative or non-finite range {}", t.range)));
            }
            if t.amplitudes.len() != n_snapshots {
                return Err(RfdaError::DimensionMismatch(format!(
                    "target {i} has {} amplitudes, scene has {n_snapshots} snapshots",
                    t.amplitudes.len()
                )));
            }
        }
        Ok(Self { targets, n_snapshots })
    }

    /// Noise-only scene.
    pub fn empty(n_snapshots: usize) -> Result<Self> {
        Self::new(Vec::new(), n_snapshots)
    }

    /// Targets with a constant amplitude across snapshots.
    pub fn steady(points: &[(f64, f64, Complex64)], n_snapshots: usize) -> Result<Self> {
        let targets = points
            .iter()
            .map(|&(direction, range, a)| Target {
                direction,
                range,
                amplitudes: vec![a; n_snapshots],
            })
            .collect();
        Self::new(targets, n_snapshots)
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn n_snapshots(&self) -> usize {
        self.n_snapshots
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Sample amplitude correlation `S_ij = (1/L) Σ_l a_i(l) a_j*(l)`.
    pub fn amplitude_correlation(&self) -> DMatrix<Complex64> {
        let p = self.targets.len();
        let l = self.n_snapshots as f64;
        DMatrix::from_fn(p, p, |i, j| {
            self.targets[i]
                .amplitudes
                .iter()
                .zip(&self.targets[j].amplitudes)
                .map(|(a, b)| a * b.conj())
                .sum::<Complex64>()
                / l
        })
    }
}

/// Baseband snapshots, `N` rows (elements) by `L` columns (snapshots).
#[derive(Debug, Clone, PartialEq)]
pub struct EchoMatrix {
    pub samples: DMatrix<Complex64>,
    pub noise_power: f64,
}

impl EchoMatrix {
    pub fn n_elements(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_snapshots(&self) -> usize {
        self.samples.ncols()
    }

    pub fn column(&self, l: usize) -> DVector<Complex64> {
        self.samples.column(l).into_owned()
    }
}

/// Noise std per real/imaginary component for a total complex power.
pub fn component_std(noise_power: f64) -> f64 {
    (noise_power / 2.0).sqrt()
}

/// Noisy baseband echoes of `scene` under the approximate model.
pub fn synthesize_echoes(
    cfg: &ArrayConfig,
    draw: &FrequencyDraw,
    scene: &TargetScene,
    noise_power: f64,
    seed: u64,
) -> Result<EchoMatrix> {
    synthesize_echoes_with(cfg, draw, scene, noise_power, seed, BasebandModel::Approximate)
}

pub fn synthesize_echoes_with(
    cfg: &ArrayConfig,
    draw: &FrequencyDraw,
    scene: &TargetScene,
    noise_power: f64,
    seed: u64,
    model: BasebandModel,
) -> Result<EchoMatrix> {
    check_draw(cfg, draw)?;
    if !(noise_power.is_finite() && noise_power >= 0.0) {
        return Err(invalid("noise_power", format!("must be non-negative, got {noise_power}")));
    }
    let n = cfg.n_elements;
    let l = scene.n_snapshots;
    let mut samples = DMatrix::<Complex64>::zeros(n, l);
    for t in &scene.targets {
        let b = steering_vector_unchecked(cfg, draw.offsets(), t.direction, t.range, model);
        for (col, &a) in t.amplitudes.iter().enumerate() {
            let mut c = samples.column_mut(col);
            c.axpy(a, &b, Complex64::new(1.0, 0.0));
        }
    }
    if noise_power > 0.0 {
        let std = component_std(noise_power);
        let mut rng = seeded_rng(seed);
        // column-major: element index runs fastest within each snapshot
        for v in samples.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *v += Complex64::new(std * re, std * im);
        }
    }
    Ok(EchoMatrix { samples, noise_power })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(n: usize) -> ArrayConfig {
        ArrayConfig::s_band(n).unwrap()
    }

    #[test]
    fn positions_examples() {
        let two = ArrayConfig::new(2, 1.0, 3e9, 1e6).unwrap();
        assert_eq!(element_positions(&two), vec![-0.5, 0.5]);
        let three = ArrayConfig::new(3, 0.025, 3e9, 1e6).unwrap();
        let p = element_positions(&three);
        assert_eq!(p[1], 0.0);
        assert!((p[0] + 0.025).abs() < 1e-15 && (p[2] - 0.025).abs() < 1e-15);
        let p128 = element_positions(&cfg(128));
        assert!((p128[0] + 1.5875).abs() < 1e-12);
        assert!(p128.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn config_rejects_bad_values() {
        assert!(ArrayConfig::new(1, 0.025, 3e9, 1e6).is_err());
        assert!(ArrayConfig::new(8, 0.0, 3e9, 1e6).is_err());
        assert!(ArrayConfig::new(8, 0.025, 1e6, 3e9).is_err());
        assert!(ArrayConfig::new(8, 0.025, 3e9, -1.0).is_err());
        assert!(FrequencyDistribution::gaussian(0.0).is_err());
        assert!(FrequencyDistribution::continuous_uniform(-1.0).is_err());
        assert!(FrequencyDistribution::discrete_uniform(0).is_err());
    }

    #[test]
    fn config_serde_validates() {
        let ok: ArrayConfig = toml::from_str(
            "n_elements = 4\nspacing = 0.025\ncenter_freq = 3e9\nfreq_increment = 1e6\n",
        )
        .unwrap();
        assert_eq!(ok.wave_speed(), SPEED_OF_LIGHT);
        let bad = toml::from_str::<ArrayConfig>(
            "n_elements = 1\nspacing = 0.025\ncenter_freq = 3e9\nfreq_increment = 1e6\n",
        );
        assert!(bad.is_err());
        let d: FrequencyDistribution = toml::from_str("kind = \"discrete_uniform\"\nm_levels = 8\n").unwrap();
        assert_eq!(d, FrequencyDistribution::DiscreteUniform { m_levels: 8 });
        assert!(toml::from_str::<FrequencyDistribution>("kind = \"gaussian\"\nsigma = -1.0\n").is_err());
    }

    #[test]
    fn discrete_single_level_is_zero() {
        let d = FrequencyDistribution::discrete_uniform(1).unwrap();
        let draw = sample_frequencies(&d, 17, 3).unwrap();
        assert!(draw.offsets().iter().all(|&m| m == 0.0));
    }

    #[test]
    fn discrete_draw_lies_on_grid() {
        let d = FrequencyDistribution::discrete_uniform(64).unwrap();
        let draw = sample_frequencies(&d, 4096, 11).unwrap();
        for &m in draw.offsets() {
            assert!((-31.5..=31.5).contains(&m));
            assert_eq!(m - m.floor(), 0.5);
        }
        assert!(draw.grid_rows(64).is_ok());
        assert!(draw.grid_rows(32).is_err());
    }

    #[test]
    fn gaussian_sample_variance() {
        let d = FrequencyDistribution::gaussian(5.0).unwrap();
        let draw = sample_frequencies(&d, 100_000, 5).unwrap();
        let n = draw.len() as f64;
        let mean = draw.offsets().iter().sum::<f64>() / n;
        let var = draw.offsets().iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var / 25.0 - 1.0).abs() < 0.02, "variance {var}");
        assert!(mean.abs() < 0.05);
    }

    #[test]
    fn draws_are_deterministic() {
        let d = FrequencyDistribution::continuous_uniform(32.0).unwrap();
        assert_eq!(
            sample_frequencies(&d, 64, 99).unwrap(),
            sample_frequencies(&d, 64, 99).unwrap()
        );
        assert_ne!(
            sample_frequencies(&d, 64, 99).unwrap(),
            sample_frequencies(&d, 64, 100).unwrap()
        );
    }

    /// Simpson quadrature of `∫ g(m) cos(2πmx) dm` as an independent oracle.
    fn gaussian_mgf_quadrature(sigma: f64, x: f64) -> f64 {
        let lim = 12.0 * sigma;
        let steps = 20_000;
        let h = 2.0 * lim / steps as f64;
        let f = |m: f64| {
            (-(m * m) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma).sqrt()
                * (2.0 * PI * m * x).cos()
        };
        let mut s = f(-lim) + f(lim);
        for k in 1..steps {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(-lim + k as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn mgf_examples() {
        let dists = [
            FrequencyDistribution::gaussian(5.0).unwrap(),
            FrequencyDistribution::continuous_uniform(32.0).unwrap(),
            FrequencyDistribution::discrete_uniform(32).unwrap(),
            FrequencyDistribution::discrete_uniform(7).unwrap(),
        ];
        for d in dists {
            assert_eq!(d.moment_generating(0.0), 1.0);
        }
        for m in [1usize, 2, 7, 32, 64] {
            let d = FrequencyDistribution::discrete_uniform(m).unwrap();
            if m > 1 {
                assert!(d.moment_generating(1.0 / m as f64).abs() < 1e-15);
            }
        }
        let g = FrequencyDistribution::gaussian(5.0).unwrap();
        let oracle = gaussian_mgf_quadrature(5.0, 0.1);
        assert!((g.moment_generating(0.1) - oracle).abs() < 1e-12);
        assert!((g.moment_generating(0.1) - 7.19e-3).abs() < 1e-5);
    }

    #[test]
    fn discrete_mgf_matches_direct_sum() {
        for m in [2usize, 5, 32] {
            let d = FrequencyDistribution::discrete_uniform(m).unwrap();
            let support = d.discrete_support().unwrap();
            for x in [0.013, 0.25, 0.5, 0.999, 1.0, 1.5, 2.0, -3.0, 7.77] {
                let direct: f64 = support.iter().map(|&s| (2.0 * PI * s * x).cos()).sum::<f64>() / m as f64;
                assert!((d.moment_generating(x) - direct).abs() < 1e-12, "M={m} x={x}");
            }
        }
    }

    #[test]
    fn dirichlet_limits() {
        assert_eq!(dirichlet(8, 0.0), 8.0);
        assert_eq!(dirichlet(8, 1.0), -8.0);
        assert_eq!(dirichlet(7, 1.0), 7.0);
        assert!(dirichlet(8, 0.125).abs() < 1e-14);
        let x: f64 = 0.3;
        assert!((dirichlet(5, x) - (5.0 * PI * x).sin() / (PI * x).sin()).abs() < 1e-13);
    }

    #[test]
    fn steering_identity_cases() {
        let c = cfg(16);
        let d = FrequencyDistribution::discrete_uniform(8).unwrap();
        let draw = sample_frequencies(&d, 16, 1).unwrap();
        let b = steering_vector(&c, &draw, 0.0, 0.0, BasebandModel::Approximate).unwrap();
        assert!(b.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));

        let zeros = FrequencyDraw::zeros(16);
        let (theta, r) = (0.3, 42.0);
        let b = steering_vector(&c, &zeros, theta, r, BasebandModel::Approximate).unwrap();
        let k = 4.0 * PI / c.wave_speed();
        let common = Complex64::from_polar(1.0, -k * c.center_freq() * r);
        for (n, x) in element_positions(&c).into_iter().enumerate() {
            let ula = Complex64::from_polar(1.0, -k * c.center_freq() * x * theta.sin());
            assert!((b[n] - ula * common).norm() < 1e-9);
        }
    }

    #[test]
    fn steering_rejects_wrong_draw_length() {
        assert!(steering_vector(&cfg(8), &FrequencyDraw::zeros(7), 0.0, 0.0, BasebandModel::Exact).is_err());
    }

    #[test]
    fn echo_examples() {
        let c = cfg(8);
        let draw = FrequencyDraw::zeros(8);
        let empty = TargetScene::empty(3).unwrap();
        let e = synthesize_echoes(&c, &draw, &empty, 0.0, 1).unwrap();
        assert!(e.samples.iter().all(|v| *v == Complex64::new(0.0, 0.0)));

        let one = TargetScene::steady(&[(0.0, 0.0, Complex64::new(1.0, 0.0))], 1).unwrap();
        let e = synthesize_echoes(&c, &draw, &one, 0.0, 1).unwrap();
        assert!(e.samples.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));

        assert!(synthesize_echoes(&c, &draw, &one, -1.0, 1).is_err());
    }

    #[test]
    fn noise_power_calibration() {
        let c = cfg(100);
        let draw = FrequencyDraw::zeros(100);
        let scene = TargetScene::empty(1000).unwrap();
        let e = synthesize_echoes(&c, &draw, &scene, 1.0, 77).unwrap();
        let n = e.samples.len() as f64;
        let mean: Complex64 = e.samples.iter().sum::<Complex64>() / n;
        let var = e.samples.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
        assert!((var - 1.0).abs() < 0.03, "variance {var}");
        let re_var = e.samples.iter().map(|v| v.re * v.re).sum::<f64>() / n;
        assert!((re_var - 0.5).abs() < 0.02);
    }

    #[test]
    fn echo_linearity_is_exact() {
        let c = cfg(32);
        let d = FrequencyDistribution::discrete_uniform(16).unwrap();
        let draw = sample_frequencies(&d, 32, 8).unwrap();
        let a = (0.2, 30.0, Complex64::new(1.0, 0.5));
        let b = (-0.7, 80.0, Complex64::new(-0.3, 2.0));
        let both = TargetScene::steady(&[a, b], 2).unwrap();
        let only_a = TargetScene::steady(&[a], 2).unwrap();
        let only_b = TargetScene::steady(&[b], 2).unwrap();
        let noise = TargetScene::empty(2).unwrap();
        let full = synthesize_echoes(&c, &draw, &both, 0.5, 13).unwrap();
        let ea = synthesize_echoes(&c, &draw, &only_a, 0.0, 0).unwrap();
        let eb = synthesize_echoes(&c, &draw, &only_b, 0.0, 0).unwrap();
        let en = synthesize_echoes(&c, &draw, &noise, 0.5, 13).unwrap();
        assert_eq!(full.samples, ea.samples + eb.samples + en.samples);
    }

    #[test]
    fn scene_validation() {
        assert!(TargetScene::steady(&[(PI / 2.0, 1.0, Complex64::new(1.0, 0.0))], 1).is_err());
        assert!(TargetScene::steady(&[(0.1, -1.0, Complex64::new(1.0, 0.0))], 1).is_err());
        let bad = Target {
            direction: 0.0,
            range: 1.0,
            amplitudes: vec![Complex64::new(1.0, 0.0); 2],
        };
        assert!(TargetScene::new(vec![bad], 3).is_err());
        assert!(TargetScene::empty(0).is_err());
    }

    proptest! {
        #[test]
        fn steering_entries_unit_modulus(theta in -1.5f64..1.5, r in 0.0f64..500.0, seed in 0u64..1000) {
            let c = cfg(24);
            let d = FrequencyDistribution::gaussian(5.0).unwrap();
            let draw = sample_frequencies(&d, 24, seed).unwrap();
            for model in [BasebandModel::Approximate, BasebandModel::Exact] {
                let b = steering_vector(&c, &draw, theta, r, model).unwrap();
                for v in b.iter() {
                    prop_assert!((v.norm() - 1.0).abs() < 1e-14);
                }
            }
        }

        #[test]
        fn exact_vs_approximate_phase_bound(theta in -1.5f64..1.5, r in 0.0f64..300.0, seed in 0u64..1000) {
            let c = cfg(64);
            let d = FrequencyDistribution::discrete_uniform(32).unwrap();
            let draw = sample_frequencies(&d, 64, seed).unwrap();
            let a = steering_vector(&c, &draw, theta, r, BasebandModel::Approximate).unwrap();
            let e = steering_vector(&c, &draw, theta, r, BasebandModel::Exact).unwrap();
            let bound = 2.0 * PI * draw.max_abs() * c.freq_increment() * 63.0 * c.spacing() / c.wave_speed();
            for (x, y) in a.iter().zip(e.iter()) {
                let dphi = (x.conj() * y).arg().abs();
                prop_assert!(dphi <= bound * (1.0 + 1e-9) + 1e-9);
            }
        }

        #[test]
        fn mgf_even_and_bounded(x in -5.0f64..5.0, s in 0.1f64..10.0, m in 1usize..80) {
            let dists = [
                FrequencyDistribution::gaussian(s).unwrap(),
                FrequencyDistribution::continuous_uniform(s * 4.0).unwrap(),
                FrequencyDistribution::discrete_uniform(m).unwrap(),
            ];
            for d in dists {
                let a = d.moment_generating(x);
                prop_assert!((a - d.moment_generating(-x)).abs() < 1e-12);
                prop_assert!(a.abs() <= 1.0 + 1e-12);
            }
        }
    }
}
