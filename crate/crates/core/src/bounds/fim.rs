use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::array_model::{steering_vector_unchecked, ArrayConfig, BasebandModel, FrequencyDraw, TargetScene};
use crate::error::{invalid, Result, RfdaError};

const RANK_TOL: f64 = 1e-10;
const MAX_CONDITION: f64 = 1e12;

/// Fisher information for `ξ = [θ₁, r₁, …, θ_P, r_P]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FimReport {
    pub fim: DMatrix<f64>,
    /// Inverse of `fim`, present only when it is well conditioned.
    pub crb: Option<DMatrix<f64>>,
    /// `(CRB_θᵢ, CRB_rᵢ)` per target when `crb` is present.
    pub per_target: Option<Vec<(f64, f64)>>,
    /// Ratio of extreme eigenvalues of `fim` (infinite when singular).
    pub condition: f64,
}

/// `(∂b/∂θ, ∂b/∂r)` at `(theta, r)`.
///
/// The range derivative omits the `f_c` term shared by every element; that
/// term is parallel to `b` itself and vanishes under the projection onto the
/// complement of the steering vectors.
pub fn steering_derivatives(
    cfg: &ArrayConfig,
    draw: &FrequencyDraw,
    theta: f64,
    r: f64,
) -> Result<(DVector<Complex64>, DVector<Complex64>)> {
    check_draw(cfg, draw)?;
    Ok(derivatives(cfg, draw, theta, r))
}

fn derivatives(cfg: &ArrayConfig, draw: &FrequencyDraw, theta: f64, r: f64) -> (DVector<Complex64>, DVector<Complex64>) {
    let b = steering_vector_unchecked(cfg, draw.offsets(), theta, r, BasebandModel::Approximate);
    let c = cfg.wave_speed();
    let kt = -4.0 * PI * cfg.center_freq() * cfg.spacing() * theta.cos() / c;
    let kr = -4.0 * PI * cfg.freq_increment() / c;
    let dt = DVector::from_fn(b.len(), |n, _| Complex64::new(0.0, kt * cfg.centered_index(n)) * b[n]);
    let dr = DVector::from_fn(b.len(), |n, _| Complex64::new(0.0, kr * draw.offsets()[n]) * b[n]);
    (dt, dr)
}

fn check_draw(cfg: &ArrayConfig, draw: &FrequencyDraw) -> Result<()> {
    if draw.len() != cfg.n_elements() {
        return Err(RfdaError::DimensionMismatch(format!(
            "draw has {} offsets but the array has {} elements",
            draw.len(),
            cfg.n_elements()
        )));
    }
    Ok(())
}

fn check_common(noise_power: f64, l: usize) -> Result<()> {
    if !(noise_power.is_finite() && noise_power > 0.0) {
        return Err(invalid("noise_power", format!("must be positive, got {noise_power}")));
    }
    if l == 0 {
        return Err(invalid("n_snapshots", "must be at least 1"));
    }
    Ok(())
}

fn steering_matrix(cfg: &ArrayConfig, draw: &FrequencyDraw, scene: &TargetScene) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(cfg.n_elements(), scene.len());
    for (i, t) in scene.targets().iter().enumerate() {
        let b = steering_vector_unchecked(cfg, draw.offsets(), t.direction, t.range, BasebandModel::Approximate);
        a.set_column(i, &b);
    }
    a
}

/// Orthonormal basis of the column space of `a`; rank deficiency is an error.
fn column_basis(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().fold(0.0_f64, |m, &s| m.max(s));
    let rank = svd.singular_values.iter().filter(|&&s| s > RANK_TOL * smax).count();
    if rank < a.ncols() {
        return Err(RfdaError::Singular(format!(
            "steering matrix has rank {rank} < {} (coincident targets)",
            a.ncols()
        )));
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > RANK_TOL * smax)
        .collect();
    Ok(u.select_columns(&keep))
}

fn project_out(basis: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    v - basis * basis.ad_mul(v)
}

/// `J = (2L/σ²) Re{C ⊙ (Sᵀ ⊗ 1₂ₓ₂)}` with `C = (P⊥D)ᴴ(P⊥D)`.
pub fn fim(
    cfg: &ArrayConfig,
    draw: &FrequencyDraw,
    scene: &TargetScene,
    s: &DMatrix<Complex64>,
    noise_power: f64,
    l: usize,
) -> Result<FimReport> {
    check_draw(cfg, draw)?;
    check_common(noise_power, l)?;
    let p = scene.len();
    if p == 0 {
        return Err(invalid("scene", "need at least one target"));
    }
    if s.shape() != (p, p) {
        return Err(RfdaError::DimensionMismatch(format!("S is {:?}, expected {p}×{p}", s.shape())));
    }
    check_psd(s)?;

    let basis = column_basis(&steering_matrix(cfg, draw, scene))?;
    let mut d = DMatrix::zeros(cfg.n_elements(), 2 * p);
    for (i, t) in scene.targets().iter().enumerate() {
        let (dt, dr) = derivatives(cfg, draw, t.direction, t.range);
        d.set_column(2 * i, &dt);
        d.set_column(2 * i + 1, &dr);
    }
    let pd = project_out(&basis, &d);
    let c = pd.ad_mul(&pd);
    let scale = 2.0 * l as f64 / noise_power;
    let mut j = DMatrix::from_fn(2 * p, 2 * p, |a, b| scale * (c[(a, b)] * s[(b / 2, a / 2)]).re);
    j = (&j + j.transpose()) * 0.5;

    let eig = j.clone().symmetric_eigen();
    let lo = eig.eigenvalues.min();
    let hi = eig.eigenvalues.max();
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    let crb = (condition <= MAX_CONDITION).then(|| {
        let inv = DVector::from_iterator(2 * p, eig.eigenvalues.iter().map(|&e| 1.0 / e));
        &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose()
    });
    let per_target = crb
        .as_ref()
        .map(|m| (0..p).map(|i| (m[(2 * i, 2 * i)], m[(2 * i + 1, 2 * i + 1)])).collect());
    Ok(FimReport {
        fim: j,
        crb,
        per_target,
        condition,
    })
}

fn check_psd(s: &DMatrix<Complex64>) -> Result<()> {
    let scale = s.norm().max(f64::MIN_POSITIVE);
    if (s - s.adjoint()).norm() > 1e-10 * scale {
        return Err(invalid("S", "amplitude correlation must be Hermitian"));
    }
    let eig = s.clone().symmetric_eigenvalues();
    if eig.iter().any(|&e| e < -1e-10 * scale) {
        return Err(invalid("S", "amplitude correlation must be positive semi-definite"));
    }
    Ok(())
}

/// `(|u|², |v|², γ)` with `u = P⊥(n ⊙ b)`, `v = P⊥(m ⊙ b)` and
/// `γ = |u|²|v|² − ½|uᴴv|² − ½Re{(uᴴv)²}`.
pub(crate) fn coupling_terms(
    cfg: &ArrayConfig,
    draw: &FrequencyDraw,
    scene: &TargetScene,
    theta: f64,
    r: f64,
) -> Result<(f64, f64, f64)> {
    let basis = column_basis(&steering_matrix(cfg, draw, scene))?;
    let b = steering_vector_unchecked(cfg, draw.offsets(), theta, r, BasebandModel::Approximate);
    let nb = DMatrix::from_fn(b.len(), 1, |n, _| b[n] * cfg.centered_index(n));
    let mb = DMatrix::from_fn(b.len(), 1, |n, _| b[n] * draw.offsets()[n]);
    let u = project_out(&basis, &nb);
    let v = project_out(&basis, &mb);
    let (uu, vv) = (u.norm_squared(), v.norm_squared());
    let z = u.dotc(&v);
    Ok((uu, vv, uu * vv - 0.5 * z.norm_sqr() - 0.5 * (z * z).re))
}

/// Closed-form `(CRB_θ, CRB_r)` of target `i` for uncorrelated amplitudes.
pub fn crb_uncorrelated(
    cfg: &ArrayConfig,
    draw: &FrequencyDraw,
    scene: &TargetScene,
    i: usize,
    noise_power: f64,
    l: usize,
    s_ii: f64,
) -> Result<(f64, f64)> {
    check_draw(cfg, draw)?;
    check_common(noise_power, l)?;
    let t = scene
        .targets()
        .get(i)
        .ok_or_else(|| invalid("target", format!("index {i} out of range for {} targets", scene.len())))?;
    if !(s_ii.is_finite() && s_ii > 0.0) {
        return Err(invalid("s_ii", format!("must be positive, got {s_ii}")));
    }
    let (uu, vv, gamma) = coupling_terms(cfg, draw, scene, t.direction, t.range)?;
    if !(gamma > 1e-12 * uu * vv) {
        return Err(RfdaError::Singular(format!(
            "coupling factor γ = {gamma:e} vanishes: direction and range are not separable \
             (linear frequency increments make m parallel to n)"
        )));
    }
    let c = cfg.wave_speed();
    let common = noise_power * c * c / (2.0 * l as f64 * s_ii * gamma);
    let kt = 4.0 * PI * cfg.center_freq() * cfg.spacing() * t.direction.cos();
    let kr = 4.0 * PI * cfg.freq_increment();
    Ok((common * vv / (kt * kt), common * uu / (kr * kr)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_model::{sample_frequencies, FrequencyDistribution};
    use proptest::prelude::*;

    fn setup(n: usize, seed: u64) -> (ArrayConfig, FrequencyDraw) {
        let cfg = ArrayConfig::s_band(n).unwrap();
        let dist = FrequencyDistribution::discrete_uniform(32).unwrap();
        (cfg, sample_frequencies(&dist, n, seed).unwrap())
    }

    fn one(theta: f64, r: f64) -> TargetScene {
        TargetScene::steady(&[(theta, r, Complex64::new(1.0, 0.0))], 1).unwrap()
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let (cfg, draw) = setup(32, 3);
        let (theta, r) = (0.3, 42.0);
        let (dt, dr) = steering_derivatives(&cfg, &draw, theta, r).unwrap();
        let b = |t: f64, x: f64| steering_vector_unchecked(&cfg, draw.offsets(), t, x, BasebandModel::Approximate);
        let h = 1e-6;
        let fd_t = (b(theta + h, r) - b(theta - h, r)) / Complex64::from(2.0 * h);
        assert!((&fd_t - &dt).norm() / dt.norm() < 1e-5);
        // compare against the carrier-phase-free vector
        let k = 4.0 * PI * cfg.center_freq() / cfg.wave_speed();
        let reduced = |x: f64| b(theta, x) * Complex64::from_polar(1.0, k * x);
        let h = 1e-4;
        let fd_r = (reduced(r + h) - reduced(r - h)) / Complex64::from(2.0 * h);
        let expect = dr * Complex64::from_polar(1.0, k * r);
        assert!((&fd_r - &expect).norm() / expect.norm() < 1e-5);
    }

    #[test]
    fn lfda_fim_is_singular() {
        let cfg = ArrayConfig::s_band(16).unwrap();
        let draw = FrequencyDraw::linear(16);
        let s = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        let rep = fim(&cfg, &draw, &one(0.2, 30.0), &s, 0.1, 1).unwrap();
        assert!(rep.crb.is_none());
        assert!(rep.per_target.is_none());
        let err = crb_uncorrelated(&cfg, &draw, &one(0.2, 30.0), 0, 0.1, 1, 1.0).unwrap_err();
        assert!(matches!(err, RfdaError::Singular(_)));
    }

    #[test]
    fn closed_form_matches_fim_inverse() {
        for seed in 0..5 {
            let (cfg, draw) = setup(64, seed);
            let scene = one(0.4, 55.5);
            let s = DMatrix::from_element(1, 1, Complex64::new(2.0, 0.0));
            let rep = fim(&cfg, &draw, &scene, &s, 0.3, 4).unwrap();
            let (ct, cr) = rep.per_target.unwrap()[0];
            let (ut, ur) = crb_uncorrelated(&cfg, &draw, &scene, 0, 0.3, 4, 2.0).unwrap();
            assert!((ct / ut - 1.0).abs() < 1e-9, "{ct} {ut}");
            assert!((cr / ur - 1.0).abs() < 1e-9, "{cr} {ur}");
        }
    }

    #[test]
    fn closed_form_matches_block_diagonal_fim_for_several_targets() {
        let (cfg, draw) = setup(48, 9);
        let scene = TargetScene::steady(
            &[(-0.5, 12.0, Complex64::new(1.0, 0.0)), (0.1, 70.0, Complex64::new(0.0, 1.0))],
            1,
        )
        .unwrap();
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![Complex64::new(1.5, 0.0), Complex64::new(0.5, 0.0)]));
        let rep = fim(&cfg, &draw, &scene, &s, 0.2, 3).unwrap();
        let crb = rep.per_target.unwrap();
        for (i, sii) in [1.5, 0.5].into_iter().enumerate() {
            let (t, r) = crb_uncorrelated(&cfg, &draw, &scene, i, 0.2, 3, sii).unwrap();
            assert!((crb[i].0 / t - 1.0).abs() < 1e-9);
            assert!((crb[i].1 / r - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn doubling_snapshots_halves_crb() {
        let (cfg, draw) = setup(32, 1);
        let s = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        let a = fim(&cfg, &draw, &one(0.1, 20.0), &s, 1.0, 5).unwrap().crb.unwrap();
        let b = fim(&cfg, &draw, &one(0.1, 20.0), &s, 1.0, 10).unwrap().crb.unwrap();
        for k in 0..2 {
            assert!((a[(k, k)] / b[(k, k)] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn direction_crb_scales_with_inverse_cos_squared() {
        let (cfg, draw) = setup(32, 2);
        let (t0, _) = crb_uncorrelated(&cfg, &draw, &one(0.0, 10.0), 0, 1.0, 1, 1.0).unwrap();
        let (t60, _) = crb_uncorrelated(&cfg, &draw, &one(PI / 3.0, 10.0), 0, 1.0, 1, 1.0).unwrap();
        assert!((t60 / t0 - 4.0).abs() < 1e-9);
    }

    #[test]
    fn coincident_targets_and_bad_inputs_are_rejected() {
        let (cfg, draw) = setup(16, 0);
        let scene = TargetScene::steady(
            &[(0.2, 10.0, Complex64::new(1.0, 0.0)), (0.2, 10.0, Complex64::new(1.0, 0.0))],
            1,
        )
        .unwrap();
        let s = DMatrix::identity(2, 2);
        assert!(matches!(fim(&cfg, &draw, &scene, &s, 1.0, 1), Err(RfdaError::Singular(_))));
        let one_t = one(0.2, 10.0);
        let bad = DMatrix::from_element(1, 1, Complex64::new(-1.0, 0.0));
        assert!(fim(&cfg, &draw, &one_t, &bad, 1.0, 1).is_err());
        let s1 = DMatrix::identity(1, 1);
        assert!(fim(&cfg, &draw, &one_t, &s1, 0.0, 1).is_err());
        assert!(crb_uncorrelated(&cfg, &draw, &one_t, 1, 1.0, 1, 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fim_is_symmetric_psd(seed in 0u64..10_000, t in -1.2f64..1.2, r in 0.0f64..150.0) {
            let (cfg, draw) = setup(24, seed);
            let s = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
            let j = fim(&cfg, &draw, &one(t, r), &s, 0.5, 2).unwrap().fim;
            prop_assert!((&j - j.transpose()).norm() <= 1e-12 * j.norm());
            let lo = j.clone().symmetric_eigenvalues().min();
            prop_assert!(lo >= -1e-9 * j.norm());
        }
    }

    #[test]
    fn gamma_is_non_negative_over_many_draws() {
        use crate::rng::seeded_rng;
        use rand::Rng;
        let mut rng = seeded_rng(17);
        let cfg = ArrayConfig::s_band(16).unwrap();
        for k in 0..10_000u64 {
            let dist = match k % 3 {
                0 => FrequencyDistribution::gaussian(5.0).unwrap(),
                1 => FrequencyDistribution::continuous_uniform(32.0).unwrap(),
                _ => FrequencyDistribution::discrete_uniform(32).unwrap(),
            };
            let draw = sample_frequencies(&dist, 16, k).unwrap();
            let (t, r) = (rng.random_range(-1.4..1.4), rng.random_range(0.0..150.0));
            let (uu, vv, gamma) = coupling_terms(&cfg, &draw, &one(t, r), t, r).unwrap();
            assert!(gamma >= -1e-12 * uu * vv, "draw {k}: γ = {gamma}");
        }
    }
}
