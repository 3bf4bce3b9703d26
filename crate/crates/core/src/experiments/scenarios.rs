use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Scenario};
use super::table::Table;
use crate::array_model::{
    sample_frequencies, synthesize_echoes, FrequencyDraw, Target, TargetScene,
};
use crate::bounds::{
    canonical_coherence, coherence_prob_bound, crb_uncorrelated, exact_recovery_sparsity, fim, ml_estimate,
    mutual_coherence,
};
use crate::error::{Result, RfdaError};
use crate::processing::{
    build_observing_matrix, default_noise_tolerance, detection_success, gsp_recover, matched_filter, mfocuss_with,
    sp_recover, DirectionRangeGrid, FocussOptions, ObservingMatrix,
};
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::statistics::{
    asymptotic_moments, beampattern_value, ks_normality_test, mean_beampattern, monte_carlo_stats,
    variance_beampattern, MonteCarloOptions, NormalizedOffset,
};

pub(super) fn dispatch(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    match cfg.scenario {
        Scenario::Beampattern => beampattern(cfg),
        Scenario::Moments => moments(cfg),
        Scenario::Ks => ks(cfg),
        Scenario::DetectExample => detect_example(cfg),
        Scenario::DetectSweep => detect_sweep(cfg),
        Scenario::CrbMse => crb_mse(cfg),
        Scenario::Coherence => coherence(cfg),
    }
}

fn draw_for(cfg: &ExperimentConfig, trial: usize) -> Result<FrequencyDraw> {
    let n = cfg.array.n_elements();
    if cfg.lfda {
        return Ok(FrequencyDraw::linear(n));
    }
    let index = if cfg.redraws() { trial as u64 } else { 0 };
    sample_frequencies(&cfg.distribution, n, derive_seed(cfg.seed, Stream::FrequencyDraw, index))
}

fn amplitude(snr_db: f64, relative_db: f64) -> f64 {
    10f64.powf((snr_db + relative_db) / 20.0)
}

fn offsets(cfg: &ExperimentConfig) -> Vec<NormalizedOffset> {
    cfg.grid
        .points()
        .into_iter()
        .map(|(q, p)| NormalizedOffset::for_array(&cfg.array, q, p))
        .collect()
}

fn beampattern(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let draw = draw_for(cfg, 0)?;
    let offs = offsets(cfg);
    let values: Vec<Complex64> = offs
        .iter()
        .map(|o| beampattern_value(&cfg.array, &draw, o))
        .collect::<Result<_>>()?;
    let mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let peak = mags.iter().fold(0.0_f64, |m, &v| m.max(v));
    let off_peak = offs
        .iter()
        .zip(&mags)
        .filter(|(o, _)| o.q.abs() > 1e-12 || o.p.abs() > 1e-12)
        .fold(0.0_f64, |m, (_, &v)| m.max(v));
    Ok(vec![
        Table::new("beampattern")
            .float("q", offs.iter().map(|o| o.q).collect())
            .float("p", offs.iter().map(|o| o.p).collect())
            .float("re", values.iter().map(|v| v.re).collect())
            .float("im", values.iter().map(|v| v.im).collect())
            .float("magnitude", mags),
        Table::new("beampattern_summary")
            .float("peak_magnitude", vec![peak])
            .float("max_off_peak_magnitude", vec![off_peak]),
    ])
}

fn moments(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let offs = offsets(cfg);
    let opts = MonteCarloOptions {
        n_trials: cfg.trials,
        seed: cfg.seed,
        keep_samples: false,
    };
    let stats = monte_carlo_stats(&cfg.distribution, &cfg.array, &offs, opts)?;
    let (d, a) = (&cfg.distribution, &cfg.array);
    let mean_a: Vec<Complex64> = offs.iter().map(|o| mean_beampattern(d, a, o)).collect();
    let sq_a: Vec<f64> = offs.iter().map(|o| asymptotic_moments(d, a, o).square_centered).collect();
    let col = |f: &dyn Fn(usize) -> f64| (0..offs.len()).map(f).collect::<Vec<f64>>();
    Ok(vec![Table::new("moments")
        .float("q", col(&|i| offs[i].q))
        .float("p", col(&|i| offs[i].p))
        .float("mean_re", col(&|i| stats[i].mean_est.re))
        .float("mean_im", col(&|i| stats[i].mean_est.im))
        .float("mean_analytic_re", col(&|i| mean_a[i].re))
        .float("mean_analytic_im", col(&|i| mean_a[i].im))
        .float("mean_se", col(&|i| stats[i].mean_se()))
        .float("var", col(&|i| stats[i].var_est))
        .float("var_analytic", col(&|i| variance_beampattern(d, a, offs[i].p)))
        .float("var_se", col(&|i| stats[i].var_se))
        .float("var_re", col(&|i| stats[i].var_re))
        .float("var_im", col(&|i| stats[i].var_im))
        .float("cov_re_im", col(&|i| stats[i].cov_re_im))
        .float("sq_re", col(&|i| stats[i].square_centered_est.re))
        .float("sq_im", col(&|i| stats[i].square_centered_est.im))
        .float("sq_analytic", sq_a)
        .float("sq_se", col(&|i| stats[i].square_centered_se))])
}

fn standardize(xs: &[f64]) -> Option<Vec<f64>> {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (var > 0.0).then(|| xs.iter().map(|x| (x - mean) / var.sqrt()).collect())
}

fn ks(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let n = cfg.array.n_elements() as f64;
    let offs: Vec<NormalizedOffset> = offsets(cfg)
        .into_iter()
        .filter(|o| variance_beampattern(&cfg.distribution, &cfg.array, o.p) * n > 1e-9)
        .collect();
    let opts = MonteCarloOptions {
        n_trials: cfg.trials,
        seed: cfg.seed,
        keep_samples: true,
    };
    let stats = monte_carlo_stats(&cfg.distribution, &cfg.array, &offs, opts)?;
    let mut t = (vec![], vec![], vec![], vec![], vec![], vec![], vec![], vec![]);
    for (o, s) in offs.iter().zip(&stats) {
        let samples = s.samples.as_ref().expect("samples requested");
        let re: Vec<f64> = samples.iter().map(|x| x.0).collect();
        let im: Vec<f64> = samples.iter().map(|x| x.1).collect();
        let (Some(zr), Some(zi)) = (standardize(&re), standardize(&im)) else {
            continue;
        };
        let kr = ks_normality_test(&zr, cfg.ks_alpha)?;
        let ki = ks_normality_test(&zi, cfg.ks_alpha)?;
        t.0.push(o.q);
        t.1.push(o.p);
        t.2.push(kr.statistic);
        t.3.push(ki.statistic);
        t.4.push(kr.threshold);
        t.5.push(kr.pass);
        t.6.push(ki.pass);
        t.7.push(kr.pass && ki.pass);
    }
    let tested = t.7.len();
    let passed = t.7.iter().filter(|&&b| b).count();
    Ok(vec![
        Table::new("ks")
            .float("q", t.0)
            .float("p", t.1)
            .float("statistic_re", t.2)
            .float("statistic_im", t.3)
            .float("threshold", t.4)
            .boolean("pass_re", t.5)
            .boolean("pass_im", t.6)
            .boolean("pass", t.7),
        Table::new("ks_summary")
            .int("tested", vec![tested as i64])
            .int("passed", vec![passed as i64])
            .float("pass_fraction", vec![if tested > 0 { passed as f64 / tested as f64 } else { 0.0 }]),
    ])
}

/// Targets snapped to the processing lattice.
struct Placed {
    index: Vec<usize>,
    theta: Vec<f64>,
    range: Vec<f64>,
    relative_db: Vec<f64>,
}

fn place_targets(cfg: &ExperimentConfig, grid: &DirectionRangeGrid) -> Result<Placed> {
    let specs = cfg.target_specs();
    let mut p = Placed {
        index: vec![],
        theta: vec![],
        range: vec![],
        relative_db: vec![],
    };
    for t in &specs {
        let i = grid.nearest(t.direction_deg.to_radians(), t.range_m);
        if p.index.contains(&i) {
            return Err(RfdaError::Config(format!("targets collide on lattice cell {i}")));
        }
        let (th, r) = grid.point(i);
        p.index.push(i);
        p.theta.push(th);
        p.range.push(r);
        p.relative_db.push(t.relative_db);
    }
    Ok(p)
}

fn targets_table(placed: &Placed) -> Table {
    Table::new("targets")
        .int("grid_index", placed.index.iter().map(|&i| i as i64).collect())
        .float("direction_deg", placed.theta.iter().map(|t| t.to_degrees()).collect())
        .float("range_m", placed.range.clone())
        .float("relative_db", placed.relative_db.clone())
}

/// Echo for the placed targets with random phases from trial `t`.
fn scene_for(placed: &Placed, snr_db: f64, phases: &[Vec<f64>], l: usize) -> Result<TargetScene> {
    let targets = (0..placed.index.len())
        .map(|k| Target {
            direction: placed.theta[k],
            range: placed.range[k],
            amplitudes: (0..l)
                .map(|s| Complex64::from_polar(amplitude(snr_db, placed.relative_db[k]), phases[k][s]))
                .collect(),
        })
        .collect();
    TargetScene::new(targets, l)
}

fn random_phases(cfg: &ExperimentConfig, trial: usize, n_targets: usize, l: usize) -> Vec<Vec<f64>> {
    let mut rng = stream_rng(cfg.seed, Stream::Amplitude, trial as u64);
    (0..n_targets)
        .map(|_| (0..l).map(|_| rng.random_range(0.0..2.0 * PI)).collect())
        .collect()
}

/// Observing matrix shared by all trials, or `None` when offsets are redrawn.
fn shared_obs(cfg: &ExperimentConfig, grid: &DirectionRangeGrid) -> Result<Option<ObservingMatrix>> {
    if cfg.redraws() {
        Ok(None)
    } else {
        Ok(Some(build_observing_matrix(&cfg.array, &draw_for(cfg, 0)?, grid)?))
    }
}

fn obs_for<'a>(
    cfg: &ExperimentConfig,
    grid: &DirectionRangeGrid,
    shared: &'a Option<ObservingMatrix>,
    trial: usize,
) -> Result<std::borrow::Cow<'a, ObservingMatrix>> {
    Ok(match shared {
        Some(o) => std::borrow::Cow::Borrowed(o),
        None => std::borrow::Cow::Owned(build_observing_matrix(&cfg.array, &draw_for(cfg, trial)?, grid)?),
    })
}

fn detect_example(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let grid = DirectionRangeGrid::canonical(&cfg.array, cfg.lattice_levels())?;
    let placed = place_targets(cfg, &grid)?;
    let mut truth = placed.index.clone();
    truth.sort_unstable();
    let weak = (0..placed.index.len())
        .min_by(|&a, &b| placed.relative_db[a].total_cmp(&placed.relative_db[b]))
        .expect("at least one target");
    let snr = cfg.snr_points()[0];
    let k = cfg.sparsity_k();
    let shared = shared_obs(cfg, &grid)?;

    struct Outcome {
        success: bool,
        weak_peak: f64,
        sidelobe: f64,
        map: Option<Vec<f64>>,
        support: Option<(Vec<usize>, Vec<f64>)>,
    }
    let outcomes: Vec<Outcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Outcome> {
            let obs = obs_for(cfg, &grid, &shared, t)?;
            let scene = scene_for(&placed, snr, &random_phases(cfg, t, placed.index.len(), 1), 1)?;
            let echo = synthesize_echoes(&cfg.array, &obs.draw, &scene, 1.0, derive_seed(cfg.seed, Stream::Noise, t as u64))?;
            let mf = matched_filter(&echo, &obs)?;
            let sp = sp_recover(&obs, &echo.column(0), k)?;
            let sidelobe = mf
                .iter()
                .enumerate()
                .filter(|(i, _)| !truth.contains(i))
                .fold(0.0_f64, |m, (_, &v)| m.max(v));
            let first = t == 0;
            Ok(Outcome {
                success: detection_success(&sp, &truth),
                weak_peak: mf[placed.index[weak]],
                sidelobe,
                support: first.then(|| {
                    let mags = sp.amplitudes.row_iter().map(|r| r.norm()).collect();
                    (sp.support.clone(), mags)
                }),
                map: first.then_some(mf),
            })
        })
        .collect::<Result<_>>()?;

    let map = outcomes[0].map.as_ref().expect("first trial keeps its map");
    let (support, mags) = outcomes[0].support.as_ref().expect("first trial keeps its support");
    let points: Vec<(f64, f64)> = (0..grid.len()).map(|i| grid.point(i)).collect();
    let masked: Vec<bool> = outcomes.iter().map(|o| o.weak_peak < o.sidelobe).collect();
    let successes = outcomes.iter().filter(|o| o.success).count();
    let n = cfg.trials as f64;
    Ok(vec![
        targets_table(&placed),
        Table::new("mf_map")
            .float("direction_deg", points.iter().map(|p| p.0.to_degrees()).collect())
            .float("range_m", points.iter().map(|p| p.1).collect())
            .float("value", map.clone()),
        Table::new("sp_support")
            .int("grid_index", support.iter().map(|&i| i as i64).collect())
            .float("direction_deg", support.iter().map(|&i| grid.point(i).0.to_degrees()).collect())
            .float("range_m", support.iter().map(|&i| grid.point(i).1).collect())
            .float("magnitude", mags.clone()),
        Table::new("trials")
            .int("trial", (0..cfg.trials as i64).collect())
            .boolean("sp_success", outcomes.iter().map(|o| o.success).collect())
            .float("weak_peak", outcomes.iter().map(|o| o.weak_peak).collect())
            .float("sidelobe_peak", outcomes.iter().map(|o| o.sidelobe).collect())
            .boolean("weak_masked", masked.clone()),
        Table::new("summary")
            .int("trials", vec![cfg.trials as i64])
            .float("sp_success_rate", vec![successes as f64 / n])
            .float("masked_fraction", vec![masked.iter().filter(|&&b| b).count() as f64 / n]),
    ])
}

const ALGORITHMS: [&str; 4] = ["sp", "focuss", "gsp", "mfocuss"];

fn detect_sweep(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let grid = DirectionRangeGrid::canonical(&cfg.array, cfg.lattice_levels())?;
    let placed = place_targets(cfg, &grid)?;
    let mut truth = placed.index.clone();
    truth.sort_unstable();
    let snrs = cfg.snr_points();
    let (k, l, n) = (cfg.sparsity_k(), cfg.snapshots, cfg.array.n_elements());
    let shared = shared_obs(cfg, &grid)?;
    let focuss_opts = |snapshots: usize| FocussOptions {
        support_threshold: cfg.support_threshold,
        ..FocussOptions::discrepancy(default_noise_tolerance(n, snapshots, 1.0))
    };
    let (smv_opts, mmv_opts) = (focuss_opts(1), focuss_opts(l));

    let per_trial: Vec<Vec<[bool; 4]>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<[bool; 4]>> {
            let obs = obs_for(cfg, &grid, &shared, t)?;
            let phases = random_phases(cfg, t, placed.index.len(), l);
            let noise_seed = derive_seed(cfg.seed, Stream::Noise, t as u64);
            snrs.iter()
                .map(|&snr| {
                    let scene = scene_for(&placed, snr, &phases, l)?;
                    let echo = synthesize_echoes(&cfg.array, &obs.draw, &scene, 1.0, noise_seed)?;
                    let smv = DMatrix::from_column_slice(n, 1, echo.column(0).as_slice());
                    Ok([
                        detection_success(&sp_recover(&obs, &echo.column(0), k)?, &truth),
                        detection_success(&mfocuss_with(&obs, &smv, &smv_opts)?, &truth),
                        detection_success(&gsp_recover(&obs, &echo.samples, k)?, &truth),
                        detection_success(&mfocuss_with(&obs, &echo.samples, &mmv_opts)?, &truth),
                    ])
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut rows = (vec![], vec![], vec![], vec![], vec![], vec![]);
    let nt = cfg.trials as f64;
    for (si, &snr) in snrs.iter().enumerate() {
        for (ai, name) in ALGORITHMS.iter().enumerate() {
            let hits = per_trial.iter().filter(|r| r[si][ai]).count();
            let rate = hits as f64 / nt;
            rows.0.push(snr);
            rows.1.push(name.to_string());
            rows.2.push(hits as i64);
            rows.3.push(cfg.trials as i64);
            rows.4.push(rate);
            rows.5.push((rate * (1.0 - rate) / nt).sqrt());
        }
    }
    Ok(vec![
        targets_table(&placed),
        Table::new("detection")
            .float("snr_db", rows.0)
            .text("algorithm", rows.1)
            .int("successes", rows.2)
            .int("trials", rows.3)
            .float("rate", rows.4)
            .float("se", rows.5),
    ])
}

fn crb_mse(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let grid = DirectionRangeGrid::canonical(&cfg.array, cfg.lattice_levels())?;
    let target = cfg.target_specs()[0];
    let (theta, range) = (target.direction_deg.to_radians(), target.range_m);
    let a = Complex64::from(amplitude(0.0, target.relative_db));
    let scene = TargetScene::steady(&[(theta, range, a)], 1)?;
    let s = DMatrix::from_element(1, 1, Complex64::from(a.norm_sqr()));
    let snrs = cfg.snr_points();
    let noise: Vec<f64> = snrs.iter().map(|&x| 10f64.powf(-x / 10.0)).collect();
    let shared = shared_obs(cfg, &grid)?;

    // (θ error², r error², converged, closed-form CRBs, FIM CRBs) per SNR
    type Row = (f64, f64, bool, (f64, f64), (f64, f64));
    let per_trial: Vec<Vec<Row>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<Row>> {
            let obs = obs_for(cfg, &grid, &shared, t)?;
            let noise_seed = derive_seed(cfg.seed, Stream::Noise, t as u64);
            noise
                .iter()
                .map(|&sigma2| {
                    let echo = synthesize_echoes(&cfg.array, &obs.draw, &scene, sigma2, noise_seed)?;
                    let est = ml_estimate(&cfg.array, &obs, &echo)?;
                    let closed = crb_uncorrelated(&cfg.array, &obs.draw, &scene, 0, sigma2, 1, a.norm_sqr())?;
                    let general = fim(&cfg.array, &obs.draw, &scene, &s, sigma2, 1)?
                        .per_target
                        .map_or((f64::INFINITY, f64::INFINITY), |v| v[0]);
                    Ok((
                        (est.direction - theta).powi(2),
                        (est.range - range).powi(2),
                        est.converged,
                        closed,
                        general,
                    ))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let nt = cfg.trials as f64;
    let mean_se = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / nt;
        let var = if v.len() > 1 {
            v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (nt - 1.0)
        } else {
            0.0
        };
        (m, (var / nt).sqrt())
    };
    let mut cols: Vec<Vec<f64>> = vec![vec![]; 10];
    for si in 0..snrs.len() {
        let rows: Vec<&Row> = per_trial.iter().map(|r| &r[si]).collect();
        let (mt, st) = mean_se(&rows.iter().map(|r| r.0).collect::<Vec<_>>());
        let (mr, sr) = mean_se(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
        let avg = |f: &dyn Fn(&Row) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / nt;
        let vals = [
            snrs[si],
            avg(&|r| r.3 .0),
            avg(&|r| r.3 .1),
            avg(&|r| r.4 .0),
            avg(&|r| r.4 .1),
            mt,
            mr,
            st,
            sr,
            rows.iter().filter(|r| r.2).count() as f64 / nt,
        ];
        for (c, v) in cols.iter_mut().zip(vals) {
            c.push(v);
        }
    }
    let names = [
        "snr_db",
        "crb_theta",
        "crb_range",
        "fim_crb_theta",
        "fim_crb_range",
        "mse_theta",
        "mse_range",
        "mse_theta_se",
        "mse_range_se",
        "refinement_converged",
    ];
    let mut table = Table::new("crb_mse");
    for (name, c) in names.iter().zip(cols) {
        table = table.float(name, c);
    }
    table = table.int("trials", vec![cfg.trials as i64; snrs.len()]);
    Ok(vec![table])
}

fn coherence(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let m = cfg.lattice_levels();
    let n = cfg.array.n_elements();
    let k = cfg.sparsity_k();
    let grid = DirectionRangeGrid::canonical(&cfg.array, m)?;
    let threshold = 1.0 / (2 * k - 1) as f64;

    let per_draw: Vec<(f64, Option<bool>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, Option<bool>)> {
            let draw = draw_for(cfg, t)?;
            let mu = if draw.grid_rows(m).is_ok() {
                canonical_coherence(&cfg.array, &draw, m)?.mu
            } else {
                mutual_coherence(&build_observing_matrix(&cfg.array, &draw, &grid)?)?.mu
            };
            if mu >= threshold {
                return Ok((mu, None));
            }
            let obs = build_observing_matrix(&cfg.array, &draw, &grid)?;
            let mut rng = stream_rng(cfg.seed, Stream::Placement, t as u64);
            let mut truth = rand::seq::index::sample(&mut rng, grid.len(), k).into_vec();
            truth.sort_unstable();
            let mut arng = stream_rng(cfg.seed, Stream::Amplitude, t as u64);
            let x = DMatrix::from_fn(k, 1, |_, _| Complex64::from_polar(1.0, arng.random_range(0.0..2.0 * PI)));
            let echo = obs.columns.select_columns(&truth) * x;
            let res = sp_recover(&obs, &echo.column(0).into_owned(), k)?;
            Ok((mu, Some(detection_success(&res, &truth))))
        })
        .collect::<Result<_>>()?;

    let nt = cfg.trials as f64;
    let radii = &cfg.coherence_radii;
    let empirical: Vec<f64> = radii
        .iter()
        .map(|&r| per_draw.iter().filter(|d| d.0 < r).count() as f64 / nt)
        .collect();
    let bound: Vec<f64> = radii.iter().map(|&r| coherence_prob_bound(m, n, r)).collect();
    let tested = per_draw.iter().filter(|d| d.1.is_some()).count();
    let hits = per_draw.iter().filter(|d| d.1 == Some(true)).count();
    let k_exact = if m >= 2 { exact_recovery_sparsity(m, n, cfg.epsilon)? as i64 } else { 0 };
    Ok(vec![
        Table::new("coherence_draws")
            .int("trial", (0..cfg.trials as i64).collect())
            .float("mu", per_draw.iter().map(|d| d.0).collect())
            .boolean("recovery_tested", per_draw.iter().map(|d| d.1.is_some()).collect())
            .boolean("recovery_success", per_draw.iter().map(|d| d.1 == Some(true)).collect()),
        Table::new("coherence_bound")
            .float("r", radii.clone())
            .float("empirical_prob", empirical.clone())
            .float("bound", bound.clone())
            .boolean("dominates", empirical.iter().zip(&bound).map(|(e, b)| e >= b).collect()),
        Table::new("guarantees")
            .int("m_levels", vec![m as i64])
            .int("n_elements", vec![n as i64])
            .float("epsilon", vec![cfg.epsilon])
            .int("k_exact", vec![k_exact])
            .int("sparsity", vec![k as i64])
            .float("mu_threshold", vec![threshold])
            .int("low_coherence_draws", vec![tested as i64])
            .int("sp_successes", vec![hits as i64])
            .float("sp_success_rate", vec![if tested > 0 { hits as f64 / tested as f64 } else { 0.0 }]),
    ])
}
