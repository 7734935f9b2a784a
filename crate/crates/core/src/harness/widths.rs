//! `widths`: complex-scaling and shooting widths per `(h, k)` and the fit of
//! `ln Gamma` against `1/h`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ConfigError, Resolved};
use super::spectrum::check_smooth;
use super::{cmp_f64, with_pool, HarnessError};
use crate::direct::scaling::GAMMA_FLOOR;
use crate::direct::{
    bound_states, discretize, resonances_complex_scaling, shooting_resonance, Resonance, ScalingOptions,
    ShootingOptions,
};
use crate::profile::JunctionProfile;
use crate::semiclassical::width_estimate;

/// Fewest `h` values for which a slope is fitted.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidthRow {
    pub h: f64,
    pub k: i64,
    pub seed: f64,
    pub re_complex_scaling: Option<f64>,
    pub gamma_complex_scaling: Option<f64>,
    pub theta_stability: Option<f64>,
    pub re_shooting: Option<f64>,
    pub gamma_shooting: Option<f64>,
    pub barrier: Option<f64>,
    pub alpha: Option<f64>,
    pub bare_exponent: Option<f64>,
    pub flag: String,
}

impl WidthRow {
    pub const HEADER: [&'static str; 12] = [
        "h",
        "k",
        "E_seed",
        "re_E_complex_scaling",
        "gamma_complex_scaling",
        "theta_stability",
        "re_E_shooting",
        "gamma_shooting",
        "Theta",
        "alpha",
        "bare_exponent",
        "flag",
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidthFit {
    pub reference_energy: f64,
    pub tracked_energy: Option<f64>,
    pub h_values: usize,
    pub points_used: usize,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
    pub predicted_slope: Option<f64>,
    pub relative_deviation: Option<f64>,
    pub status: String,
}

impl WidthFit {
    pub const HEADER: [&'static str; 10] = [
        "reference_energy",
        "tracked_energy",
        "h_values",
        "points_used",
        "slope",
        "intercept",
        "r_squared",
        "predicted_slope",
        "relative_deviation",
        "status",
    ];
}

#[derive(Clone, Debug)]
pub struct WidthsOutput {
    pub rows: Vec<WidthRow>,
    pub fit: WidthFit,
}

/// Ordinary least squares `y = a + b x`; returns `(b, a, R^2)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((b, a, r2))
}

pub fn run_widths(r: &Resolved, jobs: usize) -> Result<WidthsOutput, HarnessError> {
    let s = r.config.solvers;
    if !(s.direct && s.bohr_sommerfeld) {
        return Err(ConfigError::Invalid {
            field: "solvers".into(),
            message: "widths need both `direct` and `bohr_sommerfeld` enabled".into(),
        }
        .into());
    }
    check_smooth(r, "profile.ramp_shape")?;
    let phi = r.config.phi_list[0];
    let profile = r.profile(phi)?;

    let per_h: Vec<Result<Vec<WidthRow>, HarnessError>> = with_pool(jobs, || {
        r.config.h_list.par_iter().map(|&h| widths_at(r, &profile, h)).collect()
    })?;
    let mut rows = Vec::new();
    for p in per_h {
        rows.extend(p?);
    }
    rows.sort_by(|a, b| cmp_f64(a.h, b.h).reverse().then(a.k.cmp(&b.k)));
    let fit = fit_rows(r, &profile, &rows)?;

    let es = r.energy_scale;
    for row in &mut rows {
        row.seed /= es;
        for v in [
            &mut row.re_complex_scaling,
            &mut row.gamma_complex_scaling,
            &mut row.theta_stability,
        ] {
            *v = v.map(|x| x / es);
        }
        for v in [&mut row.re_shooting, &mut row.gamma_shooting] {
            *v = v.map(|x| x / es);
        }
    }
    Ok(WidthsOutput { rows, fit })
}

fn widths_at(r: &Resolved, profile: &JunctionProfile, h: f64) -> Result<Vec<WidthRow>, HarnessError> {
    let n = r.config.grid.n;
    let op = discretize(profile, h, r.half_width, n, 0.0, r.x_scale_start)?;
    let levels = bound_states(&op, r.window)?.decayed();
    let seeds: Vec<f64> = levels.iter().map(|l| l.energy).collect();
    if seeds.is_empty() {
        return Ok(Vec::new());
    }
    let theta = r.config.theta_list[0];
    let mut opts = ScalingOptions::new(r.half_width, n);
    opts.x_scale_start = r.x_scale_start;
    // one failing seed should not drop the others
    let cs: Vec<Result<Resonance, String>> = match resonances_complex_scaling(profile, h, &seeds, theta, &opts) {
        Ok(v) => v.into_iter().map(Ok).collect(),
        Err(_) => seeds
            .iter()
            .map(|&s| {
                resonances_complex_scaling(profile, h, &[s], theta, &opts)
                    .map(|v| v[0])
                    .map_err(|e| e.to_string())
            })
            .collect(),
    };
    let tol_quad = r
        .config
        .tol_quad
        .unwrap_or(crate::SemiclassicalParams::DEFAULT_TOL_QUAD);
    let shoot = ShootingOptions::default();

    let mut rows = Vec::with_capacity(seeds.len());
    for (level, cs) in levels.iter().zip(cs) {
        let seed = level.energy;
        let sh = shooting_resonance(profile, h, Complex64::new(seed, 0.0), &shoot);
        let est = width_estimate(profile, seed, h, tol_quad).ok();
        let mut flag = String::from("ok");
        let (re_cs, g_cs, stab) = match &cs {
            Ok(res) => {
                if res.escaped {
                    flag = "escaped".into();
                } else if res.gamma <= GAMMA_FLOOR {
                    flag = "below-floor".into();
                }
                (Some(res.energy_complex.re), Some(res.gamma), Some(res.stability))
            }
            Err(e) => {
                flag = format!("error: {e}");
                (None, None, None)
            }
        };
        let (re_sh, g_sh) = match &sh {
            Ok(res) => (Some(res.energy_complex.re), Some(res.gamma)),
            Err(_) => (None, None),
        };
        rows.push(WidthRow {
            h,
            k: level.k,
            seed,
            re_complex_scaling: re_cs,
            gamma_complex_scaling: g_cs,
            theta_stability: stab,
            re_shooting: re_sh,
            gamma_shooting: g_sh,
            barrier: est.map(|e| e.theta),
            alpha: est.map(|e| e.alpha),
            bare_exponent: est.map(|e| e.bare_exponent),
            flag,
        });
    }
    Ok(rows)
}

fn fit_rows(r: &Resolved, profile: &JunctionProfile, rows: &[WidthRow]) -> Result<WidthFit, HarnessError> {
    let e_ref = r.reference_energy;
    let mut fit = WidthFit {
        reference_energy: e_ref / r.energy_scale,
        tracked_energy: None,
        h_values: r.config.h_list.len(),
        points_used: 0,
        slope: None,
        intercept: None,
        r_squared: None,
        predicted_slope: None,
        relative_deviation: None,
        status: String::new(),
    };
    // the level nearest the reference energy at each h
    let mut tracked: Vec<&WidthRow> = Vec::new();
    for &h in &r.config.h_list {
        if let Some(best) = rows
            .iter()
            .filter(|w| w.h == h && !w.flag.starts_with("error"))
            .min_by(|a, b| cmp_f64((a.seed - e_ref).abs(), (b.seed - e_ref).abs()))
        {
            tracked.push(best);
        }
    }
    if !tracked.is_empty() {
        let mean = tracked.iter().map(|w| w.seed).sum::<f64>() / tracked.len() as f64;
        fit.tracked_energy = Some(mean / r.energy_scale);
        let h_any = r.config.h_list[0];
        let tol_quad = r
            .config
            .tol_quad
            .unwrap_or(crate::SemiclassicalParams::DEFAULT_TOL_QUAD);
        let est = width_estimate(profile, mean, h_any, tol_quad)?;
        fit.predicted_slope = Some(-2.0 * est.theta / est.alpha);
    }
    let used: Vec<&&WidthRow> = tracked.iter().filter(|w| w.flag == "ok").collect();
    fit.points_used = used.len();
    if r.config.h_list.len() < MIN_FIT_POINTS {
        fit.status = format!("refused: fewer than {MIN_FIT_POINTS} h values");
        return Ok(fit);
    }
    if used.len() < MIN_FIT_POINTS {
        fit.status = format!("refused: {} widths above the floor", used.len());
        return Ok(fit);
    }
    let x: Vec<f64> = used.iter().map(|w| 1.0 / w.h).collect();
    let y: Vec<f64> = used
        .iter()
        .map(|w| w.gamma_complex_scaling.expect("ok rows carry a width").ln())
        .collect();
    match linear_fit(&x, &y) {
        Some((b, a, r2)) => {
            fit.slope = Some(b);
            fit.intercept = Some(a);
            fit.r_squared = Some(r2);
            fit.relative_deviation = fit.predicted_slope.map(|p| ((b - p) / p).abs());
            fit.status = "ok".into();
        }
        None => fit.status = "refused: degenerate h values".into(),
    }
    Ok(fit)
}
