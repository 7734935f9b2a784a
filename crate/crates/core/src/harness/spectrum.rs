//! `spectrum` and `hardwall` sweeps over `(method, h, phi)`.

use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

use super::config::{ConfigError, Resolved};
use super::{cmp_f64, with_pool, HarnessError};
use crate::direct::{bound_states, discretize};
use crate::profile::RampShape;
use crate::semiclassical::{
    bohr_sommerfeld_levels, hard_wall_levels_with, supercurrent, track_supercurrent, width_estimate, Level, Method,
    DEFAULT_SCAN_POINTS,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumRow {
    #[serde(serialize_with = "method_name")]
    pub method: Method,
    pub h: f64,
    pub phi: f64,
    pub k: i64,
    pub branch: i8,
    pub energy: f64,
    pub residual: f64,
    pub d_e_dphi: Option<f64>,
    pub gamma_est: Option<f64>,
    pub theta: Option<f64>,
}

fn method_name<S: serde::Serializer>(m: &Method, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(m.as_str())
}

impl SpectrumRow {
    pub const HEADER: [&'static str; 10] = [
        "method",
        "h",
        "phi",
        "k",
        "branch",
        "E_k",
        "residual",
        "dE_dphi",
        "gamma_est",
        "theta",
    ];

    fn key(&self) -> (Method, f64, f64, i64, i8) {
        (self.method, self.h, self.phi, self.k, self.branch)
    }
}

fn sort_rows(rows: &mut [SpectrumRow]) {
    rows.sort_by(|a, b| {
        let (ka, kb) = (a.key(), b.key());
        ka.0.cmp(&kb.0)
            .then(cmp_f64(ka.1, kb.1))
            .then(cmp_f64(ka.2, kb.2))
            .then(ka.3.cmp(&kb.3))
            .then(ka.4.cmp(&kb.4))
    });
}

/// Spectrum rows for every enabled method of the configuration.
pub fn run_spectrum(r: &Resolved, jobs: usize) -> Result<Vec<SpectrumRow>, HarnessError> {
    let s = r.config.solvers;
    let mut methods = Vec::new();
    if s.bohr_sommerfeld {
        methods.push(Method::BohrSommerfeld);
    }
    if s.hard_wall {
        methods.push(Method::HardWall);
    }
    if s.direct {
        methods.push(Method::Direct);
    }
    if methods.is_empty() {
        return Err(ConfigError::Invalid {
            field: "solvers".into(),
            message: "no spectrum method enabled".into(),
        }
        .into());
    }
    sweep(r, &methods, jobs)
}

/// Hard-wall rows only, regardless of the solver toggles.
pub fn run_hardwall(r: &Resolved, jobs: usize) -> Result<Vec<SpectrumRow>, HarnessError> {
    sweep(r, &[Method::HardWall], jobs)
}

pub(crate) fn check_smooth(r: &Resolved, field: &str) -> Result<(), ConfigError> {
    if r.config.profile.ramp_shape == RampShape::HardWall {
        return Err(ConfigError::Invalid {
            field: field.into(),
            message: "needs a smooth ramp (linear or quintic_smoothstep)".into(),
        });
    }
    Ok(())
}

fn sweep(r: &Resolved, methods: &[Method], jobs: usize) -> Result<Vec<SpectrumRow>, HarnessError> {
    if methods.contains(&Method::BohrSommerfeld) {
        check_smooth(r, "solvers.bohr_sommerfeld")?;
    }
    let cfg = &r.config;
    let mut phis = cfg.phi_list.clone();
    phis.sort_by(|a, b| cmp_f64(*a, *b));
    phis.dedup();
    let local_derivative = phis.len() < 3;

    let mut points = Vec::new();
    for &m in methods {
        for &h in &cfg.h_list {
            for &phi in &phis {
                points.push((m, h, phi));
            }
        }
    }
    let chunks: Vec<Result<Vec<SpectrumRow>, HarnessError>> = with_pool(jobs, || {
        points
            .par_iter()
            .map(|&(m, h, phi)| sweep_point(r, m, h, phi, local_derivative))
            .collect()
    })?;
    let mut rows = Vec::new();
    for c in chunks {
        rows.extend(c?);
    }
    if !local_derivative {
        fill_sweep_derivatives(&mut rows, &phis);
    }
    for row in &mut rows {
        let es = r.energy_scale;
        row.energy /= es;
        row.d_e_dphi = row.d_e_dphi.map(|d| d / es);
        row.gamma_est = row.gamma_est.map(|g| g / es);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

fn levels(r: &Resolved, m: Method, h: f64, phi: f64, window: (f64, f64)) -> Result<Vec<Level>, HarnessError> {
    let profile = r.profile(phi)?;
    Ok(match m {
        Method::BohrSommerfeld => {
            let mut params = r.params(&profile, h)?;
            params.energy_window = window;
            bohr_sommerfeld_levels(&profile, &params)?.levels
        }
        Method::HardWall => {
            let tol = r
                .config
                .tol_root
                .unwrap_or(crate::SemiclassicalParams::DEFAULT_TOL_ROOT);
            hard_wall_levels_with(
                r.delta0,
                r.mu0,
                phi,
                r.lead_half_length,
                h,
                window,
                DEFAULT_SCAN_POINTS,
                tol,
            )?
            .levels
        }
        Method::Direct => {
            let op = discretize(&profile, h, r.half_width, r.config.grid.n, 0.0, None)?;
            bound_states(&op, window)?.spectrum.levels
        }
    })
}

fn sweep_point(r: &Resolved, m: Method, h: f64, phi: f64, local: bool) -> Result<Vec<SpectrumRow>, HarnessError> {
    let profile = r.profile(phi)?;
    let found = levels(r, m, h, phi, r.window)?;
    let mut derivs: HashMap<(i64, i8), f64> = HashMap::new();
    if local {
        let dphi = r.config.dphi;
        let entries = match m {
            Method::BohrSommerfeld => supercurrent(&profile, &r.params(&profile, h)?, phi, dphi)?,
            _ => {
                let margin = 0.02 * r.delta0;
                let wide = ((r.window.0 - margin).max(0.0), (r.window.1 + margin).min(r.delta0));
                track_supercurrent(|p| levels(r, m, h, p, wide), phi, dphi, r.window)?
            }
        };
        for e in entries.iter().filter(|e| !e.ambiguous) {
            derivs.insert((e.k, e.branch), e.d_e_dphi);
        }
    }
    let smooth = profile.ramp_shape() != RampShape::HardWall && m != Method::HardWall;
    let tol_quad = r
        .config
        .tol_quad
        .unwrap_or(crate::SemiclassicalParams::DEFAULT_TOL_QUAD);
    Ok(found
        .into_iter()
        .map(|l| {
            let est = if smooth {
                width_estimate(&profile, l.energy, h, tol_quad).ok()
            } else {
                None
            };
            SpectrumRow {
                method: m,
                h,
                phi,
                k: l.k,
                branch: l.branch,
                energy: l.energy,
                residual: l.residual,
                d_e_dphi: derivs.get(&(l.k, l.branch)).copied(),
                gamma_est: est.map(|e| e.gamma_estimate),
                theta: est.map(|e| e.theta),
            }
        })
        .collect())
}

/// Centered differences along the sorted `phi` sweep, one-sided at the ends.
/// A level missing at a neighbouring `phi` leaves the entry empty.
fn fill_sweep_derivatives(rows: &mut [SpectrumRow], phis: &[f64]) {
    let index: HashMap<(Method, u64, u64, i64, i8), f64> = rows
        .iter()
        .map(|r| ((r.method, r.h.to_bits(), r.phi.to_bits(), r.k, r.branch), r.energy))
        .collect();
    let pos: HashMap<u64, usize> = phis.iter().enumerate().map(|(i, p)| (p.to_bits(), i)).collect();
    for row in rows.iter_mut() {
        let i = pos[&row.phi.to_bits()];
        let at = |j: usize| {
            index
                .get(&(row.method, row.h.to_bits(), phis[j].to_bits(), row.k, row.branch))
                .map(|&e| (phis[j], e))
        };
        let (a, b) = if i == 0 {
            (at(0), at(1))
        } else if i + 1 == phis.len() {
            (at(i - 1), at(i))
        } else {
            (at(i - 1), at(i + 1))
        };
        row.d_e_dphi = match (a, b) {
            (Some((pa, ea)), Some((pb, eb))) => Some((eb - ea) / (pb - pa)),
            _ => None,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::RunConfig;
    use crate::semiclassical::hard_wall_levels;
    use std::f64::consts::PI;

    fn config(extra: &str) -> Resolved {
        let text = format!(
            r#"{{
                "profile": {{"delta0": 1.0, "mu0": 4.0, "x1": 0.5, "x2": 1.5, "lead_half_length": 1.0}},
                "window": [0.0, 1.0],
                {extra}
            }}"#
        );
        RunConfig::from_json(&text).unwrap().resolve().unwrap()
    }

    #[test]
    fn hard_wall_passthrough() {
        let r = config(r#""h_list": [0.05], "phi_list": [0.7], "solvers": {"hard_wall": true}"#);
        let rows = run_spectrum(&r, 2).unwrap();
        let lib = hard_wall_levels(1.0, 4.0, 0.7, 1.0, 0.05, (0.0, 1.0)).unwrap();
        assert_eq!(rows.len(), lib.levels.len());
        for (row, l) in rows.iter().zip(&lib.levels) {
            assert_eq!(
                (row.k, row.branch, row.energy, row.residual),
                (l.k, l.branch, l.energy, l.residual)
            );
            assert_eq!(row.method, Method::HardWall);
            assert!(row.d_e_dphi.is_some());
            assert!(row.gamma_est.is_none());
        }
    }

    #[test]
    fn sweep_derivative_matches_adjacent_rows() {
        let phis: Vec<String> = (0..64).map(|i| format!("{}", 2.0 * PI * i as f64 / 64.0)).collect();
        let r = config(&format!(
            r#""h_list": [0.1], "phi_list": [{}], "solvers": {{"hard_wall": true}}"#,
            phis.join(",")
        ));
        let rows = run_spectrum(&r, 4).unwrap();
        let row = rows
            .iter()
            .find(|x| x.phi > 1.0 && x.phi < 2.0 && x.k == 1 && x.branch == 1)
            .unwrap();
        let neighbour = |phi: f64| {
            rows.iter()
                .find(|x| x.phi == phi && x.k == row.k && x.branch == row.branch)
                .unwrap()
                .energy
        };
        let step = 2.0 * PI / 64.0;
        let i = (row.phi / step).round() as usize;
        let (pm, pp) = (phis[i - 1].parse::<f64>().unwrap(), phis[i + 1].parse::<f64>().unwrap());
        let expected = (neighbour(pp) - neighbour(pm)) / (pp - pm);
        assert_eq!(row.d_e_dphi.unwrap(), expected);
        // the +phi family rises with phi
        assert!(row.d_e_dphi.unwrap() > 0.0);
    }

    #[test]
    fn jobs_do_not_change_output() {
        let r = config(
            r#""h_list": [0.08, 0.05], "phi_list": [0.3, 1.1], "solvers": {"bohr_sommerfeld": true, "hard_wall": true}"#,
        );
        let a = run_spectrum(&r, 1).unwrap();
        let b = run_spectrum(&r, 3).unwrap();
        assert_eq!(a, b);
        let keys: Vec<_> = a.iter().map(|x| (x.method, x.h, x.phi, x.k)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|x, y| {
            x.0.cmp(&y.0)
                .then(cmp_f64(x.1, y.1))
                .then(cmp_f64(x.2, y.2))
                .then(x.3.cmp(&y.3))
        });
        assert_eq!(keys, sorted);
    }

    #[test]
    fn nothing_enabled_is_a_validation_error() {
        let r = config(r#""h_list": [0.05], "phi_list": [0.7], "solvers": {}"#);
        assert!(run_spectrum(&r, 1).unwrap_err().is_validation());
    }

    #[test]
    fn direct_rows_carry_estimates() {
        let r = config(
            r#""h_list": [0.1], "phi_list": [0.7], "solvers": {"direct": true}, "grid": {"half_width": 3.0, "n": 1200}"#,
        );
        let rows = run_spectrum(&r, 1).unwrap();
        assert!(!rows.is_empty());
        assert!(rows
            .iter()
            .all(|x| x.method == Method::Direct && x.energy > 0.0 && x.energy < 1.0));
        assert!(rows.iter().any(|x| x.theta.is_some()));
    }
}
