//! `compare`: level-by-level differences between the semiclassical, hard-wall
//! and direct spectra.

use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

use super::config::{ConfigError, Resolved};
use super::spectrum::check_smooth;
use super::{cmp_f64, with_pool, HarnessError};
use crate::direct::{bound_states, discretize};
use crate::semiclassical::{bohr_sommerfeld_levels, hard_wall_levels_with, Level, DEFAULT_SCAN_POINTS};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub h: f64,
    pub phi: f64,
    pub k: i64,
    pub branch: i8,
    pub e_bs: f64,
    pub e_direct: Option<f64>,
    pub e_hard_wall: Option<f64>,
    pub err_bs_direct: Option<f64>,
    pub err_hard_wall_bs: Option<f64>,
}

impl CompareRow {
    pub const HEADER: [&'static str; 9] = [
        "h",
        "phi",
        "k",
        "branch",
        "E_bs",
        "E_direct",
        "E_hard_wall",
        "err_bs_direct",
        "err_hard_wall_bs",
    ];
}

/// Per `(h, phi)` cell summary.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub h: f64,
    pub phi: f64,
    pub n_bs: usize,
    pub n_direct: Option<usize>,
    pub n_hard_wall: Option<usize>,
    pub max_err_bs_direct: Option<f64>,
    pub max_err_hard_wall_bs: Option<f64>,
}

impl Cell {
    pub fn count_mismatch(&self) -> bool {
        self.n_direct.is_some_and(|n| n != self.n_bs) || self.n_hard_wall.is_some_and(|n| n != self.n_bs)
    }
}

#[derive(Clone, Debug)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub cells: Vec<Cell>,
    /// Whether the direct error shrinks with every step down the `h` list,
    /// for every `phi`; `None` without direct levels or with a single `h`.
    pub monotone: Option<bool>,
    pub violations: Vec<String>,
    pub text: String,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn nearest(levels: &[Level], e: f64) -> Option<f64> {
    levels
        .iter()
        .map(|l| l.energy)
        .min_by(|a, b| cmp_f64((a - e).abs(), (b - e).abs()))
}

fn max_opt(it: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    it.flatten().fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
}

pub fn compare_report(r: &Resolved, jobs: usize) -> Result<CompareReport, HarnessError> {
    let s = r.config.solvers;
    if !s.bohr_sommerfeld || !(s.direct || s.hard_wall) {
        return Err(ConfigError::Invalid {
            field: "solvers".into(),
            message: "compare needs `bohr_sommerfeld` and at least one of `direct`, `hard_wall`".into(),
        }
        .into());
    }
    check_smooth(r, "profile.ramp_shape")?;
    let mut hs = r.config.h_list.clone();
    hs.sort_by(|a, b| cmp_f64(*b, *a));
    hs.dedup();
    let mut phis = r.config.phi_list.clone();
    phis.sort_by(|a, b| cmp_f64(*a, *b));
    phis.dedup();
    let points: Vec<(f64, f64)> = hs.iter().flat_map(|&h| phis.iter().map(move |&p| (h, p))).collect();

    let cells: Vec<Result<(Cell, Vec<CompareRow>), HarnessError>> =
        with_pool(jobs, || points.par_iter().map(|&(h, phi)| cell(r, h, phi)).collect())?;
    let mut all_cells = Vec::new();
    let mut rows = Vec::new();
    for c in cells {
        let (c, rs) = c?;
        all_cells.push(c);
        rows.extend(rs);
    }

    let d0 = r.delta0;
    let mut violations = Vec::new();
    let monotone = if s.direct && hs.len() > 1 {
        let mut ok = true;
        for &phi in &phis {
            let errs: Vec<Option<f64>> = hs
                .iter()
                .map(|&h| {
                    all_cells
                        .iter()
                        .find(|c| c.h == h && c.phi == phi)
                        .and_then(|c| c.max_err_bs_direct)
                })
                .collect();
            ok &= errs
                .windows(2)
                .all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b < a));
        }
        Some(ok)
    } else {
        None
    };
    if s.hard_wall {
        let worst = max_opt(all_cells.iter().map(|c| c.max_err_hard_wall_bs)).unwrap_or(0.0);
        if worst > r.config.acceptance.hard_wall * d0 {
            violations.push(format!(
                "hard-wall deviation {:.3e} exceeds {:.3e}",
                worst / r.energy_scale,
                r.config.acceptance.hard_wall * d0 / r.energy_scale
            ));
        }
    }
    if s.direct {
        let h_min = *hs.last().expect("validated non-empty");
        let worst = max_opt(all_cells.iter().filter(|c| c.h == h_min).map(|c| c.max_err_bs_direct)).unwrap_or(0.0);
        if worst > r.config.acceptance.direct * d0 {
            violations.push(format!(
                "direct deviation {:.3e} at h = {h_min} exceeds {:.3e}",
                worst / r.energy_scale,
                r.config.acceptance.direct * d0 / r.energy_scale
            ));
        }
        if monotone == Some(false) {
            violations.push("direct deviation does not decrease monotonically in h".into());
        }
    }

    let es = r.energy_scale;
    for row in &mut rows {
        row.e_bs /= es;
        for v in [
            &mut row.e_direct,
            &mut row.e_hard_wall,
            &mut row.err_bs_direct,
            &mut row.err_hard_wall_bs,
        ] {
            *v = v.map(|x| x / es);
        }
    }
    for c in &mut all_cells {
        c.max_err_bs_direct = c.max_err_bs_direct.map(|x| x / es);
        c.max_err_hard_wall_bs = c.max_err_hard_wall_bs.map(|x| x / es);
    }
    let text = render(&all_cells, monotone, &violations);
    Ok(CompareReport {
        rows,
        cells: all_cells,
        monotone,
        violations,
        text,
    })
}

fn cell(r: &Resolved, h: f64, phi: f64) -> Result<(Cell, Vec<CompareRow>), HarnessError> {
    let s = r.config.solvers;
    let profile = r.profile(phi)?;
    let params = r.params(&profile, h)?;
    let bs = bohr_sommerfeld_levels(&profile, &params)?.levels;
    let direct = if s.direct {
        let op = discretize(&profile, h, r.half_width, r.config.grid.n, 0.0, None)?;
        Some(bound_states(&op, r.window)?.spectrum.levels)
    } else {
        None
    };
    let hw = if s.hard_wall {
        Some(
            hard_wall_levels_with(
                r.delta0,
                r.mu0,
                phi,
                r.lead_half_length,
                h,
                r.window,
                DEFAULT_SCAN_POINTS,
                params.tol_root,
            )?
            .levels,
        )
    } else {
        None
    };
    let rows: Vec<CompareRow> = bs
        .iter()
        .map(|l| {
            let e_direct = direct.as_deref().and_then(|d| nearest(d, l.energy));
            let e_hw = hw.as_deref().and_then(|d| nearest(d, l.energy));
            CompareRow {
                h,
                phi,
                k: l.k,
                branch: l.branch,
                e_bs: l.energy,
                e_direct,
                e_hard_wall: e_hw,
                err_bs_direct: e_direct.map(|e| (e - l.energy).abs()),
                err_hard_wall_bs: e_hw.map(|e| (e - l.energy).abs()),
            }
        })
        .collect();
    let c = Cell {
        h,
        phi,
        n_bs: bs.len(),
        n_direct: direct.as_ref().map(Vec::len),
        n_hard_wall: hw.as_ref().map(Vec::len),
        max_err_bs_direct: max_opt(rows.iter().map(|x| x.err_bs_direct)),
        max_err_hard_wall_bs: max_opt(rows.iter().map(|x| x.err_hard_wall_bs)),
    };
    Ok((c, rows))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.3e}"))
}

fn fmt_count(v: Option<usize>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

fn render(cells: &[Cell], monotone: Option<bool>, violations: &[String]) -> String {
    let mut t = String::new();
    let _ = writeln!(
        t,
        "{:>10} {:>10} {:>5} {:>6} {:>5} {:>12} {:>12}",
        "h", "phi", "n_bs", "n_dir", "n_hw", "max|bs-dir|", "max|hw-bs|"
    );
    for c in cells {
        let _ = writeln!(
            t,
            "{:>10} {:>10.6} {:>5} {:>6} {:>5} {:>12} {:>12}{}",
            c.h,
            c.phi,
            c.n_bs,
            fmt_count(c.n_direct),
            fmt_count(c.n_hard_wall),
            fmt_opt(c.max_err_bs_direct),
            fmt_opt(c.max_err_hard_wall_bs),
            if c.count_mismatch() {
                "  level count mismatch"
            } else {
                ""
            }
        );
    }
    if let Some(m) = monotone {
        let _ = writeln!(t, "monotone error decrease: {m}");
    }
    if violations.is_empty() {
        let _ = writeln!(t, "acceptance: PASS");
    } else {
        for v in violations {
            let _ = writeln!(t, "acceptance: FAIL {v}");
        }
    }
    t
}
