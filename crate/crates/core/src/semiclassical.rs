//! Semiclassical Andreev levels.
//!
//! Levels solve the two-branch quantization condition
//!
//! ```text
//! g(E)/h - 2 arccos(E/delta0) = ±phi + 2 pi k
//! ```
//!
//! with `g = S+ - S-` for a smooth profile and the closed form
//! `g = 2L (sqrt(mu0 + E) - sqrt(mu0 - E))` in the hard-wall limit. Roots are
//! bracketed on a uniform scan of the unwrapped phase and refined by
//! bisection.

use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::geometry::{action_difference, barrier_exponent, local_slope, GeometryError};
use crate::profile::{JunctionProfile, ParamsError, SemiclassicalParams};

/// Scan points per window for bracketing roots.
pub const DEFAULT_SCAN_POINTS: usize = 2000;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("empty energy window [{0}, {1}]")]
    EmptyWindow(f64, f64),
    #[error("scan too coarse: {count} roots of branch {branch} between E = {lo} and E = {hi}")]
    ScanResolution { lo: f64, hi: f64, branch: i8, count: i64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Params(#[from] ParamsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BohrSommerfeld,
    HardWall,
    Direct,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::BohrSommerfeld => "bohr_sommerfeld",
            Method::HardWall => "hard_wall",
            Method::Direct => "direct",
        }
    }
}

/// One level: label `k`, energy, and the `±phi` family it belongs to
/// (`0` for direct eigenvalues, which carry no family label).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Level {
    pub k: i64,
    pub energy: f64,
    pub branch: i8,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub levels: Vec<Level>,
    pub method: Method,
    pub h: f64,
    pub phi: f64,
}

impl SpectrumResult {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }
}

/// Andreev reflection phase `2 arccos(E/delta0)`.
fn reflection_phase(energy: f64, delta0: f64) -> f64 {
    2.0 * (energy / delta0).clamp(-1.0, 1.0).acos()
}

/// Hard-wall action difference `2L (sqrt(mu0 + E) - sqrt(mu0 - E))`.
pub fn hard_wall_action(mu0: f64, l: f64, energy: f64) -> f64 {
    // same quantity as 4 L E / (sqrt(mu0+E) + sqrt(mu0-E)), without cancellation
    4.0 * l * energy / ((mu0 + energy).sqrt() + (mu0 - energy).sqrt())
}

/// Unwrapped quantization phase of a smooth profile.
pub fn bohr_sommerfeld_phase(
    profile: &JunctionProfile,
    h: f64,
    energy: f64,
    tol_quad: f64,
) -> Result<f64, GeometryError> {
    Ok(action_difference(profile, energy, tol_quad)? / h - reflection_phase(energy, profile.delta0()))
}

/// Unwrapped quantization phase in the hard-wall limit.
pub fn hard_wall_phase(delta0: f64, mu0: f64, l: f64, h: f64, energy: f64) -> f64 {
    hard_wall_action(mu0, l, energy) / h - reflection_phase(energy, delta0)
}

/// Finds every `E` in the window with `phase(E) = branch·phi + 2 pi k` for
/// both branches.
pub fn solve_quantization<F>(
    phase: F,
    phi: f64,
    window: (f64, f64),
    delta0: f64,
    scan_points: usize,
    tol_root: f64,
) -> Result<Vec<Level>, SpectrumError>
where
    F: Fn(f64) -> Result<f64, GeometryError>,
{
    let edge = 1e-12 * delta0;
    let lo = window.0.max(edge);
    let hi = window.1.min(delta0 - edge);
    if !(lo < hi) {
        return Err(SpectrumError::EmptyWindow(window.0, window.1));
    }
    let n = scan_points.max(2);
    let grid: Vec<f64> = (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n as f64
            }
        })
        .collect();
    let values = grid.iter().map(|&e| phase(e)).collect::<Result<Vec<_>, _>>()?;

    let mut levels = Vec::new();
    for branch in [1i8, -1] {
        let target = branch as f64 * phi;
        let turns: Vec<f64> = values.iter().map(|v| (v - target) / (2.0 * PI)).collect();
        for i in 0..n {
            let (a, b) = (turns[i], turns[i + 1]);
            let (low, high) = if a <= b { (a, b) } else { (b, a) };
            let count = high.floor() as i64 - low.floor() as i64;
            if count == 0 {
                continue;
            }
            if count > 1 {
                return Err(SpectrumError::ScanResolution {
                    lo: grid[i],
                    hi: grid[i + 1],
                    branch,
                    count,
                });
            }
            let k = high.floor() as i64;
            let shift = target + 2.0 * PI * k as f64;
            let cond = |e: f64| phase(e).map(|v| v - shift);
            let (energy, residual) = bisect(&cond, grid[i], grid[i + 1], values[i] - shift, tol_root)?;
            levels.push(Level {
                k,
                energy,
                branch,
                residual,
            });
        }
    }
    levels.sort_by(|x, y| x.energy.total_cmp(&y.energy).then(y.branch.cmp(&x.branch)));
    Ok(levels)
}

fn bisect<F>(cond: &F, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> Result<(f64, f64), GeometryError>
where
    F: Fn(f64) -> Result<f64, GeometryError>,
{
    let mut best = (hi, cond(hi)?.abs());
    if f_lo.abs() < best.1 {
        best = (lo, f_lo.abs());
    }
    for _ in 0..200 {
        if best.1 <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = cond(mid)?;
        if f_mid.abs() < best.1 {
            best = (mid, f_mid.abs());
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Hard-wall quasi-particle spectrum.
pub fn hard_wall_levels(
    delta0: f64,
    mu0: f64,
    phi: f64,
    l: f64,
    h: f64,
    window: (f64, f64),
) -> Result<SpectrumResult, SpectrumError> {
    hard_wall_levels_with(
        delta0,
        mu0,
        phi,
        l,
        h,
        window,
        DEFAULT_SCAN_POINTS,
        SemiclassicalParams::DEFAULT_TOL_ROOT,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn hard_wall_levels_with(
    delta0: f64,
    mu0: f64,
    phi: f64,
    l: f64,
    h: f64,
    window: (f64, f64),
    scan_points: usize,
    tol_root: f64,
) -> Result<SpectrumResult, SpectrumError> {
    if !(h > 0.0) {
        return Err(ParamsError::NonPositiveH(h).into());
    }
    let levels = solve_quantization(
        |e| Ok(hard_wall_phase(delta0, mu0, l, h, e)),
        phi,
        window,
        delta0,
        scan_points,
        tol_root,
    )?;
    Ok(SpectrumResult {
        levels,
        method: Method::HardWall,
        h,
        phi,
    })
}

/// Bohr-Sommerfeld levels of a smooth profile.
pub fn bohr_sommerfeld_levels(
    profile: &JunctionProfile,
    params: &SemiclassicalParams,
) -> Result<SpectrumResult, SpectrumError> {
    bohr_sommerfeld_levels_with(profile, params, DEFAULT_SCAN_POINTS)
}

pub fn bohr_sommerfeld_levels_with(
    profile: &JunctionProfile,
    params: &SemiclassicalParams,
    scan_points: usize,
) -> Result<SpectrumResult, SpectrumError> {
    let h = params.h;
    let levels = solve_quantization(
        |e| bohr_sommerfeld_phase(profile, h, e, params.tol_quad),
        profile.phi(),
        params.energy_window,
        profile.delta0(),
        scan_points,
        params.tol_root,
    )?;
    Ok(SpectrumResult {
        levels,
        method: Method::BohrSommerfeld,
        h,
        phi: profile.phi(),
    })
}

/// Phase derivative `dE/dphi` of one level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupercurrentEntry {
    pub k: i64,
    pub branch: i8,
    pub energy: f64,
    pub d_e_dphi: f64,
    /// Neighbouring levels closer than the phase-induced shift; the level
    /// identity across `phi ± dphi` is not unique.
    pub ambiguous: bool,
}

/// Centered phase derivatives of the levels returned by `levels_at`.
///
/// Levels are tracked by their rank above the lower window edge, which is
/// continuous in `phi` away from the window edges; `levels_at` is called
/// with the window widened by `margin` on both sides.
pub fn track_supercurrent<F, E>(
    levels_at: F,
    phi: f64,
    dphi: f64,
    window: (f64, f64),
) -> Result<Vec<SupercurrentEntry>, E>
where
    F: Fn(f64) -> Result<Vec<Level>, E>,
{
    let base = levels_at(phi)?;
    let plus = levels_at(phi + dphi)?;
    let minus = levels_at(phi - dphi)?;
    let below = |ls: &[Level]| ls.iter().filter(|l| l.energy < window.0).count() as i64;
    let nb = below(&base);
    let off_p = below(&plus) - nb;
    let off_m = below(&minus) - nb;

    let mut out = Vec::new();
    for (i, level) in base.iter().enumerate() {
        if level.energy < window.0 || level.energy > window.1 {
            continue;
        }
        let ip = i as i64 + off_p;
        let im = i as i64 + off_m;
        let (Some(ep), Some(em)) = (
            usize::try_from(ip).ok().and_then(|j| plus.get(j)),
            usize::try_from(im).ok().and_then(|j| minus.get(j)),
        ) else {
            continue;
        };
        let d = (ep.energy - em.energy) / (2.0 * dphi);
        let shift = (ep.energy - level.energy).abs().max((em.energy - level.energy).abs());
        let gap_left = if i > 0 {
            level.energy - base[i - 1].energy
        } else {
            f64::INFINITY
        };
        let gap_right = base.get(i + 1).map_or(f64::INFINITY, |n| n.energy - level.energy);
        let ambiguous = gap_left.min(gap_right) <= 2.0 * shift;
        out.push(SupercurrentEntry {
            k: level.k,
            branch: level.branch,
            energy: level.energy,
            d_e_dphi: d,
            ambiguous,
        });
    }
    Ok(out)
}

/// Supercurrents `dE_k/dphi` of the Bohr-Sommerfeld levels at `phi`.
pub fn supercurrent(
    profile: &JunctionProfile,
    params: &SemiclassicalParams,
    phi: f64,
    dphi: f64,
) -> Result<Vec<SupercurrentEntry>, SpectrumError> {
    let delta0 = profile.delta0();
    let margin = 0.02 * delta0;
    let window = params.energy_window;
    let wide = ((window.0 - margin).max(0.0), (window.1 + margin).min(delta0));
    let wide_params = SemiclassicalParams {
        energy_window: wide,
        ..params.clone()
    };
    track_supercurrent(
        |p| Ok(bohr_sommerfeld_levels(&profile.with_phi(p), &wide_params)?.levels),
        phi,
        dphi,
        window,
    )
}

/// Semiclassical width of a level: `prefactor·exp(-2 theta / h')` with
/// `h' = alpha h` and prefactor equal to the local level spacing over 2 pi.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WidthEstimate {
    pub energy: f64,
    pub theta: f64,
    pub alpha: f64,
    pub h_prime: f64,
    pub prefactor: f64,
    /// `-2 theta / h'`.
    pub bare_exponent: f64,
    pub gamma_estimate: f64,
}

pub fn width_estimate(
    profile: &JunctionProfile,
    energy: f64,
    h: f64,
    tol_quad: f64,
) -> Result<WidthEstimate, SpectrumError> {
    let slope = local_slope(profile, energy)?;
    let theta = barrier_exponent(profile, energy, profile.x2(), tol_quad)?.finite;
    let delta0 = profile.delta0();
    let step = 1e-6 * delta0;
    let lo = (energy - step).max(0.5 * energy);
    let hi = (energy + step).min(0.5 * (energy + delta0));
    let dphase = (bohr_sommerfeld_phase(profile, h, hi, tol_quad)? - bohr_sommerfeld_phase(profile, h, lo, tol_quad)?)
        / (hi - lo);
    let prefactor = 1.0 / dphase.abs();
    let h_prime = slope.alpha * h;
    let bare_exponent = -2.0 * theta / h_prime;
    Ok(WidthEstimate {
        energy,
        theta,
        alpha: slope.alpha,
        h_prime,
        prefactor,
        bare_exponent,
        gamma_estimate: prefactor * bare_exponent.exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::RampShape;
    use proptest::prelude::*;

    fn quintic(phi: f64) -> JunctionProfile {
        JunctionProfile::new(1.0, 4.0, phi, 0.5, 1.5, 1.0, RampShape::QuinticSmoothstep).unwrap()
    }

    /// Independent scalar root finder on the same condition, in extended
    /// steps of the phase rather than through the scan.
    fn independent_root(phi: f64, k: i64, branch: i8, h: f64) -> f64 {
        let target = branch as f64 * phi + 2.0 * PI * k as f64;
        let f = |e: f64| hard_wall_phase(1.0, 4.0, 1.0, h, e) - target;
        let (mut lo, mut hi) = (1e-15, 1.0 - 1e-15);
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn hard_wall_roots_match_independent_bisection() {
        let r = hard_wall_levels(1.0, 4.0, 0.0, 1.0, 0.05, (0.0, 1.0)).unwrap();
        assert!(!r.levels.is_empty());
        for l in &r.levels {
            assert!(l.residual <= 1e-10);
            let e = independent_root(0.0, l.k, l.branch, 0.05);
            assert!((e - l.energy).abs() < 1e-11, "{l:?} vs {e}");
        }
    }

    #[test]
    fn hard_wall_lowest_level_closes_at_pi() {
        let mut prev = f64::INFINITY;
        for phi in [PI - 0.3, PI - 0.1, PI - 0.01, PI - 0.001] {
            let r = hard_wall_levels(1.0, 4.0, phi, 1.0, 0.05, (0.0, 1.0)).unwrap();
            let low = r.levels[0].energy;
            assert!(low < prev);
            prev = low;
        }
        assert!(prev < 1e-3);
        // exactly at pi both sides of the condition equal -1 at E = 0
        let f0 = hard_wall_phase(1.0, 4.0, 1.0, 0.05, 0.0);
        assert!((f0.cos() - PI.cos()).abs() < 1e-15);
    }

    #[test]
    fn level_count_halves_when_h_doubles() {
        let fine = hard_wall_levels(1.0, 4.0, 0.4, 1.0, 0.02, (0.0, 1.0)).unwrap();
        let coarse = hard_wall_levels(1.0, 4.0, 0.4, 1.0, 0.04, (0.0, 1.0)).unwrap();
        let ratio = fine.levels.len() as f64 / coarse.levels.len() as f64;
        assert!(
            (ratio - 2.0).abs() < 0.35,
            "{} vs {}",
            fine.levels.len(),
            coarse.levels.len()
        );
    }

    #[test]
    fn empty_window_is_rejected() {
        assert!(matches!(
            hard_wall_levels(1.0, 4.0, 0.4, 1.0, 0.02, (0.5, 0.5)),
            Err(SpectrumError::EmptyWindow(..))
        ));
    }

    #[test]
    fn coarse_scan_is_detected() {
        let r = hard_wall_levels_with(1.0, 4.0, 0.4, 1.0, 0.002, (0.0, 1.0), 10, 1e-10);
        assert!(matches!(r, Err(SpectrumError::ScanResolution { .. })));
    }

    #[test]
    fn root_count_equals_scan_crossings() {
        let h = 0.03;
        let phi = 0.7;
        let r = hard_wall_levels(1.0, 4.0, phi, 1.0, h, (0.1, 0.9)).unwrap();
        let mut crossings = 0;
        for branch in [1.0, -1.0] {
            let n = 20_000;
            let f = |e: f64| ((hard_wall_phase(1.0, 4.0, 1.0, h, e) - branch * phi) / 2.0).sin();
            for i in 0..n {
                let a = 0.1 + 0.8 * i as f64 / n as f64;
                let b = 0.1 + 0.8 * (i + 1) as f64 / n as f64;
                if f(a).signum() != f(b).signum() {
                    crossings += 1;
                }
            }
        }
        assert_eq!(r.levels.len(), crossings);
    }

    #[test]
    fn phase_sign_flip_gives_same_levels() {
        let params = SemiclassicalParams::new(&quintic(0.9), 0.05, (0.0, 1.0)).unwrap();
        let a = bohr_sommerfeld_levels(&quintic(0.9), &params).unwrap();
        let b = bohr_sommerfeld_levels(&quintic(-0.9), &params).unwrap();
        assert_eq!(a.levels.len(), b.levels.len());
        for (x, y) in a.levels.iter().zip(&b.levels) {
            assert!((x.energy - y.energy).abs() <= 1e-10);
        }
    }

    #[test]
    fn bohr_sommerfeld_residuals() {
        let p = quintic(1.0);
        let params = SemiclassicalParams::new(&p, 0.03, (0.0, 1.0)).unwrap();
        let r = bohr_sommerfeld_levels(&p, &params).unwrap();
        assert!(r.levels.len() > 4);
        for l in &r.levels {
            assert!(l.residual <= params.tol_root, "{l:?}");
            assert!(l.energy > 0.0 && l.energy < 1.0);
        }
        assert!(r.levels.windows(2).all(|w| w[0].energy <= w[1].energy));
    }

    #[test]
    fn steep_ramp_approaches_hard_wall() {
        let h = 0.05;
        let phi = 0.6;
        let p = JunctionProfile::new(1.0, 4.0, phi, 0.99, 1.01, 1.0, RampShape::QuinticSmoothstep).unwrap();
        let params = SemiclassicalParams::new(&p, h, (0.0, 1.0)).unwrap();
        let bs = bohr_sommerfeld_levels(&p, &params).unwrap();
        let hw = hard_wall_levels(1.0, 4.0, phi, 1.0, h, (0.0, 1.0)).unwrap();
        assert_eq!(bs.levels.len(), hw.levels.len());
        for (a, b) in bs.levels.iter().zip(&hw.levels) {
            assert!((a.energy - b.energy).abs() < 0.02, "{a:?} {b:?}");
        }
    }

    #[test]
    fn supercurrent_vanishes_at_zero_phase() {
        let p = quintic(0.0);
        let params = SemiclassicalParams::new(&p, 0.05, (0.05, 0.95)).unwrap();
        let sc = supercurrent(&p, &params, 0.0, 1e-3).unwrap();
        assert!(!sc.is_empty());
        for s in &sc {
            assert!(s.d_e_dphi.abs() < 1e-9, "{s:?}");
        }
    }

    #[test]
    fn branches_carry_opposite_currents() {
        let p = quintic(PI / 2.0);
        let params = SemiclassicalParams::new(&p, 0.05, (0.05, 0.95)).unwrap();
        let sc = supercurrent(&p, &params, PI / 2.0, 1e-3).unwrap();
        let plus: Vec<_> = sc.iter().filter(|s| s.branch == 1 && !s.ambiguous).collect();
        let minus: Vec<_> = sc.iter().filter(|s| s.branch == -1 && !s.ambiguous).collect();
        assert!(!plus.is_empty() && !minus.is_empty());
        assert!(plus.iter().all(|s| s.d_e_dphi > 0.0));
        assert!(minus.iter().all(|s| s.d_e_dphi < 0.0));
    }

    #[test]
    fn supercurrent_richardson_consistency() {
        let p = quintic(1.1);
        let params = SemiclassicalParams::new(&p, 0.05, (0.1, 0.9)).unwrap();
        let coarse = supercurrent(&p, &params, 1.1, 2e-2).unwrap();
        let fine = supercurrent(&p, &params, 1.1, 1e-2).unwrap();
        let finer = supercurrent(&p, &params, 1.1, 5e-3).unwrap();
        for ((a, b), c) in coarse.iter().zip(&fine).zip(&finer) {
            let d1 = (a.d_e_dphi - b.d_e_dphi).abs();
            let d2 = (b.d_e_dphi - c.d_e_dphi).abs();
            // O(dphi²): successive differences shrink by about four
            if d1 > 1e-9 {
                assert!(d2 < 0.4 * d1, "{d1} {d2}");
            }
        }
    }

    #[test]
    fn width_estimate_algebra() {
        let p = quintic(0.3);
        let w = width_estimate(&p, 0.5, 0.04, 1e-12).unwrap();
        let w2 = width_estimate(&p, 0.5, 0.02, 1e-12).unwrap();
        assert!(w.gamma_estimate > 0.0);
        let expected = -2.0 * w.theta / (w.alpha * 0.04);
        assert!((w2.bare_exponent - w.bare_exponent - expected).abs() < 1e-12 * expected.abs());
        let near_edge = width_estimate(&p, 1.0 - 1e-9, 0.04, 1e-12).unwrap();
        assert!(near_edge.theta < 1e-6);
        assert!(near_edge.gamma_estimate <= near_edge.prefactor);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn levels_even_in_phi(phi in 0.0f64..3.0, h in 0.03f64..0.1) {
            let run = |p: f64| {
                let prof = quintic(p);
                let params = SemiclassicalParams::new(&prof, h, (0.0, 1.0)).unwrap();
                let mut e = bohr_sommerfeld_levels(&prof, &params).unwrap().energies();
                e.sort_by(f64::total_cmp);
                e
            };
            let (a, b) = (run(phi), run(-phi));
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-10);
            }
        }
    }
}
