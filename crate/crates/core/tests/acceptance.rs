//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use andreev_core::direct::scaling::GAMMA_FLOOR;
use andreev_core::direct::{
    bound_states, discretize, resonances_complex_scaling, shooting_resonance, Resonance, ScalingOptions,
    ShootingOptions,
};
use andreev_core::geometry::{action_integrals, barrier_exponent, turning_point};
use andreev_core::harness::widths::linear_fit;
use andreev_core::semiclassical::{bohr_sommerfeld_levels, hard_wall_levels, width_estimate};
use andreev_core::special::{parabolic_cylinder_d_full, recip_gamma, reflection_wronskian};
use andreev_core::{JunctionProfile, RampShape, SemiclassicalParams};

struct Outcome {
    pass: bool,
    detail: String,
}

fn reference(phi: f64) -> JunctionProfile {
    JunctionProfile::new(1.0, 4.0, phi, 0.5, 1.5, 1.0, RampShape::QuinticSmoothstep).unwrap()
}

fn direct_levels(p: &JunctionProfile, h: f64, x: f64, n: usize, window: (f64, f64)) -> Vec<f64> {
    let op = discretize(p, h, x, n, 0.0, None).unwrap();
    bound_states(&op, window).unwrap().spectrum.energies()
}

fn nearest(set: &[f64], e: f64) -> f64 {
    set.iter().map(|x| (x - e).abs()).fold(f64::INFINITY, f64::min)
}

/// Largest distance from a level of either set to the other set.
fn set_distance(a: &[f64], b: &[f64]) -> f64 {
    let ab = a.iter().map(|&e| nearest(b, e)).fold(0.0, f64::max);
    let ba = b.iter().map(|&e| nearest(a, e)).fold(0.0, f64::max);
    ab.max(ba)
}

fn timed(limit: Duration, out: Outcome, t: Instant) -> Outcome {
    let el = t.elapsed();
    Outcome {
        pass: out.pass && el < limit,
        detail: format!("{}; {:.1}s (limit {}s)", out.detail, el.as_secs_f64(), limit.as_secs()),
    }
}

fn particle_hole() -> Outcome {
    let t = Instant::now();
    let e = direct_levels(&reference(PI / 3.0), 0.03, 3.0, 4000, (-1.0, 1.0));
    let worst = e
        .iter()
        .zip(e.iter().rev())
        .map(|(a, b)| (a + b).abs())
        .fold(0.0, f64::max);
    let out = Outcome {
        pass: e.len() % 2 == 0 && !e.is_empty() && worst < 1e-8,
        detail: format!("{} levels, max |E_k + E_-k| = {worst:.2e}", e.len()),
    };
    timed(Duration::from_secs(30), out, t)
}

fn phase_symmetries() -> Outcome {
    let t = Instant::now();
    let phi = PI / 3.0;
    let at = |p: f64| direct_levels(&reference(p), 0.03, 3.0, 4000, (-1.0, 1.0));
    let (base, neg, shifted) = (at(phi), at(-phi), at(phi + 2.0 * PI));
    let diff = |a: &[f64], b: &[f64]| {
        if a.len() != b.len() {
            return f64::INFINITY;
        }
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    let (d1, d2) = (diff(&base, &neg), diff(&base, &shifted));
    let out = Outcome {
        pass: d1 < 1e-10 && d2 < 1e-10,
        detail: format!("max diff (phi,-phi) = {d1:.2e}, (phi,phi+2pi) = {d2:.2e}"),
    };
    timed(Duration::from_secs(60), out, t)
}

fn hard_wall_limit() -> Outcome {
    let t = Instant::now();
    let (h, phi, window) = (0.05, PI / 3.0, (0.0, 1.0));
    let hw = hard_wall_levels(1.0, 4.0, phi, 1.0, h, window).unwrap().energies();
    let mut devs = Vec::new();
    for width in [0.2, 0.05, 0.02] {
        let p = JunctionProfile::new(
            1.0,
            4.0,
            phi,
            1.0 - width / 2.0,
            1.0 + width / 2.0,
            1.0,
            RampShape::Linear,
        )
        .unwrap();
        let params = SemiclassicalParams::new(&p, h, window).unwrap();
        let bs = bohr_sommerfeld_levels(&p, &params).unwrap().energies();
        devs.push(set_distance(&bs, &hw));
    }
    let monotone = devs.windows(2).all(|w| w[1] < w[0]);
    let out = Outcome {
        pass: monotone && devs[2] < 0.02,
        detail: format!(
            "deviation at widths 0.2/0.05/0.02 = {:.3e}/{:.3e}/{:.3e}",
            devs[0], devs[1], devs[2]
        ),
    };
    timed(Duration::from_secs(60), out, t)
}

/// Richardson-extrapolated direct levels with `dx = h/40` and `dx/2`.
fn direct_extrapolated(p: &JunctionProfile, h: f64, window: (f64, f64)) -> Vec<f64> {
    let x = 4.0;
    let n0 = (2.0 * x / (h / 40.0)).round() as usize;
    let coarse = direct_levels(p, h, x, n0 - 1, window);
    let fine = direct_levels(p, h, x, 2 * n0 - 1, window);
    fine.iter()
        .map(|&f| {
            let c = coarse
                .iter()
                .copied()
                .min_by(|a, b| (a - f).abs().total_cmp(&(b - f).abs()))
                .unwrap_or(f);
            (4.0 * f - c) / 3.0
        })
        .collect()
}

fn semiclassical_vs_direct() -> Outcome {
    let t = Instant::now();
    let p = reference(PI / 3.0);
    let mut errs = Vec::new();
    for h in [0.08, 0.04, 0.02] {
        let params = SemiclassicalParams::new(&p, h, (0.0, 0.8)).unwrap();
        let bs = bohr_sommerfeld_levels(&p, &params).unwrap().energies();
        let direct = direct_extrapolated(&p, h, (0.0, 0.9));
        errs.push(bs.iter().map(|&e| nearest(&direct, e)).fold(0.0, f64::max));
    }
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let out = Outcome {
        pass: monotone && errs[2] < 0.01,
        detail: format!(
            "max |E_bs - E_direct| at h = 0.08/0.04/0.02: {:.3e}/{:.3e}/{:.3e}, monotone = {monotone}",
            errs[0], errs[1], errs[2]
        ),
    };
    timed(Duration::from_secs(300), out, t)
}

struct Tracked {
    h: f64,
    seed: f64,
    scaling: Result<Resonance, String>,
    shooting: Result<Resonance, String>,
}

const WIDTH_HS: [f64; 5] = [0.05, 0.04, 0.03, 0.025, 0.02];

/// The level nearest `0.5 delta0` at each `h`, continued by complex scaling
/// at `theta = 0.1` and by shooting.
fn tracked_resonances() -> Vec<Tracked> {
    let p = reference(PI / 3.0);
    let x = 5.0;
    WIDTH_HS
        .iter()
        .map(|&h| {
            let n = (2.0 * x / (h / 40.0)).round() as usize;
            let op = discretize(&p, h, x, n, 0.0, None).unwrap();
            let levels = bound_states(&op, (0.3, 0.7)).unwrap().decayed();
            let seed = levels
                .iter()
                .map(|l| l.energy)
                .min_by(|a, b| (a - 0.5).abs().total_cmp(&(b - 0.5).abs()))
                .expect("a level near half the gap");
            let scaling = resonances_complex_scaling(&p, h, &[seed], 0.1, &ScalingOptions::new(x, n))
                .map(|v| v[0])
                .map_err(|e| e.to_string());
            let shooting = shooting_resonance(&p, h, Complex64::new(seed, 0.0), &ShootingOptions::default())
                .map_err(|e| e.to_string());
            Tracked {
                h,
                seed,
                scaling,
                shooting,
            }
        })
        .collect()
}

fn width_law(tracked: &[Tracked]) -> Outcome {
    let p = reference(PI / 3.0);
    let usable: Vec<(f64, f64)> = tracked
        .iter()
        .filter_map(|t| t.scaling.as_ref().ok().map(|r| (t.h, r.gamma)))
        .filter(|&(_, g)| g > GAMMA_FLOOR)
        .collect();
    let gammas: Vec<String> = tracked
        .iter()
        .map(|t| match &t.scaling {
            Ok(r) => format!("{:.1e}", r.gamma),
            Err(e) => format!("error ({e})"),
        })
        .collect();
    let mean = tracked.iter().map(|t| t.seed).sum::<f64>() / tracked.len() as f64;
    let est = width_estimate(&p, mean, 0.03, SemiclassicalParams::DEFAULT_TOL_QUAD).unwrap();
    let predicted = -2.0 * est.theta / est.alpha;
    if usable.len() < 4 {
        return Outcome {
            pass: false,
            detail: format!(
                "fit refused: {} of {} widths above the {GAMMA_FLOOR:e} floor (Gamma = [{}]); predicted slope {predicted:.4}",
                usable.len(),
                tracked.len(),
                gammas.join(", ")
            ),
        };
    }
    let x: Vec<f64> = usable.iter().map(|(h, _)| 1.0 / h).collect();
    let y: Vec<f64> = usable.iter().map(|(_, g)| g.ln()).collect();
    let (slope, _, r2) = linear_fit(&x, &y).unwrap();
    let rel = ((slope - predicted) / predicted).abs();
    Outcome {
        pass: rel < 0.1 && r2 > 0.99,
        detail: format!("slope {slope:.4} vs predicted {predicted:.4} (rel {rel:.3}), R^2 = {r2:.5}"),
    }
}

fn oracle_agreement(tracked: &[Tracked]) -> Outcome {
    let mut checked = 0;
    let mut worst_gamma: f64 = 0.0;
    let mut worst_re: f64 = 0.0;
    let mut failures = Vec::new();
    let mut re_all: f64 = 0.0;
    for t in tracked {
        match (&t.scaling, &t.shooting) {
            (Ok(cs), Ok(sh)) => {
                re_all = re_all.max((cs.energy_complex.re - sh.energy_complex.re).abs());
                if cs.gamma > 1e-10 || sh.gamma > 1e-10 {
                    checked += 1;
                    worst_gamma = worst_gamma.max((cs.gamma - sh.gamma).abs() / cs.gamma.abs().max(sh.gamma.abs()));
                    worst_re = worst_re.max((cs.energy_complex.re - sh.energy_complex.re).abs());
                }
            }
            (a, b) => failures.push(format!(
                "h = {}: {}",
                t.h,
                a.as_ref().err().or(b.as_ref().err()).cloned().unwrap_or_default()
            )),
        }
    }
    let pass = failures.is_empty() && worst_gamma < 1e-4 && worst_re < 1e-6;
    Outcome {
        pass,
        detail: format!(
            "{checked} resonances with Gamma > 1e-10; max rel Gamma diff {worst_gamma:.2e}, max Re E diff {worst_re:.2e}; \
             Re E diff over all {} tracked levels {re_all:.2e}{}",
            tracked.len(),
            if failures.is_empty() { String::new() } else { format!("; failed: {}", failures.join("; ")) }
        ),
    }
}

fn theta_independence(tracked: &[Tracked]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut missing = 0;
    for t in tracked {
        match &t.scaling {
            Ok(r) => worst = worst.max(r.stability),
            Err(_) => missing += 1,
        }
    }
    Outcome {
        pass: missing == 0 && worst < 1e-6,
        detail: format!(
            "max displacement theta 0.10 -> 0.15 = {worst:.2e} over {} resonances{}",
            tracked.len() - missing,
            if missing > 0 {
                format!(", {missing} failed to converge")
            } else {
                String::new()
            }
        ),
    }
}

fn discretization_order() -> Outcome {
    let p = reference(PI / 3.0);
    let pick = |n_plus_one: usize| direct_levels(&p, 0.03, 3.0, n_plus_one - 1, (0.3, 0.6))[0];
    let exact = pick(16000);
    let e1 = (pick(2000) - exact).abs();
    let e2 = (pick(4000) - exact).abs();
    let ratio = e1 / e2;
    Outcome {
        pass: (3.2..=4.8).contains(&ratio),
        detail: format!("error ratio {ratio:.3} (errors {e1:.2e}, {e2:.2e})"),
    }
}

fn hermite_he(n: usize, z: Complex64) -> Complex64 {
    let (mut prev, mut cur) = (Complex64::new(1.0, 0.0), z);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = z * cur - prev * k as f64;
        prev = cur;
        cur = next;
    }
    cur
}

fn special_functions() -> Outcome {
    let t = Instant::now();
    let c = Complex64::new;
    let zs = [
        c(-3.0, 0.0),
        c(-0.4, 0.0),
        c(0.0, 0.0),
        c(1.1, 0.0),
        c(2.5, 0.0),
        c(0.8, 0.9),
        c(-1.5, -0.6),
    ];
    let mut low: f64 = 0.0;
    let mut herm: f64 = 0.0;
    for &z in &zs {
        let g = (-z * z / 4.0).exp();
        let d0 = parabolic_cylinder_d_full(0.0, z).unwrap().value;
        let d1 = parabolic_cylinder_d_full(1.0, z).unwrap().value;
        low = low
            .max((d0 - g).norm() / g.norm())
            .max((d1 - z * g).norm() / (z * g).norm().max(g.norm()));
        for n in 0..=8 {
            let exact = hermite_he(n, z) * g;
            let d = parabolic_cylinder_d_full(n as f64, z).unwrap().value;
            herm = herm.max((d - exact).norm() / exact.norm().max(g.norm()));
        }
    }
    let mut wr: f64 = 0.0;
    for nu in [-2.5, -0.5, 0.3, 1.7] {
        let expected = (2.0 * PI).sqrt() * recip_gamma(-nu);
        for &z in &zs {
            let w = reflection_wronskian(nu, z).unwrap();
            wr = wr.max((w - expected).norm() / expected.abs());
        }
    }
    // D'' = (z^2/4 - nu - 1/2) D, with D'' from central differences of the
    // series derivative
    let mut ode: f64 = 0.0;
    let step = 1e-4;
    for nu in [-2.5, -0.5, 0.3, 1.7, 3.2] {
        for &z in &zs {
            let d = parabolic_cylinder_d_full(nu, z).unwrap();
            let dp = parabolic_cylinder_d_full(nu, z + step).unwrap().derivative;
            let dm = parabolic_cylinder_d_full(nu, z - step).unwrap().derivative;
            let second = (dp - dm) / (2.0 * step);
            let res = second - (z * z / 4.0 - nu - 0.5) * d.value;
            ode = ode.max(res.norm() / d.value.norm().max(1.0));
        }
    }
    let out = Outcome {
        pass: low < 1e-12 && herm < 1e-9 && wr < 1e-8 && ode <= 1e-6,
        detail: format!("D0/D1 {low:.1e}, Hermite {herm:.1e}, Wronskian {wr:.1e}, ODE residual {ode:.1e}"),
    };
    timed(Duration::from_secs(10), out, t)
}

/// Composite Simpson rule with `n` (even) intervals.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let dx = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * dx) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * dx / 3.0
}

fn quadrature_oracle() -> Outcome {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(20_240_611);
    let n = 1_000_000;
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let mu0 = rng.gen_range(2.0..8.0);
        let x1 = rng.gen_range(0.2..0.9);
        let x2 = rng.gen_range(1.1..2.0);
        let shape = if i % 2 == 0 {
            RampShape::QuinticSmoothstep
        } else {
            RampShape::Linear
        };
        let p = JunctionProfile::new(1.0, mu0, 0.7, x1, x2, 1.0, shape).unwrap();
        let e = rng.gen_range(0.05..0.95);

        let x0 = turning_point(&p, e).unwrap();
        let pr = &p;
        let branch = |sign: f64| {
            move |x: f64| {
                let d = pr.eval_delta(x);
                (pr.eval_mu(x) + sign * (e * e - d * d).max(0.0).sqrt()).sqrt()
            }
        };
        let (sp, sm) = action_integrals(&p, e, 1e-12).unwrap();
        let op = simpson(branch(1.0), -x0, x0, n);
        let om = simpson(branch(-1.0), -x0, x0, n);
        // Im sqrt(mu + i w), w = sqrt(delta^2 - E^2)
        let im = |x: f64| {
            let d = p.eval_delta(x);
            Complex64::new(p.eval_mu(x), (d * d - e * e).max(0.0).sqrt()).sqrt().im
        };
        let theta = barrier_exponent(&p, e, x2, 1e-12).unwrap().finite;
        let ot = simpson(im, x0, x2, n);
        worst = worst
            .max(((sp - op) / op).abs())
            .max(((sm - om) / om).abs())
            .max(((theta - ot) / ot).abs());
    }
    let out = Outcome {
        pass: worst < 1e-8,
        detail: format!("max relative deviation over 10 pairs {worst:.2e}"),
    };
    timed(Duration::from_secs(60), out, t)
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "particle-hole symmetry", particle_hole()),
        (2, "phase symmetries", phase_symmetries()),
        (3, "hard-wall limit", hard_wall_limit()),
        (4, "semiclassical vs direct", semiclassical_vs_direct()),
    ];
    let t = Instant::now();
    let tracked = tracked_resonances();
    let el = t.elapsed();
    let w = width_law(&tracked);
    let w = Outcome {
        pass: w.pass && el < Duration::from_secs(900),
        detail: format!("{}; {:.1}s (limit 900s)", w.detail, el.as_secs_f64()),
    };
    results.push((5, "width law", w));
    let o = oracle_agreement(&tracked);
    let o = Outcome {
        pass: o.pass && el < Duration::from_secs(300),
        detail: format!("{}; {:.1}s (limit 300s)", o.detail, el.as_secs_f64()),
    };
    results.push((6, "scaling vs shooting", o));
    results.push((7, "theta independence", theta_independence(&tracked)));
    results.push((8, "discretization order", discretization_order()));
    results.push((9, "special functions", special_functions()));
    results.push((10, "quadrature oracle", quadrature_oracle()));

    let mut failed = 0;
    for (id, name, o) in &results {
        println!(
            "{} criterion {id:>2} ({name}): {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
