//! Acceptance criteria 1 to 9. Each test prints one line
//! `criterion N: PASS|FAIL: details` before asserting.

use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slowlight_cli::compare::{compare, Comparison};
use slowlight_cli::study::{
    default_scheme, exact, integrator_ladder, recorded_grid, residual_ladder, residual_windows, simulate,
    storage_metrics, subsample, with_entry_at, StorageMetrics, D0_FIT_WINDOW, ENTRY_TAU,
};
use slowlight_cli::track::{estimate_velocity, track_peak, Observable};
use slowlight_core::analytic::ExactSolution;
use slowlight_core::domain::{
    background_field, background_in_region, ControlSchedule, MediumConfig, Region, Scenario, SolitonConfig,
};
use slowlight_core::grid::{grid_evaluate, GridSolution, GridSpec, DEFAULT_MAX_NODES};
use slowlight_core::integrator::{convergence_order, ConvergenceVerdict, RecordStride};
use slowlight_core::special::{bessel_j, complex_pow_principal, gamma_reciprocal};

/// Criteria carry runtime limits, so they run one at a time.
fn serial() -> MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(n: u32, passed: bool, details: &str) {
    println!("criterion {n}: {}: {details}", if passed { "PASS" } else { "FAIL" });
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn figure_solution() -> ExactSolution {
    exact(&with_entry_at(&Scenario::default(), ENTRY_TAU).unwrap()).unwrap()
}

/// Integrator run at the default steps, recorded every 2nd τ node.
struct DefaultRun {
    numeric: GridSolution,
    analytic: GridSolution,
    elapsed: Duration,
}

const DEFAULT_STRIDE: RecordStride = RecordStride { tau: 2, zeta: 1 };

fn default_run() -> &'static DefaultRun {
    static RUN: OnceLock<DefaultRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let e = figure_solution();
        let start = Instant::now();
        let numeric = simulate(&e, &default_scheme(), DEFAULT_STRIDE).unwrap();
        let elapsed = start.elapsed();
        let analytic = grid_evaluate(&e, &recorded_grid(&default_scheme(), DEFAULT_STRIDE), DEFAULT_MAX_NODES).unwrap();
        DefaultRun { numeric, analytic, elapsed }
    })
}

#[test]
fn criterion_1_exact_solution_residual() {
    let _serial = serial();
    let e = figure_solution();
    let start = Instant::now();
    let mut passed = true;
    let mut details = Vec::new();
    for (name, spec) in residual_windows() {
        let ladder = residual_ladder(&e, &spec).unwrap();
        for (what, conv) in [("field", &ladder.field), ("atom", &ladder.atom)] {
            let ratios = conv.ratios();
            let ok = ratios.iter().all(|r| (r / 4.0 - 1.0).abs() <= 0.2) && conv.min_order() >= 1.8;
            passed &= ok;
            details.push(format!(
                "{name} {what} {:.2e}/{:.2e}/{:.2e} ratios {:.2}/{:.2}",
                conv.errors[0], conv.errors[1], conv.errors[2], ratios[0], ratios[1]
            ));
        }
    }
    let elapsed = start.elapsed();
    passed &= elapsed < Duration::from_secs(60);
    details.push(format!("{:.1} s", elapsed.as_secs_f64()));
    report(1, passed, &details.join("; "));
    assert!(passed);
}

#[test]
fn criterion_2_state_identities() {
    let _serial = serial();
    let e = figure_solution();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let zeta = rng.gen_range(0.0..12.0);
        let tau = rng.gen_range(-3.0..8.0);
        let psi = e.atomic_state(zeta, tau).unwrap();
        let rho = psi.density_matrix();
        worst = worst.max((psi.norm_sqr() - 1.0).abs()).max((rho.trace() - 1.0).norm()).max((rho.purity() - 1.0).abs());
    }
    let passed = worst <= 1e-12;
    report(2, passed, &format!("max deviation of |psi|^2, Tr rho, Tr rho^2 from 1 over 1e4 points: {worst:.2e}"));
    assert!(passed);
}

#[test]
fn criterion_3_continuity_ledger() {
    let _serial = serial();
    let e = figure_solution();
    let schedule = e.scenario().schedule;
    let mut passed = true;
    let mut details = Vec::new();
    for (b, left, right) in [(0.0, Region::D0, Region::D1), (schedule.t_revive, Region::D2, Region::D3)] {
        let (l, r) = (e.spectral_in(b, left).unwrap(), e.spectral_in(b, right).unwrap());
        let mut jump: f64 = (l.w - r.w).norm().max((l.z - r.z).norm());
        for k in 0..=240 {
            let zeta = -6.0 + 0.075 * k as f64;
            let (fl, fr) = (e.fields_from(zeta, &l), e.fields_from(zeta, &r));
            let dressed = (fl.omega_b + background_in_region(b, left, &schedule))
                - (fr.omega_b + background_in_region(b, right, &schedule));
            jump = jump.max((fl.omega_a - fr.omega_a).norm()).max(dressed.norm());
        }
        passed &= jump <= 1e-9;
        details.push(format!("tau = {b}: max jump {jump:.2e}"));
    }

    let t1 = schedule.t1;
    let behind = e.center_zeta(t1).unwrap() - 10.0 / e.phase_gradient_zeta().abs();
    let (l, r) = (e.spectral_in(t1, Region::D1).unwrap(), e.spectral_in(t1, Region::D2).unwrap());
    let jump = (e.fields_from(behind, &l).omega_b - e.fields_from(behind, &r).omega_b).norm();
    let tail = background_field(t1 - 1e-12, &schedule);
    let ok = (jump / tail - 1.0).abs() <= 0.1;
    passed &= ok;
    let centre = e.center_zeta(t1).unwrap();
    let near = (e.fields_from(centre, &l).omega_a - e.fields_from(centre, &r).omega_a).norm();
    details.push(format!(
        "tau = T1 far field: jump {jump:.4e} vs cut tail {tail:.4e}; at the centre |dOmega_a| = {near:.3}"
    ));
    report(3, passed, &details.join("; "));
    assert!(passed);
}

#[test]
fn criterion_4_background_asymptotics() {
    let _serial = serial();
    let e = figure_solution();
    let schedule = e.scenario().schedule;
    let width = 1.0 / e.phase_gradient_zeta().abs();
    let mut worst = [(0.0f64, 0.0, 0.0); 2];
    for (slot, taus) in [(0, [-2.5, -1.5, -0.5]), (1, [schedule.t_revive + 1.0, 6.0, 8.0])] {
        for tau in taus {
            let centre = e.center_zeta(tau).unwrap();
            for d in [5.0, 6.0, 8.0] {
                for side in [-1.0, 1.0] {
                    let zeta = centre + side * d * width;
                    let f = e.field_envelopes(zeta, tau).unwrap();
                    let dev = f.omega_a.norm().max((f.omega_b.norm() - background_field(tau, &schedule)).abs());
                    if dev > worst[slot].0 {
                        worst[slot] = (dev, tau, side * d);
                    }
                }
            }
        }
    }
    let passed = worst.iter().all(|w| w.0 <= 1e-6);
    report(
        4,
        passed,
        &format!(
            "max deviation at >= 5 widths: D0 {:.2e} (tau {}, {} widths), D3 {:.2e} (tau {}, {} widths)",
            worst[0].0, worst[0].1, worst[0].2, worst[1].0, worst[1].1, worst[1].2
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_5_storage_and_revival() {
    let _serial = serial();
    let run = default_run();
    let schedule = Scenario::default().schedule;
    let m: StorageMetrics = storage_metrics(&run.numeric, &schedule).unwrap();
    let ratio = m.d3.slope / m.d0.slope;
    let parts = [
        ("a", m.drift_cells < 1.0, format!("rho22 peak drift {:.3} cells", m.drift_cells)),
        ("b", m.min_peak_rho22 >= 0.99, format!("min stored peak rho22 {:.5}", m.min_peak_rho22)),
        ("c", m.max_intensity_storage < 1e-6, format!("max |Omega_a|^2 in D2 {:.3e}", m.max_intensity_storage)),
        ("d", (ratio - 1.0).abs() < 0.01, format!("slope D3/D0 {:.5} / {:.5} = {ratio:.5}", m.d3.slope, m.d0.slope)),
        ("runtime", run.elapsed < Duration::from_secs(300), format!("{:.1} s", run.elapsed.as_secs_f64())),
    ];
    let passed = parts.iter().all(|p| p.1);
    let details: Vec<String> =
        parts.iter().map(|(k, ok, d)| format!("({k}) {} {d}", if *ok { "ok" } else { "fails" })).collect();
    report(5, passed, &details.join("; "));
    assert!(passed);
}

/// Scenario with the default soliton, control amplitude `omega0` and
/// ν₀ = Ω₀²/2, entering the medium at τ = `k`·ENTRY_TAU.
fn small_control(omega0: f64) -> (ExactSolution, f64) {
    let s = Scenario {
        medium: MediumConfig { nu0: 0.5 * omega0 * omega0, delta: 0.0 },
        schedule: ControlSchedule::with_decay(omega0, 4.0),
        soliton: SolitonConfig::default(),
    };
    // Length scale relative to the defaults: ζ stretches by 4.5/ν₀; τ is
    // stretched alike so the centre covers the same number of widths.
    let k = 9.0 / (omega0 * omega0);
    (exact(&with_entry_at(&s, k * ENTRY_TAU).unwrap()).unwrap(), k)
}

/// Peak track of `observable` over the D0 fit window scaled by `k`.
fn d0_track(e: &ExactSolution, k: f64, observable: Observable) -> Vec<slowlight_cli::track::TrackSample> {
    let spec = GridSpec {
        tau_min: k * D0_FIT_WINDOW.0,
        tau_max: k * D0_FIT_WINDOW.1,
        tau_step: k * 0.01,
        zeta_min: 0.0,
        zeta_max: k * 3.0,
        zeta_step: k * 0.02,
    };
    let g = grid_evaluate(e, &spec, DEFAULT_MAX_NODES).unwrap();
    track_peak(&g, observable).unwrap()
}

#[test]
fn criterion_6_velocity() {
    let _serial = serial();
    let e = figure_solution();
    let g = grid_evaluate(&e, &GridSpec::figure_window(), DEFAULT_MAX_NODES).unwrap();
    let fit = estimate_velocity(&track_peak(&g, Observable::FieldIntensity).unwrap(), D0_FIT_WINDOW).unwrap();
    let expected = 1.0 + e.w0().norm_sqr();
    let mut passed = (fit.slope / expected - 1.0).abs() < 0.01;
    let mut details = vec![format!("default slope {:.5} vs 1+|w0|^2 = {expected:.5}", fit.slope)];

    let mut slopes = Vec::new();
    for omega0 in [0.5, 0.25, 0.125] {
        let (e, k) = small_control(omega0);
        let track = d0_track(&e, k, Observable::FieldIntensity);
        let fit = estimate_velocity(&track, (k * D0_FIT_WINDOW.0, k * D0_FIT_WINDOW.1)).unwrap();
        slopes.push(fit.slope);
        details.push(format!("Omega0 {omega0}: {:.5}", fit.slope));
    }
    passed &= slopes.windows(2).all(|p| (p[1] - 1.0).abs() < (p[0] - 1.0).abs());
    passed &= (slopes[2] - 1.0).abs() < 0.05;
    report(6, passed, &details.join("; "));
    assert!(passed);
}

#[test]
fn criterion_7_level3_scaling() {
    let _serial = serial();
    let omegas = [0.1, 0.2, 0.4];
    let peaks: Vec<f64> = omegas
        .iter()
        .map(|&o| {
            let (e, k) = small_control(o);
            d0_track(&e, k, Observable::Rho33).iter().map(|s| s.value).fold(0.0, f64::max)
        })
        .collect();
    let x: Vec<f64> = omegas.iter().map(|o| o.ln()).collect();
    let y: Vec<f64> = peaks.iter().map(|p| p.ln()).collect();
    let (mx, my) = (x.iter().sum::<f64>() / 3.0, y.iter().sum::<f64>() / 3.0);
    let slope = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
        / x.iter().map(|a| (a - mx) * (a - mx)).sum::<f64>();
    let passed = (slope - 2.0).abs() <= 0.1;
    report(
        7,
        passed,
        &format!("peak rho33 {:.3e}/{:.3e}/{:.3e}, log-log slope {slope:.4}", peaks[0], peaks[1], peaks[2]),
    );
    assert!(passed);
}

#[test]
fn criterion_8_cross_validation() {
    let _serial = serial();
    let run = default_run();
    let schedule = Scenario::default().schedule;
    let at_default: Comparison = compare(&run.numeric, &run.analytic, &schedule).unwrap();
    let linf = at_default.overall.field_linf;
    let mut details = vec![format!("Linf at (0.005, 0.05) {linf:.3e}")];
    for r in Region::ALL {
        details.push(format!("{r} {:.2e}", at_default.region(r).field_linf));
    }

    // Ladder (0.01, 0.1), (0.005, 0.05), (0.0025, 0.025) on the coarse grid.
    let e = figure_solution();
    let coarse = GridSpec { tau_step: 0.01, zeta_step: 0.1, ..default_scheme() };
    let exact_coarse = grid_evaluate(&e, &coarse, DEFAULT_MAX_NODES).unwrap();
    let level0 = simulate(&e, &coarse, RecordStride::default()).unwrap();
    let level1 = subsample(&run.numeric, RecordStride { tau: 1, zeta: 2 });
    let fine = GridSpec { tau_step: 0.0025, zeta_step: 0.025, ..default_scheme() };
    let level2 = simulate(&e, &fine, RecordStride { tau: 4, zeta: 4 }).unwrap();
    let errors: Vec<f64> = [&level0, &level1, &level2]
        .iter()
        .map(|n| compare(n, &exact_coarse, &schedule).unwrap().overall.field_linf)
        .collect();
    let order = convergence_order([errors[0], errors[1], errors[2]], 2.0);
    details.push(format!(
        "ladder {:.3e}/{:.3e}/{:.3e} orders {:.2}/{:.2}",
        errors[0], errors[1], errors[2], order.orders[0], order.orders[1]
    ));
    let passed = linf <= 1e-3 && order.verdict == ConvergenceVerdict::Pass;
    report(8, passed, &details.join("; "));
    assert!(passed);
}

#[test]
fn criterion_8_d0_window_is_second_order() {
    let _serial = serial();
    // Companion check: on a window inside D0 the same comparison converges
    // at second order below 1e-3.
    let e = figure_solution();
    let scheme = GridSpec { tau_min: -3.0, tau_max: 0.0, tau_step: 0.02, zeta_min: 0.0, zeta_max: 4.0, zeta_step: 0.1 };
    let ladder = integrator_ladder(&e, &scheme).unwrap();
    assert_eq!(ladder.order.verdict, ConvergenceVerdict::Pass, "{:?}", ladder.order);
    assert!(ladder.order.errors[2] < 1e-3);
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

#[test]
fn criterion_9_special_functions() {
    let _serial = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut details = Vec::new();

    let mut recurrence: f64 = 0.0;
    for _ in 0..2000 {
        let nu = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if nu.norm() > 3.0 {
            continue;
        }
        let mag = rng.gen_range(0.01..2.0);
        let x = c(if rng.gen_bool(0.5) { mag } else { -mag }, 0.0);
        let lhs = bessel_j(nu - 1.0, x).unwrap() + bessel_j(nu + 1.0, x).unwrap();
        let rhs = 2.0 * nu / x * bessel_j(nu, x).unwrap();
        let scale = lhs.norm().max(rhs.norm()).max(bessel_j(nu - 1.0, x).unwrap().norm());
        recurrence = recurrence.max((lhs - rhs).norm() / scale);
    }
    details.push(format!("recurrence {recurrence:.1e}"));

    let mut half: f64 = 0.0;
    for k in 1..=40 {
        let x = 0.125 * k as f64;
        let env = (2.0 / (std::f64::consts::PI * x)).sqrt();
        let jp = bessel_j(c(0.5, 0.0), c(x, 0.0)).unwrap();
        let jm = bessel_j(c(-0.5, 0.0), c(x, 0.0)).unwrap();
        half = half.max((jp - env * x.sin()).norm() / env).max((jm - env * x.cos()).norm() / env);
    }
    details.push(format!("half-integer {half:.1e}"));

    let integer = [
        (0, 0.5, 0.938_469_807_240_813),
        (0, 1.0, 0.765_197_686_557_966_6),
        (0, 2.0, 0.223_890_779_141_235_67),
        (1, 0.5, 0.242_268_457_674_873_9),
        (1, 1.0, 0.440_050_585_744_933_5),
        (1, 2.0, 0.576_724_807_756_873_4),
    ];
    let integer_err = integer
        .iter()
        .map(|&(n, x, v)| (bessel_j(c(n as f64, 0.0), c(x, 0.0)).unwrap() - v).norm())
        .fold(0.0, f64::max);
    details.push(format!("integer orders {integer_err:.1e}"));

    // J_{-γ}(x) ≈ (x/2)^{-γ}/Γ(1−γ) as x → 0 on the negative axis.
    let g = Scenario::default().gamma();
    let x = c(-1e-4, 0.0);
    let law = complex_pow_principal(x / 2.0, -g).unwrap() * gamma_reciprocal(1.0 - g);
    let small = rel(bessel_j(-g, x).unwrap(), law);
    details.push(format!("small-argument law {small:.1e}"));

    let mut functional: f64 = 0.0;
    for _ in 0..1000 {
        let z = c(rng.gen_range(-15.0..15.0), rng.gen_range(-15.0..15.0));
        if (z.re - z.re.round()).abs() < 1e-6 && z.im.abs() < 1e-6 {
            continue;
        }
        functional = functional.max(rel(gamma_reciprocal(z + 1.0), gamma_reciprocal(z) / z));
    }
    details.push(format!("gamma functional equation {functional:.1e}"));

    let elapsed = start.elapsed();
    details.push(format!("{:.2} s", elapsed.as_secs_f64()));
    let passed = recurrence < 1e-10
        && half < 1e-13
        && integer_err < 1e-12
        && small < 1e-6
        && functional < 1e-12
        && elapsed < Duration::from_secs(10);
    report(9, passed, &details.join("; "));
    assert!(passed);
}
