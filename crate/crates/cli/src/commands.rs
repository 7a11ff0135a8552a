//! The `slowlight` subcommands.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use slowlight_core::domain::{parse_config, ConfigWarning, Scenario};
use slowlight_core::grid::{grid_evaluate, GridSolution, GridSpec, DEFAULT_MAX_NODES};
use slowlight_core::integrator::{atom_step, ConvergenceVerdict, RecordStride};
use slowlight_core::special::{bessel_j, complex_pow_principal, gamma_reciprocal};
use slowlight_core::state::{DensityMatrix, FieldState};

use crate::compare::compare;
use crate::error::{CliError, Result};
use crate::export::{export_to, write_background, write_fields, write_track};
use crate::plot::{emit_plot_script, Figure};
use crate::report::{Check, ScenarioReport};
use crate::study::{
    self, d3_fit_window, default_scheme, integrator_ladder, recorded_grid, residual_ladder, residual_windows,
    storage_metrics, with_entry_at, D0_FIT_WINDOW, ENTRY_TAU,
};
use crate::track::{estimate_velocity, track_peak, Observable};

/// Grid flags; unset values keep the command's default window.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GridOverrides {
    pub tau_min: Option<f64>,
    pub tau_max: Option<f64>,
    pub tau_step: Option<f64>,
    pub zeta_max: Option<f64>,
    pub zeta_step: Option<f64>,
}

impl GridOverrides {
    pub fn apply(&self, base: GridSpec) -> GridSpec {
        GridSpec {
            tau_min: self.tau_min.unwrap_or(base.tau_min),
            tau_max: self.tau_max.unwrap_or(base.tau_max),
            tau_step: self.tau_step.unwrap_or(base.tau_step),
            zeta_min: base.zeta_min,
            zeta_max: self.zeta_max.unwrap_or(base.zeta_max),
            zeta_step: self.zeta_step.unwrap_or(base.zeta_step),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub grid: GridOverrides,
    pub observable: Observable,
    pub figure: Option<Figure>,
    /// `track` on the integrator output instead of the exact solution.
    pub numeric: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            config: None,
            out: PathBuf::from("out"),
            grid: GridOverrides::default(),
            observable: Observable::FieldIntensity,
            figure: None,
            numeric: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: ScenarioReport,
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
}

fn config_value(s: &Scenario, key: &str) -> String {
    match key {
        "nu0" => s.medium.nu0.to_string(),
        "delta" => s.medium.delta.to_string(),
        "omega0" => s.schedule.omega0.to_string(),
        "alpha" => s.schedule.alpha.to_string(),
        "t1" => s.schedule.t1.to_string(),
        "t_revive" => s.schedule.t_revive.to_string(),
        "lambda" => slowlight_core::domain::format_complex(s.soliton.lambda),
        "phi0" => s.soliton.phi0.to_string(),
        "theta0" => s.soliton.theta0.to_string(),
        _ => String::new(),
    }
}

/// Reads and validates the configuration. A missing `phi0` is set so that
/// the soliton centre enters the medium at τ = −2. Returns WARN lines for
/// every default taken and every validation warning.
pub fn load_scenario(path: Option<&Path>) -> Result<(Scenario, Vec<String>)> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::ReadConfig { path: p.to_path_buf(), source: e })?,
        None => String::new(),
    };
    let parsed = parse_config(&text)?;
    let mut scenario = parsed.scenario;
    let validated = scenario.validate().map_err(slowlight_core::Error::from)?;
    let mut warnings = Vec::new();
    if parsed.defaulted.contains(&"phi0") {
        scenario = with_entry_at(&scenario, ENTRY_TAU)?;
    }
    for key in &parsed.defaulted {
        if *key == "phi0" {
            warnings.push(format!(
                "WARN phi0 not set, using {} (soliton centre enters the medium at tau = {ENTRY_TAU})",
                scenario.soliton.phi0
            ));
        } else {
            warnings.push(format!("WARN {key} not set, using default {}", config_value(&scenario, key)));
        }
    }
    for w in validated.warnings() {
        let w: &ConfigWarning = w;
        warnings.push(format!("WARN {w}"));
    }
    Ok((scenario, warnings))
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_report(out: &Path, report: &ScenarioReport, files: &mut Vec<PathBuf>) -> Result<()> {
    let path = out.join("report.txt");
    fs::write(&path, report.render()).map_err(|e| CliError::io(&path, e))?;
    files.push(path);
    Ok(())
}

/// fields.csv, background.csv and the requested plot scripts.
fn export_grid(sol: &GridSolution, scenario: &Scenario, opts: &Options, files: &mut Vec<PathBuf>) -> Result<()> {
    let fields = opts.out.join("fields.csv");
    export_to(&fields, |w| write_fields(sol, w))?;
    let background = opts.out.join("background.csv");
    export_to(&background, |w| write_background(&scenario.schedule, &sol.tau, w))?;
    files.push(fields);
    files.push(background);
    let figures = opts.figure.map(|f| vec![f]).unwrap_or_else(|| Figure::ALL.to_vec());
    for f in figures {
        let script = opts.out.join(format!("{f}.gp"));
        emit_plot_script(&opts.out.join(f.data_file()), f, &script)?;
        files.push(script);
    }
    Ok(())
}

pub fn run_analytic(opts: &Options) -> Result<Outcome> {
    let (scenario, warnings) = load_scenario(opts.config.as_deref())?;
    let e = study::exact(&scenario)?;
    let spec = opts.grid.apply(GridSpec::figure_window());
    let sol = grid_evaluate(&e, &spec, DEFAULT_MAX_NODES)?;
    prepare_out(&opts.out)?;
    let mut files = Vec::new();
    export_grid(&sol, &scenario, opts, &mut files)?;

    let mut report = ScenarioReport::new("analytic", scenario);
    report.grid = Some(spec);
    report.notes.push(format!("w0 = {}, gamma = {}, s = {}", e.w0(), e.gamma(), e.root()));
    report.notes.push(format!("D0 centre velocity 1+|w0|^2 = {:.10}", e.d0_velocity()));
    report.notes.push(format!("stored centre zeta = {:.6}", e.center_zeta(scenario.schedule.t_revive)?));
    write_report(&opts.out, &report, &mut files)?;
    Ok(Outcome { report, warnings, files })
}

/// Record stride keeping the output τ-step near 0.01.
fn output_stride(scheme: &GridSpec) -> RecordStride {
    RecordStride { tau: ((0.01 / scheme.tau_step).round() as usize).max(1), zeta: 1 }
}

pub fn run_simulate(opts: &Options) -> Result<Outcome> {
    let (scenario, warnings) = load_scenario(opts.config.as_deref())?;
    let e = study::exact(&scenario)?;
    let scheme = opts.grid.apply(default_scheme());
    let stride = output_stride(&scheme);
    let sol = study::simulate(&e, &scheme, stride)?;
    prepare_out(&opts.out)?;
    let mut files = Vec::new();
    export_grid(&sol, &scenario, opts, &mut files)?;

    let mut report = ScenarioReport::new("simulate", scenario);
    report.grid = Some(recorded_grid(&scheme, stride));
    report.scheme = Some((scheme.tau_step, scheme.zeta_step));
    let exact_grid = grid_evaluate(&e, &recorded_grid(&scheme, stride), DEFAULT_MAX_NODES)?;
    report.comparisons.push(("numeric vs exact".into(), compare(&sol, &exact_grid, &scenario.schedule)?));
    match storage_metrics(&sol, &scenario.schedule) {
        Ok(m) => {
            report.notes.push(format!(
                "storage: rho22 peak drift {:.4} ({:.3} cells), min peak rho22 {:.5}, max |Omega_a|^2 {:.3e}",
                m.drift, m.drift_cells, m.min_peak_rho22, m.max_intensity_storage
            ));
            report.velocities.push(("D0".into(), m.d0));
            report.velocities.push(("D3".into(), m.d3));
        }
        Err(err) => report.notes.push(format!("storage metrics unavailable: {err}")),
    }
    write_report(&opts.out, &report, &mut files)?;
    Ok(Outcome { report, warnings, files })
}

pub fn run_track(opts: &Options) -> Result<Outcome> {
    let (scenario, warnings) = load_scenario(opts.config.as_deref())?;
    let e = study::exact(&scenario)?;
    let mut report = ScenarioReport::new("track", scenario);
    let sol = if opts.numeric {
        let scheme = opts.grid.apply(default_scheme());
        let stride = output_stride(&scheme);
        report.scheme = Some((scheme.tau_step, scheme.zeta_step));
        report.grid = Some(recorded_grid(&scheme, stride));
        study::simulate(&e, &scheme, stride)?
    } else {
        let spec = opts.grid.apply(GridSpec::figure_window());
        report.grid = Some(spec);
        grid_evaluate(&e, &spec, DEFAULT_MAX_NODES)?
    };
    let track = track_peak(&sol, opts.observable)?;
    prepare_out(&opts.out)?;
    let mut files = Vec::new();
    let path = opts.out.join("track.csv");
    export_to(&path, |w| write_track(&track, opts.observable, w))?;
    files.push(path);

    report.notes.push(format!("observable {}, {} samples above the noise floor", opts.observable, track.len()));
    if track.is_empty() {
        report.notes.push("empty track: no column exceeds the noise floor".into());
    }
    let tau_max = *sol.tau.values.last().unwrap_or(&0.0);
    let eit = 1.0;
    for (name, window) in [("D0", D0_FIT_WINDOW), ("D3", d3_fit_window(&scenario.schedule, tau_max))] {
        match estimate_velocity(&track, window) {
            Ok(fit) => {
                report.notes.push(format!("{name} slope / EIT estimate = {:.4}", fit.slope / eit));
                report.velocities.push((name.into(), fit));
            }
            Err(err) => report.notes.push(format!("{name}: {err}")),
        }
    }
    report.notes.push(format!("analytic D0 slope 1+|w0|^2 = {:.6}", e.d0_velocity()));
    write_report(&opts.out, &report, &mut files)?;
    Ok(Outcome { report, warnings, files })
}

/// Special-function values against high-precision references.
pub fn bessel_spot_checks() -> Vec<Check> {
    let c = Complex64::new;
    let g = c(1.0125, 0.0);
    let x0 = c(-0.375, 0.0);
    let cases: Vec<(&str, slowlight_core::Result<Complex64>, Complex64)> = vec![
        ("J_0(1)", bessel_j(c(0.0, 0.0), c(1.0, 0.0)), c(0.765_197_686_557_966_6, 0.0)),
        ("J_1(2)", bessel_j(c(1.0, 0.0), c(2.0, 0.0)), c(0.576_724_807_756_873_4, 0.0)),
        ("J_1/2(pi/2)", bessel_j(c(0.5, 0.0), c(PI / 2.0, 0.0)), c(2.0 / PI, 0.0)),
        ("J_g(-0.375), g=1.0125", bessel_j(g, x0), c(-0.179_330_044_205_868_26, -0.007_045_896_626_538_666)),
        ("J_-g(-0.375)", bessel_j(-g, x0), c(0.254_082_443_725_476_86, -0.009_982_926_402_744_15)),
        (
            "J_1+i(-1.5+0.5i)",
            bessel_j(c(1.0, 1.0), c(-1.5, 0.5)),
            c(-0.040_352_340_458_155_63, 0.040_266_936_720_462_2),
        ),
        ("1/Gamma(1+i)", Ok(gamma_reciprocal(c(1.0, 1.0))), c(1.830_744_396_590_524_7, 0.569_607_641_036_681_8)),
        ("1/Gamma(-0.0125)", Ok(gamma_reciprocal(c(-0.0125, 0.0))), c(-0.012_408_530_116_939_714, 0.0)),
        (
            "(-0.1875)^(-1.0125)",
            complex_pow_principal(c(-0.1875, 0.0), -g),
            c(-5.441_908_779_378_797, 0.213_813_178_267_769_03),
        ),
    ];
    cases
        .into_iter()
        .map(|(name, value, reference)| match value {
            Ok(v) => {
                let rel = (v - reference).norm() / reference.norm();
                Check::new(name, rel < 1e-12, format!("{v:.16} (reference {reference:.16}, rel err {rel:.2e})"))
            }
            Err(err) => Check::new(name, false, err.to_string()),
        })
        .collect()
}

pub fn run_bessel(opts: &Options) -> Result<Outcome> {
    let (scenario, warnings) =
        if opts.config.is_some() { load_scenario(opts.config.as_deref())? } else { (Scenario::default(), Vec::new()) };
    let mut report = ScenarioReport::new("bessel", scenario);
    let g = scenario.gamma();
    let x0 = Complex64::new(-scenario.schedule.omega0 / (2.0 * scenario.schedule.alpha), 0.0);
    for (name, nu) in [("J_g", g), ("J_-g", -g), ("J_g-1", g - 1.0), ("J_1-g", 1.0 - g)] {
        let v = bessel_j(nu, x0)?;
        report.notes.push(format!("config: {name}({x0}) = {v:.16}, g = {g}"));
    }
    report.checks = bessel_spot_checks();
    Ok(Outcome { report, warnings, files: Vec::new() })
}

fn verdict_ok(v: ConvergenceVerdict) -> bool {
    v == ConvergenceVerdict::Pass
}

/// Trace and purity drift of `atom_step` over 10⁴ steps, and the largest
/// per-step change.
pub fn unitary_drift() -> Result<(f64, f64)> {
    let medium = slowlight_core::domain::MediumConfig { nu0: 4.5, delta: 0.3 };
    let mut rho = DensityMatrix::diagonal(0.6, 0.3, 0.1);
    let start = (rho.trace().re, rho.purity());
    let mut per_step: f64 = 0.0;
    for k in 0..10_000 {
        let t = k as f64 * 1e-3;
        let f = FieldState::new(Complex64::new(3.0 * t.sin(), 0.5), Complex64::new(2.0, t.cos()));
        let next = atom_step(&rho, &f, 1e-3, &medium)?;
        per_step = per_step.max((next.trace().re - rho.trace().re).abs()).max((next.purity() - rho.purity()).abs());
        rho = next;
    }
    let total = (rho.trace().re - start.0).abs().max((rho.purity() - start.1).abs());
    Ok((per_step, total))
}

/// Largest deviation from |1⟩⟨1| under Ω_a = 0 and a varying Ω_b.
pub fn dark_state_deviation() -> Result<f64> {
    let medium = slowlight_core::domain::MediumConfig::default();
    let ground = DensityMatrix::diagonal(1.0, 0.0, 0.0);
    let mut rho = ground;
    let mut worst: f64 = 0.0;
    for k in 0..10_000 {
        let t = k as f64 * 1e-3;
        let f = FieldState::new(Complex64::new(0.0, 0.0), Complex64::new(3.0 * (2.0 * t).cos(), t.sin()));
        rho = atom_step(&rho, &f, 1e-3, &medium)?;
        worst = worst.max((rho.0 - ground.0).iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    Ok(worst)
}

pub fn run_verify(opts: &Options) -> Result<Outcome> {
    let (scenario, warnings) = load_scenario(opts.config.as_deref())?;
    let e = study::exact(&scenario)?;
    let mut report = ScenarioReport::new("verify", scenario);

    let (per_step, total) = unitary_drift()?;
    report.checks.push(Check::new(
        "unitary step trace/purity drift",
        per_step <= 1e-13 && total <= 1e-9,
        format!("per step {per_step:.2e} (<= 1e-13), over 1e4 steps {total:.2e} (<= 1e-9)"),
    ));
    let dark = dark_state_deviation()?;
    report.checks.push(Check::new("dark-state fixed point", dark <= 1e-14, format!("max deviation {dark:.2e}")));

    for (name, spec) in residual_windows() {
        let ladder = residual_ladder(&e, &spec)?;
        let ok = verdict_ok(ladder.field.verdict) && verdict_ok(ladder.atom.verdict);
        report.checks.push(Check::new(
            format!("exact-solution residual order, {name}"),
            ok,
            format!(
                "field orders {:.3}/{:.3}, atom orders {:.3}/{:.3} (>= 1.8)",
                ladder.field.orders[0], ladder.field.orders[1], ladder.atom.orders[0], ladder.atom.orders[1]
            ),
        ));
        report.residuals.push((format!("exact, {name}, finest"), ladder.reports[2]));
    }

    let d0_scheme =
        GridSpec { tau_min: -3.0, tau_max: 0.0, tau_step: 0.02, zeta_min: 0.0, zeta_max: 4.0, zeta_step: 0.1 };
    let ladder = integrator_ladder(&e, &d0_scheme)?;
    report.checks.push(Check::new(
        "integrator order, D0 window",
        verdict_ok(ladder.order.verdict),
        format!(
            "field Linf {:.3e} / {:.3e} / {:.3e}, orders {:.3}/{:.3}",
            ladder.order.errors[0],
            ladder.order.errors[1],
            ladder.order.errors[2],
            ladder.order.orders[0],
            ladder.order.orders[1]
        ),
    ));

    let scheme = opts.grid.apply(default_scheme());
    let stride = output_stride(&scheme);
    report.scheme = Some((scheme.tau_step, scheme.zeta_step));
    report.grid = Some(recorded_grid(&scheme, stride));
    let sol = study::simulate(&e, &scheme, stride)?;
    let m = storage_metrics(&sol, &scenario.schedule)?;
    report.checks.push(Check::new(
        "stored rho22 peak drift",
        m.drift_cells < 1.0,
        format!("{:.3} cells over {} samples in (T1, T]", m.drift_cells, m.storage_samples),
    ));
    let ratio = m.d3.slope / m.d0.slope;
    report.checks.push(Check::new(
        "post-revival slope equals pre-stop slope",
        (ratio - 1.0).abs() < 0.01,
        format!("D0 {:.5}, D3 {:.5}, ratio {:.5}", m.d0.slope, m.d3.slope, ratio),
    ));
    report.notes.push(format!("min stored rho22 peak {:.5}", m.min_peak_rho22));
    report.notes.push(format!("max |Omega_a|^2 during storage {:.3e}", m.max_intensity_storage));
    report.velocities.push(("D0 (numeric)".into(), m.d0));
    report.velocities.push(("D3 (numeric)".into(), m.d3));
    let exact_grid = grid_evaluate(&e, &recorded_grid(&scheme, stride), DEFAULT_MAX_NODES)?;
    report.comparisons.push(("numeric vs exact".into(), compare(&sol, &exact_grid, &scenario.schedule)?));

    let mut files = Vec::new();
    prepare_out(&opts.out)?;
    write_report(&opts.out, &report, &mut files)?;
    Ok(Outcome { report, warnings, files })
}
