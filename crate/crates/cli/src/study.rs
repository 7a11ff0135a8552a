//! Measurements on the write/store/read scenario, shared by the `verify`
//! and `track` commands and the acceptance suite.

use slowlight_core::analytic::ExactSolution;
use slowlight_core::domain::{ControlSchedule, Scenario};
use slowlight_core::grid::{grid_evaluate, Axis, GridSolution, GridSpec};
use slowlight_core::integrator::{
    convergence_order, exact_residual, integrate_exact, ConvergenceReport, RecordStride, ResidualReport,
};

use crate::compare::{compare, Comparison};
use crate::error::Result;
use crate::track::{estimate_velocity, track_peak, Observable, VelocityFit};

/// The soliton centre crosses ζ = 0 at this τ in the figure scenario.
pub const ENTRY_TAU: f64 = -2.0;

/// τ-window of the pre-stop velocity fit.
pub const D0_FIT_WINDOW: (f64, f64) = (-1.5, -0.1);

/// τ-window of the post-revival velocity fit, starting once w has relaxed.
pub fn d3_fit_window(schedule: &ControlSchedule, tau_max: f64) -> (f64, f64) {
    (schedule.t_revive + 1.5, tau_max)
}

/// Scheme grid of the default simulation: τ ∈ [−3, 8] at 0.005, ζ ∈ [0, 12]
/// at 0.05.
pub fn default_scheme() -> GridSpec {
    GridSpec { tau_min: -3.0, tau_max: 8.0, tau_step: 0.005, zeta_min: 0.0, zeta_max: 12.0, zeta_step: 0.05 }
}

pub fn exact(scenario: &Scenario) -> Result<ExactSolution> {
    Ok(ExactSolution::new(&scenario.validate().map_err(slowlight_core::Error::from)?)?)
}

/// `scenario` with φ̃₀ replaced so the centre enters the medium at `tau`.
pub fn with_entry_at(scenario: &Scenario, tau: f64) -> Result<Scenario> {
    let mut s = *scenario;
    s.soliton.phi0 = exact(scenario)?.entry_phase(tau)?;
    Ok(s)
}

/// Grid of the nodes kept when `scheme` is recorded with `stride`.
pub fn recorded_grid(scheme: &GridSpec, stride: RecordStride) -> GridSpec {
    let tau_step = scheme.tau_step * stride.tau as f64;
    let zeta_step = scheme.zeta_step * stride.zeta as f64;
    let n_tau = ((scheme.tau_max - scheme.tau_min) / scheme.tau_step + 1e-9).floor() as usize / stride.tau;
    let n_zeta = ((scheme.zeta_max - scheme.zeta_min) / scheme.zeta_step + 1e-9).floor() as usize / stride.zeta;
    GridSpec {
        tau_min: scheme.tau_min,
        tau_max: scheme.tau_min + n_tau as f64 * tau_step,
        tau_step,
        zeta_min: scheme.zeta_min,
        zeta_max: scheme.zeta_min + n_zeta as f64 * zeta_step,
        zeta_step,
    }
}

/// Integrates the exact boundary data on the `scheme` grid (Heun, one
/// corrector), keeping every `stride`-th node.
pub fn simulate(e: &ExactSolution, scheme: &GridSpec, stride: RecordStride) -> Result<GridSolution> {
    let schedule = e.scenario().schedule;
    let (tau, zeta) = scheme.axes(&schedule.breakpoints())?;
    Ok(integrate_exact(e, tau, &zeta, 1, stride)?)
}

/// Every `stride`-th node of `sol`.
pub fn subsample(sol: &GridSolution, stride: RecordStride) -> GridSolution {
    let pick = |a: &Axis, s: usize| Axis {
        start: a.start,
        step: a.step * s as f64,
        values: a.values.iter().copied().step_by(s).collect(),
    };
    let tau = pick(&sol.tau, stride.tau);
    let zeta = pick(&sol.zeta, stride.zeta);
    let mut fields = Vec::with_capacity(tau.len() * zeta.len());
    let mut rho = Vec::with_capacity(tau.len() * zeta.len());
    for k in (0..sol.tau.len()).step_by(stride.tau) {
        for j in (0..sol.zeta.len()).step_by(stride.zeta) {
            fields.push(sol.field(k, j));
            rho.push(*sol.rho(k, j));
        }
    }
    GridSolution { provenance: sol.provenance, tau, zeta, fields, rho }
}

/// Storage and revival observables of a solution on the figure window.
#[derive(Debug, Clone, PartialEq)]
pub struct StorageMetrics {
    /// Spread of the ρ₂₂ peak position over τ ∈ (T₁, T], in ζ units and in
    /// grid cells.
    pub drift: f64,
    pub drift_cells: f64,
    pub storage_samples: usize,
    /// Smallest ρ₂₂ peak value over τ ∈ (T₁, T].
    pub min_peak_rho22: f64,
    /// Largest |Ω_a|² anywhere in τ ∈ (T₁, T].
    pub max_intensity_storage: f64,
    pub d0: VelocityFit,
    pub d3: VelocityFit,
}

pub fn storage_metrics(sol: &GridSolution, schedule: &ControlSchedule) -> Result<StorageMetrics> {
    let in_storage = |tau: f64| tau > schedule.t1 && tau <= schedule.t_revive;
    let rho_track: Vec<_> = track_peak(sol, Observable::Rho22)?.into_iter().filter(|s| in_storage(s.tau)).collect();
    let lo = rho_track.iter().map(|s| s.zeta_peak).fold(f64::INFINITY, f64::min);
    let hi = rho_track.iter().map(|s| s.zeta_peak).fold(f64::NEG_INFINITY, f64::max);
    let drift = if rho_track.is_empty() { f64::NAN } else { hi - lo };
    let min_peak = rho_track.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);

    let mut max_intensity: f64 = 0.0;
    for (k, &t) in sol.tau.values.iter().enumerate() {
        if in_storage(t) {
            for j in 0..sol.zeta.len() {
                max_intensity = max_intensity.max(sol.field(k, j).omega_a.norm_sqr());
            }
        }
    }

    let field_track = track_peak(sol, Observable::FieldIntensity)?;
    let tau_max = *sol.tau.values.last().unwrap_or(&0.0);
    Ok(StorageMetrics {
        drift,
        drift_cells: drift / sol.zeta.step,
        storage_samples: rho_track.len(),
        min_peak_rho22: min_peak,
        max_intensity_storage: max_intensity,
        d0: estimate_velocity(&field_track, D0_FIT_WINDOW)?,
        d3: estimate_velocity(&field_track, d3_fit_window(schedule, tau_max))?,
    })
}

/// Coarsest steps of the exact-solution residual ladders: the D0 window and
/// the four-region window.
pub fn residual_windows() -> [(&'static str, GridSpec); 2] {
    [
        (
            "D0 window",
            GridSpec { tau_min: -3.0, tau_max: -0.2, tau_step: 0.04, zeta_min: 0.0, zeta_max: 4.0, zeta_step: 0.08 },
        ),
        (
            "four-region window",
            GridSpec { tau_min: -3.0, tau_max: 8.0, tau_step: 0.005, zeta_min: 0.0, zeta_max: 12.0, zeta_step: 0.01 },
        ),
    ]
}

fn halved(spec: &GridSpec, level: u32) -> GridSpec {
    let f = 0.5f64.powi(level as i32);
    GridSpec { tau_step: spec.tau_step * f, zeta_step: spec.zeta_step * f, ..*spec }
}

/// Residuals of the exact solution at steps h, h/2, h/4.
///
/// Right after the control switches at 0 and T the atoms go through a
/// transient a few hundredths wide; the residual maximum sits next to the
/// boundary buffer there and shows the asymptotic order only once h_τ is
/// well below that width.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualLadder {
    pub specs: [GridSpec; 3],
    pub reports: [ResidualReport; 3],
    pub field: ConvergenceReport,
    pub atom: ConvergenceReport,
}

pub fn residual_ladder(e: &ExactSolution, spec: &GridSpec) -> Result<ResidualLadder> {
    let specs = [halved(spec, 0), halved(spec, 1), halved(spec, 2)];
    let mut reports = Vec::with_capacity(3);
    for s in &specs {
        reports.push(exact_residual(e, s)?);
    }
    let reports: [ResidualReport; 3] = [reports[0], reports[1], reports[2]];
    let field = convergence_order([reports[0].field, reports[1].field, reports[2].field], 2.0);
    let atom = convergence_order([reports[0].atom, reports[1].atom, reports[2].atom], 2.0);
    Ok(ResidualLadder { specs, reports, field, atom })
}

/// Numeric-vs-exact differences at scheme steps h, h/2, h/4, all measured on
/// the coarsest scheme grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorLadder {
    pub schemes: [GridSpec; 3],
    pub comparisons: [Comparison; 3],
    pub order: ConvergenceReport,
}

pub fn integrator_ladder(e: &ExactSolution, scheme: &GridSpec) -> Result<IntegratorLadder> {
    let schedule = e.scenario().schedule;
    let schemes = [halved(scheme, 0), halved(scheme, 1), halved(scheme, 2)];
    let exact_grid = grid_evaluate(e, scheme, usize::MAX)?;
    let mut comparisons = Vec::with_capacity(3);
    for (level, s) in schemes.iter().enumerate() {
        let stride = 1usize << level;
        let num = simulate(e, s, RecordStride { tau: stride, zeta: stride })?;
        comparisons.push(compare(&num, &exact_grid, &schedule)?);
    }
    let errors =
        [comparisons[0].overall.field_linf, comparisons[1].overall.field_linf, comparisons[2].overall.field_linf];
    let order = convergence_order(errors, 2.0);
    let comparisons = [comparisons[0].clone(), comparisons[1].clone(), comparisons[2].clone()];
    Ok(IntegratorLadder { schemes, comparisons, order })
}
