//! Numerical solution of the reduced Maxwell–Bloch system
//!
//! ```text
//! ∂_ζ H_I = i(ν₀/4)[D, ρ],      ∂_τ ρ = i[(Δ/2)D − H_I, ρ],
//! ```
//!
//! marching in ζ (Heun) with a unitary midpoint step for the atoms in τ,
//! plus finite-difference residuals and convergence-order estimates used to
//! check any [`GridSolution`] against the equations.

use nalgebra::Matrix3;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::analytic::ExactSolution;
use crate::domain::{region_of, region_right_of, ControlSchedule, MediumConfig};
use crate::error::{Error, Result};
use crate::grid::{Axis, GridSolution, GridSpec, Provenance};
use crate::state::{DensityMatrix, FieldState};

type M3 = Matrix3<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest allowed h_τ · max(|Ω|, |Δ|) for one atomic step.
pub const STEP_GUARD: f64 = 0.5;

/// Nodes excluded on each side of a region boundary by [`residual_norm`].
pub const BOUNDARY_BUFFER: usize = 3;

/// D = diag(1, 1, −1).
pub fn level_operator() -> M3 {
    let one = Complex64::new(1.0, 0.0);
    Matrix3::new(one, ZERO, ZERO, ZERO, one, ZERO, ZERO, ZERO, -one)
}

/// H_I = −½(Ω_a|3⟩⟨1| + Ω_b|3⟩⟨2|) + h.c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionHamiltonian(pub M3);

pub fn hamiltonian_from_fields(fields: &FieldState) -> InteractionHamiltonian {
    let mut h = M3::zeros();
    h[(2, 0)] = -0.5 * fields.omega_a;
    h[(0, 2)] = -0.5 * fields.omega_a.conj();
    h[(2, 1)] = -0.5 * fields.omega_b;
    h[(1, 2)] = -0.5 * fields.omega_b.conj();
    InteractionHamiltonian(h)
}

/// (Δ/2)D − H_I, the generator of the atomic evolution ∂_τρ = i[K, ρ].
pub fn atomic_generator(fields: &FieldState, delta: f64) -> M3 {
    level_operator() * Complex64::new(0.5 * delta, 0.0) - hamiltonian_from_fields(fields).0
}

fn commutator(a: &M3, b: &M3) -> M3 {
    a * b - b * a
}

fn max_abs(m: &M3) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn inf_norm(m: &M3) -> f64 {
    (0..3).map(|r| (0..3).map(|c| m[(r, c)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring of a Taylor series.
fn expm(a: &M3) -> M3 {
    let mut squarings = 0;
    let mut scaled = *a;
    let norm = inf_norm(a);
    if norm > 0.25 {
        squarings = (norm / 0.25).log2().ceil() as u32;
        scaled /= Complex64::new(2f64.powi(squarings as i32), 0.0);
    }
    let mut term = M3::identity();
    let mut sum = M3::identity();
    for k in 1..=24 {
        term = term * scaled / Complex64::new(k as f64, 0.0);
        sum += term;
        if inf_norm(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// U = exp(i h ((Δ/2)D − H_I)).
pub fn propagator(fields: &FieldState, h_tau: f64, delta: f64) -> M3 {
    expm(&(atomic_generator(fields, delta) * Complex64::new(0.0, h_tau)))
}

/// One unitary step ρ ← UρU† with the fields evaluated at the step midpoint.
pub fn atom_step(
    rho: &DensityMatrix,
    fields_mid: &FieldState,
    h_tau: f64,
    medium: &MediumConfig,
) -> Result<DensityMatrix> {
    let product = h_tau * fields_mid.magnitude().max(medium.delta.abs());
    if !(product < STEP_GUARD) {
        return Err(Error::StepSize { tau: f64::NAN, product });
    }
    let u = propagator(fields_mid, h_tau, medium.delta);
    Ok(DensityMatrix(u * rho.0 * u.adjoint()))
}

/// (∂_ζΩ_a, ∂_ζΩ_b) = (iν₀ρ₃₁, iν₀ρ₃₂), the scalar content of
/// ∂_ζH_I = i(ν₀/4)[D, ρ].
pub fn field_derivative(rho: &DensityMatrix, medium: &MediumConfig) -> (Complex64, Complex64) {
    let (r31, r32) = rho.optical_coherences();
    (I * medium.nu0 * r31, I * medium.nu0 * r32)
}

/// Step sizes and corrector count of the marching scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub tau_step: f64,
    pub zeta_step: f64,
    /// Corrector passes per ζ-step; 1 is Heun, 0 is forward Euler.
    pub correctors: usize,
}

impl SchemeConfig {
    pub fn new(tau_step: f64, zeta_step: f64) -> Result<Self> {
        if !(tau_step > 0.0 && zeta_step > 0.0) {
            return Err(Error::Grid(format!("steps must be positive (h_tau={tau_step}, h_zeta={zeta_step})")));
        }
        Ok(Self { tau_step, zeta_step, correctors: 1 })
    }
}

/// Field data at the medium entrance on the τ-grid. Fields may jump at a
/// node; `left` holds the node value (left limit), `jump` the right limit
/// minus the left limit. The jump is carried unchanged along ζ since the
/// field equation has a bounded right-hand side.
#[derive(Debug, Clone)]
pub struct Boundary {
    pub tau: Axis,
    pub left: Vec<FieldState>,
    pub jump: Vec<FieldState>,
}

impl Boundary {
    pub fn continuous(tau: Axis, fields: Vec<FieldState>) -> Result<Self> {
        if fields.len() != tau.len() {
            return Err(Error::Grid("boundary data length differs from the tau axis".into()));
        }
        let jump = vec![FieldState::default(); fields.len()];
        Ok(Self { tau, left: fields, jump })
    }

    /// Exact fields at ζ = `zeta0`, with both one-sided limits at region
    /// boundaries that fall on nodes.
    pub fn from_exact(solution: &ExactSolution, tau: Axis, zeta0: f64) -> Result<Self> {
        let schedule = solution.scenario().schedule;
        let mut left = Vec::with_capacity(tau.len());
        let mut jump = Vec::with_capacity(tau.len());
        for &t in &tau.values {
            let sd = solution.spectral(t)?;
            let l = solution.fields_from(zeta0, &sd);
            let j = if region_of(t, &schedule) != region_right_of(t, &schedule) {
                solution.fields_from(zeta0, &solution.spectral_right(t)?) - l
            } else {
                FieldState::default()
            };
            left.push(l);
            jump.push(j);
        }
        Ok(Self { tau, left, jump })
    }
}

/// Exact atomic state at τ = `tau0` for every ζ node.
pub fn initial_atoms_from_exact(solution: &ExactSolution, zeta: &Axis, tau0: f64) -> Result<Vec<DensityMatrix>> {
    let sd = solution.spectral(tau0)?;
    Ok(zeta.values.iter().map(|&z| solution.atomic_state_from(z, &sd).density_matrix()).collect())
}

/// Record every `tau`-th τ node and `zeta`-th ζ node of the scheme grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordStride {
    pub tau: usize,
    pub zeta: usize,
}

impl Default for RecordStride {
    fn default() -> Self {
        Self { tau: 1, zeta: 1 }
    }
}

fn subsample(axis: &Axis, stride: usize) -> Axis {
    Axis {
        start: axis.start,
        step: axis.step * stride as f64,
        values: axis.values.iter().copied().step_by(stride).collect(),
    }
}

/// Sequential τ-sweep of one ζ-column.
fn sweep(
    fields: &[FieldState],
    jump: &[FieldState],
    rho0: &DensityMatrix,
    tau: &Axis,
    medium: &MediumConfig,
    out: &mut Vec<DensityMatrix>,
) -> Result<()> {
    out.clear();
    out.push(*rho0);
    let mut rho = *rho0;
    for k in 0..fields.len() - 1 {
        let h = tau.values[k + 1] - tau.values[k];
        let mid = (fields[k] + jump[k] + fields[k + 1]) * 0.5;
        rho = atom_step(&rho, &mid, h, medium).map_err(|e| match e {
            Error::StepSize { product, .. } => Error::StepSize { tau: tau.values[k], product },
            other => other,
        })?;
        out.push(rho);
    }
    Ok(())
}

/// Marches the system in ζ from the boundary data. `initial` holds ρ at
/// τ = tau[0] for each ζ node; ζ-steps come from `zeta`, τ-steps from the
/// boundary axis.
pub fn integrate(
    boundary: &Boundary,
    initial: &[DensityMatrix],
    zeta: &Axis,
    medium: &MediumConfig,
    correctors: usize,
    stride: RecordStride,
) -> Result<GridSolution> {
    let nt = boundary.tau.len();
    let nz = zeta.len();
    if nt < 2 || nz < 1 {
        return Err(Error::Grid("integration needs at least 2 tau nodes and 1 zeta node".into()));
    }
    if initial.len() != nz {
        return Err(Error::Grid("initial atomic data length differs from the zeta axis".into()));
    }
    if stride.tau == 0 || stride.zeta == 0 {
        return Err(Error::Grid("record stride must be positive".into()));
    }

    let tau_out = subsample(&boundary.tau, stride.tau);
    let zeta_out = subsample(zeta, stride.zeta);
    let mut rec_fields = vec![FieldState::default(); tau_out.len() * zeta_out.len()];
    let mut rec_rho = vec![DensityMatrix::diagonal(0.0, 0.0, 0.0); tau_out.len() * zeta_out.len()];

    let mut fields = boundary.left.clone();
    let mut rhos = Vec::with_capacity(nt);
    let mut rhos_pred = Vec::with_capacity(nt);
    let mut deriv = vec![FieldState::default(); nt];
    let mut pred = vec![FieldState::default(); nt];

    for j in 0..nz {
        sweep(&fields, &boundary.jump, &initial[j], &boundary.tau, medium, &mut rhos)?;

        if j % stride.zeta == 0 {
            let jo = j / stride.zeta;
            for (ko, k) in (0..nt).step_by(stride.tau).enumerate() {
                let idx = ko * zeta_out.len() + jo;
                rec_fields[idx] = fields[k];
                rec_rho[idx] = rhos[k];
            }
        }
        if j + 1 == nz {
            break;
        }

        let h = zeta.values[j + 1] - zeta.values[j];
        for k in 0..nt {
            let (da, db) = field_derivative(&rhos[k], medium);
            deriv[k] = FieldState::new(da, db);
            pred[k] = fields[k] + deriv[k] * h;
        }
        for _ in 0..correctors {
            sweep(&pred, &boundary.jump, &initial[j + 1], &boundary.tau, medium, &mut rhos_pred)?;
            for k in 0..nt {
                let (da, db) = field_derivative(&rhos_pred[k], medium);
                pred[k] = fields[k] + (deriv[k] + FieldState::new(da, db)) * (0.5 * h);
            }
        }
        std::mem::swap(&mut fields, &mut pred);

        if let Some(k) = fields.iter().position(|f| !f.is_finite()) {
            return Err(Error::Divergence { zeta: zeta.values[j + 1], tau: boundary.tau.values[k] });
        }
    }

    Ok(GridSolution { provenance: Provenance::Numeric, tau: tau_out, zeta: zeta_out, fields: rec_fields, rho: rec_rho })
}

/// Integrates the exact solution's boundary and initial data over the
/// window of `tau`/`zeta`. The entrance is the first ζ node, initial atoms
/// are taken at the first τ node.
pub fn integrate_exact(
    solution: &ExactSolution,
    tau: Axis,
    zeta: &Axis,
    correctors: usize,
    stride: RecordStride,
) -> Result<GridSolution> {
    let boundary = Boundary::from_exact(solution, tau, zeta.values[0])?;
    let initial = initial_atoms_from_exact(solution, zeta, boundary.tau.values[0])?;
    integrate(&boundary, &initial, zeta, &solution.scenario().medium, correctors, stride)
}

/// Max-norm residuals of both equations over the interior of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// max |∂_ζΩ − iν₀ρ₃·| over interior ζ nodes (Ω_a and Ω_b).
    pub field: f64,
    /// max entry of ∂_τρ − i[(Δ/2)D − H_I, ρ] over interior τ nodes.
    pub atom: f64,
    /// (τ index, ζ index) of the largest field residual.
    pub field_at: (usize, usize),
    pub atom_at: (usize, usize),
    /// τ nodes skipped around region boundaries.
    pub excluded_tau_nodes: usize,
}

/// Centered-difference residuals, skipping [`BOUNDARY_BUFFER`] nodes on
/// each side of the region boundaries 0, T₁, T.
pub fn residual_norm(
    solution: &GridSolution,
    medium: &MediumConfig,
    schedule: &ControlSchedule,
) -> Result<ResidualReport> {
    residual_norm_with_buffer(solution, medium, &schedule.breakpoints(), BOUNDARY_BUFFER)
}

pub fn residual_norm_with_buffer(
    solution: &GridSolution,
    medium: &MediumConfig,
    breakpoints: &[f64],
    buffer: usize,
) -> Result<ResidualReport> {
    let (nt, nz) = solution.dims();
    if nt < 3 || nz < 3 {
        return Err(Error::Grid(format!("residual needs >= 3 nodes per axis, got {nt} x {nz}")));
    }
    let excluded = excluded_rows(&solution.tau, breakpoints, buffer);
    let mut report = ResidualReport {
        field: 0.0,
        atom: 0.0,
        field_at: (0, 0),
        atom_at: (0, 0),
        excluded_tau_nodes: excluded.iter().filter(|e| **e).count(),
    };
    accumulate_residual(solution, medium, &excluded, 0..nt, 1..nt - 1, 0, &mut report);
    Ok(report)
}

/// τ rows within `buffer` nodes of a breakpoint inside the axis.
fn excluded_rows(tau: &Axis, breakpoints: &[f64], buffer: usize) -> Vec<bool> {
    let nt = tau.len();
    let mut excluded = vec![false; nt];
    for &b in breakpoints {
        if b < tau.values[0] || b > tau.values[nt - 1] {
            continue;
        }
        if let Some(kb) = tau.nearest(b) {
            let lo = kb.saturating_sub(buffer);
            let hi = (kb + buffer).min(nt - 1);
            excluded[lo..=hi].iter_mut().for_each(|e| *e = true);
        }
    }
    excluded
}

/// Adds the residuals of local rows `field_rows`/`atom_rows` of `solution`
/// to `report`; `excluded` is indexed by local row, `offset` maps local rows
/// to the reported τ index.
fn accumulate_residual(
    solution: &GridSolution,
    medium: &MediumConfig,
    excluded: &[bool],
    field_rows: std::ops::Range<usize>,
    atom_rows: std::ops::Range<usize>,
    offset: usize,
    report: &mut ResidualReport,
) {
    let nz = solution.zeta.len();
    for k in field_rows {
        if excluded[k] {
            continue;
        }
        for j in 1..nz - 1 {
            let hz = solution.zeta.values[j + 1] - solution.zeta.values[j - 1];
            let df = (solution.field(k, j + 1) - solution.field(k, j - 1)) * (1.0 / hz);
            let (ra, rb) = field_derivative(solution.rho(k, j), medium);
            let r = (df.omega_a - ra).norm().max((df.omega_b - rb).norm());
            if r > report.field {
                report.field = r;
                report.field_at = (k + offset, j);
            }
        }
    }
    for k in atom_rows {
        if excluded[k] {
            continue;
        }
        let ht = solution.tau.values[k + 1] - solution.tau.values[k - 1];
        for j in 0..nz {
            let drho = (solution.rho(k + 1, j).0 - solution.rho(k - 1, j).0) / Complex64::new(ht, 0.0);
            let rhs = commutator(&atomic_generator(&solution.field(k, j), medium.delta), &solution.rho(k, j).0) * I;
            let r = max_abs(&(drho - rhs));
            if r > report.atom {
                report.atom = r;
                report.atom_at = (k + offset, j);
            }
        }
    }
}

/// τ rows per block of [`exact_residual`].
const RESIDUAL_BLOCK: usize = 64;

/// Residuals of the exact solution on the grid of `spec`, as
/// [`residual_norm`] on the sampled grid would give, evaluated in blocks of
/// τ rows so that fine grids are never stored whole.
pub fn exact_residual(solution: &ExactSolution, spec: &GridSpec) -> Result<ResidualReport> {
    let scenario = solution.scenario();
    let (tau, zeta) = spec.axes(&scenario.schedule.breakpoints())?;
    let (nt, nz) = (tau.len(), zeta.len());
    if nt < 3 || nz < 3 {
        return Err(Error::Grid(format!("residual needs >= 3 nodes per axis, got {nt} x {nz}")));
    }
    let excluded = excluded_rows(&tau, &scenario.schedule.breakpoints(), BOUNDARY_BUFFER);
    let empty = ResidualReport {
        field: 0.0,
        atom: 0.0,
        field_at: (0, 0),
        atom_at: (0, 0),
        excluded_tau_nodes: excluded.iter().filter(|e| **e).count(),
    };
    let blocks: Vec<usize> = (0..nt).step_by(RESIDUAL_BLOCK).collect();
    let reports = blocks
        .par_iter()
        .map(|&a| {
            let b = (a + RESIDUAL_BLOCK).min(nt);
            let lo = a.saturating_sub(1);
            let hi = (b + 1).min(nt);
            let mut fields = Vec::with_capacity((hi - lo) * nz);
            let mut rho = Vec::with_capacity((hi - lo) * nz);
            for &t in &tau.values[lo..hi] {
                let sd = solution.spectral(t)?;
                for &z in &zeta.values {
                    fields.push(solution.fields_from(z, &sd));
                    rho.push(solution.atomic_state_from(z, &sd).density_matrix());
                }
            }
            let rows = Axis { start: tau.values[lo], step: tau.step, values: tau.values[lo..hi].to_vec() };
            let block = GridSolution { provenance: Provenance::Analytic, tau: rows, zeta: zeta.clone(), fields, rho };
            let mut report = empty;
            let atom_rows = a.max(1) - lo..b.min(nt - 1) - lo;
            accumulate_residual(
                &block,
                &scenario.medium,
                &excluded[lo..hi],
                a - lo..b - lo,
                atom_rows,
                lo,
                &mut report,
            );
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reports.into_iter().fold(empty, |acc, r| ResidualReport {
        field: acc.field.max(r.field),
        field_at: if r.field > acc.field { r.field_at } else { acc.field_at },
        atom: acc.atom.max(r.atom),
        atom_at: if r.atom > acc.atom { r.atom_at } else { acc.atom_at },
        ..acc
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceVerdict {
    Pass,
    Fail,
    /// Errors did not decrease monotonically.
    Inconclusive,
}

/// Richardson-style order estimate from errors at steps h, h/r, h/r².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub errors: [f64; 3],
    pub orders: [f64; 2],
    pub verdict: ConvergenceVerdict,
}

impl ConvergenceReport {
    pub fn min_order(&self) -> f64 {
        self.orders[0].min(self.orders[1])
    }

    /// Error reduction factors e(h)/e(h/r) and e(h/r)/e(h/r²).
    pub fn ratios(&self) -> [f64; 2] {
        [self.errors[0] / self.errors[1], self.errors[1] / self.errors[2]]
    }
}

/// Minimum order for a convergence study to pass.
pub const REQUIRED_ORDER: f64 = 1.8;

pub fn convergence_order(errors: [f64; 3], refinement: f64) -> ConvergenceReport {
    let lr = refinement.ln();
    let orders = [(errors[0] / errors[1]).ln() / lr, (errors[1] / errors[2]).ln() / lr];
    let monotone = errors.iter().all(|e| e.is_finite() && *e > 0.0) && errors[0] > errors[1] && errors[1] > errors[2];
    let verdict = if !monotone {
        ConvergenceVerdict::Inconclusive
    } else if orders.iter().all(|p| *p >= REQUIRED_ORDER) {
        ConvergenceVerdict::Pass
    } else {
        ConvergenceVerdict::Fail
    };
    ConvergenceReport { errors, orders, verdict }
}
