//! Uniform (ζ, τ) grids and sampled solutions.

use rayon::prelude::*;

use crate::analytic::ExactSolution;
use crate::error::{Error, Result};
use crate::state::{DensityMatrix, FieldState};

/// Default cap on the number of nodes a single grid may hold.
pub const DEFAULT_MAX_NODES: usize = 4_000_000;

/// Uniform axis. Nodes lying within 1e-9 of a step from a snap point are
/// moved onto it exactly, so region boundaries fall on nodes when the step
/// divides them.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn uniform(min: f64, max: f64, step: f64, snap: &[f64]) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Grid(format!("step must be positive, got {step}")));
        }
        if !(max >= min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::Grid(format!("empty range [{min}, {max}]")));
        }
        let n = ((max - min) / step + 1e-9).floor() as usize + 1;
        let values = (0..n)
            .map(|k| {
                let v = min + k as f64 * step;
                snap.iter().copied().find(|s| (v - s).abs() < 1e-9 * step).unwrap_or(v)
            })
            .collect();
        Ok(Self { start: min, step, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the node nearest to `x`, if `x` lies within the axis.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        let last = *self.values.last()?;
        if x < self.start - 0.5 * self.step || x > last + 0.5 * self.step {
            return None;
        }
        Some((((x - self.start) / self.step).round().max(0.0) as usize).min(self.len() - 1))
    }
}

/// Window and resolution of a (ζ, τ) grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_step: f64,
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub zeta_step: f64,
}

impl GridSpec {
    /// Window used to reproduce the write/store/read figures: τ ∈ [−3, 8]
    /// at step 0.01, ζ ∈ [0, 12) with 600 samples.
    pub fn figure_window() -> Self {
        Self { tau_min: -3.0, tau_max: 8.0, tau_step: 0.01, zeta_min: 0.0, zeta_max: 11.98, zeta_step: 0.02 }
    }

    pub fn single_point(zeta: f64, tau: f64) -> Self {
        Self { tau_min: tau, tau_max: tau, tau_step: 1.0, zeta_min: zeta, zeta_max: zeta, zeta_step: 1.0 }
    }

    pub fn axes(&self, tau_snap: &[f64]) -> Result<(Axis, Axis)> {
        Ok((
            Axis::uniform(self.tau_min, self.tau_max, self.tau_step, tau_snap)?,
            Axis::uniform(self.zeta_min, self.zeta_max, self.zeta_step, &[])?,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Numeric,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::Analytic => "analytic",
            Provenance::Numeric => "numeric",
        })
    }
}

/// Fields and density matrices sampled on a (ζ, τ) grid, stored τ-major:
/// node (k, j) at τ = tau[k], ζ = zeta[j].
#[derive(Debug, Clone)]
pub struct GridSolution {
    pub provenance: Provenance,
    pub tau: Axis,
    pub zeta: Axis,
    pub fields: Vec<FieldState>,
    pub rho: Vec<DensityMatrix>,
}

impl GridSolution {
    pub fn index(&self, k_tau: usize, j_zeta: usize) -> usize {
        k_tau * self.zeta.len() + j_zeta
    }

    pub fn field(&self, k_tau: usize, j_zeta: usize) -> FieldState {
        self.fields[self.index(k_tau, j_zeta)]
    }

    pub fn rho(&self, k_tau: usize, j_zeta: usize) -> &DensityMatrix {
        &self.rho[self.index(k_tau, j_zeta)]
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.tau.len(), self.zeta.len())
    }

    /// Same axes (node count and positions to 1e-12).
    pub fn same_grid(&self, other: &GridSolution) -> bool {
        let eq = |a: &Axis, b: &Axis| {
            a.len() == b.len() && a.values.iter().zip(&b.values).all(|(x, y)| (x - y).abs() <= 1e-12)
        };
        eq(&self.tau, &other.tau) && eq(&self.zeta, &other.zeta)
    }
}

fn check_cap(nt: usize, nz: usize, cap: usize) -> Result<()> {
    let nodes = nt.saturating_mul(nz);
    if nodes > cap {
        return Err(Error::Resource { nodes, cap });
    }
    Ok(())
}

/// Samples the exact solution on a grid. Spectral data are computed once per
/// τ-column; columns are evaluated in parallel.
pub fn grid_evaluate(solution: &ExactSolution, spec: &GridSpec, max_nodes: usize) -> Result<GridSolution> {
    let (tau, zeta) = spec.axes(&solution.scenario().schedule.breakpoints())?;
    check_cap(tau.len(), zeta.len(), max_nodes)?;

    let columns: Vec<Vec<(FieldState, DensityMatrix)>> = tau
        .values
        .par_iter()
        .map(|&t| {
            let sd = solution.spectral(t)?;
            Ok(zeta
                .values
                .iter()
                .map(|&z| (solution.fields_from(z, &sd), solution.atomic_state_from(z, &sd).density_matrix()))
                .collect())
        })
        .collect::<Result<_>>()?;

    let (fields, rho) = columns.into_iter().flatten().unzip();
    Ok(GridSolution { provenance: Provenance::Analytic, tau, zeta, fields, rho })
}
