//! Difference norms between two solutions on the same grid.

use std::fmt;

use slowlight_core::domain::{region_of, ControlSchedule, Region};
use slowlight_core::grid::GridSolution;
use slowlight_core::integrator::BOUNDARY_BUFFER;

use crate::error::{CliError, Result};

/// L∞ and RMS differences of the fields (max of both channels) and the
/// level populations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Norms {
    pub field_linf: f64,
    pub field_l2: f64,
    pub population_linf: f64,
    pub population_l2: f64,
    pub nodes: usize,
}

impl Norms {
    fn add(&mut self, field: f64, field_sq: f64, pop: f64, pop_sq: f64) {
        self.field_linf = self.field_linf.max(field);
        self.field_l2 += field_sq;
        self.population_linf = self.population_linf.max(pop);
        self.population_l2 += pop_sq;
        self.nodes += 1;
    }

    fn finish(&mut self) {
        if self.nodes > 0 {
            self.field_l2 = (self.field_l2 / self.nodes as f64).sqrt();
            self.population_l2 = (self.population_l2 / self.nodes as f64).sqrt();
        }
    }
}

impl fmt::Display for Norms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "field Linf {:.3e} L2 {:.3e}, population Linf {:.3e} L2 {:.3e} ({} nodes)",
            self.field_linf, self.field_l2, self.population_linf, self.population_l2, self.nodes
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub overall: Norms,
    pub regions: [Norms; 4],
    /// τ nodes skipped on each side of T₁.
    pub buffer: usize,
}

impl Comparison {
    pub fn region(&self, r: Region) -> &Norms {
        &self.regions[r.index()]
    }
}

/// Norms of `numeric − analytic`, overall and per region, skipping
/// [`BOUNDARY_BUFFER`] τ nodes around T₁.
pub fn compare(numeric: &GridSolution, analytic: &GridSolution, schedule: &ControlSchedule) -> Result<Comparison> {
    if !numeric.same_grid(analytic) {
        return Err(CliError::GridMismatch { numeric: numeric.dims(), analytic: analytic.dims() });
    }
    let (nt, nz) = numeric.dims();
    let cut = numeric
        .tau
        .nearest(schedule.t1)
        .filter(|_| schedule.t1 >= numeric.tau.values[0] && schedule.t1 <= numeric.tau.values[nt - 1]);
    let mut overall = Norms::default();
    let mut regions = [Norms::default(); 4];
    for k in 0..nt {
        if cut.is_some_and(|kc| k.abs_diff(kc) <= BOUNDARY_BUFFER) {
            continue;
        }
        let region = region_of(numeric.tau.values[k], schedule);
        for j in 0..nz {
            let (a, b) = (numeric.field(k, j), analytic.field(k, j));
            let da = (a.omega_a - b.omega_a).norm();
            let db = (a.omega_b - b.omega_b).norm();
            let (pa, pb) = (numeric.rho(k, j).populations(), analytic.rho(k, j).populations());
            let dp: Vec<f64> = (0..3).map(|i| (pa[i] - pb[i]).abs()).collect();
            let pop = dp.iter().copied().fold(0.0, f64::max);
            let pop_sq = dp.iter().map(|d| d * d).sum();
            overall.add(da.max(db), da * da + db * db, pop, pop_sq);
            regions[region.index()].add(da.max(db), da * da + db * db, pop, pop_sq);
        }
    }
    overall.finish();
    regions.iter_mut().for_each(Norms::finish);
    Ok(Comparison { overall, regions, buffer: BOUNDARY_BUFFER })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use slowlight_core::analytic::ExactSolution;
    use slowlight_core::domain::Scenario;
    use slowlight_core::grid::{grid_evaluate, GridSpec};

    fn grid(spec: &GridSpec) -> GridSolution {
        let e = ExactSolution::new(&Scenario::default().validate().unwrap()).unwrap();
        grid_evaluate(&e, spec, usize::MAX).unwrap()
    }

    fn spec() -> GridSpec {
        GridSpec { tau_min: -1.0, tau_max: 5.0, tau_step: 0.1, zeta_min: 0.0, zeta_max: 1.0, zeta_step: 0.25 }
    }

    #[test]
    fn identical_inputs_give_zero() {
        let g = grid(&spec());
        let c = compare(&g, &g, &Scenario::default().schedule).unwrap();
        assert_eq!(c.overall.field_linf, 0.0);
        assert_eq!(c.overall.population_l2, 0.0);
        // 61 τ nodes minus the 7 around T₁, 5 ζ nodes each.
        assert_eq!(c.overall.nodes, 54 * 5);
        assert_eq!(c.regions.iter().map(|r| r.nodes).sum::<usize>(), c.overall.nodes);
    }

    #[test]
    fn perturbation_lands_in_its_region() {
        let g = grid(&spec());
        let mut h = g.clone();
        let k = h.tau.nearest(2.5).unwrap();
        let idx = h.index(k, 2);
        h.fields[idx].omega_b += Complex64::new(0.0, 1e-3);
        let c = compare(&h, &g, &Scenario::default().schedule).unwrap();
        assert!((c.overall.field_linf - 1e-3).abs() < 1e-15);
        assert!((c.region(Region::D2).field_linf - 1e-3).abs() < 1e-15);
        assert_eq!(c.region(Region::D0).field_linf, 0.0);
    }

    #[test]
    fn different_grids_are_rejected() {
        let mut other = spec();
        other.zeta_step = 0.5;
        let err = compare(&grid(&spec()), &grid(&other), &Scenario::default().schedule).unwrap_err();
        assert!(matches!(err, CliError::GridMismatch { .. }));
    }
}
