//! Peak tracking along τ and straight-line velocity fits.

use std::fmt;
use std::str::FromStr;

use slowlight_core::grid::GridSolution;
use slowlight_core::Error as CoreError;

use crate::error::{CliError, Result};

/// Values below this are treated as "no peak".
pub const NOISE_FLOOR: f64 = 1e-6;

/// Minimum samples for [`estimate_velocity`].
pub const MIN_FIT_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// |Ω_a|², the field trail.
    FieldIntensity,
    /// ρ₂₂, the stored polarization.
    Rho22,
    /// ρ₃₃, the excited-level population.
    Rho33,
}

impl Observable {
    pub fn at(self, sol: &GridSolution, k: usize, j: usize) -> f64 {
        match self {
            Observable::FieldIntensity => sol.field(k, j).omega_a.norm_sqr(),
            Observable::Rho22 => sol.rho(k, j).populations()[1],
            Observable::Rho33 => sol.rho(k, j).populations()[2],
        }
    }

    pub fn column_name(self) -> &'static str {
        match self {
            Observable::FieldIntensity => "omega_a_sq[MHz^2]",
            Observable::Rho22 => "rho22",
            Observable::Rho33 => "rho33",
        }
    }
}

impl FromStr for Observable {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fields" | "omega_a2" => Ok(Observable::FieldIntensity),
            "rho22" => Ok(Observable::Rho22),
            "rho33" => Ok(Observable::Rho33),
            other => Err(CliError::UnknownObservable(other.to_string())),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observable::FieldIntensity => "fields",
            Observable::Rho22 => "rho22",
            Observable::Rho33 => "rho33",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSample {
    pub tau: f64,
    pub zeta_peak: f64,
    pub value: f64,
}

/// Position and height of the maximum of `values` sampled at `start + j·step`,
/// refined by a parabola through the three nodes around the discrete argmax.
pub fn refine_peak(values: &[f64], start: f64, step: f64) -> (f64, f64) {
    let (j, &ymax) = values
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |best, (j, v)| if *v > *best.1 { (j, v) } else { best });
    if j == 0 || j + 1 == values.len() {
        return (start + j as f64 * step, ymax);
    }
    let (ym, yp) = (values[j - 1], values[j + 1]);
    let curvature = ym - 2.0 * ymax + yp;
    if curvature >= 0.0 {
        return (start + j as f64 * step, ymax);
    }
    let offset = 0.5 * (ym - yp) / curvature;
    (start + (j as f64 + offset) * step, ymax - 0.25 * (ym - yp) * offset)
}

pub fn track_peak(sol: &GridSolution, observable: Observable) -> Result<Vec<TrackSample>> {
    track_peak_with_floor(sol, observable, NOISE_FLOOR)
}

/// Per-τ peak of `observable` over ζ. Columns whose maximum is below
/// `floor` are left out, so the result may be empty.
pub fn track_peak_with_floor(sol: &GridSolution, observable: Observable, floor: f64) -> Result<Vec<TrackSample>> {
    let (nt, nz) = sol.dims();
    if nz < 3 {
        return Err(CoreError::Grid(format!("peak tracking needs >= 3 zeta nodes, got {nz}")).into());
    }
    let mut column = vec![0.0; nz];
    let mut out = Vec::new();
    for k in 0..nt {
        for (j, v) in column.iter_mut().enumerate() {
            *v = observable.at(sol, k, j);
        }
        let (zeta_peak, value) = refine_peak(&column, sol.zeta.values[0], sol.zeta.step);
        if value < floor {
            continue;
        }
        let last = sol.zeta.values[nz - 1];
        out.push(TrackSample { tau: sol.tau.values[k], zeta_peak: zeta_peak.clamp(sol.zeta.values[0], last), value });
    }
    Ok(out)
}

/// Least-squares line ζ = slope·τ + intercept over a τ-window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityFit {
    pub window: (f64, f64),
    pub slope: f64,
    pub intercept: f64,
    pub rms: f64,
    pub samples: usize,
}

impl fmt::Display for VelocityFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tau in [{}, {}]: slope {:.6}, intercept {:.6}, rms {:.3e} ({} samples)",
            self.window.0, self.window.1, self.slope, self.intercept, self.rms, self.samples
        )
    }
}

pub fn estimate_velocity(track: &[TrackSample], window: (f64, f64)) -> Result<VelocityFit> {
    let pts: Vec<(f64, f64)> =
        track.iter().filter(|s| s.tau >= window.0 && s.tau <= window.1).map(|s| (s.tau, s.zeta_peak)).collect();
    let n = pts.len();
    if n < MIN_FIT_SAMPLES {
        return Err(CliError::InsufficientData { from: window.0, to: window.1, got: n });
    }
    let nf = n as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_z = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let stt: f64 = pts.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let stz: f64 = pts.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_z)).sum();
    let slope = stz / stt;
    let intercept = mean_z - slope * mean_t;
    let rms = (pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum::<f64>() / nf).sqrt();
    Ok(VelocityFit { window, slope, intercept, rms, samples: n })
}
