//! Plain-text run report.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use slowlight_core::domain::{format_config, Region, Scenario};
use slowlight_core::grid::GridSpec;
use slowlight_core::integrator::ResidualReport;

use crate::compare::Comparison;
use crate::track::VelocityFit;

/// SHA-256 of the canonical configuration text.
pub fn config_hash(scenario: &Scenario) -> String {
    Sha256::digest(format_config(scenario).as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub command: String,
    pub scenario: Scenario,
    pub grid: Option<GridSpec>,
    /// Integrator steps (h_τ, h_ζ) when the run involved the integrator.
    pub scheme: Option<(f64, f64)>,
    pub notes: Vec<String>,
    pub velocities: Vec<(String, VelocityFit)>,
    pub residuals: Vec<(String, ResidualReport)>,
    pub comparisons: Vec<(String, Comparison)>,
    pub checks: Vec<Check>,
}

impl ScenarioReport {
    pub fn new(command: &str, scenario: Scenario) -> Self {
        Self {
            command: command.to_string(),
            scenario,
            grid: None,
            scheme: None,
            notes: Vec::new(),
            velocities: Vec::new(),
            residuals: Vec::new(),
            comparisons: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "slowlight {} report", self.command);
        let _ = writeln!(s, "version {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "config sha256 {}", config_hash(&self.scenario));
        s.push_str("\n[config]\n");
        s.push_str(&format_config(&self.scenario));
        if let Some(g) = &self.grid {
            s.push_str("\n[grid]\n");
            let _ = writeln!(s, "tau  [{}, {}] step {}", g.tau_min, g.tau_max, g.tau_step);
            let _ = writeln!(s, "zeta [{}, {}] step {}", g.zeta_min, g.zeta_max, g.zeta_step);
        }
        if let Some((ht, hz)) = self.scheme {
            let _ = writeln!(s, "scheme h_tau {ht} h_zeta {hz} (Heun, 1 corrector)");
        }
        if !self.notes.is_empty() {
            s.push_str("\n[notes]\n");
            for n in &self.notes {
                let _ = writeln!(s, "{n}");
            }
        }
        if !self.velocities.is_empty() {
            s.push_str("\n[velocities]\n");
            for (name, fit) in &self.velocities {
                let _ = writeln!(s, "{name}: {fit}");
            }
        }
        if !self.residuals.is_empty() {
            s.push_str("\n[residuals]\n");
            for (name, r) in &self.residuals {
                let _ = writeln!(
                    s,
                    "{name}: field {:.4e}, atom {:.4e} ({} tau nodes excluded)",
                    r.field, r.atom, r.excluded_tau_nodes
                );
            }
        }
        if !self.comparisons.is_empty() {
            s.push_str("\n[comparisons]\n");
            for (name, c) in &self.comparisons {
                let _ = writeln!(s, "{name} (T1 buffer {} nodes): {}", c.buffer, c.overall);
                for r in Region::ALL {
                    let _ = writeln!(s, "  {r}: {}", c.region(r));
                }
            }
        }
        if !self.checks.is_empty() {
            s.push_str("\n[checks]\n");
            for c in &self.checks {
                let _ = writeln!(s, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let _ = writeln!(s, "\noverall {}", if self.passed() { "PASS" } else { "FAIL" });
        }
        s
    }
}
