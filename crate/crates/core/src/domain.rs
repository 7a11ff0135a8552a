//! Physical parameters, the four-region time partition and the control
//! schedule Ω(τ).
//!
//! Everything is dimensionless: τ in units of the pulse length (1 μs),
//! Rabi frequencies in MHz, ζ in units of 1e-13 s.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result, ValidationError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumConfig {
    pub nu0: f64,
    pub delta: f64,
}

impl Default for MediumConfig {
    fn default() -> Self {
        Self { nu0: 4.5, delta: 0.0 }
    }
}

/// Background field switched off exponentially at τ = 0, cut to zero at
/// `t1` and switched back on at `t_revive`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSchedule {
    pub omega0: f64,
    pub alpha: f64,
    pub t1: f64,
    pub t_revive: f64,
}

impl ControlSchedule {
    /// Schedule with the default cut `t1 = 4/alpha` and a storage delay of 3.
    pub fn with_decay(omega0: f64, alpha: f64) -> Self {
        let t1 = 4.0 / alpha;
        Self { omega0, alpha, t1, t_revive: t1 + 3.0 }
    }

    /// Region boundaries 0, T₁, T in increasing order.
    pub fn breakpoints(&self) -> [f64; 3] {
        [0.0, self.t1, self.t_revive]
    }
}

impl Default for ControlSchedule {
    fn default() -> Self {
        Self::with_decay(3.0, 4.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonConfig {
    pub lambda: Complex64,
    pub phi0: f64,
    pub theta0: f64,
}

impl Default for SolitonConfig {
    fn default() -> Self {
        Self { lambda: Complex64::new(0.0, -4.1), phi0: 0.0, theta0: 0.0 }
    }
}

/// Complete parameter set of one write/store/read run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scenario {
    pub medium: MediumConfig,
    pub schedule: ControlSchedule,
    pub soliton: SolitonConfig,
}

impl Scenario {
    /// Bessel index γ = (α + iλ)/(2α).
    pub fn gamma(&self) -> Complex64 {
        let alpha = self.schedule.alpha;
        (alpha + Complex64::i() * self.soliton.lambda) / (2.0 * alpha)
    }

    pub fn validate(self) -> Result<ValidatedScenario, ValidationError> {
        validate_config(self.medium, self.schedule, self.soliton)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    D0,
    D1,
    D2,
    D3,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::D0, Region::D1, Region::D2, Region::D3];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.index())
    }
}

/// Region containing τ. Each boundary belongs to the earlier region:
/// (−∞,0], (0,T₁], (T₁,T], (T,∞).
pub fn region_of(tau: f64, schedule: &ControlSchedule) -> Region {
    if tau <= 0.0 {
        Region::D0
    } else if tau <= schedule.t1 {
        Region::D1
    } else if tau <= schedule.t_revive {
        Region::D2
    } else {
        Region::D3
    }
}

/// Region containing the open interval (τ, τ+ε) for small ε, i.e. the
/// region whose formulas give right-hand limits at a boundary.
pub fn region_right_of(tau: f64, schedule: &ControlSchedule) -> Region {
    if tau < 0.0 {
        Region::D0
    } else if tau < schedule.t1 {
        Region::D1
    } else if tau < schedule.t_revive {
        Region::D2
    } else {
        Region::D3
    }
}

/// Ω(τ) evaluated with the formula of `region`.
pub fn background_in_region(tau: f64, region: Region, schedule: &ControlSchedule) -> f64 {
    match region {
        Region::D0 | Region::D3 => schedule.omega0,
        Region::D1 => schedule.omega0 * (-schedule.alpha * tau).exp(),
        Region::D2 => 0.0,
    }
}

/// Control field Ω(τ) at the medium entrance.
pub fn background_field(tau: f64, schedule: &ControlSchedule) -> f64 {
    background_in_region(tau, region_of(tau, schedule), schedule)
}

/// Non-fatal remarks about a configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigWarning {
    /// ν₀ differs from Ω₀²/2, the normalization the units assume.
    CouplingNotNormalized { nu0: f64, expected: f64 },
    /// Re γ ≤ 0: the stored-state data are not the τ → ∞ limit of the
    /// decay-region data.
    StorageNotLimit { gamma_re: f64 },
}

impl fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigWarning::CouplingNotNormalized { nu0, expected } => {
                write!(f, "nu0 = {nu0} differs from omega0^2/2 = {expected}; the dimensionless units assume equality")
            }
            ConfigWarning::StorageNotLimit { gamma_re } => {
                write!(f, "Re(gamma) = {gamma_re} <= 0: stored-state data are not the limit of the decay region")
            }
        }
    }
}

/// A scenario whose invariants have been checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedScenario {
    scenario: Scenario,
    warnings: Vec<ConfigWarning>,
}

impl ValidatedScenario {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn warnings(&self) -> &[ConfigWarning] {
        &self.warnings
    }
}

impl std::ops::Deref for ValidatedScenario {
    type Target = Scenario;

    fn deref(&self) -> &Scenario {
        &self.scenario
    }
}

pub fn validate_config(
    medium: MediumConfig,
    schedule: ControlSchedule,
    soliton: SolitonConfig,
) -> Result<ValidatedScenario, ValidationError> {
    let finite = [
        ("nu0", medium.nu0),
        ("delta", medium.delta),
        ("omega0", schedule.omega0),
        ("alpha", schedule.alpha),
        ("t1", schedule.t1),
        ("t_revive", schedule.t_revive),
        ("lambda", soliton.lambda.re),
        ("lambda", soliton.lambda.im),
        ("phi0", soliton.phi0),
        ("theta0", soliton.theta0),
    ];
    if let Some((name, _)) = finite.iter().find(|(_, v)| !v.is_finite()) {
        return Err(ValidationError::NotFinite(name));
    }
    if medium.nu0 <= 0.0 {
        return Err(ValidationError::CouplingNotPositive(medium.nu0));
    }
    if schedule.omega0 <= 0.0 {
        return Err(ValidationError::BackgroundNotPositive(schedule.omega0));
    }
    if schedule.alpha <= 0.0 {
        return Err(ValidationError::DecayNotPositive(schedule.alpha));
    }
    if !(schedule.t1 > 0.0 && schedule.t1 <= schedule.t_revive) {
        return Err(ValidationError::BadCutoff { t1: schedule.t1, t_revive: schedule.t_revive });
    }
    if soliton.lambda.im == 0.0 {
        return Err(ValidationError::SolitonAmplitudeZero);
    }
    if soliton.lambda == Complex64::new(medium.delta, 0.0) {
        return Err(ValidationError::LambdaEqualsDetuning);
    }

    let scenario = Scenario { medium, schedule, soliton };
    let gamma = scenario.gamma();
    if gamma.im.abs() < 1e-12 && (gamma.re - gamma.re.round()).abs() < 1e-12 {
        return Err(ValidationError::IntegerBesselIndex { re: gamma.re, im: gamma.im });
    }

    let mut warnings = Vec::new();
    let expected = 0.5 * schedule.omega0 * schedule.omega0;
    if (medium.nu0 - expected).abs() > 1e-12 * expected.max(1.0) {
        warnings.push(ConfigWarning::CouplingNotNormalized { nu0: medium.nu0, expected });
    }
    if gamma.re <= 0.0 {
        warnings.push(ConfigWarning::StorageNotLimit { gamma_re: gamma.re });
    }
    Ok(ValidatedScenario { scenario, warnings })
}

/// Keys accepted in a configuration file, in canonical order.
pub const CONFIG_KEYS: [&str; 9] = ["nu0", "delta", "omega0", "alpha", "t1", "t_revive", "lambda", "phi0", "theta0"];

/// Result of reading a `key = value` configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub scenario: Scenario,
    /// Keys that were absent and took their default value.
    pub defaulted: Vec<&'static str>,
}

/// Parses the plain-text configuration format: one `key = value` per line,
/// `#` starts a comment, complex numbers written as `a+bi`.
///
/// `t1` defaults to `4/alpha` and `t_revive` to `t1 + 3`, using whatever
/// `alpha`/`t1` the file sets.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let mut values: [Option<(usize, &str)>; 9] = [None; 9];
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: line_no, msg: format!("expected key=value, got '{line}'") })?;
        let key = key.trim();
        let slot = CONFIG_KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| Error::Parse { line: line_no, msg: format!("unknown key '{key}'") })?;
        if values[slot].is_some() {
            return Err(Error::Parse { line: line_no, msg: format!("duplicate key '{key}'") });
        }
        values[slot] = Some((line_no, value.trim()));
    }

    let real = |slot: usize| -> Result<Option<f64>> {
        values[slot]
            .map(|(line, v)| {
                v.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("{} = '{v}' is not a real number", CONFIG_KEYS[slot]),
                })
            })
            .transpose()
    };

    let medium_d = MediumConfig::default();
    let soliton_d = SolitonConfig::default();
    let schedule_d = ControlSchedule::default();

    let nu0 = real(0)?.unwrap_or(medium_d.nu0);
    let delta = real(1)?.unwrap_or(medium_d.delta);
    let omega0 = real(2)?.unwrap_or(schedule_d.omega0);
    let alpha = real(3)?.unwrap_or(schedule_d.alpha);
    let t1 = real(4)?.unwrap_or(4.0 / alpha);
    let t_revive = real(5)?.unwrap_or(t1 + 3.0);
    let lambda = match values[6] {
        Some((line, v)) => parse_complex(v).ok_or_else(|| Error::Parse {
            line,
            msg: format!("lambda = '{v}' is not a complex number of the form a+bi"),
        })?,
        None => soliton_d.lambda,
    };
    let phi0 = real(7)?.unwrap_or(soliton_d.phi0);
    let theta0 = real(8)?.unwrap_or(soliton_d.theta0);

    let defaulted = CONFIG_KEYS.iter().zip(values.iter()).filter(|(_, v)| v.is_none()).map(|(k, _)| *k).collect();

    Ok(ParsedConfig {
        scenario: Scenario {
            medium: MediumConfig { nu0, delta },
            schedule: ControlSchedule { omega0, alpha, t1, t_revive },
            soliton: SolitonConfig { lambda, phi0, theta0 },
        },
        defaulted,
    })
}

/// Writes a scenario in the configuration-file format.
pub fn format_config(s: &Scenario) -> String {
    format!(
        "nu0 = {}\ndelta = {}\nomega0 = {}\nalpha = {}\nt1 = {}\nt_revive = {}\nlambda = {}\nphi0 = {}\ntheta0 = {}\n",
        s.medium.nu0,
        s.medium.delta,
        s.schedule.omega0,
        s.schedule.alpha,
        s.schedule.t1,
        s.schedule.t_revive,
        format_complex(s.soliton.lambda),
        s.soliton.phi0,
        s.soliton.theta0,
    )
}

pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (also `i`, `-i`, exponents allowed).
pub fn parse_complex(text: &str) -> Option<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    // Split at the last sign that is not leading and not part of an exponent.
    let bytes = body.as_bytes();
    let split =
        (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_part.is_empty() { 0.0 } else { re_part.parse::<f64>().ok()? };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().ok()?,
    };
    Some(Complex64::new(re, im))
}
