//! Exact one-soliton solution on the switched control background.
//!
//! The spectral data (w, z) are piecewise in τ, one closed form per region
//! D0..D3. Fields and the atomic state at (ζ, τ) follow from (w, z) and the
//! phases φ̃ₛ, θ̃ₛ.
//!
//! Two evaluations differ from the direct closed forms while
//! being algebraically identical:
//!
//! * In D1, z = −αγτ + ln[(C J₋γ(x) + J_γ(x)) / (same at τ=0)] is computed as
//!   ln[A(τ)/A(0)] with A = C S₋γ(x) + (x/2)^{2γ} S_γ(x), where S_ν is the
//!   entire part of J_ν. The linear term cancels exactly against the
//!   principal-branch prefactor (x/2)^{−γ}.
//! * In D3, the exponentials and the tangent are rewritten in terms of
//!   q = e^{is(τ−T)} (or 1/q, whichever is bounded) so nothing overflows at
//!   late times.
//!
//! Logarithms are continued along τ from the left end of their region, so
//! Im z has no 2π jumps.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::{background_in_region, region_of, region_right_of, Region, Scenario, ValidatedScenario};
use crate::error::{Error, Result};
use crate::special::{bessel_j, bessel_j_entire, complex_pow_principal, gamma_reciprocal, principal_ln};
use crate::state::{AtomState, DensityMatrix, FieldState};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// s = √(λ² + Ω₀²) on the branch with Im(s)·Im(λ) > 0, i.e. the branch
/// that tends to λ as Ω₀ → 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedRoot(pub Complex64);

impl BranchedRoot {
    pub fn value(self) -> Complex64 {
        self.0
    }
}

pub fn branched_root(lambda: Complex64, omega0: f64) -> Result<BranchedRoot> {
    if lambda.im == 0.0 {
        return Err(Error::Domain("branched_root needs Im(lambda) != 0"));
    }
    let mut s = (lambda * lambda + omega0 * omega0).sqrt();
    if s.im * lambda.im < 0.0 {
        s = -s;
    } else if s.im == 0.0 && s.re < 0.0 {
        // Real root (purely imaginary λ with |λ| < Ω₀): take Re s > 0.
        s = -s;
    }
    Ok(BranchedRoot(s))
}

/// Per-τ spectral data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralData {
    pub tau: f64,
    pub region: Region,
    pub w: Complex64,
    pub z: Complex64,
    /// Control field Ω(τ) of the same region.
    pub background: f64,
}

/// Precomputed constants of one exact solution.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    scenario: Scenario,
    root: Complex64,
    w0: Complex64,
    gamma: Complex64,
    c1: Complex64,
    c3: Complex64,
    z2: Complex64,
    /// A(0) of the regularized D1 logarithm.
    a0: Complex64,
    inv_lambda_delta: Complex64,
    abs_lambda_delta: f64,
}

impl ExactSolution {
    pub fn new(validated: &ValidatedScenario) -> Result<Self> {
        let scenario = *validated.scenario();
        let lambda = scenario.soliton.lambda;
        let omega0 = scenario.schedule.omega0;
        let alpha = scenario.schedule.alpha;
        let delta = scenario.medium.delta;

        let root = branched_root(lambda, omega0)?.value();
        let lambda_plus_root = lambda + root;
        if lambda_plus_root.norm() == 0.0 {
            return Err(Error::Degenerate("lambda + sqrt(lambda^2 + omega0^2) vanishes"));
        }
        let w0 = omega0 / lambda_plus_root;
        let gamma = scenario.gamma();
        let x0 = Complex64::new(-omega0 / (2.0 * alpha), 0.0);

        let j_g = bessel_j(gamma, x0)?;
        let j_mg = bessel_j(-gamma, x0)?;
        let j_gm1 = bessel_j(gamma - 1.0, x0)?;
        let j_1mg = bessel_j(1.0 - gamma, x0)?;
        let c1_den = j_1mg + I * w0 * j_mg;
        if c1_den.norm() == 0.0 || !c1_den.is_finite() {
            return Err(Error::Degenerate("denominator of the decay-region constant C vanishes"));
        }
        let c1 = (-I * w0 * j_g + j_gm1) / c1_den;

        let c3 = (omega0 * omega0 + 2.0 * lambda * (lambda - root)) / (omega0 * omega0);
        if (c3 + 1.0).norm() == 0.0 {
            return Err(Error::Degenerate("C3 + 1 vanishes"));
        }

        let a0 = regularized_d1(c1, gamma, x0)?;
        if a0.norm() == 0.0 {
            return Err(Error::Degenerate("decay-region normalizer vanishes"));
        }

        // Stored-state constant, literally as tabulated (principal branch).
        let d1_den0 = c1 * j_mg + j_g;
        if d1_den0.norm() == 0.0 {
            return Err(Error::Degenerate("log of zero in the stored-state constant"));
        }
        let quarter = Complex64::new(-omega0 / (4.0 * alpha), 0.0);
        let numer = c1 * complex_pow_principal(quarter, -gamma)? * gamma_reciprocal(1.0 - gamma);
        if numer.norm() == 0.0 {
            return Err(Error::Degenerate("log of zero in the stored-state constant"));
        }
        let mut z2 = principal_ln(numer / d1_den0);

        let inv_lambda_delta = 1.0 / (lambda - delta);
        let abs_lambda_delta = (lambda - delta).norm();

        let mut sol = Self { scenario, root, w0, gamma, c1, c3, z2, a0, inv_lambda_delta, abs_lambda_delta };

        // Put z₂ on the branch reached by continuing the D1 logarithm to τ → ∞.
        if gamma.re > 0.0 {
            let limit = sol.d1_log_limit()?;
            let k = ((limit.im - z2.im) / (2.0 * PI)).round();
            z2.im += 2.0 * PI * k;
            sol.z2 = z2;
        }
        Ok(sol)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn root(&self) -> Complex64 {
        self.root
    }

    /// w₀ = Ω₀ / (λ + s).
    pub fn w0(&self) -> Complex64 {
        self.w0
    }

    /// Bessel index γ = (α + iλ)/(2α).
    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    /// Constant z on D2.
    pub fn z2(&self) -> Complex64 {
        self.z2
    }

    pub fn spectral_constant(&self, region: Region) -> Complex64 {
        match region {
            Region::D0 => Complex64::new(0.0, 0.0),
            Region::D1 | Region::D2 => self.c1,
            Region::D3 => self.c3,
        }
    }

    /// Spectral data at τ using the region that owns τ.
    pub fn spectral(&self, tau: f64) -> Result<SpectralData> {
        self.spectral_in(tau, region_of(tau, &self.scenario.schedule))
    }

    /// Right-hand limit of the spectral data at τ (differs from
    /// [`Self::spectral`] only on a region boundary).
    pub fn spectral_right(&self, tau: f64) -> Result<SpectralData> {
        self.spectral_in(tau, region_right_of(tau, &self.scenario.schedule))
    }

    /// Spectral data at τ evaluated with the formulas of `region`.
    pub fn spectral_in(&self, tau: f64, region: Region) -> Result<SpectralData> {
        let (w, z) = match region {
            Region::D0 => (self.w0, 0.5 * I * self.scenario.schedule.omega0 * self.w0 * tau),
            Region::D1 => (self.w_decay(tau)?, self.z_decay(tau)?),
            Region::D2 => (Complex64::new(0.0, 0.0), self.z2),
            Region::D3 => (self.w_revived(tau)?, self.z_revived(tau)?),
        };
        Ok(SpectralData { tau, region, w, z, background: background_in_region(tau, region, &self.scenario.schedule) })
    }

    pub fn spectral_w(&self, tau: f64) -> Result<Complex64> {
        Ok(self.spectral(tau)?.w)
    }

    pub fn spectral_z(&self, tau: f64) -> Result<Complex64> {
        Ok(self.spectral(tau)?.z)
    }

    fn decay_argument(&self, tau: f64) -> Complex64 {
        let s = &self.scenario.schedule;
        Complex64::new(-s.omega0 * (-s.alpha * tau).exp() / (2.0 * s.alpha), 0.0)
    }

    fn w_decay(&self, tau: f64) -> Result<Complex64> {
        let x = self.decay_argument(tau);
        let g = self.gamma;
        let c = self.c1;
        let num = c * bessel_j(1.0 - g, x)? - bessel_j(g - 1.0, x)?;
        let den = c * bessel_j(-g, x)? + bessel_j(g, x)?;
        if den.norm() == 0.0 || !den.is_finite() {
            return Err(Error::Pole { tau });
        }
        Ok(I * num / den)
    }

    fn d1_ratio(&self, tau: f64) -> Result<Complex64> {
        Ok(regularized_d1(self.c1, self.gamma, self.decay_argument(tau))? / self.a0)
    }

    fn z_decay(&self, tau: f64) -> Result<Complex64> {
        let step = 0.25 / self.scenario.schedule.alpha;
        continuous_ln(|t| self.d1_ratio(t), 0.0, tau, step)
    }

    /// ln[A(∞)/A(0)] continued along τ, where A(∞) = C/Γ(1−γ).
    fn d1_log_limit(&self) -> Result<Complex64> {
        let alpha = self.scenario.schedule.alpha;
        let limit = self.c1 * gamma_reciprocal(1.0 - self.gamma) / self.a0;
        // March until the (x/2)^{2γ} part is negligible, then close the gap.
        let mut tau_far = 1.0 / alpha;
        for _ in 0..400 {
            let ratio = self.d1_ratio(tau_far)?;
            if (ratio - limit).norm() <= 1e-15 * limit.norm() {
                break;
            }
            tau_far += 1.0 / alpha;
        }
        let along = continuous_ln(|t| self.d1_ratio(t), 0.0, tau_far, 0.25 / alpha)?;
        let tail = principal_ln(limit / self.d1_ratio(tau_far)?);
        Ok(along + tail)
    }

    /// q = e^{is(τ−T)} and whether its reciprocal was taken to keep |q| ≤ 1.
    fn revival_phase(&self, tau: f64) -> (Complex64, bool) {
        let q = (I * self.root * (tau - self.scenario.schedule.t_revive)).exp();
        if q.norm() > 1.0 {
            (1.0 / q, true)
        } else {
            (q, false)
        }
    }

    fn w_revived(&self, tau: f64) -> Result<Complex64> {
        // Ω₀ tan(u) / (λ tan(u) − is), u = s(τ−T)/2, rewritten with q = e^{2iu}.
        let lambda = self.scenario.soliton.lambda;
        let omega0 = self.scenario.schedule.omega0;
        let (q, inverted) = self.revival_phase(tau);
        let (num, den) = if inverted {
            (omega0 * (ONE - q), lambda * (ONE - q) + self.root * (ONE + q))
        } else {
            (omega0 * (q - ONE), lambda * (q - ONE) + self.root * (q + ONE))
        };
        if den.norm() == 0.0 {
            return Err(Error::Pole { tau });
        }
        Ok(num / den)
    }

    fn z_revived(&self, tau: f64) -> Result<Complex64> {
        let lambda = self.scenario.soliton.lambda;
        let t_rev = self.scenario.schedule.t_revive;
        let dt = tau - t_rev;
        let c = self.c3;
        let s = self.root;
        // ln[(C e^{−i(λ+s)dt/2} + e^{−i(λ−s)dt/2}) / (C+1)]
        //   = −i(λ−s)dt/2 + ln[(1 + C e^{−is·dt}) / (1 + C)]
        let linear = -0.5 * I * (lambda - s) * dt;
        let bracket = |t: f64| -> Result<Complex64> { Ok((ONE + c * (-I * s * (t - t_rev)).exp()) / (ONE + c)) };
        let log = if c.norm() < 1.0 && s.im <= 0.0 {
            // 1 + C e^{−is·dt} stays in the right half-plane.
            principal_ln(ONE + c * (-I * s * dt).exp()) - principal_ln(ONE + c)
        } else {
            continuous_ln(bracket, t_rev, tau, 0.5 / s.norm().max(1e-3))?
        };
        Ok(linear + log + self.z2)
    }

    /// (φ̃ₛ, θ̃ₛ) from precomputed spectral data.
    pub fn phases_from(&self, zeta: f64, sd: &SpectralData) -> (f64, f64) {
        let sol = &self.scenario.soliton;
        let half_nu = 0.5 * self.scenario.medium.nu0 * zeta;
        let phi = sol.phi0 + half_nu * self.inv_lambda_delta.im + sd.z.re + 0.5 * sd.w.norm_sqr().ln_1p();
        let theta = sol.theta0 - half_nu * self.inv_lambda_delta.re + sd.z.im;
        (phi, theta)
    }

    pub fn soliton_phases(&self, zeta: f64, tau: f64) -> Result<(f64, f64)> {
        Ok(self.phases_from(zeta, &self.spectral(tau)?))
    }

    pub fn fields_from(&self, zeta: f64, sd: &SpectralData) -> FieldState {
        let lambda = self.scenario.soliton.lambda;
        let (phi, theta) = self.phases_from(zeta, sd);
        let sech = sech(phi);
        let w2 = sd.w.norm_sqr();
        let amp = lambda.conj() - lambda;
        let omega_a = amp * sd.w * Complex64::from_polar(sech, theta) / (1.0 + w2).sqrt();
        // e^φ sech φ = 2 / (1 + e^{−2φ})
        let e_sech = 2.0 / (1.0 + (-2.0 * phi).exp());
        let omega_b = -amp * sd.w * e_sech / (1.0 + w2) - sd.background;
        FieldState { omega_a, omega_b }
    }

    pub fn field_envelopes(&self, zeta: f64, tau: f64) -> Result<FieldState> {
        Ok(self.fields_from(zeta, &self.spectral(tau)?))
    }

    pub fn atomic_state_from(&self, zeta: f64, sd: &SpectralData) -> AtomState {
        let lambda = self.scenario.soliton.lambda;
        let delta = self.scenario.medium.delta;
        let norm = self.abs_lambda_delta;
        let (phi, theta) = self.phases_from(zeta, sd);
        let sech = sech(phi);
        let w2 = sd.w.norm_sqr();
        let amp = lambda.conj() - lambda;
        let c1 = Complex64::new(lambda.re - delta, -lambda.im * phi.tanh()) / norm;
        // |2⟩ amplitude with w cancelled, exact on D2 where w = 0.
        let c2 = amp * Complex64::from_polar(sech, theta) / (2.0 * norm * (1.0 + w2).sqrt());
        let omega_a = amp * sd.w * Complex64::from_polar(sech, theta) / (1.0 + w2).sqrt();
        let c3 = -omega_a / (2.0 * norm);
        AtomState { c1, c2, c3 }
    }

    pub fn atomic_state(&self, zeta: f64, tau: f64) -> Result<AtomState> {
        Ok(self.atomic_state_from(zeta, &self.spectral(tau)?))
    }

    pub fn density_matrix(&self, zeta: f64, tau: f64) -> Result<DensityMatrix> {
        Ok(self.atomic_state(zeta, tau)?.density_matrix())
    }

    /// dφ̃ₛ/dζ, the inverse spatial width of the soliton.
    pub fn phase_gradient_zeta(&self) -> f64 {
        0.5 * self.scenario.medium.nu0 * self.inv_lambda_delta.im
    }

    /// Position of the soliton centre (φ̃ₛ = 0) at τ.
    pub fn center_zeta(&self, tau: f64) -> Result<f64> {
        let sd = self.spectral(tau)?;
        let (phi_at_origin, _) = self.phases_from(0.0, &sd);
        Ok(-phi_at_origin / self.phase_gradient_zeta())
    }

    /// φ̃₀ that puts the soliton centre at ζ = 0 at time `tau`, all other
    /// parameters unchanged.
    pub fn entry_phase(&self, tau: f64) -> Result<f64> {
        let (phi, _) = self.phases_from(0.0, &self.spectral(tau)?);
        Ok(self.scenario.soliton.phi0 - phi)
    }

    /// dζ/dτ of the centre on D0, −Re((i/2)Ω₀w₀) / ((ν₀/2) Im(1/(λ−Δ))).
    pub fn d0_velocity(&self) -> f64 {
        let omega0 = self.scenario.schedule.omega0;
        -(0.5 * I * omega0 * self.w0).re / self.phase_gradient_zeta()
    }
}

fn sech(x: f64) -> f64 {
    // cosh overflows to inf for |x| > ~710, giving 0 as required.
    1.0 / x.cosh()
}

/// A(x) = C S₋γ(x) + (x/2)^{2γ} S_γ(x), so that
/// C J₋γ(x) + J_γ(x) = (x/2)^{−γ} A(x) on the principal branch.
fn regularized_d1(c: Complex64, gamma: Complex64, x: Complex64) -> Result<Complex64> {
    let lead = c * bessel_j_entire(-gamma, x)?;
    let pow = complex_pow_principal(0.5 * x, 2.0 * gamma)?;
    Ok(lead + pow * bessel_j_entire(gamma, x)?)
}

/// ln f(t1) on the branch obtained by continuing the principal ln f(t0)
/// along [t0, t1]. Intervals where the phase moves by more than π/2 are
/// bisected.
pub(crate) fn continuous_ln<F>(f: F, t0: f64, t1: f64, base_step: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let start = checked(f(t0)?)?;
    let mut acc = principal_ln(start);
    if t1 == t0 {
        return Ok(acc);
    }
    let n = ((t1 - t0).abs() / base_step).ceil().max(1.0) as usize;
    let (mut prev_t, mut prev) = (t0, start);
    for k in 1..=n {
        let t = if k == n { t1 } else { t0 + (t1 - t0) * k as f64 / n as f64 };
        let cur = checked(f(t)?)?;
        acc += ln_increment(&f, prev_t, prev, t, cur, 24)?;
        prev_t = t;
        prev = cur;
    }
    Ok(acc)
}

fn ln_increment<F>(f: &F, ta: f64, fa: Complex64, tb: f64, fb: Complex64, depth: u32) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let d = principal_ln(fb / fa);
    if d.im.abs() < 0.5 * PI || depth == 0 {
        return Ok(d);
    }
    let tm = 0.5 * (ta + tb);
    let fm = checked(f(tm)?)?;
    Ok(ln_increment(f, ta, fa, tm, fm, depth - 1)? + ln_increment(f, tm, fm, tb, fb, depth - 1)?)
}

fn checked(v: Complex64) -> Result<Complex64> {
    if v.norm() == 0.0 || !v.is_finite() {
        Err(Error::Degenerate("logarithm of zero or non-finite value"))
    } else {
        Ok(v)
    }
}
