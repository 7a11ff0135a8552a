//! Complex reciprocal gamma, principal powers and Bessel functions of the
//! first kind with complex order.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Maximum number of series terms before [`bessel_j`] gives up.
pub const BESSEL_MAX_TERMS: usize = 200;
const BESSEL_REL_TOL: f64 = 1e-17;

/// Principal logarithm with the imaginary part in (−π, π].
pub fn principal_ln(z: Complex64) -> Complex64 {
    let mut arg = z.im.atan2(z.re);
    if arg <= -PI {
        arg = PI;
    }
    Complex64::new(z.norm().ln(), arg)
}

/// `base^exponent = exp(exponent · Log base)` on the principal branch.
pub fn complex_pow_principal(base: Complex64, exponent: Complex64) -> Result<Complex64> {
    if base == Complex64::new(0.0, 0.0) {
        return if exponent.re > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(Error::Domain("zero base with non-positive real exponent"))
        };
    }
    Ok((exponent * principal_ln(base)).exp())
}

/// ln Γ(z) for Re z ≥ 1/2 (Lanczos, g = 7). The imaginary part is only
/// defined modulo 2π, which is all the callers need.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let x = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
}

/// 1/Γ(z). Entire; exactly zero at the non-positive integers.
pub fn gamma_reciprocal(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Complex64::new(0.0, 0.0);
    }
    if z.re >= 0.5 {
        return (-ln_gamma_right(z)).exp();
    }
    // Reflection: 1/Γ(z) = sin(πz) Γ(1−z) / π, with sin(πz) evaluated on the
    // offset from the nearest integer to keep relative accuracy near poles.
    let n = z.re.round();
    let sign = if (n as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let sin_pi_z = sign * (PI * (z - n)).sin();
    sin_pi_z * ln_gamma_right(1.0 - z).exp() / PI
}

/// Γ(z), convenience wrapper; infinite at the poles.
pub fn gamma(z: Complex64) -> Complex64 {
    let r = gamma_reciprocal(z);
    if r == Complex64::new(0.0, 0.0) {
        Complex64::new(f64::INFINITY, 0.0)
    } else {
        1.0 / r
    }
}

/// Entire part of J_ν: Σ_k (−x²/4)^k / (k! Γ(ν+k+1)), so that
/// J_ν(x) = (x/2)^ν · bessel_j_entire(ν, x).
pub fn bessel_j_entire(nu: Complex64, x: Complex64) -> Result<Complex64> {
    let q = -0.25 * x * x;
    // Terms before k_min may vanish identically (ν a negative integer).
    let k_min = if nu.re < 0.0 { (-nu.re).ceil() as usize + 1 } else { 0 };

    let mut power = Complex64::new(1.0, 0.0); // q^k / k!
    let mut rgamma = gamma_reciprocal(nu + 1.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..BESSEL_MAX_TERMS {
        let term = power * rgamma;
        sum += term;
        if !sum.is_finite() {
            break;
        }
        if k >= k_min && term.norm() <= BESSEL_REL_TOL * sum.norm() {
            return Ok(sum);
        }
        if q == Complex64::new(0.0, 0.0) && k >= k_min {
            return Ok(sum);
        }
        let kf = (k + 1) as f64;
        power *= q / kf;
        // 1/Γ(ν+k+2) = (1/Γ(ν+k+1)) / (ν+k+1); recompute directly near a pole.
        let shift = nu + kf;
        rgamma = if shift.norm() < 0.5 { gamma_reciprocal(shift + 1.0) } else { rgamma / shift };
    }
    Err(Error::Accuracy { terms: BESSEL_MAX_TERMS })
}

/// Bessel function of the first kind J_ν(x) for complex order and argument,
/// with the principal branch of (x/2)^ν. Intended for |x| ≲ 5.
pub fn bessel_j(nu: Complex64, x: Complex64) -> Result<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if x == zero {
        return if nu == zero {
            Ok(Complex64::new(1.0, 0.0))
        } else if nu.re > 0.0 {
            Ok(zero)
        } else {
            Err(Error::Domain("J_nu(0) with Re(nu) <= 0 and nu != 0"))
        };
    }
    let prefactor = complex_pow_principal(0.5 * x, nu)?;
    Ok(prefactor * bessel_j_entire(nu, x)?)
}
