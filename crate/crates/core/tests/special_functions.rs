use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use slowlight_core::special::{bessel_j, complex_pow_principal, gamma, gamma_reciprocal};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Bessel's integral J_n(x) = (1/π) ∫₀^π cos(nt − x sin t) dt by the
/// trapezoidal rule, which converges geometrically for this integrand.
fn bessel_integral(n: i32, x: f64) -> f64 {
    let m = 400;
    let h = PI / m as f64;
    let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
    let inner: f64 = (1..m).map(|k| f(k as f64 * h)).sum();
    (0.5 * (f(0.0) + f(PI)) + inner) * h / PI
}

/// ln Γ(z) from Stirling's series after shifting Re z above 20.
fn ln_gamma_stirling(z: Complex64) -> Complex64 {
    let mut shift = c(0.0, 0.0);
    let mut w = z;
    while w.re < 20.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}

#[test]
fn reciprocal_gamma_reference_values() {
    let cases = [
        (c(-3.7, 2.2), c(-1_237.206_461_732_549_8, -700.857_274_907_978_4)),
        (c(12.5, -7.0), c(2.340_199_849_364_293e-8, -4.505_441_161_371_017_6e-8)),
        (c(0.3, 15.0), c(11_540_649_448.555_534, -2_044_023_952.928_300_8)),
        (c(-0.0125, 0.0), c(-0.012_408_530_116_939_714, 0.0)),
        (c(-8.5, 0.5), c(-42_695.993_568_058_28, 83_706.126_115_517_68)),
        (c(1.0, 1.0), c(1.830_744_396_590_524_7, 0.569_607_641_036_681_8)),
    ];
    for (z, expected) in cases {
        assert!(rel(gamma_reciprocal(z), expected) < 1e-12, "z = {z}");
    }
}

#[test]
fn gamma_against_stirling_oracle() {
    for &z in &[c(0.7, 0.0), c(1.0, 1.0), c(3.3, -4.0), c(9.0, 2.5), c(0.6, 12.0), c(15.0, -8.0)] {
        let oracle = (-ln_gamma_stirling(z)).exp();
        assert!(rel(gamma_reciprocal(z), oracle) < 1e-12, "z = {z}");
    }
    // Left half-plane via the oracle and the reflection formula.
    for &z in &[c(-2.3, 0.4), c(-6.6, -3.0), c(-0.4, 7.0)] {
        let oracle = (PI * z).sin() * (ln_gamma_stirling(1.0 - z)).exp() / PI;
        assert!(rel(gamma_reciprocal(z), oracle) < 1e-12, "z = {z}");
    }
    assert!(rel(gamma(c(5.0, 0.0)), c(24.0, 0.0)) < 1e-13);
}

#[test]
fn reciprocal_gamma_zero_at_poles() {
    for n in 0..20 {
        assert_eq!(gamma_reciprocal(c(-(n as f64), 0.0)), c(0.0, 0.0));
    }
    assert!(gamma(c(-2.0, 0.0)).re.is_infinite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn gamma_functional_equation(re in -15.0f64..15.0, im in -15.0f64..15.0) {
        let z = c(re, im);
        prop_assume!(z.norm() <= 20.0 && (z - z.re.round()).norm() > 1e-3);
        let lhs = gamma_reciprocal(z + 1.0);
        let rhs = gamma_reciprocal(z) / z;
        prop_assert!(rel(lhs, rhs) < 1e-12, "z = {}", z);
    }

    #[test]
    fn bessel_recurrence(
        nre in -3.0f64..3.0,
        nim in -3.0f64..3.0,
        x in prop_oneof![-2.0f64..-0.01, 0.01f64..2.0],
    ) {
        let nu = c(nre, nim);
        prop_assume!(nu.norm() <= 3.0);
        let x = c(x, 0.0);
        let lhs = bessel_j(nu - 1.0, x).unwrap() + bessel_j(nu + 1.0, x).unwrap();
        let rhs = 2.0 * nu / x * bessel_j(nu, x).unwrap();
        let scale = lhs.norm().max(rhs.norm());
        prop_assume!(scale > 0.0);
        prop_assert!((lhs - rhs).norm() / scale < 1e-10, "nu = {}, x = {}", nu, x);
    }
}

#[test]
fn integer_orders_against_bessel_integral() {
    let reference = [
        (0, 0.5, 0.938_469_807_240_812_9),
        (1, 0.5, 0.242_268_457_674_873_9),
        (0, 1.0, 0.765_197_686_557_966_6),
        (1, 1.0, 0.440_050_585_744_933_5),
        (0, 2.0, 0.223_890_779_141_235_7),
        (1, 2.0, 0.576_724_807_756_873_4),
    ];
    for (n, x, expected) in reference {
        let v = bessel_j(c(n as f64, 0.0), c(x, 0.0)).unwrap();
        assert!(v.im.abs() < 1e-15);
        assert!((v.re - expected).abs() < 1e-12, "J_{n}({x})");
        assert!((v.re - bessel_integral(n, x)).abs() < 1e-12, "J_{n}({x}) vs integral");
    }
    assert_eq!(bessel_j(c(1.0, 0.0), c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
}

#[test]
fn half_integer_closed_forms() {
    for &x in &[0.1, 0.5, PI / 2.0, 2.0, 4.5] {
        let k = (2.0 / (PI * x)).sqrt();
        let xs = c(x, 0.0);
        let jp = bessel_j(c(0.5, 0.0), xs).unwrap();
        let jm = bessel_j(c(-0.5, 0.0), xs).unwrap();
        let j3 = bessel_j(c(1.5, 0.0), xs).unwrap();
        // Errors relative to the envelope √(2/(πx)); the closed forms have zeros.
        assert!((jp - k * x.sin()).norm() / k < 1e-13, "x = {x}");
        assert!((jm - k * x.cos()).norm() / k < 1e-13, "x = {x}");
        assert!((j3 - k * (x.sin() / x - x.cos())).norm() / k < 1e-12, "x = {x}");
    }
}

#[test]
fn complex_order_reference_values() {
    let x0 = c(-0.375, 0.0);
    let g = c(1.0125, 0.0);
    let cases = [
        (g, x0, c(-0.179_330_044_205_868_26, -0.007_045_896_626_538_666)),
        (-g, x0, c(0.254_082_443_725_476_86, -0.009_982_926_402_744_15)),
        (g - 1.0, x0, c(0.951_576_733_765_880_9, 0.037_387_551_695_670_09)),
        (1.0 - g, x0, c(0.977_148_801_582_666_5, -0.038_392_280_976_598_98)),
        (c(1.0, 1.0), c(-1.5, 0.5), c(-0.040_352_340_458_155_63, 0.040_266_936_720_462_2)),
        (c(-0.7, 0.3), c(2.5, 0.0), c(-0.558_480_250_848_951_8, 0.094_596_932_521_092_63)),
    ];
    for (nu, x, expected) in cases {
        assert!(rel(bessel_j(nu, x).unwrap(), expected) < 1e-12, "J_{nu}({x})");
    }
}

#[test]
fn small_argument_law_on_negative_axis() {
    // J₋γ(x) ≈ (x/2)^{−γ} / Γ(1−γ) as x → 0⁻, same principal branch.
    let g = c(1.0125, 0.0);
    let x = c(-1e-4, 0.0);
    let law = complex_pow_principal(0.5 * x, -g).unwrap() * gamma_reciprocal(1.0 - g);
    assert!(rel(bessel_j(-g, x).unwrap(), law) < 1e-6);
    let g = c(0.8, -0.6);
    let law = complex_pow_principal(0.5 * x, -g).unwrap() * gamma_reciprocal(1.0 - g);
    assert!(rel(bessel_j(-g, x).unwrap(), law) < 1e-6);
}

#[test]
fn principal_power_default_value() {
    let v = complex_pow_principal(c(-0.1875, 0.0), c(-1.0125, 0.0)).unwrap();
    assert!(rel(v, c(-5.441_908_779_378_796_5, 0.213_813_178_267_769_03)) < 1e-14);
}
