//! Field and atomic state types shared by the exact solution and the
//! integrator.

use nalgebra::Matrix3;
use num_complex::Complex64;

/// Complex Rabi amplitudes of the two optical channels.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldState {
    pub omega_a: Complex64,
    pub omega_b: Complex64,
}

impl FieldState {
    pub fn new(omega_a: Complex64, omega_b: Complex64) -> Self {
        Self { omega_a, omega_b }
    }

    /// Root-sum-square Rabi amplitude.
    pub fn magnitude(&self) -> f64 {
        (self.omega_a.norm_sqr() + self.omega_b.norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.omega_a.is_finite() && self.omega_b.is_finite()
    }
}

impl std::ops::Add for FieldState {
    type Output = FieldState;
    fn add(self, rhs: FieldState) -> FieldState {
        FieldState::new(self.omega_a + rhs.omega_a, self.omega_b + rhs.omega_b)
    }
}

impl std::ops::Sub for FieldState {
    type Output = FieldState;
    fn sub(self, rhs: FieldState) -> FieldState {
        FieldState::new(self.omega_a - rhs.omega_a, self.omega_b - rhs.omega_b)
    }
}

impl std::ops::Mul<f64> for FieldState {
    type Output = FieldState;
    fn mul(self, k: f64) -> FieldState {
        FieldState::new(self.omega_a * k, self.omega_b * k)
    }
}

/// Amplitudes of |1⟩, |2⟩, |3⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomState {
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
}

impl AtomState {
    pub fn ground() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self { c1: Complex64::new(1.0, 0.0), c2: zero, c3: zero }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr() + self.c3.norm_sqr()
    }

    /// ρ = |ψ⟩⟨ψ|.
    pub fn density_matrix(&self) -> DensityMatrix {
        let c = [self.c1, self.c2, self.c3];
        DensityMatrix(Matrix3::from_fn(|r, k| c[r] * c[k].conj()))
    }
}

/// 3×3 density matrix in the basis |1⟩, |2⟩, |3⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub Matrix3<Complex64>);

impl DensityMatrix {
    pub fn diagonal(p1: f64, p2: f64, p3: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        let r = |v| Complex64::new(v, 0.0);
        DensityMatrix(Matrix3::new(r(p1), z, z, z, r(p2), z, z, z, r(p3)))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
        self.0.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Level populations (ρ₁₁, ρ₂₂, ρ₃₃).
    pub fn populations(&self) -> [f64; 3] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re]
    }

    /// Largest entrywise deviation from ρ = ρ†.
    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// ρ₃₁ and ρ₃₂, the coherences that drive the fields.
    pub fn optical_coherences(&self) -> (Complex64, Complex64) {
        (self.0[(2, 0)], self.0[(2, 1)])
    }
}
