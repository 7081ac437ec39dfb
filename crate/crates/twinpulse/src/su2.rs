//! Exact algebra of resonant two-level propagators.
//!
//! A propagator is held as the pair of Cayley-Klein parameters `(a, b)`,
//! standing for the 2×2 unitary
//!
//! ```text
//!   | a          b  |
//!   | -conj(b) conj(a) |
//! ```
//!
//! with `|a|² + |b|² = 1`. Storing only the pair keeps that structure intact
//! under every operation, so unitarity reduces to a single scalar check.
//! On resonance a pulse of area 𝒜 has `a = cos(𝒜/2)`, `b = -i sin(𝒜/2)`,
//! and a constant phase shift φ of the drive multiplies `b` by `e^{iφ}`.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};

/// Allowed drift of `|a|² + |b|²` away from 1.
pub const UNITARITY_TOL: f64 = 1e-12;

/// An SU(2) propagator in Cayley-Klein form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Matrix {
    /// Upper-left matrix element.
    pub a: Complex64,
    /// Upper-right matrix element.
    pub b: Complex64,
}

impl Su2Matrix {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn identity() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// Propagator of a resonant pulse with the given area (radians) and
    /// zero phase: `a = cos(area/2)`, `b = -i sin(area/2)`.
    pub fn from_area(area: f64) -> Self {
        let half = 0.5 * area;
        Self {
            a: Complex64::new(half.cos(), 0.0),
            b: Complex64::new(0.0, -half.sin()),
        }
    }

    /// Propagator with the drive phase shifted by `phi` radians:
    /// `b` picks up `e^{iφ}`, `a` is untouched.
    pub fn phase_shifted(&self, phi: f64) -> Self {
        Self {
            a: self.a,
            b: self.b * Complex64::from_polar(1.0, phi),
        }
    }

    /// Matrix product `self · earlier`, with `self` the chronologically
    /// later factor. The result is again in Cayley-Klein form.
    pub fn compose(&self, earlier: &Su2Matrix) -> Su2Matrix {
        Su2Matrix {
            a: self.a * earlier.a - self.b * earlier.b.conj(),
            b: self.a * earlier.b + self.b * earlier.a.conj(),
        }
    }

    /// Hermitian conjugate; the inverse for unitary input.
    pub fn dagger(&self) -> Su2Matrix {
        Su2Matrix {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// Transition probability `P = |b|²`, clamped to [0, 1].
    pub fn transition_probability(&self) -> f64 {
        self.b.norm_sqr().clamp(0.0, 1.0)
    }

    /// Survival probability `|a|²`, clamped to [0, 1]. Equals `1 - P`
    /// without forming the difference, so it stays accurate when the
    /// transition probability is close to 1.
    pub fn survival_probability(&self) -> f64 {
        self.a.norm_sqr().clamp(0.0, 1.0)
    }

    /// `| |a|² + |b|² - 1 |`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() - 1.0).abs()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// True iff `self = e^{iθ}·other` for some real θ, within `tol`.
    ///
    /// Tested through `|tr(self · other†)| = 2`: the trace of the product
    /// is `2·Re(a₁·conj(a₂) + b₁·conj(b₂))`, which reaches ±2 exactly when
    /// the two matrices agree up to a global sign (the only global phases
    /// an SU(2) pair admits).
    pub fn equivalent_up_to_global_phase(&self, other: &Su2Matrix, tol: f64) -> bool {
        let overlap = self.a * other.a.conj() + self.b * other.b.conj();
        ((2.0 * overlap.re).abs() - 2.0).abs() <= tol
    }
}

/// Nominal pulse area stored as an exact count of quarter-pi units, so the
/// error ε enters only when the propagator is evaluated.
///
/// The named pulses are `D` (π/4), `A` (π/2), `B` (π), and `C` (2π); the
/// actual area at error ε is `quarter_pi · (π/4) · (1+ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PulseArea {
    quarter_pi: u32,
}

impl PulseArea {
    /// Nominal π/4 pulse.
    pub const D: PulseArea = PulseArea { quarter_pi: 1 };
    /// Nominal π/2 pulse.
    pub const A: PulseArea = PulseArea { quarter_pi: 2 };
    /// Nominal π pulse.
    pub const B: PulseArea = PulseArea { quarter_pi: 4 };
    /// Nominal 2π pulse.
    pub const C: PulseArea = PulseArea { quarter_pi: 8 };

    pub fn new(quarter_pi: u32) -> Result<Self> {
        if quarter_pi == 0 {
            return Err(Error::InvalidArea);
        }
        Ok(Self { quarter_pi })
    }

    pub fn quarter_pi(&self) -> u32 {
        self.quarter_pi
    }

    /// Area with twice the nominal value (seam merging of twin halves).
    pub fn doubled(&self) -> Self {
        Self {
            quarter_pi: self.quarter_pi * 2,
        }
    }

    /// Actual area in radians at fractional error ε.
    pub fn radians(&self, epsilon: f64) -> f64 {
        f64::from(self.quarter_pi) * FRAC_PI_4 * (1.0 + epsilon)
    }

    pub fn nominal_radians(&self) -> f64 {
        self.radians(0.0)
    }

    /// Conventional letter for the named areas, `None` otherwise.
    pub fn symbol(&self) -> Option<char> {
        match self.quarter_pi {
            1 => Some('D'),
            2 => Some('A'),
            4 => Some('B'),
            8 => Some('C'),
            _ => None,
        }
    }
}

impl std::fmt::Display for PulseArea {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.symbol() {
            Some(c) => write!(f, "{c}"),
            None => write!(f, "({}π/4)", self.quarter_pi),
        }
    }
}

/// Propagator of a resonant pulse of nominal area `area` at pulse area
/// error ε, before any phase shift.
pub fn resonant_propagator(area: PulseArea, epsilon: f64) -> Su2Matrix {
    Su2Matrix::from_area(area.radians(epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(x: Complex64, y: Complex64, tol: f64) -> bool {
        (x - y).norm() <= tol
    }

    #[test]
    fn exact_pi_pulse() {
        let u = resonant_propagator(PulseArea::B, 0.0);
        assert!(close(u.a, Complex64::new(0.0, 0.0), 1e-15));
        assert!(close(u.b, Complex64::new(0.0, -1.0), 1e-15));
        assert_eq!(u.transition_probability(), 1.0);
    }

    #[test]
    fn exact_half_pi_pulse() {
        let u = resonant_propagator(PulseArea::A, 0.0);
        let r = FRAC_PI_4.cos();
        assert!(close(u.a, Complex64::new(r, 0.0), 1e-15));
        assert!(close(u.b, Complex64::new(0.0, -r), 1e-15));
    }

    #[test]
    fn perturbed_pi_pulse_probability() {
        // sin²(0.55π) evaluated directly
        let expected = (0.55 * PI).sin().powi(2);
        let u = resonant_propagator(PulseArea::B, 0.1);
        assert!((u.transition_probability() - expected).abs() < 1e-15);
        assert!((expected - 0.97553).abs() < 1e-5);
    }

    #[test]
    fn phase_shift_zero_is_identity() {
        let u = resonant_propagator(PulseArea::A, 0.3);
        let v = u.phase_shifted(0.0);
        assert!(close(u.b, v.b, 1e-15) && close(u.a, v.a, 1e-15));
    }

    #[test]
    fn phase_shift_rotates_b() {
        let u = resonant_propagator(PulseArea::B, 0.0); // b = -i
        let v = u.phase_shifted(FRAC_PI_2);
        assert!(close(v.b, Complex64::new(1.0, 0.0), 1e-15));
    }

    #[test]
    fn phase_shift_adds_exponents() {
        let u = resonant_propagator(PulseArea::B, 0.17);
        let lhs = u.phase_shifted(0.4).phase_shifted(1.1);
        let rhs = u.phase_shifted(1.5);
        assert!(close(lhs.b, rhs.b, 1e-15));
    }

    #[test]
    fn compose_with_identity() {
        let u = resonant_propagator(PulseArea::C, -0.2).phase_shifted(0.9);
        let v = Su2Matrix::identity().compose(&u);
        assert!(close(u.a, v.a, 1e-15) && close(u.b, v.b, 1e-15));
    }

    #[test]
    fn two_half_pi_pulses_make_a_pi_pulse() {
        let a = resonant_propagator(PulseArea::A, 0.0);
        let b = resonant_propagator(PulseArea::B, 0.0);
        let prod = a.compose(&a);
        assert!(close(prod.a, b.a, 1e-15) && close(prod.b, b.b, 1e-15));
    }

    #[test]
    fn two_pi_pulses_make_a_two_pi_pulse() {
        for &eps in &[-0.7, -0.2, 0.0, 0.35, 1.0] {
            let b = resonant_propagator(PulseArea::B, eps);
            let c = resonant_propagator(PulseArea::C, eps);
            let prod = b.compose(&b);
            assert!(close(prod.a, c.a, 1e-14) && close(prod.b, c.b, 1e-14));
        }
    }

    #[test]
    fn probability_bounds() {
        assert_eq!(Su2Matrix::identity().transition_probability(), 0.0);
        let u = resonant_propagator(PulseArea::B, 0.0);
        assert!((u.transition_probability() - 1.0).abs() < 1e-15);
        assert!(u.survival_probability() < 1e-30);
    }

    #[test]
    fn global_phase_equivalence() {
        let u = resonant_propagator(PulseArea::B, 0.41).phase_shifted(0.3);
        assert!(u.equivalent_up_to_global_phase(&u, 1e-12));
        let minus = Su2Matrix::new(-u.a, -u.b);
        assert!(u.equivalent_up_to_global_phase(&minus, 1e-12));
        let pi_pulse = resonant_propagator(PulseArea::B, 0.0);
        assert!(!pi_pulse.equivalent_up_to_global_phase(&Su2Matrix::identity(), 1e-6));
    }

    #[test]
    fn dagger_inverts() {
        let u = resonant_propagator(PulseArea::A, 0.27).phase_shifted(2.1);
        let p = u.compose(&u.dagger());
        assert!(close(p.a, Complex64::new(1.0, 0.0), 1e-15));
        assert!(close(p.b, Complex64::new(0.0, 0.0), 1e-15));
    }

    #[test]
    fn area_validation() {
        assert!(PulseArea::new(0).is_err());
        assert_eq!(PulseArea::new(4).unwrap(), PulseArea::B);
        assert_eq!(PulseArea::A.doubled(), PulseArea::B);
        assert_eq!(PulseArea::B.doubled(), PulseArea::C);
    }
}
