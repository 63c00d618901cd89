//! Equivalent circuit of the lowest-order (TM1) spherical mode of an antenna
//! enclosed in a sphere of radius `a`: a series capacitance `a/(c R2)`
//! feeding the parallel combination of an inductance `a R2/c` and the
//! radiation resistance `R2`.
//!
//! Besides the driving-point impedance this module gives the reflection and
//! transmission of the bare circuit seen through its Darlington
//! realisation, and the two integral budgets that any lossless matching
//! network must respect because of the double transmission zero at DC.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate_semi_infinite, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChuCircuit {
    /// Sphere radius, m.
    pub radius: f64,
    /// Radiation resistance, Ω.
    pub r2: f64,
    /// Speed of light, m/s.
    pub c: f64,
}

impl ChuCircuit {
    /// Circuit with a 1 Ω radiation resistance. The budgets below do not
    /// depend on `r2`.
    pub fn new(radius: f64, c: f64) -> Result<Self> {
        Self::with_resistance(radius, 1.0, c)
    }

    pub fn with_resistance(radius: f64, r2: f64, c: f64) -> Result<Self> {
        if !(radius > 0.0 && r2 > 0.0 && c > 0.0) {
            return Err(Error::Domain(format!(
                "Chu circuit needs positive radius, resistance and c (a={radius}, R2={r2}, c={c})"
            )));
        }
        Ok(Self { radius, r2, c })
    }

    /// Light travel time across the radius, s.
    pub fn tau(&self) -> f64 {
        self.radius / self.c
    }

    pub fn capacitance(&self) -> f64 {
        self.radius / (self.c * self.r2)
    }

    pub fn inductance(&self) -> f64 {
        self.radius * self.r2 / self.c
    }

    /// Electrical size `2π f a / c`.
    pub fn electrical_size(&self, f: f64) -> f64 {
        2.0 * PI * f * self.tau()
    }

    pub fn input_impedance(&self, f: f64) -> Result<Complex64> {
        if !(f > 0.0) {
            return Err(Error::Domain(format!(
                "series capacitance has a pole at f = {f}"
            )));
        }
        let jwt = Complex64::new(0.0, self.electrical_size(f));
        Ok(self.r2 / jwt + self.r2 / (jwt.inv() + 1.0))
    }

    fn denominator(&self, f: f64) -> Complex64 {
        let st = Complex64::new(0.0, self.electrical_size(f));
        2.0 * st * st + 2.0 * st + 1.0
    }

    /// Transmission of the unmatched circuit, `T(s) = 2 s²τ² / (2 s²τ² + 2 sτ + 1)`.
    pub fn unmatched_transmission(&self, f: f64) -> Complex64 {
        let st = Complex64::new(0.0, self.electrical_size(f));
        2.0 * st * st / self.denominator(f)
    }

    /// Reflection of the unmatched circuit, `Γ(s) = 1 / (2 s²τ² + 2 sτ + 1)`.
    pub fn unmatched_reflection(&self, f: f64) -> Complex64 {
        self.denominator(f).inv()
    }

    /// `|T(f)|^2 = 4x⁴ / (1 + 4x⁴)` with `x = 2π f a / c`.
    pub fn transmission_power(&self, f: f64) -> f64 {
        let x = self.electrical_size(f);
        let q = 4.0 * x.powi(4);
        q / (1.0 + q)
    }

    /// `|Γ(f)|^2 = 1 / (1 + 4x⁴)`.
    pub fn reflection_power(&self, f: f64) -> f64 {
        let x = self.electrical_size(f);
        1.0 / (1.0 + 4.0 * x.powi(4))
    }

    /// Right-hand sides of the two realisability integrals for a reflection
    /// zero at `gamma` (rad/s).
    pub fn fano_budget(&self, gamma: ReflectionZero) -> Result<FanoBudget> {
        let inv = gamma.inverse()?;
        let tau = self.tau();
        Ok(FanoBudget {
            k1: 2.0 * PI * PI * (2.0 * tau - 2.0 * inv),
            k2: 8.0 * PI.powi(4) * (4.0 * tau.powi(3) / 3.0 + 2.0 * inv.powi(3) / 3.0),
            gamma,
        })
    }

    /// `∫₀^∞ f⁻² ln(1/|Γ|²) df` and `∫₀^∞ f⁻⁴ ln(1/|Γ|²) df` of the bare
    /// circuit, evaluated in the electrical size `x` where both integrands
    /// stay bounded near the origin.
    pub fn bare_fano_integrals(&self, spec: &QuadratureSpec) -> Result<(f64, f64)> {
        let w = 2.0 * PI * self.tau();
        let i1 = integrate_semi_infinite(|x| (4.0 * x.powi(4)).ln_1p() / (x * x), spec)?;
        let i2 = integrate_semi_infinite(|x| (4.0 * x.powi(4)).ln_1p() / x.powi(4), spec)?;
        Ok((w * i1, w.powi(3) * i2))
    }
}

/// Positive real zero of the reflection coefficient, or none at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReflectionZero {
    Finite(f64),
    /// No finite zero; `1/γ = 0`.
    Infinite,
}

impl ReflectionZero {
    pub fn inverse(&self) -> Result<f64> {
        match *self {
            ReflectionZero::Infinite => Ok(0.0),
            ReflectionZero::Finite(g) if g > 0.0 => Ok(1.0 / g),
            ReflectionZero::Finite(g) => Err(Error::Domain(format!(
                "reflection zero must be positive, got {g}"
            ))),
        }
    }
}

/// Values of the two realisability integrals, `K1` (s) and `K2` (s³).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanoBudget {
    pub k1: f64,
    pub k2: f64,
    pub gamma: ReflectionZero,
}

#[cfg(test)]
mod tests {
    use super::*;

    const C: f64 = 3e8;

    fn circ(a: f64) -> ChuCircuit {
        ChuCircuit::new(a, C).unwrap()
    }

    #[test]
    fn impedance_high_frequency_limit() {
        let z = circ(0.05).input_impedance(1e15).unwrap();
        assert!((z.re - 1.0).abs() < 1e-9);
        assert!(z.im.abs() < 1e-6);
    }

    #[test]
    fn impedance_at_unit_electrical_size() {
        let k = ChuCircuit::with_resistance(0.05, 50.0, C).unwrap();
        let f = C / (2.0 * PI * 0.05);
        let z = k.input_impedance(f).unwrap();
        // -j R + R (1 + j)/2
        assert!((z.re - 25.0).abs() < 1e-12);
        assert!((z.im + 25.0).abs() < 1e-12);
    }

    #[test]
    fn impedance_pole_at_dc() {
        assert!(matches!(circ(0.01).input_impedance(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn passive_real_part() {
        let k = ChuCircuit::with_resistance(0.02, 7.0, C).unwrap();
        for i in 0..200 {
            let f = 10f64.powf(3.0 + 0.05 * i as f64);
            let re = k.input_impedance(f).unwrap().re;
            assert!(re > 0.0 && re <= 7.0, "f={f} re={re}");
        }
    }

    #[test]
    fn unmatched_limits() {
        let k = circ(0.05);
        assert_eq!(k.unmatched_transmission(0.0).norm(), 0.0);
        assert!((k.unmatched_reflection(0.0) - 1.0).norm() < 1e-15);
        assert!((k.unmatched_transmission(1e15).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn half_power_point() {
        // 4x^4 = 1  ->  x = 2^{-1/2}
        let k = circ(0.05);
        let f = 0.5f64.sqrt() / (2.0 * PI * k.tau());
        assert!((k.unmatched_transmission(f).norm_sqr() - 0.5).abs() < 1e-14);
        assert!((k.unmatched_reflection(f).norm_sqr() - 0.5).abs() < 1e-14);
        assert!((k.transmission_power(f) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_complex_response() {
        let k = circ(0.003);
        for i in 0..100 {
            let f = 10f64.powf(6.0 + 0.06 * i as f64);
            let t = k.unmatched_transmission(f).norm_sqr();
            assert!((t - k.transmission_power(f)).abs() <= 1e-14 * t.max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn budgets_without_finite_zero() {
        let k = circ(0.05);
        let b = k.fano_budget(ReflectionZero::Infinite).unwrap();
        let tau = 0.05 / C;
        assert!((b.k1 / (4.0 * PI * PI * tau) - 1.0).abs() < 1e-15);
        assert!((b.k1 / 6.5797e-9 - 1.0).abs() < 1e-4);
        assert!((b.k2 / (32.0 * PI.powi(4) * tau.powi(3) / 3.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn k1_vanishes_at_critical_zero() {
        let k = circ(0.05);
        let b = k.fano_budget(ReflectionZero::Finite(C / 0.05)).unwrap();
        assert!(b.k1.abs() < 1e-14 * 4.0 * PI * PI * (0.05 / C), "{}", b.k1);
        assert!(b.k2 > 0.0);
    }

    #[test]
    fn nonpositive_zero_rejected() {
        let k = circ(0.05);
        assert!(k.fano_budget(ReflectionZero::Finite(0.0)).is_err());
        assert!(k.fano_budget(ReflectionZero::Finite(-3.0)).is_err());
    }

    #[test]
    fn bad_circuit_rejected() {
        assert!(ChuCircuit::new(0.0, C).is_err());
        assert!(ChuCircuit::with_resistance(0.1, -1.0, C).is_err());
    }
}
