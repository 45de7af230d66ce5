//! Solitons of `u'' + u^{p-1} = ω u` on the line and the constants of the
//! critical problem.
//!
//! The profile is `A sech^α(B x)` with `α = 2/(p-2)`; substituting gives
//! `ω = α²B²` and `A^{p-2} = α(α+1)B²`, and the mass fixes `B`.

use crate::error::{Error, Result};
use crate::math::{self, adaptive_simpson, powf, sech, sqrt, tanh, PI};

const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolitonParams {
    pub p: f64,
    pub mu: f64,
    pub amplitude: f64,
    pub width_rate: f64,
    pub omega: f64,
}

/// `∫_ℝ sech^s(x) dx`.
pub fn sech_power_integral(s: f64) -> f64 {
    sqrt(PI) * math::gamma(0.5 * s) / math::gamma(0.5 * (s + 1.0))
}

fn check_exponent(p: f64) -> Result<()> {
    if p > 2.0 && p < 6.0 {
        Ok(())
    } else {
        Err(Error::ExponentOutOfRange(p))
    }
}

pub fn soliton(p: f64, mu: f64) -> Result<SolitonParams> {
    check_exponent(p)?;
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::NonpositiveMass);
    }
    let alpha = 2.0 / (p - 2.0);
    let c = powf(alpha * (1.0 + alpha), alpha) * sech_power_integral(2.0 * alpha);
    let b = powf(mu / c, (p - 2.0) / (6.0 - p));
    let amplitude = powf(alpha * (1.0 + alpha) * b * b, 1.0 / (p - 2.0));
    Ok(SolitonParams {
        p,
        mu,
        amplitude,
        width_rate: b,
        omega: alpha * alpha * b * b,
    })
}

impl SolitonParams {
    pub fn alpha(&self) -> f64 {
        2.0 / (self.p - 2.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.amplitude * powf(sech(self.width_rate * x), self.alpha())
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let bx = self.width_rate * x;
        -self.alpha() * self.width_rate * self.value(x) * tanh(bx)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let a = self.alpha();
        let b = self.width_rate;
        let s = sech(b * x);
        let t = tanh(b * x);
        a * b * b * self.value(x) * (a * t * t - s * s)
    }

    /// Half-width of the window outside which the profile is negligible.
    pub fn window(&self) -> f64 {
        40.0 / self.width_rate
    }

    pub fn mass_by_quadrature(&self) -> f64 {
        let w = self.window();
        adaptive_simpson(&|x| self.value(x) * self.value(x), -w, w, QUAD_TOL)
    }

    pub fn kinetic(&self) -> f64 {
        let w = self.window();
        0.5 * adaptive_simpson(&|x| { let d = self.derivative(x); d * d }, -w, w, QUAD_TOL)
    }

    pub fn potential(&self) -> f64 {
        let w = self.window();
        let p = self.p;
        adaptive_simpson(&|x| powf(self.value(x), p), -w, w, QUAD_TOL) / p
    }

    /// Mass carried by `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let w = self.window();
        let (lo, hi) = (lo.max(-w), hi.min(w));
        if hi <= lo {
            return 0.0;
        }
        adaptive_simpson(&|x| self.value(x) * self.value(x), lo, hi, 1e-14)
    }
}

/// `E(φ_μ, ℝ)`.
pub fn soliton_energy(p: f64, mu: f64) -> Result<f64> {
    let s = soliton(p, mu)?;
    if p == 4.0 {
        return Ok(-mu * mu * mu / 96.0);
    }
    Ok(s.kinetic() - s.potential())
}

/// Energy of the half-soliton of mass `mu` on the halfline.
pub fn halfsoliton_energy(p: f64, mu: f64) -> Result<f64> {
    Ok(0.5 * soliton_energy(p, 2.0 * mu)?)
}

/// Critical masses `(μ_ℝ, μ_ℝ⁺)` for `p = 6`.
pub fn critical_masses() -> (f64, f64) {
    let line = PI * sqrt(3.0) / 2.0;
    (line, 0.5 * line)
}

/// Sharp Gagliardo–Nirenberg constant `‖u‖₆⁶ ≤ K ‖u‖₂⁴ ‖u'‖₂²` on the line.
pub fn gn_constant_line() -> f64 {
    4.0 / (PI * PI)
}

pub fn gn_constant_halfline() -> f64 {
    16.0 / (PI * PI)
}

/// Critical mass from a Gagliardo–Nirenberg constant.
pub fn critical_mass_from_k(k: f64) -> f64 {
    sqrt(3.0 / k)
}

/// Zero-energy quintic soliton `√λ sech^{1/2}(2λx/√3)`.
pub fn soliton_p6(lambda: f64) -> Result<SolitonParams> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::NonpositiveScale);
    }
    Ok(SolitonParams {
        p: 6.0,
        mu: critical_masses().0,
        amplitude: sqrt(lambda),
        width_rate: 2.0 * lambda / sqrt(3.0),
        omega: lambda * lambda / 3.0,
    })
}

/// Grid spacing giving about a hundred points per soliton width, capped at 0.01.
pub fn default_h(p: f64, mu: f64) -> Result<f64> {
    let s = soliton(p, mu)?;
    Ok(0.01 * (1.0f64).min(1.0 / s.width_rate))
}

/// Distance at which the reference soliton drops below `1e-10`.
pub fn default_truncation(p: f64, mu: f64) -> Result<f64> {
    let s = soliton(p, mu)?;
    let a = s.alpha();
    let scale = s.amplitude * powf(2.0, a) / 1e-10;
    Ok((math::ln(scale) / (a * s.width_rate)).max(1.0))
}
