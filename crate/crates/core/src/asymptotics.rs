//! Asymptotic forms of the scattered field: the Etalon-integral solution,
//! its large- and small-argument limits (geometric-optics reflection and
//! the pseudo-surface wave) and the pole of the reflection coefficient
//! that drives them.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::em::{Scenario, EPS0, EPS1};
use crate::error::{Error, Result};
use crate::fields::{reflection_coeff, reflection_parts, CylindricalFieldVector};
use crate::specfun::erf_complex_unguarded;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default lower bound on `σ/(ωε₀)` for the pole approximation.
pub const DEFAULT_LOSS_GUARD: f64 = 10.0;
/// Default largest grazing angle (radians) accepted by the pseudo-surface wave.
pub const DEFAULT_MAX_GRAZING: f64 = 5.0 * PI / 180.0;
/// Condition parameter below which the large-argument form is flagged.
pub const LARGE_ARG_FLAG: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleData {
    pub xi_p: Complex64,
    /// `ξ_p − θ₂`.
    pub zeta_p: Complex64,
}

/// An approximation together with the parameter that decides whether it
/// can be trusted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approximation<T> {
    pub value: T,
    pub condition: f64,
    /// `false` when `condition` is outside the comfortable range; the value
    /// is still returned.
    pub valid: bool,
}

/// `e^{−iπ/4}`, the branch used for `√(−i)`.
fn exp_minus_i_pi_4() -> Complex64 {
    Complex64::from_polar(1.0, -FRAC_PI_4)
}

fn loss_guard(scenario: &Scenario, factor: f64) -> Result<()> {
    let ratio = scenario.loss_ratio();
    if ratio < factor {
        return Err(Error::Regime {
            quantity: "sigma/(omega*eps0)",
            value: ratio,
            requirement: "pole approximation needs σ ≫ ωε₀",
        });
    }
    Ok(())
}

/// Pole of `R∥` in the high-loss approximation, with the default guard.
pub fn pole_xi_p(scenario: &Scenario) -> Result<PoleData> {
    pole_xi_p_with_guard(scenario, DEFAULT_LOSS_GUARD)
}

/// As [`pole_xi_p`], requiring `σ/(ωε₀) ≥ factor`.
///
/// The ground permittivity entering the correction is the real `εr`;
/// losses enter only through `σ`.
pub fn pole_xi_p_with_guard(scenario: &Scenario, factor: f64) -> Result<PoleData> {
    loss_guard(scenario, factor)?;
    let omega = scenario.omega();
    let sigma = scenario.ground.sigma();
    let delta = scenario.delta()?;
    let q = omega * EPS0 * (EPS1 + scenario.ground.eps_r()) / (2.0 * sigma);
    let xi_p = Complex64::new(FRAC_PI_2, 0.0) + delta * Complex64::new(1.0 + q, -(1.0 - q));
    Ok(PoleData {
        xi_p,
        zeta_p: xi_p - scenario.derived().theta2,
    })
}

/// Zero of the denominator of the analytically continued `R∥`, by Newton
/// iteration started from the approximate pole.
pub fn pole_newton(scenario: &Scenario) -> Result<Complex64> {
    let k = scenario.k01();
    let eps2 = scenario.eps2();
    let mut xi = pole_xi_p_with_guard(scenario, 0.0)?.xi_p;
    for _ in 0..100 {
        let (_, den) = reflection_parts(xi, scenario);
        let root = den - eps2 * k * xi.cos();
        // d/dξ [ε₂k·cosξ + √(k02² − k²sin²ξ)]
        let slope = -eps2 * k * xi.sin() - k * k * xi.sin() * xi.cos() / root;
        let step = den / slope;
        xi -= step;
        if step.norm() <= 1e-15 * xi.norm() {
            return Ok(xi);
        }
        if !(xi.re.is_finite() && xi.im.is_finite()) {
            break;
        }
    }
    Err(Error::Singular("pole iteration did not converge"))
}

/// The Etalon integral `X(k, α) = −½·sgn(Re α) + ½·erf(√(−2ik)·sin(α/2))`.
pub fn etalon_x(k: f64, alpha: Complex64) -> Result<Complex64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k,
            reason: "etalon parameter k must be > 0",
        });
    }
    if alpha.re == 0.0 || !alpha.re.is_finite() {
        return Err(Error::AmbiguousSign(alpha));
    }
    // For real α the argument lies on the diagonal arg z = −π/4, where
    // |Im z| can far exceed the usual erf guard without any overflow.
    let z = exp_minus_i_pi_4() * (2.0 * k).sqrt() * (alpha * 0.5).sin();
    Ok(-0.5 * alpha.re.signum() + 0.5 * erf_complex_unguarded(z)?)
}

/// Large-argument form of [`etalon_x`]; `condition = √(2k)·|sin(α/2)|`.
pub fn etalon_x_large_arg(k: f64, alpha: Complex64) -> Result<Approximation<Complex64>> {
    let s = (alpha * 0.5).sin();
    if s.norm() == 0.0 {
        return Err(Error::Singular("sin(alpha/2) = 0"));
    }
    let condition = (2.0 * k).sqrt() * s.norm();
    if !(condition > 1.0) {
        return Err(Error::Regime {
            quantity: "sqrt(2k)|sin(alpha/2)|",
            value: condition,
            requirement: "large-argument form needs > 1",
        });
    }
    let root_i_2pi = Complex64::from_polar((0.5 / PI).sqrt(), FRAC_PI_4);
    let value = -root_i_2pi * (I * k * (1.0 - alpha.cos())).exp() / (2.0 * k.sqrt() * s);
    Ok(Approximation {
        value,
        condition,
        valid: condition >= LARGE_ARG_FLAG,
    })
}

/// Small-argument form of [`etalon_x`]; requires `k·|α|²/2 < 1`.
pub fn etalon_x_small_arg(k: f64, alpha: Complex64) -> Result<Complex64> {
    let condition = 0.5 * k * alpha.norm_sqr();
    if !(condition < 1.0) {
        return Err(Error::Regime {
            quantity: "k*alpha^2/2",
            value: condition,
            requirement: "small-argument form needs < 1",
        });
    }
    if alpha.re == 0.0 {
        return Err(Error::AmbiguousSign(alpha));
    }
    let root = exp_minus_i_pi_4() * (k / (2.0 * PI)).sqrt();
    Ok(-0.5 * alpha.re.signum() + root * alpha)
}

/// `ê_θ₂ = ê_ρ·cosθ₂ − ê_x·sinθ₂` scaled by `c`.
fn along_theta2(theta2: f64, c: Complex64) -> CylindricalFieldVector {
    CylindricalFieldVector::new(c * theta2.cos(), -c * theta2.sin())
}

/// Scattered field from the Etalon-integral asymptotic solution.
pub fn etalon_scattered(scenario: &Scenario) -> Result<CylindricalFieldVector> {
    etalon_scattered_using(scenario, etalon_x)
}

/// [`etalon_scattered`] with `X` replaced by its large-argument form;
/// close to [`spm_reflected`] wherever `condition` is large.
pub fn etalon_scattered_large_arg(scenario: &Scenario) -> Result<Approximation<CylindricalFieldVector>> {
    let mut condition = 0.0;
    let field = etalon_scattered_using(scenario, |k, alpha| {
        let a = etalon_x_large_arg(k, alpha)?;
        condition = a.condition;
        Ok(a.value)
    })?;
    Ok(Approximation {
        value: field,
        condition,
        valid: condition >= LARGE_ARG_FLAG,
    })
}

fn etalon_scattered_using(
    scenario: &Scenario,
    mut x_of: impl FnMut(f64, Complex64) -> Result<Complex64>,
) -> Result<CylindricalFieldVector> {
    let pole = pole_xi_p(scenario)?;
    let d = scenario.derived();
    let theta2 = d.theta2;
    if !(theta2 > 0.0 && theta2 < FRAC_PI_2) {
        return Err(Error::InvalidParameter {
            name: "theta2",
            value: theta2,
            reason: "incidence angle must lie in (0, pi/2)",
        });
    }
    let k = scenario.k01();
    let rho = scenario.geometry.rho();
    let zeta = pole.zeta_p;
    let x = x_of(k * d.r2, -zeta)?;
    let branch = exp_minus_i_pi_4() * (2.0 / (PI * k * rho)).sqrt();
    let amp = scenario.moment() * k * k * k / (2.0 * EPS0 * EPS1)
        * branch
        * (I * k * d.r2 * zeta.cos()).exp()
        * theta2.sin().powf(1.5)
        * (zeta * 0.5).sin()
        * reflection_coeff(theta2, scenario)
        * x;
    Ok(along_theta2(theta2, -amp))
}

/// Geometric-optics reflected field with its two condition parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpmField {
    pub field: CylindricalFieldVector,
    /// `√(k01·r₂)·sin(φ/2)`.
    pub condition: f64,
    /// `√(2·k01·r₂)·sin(φ/2)`.
    pub condition_2: f64,
}

/// Geometric-optics (stationary-phase) reflected field.
pub fn spm_reflected(scenario: &Scenario) -> Result<SpmField> {
    let d = scenario.derived();
    if !(d.r2 > 0.0) {
        return Err(Error::Singular("image distance is zero"));
    }
    let k = scenario.k01();
    let amp = reflection_coeff(d.theta2, scenario) * scenario.moment() * k * k / (4.0 * PI * EPS0 * EPS1 * d.r2)
        * d.theta2.sin()
        * (I * k * d.r2).exp();
    let half = (0.5 * d.phi).sin();
    Ok(SpmField {
        field: along_theta2(d.theta2, -amp),
        condition: (k * d.r2).sqrt() * half,
        condition_2: (2.0 * k * d.r2).sqrt() * half,
    })
}

/// Pseudo-surface wave with the regime quantities it was checked against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoSurfaceWave {
    pub field: CylindricalFieldVector,
    pub delta: f64,
    pub numerical_distance: f64,
}

/// The near-grazing, low-numerical-distance limit of the scattered field,
/// with the default grazing-angle limit.
pub fn pseudo_surface_wave(scenario: &Scenario) -> Result<PseudoSurfaceWave> {
    pseudo_surface_wave_with(scenario, DEFAULT_MAX_GRAZING)
}

/// As [`pseudo_surface_wave`] with grazing angles up to `max_phi` radians.
pub fn pseudo_surface_wave_with(scenario: &Scenario, max_phi: f64) -> Result<PseudoSurfaceWave> {
    let nd = scenario.numerical_distance()?;
    if !(nd < 1.0) {
        return Err(Error::Regime {
            quantity: "numerical distance k01*rho*delta^2",
            value: nd,
            requirement: "pseudo-surface wave needs < 1",
        });
    }
    let phi = scenario.derived().phi;
    if !(phi < max_phi) {
        return Err(Error::Regime {
            quantity: "grazing angle (rad)",
            value: phi,
            requirement: "pseudo-surface wave needs a near-grazing geometry",
        });
    }
    Ok(PseudoSurfaceWave {
        field: pseudo_surface_wave_formula(scenario)?,
        delta: scenario.delta()?,
        numerical_distance: nd,
    })
}

/// The pseudo-surface-wave expression without its regime checks, for
/// studying where it stops working.
pub fn pseudo_surface_wave_formula(scenario: &Scenario) -> Result<CylindricalFieldVector> {
    let delta = scenario.delta()?;
    let k = scenario.k01();
    let g = scenario.geometry;
    let kr = k * g.rho();
    let amp = delta * scenario.moment() * k * k * k / (4.0 * EPS0 * EPS1) / (PI * kr).sqrt()
        * (-delta * k * (g.x() + g.x0())).exp()
        * (I * (kr + FRAC_PI_2)).exp()
        * (1.0 + 2.0 * I * (kr / PI).sqrt() * delta * (1.0 + kr * delta * delta));
    Ok(CylindricalFieldVector::new(Complex64::new(0.0, 0.0), amp))
}
