//! Reference field solvers: closed-form direct field, the spectral
//! integrals for the direct and ground-scattered fields, the Fresnel
//! space wave and the surface wave left over after subtracting it.
//!
//! All fields are electric, in V/m, at the observer, split into the
//! horizontal (`ê_ρ`) and vertical (`ê_x`) components.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::ops::{Add, Mul, Neg, Sub};
use std::time::Instant;

use num_complex::Complex64;

use crate::em::{sqrt_im_pos, Scenario, EPS0, EPS1, MU0};
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_finite, integrate_semi_infinite, CoshCubedExpSinh, QuadValue, QuadratureSpec, TRUNCATION_CAP,
};
use crate::specfun::{bessel_j0, bessel_j1, hankel1_0};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CylindricalFieldVector {
    pub e_rho: Complex64,
    pub e_x: Complex64,
}

impl CylindricalFieldVector {
    pub fn new(e_rho: Complex64, e_x: Complex64) -> Self {
        Self { e_rho, e_x }
    }

    /// `√(|E_ρ|² + |E_x|²)`.
    pub fn magnitude(&self) -> f64 {
        self.e_rho.norm().hypot(self.e_x.norm())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.e_rho * c, self.e_x * c)
    }
}

impl Add for CylindricalFieldVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.e_rho + o.e_rho, self.e_x + o.e_x)
    }
}

impl Sub for CylindricalFieldVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.e_rho - o.e_rho, self.e_x - o.e_x)
    }
}

impl Neg for CylindricalFieldVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.e_rho, -self.e_x)
    }
}

impl Mul<f64> for CylindricalFieldVector {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        Self::new(self.e_rho * c, self.e_x * c)
    }
}

impl Mul<Complex64> for CylindricalFieldVector {
    type Output = Self;
    fn mul(self, c: Complex64) -> Self {
        self.scale(c)
    }
}

impl QuadValue for CylindricalFieldVector {
    fn zero() -> Self {
        Self::default()
    }
    fn norm(&self) -> f64 {
        self.magnitude()
    }
    fn is_finite(&self) -> bool {
        self.e_rho.re.is_finite() && self.e_rho.im.is_finite() && self.e_x.re.is_finite() && self.e_x.im.is_finite()
    }
    fn components(&self) -> Vec<Complex64> {
        vec![self.e_rho, self.e_x]
    }
}

/// A numerically integrated quantity with its cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrated<T> {
    pub value: T,
    /// Absolute error estimate, same units as `value`.
    pub err_estimate: f64,
    pub evals: usize,
    /// Seconds.
    pub wall_time: f64,
    /// Truncation point of the semi-infinite part, if there was one.
    pub xi_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldBreakdown {
    pub los: CylindricalFieldVector,
    pub scattered: CylindricalFieldVector,
    pub total: CylindricalFieldVector,
    pub space_wave: CylindricalFieldVector,
    pub surface_wave: CylindricalFieldVector,
}

/// Fresnel coefficient for vertical polarisation at real incidence `xi`.
pub fn reflection_coeff(xi: f64, scenario: &Scenario) -> Complex64 {
    reflection_coeff_complex(Complex64::new(xi, 0.0), scenario)
}

/// [`reflection_coeff`] continued to complex `xi`, with the `Im ≥ 0`
/// branch of the ground-side square root.
pub fn reflection_coeff_complex(xi: Complex64, scenario: &Scenario) -> Complex64 {
    let (num, den) = reflection_parts(xi, scenario);
    num / den
}

/// Numerator and denominator of [`reflection_coeff_complex`].
pub(crate) fn reflection_parts(xi: Complex64, scenario: &Scenario) -> (Complex64, Complex64) {
    let (k, k2) = scenario.wavenumbers();
    let eps2 = scenario.eps2();
    let s = xi.sin();
    let root = sqrt_im_pos(k2 * k2 - s * s * (k * k)) * EPS1;
    let a = eps2 * k * xi.cos();
    (a - root, a + root)
}

/// Reflection coefficient after the substitution `k_ρ = k01·coshξ`.
pub fn reflection_coeff_hyperbolic(xi: f64, scenario: &Scenario) -> Complex64 {
    let (k, k2) = scenario.wavenumbers();
    let eps2 = scenario.eps2();
    let c = xi.cosh();
    let root = sqrt_im_pos(k2 * k2 - k * k * c * c) * EPS1;
    let a = I * eps2 * k * xi.sinh();
    (a - root) / (a + root)
}

/// Free-space field of the dipole at distance `r`, with `cos_t` the cosine
/// of the angle between the dipole axis and the line of sight.
fn dipole_free_space(scenario: &Scenario, r: f64, cos_t: f64, sin_t: f64) -> CylindricalFieldVector {
    let omega = scenario.omega();
    let k = scenario.k01();
    let p = scenario.moment();
    let eps = EPS0 * EPS1;
    let zeta = (MU0 / eps).sqrt();
    let iwe = I * omega * eps;
    let pre = -I * omega * p / (4.0 * PI) * (I * k * r).exp();
    let sin2 = 2.0 * sin_t * cos_t;
    let cos2 = cos_t * cos_t - sin_t * sin_t;
    let e_rho = (-I * omega * MU0 / (2.0 * r) + 3.0 * zeta / (2.0 * r * r) - 3.0 / (2.0 * iwe * r * r * r)) * sin2;
    let e_x = I * omega * MU0 / r * sin_t * sin_t + (zeta / (r * r) - 1.0 / (iwe * r * r * r)) * (cos2 + cos_t * cos_t);
    CylindricalFieldVector::new(pre * e_rho, pre * e_x)
}

/// Direct field in closed form, near and far zones included.
pub fn los_closed_form(scenario: &Scenario) -> Result<CylindricalFieldVector> {
    let g = scenario.geometry;
    let r1 = g.derived().r1;
    if !(r1 > 0.0) {
        return Err(Error::Singular("observer coincides with the source"));
    }
    let dz = g.x() - g.x0();
    Ok(dipole_free_space(scenario, r1, dz / r1, g.rho() / r1))
}

/// Field of the image source weighted by `R∥(θ₂)`.
fn image_field(scenario: &Scenario) -> CylindricalFieldVector {
    let g = scenario.geometry;
    let d = g.derived();
    let f = dipole_free_space(scenario, d.r2, (g.x() + g.x0()) / d.r2, g.rho() / d.r2);
    f.scale(reflection_coeff(d.theta2, scenario))
}

/// Direct field plus the Fresnel-weighted image field.
pub fn space_wave_fresnel(scenario: &Scenario) -> Result<CylindricalFieldVector> {
    Ok(los_closed_form(scenario)? + image_field(scenario))
}

/// `−i·p·k01³/(4πε₀ε₁)`.
fn prefactor(scenario: &Scenario) -> Complex64 {
    let k = scenario.k01();
    -I * scenario.moment() * k * k * k / (4.0 * PI * EPS0 * EPS1)
}

/// Finite and semi-infinite spectral integrals for a source at effective
/// height `h` above (or `sign = −1`: below) the observer, weighted by the
/// two reflection kernels.
fn spectral_integrals<R, Q>(
    scenario: &Scenario,
    h: f64,
    sign: f64,
    refl: R,
    refl_h: Q,
    amplitude: f64,
    spec: &QuadratureSpec,
) -> Result<Integrated<CylindricalFieldVector>>
where
    R: Fn(f64) -> Complex64,
    Q: Fn(f64) -> Complex64,
{
    let start = Instant::now();
    let k = scenario.k01();
    let rho = scenario.geometry.rho();
    let kr = k * rho;
    let kh = k * h;

    let finite = |xi: f64| {
        let (s, c) = xi.sin_cos();
        let w = refl(xi) * (I * kh * c).exp() * (s * s);
        let arg = kr * s;
        CylindricalFieldVector::new(w * (sign * c) * I * bessel_j1(arg), w * (-s * bessel_j0(arg)))
    };
    let semi = |xi: f64| {
        let (s, c) = (xi.sinh(), xi.cosh());
        let w = refl_h(xi) * ((-kh * s).exp() * c * c);
        let arg = kr * c;
        CylindricalFieldVector::new(w * (I * sign * s) * I * bessel_j1(arg), w * (-c * bessel_j0(arg)))
    };

    let a = integrate_finite(finite, 0.0, FRAC_PI_2, &spec.resolving(kr + kh))?;
    let envelope = CoshCubedExpSinh {
        amplitude,
        decay: kh,
        oscillation: kr,
    };
    let b = integrate_semi_infinite(semi, &envelope, spec)?;

    let pre = prefactor(scenario);
    Ok(Integrated {
        value: (a.value - b.value.scale(I)).scale(pre),
        err_estimate: pre.norm() * (a.err_estimate + b.err_estimate),
        evals: a.evals + b.evals,
        wall_time: start.elapsed().as_secs_f64(),
        xi_max: b.xi_max,
    })
}

/// Direct field from its spectral integral. Used to validate
/// [`los_closed_form`]; requires `x ≠ x0`.
pub fn los_numeric(scenario: &Scenario, spec: &QuadratureSpec) -> Result<Integrated<CylindricalFieldVector>> {
    let g = scenario.geometry;
    let dz = g.x() - g.x0();
    if dz == 0.0 {
        return Err(Error::Singular("spectral direct field needs x != x0"));
    }
    let one = |_xi: f64| Complex64::new(1.0, 0.0);
    spectral_integrals(scenario, dz.abs(), dz.signum(), one, one, SQRT_2, spec)
}

/// Largest `|R′∥|` on a grid over the truncation range, at least 1.
fn hyperbolic_reflection_bound(scenario: &Scenario) -> f64 {
    let n = 2000;
    (0..=n)
        .map(|i| reflection_coeff_hyperbolic(TRUNCATION_CAP * i as f64 / n as f64, scenario).norm())
        .fold(1.0, f64::max)
}

/// Ground-scattered field from its spectral integral.
pub fn scattered_numeric(scenario: &Scenario, spec: &QuadratureSpec) -> Result<Integrated<CylindricalFieldVector>> {
    let g = scenario.geometry;
    let h = g.x() + g.x0();
    if !(h > 0.0) {
        return Err(Error::InvalidParameter {
            name: "x + x0",
            value: h,
            reason: "scattered integral needs x + x0 > 0",
        });
    }
    let amplitude = SQRT_2 * hyperbolic_reflection_bound(scenario);
    spectral_integrals(
        scenario,
        h,
        1.0,
        |xi| reflection_coeff(xi, scenario),
        |xi| reflection_coeff_hyperbolic(xi, scenario),
        amplitude,
        spec,
    )
}

/// Direct field (closed form), numerically integrated scattered field,
/// their sum, the space wave and the surface-wave remainder.
pub fn field_breakdown(scenario: &Scenario, spec: &QuadratureSpec) -> Result<Integrated<FieldBreakdown>> {
    let los = los_closed_form(scenario)?;
    let scattered = scattered_numeric(scenario, spec)?;
    let total = los + scattered.value;
    let space_wave = space_wave_fresnel(scenario)?;
    Ok(Integrated {
        value: FieldBreakdown {
            los,
            scattered: scattered.value,
            total,
            space_wave,
            surface_wave: total - space_wave,
        },
        err_estimate: scattered.err_estimate,
        evals: scattered.evals,
        wall_time: scattered.wall_time,
        xi_max: scattered.xi_max,
    })
}

/// Which parts of the original Hankel-form integrals to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaivePart {
    Direct,
    Scattered,
    Total,
}

/// The original spectral integrals over `k_ρ ∈ (−∞, ∞)` with the Hankel
/// kernel, evaluated verbatim: intervals of half-width `exclusion·k01`
/// around the singular points `k_ρ = 0, ±k01` are cut out and the infinite
/// range is truncated where the evanescent factor has decayed.
///
/// This is the formulation that breaks down numerically; it exists to
/// show that.
pub fn naive_numeric(
    scenario: &Scenario,
    part: NaivePart,
    exclusion: f64,
    spec: &QuadratureSpec,
) -> Result<Integrated<CylindricalFieldVector>> {
    if !(exclusion > 0.0 && exclusion < 0.5) {
        return Err(Error::InvalidParameter {
            name: "exclusion",
            value: exclusion,
            reason: "exclusion half-width must lie in (0, 0.5) in units of k01",
        });
    }
    let g = scenario.geometry;
    let dz = g.x() - g.x0();
    let hs = g.x() + g.x0();
    if part != NaivePart::Scattered && dz == 0.0 {
        return Err(Error::Singular("naive direct integral needs x != x0"));
    }
    let start = Instant::now();
    let (k, k2) = scenario.wavenumbers();
    let eps2 = scenario.eps2();
    let rho = g.rho();

    let integrand = |kr: f64| {
        let kappa1 = sqrt_im_pos(Complex64::new(k * k - kr * kr, 0.0));
        let kappa2 = sqrt_im_pos(k2 * k2 - kr * kr);
        let h0 = if kr >= 0.0 {
            hankel1_0(kr * rho)
        } else {
            -hankel1_0(-kr * rho).conj()
        };
        let weight = kr * kr.abs();
        let mut out = CylindricalFieldVector::default();
        if part != NaivePart::Scattered {
            let c = h0 * (I * kappa1 * dz.abs()).exp() * weight / kappa1;
            out = out + CylindricalFieldVector::new(kappa1 * dz.signum() * c, -c * kr.abs());
        }
        if part != NaivePart::Direct {
            let r = (eps2 * kappa1 - kappa2 * EPS1) / (kappa1 * (eps2 * kappa1 + kappa2 * EPS1));
            let c = h0 * (I * kappa1 * hs).exp() * weight * r;
            out = out + CylindricalFieldVector::new(kappa1 * c, -c * kr.abs());
        }
        out
    };

    // Beyond k01 the integrand decays like e^{−√(k_ρ² − k01²)·h}.
    let h_min = if part == NaivePart::Scattered { hs } else { dz.abs().min(hs) };
    let reach = (1.0 / (0.1 * spec.rel_tol)).ln() / h_min;
    let kmax = (k * k + reach * reach).sqrt() + k;
    let e = exclusion * k;
    let pieces = [(-kmax, -k - e), (-k + e, -e), (e, k - e), (k + e, kmax)];

    let mut value = CylindricalFieldVector::default();
    let mut err = 0.0;
    let mut evals = 0;
    for (a, b) in pieces {
        let r = integrate_finite(integrand, a, b, &spec.resolving((b - a).abs() * (rho + h_min)))?;
        value = value + r.value;
        err += r.err_estimate;
        evals += r.evals;
    }
    let pre = -I * scenario.moment() / (8.0 * PI * EPS0 * EPS1);
    Ok(Integrated {
        value: value.scale(pre),
        err_estimate: pre.norm() * err,
        evals,
        wall_time: start.elapsed().as_secs_f64(),
        xi_max: Some(kmax),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::{Geometry, Medium};

    fn fig5(rho: f64) -> Scenario {
        Scenario::table_ii(rho, 30e6).unwrap()
    }

    fn rel(a: CylindricalFieldVector, b: CylindricalFieldVector) -> f64 {
        (a - b).magnitude() / b.magnitude()
    }

    #[test]
    fn grazing_and_junction_values() {
        let s = fig5(1000.0);
        let r = reflection_coeff(FRAC_PI_2, &s);
        assert!((r + 1.0).norm() < 1e-12, "{r}");
        let rh = reflection_coeff_hyperbolic(0.0, &s);
        assert!((rh + 1.0).norm() < 1e-12, "{rh}");
    }

    #[test]
    fn normal_incidence() {
        let s = fig5(1000.0);
        let (k, k2) = s.wavenumbers();
        let e2 = s.eps2();
        let want = (e2 * k - k2) / (e2 * k + k2);
        assert!((reflection_coeff(0.0, &s) - want).norm() < 1e-14);
    }

    #[test]
    fn hyperbolic_limit() {
        let s = fig5(1000.0);
        let e2 = s.eps2();
        let want = (e2 - 1.0) / (e2 + 1.0);
        assert!((reflection_coeff_hyperbolic(20.0, &s) - want).norm() < 1e-9);
    }

    #[test]
    fn perfect_conductor_limit() {
        let s = fig5(1000.0).with_ground(Medium::new(80.0, 1e12, MU0).unwrap());
        assert!((reflection_coeff(0.7, &s) - 1.0).norm() < 1e-4);
    }

    #[test]
    fn reflection_bounded_on_lossy_ground() {
        let s = fig5(1000.0);
        for i in 0..=200 {
            let xi = FRAC_PI_2 * i as f64 / 200.0;
            assert!(reflection_coeff(xi, &s).norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn on_axis_direct_field() {
        // Observer straight above the source: no horizontal component.
        let s = fig5(1e-9).with_geometry(Geometry::new(60.0, 160.0, 1e-9).unwrap());
        let e = los_closed_form(&s).unwrap();
        assert!(e.e_rho.norm() < 1e-9 * e.e_x.norm());
    }

    #[test]
    fn direct_field_static_limit() {
        // k·r ≪ 1: E_x → p(3cos²θ − 1)/(4πε₀r³).
        let s = Scenario::table_ii(3.0, 1e3).unwrap().with_geometry(Geometry::new(10.0, 14.0, 3.0).unwrap());
        let e = los_closed_form(&s).unwrap();
        let p = s.moment();
        let want = p * (3.0 * 0.64 - 1.0) / (4.0 * PI * EPS0 * 125.0);
        assert!((e.e_x - want).norm() < 1e-6 * want.norm(), "{} vs {}", e.e_x, want);
    }

    #[test]
    fn spectral_direct_field_matches_closed_form() {
        let spec = QuadratureSpec::simpson(1e-6);
        for d in [100.0, 1000.0] {
            let s = fig5(d);
            let n = los_numeric(&s, &spec).unwrap();
            let c = los_closed_form(&s).unwrap();
            assert!(rel(n.value, c) < 1e-4, "d={d}: {}", rel(n.value, c));
        }
    }

    #[test]
    fn direct_field_reflection_symmetry() {
        let spec = QuadratureSpec::simpson(1e-7);
        let base = fig5(300.0);
        let up = base.with_geometry(Geometry::new(60.0, 70.0, 300.0).unwrap());
        let down = base.with_geometry(Geometry::new(60.0, 50.0, 300.0).unwrap());
        let (u, d) = (los_numeric(&up, &spec).unwrap().value, los_numeric(&down, &spec).unwrap().value);
        assert!((u.e_x - d.e_x).norm() < 1e-5 * u.e_x.norm());
        assert!((u.e_rho + d.e_rho).norm() < 1e-5 * u.e_rho.norm());
    }

    #[test]
    fn los_numeric_rejects_equal_heights() {
        let s = fig5(300.0).with_geometry(Geometry::new(20.0, 20.0, 300.0).unwrap());
        assert!(matches!(los_numeric(&s, &QuadratureSpec::default()), Err(Error::Singular(_))));
        assert!(los_closed_form(&s).is_ok());
    }

    #[test]
    fn breakdown_is_consistent() {
        let s = fig5(500.0);
        let b = field_breakdown(&s, &QuadratureSpec::simpson(1e-5)).unwrap().value;
        assert_eq!(b.total, b.los + b.scattered);
        assert_eq!(b.surface_wave, b.total - b.space_wave);
    }

    #[test]
    fn naive_path_requires_exclusion() {
        let s = fig5(300.0);
        assert!(naive_numeric(&s, NaivePart::Total, 0.0, &QuadratureSpec::default()).is_err());
        let r = naive_numeric(&s, NaivePart::Direct, 1e-3, &QuadratureSpec::simpson(1e-4)).unwrap();
        assert!(r.value.magnitude().is_finite());
    }
}
