//! Physical constants, media, geometry and the dipole source.
//!
//! Time dependence is `e^{-iωt}` throughout. The upper half-space is free
//! space (relative permittivity 1); the ground is a homogeneous lossy
//! half-space below the plane `x = 0`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s. Only used for reporting wavelengths.
pub const C_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854e-12;
/// Vacuum permeability, H/m.
pub const MU0: f64 = 4.0e-7 * PI;
/// Relative permittivity of the upper medium (air).
pub const EPS1: f64 = 1.0;

/// Principal complex square root, flipped if needed so that `Im ≥ 0`.
pub fn sqrt_im_pos(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// A homogeneous half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    eps_r: f64,
    sigma: f64,
    mu: f64,
}

impl Medium {
    pub fn new(eps_r: f64, sigma: f64, mu: f64) -> Result<Self> {
        if !(eps_r >= 1.0 && eps_r.is_finite()) {
            return Err(invalid("eps_r", eps_r, "relative permittivity must be >= 1"));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", sigma, "conductivity must be >= 0"));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid("mu", mu, "permeability must be > 0"));
        }
        Ok(Self { eps_r, sigma, mu })
    }

    pub fn vacuum() -> Self {
        Self {
            eps_r: 1.0,
            sigma: 0.0,
            mu: MU0,
        }
    }

    /// Sea water: εr = 80, σ = 4.8 S/m, μ = μ₀.
    pub fn sea_water() -> Self {
        Self {
            eps_r: 80.0,
            sigma: 4.8,
            mu: MU0,
        }
    }

    pub fn eps_r(&self) -> f64 {
        self.eps_r
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `εr + iσ/(ωε₀)`.
    pub fn complex_permittivity(&self, omega: f64) -> Complex64 {
        Complex64::new(self.eps_r, self.sigma / (omega * EPS0))
    }
}

/// Dipole height, observer height and horizontal separation, in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    x0: f64,
    x: f64,
    rho: f64,
}

/// Distances and angles derived from a [`Geometry`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedGeometry {
    /// Source to observer.
    pub r1: f64,
    /// Image source to observer.
    pub r2: f64,
    /// Polar angle of the observer seen from the source, measured from +x.
    pub theta1: f64,
    /// Incidence angle at the specular point.
    pub theta2: f64,
    /// Grazing angle `π/2 − θ₂`.
    pub phi: f64,
}

impl Geometry {
    pub fn new(x0: f64, x: f64, rho: f64) -> Result<Self> {
        if !(x0 > 0.0 && x0.is_finite()) {
            return Err(invalid("x0", x0, "dipole height must be > 0"));
        }
        if !(x >= 0.0 && x.is_finite()) {
            return Err(invalid("x", x, "observer height must be >= 0"));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(invalid("rho", rho, "horizontal distance must be > 0"));
        }
        Ok(Self { x0, x, rho })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.x0, self.x, rho)
    }

    pub fn with_heights(&self, x0: f64, x: f64) -> Result<Self> {
        Self::new(x0, x, self.rho)
    }

    pub fn derived(&self) -> DerivedGeometry {
        let dz = self.x - self.x0;
        let sz = self.x + self.x0;
        DerivedGeometry {
            r1: self.rho.hypot(dz),
            r2: self.rho.hypot(sz),
            theta1: self.rho.atan2(dz),
            theta2: self.rho.atan2(sz),
            phi: sz.atan2(self.rho),
        }
    }
}

/// A short current element of length `length` carrying `current`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    current: f64,
    length: f64,
}

impl Source {
    pub fn new(current: f64, length: f64) -> Result<Self> {
        if !(current > 0.0 && current.is_finite()) {
            return Err(invalid("current", current, "source current must be > 0"));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("length", length, "dipole length must be > 0"));
        }
        Ok(Self { current, length })
    }

    pub fn current(&self) -> f64 {
        self.current
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Dipole moment `p` from the current moment `I·l = −iωp`, so that
    /// `p = i·I·l/ω` and `|p| = I·l/ω`.
    pub fn moment(&self, omega: f64) -> Complex64 {
        Complex64::new(0.0, self.current * self.length / omega)
    }
}

/// Everything needed for one field evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub source: Source,
    pub geometry: Geometry,
    pub ground: Medium,
    frequency: f64,
}

impl Scenario {
    pub fn new(source: Source, geometry: Geometry, ground: Medium, frequency: f64) -> Result<Self> {
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(invalid("frequency", frequency, "frequency must be > 0"));
        }
        Ok(Self {
            source,
            geometry,
            ground,
            frequency,
        })
    }

    /// Sea water ground, 1 A over 0.1 m, dipole at 60 m, observer at 15 m.
    pub fn table_ii(rho: f64, frequency: f64) -> Result<Self> {
        Self::new(
            Source::new(1.0, 0.1)?,
            Geometry::new(60.0, 15.0, rho)?,
            Medium::sea_water(),
            frequency,
        )
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn with_frequency(&self, frequency: f64) -> Result<Self> {
        Self::new(self.source, self.geometry, self.ground, frequency)
    }

    pub fn with_geometry(&self, geometry: Geometry) -> Self {
        Self { geometry, ..*self }
    }

    pub fn with_ground(&self, ground: Medium) -> Self {
        Self { ground, ..*self }
    }

    pub fn with_source(&self, source: Source) -> Self {
        Self { source, ..*self }
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI * self.frequency
    }

    /// Free-space wavenumber `ω√(μ₀ε₀ε₁)`.
    pub fn k01(&self) -> f64 {
        self.omega() * (MU0 * EPS0 * EPS1).sqrt()
    }

    /// Ground wavenumber `ω√(μ₀ε₀ε′r)`, branch with `Im ≥ 0`.
    pub fn k02(&self) -> Complex64 {
        sqrt_im_pos(self.eps2()) * self.k01()
    }

    /// `(k01, k02)`.
    pub fn wavenumbers(&self) -> (f64, Complex64) {
        (self.k01(), self.k02())
    }

    /// Complex relative permittivity of the ground.
    pub fn eps2(&self) -> Complex64 {
        self.ground.complex_permittivity(self.omega())
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.k01()
    }

    pub fn moment(&self) -> Complex64 {
        self.source.moment(self.omega())
    }

    /// `k01·l < 0.1`.
    pub fn is_hertzian(&self) -> bool {
        self.source.length * self.k01() < 0.1
    }

    /// `σ/(ωε₀)`.
    pub fn loss_ratio(&self) -> f64 {
        self.ground.sigma / (self.omega() * EPS0)
    }

    /// `δ = √(ωε₀ε₁/(2σ))`.
    pub fn delta(&self) -> Result<f64> {
        if self.ground.sigma <= 0.0 {
            return Err(Error::Regime {
                quantity: "sigma",
                value: self.ground.sigma,
                requirement: "etalon regime requires σ ≫ ωε₀",
            });
        }
        Ok((self.omega() * EPS0 * EPS1 / (2.0 * self.ground.sigma)).sqrt())
    }

    /// `δ < 0.1`.
    pub fn delta_in_regime(&self) -> Result<bool> {
        Ok(self.delta()? < 0.1)
    }

    /// Numerical distance `k01·ρ·δ²`.
    pub fn numerical_distance(&self) -> Result<f64> {
        let d = self.delta()?;
        Ok(self.k01() * self.geometry.rho * d * d)
    }

    pub fn derived(&self) -> DerivedGeometry {
        self.geometry.derived()
    }
}

/// Grazing angle from `φ = π/2 − θ₂`, kept for cross-checks against
/// [`DerivedGeometry::phi`].
pub fn grazing_from_theta2(theta2: f64) -> f64 {
    FRAC_PI_2 - theta2
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter { name, value, reason }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sea(f: f64, rho: f64) -> Scenario {
        Scenario::table_ii(rho, f).unwrap()
    }

    #[test]
    fn free_space_wavenumber() {
        let s = sea(30e6, 1000.0);
        assert_relative_eq!(s.k01(), 2.0 * PI * 30e6 / C_LIGHT, max_relative = 2e-5);
        let s = sea(300e3, 1000.0);
        assert_relative_eq!(s.k01(), 6.288e-3, max_relative = 1e-4);
        assert_relative_eq!(sea(30e6, 1.0).k01(), 0.6288, max_relative = 1e-4);
    }

    #[test]
    fn sea_water_k02() {
        let s = sea(30e6, 1000.0);
        let omega = 2.0 * PI * 30e6;
        let ratio = 4.8 / (omega * 8.854e-12);
        assert_relative_eq!(ratio, 2876.0, max_relative = 1e-3);
        let expected = Complex64::new(80.0, ratio).sqrt() * s.k01();
        let k02 = s.k02();
        assert_relative_eq!(k02.re, expected.re, max_relative = 1e-14);
        assert_relative_eq!(k02.im, expected.im, max_relative = 1e-14);
        assert!(k02.im > 0.0);
        assert!(k02.norm() > s.k01());
    }

    #[test]
    fn grazing_angles_of_table_ii_paths() {
        let g = |d: f64| Geometry::new(60.0, 15.0, d).unwrap().derived().phi.to_degrees();
        assert!((g(3000.0) - 1.43).abs() < 0.01);
        assert!((g(10_000.0) - 0.43).abs() < 0.01);
        assert!((g(30_000.0) - 0.14).abs() < 0.01);
    }

    #[test]
    fn equal_heights_put_observer_at_right_angle() {
        let d = Geometry::new(25.0, 25.0, 310.0).unwrap().derived();
        assert_eq!(d.r1, 310.0);
        assert_eq!(d.theta1, FRAC_PI_2);
    }

    #[test]
    fn delta_values() {
        assert_relative_eq!(sea(30e6, 1.0).delta().unwrap(), 0.013185, max_relative = 1e-4);
        let hf = sea(1e9, 1.0).delta().unwrap();
        assert_relative_eq!(hf, 0.076128, max_relative = 1e-4);
        assert!(hf < 0.1);
        let pec = sea(30e6, 1.0).with_ground(Medium::new(80.0, 1e12, MU0).unwrap());
        assert!(pec.delta().unwrap() < 1e-6);
    }

    #[test]
    fn delta_requires_conductivity() {
        let s = sea(30e6, 1.0).with_ground(Medium::new(4.0, 0.0, MU0).unwrap());
        assert!(matches!(s.delta(), Err(Error::Regime { .. })));
        assert!(s.numerical_distance().is_err());
    }

    #[test]
    fn numerical_distance_values() {
        let nd = sea(30e6, 1400.0).numerical_distance().unwrap();
        assert_relative_eq!(nd, 0.15303, max_relative = 1e-3);
        let lo = sea(3e6, 1400.0).numerical_distance().unwrap();
        let hi = sea(300e6, 1400.0).numerical_distance().unwrap();
        assert_relative_eq!(hi / lo, 1.0e4, max_relative = 1e-12);
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(Medium::new(0.5, 1.0, MU0).is_err());
        assert!(Medium::new(4.0, -1.0, MU0).is_err());
        assert!(Medium::new(4.0, 1.0, 0.0).is_err());
        assert!(Geometry::new(0.0, 1.0, 1.0).is_err());
        assert!(Geometry::new(1.0, -1.0, 1.0).is_err());
        assert!(Geometry::new(1.0, 1.0, 0.0).is_err());
        assert!(Source::new(0.0, 0.1).is_err());
        assert!(Scenario::table_ii(100.0, 0.0).is_err());
        assert!(Scenario::table_ii(100.0, f64::NAN).is_err());
    }

    #[test]
    fn moment_convention() {
        let s = sea(30e6, 100.0);
        let p = s.moment();
        assert_eq!(p.re, 0.0);
        assert_relative_eq!(p.im, 0.1 / s.omega(), max_relative = 1e-15);
        // I·l = −iωp
        let il = Complex64::new(0.0, -s.omega()) * p;
        assert_relative_eq!(il.re, 0.1, max_relative = 1e-15);
    }

    #[test]
    fn hertzian_flag() {
        assert!(sea(30e6, 100.0).is_hertzian());
        assert!(!sea(1e9, 100.0).is_hertzian());
    }
}
