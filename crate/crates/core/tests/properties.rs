//! Property tests over the media, special functions, quadrature and
//! field solvers.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use proptest::prelude::*;

use sommerfeld::asymptotics::{
    etalon_scattered, etalon_scattered_large_arg, pole_newton, pole_xi_p, pseudo_surface_wave_formula,
    spm_reflected,
};
use sommerfeld::em::{Geometry, Medium, Scenario, Source, MU0};
use sommerfeld::fields::{
    los_closed_form, reflection_coeff, reflection_coeff_hyperbolic, scattered_numeric, CylindricalFieldVector,
};
use sommerfeld::quadrature::{integrate_finite, integrate_semi_infinite, Method, QuadratureSpec};
use sommerfeld::specfun::{erf_complex, ERF_IM_LIMIT};

fn scenario(f: f64, x0: f64, x: f64, rho: f64) -> Scenario {
    Scenario::table_ii(rho, f)
        .unwrap()
        .with_geometry(Geometry::new(x0, x, rho).unwrap())
}

fn rel(a: CylindricalFieldVector, b: CylindricalFieldVector) -> f64 {
    (a - b).magnitude() / b.magnitude()
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

// --- media and geometry -------------------------------------------------

proptest! {
    #[test]
    fn lossy_ground_has_positive_imaginary_k02_squared(
        f in log_uniform(1e5, 1e9), sigma in log_uniform(1e-4, 1e3), eps_r in 1.0f64..100.0,
    ) {
        let s = Scenario::table_ii(1000.0, f).unwrap().with_ground(Medium::new(eps_r, sigma, MU0).unwrap());
        let k2 = s.k02() * s.k02();
        prop_assert!(k2.im > 0.0);
        prop_assert!(s.k02().im >= 0.0);
    }

    #[test]
    fn image_path_is_longer_and_angles_are_complementary(
        x0 in 0.1f64..500.0, x in 0.0f64..500.0, rho in log_uniform(1.0, 1e6),
    ) {
        let d = Geometry::new(x0, x, rho).unwrap().derived();
        prop_assert!(d.r2 > d.r1);
        prop_assert!((d.phi - (FRAC_PI_2 - d.theta2)).abs() <= 4.0 * f64::EPSILON);
        prop_assert!((d.phi - ((x + x0) / rho).atan()).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn delta_and_numerical_distance_grow_with_frequency(f in log_uniform(1e5, 5e8), ratio in 1.01f64..10.0) {
        let lo = Scenario::table_ii(2000.0, f).unwrap();
        let hi = lo.with_frequency(f * ratio).unwrap();
        prop_assert!(hi.delta().unwrap() > lo.delta().unwrap());
        prop_assert!(hi.numerical_distance().unwrap() > lo.numerical_distance().unwrap());
    }
}

#[test]
fn grazing_angle_vanishes_far_away() {
    let phis: Vec<f64> = [1e2, 1e3, 1e4, 1e5, 1e6]
        .iter()
        .map(|&rho| Geometry::new(60.0, 15.0, rho).unwrap().derived().phi)
        .collect();
    assert!(phis.windows(2).all(|w| w[1] < w[0]));
    assert!(phis[4] < 1e-4);
}

// --- special functions --------------------------------------------------

proptest! {
    #[test]
    fn erf_is_odd_and_commutes_with_conjugation(re in -20.0f64..20.0, im in -ERF_IM_LIMIT..ERF_IM_LIMIT) {
        let z = Complex64::new(re, im);
        // |erf| overflows far off the real axis; symmetry is only asked of finite values
        let Ok(w) = erf_complex(z) else { return Ok(()) };
        let neg = erf_complex(-z).unwrap();
        let conj = erf_complex(z.conj()).unwrap();
        let tol = 1e-13 * w.norm().max(1.0);
        prop_assert!((neg + w).norm() <= tol, "erf(-z) = {neg}, erf(z) = {w}");
        prop_assert!((conj - w.conj()).norm() <= tol);
    }

    #[test]
    fn erf_saturates_on_the_real_axis(x in 6.0f64..1e3) {
        let w = erf_complex(Complex64::new(x, 0.0)).unwrap();
        prop_assert!((1.0 - w).norm() < 1e-15);
    }
}

// --- reflection coefficients ---------------------------------------------

proptest! {
    #[test]
    fn reflection_coefficient_is_even(xi in 0.0f64..FRAC_PI_2, f in log_uniform(1e5, 1e9)) {
        let s = Scenario::table_ii(1000.0, f).unwrap();
        prop_assert_eq!(reflection_coeff(xi, &s), reflection_coeff(-xi, &s));
    }
}

#[test]
fn reflection_coefficient_at_grazing_and_junction() {
    for f in [3e5, 30e6, 1e9] {
        let s = Scenario::table_ii(1000.0, f).unwrap();
        // cos(FRAC_PI_2) is 6e-17, not 0
        assert!((reflection_coeff(FRAC_PI_2, &s) + 1.0).norm() < 1e-12);
        assert_eq!(reflection_coeff_hyperbolic(0.0, &s), Complex64::new(-1.0, 0.0));
    }
}

// --- quadrature ---------------------------------------------------------

/// Corpus integrands with a known value: `x^n` on [0, b], `e^{iωx}` on
/// [0, 1] and `e^{−x}·cos(ωx)` on [0, ∞).
#[derive(Debug, Clone, Copy)]
enum Corpus {
    Power { n: i32, b: f64 },
    Oscillating { omega: f64 },
    Damped { omega: f64 },
}

impl Corpus {
    fn exact(&self) -> Complex64 {
        match *self {
            Corpus::Power { n, b } => Complex64::new(b.powi(n + 1) / (n + 1) as f64, 0.0),
            Corpus::Oscillating { omega } => {
                (Complex64::new(0.0, omega).exp() - 1.0) / Complex64::new(0.0, omega)
            }
            Corpus::Damped { omega } => Complex64::new(1.0 / (1.0 + omega * omega), 0.0),
        }
    }

    fn integrate(&self, spec: &QuadratureSpec) -> (Complex64, f64, usize) {
        let r = match *self {
            Corpus::Power { n, b } => integrate_finite(|x: f64| Complex64::new(x.powi(n), 0.0), 0.0, b, spec),
            Corpus::Oscillating { omega } => {
                integrate_finite(|x: f64| Complex64::new(0.0, omega * x).exp(), 0.0, 1.0, spec)
            }
            Corpus::Damped { omega } => integrate_semi_infinite(
                |x: f64| Complex64::new((-x).exp() * (omega * x).cos(), 0.0),
                &|x: f64| (-x).exp(),
                spec,
            ),
        }
        .expect("corpus integrand converges");
        (r.value, r.err_estimate, r.evals)
    }
}

fn corpus() -> impl Strategy<Value = Corpus> {
    prop_oneof![
        (0i32..8, 0.5f64..3.0).prop_map(|(n, b)| Corpus::Power { n, b }),
        (0.5f64..60.0).prop_map(|omega| Corpus::Oscillating { omega }),
        (0.0f64..20.0).prop_map(|omega| Corpus::Damped { omega }),
    ]
}

fn rel_c(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tolerance_consistency(c in corpus(), method in prop_oneof![Just(Method::AdaptiveSimpson), Just(Method::Trapezoidal)]) {
        let (loose, _, _) = c.integrate(&QuadratureSpec::new(method, 1e-3).unwrap());
        let (tight, _, _) = c.integrate(&QuadratureSpec::new(method, 1e-9).unwrap());
        prop_assert!(rel_c(loose, tight) < 2e-3, "{c:?}: {loose} vs {tight}");
    }

    #[test]
    fn simpson_and_trapezoid_agree(c in corpus(), tol in prop_oneof![Just(1e-4), Just(1e-6), Just(1e-8)]) {
        let (s, _, _) = c.integrate(&QuadratureSpec::simpson(tol));
        let (t, _, _) = c.integrate(&QuadratureSpec::trapezoid(tol));
        prop_assert!(rel_c(s, t) < 3.0 * tol, "{c:?}: {s} vs {t}");
    }

    #[test]
    fn tighter_tolerance_never_costs_less(c in corpus(), method in prop_oneof![Just(Method::AdaptiveSimpson), Just(Method::Trapezoidal)]) {
        let evals: Vec<usize> = [1e-3, 1e-6, 1e-9]
            .iter()
            .map(|&t| c.integrate(&QuadratureSpec::new(method, t).unwrap()).2)
            .collect();
        prop_assert!(evals[0] <= evals[1] && evals[1] <= evals[2], "{c:?}: {evals:?}");
    }

    #[test]
    fn results_meet_the_requested_tolerance(c in corpus(), tol in prop_oneof![Just(1e-4), Just(1e-7), Just(1e-10)]) {
        let (v, _, _) = c.integrate(&QuadratureSpec::simpson(tol));
        prop_assert!(rel_c(v, c.exact()) < 3.0 * tol, "{c:?} simpson: {v} vs {}", c.exact());
        // the trapezoid's h² convergence cannot reach 1e-10 within the default budget
        if tol >= 1e-7 {
            let (v, _, _) = c.integrate(&QuadratureSpec::trapezoid(tol));
            prop_assert!(rel_c(v, c.exact()) < 3.0 * tol, "{c:?} trapezoid: {v} vs {}", c.exact());
        }
    }

    #[test]
    fn simpson_error_estimate_bounds_polynomial_error(n in 0i32..10, b in 0.5f64..3.0, tol in prop_oneof![Just(1e-3), Just(1e-6), Just(1e-9)]) {
        let c = Corpus::Power { n, b };
        let (v, err, _) = c.integrate(&QuadratureSpec::simpson(tol));
        let truth = (v - c.exact()).norm();
        // rounding floor for exactly integrated low degrees
        prop_assert!(truth <= err + 64.0 * f64::EPSILON * c.exact().norm(), "n = {n}: error {truth:e} > estimate {err:e}");
    }
}

// --- fields -------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fields_are_linear_in_the_source(f in log_uniform(1e6, 3e8), rho in log_uniform(100.0, 5000.0)) {
        let s = Scenario::table_ii(rho, f).unwrap();
        let d = s.with_source(Source::new(2.0 * s.source.current(), s.source.length()).unwrap());
        let twice = |v: CylindricalFieldVector| v * 2.0;
        prop_assert_eq!(los_closed_form(&d).unwrap(), twice(los_closed_form(&s).unwrap()));
        prop_assert_eq!(spm_reflected(&d).unwrap().field, twice(spm_reflected(&s).unwrap().field));
        prop_assert_eq!(etalon_scattered(&d).unwrap(), twice(etalon_scattered(&s).unwrap()));
        let q = QuadratureSpec::simpson(1e-6);
        prop_assert_eq!(scattered_numeric(&d, &q).unwrap().value, twice(scattered_numeric(&s, &q).unwrap().value));
    }

    #[test]
    fn spm_falls_off_as_inverse_image_distance(f in log_uniform(1e6, 1e9), rho in log_uniform(50.0, 1e4), m in 1.5f64..8.0) {
        let near = scenario(f, 60.0, 15.0, rho);
        let far = scenario(f, 60.0 * m, 15.0 * m, rho * m);
        let a = spm_reflected(&near).unwrap().field.magnitude();
        let b = spm_reflected(&far).unwrap().field.magnitude();
        prop_assert!((b * m / a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_and_trapezoid_agree_on_the_scattered_field(f in log_uniform(1e6, 1e8), rho in log_uniform(200.0, 3000.0)) {
        let s = Scenario::table_ii(rho, f).unwrap();
        let tol = 1e-6;
        let a = scattered_numeric(&s, &QuadratureSpec::simpson(tol)).unwrap().value;
        let b = scattered_numeric(&s, &QuadratureSpec::trapezoid(tol)).unwrap().value;
        prop_assert!(rel(a, b) < 3.0 * tol, "{}", rel(a, b));
    }

    #[test]
    fn large_argument_etalon_reproduces_spm(f in log_uniform(3e8, 1e9), rho in log_uniform(100.0, 1000.0)) {
        let s = Scenario::table_ii(rho, f).unwrap();
        let spm = spm_reflected(&s).unwrap();
        let et = etalon_scattered_large_arg(&s).unwrap();
        prop_assume!(spm.condition > 5.0 && et.condition > 5.0);
        prop_assert!(rel(et.value, spm.field) < 0.02, "{}", rel(et.value, spm.field));
    }

    #[test]
    fn pseudo_surface_wave_matches_etalon_well_below_the_skin_angle(
        f in log_uniform(1e5, 3e6), rho in log_uniform(1e4, 3e5), h in 0.5f64..10.0,
    ) {
        let s = scenario(f, h, h, rho);
        let delta = s.delta().unwrap();
        prop_assume!(s.derived().phi < 0.02 * delta && s.numerical_distance().unwrap() < 0.02);
        let e = etalon_scattered(&s).unwrap();
        let p = pseudo_surface_wave_formula(&s).unwrap();
        prop_assert!(rel(p, e) < 0.05, "{}", rel(p, e));
    }
}

/// The literal small-argument nesting claim: grazing angle below 0.5° and
/// numerical distance below 0.3 suffice for 5% agreement. They do not; the
/// error grows roughly as 0.7·φ/δ + 1.3·(numerical distance).
#[test]
#[ignore = "known red: grazing below 0.5 deg is not below the skin angle delta"]
fn pseudo_surface_wave_nesting_as_stated() {
    let mut worst: f64 = 0.0;
    for f in [3e5, 1e6, 3e6, 10e6] {
        for (x0, x) in [(60.0, 15.0), (10.0, 5.0), (1.0, 1.0)] {
            for rho in [2e3, 5e3, 1e4, 2e4, 5e4, 1e5, 2e5] {
                let s = scenario(f, x0, x, rho);
                if s.derived().phi < 0.5f64.to_radians() && s.numerical_distance().unwrap() < 0.3 {
                    let e = etalon_scattered(&s).unwrap();
                    worst = worst.max(rel(pseudo_surface_wave_formula(&s).unwrap(), e));
                }
            }
        }
    }
    assert!(worst < 0.05, "worst relative difference {worst:.3}");
}

#[test]
fn pole_estimate_is_second_order_in_delta() {
    for f in [1e6, 3e6, 10e6, 30e6, 100e6, 300e6, 1e9] {
        let s = Scenario::table_ii(1000.0, f).unwrap();
        let delta = s.delta().unwrap();
        let ratio = (pole_newton(&s).unwrap() - pole_xi_p(&s).unwrap().xi_p).norm() / (delta * delta);
        assert!(ratio <= 5.0, "{f:e} Hz: ratio {ratio}");
    }
}
