//! Numerical integration of complex- and vector-valued functions of one
//! real variable.
//!
//! Two rules are provided, selected by [`Method`]:
//!
//! * adaptive Simpson: recursive bisection with the local test
//!   `|S(a,b) − S(a,m) − S(m,b)| ≤ 15·ε`, the tolerance halved on each split
//!   and the accepted value Richardson-corrected;
//! * trapezoidal: the panel count is doubled globally until two successive
//!   estimates agree to `rel_tol`.
//!
//! Semi-infinite ranges are truncated with a caller-supplied [`Envelope`]
//! whose tail integral bounds the discarded part.

use std::ops::{Add, Mul, Sub};
use std::time::Instant;

use num_complex::Complex64;

use crate::error::QuadratureError;

/// Values that can be integrated: a vector space over the reals with a norm.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn norm(&self) -> f64;
    fn is_finite(&self) -> bool;
    fn components(&self) -> Vec<Complex64>;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn components(&self) -> Vec<Complex64> {
        vec![Complex64::new(*self, 0.0)]
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn components(&self) -> Vec<Complex64> {
        vec![*self]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    AdaptiveSimpson,
    Trapezoidal,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::AdaptiveSimpson => "simpson",
            Method::Trapezoidal => "trapezoid",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = QuadratureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "simpson" | "adaptive_simpson" | "adaptivesimpson" => Ok(Method::AdaptiveSimpson),
            "trapezoid" | "trapezoidal" | "trap" => Ok(Method::Trapezoidal),
            _ => Err(QuadratureError::Spec("unknown quadrature method")),
        }
    }
}

pub const MIN_REL_TOL: f64 = 1e-12;
pub const MAX_REL_TOL: f64 = 1e-2;
pub const DEFAULT_MAX_EVALS: usize = 10_000_000;
pub const DEFAULT_INITIAL_PANELS: usize = 64;
/// Largest abscissa considered when truncating a semi-infinite range.
pub const TRUNCATION_CAP: f64 = 50.0;

const MAX_DEPTH: u32 = 50;
/// Simpson panels are never accepted above this depth, so the coarsest
/// accepted panel is 1/2^MIN_DEPTH of an initial panel.
const MIN_DEPTH: u32 = 1;
const TAIL_SAFETY: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub method: Method,
    pub rel_tol: f64,
    pub max_evals: usize,
    /// Starting panel count: the trapezoidal rule doubles from here, and
    /// adaptive Simpson subdivides each of these panels independently.
    pub initial_panels: usize,
}

impl QuadratureSpec {
    pub fn new(method: Method, rel_tol: f64) -> Result<Self, QuadratureError> {
        let spec = Self {
            method,
            rel_tol,
            max_evals: DEFAULT_MAX_EVALS,
            initial_panels: DEFAULT_INITIAL_PANELS,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn simpson(rel_tol: f64) -> Self {
        Self::new(Method::AdaptiveSimpson, rel_tol).expect("rel_tol out of range")
    }

    pub fn trapezoid(rel_tol: f64) -> Self {
        Self::new(Method::Trapezoidal, rel_tol).expect("rel_tol out of range")
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    pub fn with_initial_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels;
        self
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(MIN_REL_TOL..=MAX_REL_TOL).contains(&self.rel_tol) {
            return Err(QuadratureError::Spec("rel_tol must lie in [1e-12, 1e-2]"));
        }
        if self.max_evals < 100 {
            return Err(QuadratureError::Spec("max_evals must be at least 100"));
        }
        if self.initial_panels < 1 {
            return Err(QuadratureError::Spec("initial_panels must be at least 1"));
        }
        Ok(())
    }
}

impl QuadratureSpec {
    /// Copy with enough initial panels for an integrand whose phase
    /// advances by `phase_span` radians over the range: one panel per half
    /// period, never fewer than `initial_panels`, capped so the initial
    /// sampling uses at most a quarter of the budget.
    pub fn resolving(&self, phase_span: f64) -> Self {
        let wanted = if phase_span.is_finite() {
            (phase_span / std::f64::consts::PI).ceil() as usize
        } else {
            0
        };
        let cap = (self.max_evals / 8).max(1);
        Self {
            initial_panels: self.initial_panels.max(wanted.min(cap)),
            ..*self
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::simpson(1e-6)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<V> {
    pub value: V,
    pub err_estimate: f64,
    pub evals: usize,
    /// Seconds.
    pub wall_time: f64,
    /// Upper integration limit actually used for a semi-infinite range.
    pub xi_max: Option<f64>,
}

/// Upper bound on `|f|` beyond some point, with its tail integral.
pub trait Envelope {
    fn bound(&self, x: f64) -> f64;

    /// Accumulated phase (radians) of whatever oscillates under the
    /// envelope. Only differences matter; they seed the initial partition
    /// of each window with about one panel per half period.
    fn phase(&self, _x: f64) -> f64 {
        0.0
    }

    /// `∫_x^∞ bound`. The default integrates `bound` numerically on
    /// `[x, TRUNCATION_CAP]` and ignores anything beyond the cap.
    fn tail(&self, x: f64) -> f64 {
        if x >= TRUNCATION_CAP {
            return 0.0;
        }
        let spec = QuadratureSpec::simpson(1e-10).with_initial_panels(256);
        match integrate_finite(|t: f64| self.bound(t), x, TRUNCATION_CAP, &spec) {
            Ok(r) => r.value,
            Err(_) => f64::INFINITY,
        }
    }
}

impl<F: Fn(f64) -> f64> Envelope for F {
    fn bound(&self, x: f64) -> f64 {
        self(x)
    }
}

/// `A·cosh³ξ·e^{−a·sinhξ}`, whose tail has the closed form
/// `A·e^{−aS}[(1+S²)/a + 2S/a² + 2/a³]`, `S = sinh ξ`.
///
/// `oscillation` is the `b` in a `J(b·coshξ)` factor under the envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoshCubedExpSinh {
    pub amplitude: f64,
    pub decay: f64,
    pub oscillation: f64,
}

impl Envelope for CoshCubedExpSinh {
    fn bound(&self, x: f64) -> f64 {
        let c = x.cosh();
        self.amplitude * c * c * c * (-self.decay * x.sinh()).exp()
    }

    fn tail(&self, x: f64) -> f64 {
        let s = x.sinh();
        let a = self.decay;
        self.amplitude * (-a * s).exp() * ((1.0 + s * s) / a + 2.0 * s / (a * a) + 2.0 / (a * a * a))
    }

    fn phase(&self, x: f64) -> f64 {
        self.oscillation * x.cosh()
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate_finite<V, F>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult<V>, QuadratureError>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    spec.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadratureError::Spec("integration range must satisfy a < b"));
    }
    let start = Instant::now();
    let mut budget = Budget::new(spec.max_evals);
    let out = integrate_range(&f, a, b, spec, 0.0, &mut budget)?;
    Ok(QuadratureResult {
        value: out.value,
        err_estimate: out.err,
        evals: budget.used,
        wall_time: start.elapsed().as_secs_f64(),
        xi_max: None,
    })
}

/// Integrates `f` over `[0, ∞)`, truncating where the envelope tail falls
/// below `0.1·rel_tol·|estimate|`.
pub fn integrate_semi_infinite<V, F, E>(
    f: F,
    envelope: &E,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult<V>, QuadratureError>
where
    V: QuadValue,
    F: Fn(f64) -> V,
    E: Envelope + ?Sized,
{
    spec.validate()?;
    let start = Instant::now();
    let mut budget = Budget::new(spec.max_evals);

    // First window: enough of the envelope mass to get a usable scale.
    let total = envelope.tail(0.0);
    let mut upper = advance(envelope, 0.0, 1e-3 * total)?;
    if upper <= 0.0 {
        upper = 1.0;
    }
    let window = |a: f64, b: f64| spec.resolving((envelope.phase(b) - envelope.phase(a)).abs());
    let first = integrate_range(&f, 0.0, upper, &window(0.0, upper), 0.0, &mut budget)?;
    let mut value = first.value;
    let mut err = first.err;

    loop {
        let target = TAIL_SAFETY * spec.rel_tol * value.norm();
        if envelope.tail(upper) <= target {
            break;
        }
        let next = advance(envelope, upper, target)?;
        let piece = integrate_range(&f, upper, next, &window(upper, next), value.norm(), &mut budget)?;
        value = value + piece.value;
        err += piece.err;
        upper = next;
    }

    Ok(QuadratureResult {
        value,
        err_estimate: err,
        evals: budget.used,
        wall_time: start.elapsed().as_secs_f64(),
        xi_max: Some(upper),
    })
}

/// Smallest point on a 1/8 grid beyond `from` where the tail drops to `target`.
fn advance<E: Envelope + ?Sized>(envelope: &E, from: f64, target: f64) -> Result<f64, QuadratureError> {
    let mut x = from;
    while envelope.tail(x) > target {
        x += 0.125;
        if x >= TRUNCATION_CAP {
            return Err(QuadratureError::Truncation { cap: TRUNCATION_CAP });
        }
    }
    Ok(x)
}

struct Budget {
    used: usize,
    max: usize,
    exhausted: bool,
}

impl Budget {
    fn new(max: usize) -> Self {
        Self {
            used: 0,
            max,
            exhausted: false,
        }
    }

    fn eval<V: QuadValue, F: Fn(f64) -> V>(&mut self, f: &F, x: f64) -> Result<V, QuadratureError> {
        self.used += 1;
        let v = f(x);
        if !v.is_finite() {
            return Err(QuadratureError::Integrand { at: x });
        }
        Ok(v)
    }

    fn can_spend(&self, n: usize) -> bool {
        self.used + n <= self.max
    }
}

struct Partial<V> {
    value: V,
    err: f64,
}

fn integrate_range<V, F>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
    scale_floor: f64,
    budget: &mut Budget,
) -> Result<Partial<V>, QuadratureError>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    let out = match spec.method {
        Method::AdaptiveSimpson => simpson(f, a, b, spec.rel_tol, spec.initial_panels, scale_floor, budget)?,
        Method::Trapezoidal => trapezoid(f, a, b, spec, scale_floor, budget)?,
    };
    if budget.exhausted {
        return Err(QuadratureError::NonConvergence {
            best: out.value.components(),
            err_estimate: out.err,
            evals: budget.used,
        });
    }
    Ok(out)
}

struct Panel<V> {
    a: f64,
    b: f64,
    fa: V,
    fm: V,
    fb: V,
    whole: V,
}

impl<V: QuadValue> Panel<V> {
    fn new(a: f64, b: f64, fa: V, fm: V, fb: V) -> Self {
        let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
        Self { a, b, fa, fm, fb, whole }
    }
}

fn simpson<V, F>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    initial_panels: usize,
    scale_floor: f64,
    budget: &mut Budget,
) -> Result<Partial<V>, QuadratureError>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    // Uniform initial partition: a single root panel aliases badly on
    // oscillatory integrands.
    let room = budget.max.saturating_sub(budget.used).saturating_sub(1) / 2;
    let n = initial_panels.min(room).max(1);
    let h = (b - a) / n as f64;
    let mut nodes = Vec::with_capacity(2 * n + 1);
    for i in 0..=2 * n {
        let x = if i == 2 * n { b } else { a + 0.5 * h * i as f64 };
        nodes.push(budget.eval(f, x)?);
    }
    let panels: Vec<Panel<V>> = (0..n)
        .map(|i| {
            let pa = a + h * i as f64;
            let pb = if i + 1 == n { b } else { pa + h };
            Panel::new(pa, pb, nodes[2 * i], nodes[2 * i + 1], nodes[2 * i + 2])
        })
        .collect();
    let coarse = panels.iter().fold(V::zero(), |acc, p| acc + p.whole);

    // The absolute tolerance needs |I|, which is only known afterwards.
    // Start from the coarse estimate and rerun whenever the result
    // shows the scale was overestimated by more than a factor of two.
    let mut scale = coarse.norm().max(scale_floor);
    let mut rounds = 0;
    loop {
        let eps = rel_tol * scale / n as f64;
        let mut err = 0.0;
        let mut value = V::zero();
        for p in &panels {
            value = value + simpson_step(f, p, eps, 0, &mut err, budget)?;
        }
        let settled = value.norm().max(scale_floor);
        rounds += 1;
        // after a few rounds the error estimate speaks for itself
        if budget.exhausted || settled >= 0.5 * scale || settled == 0.0 || rounds == 8 {
            return Ok(Partial { value, err });
        }
        scale = settled;
    }
}

fn simpson_step<V, F>(
    f: &F,
    panel: &Panel<V>,
    eps: f64,
    depth: u32,
    err: &mut f64,
    budget: &mut Budget,
) -> Result<V, QuadratureError>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    let Panel { a, b, fa, fm, fb, whole } = *panel;
    let m = 0.5 * (a + b);
    if budget.exhausted || !budget.can_spend(2) {
        budget.exhausted = true;
        *err += whole.norm();
        return Ok(whole);
    }
    let fl = budget.eval(f, 0.5 * (a + m))?;
    let fr = budget.eval(f, 0.5 * (m + b))?;
    let left = Panel::new(a, m, fa, fl, fm);
    let right = Panel::new(m, b, fm, fr, fb);
    let halves = left.whole + right.whole;
    let diff = halves - whole;
    let local = diff.norm() / 15.0;

    let resolvable = m > a && m < b;
    if depth >= MIN_DEPTH && (local <= eps || depth >= MAX_DEPTH || !resolvable) {
        *err += local;
        return Ok(halves + diff * (1.0 / 15.0));
    }
    let l = simpson_step(f, &left, 0.5 * eps, depth + 1, err, budget)?;
    let r = simpson_step(f, &right, 0.5 * eps, depth + 1, err, budget)?;
    Ok(l + r)
}

fn trapezoid<V, F>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
    scale_floor: f64,
    budget: &mut Budget,
) -> Result<Partial<V>, QuadratureError>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    let mut n = spec.initial_panels;
    let mut h = (b - a) / n as f64;
    let mut sum = (budget.eval(f, a)? + budget.eval(f, b)?) * 0.5;
    for i in 1..n {
        sum = sum + budget.eval(f, a + i as f64 * h)?;
    }
    let mut estimate = sum * h;
    loop {
        if !budget.can_spend(n) {
            budget.exhausted = true;
            return Ok(Partial {
                value: estimate,
                err: f64::INFINITY,
            });
        }
        // Midpoints of the current panels.
        let mut mids = V::zero();
        for i in 0..n {
            mids = mids + budget.eval(f, a + (i as f64 + 0.5) * h)?;
        }
        sum = sum + mids;
        n *= 2;
        h *= 0.5;
        let refined = sum * h;
        let change = (refined - estimate).norm();
        estimate = refined;
        if change <= spec.rel_tol * refined.norm().max(scale_floor) {
            return Ok(Partial {
                value: refined,
                err: change / 3.0,
            });
        }
    }
}
