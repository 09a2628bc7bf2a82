//! Frequency/distance sweeps over the solvers, the quadrature benchmark
//! and their CSV form.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::asymptotics::{
    etalon_scattered, pseudo_surface_wave, spm_reflected, DEFAULT_LOSS_GUARD, LARGE_ARG_FLAG,
};
use crate::em::Scenario;
use crate::error::{Error, Result};
use crate::fields::{
    field_breakdown, los_closed_form, los_numeric, naive_numeric, scattered_numeric, space_wave_fresnel,
    CylindricalFieldVector, NaivePart,
};
use crate::quadrature::{Method, QuadratureSpec, MAX_REL_TOL, MIN_REL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Frequency,
    Distance,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Frequency => "frequency",
            Axis::Distance => "distance",
        }
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "freq" | "frequency" | "f" => Ok(Axis::Frequency),
            "dist" | "distance" | "rho" | "d" => Ok(Axis::Distance),
            _ => Err(Error::UnknownName {
                kind: "axis",
                given: s.to_string(),
                expected: "freq, dist",
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    Linear,
    Log,
}

impl FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lin" | "linear" => Ok(Scale::Linear),
            "log" | "logarithmic" => Ok(Scale::Log),
            _ => Err(Error::UnknownName {
                kind: "scale",
                given: s.to_string(),
                expected: "linear, log",
            }),
        }
    }
}

/// A solver path that can appear in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverMethod {
    /// Closed-form direct field plus the integrated scattered field.
    Ni,
    LosClosed,
    LosNi,
    /// Direct field plus the geometric-optics reflection.
    Spm,
    /// Direct field plus the Etalon-integral scattered field.
    Etalon,
    /// The pseudo-surface wave alone (a scattered field).
    EtalonSurf,
    SpaceWave,
    SurfaceWave,
    /// The original Hankel-form integrals, total field.
    NaiveNi,
}

impl SolverMethod {
    pub const ALL: [SolverMethod; 9] = [
        SolverMethod::Ni,
        SolverMethod::LosClosed,
        SolverMethod::LosNi,
        SolverMethod::Spm,
        SolverMethod::Etalon,
        SolverMethod::EtalonSurf,
        SolverMethod::SpaceWave,
        SolverMethod::SurfaceWave,
        SolverMethod::NaiveNi,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SolverMethod::Ni => "NI",
            SolverMethod::LosClosed => "LOS_closed",
            SolverMethod::LosNi => "LOS_NI",
            SolverMethod::Spm => "SPM",
            SolverMethod::Etalon => "Etalon",
            SolverMethod::EtalonSurf => "EtalonSurf",
            SolverMethod::SpaceWave => "SpaceWave",
            SolverMethod::SurfaceWave => "SurfaceWave",
            SolverMethod::NaiveNi => "NaiveNI",
        }
    }

    /// What the reported field is: `"total"`, `"direct"`, `"scattered"`,
    /// `"space"` or `"surface"`.
    pub fn component(&self) -> &'static str {
        match self {
            SolverMethod::Ni | SolverMethod::Spm | SolverMethod::Etalon | SolverMethod::NaiveNi => "total",
            SolverMethod::LosClosed | SolverMethod::LosNi => "direct",
            SolverMethod::EtalonSurf => "scattered",
            SolverMethod::SpaceWave => "space",
            SolverMethod::SurfaceWave => "surface",
        }
    }

    /// Whether the method integrates numerically (and so depends on the
    /// quadrature settings).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            SolverMethod::Ni | SolverMethod::LosNi | SolverMethod::SurfaceWave | SolverMethod::NaiveNi
        )
    }
}

impl fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.trim().chars().filter(|c| *c != '_' && *c != '-').collect();
        let key = key.to_ascii_lowercase();
        SolverMethod::ALL
            .iter()
            .copied()
            .find(|m| m.name().replace('_', "").to_ascii_lowercase() == key)
            .ok_or_else(|| Error::UnknownName {
                kind: "method",
                given: s.trim().to_string(),
                expected: "NI, LOS_closed, LOS_NI, SPM, Etalon, EtalonSurf, SpaceWave, SurfaceWave, NaiveNI",
            })
    }
}

/// Parses a comma-separated method list.
pub fn parse_methods(list: &str) -> Result<Vec<SolverMethod>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
    pub methods: Vec<SolverMethod>,
    pub quadrature: QuadratureSpec,
    /// Half-width of the excluded intervals for [`SolverMethod::NaiveNi`],
    /// in units of `k01`.
    pub naive_exclusion: Option<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, reason| Err(Error::InvalidParameter { name, value, reason });
        if !(self.start > 0.0 && self.start.is_finite()) {
            return bad("start", self.start, "sweep start must be > 0");
        }
        if !(self.stop > self.start && self.stop.is_finite()) {
            return bad("stop", self.stop, "sweep stop must exceed start");
        }
        if self.points < 2 {
            return bad("points", self.points as f64, "a sweep needs at least two points");
        }
        if self.methods.is_empty() {
            return bad("methods", 0.0, "at least one method is required");
        }
        if self.methods.contains(&SolverMethod::NaiveNi) && self.naive_exclusion.is_none() {
            return bad("naive_exclusion", f64::NAN, "NaiveNI needs an exclusion half-width");
        }
        self.quadrature.validate()?;
        Ok(())
    }

    pub fn axis_values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if i == n - 1 {
                    return self.stop;
                }
                match self.scale {
                    Scale::Linear => self.start + t * (self.stop - self.start),
                    Scale::Log => self.start * (self.stop / self.start).powf(t),
                }
            })
            .collect()
    }

    fn scenario_at(&self, base: &Scenario, value: f64) -> Result<Scenario> {
        match self.axis {
            Axis::Frequency => base.with_frequency(value),
            Axis::Distance => Ok(base.with_geometry(base.geometry.with_rho(value)?)),
        }
    }
}

/// One `(axis point, method)` result. Field columns are empty when the
/// solver failed; `error` then says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub axis_value: f64,
    pub frequency_hz: f64,
    pub rho_m: f64,
    pub method: String,
    pub component: String,
    pub e_rho_re: Option<f64>,
    pub e_rho_im: Option<f64>,
    pub e_x_re: Option<f64>,
    pub e_x_im: Option<f64>,
    pub e_abs: Option<f64>,
    pub e_rho_abs: Option<f64>,
    pub e_x_abs: Option<f64>,
    pub phase_x: Option<f64>,
    pub spm_condition: f64,
    pub spm_condition_2: f64,
    pub numerical_distance: Option<f64>,
    pub delta: Option<f64>,
    pub flags: String,
    pub evals: u64,
    pub wall_time: f64,
    pub error: String,
}

impl SweepRow {
    pub fn field(&self) -> Option<CylindricalFieldVector> {
        Some(CylindricalFieldVector::new(
            num_complex::Complex64::new(self.e_rho_re?, self.e_rho_im?),
            num_complex::Complex64::new(self.e_x_re?, self.e_x_im?),
        ))
    }
}

/// Regime indicators that depend only on the scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Validity {
    pub spm_condition: f64,
    pub spm_condition_2: f64,
    pub numerical_distance: Option<f64>,
    pub delta: Option<f64>,
    pub flags: Vec<&'static str>,
}

pub fn validity(scenario: &Scenario) -> Validity {
    let spm = spm_reflected(scenario).ok();
    let (c1, c2) = spm.map_or((f64::NAN, f64::NAN), |s| (s.condition, s.condition_2));
    let nd = scenario.numerical_distance().ok();
    let delta = scenario.delta().ok();
    let mut flags = Vec::new();
    if !(c1 >= LARGE_ARG_FLAG) {
        flags.push("spm_condition_low");
    }
    if nd.map_or(true, |v| v >= 1.0) {
        flags.push("numerical_distance_ge_1");
    }
    if scenario.loss_ratio() < DEFAULT_LOSS_GUARD {
        flags.push("low_loss");
    }
    if !scenario.is_hertzian() {
        flags.push("not_hertzian");
    }
    Validity {
        spm_condition: c1,
        spm_condition_2: c2,
        numerical_distance: nd,
        delta,
        flags,
    }
}

/// Field of one method at one scenario, with the integrand evaluations
/// it took.
pub fn evaluate(
    method: SolverMethod,
    scenario: &Scenario,
    quadrature: &QuadratureSpec,
    naive_exclusion: Option<f64>,
) -> Result<(CylindricalFieldVector, usize)> {
    let closed = |v: CylindricalFieldVector| Ok((v, 0));
    match method {
        SolverMethod::Ni => {
            let s = scattered_numeric(scenario, quadrature)?;
            Ok((los_closed_form(scenario)? + s.value, s.evals))
        }
        SolverMethod::LosClosed => closed(los_closed_form(scenario)?),
        SolverMethod::LosNi => {
            let r = los_numeric(scenario, quadrature)?;
            Ok((r.value, r.evals))
        }
        SolverMethod::Spm => closed(los_closed_form(scenario)? + spm_reflected(scenario)?.field),
        SolverMethod::Etalon => closed(los_closed_form(scenario)? + etalon_scattered(scenario)?),
        SolverMethod::EtalonSurf => closed(pseudo_surface_wave(scenario)?.field),
        SolverMethod::SpaceWave => closed(space_wave_fresnel(scenario)?),
        SolverMethod::SurfaceWave => {
            let b = field_breakdown(scenario, quadrature)?;
            Ok((b.value.surface_wave, b.evals))
        }
        SolverMethod::NaiveNi => {
            let eps = naive_exclusion.ok_or(Error::InvalidParameter {
                name: "naive_exclusion",
                value: f64::NAN,
                reason: "NaiveNI needs an exclusion half-width",
            })?;
            let r = naive_numeric(scenario, NaivePart::Total, eps, quadrature)?;
            Ok((r.value, r.evals))
        }
    }
}

/// How sweep points are distributed over threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

fn map_ordered<T, R, F>(items: &[T], execution: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match execution {
        Execution::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
    }
}

/// Runs every method at every axis point. Rows come out axis-major in
/// method order regardless of how they were scheduled; solver failures
/// are recorded in the row.
pub fn run_sweep(spec: &SweepSpec, scenario: &Scenario) -> Result<Vec<SweepRow>> {
    run_sweep_with(spec, scenario, Execution::default())
}

pub fn run_sweep_with(spec: &SweepSpec, scenario: &Scenario, execution: Execution) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let tasks: Vec<(f64, SolverMethod)> = spec
        .axis_values()
        .into_iter()
        .flat_map(|v| spec.methods.iter().map(move |&m| (v, m)))
        .collect();
    let rows = map_ordered(&tasks, execution, |&(value, method)| sweep_point(spec, scenario, value, method));
    Ok(rows)
}

fn sweep_point(spec: &SweepSpec, base: &Scenario, value: f64, method: SolverMethod) -> SweepRow {
    let mut row = SweepRow {
        axis: spec.axis.name().to_string(),
        axis_value: value,
        frequency_hz: base.frequency(),
        rho_m: base.geometry.rho(),
        method: method.name().to_string(),
        component: method.component().to_string(),
        e_rho_re: None,
        e_rho_im: None,
        e_x_re: None,
        e_x_im: None,
        e_abs: None,
        e_rho_abs: None,
        e_x_abs: None,
        phase_x: None,
        spm_condition: f64::NAN,
        spm_condition_2: f64::NAN,
        numerical_distance: None,
        delta: None,
        flags: String::new(),
        evals: 0,
        wall_time: 0.0,
        error: String::new(),
    };
    let scenario = match spec.scenario_at(base, value) {
        Ok(s) => s,
        Err(e) => {
            row.error = e.to_string();
            return row;
        }
    };
    row.frequency_hz = scenario.frequency();
    row.rho_m = scenario.geometry.rho();
    let v = validity(&scenario);
    row.spm_condition = v.spm_condition;
    row.spm_condition_2 = v.spm_condition_2;
    row.numerical_distance = v.numerical_distance;
    row.delta = v.delta;
    row.flags = v.flags.join("|");

    let start = Instant::now();
    let out = evaluate(method, &scenario, &spec.quadrature, spec.naive_exclusion);
    row.wall_time = start.elapsed().as_secs_f64();
    match out {
        Ok((e, evals)) => {
            row.e_rho_re = Some(e.e_rho.re);
            row.e_rho_im = Some(e.e_rho.im);
            row.e_x_re = Some(e.e_x.re);
            row.e_x_im = Some(e.e_x.im);
            row.e_abs = Some(e.magnitude());
            row.e_rho_abs = Some(e.e_rho.norm());
            row.e_x_abs = Some(e.e_x.norm());
            row.phase_x = Some(e.e_x.arg());
            row.evals = evals as u64;
        }
        Err(e) => row.error = e.to_string(),
    }
    row
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub frequencies: Vec<f64>,
    pub tolerances: Vec<f64>,
    pub methods: Vec<Method>,
    pub repetitions: usize,
    /// Evaluation budget per integral. Larger than the quadrature default
    /// because the trapezoidal rule at 1e-9 and 1 GHz needs it.
    pub max_evals: usize,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self {
            frequencies: [1.0, 3.0, 10.0, 30.0, 80.0, 100.0, 300.0, 1000.0].map(|f| f * 1e6).to_vec(),
            tolerances: vec![1e-3, 1e-6, 1e-9],
            methods: vec![Method::AdaptiveSimpson, Method::Trapezoidal],
            repetitions: 5,
            max_evals: 100_000_000,
        }
    }
}

impl BenchmarkSpec {
    pub fn validate(&self) -> Result<()> {
        for &t in &self.tolerances {
            if !(MIN_REL_TOL..=MAX_REL_TOL).contains(&t) {
                return Err(Error::InvalidParameter {
                    name: "tolerance",
                    value: t,
                    reason: "benchmark tolerances must lie in [1e-12, 1e-2]",
                });
            }
        }
        for &f in &self.frequencies {
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "frequency",
                    value: f,
                    reason: "benchmark frequencies must be > 0",
                });
            }
        }
        if self.repetitions == 0 || self.methods.is_empty() {
            return Err(Error::InvalidParameter {
                name: "repetitions",
                value: self.repetitions as f64,
                reason: "need at least one repetition and one method",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub frequency_hz: f64,
    pub tolerance: f64,
    pub method: String,
    pub median_ms: Option<f64>,
    pub evals: Option<u64>,
    pub error: String,
}

/// Times the scattered-field integral for every (frequency, tolerance,
/// method) cell: one discarded warm-up, then the median of
/// `repetitions` runs. Cells run one after another so timings do not
/// compete for cores.
pub fn run_benchmark(spec: &BenchmarkSpec, scenario: &Scenario) -> Result<Vec<BenchRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &f in &spec.frequencies {
        let s = scenario.with_frequency(f)?;
        for &tol in &spec.tolerances {
            for &method in &spec.methods {
                let q = QuadratureSpec::new(method, tol)?.with_max_evals(spec.max_evals);
                rows.push(bench_cell(&s, &q, spec.repetitions));
            }
        }
    }
    Ok(rows)
}

fn bench_cell(scenario: &Scenario, q: &QuadratureSpec, repetitions: usize) -> BenchRow {
    let mut row = BenchRow {
        frequency_hz: scenario.frequency(),
        tolerance: q.rel_tol,
        method: q.method.name().to_string(),
        median_ms: None,
        evals: None,
        error: String::new(),
    };
    if let Err(e) = scattered_numeric(scenario, q) {
        row.error = e.to_string();
        return row;
    }
    let mut times = Vec::with_capacity(repetitions);
    let mut evals = 0;
    for _ in 0..repetitions {
        let start = Instant::now();
        match scattered_numeric(scenario, q) {
            Ok(r) => evals = r.evals,
            Err(e) => {
                row.error = e.to_string();
                return row;
            }
        }
        times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    row.median_ms = Some(median(&mut times));
    row.evals = Some(evals as u64);
    row
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Writes rows as CSV with a header line. Floats use the shortest
/// representation that reads back to the same value.
pub fn emit_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let io = |e: &dyn fmt::Display| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(|e| io(&e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io(&e))?;
    }
    w.flush().map_err(|e| io(&e))
}

/// Writes rows as CSV to any writer.
pub fn write_csv<T: Serialize, W: std::io::Write>(rows: &[T], out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let io = |e: &dyn fmt::Display| Error::Io {
        path: "<stream>".to_string(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| io(&e))?;
    }
    w.flush().map_err(|e| io(&e))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let io = |e: &dyn fmt::Display| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut r = csv::Reader::from_path(path).map_err(|e| io(&e))?;
    r.deserialize().map(|row| row.map_err(|e| io(&e))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(methods: Vec<SolverMethod>) -> SweepSpec {
        SweepSpec {
            axis: Axis::Distance,
            start: 200.0,
            stop: 2000.0,
            points: 4,
            scale: Scale::Log,
            methods,
            quadrature: QuadratureSpec::simpson(1e-5),
            naive_exclusion: None,
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in SolverMethod::ALL {
            assert_eq!(m.name().parse::<SolverMethod>().unwrap(), m);
        }
        assert_eq!(parse_methods("ni, spm,etalon").unwrap().len(), 3);
        assert_eq!("los-closed".parse::<SolverMethod>().unwrap(), SolverMethod::LosClosed);
        assert!("bogus".parse::<SolverMethod>().is_err());
    }

    #[test]
    fn axis_grid_endpoints() {
        let s = spec(vec![SolverMethod::Spm]);
        let v = s.axis_values();
        assert_eq!(v.len(), 4);
        assert_eq!(v[0], 200.0);
        assert_eq!(v[3], 2000.0);
        assert!((v[1] / v[0] - v[2] / v[1]).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        let mut s = spec(vec![]);
        assert!(s.validate().is_err());
        s.methods = vec![SolverMethod::NaiveNi];
        assert!(s.validate().is_err());
        s.naive_exclusion = Some(1e-3);
        assert!(s.validate().is_ok());
        s.stop = s.start;
        assert!(s.validate().is_err());
    }

    #[test]
    fn rows_are_axis_major_and_errors_stay_in_row() {
        let s = spec(vec![SolverMethod::Spm, SolverMethod::EtalonSurf]);
        let base = Scenario::table_ii(1000.0, 30e6).unwrap();
        let rows = run_sweep(&s, &base).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[0].method, "SPM");
        assert_eq!(rows[1].method, "EtalonSurf");
        // at 200 m the grazing angle is far above the pseudo-surface-wave limit
        assert!(!rows[1].error.is_empty() && rows[1].e_abs.is_none());
        assert!(rows[0].error.is_empty() && rows[0].e_abs.is_some());
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn empty_table_is_rejected() {
        let rows: Vec<BenchRow> = Vec::new();
        assert!(matches!(write_csv(&rows, Vec::new()), Err(Error::EmptyTable)));
    }
}
