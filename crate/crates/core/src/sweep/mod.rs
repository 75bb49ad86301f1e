//! Grid sweeps over one or two parameters, figure presets, stability maps and
//! the entanglement-vanishing temperature.
//!
//! Grid points are independent: each is evaluated from scratch and written to
//! its own slot, so results do not depend on the number of workers.

mod output;
mod presets;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dynamics::{default_tolerance, diffusion_matrix, quadrature_drift, stability, DriftParams};
use crate::error::{Error, Result};
use crate::measures::{pair_measures, solve_lyapunov_with_tolerance, Mode, ModePair, PairMeasures};
use crate::model::{ParamKey, PtPhase, SystemParams};
use crate::steady_state::working_point;

pub use output::{format_sig, Cell, Table};
pub use presets::{figure_preset, figure_preset_on, Figure};

/// Anything a sweep axis or series can vary.
///
/// Axis values are read in display units: rates as multiples of `omega_b`
/// (except `omega_a`, `omega_m`, `omega_b` themselves, in rad/s), temperature
/// in mK, ratios as plain numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    Key(ParamKey),
    /// Common detuning: sets both `delta_a` and `delta_m_eff`.
    Delta,
    /// `G` as a multiple of `g_ma`.
    GOverGma,
    /// `g_ma` as a multiple of `G`.
    GmaOverG,
    /// `kappa_a` as a multiple of `kappa_m`.
    KappaAOverKappaM,
}

impl SweepParam {
    const DERIVED: [(&'static str, SweepParam); 4] = [
        ("Delta", SweepParam::Delta),
        ("G_over_gma", SweepParam::GOverGma),
        ("gma_over_G", SweepParam::GmaOverG),
        ("kappa_a_over_kappa_m", SweepParam::KappaAOverKappaM),
    ];

    /// Name accepted on the command line.
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Key(k) => k.name(),
            other => Self::DERIVED.iter().find(|(_, p)| *p == other).map(|(n, _)| *n).unwrap_or("?"),
        }
    }

    /// Column header, including the unit.
    pub fn header(self) -> String {
        match self {
            SweepParam::Key(ParamKey::Temperature) => "T_mK".into(),
            SweepParam::Key(ParamKey::GEff) => "G/omega_b".into(),
            SweepParam::Key(k @ (ParamKey::OmegaA | ParamKey::OmegaM | ParamKey::OmegaB)) => {
                format!("{}_rad_s", k.name())
            }
            SweepParam::Key(k) => format!("{}/omega_b", k.name()),
            SweepParam::Delta => "Delta/omega_b".into(),
            SweepParam::GOverGma => "G/g_ma".into(),
            SweepParam::GmaOverG => "g_ma/G".into(),
            SweepParam::KappaAOverKappaM => "kappa_a/kappa_m".into(),
        }
    }

    fn is_derived(self) -> bool {
        !matches!(self, SweepParam::Key(_))
    }

    /// Copy of `p` with this parameter set to `value` (display units).
    pub fn apply(self, p: &SystemParams, value: f64) -> Result<SystemParams> {
        let wb = p.omega_b();
        let fixed_g = || {
            p.get(ParamKey::GEff).ok_or_else(|| {
                Error::InvalidSweep("`gma_over_G` needs a fixed `G_eff`, not a derived one".into())
            })
        };
        let mut b = p.to_builder();
        match self {
            SweepParam::Key(k @ (ParamKey::OmegaA | ParamKey::OmegaM | ParamKey::OmegaB)) => b.set(k, value),
            SweepParam::Key(ParamKey::Temperature) => b.set(ParamKey::Temperature, value * 1e-3),
            SweepParam::Key(ParamKey::GEff) => {
                b.unset(ParamKey::EpsilonD);
                b.set(ParamKey::GEff, value * wb);
            }
            SweepParam::Key(ParamKey::EpsilonD) => {
                b.unset(ParamKey::GEff);
                b.set(ParamKey::EpsilonD, value * wb);
            }
            SweepParam::Key(k) => b.set(k, value * wb),
            SweepParam::Delta => {
                b.set(ParamKey::DeltaA, value * wb);
                b.set(ParamKey::DeltaMEff, value * wb);
            }
            SweepParam::GOverGma => {
                b.unset(ParamKey::EpsilonD);
                b.set(ParamKey::GEff, value * p.g_ma());
            }
            SweepParam::GmaOverG => b.set(ParamKey::GMa, value * fixed_g()?),
            SweepParam::KappaAOverKappaM => b.set(ParamKey::KappaA, value * p.kappa_m()),
        }
        b.build()
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParamKey::from_name(s)
            .map(SweepParam::Key)
            .or_else(|| Self::DERIVED.iter().find(|(n, _)| *n == s).map(|&(_, p)| p))
            .ok_or_else(|| Error::UnknownKey {
                key: s.to_string(),
                valid: ParamKey::ALL
                    .iter()
                    .map(|k| k.name())
                    .chain(Self::DERIVED.iter().map(|(n, _)| *n))
                    .collect::<Vec<_>>()
                    .join(", "),
            })
    }
}

/// A linearly spaced axis. `count == 1` is allowed only with `min == max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(param: SweepParam, min: f64, max: f64, count: usize) -> Axis {
        Axis { param, min, max, count }
    }

    /// A one-point axis.
    pub fn point(param: SweepParam, value: f64) -> Axis {
        Axis::new(param, value, value, 1)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.min.is_finite()
            && self.max.is_finite()
            && match self.count {
                0 => false,
                1 => self.min == self.max,
                _ => self.min < self.max,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSweep(format!(
                "axis `{}`: need count >= 2 with min < max (or a single point), got [{}, {}] x {}",
                self.param, self.min, self.max, self.count
            )))
        }
    }

    /// Grid values; the last one is exactly `max`.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.max } else { self.min + step * i as f64 })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// `NAME:MIN:MAX:COUNT`, for example `G_eff:0:0.5:101`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSweep(format!("axis `{s}` is not NAME:MIN:MAX:COUNT"));
        let parts: Vec<&str> = s.split(':').collect();
        let [name, min, max, count] = parts.as_slice() else { return Err(bad()) };
        let axis = Axis::new(
            name.parse()?,
            min.trim().parse().map_err(|_| bad())?,
            max.trim().parse().map_err(|_| bad())?,
            count.trim().parse().map_err(|_| bad())?,
        );
        axis.validate()?;
        Ok(axis)
    }
}

/// One curve of a figure: fixed overrides applied on top of the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub overrides: Vec<(SweepParam, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, overrides: Vec<(SweepParam, f64)>) -> Series {
        Series { label: label.into(), overrides }
    }
}

/// A requested output column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Output {
    MaxLyapunov,
    Stable,
    LogNegativity(ModePair),
    Steering { from: Mode, to: Mode },
    PtPhase,
    Residual,
    PhysicalityMargin,
}

impl Output {
    pub fn header(self) -> String {
        match self {
            Output::MaxLyapunov => "max_lyapunov/omega_b".into(),
            Output::Stable => "stable".into(),
            Output::LogNegativity(p) => format!("E_N_{p}_nats"),
            Output::Steering { from, to } => format!("S_{from}_to_{to}_nats"),
            Output::PtPhase => "pt_phase".into(),
            Output::Residual => "lyapunov_residual".into(),
            Output::PhysicalityMargin => "physicality_margin".into(),
        }
    }

    fn needs_covariance(self) -> bool {
        !matches!(self, Output::MaxLyapunov | Output::Stable | Output::PtPhase)
    }

    fn cell(self, point: &PointEval) -> Cell {
        let num = |v: Option<f64>| v.map_or(Cell::Empty, Cell::Num);
        match self {
            Output::MaxLyapunov => num(point.max_lyapunov.map(|l| l / point.omega_b)),
            Output::Stable => point.stable.map_or(Cell::Empty, Cell::Bool),
            Output::PtPhase => point.pt_phase.map_or(Cell::Empty, |p| Cell::Text(p.regime.to_string())),
            Output::Residual => num(point.steady.as_ref().map(|s| s.residual)),
            Output::PhysicalityMargin => num(point.steady.as_ref().map(|s| s.physicality_margin)),
            Output::LogNegativity(pair) => num(point.steady.as_ref().map(|s| s.pair(pair).e_n)),
            Output::Steering { from, to } => num(point.steady.as_ref().map(|s| s.steering(from, to))),
        }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::MaxLyapunov => f.write_str("max_lyapunov"),
            Output::Stable => f.write_str("stable"),
            Output::LogNegativity(p) => write!(f, "E_N:{p}"),
            Output::Steering { from, to } => write!(f, "S:{from}:{to}"),
            Output::PtPhase => f.write_str("pt_phase"),
            Output::Residual => f.write_str("residual"),
            Output::PhysicalityMargin => f.write_str("physicality_margin"),
        }
    }
}

impl FromStr for Output {
    type Err = Error;

    /// `max_lyapunov`, `stable`, `pt_phase`, `residual`, `physicality_margin`,
    /// `E_N:am` or `S:m:b` (m steers b).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidSweep(format!(
                "unknown output `{s}`; expected max_lyapunov, stable, pt_phase, residual, \
                 physicality_margin, E_N:<pair> or S:<from>:<to>"
            ))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["max_lyapunov"] => Ok(Output::MaxLyapunov),
            ["stable"] => Ok(Output::Stable),
            ["pt_phase"] => Ok(Output::PtPhase),
            ["residual"] => Ok(Output::Residual),
            ["physicality_margin"] => Ok(Output::PhysicalityMargin),
            ["E_N", pair] => Ok(Output::LogNegativity(pair.parse().map_err(|_| bad())?)),
            ["S", from, to] => {
                let from: Mode = from.parse().map_err(|_| bad())?;
                let to: Mode = to.parse().map_err(|_| bad())?;
                ModePair::new(from, to).map_err(|_| bad())?;
                Ok(Output::Steering { from, to })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub base: SystemParams,
    /// Overrides shared by every series, applied first.
    pub fixed: Vec<(SweepParam, f64)>,
    /// Empty means a single unlabeled series.
    pub series: Vec<Series>,
    /// One or two axes, first axis outermost in the row order.
    pub axes: Vec<Axis>,
    pub outputs: Vec<Output>,
}

impl SweepSpec {
    pub fn new(base: SystemParams, axes: Vec<Axis>, outputs: Vec<Output>) -> SweepSpec {
        SweepSpec { name: "sweep".into(), base, fixed: Vec::new(), series: Vec::new(), axes, outputs }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidSweep(format!("need 1 or 2 axes, got {}", self.axes.len())));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::InvalidSweep(format!("axis `{}` given twice", self.axes[0].param)));
        }
        if self.outputs.is_empty() {
            return Err(Error::InvalidSweep("no outputs requested".into()));
        }
        self.axes.iter().try_for_each(Axis::validate)
    }

    /// Replaces the axis over the same parameter.
    pub fn override_axis(&mut self, axis: Axis) -> Result<()> {
        let slot =
            self.axes.iter_mut().find(|a| a.param == axis.param).ok_or_else(|| {
                Error::InvalidSweep(format!("`{}` has no axis `{}`", self.name, axis.param))
            })?;
        *slot = axis;
        Ok(())
    }

    fn series_or_default(&self) -> Vec<Series> {
        if self.series.is_empty() {
            vec![Series::new("", Vec::new())]
        } else {
            self.series.clone()
        }
    }

    pub fn row_count(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    fn needs_covariance(&self) -> bool {
        self.outputs.iter().any(|o| o.needs_covariance())
    }

    /// Parameters of one grid point of one series.
    pub fn point_params(&self, series: &Series, coords: &[f64]) -> Result<SystemParams> {
        let mut p = self.base;
        for &(param, v) in self.fixed.iter().chain(&series.overrides) {
            p = param.apply(&p, v)?;
        }
        // direct keys first so ratios see their final reference values
        let mut order: Vec<_> = self.axes.iter().zip(coords).collect();
        order.sort_by_key(|(a, _)| a.param.is_derived());
        for (axis, &v) in order {
            p = axis.param.apply(&p, v)?;
        }
        Ok(p)
    }

    fn grid(&self) -> Vec<Vec<f64>> {
        let values: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect();
        match values.as_slice() {
            [x] => x.iter().map(|&v| vec![v]).collect(),
            [x, y] => x.iter().flat_map(|&u| y.iter().map(move |&v| vec![u, v])).collect(),
            _ => Vec::new(),
        }
    }
}

/// Measures available at a stable point.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyMeasures {
    pub residual: f64,
    pub physicality_margin: f64,
    /// In the order `am`, `bm`, `ab`.
    pub pairs: [PairMeasures; 3],
}

impl SteadyMeasures {
    pub fn pair(&self, pair: ModePair) -> &PairMeasures {
        let canonical = [ModePair::AM, ModePair::BM, ModePair::AB];
        let i = canonical
            .iter()
            .position(|&c| c == pair || c == pair.swapped())
            .expect("every pair of distinct modes is canonical up to order");
        &self.pairs[i]
    }

    /// Steering of `to` by `from`, nats.
    pub fn steering(&self, from: Mode, to: Mode) -> f64 {
        let pm = self.pair(ModePair::new(from, to).expect("distinct modes"));
        if pm.pair.first() == from {
            pm.s_12
        } else {
            pm.s_21
        }
    }
}

/// Everything computed at one grid point. Fields stay `None` past the first
/// failing stage; `error` then says why.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEval {
    pub omega_b: f64,
    pub pt_phase: Option<PtPhase>,
    pub max_lyapunov: Option<f64>,
    pub stable: Option<bool>,
    pub steady: Option<SteadyMeasures>,
    pub error: Option<Error>,
}

/// Runs the single-point pipeline. The Lyapunov solve and measures run only
/// when `with_covariance` is set and the point is stable.
pub fn evaluate_point(params: &SystemParams, with_covariance: bool) -> PointEval {
    let mut eval = PointEval {
        omega_b: params.omega_b(),
        pt_phase: Some(params.pt_phase()),
        max_lyapunov: None,
        stable: None,
        steady: None,
        error: None,
    };
    if let Err(e) = fill(params, with_covariance, &mut eval) {
        eval.error = Some(e);
    }
    eval
}

fn fill(params: &SystemParams, with_covariance: bool, eval: &mut PointEval) -> Result<()> {
    let wp = working_point(params)?;
    let dp = DriftParams::new(params, &wp);
    let a = quadrature_drift(&dp);
    let tol = default_tolerance(params.omega_b());
    let report = stability(&a, tol)?;
    eval.max_lyapunov = Some(report.max_lyapunov);
    eval.stable = Some(report.stable);
    if !(report.stable && with_covariance) {
        return Ok(());
    }
    let d = diffusion_matrix(&dp, &params.occupations()?);
    let cm = solve_lyapunov_with_tolerance(&a, &d, tol)?;
    let pairs = [
        pair_measures(&cm, ModePair::AM)?,
        pair_measures(&cm, ModePair::BM)?,
        pair_measures(&cm, ModePair::AB)?,
    ];
    eval.steady =
        Some(SteadyMeasures { residual: cm.residual, physicality_margin: cm.physicality_margin, pairs });
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub series: Vec<Series>,
    /// Axis coordinates of each row, display units.
    pub grid: Vec<Vec<f64>>,
    /// Row-major, series fastest: `points[row * series.len() + s]`.
    pub points: Vec<PointEval>,
}

impl SweepResult {
    pub fn rows(&self) -> usize {
        self.grid.len()
    }

    pub fn point(&self, row: usize, series: usize) -> &PointEval {
        &self.points[row * self.series.len() + series]
    }

    /// Points of one series, in row order.
    pub fn series_points(&self, series: usize) -> impl Iterator<Item = &PointEval> + '_ {
        self.points.iter().skip(series).step_by(self.series.len())
    }

    pub fn series_index(&self, label: &str) -> Option<usize> {
        self.series.iter().position(|s| s.label == label)
    }

    /// Values of one output for one series; `None` where the cell is empty.
    pub fn column(&self, output: Output, series: usize) -> Vec<Option<f64>> {
        self.series_points(series)
            .map(|p| match output.cell(p) {
                Cell::Num(v) => Some(v),
                Cell::Bool(b) => Some(if b { 1.0 } else { 0.0 }),
                _ => None,
            })
            .collect()
    }

    /// Fraction of grid points that are stable, per series.
    pub fn stable_fraction(&self, series: usize) -> f64 {
        let stable = self.series_points(series).filter(|p| p.stable == Some(true)).count();
        stable as f64 / self.rows() as f64
    }

    /// Table with axis columns, then per series the outputs and an `error`
    /// column. Series columns are suffixed with `[label]`.
    pub fn table(&self) -> Table {
        let labelled = |name: String, s: &Series| {
            if s.label.is_empty() {
                name
            } else {
                format!("{name}[{}]", s.label)
            }
        };
        let mut header: Vec<String> = self.spec.axes.iter().map(|a| a.param.header()).collect();
        for s in &self.series {
            header.extend(self.spec.outputs.iter().map(|o| labelled(o.header(), s)));
            header.push(labelled("error".into(), s));
        }
        let rows = self
            .grid
            .iter()
            .enumerate()
            .map(|(r, coords)| {
                let mut row: Vec<Cell> = coords.iter().map(|&v| Cell::Num(v)).collect();
                for s in 0..self.series.len() {
                    let p = self.point(r, s);
                    row.extend(self.spec.outputs.iter().map(|o| o.cell(p)));
                    row.push(p.error.as_ref().map_or(Cell::Empty, |e| Cell::Text(e.code().into())));
                }
                row
            })
            .collect();
        Table { header, rows }
    }
}

/// Evaluates every grid point of every series. `jobs == 0` uses all cores.
///
/// Point failures land in the `error` column; only an invalid `SweepSpec` fails
/// the whole sweep.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    spec.validate()?;
    let series = spec.series_or_default();
    let grid = spec.grid();
    let with_cov = spec.needs_covariance();
    let tasks: Vec<(usize, usize)> =
        (0..grid.len()).flat_map(|r| (0..series.len()).map(move |s| (r, s))).collect();
    let eval = |&(r, s): &(usize, usize)| match spec.point_params(&series[s], &grid[r]) {
        Ok(p) => evaluate_point(&p, with_cov),
        Err(e) => PointEval {
            omega_b: spec.base.omega_b(),
            pt_phase: None,
            max_lyapunov: None,
            stable: None,
            steady: None,
            error: Some(e),
        },
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidSweep(format!("cannot start {jobs} workers: {e}")))?;
    // indexed collect: each result lands in the slot of its task
    let points = pool.install(|| tasks.par_iter().map(eval).collect());
    Ok(SweepResult { spec: spec.clone(), series, grid, points })
}

/// Stability-only sweep with the stable area fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityMap {
    pub result: SweepResult,
    /// Per series.
    pub stable_fraction: Vec<f64>,
    /// Per series, stable fraction of each slice at fixed first-axis value.
    pub fraction_by_first_axis: Vec<Vec<f64>>,
}

pub fn stability_map(spec: &SweepSpec, jobs: usize) -> Result<StabilityMap> {
    let spec = SweepSpec { outputs: vec![Output::Stable], ..spec.clone() };
    let result = run_sweep(&spec, jobs)?;
    let inner: usize = spec.axes[1..].iter().map(|a| a.count).product();
    let stable_fraction = (0..result.series.len()).map(|s| result.stable_fraction(s)).collect();
    let fraction_by_first_axis = (0..result.series.len())
        .map(|s| {
            let flags: Vec<bool> = result.series_points(s).map(|p| p.stable == Some(true)).collect();
            flags.chunks(inner).map(|c| c.iter().filter(|&&f| f).count() as f64 / inner as f64).collect()
        })
        .collect();
    Ok(StabilityMap { result, stable_fraction, fraction_by_first_axis })
}

/// Bisection tolerance of [`vanishing_temperature`], kelvin.
pub const VANISHING_TOL: f64 = 1e-4;

/// Temperature (K) at which `E_N(pair)` first reaches zero between `t_lo`
/// (entangled) and `t_hi` (separable), to within 0.1 mK.
pub fn vanishing_temperature(base: &SystemParams, pair: ModePair, t_lo: f64, t_hi: f64) -> Result<f64> {
    let e_n = |t: f64| -> Result<f64> {
        let p = base.with(ParamKey::Temperature, t)?;
        let eval = evaluate_point(&p, true);
        if let Some(e) = eval.error {
            return Err(e);
        }
        match eval.steady {
            Some(s) => Ok(s.pair(pair).e_n),
            None => Err(Error::BracketInvalid(format!("no steady state at T = {t} K"))),
        }
    };
    if !(t_lo >= 0.0 && t_lo < t_hi && t_hi.is_finite()) {
        return Err(Error::BracketInvalid(format!("need 0 <= T_lo < T_hi, got [{t_lo}, {t_hi}]")));
    }
    let (lo_val, hi_val) = (e_n(t_lo)?, e_n(t_hi)?);
    if lo_val <= 0.0 {
        return Err(Error::BracketInvalid(format!("E_N({pair}) is already 0 at T_lo = {} mK", t_lo * 1e3)));
    }
    if hi_val > 0.0 {
        return Err(Error::BracketInvalid(format!(
            "E_N({pair}) = {hi_val:e} is still positive at T_hi = {} mK",
            t_hi * 1e3
        )));
    }
    let (mut lo, mut hi) = (t_lo, t_hi);
    while hi - lo > VANISHING_TOL {
        let mid = 0.5 * (lo + hi);
        if e_n(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
