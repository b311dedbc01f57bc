//! Experiment configs, end-to-end quasimode runs, and scaling sweeps.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64 as C64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::classical::{
    enumerate_prime_orbits, validate_cat_map, CatMap, Orbit, RationalPoint,
    DEFAULT_ENUMERATION_GUARD,
};
use crate::coherent::{husimi, min_resolution, torus_coherent, HusimiGrid};
use crate::error::{CatError, Context, Result};
use crate::quantization::{weyl_antiwick_gap, FourierSymbol};
use crate::quantum::{propagator, PlanckGrid, QuantumState};
use crate::quasimode::{
    admissible_radii, build_quasimode, choose_n, frequency_box, husimi_ball_report,
    nonequidistribution_report, quasimode_husimi, quasimode_residual_sweep, residual,
    scmeasure_error, BallMass, ChosenN, NonequiConstants, NonequiReport, QuasimodeSpec, Space,
    Witness, DEFAULT_N_CAP,
};

/// Orbit given by one rational point `start / l`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitStart {
    pub l: u64,
    pub start: [i64; 2],
}

/// Artifact paths. Relative paths resolve against the working directory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub husimi: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<PathBuf>,
}

fn default_delta() -> f64 {
    0.24
}
fn default_ball_c() -> f64 {
    2.0
}
fn default_c0() -> f64 {
    NonequiConstants::default().c0
}
fn default_c1() -> f64 {
    NonequiConstants::default().c1
}
fn default_cap() -> usize {
    DEFAULT_N_CAP
}

/// A quasimode experiment, read from TOML.
///
/// ```toml
/// matrix = [2, 1, 1, 1]
/// T = 2
/// N = 4096
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub matrix: [i64; 4],
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitStart>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub phi: f64,
    /// Ball constant in `ρ = C √ħ e^{λT}`.
    #[serde(rename = "C", default = "default_ball_c")]
    pub c: f64,
    #[serde(rename = "C0", default = "default_c0")]
    pub c0: f64,
    #[serde(default = "default_c1")]
    pub c1: f64,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<Vec<[i64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_phase: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_physical: Option<f64>,
    #[serde(default = "default_cap")]
    pub n_cap: usize,
    /// Seed of the random control state.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CatError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Everything `run_experiment` needs, with defaults filled in.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub spec: QuasimodeSpec,
    pub chosen: Option<ChosenN>,
    pub g: usize,
    pub freqs: Vec<[i64; 2]>,
}

fn reduced_start(o: &OrbitStart) -> Result<RationalPoint> {
    if o.l == 0 {
        return Err(CatError::Config("orbit.l must be positive".into()));
    }
    let l = o.l as i64;
    let (j, k) = (o.start[0].rem_euclid(l), o.start[1].rem_euclid(l));
    let g = j.gcd(&k).gcd(&l);
    Ok(RationalPoint::new(j / g, k / g, (l / g) as u64))
}

/// Picks the orbit: the explicit start if given, otherwise the prime orbit of
/// length `T` with the largest point separation (first in enumeration order on ties).
fn resolve_orbit(map: &CatMap, cfg: &ExperimentConfig) -> Result<Orbit> {
    if let Some(o) = &cfg.orbit {
        let start = reduced_start(o)?;
        let cap = cfg.t.unwrap_or(DEFAULT_ENUMERATION_GUARD as usize);
        let orbit = Orbit::from_start(map, start, cap).ok_or_else(|| {
            CatError::Config(format!("orbit through {:?} is longer than T = {cap}", o.start))
        })?;
        if let Some(t) = cfg.t {
            if orbit.period() != t {
                return Err(CatError::Config(format!(
                    "orbit through {:?} has period {}, not T = {t}",
                    o.start,
                    orbit.period()
                )));
            }
        }
        return Ok(orbit);
    }
    let t = cfg
        .t
        .ok_or_else(|| CatError::Config("either T or orbit is required".into()))?;
    if t == 0 {
        return Err(CatError::Config("T must be at least 1".into()));
    }
    let orbits = enumerate_prime_orbits(map, t as u32, DEFAULT_ENUMERATION_GUARD)?;
    let mut best: Option<Orbit> = None;
    for o in orbits {
        let better = match &best {
            None => true,
            Some(b) => o.min_separation() > b.min_separation() + 1e-12,
        };
        if better {
            best = Some(o);
        }
    }
    best.ok_or_else(|| CatError::Precondition(format!("no prime orbit of length {t}")))
}

/// Default quadrature grid: at least 256 and the resolution floor, as a power of two.
pub fn default_resolution(map: &CatMap, n: usize) -> usize {
    min_resolution(map, n).max(256).next_power_of_two()
}

pub fn resolve(cfg: &ExperimentConfig) -> Result<Resolved> {
    let [a, b, c, d] = cfg.matrix;
    let map = validate_cat_map(a, b, c, d).during("validate_cat_map")?;
    let orbit = resolve_orbit(&map, cfg).during("orbit selection")?;
    let (n, chosen) = match cfg.n {
        Some(n) => (n, None),
        None => {
            let ch = choose_n(orbit.period(), cfg.delta, map.lambda(), cfg.n_cap).during("choose_N")?;
            (ch.n, Some(ch))
        }
    };
    if n == 0 {
        return Err(CatError::Config("N must be positive".into()));
    }
    let grid = PlanckGrid::for_map(&map, n).during("choose_theta")?;
    let g = cfg.g.unwrap_or_else(|| default_resolution(&map, n));
    let freqs = cfg.frequencies.clone().unwrap_or_else(|| frequency_box(2));
    let spec = QuasimodeSpec {
        map,
        orbit,
        phi: cfg.phi,
        delta: cfg.delta,
        grid,
    };
    spec.validate().during("quasimode spec")?;

    let mut config = cfg.clone();
    config.n = Some(n);
    config.t = Some(spec.period());
    config.g = Some(g);
    config.frequencies = Some(freqs.clone());
    Ok(Resolved {
        config,
        spec,
        chosen,
        g,
        freqs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScEntry {
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioPair {
    pub sup_ratio: f64,
    pub inf_ratio: f64,
}

/// Deterministic experiment report. Wall-clock timings are kept apart in [`Timings`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub matrix: [i64; 4],
    #[serde(rename = "N")]
    pub n: usize,
    pub theta: [f64; 2],
    #[serde(rename = "T")]
    pub t: usize,
    pub orbit: Vec<[f64; 2]>,
    pub orbit_l: u64,
    pub ehrenfest_time: f64,
    pub chosen_n: Option<ChosenN>,
    pub phi: f64,
    #[serde(rename = "G")]
    pub g: usize,
    pub norm_sq: f64,
    pub residual: f64,
    pub residual_bound: f64,
    /// Largest residual of `Ψ_φ` at its own `φ` over 64 angles.
    pub residual_sweep_max: f64,
    /// The residual-minimizing angle from the same sweep, and its residual.
    pub best_phi: f64,
    pub best_residual: f64,
    pub ball_radius: Option<f64>,
    pub ball_masses: Vec<BallMass>,
    pub off_support: Option<f64>,
    pub disjoint: Option<bool>,
    pub sup_ratio: Option<f64>,
    pub inf_ratio: Option<f64>,
    pub physical: Option<RatioPair>,
    pub witnesses: BTreeMap<String, Witness>,
    pub control: Option<RatioPair>,
    pub scmeasure: BTreeMap<String, ScEntry>,
    pub scmeasure_max_err: f64,
    pub scmeasure_rate: f64,
    /// Diagnostics whose preconditions failed, with the reason.
    pub skipped: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub seconds: BTreeMap<String, f64>,
}

impl Timings {
    fn lap(&mut self, name: &str, start: Instant) {
        self.seconds.insert(name.to_string(), start.elapsed().as_secs_f64());
    }
}

/// Results of a run together with the artifacts the caller may write.
#[derive(Debug)]
pub struct RunOutput {
    pub resolved: Resolved,
    pub report: Report,
    pub psi_n: QuantumState,
    pub husimi: HusimiGrid,
    pub timings: Timings,
}

fn nonequi_or_skip(
    out: &mut BTreeMap<String, String>,
    name: &str,
    r: Result<NonequiReport>,
) -> Option<NonequiReport> {
    match r {
        Ok(rep) => Some(rep),
        Err(e) => {
            out.insert(name.to_string(), e.to_string());
            None
        }
    }
}

/// The explicit radius, else the midpoint of the admissible interval.
fn pick_radius(explicit: Option<f64>, adm: [f64; 2]) -> f64 {
    explicit.unwrap_or(0.5 * (adm[0] + adm[1]))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let resolved = resolve(cfg)?;
    run_resolved(resolved)
}

pub fn run_resolved(resolved: Resolved) -> Result<RunOutput> {
    let mut timings = Timings::default();
    let spec = &resolved.spec;
    let cfg = &resolved.config;
    let map = &spec.map;
    let t_len = spec.period();

    let t0 = Instant::now();
    let prop = propagator(map, spec.grid).during("propagator")?;
    let q = build_quasimode(spec, &prop).during("build_quasimode")?;
    timings.lap("build", t0);

    let t0 = Instant::now();
    let res = residual(&q.psi_n, spec.phi, &prop);
    let sweep = quasimode_residual_sweep(spec, &prop, 64).during("residual sweep")?;
    let sweep_max = sweep.iter().map(|s| s.1).fold(0.0, f64::max);
    let best = sweep
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .copied()
        .expect("64 angles");
    timings.lap("residual", t0);

    let t0 = Instant::now();
    let h_n = quasimode_husimi(&q.psi_n, map, resolved.g).during("husimi")?;
    timings.lap("husimi", t0);

    let mut skipped = BTreeMap::new();
    let norm_sq = q.psi.norm_sq();

    let t0 = Instant::now();
    let mut h = h_n.clone();
    h.values.iter_mut().for_each(|v| *v *= norm_sq);
    let balls = match husimi_ball_report(&h, spec, cfg.c) {
        Ok(b) => Some(b),
        Err(e) => {
            skipped.insert("balls".to_string(), e.to_string());
            None
        }
    };
    timings.lap("balls", t0);

    let t0 = Instant::now();
    let sc = scmeasure_error(&h_n, spec, &resolved.freqs).during("scmeasure_error")?;
    timings.lap("scmeasure", t0);

    let t0 = Instant::now();
    let k = NonequiConstants {
        c0: cfg.c0,
        c1: cfg.c1,
    };
    let r_phase = pick_radius(cfg.r_phase, admissible_radii(spec, Space::Phase, k));
    let r_phys = pick_radius(cfg.r_physical, admissible_radii(spec, Space::Physical, k));
    let phase = nonequi_or_skip(
        &mut skipped,
        "phase",
        nonequidistribution_report(&q.psi_n, &h_n, spec, Space::Phase, r_phase, k),
    );
    let physical = nonequi_or_skip(
        &mut skipped,
        "physical",
        nonequidistribution_report(&q.psi_n, &h_n, spec, Space::Physical, r_phys, k),
    );
    let control = if phase.is_some() {
        let rnd = QuantumState::random(spec.grid, cfg.seed);
        let hr = husimi(&rnd, map, resolved.g).during("control husimi")?;
        nonequidistribution_report(&rnd, &hr, spec, Space::Phase, r_phase, k)
            .ok()
            .map(|c| RatioPair {
                sup_ratio: c.sup_ratio,
                inf_ratio: c.inf_ratio,
            })
    } else {
        None
    };
    timings.lap("nonequi", t0);

    let mut witnesses = BTreeMap::new();
    if let Some(p) = &phase {
        witnesses.insert("phase_hit".into(), p.hit.clone());
        witnesses.insert("phase_miss".into(), p.miss.clone());
    }
    if let Some(p) = &physical {
        witnesses.insert("physical_hit".into(), p.hit.clone());
        witnesses.insert("physical_miss".into(), p.miss.clone());
    }
    let scmeasure = sc
        .terms
        .iter()
        .map(|t| {
            (
                format!("{},{}", t.n[0], t.n[1]),
                ScEntry {
                    lhs: t.lhs,
                    rhs: t.rhs,
                    err: t.err,
                },
            )
        })
        .collect();

    let report = Report {
        matrix: map.entries(),
        n: spec.grid.n,
        theta: spec.grid.theta,
        t: t_len,
        orbit: spec.orbit.points_f64(),
        orbit_l: spec.orbit.l,
        ehrenfest_time: spec.ehrenfest_time(),
        chosen_n: resolved.chosen,
        phi: spec.phi,
        g: resolved.g,
        norm_sq,
        residual: res,
        residual_bound: 2.0 / (t_len as f64).sqrt(),
        residual_sweep_max: sweep_max,
        best_phi: best.0,
        best_residual: best.1,
        ball_radius: balls.as_ref().map(|b| b.balls[0].radius),
        ball_masses: balls.as_ref().map(|b| b.balls.clone()).unwrap_or_default(),
        off_support: balls.as_ref().map(|b| b.off_support),
        disjoint: balls.as_ref().map(|b| b.disjoint),
        sup_ratio: phase.as_ref().map(|p| p.sup_ratio),
        inf_ratio: phase.as_ref().map(|p| p.inf_ratio),
        physical: physical.as_ref().map(|p| RatioPair {
            sup_ratio: p.sup_ratio,
            inf_ratio: p.inf_ratio,
        }),
        witnesses,
        control,
        scmeasure,
        scmeasure_max_err: sc.max_err,
        scmeasure_rate: sc.rate,
        skipped,
    };
    Ok(RunOutput {
        report,
        psi_n: q.psi_n,
        husimi: h_n,
        timings,
        resolved,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// `‖â^w - â^aw‖` over an `N` ladder.
    WawGap,
    /// Unstable-axis Husimi variance of `M̂^t |0, c̃₀, θ⟩` over a `t` ladder.
    HusimiWidth,
    /// Semiclassical-measure error of the quasimode over an `N` ladder.
    Scmeasure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub matrix: [i64; 4],
    pub ladder: Vec<i64>,
    /// Fourier symbol `[[n1, n2, re, im], ...]` for the gap sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<Vec<[f64; 4]>>,
    /// Fixed `N` for the width sweep.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g: Option<usize>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitStart>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<Vec<[i64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CatError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// One row per ladder point; `slope` is the least-squares slope of
/// `ln(fit column)` against `ln x` (or against `x` for semi-log fits).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub fit_column: usize,
    pub semilog: bool,
    pub slope: f64,
}

/// Least-squares slope of `y` on `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

impl SweepTable {
    fn new(columns: &[&str], rows: Vec<Vec<f64>>, fit_column: usize, semilog: bool) -> Self {
        let x: Vec<f64> = rows
            .iter()
            .map(|r| if semilog { r[0] } else { r[0].ln() })
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| r[fit_column].ln()).collect();
        SweepTable {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            slope: fit_slope(&x, &y),
            rows,
            fit_column,
            semilog,
        }
    }

    /// CSV with a header, one row per ladder point, and a `slope` footer row.
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r
                .iter()
                .enumerate()
                .map(|(i, v)| if i == 0 { format!("{v}") } else { format!("{v:.16e}") })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        let mut footer = vec!["slope".to_string()];
        footer.extend((1..self.columns.len()).map(|i| {
            if i == self.fit_column {
                format!("{:.16e}", self.slope)
            } else {
                String::new()
            }
        }));
        s.push_str(&footer.join(","));
        s.push('\n');
        s
    }
}

/// `cos 2πq + cos 2πp + ½ cos 2π(q - p)` written in the `e_n` basis.
pub fn default_gap_symbol() -> FourierSymbol {
    let h = C64::new(0.5, 0.0);
    let q = C64::new(0.25, 0.0);
    FourierSymbol {
        terms: vec![
            ([0, 1], h),
            ([0, -1], h),
            ([1, 0], h),
            ([-1, 0], h),
            ([1, 1], q),
            ([-1, -1], q),
        ],
    }
}

fn symbol_from_rows(rows: &[[f64; 4]]) -> Result<FourierSymbol> {
    let mut terms = Vec::with_capacity(rows.len());
    for r in rows {
        if r[0].fract() != 0.0 || r[1].fract() != 0.0 {
            return Err(CatError::Config(format!("non-integer frequency in {r:?}")));
        }
        terms.push(([r[0] as i64, r[1] as i64], C64::new(r[2], r[3])));
    }
    Ok(FourierSymbol { terms })
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    if cfg.ladder.len() < 3 {
        return Err(CatError::Config("a sweep needs at least 3 ladder points".into()));
    }
    let [a, b, c, d] = cfg.matrix;
    let map = validate_cat_map(a, b, c, d).during("validate_cat_map")?;
    let as_n = |v: i64| -> Result<usize> {
        usize::try_from(v)
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CatError::Config(format!("ladder value {v} is not a valid N")))
    };
    match cfg.kind {
        SweepKind::WawGap => {
            let sym = match &cfg.symbol {
                Some(rows) => symbol_from_rows(rows)?,
                None => default_gap_symbol(),
            };
            let mut rows = Vec::new();
            for &v in &cfg.ladder {
                let n = as_n(v)?;
                let grid = PlanckGrid::for_map(&map, n).during("choose_theta")?;
                let gap = weyl_antiwick_gap(&sym, &map, grid).during("weyl_antiwick_gap")?;
                rows.push(vec![n as f64, gap]);
            }
            Ok(SweepTable::new(&["N", "gap"], rows, 1, false))
        }
        SweepKind::HusimiWidth => {
            let n = cfg
                .n
                .ok_or_else(|| CatError::Config("husimi-width sweep needs N".into()))?;
            let grid = PlanckGrid::for_map(&map, n).during("choose_theta")?;
            let g = cfg.g.unwrap_or_else(|| default_resolution(&map, n));
            let prop = propagator(&map, grid).during("propagator")?;
            let psi0 = torus_coherent([0.0, 0.0], &map, grid).during("torus_coherent")?;
            let frame = map.hyp.frame();
            let hb = grid.hbar();
            let mut rows = Vec::new();
            for &t in &cfg.ladder {
                let psi = QuantumState::new(grid, prop.power(&psi0.amps, t));
                let h = quasimode_husimi(&psi, &map, g).during("husimi")?;
                let [vq, _, _] = h.frame_moments([0.0, 0.0], &frame);
                // 2⟨q'²⟩/ħ - 1 = e^{2λt} for the evolved squeezed state
                rows.push(vec![t as f64, vq, 2.0 * vq / hb - 1.0]);
            }
            Ok(SweepTable::new(&["t", "variance", "excess"], rows, 2, true))
        }
        SweepKind::Scmeasure => {
            let freqs = cfg.frequencies.clone().unwrap_or_else(|| frequency_box(2));
            let mut rows = Vec::new();
            for &v in &cfg.ladder {
                let n = as_n(v)?;
                let exp = ExperimentConfig {
                    matrix: cfg.matrix,
                    t: cfg.t,
                    orbit: cfg.orbit.clone(),
                    delta: cfg.delta,
                    n: Some(n),
                    phi: 0.0,
                    c: default_ball_c(),
                    c0: default_c0(),
                    c1: default_c1(),
                    g: cfg.g,
                    frequencies: Some(freqs.clone()),
                    r_phase: None,
                    r_physical: None,
                    n_cap: DEFAULT_N_CAP,
                    seed: 0,
                    outputs: Outputs::default(),
                };
                let res = resolve(&exp)?;
                let prop = propagator(&map, res.spec.grid).during("propagator")?;
                let q = build_quasimode(&res.spec, &prop).during("build_quasimode")?;
                let h = quasimode_husimi(&q.psi_n, &map, res.g).during("husimi")?;
                let sc = scmeasure_error(&h, &res.spec, &freqs).during("scmeasure_error")?;
                rows.push(vec![n as f64, sc.max_err, sc.rate]);
            }
            Ok(SweepTable::new(&["N", "max_err", "rate"], rows, 1, false))
        }
    }
}
