//! The nine numerical acceptance checks, each returning a deterministic record.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classical::{
    enumerate_prime_orbits, fixed_point_count, wedge_int, CatMap, RationalPoint,
};
use crate::coherent::{husimi, torus_coherent};
use crate::error::Result;
use crate::experiment::{default_gap_symbol, fit_slope};
use crate::linalg;
use crate::quantization::weyl_antiwick_gap;
use crate::quantum::{
    egorov_defect, propagator, translation, unitarity_defect, LinearMap, PlanckGrid, QuantumState,
};
use crate::quasimode::{
    build_quasimode, frequency_box, husimi_ball_report, nonequidistribution_report,
    quasimode_husimi, residual, scmeasure_error, NonequiConstants, QuasimodeSpec, Space,
};

pub const DEFAULT_SEED: u64 = 20240917;
pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub version: String,
    pub seed: u64,
    pub pass: bool,
    pub criteria: Vec<CriterionReport>,
}

struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    fn new() -> Self {
        Builder { checks: Vec::new() }
    }

    fn below(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            limit: format!("< {limit:e}"),
            pass: value < limit,
        });
    }

    fn at_most(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            limit: format!("<= {limit}"),
            pass: value <= limit,
        });
    }

    fn at_least(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            limit: format!(">= {limit}"),
            pass: value >= limit,
        });
    }

    fn near(&mut self, name: impl Into<String>, value: f64, target: f64, tol: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            limit: format!("{target} +- {tol}"),
            pass: (value - target).abs() <= tol,
        });
    }

    fn relative(&mut self, name: impl Into<String>, value: f64, target: f64, rel: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            limit: format!("{target} within {}%", rel * 100.0),
            pass: (value / target - 1.0).abs() <= rel,
        });
    }

    fn holds(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push(Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            limit: "== 1".into(),
            pass: ok,
        });
    }

    fn finish(self, id: u8, title: &str) -> CriterionReport {
        CriterionReport {
            id,
            title: title.into(),
            pass: self.checks.iter().all(|c| c.pass),
            checks: self.checks,
        }
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "propagator unitarity and exact Egorov",
        2 => "translation composition law",
        3 => "coherent-state normalization and Husimi resolution of identity",
        4 => "Husimi spreading along the unstable axis",
        5 => "periodic-orbit enumeration",
        6 => "quasimode norm, residual and Husimi balls",
        7 => "semiclassical measure of the quasimodes",
        8 => "non-equidistribution witnesses",
        9 => "Weyl versus anti-Wick gap rate",
        _ => "unknown",
    }
}

fn arnold_t2_spec(n: usize) -> Result<QuasimodeSpec> {
    let map = CatMap::arnold();
    let orbit = enumerate_prime_orbits(&map, 2, 100)?
        .into_iter()
        .find(|o| o.points.contains(&RationalPoint::new(4, 3, 5)))
        .expect("the period-two orbit through (4/5, 3/5) exists");
    let grid = PlanckGrid::for_map(&map, n)?;
    Ok(QuasimodeSpec {
        map,
        orbit,
        phi: 0.0,
        delta: 0.24,
        grid,
    })
}

fn criterion_1(_seed: u64) -> Result<CriterionReport> {
    let map = CatMap::arnold();
    let mut b = Builder::new();
    for n in [482usize, 1024, 4096] {
        let prop = propagator(&map, PlanckGrid::for_map(&map, n)?)?;
        b.below(format!("unitarity N={n}"), unitarity_defect(&prop), 1e-10);
        let mut worst: f64 = 0.0;
        for v in frequency_box(3) {
            worst = worst.max(egorov_defect(&prop, v));
        }
        b.below(format!("egorov N={n}"), worst, 1e-8);
    }
    Ok(b.finish(1, title(1)))
}

fn criterion_2(seed: u64) -> Result<CriterionReport> {
    let n = 512usize;
    let grid = PlanckGrid::new(n, [0.0, 0.0]);
    let mut rng = linalg::rng(seed ^ 2);
    let psi = QuantumState::random(grid, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let u = [rng.random_range(-256..256), rng.random_range(-256..256)];
        let v = [rng.random_range(-256..256), rng.random_range(-256..256)];
        let lhs = translation(u, grid).apply(&translation(v, grid).apply(&psi.amps));
        let ph = C64::from_polar(1.0, PI * wedge_int(u, v) as f64 / n as f64);
        let rhs: Vec<C64> = translation([u[0] + v[0], u[1] + v[1]], grid)
            .apply(&psi.amps)
            .into_iter()
            .map(|z| z * ph)
            .collect();
        worst = worst.max(linalg::norm(&linalg::sub(&lhs, &rhs)));
    }
    let mut b = Builder::new();
    b.below("max composition defect over 50 pairs", worst, 1e-12);
    Ok(b.finish(2, title(2)))
}

fn criterion_3(seed: u64) -> Result<CriterionReport> {
    let map = CatMap::arnold();
    let grid = PlanckGrid::for_map(&map, 4096)?;
    let mut b = Builder::new();
    let mut worst_norm: f64 = 0.0;
    for x in [[0.0, 0.0], [0.8, 0.6], [0.123, 0.987]] {
        worst_norm = worst_norm.max((torus_coherent(x, &map, grid)?.norm_sq() - 1.0).abs());
    }
    b.below("coherent norm error", worst_norm, 1e-8);
    let mut worst_id: f64 = 0.0;
    let states = [
        QuantumState::random(grid, seed),
        QuantumState::random(grid, seed + 1),
        torus_coherent([0.8, 0.6], &map, grid)?,
    ];
    for psi in &states {
        let h = husimi(psi, &map, 256)?;
        worst_id = worst_id.max((h.total() - 1.0).abs());
    }
    b.below("resolution of identity error at G=256", worst_id, 5e-3);
    Ok(b.finish(3, title(3)))
}

fn criterion_4(_seed: u64) -> Result<CriterionReport> {
    let map = CatMap::arnold();
    let grid = PlanckGrid::for_map(&map, 4096)?;
    let prop = propagator(&map, grid)?;
    let frame = map.hyp.frame();
    let hb = grid.hbar();
    let mut b = Builder::new();
    let mut psi = torus_coherent([0.0, 0.0], &map, grid)?;
    let (mut ts, mut logs) = (Vec::new(), Vec::new());
    for t in 0..=2 {
        let h = husimi(&psi, &map, 256)?;
        let [vq, _, _] = h.frame_moments([0.0, 0.0], &frame);
        let th = (map.lambda() * t as f64).tanh();
        b.relative(format!("unstable variance t={t}"), vq, hb / (1.0 - th), 0.05);
        ts.push(t as f64);
        logs.push((2.0 * vq / hb - 1.0).ln());
        psi = psi.apply(&prop);
    }
    b.relative("log-variance slope", fit_slope(&ts, &logs), 2.0 * map.lambda(), 0.05);
    Ok(b.finish(4, title(4)))
}

fn criterion_5(_seed: u64) -> Result<CriterionReport> {
    let map = CatMap::arnold();
    let mut b = Builder::new();
    let mut prime_counts = Vec::new();
    for t in 1..=4u32 {
        let l = fixed_point_count(&map, t)?;
        b.near(format!("|det(M^{t} - 1)|"), l as f64, [1.0, 5.0, 16.0, 45.0][t as usize - 1], 0.0);
        prime_counts.push(enumerate_prime_orbits(&map, t, 10_000)?.len() as u64);
        let divisor_sum: u64 = (1..=t)
            .filter(|d| t % d == 0)
            .map(|d| d as u64 * prime_counts[d as usize - 1])
            .sum();
        b.near(format!("divisor identity T={t}"), divisor_sum as f64, l as f64, 0.0);
    }
    let found = enumerate_prime_orbits(&map, 2, 100)?.iter().any(|o| {
        let mut pts = o.points.clone();
        pts.sort();
        pts == vec![RationalPoint::new(1, 2, 5), RationalPoint::new(4, 3, 5)]
    });
    b.holds("orbit {(4/5,3/5),(1/5,2/5)} found", found);
    Ok(b.finish(5, title(5)))
}

fn criterion_6(_seed: u64) -> Result<CriterionReport> {
    let spec = arnold_t2_spec(4096)?;
    let prop = propagator(&spec.map, spec.grid)?;
    let q = build_quasimode(&spec, &prop)?;
    let mut b = Builder::new();
    b.near("norm_sq", q.psi.norm_sq(), 2.0, 0.02);
    b.at_most("residual", residual(&q.psi_n, 0.0, &prop), 2f64.sqrt() + 0.01);
    let h = quasimode_husimi(&q.psi, &spec.map, 256)?;
    let rep = husimi_ball_report(&h, &spec, 2.0)?;
    b.holds("two disjoint balls", rep.disjoint && rep.balls.len() == 2);
    for ball in &rep.balls {
        b.near(format!("ball mass t={}", ball.t), ball.mass, 1.0, 0.02);
    }
    b.below("off-support mass", rep.off_support, 1e-6);
    Ok(b.finish(6, title(6)))
}

fn criterion_7(_seed: u64) -> Result<CriterionReport> {
    let mut b = Builder::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in [1024usize, 2048, 4096] {
        let spec = arnold_t2_spec(n)?;
        let prop = propagator(&spec.map, spec.grid)?;
        let q = build_quasimode(&spec, &prop)?;
        let h = quasimode_husimi(&q.psi_n, &spec.map, 256)?;
        let sc = scmeasure_error(&h, &spec, &frequency_box(2))?;
        if n == 4096 {
            b.at_most("max error |n|<=2 at N=4096", sc.max_err, 0.05);
        }
        xs.push((n as f64).ln());
        ys.push(sc.max_err.ln());
    }
    b.at_most("N-ladder slope", fit_slope(&xs, &ys), -(0.5 - 0.24) + 0.1);
    Ok(b.finish(7, title(7)))
}

fn criterion_8(_seed: u64) -> Result<CriterionReport> {
    let spec = arnold_t2_spec(4096)?;
    let prop = propagator(&spec.map, spec.grid)?;
    let q = build_quasimode(&spec, &prop)?;
    let h = quasimode_husimi(&q.psi_n, &spec.map, 256)?;
    let k = NonequiConstants::default();
    let mut b = Builder::new();
    let phase = nonequidistribution_report(&q.psi_n, &h, &spec, Space::Phase, 0.1, k)?;
    let on_orbit = spec
        .orbit
        .points_f64()
        .iter()
        .any(|x| phase.hit.center == x.to_vec());
    b.holds("phase hit centered on an orbit point", on_orbit);
    b.at_least("phase hit mass r=0.1", phase.hit.mass, 0.48);
    b.below("phase miss mass r=0.1", phase.miss.mass, 1e-6);
    let phys = nonequidistribution_report(&q.psi_n, &h, &spec, Space::Physical, 0.05, k)?;
    b.at_least("physical hit mass r=0.05", phys.hit.mass, 0.48);
    b.below("physical miss mass r=0.05", phys.miss.mass, 1e-6);
    Ok(b.finish(8, title(8)))
}

fn criterion_9(_seed: u64) -> Result<CriterionReport> {
    let map = CatMap::arnold();
    let sym = default_gap_symbol();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in [512usize, 1024, 2048] {
        let gap = weyl_antiwick_gap(&sym, &map, PlanckGrid::for_map(&map, n)?)?;
        xs.push((n as f64).ln());
        ys.push(gap.ln());
    }
    let mut b = Builder::new();
    b.near("log-log gap slope", fit_slope(&xs, &ys), -1.0, 0.3);
    Ok(b.finish(9, title(9)))
}

/// Runs one criterion. Errors become a failing check rather than aborting.
pub fn run_criterion(id: u8, seed: u64) -> CriterionReport {
    let out = match id {
        1 => criterion_1(seed),
        2 => criterion_2(seed),
        3 => criterion_3(seed),
        4 => criterion_4(seed),
        5 => criterion_5(seed),
        6 => criterion_6(seed),
        7 => criterion_7(seed),
        8 => criterion_8(seed),
        9 => criterion_9(seed),
        _ => {
            return CriterionReport {
                id,
                title: title(id).into(),
                pass: false,
                checks: Vec::new(),
            }
        }
    };
    out.unwrap_or_else(|e| CriterionReport {
        id,
        title: title(id).into(),
        pass: false,
        checks: vec![Check {
            name: format!("error: {e}"),
            value: f64::NAN,
            limit: "no error".into(),
            pass: false,
        }],
    })
}

pub fn run_selftest(ids: &[u8], seed: u64) -> SelftestReport {
    let criteria: Vec<CriterionReport> = ids.iter().map(|&id| run_criterion(id, seed)).collect();
    SelftestReport {
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        pass: criteria.iter().all(|c| c.pass),
        criteria,
    }
}

/// Canonical JSON text of a report.
pub fn render(report: &SelftestReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// One `PASS`/`FAIL` line per criterion.
pub fn summary_line(c: &CriterionReport) -> String {
    let failed: Vec<String> = c
        .checks
        .iter()
        .filter(|k| !k.pass)
        .map(|k| format!("{} = {:e} (want {})", k.name, k.value, k.limit))
        .collect();
    let verdict = if c.pass { "PASS" } else { "FAIL" };
    if failed.is_empty() {
        format!("criterion {:>2} {verdict}: {}", c.id, c.title)
    } else {
        format!("criterion {:>2} {verdict}: {} [{}]", c.id, c.title, failed.join("; "))
    }
}
