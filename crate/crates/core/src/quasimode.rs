//! Quasimodes `Ψ = Σ_t e^{-iφt} M̂^t |x₀, c̃₀, θ⟩` built on a prime periodic
//! orbit, and their diagnostics.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::classical::{fourier_mode, orbit_fourier_coefficient, torus_dist, CatMap, Orbit};
use crate::coherent::{check_resolution, husimi, torus_coherent, HusimiGrid};
use crate::error::{CatError, Result};
use crate::linalg;
use crate::quantization::{bump_symbols, position_interval_mass, MassPath};
use crate::quantum::{theta_residual, LinearMap, PlanckGrid, Propagator, QuantumState};

pub const DEFAULT_N_CAP: usize = 1 << 20;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuasimodeSpec {
    pub map: CatMap,
    pub orbit: Orbit,
    pub phi: f64,
    pub delta: f64,
    pub grid: PlanckGrid,
}

impl QuasimodeSpec {
    pub fn period(&self) -> usize {
        self.orbit.period()
    }

    pub fn ehrenfest_time(&self) -> f64 {
        self.map.ehrenfest_time(self.grid.n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 0.25) {
            return Err(CatError::Precondition(format!(
                "delta = {} must lie in (0, 1/4)",
                self.delta
            )));
        }
        let t = self.period() as f64;
        let bound = self.delta * self.ehrenfest_time();
        if t > bound + 1e-12 {
            return Err(CatError::Precondition(format!(
                "orbit length T = {t} exceeds delta * T_E = {bound:.4} at N = {}",
                self.grid.n
            )));
        }
        if theta_residual(&self.map, self.grid.n, self.grid.theta) > 1e-12 {
            return Err(CatError::Precondition(
                "Bloch angle not compatible with the map".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChosenN {
    pub n: usize,
    pub ehrenfest_time: f64,
    /// `T ≤ δ T_E` at the chosen `N`.
    pub holds: bool,
}

/// `N = ⌈e^{λT/δ} / 2π⌉`.
pub fn choose_n(t: usize, delta: f64, lambda: f64, cap: usize) -> Result<ChosenN> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(CatError::Precondition(format!(
            "delta = {delta} must lie in (0, 1/4)"
        )));
    }
    let raw = (lambda * t as f64 / delta).exp() / TAU;
    if raw > cap as f64 {
        return Err(CatError::NTooLarge { n: raw, cap });
    }
    let n = (raw.ceil() as usize).max(1);
    let te = (TAU * n as f64).ln() / lambda;
    Ok(ChosenN {
        n,
        ehrenfest_time: te,
        holds: t as f64 <= delta * te,
    })
}

#[derive(Clone, Debug)]
pub struct Quasimode {
    pub psi: QuantumState,
    pub psi_n: QuantumState,
}

/// Sum of the evolved coherent states along the orbit.
pub fn build_quasimode(spec: &QuasimodeSpec, prop: &Propagator) -> Result<Quasimode> {
    spec.validate()?;
    let x0 = spec.orbit.points[0].to_f64();
    let mut term = torus_coherent(x0, &spec.map, spec.grid)?.amps;
    let mut acc = vec![C64::default(); spec.grid.n];
    for t in 0..spec.period() {
        if t > 0 {
            term = prop.apply(&term);
        }
        let w = C64::from_polar(1.0, -spec.phi * t as f64);
        linalg::axpy(&mut acc, w, &term);
    }
    let psi = QuantumState::new(spec.grid, acc);
    let psi_n = psi.normalized();
    Ok(Quasimode { psi, psi_n })
}

/// `‖(M̂ - e^{iφ}) ψ‖`.
pub fn residual(psi: &QuantumState, phi: f64, prop: &Propagator) -> f64 {
    let m = prop.apply(&psi.amps);
    let e = C64::from_polar(1.0, phi);
    m.iter()
        .zip(&psi.amps)
        .map(|(a, b)| (a - e * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// The residual-minimizing angle `arg ⟨ψ|M̂ψ⟩` for a normalized `ψ`.
pub fn best_phi(psi: &QuantumState, prop: &Propagator) -> f64 {
    psi.inner(&psi.apply(prop)).arg()
}

/// Residuals of one fixed state against `k` equally spaced angles in `[0, 2π)`.
pub fn residual_profile(psi: &QuantumState, prop: &Propagator, k: usize) -> Vec<(f64, f64)> {
    let m = prop.apply(&psi.amps);
    let ip = linalg::dot(&psi.amps, &m);
    let (a, b) = (linalg::norm_sq(&m), psi.norm_sq());
    (0..k)
        .map(|i| {
            let phi = TAU * i as f64 / k as f64;
            // ‖Mψ - e^{iφ}ψ‖² = ‖Mψ‖² + ‖ψ‖² - 2 Re(e^{-iφ} ⟨ψ|Mψ⟩)
            let r2 = a + b - 2.0 * (C64::from_polar(1.0, -phi) * ip).re;
            (phi, r2.max(0.0).sqrt())
        })
        .collect()
}

/// Residual of the normalized quasimode `Ψ_φ` at its own angle, for `k`
/// equally spaced `φ`.
///
/// `(M̂ - e^{iφ})Ψ_φ = e^{iφ}(e^{-iφT}M̂^T - 1)|x₀⟩`, and `‖Ψ_φ‖²` follows from
/// the Gram matrix of the orbit terms, so the propagator runs only `T` times.
pub fn quasimode_residual_sweep(spec: &QuasimodeSpec, prop: &Propagator, k: usize) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    let x0 = spec.orbit.points[0].to_f64();
    let t_len = spec.period();
    let mut terms = vec![torus_coherent(x0, &spec.map, spec.grid)?.amps];
    for _ in 0..t_len {
        let next = prop.apply(terms.last().expect("nonempty"));
        terms.push(next);
    }
    let gram: Vec<Vec<C64>> = (0..t_len)
        .map(|s| (0..t_len).map(|t| linalg::dot(&terms[s], &terms[t])).collect())
        .collect();
    let closing = linalg::dot(&terms[0], &terms[t_len]);
    let (n0, nt) = (linalg::norm_sq(&terms[0]), linalg::norm_sq(&terms[t_len]));
    Ok((0..k)
        .map(|i| {
            let phi = TAU * i as f64 / k as f64;
            let mut norm_sq = 0.0;
            for s in 0..t_len {
                for t in 0..t_len {
                    norm_sq += (C64::from_polar(1.0, phi * (s as f64 - t as f64)) * gram[s][t]).re;
                }
            }
            let num = n0 + nt - 2.0 * (C64::from_polar(1.0, -phi * t_len as f64) * closing).re;
            (phi, (num.max(0.0) / norm_sq).sqrt())
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallMass {
    pub t: usize,
    pub center: [f64; 2],
    pub radius: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallReport {
    pub balls: Vec<BallMass>,
    pub off_support: f64,
    pub max_off_support_density: f64,
    pub disjoint: bool,
    pub total: f64,
}

/// Ball radius `C √ħ e^{λT}`.
pub fn ball_radius(spec: &QuasimodeSpec, c: f64) -> f64 {
    c * spec.grid.hbar().sqrt() * (spec.map.lambda() * spec.period() as f64).exp()
}

/// Husimi masses of `ψ` in the balls around each orbit point and outside them.
pub fn husimi_ball_report(h: &HusimiGrid, spec: &QuasimodeSpec, c: f64) -> Result<BallReport> {
    let radius = ball_radius(spec, c);
    let pts = spec.orbit.points_f64();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = torus_dist(pts[i], pts[j]);
            if d <= 2.0 * radius {
                return Err(CatError::BallsOverlap {
                    t: i,
                    s: j,
                    dist: d,
                    radius,
                });
            }
        }
    }
    if radius >= 0.5 {
        return Err(CatError::Precondition(format!(
            "ball radius {radius:.4} wraps around the torus"
        )));
    }
    let mut balls = Vec::with_capacity(pts.len());
    for (t, x) in pts.iter().enumerate() {
        balls.push(BallMass {
            t,
            center: *x,
            radius,
            mass: h.ball_mass(*x, radius)?,
        });
    }
    let off_support = h.integrate(|x| {
        if pts.iter().all(|p| torus_dist(x, *p) > radius) {
            1.0
        } else {
            0.0
        }
    });
    let regions: Vec<_> = pts.iter().map(|p| (*p, radius)).collect();
    Ok(BallReport {
        balls,
        off_support,
        max_off_support_density: h.max_outside(&regions),
        disjoint: true,
        total: h.total(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScTerm {
    pub n: [i64; 2],
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScMeasure {
    pub terms: Vec<ScTerm>,
    pub max_err: f64,
    /// `ħ^{1/2 - δ}`, the predicted rate without its constant.
    pub rate: f64,
}

/// Compares anti-Wick expectations of `e_n` on `Ψ_n` with the orbit's delta measure.
pub fn scmeasure_error(h: &HusimiGrid, spec: &QuasimodeSpec, freqs: &[[i64; 2]]) -> Result<ScMeasure> {
    let mut terms = Vec::with_capacity(freqs.len());
    for n in freqs {
        if n[0].abs() > 8 || n[1].abs() > 8 {
            return Err(CatError::Precondition(format!(
                "frequency {n:?} outside |n|_inf <= 8"
            )));
        }
        let lhs = h.integrate_complex(|x| fourier_mode(*n, x));
        let rhs = orbit_fourier_coefficient(&spec.orbit, *n);
        terms.push(ScTerm {
            n: *n,
            lhs: [lhs.re, lhs.im],
            rhs: [rhs.re, rhs.im],
            err: (lhs - rhs).norm(),
        });
    }
    let max_err = terms.iter().map(|t| t.err).fold(0.0, f64::max);
    Ok(ScMeasure {
        terms,
        max_err,
        rate: spec.grid.hbar().powf(0.5 - spec.delta),
    })
}

/// All `n` with `|n|_inf <= k`.
pub fn frequency_box(k: i64) -> Vec<[i64; 2]> {
    let mut out = Vec::new();
    for a in -k..=k {
        for b in -k..=k {
            out.push([a, b]);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Physical,
    Phase,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonequiConstants {
    pub c0: f64,
    pub c1: f64,
}

impl Default for NonequiConstants {
    fn default() -> Self {
        NonequiConstants { c0: 0.5, c1: 0.15 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub center: Vec<f64>,
    pub mass: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonequiReport {
    pub space: Space,
    pub r: f64,
    pub admissible: [f64; 2],
    pub centers_scanned: usize,
    pub sup_ratio: f64,
    pub inf_ratio: f64,
    pub hit: Witness,
    pub miss: Witness,
}

/// Admissible radii `[2C₀√ħ e^{λT}, c₁/T]` (physical) or `[…, c₁/√T]` (phase).
pub fn admissible_radii(spec: &QuasimodeSpec, space: Space, k: NonequiConstants) -> [f64; 2] {
    let t = spec.period() as f64;
    let lo = 2.0 * k.c0 * spec.grid.hbar().sqrt() * (spec.map.lambda() * t).exp();
    let hi = match space {
        Space::Physical => k.c1 / t,
        Space::Phase => k.c1 / t.sqrt(),
    };
    [lo, hi]
}

/// Scans balls (phase space) or arcs (physical space) of radius `r` centered
/// at the orbit points and on a lattice net with `⌈1/(3r)⌉` points per axis.
///
/// In phase space the lower bump `b⁻` certifies hits and the upper bump `b⁺`
/// certifies misses; in physical space arcs are measured through the Husimi
/// strip integral.
pub fn nonequidistribution_report(
    psi_n: &QuantumState,
    h: &HusimiGrid,
    spec: &QuasimodeSpec,
    space: Space,
    r: f64,
    k: NonequiConstants,
) -> Result<NonequiReport> {
    let adm = admissible_radii(spec, space, k);
    if r < adm[0] || r > adm[1] {
        return Err(CatError::RadiusOutOfRange {
            r,
            lo: adm[0],
            hi: adm[1],
        });
    }
    let pts = spec.orbit.points_f64();
    let per_axis = (1.0 / (3.0 * r)).ceil() as usize;
    let net = |i: usize| i as f64 / per_axis as f64;

    // (center, hit-mass, miss-mass)
    let mut scanned: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    match space {
        Space::Phase => {
            let mut centers: Vec<[f64; 2]> = pts.clone();
            for i in 0..per_axis {
                for j in 0..per_axis {
                    centers.push([net(i), net(j)]);
                }
            }
            for c in centers {
                let (bm, bp) = bump_symbols(c, r)?;
                let lo = h.integrate(|x| bm.eval(x));
                let hi = h.integrate(|x| bp.eval(x));
                scanned.push((c.to_vec(), lo, hi));
            }
        }
        Space::Physical => {
            let mut centers: Vec<f64> = pts.iter().map(|p| p[0]).collect();
            centers.extend((0..per_axis).map(net));
            for c in centers {
                let m = position_interval_mass(psi_n, &spec.map, c, r, MassPath::Husimi)?;
                scanned.push((vec![c], m, m));
            }
        }
    }
    let vol = match space {
        Space::Phase => PI * r * r,
        Space::Physical => 2.0 * r,
    };
    let hit = scanned
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one center");
    let miss = scanned
        .iter()
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .expect("at least one center");
    Ok(NonequiReport {
        space,
        r,
        admissible: adm,
        centers_scanned: scanned.len(),
        sup_ratio: hit.1 / vol,
        inf_ratio: miss.2 / vol,
        hit: Witness {
            center: hit.0.clone(),
            mass: hit.1,
            ratio: hit.1 / vol,
        },
        miss: Witness {
            center: miss.0.clone(),
            mass: miss.2,
            ratio: miss.2 / vol,
        },
    })
}

/// Husimi grid of a quasimode after checking the resolution precondition.
pub fn quasimode_husimi(psi: &QuantumState, map: &CatMap, g: usize) -> Result<HusimiGrid> {
    check_resolution(map, psi.grid.n, g)?;
    husimi(psi, map, g)
}

/// Normalized masses of single-orbit-point balls for the normalized state.
pub fn orbit_point_masses(h: &HusimiGrid, spec: &QuasimodeSpec, r: f64) -> Result<Vec<f64>> {
    spec.orbit
        .points_f64()
        .iter()
        .map(|x| h.ball_mass(*x, r))
        .collect()
}
