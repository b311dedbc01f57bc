//! Squeezed Gaussians on the line, their periodization onto `H_{N,θ}`, and
//! Husimi densities.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::classical::{boost, mat_apply, mat_inv_sl2, mat_mul, rotation, torus_dist, CatMap, Mat2};
use crate::error::{CatError, Result};
use crate::quantum::{PlanckGrid, QuantumState};

/// `exp(-x)` below this is treated as zero when truncating Gaussian sums.
const TAIL_EXPONENT: f64 = 36.0;
const MAX_TRANSLATES: usize = 64;

/// A normalized Gaussian `T̂_x Ŝ |0⟩` on the line for a symplectic `S`.
///
/// `φ(q) = c · e^{-i q₀p₀/2ħ} e^{i p₀ q/ħ} exp(i Z (q-q₀)²/2ħ)` with
/// `Z = (S₂₁ + i S₂₂)/(S₁₁ + i S₁₂)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneGaussian {
    pub x0: [f64; 2],
    pub z: C64,
    pub pref: C64,
    pub hbar: f64,
}

impl PlaneGaussian {
    pub fn from_frame(s: &Mat2, x0: [f64; 2], hbar: f64) -> Self {
        let den = C64::new(s[0][0], s[0][1]);
        let z = C64::new(s[1][0], s[1][1]) / den;
        let pref = (PI * hbar).powf(-0.25) / den.sqrt();
        PlaneGaussian { x0, z, pref, hbar }
    }

    pub fn standard(x0: [f64; 2], hbar: f64) -> Self {
        Self::from_frame(&[[1.0, 0.0], [0.0, 1.0]], x0, hbar)
    }

    /// Gaussian `|x, c̃⟩` for a squeeze parameter `c̃`.
    pub fn squeezed(c: C64, x0: [f64; 2], hbar: f64) -> Self {
        Self::from_frame(&squeeze_frame(c), x0, hbar)
    }

    pub fn eval(&self, q: f64) -> C64 {
        let [q0, p0] = self.x0;
        let dq = q - q0;
        let phase = (p0 * q - 0.5 * q0 * p0) / self.hbar;
        let e = C64::new(0.0, 1.0) * self.z * dq * dq / (2.0 * self.hbar) + C64::new(0.0, phase);
        self.pref * e.exp()
    }

    /// Half-width in `q` beyond which `|φ|²` has dropped by `e^{-2·36}`.
    pub fn support_radius(&self) -> f64 {
        (2.0 * TAIL_EXPONENT * self.hbar / self.z.im).sqrt()
    }
}

/// Frame `R(b₁)B(b₂)R(-b₁)` with `c̃ = -b₂ e^{-2ib₁}`.
pub fn squeeze_frame(c: C64) -> Mat2 {
    let b2 = c.norm();
    if b2 == 0.0 {
        return [[1.0, 0.0], [0.0, 1.0]];
    }
    let b1 = -(-c).arg() / 2.0;
    mat_mul(&mat_mul(&rotation(b1), &boost(b2)), &rotation(-b1))
}

/// `⟨g₁|g₂⟩` for two plane Gaussians, in closed form.
pub fn plane_overlap(g1: &PlaneGaussian, g2: &PlaneGaussian) -> C64 {
    let h = g1.hbar;
    let i = C64::new(0.0, 1.0);
    let [q1, p1] = g1.x0;
    let [q2, p2] = g2.x0;
    let z1c = g1.z.conj();
    let z2 = g2.z;
    let alpha = -i * (z2 - z1c) / (2.0 * h);
    let beta = i / h * (z1c * q1 - z2 * q2) + i * (p2 - p1) / h;
    let gamma = i / (2.0 * h) * (z2 * q2 * q2 - z1c * q1 * q1) + i * (q1 * p1 - q2 * p2) / (2.0 * h);
    let val = (C64::new(PI, 0.0) / alpha).sqrt() * (beta * beta / (4.0 * alpha) + gamma).exp();
    g1.pref.conj() * g2.pref * val
}

/// `⟨x, 0 | c̃⟩`: standard coherent state at `x` against the squeezed state at the origin.
pub fn plane_overlap_squeezed(x: [f64; 2], c: C64, hbar: f64) -> C64 {
    plane_overlap(
        &PlaneGaussian::standard(x, hbar),
        &PlaneGaussian::squeezed(c, [0.0, 0.0], hbar),
    )
}

/// The analyzing Gaussian `|x, c̃₀⟩` of a map, in the map's own frame `Q`.
pub fn map_gaussian(map: &CatMap, x0: [f64; 2], hbar: f64) -> PlaneGaussian {
    PlaneGaussian::from_frame(&map.hyp.frame(), x0, hbar)
}

/// Periodization of a plane Gaussian onto `H_{N,θ}`.
///
/// Amplitude `j` collects `N^{-1/2} e^{iθ₁m} φ(q_j + m)` over integer `m`;
/// momentum periodization is implicit in sampling at spacing `1/N`.
pub fn periodize(g: &PlaneGaussian, grid: PlanckGrid) -> Result<QuantumState> {
    let n = grid.n;
    let nf = n as f64;
    let beta = grid.beta();
    let rad = g.support_radius();
    let n_max = rad.ceil() as usize + 1;
    if n_max > MAX_TRANSLATES {
        return Err(CatError::TruncationFailure { n_max });
    }
    let lo = (nf * (g.x0[0] - rad) - beta).floor() as i64;
    let hi = (nf * (g.x0[0] + rad) - beta).ceil() as i64;
    let scale = 1.0 / nf.sqrt();
    let mut amps = vec![C64::default(); n];
    for ke in lo..=hi {
        let m = ke.div_euclid(n as i64);
        let j = ke.rem_euclid(n as i64) as usize;
        let q = (ke as f64 + beta) / nf;
        let tw = if m == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::from_polar(1.0, grid.theta[0] * m as f64)
        };
        amps[j] += tw * g.eval(q) * scale;
    }
    Ok(QuantumState::new(grid, amps))
}

/// The torus coherent state `|x₀, c̃₀, θ⟩` of the map.
pub fn torus_coherent(x0: [f64; 2], map: &CatMap, grid: PlanckGrid) -> Result<QuantumState> {
    periodize(&map_gaussian(map, x0, grid.hbar()), grid)
}

/// `⟨x, c̃₀, θ | ψ⟩` by a sparse inner product against the analyzing state.
pub fn coherent_overlap(psi: &QuantumState, map: &CatMap, x: [f64; 2]) -> Result<C64> {
    let phi = torus_coherent(x, map, psi.grid)?;
    Ok(phi.inner(psi))
}

/// Husimi density of `ψ` at a single point.
pub fn husimi_at(psi: &QuantumState, map: &CatMap, x: [f64; 2]) -> Result<f64> {
    Ok(psi.grid.n as f64 * coherent_overlap(psi, map, x)?.norm_sqr())
}

/// Husimi density sampled at cell centers `((a+½)/G, (b+½)/G)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HusimiGrid {
    pub g: usize,
    pub n: usize,
    pub theta: [f64; 2],
    pub matrix: [i64; 4],
    pub c0: [f64; 2],
    /// Row-major: `values[a * G + b]` is the density at `(q_a, p_b)`.
    pub values: Vec<f64>,
}

impl HusimiGrid {
    pub fn center(&self, a: usize, b: usize) -> [f64; 2] {
        let gf = self.g as f64;
        [(a as f64 + 0.5) / gf, (b as f64 + 0.5) / gf]
    }

    pub fn at(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.g + b]
    }

    pub fn weight(&self) -> f64 {
        1.0 / (self.g * self.g) as f64
    }

    /// `Σ values / G²`, the quadrature of the density over the torus.
    pub fn total(&self) -> f64 {
        // pairwise row sums keep the result independent of thread count
        let rows: Vec<f64> = self.values.chunks(self.g).map(|r| r.iter().sum()).collect();
        rows.iter().sum::<f64>() * self.weight()
    }

    /// Quadrature of `f · density`.
    pub fn integrate<F: Fn([f64; 2]) -> f64>(&self, f: F) -> f64 {
        let g = self.g;
        let rows: Vec<f64> = (0..g)
            .map(|a| (0..g).map(|b| f(self.center(a, b)) * self.at(a, b)).sum())
            .collect();
        rows.iter().sum::<f64>() * self.weight()
    }

    pub fn integrate_complex<F: Fn([f64; 2]) -> C64>(&self, f: F) -> C64 {
        let g = self.g;
        let rows: Vec<C64> = (0..g)
            .map(|a| (0..g).map(|b| f(self.center(a, b)) * self.at(a, b)).sum())
            .collect();
        rows.iter().sum::<C64>() * self.weight()
    }

    /// Mass in the geodesic ball `B₂(center, radius)`.
    pub fn ball_mass(&self, center: [f64; 2], radius: f64) -> Result<f64> {
        let min = 2.0 / self.g as f64;
        if radius < min {
            return Err(CatError::ResolutionTooCoarse {
                g: self.g,
                n: self.n,
                min_g: (2.0 / radius).ceil() as usize,
            });
        }
        Ok(self.integrate(|x| if torus_dist(x, center) <= radius { 1.0 } else { 0.0 }))
    }

    /// Largest value outside the union of the given balls.
    pub fn max_outside(&self, balls: &[([f64; 2], f64)]) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..self.g {
            for b in 0..self.g {
                let x = self.center(a, b);
                if balls.iter().all(|(c, r)| torus_dist(x, *c) > *r) {
                    m = m.max(self.at(a, b));
                }
            }
        }
        m
    }

    /// Second moments `(⟨q'²⟩, ⟨p'²⟩, ⟨q'p'⟩)` in a frame, about `center`.
    ///
    /// Displacements are wrapped into `[-½, ½)²` and then mapped by `frame⁻¹`.
    pub fn frame_moments(&self, center: [f64; 2], frame: &Mat2) -> [f64; 3] {
        let inv = mat_inv_sl2(frame);
        let wrap = |t: f64| t - t.round();
        let mut acc = [0.0; 4];
        for a in 0..self.g {
            let mut row = [0.0; 4];
            for b in 0..self.g {
                let x = self.center(a, b);
                let d = [wrap(x[0] - center[0]), wrap(x[1] - center[1])];
                let qp = mat_apply(&inv, d);
                let w = self.at(a, b);
                row[0] += w;
                row[1] += w * qp[0] * qp[0];
                row[2] += w * qp[1] * qp[1];
                row[3] += w * qp[0] * qp[1];
            }
            for k in 0..4 {
                acc[k] += row[k];
            }
        }
        [acc[1] / acc[0], acc[2] / acc[0], acc[3] / acc[0]]
    }
}

/// Smallest admissible resolution for Husimi quadrature at this `N` and map.
///
/// The analyzing Gaussian has narrowest width `√ħ / σ_max(Q)`; requiring
/// `G² ≥ 6 N σ_max²` keeps the midpoint-rule aliasing error near `e^{-6π}`.
pub fn min_resolution(map: &CatMap, n: usize) -> usize {
    let s = sigma_max(&map.hyp.frame());
    let g = (6.0 * n as f64 * s * s).sqrt().ceil() as usize;
    g.max(16)
}

pub fn check_resolution(map: &CatMap, n: usize, g: usize) -> Result<()> {
    let min_g = min_resolution(map, n);
    if g < min_g {
        return Err(CatError::ResolutionTooCoarse { g, n, min_g });
    }
    Ok(())
}

fn sigma_max(m: &Mat2) -> f64 {
    let fro2: f64 = m.iter().flatten().map(|x| x * x).sum();
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    ((fro2 + disc) / 2.0).sqrt()
}

/// Husimi density on a `G × G` grid.
///
/// For each position row the extended-site weights are folded modulo `G` and
/// a single length-`G` FFT produces the whole momentum row.
pub fn husimi(psi: &QuantumState, map: &CatMap, g: usize) -> Result<HusimiGrid> {
    if g < 16 {
        return Err(CatError::ResolutionTooCoarse {
            g,
            n: psi.grid.n,
            min_g: 16,
        });
    }
    let grid = psi.grid;
    let n = grid.n;
    let nf = n as f64;
    let gf = g as f64;
    let beta = grid.beta();
    let hbar = grid.hbar();
    let fft = FftPlanner::new().plan_fft_forward(g);
    // momentum enters only as a phase, so one analyzing Gaussian at p = 0 serves every row
    let g0 = map_gaussian(map, [0.0, 0.0], hbar);
    let rad = g0.support_radius();
    if rad.ceil() as usize + 1 > MAX_TRANSLATES {
        return Err(CatError::TruncationFailure {
            n_max: rad.ceil() as usize + 1,
        });
    }
    let pref = g0.pref.conj() / nf.sqrt();

    let values: Vec<f64> = (0..g)
        .into_par_iter()
        .flat_map_iter(|a| {
            let qa = (a as f64 + 0.5) / gf;
            let lo = (nf * (qa - rad) - beta).floor() as i64;
            let hi = (nf * (qa + rad) - beta).ceil() as i64;
            let mut buf = vec![C64::default(); g];
            for ke in lo..=hi {
                let m = ke.div_euclid(n as i64);
                let j = ke.rem_euclid(n as i64) as usize;
                let dq = (ke as f64 + beta) / nf - qa;
                let gauss = (C64::new(0.0, 1.0) * g0.z * dq * dq / (2.0 * hbar)).exp().conj();
                let tw = if m == 0 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::from_polar(1.0, -grid.theta[0] * m as f64)
                };
                // e^{-iπ k_e / G} from the half-cell momentum offset
                let half = C64::from_polar(1.0, -PI * ((ke.rem_euclid(2 * g as i64)) as f64) / gf);
                buf[ke.rem_euclid(g as i64) as usize] += tw * gauss * half * psi.amps[j];
            }
            fft.process(&mut buf);
            buf.into_iter()
                .map(move |z| nf * (pref * z).norm_sqr())
                .collect::<Vec<_>>()
        })
        .collect();

    Ok(HusimiGrid {
        g,
        n,
        theta: grid.theta,
        matrix: map.entries(),
        c0: map.hyp.c0,
        values,
    })
}

/// Mass of the Husimi density in `B₂(center, radius)` computed from the state
/// on a local grid fine enough for the analyzing Gaussian.
pub fn ball_mass_state(
    psi: &QuantumState,
    map: &CatMap,
    center: [f64; 2],
    radius: f64,
) -> Result<f64> {
    let s = sigma_max(&map.hyp.frame());
    let h = (psi.grid.hbar().sqrt() / (2.0 * s)).min(radius / 8.0);
    let k = (radius / h).ceil() as i64;
    let h = radius / k as f64;
    let mut total = 0.0;
    for a in -k..k {
        for b in -k..k {
            let d = [(a as f64 + 0.5) * h, (b as f64 + 0.5) * h];
            if d[0].hypot(d[1]) <= radius {
                let x = [center[0] + d[0], center[1] + d[1]];
                total += husimi_at(psi, map, x)?;
            }
        }
    }
    Ok(total * h * h)
}

/// Wraps a point into `[0,1)²`.
pub fn wrap_point(x: [f64; 2]) -> [f64; 2] {
    [x[0].rem_euclid(1.0), x[1].rem_euclid(1.0)]
}

/// Phase-insensitive distance `min_c ‖a - c b‖` between two vectors.
pub fn phase_stripped_distance(a: &[C64], b: &[C64]) -> f64 {
    let ip: C64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let ph = if ip.norm() > 0.0 { ip / ip.norm() } else { C64::new(1.0, 0.0) };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ph * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
