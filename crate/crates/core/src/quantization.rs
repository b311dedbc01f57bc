//! Weyl and anti-Wick quantization of torus symbols.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::classical::{fourier_mode, mat_apply, mat_inv_sl2, torus_dist, CatMap};
use crate::coherent::{check_resolution, husimi, map_gaussian, HusimiGrid};
use crate::error::{CatError, Result};
use crate::linalg;
use crate::quantum::{translation, LinearMap, PlanckGrid, QuantumState};

/// Trigonometric polynomial `a(x) = Σ ã(n) e^{2πi n∧x}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FourierSymbol {
    pub terms: Vec<([i64; 2], C64)>,
}

impl FourierSymbol {
    pub fn constant(c: f64) -> Self {
        FourierSymbol {
            terms: vec![([0, 0], C64::new(c, 0.0))],
        }
    }

    pub fn mode(n: [i64; 2]) -> Self {
        FourierSymbol {
            terms: vec![(n, C64::new(1.0, 0.0))],
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> C64 {
        self.terms.iter().map(|(n, c)| c * fourier_mode(*n, x)).sum()
    }

    /// `ã(-n) = conj(ã(n))` for every term, i.e. the symbol is real.
    pub fn is_real(&self) -> bool {
        let merged = self.merged();
        merged.iter().all(|(n, c)| {
            let partner = merged
                .get(&[-n[0], -n[1]])
                .copied()
                .unwrap_or_default();
            (partner - c.conj()).norm() <= 1e-14 * (1.0 + c.norm())
        })
    }

    /// Coefficients summed per frequency.
    pub fn merged(&self) -> BTreeMap<[i64; 2], C64> {
        let mut out = BTreeMap::new();
        for (n, c) in &self.terms {
            *out.entry(*n).or_insert(C64::default()) += c;
        }
        out
    }

    /// `Σ |ã(n)|`, a bound on the Weyl operator norm.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }

    pub fn max_frequency(&self) -> i64 {
        self.terms
            .iter()
            .map(|(n, _)| n[0].abs().max(n[1].abs()))
            .max()
            .unwrap_or(0)
    }

    /// Coefficients of `a ∘ M`: `e_n ∘ M = e_{M⁻¹n}`.
    pub fn compose_map(&self, map: &CatMap) -> Self {
        FourierSymbol {
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (map.apply_inv_int(*n), *c))
                .collect(),
        }
    }

    /// Random real trigonometric polynomial with frequencies in `[-k, k]²`.
    pub fn random_real<R: Rng>(rng: &mut R, k: i64, terms: usize) -> Self {
        let mut out = Vec::new();
        for _ in 0..terms {
            let n = [rng.random_range(-k..=k), rng.random_range(-k..=k)];
            if n == [0, 0] {
                out.push((n, C64::new(rng.random_range(-1.0..1.0), 0.0)));
                continue;
            }
            let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * 0.5;
            out.push((n, c));
            out.push(([-n[0], -n[1]], c.conj()));
        }
        FourierSymbol { terms: out }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BumpKind {
    Minus,
    Plus,
}

/// Smooth radial bump equal to 1 on `B₂(center, inner)` and 0 outside `B₂(center, outer)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 2],
    pub inner: f64,
    pub outer: f64,
}

impl Bump {
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let d = torus_dist(x, self.center);
        smooth_step((self.outer - d) / (self.outer - self.inner))
    }
}

/// `S(t) = f(t) / (f(t) + f(1-t))` with `f(t) = e^{-1/t}` for `t > 0`; 0 for
/// `t <= 0`, 1 for `t >= 1`, and `C^∞` in between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let f = |s: f64| (-1.0 / s).exp();
    let a = f(t);
    a / (a + f(1.0 - t))
}

/// A torus symbol: Fourier series, sampled grid, or smooth bump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Symbol {
    Fourier(FourierSymbol),
    /// Values at cell centers of a `g × g` grid, bilinear periodic interpolation.
    Sampled { g: usize, values: Vec<C64> },
    Bump(Bump),
}

impl Symbol {
    pub fn eval(&self, x: [f64; 2]) -> C64 {
        match self {
            Symbol::Fourier(f) => f.eval(x),
            Symbol::Bump(b) => C64::new(b.eval(x), 0.0),
            Symbol::Sampled { g, values } => {
                let gf = *g as f64;
                let u = x[0].rem_euclid(1.0) * gf - 0.5;
                let v = x[1].rem_euclid(1.0) * gf - 0.5;
                let (i0, j0) = (u.floor(), v.floor());
                let (fu, fv) = (u - i0, v - j0);
                let idx = |i: f64, j: f64| {
                    let a = (i as i64).rem_euclid(*g as i64) as usize;
                    let b = (j as i64).rem_euclid(*g as i64) as usize;
                    values[a * g + b]
                };
                idx(i0, j0) * (1.0 - fu) * (1.0 - fv)
                    + idx(i0 + 1.0, j0) * fu * (1.0 - fv)
                    + idx(i0, j0 + 1.0) * (1.0 - fu) * fv
                    + idx(i0 + 1.0, j0 + 1.0) * fu * fv
            }
        }
    }
}

/// `b⁻ ≤ χ_{B₂(x₀,r)} ≤ b⁺`.
pub fn bump_symbols(x0: [f64; 2], r: f64) -> Result<(Bump, Bump)> {
    if !(r > 0.0 && r < 0.25) {
        return Err(CatError::RadiusOutOfRange { r, lo: 0.0, hi: 0.25 });
    }
    Ok((
        Bump {
            center: x0,
            inner: 2.0 * r / 3.0,
            outer: r,
        },
        Bump {
            center: x0,
            inner: r,
            outer: 1.5 * r,
        },
    ))
}

pub fn bump(x0: [f64; 2], r: f64, kind: BumpKind) -> Result<Bump> {
    let (m, p) = bump_symbols(x0, r)?;
    Ok(match kind {
        BumpKind::Minus => m,
        BumpKind::Plus => p,
    })
}

/// `â^w = Σ ã(n) T̂_N(n)`, applied matrix-free.
#[derive(Clone, Debug)]
pub struct WeylOperator {
    pub symbol: FourierSymbol,
    pub grid: PlanckGrid,
}

pub fn weyl_quantize(symbol: &FourierSymbol, grid: PlanckGrid) -> WeylOperator {
    WeylOperator {
        symbol: symbol.clone(),
        grid,
    }
}

impl LinearMap for WeylOperator {
    fn dim(&self) -> usize {
        self.grid.n
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::default(); self.grid.n];
        for (n, c) in &self.symbol.terms {
            linalg::axpy(&mut out, *c, &translation(*n, self.grid).apply(x));
        }
        out
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::default(); self.grid.n];
        for (n, c) in &self.symbol.terms {
            linalg::axpy(&mut out, c.conj(), &translation(*n, self.grid).apply_adjoint(x));
        }
        out
    }

    fn cost(&self) -> usize {
        self.grid.n * self.symbol.terms.len()
    }
}

/// Anti-Wick expectation read off an existing Husimi grid.
pub fn antiwick_from_husimi<F: Fn([f64; 2]) -> C64>(h: &HusimiGrid, a: F) -> C64 {
    h.integrate_complex(a)
}

/// `⟨ψ|â^aw|ψ⟩ = ∫ a 𝓗_ψ`, by midpoint quadrature on a `G × G` grid.
pub fn antiwick_expectation(psi: &QuantumState, symbol: &Symbol, map: &CatMap, g: usize) -> Result<C64> {
    check_resolution(map, psi.grid.n, g)?;
    let h = husimi(psi, map, g)?;
    Ok(antiwick_from_husimi(&h, |x| symbol.eval(x)))
}

/// Damping `d_n` in `(e_n)^aw = d_n T̂_N(n)`, up to exponentially small terms.
pub fn antiwick_mode_factor(map: &CatMap, n: [i64; 2], grid: PlanckGrid) -> f64 {
    let w = mat_apply(&mat_inv_sl2(&map.hyp.frame()), [n[0] as f64, n[1] as f64]);
    (-PI * (w[0] * w[0] + w[1] * w[1]) / (2.0 * grid.n as f64)).exp()
}

/// Quadrature resolution used for dense anti-Wick assembly.
pub fn dense_resolution(map: &CatMap, n: usize, max_freq: i64) -> usize {
    let s = {
        let f = map.hyp.frame();
        let fro2: f64 = f.iter().flatten().map(|x| x * x).sum();
        ((fro2 + (fro2 * fro2 - 4.0).max(0.0).sqrt()) / 2.0).sqrt()
    };
    let g = ((40.0 * n as f64).sqrt() * s).max(8.0 * max_freq as f64).max(64.0);
    (g.ceil() as usize).next_power_of_two()
}

pub const DENSE_LIMIT: usize = 2048;

/// Dense `â^aw = N ∫ a(x) |x,c̃₀,θ⟩⟨x,c̃₀,θ| dx` by midpoint quadrature.
///
/// For each position row `q_a` the coherent states differ only by momentum
/// phases, so the row contributes `w_k conj(w_k') A_a(k - k')` with
/// `A_a(d) = Σ_b a(q_a, p_b) e^{2πi p_b d}` obtained from one FFT.
pub fn antiwick_dense<F>(a: F, map: &CatMap, grid: PlanckGrid, g: usize) -> Result<DMatrix<C64>>
where
    F: Fn([f64; 2]) -> C64 + Sync,
{
    let n = grid.n;
    if n > DENSE_LIMIT {
        return Err(CatError::DimensionTooLarge { n, limit: DENSE_LIMIT });
    }
    let nf = n as f64;
    let gf = g as f64;
    let beta = grid.beta();
    let hbar = grid.hbar();
    let g0 = map_gaussian(map, [0.0, 0.0], hbar);
    let rad = g0.support_radius();
    let ifft = FftPlanner::new().plan_fft_inverse(g);
    let scale = nf / (gf * gf);

    // fixed partition so the summation order does not depend on the pool size
    let workers = 8;
    let partial: Vec<DMatrix<C64>> = (0..workers)
        .into_par_iter()
        .map(|t| {
            let mut acc = DMatrix::<C64>::zeros(n, n);
            for ia in (t..g).step_by(workers) {
                let qa = (ia as f64 + 0.5) / gf;
                let mut row: Vec<C64> = (0..g).map(|b| a([qa, (b as f64 + 0.5) / gf])).collect();
                ifft.process(&mut row);
                let lo = (nf * (qa - rad) - beta).floor() as i64;
                let hi = (nf * (qa + rad) - beta).ceil() as i64;
                let w: Vec<(usize, C64)> = (lo..=hi)
                    .map(|ke| {
                        let m = ke.div_euclid(n as i64);
                        let dq = (ke as f64 + beta) / nf - qa;
                        let tw = C64::from_polar(1.0, grid.theta[0] * m as f64);
                        let v = g0.pref * (C64::new(0.0, 1.0) * g0.z * dq * dq / (2.0 * hbar)).exp();
                        (ke.rem_euclid(n as i64) as usize, tw * v / nf.sqrt())
                    })
                    .collect();
                let s = w.len() as i64;
                // A_a(d) for d = k_e - k_e' in (-s, s)
                let ad: Vec<C64> = (-s + 1..s)
                    .map(|d| row[d.rem_euclid(g as i64) as usize] * C64::from_polar(1.0, PI * d as f64 / gf))
                    .collect();
                for (i, (k, wk)) in w.iter().enumerate() {
                    for (j, (kp, wkp)) in w.iter().enumerate() {
                        acc[(*k, *kp)] += wk * wkp.conj() * ad[(i as i64 - j as i64 + s - 1) as usize];
                    }
                }
            }
            acc
        })
        .collect();
    let mut out = DMatrix::<C64>::zeros(n, n);
    for p in partial {
        out += p;
    }
    Ok(out * C64::new(scale, 0.0))
}

/// `‖â^w - â^aw‖` with the anti-Wick operator assembled by quadrature.
pub fn weyl_antiwick_gap(symbol: &FourierSymbol, map: &CatMap, grid: PlanckGrid) -> Result<f64> {
    let n = grid.n;
    if n > DENSE_LIMIT {
        return Err(CatError::DimensionTooLarge { n, limit: DENSE_LIMIT });
    }
    let g = dense_resolution(map, n, symbol.max_frequency());
    let aw = antiwick_dense(|x| symbol.eval(x), map, grid, g)?;
    let w = weyl_quantize(symbol, grid).to_dense();
    let diff = w - aw;
    Ok(dense_norm_estimate(&diff))
}

/// Spectral norm by Lanczos on `X†X` with dense products.
pub fn dense_norm_estimate(x: &DMatrix<C64>) -> f64 {
    let xa = x.adjoint();
    let n = x.nrows();
    linalg::op_norm_lanczos(
        |v| (x * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec(),
        |v| (&xa * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec(),
        n,
        40,
        0xa11ce,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MassPath {
    Direct,
    Husimi,
}

/// Mass of `ψ` on the arc `B₁(q₀, r)` of the position circle.
///
/// `Direct` sums `|a_j|²` over sites in the arc. `Husimi` integrates the
/// Husimi density over the strip `B₁(q₀,r) × T¹`; the momentum integral is
/// exact and leaves a Gaussian smoothing of each site of variance `ħ/(2 Im Z)`.
pub fn position_interval_mass(psi: &QuantumState, map: &CatMap, q0: f64, r: f64, via: MassPath) -> Result<f64> {
    if !(r > 0.0 && r < 0.5) {
        return Err(CatError::RadiusOutOfRange { r, lo: 0.0, hi: 0.5 });
    }
    let grid = psi.grid;
    match via {
        MassPath::Direct => Ok((0..grid.n)
            .filter(|&j| {
                let d = (grid.site(j) - q0).rem_euclid(1.0);
                d.min(1.0 - d) <= r
            })
            .map(|j| psi.amps[j].norm_sqr())
            .sum()),
        MassPath::Husimi => {
            let z = map_gaussian(map, [0.0, 0.0], grid.hbar()).z;
            let sigma = (grid.hbar() / (2.0 * z.im)).sqrt();
            let reach = (12.0 * sigma).ceil() as i64 + 1;
            let mut total = 0.0;
            for j in 0..grid.n {
                let w = psi.amps[j].norm_sqr();
                if w == 0.0 {
                    continue;
                }
                let q = grid.site(j);
                // nearest image of the arc center, plus neighbours covering the Gaussian
                let shift = (q - q0).round() as i64;
                let mut m = 0.0;
                for k in (shift - reach)..=(shift + reach) {
                    let lo = (q0 - r + k as f64 - q) / (sigma * SQRT_2);
                    let hi = (q0 + r + k as f64 - q) / (sigma * SQRT_2);
                    m += 0.5 * (libm::erfc(lo) - libm::erfc(hi));
                }
                total += w * m;
            }
            Ok(total)
        }
    }
}
