//! The N-dimensional quantum torus `H_{N,θ}`: position basis, translations and
//! the cat-map propagator.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::classical::CatMap;
use crate::error::{CatError, Result};
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanckGrid {
    pub n: usize,
    pub theta: [f64; 2],
}

impl PlanckGrid {
    pub fn new(n: usize, theta: [f64; 2]) -> Self {
        assert!(n >= 1, "N must be positive");
        let wrap = |t: f64| {
            let r = t.rem_euclid(TAU);
            if (TAU - r) < 1e-14 {
                0.0
            } else {
                r
            }
        };
        PlanckGrid {
            n,
            theta: [wrap(theta[0]), wrap(theta[1])],
        }
    }

    /// Grid with the Bloch angle returned by [`choose_theta`].
    pub fn for_map(map: &CatMap, n: usize) -> Result<Self> {
        Ok(PlanckGrid::new(n, choose_theta(map, n)?))
    }

    pub fn hbar(&self) -> f64 {
        1.0 / (TAU * self.n as f64)
    }

    /// Offset `β = θ₂/(2π)` of the position sites.
    pub fn beta(&self) -> f64 {
        self.theta[1] / TAU
    }

    /// Position site `q_j = (j + β)/N`.
    pub fn site(&self, j: usize) -> f64 {
        (j as f64 + self.beta()) / self.n as f64
    }

    /// `2β` when it is an integer, which lets kernel phases be reduced exactly.
    fn twice_beta(&self) -> Option<i64> {
        let tb = 2.0 * self.beta();
        let r = tb.round();
        ((tb - r).abs() < 1e-12).then_some(r as i64)
    }
}

/// Amplitudes in the position basis of `H_{N,θ}` with the Euclidean inner product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumState {
    pub grid: PlanckGrid,
    pub amps: Vec<C64>,
}

impl QuantumState {
    pub fn new(grid: PlanckGrid, amps: Vec<C64>) -> Self {
        assert_eq!(amps.len(), grid.n, "amplitude length must equal N");
        QuantumState { grid, amps }
    }

    pub fn basis(grid: PlanckGrid, j: usize) -> Self {
        let mut amps = vec![C64::default(); grid.n];
        amps[j] = C64::new(1.0, 0.0);
        QuantumState { grid, amps }
    }

    pub fn random(grid: PlanckGrid, seed: u64) -> Self {
        let amps = linalg::random_unit_vector(grid.n, &mut linalg::rng(seed));
        QuantumState { grid, amps }
    }

    pub fn norm_sq(&self) -> f64 {
        linalg::norm_sq(&self.amps)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let nrm = self.norm();
        QuantumState {
            grid: self.grid,
            amps: self.amps.iter().map(|z| z / nrm).collect(),
        }
    }

    pub fn inner(&self, other: &QuantumState) -> C64 {
        linalg::dot(&self.amps, &other.amps)
    }

    pub fn apply<L: LinearMap + ?Sized>(&self, op: &L) -> Self {
        QuantumState {
            grid: self.grid,
            amps: op.apply(&self.amps),
        }
    }
}

/// A linear operator on `C^N`, dense or matrix-free.
pub trait LinearMap: Send + Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[C64]) -> Vec<C64>;

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64>;

    /// Rough flop count of one application.
    fn cost(&self) -> usize {
        self.dim() * self.dim()
    }

    fn to_dense(&self) -> DMatrix<C64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![C64::default(); n];
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            let col = self.apply(&e);
            m.set_column(j, &DVector::from_vec(col));
            e[j] = C64::default();
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct DenseMap(pub DMatrix<C64>);

impl LinearMap for DenseMap {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        (&self.0 * DVector::from_column_slice(x)).as_slice().to_vec()
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        (self.0.adjoint() * DVector::from_column_slice(x))
            .as_slice()
            .to_vec()
    }

    fn to_dense(&self) -> DMatrix<C64> {
        self.0.clone()
    }
}

/// `exp(iπ num/den)` with `num` reduced modulo `2 den` first.
fn exact_phase(num: i128, den: i128) -> C64 {
    let r = num.rem_euclid(2 * den);
    C64::from_polar(1.0, PI * r as f64 / den as f64)
}

/// The torus translation `T̂_N(n)`.
#[derive(Clone, Debug)]
pub struct Translation {
    pub n: [i64; 2],
    pub grid: PlanckGrid,
}

pub fn translation(n: [i64; 2], grid: PlanckGrid) -> Translation {
    Translation { n, grid }
}

impl Translation {
    /// Phase multiplying the shifted amplitude at output site `k`.
    fn site_phase(&self, k: usize) -> C64 {
        let nn = self.grid.n as i128;
        let (n1, n2) = (self.n[0] as i128, self.n[1] as i128);
        // e^{-iπ n1 n2 / N} e^{2πi n2 k / N}, reduced exactly
        let mut ph = exact_phase(2 * n2 * k as i128 - n1 * n2, nn);
        let beta = self.grid.beta();
        if beta != 0.0 {
            let t = (n2 as f64 * beta / self.grid.n as f64).rem_euclid(1.0);
            ph *= C64::from_polar(1.0, TAU * t);
        }
        let src = k as i64 - self.n[0];
        let wraps = src.div_euclid(self.grid.n as i64);
        if wraps != 0 && self.grid.theta[0] != 0.0 {
            ph *= C64::from_polar(1.0, -self.grid.theta[0] * wraps as f64);
        }
        ph
    }
}

impl LinearMap for Translation {
    fn dim(&self) -> usize {
        self.grid.n
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n = self.grid.n as i64;
        (0..self.grid.n)
            .map(|k| {
                let src = (k as i64 - self.n[0]).rem_euclid(n) as usize;
                self.site_phase(k) * x[src]
            })
            .collect()
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        let n = self.grid.n as i64;
        let mut out = vec![C64::default(); self.grid.n];
        for k in 0..self.grid.n {
            let src = (k as i64 - self.n[0]).rem_euclid(n) as usize;
            out[src] = self.site_phase(k).conj() * x[k];
        }
        out
    }

    fn cost(&self) -> usize {
        self.grid.n
    }
}

/// Bloch angle compatible with the map at dimension `n`.
///
/// Tries the parity rule first, then the rest of `{0, π}²`.
pub fn choose_theta(map: &CatMap, n: usize) -> Result<[f64; 2]> {
    let parity = if n % 2 == 0 { [0.0, 0.0] } else { [PI, PI] };
    let mut candidates = vec![parity];
    for t1 in [0.0, PI] {
        for t2 in [0.0, PI] {
            if [t1, t2] != parity {
                candidates.push([t1, t2]);
            }
        }
    }
    candidates
        .into_iter()
        .find(|th| theta_residual(map, n, *th) < 1e-12)
        .ok_or(CatError::NoInvariantTheta { n })
}

/// Distance on the 2-torus of angles between `θ` and `(M⁻¹)ᵀθ + Nπ(CD, AB)`.
pub fn theta_residual(map: &CatMap, n: usize, theta: [f64; 2]) -> f64 {
    let (a, b, c, d) = (map.a as f64, map.b as f64, map.c as f64, map.d as f64);
    // the shift Nπ(CD, AB) only matters mod 2π, so reduce the integer first
    let shift = |k: i64| PI * (n as i128 * k as i128).rem_euclid(2) as f64;
    let img = [
        d * theta[0] - c * theta[1] + shift(map.c * map.d),
        -b * theta[0] + a * theta[1] + shift(map.a * map.b),
    ];
    let wrap = |x: f64| {
        let r = x.rem_euclid(TAU);
        r.min(TAU - r)
    };
    wrap(theta[0] - img[0]).hypot(wrap(theta[1] - img[1]))
}

/// The quantum cat map `M̂` on `H_{N,θ}`, applied as chirp · DFT · chirp.
///
/// The kernel is the discrete Gauss sum
/// `M̂_{k'j} = (iBN)^{-1/2} Σ_{r<|B|} e^{-iθ₁r} exp(iπN/B (D q_{k'}² - 2(q_j+r)q_{k'} + A(q_j+r)²))`,
/// evaluated through a DFT of length `N|B|` over the extended index `J = j + rN`.
pub struct Propagator {
    pub map: CatMap,
    pub grid: PlanckGrid,
    len: usize,
    forward: bool,
    in_phase: Vec<C64>,
    out_phase: Vec<C64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Propagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Propagator")
            .field("map", &self.map.entries())
            .field("grid", &self.grid)
            .finish()
    }
}

pub fn propagator(map: &CatMap, grid: PlanckGrid) -> Result<Propagator> {
    Propagator::new(map, grid)
}

impl Propagator {
    pub fn new(map: &CatMap, grid: PlanckGrid) -> Result<Self> {
        if theta_residual(map, grid.n, grid.theta) > 1e-12 {
            return Err(CatError::Precondition(format!(
                "Bloch angle {:?} is not compatible with the map at N = {}",
                grid.theta, grid.n
            )));
        }
        // AD - BC = 1 with B = 0 forces trace ±2, so hyperbolic maps never get here.
        if map.b == 0 {
            return Err(CatError::UnsupportedMatrix {
                reason: "upper-right entry B is zero".into(),
            });
        }
        let n = grid.n;
        let bb = map.b.unsigned_abs() as usize;
        let sgn = map.b.signum() as f64;
        let len = n * bb;
        let lf = len as f64;
        let beta = grid.beta();
        let tb = grid.twice_beta();
        let nb = n as i128 * map.b as i128;

        // exp(iπ coef (x+β)² / (N B)) for integer x
        let chirp = |coef: i64, x: usize| -> C64 {
            match tb {
                Some(tb) => {
                    let y = 2 * x as i128 + tb as i128;
                    exact_phase(coef as i128 * y * y, 4 * nb)
                }
                None => {
                    let y = x as f64 + beta;
                    let t = (coef as f64 * y * y / (2.0 * nb as f64)).rem_euclid(1.0);
                    C64::from_polar(1.0, TAU * t)
                }
            }
        };

        let in_phase: Vec<C64> = (0..len)
            .map(|jj| {
                let r = (jj / n) as f64;
                let cross = (-sgn * beta * jj as f64 / lf).rem_euclid(1.0);
                chirp(map.a, jj)
                    * C64::from_polar(1.0, -grid.theta[0] * r)
                    * C64::from_polar(1.0, TAU * cross)
            })
            .collect();
        let norm = C64::from_polar(1.0, -sgn * PI / 4.0) / (lf).sqrt();
        let out_phase: Vec<C64> = (0..n)
            .map(|k| {
                let cross = (-sgn * (beta * k as f64 + beta * beta) / lf).rem_euclid(1.0);
                norm * chirp(map.d, k) * C64::from_polar(1.0, TAU * cross)
            })
            .collect();

        let mut planner = FftPlanner::new();
        Ok(Propagator {
            map: map.clone(),
            grid,
            len,
            forward: map.b > 0,
            in_phase,
            out_phase,
            fwd: planner.plan_fft_forward(len),
            inv: planner.plan_fft_inverse(len),
        })
    }

    /// Kernel matrix evaluated entry by entry from the Gauss-sum formula.
    pub fn dense_kernel(&self) -> DMatrix<C64> {
        let n = self.grid.n;
        let nf = n as f64;
        let (a, b, d) = (self.map.a as f64, self.map.b as f64, self.map.d as f64);
        let norm = C64::from_polar(1.0, -b.signum() * PI / 4.0) / (b.abs() * nf).sqrt();
        DMatrix::from_fn(n, n, |kp, j| {
            let qk = self.grid.site(kp);
            let mut s = C64::default();
            for r in 0..self.map.b.unsigned_abs() {
                let qj = self.grid.site(j) + r as f64;
                let arg = PI * nf / b * (d * qk * qk - 2.0 * qj * qk + a * qj * qj);
                s += C64::from_polar(1.0, arg - self.grid.theta[0] * r as f64);
            }
            norm * s
        })
    }

    /// `M̂^t ψ`; negative `t` applies the adjoint.
    pub fn power(&self, x: &[C64], t: i64) -> Vec<C64> {
        let mut v = x.to_vec();
        for _ in 0..t.unsigned_abs() {
            v = if t > 0 {
                self.apply(&v)
            } else {
                self.apply_adjoint(&v)
            };
        }
        v
    }
}

impl LinearMap for Propagator {
    fn dim(&self) -> usize {
        self.grid.n
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n = self.grid.n;
        let mut buf: Vec<C64> = (0..self.len)
            .map(|jj| x[jj % n] * self.in_phase[jj])
            .collect();
        if self.forward {
            self.fwd.process(&mut buf);
        } else {
            self.inv.process(&mut buf);
        }
        (0..n).map(|k| buf[k] * self.out_phase[k]).collect()
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        let n = self.grid.n;
        let mut buf = vec![C64::default(); self.len];
        for k in 0..n {
            buf[k] = x[k] * self.out_phase[k].conj();
        }
        if self.forward {
            self.inv.process(&mut buf);
        } else {
            self.fwd.process(&mut buf);
        }
        let mut out = vec![C64::default(); n];
        for (jj, z) in buf.iter().enumerate() {
            out[jj % n] += z * self.in_phase[jj].conj();
        }
        out
    }

    fn cost(&self) -> usize {
        let l = self.len.max(2);
        5 * l * (usize::BITS - l.leading_zeros()) as usize
    }
}

/// Operator-norm estimate of `M̂ T̂_N(n) M̂⁻¹ - T̂_N(Mn)`.
pub fn egorov_defect(prop: &Propagator, n: [i64; 2]) -> f64 {
    let grid = prop.grid;
    let tn = translation(n, grid);
    let tmn = translation(prop.map.apply_int(n), grid);
    let apply = |x: &[C64]| {
        let lhs = prop.apply(&tn.apply(&prop.apply_adjoint(x)));
        linalg::sub(&lhs, &tmn.apply(x))
    };
    let apply_adj = |x: &[C64]| {
        let lhs = prop.apply(&tn.apply_adjoint(&prop.apply_adjoint(x)));
        linalg::sub(&lhs, &tmn.apply_adjoint(x))
    };
    linalg::op_norm_lanczos(apply, apply_adj, grid.n, 12, 0x5eed ^ grid.n as u64)
}

/// `‖M̂†M̂ - 1‖`, estimated by Lanczos.
pub fn unitarity_defect(prop: &Propagator) -> f64 {
    let a = |x: &[C64]| linalg::sub(&prop.apply_adjoint(&prop.apply(x)), x);
    linalg::op_norm_lanczos(a, a, prop.grid.n, 12, 0x0417 ^ prop.grid.n as u64)
}

/// Largest `‖(M̂T̂(n)M̂⁻¹ - T̂(Mn))ψ‖` over the given states.
pub fn egorov_defect_on_states(prop: &Propagator, n: [i64; 2], states: &[Vec<C64>]) -> f64 {
    let tn = translation(n, prop.grid);
    let tmn = translation(prop.map.apply_int(n), prop.grid);
    states
        .iter()
        .map(|psi| {
            let lhs = prop.apply(&tn.apply(&prop.apply_adjoint(psi)));
            linalg::norm(&linalg::sub(&lhs, &tmn.apply(psi)))
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{validate_cat_map, wedge_int};
    use proptest::prelude::*;

    fn grid_for(map: &CatMap, n: usize) -> PlanckGrid {
        PlanckGrid::for_map(map, n).unwrap()
    }

    fn max_entry(a: &DMatrix<C64>) -> f64 {
        a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn hbar_identity() {
        for n in [1, 7, 4096] {
            let g = PlanckGrid::new(n, [0.0, 0.0]);
            assert!((g.hbar() * TAU * n as f64 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn theta_shift_is_exact_for_large_products() {
        let m = validate_cat_map(3, 2, 4, 3).unwrap();
        for n in [164usize, 4096, 1 << 20] {
            assert_eq!(theta_residual(&m, n, [0.0, 0.0]), 0.0);
            assert_eq!(choose_theta(&m, n).unwrap(), [0.0, 0.0]);
        }
    }

    #[test]
    fn parity_rule_for_arnold() {
        let m = CatMap::arnold();
        assert_eq!(choose_theta(&m, 4).unwrap(), [0.0, 0.0]);
        assert_eq!(choose_theta(&m, 5).unwrap(), [PI, PI]);
        assert_eq!(theta_residual(&m, 4, [0.0, 0.0]), 0.0);
        assert!(theta_residual(&m, 5, [PI, PI]) < 1e-12);
        // CD = 1 is odd, so θ = 0 fails at odd N
        assert!(theta_residual(&m, 5, [0.0, 0.0]) > 1.0);
    }

    #[test]
    fn theta_for_odd_products() {
        // CD = 3 and AB = 2: at odd N, θ = 0 fails and the parity rule is needed
        let m = validate_cat_map(1, 2, 1, 3).unwrap();
        assert!(theta_residual(&m, 7, [0.0, 0.0]) > 1.0);
        let th = choose_theta(&m, 7).unwrap();
        assert!(theta_residual(&m, 7, th) < 1e-12);
    }

    #[test]
    fn identity_translation() {
        let g = PlanckGrid::new(9, [PI, PI]);
        let psi = QuantumState::random(g, 1);
        assert_eq!(translation([0, 0], g).apply(&psi.amps), psi.amps);
    }

    #[test]
    fn composition_sign() {
        // T(1,0) T(0,1) = e^{iπ(u∧v)N²/N} T(1,1) with u∧v = -1/N² under u∧v = u2v1 - u1v2
        for (n, th) in [(8usize, [0.0, 0.0]), (9, [PI, PI]), (10, [0.3, 1.1])] {
            let g = PlanckGrid::new(n, th);
            let lhs = translation([1, 0], g).to_dense() * translation([0, 1], g).to_dense();
            let rhs = translation([1, 1], g).to_dense()
                * C64::from_polar(1.0, PI * wedge_int([1, 0], [0, 1]) as f64 / n as f64);
            assert!(max_entry(&(lhs - rhs)) < 1e-13);
        }
    }

    #[test]
    fn translation_adjoint_is_reverse() {
        let g = PlanckGrid::new(11, [PI, 0.4]);
        for n in [[1, 0], [3, -2], [-7, 13], [25, 4]] {
            let t = translation(n, g).to_dense();
            let tm = translation([-n[0], -n[1]], g).to_dense();
            assert!(max_entry(&(t.adjoint() - tm)) < 1e-13);
            let adj = DenseMap(translation(n, g).to_dense().adjoint());
            let psi = QuantumState::random(g, 2);
            let a = translation(n, g).apply_adjoint(&psi.amps);
            let b = adj.apply(&psi.amps);
            assert!(linalg::norm(&linalg::sub(&a, &b)) < 1e-13);
        }
    }

    #[test]
    fn lattice_translation_is_bloch_phase() {
        // T̂_N(N e_1) and T̂_N(N e_2) act as scalars e^{iθ·} up to the δ_n phase
        let g = PlanckGrid::new(6, [0.7, 1.9]);
        for n in [[6, 0], [0, 6], [6, 6]] {
            let t = translation(n, g).to_dense();
            let c = t[(0, 0)];
            assert!((c.norm() - 1.0).abs() < 1e-13);
            let diff = t - DMatrix::identity(6, 6) * c;
            assert!(max_entry(&diff) < 1e-12);
        }
    }

    #[test]
    fn fast_matches_dense_kernel() {
        for (m, n) in [
            (CatMap::arnold(), 64usize),
            (CatMap::arnold(), 63),
            (validate_cat_map(1, 2, 1, 3).unwrap(), 30),
            (validate_cat_map(1, 2, 1, 3).unwrap(), 31),
            (validate_cat_map(3, -2, -1, 1).unwrap(), 24),
            (validate_cat_map(2, 3, 1, 2).unwrap(), 17),
        ] {
            let p = propagator(&m, grid_for(&m, n)).unwrap();
            let fast = p.to_dense();
            let dense = p.dense_kernel();
            assert!(max_entry(&(&fast - &dense)) < 1e-10, "{:?} N={n}", m.entries());
            let u = &fast * fast.adjoint() - DMatrix::identity(n, n);
            assert!(max_entry(&u) < 1e-12);
            let adj_fast = DenseMap(fast.adjoint());
            let psi = QuantumState::random(p.grid, 9);
            let a = p.apply_adjoint(&psi.amps);
            let b = adj_fast.apply(&psi.amps);
            assert!(linalg::norm(&linalg::sub(&a, &b)) < 1e-12);
        }
    }

    #[test]
    fn egorov_exact_on_dense_matrices() {
        for (m, n) in [
            (CatMap::arnold(), 40usize),
            (CatMap::arnold(), 41),
            (validate_cat_map(1, 2, 1, 3).unwrap(), 33),
            (validate_cat_map(3, -2, -1, 1).unwrap(), 36),
        ] {
            let p = propagator(&m, grid_for(&m, n)).unwrap();
            let u = p.dense_kernel();
            for nv in [[1, 0], [0, 1], [2, -3], [-1, 5]] {
                let t = translation(nv, p.grid).to_dense();
                let tm = translation(m.apply_int(nv), p.grid).to_dense();
                let x = &u * t * u.adjoint() - tm;
                assert!(max_entry(&x) < 1e-11, "{:?} N={n} n={nv:?}", m.entries());
            }
        }
    }

    #[test]
    fn egorov_defect_small() {
        let m = CatMap::arnold();
        let p = propagator(&m, grid_for(&m, 1024)).unwrap();
        assert!(egorov_defect(&p, [0, 0]) < 1e-12);
        let d = egorov_defect(&p, [1, 0]);
        // Frobenius norm bounds the operator norm from above
        let x = {
            let t = translation([1, 0], p.grid);
            let tm = translation(m.apply_int([1, 0]), p.grid);
            let u = p.to_dense();
            &u * t.to_dense() * u.adjoint() - tm.to_dense()
        };
        let fro = linalg::frobenius(&x);
        assert!(d <= fro * (1.0 + 1e-6) + 1e-15);
        assert!(fro < 1e-8, "frobenius {fro}");
    }

    #[test]
    fn egorov_defect_trace_four() {
        let m = validate_cat_map(3, 2, 1, 1).unwrap();
        assert_eq!(m.trace(), 4);
        let p = propagator(&m, grid_for(&m, 512)).unwrap();
        assert!(egorov_defect(&p, [2, -1]) < 1e-8);
    }

    #[test]
    fn propagator_rejects_incompatible_theta() {
        let m = validate_cat_map(1, 2, 1, 3).unwrap();
        let g = PlanckGrid::new(7, [0.0, 0.0]);
        assert!(propagator(&m, g).is_err());
    }

    #[test]
    fn unitarity_defect_matches_dense() {
        let m = CatMap::arnold();
        let p = propagator(&m, grid_for(&m, 64)).unwrap();
        let u = p.dense_kernel();
        let x = u.adjoint() * &u - DMatrix::<C64>::identity(64, 64);
        let d = unitarity_defect(&p);
        assert!(d <= linalg::frobenius(&x) * (1.0 + 1e-6) + 1e-15);
        assert!(d < 1e-12);
    }

    #[test]
    fn unitary_at_large_n() {
        let m = CatMap::arnold();
        let p = propagator(&m, grid_for(&m, 4096)).unwrap();
        for seed in 0..20 {
            let psi = QuantumState::random(p.grid, seed);
            assert!((psi.apply(&p).norm() - 1.0).abs() < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn composition_law(n in prop::array::uniform2(-40i64..40), m in prop::array::uniform2(-40i64..40), odd in any::<bool>()) {
            let (dim, th) = if odd { (513usize, [PI, PI]) } else { (512, [0.0, 0.0]) };
            let g = PlanckGrid::new(dim, th);
            let psi = QuantumState::random(g, 11);
            let lhs = translation(n, g).apply(&translation(m, g).apply(&psi.amps));
            let sum = translation([n[0] + m[0], n[1] + m[1]], g).apply(&psi.amps);
            let ph = C64::from_polar(1.0, PI * wedge_int(n, m) as f64 / dim as f64);
            let rhs: Vec<C64> = sum.iter().map(|z| z * ph).collect();
            prop_assert!(linalg::norm(&linalg::sub(&lhs, &rhs)) < 1e-12);
        }

        #[test]
        fn egorov_on_random_states(n in prop::array::uniform2(-3i64..=3), seed in 0u64..1000) {
            let m = CatMap::arnold();
            let p = propagator(&m, grid_for(&m, 257)).unwrap();
            let psi = linalg::random_unit_vector(257, &mut linalg::rng(seed));
            prop_assert!(egorov_defect_on_states(&p, n, &[psi]) < 1e-10);
        }
    }
}
