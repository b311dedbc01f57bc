//! Classical cat maps: validation, hyperbolic frame, periodic orbits on
//! rational lattices and delta measures.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{CatError, Result};

pub type Mat2 = [[f64; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Inverse of a 2x2 matrix with unit determinant.
pub fn mat_inv_sl2(a: &Mat2) -> Mat2 {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

pub fn mat_apply(a: &Mat2, x: [f64; 2]) -> [f64; 2] {
    [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
}

pub fn rotation(mu: f64) -> Mat2 {
    let (s, c) = mu.sin_cos();
    [[c, -s], [s, c]]
}

pub fn boost(mu: f64) -> Mat2 {
    [[mu.cosh(), mu.sinh()], [mu.sinh(), mu.cosh()]]
}

pub fn dilation(mu: f64) -> Mat2 {
    [[mu.exp(), 0.0], [0.0, (-mu).exp()]]
}

/// Symplectic product `u ∧ v = u2 v1 - u1 v2`.
pub fn wedge(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[1] * v[0] - u[0] * v[1]
}

pub fn wedge_int(u: [i64; 2], v: [i64; 2]) -> i64 {
    u[1] * v[0] - u[0] * v[1]
}

/// Fourier mode `e_n(x) = exp(2πi n∧x)` on the torus.
pub fn fourier_mode(n: [i64; 2], x: [f64; 2]) -> C64 {
    // n∧x reduced mod 1 before exponentiating keeps the phase accurate for large n.
    let t = n[1] as f64 * x[0] - n[0] as f64 * x[1];
    C64::from_polar(1.0, 2.0 * PI * (t - t.round()))
}

/// Geodesic distance on the flat unit torus.
pub fn torus_dist(x: [f64; 2], y: [f64; 2]) -> f64 {
    let d = |a: f64, b: f64| {
        let t = (a - b).rem_euclid(1.0);
        t.min(1.0 - t)
    };
    d(x[0], y[0]).hypot(d(x[1], y[1]))
}

/// Hyperbolic data of a matrix in SL(2, R) with trace > 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperbolic {
    pub lambda: f64,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub b1: f64,
    pub b2: f64,
    pub c0: [f64; 2],
}

impl Hyperbolic {
    pub fn squeeze(&self) -> C64 {
        C64::new(self.c0[0], self.c0[1])
    }

    /// The frame change `Q = R(b1) B(b2)`.
    pub fn frame(&self) -> Mat2 {
        mat_mul(&rotation(self.b1), &boost(self.b2))
    }

    /// `Q D(λ t) Q^{-1}`; at `t = 1` this reproduces the matrix.
    pub fn reconstruct(&self, t: f64) -> Mat2 {
        let q = self.frame();
        mat_mul(&mat_mul(&q, &dilation(self.lambda * t)), &mat_inv_sl2(&q))
    }
}

/// Eigen-angles and the `Q = R(b1)B(b2)` normalization of a hyperbolic matrix.
pub fn decompose_hyperbolic(m: &Mat2) -> Result<Hyperbolic> {
    let [[a, b], [c, d]] = *m;
    let tr = a + d;
    if tr <= 2.0 {
        return Err(CatError::NotHyperbolic {
            trace: tr.round() as i64,
        });
    }
    let disc = (tr * tr - 4.0).sqrt();
    let mu = (tr + disc) / 2.0;
    let lambda = mu.ln();
    let inv_mu = 1.0 / mu;

    // Pick the better-conditioned of the two row/column eigenvector formulas.
    let eigvec = |ev: f64| -> [f64; 2] {
        let r1 = [b, ev - a];
        let r2 = [ev - d, c];
        if r1[0].hypot(r1[1]) >= r2[0].hypot(r2[1]) {
            r1
        } else {
            r2
        }
    };
    let vp = eigvec(mu);
    let vm = eigvec(inv_mu);

    let half_turn = |ang: f64| -> f64 {
        // map into (-π/2, π/2]
        let mut t = ang;
        while t <= -FRAC_PI_2 {
            t += PI;
        }
        while t > FRAC_PI_2 {
            t -= PI;
        }
        t
    };
    let alpha_plus = half_turn(vp[1].atan2(vp[0]));
    let mut alpha_minus = half_turn(vm[1].atan2(vm[0]));
    if alpha_minus <= alpha_plus {
        alpha_minus += PI;
    }

    let mut b1 = (alpha_plus + alpha_minus - FRAC_PI_2) / 2.0;
    let b2 = (alpha_plus - b1).tan().atanh();
    b1 = half_turn(b1);
    let c0 = C64::from_polar(1.0, -2.0 * b1) * (-b2);
    Ok(Hyperbolic {
        lambda,
        alpha_plus,
        alpha_minus,
        b1,
        b2,
        c0: [c0.re, c0.im],
    })
}

/// An integer unimodular hyperbolic matrix with trace > 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatMap {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    /// Set when the input had trace < -2 and was replaced by its negative.
    pub negated: bool,
    pub hyp: Hyperbolic,
}

pub fn validate_cat_map(a: i64, b: i64, c: i64, d: i64) -> Result<CatMap> {
    let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
    if det != 1 {
        return Err(CatError::NotUnimodular {
            det: det.clamp(i64::MIN as i128, i64::MAX as i128) as i64,
        });
    }
    let tr = a
        .checked_add(d)
        .ok_or(CatError::Overflow { what: "trace" })?;
    if tr.abs() <= 2 {
        return Err(CatError::NotHyperbolic { trace: tr });
    }
    let (a, b, c, d, negated) = if tr < 0 {
        (-a, -b, -c, -d, true)
    } else {
        (a, b, c, d, false)
    };
    let hyp = decompose_hyperbolic(&[[a as f64, b as f64], [c as f64, d as f64]])?;
    Ok(CatMap {
        a,
        b,
        c,
        d,
        negated,
        hyp,
    })
}

impl CatMap {
    pub fn arnold() -> Self {
        validate_cat_map(2, 1, 1, 1).expect("Arnold map is hyperbolic")
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn lambda(&self) -> f64 {
        self.hyp.lambda
    }

    pub fn squeeze(&self) -> C64 {
        self.hyp.squeeze()
    }

    pub fn matrix(&self) -> Mat2 {
        [
            [self.a as f64, self.b as f64],
            [self.c as f64, self.d as f64],
        ]
    }

    pub fn apply_int(&self, n: [i64; 2]) -> [i64; 2] {
        [self.a * n[0] + self.b * n[1], self.c * n[0] + self.d * n[1]]
    }

    pub fn apply_inv_int(&self, n: [i64; 2]) -> [i64; 2] {
        [self.d * n[0] - self.b * n[1], -self.c * n[0] + self.a * n[1]]
    }

    /// `M x mod 1`.
    pub fn apply_torus(&self, x: [f64; 2]) -> [f64; 2] {
        let y = mat_apply(&self.matrix(), x);
        [y[0].rem_euclid(1.0), y[1].rem_euclid(1.0)]
    }

    /// `|log ħ| / λ` with `ħ = 1/(2πN)`.
    pub fn ehrenfest_time(&self, n: usize) -> f64 {
        (2.0 * PI * n as f64).ln() / self.lambda()
    }

    fn big_power(&self, t: u32) -> [[BigInt; 2]; 2] {
        let m = [
            [BigInt::from(self.a), BigInt::from(self.b)],
            [BigInt::from(self.c), BigInt::from(self.d)],
        ];
        let mul = |x: &[[BigInt; 2]; 2], y: &[[BigInt; 2]; 2]| -> [[BigInt; 2]; 2] {
            [
                [
                    &x[0][0] * &y[0][0] + &x[0][1] * &y[1][0],
                    &x[0][0] * &y[0][1] + &x[0][1] * &y[1][1],
                ],
                [
                    &x[1][0] * &y[0][0] + &x[1][1] * &y[1][0],
                    &x[1][0] * &y[0][1] + &x[1][1] * &y[1][1],
                ],
            ]
        };
        let mut acc = [
            [BigInt::one(), BigInt::from(0)],
            [BigInt::from(0), BigInt::one()],
        ];
        let mut base = m;
        let mut e = t;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(&acc, &base);
            }
            base = mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// `l = Tr(M^T) - 2`, the number of fixed points of `M^T` on the torus.
pub fn fixed_point_count(map: &CatMap, t: u32) -> Result<u64> {
    if t == 0 {
        return Err(CatError::Precondition("period T must be >= 1".into()));
    }
    let p = map.big_power(t);
    let l: BigInt = &p[0][0] + &p[1][1] - 2;
    l.to_u64().ok_or(CatError::Overflow {
        what: "Tr(M^T) - 2",
    })
}

/// A torus point `(j, k) / l` with `0 <= j, k < l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RationalPoint {
    pub j: u64,
    pub k: u64,
    pub l: u64,
}

impl RationalPoint {
    pub fn new(j: i64, k: i64, l: u64) -> Self {
        let li = l as i64;
        RationalPoint {
            j: j.rem_euclid(li) as u64,
            k: k.rem_euclid(li) as u64,
            l,
        }
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [self.j as f64 / self.l as f64, self.k as f64 / self.l as f64]
    }

    /// Exact image under the map, reduced mod `l`.
    pub fn image(&self, map: &CatMap) -> Self {
        let l = self.l as i128;
        let (j, k) = (self.j as i128, self.k as i128);
        let nj = (map.a as i128 * j + map.b as i128 * k).rem_euclid(l);
        let nk = (map.c as i128 * j + map.d as i128 * k).rem_euclid(l);
        RationalPoint {
            j: nj as u64,
            k: nk as u64,
            l: self.l,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub points: Vec<RationalPoint>,
    pub l: u64,
    pub prime: bool,
}

impl Orbit {
    pub fn period(&self) -> usize {
        self.points.len()
    }

    pub fn points_f64(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(|p| p.to_f64()).collect()
    }

    /// Smallest torus distance between distinct orbit points; infinite for `T = 1`.
    pub fn min_separation(&self) -> f64 {
        let pts = self.points_f64();
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.min(torus_dist(pts[i], pts[j]));
            }
        }
        best
    }

    /// Orbit through `start` under exact iteration mod `l`.
    pub fn from_start(map: &CatMap, start: RationalPoint, max_len: usize) -> Option<Orbit> {
        let mut points = vec![start];
        let mut cur = start.image(map);
        while cur != start {
            if points.len() >= max_len {
                return None;
            }
            points.push(cur);
            cur = cur.image(map);
        }
        Some(Orbit {
            points,
            l: start.l,
            prime: true,
        })
    }
}

pub const DEFAULT_ENUMERATION_GUARD: u64 = 10_000;

/// All prime orbits of exact length `t`, each starting at its lexicographically
/// smallest point, sorted by that point.
pub fn enumerate_prime_orbits(map: &CatMap, t: u32, guard: u64) -> Result<Vec<Orbit>> {
    let l = fixed_point_count(map, t)?;
    if l > guard {
        return Err(CatError::EnumerationTooLarge { l, guard });
    }
    let li = l as i64;
    let p = map.big_power(t);
    let md = |x: &BigInt| -> i64 {
        let r = x.mod_floor(&BigInt::from(li));
        r.to_i64().expect("residue fits")
    };
    // K = M^T - Id mod l
    let k11 = (md(&p[0][0]) - 1).rem_euclid(li);
    let k12 = md(&p[0][1]);
    let k21 = md(&p[1][0]);
    let k22 = (md(&p[1][1]) - 1).rem_euclid(li);

    let mut fixed = Vec::new();
    for j in 0..li {
        // k12 * k ≡ -k11 * j (mod l)
        let rhs = (-(k11 as i128) * j as i128).rem_euclid(li as i128) as i64;
        let g = k12.gcd(&li);
        if rhs % g != 0 {
            continue;
        }
        let step = li / g;
        let base = if step == 1 {
            0
        } else {
            let inv = mod_inverse(k12 / g, step).expect("coprime after dividing by gcd");
            ((rhs / g) as i128 * inv as i128).rem_euclid(step as i128) as i64
        };
        for s in 0..g {
            let k = base + s * step;
            let second = (k21 as i128 * j as i128 + k22 as i128 * k as i128).rem_euclid(li as i128);
            if second == 0 {
                fixed.push(RationalPoint::new(j, k, l));
            }
        }
    }

    let mut seen = BTreeSet::new();
    let mut orbits = Vec::new();
    for &x in &fixed {
        if seen.contains(&x) {
            continue;
        }
        let orbit = Orbit::from_start(map, x, t as usize)
            .expect("fixed points of M^T have period dividing T");
        for p in &orbit.points {
            seen.insert(*p);
        }
        if orbit.period() == t as usize {
            orbits.push(canonical_rotation(orbit));
        }
    }
    orbits.sort_by(|a, b| a.points[0].cmp(&b.points[0]));
    Ok(orbits)
}

fn canonical_rotation(mut orbit: Orbit) -> Orbit {
    let (idx, _) = orbit
        .points
        .iter()
        .enumerate()
        .min_by_key(|(_, p)| **p)
        .expect("nonempty orbit");
    orbit.points.rotate_left(idx);
    orbit
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as i64)
}

/// `(1/T) Σ_t f(x_t)`.
pub fn delta_measure_integrate<F: Fn([f64; 2]) -> C64>(orbit: &Orbit, f: F) -> C64 {
    let sum: C64 = orbit.points.iter().map(|p| f(p.to_f64())).sum();
    sum / orbit.period() as f64
}

/// `μ_γ(e_n)` computed exactly from the rational coordinates.
pub fn orbit_fourier_coefficient(orbit: &Orbit, n: [i64; 2]) -> C64 {
    let l = orbit.l as i128;
    let sum: C64 = orbit
        .points
        .iter()
        .map(|p| {
            let num = (n[1] as i128 * p.j as i128 - n[0] as i128 * p.k as i128).rem_euclid(l);
            C64::from_polar(1.0, 2.0 * PI * num as f64 / l as f64)
        })
        .sum();
    sum / orbit.period() as f64
}

/// Among prime orbits of length `<= t_max`, the one whose delta measure is
/// closest to the target Fourier coefficients in l¹ distance.
pub fn best_orbit_for_measure(
    map: &CatMap,
    target: &[([i64; 2], C64)],
    t_max: u32,
    guard: u64,
) -> Result<(Orbit, f64)> {
    let mut best: Option<(Orbit, f64)> = None;
    for t in 1..=t_max {
        for orbit in enumerate_prime_orbits(map, t, guard)? {
            let err: f64 = target
                .iter()
                .map(|(n, c)| (orbit_fourier_coefficient(&orbit, *n) - c).norm())
                .sum();
            // enumeration order already encodes the tie-break (T, then start)
            let better = match &best {
                None => true,
                Some((_, e)) => err < *e - 1e-12,
            };
            if better {
                best = Some((orbit, err));
            }
        }
    }
    best.ok_or(CatError::Precondition("no prime orbits found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_diff(a: &Mat2, b: &Mat2) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((a[i][j] - b[i][j]).abs());
            }
        }
        m
    }

    #[test]
    fn arnold_lyapunov() {
        let m = CatMap::arnold();
        assert!((m.lambda() - ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-14);
        assert!((m.lambda() - 0.9624236501192069).abs() < 1e-12);
        let e = m.lambda().exp();
        assert!((e + 1.0 / e - 3.0).abs() < 1e-12);
    }

    #[test]
    fn arnold_reconstructs() {
        let m = CatMap::arnold();
        assert!(max_diff(&m.hyp.reconstruct(1.0), &m.matrix()) < 1e-10);
        // symmetric matrix: orthogonal eigenframe, no boost
        assert!(m.hyp.b2.abs() < 1e-12);
        assert!(m.squeeze().norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            validate_cat_map(1, 1, 1, 1),
            Err(CatError::NotUnimodular { det: 0 })
        ));
        assert!(matches!(
            validate_cat_map(1, 1, 0, 1),
            Err(CatError::NotHyperbolic { trace: 2 })
        ));
        assert!(matches!(
            validate_cat_map(0, 1, -1, 0),
            Err(CatError::NotHyperbolic { .. })
        ));
    }

    #[test]
    fn negative_trace_is_negated() {
        let m = validate_cat_map(-2, -1, -1, -1).unwrap();
        assert!(m.negated);
        assert_eq!(m.entries(), [2, 1, 1, 1]);
    }

    #[test]
    fn diagonal_and_boost_frames() {
        let mu = 0.8;
        let h = decompose_hyperbolic(&dilation(mu)).unwrap();
        assert!(h.b1.abs() < 1e-12 && h.b2.abs() < 1e-12);
        assert!(h.squeeze().norm() < 1e-12);
        assert!((h.lambda - mu).abs() < 1e-12);

        let h = decompose_hyperbolic(&boost(mu)).unwrap();
        assert!((h.b1 - PI / 4.0).abs() < 1e-12);
        assert!(h.b2.abs() < 1e-12);
        assert!(max_diff(&h.reconstruct(1.0), &boost(mu)) < 1e-12);
    }

    #[test]
    fn squeeze_matches_b1_b2() {
        let m = validate_cat_map(1, 2, 1, 3).unwrap();
        let c = C64::from_polar(1.0, -2.0 * m.hyp.b1) * (-m.hyp.b2);
        assert_eq!(m.squeeze(), c);
        assert!(m.hyp.b1 > -FRAC_PI_2 && m.hyp.b1 <= FRAC_PI_2);
    }

    #[test]
    fn arnold_fixed_point_counts() {
        let m = CatMap::arnold();
        let ls: Vec<u64> = (1..=4).map(|t| fixed_point_count(&m, t).unwrap()).collect();
        assert_eq!(ls, vec![1, 5, 16, 45]);
        // Tr(M^5) = 123, Tr(M^6) = 322
        assert_eq!(fixed_point_count(&m, 5).unwrap(), 121);
        assert_eq!(fixed_point_count(&m, 6).unwrap(), 320);
    }

    #[test]
    fn huge_power_overflows_cleanly() {
        let m = CatMap::arnold();
        assert!(matches!(
            fixed_point_count(&m, 200),
            Err(CatError::Overflow { .. })
        ));
    }

    #[test]
    fn arnold_period_two_orbits() {
        let m = CatMap::arnold();
        let orbits = enumerate_prime_orbits(&m, 2, DEFAULT_ENUMERATION_GUARD).unwrap();
        assert_eq!(orbits.len(), 2);
        let sets: Vec<Vec<(u64, u64)>> = orbits
            .iter()
            .map(|o| o.points.iter().map(|p| (p.j, p.k)).collect())
            .collect();
        assert_eq!(sets, vec![vec![(1, 2), (4, 3)], vec![(2, 4), (3, 1)]]);
        for o in &orbits {
            assert_eq!(o.l, 5);
            assert!(o.min_separation() >= 1.0 / 5.0);
        }
        // M (4/5, 3/5) = (11/5, 7/5) ≡ (1/5, 2/5)
        assert_eq!(
            RationalPoint::new(4, 3, 5).image(&m),
            RationalPoint::new(1, 2, 5)
        );
    }

    #[test]
    fn arnold_origin_only_fixed_point() {
        let m = CatMap::arnold();
        let o = enumerate_prime_orbits(&m, 1, DEFAULT_ENUMERATION_GUARD).unwrap();
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].points, vec![RationalPoint::new(0, 0, 1)]);
    }

    fn brute_force_fixed(m: &CatMap, t: u32) -> usize {
        let l = fixed_point_count(m, t).unwrap();
        let mut count = 0;
        for j in 0..l {
            for k in 0..l {
                let x = RationalPoint { j, k, l };
                let mut y = x;
                for _ in 0..t {
                    y = y.image(m);
                }
                if y == x {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn divisor_identity_matches_brute_force() {
        for m in [CatMap::arnold(), validate_cat_map(1, 2, 1, 3).unwrap()] {
            for t in 1..=4u32 {
                let l = fixed_point_count(&m, t).unwrap();
                let mut total = 0u64;
                for s in 1..=t {
                    if t % s == 0 {
                        let orbits = enumerate_prime_orbits(&m, s, 100_000).unwrap();
                        total += s as u64 * orbits.len() as u64;
                    }
                }
                assert_eq!(total, l, "matrix {:?} T={t}", m.entries());
                if l <= 200 {
                    assert_eq!(brute_force_fixed(&m, t) as u64, l);
                }
            }
        }
    }

    #[test]
    fn enumeration_guard() {
        let m = CatMap::arnold();
        assert!(matches!(
            enumerate_prime_orbits(&m, 4, 40),
            Err(CatError::EnumerationTooLarge { l: 45, guard: 40 })
        ));
    }

    #[test]
    fn delta_measure_values() {
        let m = CatMap::arnold();
        let origin = &enumerate_prime_orbits(&m, 1, 10).unwrap()[0];
        assert_eq!(delta_measure_integrate(origin, |_| C64::new(1.0, 0.0)), C64::new(1.0, 0.0));
        assert!((orbit_fourier_coefficient(origin, [3, -7]) - 1.0).norm() < 1e-15);

        let orbits = enumerate_prime_orbits(&m, 2, 10).unwrap();
        let o = orbits
            .iter()
            .find(|o| o.points.contains(&RationalPoint::new(4, 3, 5)))
            .unwrap();
        let expect = (C64::from_polar(1.0, 2.0 * PI * -0.6) + C64::from_polar(1.0, 2.0 * PI * -0.4)) / 2.0;
        let via_f = delta_measure_integrate(o, |x| fourier_mode([1, 0], x));
        assert!((via_f - expect).norm() < 1e-14);
        assert!((orbit_fourier_coefficient(o, [1, 0]) - expect).norm() < 1e-14);
    }

    #[test]
    fn best_orbit_recovers_target() {
        let m = CatMap::arnold();
        let freqs: Vec<[i64; 2]> = vec![[1, 0], [0, 1], [1, 1], [2, -1]];
        let lebesgue: Vec<_> = freqs.iter().map(|n| (*n, C64::new(0.0, 0.0))).collect();
        let (o, _) = best_orbit_for_measure(&m, &lebesgue, 1, 100).unwrap();
        assert_eq!(o.period(), 1);

        let t2 = enumerate_prime_orbits(&m, 2, 100).unwrap()[1].clone();
        let target: Vec<_> = freqs
            .iter()
            .map(|n| (*n, orbit_fourier_coefficient(&t2, *n)))
            .collect();
        let (o, err) = best_orbit_for_measure(&m, &target, 3, 100).unwrap();
        assert_eq!(o, t2);
        assert!(err < 1e-12);
    }

    #[test]
    fn best_orbit_discrepancy_is_monotone_in_t_max() {
        let m = CatMap::arnold();
        let lebesgue: Vec<_> = [[1, 0], [0, 1], [1, 1]]
            .iter()
            .map(|n| (*n, C64::new(0.0, 0.0)))
            .collect();
        let mut last = f64::INFINITY;
        for t_max in 1..=6 {
            let (_, err) = best_orbit_for_measure(&m, &lebesgue, t_max, 10_000).unwrap();
            assert!(err <= last + 1e-12);
            last = err;
        }
    }

    fn hyperbolic_matrix() -> impl Strategy<Value = CatMap> {
        // Generate via products of shears, which span SL(2, Z).
        proptest::collection::vec((0usize..2, -4i64..=4), 1..6).prop_filter_map(
            "need trace in (2, 50]",
            |ops| {
                let mut m = [[1i64, 0], [0, 1]];
                for (kind, s) in ops {
                    let e = if kind == 0 { [[1, s], [0, 1]] } else { [[1, 0], [s, 1]] };
                    m = [
                        [
                            m[0][0] * e[0][0] + m[0][1] * e[1][0],
                            m[0][0] * e[0][1] + m[0][1] * e[1][1],
                        ],
                        [
                            m[1][0] * e[0][0] + m[1][1] * e[1][0],
                            m[1][0] * e[0][1] + m[1][1] * e[1][1],
                        ],
                    ];
                }
                let tr = m[0][0] + m[1][1];
                if tr.abs() > 2 && tr.abs() <= 50 {
                    validate_cat_map(m[0][0], m[0][1], m[1][0], m[1][1]).ok()
                } else {
                    None
                }
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn decomposition_round_trip(m in hyperbolic_matrix()) {
            prop_assert!(max_diff(&m.hyp.reconstruct(1.0), &m.matrix()) < 1e-10);
            let e = m.lambda().exp();
            prop_assert!((e + 1.0 / e - m.trace() as f64).abs() < 1e-12 * m.trace() as f64);
            prop_assert!(m.hyp.b1 > -FRAC_PI_2 && m.hyp.b1 <= FRAC_PI_2);
        }

        #[test]
        fn orbits_are_exact_and_separated(m in hyperbolic_matrix(), t in 1u32..=3) {
            let l = fixed_point_count(&m, t).unwrap();
            prop_assume!(l <= 2000);
            for o in enumerate_prime_orbits(&m, t, 10_000).unwrap() {
                prop_assert_eq!(o.period(), t as usize);
                let start = o.points[0];
                let mut x = start;
                for s in 0..t as usize {
                    prop_assert_eq!(x, o.points[s]);
                    x = x.image(&m);
                    if s + 1 < t as usize {
                        prop_assert_ne!(x, start);
                    }
                }
                prop_assert_eq!(x, start);
                prop_assert!(o.min_separation() >= 1.0 / l as f64 - 1e-15);
            }
        }
    }
}
