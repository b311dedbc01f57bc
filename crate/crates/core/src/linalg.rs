//! Small dense and matrix-free linear algebra helpers.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-distributed unit vector in C^n.
pub fn random_unit_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let nrm = norm(&v);
    v.iter_mut().for_each(|z| *z /= nrm);
    v
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sq(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn axpy(y: &mut [C64], alpha: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Largest singular value of an operator given by `x -> A x` and `x -> A† x`.
///
/// Lanczos on `A†A` with full reorthogonalization; the Krylov space is capped
/// at `max_iter` and at the dimension.
pub fn op_norm_lanczos<F, G>(apply: F, apply_adj: G, n: usize, max_iter: usize, seed: u64) -> f64
where
    F: Fn(&[C64]) -> Vec<C64>,
    G: Fn(&[C64]) -> Vec<C64>,
{
    let k_max = max_iter.min(n).max(1);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(k_max);
    let mut alphas = Vec::with_capacity(k_max);
    let mut betas: Vec<f64> = Vec::with_capacity(k_max);
    let mut r = rng(seed);
    let mut v = random_unit_vector(n, &mut r);

    for k in 0..k_max {
        let mut w = apply_adj(&apply(&v));
        let a = dot(&v, &w).re;
        alphas.push(a);
        basis.push(v.clone());
        // two passes of Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                axpy(&mut w, -c, q);
            }
        }
        let b = norm(&w);
        let scale = alphas.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if k + 1 == k_max || b <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        betas.push(b);
        v = w.into_iter().map(|z| z / b).collect();
    }

    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let top = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    top.max(0.0).sqrt()
}

/// Spectral norm of a dense complex matrix.
pub fn dense_op_norm(a: &DMatrix<C64>) -> f64 {
    a.clone().svd(false, false).singular_values.max()
}

pub fn frobenius(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lanczos_matches_svd() {
        let mut r = rng(7);
        let n = 40;
        let a = DMatrix::from_fn(n, n, |_, _| {
            C64::new(r.sample(StandardNormal), r.sample(StandardNormal))
        });
        let exact = dense_op_norm(&a);
        let ad = a.adjoint();
        let est = op_norm_lanczos(
            |x| (&a * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec(),
            |x| (&ad * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec(),
            n,
            n,
            3,
        );
        assert!((est - exact).abs() < 1e-9 * exact, "{est} vs {exact}");
    }

    #[test]
    fn zero_operator_has_zero_norm() {
        let est = op_norm_lanczos(|x| vec![C64::default(); x.len()], |x| vec![C64::default(); x.len()], 10, 5, 1);
        assert_eq!(est, 0.0);
    }

    #[test]
    fn random_vectors_are_unit_and_seeded() {
        let a = random_unit_vector(33, &mut rng(5));
        let b = random_unit_vector(33, &mut rng(5));
        assert_eq!(a, b);
        assert!((norm(&a) - 1.0).abs() < 1e-14);
    }
}
