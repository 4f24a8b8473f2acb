#![allow(dead_code)]

use gateaux_core::function_space::DiscreteDomainFunction;
use gateaux_core::{Complex64, ComplexMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(gaussian(rng), gaussian(rng)))
}

pub fn random_real(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(gaussian(rng), 0.0))
}

/// Haar-ish unitary from Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = random_complex(rng, n, n);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for q in &cols {
            let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_columns(n, &cols)
}

/// `U diag(s) V*` with random unitaries; returns `(A, U, V)`.
pub fn with_singular_values(
    rng: &mut ChaCha8Rng,
    s: &[f64],
) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let n = s.len();
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    let a = &(&u * &ComplexMatrix::from_real_diag(s)) * &v.adjoint();
    (a, u, v)
}

/// Random `k x k` density matrix `W W* / tr(W W*)`.
pub fn random_density(rng: &mut ChaCha8Rng, k: usize) -> ComplexMatrix {
    let w = random_complex(rng, k, k);
    let t = &w * &w.adjoint();
    let tr = t.trace().re;
    t.scale_real(1.0 / tr).hermitian_part()
}

pub fn random_function(rng: &mut ChaCha8Rng, n: usize) -> DiscreteDomainFunction {
    DiscreteDomainFunction::new((0..n).map(|_| Complex64::new(gaussian(rng), gaussian(rng))).collect())
        .unwrap()
}

/// `A = U diag(s) V*` with top multiplicity `k`, `m` generators and a
/// `k x k` density `T` in eigenspace coordinates with `tr(U*A*B_j U T) = 0`.
/// Returns `(A, generators, T lifted to the ambient space)`.
pub fn feasible_instance(
    rng: &mut ChaCha8Rng,
    s: &[f64],
    k: usize,
    m: usize,
) -> (ComplexMatrix, Vec<ComplexMatrix>, ComplexMatrix) {
    let n = s.len();
    let (a, u, v) = with_singular_values(rng, s);
    let t = random_density(rng, k);
    let gens = (0..m)
        .map(|_| {
            let x = random_complex(rng, k, k);
            let shift = (&x * &t).trace();
            let mut mid = random_complex(rng, n, n);
            for i in 0..k {
                for j in 0..k {
                    let mut z = x[(i, j)];
                    if i == j {
                        z -= shift;
                    }
                    mid[(i, j)] = z / s[i];
                }
            }
            &(&u * &mid) * &v.adjoint()
        })
        .collect();
    let vk = ComplexMatrix::from_columns(n, &(0..k).map(|j| v.column(j)).collect::<Vec<_>>());
    let ambient = &(&vk * &t) * &vk.adjoint();
    (a, gens, ambient.hermitian_part())
}
