mod common;

use common::*;
use gateaux_core::derivative::{
    gateaux_one_sided, gateaux_plus, gateaux_two_sided, is_smooth, min_phi_derivative, phi_gateaux,
    spectral_cutoff_derivative,
};
use gateaux_core::linalg::{gram_spectrum, inner, max_eigenspace, operator_norm};
use gateaux_core::oracle::fd_derivative;
use gateaux_core::{Complex64, ComplexMatrix, ToleranceConfig};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn norm_of_constructed_svd() {
    let mut r = rng(11);
    let (a, _, _) = with_singular_values(&mut r, &[5.0, 2.0, 1.0, 0.0]);
    assert!((operator_norm(&a, &tol()).unwrap() - 5.0).abs() < 5e-10);
}

#[test]
fn finite_differences_agree_with_eigenspace_formula() {
    let t = tol();
    let mut r = rng(1);
    for trial in 0..60 {
        let n = 2 + trial % 7;
        let a = random_complex(&mut r, n, n);
        let b = random_complex(&mut r, n, n);
        let analytic = gateaux_plus(&a, &b, &t).unwrap().value;
        let fd = fd_derivative(&a, &b, &t).unwrap();
        assert!(
            (analytic - fd.estimate).abs() <= 1e-6,
            "trial {trial}: {analytic} vs {}",
            fd.estimate
        );
        // quotient error shrinks roughly linearly with the step
        let last = fd.samples.last().unwrap();
        assert!((last.1 - analytic).abs() <= 1e-3);
    }
}

#[test]
fn degenerate_top_singular_values_match_finite_differences() {
    let t = tol();
    let mut r = rng(2);
    for trial in 0..30 {
        let mult = 2 + trial % 2;
        let n = mult + 1 + trial % 3;
        let mut s = vec![3.0; mult];
        s.extend((0..n - mult).map(|i| 1.5 - 0.2 * i as f64));
        let (a, _, _) = with_singular_values(&mut r, &s);
        let b = random_complex(&mut r, n, n);
        let d = gateaux_plus(&a, &b, &t).unwrap();
        assert_eq!(d.eigenspace_dim, mult);
        let fd = fd_derivative(&a, &b, &t).unwrap();
        assert!((d.value - fd.estimate).abs() <= 1e-6, "trial {trial}");
    }
}

#[test]
fn lemma_identity_through_gram_matrix() {
    let t = tol();
    let mut r = rng(3);
    for _ in 0..50 {
        let n = 2 + (gaussian(&mut r).abs() * 3.0) as usize % 6;
        let a = random_complex(&mut r, n, n);
        let b = random_complex(&mut r, n, n);
        let lhs = gateaux_plus(&a, &b, &t).unwrap().value;
        let gram = a.adjoint_mul(&a);
        let rhs = gateaux_plus(&gram, &a.adjoint_mul(&b), &t).unwrap().value
            / operator_norm(&a, &t).unwrap();
        assert!((lhs - rhs).abs() <= 1e-8, "{lhs} vs {rhs}");
    }
}

#[test]
fn homogeneity_subadditivity_self_direction_and_bound() {
    let t = tol();
    let mut r = rng(4);
    for trial in 0..40 {
        let n = 2 + trial % 5;
        let a = random_complex(&mut r, n, n);
        let b1 = random_complex(&mut r, n, n);
        let b2 = random_complex(&mut r, n, n);
        let d1 = gateaux_plus(&a, &b1, &t).unwrap().value;
        let d2 = gateaux_plus(&a, &b2, &t).unwrap().value;

        let c = 0.1 + gaussian(&mut r).abs();
        let scaled = gateaux_plus(&a, &b1.scale_real(c), &t).unwrap().value;
        assert!((scaled - c * d1).abs() <= 1e-9 * (1.0 + c * d1.abs()));

        let sum = gateaux_plus(&a, &(&b1 + &b2), &t).unwrap().value;
        assert!(sum <= d1 + d2 + 1e-9);

        let own = gateaux_plus(&a, &a, &t).unwrap().value;
        assert!((own - operator_norm(&a, &t).unwrap()).abs() <= 1e-9);

        assert!(d1.abs() <= operator_norm(&b1, &t).unwrap() + 1e-9);
    }
}

#[test]
fn maximizing_vector_is_a_norming_direction() {
    let t = tol();
    let mut r = rng(5);
    for _ in 0..20 {
        let a = random_complex(&mut r, 4, 3);
        let b = random_complex(&mut r, 4, 3);
        let d = gateaux_plus(&a, &b, &t).unwrap();
        let e = max_eigenspace(&a, &t).unwrap();
        let u = &d.maximizing_vector;
        let au = a.mul_vec(u);
        let gu = a.adjoint().mul_vec(&au);
        let res: f64 = gu
            .iter()
            .zip(u)
            .map(|(g, x)| (g - x * e.lambda_max).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(res <= 1e-8 * e.lambda_max);
        // the value is attained at the vector: Re <Au, Bu> / |A|
        let attained = inner(&au, &b.mul_vec(u)).re / e.op_norm;
        assert!((attained - d.value).abs() <= 1e-10);
    }
}

#[test]
fn rotated_derivative_is_plus_derivative_of_rotated_direction() {
    let t = tol();
    let mut r = rng(6);
    let a = random_complex(&mut r, 3, 3);
    let b = random_complex(&mut r, 3, 3);
    for j in 0..8 {
        let phi = j as f64 * 0.7;
        let lhs = phi_gateaux(&a, &b, phi, &t).unwrap().value;
        let rhs = gateaux_plus(&a, &b.scale(Complex64::from_polar(1.0, phi)), &t).unwrap().value;
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn min_over_angles_matches_dense_scan() {
    let t = tol();
    let mut r = rng(7);
    for trial in 0..10 {
        let mult = 1 + trial % 3;
        let mut s = vec![2.0; mult];
        s.extend([1.0, 0.5]);
        let (a, _, _) = with_singular_values(&mut r, &s);
        let n = s.len();
        let b = random_complex(&mut r, n, n);
        let m = min_phi_derivative(&a, &b, &t).unwrap();
        let scan = (0..2000)
            .map(|j| {
                let phi = std::f64::consts::TAU * j as f64 / 2000.0;
                phi_gateaux(&a, &b, phi, &t).unwrap().value
            })
            .fold(f64::INFINITY, f64::min);
        assert!(m.value <= scan + 1e-12);
        assert!(scan - m.value <= 1e-4);
        let at_star = phi_gateaux(&a, &b, m.phi_star, &t).unwrap().value;
        assert!((at_star - m.value).abs() <= 1e-12);
    }
}

#[test]
fn smoothness_matches_differentiability_in_random_directions() {
    let t = tol();
    let mut r = rng(8);
    for trial in 0..20 {
        let n = 3;
        let degenerate = trial % 2 == 0;
        let s = if degenerate { vec![2.0, 2.0, 0.5] } else { vec![2.0, 1.0, 0.5] };
        let (a, _, _) = with_singular_values(&mut r, &s);
        let smooth = is_smooth(&a, &t).unwrap();
        assert_eq!(smooth.smooth, !degenerate);
        let exists_everywhere = (0..20).all(|_| {
            let b = random_complex(&mut r, n, n);
            gateaux_two_sided(&a, &b, &t).unwrap().is_some()
        });
        assert_eq!(exists_everywhere, smooth.smooth);
    }
}

#[test]
fn smooth_derivative_is_the_witness_pairing() {
    let t = tol();
    let mut r = rng(9);
    let (a, _, _) = with_singular_values(&mut r, &[3.0, 1.0, 0.2]);
    let h = is_smooth(&a, &t).unwrap().witness.unwrap();
    for _ in 0..10 {
        let b = random_complex(&mut r, 3, 3);
        let two = gateaux_two_sided(&a, &b, &t).unwrap().unwrap();
        let expected = inner(&a.mul_vec(&h), &b.mul_vec(&h)).re / 3.0;
        assert!((two - expected).abs() <= 1e-10);
    }
}

#[test]
fn constructed_double_singular_value_is_not_smooth() {
    let mut r = rng(10);
    let (a, u, v) = with_singular_values(&mut r, &[5.0, 5.0, 1.0]);
    let s = is_smooth(&a, &tol()).unwrap();
    assert!(!s.smooth && s.witness.is_none());
    // B = U diag(1, -1, 0) V* splits the double singular value
    let b = &(&u * &ComplexMatrix::from_real_diag(&[1.0, -1.0, 0.0])) * &v.adjoint();
    let pair = gateaux_one_sided(&a, &b, &tol()).unwrap();
    assert!((pair.right - 1.0).abs() < 1e-9 && (pair.left + 1.0).abs() < 1e-9);
}

#[test]
fn cutoff_converges_to_plus_derivative() {
    let t = tol();
    let mut r = rng(12);
    for _ in 0..30 {
        let a = random_complex(&mut r, 4, 4);
        let b = random_complex(&mut r, 4, 4);
        let decomp = gram_spectrum(&a, &t).unwrap();
        let gap = decomp.eigenvalues[0] - decomp.eigenvalues[1];
        let norm = decomp.eigenvalues[0].sqrt();
        let eps = 0.99 * gap / (2.0 * norm);
        let plus = gateaux_plus(&a, &b, &t).unwrap().value;
        let cut = spectral_cutoff_derivative(&a, &b, eps, &t).unwrap();
        assert!((cut - plus).abs() <= 1e-8);
        // shrinking the window never increases the value
        let mut prev = f64::INFINITY;
        for k in 0..6 {
            let e = (norm * 0.999) * 0.5f64.powi(k);
            let v = spectral_cutoff_derivative(&a, &b, e, &t).unwrap();
            assert!(v <= prev + 1e-10);
            prev = v;
        }
    }
}
