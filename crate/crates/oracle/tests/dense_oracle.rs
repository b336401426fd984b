use nepswalk_oracle::{
    expm_power_series, expm_unitary, jacobi_eigen, ComplexMatrix, DenseMatrix, JacobiOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let x: f64 = rng.gen_range(-1.0..1.0);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = DenseMatrix::zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

#[test]
fn random_matrices_decompose_with_small_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [1, 2, 5, 17, 40] {
        let m = random_symmetric(&mut rng, n);
        let eig = jacobi_eigen(&m, &JacobiOptions::default()).unwrap();
        let norm = m.frobenius_norm();
        assert!(eig.residual(&m) <= 1e-10 * norm.max(1.0), "n={n}");
        assert!(eig.orthogonality_defect() <= 1e-10, "n={n}");
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn tensor_square_of_path_three() {
    let p3 = DenseMatrix::from_rows(&[
        vec![0.0, 1.0, 0.0],
        vec![1.0, 0.0, 1.0],
        vec![0.0, 1.0, 0.0],
    ])
    .unwrap();
    let eig = jacobi_eigen(&kron(&p3, &p3), &JacobiOptions::default()).unwrap();
    let expected = [-2.0, -2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 2.0];
    for (got, want) in eig.values.iter().zip(expected) {
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn agrees_with_power_series_on_random_five_by_five() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = random_symmetric(&mut rng, 5);
    let by_eigen = expm_unitary(&m, 0.7).unwrap();
    let by_series = expm_power_series(&m, 0.7, 40);
    assert!(by_eigen.max_abs_diff(&by_series) < 1e-9);
    assert!(by_eigen.unitarity_defect() < 1e-9);
}

#[test]
fn propagator_is_a_semigroup() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = random_symmetric(&mut rng, 12);
    for _ in 0..5 {
        let s: f64 = rng.gen_range(-3.0..3.0);
        let t: f64 = rng.gen_range(-3.0..3.0);
        let lhs = expm_unitary(&m, s)
            .unwrap()
            .matmul(&expm_unitary(&m, t).unwrap());
        let rhs = expm_unitary(&m, s + t).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-8);
    }
}

#[test]
fn identity_generator_gives_scalar_phase() {
    let h = expm_unitary(&DenseMatrix::identity(4), 0.5).unwrap();
    let phase = num_complex::Complex64::from_polar(1.0, -0.5);
    let mut want = ComplexMatrix::zeros(4);
    for i in 0..4 {
        want[(i, i)] = phase;
    }
    assert!(h.max_abs_diff(&want) < 1e-15);
}
