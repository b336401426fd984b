use num_complex::Complex64;

use crate::{jacobi_eigen, ComplexMatrix, DenseMatrix, JacobiOptions, OracleError};

/// `exp(-itA)` for symmetric `A`, assembled as `V·diag(exp(-itλ))·Vᵀ`.
pub fn expm_unitary(m: &DenseMatrix, t: f64) -> Result<ComplexMatrix, OracleError> {
    let eig = jacobi_eigen(m, &JacobiOptions::default())?;
    let n = m.dim();
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -t * lambda))
        .collect();
    let v = &eig.vectors;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, phase) in phases.iter().enumerate() {
                let w = v[(i, k)] * v[(j, k)];
                if w != 0.0 {
                    acc += phase * w;
                }
            }
            out.push(acc);
        }
    }
    ComplexMatrix::from_row_major(n, out)
}

/// Truncated series `Σ_{k<terms} (-itA)^k / k!`.
///
/// Only accurate when `|t|·||A||` is modest; used as a second opinion on
/// [`expm_unitary`] for small matrices.
pub fn expm_power_series(m: &DenseMatrix, t: f64, terms: usize) -> ComplexMatrix {
    let n = m.dim();
    let generator = {
        let data = m
            .as_slice()
            .iter()
            .map(|&x| Complex64::new(0.0, -t * x))
            .collect();
        ComplexMatrix::from_row_major(n, data).expect("square by construction")
    };
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..terms {
        term = term.matmul(&generator);
        let inv = 1.0 / k as f64;
        let scaled: Vec<Complex64> = term.as_slice().iter().map(|z| z * inv).collect();
        term = ComplexMatrix::from_row_major(n, scaled).expect("square by construction");
        let acc: Vec<Complex64> = sum
            .as_slice()
            .iter()
            .zip(term.as_slice())
            .map(|(a, b)| a + b)
            .collect();
        sum = ComplexMatrix::from_row_major(n, acc).expect("square by construction");
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_zero_is_identity() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let h = expm_unitary(&m, 0.0).unwrap();
        assert!(h.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn path_three_end_to_end_transfer() {
        let m = DenseMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        let t = std::f64::consts::PI / std::f64::consts::SQRT_2;
        let h = expm_unitary(&m, t).unwrap();
        assert!((h[(0, 2)].norm() - 1.0).abs() < 1e-12);
        assert!(h.unitarity_defect() < 1e-9);
    }
}
