use crate::{DenseMatrix, OracleError};

#[derive(Clone, Copy, Debug)]
pub struct JacobiOptions {
    /// Stop once the off-diagonal Frobenius mass drops below `tolerance * ||A||_F`.
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Absolute symmetry tolerance checked before iterating.
    pub symmetry_tolerance: f64,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        JacobiOptions {
            tolerance: 1e-14,
            max_sweeps: 60,
            symmetry_tolerance: 1e-12,
        }
    }
}

/// Eigenvalues in ascending order; column `i` of `vectors` belongs to `values[i]`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
    pub sweeps: usize,
}

impl EigenDecomposition {
    /// `max |A·V − V·diag(λ)|` over all entries.
    pub fn residual(&self, a: &DenseMatrix) -> f64 {
        let n = a.dim();
        let av = a.matmul(&self.vectors);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let r = av[(i, j)] - self.vectors[(i, j)] * self.values[j];
                worst = worst.max(r.abs());
            }
        }
        worst
    }

    /// `max |VᵀV − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.vectors.dim();
        self.vectors
            .transpose()
            .matmul(&self.vectors)
            .max_abs_diff(&DenseMatrix::identity(n))
    }
}

fn off_diagonal_mass(a: &DenseMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix.
///
/// Each sweep visits every pair `(p, q)` with `p < q` once and applies the
/// plane rotation that annihilates `a[p][q]`. The accumulated rotations form
/// the orthogonal eigenvector matrix.
pub fn jacobi_eigen(
    m: &DenseMatrix,
    options: &JacobiOptions,
) -> Result<EigenDecomposition, OracleError> {
    m.check_symmetric(options.symmetry_tolerance)?;
    let n = m.dim();
    let mut a = m.clone();
    let mut v = DenseMatrix::identity(n);
    let scale = m.frobenius_norm();
    let threshold = options.tolerance * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_mass(&a);
        if off <= threshold || scale == 0.0 {
            break;
        }
        if sweeps == options.max_sweeps {
            return Err(OracleError::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(EigenDecomposition {
        values,
        vectors,
        sweeps,
    })
}
