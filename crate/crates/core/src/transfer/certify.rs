use num_complex::Complex64;
use num_rational::Ratio;

use super::{
    Certificate, CertificateKind, Evidence, MixedParityConstruction, RatioQuadruple, TimePoint,
    Topic, TransferOptions,
};
use crate::error::{Error, Result};
use crate::exactnum::{ratio_is_rational, Quad};
use crate::neps::{parity_profile, Factor, NepsSpec, Vertex};
use crate::spectral::{eigenvalue_of, EigenIndex, SupportSet, TensorEigenbasis};

/// Matrix-level periodicity checks run on graphs up to this many vertices.
const MATRIX_CHECK_LIMIT: usize = 256;
const PERIODIC_TOLERANCE: f64 = 1e-9;

/// The three support eigenvalues `a + b√2`, `a − b√2`, `c + d√2` of a
/// mixed-parity NEPS of P3, whose difference ratio is irrational.
///
/// All three come from eigenvectors without zero entries, so the
/// certificate applies to every vertex.
pub fn check_no_pst_mixed_parity(spec: &NepsSpec) -> Result<Option<Certificate>> {
    if !spec.all(Factor::P3) {
        return Ok(None);
    }
    let profile = parity_profile(spec.omega());
    let (Some(omega_e), Some(_)) = (&profile.omega_e, &profile.omega_o) else {
        return Ok(None);
    };
    let n = spec.dim();
    let coordinate = (0..n)
        .find(|&j| omega_e.iter().any(|beta| beta.get(j)))
        .ok_or_else(|| {
            Error::Internal("no coordinate is covered by an even-weight vector".into())
        })?;
    let index_low = EigenIndex::uniform(n, 0);
    let index_high = EigenIndex::uniform(n, 2);
    let mut mixed = vec![2u8; n];
    mixed[coordinate] = 0;
    let index_mixed = EigenIndex(mixed);

    let low = eigenvalue_of(spec, &index_low)?;
    let high = eigenvalue_of(spec, &index_high)?;
    let lambda_mixed = eigenvalue_of(spec, &index_mixed)?;
    let (a, b) = (high.a(), high.b());
    if low != Quad::new(a, -b) || a <= 0 || b <= 0 {
        return Err(Error::Internal(format!(
            "extreme eigenvalues {low} and {high} are not a ∓ b√2 with a, b > 0"
        )));
    }
    let (c, d) = (lambda_mixed.a(), lambda_mixed.b());
    if c == a {
        return Err(Error::Internal(format!(
            "mixed eigenvalue {lambda_mixed} has c = a"
        )));
    }
    let numerator = high.checked_sub(low)?;
    let denominator = high.checked_sub(lambda_mixed)?;
    let rational = ratio_is_rational(numerator, denominator)?;
    if rational {
        return Err(Error::Internal(format!(
            "({numerator})/({denominator}) is rational"
        )));
    }
    Ok(Some(Certificate {
        kind: CertificateKind::NoPstRatio,
        topic: Topic::Pst,
        evidence: Evidence::RatioViolation {
            vertex: None,
            all_vertices: true,
            eigenvalues: RatioQuadruple {
                lambda_k: high,
                lambda_l: low,
                lambda_r: high,
                lambda_s: lambda_mixed,
            },
            numerator,
            denominator,
            ratio_rational: false,
            construction: Some(MixedParityConstruction {
                a,
                b,
                c,
                d,
                coordinate,
                index_low,
                index_high,
                index_mixed,
            }),
        },
    }))
}

/// Looks for `λ_k, λ_l, λ_r, λ_s` in one support with
/// `(λ_k − λ_l)/(λ_r − λ_s) ∉ Q`.
///
/// Comparing every difference against `λ₁ − λ₀` is enough: if all of them
/// are rational multiples of it, so are all pairwise differences.
pub fn support_ratio_test(support: &SupportSet) -> Result<Option<RatioQuadruple>> {
    let ev = &support.eigenvalues;
    if ev.len() <= 2 {
        return Ok(None);
    }
    let base = ev[1].checked_sub(ev[0])?;
    for &lambda in &ev[2..] {
        if !ratio_is_rational(lambda.checked_sub(ev[0])?, base)? {
            return Ok(Some(RatioQuadruple {
                lambda_k: lambda,
                lambda_l: ev[0],
                lambda_r: ev[1],
                lambda_s: ev[0],
            }));
        }
    }
    Ok(None)
}

/// Period and phase known in closed form for the whole graph.
fn uniform_period(spec: &NepsSpec) -> Option<TimePoint> {
    if spec.all(Factor::P2) {
        return Some(TimePoint::tau(0));
    }
    if !spec.all(Factor::P3) {
        return None;
    }
    let (k, _, _) = parity_profile(spec.omega()).uniform_star()?;
    Some(if k % 2 == 0 {
        TimePoint::tau(0)
    } else {
        TimePoint::symbolic(Ratio::from_integer(2), k as i32)
    })
}

/// Periodicity of the walk.
///
/// Uniform-parity NEPS of P3 are periodic at `2τ_k` (at `π` for even `k`) and
/// NEPS of P2 at `π`; both are confirmed numerically on the spectrum and, for
/// small graphs, on `H` itself. Other graphs get the exact ratio test: a
/// violation on the smallest support (every P3 coordinate at its middle
/// vertex) rules out periodicity everywhere, a pass on the largest support
/// (vertex 0) means the test cannot decide.
pub fn check_periodicity(spec: &NepsSpec, opts: &TransferOptions) -> Result<Certificate> {
    let basis = TensorEigenbasis::new(spec)?;
    if let Some(time) = uniform_period(spec) {
        let t = time.value();
        let phase = |lambda: f64| Complex64::from_polar(1.0, -t * lambda);
        let gamma = phase(basis.float_eigenvalues()[0]);
        let spectral_deviation = basis
            .float_eigenvalues()
            .iter()
            .map(|&l| (phase(l) - gamma).norm())
            .fold(0.0, f64::max);
        let matrix_deviation =
            (basis.len() <= MATRIX_CHECK_LIMIT.min(opts.dense_limit)).then(|| {
                let mut worst: f64 = 0.0;
                for u in 0..basis.len() {
                    for (v, h) in basis.transfer_row(u, t).into_iter().enumerate() {
                        let want = if u == v {
                            gamma
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        worst = worst.max((h - want).norm());
                    }
                }
                worst
            });
        let worst = matrix_deviation.unwrap_or(0.0).max(spectral_deviation);
        if worst > PERIODIC_TOLERANCE {
            return Err(Error::Internal(format!(
                "predicted period {time} leaves a deviation of {worst:e}"
            )));
        }
        return Ok(Certificate {
            kind: CertificateKind::PeriodicAt,
            topic: Topic::Periodicity,
            evidence: Evidence::Periodic {
                time,
                gamma,
                spectral_deviation,
                matrix_deviation,
            },
        });
    }

    let middle: Vec<u8> = spec
        .factors()
        .iter()
        .map(|f| u8::from(*f == Factor::P3))
        .collect();
    let smallest = basis.support_at(spec.vertex_index(&Vertex(middle))?)?;
    if let Some(quad) = support_ratio_test(&smallest)? {
        return ratio_certificate(smallest.vertex, true, quad);
    }
    let largest = basis.support_at(0)?;
    match support_ratio_test(&largest)? {
        Some(quad) => Ok(ratio_certificate(largest.vertex, false, quad)?),
        None => Ok(Certificate::unknown(
            Topic::Periodicity,
            "every vertex support passes the ratio test, which is necessary but not sufficient",
            None,
        )),
    }
}

fn ratio_certificate(
    vertex: Vertex,
    all_vertices: bool,
    quad: RatioQuadruple,
) -> Result<Certificate> {
    let numerator = quad.lambda_k.checked_sub(quad.lambda_l)?;
    let denominator = quad.lambda_r.checked_sub(quad.lambda_s)?;
    Ok(Certificate {
        kind: CertificateKind::NoPstRatio,
        topic: Topic::Periodicity,
        evidence: Evidence::RatioViolation {
            vertex: Some(vertex),
            all_vertices,
            eigenvalues: quad,
            numerator,
            denominator,
            ratio_rational: false,
            construction: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evidence_quads(c: &Certificate) -> (Quad, Quad, Quad) {
        match &c.evidence {
            Evidence::RatioViolation { eigenvalues, .. } => (
                eigenvalues.lambda_k,
                eigenvalues.lambda_l,
                eigenvalues.lambda_s,
            ),
            other => panic!("unexpected evidence {other:?}"),
        }
    }

    #[test]
    fn mixed_pair_construction() {
        let spec = NepsSpec::p3(&[[1, 0], [1, 1]]).unwrap();
        let cert = check_no_pst_mixed_parity(&spec).unwrap().unwrap();
        let (high, low, mixed) = evidence_quads(&cert);
        assert_eq!(high, Quad::new(2, 1));
        assert_eq!(low, Quad::new(2, -1));
        assert_eq!(mixed, Quad::new(-2, -1));
    }

    #[test]
    fn uniform_parity_has_no_mixed_certificate() {
        let spec = NepsSpec::p3(&[[1, 0], [0, 1]]).unwrap();
        assert!(check_no_pst_mixed_parity(&spec).unwrap().is_none());
    }

    #[test]
    fn path_period() {
        let spec = NepsSpec::p3(&[[1]]).unwrap();
        let cert = check_periodicity(&spec, &TransferOptions::default()).unwrap();
        assert_eq!(cert.kind, CertificateKind::PeriodicAt);
        let Evidence::Periodic { time, gamma, .. } = cert.evidence else {
            unreachable!()
        };
        assert_eq!(time.symbolic_form().unwrap().to_string(), "2π/√2");
        assert!((gamma - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn edge_period_has_minus_one_phase() {
        let spec = NepsSpec::p2(&[[1]]).unwrap();
        let cert = check_periodicity(&spec, &TransferOptions::default()).unwrap();
        let Evidence::Periodic { gamma, .. } = cert.evidence else {
            unreachable!()
        };
        assert!((gamma + 1.0).norm() < 1e-12);
    }

    #[test]
    fn mixed_pair_not_periodic_anywhere() {
        let spec = NepsSpec::p3(&[[1, 0], [1, 1]]).unwrap();
        let cert = check_periodicity(&spec, &TransferOptions::default()).unwrap();
        assert_eq!(cert.kind, CertificateKind::NoPstRatio);
        assert!(matches!(
            cert.evidence,
            Evidence::RatioViolation {
                all_vertices: true,
                ..
            }
        ));
    }

    #[test]
    fn edge_times_path_not_periodic() {
        let spec = NepsSpec::from_rows(&[Factor::P2, Factor::P3], &[[1, 0], [0, 1]]).unwrap();
        let cert = check_periodicity(&spec, &TransferOptions::default()).unwrap();
        assert_eq!(cert.kind, CertificateKind::NoPstRatio);
    }
}
