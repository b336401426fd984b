use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;

use super::kronecker::kronecker_solve;
use super::{
    check_pst_sufficient, Certificate, CertificateKind, Derivation, Evidence, TimePoint, Topic,
    TransferOptions, TransferWitness, WitnessKind,
};
use crate::error::{Error, Result};
use crate::exactnum::{QuadRat, Rational};
use crate::neps::{parity_profile, BasisSet, BitTuple, Factor, NepsSpec};
use crate::spectral::{TensorEigenbasis, TransferKernel};

/// PGST for a mixed-parity NEPS of P3.
///
/// The even part is periodic at `π` and the odd part at `2τ_l`, and the two
/// parts commute. If the odd minimum-weight sum is nonzero (first case) the
/// odd part has PST at `τ_l` and a time `qπ` close to an odd multiple of
/// `τ_l` is sought; if the even sum is nonzero (second case) the even part
/// has PST at `τ_k` and a multiple of `2τ_l` close to `qπ + τ_k` is sought.
/// The time tolerance starts at `ε/4` and is halved until the evaluated
/// fidelity clears `1 − ε`.
///
/// Every applicable case is run; the result is empty when neither applies.
/// A search-bound error is returned only if no case produced a witness.
pub fn check_pgst_mixed(
    spec: &NepsSpec,
    opts: &TransferOptions,
) -> Result<Vec<(Certificate, TransferWitness)>> {
    opts.validate()?;
    if !spec.all(Factor::P3) {
        return Ok(Vec::new());
    }
    let profile = parity_profile(spec.omega());
    let (Some(omega_e), Some(omega_o)) = (&profile.omega_e, &profile.omega_o) else {
        return Ok(Vec::new());
    };
    let (k, l) = (
        profile.k.expect("even class"),
        profile.l.expect("odd class"),
    );
    let (sum_e, sum_o) = (
        profile.star_sum_e.expect("even"),
        profile.star_sum_o.expect("odd"),
    );

    let mut found = Vec::new();
    let mut exhausted = None;
    let cases = [
        (CertificateKind::PgstCaseI, omega_o, sum_o),
        (CertificateKind::PgstCaseII, omega_e, sum_e),
    ];
    for (kind, sub_basis, star_sum) in cases {
        if star_sum.is_zero() {
            continue;
        }
        let case = Case {
            kind,
            k,
            l,
            star_sum,
            sub_basis,
        };
        match case.search(spec, opts) {
            Ok(hit) => found.push(hit),
            Err(Error::SearchBound(msg)) => exhausted = Some(msg),
            Err(e) => return Err(e),
        }
    }
    match exhausted {
        Some(msg) if found.is_empty() => Err(Error::SearchBound(msg)),
        _ => Ok(found),
    }
}

struct Case<'a> {
    kind: CertificateKind,
    k: u32,
    l: u32,
    star_sum: BitTuple,
    sub_basis: &'a BasisSet,
}

struct Candidate {
    time: TimePoint,
    family: &'static str,
    amplitude: Complex64,
}

impl Case<'_> {
    fn search(
        &self,
        spec: &NepsSpec,
        opts: &TransferOptions,
    ) -> Result<(Certificate, TransferWitness)> {
        let sub = spec.with_omega(self.sub_basis.clone())?;
        let (_, sub_witness) = check_pst_sufficient(&sub)?
            .ok_or_else(|| Error::Internal(format!("sub-walk on {} has no PST", self.sub_basis)))?;
        let (u, v) = (
            spec.vertex_index(&sub_witness.source)?,
            spec.vertex_index(&sub_witness.target)?,
        );
        let kernel = TensorEigenbasis::new(spec)?.kernel(u, v)?;

        let first = self.kind == CertificateKind::PgstCaseI;
        let tau_l = QuadRat::sqrt2_pow(-(self.l as i32))?;
        let theta = tau_l.checked_scale(2)?;
        let alpha = if first {
            tau_l.clone()
        } else {
            QuadRat::sqrt2_pow(-(self.k as i32))?
        };

        for halvings in 0..=opts.halvings {
            let time_tolerance = opts.epsilon / 4.0 / f64::from(1u32 << halvings);
            let delta = time_tolerance / PI;
            let sol = kronecker_solve(&theta, &alpha, delta, opts.max_multiplier)?;
            let multiplier = if first { sol.q } else { sol.p };
            if multiplier.abs() > opts.max_q {
                return Err(Error::SearchBound(format!(
                    "witness multiplier {multiplier} exceeds the bound {}; raise --max-q or relax --epsilon",
                    opts.max_q
                )));
            }
            let Some(hit) = self
                .candidates(sol.p, sol.q, &kernel)?
                .into_iter()
                .find(|c| c.amplitude.norm() >= 1.0 - opts.epsilon)
            else {
                continue;
            };
            let derivation = Derivation {
                method: sol.method.as_str().to_string(),
                theta: theta.clone(),
                alpha: alpha.clone(),
                delta,
                p: sol.p,
                q: sol.q,
                residual: sol.residual_digits.clone(),
            };
            let certificate = Certificate {
                kind: self.kind,
                topic: Topic::Pgst,
                evidence: Evidence::Pgst {
                    k: self.k,
                    l: self.l,
                    star_sum: self.star_sum,
                    sub_basis: self.sub_basis.clone(),
                    sub_pst_time: sub_witness.time.clone(),
                    time_family: hit.family.to_string(),
                    halvings,
                    time_tolerance,
                    derivation: derivation.clone(),
                },
            };
            let witness = TransferWitness {
                kind: WitnessKind::Pgst,
                source: sub_witness.source.clone(),
                target: sub_witness.target.clone(),
                time: hit.time,
                fidelity: hit.amplitude.norm(),
                phase: hit.amplitude,
                epsilon: Some(opts.epsilon),
                derivation: Some(derivation),
            };
            return Ok((certificate, witness));
        }
        Err(Error::SearchBound(format!(
            "fidelity stayed below 1 − {} after {} halvings of the time tolerance",
            opts.epsilon, opts.halvings
        )))
    }

    fn candidates(&self, p: i128, q: i128, kernel: &TransferKernel) -> Result<Vec<Candidate>> {
        let eval = |time: TimePoint, family| Candidate {
            amplitude: kernel.eval(time.value()),
            time,
            family,
        };
        if self.kind == CertificateKind::PgstCaseI {
            let time = TimePoint::symbolic(Ratio::from_integer(q.abs()), 0);
            return Ok(vec![eval(time, "qπ")]);
        }
        let periodic = TimePoint::symbolic(Ratio::from_integer(2 * p), self.l as i32).abs();
        // qπ + π/(√2)^k with k even: π·(q + 2^{−k/2}).
        let shift = Rational::new(1, 1i128 << (self.k / 2));
        let shifted = TimePoint::symbolic(Rational::from_integer(q) + shift, 0).abs();
        Ok(vec![
            eval(periodic, "2p·π/(√2)^l"),
            eval(shifted, "qπ + π/(√2)^k"),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_case_on_mixed_pair() {
        let spec = NepsSpec::p3(&[[1, 0], [1, 1]]).unwrap();
        let found = check_pgst_mixed(&spec, &TransferOptions::default()).unwrap();
        let (cert, w) = &found[0];
        assert_eq!(cert.kind, CertificateKind::PgstCaseI);
        assert_eq!(w.source.coords()[0], 0);
        assert_eq!(w.target.coords()[0], 2);
        assert_eq!(w.source.coords()[1], w.target.coords()[1]);
        assert!(w.fidelity >= 0.999);
        assert!(w.time.symbolic_form().unwrap().coefficient.numer().abs() <= 1_000_000);
    }

    #[test]
    fn second_case_on_three_paths() {
        let spec = NepsSpec::p3(&[[1, 1, 0], [1, 1, 1]]).unwrap();
        let found = check_pgst_mixed(&spec, &TransferOptions::default()).unwrap();
        let (cert, w) = found
            .iter()
            .find(|(c, _)| c.kind == CertificateKind::PgstCaseII)
            .unwrap();
        assert_eq!(cert.kind, CertificateKind::PgstCaseII);
        assert!(w.fidelity >= 0.999);
        assert_ne!(w.source, w.target);
    }

    #[test]
    fn uniform_parity_skipped() {
        let spec = NepsSpec::p3(&[[1, 0], [0, 1]]).unwrap();
        assert!(check_pgst_mixed(&spec, &TransferOptions::default())
            .unwrap()
            .is_empty());
    }
}
