use num_complex::Complex64;

use super::PST_THRESHOLD;
use super::{
    Certificate, CertificateKind, Evidence, TimePoint, Topic, TransferWitness, WitnessKind,
};
use crate::error::{Error, Result};
use crate::neps::{gf2_rank, parity_profile, Factor, NepsSpec};
use crate::spectral::TensorEigenbasis;

/// First pair `u ≠ v` (in index order) with `|H(t)_{uv}| ≥ 1 − 1e−9`.
pub fn find_pst_partner(basis: &TensorEigenbasis, t: f64) -> Option<(usize, usize, Complex64)> {
    (0..basis.len()).find_map(|u| {
        basis
            .transfer_row(u, t)
            .into_iter()
            .enumerate()
            .find(|&(v, h)| v != u && h.norm() >= PST_THRESHOLD)
            .map(|(v, h)| (u, v, h))
    })
}

/// PST for uniform-parity NEPS of P3 at `τ_k`, and for NEPS of P2 at `π/2`,
/// whenever the relevant sum of basis vectors is nonzero in `Z₂ⁿ`.
///
/// For P3 factors the sum runs over the minimum-weight vectors only; for P2
/// factors over all of `Ω`, since `H(π/2) = (−i)^|Ω| X^{Σβ}` there. The
/// partner vertex is found by scanning rows of `H` at the predicted time.
pub fn check_pst_sufficient(spec: &NepsSpec) -> Result<Option<(Certificate, TransferWitness)>> {
    let omega = spec.omega();
    let profile = parity_profile(omega);
    let (family, min_weight, star, star_sum, time) = if spec.all(Factor::P3) {
        let Some((k, star, sum)) = profile.uniform_star() else {
            return Ok(None);
        };
        (Factor::P3, Some(k), star.clone(), sum, TimePoint::tau(k))
    } else if spec.all(Factor::P2) {
        (
            Factor::P2,
            None,
            omega.clone(),
            omega.sum(),
            TimePoint::tau(2),
        )
    } else {
        return Ok(None);
    };
    if star_sum.is_zero() {
        return Ok(None);
    }
    let basis = TensorEigenbasis::new(spec)?;
    let (u, v, phase) = find_pst_partner(&basis, time.value()).ok_or_else(|| {
        Error::Internal(format!("no vertex pair reaches PST at {time} on {spec}"))
    })?;
    let rank = gf2_rank(omega);
    let certificate = Certificate {
        kind: CertificateKind::PstSufficient,
        topic: Topic::Pst,
        evidence: Evidence::PstSufficient {
            family,
            min_weight,
            star,
            star_sum,
            rank,
            connected: rank == spec.dim(),
            time: time.clone(),
        },
    };
    let witness = TransferWitness {
        kind: WitnessKind::Pst,
        source: spec.vertex(u),
        target: spec.vertex(v),
        time,
        fidelity: phase.norm(),
        phase,
        epsilon: None,
        derivation: None,
    };
    Ok(Some((certificate, witness)))
}
