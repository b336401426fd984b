use rayon::prelude::*;
use serde::Serialize;

use super::product::{product_witnesses, split_factors, ProductSplit};
use super::{
    check_no_pst_mixed_parity, check_periodicity, check_pgst_mixed, check_pst_sufficient,
    Certificate, CertificateKind, Evidence, Topic, TransferOptions, TransferWitness, WitnessKind,
};
use crate::error::{Error, Result};
use crate::neps::{gf2_rank, parity_profile, Factor, NepsSpec, ParityProfile, Vertex};
use crate::report::ser_f17;
use crate::spectral::TensorEigenbasis;

const SEARCH_GUIDANCE: &str = "raise --max-q or relax --epsilon";

/// Sampled maximum of the fidelity between one witness pair on `[0, t_max]`.
#[derive(Clone, Debug, Serialize)]
pub struct FidelitySummary {
    pub source: Vertex,
    pub target: Vertex,
    #[serde(serialize_with = "ser_f17")]
    pub t_max: f64,
    pub samples: usize,
    #[serde(serialize_with = "ser_f17")]
    pub max_fidelity: f64,
    #[serde(serialize_with = "ser_f17")]
    pub argmax: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferReport {
    pub spec: NepsSpec,
    pub connected: bool,
    pub rank: usize,
    pub parity_profile: ParityProfile,
    #[serde(serialize_with = "ser_f17")]
    pub epsilon: f64,
    pub certificates: Vec<Certificate>,
    pub witnesses: Vec<TransferWitness>,
    pub fidelity_summary: Option<FidelitySummary>,
    pub notes: Vec<String>,
    /// Set when a witness search ran out of its bounds.
    pub search_exhausted: bool,
}

impl TransferReport {
    pub fn certificate(&self, kind: CertificateKind) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.kind == kind)
    }

    pub fn has_certificate(&self, kind: CertificateKind) -> bool {
        self.certificate(kind).is_some()
    }

    pub fn witnesses_of(&self, kind: WitnessKind) -> impl Iterator<Item = &TransferWitness> {
        self.witnesses.iter().filter(move |w| w.kind == kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Classifies PST, PGST and periodicity for one NEPS.
///
/// Runs, in order: the PST sufficient condition, the mixed-parity no-PST
/// certificate, the mixed-parity PGST search, periodicity, and for mixed
/// P2/P3 factor lists that split into a product, the product PGST route.
pub fn classify(spec: &NepsSpec, opts: &TransferOptions) -> Result<TransferReport> {
    let split = if spec.all(Factor::P3) || spec.all(Factor::P2) {
        None
    } else {
        split_factors(spec)
    };
    classify_parts(spec, split.as_ref(), opts, true)
}

/// Only the PGST searches: mixed parity and product routes.
pub fn search(spec: &NepsSpec, opts: &TransferOptions) -> Result<TransferReport> {
    let split = split_factors(spec);
    classify_parts(spec, split.as_ref(), opts, false)
}

pub(crate) fn classify_parts(
    spec: &NepsSpec,
    split: Option<&ProductSplit>,
    opts: &TransferOptions,
    full: bool,
) -> Result<TransferReport> {
    opts.validate()?;
    let rank = gf2_rank(spec.omega());
    let connected = rank == spec.dim();
    let profile = parity_profile(spec.omega());
    let mut report = TransferReport {
        spec: spec.clone(),
        connected,
        rank,
        parity_profile: profile.clone(),
        epsilon: opts.epsilon,
        certificates: Vec::new(),
        witnesses: Vec::new(),
        fidelity_summary: None,
        notes: Vec::new(),
        search_exhausted: false,
    };
    if !connected {
        report.notes.push(format!(
            "basis rank {rank} is below the factor count {}: the graph is disconnected",
            spec.dim()
        ));
    }

    if full {
        match check_pst_sufficient(spec)? {
            Some((certificate, witness)) => {
                report.certificates.push(certificate);
                report.witnesses.push(witness);
            }
            None => {
                if let Some(reason) = open_case(spec, &profile) {
                    report.certificates.push(Certificate::unknown(
                        Topic::Pst,
                        reason,
                        Some("the walk is periodic, so PGST here would already be PST".into()),
                    ));
                }
            }
        }
        if let Some(certificate) = check_no_pst_mixed_parity(spec)? {
            report.certificates.push(certificate);
        }
    }

    match check_pgst_mixed(spec, opts) {
        Ok(found) if !found.is_empty() => {
            for (certificate, witness) in found {
                report.certificates.push(certificate);
                report.witnesses.push(witness);
            }
        }
        Ok(_) => {
            if spec.all(Factor::P3) && profile.is_mixed() {
                report.certificates.push(Certificate::unknown(
                    Topic::Pgst,
                    "both minimum-weight sums vanish, so neither PGST construction applies",
                    None,
                ));
            }
        }
        Err(Error::SearchBound(msg)) => {
            report.search_exhausted = true;
            report.certificates.push(Certificate::unknown(
                Topic::Pgst,
                msg,
                Some(SEARCH_GUIDANCE.into()),
            ));
        }
        Err(e) => return Err(e),
    }

    if full {
        report.certificates.push(check_periodicity(spec, opts)?);
    }

    if let Some(split) = split {
        let (witnesses, exhausted) = product_witnesses(split, opts, &mut report.notes)?;
        report.witnesses.extend(witnesses);
        if let Some(msg) = exhausted {
            report.search_exhausted = true;
            report.certificates.push(Certificate::unknown(
                Topic::Pgst,
                msg,
                Some(SEARCH_GUIDANCE.into()),
            ));
        }
    }

    check_consistency(&report)?;
    if full && opts.summary_samples >= 2 {
        report.fidelity_summary = summarize(spec, &report.witnesses, opts.summary_samples)?;
    }
    Ok(report)
}

fn open_case(spec: &NepsSpec, profile: &ParityProfile) -> Option<String> {
    if spec.all(Factor::P3) {
        let (_, _, sum) = profile.uniform_star()?;
        sum.is_zero().then(|| {
            "uniform parity with the minimum-weight vectors summing to 0 in Z₂ⁿ: \
             PST is an open case"
                .to_string()
        })
    } else if spec.all(Factor::P2) {
        spec.omega().sum().is_zero().then(|| {
            "the basis vectors sum to 0 in Z₂ⁿ, so the walk returns at π/2 without transfer"
                .to_string()
        })
    } else {
        None
    }
}

/// A PST witness next to a certificate excluding periodicity at every vertex
/// would mean one of the two computations is wrong.
fn check_consistency(report: &TransferReport) -> Result<()> {
    let global_no_pst = report.certificates.iter().any(|c| {
        matches!(
            c.evidence,
            Evidence::RatioViolation {
                all_vertices: true,
                ..
            }
        )
    });
    if global_no_pst && report.witnesses_of(WitnessKind::Pst).next().is_some() {
        return Err(Error::Internal(format!(
            "{} has both a PST witness and a certificate excluding PST",
            report.spec
        )));
    }
    Ok(())
}

fn summarize(
    spec: &NepsSpec,
    witnesses: &[TransferWitness],
    samples: usize,
) -> Result<Option<FidelitySummary>> {
    let Some(w) = witnesses.first() else {
        return Ok(None);
    };
    let t_max = w.time.value();
    let series = fidelity_sweep(spec, &w.source, &w.target, t_max, samples)?;
    let (argmax, max_fidelity) =
        series
            .iter()
            .copied()
            .fold((0.0, f64::NEG_INFINITY), |best, s| {
                if s.1 > best.1 {
                    s
                } else {
                    best
                }
            });
    Ok(Some(FidelitySummary {
        source: w.source.clone(),
        target: w.target.clone(),
        t_max,
        samples,
        max_fidelity,
        argmax,
    }))
}

/// `|H(t)_{uv}|` on `samples` evenly spaced times covering `[0, t_max]`.
///
/// Samples are evaluated in parallel; order and values do not depend on the
/// thread count.
pub fn fidelity_sweep(
    spec: &NepsSpec,
    u: &Vertex,
    v: &Vertex,
    t_max: f64,
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "samples must be at least 2, got {samples}"
        )));
    }
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_max must be finite and ≥ 0, got {t_max}"
        )));
    }
    let kernel =
        TensorEigenbasis::new(spec)?.kernel(spec.vertex_index(u)?, spec.vertex_index(v)?)?;
    let last = (samples - 1) as f64;
    Ok((0..samples)
        .into_par_iter()
        .map(|i| {
            let t = t_max * i as f64 / last;
            (t, kernel.fidelity(t))
        })
        .collect())
}
