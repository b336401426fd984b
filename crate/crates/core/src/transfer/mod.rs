//! State transfer classification: exact certificates, witness times and
//! the orchestration that assembles them into a report.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{Quad, QuadRat, Rational};
use crate::neps::{BasisSet, BitTuple, Factor, Vertex, DEFAULT_DENSE_LIMIT};
use crate::report::{ser_complex, ser_f17, ser_f17_opt};
use crate::spectral::EigenIndex;

mod certify;
mod classify;
pub mod kronecker;
mod pgst;
mod product;
mod pst;

pub use certify::{check_no_pst_mixed_parity, check_periodicity, support_ratio_test};
pub use classify::{classify, fidelity_sweep, search, FidelitySummary, TransferReport};
pub use kronecker::{kronecker_solve, KroneckerSolution};
pub use pgst::check_pgst_mixed;
pub use product::{analyze_product, check_pgst_product, split_factors, ProductSplit};
pub use pst::{check_pst_sufficient, find_pst_partner};

/// Fidelity a double-precision evaluation must reach to count as PST.
pub const PST_THRESHOLD: f64 = 1.0 - 1e-9;

/// `coefficient · π / (√2)^radical_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicTime {
    pub coefficient: Rational,
    pub radical_power: i32,
}

impl SymbolicTime {
    /// The exact value of `t/π`.
    pub fn over_pi(&self) -> Result<QuadRat> {
        let radical = QuadRat::sqrt2_pow(-self.radical_power)?;
        Ok(radical.checked_mul(&QuadRat::new(self.coefficient, Rational::zero()))?)
    }

    fn to_f64(&self) -> f64 {
        let k = self.radical_power;
        let mut scale = 2f64.powi(-k.div_euclid(2));
        if k.rem_euclid(2) == 1 {
            scale /= SQRT_2;
        }
        let c = self.coefficient.numer().to_f64().unwrap_or(f64::NAN)
            / self.coefficient.denom().to_f64().unwrap_or(f64::NAN);
        c * PI * scale
    }
}

impl fmt::Display for SymbolicTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.coefficient;
        if c.is_one() {
        } else if c.is_integer() {
            write!(f, "{}", c.numer())?;
        } else {
            write!(f, "({c})")?;
        }
        f.write_str("π")?;
        let k = self.radical_power;
        if k < 0 {
            return write!(f, "·(√2)^{}", -k);
        }
        let power = 1i128 << (k / 2);
        match (power, k % 2) {
            (1, 0) => Ok(()),
            (1, _) => f.write_str("/√2"),
            (p, 0) => write!(f, "/{p}"),
            (p, _) => write!(f, "/({p}√2)"),
        }
    }
}

/// A walk time, with its exact form when one is known.
#[derive(Clone, Debug, PartialEq)]
pub struct TimePoint {
    value: f64,
    symbolic: Option<SymbolicTime>,
}

impl TimePoint {
    /// `τ_k = π/(√2)^k`.
    pub fn tau(k: u32) -> Self {
        Self::symbolic(Rational::one(), k as i32)
    }

    /// `c·π/(√2)^k`, with factors of 2 moved out of an even numerator.
    pub fn symbolic(mut coefficient: Rational, mut radical_power: i32) -> Self {
        while radical_power >= 2 && coefficient.numer() % 2 == 0 && !coefficient.is_zero() {
            coefficient /= 2;
            radical_power -= 2;
        }
        let form = SymbolicTime {
            coefficient,
            radical_power,
        };
        TimePoint {
            value: form.to_f64(),
            symbolic: Some(form),
        }
    }

    pub fn numeric(value: f64) -> Self {
        TimePoint {
            value,
            symbolic: None,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn symbolic_form(&self) -> Option<&SymbolicTime> {
        self.symbolic.as_ref()
    }

    /// `m · t`, keeping the exact form.
    pub fn scaled(&self, m: i128) -> Result<TimePoint> {
        match &self.symbolic {
            Some(s) => {
                let c = s
                    .coefficient
                    .numer()
                    .checked_mul(m)
                    .map(|n| Rational::new(n, *s.coefficient.denom()))
                    .ok_or_else(|| Error::Internal("time coefficient overflow".into()))?;
                Ok(TimePoint::symbolic(c, s.radical_power))
            }
            None => Ok(TimePoint::numeric(self.value * m as f64)),
        }
    }

    /// The exact ratio `self / other`, when both carry exact forms.
    pub fn ratio(&self, other: &TimePoint) -> Option<Result<QuadRat>> {
        let (a, b) = (self.symbolic.as_ref()?, other.symbolic.as_ref()?);
        Some((|| Ok(a.over_pi()?.checked_div(&b.over_pi()?)?))())
    }

    fn abs(&self) -> TimePoint {
        match &self.symbolic {
            Some(s) => TimePoint::symbolic(s.coefficient.abs(), s.radical_power),
            None => TimePoint::numeric(self.value.abs()),
        }
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.symbolic {
            Some(s) => write!(f, "{s} ≈ {}", self.value),
            None => write!(f, "{}", self.value),
        }
    }
}

impl Serialize for TimePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct F17(f64);
        impl Serialize for F17 {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                ser_f17(&self.0, s)
            }
        }
        let mut st = s.serialize_struct("TimePoint", 4)?;
        st.serialize_field("value", &F17(self.value))?;
        let sym = self.symbolic.as_ref();
        st.serialize_field("expression", &sym.map(|x| x.to_string()))?;
        st.serialize_field("coefficient", &sym.map(|x| x.coefficient.to_string()))?;
        st.serialize_field("radical_power", &sym.map(|x| x.radical_power))?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessKind {
    #[serde(rename = "PST")]
    Pst,
    #[serde(rename = "PGST")]
    Pgst,
    #[serde(rename = "PERIODIC")]
    Periodic,
}

/// How a witness time was produced from a Diophantine approximation.
#[derive(Clone, Debug, Serialize)]
pub struct Derivation {
    pub method: String,
    pub theta: QuadRat,
    pub alpha: QuadRat,
    #[serde(serialize_with = "ser_f17")]
    pub delta: f64,
    pub p: i128,
    pub q: i128,
    /// `pθ − q − α` to 30 significant digits.
    pub residual: String,
}

/// `|⟨e_target, H(time) e_source⟩| = fidelity`, with the complex entry as `phase`.
#[derive(Clone, Debug, Serialize)]
pub struct TransferWitness {
    pub kind: WitnessKind,
    pub source: Vertex,
    pub target: Vertex,
    pub time: TimePoint,
    #[serde(serialize_with = "ser_f17")]
    pub fidelity: f64,
    #[serde(serialize_with = "ser_complex")]
    pub phase: Complex64,
    #[serde(serialize_with = "ser_f17_opt")]
    pub epsilon: Option<f64>,
    pub derivation: Option<Derivation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CertificateKind {
    #[serde(rename = "NO_PST_RATIO")]
    NoPstRatio,
    #[serde(rename = "PST_SUFFICIENT")]
    PstSufficient,
    #[serde(rename = "PGST_CASE_I")]
    PgstCaseI,
    #[serde(rename = "PGST_CASE_II")]
    PgstCaseII,
    #[serde(rename = "PERIODIC_AT")]
    PeriodicAt,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

/// The property a certificate speaks to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Topic {
    Pst,
    Pgst,
    Periodicity,
}

/// Four support eigenvalues whose difference ratio is irrational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatioQuadruple {
    pub lambda_k: Quad,
    pub lambda_l: Quad,
    pub lambda_r: Quad,
    pub lambda_s: Quad,
}

/// The explicit `a ± b√2`, `c + d√2` eigenvalue construction for mixed parity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixedParityConstruction {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
    /// Coordinate that carries the lowest-eigenvalue selector in the mixed index.
    pub coordinate: usize,
    pub index_low: EigenIndex,
    pub index_high: EigenIndex,
    pub index_mixed: EigenIndex,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    RatioViolation {
        /// Vertex whose support was examined; `None` when the eigenvalues
        /// lie in every support by construction.
        vertex: Option<Vertex>,
        /// Whether the violation rules out periodicity at every vertex.
        all_vertices: bool,
        eigenvalues: RatioQuadruple,
        numerator: Quad,
        denominator: Quad,
        ratio_rational: bool,
        construction: Option<MixedParityConstruction>,
    },
    PstSufficient {
        family: Factor,
        min_weight: Option<u32>,
        star: BasisSet,
        star_sum: BitTuple,
        rank: usize,
        connected: bool,
        time: TimePoint,
    },
    Pgst {
        k: u32,
        l: u32,
        star_sum: BitTuple,
        sub_basis: BasisSet,
        sub_pst_time: TimePoint,
        time_family: String,
        halvings: u32,
        #[serde(serialize_with = "ser_f17")]
        time_tolerance: f64,
        derivation: Derivation,
    },
    Periodic {
        time: TimePoint,
        #[serde(serialize_with = "ser_complex")]
        gamma: Complex64,
        #[serde(serialize_with = "ser_f17")]
        spectral_deviation: f64,
        #[serde(serialize_with = "ser_f17_opt")]
        matrix_deviation: Option<f64>,
    },
    Unknown {
        reason: String,
        guidance: Option<String>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub topic: Topic,
    pub evidence: Evidence,
}

impl Certificate {
    pub fn unknown(topic: Topic, reason: impl Into<String>, guidance: Option<String>) -> Self {
        Certificate {
            kind: CertificateKind::Unknown,
            topic,
            evidence: Evidence::Unknown {
                reason: reason.into(),
                guidance,
            },
        }
    }
}

/// Search bounds and tolerances shared by the classification routines.
#[derive(Clone, Debug)]
pub struct TransferOptions {
    pub epsilon: f64,
    /// Largest accepted |multiplier| in a PGST witness time.
    pub max_q: i128,
    /// Bound on the brute-force Diophantine scan.
    pub max_multiplier: i128,
    pub dense_limit: usize,
    /// Times the time tolerance is halved before giving up on one case.
    pub halvings: u32,
    /// Grid size for the sampled maximum fidelity in reports; 0 disables it.
    pub summary_samples: usize,
}

impl Default for TransferOptions {
    fn default() -> Self {
        TransferOptions {
            epsilon: 1e-3,
            max_q: 1_000_000,
            max_multiplier: 100_000_000,
            dense_limit: DEFAULT_DENSE_LIMIT,
            halvings: 12,
            summary_samples: 2048,
        }
    }
}

impl TransferOptions {
    pub fn with_epsilon(epsilon: f64) -> Self {
        TransferOptions {
            epsilon,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if self.max_q < 1 || self.max_multiplier < 1 {
            return Err(Error::InvalidArgument(
                "search bounds must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_values() {
        assert_eq!(TimePoint::tau(0).value(), PI);
        assert!((TimePoint::tau(1).value() - PI / SQRT_2).abs() < 1e-15);
        assert!((TimePoint::tau(2).value() - PI / 2.0).abs() < 1e-15);
        assert!((TimePoint::tau(3).value() - PI / (2.0 * SQRT_2)).abs() < 1e-15);
        assert_eq!(
            TimePoint::tau(1).symbolic_form().unwrap().to_string(),
            "π/√2"
        );
        let t = TimePoint::symbolic(Rational::new(2, 1), 1);
        assert_eq!(t.symbolic_form().unwrap().to_string(), "2π/√2");
        assert_eq!(TimePoint::tau(2).to_string().split(' ').next(), Some("π/2"));
        assert_eq!(
            TimePoint::tau(3).symbolic_form().unwrap().to_string(),
            "π/(2√2)"
        );
        let t = TimePoint::symbolic(Rational::new(4756, 1), 3);
        assert_eq!(t.symbolic_form().unwrap().to_string(), "2378π/√2");
        assert!((t.value() - 2378.0 * PI / SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn exact_ratio() {
        let tau = TimePoint::tau(0);
        let eta = TimePoint::tau(1);
        let r = tau.ratio(&eta).unwrap().unwrap();
        assert_eq!(r, "0+1√2".parse().unwrap());
        assert!(!r.is_rational());
        let twice = eta.scaled(2).unwrap();
        assert_eq!(twice.ratio(&eta).unwrap().unwrap(), QuadRat::integer(2));
    }

    #[test]
    fn time_json() {
        let v = serde_json::to_value(TimePoint::tau(1)).unwrap();
        assert_eq!(v["expression"], "π/√2");
        assert_eq!(v["radical_power"], 1);
        let n = serde_json::to_value(TimePoint::numeric(0.5)).unwrap();
        assert!(n["expression"].is_null());
    }
}
