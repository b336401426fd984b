//! Inhomogeneous Diophantine approximation: integers `p, q` with
//! `|pθ − q − α| < δ` for irrational `θ ∈ Q(√2)`.
//!
//! The main path walks the continued-fraction convergents `h_n/k_n` of `θ`
//! and greedily cancels the remainder with multiples of `k_nθ − h_n`
//! (an Ostrowski-style expansion). A bounded linear scan serves as fallback
//! and as an independent check. Every answer is re-verified in fixed-point
//! arithmetic with 60 decimal places.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Float, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{ArithError, QuadRat};

/// Decimal places carried by the fixed-point verifier.
pub const VERIFY_DIGITS: u32 = 60;

const MAX_STEPS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ContinuedFraction,
    BruteForce,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ContinuedFraction => "continued_fraction",
            Method::BruteForce => "brute_force",
        }
    }
}

#[derive(Clone, Debug)]
pub struct KroneckerSolution {
    pub p: i128,
    pub q: i128,
    /// `pθ − q − α` rounded to double precision.
    pub residual: f64,
    /// The same residual to 30 significant digits.
    pub residual_digits: String,
    pub method: Method,
}

fn check_inputs(theta: &QuadRat, delta: f64) -> Result<()> {
    if theta.is_rational() {
        return Err(Error::InvalidArgument(format!(
            "θ = {theta} is rational; the approximation needs an irrational θ"
        )));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "δ must be positive and finite, got {delta}"
        )));
    }
    Ok(())
}

/// `pθ − q − α`, exactly.
pub fn residual(theta: &QuadRat, alpha: &QuadRat, p: i128, q: i128) -> Result<QuadRat, ArithError> {
    theta
        .checked_scale(p)?
        .checked_sub(&QuadRat::integer(q))?
        .checked_sub(alpha)
}

fn nearest_q(theta: &QuadRat, alpha: &QuadRat, p: i128) -> Result<i128, ArithError> {
    theta.checked_scale(p)?.checked_sub(alpha)?.round()
}

/// Solves `|pθ − q − α| < δ` with `p ≠ 0` and `|p| ≤ max_multiplier`.
///
/// Tries the convergent expansion first and falls back to scanning
/// `p = 1..=max_multiplier`.
pub fn kronecker_solve(
    theta: &QuadRat,
    alpha: &QuadRat,
    delta: f64,
    max_multiplier: i128,
) -> Result<KroneckerSolution> {
    check_inputs(theta, delta)?;
    let found = match continued_fraction_solve(theta, alpha, delta, max_multiplier) {
        Ok(Some(pq)) => Some((pq, Method::ContinuedFraction)),
        Ok(None) | Err(Error::Arith(_)) => None,
        Err(e) => return Err(e),
    };
    let found = match found {
        Some(f) => Some(f),
        None => brute_force_solve(theta, alpha, delta, max_multiplier)?
            .map(|pq| (pq, Method::BruteForce)),
    };
    let ((p, q), method) = found.ok_or_else(|| {
        Error::SearchBound(format!(
            "no |p| ≤ {max_multiplier} with |p·({theta}) − q − ({alpha})| < {delta:e}; \
             relax δ or raise the multiplier bound"
        ))
    })?;
    let r = residual(theta, alpha, p, q)?;
    Ok(KroneckerSolution {
        p,
        q,
        residual: r.to_f64(),
        residual_digits: decimal_digits(&r, 30),
        method,
    })
}

/// Convergent-based search. `Ok(None)` when the multiplier bound is hit.
pub fn continued_fraction_solve(
    theta: &QuadRat,
    alpha: &QuadRat,
    delta: f64,
    max_multiplier: i128,
) -> Result<Option<(i128, i128)>> {
    check_inputs(theta, delta)?;
    let ovf = || ArithError::Overflow("continued fraction");
    let mut r = alpha.checked_sub(&QuadRat::integer(alpha.round()?))?;
    let mut p: i128 = 0;
    let mut x = theta.clone();
    let (mut h_prev2, mut h_prev) = (0i128, 1i128);
    let (mut k_prev2, mut k_prev) = (1i128, 0i128);
    for _ in 0..MAX_STEPS {
        if p != 0 && r.to_f64().abs() < delta {
            let q = nearest_q(theta, alpha, p)?;
            if verify_inequality(theta, alpha, delta, p, q)? {
                return Ok(Some((p, q)));
            }
        }
        let a = x.floor()?;
        let h = a
            .checked_mul(h_prev)
            .and_then(|v| v.checked_add(h_prev2))
            .ok_or_else(ovf)?;
        let k = a
            .checked_mul(k_prev)
            .and_then(|v| v.checked_add(k_prev2))
            .ok_or_else(ovf)?;
        // D = kθ − h, alternating in sign and shrinking in size.
        let d = theta.checked_scale(k)?.checked_sub(&QuadRat::integer(h))?;
        if !d.is_zero() {
            let df = d.to_f64().abs();
            if p == 0 && r.to_f64().abs() + df < delta {
                p = k;
                r = r.checked_sub(&d)?;
            } else {
                let c = r.checked_div(&d)?.round()?;
                if c != 0 {
                    r = r.checked_sub(&d.checked_scale(c)?)?;
                    p = c
                        .checked_mul(k)
                        .and_then(|ck| ck.checked_add(p))
                        .ok_or_else(ovf)?;
                }
            }
        }
        if p.abs() > max_multiplier {
            return Ok(None);
        }
        (h_prev2, h_prev) = (h_prev, h);
        (k_prev2, k_prev) = (k_prev, k);
        x = x.checked_sub(&QuadRat::integer(a))?.checked_recip()?;
    }
    Ok(None)
}

/// Scans `p = 1..=p_max`, taking the nearest `q` for each.
pub fn brute_force_solve(
    theta: &QuadRat,
    alpha: &QuadRat,
    delta: f64,
    p_max: i128,
) -> Result<Option<(i128, i128)>> {
    check_inputs(theta, delta)?;
    let (tf, af) = (theta.to_f64(), alpha.to_f64());
    for p in 1..=p_max {
        let x = p as f64 * tf - af;
        let q = x.round();
        let slack = 1e-15 * (p as f64 * tf.abs() + af.abs() + 1.0);
        if (x - q).abs() < delta + slack {
            let q = q as i128;
            if verify_inequality(theta, alpha, delta, p, q)? {
                return Ok(Some((p, q)));
            }
        }
    }
    Ok(None)
}

fn scale() -> &'static (BigInt, BigInt) {
    static SCALE: OnceLock<(BigInt, BigInt)> = OnceLock::new();
    SCALE.get_or_init(|| {
        let s = BigInt::from(10u32).pow(VERIFY_DIGITS);
        let sqrt2 = (&s * &s * 2u32).sqrt();
        (s, sqrt2)
    })
}

/// Fixed-point image of `x` in units of `10⁻⁶⁰` together with a bound on its
/// absolute error in the same units.
fn fixed_point(x: &QuadRat) -> (BigInt, BigInt) {
    let (s, sqrt2) = scale();
    let (an, ad) = (BigInt::from(*x.a().numer()), BigInt::from(*x.a().denom()));
    let (bn, bd) = (BigInt::from(*x.b().numer()), BigInt::from(*x.b().denom()));
    let value = an * s / &ad + &bn * sqrt2 / &bd;
    let error = bn.abs() / bd + 3u32;
    (value, error)
}

fn fixed_delta(delta: f64) -> BigInt {
    let (s, _) = scale();
    let (mantissa, exp, _) = delta.integer_decode();
    let m = BigInt::from(mantissa) * s;
    if exp >= 0 {
        m << exp as usize
    } else {
        m >> (-exp) as usize
    }
}

/// Checks `|pθ − q − α| < δ` in 60-digit fixed point with a rigorous error
/// bound; returns false when the margin is too thin to decide.
pub fn verify_inequality(
    theta: &QuadRat,
    alpha: &QuadRat,
    delta: f64,
    p: i128,
    q: i128,
) -> Result<bool> {
    let r = residual(theta, alpha, p, q)?;
    let (value, error) = fixed_point(&r);
    Ok(value.abs() + error < fixed_delta(delta))
}

/// `x` in scientific notation with `digits` significant digits, read from the
/// 60-place fixed-point image.
pub fn decimal_digits(x: &QuadRat, digits: usize) -> String {
    let (value, _) = fixed_point(x);
    if value.is_zero() {
        return "0".into();
    }
    let sign = if value.is_negative() { "-" } else { "" };
    let text = value.abs().to_string();
    let exponent = text.len() as i64 - 1 - i64::from(VERIFY_DIGITS);
    let kept = &text[..text.len().min(digits)];
    let (lead, rest) = kept.split_at(1);
    let rest = rest.trim_end_matches('0');
    if rest.is_empty() {
        format!("{sign}{lead}e{exponent}")
    } else {
        format!("{sign}{lead}.{rest}e{exponent}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuadRat {
        s.parse().unwrap()
    }

    #[test]
    fn homogeneous_half() {
        let (p, qq) = continued_fraction_solve(&q("0+1√2"), &QuadRat::zero(), 0.5, 1000)
            .unwrap()
            .unwrap();
        assert_eq!((p, qq), (1, 1));
    }

    #[test]
    fn sqrt2_half_offset() {
        let theta = q("0+1√2");
        let alpha = QuadRat::rational(1, 2);
        let sol = kronecker_solve(&theta, &alpha, 1e-3, 100_000_000).unwrap();
        assert_eq!(sol.method, Method::ContinuedFraction);
        let x = sol.p as f64 * std::f64::consts::SQRT_2 - sol.q as f64 - 0.5;
        assert!(x.abs() < 1e-3);
        assert!(verify_inequality(&theta, &alpha, 1e-3, sol.p, sol.q).unwrap());
    }

    #[test]
    fn irrational_offset() {
        let theta = q("0+1√2");
        let alpha = q("0+1/2√2");
        let sol = kronecker_solve(&theta, &alpha, 1e-4, 100_000_000).unwrap();
        assert!(sol.residual.abs() < 1e-4);
        let brute = brute_force_solve(&theta, &alpha, 1e-4, 1_000_000).unwrap();
        assert!(brute.is_some());
    }

    #[test]
    fn rational_theta_rejected() {
        let err = kronecker_solve(&QuadRat::rational(1, 3), &QuadRat::zero(), 1e-3, 10);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn bound_exhaustion_reported() {
        let err = kronecker_solve(&q("0+1√2"), &QuadRat::rational(1, 2), 1e-9, 10);
        assert!(matches!(err, Err(Error::SearchBound(_))));
    }

    #[test]
    fn verifier_rejects_near_miss() {
        // 1·√2 − 1 ≈ 0.41421356…; δ just below and just above.
        let theta = q("0+1√2");
        assert!(!verify_inequality(&theta, &QuadRat::zero(), 0.4142135, 1, 1).unwrap());
        assert!(verify_inequality(&theta, &QuadRat::zero(), 0.4142136, 1, 1).unwrap());
    }

    #[test]
    fn digits_rendering() {
        let r = q("-1+1√2");
        assert_eq!(decimal_digits(&r, 30), "4.14213562373095048801688724209e-1");
        assert_eq!(decimal_digits(&QuadRat::rational(-1, 8), 5), "-1.25e-1");
        assert_eq!(decimal_digits(&QuadRat::zero(), 5), "0");
    }
}
