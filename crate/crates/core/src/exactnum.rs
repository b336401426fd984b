//! Exact arithmetic in `Z[√2]` and its fraction field `Q(√2)`.
//!
//! Every eigenvalue and eigenvector entry of a NEPS built from `P2` and `P3`
//! lives in `Z[√2]`, so certificates can be checked without rounding. All
//! operations are checked: an overflowing coefficient is an error (or a
//! panic with a diagnostic for the operator impls), never a silent wrap.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("coefficient overflow in Z[√2] arithmetic ({0})")]
    Overflow(&'static str),
    #[error("division by zero in Q(√2)")]
    DivisionByZero,
    #[error("cannot parse {input:?} as a+b√2: {reason}")]
    Parse { input: String, reason: &'static str },
}

fn ovf(op: &'static str) -> ArithError {
    ArithError::Overflow(op)
}

/// The element `a + b√2` of `Z[√2]`.
///
/// `√2` is irrational, so `(a, b)` is the canonical representation and the
/// derived `Eq`/`Hash` coincide with equality of real values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Quad {
    a: i128,
    b: i128,
}

impl Quad {
    pub const ZERO: Quad = Quad { a: 0, b: 0 };
    pub const ONE: Quad = Quad { a: 1, b: 0 };
    pub const SQRT2: Quad = Quad { a: 0, b: 1 };

    pub const fn new(a: i128, b: i128) -> Self {
        Quad { a, b }
    }

    pub const fn integer(a: i128) -> Self {
        Quad { a, b: 0 }
    }

    /// Rational coefficient.
    pub const fn a(&self) -> i128 {
        self.a
    }

    /// Coefficient of `√2`.
    pub const fn b(&self) -> i128 {
        self.b
    }

    pub const fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn checked_add(self, rhs: Quad) -> Result<Quad, ArithError> {
        Ok(Quad {
            a: self.a.checked_add(rhs.a).ok_or(ovf("add"))?,
            b: self.b.checked_add(rhs.b).ok_or(ovf("add"))?,
        })
    }

    pub fn checked_sub(self, rhs: Quad) -> Result<Quad, ArithError> {
        Ok(Quad {
            a: self.a.checked_sub(rhs.a).ok_or(ovf("sub"))?,
            b: self.b.checked_sub(rhs.b).ok_or(ovf("sub"))?,
        })
    }

    pub fn checked_neg(self) -> Result<Quad, ArithError> {
        Ok(Quad {
            a: self.a.checked_neg().ok_or(ovf("neg"))?,
            b: self.b.checked_neg().ok_or(ovf("neg"))?,
        })
    }

    /// `(a + b√2)(c + d√2) = (ac + 2bd) + (ad + bc)√2`.
    pub fn checked_mul(self, rhs: Quad) -> Result<Quad, ArithError> {
        let m = |x: i128, y: i128| x.checked_mul(y).ok_or(ovf("mul"));
        let bd2 = m(m(self.b, rhs.b)?, 2)?;
        Ok(Quad {
            a: m(self.a, rhs.a)?.checked_add(bd2).ok_or(ovf("mul"))?,
            b: m(self.a, rhs.b)?
                .checked_add(m(self.b, rhs.a)?)
                .ok_or(ovf("mul"))?,
        })
    }

    pub fn checked_scale(self, k: i128) -> Result<Quad, ArithError> {
        Ok(Quad {
            a: self.a.checked_mul(k).ok_or(ovf("scale"))?,
            b: self.b.checked_mul(k).ok_or(ovf("scale"))?,
        })
    }

    pub fn checked_pow(self, exp: u32) -> Result<Quad, ArithError> {
        let mut acc = Quad::ONE;
        for _ in 0..exp {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// `√2 ↦ −√2`.
    pub fn conjugate(self) -> Quad {
        Quad {
            a: self.a,
            b: -self.b,
        }
    }

    /// Field norm `a² − 2b²`.
    pub fn norm(self) -> Result<i128, ArithError> {
        let a2 = self.a.checked_mul(self.a).ok_or(ovf("norm"))?;
        let b2 = self
            .b
            .checked_mul(self.b)
            .and_then(|x| x.checked_mul(2))
            .ok_or(ovf("norm"))?;
        a2.checked_sub(b2).ok_or(ovf("norm"))
    }

    /// Sign of the real number `a + b√2`, decided exactly.
    pub fn checked_signum(self) -> Result<Ordering, ArithError> {
        let Quad { a, b } = self;
        Ok(match (a.signum(), b.signum()) {
            (0, 0) => Ordering::Equal,
            (sa, sb) if sa >= 0 && sb >= 0 => Ordering::Greater,
            (sa, sb) if sa <= 0 && sb <= 0 => Ordering::Less,
            (sa, _) => {
                // Opposite signs: the term with the larger square wins.
                let a2 = a.checked_mul(a).ok_or(ovf("compare"))?;
                let b2 = b
                    .checked_mul(b)
                    .and_then(|x| x.checked_mul(2))
                    .ok_or(ovf("compare"))?;
                let a_dominates = a2.cmp(&b2);
                debug_assert_ne!(
                    a_dominates,
                    Ordering::Equal,
                    "a² = 2b² has no nonzero solution"
                );
                if (a_dominates == Ordering::Greater) == (sa > 0) {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        })
    }

    pub fn checked_cmp(self, other: Quad) -> Result<Ordering, ArithError> {
        self.checked_sub(other)?.checked_signum()
    }

    /// `a + b·√2` in double precision.
    pub fn to_f64(self) -> f64 {
        self.a as f64 + self.b as f64 * std::f64::consts::SQRT_2
    }

    /// ASCII rendering `a+b*sqrt2`.
    pub fn to_ascii(self) -> String {
        format!("{}{:+}*sqrt2", self.a, self.b)
    }
}

impl From<i128> for Quad {
    fn from(a: i128) -> Self {
        Quad::integer(a)
    }
}

/// Total order of the real embedding, computed exactly.
///
/// # Panics
///
/// If squaring a coefficient overflows `i128`.
pub fn compare(x: Quad, y: Quad) -> Ordering {
    x.checked_cmp(y)
        .unwrap_or_else(|e| panic!("comparing {x} with {y}: {e}"))
}

impl Ord for Quad {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(*self, *other)
    }
}

impl PartialOrd for Quad {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! panicking_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for Quad {
            type Output = Quad;

            fn $method(self, rhs: Quad) -> Quad {
                self.$checked(rhs)
                    .unwrap_or_else(|e| panic!("{self} {} {rhs}: {e}", stringify!($method)))
            }
        }
    };
}

panicking_op!(Add, add, checked_add);
panicking_op!(Sub, sub, checked_sub);
panicking_op!(Mul, mul, checked_mul);

impl Neg for Quad {
    type Output = Quad;

    fn neg(self) -> Quad {
        self.checked_neg()
            .unwrap_or_else(|e| panic!("negating {self}: {e}"))
    }
}

/// Whether `d1 / d2` is rational.
///
/// Rationalizing the denominator shows the quotient is rational exactly when
/// `d1.a·d2.b = d1.b·d2.a`.
pub fn ratio_is_rational(d1: Quad, d2: Quad) -> Result<bool, ArithError> {
    if d2.is_zero() {
        return Err(ArithError::DivisionByZero);
    }
    let lhs = d1.a.checked_mul(d2.b).ok_or(ovf("ratio"))?;
    let rhs = d1.b.checked_mul(d2.a).ok_or(ovf("ratio"))?;
    Ok(lhs == rhs)
}

impl fmt::Display for Quad {
    /// `a+b√2`, always with both coefficients and an explicit sign on `b`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}√2", self.a, self.b)
    }
}

/// Splits `"<a><sign><b><suffix>"` into its two coefficient strings.
fn split_surd(input: &str) -> Option<(&str, &str)> {
    let body = input
        .strip_suffix("√2")
        .or_else(|| input.strip_suffix("*sqrt2"))
        .or_else(|| input.strip_suffix("sqrt2"))?;
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && body.as_bytes()[i - 1] != b'/')
        .map(|(i, _)| i)
        .last()?;
    let (a, b) = body.split_at(split);
    let b = b.strip_prefix('+').unwrap_or(b);
    Some((a, b))
}

impl FromStr for Quad {
    type Err = ArithError;

    /// Accepts `a+b√2`, `a-b√2`, `a+b*sqrt2` and bare integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let input: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |reason| ArithError::Parse {
            input: s.to_string(),
            reason,
        };
        if let Ok(a) = input.parse::<i128>() {
            return Ok(Quad::integer(a));
        }
        let (a, b) = split_surd(&input).ok_or_else(|| bad("expected a+b√2"))?;
        Ok(Quad {
            a: a.parse()
                .map_err(|_| bad("rational part is not an integer"))?,
            b: b.parse()
                .map_err(|_| bad("√2 coefficient is not an integer"))?,
        })
    }
}

pub type Rational = Ratio<i128>;

/// The element `a + b√2` of `Q(√2)` with reduced rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadRat {
    a: Rational,
    b: Rational,
}

impl QuadRat {
    pub fn new(a: Rational, b: Rational) -> Self {
        QuadRat { a, b }
    }

    pub fn zero() -> Self {
        QuadRat::from(Quad::ZERO)
    }

    pub fn integer(a: i128) -> Self {
        QuadRat::from(Quad::integer(a))
    }

    pub fn rational(num: i128, den: i128) -> Self {
        QuadRat {
            a: Rational::new(num, den),
            b: Rational::zero(),
        }
    }

    /// `(√2)^k` for any integer `k`.
    pub fn sqrt2_pow(k: i32) -> Result<Self, ArithError> {
        let half = k.div_euclid(2);
        let odd = k.rem_euclid(2) == 1;
        let power = 1i128
            .checked_shl(half.unsigned_abs())
            .filter(|_| half.unsigned_abs() < 126)
            .ok_or(ovf("sqrt2_pow"))?;
        let scale = if half >= 0 {
            Rational::from_integer(power)
        } else {
            Rational::new(1, power)
        };
        Ok(if odd {
            QuadRat {
                a: Rational::zero(),
                b: scale,
            }
        } else {
            QuadRat {
                a: scale,
                b: Rational::zero(),
            }
        })
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn checked_add(&self, rhs: &QuadRat) -> Result<QuadRat, ArithError> {
        Ok(QuadRat {
            a: self.a.checked_add(&rhs.a).ok_or(ovf("add"))?,
            b: self.b.checked_add(&rhs.b).ok_or(ovf("add"))?,
        })
    }

    pub fn checked_sub(&self, rhs: &QuadRat) -> Result<QuadRat, ArithError> {
        Ok(QuadRat {
            a: self.a.checked_sub(&rhs.a).ok_or(ovf("sub"))?,
            b: self.b.checked_sub(&rhs.b).ok_or(ovf("sub"))?,
        })
    }

    pub fn checked_mul(&self, rhs: &QuadRat) -> Result<QuadRat, ArithError> {
        let m = |x: &Rational, y: &Rational| x.checked_mul(y).ok_or(ovf("mul"));
        let two = Rational::from_integer(2);
        let bd2 = m(&m(&self.b, &rhs.b)?, &two)?;
        Ok(QuadRat {
            a: m(&self.a, &rhs.a)?.checked_add(&bd2).ok_or(ovf("mul"))?,
            b: m(&self.a, &rhs.b)?
                .checked_add(&m(&self.b, &rhs.a)?)
                .ok_or(ovf("mul"))?,
        })
    }

    pub fn checked_scale(&self, k: i128) -> Result<QuadRat, ArithError> {
        let k = Rational::from_integer(k);
        Ok(QuadRat {
            a: self.a.checked_mul(&k).ok_or(ovf("scale"))?,
            b: self.b.checked_mul(&k).ok_or(ovf("scale"))?,
        })
    }

    pub fn checked_recip(&self) -> Result<QuadRat, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let norm = self.norm()?;
        Ok(QuadRat {
            a: self.a.checked_div(&norm).ok_or(ovf("recip"))?,
            b: (-self.b).checked_div(&norm).ok_or(ovf("recip"))?,
        })
    }

    pub fn checked_div(&self, rhs: &QuadRat) -> Result<QuadRat, ArithError> {
        self.checked_mul(&rhs.checked_recip()?)
    }

    pub fn norm(&self) -> Result<Rational, ArithError> {
        let a2 = self.a.checked_mul(&self.a).ok_or(ovf("norm"))?;
        let b2 = self
            .b
            .checked_mul(&self.b)
            .and_then(|x| x.checked_mul(&Rational::from_integer(2)))
            .ok_or(ovf("norm"))?;
        a2.checked_sub(&b2).ok_or(ovf("norm"))
    }

    /// Exact sign of the real value.
    pub fn signum(&self) -> Result<Ordering, ArithError> {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        Ok(match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            (sa, _) => {
                let a2 = self.a.checked_mul(&self.a).ok_or(ovf("compare"))?;
                let b2 = self
                    .b
                    .checked_mul(&self.b)
                    .and_then(|x| x.checked_mul(&Rational::from_integer(2)))
                    .ok_or(ovf("compare"))?;
                if (a2 > b2) == (sa == Ordering::Greater) {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        })
    }

    pub fn checked_cmp(&self, other: &QuadRat) -> Result<Ordering, ArithError> {
        self.checked_sub(other)?.signum()
    }

    /// Largest integer not exceeding the value, decided exactly.
    pub fn floor(&self) -> Result<i128, ArithError> {
        let guess = self.to_f64().floor();
        if !guess.is_finite() || guess.abs() > 1e30 {
            return Err(ovf("floor"));
        }
        let mut n = guess as i128;
        while self.checked_cmp(&QuadRat::integer(n))? == Ordering::Less {
            n -= 1;
        }
        while self.checked_cmp(&QuadRat::integer(n + 1))? != Ordering::Less {
            n += 1;
        }
        Ok(n)
    }

    /// Nearest integer (ties toward +∞), decided exactly.
    pub fn round(&self) -> Result<i128, ArithError> {
        self.checked_add(&QuadRat::rational(1, 2))?.floor()
    }

    /// Double-precision value with relative error of a few ulps.
    ///
    /// When `a` and `b√2` nearly cancel, the value is evaluated as
    /// `(a² − 2b²)/(a − b√2)` so the cancellation happens in exact arithmetic.
    pub fn to_f64(&self) -> f64 {
        let af = rational_to_f64(&self.a);
        let bf = rational_to_f64(&self.b) * std::f64::consts::SQRT_2;
        let opposite = self.a.is_positive() && self.b.is_negative()
            || self.a.is_negative() && self.b.is_positive();
        if !opposite {
            return af + bf;
        }
        match self.norm() {
            Ok(n) => rational_to_f64(&n) / (af - bf),
            Err(_) => af + bf,
        }
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) => n / d,
        _ => f64::NAN,
    }
}

impl From<Quad> for QuadRat {
    fn from(q: Quad) -> Self {
        QuadRat {
            a: Rational::from_integer(q.a),
            b: Rational::from_integer(q.b),
        }
    }
}

impl fmt::Display for QuadRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}√2", self.a, sign, self.b.abs())
    }
}

impl FromStr for QuadRat {
    type Err = ArithError;

    /// Like [`Quad`]'s parser, with `p/q` fractions allowed for either coefficient.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let input: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |reason| ArithError::Parse {
            input: s.to_string(),
            reason,
        };
        let parse_rat = |t: &str| -> Result<Rational, ArithError> {
            t.parse::<Rational>()
                .map_err(|_| bad("coefficient is not a fraction"))
        };
        if let Ok(a) = input.parse::<Rational>() {
            return Ok(QuadRat {
                a,
                b: Rational::zero(),
            });
        }
        let (a, b) = split_surd(&input).ok_or_else(|| bad("expected a+b√2"))?;
        Ok(QuadRat {
            a: parse_rat(a)?,
            b: parse_rat(b)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i128, b: i128) -> Quad {
        Quad::new(a, b)
    }

    #[test]
    fn addition_examples() {
        assert_eq!(q(1, 1) + q(1, -1), q(2, 0));
        assert_eq!(q(0, 0) + q(3, -2), q(3, -2));
        assert_eq!(q(2, 1) + q(-2, -1), q(0, 0));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(q(1, 1) * q(1, -1), q(-1, 0));
        assert_eq!(q(0, 1) * q(0, 1), q(2, 0));
        assert_eq!(q(0, -1) * q(0, 1), q(-2, 0));
    }

    #[test]
    fn overflow_is_reported() {
        let big = q(i128::MAX, 0);
        assert_eq!(big.checked_add(q(1, 0)), Err(ArithError::Overflow("add")));
        assert_eq!(
            q(0, i128::MAX / 2).checked_mul(q(0, 2)),
            Err(ArithError::Overflow("mul"))
        );
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn operator_overflow_panics_with_diagnostic() {
        let _ = q(i128::MAX, 0) + q(1, 0);
    }

    #[test]
    fn comparison_examples() {
        assert_eq!(compare(q(0, 1), q(1, 0)), Ordering::Greater);
        // 3 vs 2√2: 9 > 8
        assert_eq!(compare(q(3, 0), q(0, 2)), Ordering::Greater);
        assert_eq!(compare(q(1, 1), q(1, 1)), Ordering::Equal);
        // 99 - 70√2 ≈ 0.00505 > 0; 577 - 408√2 ≈ 0.000866 > 0
        assert_eq!(q(99, -70).checked_signum(), Ok(Ordering::Greater));
        assert_eq!(q(-577, 408).checked_signum(), Ok(Ordering::Less));
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(ratio_is_rational(q(2, 0), q(4, 0)), Ok(true));
        assert_eq!(ratio_is_rational(q(0, 2), q(0, 6)), Ok(true));
        // (2b√2) / ((a−c) + (b−d)√2) with a−c ≠ 0, b ≠ 0
        assert_eq!(ratio_is_rational(q(0, 2), q(4, 2)), Ok(false));
        assert_eq!(ratio_is_rational(q(0, 6), q(-3, 0)), Ok(false));
        assert_eq!(
            ratio_is_rational(q(1, 1), q(0, 0)),
            Err(ArithError::DivisionByZero)
        );
    }

    #[test]
    fn float_examples() {
        assert_eq!(q(0, 0).to_f64(), 0.0);
        assert_eq!(q(0, 1).to_f64(), std::f64::consts::SQRT_2);
        assert_eq!(q(1, -1).to_f64(), -0.41421356237309515);
    }

    #[test]
    fn rendering_and_parsing() {
        assert_eq!(q(2, -1).to_string(), "2-1√2");
        assert_eq!(q(0, 1).to_string(), "0+1√2");
        assert_eq!(q(-3, 0).to_ascii(), "-3+0*sqrt2");
        for s in ["2-1√2", "2 - 1√2", "2-1*sqrt2", "-2+1√2"] {
            let x: Quad = s.parse().unwrap();
            assert_eq!(x.a().abs(), 2);
            assert_eq!(x.b().abs(), 1);
        }
        assert_eq!("7".parse::<Quad>(), Ok(q(7, 0)));
        assert_eq!("-1-1√2".parse::<Quad>(), Ok(q(-1, -1)));
        assert!("2+x√2".parse::<Quad>().is_err());
        assert!("√2".parse::<Quad>().is_err());
    }

    #[test]
    fn quadrat_reduces_and_inverts() {
        let x = QuadRat::new(Rational::new(2, 4), Rational::new(-3, -6));
        assert_eq!(x.a(), &Rational::new(1, 2));
        assert_eq!(*x.b().denom(), 2);
        let one = x.checked_mul(&x.checked_recip().unwrap()).unwrap();
        assert_eq!(one, QuadRat::integer(1));
        assert_eq!(
            QuadRat::zero().checked_recip(),
            Err(ArithError::DivisionByZero)
        );
    }

    #[test]
    fn quadrat_powers_of_sqrt2() {
        assert_eq!(QuadRat::sqrt2_pow(0).unwrap(), QuadRat::integer(1));
        assert_eq!(QuadRat::sqrt2_pow(3).unwrap(), QuadRat::from(q(0, 2)));
        let inv = QuadRat::sqrt2_pow(-1).unwrap();
        assert_eq!(inv, QuadRat::new(Rational::zero(), Rational::new(1, 2)));
        assert_eq!(
            inv.checked_mul(&QuadRat::sqrt2_pow(1).unwrap()).unwrap(),
            QuadRat::integer(1)
        );
    }

    #[test]
    fn quadrat_floor_and_precise_float() {
        let s = QuadRat::from(q(0, 1));
        assert_eq!(s.floor(), Ok(1));
        assert_eq!(QuadRat::from(q(0, -1)).floor(), Ok(-2));
        assert_eq!(QuadRat::from(q(1, 1)).round(), Ok(2));
        // -665857 + 470832√2 = -7.509119826032946e-7, mostly cancellation
        let tiny = QuadRat::from(q(-665857, 470832));
        let want = -7.509119826032946e-7;
        assert!((tiny.to_f64() - want).abs() < 1e-21);
        assert_eq!(tiny.floor(), Ok(-1));
    }

    #[test]
    fn quadrat_parse_and_display() {
        let x: QuadRat = "1/2-3/4√2".parse().unwrap();
        assert_eq!(x.a(), &Rational::new(1, 2));
        assert_eq!(x.b(), &Rational::new(-3, 4));
        assert_eq!(x.to_string(), "1/2-3/4√2");
        assert_eq!("5/3".parse::<QuadRat>().unwrap(), QuadRat::rational(5, 3));
    }
}
